//! Line-oriented text formats. Tokens are whitespace separated, `#` starts a
//! comment, blank lines are ignored. Tensor indices are one-based.
//!
//! ```text
//! field rational | field gf <q>
//! matrix <rows> <cols>                      then <rows> lines of scalars
//! tensor <m> <n> <p>                        field, then `i j j' k k' i' scalar`
//! decomposition <m> <n> <p> <terms>         field, then u v w blocks per term
//! element <m> <n> <p>                       field, `perm <π>`, then a b c blocks
//! linmap <r'> <s'> <r> <s>                  field, one (r's')x(rs) block
//! bilinear <zdim> <xdim> <ydim>             field, zdim blocks of xdim x ydim
//! stabilizer <order>                        then <order> element records
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::isotropy::IsotropyElement;
use crate::mat::Mat;
use crate::orbits::StabilizerResult;
use crate::perm::Perm3;
use crate::recovery::{BilinearMap, LinMap};
use crate::tensor::{Decomposition, RankOneTriple, Shape, Tensor3};

struct Reader<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let body = raw.split('#').next().unwrap_or("");
                let toks: Vec<&str> = body.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Reader { lines, pos: 0 }
    }

    fn line_no(&self) -> usize {
        self.lines
            .get(self.pos)
            .or(self.lines.last())
            .map_or(0, |(n, _)| *n)
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let line = self.lines.get(self.pos).cloned().ok_or_else(|| {
            Error::parse(
                self.line_no(),
                format!("unexpected end of input, expected {what}"),
            )
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(Error::parse(self.line_no(), "trailing content"))
        }
    }

    /// A header line `<keyword> <usize>...` with exactly `arity` numbers.
    fn header(&mut self, keyword: &str, arity: usize) -> Result<(usize, Vec<usize>)> {
        let (n, toks) = self.next(keyword)?;
        if toks[0] != keyword {
            return Err(Error::parse(
                n,
                format!("expected `{keyword}`, found `{}`", toks[0]),
            ));
        }
        if toks.len() != arity + 1 {
            return Err(Error::parse(
                n,
                format!("`{keyword}` takes {arity} numbers"),
            ));
        }
        let nums = toks[1..]
            .iter()
            .map(|t| parse_usize(n, t))
            .collect::<Result<Vec<_>>>()?;
        Ok((n, nums))
    }

    fn field(&mut self) -> Result<FieldSpec> {
        let (n, toks) = self.next("field line")?;
        match toks.as_slice() {
            ["field", "rational"] => Ok(FieldSpec::Rationals),
            ["field", "gf", q] => {
                let q = q
                    .parse::<u64>()
                    .map_err(|_| Error::parse(n, format!("bad modulus `{q}`")))?;
                FieldSpec::gf(q).map_err(|e| Error::parse(n, e.to_string()))
            }
            _ => Err(Error::parse(
                n,
                "expected `field rational` or `field gf <q>`",
            )),
        }
    }

    fn matrix(&mut self, field: FieldSpec) -> Result<Mat> {
        let (n, dims) = self.header("matrix", 2)?;
        let (rows, cols) = (dims[0], dims[1]);
        if rows == 0 || cols == 0 {
            return Err(Error::parse(n, "matrix dimensions must be positive"));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (ln, toks) = self.next("matrix row")?;
            if toks.len() != cols {
                return Err(Error::parse(
                    ln,
                    format!("expected {cols} entries, found {}", toks.len()),
                ));
            }
            for t in toks {
                entries.push(field.parse_scalar(t).map_err(|e| Error::parse(ln, e))?);
            }
        }
        Mat::from_entries(rows, cols, field, entries).map_err(|e| Error::parse(n, e.to_string()))
    }

    fn matrix_of(&mut self, field: FieldSpec, dims: (usize, usize), name: &str) -> Result<Mat> {
        let n = self.line_no();
        let m = self.matrix(field)?;
        if m.dims() != dims {
            return Err(Error::parse(
                n,
                format!(
                    "{name} must be {}x{}, found {}x{}",
                    dims.0,
                    dims.1,
                    m.rows(),
                    m.cols()
                ),
            ));
        }
        Ok(m)
    }

    fn shape(&mut self, keyword: &str, extra: usize) -> Result<(usize, Shape, Vec<usize>)> {
        let (n, nums) = self.header(keyword, 3 + extra)?;
        let shape =
            Shape::new(nums[0], nums[1], nums[2]).map_err(|e| Error::parse(n, e.to_string()))?;
        Ok((n, shape, nums[3..].to_vec()))
    }
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| {
        Error::parse(
            line,
            format!("expected a nonnegative integer, found `{tok}`"),
        )
    })
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

pub fn write_field(out: &mut String, field: FieldSpec) {
    match field.modulus() {
        None => out.push_str("field rational\n"),
        Some(q) => writeln!(out, "field gf {q}").expect("string write"),
    }
}

pub fn write_matrix(out: &mut String, m: &Mat) {
    writeln!(out, "matrix {} {}", m.rows(), m.cols()).expect("string write");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// A standalone matrix file: field line then one block.
pub fn matrix_to_string(m: &Mat) -> String {
    let mut s = String::new();
    write_field(&mut s, m.field());
    write_matrix(&mut s, m);
    s
}

pub fn parse_matrix(text: &str) -> Result<Mat> {
    let mut r = Reader::new(text);
    let field = r.field()?;
    let m = r.matrix(field)?;
    r.finish()?;
    Ok(m)
}

pub fn tensor_to_string(t: &Tensor3) -> String {
    let Shape { m, n, p } = t.shape();
    let mut s = format!("tensor {m} {n} {p}\n");
    write_field(&mut s, t.field());
    for (idx, v) in t.nonzeros() {
        let one_based: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(s, "{} {v}", one_based.join(" ")).expect("string write");
    }
    s
}

pub fn parse_tensor(text: &str) -> Result<Tensor3> {
    let mut r = Reader::new(text);
    let (_, shape, _) = r.shape("tensor", 0)?;
    let field = r.field()?;
    let Shape { m, n, p } = shape;
    let bounds = [m, n, n, p, p, m];
    let mut t = Tensor3::zeros(shape, field);
    while !r.at_end() {
        let (ln, toks) = r.next("coefficient")?;
        if toks.len() != 7 {
            return Err(Error::parse(
                ln,
                "coefficient lines are `i j j' k k' i' scalar`",
            ));
        }
        let mut idx = [0usize; 6];
        for (slot, tok) in toks[..6].iter().enumerate() {
            let v = parse_usize(ln, tok)?;
            if v == 0 || v > bounds[slot] {
                return Err(Error::parse(
                    ln,
                    format!("index {v} out of range 1..={}", bounds[slot]),
                ));
            }
            idx[slot] = v - 1;
        }
        let value = field
            .parse_scalar(toks[6])
            .map_err(|e| Error::parse(ln, e))?;
        if value.is_zero() {
            return Err(Error::parse(
                ln,
                "zero coefficients are omitted, not listed",
            ));
        }
        if !t.get(idx).is_zero() {
            return Err(Error::parse(ln, "duplicate coefficient"));
        }
        t.set(idx, value);
    }
    Ok(t)
}

pub fn decomposition_to_string(d: &Decomposition) -> String {
    let Shape { m, n, p } = d.shape();
    let mut s = format!("decomposition {m} {n} {p} {}\n", d.len());
    write_field(&mut s, d.field());
    for (k, term) in d.terms().iter().enumerate() {
        writeln!(s, "# term {}", k + 1).expect("string write");
        write_matrix(&mut s, term.u());
        write_matrix(&mut s, term.v());
        write_matrix(&mut s, term.w());
    }
    s
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition> {
    let mut r = Reader::new(text);
    let (hl, shape, extra) = r.shape("decomposition", 1)?;
    let field = r.field()?;
    let [su, sv, sw] = shape.factor_shapes();
    let mut terms = Vec::with_capacity(extra[0]);
    for _ in 0..extra[0] {
        let ln = r.line_no();
        let u = r.matrix_of(field, su, "u")?;
        let v = r.matrix_of(field, sv, "v")?;
        let w = r.matrix_of(field, sw, "w")?;
        terms.push(at_line(ln, RankOneTriple::new(u, v, w))?);
    }
    r.finish()?;
    at_line(hl, Decomposition::new(shape, field, terms))
}

fn write_element(out: &mut String, g: &IsotropyElement) {
    let Shape { m, n, p } = g.shape();
    writeln!(out, "element {m} {n} {p}").expect("string write");
    write_field(out, g.field());
    writeln!(out, "perm {}", g.pi()).expect("string write");
    write_matrix(out, g.a());
    write_matrix(out, g.b());
    write_matrix(out, g.c());
}

fn read_element(r: &mut Reader<'_>) -> Result<IsotropyElement> {
    let (hl, shape, _) = r.shape("element", 0)?;
    let field = r.field()?;
    let (pl, toks) = r.next("perm line")?;
    let pi = match toks.as_slice() {
        ["perm", label] => label
            .parse::<Perm3>()
            .map_err(|_| Error::parse(pl, format!("unknown permutation `{label}`")))?,
        _ => return Err(Error::parse(pl, "expected `perm <id|12|13|23|123|132>`")),
    };
    let [m, n, p] = shape.gl_sizes();
    let a = r.matrix_of(field, (m, m), "a")?;
    let b = r.matrix_of(field, (n, n), "b")?;
    let c = r.matrix_of(field, (p, p), "c")?;
    at_line(hl, IsotropyElement::new(shape, pi, a, b, c))
}

pub fn element_to_string(g: &IsotropyElement) -> String {
    let mut s = String::new();
    write_element(&mut s, g);
    s
}

pub fn parse_element(text: &str) -> Result<IsotropyElement> {
    let mut r = Reader::new(text);
    let g = read_element(&mut r)?;
    r.finish()?;
    Ok(g)
}

pub fn linmap_to_string(f: &LinMap) -> String {
    let ((r2, s2), (r, s)) = (f.codomain(), f.domain());
    let mut out = format!("linmap {r2} {s2} {r} {s}\n");
    write_field(&mut out, f.field());
    write_matrix(&mut out, f.coeffs());
    out
}

pub fn parse_linmap(text: &str) -> Result<LinMap> {
    let mut r = Reader::new(text);
    let (hl, d) = r.header("linmap", 4)?;
    if d.contains(&0) {
        return Err(Error::parse(hl, "linmap dimensions must be positive"));
    }
    let field = r.field()?;
    let coeffs = r.matrix_of(field, (d[0] * d[1], d[2] * d[3]), "linmap matrix")?;
    r.finish()?;
    at_line(hl, LinMap::new((d[2], d[3]), (d[0], d[1]), coeffs))
}

pub fn bilinear_to_string(f: &BilinearMap) -> String {
    let [xd, yd, zd] = f.dims();
    let mut out = format!("bilinear {zd} {xd} {yd}\n");
    write_field(&mut out, f.field());
    for block in f.coeffs() {
        write_matrix(&mut out, block);
    }
    out
}

/// The file records only dimensions, so the result acts on column vectors.
pub fn parse_bilinear(text: &str) -> Result<BilinearMap> {
    let mut r = Reader::new(text);
    let (hl, d) = r.header("bilinear", 3)?;
    if d.contains(&0) {
        return Err(Error::parse(hl, "bilinear dimensions must be positive"));
    }
    let field = r.field()?;
    let (zd, xd, yd) = (d[0], d[1], d[2]);
    let blocks = (0..zd)
        .map(|_| r.matrix_of(field, (xd, yd), "bilinear block"))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    at_line(hl, BilinearMap::on_vectors(xd, yd, zd, blocks))
}

pub fn stabilizer_to_string(s: &StabilizerResult) -> String {
    let mut out = format!("stabilizer {}\n", s.order);
    for g in &s.elements {
        write_element(&mut out, g);
    }
    out
}

/// Re-verifies closure of the parsed elements.
pub fn parse_stabilizer(text: &str) -> Result<StabilizerResult> {
    let mut r = Reader::new(text);
    let (_, d) = r.header("stabilizer", 1)?;
    let elements = (0..d[0])
        .map(|_| read_element(&mut r))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let closed = crate::orbits::is_closed_subgroup(&elements)?;
    Ok(StabilizerResult {
        order: elements.len(),
        elements,
        closed,
    })
}
