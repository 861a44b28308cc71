//! Recovering sandwich forms from raw linear maps of matrix spaces, structure
//! tensors of bilinear maps, and the bridge between the isotropy group of a
//! bilinear map and the small isotropy group of its structure tensor.
//!
//! Conventions:
//!
//! * A [`LinMap`] acts on column-major flattened matrices (`x[i][j]` sits at
//!   `i + j·rows`). Bilinear maps use the same flattening for `X`, `Y`, `Z`.
//! * `M_{a,b}` and `M_{b,a}` are dual through `⟨x, y⟩ = Tr(xy)`; every dual
//!   basis and contragredient map is derived from [`pairing_matrix`].

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::isotropy::{self, IsotropyElement};
use crate::mat::Mat;
use crate::tensor::{build_mmt, Cube, Shape, Tensor3};

pub type MatShape = (usize, usize);

/// A linear map `M_{r,s} → M_{r',s'}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinMap {
    domain: MatShape,
    codomain: MatShape,
    coeffs: Mat,
}

impl LinMap {
    pub fn new(domain: MatShape, codomain: MatShape, coeffs: Mat) -> Result<Self> {
        let want = (codomain.0 * codomain.1, domain.0 * domain.1);
        if coeffs.dims() != want {
            return Err(Error::dims(format!(
                "linmap {:?} -> {:?} needs a {}x{} matrix, got {}x{}",
                domain,
                codomain,
                want.0,
                want.1,
                coeffs.rows(),
                coeffs.cols()
            )));
        }
        Ok(LinMap {
            domain,
            codomain,
            coeffs,
        })
    }

    /// Tabulates `f` on the basis `e_{ij}` (column-major order).
    pub fn from_fn(
        domain: MatShape,
        codomain: MatShape,
        field: FieldSpec,
        f: impl Fn(&Mat) -> Result<Mat>,
    ) -> Result<Self> {
        let (r, s) = domain;
        let mut columns = Vec::with_capacity(r * s);
        for j in 0..s {
            for i in 0..r {
                let img = f(&Mat::unit(r, s, i, j, field))?;
                if img.dims() != codomain {
                    return Err(Error::dims("image has the wrong shape"));
                }
                columns.push(img.vec_col_major());
            }
        }
        let rows = codomain.0 * codomain.1;
        let coeffs = Mat::from_fn(rows, r * s, field, |i, j| columns[j][i].clone());
        Ok(LinMap {
            domain,
            codomain,
            coeffs,
        })
    }

    pub fn identity(shape: MatShape, field: FieldSpec) -> Self {
        LinMap {
            domain: shape,
            codomain: shape,
            coeffs: Mat::identity(shape.0 * shape.1, field),
        }
    }

    /// `x ↦ a x b`.
    pub fn sandwich(a: &Mat, b: &Mat) -> Result<Self> {
        let domain = (a.cols(), b.rows());
        LinMap::from_fn(domain, (a.rows(), b.cols()), a.field(), |x| {
            a.mul(x)?.mul(b)
        })
    }

    /// `x ↦ a xᵗ b`.
    pub fn transpose_sandwich(a: &Mat, b: &Mat) -> Result<Self> {
        let domain = (b.rows(), a.cols());
        LinMap::from_fn(domain, (a.rows(), b.cols()), a.field(), |x| {
            a.mul(&x.transpose())?.mul(b)
        })
    }

    /// Wraps a square matrix acting on row-major flattenings of `M_{r,s}`.
    pub fn from_row_major_action(shape: MatShape, m: &Mat) -> Result<Self> {
        let (r, s) = shape;
        if m.dims() != (r * s, r * s) {
            return Err(Error::dims("row-major action has the wrong size"));
        }
        let field = m.field();
        LinMap::from_fn(shape, shape, field, |x| {
            Ok(Mat::from_row_major(
                r,
                s,
                field,
                &m.apply_vec(&x.vec_row_major()),
            ))
        })
    }

    /// The matrix of this map on row-major flattenings (as used by [`Tensor3`]).
    pub fn row_major_action(&self) -> Mat {
        let (r, s) = self.domain;
        let (r2, s2) = self.codomain;
        let field = self.field();
        let mut cols = Vec::with_capacity(r * s);
        for i in 0..r {
            for j in 0..s {
                let img = self
                    .apply(&Mat::unit(r, s, i, j, field))
                    .expect("shape checked");
                cols.push(img.vec_row_major());
            }
        }
        Mat::from_fn(r2 * s2, r * s, field, |i, j| cols[j][i].clone())
    }

    pub fn domain(&self) -> MatShape {
        self.domain
    }

    pub fn codomain(&self) -> MatShape {
        self.codomain
    }

    pub fn field(&self) -> FieldSpec {
        self.coeffs.field()
    }

    pub fn coeffs(&self) -> &Mat {
        &self.coeffs
    }

    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        if x.dims() != self.domain {
            return Err(Error::dims(format!(
                "linmap expects {:?}, got {:?}",
                self.domain,
                x.dims()
            )));
        }
        if x.field() != self.field() {
            return Err(Error::FieldMismatch {
                left: self.field(),
                right: x.field(),
            });
        }
        let (r, s) = self.codomain;
        Ok(Mat::from_col_major(
            r,
            s,
            self.field(),
            &self.coeffs.apply_vec(&x.vec_col_major()),
        ))
    }

    pub fn scale(&self, lambda: &Scalar) -> LinMap {
        LinMap {
            coeffs: self.coeffs.scale(lambda),
            ..self.clone()
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.coeffs.is_invertible()
    }

    /// Contragredient with respect to the trace pairing: for `A` on `M_{a,b}`
    /// returns the map `A^∨` on `M_{b,a}` with `Tr(A(x)·A^∨(y)) = Tr(x·y)`.
    pub fn trace_dual(&self) -> Result<LinMap> {
        if self.domain != self.codomain {
            return Err(Error::dims("trace dual needs an endomorphism"));
        }
        let (a, b) = self.domain;
        let field = self.field();
        let pairing = pairing_matrix(a, b, field);
        // Aᵗ P D = P  ⇒  D = P⁻¹ A^{-t} P
        let d = pairing
            .inverse()?
            .mul(&self.coeffs.contragredient()?)?
            .mul(&pairing)?;
        LinMap::new((b, a), (b, a), d)
    }
}

/// `P[α][β] = Tr(e_α f_β)` for the column-major bases `e_α` of `M_{a,b}` and
/// `f_β` of `M_{b,a}`.
pub fn pairing_matrix(a: usize, b: usize, field: FieldSpec) -> Mat {
    let basis =
        |rows: usize, cols: usize, idx: usize| Mat::unit(rows, cols, idx % rows, idx / rows, field);
    Mat::from_fn(a * b, a * b, field, |alpha, beta| {
        basis(a, b, alpha)
            .trace_pairing(&basis(b, a, beta))
            .expect("conformable")
    })
}

/// The basis of `M_{b,a}` dual to the column-major basis of `M_{a,b}` under
/// the trace pairing, in the same order.
pub fn trace_dual_basis(a: usize, b: usize, field: FieldSpec) -> Vec<Mat> {
    let p_inv = pairing_matrix(a, b, field)
        .inverse()
        .expect("pairing is nondegenerate");
    (0..a * b)
        .map(|alpha| {
            let coords: Vec<Scalar> = (0..a * b)
                .map(|beta| p_inv.get(beta, alpha).clone())
                .collect();
            Mat::from_col_major(b, a, field, &coords)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// `x ↦ a x b`
    Sandwich,
    /// `x ↦ a xᵗ b` (square matrices only)
    TransposeSandwich,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredForm {
    pub kind: FormKind,
    pub a: Mat,
    pub b: Mat,
}

impl RecoveredForm {
    pub fn to_linmap(&self) -> Result<LinMap> {
        match self.kind {
            FormKind::Sandwich => LinMap::sandwich(&self.a, &self.b),
            FormKind::TransposeSandwich => LinMap::transpose_sandwich(&self.a, &self.b),
        }
    }
}

fn rank_one_factors(x: &Mat) -> Option<(Mat, Mat)> {
    if x.rank() != 1 {
        return None;
    }
    let (idx, pivot) = x.first_nonzero()?;
    let (r0, c0) = (idx / x.cols(), idx % x.cols());
    let col = Mat::from_row_major(x.rows(), 1, x.field(), &x.column(c0));
    let inv = pivot.inv()?;
    let row = Mat::from_row_major(1, x.cols(), x.field(), x.row(r0)).scale(&inv);
    Some((col, row))
}

fn parallel(x: &Mat, y: &Mat) -> bool {
    x.proportionality(y).is_some()
}

/// Finds `(a, b)` with `A(x) = a x b` or `A(x) = a xᵗ b` for an invertible map
/// `A` of `M_{m,n}` that preserves rank one.
///
/// The images of the matrix units are factored as column·row. In the sandwich
/// case the column space of `A(e_ij)` depends only on `i`; in the transpose
/// case only on `j`. Writing `A(e_ij) = λ_ij â_i b̂_j`, the scalar matrix `λ`
/// must have rank one, and its factors scale the columns of `a` and rows of
/// `b`. The result is verified against `A` on every basis element before it
/// is returned, so a successful return is a proof of the form.
pub fn classify_rank1_preserver(map: &LinMap) -> Result<RecoveredForm> {
    let (m, n) = map.domain;
    if map.codomain != map.domain {
        return Err(Error::dims("rank-one classification needs an endomorphism"));
    }
    if !map.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let field = map.field();
    let mut cols = vec![Vec::with_capacity(n); m];
    let mut rows = vec![Vec::with_capacity(n); m];
    let mut images = vec![Vec::with_capacity(n); m];
    for i in 0..m {
        for j in 0..n {
            let img = map.apply(&Mat::unit(m, n, i, j, field))?;
            let (c, r) = rank_one_factors(&img).ok_or_else(|| {
                Error::NotRankOnePreserving(format!(
                    "image of e_{}{} has rank {}",
                    i + 1,
                    j + 1,
                    img.rank()
                ))
            })?;
            cols[i].push(c);
            rows[i].push(r);
            images[i].push(img);
        }
    }

    let all = |pred: &dyn Fn(usize, usize) -> bool| (0..m).all(|i| (0..n).all(|j| pred(i, j)));
    let sandwich =
        all(&|i, j| parallel(&cols[i][j], &cols[i][0]) && parallel(&rows[i][j], &rows[0][j]));
    let transposed = m == n
        && all(&|i, j| parallel(&cols[i][j], &cols[0][j]) && parallel(&rows[i][j], &rows[i][0]));

    let kind = if sandwich {
        FormKind::Sandwich
    } else if transposed {
        FormKind::TransposeSandwich
    } else {
        return Err(Error::NotRankOnePreserving(
            "column and row spaces of unit images are inconsistent".into(),
        ));
    };

    // generator for the column part of A(e_ij) and for its row part
    let col_gen = |i: usize, j: usize| match kind {
        FormKind::Sandwich => &cols[i][0],
        FormKind::TransposeSandwich => &cols[0][j],
    };
    let row_gen = |i: usize, j: usize| match kind {
        FormKind::Sandwich => &rows[0][j],
        FormKind::TransposeSandwich => &rows[i][0],
    };
    let mut lambda = vec![Vec::with_capacity(n); m];
    for (i, row) in images.iter().enumerate() {
        for (j, image) in row.iter().enumerate() {
            let base = col_gen(i, j).mul(row_gen(i, j))?;
            let l = base.proportionality(image).ok_or_else(|| {
                Error::NotRankOnePreserving(format!(
                    "image of e_{}{} is off its predicted line",
                    i + 1,
                    j + 1
                ))
            })?;
            lambda[i].push(l);
        }
    }
    let l00_inv = lambda[0][0].inv().expect("nonzero");
    for i in 0..m {
        for j in 0..n {
            if &lambda[i][j] * &lambda[0][0] != &lambda[i][0] * &lambda[0][j] {
                return Err(Error::NotRankOnePreserving(
                    "scalar matrix is not rank one".into(),
                ));
            }
        }
    }

    // a has columns α_k â_k, b has rows β_k b̂_k
    let (a_cols, b_rows): (Vec<Mat>, Vec<Mat>) = match kind {
        FormKind::Sandwich => (
            (0..m).map(|i| cols[i][0].scale(&lambda[i][0])).collect(),
            (0..n)
                .map(|j| rows[0][j].scale(&(&lambda[0][j] * &l00_inv)))
                .collect(),
        ),
        FormKind::TransposeSandwich => (
            (0..n).map(|j| cols[0][j].scale(&lambda[0][j])).collect(),
            (0..m)
                .map(|i| rows[i][0].scale(&(&lambda[i][0] * &l00_inv)))
                .collect(),
        ),
    };
    let a = Mat::from_fn(m, a_cols.len(), field, |r, k| a_cols[k].get(r, 0).clone());
    let b = Mat::from_fn(b_rows.len(), n, field, |k, c| b_rows[k].get(0, c).clone());
    if !a.is_invertible() || !b.is_invertible() {
        return Err(Error::NotRankOnePreserving(
            "recovered factors are singular".into(),
        ));
    }

    let (a, lead) = a.normalized();
    let b = b.scale(&lead);
    let form = RecoveredForm { kind, a, b };
    if form.to_linmap()? != *map {
        return Err(Error::NotRankOnePreserving(
            "recovered form disagrees with the map on the basis".into(),
        ));
    }
    Ok(form)
}

/// For maps with `A(x)B(y) = C(xy)` on `M_{r,s} × M_{s,u} → M_{r,u}`,
/// returns `(a, b, c)` with `A(x) = a x b`, `B(y) = b⁻¹ y c`, `C(z) = a z c`.
/// `a` is normalized (first nonzero entry one).
pub fn recover_multiplicative(
    a_map: &LinMap,
    b_map: &LinMap,
    c_map: &LinMap,
) -> Result<(Mat, Mat, Mat)> {
    let (r, s) = a_map.domain;
    let (s2, u) = b_map.domain;
    if s2 != s || c_map.domain != (r, u) {
        return Err(Error::dims("maps do not act on M_rs, M_su, M_ru"));
    }
    for (f, shape) in [(a_map, (r, s)), (b_map, (s, u)), (c_map, (r, u))] {
        if f.codomain != shape {
            return Err(Error::dims("maps must be endomorphisms"));
        }
    }
    let field = a_map.field();
    if b_map.field() != field || c_map.field() != field {
        return Err(Error::FieldMismatch {
            left: field,
            right: b_map.field(),
        });
    }
    for f in [a_map, b_map, c_map] {
        if !f.is_invertible() {
            return Err(Error::NotInvertible);
        }
    }
    check_multiplicative(a_map, b_map, c_map)?;

    let fa = classify_rank1_preserver(a_map).map_err(|_| Error::NotMultiplicative)?;
    let fb = classify_rank1_preserver(b_map).map_err(|_| Error::NotMultiplicative)?;
    if fa.kind != FormKind::Sandwich || fb.kind != FormKind::Sandwich {
        return Err(Error::NotSandwichForm);
    }
    // A(x) = a x b₀, B(y) = b₁ y c₁ with b₀ b₁ = λE
    let lambda =
        fa.b.mul(&fb.a)?
            .scalar_value()
            .filter(|l| !l.is_zero())
            .ok_or(Error::NotMultiplicative)?;
    let a = fa.a;
    let b = fa.b;
    let c = fb.b.scale(&lambda);
    if LinMap::sandwich(&a, &c)? != *c_map {
        return Err(Error::NotMultiplicative);
    }
    Ok((a, b, c))
}

fn check_multiplicative(a_map: &LinMap, b_map: &LinMap, c_map: &LinMap) -> Result<()> {
    let field = a_map.field();
    let (r, s) = a_map.domain;
    let (_, u) = b_map.domain;
    let a_imgs: Vec<(Mat, Mat)> = (0..r * s)
        .map(|idx| {
            let x = Mat::unit(r, s, idx % r, idx / r, field);
            a_map.apply(&x).map(|ax| (x, ax))
        })
        .collect::<Result<_>>()?;
    let b_imgs: Vec<(Mat, Mat)> = (0..s * u)
        .map(|idx| {
            let y = Mat::unit(s, u, idx % s, idx / s, field);
            b_map.apply(&y).map(|by| (y, by))
        })
        .collect::<Result<_>>()?;
    for (x, ax) in &a_imgs {
        for (y, by) in &b_imgs {
            if ax.mul(by)? != c_map.apply(&x.mul(y)?)? {
                return Err(Error::NotMultiplicative);
            }
        }
    }
    Ok(())
}

/// Triple recovery for the composition map `φ(x, y) = yx` on
/// `M_{n,m} × M_{p,n} → M_{p,m}`: given `A` on `M_{n,m}`, `B` on `M_{p,n}`
/// and `C` on `M_{p,m}` with `B(y)A(x) = C(yx)`, returns `(a, b, c)` in
/// `GL_p × GL_n × GL_m` such that `B(y) = a y b`, `A(x) = b⁻¹ x c` and
/// `C(z) = a z c`.
pub fn recover_triple(a_map: &LinMap, b_map: &LinMap, c_map: &LinMap) -> Result<(Mat, Mat, Mat)> {
    recover_multiplicative(b_map, a_map, c_map)
}

/// A bilinear map `X × Y → Z` between matrix spaces, stored as
/// `coeffs[z]` = the `dim X × dim Y` matrix of the `z`-th output coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearMap {
    x_shape: MatShape,
    y_shape: MatShape,
    z_shape: MatShape,
    coeffs: Vec<Mat>,
}

impl BilinearMap {
    pub fn new(
        x_shape: MatShape,
        y_shape: MatShape,
        z_shape: MatShape,
        coeffs: Vec<Mat>,
    ) -> Result<Self> {
        let (xd, yd, zd) = (
            x_shape.0 * x_shape.1,
            y_shape.0 * y_shape.1,
            z_shape.0 * z_shape.1,
        );
        if coeffs.len() != zd || coeffs.iter().any(|c| c.dims() != (xd, yd)) {
            return Err(Error::dims(format!(
                "bilinear map needs {zd} blocks of {xd}x{yd}"
            )));
        }
        Ok(BilinearMap {
            x_shape,
            y_shape,
            z_shape,
            coeffs,
        })
    }

    /// Bilinear map on plain coordinate spaces of the given dimensions.
    pub fn on_vectors(xdim: usize, ydim: usize, zdim: usize, coeffs: Vec<Mat>) -> Result<Self> {
        BilinearMap::new((xdim, 1), (ydim, 1), (zdim, 1), coeffs)
    }

    pub fn from_fn(
        x_shape: MatShape,
        y_shape: MatShape,
        z_shape: MatShape,
        field: FieldSpec,
        f: impl Fn(&Mat, &Mat) -> Result<Mat>,
    ) -> Result<Self> {
        let (xd, yd, zd) = (
            x_shape.0 * x_shape.1,
            y_shape.0 * y_shape.1,
            z_shape.0 * z_shape.1,
        );
        let basis =
            |(r, _): MatShape, s: MatShape, idx: usize| Mat::unit(r, s.1, idx % r, idx / r, field);
        let mut coeffs = vec![Mat::zeros(xd, yd, field); zd];
        for xi in 0..xd {
            let x = basis(x_shape, x_shape, xi);
            for yi in 0..yd {
                let y = basis(y_shape, y_shape, yi);
                let z = f(&x, &y)?;
                if z.dims() != z_shape {
                    return Err(Error::dims("bilinear image has the wrong shape"));
                }
                for (zi, v) in z.vec_col_major().into_iter().enumerate() {
                    coeffs[zi].set(xi, yi, v);
                }
            }
        }
        Ok(BilinearMap {
            x_shape,
            y_shape,
            z_shape,
            coeffs,
        })
    }

    pub fn x_shape(&self) -> MatShape {
        self.x_shape
    }

    pub fn y_shape(&self) -> MatShape {
        self.y_shape
    }

    pub fn z_shape(&self) -> MatShape {
        self.z_shape
    }

    pub fn dims(&self) -> [usize; 3] {
        [
            self.x_shape.0 * self.x_shape.1,
            self.y_shape.0 * self.y_shape.1,
            self.z_shape.0 * self.z_shape.1,
        ]
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    pub fn field(&self) -> FieldSpec {
        self.coeffs.first().map_or(FieldSpec::Rationals, Mat::field)
    }

    /// Evaluates on coordinate vectors.
    pub fn eval_vec(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let field = self.field();
        self.coeffs
            .iter()
            .map(|block| {
                let by = block.apply_vec(y);
                x.iter()
                    .zip(&by)
                    .fold(field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn eval(&self, x: &Mat, y: &Mat) -> Result<Mat> {
        if x.dims() != self.x_shape || y.dims() != self.y_shape {
            return Err(Error::dims("arguments do not match the bilinear map"));
        }
        let (r, s) = self.z_shape;
        Ok(Mat::from_col_major(
            r,
            s,
            self.field(),
            &self.eval_vec(&x.vec_col_major(), &y.vec_col_major()),
        ))
    }

    /// `(g·f)(x, y) = g₃ f(g₁⁻¹ x, g₂⁻¹ y)`, each `gᵢ` a square matrix on the
    /// flattened coordinates.
    pub fn act(&self, g1: &Mat, g2: &Mat, g3: &Mat) -> Result<BilinearMap> {
        let [xd, yd, zd] = self.dims();
        if g1.dims() != (xd, xd) || g2.dims() != (yd, yd) || g3.dims() != (zd, zd) {
            return Err(Error::dims("group element does not match the spaces"));
        }
        let (g1i, g2i) = (g1.inverse()?, g2.inverse()?);
        let field = self.field();
        let mut coeffs = vec![Mat::zeros(xd, yd, field); zd];
        for xi in 0..xd {
            let x = g1i.column(xi);
            for yi in 0..yd {
                let y = g2i.column(yi);
                let z = g3.apply_vec(&self.eval_vec(&x, &y));
                for (zi, v) in z.into_iter().enumerate() {
                    coeffs[zi].set(xi, yi, v);
                }
            }
        }
        Ok(BilinearMap {
            coeffs,
            ..self.clone()
        })
    }
}

/// `φ(x, y) = yx` on `M_{n,m} × M_{p,n} → M_{p,m}`.
pub fn composition_map(shape: Shape, field: FieldSpec) -> BilinearMap {
    let Shape { m, n, p } = shape;
    BilinearMap::from_fn((n, m), (p, n), (p, m), field, |x, y| y.mul(x)).expect("conformable")
}

/// Structure tensor in `X* ⊗ Y* ⊗ Z`, coordinates with respect to the dual
/// bases of `X` and `Y` and the basis of `Z`.
pub fn structure_tensor(f: &BilinearMap) -> Cube {
    let [xd, yd, zd] = f.dims();
    let mut cube = Cube::zeros([xd, yd, zd], f.field());
    for (zi, block) in f.coeffs.iter().enumerate() {
        for xi in 0..xd {
            for yi in 0..yd {
                let v = block.get(xi, yi);
                if !v.is_zero() {
                    cube.set([xi, yi, zi], v.clone());
                }
            }
        }
    }
    cube
}

/// Structure tensor of `f: M_{n,m} × M_{p,n} → M_{p,m}` read in
/// `L = M_{m,n} ⊗ M_{n,p} ⊗ M_{p,m}`, using the trace pairing to identify
/// `M_{n,m}*` with `M_{m,n}` and `M_{p,n}*` with `M_{n,p}`.
pub fn structure_tensor_in_l(f: &BilinearMap, shape: Shape) -> Result<Tensor3> {
    let Shape { m, n, p } = shape;
    if f.x_shape != (n, m) || f.y_shape != (p, n) || f.z_shape != (p, m) {
        return Err(Error::dims(format!(
            "bilinear map is not M_nm x M_pn -> M_pm for shape {shape}"
        )));
    }
    let field = f.field();
    let x_duals = trace_dual_basis(n, m, field);
    let y_duals = trace_dual_basis(p, n, field);
    let cube = structure_tensor(f);
    let mut t = Tensor3::zeros(shape, field);
    for ([xi, yi, zi], c) in cube.nonzeros() {
        let z = Mat::unit(p, m, zi % p, zi / p, field);
        t = t.add(&Tensor3::outer(
            shape,
            &x_duals[xi].scale(c),
            &y_duals[yi],
            &z,
        )?)?;
    }
    Ok(t)
}

/// `(A, B, C) ∈ Δ(f)`: `f(Ax, By) = C f(x, y)` on all basis pairs.
pub fn delta_membership(
    a_map: &LinMap,
    b_map: &LinMap,
    c_map: &LinMap,
    f: &BilinearMap,
) -> Result<bool> {
    if a_map.domain != f.x_shape
        || a_map.codomain != f.x_shape
        || b_map.domain != f.y_shape
        || b_map.codomain != f.y_shape
        || c_map.domain != f.z_shape
        || c_map.codomain != f.z_shape
    {
        return Err(Error::dims("maps do not match the bilinear map"));
    }
    let field = f.field();
    let [xd, yd, _] = f.dims();
    for xi in 0..xd {
        let x = Mat::unit(
            f.x_shape.0,
            f.x_shape.1,
            xi % f.x_shape.0,
            xi / f.x_shape.0,
            field,
        );
        let ax = a_map.apply(&x)?;
        for yi in 0..yd {
            let y = Mat::unit(
                f.y_shape.0,
                f.y_shape.1,
                yi % f.y_shape.0,
                yi / f.y_shape.0,
                field,
            );
            if f.eval(&ax, &b_map.apply(&y)?)? != c_map.apply(&f.eval(&x, &y)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A factor-preserving linear map of `L`, one [`LinMap`] per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorwiseMap {
    shape: Shape,
    factors: [LinMap; 3],
}

impl FactorwiseMap {
    pub fn new(shape: Shape, factors: [LinMap; 3]) -> Result<Self> {
        for (f, s) in factors.iter().zip(shape.factor_shapes()) {
            if f.domain != s || f.codomain != s {
                return Err(Error::dims(format!(
                    "factor maps do not act on the factors of {shape}"
                )));
            }
        }
        Ok(FactorwiseMap { shape, factors })
    }

    pub fn factors(&self) -> &[LinMap; 3] {
        &self.factors
    }

    pub fn apply(&self, t: &Tensor3) -> Result<Tensor3> {
        if t.shape() != self.shape {
            return Err(Error::dims("tensor shape differs"));
        }
        let [f1, f2, f3] = self.factors.each_ref().map(LinMap::row_major_action);
        t.map_factors([&f1, &f2, &f3])
    }
}

/// `R(g) = (A, B, C)` for `g = (g₁, g₂, g₃) ∈ GL_m × GL_n × GL_p`:
/// `Ax = g₂ x g₁⁻¹` on `M_{n,m}`, `By = g₃ y g₂⁻¹` on `M_{p,n}`,
/// `Cz = g₃ z g₁⁻¹` on `M_{p,m}`. Always a member of `Δ(φ)` for the
/// composition map.
pub fn r_triple(g1: &Mat, g2: &Mat, g3: &Mat) -> Result<(LinMap, LinMap, LinMap)> {
    let (g1i, g2i) = (g1.inverse()?, g2.inverse()?);
    Ok((
        LinMap::sandwich(g2, &g1i)?,
        LinMap::sandwich(g3, &g2i)?,
        LinMap::sandwich(g3, &g1i)?,
    ))
}

/// `A^∨ ⊗ B^∨ ⊗ C` on `L` for `A` on `M_{n,m}`, `B` on `M_{p,n}`, `C` on
/// `M_{p,m}`, together with its `T(a,b,c)` form when `(A, B, C)` satisfies
/// the multiplicativity hypothesis.
pub fn gamma_from_delta(
    a_map: &LinMap,
    b_map: &LinMap,
    c_map: &LinMap,
) -> Result<(FactorwiseMap, Option<IsotropyElement>)> {
    let (n, m) = a_map.domain;
    let (p, n2) = b_map.domain;
    if n2 != n || c_map.domain != (p, m) {
        return Err(Error::dims("maps do not act on M_nm, M_pn, M_pm"));
    }
    let shape = Shape::new(m, n, p)?;
    for f in [a_map, b_map, c_map] {
        if !f.is_invertible() {
            return Err(Error::NotInvertible);
        }
    }
    let induced = FactorwiseMap::new(
        shape,
        [a_map.trace_dual()?, b_map.trace_dual()?, c_map.clone()],
    )?;
    let element = match recover_triple(a_map, b_map, c_map) {
        Ok(triple) => Some(element_from_triple(triple)?),
        Err(Error::NotMultiplicative | Error::NotSandwichForm) => None,
        Err(e) => return Err(e),
    };
    Ok((induced, element))
}

/// `(a₁, b₁, c₁)` from [`recover_triple`] describe `B^∨ ⊗ A^∨ ⊗ C` as
/// `T(c₁⁻¹, b₁⁻¹, a₁)`.
pub fn element_from_triple((a1, b1, c1): (Mat, Mat, Mat)) -> Result<IsotropyElement> {
    isotropy::small_element(c1.inverse()?, b1.inverse()?, a1)
}

/// Reads a factor-preserving map of `L`, given only as a black box on
/// tensors, back into three factor matrices (row-major actions) whose tensor
/// product equals the map.
pub fn strip_factors(
    shape: Shape,
    field: FieldSpec,
    map: &dyn Fn(&Tensor3) -> Result<Tensor3>,
) -> Result<[Mat; 3]> {
    let dims = shape.factor_dims();
    let basis = |idx: [usize; 3]| {
        let mut c = Cube::zeros(dims, field);
        c.set(idx, field.one());
        Tensor3::from_cube(shape, c).expect("dims match")
    };
    let origin = map(&basis([0, 0, 0]))?;
    let (probe, s) = origin
        .cube()
        .nonzeros()
        .next()
        .map(|(i, v)| (i, v.clone()))
        .ok_or(Error::NotInvertible)?;

    // F_slot[:, α] = image of the α-th basis vector in that slot, read along
    // the line through `probe`
    let mut factors: Vec<Mat> = Vec::with_capacity(3);
    for slot in 0..3 {
        let d = dims[slot];
        let mut cols = Vec::with_capacity(d);
        for alpha in 0..d {
            let mut idx = [0; 3];
            idx[slot] = alpha;
            let img = map(&basis(idx))?;
            cols.push(
                (0..d)
                    .map(|beta| {
                        let mut at = probe;
                        at[slot] = beta;
                        img.cube().get(at).clone()
                    })
                    .collect::<Vec<_>>(),
            );
        }
        factors.push(Mat::from_fn(d, d, field, |i, j| cols[j][i].clone()));
    }
    // the product of the three read-outs overshoots by κ = (F₁⊗F₂⊗F₃)(e₀)[probe] / s
    let joint =
        &(factors[0].get(probe[0], 0) * factors[1].get(probe[1], 0)) * factors[2].get(probe[2], 0);
    let kappa = joint.div(&s).ok_or(Error::NotInvertible)?;
    let kappa_inv = kappa.inv().ok_or(Error::NotInvertible)?;
    factors[2] = factors[2].scale(&kappa_inv);
    let [f1, f2, f3]: [Mat; 3] = factors.try_into().expect("three factors");
    Ok([f1, f2, f3])
}

/// Builds `T(a,b,c)` as an opaque map on `L`, strips it into factor maps,
/// dualizes the first two through the trace pairing, recovers a triple from
/// the multiplicativity of the composition map and checks that the rebuilt
/// element is `T(a,b,c)` up to scalars.
pub fn isotropy_roundtrip(a: &Mat, b: &Mat, c: &Mat) -> Result<bool> {
    let g0 = isotropy::small_element(a.clone(), b.clone(), c.clone())?;
    let shape = g0.shape();
    let field = g0.field();
    let raw = |t: &Tensor3| isotropy::apply(&g0, t);
    let [f1, f2, f3] = strip_factors(shape, field, &raw)?;
    let [s1, s2, s3] = shape.factor_shapes();
    let a1 = LinMap::from_row_major_action(s1, &f1)?;
    let a2 = LinMap::from_row_major_action(s2, &f2)?;
    let a3 = LinMap::from_row_major_action(s3, &f3)?;
    // B_i = A_i^∨ acts on N_i = L_i*
    let b1 = a1.trace_dual()?;
    let b2 = a2.trace_dual()?;
    let rebuilt = element_from_triple(recover_triple(&b1, &b2, &a3)?)?;
    Ok(isotropy::equal_mod_scalars(&rebuilt, &g0))
}

/// Whether the structure tensor of `f` (read in `L`) is `⟨m,n,p⟩`.
pub fn is_mmt_structure(f: &BilinearMap, shape: Shape) -> Result<bool> {
    Ok(structure_tensor_in_l(f, shape)? == build_mmt(shape, f.field()))
}
