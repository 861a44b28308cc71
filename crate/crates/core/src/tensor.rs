//! Order-2 and order-3 tensors over matrix spaces, the matrix multiplication
//! tensor `⟨m,n,p⟩`, and rank decompositions.
//!
//! A [`Tensor3`] lives in `L = M_{m,n} ⊗ M_{n,p} ⊗ M_{p,m}`. Each factor is
//! flattened row-major, so the coefficient of `e_{ij} ⊗ e_{j'k} ⊗ e_{k'i'}`
//! sits at `((i·n + j)·np + (j'·p + k))·pm + (k'·m + i')`, i.e. the six-index
//! array `c[i][j][j'][k][k'][i']` read row-major.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::mat::Mat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl Shape {
    pub fn new(m: usize, n: usize, p: usize) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::dims(format!("shape ({m},{n},{p}) must be positive")));
        }
        Ok(Shape { m, n, p })
    }

    /// Matrix shapes of the three factors `M_{m,n}`, `M_{n,p}`, `M_{p,m}`.
    pub fn factor_shapes(self) -> [(usize, usize); 3] {
        [(self.m, self.n), (self.n, self.p), (self.p, self.m)]
    }

    pub fn factor_dims(self) -> [usize; 3] {
        self.factor_shapes().map(|(r, c)| r * c)
    }

    /// Sizes of the three general linear groups acting: `GL_m`, `GL_n`, `GL_p`.
    pub fn gl_sizes(self) -> [usize; 3] {
        [self.m, self.n, self.p]
    }

    pub fn is_trivial(self) -> bool {
        self.m == 1 && self.n == 1 && self.p == 1
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.n, self.p)
    }
}

/// Dense three-way coefficient array with arbitrary mode sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    dims: [usize; 3],
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

impl Cube {
    pub fn zeros(dims: [usize; 3], field: FieldSpec) -> Self {
        Cube {
            dims,
            field,
            coeffs: vec![field.zero(); dims[0] * dims[1] * dims[2]],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    fn offset(&self, [a, b, c]: [usize; 3]) -> usize {
        debug_assert!(a < self.dims[0] && b < self.dims[1] && c < self.dims[2]);
        (a * self.dims[1] + b) * self.dims[2] + c
    }

    pub fn get(&self, idx: [usize; 3]) -> &Scalar {
        &self.coeffs[self.offset(idx)]
    }

    pub fn set(&mut self, idx: [usize; 3], v: Scalar) {
        let o = self.offset(idx);
        self.coeffs[o] = v;
    }

    pub fn add_at(&mut self, idx: [usize; 3], v: &Scalar) {
        let o = self.offset(idx);
        self.coeffs[o] = &self.coeffs[o] + v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = ([usize; 3], &Scalar)> {
        let [_, d1, d2] = self.dims;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(o, c)| ([o / (d1 * d2), (o / d2) % d1, o % d2], c))
    }

    pub fn add(&self, other: &Cube) -> Result<Cube> {
        if self.dims != other.dims {
            return Err(Error::dims(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Cube {
            coeffs,
            ..self.clone()
        })
    }

    /// Adds `u ⊗ v ⊗ w` in place.
    pub fn add_outer(&mut self, u: &[Scalar], v: &[Scalar], w: &[Scalar]) {
        assert_eq!([u.len(), v.len(), w.len()], self.dims);
        for (a, ua) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (b, vb) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let uv = ua * vb;
                for (c, wc) in w.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    self.add_at([a, b, c], &(&uv * wc));
                }
            }
        }
    }

    /// Applies `maps[s]` (a `dims[s] × dims[s]` matrix) to mode `s`, i.e. the
    /// linear extension of `x ⊗ y ⊗ z ↦ F₁x ⊗ F₂y ⊗ F₃z`.
    pub fn map_modes(&self, maps: [&Mat; 3]) -> Result<Cube> {
        for (s, f) in maps.iter().enumerate() {
            if f.dims() != (self.dims[s], self.dims[s]) {
                return Err(Error::dims(format!(
                    "mode {s} map is {}x{}, mode has dimension {}",
                    f.rows(),
                    f.cols(),
                    self.dims[s]
                )));
            }
            if f.field() != self.field {
                return Err(Error::FieldMismatch {
                    left: self.field,
                    right: f.field(),
                });
            }
        }
        if self.field == FieldSpec::Rationals {
            return Ok(self.map_modes_rational(maps));
        }
        let mut cur = self.clone();
        for (s, f) in maps.iter().enumerate() {
            let mut next = Cube::zeros(self.dims, self.field);
            for (idx, c) in cur.nonzeros() {
                for out in 0..self.dims[s] {
                    let k = f.get(out, idx[s]);
                    if k.is_zero() {
                        continue;
                    }
                    let mut j = idx;
                    j[s] = out;
                    next.add_at(j, &(k * c));
                }
            }
            cur = next;
        }
        Ok(cur)
    }
}

impl Cube {
    /// Rational mode products with denominators cleared up front, so the
    /// inner loops run on integers and only the final entries are reduced.
    fn map_modes_rational(&self, maps: [&Mat; 3]) -> Cube {
        let (mut cur, mut den) = clear_denominators(self.coeffs.iter());
        for (s, f) in maps.iter().enumerate() {
            let n = self.dims[s];
            let (g, d) = clear_denominators((0..n * n).map(|k| f.get(k / n, k % n)));
            den *= d;
            let stride: usize = self.dims[s + 1..].iter().product();
            let mut next = vec![BigInt::zero(); cur.len()];
            for (o, c) in cur.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let i = (o / stride) % n;
                let base = o - i * stride;
                for out in 0..n {
                    let k = &g[out * n + i];
                    if !k.is_zero() {
                        next[base + out * stride] += k * c;
                    }
                }
            }
            cur = next;
        }
        Cube {
            dims: self.dims,
            field: self.field,
            coeffs: cur
                .into_iter()
                .map(|x| Scalar::Rational(BigRational::new(x, den.clone())))
                .collect(),
        }
    }
}

/// Integer numerators over a common denominator.
fn clear_denominators<'a>(xs: impl Iterator<Item = &'a Scalar> + Clone) -> (Vec<BigInt>, BigInt) {
    let rational = |x: &'a Scalar| match x {
        Scalar::Rational(r) => r,
        Scalar::Residue(_) => unreachable!("rational field"),
    };
    let den = xs
        .clone()
        .fold(BigInt::one(), |d, x| d.lcm(rational(x).denom()));
    let nums = xs
        .map(|x| {
            let r = rational(x);
            r.numer() * (&den / r.denom())
        })
        .collect();
    (nums, den)
}

/// An element of `L = M_{m,n} ⊗ M_{n,p} ⊗ M_{p,m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tensor3 {
    shape: Shape,
    cube: Cube,
}

/// Six-index position `(i, j, j', k, k', i')`, zero-based.
pub type Index6 = [usize; 6];

impl Tensor3 {
    pub fn zeros(shape: Shape, field: FieldSpec) -> Self {
        Tensor3 {
            shape,
            cube: Cube::zeros(shape.factor_dims(), field),
        }
    }

    pub fn from_cube(shape: Shape, cube: Cube) -> Result<Self> {
        if cube.dims() != shape.factor_dims() {
            return Err(Error::dims(format!(
                "cube {:?} does not fit shape {shape}",
                cube.dims()
            )));
        }
        Ok(Tensor3 { shape, cube })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn field(&self) -> FieldSpec {
        self.cube.field
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    fn to_modes(&self, [i, j, j2, k, k2, i2]: Index6) -> [usize; 3] {
        let Shape { m, n, p } = self.shape;
        assert!(
            i < m && i2 < m && j < n && j2 < n && k < p && k2 < p,
            "index out of range"
        );
        [i * n + j, j2 * p + k, k2 * m + i2]
    }

    fn index6_of(&self, [a, b, c]: [usize; 3]) -> Index6 {
        let Shape { m, n, p } = self.shape;
        [a / n, a % n, b / p, b % p, c / m, c % m]
    }

    pub fn get(&self, idx: Index6) -> &Scalar {
        self.cube.get(self.to_modes(idx))
    }

    pub fn set(&mut self, idx: Index6, v: Scalar) {
        let modes = self.to_modes(idx);
        self.cube.set(modes, v);
    }

    pub fn add_at(&mut self, idx: Index6, v: &Scalar) {
        let modes = self.to_modes(idx);
        self.cube.add_at(modes, v);
    }

    /// Nonzero coefficients in row-major six-index order.
    pub fn nonzeros(&self) -> Vec<(Index6, Scalar)> {
        self.cube
            .nonzeros()
            .map(|(modes, c)| (self.index6_of(modes), c.clone()))
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.cube.nonzeros().count()
    }

    pub fn is_zero(&self) -> bool {
        self.cube.is_zero()
    }

    pub fn add(&self, other: &Tensor3) -> Result<Tensor3> {
        if self.shape != other.shape {
            return Err(Error::dims(format!("{} vs {}", self.shape, other.shape)));
        }
        Ok(Tensor3 {
            shape: self.shape,
            cube: self.cube.add(&other.cube)?,
        })
    }

    /// Decomposable tensor `u ⊗ v ⊗ w`.
    pub fn outer(shape: Shape, u: &Mat, v: &Mat, w: &Mat) -> Result<Tensor3> {
        let [su, sv, sw] = shape.factor_shapes();
        if u.dims() != su || v.dims() != sv || w.dims() != sw {
            return Err(Error::dims(format!("factor shapes do not match {shape}")));
        }
        let field = u.field();
        if v.field() != field || w.field() != field {
            return Err(Error::FieldMismatch {
                left: field,
                right: if v.field() != field {
                    v.field()
                } else {
                    w.field()
                },
            });
        }
        let mut t = Tensor3::zeros(shape, field);
        t.cube
            .add_outer(&u.vec_row_major(), &v.vec_row_major(), &w.vec_row_major());
        Ok(t)
    }

    /// Applies one linear map per factor; each map is given as a square
    /// matrix acting on the row-major flattening of that factor.
    pub fn map_factors(&self, maps: [&Mat; 3]) -> Result<Tensor3> {
        Ok(Tensor3 {
            shape: self.shape,
            cube: self.cube.map_modes(maps)?,
        })
    }

    /// Moves factor `s` to slot `images[s]`, transposing every factor when
    /// `transpose` is set. The caller guarantees the target shape is `shape`.
    pub(crate) fn permute_slots(&self, images: [usize; 3], transpose: bool) -> Tensor3 {
        let shapes = self.shape.factor_shapes();
        let target = self.shape.factor_shapes();
        let mut out = Tensor3::zeros(self.shape, self.field());
        for (modes, c) in self.cube.nonzeros() {
            let mut new_modes = [0usize; 3];
            for s in 0..3 {
                let (_, cols) = shapes[s];
                let (r, col) = (modes[s] / cols, modes[s] % cols);
                let (r, col) = if transpose { (col, r) } else { (r, col) };
                let t = images[s];
                debug_assert!(r < target[t].0 && col < target[t].1);
                new_modes[t] = r * target[t].1 + col;
            }
            out.cube.set(new_modes, c.clone());
        }
        out
    }
}

/// `⟨m,n,p⟩ = Σ e_{ij} ⊗ e_{jk} ⊗ e_{ki}`.
pub fn build_mmt(shape: Shape, field: FieldSpec) -> Tensor3 {
    let mut t = Tensor3::zeros(shape, field);
    for i in 0..shape.m {
        for j in 0..shape.n {
            for k in 0..shape.p {
                t.set([i, j, j, k, k, i], field.one());
            }
        }
    }
    t
}

/// Element of `C_l ⊗ R_l`, stored as the `l × l` coefficient array of `e_i ⊗ e^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tensor2 {
    coeffs: Mat,
}

impl Tensor2 {
    pub fn new(coeffs: Mat) -> Result<Self> {
        if !coeffs.is_square() {
            return Err(Error::dims("Tensor2 coefficients must be square"));
        }
        Ok(Tensor2 { coeffs })
    }

    pub fn size(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn coeffs(&self) -> &Mat {
        &self.coeffs
    }
}

/// `δ_(l) = Σ e_i ⊗ e^i`.
pub fn identity_tensor(l: usize, field: FieldSpec) -> Tensor2 {
    Tensor2 {
        coeffs: Mat::identity(l, field),
    }
}

/// `g(v ⊗ v') = gv ⊗ v'g^{-1}`, extended linearly: coefficients become `g·D·g^{-1}`.
pub fn apply_gl_action(g: &Mat, d: &Tensor2) -> Result<Tensor2> {
    if g.dims() != d.coeffs.dims() {
        return Err(Error::dims("group element and tensor sizes differ"));
    }
    let g_inv = g.inverse()?;
    Ok(Tensor2 {
        coeffs: g.mul(&d.coeffs)?.mul(&g_inv)?,
    })
}

/// The linear map `C_m⊗R_m⊗C_n⊗R_n⊗C_p⊗R_p → L` sending
/// `c₁⊗r₁⊗c₂⊗r₂⊗c₃⊗r₃` to `c₁r₂ ⊗ c₂r₃ ⊗ c₃r₁`, evaluated on `dm ⊗ dn ⊗ dp`.
pub fn tau_map(dm: &Tensor2, dn: &Tensor2, dp: &Tensor2) -> Result<Tensor3> {
    let shape = Shape::new(dm.size(), dn.size(), dp.size())?;
    let field = dm.coeffs.field();
    if dn.coeffs.field() != field || dp.coeffs.field() != field {
        return Err(Error::FieldMismatch {
            left: field,
            right: dn.coeffs.field(),
        });
    }
    let Shape { m, n, p } = shape;
    let mut t = Tensor3::zeros(shape, field);
    // e_i⊗e^{i'} ⊗ e_j⊗e^{j'} ⊗ e_k⊗e^{k'}  ↦  e_{ij'} ⊗ e_{jk'} ⊗ e_{ki'}
    for i in 0..m {
        for i2 in 0..m {
            let x = dm.coeffs.get(i, i2);
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                for j2 in 0..n {
                    let y = dn.coeffs.get(j, j2);
                    if y.is_zero() {
                        continue;
                    }
                    let xy = x * y;
                    for k in 0..p {
                        for k2 in 0..p {
                            let z = dp.coeffs.get(k, k2);
                            if z.is_zero() {
                                continue;
                            }
                            t.add_at([i, j2, j, k2, k, i2], &(&xy * z));
                        }
                    }
                }
            }
        }
    }
    Ok(t)
}

/// A decomposable tensor `u ⊗ v ⊗ w` with all factors nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankOneTriple {
    pub(crate) u: Mat,
    pub(crate) v: Mat,
    pub(crate) w: Mat,
}

impl RankOneTriple {
    pub fn new(u: Mat, v: Mat, w: Mat) -> Result<Self> {
        let (m, n) = u.dims();
        let (n2, p) = v.dims();
        if n2 != n || w.dims() != (p, m) {
            return Err(Error::dims(format!(
                "factors {:?}, {:?}, {:?} do not form M_mn x M_np x M_pm",
                u.dims(),
                v.dims(),
                w.dims()
            )));
        }
        if v.field() != u.field() || w.field() != u.field() {
            return Err(Error::FieldMismatch {
                left: u.field(),
                right: v.field(),
            });
        }
        if u.is_zero() || v.is_zero() || w.is_zero() {
            return Err(Error::ZeroFactor);
        }
        Ok(RankOneTriple { u, v, w })
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn v(&self) -> &Mat {
        &self.v
    }

    pub fn w(&self) -> &Mat {
        &self.w
    }

    pub fn shape(&self) -> Shape {
        Shape {
            m: self.u.rows(),
            n: self.u.cols(),
            p: self.v.cols(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.u.field()
    }

    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3::outer(self.shape(), &self.u, &self.v, &self.w).expect("validated triple")
    }

    pub fn reduce_mod(&self, field: FieldSpec) -> Result<Self> {
        let red = |x: &Mat| x.reduce_mod(field).ok_or(Error::ZeroFactor);
        RankOneTriple::new(red(&self.u)?, red(&self.v)?, red(&self.w)?)
    }
}

/// `u⊗v⊗w = u'⊗v'⊗w'` iff `u' = λ₁u`, `v' = λ₂v`, `w' = λ₃w` with `λ₁λ₂λ₃ = 1`.
pub fn decomposable_equal(s: &RankOneTriple, r: &RankOneTriple) -> bool {
    let (Some(l1), Some(l2), Some(l3)) = (
        s.u.proportionality(&r.u),
        s.v.proportionality(&r.v),
        s.w.proportionality(&r.w),
    ) else {
        return false;
    };
    (&(&l1 * &l2) * &l3).is_one()
}

/// Ordered list of rank-one terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    shape: Shape,
    field: FieldSpec,
    terms: Vec<RankOneTriple>,
}

impl Decomposition {
    pub fn new(shape: Shape, field: FieldSpec, terms: Vec<RankOneTriple>) -> Result<Self> {
        for t in &terms {
            if t.shape() != shape {
                return Err(Error::dims(format!(
                    "term of shape {} in a decomposition of shape {shape}",
                    t.shape()
                )));
            }
            if t.field() != field {
                return Err(Error::FieldMismatch {
                    left: field,
                    right: t.field(),
                });
            }
        }
        Ok(Decomposition {
            shape,
            field,
            terms,
        })
    }

    /// The `mnp` terms `e_{ij} ⊗ e_{jk} ⊗ e_{ki}`.
    pub fn standard(shape: Shape, field: FieldSpec) -> Self {
        let Shape { m, n, p } = shape;
        let mut terms = Vec::with_capacity(m * n * p);
        for i in 0..m {
            for j in 0..n {
                for k in 0..p {
                    terms.push(RankOneTriple {
                        u: Mat::unit(m, n, i, j, field),
                        v: Mat::unit(n, p, j, k, field),
                        w: Mat::unit(p, m, k, i, field),
                    });
                }
            }
        }
        Decomposition {
            shape,
            field,
            terms,
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn terms(&self) -> &[RankOneTriple] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reduces a rational decomposition into GF(q).
    pub fn reduce_mod(&self, field: FieldSpec) -> Result<Self> {
        if field == self.field {
            return Ok(self.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|t| t.reduce_mod(field))
            .collect::<Result<Vec<_>>>()?;
        Decomposition::new(self.shape, field, terms)
    }
}

/// `Σ u_i ⊗ v_i ⊗ w_i`.
pub fn decomposition_sum(d: &Decomposition) -> Tensor3 {
    let mut t = Tensor3::zeros(d.shape, d.field);
    for term in &d.terms {
        t.cube.add_outer(
            &term.u.vec_row_major(),
            &term.v.vec_row_major(),
            &term.w.vec_row_major(),
        );
    }
    t
}

/// `dim x·M_{n,p}` for `x ∈ M_{m,n}`, computed as a rank of stacked images.
pub fn left_span_dim(x: &Mat, shape: Shape) -> Result<usize> {
    let Shape { m, n, p } = shape;
    if x.dims() != (m, n) {
        return Err(Error::dims(format!("x must be {m}x{n}")));
    }
    let field = x.field();
    let mut rows = Vec::with_capacity(n * p * m * p);
    for k in 0..n {
        for l in 0..p {
            rows.extend(x.mul(&Mat::unit(n, p, k, l, field))?.vec_row_major());
        }
    }
    Ok(Mat::from_row_major(n * p, m * p, field, &rows).rank())
}

/// `dim M_{m,n}·x'` for `x' ∈ M_{n,p}`.
pub fn right_span_dim(x: &Mat, shape: Shape) -> Result<usize> {
    let Shape { m, n, p } = shape;
    if x.dims() != (n, p) {
        return Err(Error::dims(format!("x' must be {n}x{p}")));
    }
    let field = x.field();
    let mut rows = Vec::with_capacity(m * n * m * p);
    for k in 0..m {
        for l in 0..n {
            rows.extend(Mat::unit(m, n, k, l, field).mul(x)?.vec_row_major());
        }
    }
    Ok(Mat::from_row_major(m * n, m * p, field, &rows).rank())
}
