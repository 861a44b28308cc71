//! Elements of the isotropy group of `⟨m,n,p⟩`.
//!
//! An element is stored as `(π, a, b, c)` and acts as `ρ_π ∘ T(a,b,c)`, where
//!
//! * `T(a,b,c)(x ⊗ y ⊗ z) = a x b⁻¹ ⊗ b y c⁻¹ ⊗ c z a⁻¹`, and
//! * `ρ_π` moves the factor in slot `s` to slot `π(s)`, transposing all three
//!   factors when `π` is odd. So `ρ_(23)(x⊗y⊗z) = xᵗ⊗zᵗ⊗yᵗ`,
//!   `ρ_(12)(x⊗y⊗z) = yᵗ⊗xᵗ⊗zᵗ`, and the 3-cycles rotate without transposes.
//!
//! Products are brought back to this form with the conjugation table
//! [`conjugate_triple`].

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::mat::Mat;
use crate::perm::Perm3;
use crate::tensor::{RankOneTriple, Shape, Tensor3};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsotropyElement {
    shape: Shape,
    field: FieldSpec,
    pi: Perm3,
    a: Mat,
    b: Mat,
    c: Mat,
}

fn check_gl(x: &Mat, size: usize, field: FieldSpec, name: &str) -> Result<()> {
    if x.dims() != (size, size) {
        return Err(Error::dims(format!(
            "{name} is {}x{}, expected {size}x{size}",
            x.rows(),
            x.cols()
        )));
    }
    if x.field() != field {
        return Err(Error::FieldMismatch {
            left: field,
            right: x.field(),
        });
    }
    if !x.is_invertible() {
        return Err(Error::NotInvertible);
    }
    Ok(())
}

impl IsotropyElement {
    pub fn new(shape: Shape, pi: Perm3, a: Mat, b: Mat, c: Mat) -> Result<Self> {
        let field = a.field();
        check_gl(&a, shape.m, field, "a")?;
        check_gl(&b, shape.n, field, "b")?;
        check_gl(&c, shape.p, field, "c")?;
        if !pi.is_admissible(shape) {
            return Err(Error::InadmissiblePermutation {
                perm: pi.to_string(),
                shape: shape.to_string(),
            });
        }
        Ok(IsotropyElement {
            shape,
            field,
            pi,
            a,
            b,
            c,
        })
    }

    pub fn identity(shape: Shape, field: FieldSpec) -> Self {
        IsotropyElement {
            shape,
            field,
            pi: Perm3::Id,
            a: Mat::identity(shape.m, field),
            b: Mat::identity(shape.n, field),
            c: Mat::identity(shape.p, field),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn pi(&self) -> Perm3 {
        self.pi
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn c(&self) -> &Mat {
        &self.c
    }

    /// The `T(a,b,c)` part with `π` dropped.
    pub fn small_part(&self) -> IsotropyElement {
        IsotropyElement {
            pi: Perm3::Id,
            ..self.clone()
        }
    }

    fn check_compatible(&self, shape: Shape, field: FieldSpec) -> Result<()> {
        if self.shape != shape {
            return Err(Error::dims(format!(
                "element of shape {} vs {shape}",
                self.shape
            )));
        }
        if self.field != field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: field,
            });
        }
        Ok(())
    }

    /// Matrices of `x ↦ a x b⁻¹`, `y ↦ b y c⁻¹`, `z ↦ c z a⁻¹` on the
    /// row-major flattenings: `a ⊗ b^∨`, `b ⊗ c^∨`, `c ⊗ a^∨`.
    pub fn factor_maps(&self) -> [Mat; 3] {
        let dual = |x: &Mat| x.contragredient().expect("invertible by construction");
        let kron = |x: &Mat, y: &Mat| x.kron(y).expect("same field");
        [
            kron(&self.a, &dual(&self.b)),
            kron(&self.b, &dual(&self.c)),
            kron(&self.c, &dual(&self.a)),
        ]
    }
}

/// `T(a,b,c)`.
pub fn small_element(a: Mat, b: Mat, c: Mat) -> Result<IsotropyElement> {
    let shape = Shape::new(a.rows(), b.rows(), c.rows())?;
    IsotropyElement::new(shape, Perm3::Id, a, b, c)
}

/// `ρ_π`.
pub fn rho_element(pi: Perm3, shape: Shape, field: FieldSpec) -> Result<IsotropyElement> {
    IsotropyElement::new(
        shape,
        pi,
        Mat::identity(shape.m, field),
        Mat::identity(shape.n, field),
        Mat::identity(shape.p, field),
    )
}

/// `ρ_σ T(a,b,c) ρ_σ⁻¹ = T(a',b',c')`:
///
/// | σ     | (a', b', c')        |
/// |-------|---------------------|
/// | id    | (a, b, c)           |
/// | (23)  | (b^∨, a^∨, c^∨)     |
/// | (12)  | (c^∨, b^∨, a^∨)     |
/// | (13)  | (a^∨, c^∨, b^∨)     |
/// | (123) | (c, a, b)           |
/// | (132) | (b, c, a)           |
pub fn conjugate_triple(sigma: Perm3, a: &Mat, b: &Mat, c: &Mat) -> Result<(Mat, Mat, Mat)> {
    let v = |x: &Mat| x.contragredient();
    Ok(match sigma {
        Perm3::Id => (a.clone(), b.clone(), c.clone()),
        Perm3::T23 => (v(b)?, v(a)?, v(c)?),
        Perm3::T12 => (v(c)?, v(b)?, v(a)?),
        Perm3::T13 => (v(a)?, v(c)?, v(b)?),
        Perm3::C123 => (c.clone(), a.clone(), b.clone()),
        Perm3::C132 => (b.clone(), c.clone(), a.clone()),
    })
}

/// Linear extension of the action on decomposable tensors.
pub fn apply(g: &IsotropyElement, s: &Tensor3) -> Result<Tensor3> {
    g.check_compatible(s.shape(), s.field())?;
    let [f1, f2, f3] = g.factor_maps();
    let moved = s.map_factors([&f1, &f2, &f3])?;
    if g.pi == Perm3::Id {
        return Ok(moved);
    }
    Ok(moved.permute_slots(g.pi.images(), g.pi.is_odd()))
}

pub fn apply_to_rank_one(g: &IsotropyElement, r: &RankOneTriple) -> Result<RankOneTriple> {
    g.check_compatible(r.shape(), r.field())?;
    let a_inv = g.a.inverse()?;
    let b_inv = g.b.inverse()?;
    let c_inv = g.c.inverse()?;
    let sandwiched = [
        g.a.mul(r.u())?.mul(&b_inv)?,
        g.b.mul(r.v())?.mul(&c_inv)?,
        g.c.mul(r.w())?.mul(&a_inv)?,
    ];
    let mut slots: [Option<Mat>; 3] = [None, None, None];
    for (s, x) in sandwiched.into_iter().enumerate() {
        let x = if g.pi.is_odd() { x.transpose() } else { x };
        slots[g.pi.images()[s]] = Some(x);
    }
    let [u, v, w] = slots.map(|x| x.expect("permutation covers all slots"));
    RankOneTriple::new(u, v, w)
}

/// `g ∘ h`, brought to canonical `(π, a, b, c)` form (not normalized).
pub fn compose(g: &IsotropyElement, h: &IsotropyElement) -> Result<IsotropyElement> {
    g.check_compatible(h.shape, h.field)?;
    // ρ_g T_g ρ_h T_h = ρ_g ρ_h (ρ_h⁻¹ T_g ρ_h) T_h
    let (a, b, c) = conjugate_triple(h.pi.inverse(), &g.a, &g.b, &g.c)?;
    Ok(IsotropyElement {
        shape: g.shape,
        field: g.field,
        pi: g.pi.compose(h.pi),
        a: a.mul(&h.a)?,
        b: b.mul(&h.b)?,
        c: c.mul(&h.c)?,
    })
}

pub fn invert(g: &IsotropyElement) -> IsotropyElement {
    // (ρ_π T)⁻¹ = ρ_π⁻¹ (ρ_π T⁻¹ ρ_π⁻¹)
    let inv = |x: &Mat| x.inverse().expect("invertible by construction");
    let (a, b, c) = conjugate_triple(g.pi, &inv(&g.a), &inv(&g.b), &inv(&g.c))
        .expect("invertible by construction");
    IsotropyElement {
        pi: g.pi.inverse(),
        a,
        b,
        c,
        ..g.clone()
    }
}

/// Same map on `L`: equal permutation and pairwise proportional `a`, `b`, `c`.
pub fn equal_mod_scalars(g: &IsotropyElement, h: &IsotropyElement) -> bool {
    g.shape == h.shape
        && g.field == h.field
        && g.pi == h.pi
        && g.a.proportionality(&h.a).is_some()
        && g.b.proportionality(&h.b).is_some()
        && g.c.proportionality(&h.c).is_some()
}

/// Scales `a`, `b`, `c` independently so each has first nonzero entry one.
pub fn normalize(g: &IsotropyElement) -> IsotropyElement {
    IsotropyElement {
        a: g.a.normalized().0,
        b: g.b.normalized().0,
        c: g.c.normalized().0,
        ..g.clone()
    }
}

pub fn is_isotropy(g: &IsotropyElement, s: &Tensor3) -> Result<bool> {
    Ok(apply(g, s)? == *s)
}

/// Whether `T(a,b,c)` is the identity map: all three matrices scalar.
pub fn kernel_test(a: &Mat, b: &Mat, c: &Mat) -> bool {
    a.scalar_value().is_some() && b.scalar_value().is_some() && c.scalar_value().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::tensor::build_mmt;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn shape(m: usize, n: usize, p: usize) -> Shape {
        Shape::new(m, n, p).unwrap()
    }

    #[test]
    fn identity_triple_is_identity() {
        let s = shape(2, 3, 2);
        let g = small_element(
            Mat::identity(2, q()),
            Mat::identity(3, q()),
            Mat::identity(2, q()),
        )
        .unwrap();
        assert_eq!(g, IsotropyElement::identity(s, q()));
        let mut rng = random::rng(1);
        let t = random_tensor(s, &mut rng);
        assert_eq!(apply(&g, &t).unwrap(), t);
    }

    fn random_tensor(s: Shape, rng: &mut random::SeededRng) -> Tensor3 {
        let mut t = Tensor3::zeros(s, q());
        for _ in 0..6 {
            let u = random::matrix(s.m, s.n, q(), rng);
            let v = random::matrix(s.n, s.p, q(), rng);
            let w = random::matrix(s.p, s.m, q(), rng);
            t = t.add(&Tensor3::outer(s, &u, &v, &w).unwrap()).unwrap();
        }
        t
    }

    #[test]
    fn scalar_triples_act_trivially() {
        let s = shape(2, 2, 3);
        let g = small_element(
            Mat::scalar(2, q().from_i64(2)),
            Mat::scalar(2, q().from_i64(-3)),
            Mat::scalar(3, q().ratio(1, 5).unwrap()),
        )
        .unwrap();
        let mut rng = random::rng(2);
        let t = random_tensor(s, &mut rng);
        assert_eq!(apply(&g, &t).unwrap(), t);
        assert!(kernel_test(g.a(), g.b(), g.c()));
    }

    #[test]
    fn small_elements_fix_mmt() {
        let mut rng = random::rng(3);
        for (m, n, p) in [(2, 2, 2), (2, 3, 4), (1, 2, 2)] {
            let s = shape(m, n, p);
            let g = small_element(
                random::invertible(m, q(), &mut rng),
                random::invertible(n, q(), &mut rng),
                random::invertible(p, q(), &mut rng),
            )
            .unwrap();
            assert!(is_isotropy(&g, &build_mmt(s, q())).unwrap());
        }
    }

    #[test]
    fn construction_errors() {
        let singular = Mat::from_i64(q(), &[&[1, 1], &[1, 1]]);
        let e = Mat::identity(2, q());
        assert_eq!(
            small_element(singular, e.clone(), e.clone()),
            Err(Error::NotInvertible)
        );
        assert!(matches!(
            rho_element(Perm3::T23, shape(2, 3, 4), q()),
            Err(Error::InadmissiblePermutation { .. })
        ));
        assert!(rho_element(Perm3::T12, shape(1, 1, 1), q()).is_err());
        assert!(IsotropyElement::new(shape(2, 2, 3), Perm3::Id, e.clone(), e.clone(), e).is_err());
    }

    #[test]
    fn rho_examples() {
        let s = shape(2, 2, 3);
        let id = rho_element(Perm3::Id, s, q()).unwrap();
        assert_eq!(id, IsotropyElement::identity(s, q()));
        let r = rho_element(Perm3::T23, s, q()).unwrap();
        assert_eq!(compose(&r, &r).unwrap(), IsotropyElement::identity(s, q()));
        assert!(is_isotropy(&r, &build_mmt(s, q())).unwrap());
        let c = rho_element(Perm3::C123, shape(2, 2, 2), q()).unwrap();
        let c3 = compose(&c, &compose(&c, &c).unwrap()).unwrap();
        assert_eq!(c3, IsotropyElement::identity(shape(2, 2, 2), q()));
    }

    #[test]
    fn rho23_on_rank_one() {
        let s = shape(2, 2, 3);
        let mut rng = random::rng(4);
        let u = random::nonzero_matrix(2, 2, q(), &mut rng);
        let v = random::nonzero_matrix(2, 3, q(), &mut rng);
        let w = random::nonzero_matrix(3, 2, q(), &mut rng);
        let r = RankOneTriple::new(u.clone(), v.clone(), w.clone()).unwrap();
        let g = rho_element(Perm3::T23, s, q()).unwrap();
        let img = apply_to_rank_one(&g, &r).unwrap();
        assert_eq!(
            img,
            RankOneTriple::new(u.transpose(), w.transpose(), v.transpose()).unwrap()
        );
        assert_eq!(img.to_tensor(), apply(&g, &r.to_tensor()).unwrap());
    }

    #[test]
    fn compose_with_identity_and_3_cycle() {
        let s = shape(2, 2, 2);
        let mut rng = random::rng(5);
        let g = IsotropyElement::new(
            s,
            Perm3::T13,
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
        )
        .unwrap();
        let id = IsotropyElement::identity(s, q());
        assert_eq!(normalize(&compose(&g, &id).unwrap()), normalize(&g));
        let r12 = rho_element(Perm3::T12, s, q()).unwrap();
        let r23 = rho_element(Perm3::T23, s, q()).unwrap();
        assert_eq!(compose(&r12, &r23).unwrap().pi().order(), 3);
    }

    #[test]
    fn conjugation_by_rho23() {
        let s = shape(2, 2, 3);
        let mut rng = random::rng(6);
        let (a, b, c) = (
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
            random::invertible(3, q(), &mut rng),
        );
        let r = rho_element(Perm3::T23, s, q()).unwrap();
        let t = small_element(a.clone(), b.clone(), c.clone()).unwrap();
        let conj = compose(&compose(&r, &t).unwrap(), &r).unwrap();
        let expected = small_element(
            b.contragredient().unwrap(),
            a.contragredient().unwrap(),
            c.contragredient().unwrap(),
        )
        .unwrap();
        assert!(equal_mod_scalars(&conj, &expected));
    }

    #[test]
    fn inverses() {
        let s = shape(2, 2, 2);
        let id = IsotropyElement::identity(s, q());
        assert_eq!(invert(&id), id);
        let mut rng = random::rng(7);
        let (a, b, c) = (
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
        );
        let t = small_element(a.clone(), b.clone(), c.clone()).unwrap();
        let expected = small_element(
            a.inverse().unwrap(),
            b.inverse().unwrap(),
            c.inverse().unwrap(),
        )
        .unwrap();
        assert_eq!(invert(&t), expected);
        for pi in [Perm3::T12, Perm3::T13, Perm3::T23] {
            let r = rho_element(pi, s, q()).unwrap();
            assert_eq!(invert(&r), r);
        }
    }

    #[test]
    fn equality_modulo_scalars() {
        let s = shape(2, 2, 2);
        let mut rng = random::rng(8);
        let (a, b, c) = (
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
            random::invertible(2, q(), &mut rng),
        );
        let g = small_element(a.clone(), b.clone(), c.clone()).unwrap();
        let h = small_element(
            a.scale(&q().from_i64(2)),
            b.scale(&q().from_i64(3)),
            c.clone(),
        )
        .unwrap();
        assert!(equal_mod_scalars(&g, &h));
        assert!(equal_mod_scalars(&g, &g));
        assert_eq!(normalize(&g), normalize(&h));
        let id = IsotropyElement::identity(s, q());
        let r = rho_element(Perm3::T23, s, q()).unwrap();
        assert!(!equal_mod_scalars(&id, &r));
    }

    #[test]
    fn normalize_examples() {
        let mut rng = random::rng(9);
        let a0 = random::invertible(2, q(), &mut rng).normalized().0;
        let b0 = random::invertible(3, q(), &mut rng).normalized().0;
        let c0 = random::invertible(2, q(), &mut rng).normalized().0;
        let g0 = small_element(a0.clone(), b0.clone(), c0.clone()).unwrap();
        assert_eq!(normalize(&g0), g0);
        let g = small_element(a0.scale(&q().from_i64(2)), b0, c0).unwrap();
        assert_eq!(normalize(&g), g0);
    }

    #[test]
    fn perturbed_tensor_is_not_fixed() {
        let s = shape(2, 2, 2);
        let mut t = build_mmt(s, q());
        // e_{11} ⊗ e_{12} ⊗ e_{21}-style unit that is not part of ⟨2,2,2⟩
        t.add_at([0, 0, 0, 1, 1, 1], &q().one());
        let g = small_element(
            Mat::diag(q(), &[q().one(), q().from_i64(2)]),
            Mat::identity(2, q()),
            Mat::identity(2, q()),
        )
        .unwrap();
        assert!(!is_isotropy(&g, &t).unwrap());
    }

    #[test]
    fn kernel_examples() {
        let e = Mat::identity(2, q());
        assert!(kernel_test(&e, &e, &e));
        let shear = Mat::from_i64(q(), &[&[1, 1], &[0, 1]]);
        assert!(!kernel_test(&shear, &e, &e));
        let g = small_element(shear, e.clone(), e).unwrap();
        let t = Tensor3::outer(
            shape(2, 2, 2),
            &Mat::unit(2, 2, 1, 0, q()),
            &Mat::unit(2, 2, 0, 0, q()),
            &Mat::unit(2, 2, 0, 0, q()),
        )
        .unwrap();
        assert_ne!(apply(&g, &t).unwrap(), t);
    }
}
