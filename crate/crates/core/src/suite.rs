//! Randomized and exhaustive self-checks, each behind the [`Check`] trait and
//! looked up by name in a [`CheckRegistry`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::isotropy::{self, IsotropyElement};
use crate::mat::Mat;
use crate::orbits::{self, EnumerationMode, EnumerationOptions};
use crate::perm::Perm3;
use crate::random::{self, SeededRng};
use crate::recovery::{self, BilinearMap, FormKind, LinMap};
use crate::tensor::{
    apply_gl_action, build_mmt, decomposable_equal, identity_tensor, left_span_dim, right_span_dim,
    tau_map, Cube, RankOneTriple, Shape, Tensor2, Tensor3,
};

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub shape: Shape,
    pub field: FieldSpec,
    pub samples: usize,
    pub seed: u64,
    pub budget: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub claim: &'static str,
    pub status: Status,
    pub cases: usize,
    pub detail: String,
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn claim(&self) -> &'static str;
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome>;
}

/// Result of one check body: counted cases and the first few failures.
#[derive(Debug, Default)]
pub struct Outcome {
    cases: usize,
    failed: usize,
    first_failures: Vec<String>,
    skipped: Option<String>,
}

impl Outcome {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.first_failures.len() < 5 {
                self.first_failures.push(what());
            }
        }
    }

    fn skipped(reason: impl Into<String>) -> Self {
        Outcome {
            skipped: Some(reason.into()),
            ..Default::default()
        }
    }
}

pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn new() -> Self {
        CheckRegistry { checks: Vec::new() }
    }

    pub fn register(&mut self, check: Box<dyn Check>) -> Result<()> {
        if self.get(check.name()).is_some() {
            return Err(Error::dims(format!(
                "check `{}` registered twice",
                check.name()
            )));
        }
        self.checks.push(check);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn with_defaults() -> Self {
        let mut r = CheckRegistry::new();
        let all: Vec<Box<dyn Check>> = vec![
            Box::new(Invariance),
            Box::new(Kernel),
            Box::new(GroupOrder),
            Box::new(Conjugation),
            Box::new(Homomorphism),
            Box::new(IdentityTensor),
            Box::new(TauMap),
            Box::new(SpanDimension),
            Box::new(DecomposableEqual),
            Box::new(RankOnePreserver),
            Box::new(StructureTensor),
            Box::new(Equivariance),
            Box::new(Bridge),
            Box::new(Roundtrip),
        ];
        for c in all {
            r.register(c).expect("default names are distinct");
        }
        r
    }

    /// Runs the named checks (all when `only` is empty) in registration order.
    pub fn run(&self, cfg: &SuiteConfig, only: &[String]) -> Result<Vec<CheckReport>> {
        for name in only {
            if self.get(name).is_none() {
                return Err(Error::dims(format!("unknown check `{name}`")));
            }
        }
        let mut reports = Vec::new();
        for check in &self.checks {
            if !only.is_empty() && !only.iter().any(|n| n == check.name()) {
                continue;
            }
            reports.push(run_one(check.as_ref(), cfg)?);
        }
        Ok(reports)
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        CheckRegistry::with_defaults()
    }
}

/// Each check draws from its own stream, so selecting a subset does not
/// change what a given check sees.
fn check_seed(seed: u64, name: &str) -> u64 {
    name.bytes().fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    })
}

pub fn run_one(check: &dyn Check, cfg: &SuiteConfig) -> Result<CheckReport> {
    let report = |status, cases, detail: String| CheckReport {
        name: check.name(),
        claim: check.claim(),
        status,
        cases,
        detail,
    };
    if cfg.samples == 0 {
        return Ok(report(
            Status::Pass,
            0,
            "vacuous: zero samples requested".into(),
        ));
    }
    let mut rng = random::rng(check_seed(cfg.seed, check.name()));
    let out = check.run(cfg, &mut rng)?;
    if let Some(reason) = out.skipped {
        return Ok(report(Status::Skipped, 0, reason));
    }
    if out.failed == 0 {
        Ok(report(Status::Pass, out.cases, String::new()))
    } else {
        Ok(report(
            Status::Fail,
            out.cases,
            format!(
                "{} of {} cases failed: {}",
                out.failed,
                out.cases,
                out.first_failures.join("; ")
            ),
        ))
    }
}

pub fn random_triple(shape: Shape, field: FieldSpec, rng: &mut SeededRng) -> (Mat, Mat, Mat) {
    let [m, n, p] = shape.gl_sizes();
    (
        random::invertible(m, field, rng),
        random::invertible(n, field, rng),
        random::invertible(p, field, rng),
    )
}

pub fn random_element(shape: Shape, field: FieldSpec, rng: &mut SeededRng) -> IsotropyElement {
    let perms = Perm3::admissible(shape);
    let pi = perms[rng.gen_range(0..perms.len())];
    let (a, b, c) = random_triple(shape, field, rng);
    IsotropyElement::new(shape, pi, a, b, c).expect("admissible and invertible")
}

/// A dense random element of `L`.
pub fn random_tensor(shape: Shape, field: FieldSpec, rng: &mut SeededRng) -> Tensor3 {
    let dims = shape.factor_dims();
    let mut cube = Cube::zeros(dims, field);
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                cube.set([i, j, k], random::scalar(field, rng));
            }
        }
    }
    Tensor3::from_cube(shape, cube).expect("dims match")
}

fn random_rank_one(shape: Shape, field: FieldSpec, rng: &mut SeededRng) -> RankOneTriple {
    let [(a, b), (c, d), (e, f)] = shape.factor_shapes();
    RankOneTriple::new(
        random::nonzero_matrix(a, b, field, rng),
        random::nonzero_matrix(c, d, field, rng),
        random::nonzero_matrix(e, f, field, rng),
    )
    .expect("nonzero factors")
}

fn basis_tensors(shape: Shape, field: FieldSpec) -> impl Iterator<Item = Tensor3> {
    let dims = shape.factor_dims();
    (0..dims[0]).flat_map(move |i| {
        (0..dims[1]).flat_map(move |j| {
            (0..dims[2]).map(move |k| {
                let mut c = Cube::zeros(dims, field);
                c.set([i, j, k], field.one());
                Tensor3::from_cube(shape, c).expect("dims match")
            })
        })
    })
}

/// Kernel oracle: the map fixes every basis tensor of `L`.
pub fn acts_trivially(g: &IsotropyElement) -> Result<bool> {
    for e in basis_tensors(g.shape(), g.field()) {
        if isotropy::apply(g, &e)? != e {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Invariance;

impl Check for Invariance {
    fn name(&self) -> &'static str {
        "invariance"
    }
    fn claim(&self) -> &'static str {
        "T(a,b,c) and every admissible rho fix <m,n,p>"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let t = build_mmt(cfg.shape, cfg.field);
        let mut out = Outcome::default();
        for _ in 0..cfg.samples {
            let (a, b, c) = random_triple(cfg.shape, cfg.field, rng);
            let g = isotropy::small_element(a, b, c)?;
            out.expect(isotropy::is_isotropy(&g, &t)?, || {
                format!("T moved t: {g:?}")
            });
        }
        for pi in Perm3::admissible(cfg.shape) {
            let rho = isotropy::rho_element(pi, cfg.shape, cfg.field)?;
            out.expect(isotropy::is_isotropy(&rho, &t)?, || {
                format!("rho_{pi} moved t")
            });
        }
        Ok(out)
    }
}

struct Kernel;

impl Check for Kernel {
    fn name(&self) -> &'static str {
        "kernel"
    }
    fn claim(&self) -> &'static str {
        "T(a,b,c) is the identity exactly when a, b, c are scalar"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        let [m, n, p] = cfg.shape.gl_sizes();
        for s in 0..cfg.samples {
            let (a, b, c) = if s % 2 == 0 {
                random_triple(cfg.shape, cfg.field, rng)
            } else {
                let f = cfg.field;
                (
                    Mat::scalar(m, random::nonzero_scalar(f, rng)),
                    Mat::scalar(n, random::nonzero_scalar(f, rng)),
                    Mat::scalar(p, random::nonzero_scalar(f, rng)),
                )
            };
            let claimed = isotropy::kernel_test(&a, &b, &c);
            let g = isotropy::small_element(a, b, c)?;
            let oracle = acts_trivially(&g)?;
            out.expect(claimed == oracle, || {
                format!("kernel test {claimed}, basis action {oracle}")
            });
        }
        Ok(out)
    }
}

struct GroupOrder;

impl Check for GroupOrder {
    fn name(&self) -> &'static str {
        "group-order"
    }
    fn claim(&self) -> &'static str {
        "the factor-preserving group has order |PGL_m||PGL_n||PGL_p| and full cosets per admissible permutation"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let Some(q) = cfg.field.modulus() else {
            return Ok(Outcome::skipped("needs a finite field"));
        };
        let needed = orbits::raw_triple_count(cfg.shape, cfg.field)?;
        if needed > u128::from(cfg.budget) {
            return Ok(Outcome::skipped(format!(
                "{needed} raw triples exceed the budget {}",
                cfg.budget
            )));
        }
        let opts = |mode| EnumerationOptions {
            mode,
            budget: cfg.budget,
            workers: cfg.workers,
        };
        let small = orbits::enumerate_group(cfg.shape, cfg.field, opts(EnumerationMode::Small))?;
        let full = orbits::enumerate_group(cfg.shape, cfg.field, opts(EnumerationMode::Full))?;
        // independent count: list GL_k, divide by the number of nonzero scalars
        let mut pgl = 1usize;
        for k in cfg.shape.gl_sizes() {
            pgl *= orbits::gl_list(k, cfg.field)?.len() / (q as usize - 1);
        }
        let mut out = Outcome::default();
        out.expect(small.len() == pgl, || {
            format!("small count {} vs {pgl}", small.len())
        });
        let cosets = Perm3::admissible(cfg.shape).len();
        out.expect(full.len() == pgl * cosets, || {
            format!("full count {} vs {}", full.len(), pgl * cosets)
        });
        let t = build_mmt(cfg.shape, cfg.field);
        for _ in 0..cfg.samples {
            let g = &full[rng.gen_range(0..full.len())];
            out.expect(isotropy::is_isotropy(g, &t)?, || {
                format!("enumerated non-member {g:?}")
            });
        }
        Ok(out)
    }
}

struct Conjugation;

impl Check for Conjugation {
    fn name(&self) -> &'static str {
        "conjugation"
    }
    fn claim(&self) -> &'static str {
        "rho_s T(a,b,c) rho_s^-1 follows the conjugation table, checked on dense tensors"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        for _ in 0..cfg.samples {
            let (a, b, c) = random_triple(cfg.shape, cfg.field, rng);
            let s = random_tensor(cfg.shape, cfg.field, rng);
            for sigma in Perm3::admissible(cfg.shape) {
                let rho = isotropy::rho_element(sigma, cfg.shape, cfg.field)?;
                let rho_inv = isotropy::rho_element(sigma.inverse(), cfg.shape, cfg.field)?;
                let t = isotropy::small_element(a.clone(), b.clone(), c.clone())?;
                let lhs =
                    isotropy::apply(&rho, &isotropy::apply(&t, &isotropy::apply(&rho_inv, &s)?)?)?;
                let (a2, b2, c2) = isotropy::conjugate_triple(sigma, &a, &b, &c)?;
                let table = isotropy::small_element(a2, b2, c2)?;
                out.expect(lhs == isotropy::apply(&table, &s)?, || {
                    format!("table entry for {sigma} disagrees")
                });
                let composed = isotropy::compose(&isotropy::compose(&rho, &t)?, &rho_inv)?;
                out.expect(
                    isotropy::normalize(&composed) == isotropy::normalize(&table),
                    || format!("composition for {sigma} disagrees after normalization"),
                );
            }
        }
        Ok(out)
    }
}

struct Homomorphism;

impl Check for Homomorphism {
    fn name(&self) -> &'static str {
        "homomorphism"
    }
    fn claim(&self) -> &'static str {
        "compose and invert agree with the action on dense tensors"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        for _ in 0..cfg.samples {
            let g = random_element(cfg.shape, cfg.field, rng);
            let h = random_element(cfg.shape, cfg.field, rng);
            let s = random_tensor(cfg.shape, cfg.field, rng);
            let gh = isotropy::compose(&g, &h)?;
            let lhs = isotropy::apply(&gh, &s)?;
            out.expect(
                lhs == isotropy::apply(&g, &isotropy::apply(&h, &s)?)?,
                || format!("compose({}, {}) acts wrongly", g.pi(), h.pi()),
            );
            let back = isotropy::apply(&isotropy::invert(&g), &isotropy::apply(&g, &s)?)?;
            out.expect(back == s, || {
                format!("invert of a {} element fails", g.pi())
            });
        }
        Ok(out)
    }
}

struct IdentityTensor;

impl Check for IdentityTensor {
    fn name(&self) -> &'static str {
        "identity-tensor"
    }
    fn claim(&self) -> &'static str {
        "g fixes the identity tensor of C_l (x) R_l"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        for l in 1..=4 {
            let delta = identity_tensor(l, cfg.field);
            for _ in 0..cfg.samples {
                let g = random::invertible(l, cfg.field, rng);
                out.expect(apply_gl_action(&g, &delta)? == delta, || {
                    format!("l={l}: g moved delta")
                });
            }
        }
        Ok(out)
    }
}

struct TauMap;

impl Check for TauMap {
    fn name(&self) -> &'static str {
        "tau-map"
    }
    fn claim(&self) -> &'static str {
        "tau sends delta (x) delta (x) delta to <m,n,p> and intertwines the group actions"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let Shape { m, n, p } = cfg.shape;
        let f = cfg.field;
        let mut out = Outcome::default();
        let image = tau_map(
            &identity_tensor(m, f),
            &identity_tensor(n, f),
            &identity_tensor(p, f),
        )?;
        out.expect(image == build_mmt(cfg.shape, f), || {
            "tau(delta) differs from <m,n,p>".into()
        });
        for _ in 0..cfg.samples {
            let d = [m, n, p].map(|k| Tensor2::new(random::matrix(k, k, f, rng)).expect("square"));
            let (a, b, c) = random_triple(cfg.shape, f, rng);
            let moved = tau_map(
                &apply_gl_action(&a, &d[0])?,
                &apply_gl_action(&b, &d[1])?,
                &apply_gl_action(&c, &d[2])?,
            )?;
            let g = isotropy::small_element(a, b, c)?;
            let acted = isotropy::apply(&g, &tau_map(&d[0], &d[1], &d[2])?)?;
            out.expect(moved == acted, || "tau is not equivariant".into());
        }
        Ok(out)
    }
}

struct SpanDimension;

impl Check for SpanDimension {
    fn name(&self) -> &'static str {
        "span-dimension"
    }
    fn claim(&self) -> &'static str {
        "dim x M_np = p rk(x) and dim M_mn x' = m rk(x')"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let Shape { m, n, p } = cfg.shape;
        let mut out = Outcome::default();
        for _ in 0..cfg.samples {
            let r = rng.gen_range(0..=m.min(n));
            let x = random::matrix_of_rank(m, n, r, cfg.field, rng);
            out.expect(left_span_dim(&x, cfg.shape)? == p * x.rank(), || {
                format!("left span, rank {r}")
            });
            let r = rng.gen_range(0..=n.min(p));
            let y = random::matrix_of_rank(n, p, r, cfg.field, rng);
            out.expect(right_span_dim(&y, cfg.shape)? == m * y.rank(), || {
                format!("right span, rank {r}")
            });
        }
        Ok(out)
    }
}

/// Rescales the factors of `t` by `(λ₁, λ₂, λ₃)`; the product is one when
/// `balanced`, and something else otherwise.
pub fn rescaled_pair(t: &RankOneTriple, balanced: bool, rng: &mut SeededRng) -> RankOneTriple {
    let f = t.field();
    let l1 = random::nonzero_scalar(f, rng);
    let l2 = random::nonzero_scalar(f, rng);
    let prod_inv = (&l1 * &l2).inv().expect("nonzero");
    let l3 = if balanced {
        prod_inv
    } else {
        // any nonzero value other than (λ₁λ₂)⁻¹; over GF(2) no such value exists,
        // so the factor u is perturbed instead
        match (0..16)
            .map(|_| random::nonzero_scalar(f, rng))
            .find(|l| *l != prod_inv)
        {
            Some(l) => l,
            None => {
                let mut u = t.u().clone();
                let bump = &u.get(0, 0).clone() + &f.one();
                u.set(0, 0, bump);
                if u.is_zero() {
                    u.set(0, 1 % u.cols(), f.one());
                }
                return RankOneTriple::new(u, t.v().clone(), t.w().clone()).expect("nonzero");
            }
        }
    };
    RankOneTriple::new(t.u().scale(&l1), t.v().scale(&l2), t.w().scale(&l3)).expect("nonzero")
}

struct DecomposableEqual;

impl Check for DecomposableEqual {
    fn name(&self) -> &'static str {
        "decomposable-equal"
    }
    fn claim(&self) -> &'static str {
        "u(x)v(x)w = u'(x)v'(x)w' iff the factors are proportional with product of ratios one"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        for s in 0..cfg.samples {
            let t = random_rank_one(cfg.shape, cfg.field, rng);
            let r = match s % 3 {
                0 => rescaled_pair(&t, true, rng),
                1 => rescaled_pair(&t, false, rng),
                _ => random_rank_one(cfg.shape, cfg.field, rng),
            };
            let dense = t.to_tensor() == r.to_tensor();
            out.expect(decomposable_equal(&t, &r) == dense, || {
                format!("disagreement on pair kind {}", s % 3)
            });
        }
        Ok(out)
    }
}

struct RankOnePreserver;

impl Check for RankOnePreserver {
    fn name(&self) -> &'static str {
        "rank-one-preserver"
    }
    fn claim(&self) -> &'static str {
        "rank-one preservers of M_mn are x -> axb or x -> ax^t b, recovered exactly; multiplicative maps keep rank"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let Shape { m, n, p } = cfg.shape;
        let f = cfg.field;
        let mut out = Outcome::default();
        for _ in 0..cfg.samples {
            let a = random::invertible(m, f, rng);
            let b = random::invertible(n, f, rng);
            let form = recovery::classify_rank1_preserver(&LinMap::sandwich(&a, &b)?)?;
            out.expect(
                form.kind == FormKind::Sandwich
                    && a.proportionality(&form.a).is_some()
                    && b.proportionality(&form.b).is_some(),
                || "sandwich not recovered".into(),
            );
            if m == n {
                let b2 = random::invertible(m, f, rng);
                let form =
                    recovery::classify_rank1_preserver(&LinMap::transpose_sandwich(&a, &b2)?)?;
                out.expect(
                    form.kind == FormKind::TransposeSandwich
                        && a.proportionality(&form.a).is_some()
                        && b2.proportionality(&form.b).is_some(),
                    || "transpose sandwich not recovered".into(),
                );
            }
            let (g1, g2, g3) = random_triple(cfg.shape, f, rng);
            let (am, bm, _) = recovery::r_triple(&g1, &g2, &g3)?;
            let x = random::matrix_of_rank(n, m, rng.gen_range(0..=n.min(m)), f, rng);
            let y = random::matrix_of_rank(p, n, rng.gen_range(0..=p.min(n)), f, rng);
            out.expect(
                am.apply(&x)?.rank() == x.rank() && bm.apply(&y)?.rank() == y.rank(),
                || "multiplicative map changed a rank".into(),
            );
        }
        Ok(out)
    }
}

struct StructureTensor;

impl Check for StructureTensor {
    fn name(&self) -> &'static str {
        "structure-tensor"
    }
    fn claim(&self) -> &'static str {
        "the structure tensor of (x,y) -> yx is <m,n,p>"
    }
    fn run(&self, cfg: &SuiteConfig, _rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        let phi = recovery::composition_map(cfg.shape, cfg.field);
        out.expect(recovery::is_mmt_structure(&phi, cfg.shape)?, || {
            "structure tensor differs".into()
        });
        Ok(out)
    }
}

/// A random bilinear map `M_{n,m} × M_{p,n} → M_{p,m}`.
pub fn random_bilinear(shape: Shape, field: FieldSpec, rng: &mut SeededRng) -> BilinearMap {
    let Shape { m, n, p } = shape;
    let blocks = (0..p * m)
        .map(|_| random::matrix(n * m, p * n, field, rng))
        .collect();
    BilinearMap::new((n, m), (p, n), (p, m), blocks).expect("dims match")
}

struct Equivariance;

impl Check for Equivariance {
    fn name(&self) -> &'static str {
        "equivariance"
    }
    fn claim(&self) -> &'static str {
        "structure_tensor(g.f) = (g1^v (x) g2^v (x) g3) structure_tensor(f)"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        let f = cfg.field;
        for _ in 0..cfg.samples {
            let bil = random_bilinear(cfg.shape, f, rng);
            let [xd, yd, zd] = bil.dims();
            let (g1, g2, g3) = (
                random::invertible(xd, f, rng),
                random::invertible(yd, f, rng),
                random::invertible(zd, f, rng),
            );
            let lhs = recovery::structure_tensor(&bil.act(&g1, &g2, &g3)?);
            let rhs = recovery::structure_tensor(&bil).map_modes([
                &g1.contragredient()?,
                &g2.contragredient()?,
                &g3,
            ])?;
            out.expect(lhs == rhs, || {
                "structure tensor map is not equivariant".into()
            });
        }
        Ok(out)
    }
}

/// Adds one to a random entry of `A`'s matrix until the result is invertible.
pub fn perturb(a: &LinMap, rng: &mut SeededRng) -> Result<LinMap> {
    let f = a.field();
    loop {
        let mut coeffs = a.coeffs().clone();
        let (i, j) = (
            rng.gen_range(0..coeffs.rows()),
            rng.gen_range(0..coeffs.cols()),
        );
        let bumped = &coeffs.get(i, j).clone() + &f.one();
        coeffs.set(i, j, bumped);
        if coeffs.is_invertible() {
            return LinMap::new(a.domain(), a.codomain(), coeffs);
        }
    }
}

struct Bridge;

impl Check for Bridge {
    fn name(&self) -> &'static str {
        "bridge"
    }
    fn claim(&self) -> &'static str {
        "(A,B,C) preserves (x,y) -> yx iff A^v (x) B^v (x) C fixes <m,n,p>"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        let f = cfg.field;
        let phi = recovery::composition_map(cfg.shape, f);
        let t = build_mmt(cfg.shape, f);
        for s in 0..cfg.samples {
            let (g1, g2, g3) = random_triple(cfg.shape, f, rng);
            let (a, b, c) = recovery::r_triple(&g1, &g2, &g3)?;
            let member = s % 2 == 0;
            let a = if member { a } else { perturb(&a, rng)? };
            let in_delta = recovery::delta_membership(&a, &b, &c, &phi)?;
            let (induced, element) = recovery::gamma_from_delta(&a, &b, &c)?;
            let in_gamma = induced.apply(&t)? == t;
            out.expect(in_delta == member && in_gamma == member, || {
                format!("member={member}: delta {in_delta}, gamma {in_gamma}")
            });
            out.expect(element.is_some() == member, || {
                "recovered element presence is wrong".into()
            });
            if let Some(g) = element {
                let x = random_tensor(cfg.shape, f, rng);
                out.expect(isotropy::apply(&g, &x)? == induced.apply(&x)?, || {
                    "recovered element differs from the induced map".into()
                });
            }
        }
        Ok(out)
    }
}

struct Roundtrip;

impl Check for Roundtrip {
    fn name(&self) -> &'static str {
        "roundtrip"
    }
    fn claim(&self) -> &'static str {
        "a factor-preserving isotropy given as a raw map on L is recovered as T(a,b,c)"
    }
    fn run(&self, cfg: &SuiteConfig, rng: &mut SeededRng) -> Result<Outcome> {
        let mut out = Outcome::default();
        for _ in 0..cfg.samples {
            let (a, b, c) = random_triple(cfg.shape, cfg.field, rng);
            out.expect(recovery::isotropy_roundtrip(&a, &b, &c)?, || {
                "round trip lost the element".into()
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass_small() {
        let reg = CheckRegistry::with_defaults();
        for field in [
            FieldSpec::Rationals,
            FieldSpec::gf(2).unwrap(),
            FieldSpec::gf(5).unwrap(),
        ] {
            let cfg = SuiteConfig {
                shape: Shape::new(2, 2, 2).unwrap(),
                field,
                samples: 4,
                seed: 7,
                budget: 1_000_000,
                workers: 2,
            };
            for r in reg.run(&cfg, &[]).unwrap() {
                assert_ne!(
                    r.status,
                    Status::Fail,
                    "{} over {field}: {}",
                    r.name,
                    r.detail
                );
            }
        }
    }

    #[test]
    fn zero_samples_is_vacuous() {
        let reg = CheckRegistry::with_defaults();
        let cfg = SuiteConfig {
            shape: Shape::new(2, 3, 2).unwrap(),
            field: FieldSpec::Rationals,
            samples: 0,
            seed: 1,
            budget: 10,
            workers: 1,
        };
        let reports = reg.run(&cfg, &[]).unwrap();
        assert_eq!(reports.len(), reg.names().len());
        assert!(reports
            .iter()
            .all(|r| r.status == Status::Pass && r.cases == 0));
    }

    #[test]
    fn selection_and_unknown_names() {
        let reg = CheckRegistry::with_defaults();
        let cfg = SuiteConfig {
            shape: Shape::new(1, 2, 2).unwrap(),
            field: FieldSpec::gf(3).unwrap(),
            samples: 3,
            seed: 1,
            budget: 1000,
            workers: 1,
        };
        let only = vec!["kernel".to_string()];
        let reports = reg.run(&cfg, &only).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].name, "kernel");
        assert!(reg.run(&cfg, &["nope".to_string()]).is_err());
        let mut r = CheckRegistry::new();
        r.register(Box::new(Kernel)).unwrap();
        assert!(r.register(Box::new(Kernel)).is_err());
    }
}
