//! The isotropy group acting on rank decompositions: exhaustive enumeration
//! over small prime fields, stabilizers and orbit equivalence.

use std::collections::HashSet;
use std::thread;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::isotropy::{self, IsotropyElement};
use crate::mat::Mat;
use crate::perm::Perm3;
use crate::tensor::{build_mmt, decomposable_equal, decomposition_sum, Decomposition, Shape};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

pub fn act_on_decomposition(g: &IsotropyElement, d: &Decomposition) -> Result<Decomposition> {
    let terms = d
        .terms()
        .iter()
        .map(|t| isotropy::apply_to_rank_one(g, t))
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(d.shape(), d.field(), terms)
}

/// Perfect matching between the terms of `d1` and `d2` under
/// [`decomposable_equal`].
pub fn decompositions_equal_as_multisets(d1: &Decomposition, d2: &Decomposition) -> bool {
    if d1.shape() != d2.shape() || d1.field() != d2.field() || d1.len() != d2.len() {
        return false;
    }
    let n = d1.len();
    let adj: Vec<Vec<usize>> = d1
        .terms()
        .iter()
        .map(|s| {
            (0..n)
                .filter(|&j| decomposable_equal(s, &d2.terms()[j]))
                .collect()
        })
        .collect();
    if adj.iter().any(Vec::is_empty) {
        return false;
    }
    let mut owner: Vec<Option<usize>> = vec![None; n];
    (0..n).all(|i| augment(i, &adj, &mut owner, &mut vec![false; n]))
}

fn augment(i: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if owner[j].is_none_or(|k| augment(k, adj, owner, seen)) {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

/// `|GL_n(q)| = Π_{i<n} (qⁿ − qⁱ)`.
pub fn gl_order(n: usize, q: u64) -> u128 {
    let qn = (q as u128).saturating_pow(n as u32);
    (0..n as u32).fold(1u128, |acc, i| acc.saturating_mul(qn - (q as u128).pow(i)))
}

/// All invertible `n×n` matrices over GF(q), in lexicographic order of their
/// row-major entries.
pub fn gl_list(n: usize, field: FieldSpec) -> Result<Vec<Mat>> {
    let q = field.modulus().ok_or(Error::InfiniteField(field))?;
    let cells = n * n;
    let total = (q as u128)
        .checked_pow(cells as u32)
        .filter(|&t| t <= u64::MAX as u128);
    let total = total.ok_or(Error::BudgetExceeded {
        needed: u128::MAX,
        budget: u64::MAX,
    })? as u64;
    let mut out = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let mut digits = vec![0u64; cells];
        for d in digits.iter_mut().rev() {
            *d = rest % q;
            rest /= q;
        }
        let m = Mat::from_fn(n, n, field, |i, j| field.residue(digits[i * n + j]));
        if m.is_invertible() {
            out.push(m);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Factor-preserving elements only.
    Small,
    /// Every admissible factor permutation.
    Full,
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub mode: EnumerationMode,
    pub budget: u64,
    /// `0` picks the available parallelism.
    pub workers: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            mode: EnumerationMode::Full,
            budget: DEFAULT_BUDGET,
            workers: 0,
        }
    }
}

/// Number of raw `(a, b, c)` triples an enumeration walks through.
pub fn raw_triple_count(shape: Shape, field: FieldSpec) -> Result<u128> {
    let q = field.modulus().ok_or(Error::InfiniteField(field))?;
    Ok(shape
        .gl_sizes()
        .iter()
        .fold(1u128, |acc, &k| acc.saturating_mul(gl_order(k, q))))
}

fn worker_count(requested: usize, jobs: usize) -> usize {
    let w = if requested == 0 {
        thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        requested
    };
    w.clamp(1, jobs.max(1))
}

/// Every distinct element of the group, normalized, each exactly once. The
/// order depends only on the inputs, not on the worker count.
pub fn enumerate_group(
    shape: Shape,
    field: FieldSpec,
    opts: EnumerationOptions,
) -> Result<Vec<IsotropyElement>> {
    let needed = raw_triple_count(shape, field)?;
    if needed > opts.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.budget,
        });
    }
    let [gm, gn, gp] = shape.gl_sizes().map(|k| gl_list(k, field));
    let normalize_all = |l: Vec<Mat>| l.into_iter().map(|x| x.normalized().0).collect::<Vec<_>>();
    let (la, lb, lc) = (normalize_all(gm?), normalize_all(gn?), normalize_all(gp?));

    let workers = worker_count(opts.workers, la.len());
    let chunk = la.len().div_ceil(workers);
    let partials: Vec<Vec<(usize, usize, usize)>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..la.len())
            .step_by(chunk.max(1))
            .map(|start| {
                let (la, lb, lc) = (&la, &lb, &lc);
                scope.spawn(move || {
                    let end = (start + chunk).min(la.len());
                    let mut seen = HashSet::new();
                    let mut out = Vec::new();
                    for (i, a) in la.iter().enumerate().take(end).skip(start) {
                        for (j, b) in lb.iter().enumerate() {
                            for (k, c) in lc.iter().enumerate() {
                                if seen.insert((a, b, c)) {
                                    out.push((i, j, k));
                                }
                            }
                        }
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    });

    let perms = match opts.mode {
        EnumerationMode::Small => vec![Perm3::Id],
        EnumerationMode::Full => Perm3::admissible(shape),
    };
    let mut seen = HashSet::new();
    let mut triples = Vec::new();
    for (i, j, k) in partials.into_iter().flatten() {
        if seen.insert((&la[i], &lb[j], &lc[k])) {
            triples.push((i, j, k));
        }
    }
    let mut out = Vec::with_capacity(triples.len() * perms.len());
    for &(i, j, k) in &triples {
        for &pi in &perms {
            out.push(IsotropyElement::new(
                shape,
                pi,
                la[i].clone(),
                lb[j].clone(),
                lc[k].clone(),
            )?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerResult {
    pub elements: Vec<IsotropyElement>,
    pub order: usize,
    pub closed: bool,
}

fn require_decomposition_of_t(d: &Decomposition) -> Result<()> {
    if decomposition_sum(d) != build_mmt(d.shape(), d.field()) {
        return Err(Error::NotADecompositionOfT);
    }
    Ok(())
}

/// Elements of `group` mapping `d` to itself as a multiset, filtered in parallel.
fn fixing(
    group: &[IsotropyElement],
    d: &Decomposition,
    target: &Decomposition,
    workers: usize,
) -> Result<Vec<IsotropyElement>> {
    let workers = worker_count(workers, group.len());
    let chunk = group.len().div_ceil(workers).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = group
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || -> Result<Vec<IsotropyElement>> {
                    let mut out = Vec::new();
                    for g in part {
                        if decompositions_equal_as_multisets(&act_on_decomposition(g, d)?, target) {
                            out.push(g.clone());
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        let mut all = Vec::new();
        for h in handles {
            all.extend(h.join().expect("stabilizer worker panicked")?);
        }
        Ok(all)
    })
}

/// Checks that a set of normalized elements contains the identity and is
/// closed under composition and inversion.
pub fn is_closed_subgroup(elements: &[IsotropyElement]) -> Result<bool> {
    let Some(first) = elements.first() else {
        return Ok(false);
    };
    let set: HashSet<&IsotropyElement> = elements.iter().collect();
    let identity = IsotropyElement::identity(first.shape(), first.field());
    if !set.contains(&identity) {
        return Ok(false);
    }
    for g in elements {
        if !set.contains(&isotropy::normalize(&isotropy::invert(g))) {
            return Ok(false);
        }
        for h in elements {
            if !set.contains(&isotropy::normalize(&isotropy::compose(g, h)?)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn stabilizer(d: &Decomposition, opts: EnumerationOptions) -> Result<StabilizerResult> {
    require_decomposition_of_t(d)?;
    let group = enumerate_group(d.shape(), d.field(), opts)?;
    let elements = fixing(&group, d, d, opts.workers)?;
    let closed = is_closed_subgroup(&elements)?;
    Ok(StabilizerResult {
        order: elements.len(),
        elements,
        closed,
    })
}

/// Some `g` with `g·d1 = d2` as multisets, or `None` after an exhaustive search.
pub fn orbit_equivalent(
    d1: &Decomposition,
    d2: &Decomposition,
    opts: EnumerationOptions,
) -> Result<Option<IsotropyElement>> {
    if d1.shape() != d2.shape() {
        return Err(Error::dims("decompositions have different shapes"));
    }
    if d1.field() != d2.field() {
        return Err(Error::FieldMismatch {
            left: d1.field(),
            right: d2.field(),
        });
    }
    require_decomposition_of_t(d1)?;
    require_decomposition_of_t(d2)?;
    if d1.len() != d2.len() {
        return Ok(None);
    }
    if decompositions_equal_as_multisets(d1, d2) {
        return Ok(Some(IsotropyElement::identity(d1.shape(), d1.field())));
    }
    let group = enumerate_group(d1.shape(), d1.field(), opts)?;
    for g in &group {
        if decompositions_equal_as_multisets(&act_on_decomposition(g, d1)?, d2) {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::tensor::RankOneTriple;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::gf(q).unwrap()
    }

    fn shape(m: usize, n: usize, p: usize) -> Shape {
        Shape::new(m, n, p).unwrap()
    }

    #[test]
    fn gl_sizes_match_counting() {
        assert_eq!(gl_list(2, gf(2)).unwrap().len(), 6);
        assert_eq!(gl_list(2, gf(3)).unwrap().len(), 48);
        assert_eq!(gl_list(3, gf(2)).unwrap().len(), 168);
        assert_eq!(gl_list(1, gf(5)).unwrap().len(), 4);
        for (n, q) in [(1, 5), (2, 2), (2, 3), (3, 2)] {
            assert_eq!(gl_order(n, q), gl_list(n, gf(q)).unwrap().len() as u128);
        }
        assert!(matches!(
            gl_list(2, FieldSpec::Rationals),
            Err(Error::InfiniteField(_))
        ));
    }

    #[test]
    fn small_222_gf2() {
        let opts = EnumerationOptions {
            mode: EnumerationMode::Small,
            ..Default::default()
        };
        assert_eq!(
            enumerate_group(shape(2, 2, 2), gf(2), opts).unwrap().len(),
            216
        );
    }

    #[test]
    fn full_counts_follow_admissibility() {
        let small = EnumerationOptions {
            mode: EnumerationMode::Small,
            ..Default::default()
        };
        let s = shape(2, 3, 2);
        let k = enumerate_group(s, gf(2), small).unwrap().len();
        let full = enumerate_group(s, gf(2), EnumerationOptions::default()).unwrap();
        assert_eq!(full.len(), 2 * k);
        assert!(full.iter().any(|g| g.pi() == Perm3::T12));
    }

    #[test]
    fn budget_is_a_hard_error() {
        let opts = EnumerationOptions {
            budget: 100,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_group(shape(2, 2, 2), gf(2), opts),
            Err(Error::BudgetExceeded {
                needed: 216,
                budget: 100
            })
        ));
    }

    #[test]
    fn multiset_equality() {
        let f = gf(5);
        let d = Decomposition::standard(shape(2, 2, 2), f);
        let mut terms: Vec<RankOneTriple> = d.terms().to_vec();
        terms.reverse();
        let (two, three) = (f.from_i64(2), f.from_i64(3));
        // 2·3·inverse(6) = 1
        let six_inv = f.from_i64(6).inv().unwrap();
        let t0 = &terms[0];
        terms[0] = RankOneTriple::new(
            t0.u().scale(&two),
            t0.v().scale(&three),
            t0.w().scale(&six_inv),
        )
        .unwrap();
        let shuffled = Decomposition::new(d.shape(), f, terms.clone()).unwrap();
        assert!(decompositions_equal_as_multisets(&d, &shuffled));
        terms[1] = RankOneTriple::new(
            terms[1].u().scale(&two),
            terms[1].v().clone(),
            terms[1].w().clone(),
        )
        .unwrap();
        let broken = Decomposition::new(d.shape(), f, terms).unwrap();
        assert!(!decompositions_equal_as_multisets(&d, &broken));
    }

    #[test]
    fn duplicate_terms_need_matching_multiplicity() {
        let f = gf(3);
        let s = shape(1, 1, 1);
        let one = Mat::identity(1, f);
        let t = RankOneTriple::new(one.clone(), one.clone(), one.clone()).unwrap();
        let u = RankOneTriple::new(one.scale(&f.from_i64(2)), one.clone(), one.clone()).unwrap();
        let d1 = Decomposition::new(s, f, vec![t.clone(), t.clone(), u.clone()]).unwrap();
        let d2 = Decomposition::new(s, f, vec![t.clone(), u.clone(), u]).unwrap();
        assert!(!decompositions_equal_as_multisets(&d1, &d2));
        assert!(decompositions_equal_as_multisets(&d1, &d1));
    }

    #[test]
    fn action_commutes_with_sum() {
        let f = gf(5);
        let mut rng = random::rng(8);
        let s = shape(2, 2, 2);
        for _ in 0..10 {
            let g = IsotropyElement::new(
                s,
                Perm3::ALL[rand::Rng::gen_range(&mut rng, 0..6)],
                random::invertible(2, f, &mut rng),
                random::invertible(2, f, &mut rng),
                random::invertible(2, f, &mut rng),
            )
            .unwrap();
            let terms = (0..3)
                .map(|_| {
                    RankOneTriple::new(
                        random::nonzero_matrix(2, 2, f, &mut rng),
                        random::nonzero_matrix(2, 2, f, &mut rng),
                        random::nonzero_matrix(2, 2, f, &mut rng),
                    )
                    .unwrap()
                })
                .collect();
            let d = Decomposition::new(s, f, terms).unwrap();
            let image = act_on_decomposition(&g, &d).unwrap();
            assert_eq!(
                decomposition_sum(&image),
                isotropy::apply(&g, &decomposition_sum(&d)).unwrap()
            );
        }
    }

    #[test]
    fn standard_stabilizer_is_a_group() {
        let d = Decomposition::standard(shape(2, 2, 2), gf(2));
        let res = stabilizer(&d, EnumerationOptions::default()).unwrap();
        assert!(res.closed);
        assert_eq!(res.order, res.elements.len());
        for pi in Perm3::ALL {
            let rho = isotropy::rho_element(pi, d.shape(), d.field()).unwrap();
            assert!(res.elements.contains(&rho));
        }
    }

    #[test]
    fn bad_sum_is_rejected() {
        let f = gf(2);
        let d = Decomposition::standard(shape(2, 2, 2), f);
        let mut terms = d.terms().to_vec();
        terms.pop();
        let short = Decomposition::new(d.shape(), f, terms).unwrap();
        assert_eq!(
            stabilizer(&short, EnumerationOptions::default()),
            Err(Error::NotADecompositionOfT)
        );
    }

    #[test]
    fn orbit_of_self_is_identity() {
        let d = Decomposition::standard(shape(2, 2, 2), gf(2));
        let g = orbit_equivalent(&d, &d, EnumerationOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(g, IsotropyElement::identity(d.shape(), d.field()));
    }
}
