use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::Shape;

/// A permutation of the three tensor factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Perm3 {
    Id,
    T12,
    T13,
    T23,
    C123,
    C132,
}

impl Perm3 {
    pub const ALL: [Perm3; 6] = [
        Perm3::Id,
        Perm3::T12,
        Perm3::T13,
        Perm3::T23,
        Perm3::C123,
        Perm3::C132,
    ];

    /// Zero-based images: factor in slot `s` moves to slot `images()[s]`.
    pub fn images(self) -> [usize; 3] {
        match self {
            Perm3::Id => [0, 1, 2],
            Perm3::T12 => [1, 0, 2],
            Perm3::T13 => [2, 1, 0],
            Perm3::T23 => [0, 2, 1],
            Perm3::C123 => [1, 2, 0],
            Perm3::C132 => [2, 0, 1],
        }
    }

    fn from_images(images: [usize; 3]) -> Perm3 {
        *Perm3::ALL
            .iter()
            .find(|p| p.images() == images)
            .expect("images form a permutation")
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Perm3) -> Perm3 {
        let (a, b) = (self.images(), other.images());
        Perm3::from_images([a[b[0]], a[b[1]], a[b[2]]])
    }

    pub fn inverse(self) -> Perm3 {
        let img = self.images();
        let mut inv = [0; 3];
        for (s, &t) in img.iter().enumerate() {
            inv[t] = s;
        }
        Perm3::from_images(inv)
    }

    pub fn is_odd(self) -> bool {
        matches!(self, Perm3::T12 | Perm3::T13 | Perm3::T23)
    }

    pub fn order(self) -> usize {
        match self {
            Perm3::Id => 1,
            Perm3::T12 | Perm3::T13 | Perm3::T23 => 2,
            Perm3::C123 | Perm3::C132 => 3,
        }
    }

    /// Whether the transpose-and-permute map for this permutation is well
    /// defined on `M_{m,n} ⊗ M_{n,p} ⊗ M_{p,m}`. Shape `(1,1,1)` only admits
    /// the identity.
    pub fn is_admissible(self, shape: Shape) -> bool {
        let Shape { m, n, p } = shape;
        if shape.is_trivial() {
            return self == Perm3::Id;
        }
        match self {
            Perm3::Id => true,
            Perm3::T23 => m == n,
            Perm3::T12 => m == p,
            Perm3::T13 => n == p,
            Perm3::C123 | Perm3::C132 => m == n && n == p,
        }
    }

    pub fn admissible(shape: Shape) -> Vec<Perm3> {
        Perm3::ALL
            .into_iter()
            .filter(|p| p.is_admissible(shape))
            .collect()
    }

    pub fn label(self) -> &'static str {
        match self {
            Perm3::Id => "id",
            Perm3::T12 => "12",
            Perm3::T13 => "13",
            Perm3::T23 => "23",
            Perm3::C123 => "123",
            Perm3::C132 => "132",
        }
    }
}

impl fmt::Display for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Perm3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Perm3::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown permutation `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_table() {
        for a in Perm3::ALL {
            assert_eq!(a.compose(Perm3::Id), a);
            assert_eq!(a.compose(a.inverse()), Perm3::Id);
            let mut pow = Perm3::Id;
            for _ in 0..a.order() {
                pow = pow.compose(a);
            }
            assert_eq!(pow, Perm3::Id);
            for b in Perm3::ALL {
                assert_eq!(a.compose(b).is_odd(), a.is_odd() != b.is_odd());
                for c in Perm3::ALL {
                    assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
                }
            }
        }
        assert_eq!(Perm3::T12.compose(Perm3::T23), Perm3::C123);
        assert_eq!(Perm3::T23.compose(Perm3::T12), Perm3::C132);
        assert_eq!(
            Perm3::T12.compose(Perm3::T23).compose(Perm3::T12),
            Perm3::T13
        );
    }

    #[test]
    fn admissibility_matches_factor_shapes() {
        // oracle: after moving factor s (transposed if odd) to slot π(s), the
        // matrix shape must equal the shape expected in that slot
        for m in 1..=3 {
            for n in 1..=3 {
                for p in 1..=3 {
                    let shape = Shape::new(m, n, p).unwrap();
                    if shape.is_trivial() {
                        assert_eq!(Perm3::admissible(shape), vec![Perm3::Id]);
                        continue;
                    }
                    let fs = shape.factor_shapes();
                    for pi in Perm3::ALL {
                        let fits = (0..3).all(|s| {
                            let (r, c) = fs[s];
                            let moved = if pi.is_odd() { (c, r) } else { (r, c) };
                            moved == fs[pi.images()[s]]
                        });
                        assert_eq!(fits, pi.is_admissible(shape), "{pi} on {shape}");
                    }
                }
            }
        }
    }

    #[test]
    fn labels_round_trip() {
        for p in Perm3::ALL {
            assert_eq!(p.label().parse::<Perm3>().unwrap(), p);
        }
        assert!("21".parse::<Perm3>().is_err());
    }
}
