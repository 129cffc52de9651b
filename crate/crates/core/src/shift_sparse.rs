//! Permutations of `Z/dZ` of the form "global shift after a finite-support
//! permutation", exact for arbitrarily large `d`.
//!
//! The value `(M, τ)` represents `x ↦ (M + τ(x)) mod d`, where `τ` is stored as
//! its sorted, fixed-point-free list of moved pairs. Every constructor and
//! operation returns this normal form, so equality is structural and the
//! identity test is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::perm::{Perm, MAX_DENSE_DEGREE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftSparseError {
    #[error("modulus {0} is below 5")]
    ModulusTooSmall(BigUint),
    #[error("modulus mismatch")]
    ModulusMismatch,
    #[error("point {0} out of range")]
    PointOutOfRange(BigUint),
    #[error("point {0} repeated in cycle data")]
    RepeatedPoint(BigUint),
    #[error("modulus {0} too large for a dense permutation")]
    ModulusTooLarge(BigUint),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ShiftSparsePerm {
    modulus: BigUint,
    shift: BigUint,
    /// 0-based `(x, τ(x))` pairs, sorted by `x`, with `x != τ(x)`.
    sparse: Vec<(BigUint, BigUint)>,
}

fn check_modulus(d: &BigUint) -> Result<(), ShiftSparseError> {
    if *d < BigUint::from(5u32) {
        return Err(ShiftSparseError::ModulusTooSmall(d.clone()));
    }
    Ok(())
}

fn reduce_signed(m: &BigInt, d: &BigUint) -> BigUint {
    let d_signed = BigInt::from_biguint(Sign::Plus, d.clone());
    m.mod_floor(&d_signed)
        .to_biguint()
        .expect("mod_floor by a positive modulus is nonnegative")
}

impl ShiftSparsePerm {
    pub fn identity(d: &BigUint) -> Result<ShiftSparsePerm, ShiftSparseError> {
        check_modulus(d)?;
        Ok(ShiftSparsePerm {
            modulus: d.clone(),
            shift: BigUint::zero(),
            sparse: Vec::new(),
        })
    }

    /// The pure shift `x ↦ x + m mod d`.
    pub fn from_shift(d: &BigUint, m: &BigInt) -> Result<ShiftSparsePerm, ShiftSparseError> {
        check_modulus(d)?;
        Ok(ShiftSparsePerm {
            modulus: d.clone(),
            shift: reduce_signed(m, d),
            sparse: Vec::new(),
        })
    }

    /// A finite-support permutation given by 1-based disjoint cycles.
    pub fn from_sparse(
        d: &BigUint,
        cycles: &[Vec<BigUint>],
    ) -> Result<ShiftSparsePerm, ShiftSparseError> {
        check_modulus(d)?;
        let mut map = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for cycle in cycles {
            for p in cycle {
                if p.is_zero() || p > d {
                    return Err(ShiftSparseError::PointOutOfRange(p.clone()));
                }
                if !seen.insert(p.clone()) {
                    return Err(ShiftSparseError::RepeatedPoint(p.clone()));
                }
            }
            if cycle.len() < 2 {
                continue;
            }
            for (i, p) in cycle.iter().enumerate() {
                let next = &cycle[(i + 1) % cycle.len()];
                map.insert(p - 1u32, next - 1u32);
            }
        }
        Ok(ShiftSparsePerm {
            modulus: d.clone(),
            shift: BigUint::zero(),
            sparse: map.into_iter().collect(),
        })
    }

    /// The 3-cycle `(1, 2, 3)` on `Z/dZ`.
    pub fn beta(d: &BigUint) -> Result<ShiftSparsePerm, ShiftSparseError> {
        let pts = vec![
            BigUint::from(1u32),
            BigUint::from(2u32),
            BigUint::from(3u32),
        ];
        ShiftSparsePerm::from_sparse(d, &[pts])
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn shift(&self) -> &BigUint {
        &self.shift
    }

    /// Moved pairs of the sparse part, 0-based.
    pub fn sparse_pairs(&self) -> &[(BigUint, BigUint)] {
        &self.sparse
    }

    pub fn support_len(&self) -> usize {
        self.sparse.len()
    }

    pub fn is_identity(&self) -> bool {
        self.shift.is_zero() && self.sparse.is_empty()
    }

    fn sparse_image(&self, x: &BigUint) -> BigUint {
        match self.sparse.binary_search_by(|(k, _)| k.cmp(x)) {
            Ok(i) => self.sparse[i].1.clone(),
            Err(_) => x.clone(),
        }
    }

    pub(crate) fn apply_zero_based(&self, x: &BigUint) -> BigUint {
        (&self.shift + self.sparse_image(x)) % &self.modulus
    }

    /// Image of a 1-based point.
    pub fn apply(&self, point: &BigUint) -> Result<BigUint, ShiftSparseError> {
        if point.is_zero() || *point > self.modulus {
            return Err(ShiftSparseError::PointOutOfRange(point.clone()));
        }
        Ok(self.apply_zero_based(&(point - 1u32)) + 1u32)
    }

    fn add_mod(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.modulus
    }

    fn sub_mod(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.modulus - (b - a)
        }
    }

    /// `self ∘ other`, with `other` applied first.
    pub fn compose(&self, other: &ShiftSparsePerm) -> Result<ShiftSparsePerm, ShiftSparseError> {
        if self.modulus != other.modulus {
            return Err(ShiftSparseError::ModulusMismatch);
        }
        if self.sparse.is_empty() && other.sparse.is_empty() {
            return Ok(ShiftSparsePerm {
                modulus: self.modulus.clone(),
                shift: self.add_mod(&self.shift, &other.shift),
                sparse: Vec::new(),
            });
        }
        // τ1 ∘ S_{M2} = S_{M2} ∘ τ1' with τ1'(x) = τ1(x + M2) - M2
        let m2 = &other.shift;
        let conjugated: BTreeMap<BigUint, BigUint> = self
            .sparse
            .iter()
            .map(|(x, y)| (self.sub_mod(x, m2), self.sub_mod(y, m2)))
            .collect();
        let mut result: BTreeMap<BigUint, BigUint> = BTreeMap::new();
        for (x, y) in &other.sparse {
            let image = conjugated.get(y).cloned().unwrap_or_else(|| y.clone());
            if image != *x {
                result.insert(x.clone(), image);
            }
        }
        for (x, y) in conjugated {
            if other.sparse.binary_search_by(|(k, _)| k.cmp(&x)).is_err() {
                result.insert(x, y);
            }
        }
        Ok(ShiftSparsePerm {
            modulus: self.modulus.clone(),
            shift: self.add_mod(&self.shift, &other.shift),
            sparse: result.into_iter().collect(),
        })
    }

    pub fn inverse(&self) -> ShiftSparsePerm {
        // (S_M τ)⁻¹ = S_{-M} ∘ (x ↦ τ⁻¹(x - M) + M)
        let m = &self.shift;
        let mut sparse: Vec<(BigUint, BigUint)> = self
            .sparse
            .iter()
            .map(|(x, y)| (self.add_mod(y, m), self.add_mod(x, m)))
            .collect();
        sparse.sort();
        ShiftSparsePerm {
            modulus: self.modulus.clone(),
            shift: self.sub_mod(&BigUint::zero(), m),
            sparse,
        }
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, exponent: &BigInt) -> ShiftSparsePerm {
        let mut base = if exponent.sign() == Sign::Minus {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = exponent.magnitude().clone();
        let mut acc = ShiftSparsePerm {
            modulus: self.modulus.clone(),
            shift: BigUint::zero(),
            sparse: Vec::new(),
        };
        if self.sparse.is_empty() {
            let shift = (&self.shift * &e) % &self.modulus;
            let acc = ShiftSparsePerm { shift, ..acc };
            return if exponent.sign() == Sign::Minus {
                acc.inverse()
            } else {
                acc
            };
        }
        while !e.is_zero() {
            if e.is_odd() {
                acc = acc.compose(&base).expect("same modulus");
            }
            base = base.compose(&base).expect("same modulus");
            e >>= 1u32;
        }
        acc
    }

    /// Dense form, available for `d <= 10^4`.
    pub fn to_dense(&self) -> Result<Perm, ShiftSparseError> {
        let n = match self.modulus.to_usize() {
            Some(n) if n <= MAX_DENSE_DEGREE => n,
            _ => return Err(ShiftSparseError::ModulusTooLarge(self.modulus.clone())),
        };
        let images = (0..n)
            .map(|x| {
                self.apply_zero_based(&BigUint::from(x))
                    .to_u32()
                    .expect("residue below a small modulus")
            })
            .collect();
        Ok(Perm::from_images(images).expect("normal form is a bijection"))
    }
}

impl fmt::Display for ShiftSparsePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={}; shift={}; sparse=(", self.modulus, self.shift)?;
        for (i, (x, y)) in self.sparse.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}>{}", x + 1u32, y + 1u32)?;
        }
        f.write_str(")")
    }
}

impl FromStr for ShiftSparsePerm {
    type Err = ShiftSparseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |what: &str| ShiftSparseError::Parse(format!("{what} in {s:?}"));
        let num = |t: &str| t.trim().parse::<BigUint>().map_err(|_| bad("bad integer"));
        let mut parts = s.split(';');
        let d = parts
            .next()
            .and_then(|p| p.trim().strip_prefix("d="))
            .ok_or_else(|| bad("missing d="))?;
        let shift = parts
            .next()
            .and_then(|p| p.trim().strip_prefix("shift="))
            .ok_or_else(|| bad("missing shift="))?;
        let sparse = parts
            .next()
            .and_then(|p| p.trim().strip_prefix("sparse="))
            .ok_or_else(|| bad("missing sparse="))?;
        if parts.next().is_some() {
            return Err(bad("trailing fields"));
        }
        let d = num(d)?;
        check_modulus(&d)?;
        let shift = num(shift)?;
        if shift >= d {
            return Err(bad("shift not reduced"));
        }
        let inner = sparse
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| bad("sparse part needs parentheses"))?;
        let mut map = BTreeMap::new();
        for pair in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (x, y) = pair.split_once('>').ok_or_else(|| bad("pair needs '>'"))?;
            let (x, y) = (num(x)?, num(y)?);
            for p in [&x, &y] {
                if p.is_zero() || *p > d {
                    return Err(ShiftSparseError::PointOutOfRange(p.clone()));
                }
            }
            if x != y && map.insert(x.clone() - 1u32, y - 1u32).is_some() {
                return Err(ShiftSparseError::RepeatedPoint(x));
            }
        }
        let mut values: Vec<&BigUint> = map.values().collect();
        values.sort();
        if !values.iter().copied().eq(map.keys()) {
            return Err(bad("sparse pairs are not a permutation of their support"));
        }
        Ok(ShiftSparsePerm {
            modulus: d,
            shift,
            sparse: map.into_iter().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{cycle_alpha, three_cycle_beta};

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn shift(d: u64, m: i64) -> ShiftSparsePerm {
        ShiftSparsePerm::from_shift(&big(d), &BigInt::from(m)).unwrap()
    }

    #[test]
    fn from_shift_examples() {
        assert_eq!(shift(33, 31).apply(&big(1)).unwrap(), big(32));
        assert!(shift(33, 33).is_identity());
        assert_eq!(shift(8021, 2673).apply(&big(8021)).unwrap(), big(2673));
        assert_eq!(shift(33, 31).apply(&big(2)).unwrap(), big(33));
        assert!(matches!(
            ShiftSparsePerm::from_shift(&big(4), &BigInt::from(1)),
            Err(ShiftSparseError::ModulusTooSmall(_))
        ));
    }

    #[test]
    fn from_sparse_examples() {
        let b = ShiftSparsePerm::beta(&big(33)).unwrap();
        assert_eq!(b.apply(&big(3)).unwrap(), big(1));
        assert!(ShiftSparsePerm::from_sparse(&big(41), &[])
            .unwrap()
            .is_identity());
        let huge = ShiftSparsePerm::beta(&big(1_461_144_071)).unwrap();
        assert_eq!(huge.apply(&big(1_000_000)).unwrap(), big(1_000_000));
        let repeated = ShiftSparsePerm::from_sparse(&big(9), &[vec![big(1), big(2), big(1)]]);
        assert_eq!(repeated, Err(ShiftSparseError::RepeatedPoint(big(1))));
        assert!(ShiftSparsePerm::from_sparse(&big(9), &[vec![big(0), big(2)]]).is_err());
    }

    #[test]
    fn apply_out_of_range() {
        let id = ShiftSparsePerm::identity(&big(7)).unwrap();
        assert_eq!(id.apply(&big(7)).unwrap(), big(7));
        assert!(id.apply(&big(0)).is_err());
        assert!(id.apply(&big(8)).is_err());
    }

    #[test]
    fn compose_examples() {
        assert!(shift(33, 31).compose(&shift(33, 2)).unwrap().is_identity());
        let s = shift(33, 31);
        let t = ShiftSparsePerm::beta(&big(33)).unwrap();
        let conj = s.compose(&t).unwrap().compose(&s.inverse()).unwrap();
        assert!(conj.shift().is_zero());
        let expected =
            ShiftSparsePerm::from_sparse(&big(33), &[vec![big(32), big(33), big(1)]]).unwrap();
        assert_eq!(conj, expected);
        assert_eq!(
            shift(33, 1).compose(&shift(35, 1)),
            Err(ShiftSparseError::ModulusMismatch)
        );
    }

    #[test]
    fn inverse_examples() {
        let id = ShiftSparsePerm::identity(&big(33)).unwrap();
        assert_eq!(id.inverse(), id);
        assert_eq!(shift(33, 31).inverse(), shift(33, 2));
    }

    #[test]
    fn dense_bridge() {
        let b = ShiftSparsePerm::beta(&big(33)).unwrap();
        assert_eq!(b.to_dense().unwrap(), three_cycle_beta(33).unwrap());
        assert_eq!(
            shift(33, 31).to_dense().unwrap(),
            cycle_alpha(33).unwrap().pow(31)
        );
        assert!(matches!(
            shift(10_001, 1).to_dense(),
            Err(ShiftSparseError::ModulusTooLarge(_))
        ));
    }

    #[test]
    fn huge_modulus_identities() {
        let d = BigUint::from(10u32).pow(100) + 7u32;
        let s = ShiftSparsePerm::from_shift(&d, &(BigInt::from(10).pow(99) + 12345)).unwrap();
        let t = ShiftSparsePerm::beta(&d).unwrap();
        let e = s
            .compose(&t)
            .unwrap()
            .compose(&s)
            .unwrap()
            .compose(&t.inverse())
            .unwrap();
        assert!(e.compose(&e.inverse()).unwrap().is_identity());
        assert!(e.inverse().compose(&e).unwrap().is_identity());
        assert!(!e.is_identity());
    }

    #[test]
    fn pow_matches_repeated_compose() {
        let d = big(101);
        let e = shift(101, 7)
            .compose(&ShiftSparsePerm::beta(&d).unwrap())
            .unwrap();
        let mut acc = ShiftSparsePerm::identity(&d).unwrap();
        for _ in 0..5 {
            acc = acc.compose(&e).unwrap();
        }
        assert_eq!(e.pow(&BigInt::from(5)), acc);
        assert_eq!(e.pow(&BigInt::from(-5)), acc.inverse());
        assert_eq!(shift(101, 7).pow(&BigInt::from(-3)), shift(101, -21));
    }

    #[test]
    fn text_round_trip() {
        let s = shift(33, 31);
        let t = ShiftSparsePerm::beta(&big(33)).unwrap();
        let e = s.compose(&t).unwrap();
        let text = e.to_string();
        assert_eq!(text, "d=33; shift=31; sparse=(1>2, 2>3, 3>1)");
        assert_eq!(text.parse::<ShiftSparsePerm>().unwrap(), e);
        assert!("d=33; shift=40; sparse=()"
            .parse::<ShiftSparsePerm>()
            .is_err());
        assert!("d=33; shift=1; sparse=(1>2)"
            .parse::<ShiftSparsePerm>()
            .is_err());
    }
}
