//! The integer sequences `p`, `q`, `d` driving the construction, built level by
//! level from a growth function with exact arithmetic.
//!
//! Conditions checked by [`verify_clauses`], for every level `k`:
//!
//! 1. `p` is strictly increasing, odd, and `p(1) = 1`;
//! 2. `q(k) > 2` is odd;
//! 3. `d(k) = p(k) q(k) + 2`;
//! 4. `d(k)` is odd and `d(k) > 2 F(4 p(k+1) + 4)`;
//! 5. `p(k+1) q(i) mod d(i) ∉ {1, 2, d(i)-1, d(i)-2}` for every `i <= k`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{GrowthError, GrowthFunction};
use crate::par;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("truncation level must be at least 1")]
    InvalidLevel,
    #[error("lcm of an empty list")]
    EmptyLcm,
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// `p(1..=K+1)`, `q(1..=K)`, `d(1..=K)` and `ℓ(2..=K)` for a truncation level `K`.
///
/// Vectors are 0-based; the accessors take the 1-based level. The fields are
/// public so reports can be loaded from disk (and tampered with in tests);
/// [`verify_clauses`] is the authority on whether a table is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTable {
    pub levels: usize,
    pub p: Vec<BigUint>,
    pub q: Vec<BigUint>,
    pub d: Vec<BigUint>,
    /// `ell[j]` is `ℓ(j + 2) = lcm(d(1), …, d(j + 1))`.
    pub ell: Vec<BigUint>,
}

impl SequenceTable {
    pub fn p(&self, k: usize) -> &BigUint {
        &self.p[k - 1]
    }

    pub fn q(&self, k: usize) -> &BigUint {
        &self.q[k - 1]
    }

    pub fn d(&self, k: usize) -> &BigUint {
        &self.d[k - 1]
    }

    /// `ℓ(k) = lcm(d(1), …, d(k-1))` for `k >= 2`.
    pub fn ell(&self, k: usize) -> &BigUint {
        &self.ell[k - 2]
    }

    /// Checks that the vector lengths agree with `levels`.
    pub fn check_shape(&self) -> Result<(), SequenceError> {
        let k = self.levels;
        if k == 0 {
            return Err(SequenceError::Malformed("K must be at least 1".into()));
        }
        if self.p.len() != k + 1
            || self.q.len() != k
            || self.d.len() != k
            || self.ell.len() != k - 1
        {
            return Err(SequenceError::Malformed(format!(
                "expected {} p, {k} q, {k} d and {} ell entries",
                k + 1,
                k - 1
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    #[serde(rename = "K")]
    levels: usize,
    p: Vec<String>,
    q: Vec<String>,
    d: Vec<String>,
    ell: Vec<String>,
}

impl Serialize for SequenceTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings = |v: &[BigUint]| v.iter().map(|x| x.to_string()).collect();
        TableJson {
            levels: self.levels,
            p: strings(&self.p),
            q: strings(&self.q),
            d: strings(&self.d),
            ell: strings(&self.ell),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SequenceTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = TableJson::deserialize(deserializer)?;
        let parse = |v: Vec<String>| -> Result<Vec<BigUint>, D::Error> {
            v.iter()
                .map(|s| {
                    s.parse::<BigUint>()
                        .map_err(|_| D::Error::custom(format!("bad integer {s:?}")))
                })
                .collect()
        };
        let table = SequenceTable {
            levels: raw.levels,
            p: parse(raw.p)?,
            q: parse(raw.q)?,
            d: parse(raw.d)?,
            ell: parse(raw.ell)?,
        };
        table.check_shape().map_err(D::Error::custom)?;
        Ok(table)
    }
}

/// Exact least common multiple of a nonempty list.
pub fn lcm_accumulate(values: &[BigUint]) -> Result<BigUint, SequenceError> {
    let (first, rest) = values.split_first().ok_or(SequenceError::EmptyLcm)?;
    Ok(rest.iter().fold(first.clone(), |acc, v| acc.lcm(v)))
}

/// True when `x ≡ ±1, ±2 (mod d)`, the residues for which the conjugated
/// 3-cycle fails to commute with `(1, 2, 3)`.
pub fn is_bad_residue(x: &BigUint, d: &BigUint) -> bool {
    let r = x % d;
    let two = BigUint::from(2u32);
    r == BigUint::one() || r == two || &r + 1u32 == *d || &r + 2u32 == *d
}

/// Builds the table through level `levels`, taking the smallest admissible
/// candidate for each `p(k+1)`.
///
/// # Panics
///
/// Panics if none of the five candidates for `p(k+1)` is admissible, or if
/// any of the supporting facts (coprimality, distinct candidates) fails; both
/// are impossible for a correct implementation.
pub fn build(f: &GrowthFunction, levels: usize) -> Result<SequenceTable, SequenceError> {
    if levels == 0 {
        return Err(SequenceError::InvalidLevel);
    }
    let f16 = f.eval_u64(16)?;
    let mut p = vec![BigUint::one(), BigUint::from(3u32)];
    let mut d = vec![&f16 * 2u32 + 1u32];
    let mut q = vec![&f16 * 2u32 - 1u32];
    let mut ell: Vec<BigUint> = Vec::new();
    assert!(
        !is_bad_residue(&(&p[1] * &q[0]), &d[0]),
        "base case violates the commuting condition"
    );

    for k in 2..=levels {
        // ℓ >= d(k-1), and F is monotone, so an oversized F fails here before
        // the lcm of huge values is formed
        f.eval(&(&p[k - 1] * 4u32 + &d[k - 2] * 40u32 + 4u32))?;
        let l = match ell.last() {
            Some(prev) => prev.lcm(&d[k - 2]),
            None => d[0].clone(),
        };
        let pk = p[k - 1].clone();
        let arg = &pk * 4u32 + &l * 40u32 + 4u32;
        let qk = f.eval(&arg)? * 2u32 + 1u32;
        let dk = &pk * &qk + 2u32;
        assert!(qk.gcd(&dk).is_one(), "q({k}) and d({k}) share a factor");
        assert!(&pk + &l * 10u32 < dk, "candidates for p({}) collide", k + 1);
        for (i, di) in d.iter().enumerate() {
            assert!(
                (&l * 2u32 % di).is_zero(),
                "2ℓ is not a multiple of d({})",
                i + 1
            );
        }
        let next = (1..=5u32)
            .map(|j| &pk + &l * (2 * j))
            .find(|cand| !is_bad_residue(&(cand * &qk), &dk))
            .unwrap_or_else(|| panic!("no admissible candidate for p({})", k + 1));
        q.push(qk);
        d.push(dk);
        p.push(next);
        ell.push(l);
    }

    Ok(SequenceTable {
        levels,
        p,
        q,
        d,
        ell,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    #[serde(rename = "shape")]
    Shape,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
    #[serde(rename = "v")]
    V,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Clause::Shape => "shape",
            Clause::I => "i",
            Clause::II => "ii",
            Clause::III => "iii",
            Clause::IV => "iv",
            Clause::V => "v",
        };
        f.write_str(name)
    }
}

/// One clause instance at level `k` (and, for clause v, the inner index `i`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseCheck {
    pub clause: Clause,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub pass: bool,
    /// Offending value on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ClauseCheck {
    fn new(clause: Clause, k: usize, pass: bool, detail: impl FnOnce() -> String) -> ClauseCheck {
        ClauseCheck {
            clause,
            k,
            i: None,
            pass,
            detail: (!pass).then(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseReport {
    pub pass: bool,
    pub checks: Vec<ClauseCheck>,
}

impl ClauseReport {
    pub fn failures(&self) -> impl Iterator<Item = &ClauseCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn failed(&self, clause: Clause) -> bool {
        self.failures().any(|c| c.clause == clause)
    }
}

enum Task {
    I(usize),
    II(usize),
    III(usize),
    IV(usize),
    V(usize, usize),
}

/// Checks all five clauses (and the `ℓ` bookkeeping) up to the table's level.
pub fn verify_clauses(table: &SequenceTable, f: &GrowthFunction) -> ClauseReport {
    if let Err(e) = table.check_shape() {
        let check = ClauseCheck::new(Clause::Shape, 0, false, || e.to_string());
        return ClauseReport {
            pass: false,
            checks: vec![check],
        };
    }
    let levels = table.levels;
    let mut tasks: Vec<Task> = (1..=levels + 1).map(Task::I).collect();
    for k in 1..=levels {
        tasks.extend([Task::II(k), Task::III(k), Task::IV(k)]);
        tasks.extend((1..=k).map(|i| Task::V(k, i)));
    }
    let mut checks = par::map_slice(&tasks, |task| check_one(table, f, task));
    for k in 2..=levels {
        let expected = lcm_accumulate(&table.d[..k - 1]).expect("nonempty");
        let got = table.ell(k);
        checks.push(ClauseCheck::new(Clause::Shape, k, *got == expected, || {
            format!("ell({k}) = {got}, lcm of d(1..{}) = {expected}", k - 1)
        }));
    }
    ClauseReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn check_one(t: &SequenceTable, f: &GrowthFunction, task: &Task) -> ClauseCheck {
    let two = BigUint::from(2u32);
    match *task {
        Task::I(k) => {
            let pk = t.p(k);
            let odd = pk.is_odd();
            let anchored = k != 1 || pk.is_one();
            let increasing = k == 1 || pk > t.p(k - 1);
            ClauseCheck::new(Clause::I, k, odd && anchored && increasing, || {
                if !odd {
                    format!("p({k}) = {pk} is even")
                } else if !anchored {
                    format!("p(1) = {pk}, expected 1")
                } else {
                    format!("p({k}) = {pk} <= p({}) = {}", k - 1, t.p(k - 1))
                }
            })
        }
        Task::II(k) => {
            let qk = t.q(k);
            ClauseCheck::new(Clause::II, k, qk.is_odd() && *qk > two, || {
                format!("q({k}) = {qk}")
            })
        }
        Task::III(k) => {
            let expected = t.p(k) * t.q(k) + 2u32;
            ClauseCheck::new(Clause::III, k, *t.d(k) == expected, || {
                format!("d({k}) = {}, p({k})q({k}) + 2 = {expected}", t.d(k))
            })
        }
        Task::IV(k) => {
            let dk = t.d(k);
            if dk.is_even() {
                return ClauseCheck::new(Clause::IV, k, false, || format!("d({k}) = {dk} is even"));
            }
            match f.eval(&(t.p(k + 1) * 4u32 + 4u32)) {
                Ok(fv) => {
                    let bound = fv * 2u32;
                    let ok = *dk > bound;
                    ClauseCheck::new(Clause::IV, k, ok, || {
                        format!("d({k}) = {dk} <= 2F(4p({})+4) = {bound}", k + 1)
                    })
                }
                Err(e) => ClauseCheck::new(Clause::IV, k, false, || e.to_string()),
            }
        }
        Task::V(k, i) => {
            let residue = (t.p(k + 1) * t.q(i)) % t.d(i);
            let ok = !is_bad_residue(&residue, t.d(i));
            let mut check = ClauseCheck::new(Clause::V, k, ok, || {
                format!("p({})q({i}) ≡ {residue} mod d({i}) = {}", k + 1, t.d(i))
            });
            check.i = Some(i);
            check
        }
    }
}
