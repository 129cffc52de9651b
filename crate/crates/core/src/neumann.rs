//! The group `⟨s, t⟩` inside `Alt(d(1)) × … × Alt(d(K))`, where `s` acts on
//! factor `k` as the shift `x ↦ x + q(k)` and `t` as `(1, 2, 3)` in every
//! factor.
//!
//! Only the first `K` factors are modeled. Statements about a word are per
//! factor: "trivial" here always means trivial in the first `K` factors.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{GrowthError, GrowthFunction};
use crate::par;
use crate::perm::{factor_in_alt, Gen, GenWord, Perm, PermError, MAX_DENSE_DEGREE};
use crate::sequences::SequenceTable;
use crate::shift_sparse::{ShiftSparseError, ShiftSparsePerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("level {k} outside 1..={levels}")]
    LevelOutOfRange { k: usize, levels: usize },
    #[error("n = {0} is below 8")]
    BelowThreshold(u64),
    #[error("table too shallow for n = {n}: need n < 4p(K+1)+4 = {limit}")]
    TableTooShallow { n: u64, limit: BigUint },
    #[error("d({k}) = {d} exceeds the dense bound")]
    DenseBound { k: usize, d: BigUint },
    #[error("word parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    ShiftSparse(#[from] ShiftSparseError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StGen {
    S,
    T,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StRun {
    pub gen: StGen,
    pub exp: BigInt,
}

/// Freely reduced word over `{s, s⁻¹, t, t⁻¹}`, stored as alternating runs so
/// that powers like `s^p(k)` stay cheap for huge `p(k)`.
///
/// Text form: `s^69 t s^-69 T`; uppercase letters are inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StWord {
    runs: Vec<StRun>,
}

impl StWord {
    pub fn new() -> StWord {
        StWord::default()
    }

    pub fn runs(&self) -> &[StRun] {
        &self.runs
    }

    pub fn push(&mut self, gen: StGen, exp: BigInt) {
        if exp.is_zero() {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.gen == gen {
                last.exp += exp;
                if last.exp.is_zero() {
                    self.runs.pop();
                }
                return;
            }
        }
        self.runs.push(StRun { gen, exp });
    }

    pub fn push_small(&mut self, gen: StGen, exp: i64) {
        self.push(gen, BigInt::from(exp));
    }

    /// Word length over `{s, t}`.
    pub fn len(&self) -> BigUint {
        self.runs.iter().map(|r| r.exp.magnitude().clone()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn concat(&self, other: &StWord) -> StWord {
        let mut out = self.clone();
        for r in &other.runs {
            out.push(r.gen, r.exp.clone());
        }
        out
    }

    pub fn inverse(&self) -> StWord {
        StWord {
            runs: self
                .runs
                .iter()
                .rev()
                .map(|r| StRun {
                    gen: r.gen,
                    exp: -r.exp.clone(),
                })
                .collect(),
        }
    }

    /// Substitutes `A ↦ s`, `B ↦ t`.
    pub fn from_gen_word(word: &GenWord) -> StWord {
        let mut out = StWord::new();
        for run in word.runs() {
            let gen = match run.gen {
                Gen::A => StGen::S,
                Gen::B => StGen::T,
            };
            out.push_small(gen, run.exp);
        }
        out
    }
}

impl fmt::Display for StWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("1");
        }
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let lower = match r.gen {
                StGen::S => 's',
                StGen::T => 't',
            };
            if r.exp.is_one() {
                write!(f, "{lower}")?;
            } else if r.exp == -BigInt::one() {
                write!(f, "{}", lower.to_ascii_uppercase())?;
            } else {
                write!(f, "{lower}^{}", r.exp)?;
            }
        }
        Ok(())
    }
}

impl FromStr for StWord {
    type Err = ModelError;

    /// Accepts letters `s S t T`, optional `^exponent` after each letter, and
    /// `1` for the empty word. Whitespace is ignored.
    fn from_str(s: &str) -> Result<StWord, ModelError> {
        let compact: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut word = StWord::new();
        if compact == ['1'] {
            return Ok(word);
        }
        let mut i = 0;
        while i < compact.len() {
            let (gen, sign) = match compact[i] {
                's' => (StGen::S, 1),
                'S' => (StGen::S, -1),
                't' => (StGen::T, 1),
                'T' => (StGen::T, -1),
                c => return Err(ModelError::Parse(format!("unexpected {c:?} in {s:?}"))),
            };
            i += 1;
            let mut exp = BigInt::one();
            if i < compact.len() && compact[i] == '^' {
                i += 1;
                let start = i;
                if i < compact.len() && compact[i] == '-' {
                    i += 1;
                }
                while i < compact.len() && compact[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = compact[start..i].iter().collect();
                exp = digits
                    .parse()
                    .map_err(|_| ModelError::Parse(format!("bad exponent {digits:?}")))?;
            }
            word.push(gen, exp * sign);
        }
        Ok(word)
    }
}

fn check_level(k: usize, table: &SequenceTable) -> Result<(), ModelError> {
    if k == 0 || k > table.levels {
        return Err(ModelError::LevelOutOfRange {
            k,
            levels: table.levels,
        });
    }
    Ok(())
}

/// `w = [s^p t s^-p, t] = s^p t s^-p t s^p t⁻¹ s^-p t⁻¹` with `p = p(k)`.
pub fn witness_word(k: usize, table: &SequenceTable) -> Result<StWord, ModelError> {
    check_level(k, table)?;
    let p = BigInt::from_biguint(Sign::Plus, table.p(k).clone());
    let mut w = StWord::new();
    for t_exp in [1, 1, -1, -1].chunks(2) {
        w.push(StGen::S, p.clone());
        w.push_small(StGen::T, t_exp[0]);
        w.push(StGen::S, -p.clone());
        w.push_small(StGen::T, t_exp[1]);
    }
    Ok(w)
}

/// Images of `s` and `t` in factor `k`.
pub fn factor_generators(
    k: usize,
    table: &SequenceTable,
) -> Result<(ShiftSparsePerm, ShiftSparsePerm), ModelError> {
    check_level(k, table)?;
    let d = table.d(k);
    let q = BigInt::from_biguint(Sign::Plus, table.q(k).clone());
    Ok((
        ShiftSparsePerm::from_shift(d, &q)?,
        ShiftSparsePerm::beta(d)?,
    ))
}

/// Evaluates `w` under the projection onto factor `k`.
pub fn project(w: &StWord, k: usize, table: &SequenceTable) -> Result<ShiftSparsePerm, ModelError> {
    check_level(k, table)?;
    let d = table.d(k);
    let q = BigInt::from_biguint(Sign::Plus, table.q(k).clone());
    let (_, beta) = factor_generators(k, table)?;
    let mut acc = ShiftSparsePerm::identity(d)?;
    for run in &w.runs {
        let factor = match run.gen {
            StGen::S => ShiftSparsePerm::from_shift(d, &(&run.exp * &q))?,
            StGen::T => beta.pow(&run.exp),
        };
        acc = acc.compose(&factor)?;
    }
    Ok(acc)
}

/// Levels `k <= K` where `w` projects to a nonidentity permutation.
pub fn detecting_factors(w: &StWord, table: &SequenceTable) -> Result<BTreeSet<usize>, ModelError> {
    let rows = par::map_range(table.levels, |i| {
        project(w, i + 1, table).map(|e| (i + 1, e.is_identity()))
    });
    rows.into_iter()
        .filter_map(|r| match r {
            Ok((k, trivial)) => (!trivial).then_some(Ok(k)),
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// `matrix[j-1][k-1]` is true when `project(witness_word(j), k)` is the identity.
pub fn detection_matrix(table: &SequenceTable) -> Result<Vec<Vec<bool>>, ModelError> {
    let levels = table.levels;
    let cells = par::map_range(levels * levels, |idx| {
        let (j, k) = (idx / levels + 1, idx % levels + 1);
        let w = witness_word(j, table)?;
        Ok(project(&w, k, table)?.is_identity())
    });
    let cells: Vec<bool> = cells.into_iter().collect::<Result<_, ModelError>>()?;
    Ok(cells.chunks(levels).map(<[bool]>::to_vec).collect())
}

/// True when the matrix is trivial exactly off the diagonal.
pub fn is_diagonal_pattern(matrix: &[Vec<bool>]) -> bool {
    matrix.iter().enumerate().all(|(j, row)| {
        row.iter()
            .enumerate()
            .all(|(k, &trivial)| trivial == (j != k))
    })
}

/// A word `λ` whose projection onto factor `k` equals the even permutation `g`.
pub fn conjugation_witness(
    g: &Perm,
    k: usize,
    table: &SequenceTable,
) -> Result<StWord, ModelError> {
    check_level(k, table)?;
    let d = table.d(k);
    let degree = match d.to_usize() {
        Some(n) if n <= MAX_DENSE_DEGREE => n,
        _ => {
            return Err(ModelError::DenseBound { k, d: d.clone() });
        }
    };
    if g.degree() != degree {
        return Err(PermError::DegreeMismatch {
            left: g.degree(),
            right: degree,
        }
        .into());
    }
    let q = table.q(k).to_u64().expect("q(k) < d(k) <= 10^4");
    Ok(StWord::from_gen_word(&factor_in_alt(g, q)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseIvCheck {
    pub d_k: String,
    pub bound: String,
    pub pass: bool,
}

/// Evidence that `D(n) >= F(n)` for the group with generators `{s, t}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub n: u64,
    pub k: usize,
    pub witness: String,
    pub witness_length: u64,
    /// Entry `i-1` is whether the witness projects trivially into factor `i`.
    pub detection_row: Vec<bool>,
    pub clause_iv: ClauseIvCheck,
    pub conclusion: String,
    /// Approximate `log2(d(k)!/2)`; the factorial itself is never formed.
    pub half_order_log2: String,
}

/// Picks `k` with `4p(k)+4 <= n < 4p(k+1)+4` and assembles the certificate.
pub fn growth_certificate(
    n: u64,
    f: &GrowthFunction,
    table: &SequenceTable,
) -> Result<GrowthCertificate, ModelError> {
    if n < 8 {
        return Err(ModelError::BelowThreshold(n));
    }
    let big_n = BigUint::from(n);
    let reach = |k: usize| table.p(k) * 4u32 + 4u32;
    let limit = reach(table.levels + 1);
    if big_n >= limit {
        return Err(ModelError::TableTooShallow { n, limit });
    }
    let k = (1..=table.levels)
        .rev()
        .find(|&k| reach(k) <= big_n)
        .expect("4p(1)+4 = 8 <= n");
    let witness = witness_word(k, table)?;
    let witness_length = witness.len().to_u64().expect("witness length <= n");
    let detection_row = par::map_range(table.levels, |i| {
        project(&witness, i + 1, table).map(|e| e.is_identity())
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let arg = reach(k + 1);
    let bound = f.eval(&arg)? * 2u32;
    let d_k = table.d(k);
    let clause_iv = ClauseIvCheck {
        d_k: d_k.to_string(),
        bound: bound.to_string(),
        pass: d_k.is_odd() && *d_k > bound,
    };
    let conclusion = format!(
        "D({n}) >= |Alt(d({k}))| = d({k})!/2 > d({k})/2 >= F({arg}) >= F({n}) = {}",
        f.eval(&big_n)?
    );
    Ok(GrowthCertificate {
        n,
        k,
        witness: witness.to_string(),
        witness_length,
        detection_row,
        clause_iv,
        conclusion,
        half_order_log2: format!("{:.6e}", half_factorial_log2(d_k)),
    })
}

trait Odd {
    fn is_odd(&self) -> bool;
}

impl Odd for BigUint {
    fn is_odd(&self) -> bool {
        num_integer::Integer::is_odd(self)
    }
}

/// Stirling estimate of `log2(d!/2)`; infinite when `d` exceeds `f64`.
fn half_factorial_log2(d: &BigUint) -> f64 {
    let x = match d.to_f64() {
        Some(x) if x.is_finite() => x,
        _ => return f64::INFINITY,
    };
    if x < 2.0 {
        return 0.0;
    }
    let ln = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln();
    ln / std::f64::consts::LN_2 - 1.0
}

/// Recomputes every field of a certificate; returns the list of mismatches.
pub fn validate_certificate(
    cert: &GrowthCertificate,
    f: &GrowthFunction,
    table: &SequenceTable,
) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    if cert.k == 0 || cert.k > table.levels {
        return Err(vec![format!("level {} outside the table", cert.k)]);
    }
    match growth_certificate(cert.n, f, table) {
        Ok(fresh) => {
            if fresh.k != cert.k {
                problems.push(format!(
                    "n = {} brackets level {}, not {}",
                    cert.n, fresh.k, cert.k
                ));
            }
            if fresh.witness_length != cert.witness_length {
                problems.push(format!(
                    "witness length {} != 4p(k)+4 = {}",
                    cert.witness_length, fresh.witness_length
                ));
            }
            if fresh.clause_iv != cert.clause_iv {
                problems.push("clause (iv) data does not match the table".into());
            }
            if fresh.detection_row != cert.detection_row {
                problems.push("detection row does not match recomputation".into());
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    match cert.witness.parse::<StWord>() {
        Ok(w) => {
            if witness_word(cert.k, table).ok().as_ref() != Some(&w) {
                problems.push("witness is not the commutator word for level k".into());
            }
            if w.len() != BigUint::from(cert.witness_length) {
                problems.push("witness_length disagrees with the witness".into());
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let pattern_ok = cert
        .detection_row
        .iter()
        .enumerate()
        .all(|(i, &trivial)| trivial == (i + 1 != cert.k));
    if !pattern_ok || cert.detection_row.len() != table.levels {
        problems.push("detection row is not nontrivial exactly at k".into());
    }
    if !cert.clause_iv.pass {
        problems.push("clause (iv) inequality marked as failing".into());
    }
    let d_ok = cert
        .clause_iv
        .d_k
        .parse::<BigUint>()
        .ok()
        .zip(cert.clause_iv.bound.parse::<BigUint>().ok())
        .is_some_and(|(d, b)| d > b);
    if !d_ok {
        problems.push("d_k > bound does not hold as written".into());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

/// Outcome of projecting every short reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub truncation: usize,
    pub max_len: usize,
    pub words_checked: u64,
    pub detected: u64,
    /// Words projecting trivially into every factor `1..=truncation`.
    pub trivial_in_truncation: Vec<String>,
    /// Trivial-in-truncation words that a control level beyond the truncation
    /// still detects, with those levels.
    pub counterexamples: Vec<(String, Vec<usize>)>,
}

const SWEEP_LETTERS: [(StGen, i64); 4] =
    [(StGen::S, 1), (StGen::S, -1), (StGen::T, 1), (StGen::T, -1)];

fn inverse_letter(a: usize) -> usize {
    a ^ 1
}

/// Projects every nonempty freely reduced word of length `<= max_len` into
/// all factors of `table`. Levels `1..=truncation` decide detection; any
/// remaining levels act as controls for the words the truncation misses.
pub fn sweep_small_words(
    table: &SequenceTable,
    truncation: usize,
    max_len: usize,
) -> Result<SweepReport, ModelError> {
    check_level(truncation, table)?;
    let levels = table.levels;
    let mut letters = Vec::with_capacity(levels);
    for k in 1..=levels {
        let (s, t) = factor_generators(k, table)?;
        letters.push([s.clone(), s.inverse(), t.clone(), t.inverse()]);
    }
    let identities: Vec<ShiftSparsePerm> = (1..=levels)
        .map(|k| ShiftSparsePerm::identity(table.d(k)))
        .collect::<Result<_, _>>()?;

    let step = |state: &mut [ShiftSparsePerm], a: usize| {
        for (k, st) in state.iter_mut().enumerate() {
            *st = st.compose(&letters[k][a]).expect("same modulus");
        }
    };
    let mut total = SweepAcc::default();
    if max_len == 0 {
        return Ok(total.into_report(truncation, max_len));
    }
    // parallel over the reduced two-letter prefixes; single letters inline
    let mut seeds: Vec<Vec<usize>> = Vec::new();
    for a in 0..4 {
        if max_len == 1 {
            seeds.push(vec![a]);
            continue;
        }
        let mut state = identities.clone();
        step(&mut state, a);
        total.record(&[a], &state, truncation);
        seeds.extend(
            (0..4)
                .filter(|&b| b != inverse_letter(a))
                .map(|b| vec![a, b]),
        );
    }
    let partials = par::map_slice(&seeds, |seed| {
        let mut acc = SweepAcc::default();
        let mut state = identities.clone();
        for &a in seed {
            step(&mut state, a);
        }
        let mut prefix = seed.clone();
        dfs(
            &mut prefix,
            &mut state,
            &letters,
            truncation,
            max_len,
            &mut acc,
        );
        acc
    });
    for p in partials {
        total.words += p.words;
        total.detected += p.detected;
        total.trivial.extend(p.trivial);
        total.counter.extend(p.counter);
    }
    Ok(total.into_report(truncation, max_len))
}

#[derive(Default)]
struct SweepAcc {
    words: u64,
    detected: u64,
    trivial: Vec<Vec<usize>>,
    counter: Vec<(Vec<usize>, Vec<usize>)>,
}

fn render_letters(w: &[usize]) -> String {
    let mut word = StWord::new();
    for &a in w {
        let (g, e) = SWEEP_LETTERS[a];
        word.push_small(g, e);
    }
    word.to_string()
}

impl SweepAcc {
    fn into_report(mut self, truncation: usize, max_len: usize) -> SweepReport {
        self.trivial.sort();
        self.counter.sort();
        SweepReport {
            truncation,
            max_len,
            words_checked: self.words,
            detected: self.detected,
            trivial_in_truncation: self.trivial.iter().map(|w| render_letters(w)).collect(),
            counterexamples: self
                .counter
                .iter()
                .map(|(w, ks)| (render_letters(w), ks.clone()))
                .collect(),
        }
    }

    fn record(&mut self, word: &[usize], state: &[ShiftSparsePerm], truncation: usize) {
        self.words += 1;
        if state[..truncation].iter().any(|e| !e.is_identity()) {
            self.detected += 1;
            return;
        }
        self.trivial.push(word.to_vec());
        let control: Vec<usize> = state[truncation..]
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_identity())
            .map(|(i, _)| truncation + i + 1)
            .collect();
        if !control.is_empty() {
            self.counter.push((word.to_vec(), control));
        }
    }
}

fn dfs(
    prefix: &mut Vec<usize>,
    state: &mut Vec<ShiftSparsePerm>,
    letters: &[[ShiftSparsePerm; 4]],
    truncation: usize,
    max_len: usize,
    acc: &mut SweepAcc,
) {
    acc.record(prefix, state, truncation);
    if prefix.len() == max_len {
        return;
    }
    let last = *prefix.last().expect("nonempty prefix");
    for a in 0..4 {
        if a == inverse_letter(last) {
            continue;
        }
        let saved = state.clone();
        for (k, st) in state.iter_mut().enumerate() {
            *st = st.compose(&letters[k][a]).expect("same modulus");
        }
        prefix.push(a);
        dfs(prefix, state, letters, truncation, max_len, acc);
        prefix.pop();
        *state = saved;
    }
}
