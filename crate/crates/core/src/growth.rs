//! Growth functions `f : N → N` and their monotone normalization
//! `F(n) = max(n, f(1), …, f(n))`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Values wider than this many bits are refused instead of materialized.
pub const MAX_VALUE_BITS: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error(
        "unknown growth function {0:?} (expected identity, poly:c, exp2, exp:b or table:path)"
    )]
    UnknownSpec(String),
    #[error("cannot read growth table {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("growth table line {line}: {message}")]
    TableSyntax { line: usize, message: String },
    #[error("growth value at argument of {arg_bits} bits would need more than {limit} bits")]
    TooLarge { arg_bits: u64, limit: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrowthKind {
    Identity,
    /// `n^c`
    Polynomial(u32),
    /// `b^n`
    Exponential(u32),
    Table(GrowthTable),
}

/// Step function read from `n f(n)` lines: between listed arguments the value
/// of the largest listed `n' <= n` applies; below the first entry it is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    source: PathBuf,
    entries: BTreeMap<BigUint, BigUint>,
    /// running maximum of the entries up to and including each key
    prefix_max: BTreeMap<BigUint, BigUint>,
}

impl GrowthTable {
    pub fn from_entries(source: PathBuf, entries: BTreeMap<BigUint, BigUint>) -> GrowthTable {
        let mut prefix_max = BTreeMap::new();
        let mut running = BigUint::zero();
        for (k, v) in &entries {
            if *v > running {
                running = v.clone();
            }
            prefix_max.insert(k.clone(), running.clone());
        }
        GrowthTable {
            source,
            entries,
            prefix_max,
        }
    }

    pub fn parse(source: PathBuf, text: &str) -> Result<GrowthTable, GrowthError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: &str| GrowthError::TableSyntax {
                line: i + 1,
                message: message.to_string(),
            };
            let mut fields = line.split_whitespace();
            let (Some(n), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(syntax("expected two integers"));
            };
            let n: BigUint = n.parse().map_err(|_| syntax("bad argument"))?;
            let v: BigUint = v.parse().map_err(|_| syntax("bad value"))?;
            if n.is_zero() {
                return Err(syntax("arguments start at 1"));
            }
            if entries.insert(n, v).is_some() {
                return Err(syntax("duplicate argument"));
            }
        }
        Ok(GrowthTable::from_entries(source, entries))
    }

    pub fn load(path: &Path) -> Result<GrowthTable, GrowthError> {
        let text = std::fs::read_to_string(path).map_err(|e| GrowthError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        GrowthTable::parse(path.to_path_buf(), &text)
    }

    fn raw(&self, n: &BigUint) -> BigUint {
        self.entries
            .range(..=n.clone())
            .next_back()
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    }

    fn running_max(&self, n: &BigUint) -> BigUint {
        self.prefix_max
            .range(..=n.clone())
            .next_back()
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthFunction {
    kind: GrowthKind,
}

impl GrowthFunction {
    pub fn new(kind: GrowthKind) -> GrowthFunction {
        GrowthFunction { kind }
    }

    pub fn identity() -> GrowthFunction {
        GrowthFunction::new(GrowthKind::Identity)
    }

    pub fn polynomial(c: u32) -> GrowthFunction {
        GrowthFunction::new(GrowthKind::Polynomial(c))
    }

    pub fn exponential(base: u32) -> GrowthFunction {
        GrowthFunction::new(GrowthKind::Exponential(base))
    }

    /// Parses `identity`, `poly:c`, `exp2`, `exp:b` or `table:path`.
    pub fn parse(spec: &str) -> Result<GrowthFunction, GrowthError> {
        let unknown = || GrowthError::UnknownSpec(spec.to_string());
        let kind = match spec {
            "identity" | "id" => GrowthKind::Identity,
            "exp2" => GrowthKind::Exponential(2),
            _ => match spec.split_once(':') {
                Some(("poly", c)) => GrowthKind::Polynomial(c.parse().map_err(|_| unknown())?),
                Some(("exp", b)) => {
                    let b: u32 = b.parse().map_err(|_| unknown())?;
                    if b == 0 {
                        return Err(unknown());
                    }
                    GrowthKind::Exponential(b)
                }
                Some(("table", path)) if !path.is_empty() => {
                    GrowthKind::Table(GrowthTable::load(Path::new(path))?)
                }
                _ => return Err(unknown()),
            },
        };
        Ok(GrowthFunction { kind })
    }

    pub fn kind(&self) -> &GrowthKind {
        &self.kind
    }

    /// The raw function `f(n)`.
    pub fn raw(&self, n: &BigUint) -> Result<BigUint, GrowthError> {
        match &self.kind {
            GrowthKind::Identity => Ok(n.clone()),
            GrowthKind::Polynomial(c) => {
                guard(n.bits().saturating_mul(u64::from(*c)), n)?;
                Ok(n.pow(*c))
            }
            GrowthKind::Exponential(b) => {
                if *b == 1 {
                    return Ok(BigUint::one());
                }
                let exp = n.to_u64().ok_or(GrowthError::TooLarge {
                    arg_bits: n.bits(),
                    limit: MAX_VALUE_BITS,
                })?;
                let bits_per = u64::from(32 - (b - 1).leading_zeros());
                guard(exp.saturating_mul(bits_per), n)?;
                if b.is_power_of_two() {
                    return Ok(BigUint::one() << (exp * u64::from(b.trailing_zeros())));
                }
                Ok(BigUint::from(*b).pow(exp as u32))
            }
            GrowthKind::Table(t) => Ok(t.raw(n)),
        }
    }

    /// The normalized `F(n) = max(n, f(1), …, f(n))`, nondecreasing with `F(n) >= n`.
    pub fn eval(&self, n: &BigUint) -> Result<BigUint, GrowthError> {
        let running = match &self.kind {
            // builtin kinds are already nondecreasing on n >= 1
            GrowthKind::Table(t) => t.running_max(n),
            _ => {
                if n.is_zero() {
                    BigUint::zero()
                } else {
                    self.raw(n)?
                }
            }
        };
        Ok(running.max(n.clone()))
    }

    pub fn eval_u64(&self, n: u64) -> Result<BigUint, GrowthError> {
        self.eval(&BigUint::from(n))
    }
}

fn guard(bits: u64, arg: &BigUint) -> Result<(), GrowthError> {
    if bits > MAX_VALUE_BITS {
        return Err(GrowthError::TooLarge {
            arg_bits: arg.bits(),
            limit: MAX_VALUE_BITS,
        });
    }
    Ok(())
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GrowthKind::Identity => f.write_str("identity"),
            GrowthKind::Polynomial(c) => write!(f, "poly:{c}"),
            GrowthKind::Exponential(2) => f.write_str("exp2"),
            GrowthKind::Exponential(b) => write!(f, "exp:{b}"),
            GrowthKind::Table(t) => write!(f, "table:{}", t.source.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn builtin_values() {
        let id = GrowthFunction::identity();
        assert_eq!(id.eval_u64(16).unwrap(), b(16));
        let sq = GrowthFunction::parse("poly:2").unwrap();
        assert_eq!(sq.eval_u64(16).unwrap(), b(256));
        let e = GrowthFunction::parse("exp2").unwrap();
        assert_eq!(e.eval_u64(16).unwrap(), b(65536));
        assert_eq!(
            GrowthFunction::parse("exp:3").unwrap().eval_u64(4).unwrap(),
            b(81)
        );
        // poly:0 is constant 1, lifted to n by the wrapper
        assert_eq!(GrowthFunction::polynomial(0).eval_u64(9).unwrap(), b(9));
    }

    #[test]
    fn parse_rejects_unknown() {
        assert!(matches!(
            GrowthFunction::parse("cubic"),
            Err(GrowthError::UnknownSpec(_))
        ));
        assert!(GrowthFunction::parse("poly:x").is_err());
        assert!(matches!(
            GrowthFunction::parse("table:/definitely/not/here.txt"),
            Err(GrowthError::Io { .. })
        ));
    }

    #[test]
    fn table_step_lookup_and_wrapper() {
        let t = GrowthTable::parse(
            "t".into(),
            "# comment\n1 5\n10 3\n100 1000\n10588000 99999999999999999999\n",
        )
        .unwrap();
        let f = GrowthFunction::new(GrowthKind::Table(t));
        assert_eq!(f.raw(&b(1)).unwrap(), b(5));
        assert_eq!(f.raw(&b(50)).unwrap(), b(3));
        // non-monotone raw values are lifted by the running maximum
        assert_eq!(f.eval(&b(50)).unwrap(), b(50));
        assert_eq!(f.eval(&b(4)).unwrap(), b(5));
        assert_eq!(f.eval(&b(200)).unwrap(), b(1000));
        assert_eq!(
            f.eval(&b(10_588_000)).unwrap(),
            "99999999999999999999".parse::<BigUint>().unwrap()
        );
    }

    #[test]
    fn table_syntax_errors() {
        assert!(matches!(
            GrowthTable::parse("t".into(), "1 2 3"),
            Err(GrowthError::TableSyntax { line: 1, .. })
        ));
        assert!(GrowthTable::parse("t".into(), "0 2").is_err());
        assert!(GrowthTable::parse("t".into(), "2 2\n2 3").is_err());
    }

    #[test]
    fn exponential_guard() {
        let e = GrowthFunction::exponential(2);
        assert!(e.eval(&(BigUint::one() << 80u32)).is_err());
        assert!(e.eval(&b(MAX_VALUE_BITS + 1)).is_err());
        assert_eq!(e.eval(&b(100)).unwrap().bits(), 101);
    }
}
