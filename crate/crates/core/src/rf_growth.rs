//! Residual finiteness growth `D(n)`: the smallest `N` such that every
//! nontrivial element of word length `<= n` survives in some quotient of
//! order `<= N`.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::fp_quotients::{
    minimal_detecting_quotient, Detection, DetectionReport, GroupOracle, Presentation,
    QuotientError, SearchLimits,
};
use crate::par;
use crate::word::{Letter, Word};

/// One shortlex-least representative per nontrivial element of length `<= radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub radius: usize,
    pub elements: Vec<Word>,
}

/// Breadth-first over reduced words in shortlex order, keeping a word only
/// if it is nontrivial and differs from every earlier representative.
pub fn ball(
    p: &Presentation,
    oracle: &dyn GroupOracle,
    radius: usize,
) -> Result<Ball, QuotientError> {
    if oracle.rank() != p.rank() {
        return Err(crate::fp_quotients::OracleError::Rank {
            expected: oracle.rank(),
            got: p.rank(),
        }
        .into());
    }
    let mut elements: Vec<Word> = Vec::new();
    let mut keys: HashSet<Vec<i64>> = HashSet::new();
    let mut frontier = vec![Word::empty()];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for w in &frontier {
            for c in 0..p.rank() * 2 {
                let l = Letter::new(c / 2, c % 2 == 1);
                if w.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                next.push(w.then(l));
            }
        }
        for w in &next {
            if oracle.is_trivial(w)? {
                continue;
            }
            let fresh = match oracle.canonical_key(w) {
                Some(k) => keys.insert(k),
                None => {
                    let mut fresh = true;
                    for e in &elements {
                        if oracle.is_trivial(&w.concat(&e.inverse()))? {
                            fresh = false;
                            break;
                        }
                    }
                    fresh
                }
            };
            if fresh {
                elements.push(w.clone());
            }
        }
        frontier = next;
    }
    Ok(Ball { radius, elements })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDetection {
    pub element: Word,
    pub detection: Option<Detection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthValue {
    pub radius: usize,
    /// `None` when some element was not detected within the search limits.
    pub value: Option<usize>,
    /// An element attaining the maximum, or the first undetected element.
    pub witness: Option<ElementDetection>,
    pub per_element: Vec<ElementDetection>,
    pub elapsed_ms: u128,
}

impl GrowthValue {
    pub fn certified(&self) -> bool {
        self.value.is_some()
            && self
                .per_element
                .iter()
                .all(|e| e.detection.as_ref().is_some_and(|d| d.certified))
    }
}

/// Maximum over the ball of the per-element minimal detecting order.
pub fn rf_growth(
    p: &Presentation,
    oracle: &dyn GroupOracle,
    radius: usize,
    limits: &SearchLimits,
) -> Result<GrowthValue, QuotientError> {
    let start = Instant::now();
    let b = ball(p, oracle, radius)?;
    let found = par::map_slice(&b.elements, |g| minimal_detecting_quotient(p, g, limits));
    let mut per_element = Vec::with_capacity(found.len());
    for (element, d) in b.elements.into_iter().zip(found) {
        per_element.push(ElementDetection {
            element,
            detection: d?,
        });
    }
    let undetected = per_element.iter().find(|e| e.detection.is_none());
    let (value, witness) = match undetected {
        Some(e) => (None, Some(e.clone())),
        None => {
            let mut best: Option<&ElementDetection> = None;
            for e in &per_element {
                let order = e.detection.as_ref().map_or(0, |d| d.order);
                if best.is_none_or(|b| order > b.detection.as_ref().map_or(0, |d| d.order)) {
                    best = Some(e);
                }
            }
            (
                Some(
                    best.and_then(|e| e.detection.as_ref())
                        .map_or(1, |d| d.order),
                ),
                best.cloned(),
            )
        }
    };
    Ok(GrowthValue {
        radius,
        value,
        witness,
        per_element,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// `max over 1 <= m <= n` of the least `q >= 2` not dividing `m`.
pub fn z_growth_oracle(n: u64) -> u64 {
    (1..=n)
        .map(|m| (2..).find(|q| m % q != 0).expect("some q exceeds m"))
        .max()
        .unwrap_or(1)
}

/// A CSV row: `n,D,elapsed_ms,witness_element,witness_min_order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    /// `not-found` when the search limits were too small.
    #[serde(rename = "D")]
    pub d: String,
    pub elapsed_ms: u128,
    pub witness_element: String,
    pub witness_min_order: String,
}

impl GrowthRow {
    pub fn new(p: &Presentation, v: &GrowthValue) -> GrowthRow {
        let witness_element = v
            .witness
            .as_ref()
            .map_or(String::new(), |w| p.render(&w.element));
        let witness_min_order = v
            .witness
            .as_ref()
            .and_then(|w| w.detection.as_ref())
            .map_or("not-found".to_string(), |d| d.order.to_string());
        GrowthRow {
            n: v.radius,
            d: v.value.map_or("not-found".to_string(), |d| d.to_string()),
            elapsed_ms: v.elapsed_ms,
            witness_element,
            witness_min_order,
        }
    }

    pub const CSV_HEADER: &'static str = "n,D,elapsed_ms,witness_element,witness_min_order";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n, self.d, self.elapsed_ms, self.witness_element, self.witness_min_order
        )
    }
}

/// Per-element detail for JSON output.
pub fn element_reports(p: &Presentation, v: &GrowthValue) -> Vec<Option<DetectionReport>> {
    v.per_element
        .iter()
        .map(|e| {
            e.detection
                .as_ref()
                .map(|d| DetectionReport::new(p, &e.element, d))
        })
        .collect()
}
