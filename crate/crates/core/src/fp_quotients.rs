//! Finitely presented groups and their finite quotients, searched as
//! homomorphisms into symmetric groups of small degree.
//!
//! A homomorphism from `⟨X | R⟩` is a tuple of permutations, one per
//! generator. It extends from the free group when every relator dies, or,
//! given oracles for the target group, when exactly one coset
//! representative of the kernel lands in the normal closure computed from
//! the Schreier generators.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::par;
use crate::perm::{Perm, PermError};
use crate::word::{Alphabet, Letter, Word, WordError};

/// Largest degree the quotient search accepts.
pub const MAX_SEARCH_DEGREE: usize = 16;
/// Degrees above this need the full symmetric group listed, which is refused.
pub const MAX_LISTED_DEGREE: usize = 10;
/// Image order bound for Schreier computations.
pub const MAX_SCHREIER_ORDER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("presentation line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("relator {0:?} is trivial")]
    TrivialRelator(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("homomorphism has {got} images for {expected} generators")]
    RankMismatch { expected: usize, got: usize },
    #[error("image order exceeds {0}")]
    ImageTooLarge(usize),
    #[error("degree {degree} is beyond the search limit {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error("invalid search limits: {0}")]
    Limits(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle does not support {0}")]
    Unsupported(String),
    #[error("oracle expects {expected} generators, presentation has {got}")]
    Rank { expected: usize, got: usize },
    #[error("oracle failure: {0}")]
    Failure(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Presentation, QuotientError> {
        for r in &relators {
            if r.is_empty() {
                return Err(QuotientError::TrivialRelator(alphabet.render(r)));
            }
        }
        Ok(Presentation { alphabet, relators })
    }

    /// The free group on `rank` standard generators.
    pub fn free(rank: usize) -> Presentation {
        Presentation {
            alphabet: Alphabet::standard(rank),
            relators: Vec::new(),
        }
    }

    /// Builds from generator names and relator text.
    pub fn from_text(gens: &[char], relators: &[&str]) -> Result<Presentation, QuotientError> {
        let alphabet = Alphabet::new(gens)?;
        let mut rels = Vec::new();
        for r in relators {
            let w = alphabet.parse(r)?;
            if w.is_empty() {
                return Err(QuotientError::TrivialRelator(r.to_string()));
            }
            rels.push(w);
        }
        Presentation::new(alphabet, rels)
    }

    /// Reads `gens: a b` then `rel: <word>` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Presentation, QuotientError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut relators = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| QuotientError::Syntax {
                line: i + 1,
                message,
            };
            let Some((key, value)) = line.split_once(':') else {
                return Err(syntax(format!("expected `gens:` or `rel:`, got {line:?}")));
            };
            match (key.trim(), &alphabet) {
                ("gens", None) => {
                    let mut names = Vec::new();
                    for tok in value.split_whitespace() {
                        let mut cs = tok.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) => names.push(c),
                            _ => {
                                return Err(syntax(format!("generator {tok:?} is not one letter")))
                            }
                        }
                    }
                    alphabet = Some(Alphabet::new(&names).map_err(|e| syntax(e.to_string()))?);
                }
                ("gens", Some(_)) => return Err(syntax("repeated `gens:` line".into())),
                ("rel", Some(a)) => {
                    let w = a.parse(value).map_err(|e| syntax(e.to_string()))?;
                    if w.is_empty() {
                        return Err(QuotientError::TrivialRelator(value.trim().to_string()));
                    }
                    relators.push(w);
                }
                ("rel", None) => return Err(syntax("`rel:` before `gens:`".into())),
                (other, _) => return Err(syntax(format!("unknown key {other:?}"))),
            }
        }
        let alphabet = alphabet.ok_or(QuotientError::Syntax {
            line: 0,
            message: "missing `gens:` line".into(),
        })?;
        Presentation::new(alphabet, relators)
    }

    pub fn load(path: &Path) -> Result<Presentation, QuotientError> {
        let text = std::fs::read_to_string(path).map_err(|e| QuotientError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Presentation::parse(&text)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, QuotientError> {
        Ok(self.alphabet.parse(text)?)
    }

    pub fn render(&self, w: &Word) -> String {
        self.alphabet.render(w)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: {}", self.alphabet)?;
        for r in &self.relators {
            writeln!(f, "rel: {}", self.alphabet.render(r))?;
        }
        Ok(())
    }
}

/// Generator images in `Sym(degree)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteHom {
    degree: usize,
    images: Vec<Perm>,
}

impl FiniteHom {
    pub fn new(degree: usize, images: Vec<Perm>) -> Result<FiniteHom, QuotientError> {
        for p in &images {
            if p.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    left: p.degree(),
                    right: degree,
                }
                .into());
            }
        }
        Ok(FiniteHom { degree, images })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    fn letter_image(&self, l: Letter) -> Perm {
        let p = &self.images[l.gen()];
        if l.is_inverse() {
            p.inverse()
        } else {
            p.clone()
        }
    }

    /// Image of a word; letters compose left to right as functions, so the
    /// rightmost letter acts first.
    pub fn evaluate(&self, w: &Word) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for &l in w.letters() {
            acc = acc.compose(&self.letter_image(l)).expect("equal degrees");
        }
        acc
    }

    pub fn kills(&self, w: &Word) -> bool {
        self.evaluate(w).is_identity()
    }
}

impl fmt::Display for FiniteHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "deg {}: [", self.degree)?;
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// All permutations of `0..m` as image arrays, in lexicographic order.
pub fn all_perms(m: usize) -> Vec<Vec<u8>> {
    let mut cur: Vec<u8> = (0..m as u8).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len())
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// One permutation per cycle type of `Sym(m)`, sorted lexicographically.
pub fn cycle_type_representatives(m: usize) -> Vec<Vec<u8>> {
    let mut reps = Vec::new();
    let mut parts = Vec::new();
    partitions(m, m, &mut parts, &mut |p| {
        let mut img = vec![0u8; m];
        let mut start = 0;
        for &len in p {
            for i in 0..len {
                img[start + i] = (start + (i + 1) % len) as u8;
            }
            start += len;
        }
        reps.push(img);
    });
    reps.sort();
    reps
}

fn partitions(rest: usize, max: usize, cur: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if rest == 0 {
        emit(cur);
        return;
    }
    for part in (1..=max.min(rest)).rev() {
        cur.push(part);
        partitions(rest - part, part, cur, emit);
        cur.pop();
    }
}

fn invert(img: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; img.len()];
    for (i, &v) in img.iter().enumerate() {
        inv[v as usize] = i as u8;
    }
    inv
}

fn to_perm(img: &[u8]) -> Perm {
    Perm::from_images(img.iter().map(|&v| u32::from(v)).collect()).expect("bijection")
}

/// Every tuple in `Sym(m)^rank`, lexicographic in the tuple of image arrays.
pub fn enumerate_assignments(rank: usize, m: usize) -> Result<Vec<FiniteHom>, QuotientError> {
    check_listed(m)?;
    let perms = all_perms(m);
    let total = perms.len().pow(rank as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; rank];
    for _ in 0..total {
        let images = idx.iter().map(|&i| to_perm(&perms[i])).collect();
        out.push(FiniteHom { degree: m, images });
        for slot in (0..rank).rev() {
            idx[slot] += 1;
            if idx[slot] < perms.len() {
                break;
            }
            idx[slot] = 0;
        }
    }
    Ok(out)
}

/// Homomorphisms `⟨X | R⟩ → Sym(m)`: assignments killing every relator.
pub fn enumerate_homs(p: &Presentation, m: usize) -> Result<Vec<FiniteHom>, QuotientError> {
    Ok(enumerate_assignments(p.rank(), m)?
        .into_iter()
        .filter(|h| extends_by_relators(p, h))
        .collect())
}

fn check_listed(m: usize) -> Result<(), QuotientError> {
    if m == 0 {
        return Err(QuotientError::Limits("degree must be at least 1".into()));
    }
    if m > MAX_LISTED_DEGREE {
        return Err(QuotientError::DegreeTooLarge {
            degree: m,
            limit: MAX_LISTED_DEGREE,
        });
    }
    Ok(())
}

/// True iff every relator maps to the identity.
pub fn extends_by_relators(p: &Presentation, h: &FiniteHom) -> bool {
    h.rank() == p.rank() && p.relators().iter().all(|r| h.kills(r))
}

/// Order of the generated subgroup by closure, or `None` once it exceeds `cap`.
pub fn image_order(h: &FiniteHom, cap: usize) -> Option<usize> {
    let gens: Vec<Vec<u8>> = h
        .images
        .iter()
        .map(|p| p.images().iter().map(|&v| v as u8).collect())
        .collect();
    if h.degree > usize::from(u8::MAX) {
        return closure_elements(&h.images, cap).map(|e| e.len());
    }
    let refs: Vec<&[u8]> = gens.iter().map(Vec::as_slice).collect();
    closure_order(&refs, h.degree, cap)
}

fn pack(img: &[u8]) -> u64 {
    img.iter().fold(0u64, |acc, &v| (acc << 4) | u64::from(v))
}

/// Breadth-first closure on image arrays; packed keys up to degree 16.
fn closure_order(gens: &[&[u8]], m: usize, cap: usize) -> Option<usize> {
    if m <= MAX_SEARCH_DEGREE {
        let mut seen = std::collections::HashSet::new();
        let id: Vec<u8> = (0..m as u8).collect();
        seen.insert(pack(&id));
        let mut queue = vec![id];
        let mut head = 0;
        let mut next = vec![0u8; m];
        while head < queue.len() {
            for g in gens {
                for (x, slot) in next.iter_mut().enumerate() {
                    *slot = queue[head][g[x] as usize];
                }
                if seen.insert(pack(&next)) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push(next.clone());
                }
            }
            head += 1;
        }
        return Some(seen.len()).filter(|&n| n <= cap);
    }
    let perms: Vec<Perm> = gens.iter().map(|g| to_perm(g)).collect();
    closure_elements(&perms, cap).map(|e| e.len())
}

fn closure_elements(gens: &[Perm], cap: usize) -> Option<Vec<Perm>> {
    let degree = gens.first().map_or(1, Perm::degree);
    let id = Perm::identity(degree);
    let mut index: HashMap<Perm, usize> = HashMap::new();
    index.insert(id.clone(), 0);
    let mut elems = vec![id];
    let mut head = 0;
    while head < elems.len() {
        for g in gens {
            let e = elems[head].compose(g).expect("equal degrees");
            if !index.contains_key(&e) {
                if elems.len() >= cap {
                    return None;
                }
                index.insert(e.clone(), elems.len());
                elems.push(e);
            }
        }
        head += 1;
    }
    Some(elems)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_degree: usize,
    /// Images larger than this are ignored.
    pub max_order: usize,
    /// Search every degree up to `max_degree` instead of stopping once the
    /// best order found is certified minimal.
    pub exhaustive: bool,
    /// Restrict the first generator to cycle-type representatives.
    pub pruned: bool,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            max_degree: 7,
            max_order: 5040,
            exhaustive: false,
            pruned: true,
        }
    }
}

impl SearchLimits {
    fn validate(&self) -> Result<(), QuotientError> {
        if self.max_degree == 0 || self.max_order == 0 {
            return Err(QuotientError::Limits("caps must be positive".into()));
        }
        if self.max_degree > MAX_SEARCH_DEGREE {
            return Err(QuotientError::DegreeTooLarge {
                degree: self.max_degree,
                limit: MAX_SEARCH_DEGREE,
            });
        }
        Ok(())
    }
}

/// A smallest image detecting an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub order: usize,
    pub degree: usize,
    pub hom: FiniteHom,
    /// Whether every degree below `order` was searched, so no smaller
    /// quotient can exist.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionReport {
    pub element: String,
    pub min_order: usize,
    pub degree: usize,
    pub images: Vec<String>,
    pub certified: bool,
}

impl DetectionReport {
    pub fn new(p: &Presentation, gamma: &Word, d: &Detection) -> DetectionReport {
        DetectionReport {
            element: p.render(gamma),
            min_order: d.order,
            degree: d.degree,
            images: d.hom.images.iter().map(ToString::to_string).collect(),
            certified: d.certified,
        }
    }
}

/// Letter tables for evaluating words pointwise.
struct TupleView<'a> {
    tables: Vec<&'a [u8]>,
}

impl TupleView<'_> {
    /// Image of `x` under the word (rightmost letter first).
    fn apply(&self, w: &[Letter], x: usize) -> usize {
        w.iter()
            .rev()
            .fold(x, |y, l| self.tables[l.code()][y] as usize)
    }

    fn moves(&self, w: &[Letter], m: usize) -> bool {
        (0..m).any(|x| self.apply(w, x) != x)
    }
}

/// `(order, first index, rest index)` of the best hom in one worker's share.
type Found = (usize, usize, u128);

fn search_degree(
    p: &Presentation,
    gamma: &Word,
    m: usize,
    cap: usize,
    pruned: bool,
) -> Result<Option<(Found, FiniteHom)>, QuotientError> {
    let rank = p.rank();
    let firsts = if pruned {
        cycle_type_representatives(m)
    } else {
        check_listed(m)?;
        all_perms(m)
    };
    let rest = if rank > 1 {
        check_listed(m)?;
        all_perms(m)
    } else {
        Vec::new()
    };
    let rest_inv: Vec<Vec<u8>> = rest.iter().map(|r| invert(r)).collect();
    let first_inv: Vec<Vec<u8>> = firsts.iter().map(|r| invert(r)).collect();
    let rest_total: u128 = (rest.len() as u128).pow(rank as u32 - 1);
    let gamma_letters = gamma.letters();

    let results = par::map_range(firsts.len(), |fi| {
        let mut best: Option<(Found, Vec<usize>)> = None;
        let mut idx = vec![0usize; rank - 1];
        let mut local_cap = cap;
        for ri in 0..rest_total {
            let mut tables: Vec<&[u8]> = Vec::with_capacity(rank * 2);
            tables.push(&firsts[fi]);
            tables.push(&first_inv[fi]);
            for &i in &idx {
                tables.push(&rest[i]);
                tables.push(&rest_inv[i]);
            }
            let view = TupleView { tables };
            let ok = view.moves(gamma_letters, m)
                && p.relators().iter().all(|r| !view.moves(r.letters(), m));
            if ok {
                let gens: Vec<&[u8]> = view.tables.iter().step_by(2).copied().collect();
                if let Some(order) = closure_order(&gens, m, local_cap) {
                    best = Some(((order, fi, ri), idx.clone()));
                    local_cap = order - 1;
                    if local_cap == 0 {
                        break;
                    }
                }
            }
            for slot in (0..rank - 1).rev() {
                idx[slot] += 1;
                if idx[slot] < rest.len() {
                    break;
                }
                idx[slot] = 0;
            }
        }
        best
    });
    let winner = results
        .into_iter()
        .flatten()
        .min_by_key(|(found, _)| *found);
    Ok(winner.map(|(found, idx)| {
        let mut images = vec![to_perm(&firsts[found.1])];
        images.extend(idx.iter().map(|&i| to_perm(&rest[i])));
        (found, FiniteHom { degree: m, images })
    }))
}

/// Smallest image order, over homs of degree `<= max_degree`, in which
/// `gamma` survives. Degrees are searched in increasing order; without
/// `exhaustive` the search stops once the degree reaches `order - 1`, since
/// every group of that order embeds in that degree.
pub fn minimal_detecting_quotient(
    p: &Presentation,
    gamma: &Word,
    limits: &SearchLimits,
) -> Result<Option<Detection>, QuotientError> {
    limits.validate()?;
    let mut best: Option<Detection> = None;
    let mut searched = 0;
    for m in 1..=limits.max_degree {
        let cap = best
            .as_ref()
            .map_or(limits.max_order, |b| b.order - 1)
            .min(limits.max_order);
        if cap == 0 {
            break;
        }
        if !limits.exhaustive {
            let done = best.as_ref().is_some_and(|b| m >= b.order) || m > limits.max_order;
            if done {
                break;
            }
        }
        if let Some(((order, _, _), hom)) = search_degree(p, gamma, m, cap, limits.pruned)? {
            best = Some(Detection {
                order,
                degree: m,
                hom,
                certified: false,
            });
        }
        searched = m;
    }
    Ok(best.map(|mut d| {
        d.certified = searched + 1 >= d.order;
        d
    }))
}

/// Coset representatives and Schreier generators for the kernel of a hom
/// from the free group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelData {
    pub hom: FiniteHom,
    /// Shortlex breadth-first representatives; the first is the empty word.
    pub coset_reps: Vec<Word>,
    pub schreier_gens: Vec<Word>,
    elements: Vec<Perm>,
}

impl KernelData {
    /// Image elements, aligned with `coset_reps`.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }
}

pub fn schreier_kernel_generators(h: &FiniteHom) -> Result<KernelData, QuotientError> {
    let rank = h.rank();
    let letter_perms: Vec<Perm> = (0..rank * 2)
        .map(|c| h.letter_image(Letter::new(c / 2, c % 2 == 1)))
        .collect();
    let id = Perm::identity(h.degree);
    let mut index: HashMap<Perm, usize> = HashMap::from([(id.clone(), 0)]);
    let mut elements = vec![id];
    let mut reps = vec![Word::empty()];
    let mut head = 0;
    while head < elements.len() {
        for c in 0..rank * 2 {
            let next = elements[head]
                .compose(&letter_perms[c])
                .expect("equal degrees");
            if !index.contains_key(&next) {
                if elements.len() >= MAX_SCHREIER_ORDER {
                    return Err(QuotientError::ImageTooLarge(MAX_SCHREIER_ORDER));
                }
                index.insert(next.clone(), elements.len());
                reps.push(reps[head].then(Letter::new(c / 2, c % 2 == 1)));
                elements.push(next);
            }
        }
        head += 1;
    }
    let mut gens: Vec<Word> = Vec::new();
    for (t, rep) in reps.iter().enumerate() {
        for g in 0..rank {
            let x = Letter::new(g, false);
            let target = elements[t]
                .compose(&letter_perms[x.code()])
                .expect("equal degrees");
            let back = &reps[index[&target]];
            let s = rep.then(x).concat(&back.inverse());
            if !s.is_empty() && !gens.contains(&s) {
                gens.push(s);
            }
        }
    }
    Ok(KernelData {
        hom: h.clone(),
        coset_reps: reps,
        schreier_gens: gens,
        elements,
    })
}

/// Decision procedures for a group `Γ` generated by the images of the
/// presentation's generators.
pub trait GroupOracle: Sync {
    fn name(&self) -> &str;

    /// Number of generators the oracle expects.
    fn rank(&self) -> usize;

    /// Word problem.
    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError>;

    /// Whether `g` lies in the subgroup generated by `gens`, which the caller
    /// guarantees to be normal of finite index.
    fn is_member(&self, g: &Word, gens: &[Word]) -> Result<bool, OracleError>;

    /// A key equal for two words iff they are equal in `Γ`, when cheap.
    fn canonical_key(&self, _w: &Word) -> Option<Vec<i64>> {
        None
    }
}

fn check_rank(o: &dyn GroupOracle, got: usize) -> Result<(), OracleError> {
    if o.rank() != got {
        return Err(OracleError::Rank {
            expected: o.rank(),
            got,
        });
    }
    Ok(())
}

/// Counts coset representatives landing in the subgroup generated by the
/// Schreier generators; the hom extends to `Γ` iff only the trivial one does.
pub fn extends_by_membership(
    oracle: &dyn GroupOracle,
    h: &FiniteHom,
) -> Result<bool, QuotientError> {
    check_rank(oracle, h.rank())?;
    let kd = schreier_kernel_generators(h)?;
    let mut count = 0;
    for t in &kd.coset_reps {
        if oracle.is_member(t, &kd.schreier_gens)? {
            count += 1;
            if count > 1 {
                return Ok(false);
            }
        }
    }
    Ok(count == 1)
}

/// Free group of the given rank: free reduction decides equality.
#[derive(Debug, Clone)]
pub struct FreeOracle {
    pub rank: usize,
}

impl GroupOracle for FreeOracle {
    fn name(&self) -> &str {
        "free"
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(w.is_empty())
    }

    fn is_member(&self, _g: &Word, _gens: &[Word]) -> Result<bool, OracleError> {
        Err(OracleError::Unsupported(
            "subgroup membership in free groups".into(),
        ))
    }

    fn canonical_key(&self, w: &Word) -> Option<Vec<i64>> {
        Some(w.letters().iter().map(|l| l.code() as i64).collect())
    }
}

/// The integers on one generator.
#[derive(Debug, Clone, Default)]
pub struct IntegersOracle;

impl GroupOracle for IntegersOracle {
    fn name(&self) -> &str {
        "integers"
    }

    fn rank(&self) -> usize {
        1
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(w.exponent_sums(1)[0] == 0)
    }

    fn is_member(&self, g: &Word, gens: &[Word]) -> Result<bool, OracleError> {
        let n = gens
            .iter()
            .fold(0i64, |acc, w| acc.gcd(&w.exponent_sums(1)[0]));
        let x = g.exponent_sums(1)[0];
        Ok(if n == 0 { x == 0 } else { x % n == 0 })
    }

    fn canonical_key(&self, w: &Word) -> Option<Vec<i64>> {
        Some(w.exponent_sums(1))
    }
}

/// `Z/n` on one generator.
#[derive(Debug, Clone)]
pub struct CyclicOracle {
    pub n: i64,
}

impl GroupOracle for CyclicOracle {
    fn name(&self) -> &str {
        "cyclic"
    }

    fn rank(&self) -> usize {
        1
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(w.exponent_sums(1)[0].rem_euclid(self.n) == 0)
    }

    fn is_member(&self, g: &Word, gens: &[Word]) -> Result<bool, OracleError> {
        let step = gens
            .iter()
            .fold(self.n, |acc, w| acc.gcd(&w.exponent_sums(1)[0]));
        Ok(g.exponent_sums(1)[0].rem_euclid(step) == 0)
    }

    fn canonical_key(&self, w: &Word) -> Option<Vec<i64>> {
        Some(vec![w.exponent_sums(1)[0].rem_euclid(self.n)])
    }
}

/// `Z^rank` for `rank <= 3`, with lattice membership by Hermite reduction.
#[derive(Debug, Clone)]
pub struct FreeAbelianOracle {
    rank: usize,
}

impl FreeAbelianOracle {
    pub fn new(rank: usize) -> Result<FreeAbelianOracle, OracleError> {
        if !(1..=3).contains(&rank) {
            return Err(OracleError::Unsupported(format!(
                "free abelian rank {rank}"
            )));
        }
        Ok(FreeAbelianOracle { rank })
    }
}

/// Whether `target` lies in the integer span of `rows`.
pub fn lattice_contains(rows: &[Vec<i64>], target: &[i64]) -> bool {
    let width = target.len();
    let mut rows: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| i128::from(v)).collect())
        .collect();
    let mut t: Vec<i128> = target.iter().map(|&v| i128::from(v)).collect();
    let mut top = 0;
    for col in 0..width {
        // gcd-reduce column `col` among rows[top..] into rows[top]
        loop {
            let nonzero: Vec<usize> = (top..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nonzero.len() <= 1 {
                if let Some(&i) = nonzero.first() {
                    rows.swap(top, i);
                }
                break;
            }
            let pivot = *nonzero
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .expect("nonempty");
            rows.swap(top, pivot);
            for i in top + 1..rows.len() {
                let factor = rows[i][col] / rows[top][col];
                if factor != 0 {
                    for c in 0..width {
                        rows[i][c] -= factor * rows[top][c];
                    }
                }
            }
        }
        if top < rows.len() && rows[top][col] != 0 {
            let pv = rows[top][col];
            if t[col] % pv != 0 {
                return false;
            }
            let factor = t[col] / pv;
            for c in 0..width {
                t[c] -= factor * rows[top][c];
            }
            top += 1;
        } else if t[col] != 0 {
            return false;
        }
    }
    t.iter().all(|&v| v == 0)
}

impl GroupOracle for FreeAbelianOracle {
    fn name(&self) -> &str {
        "abelian"
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(w.exponent_sums(self.rank).iter().all(|&v| v == 0))
    }

    fn is_member(&self, g: &Word, gens: &[Word]) -> Result<bool, OracleError> {
        let rows: Vec<Vec<i64>> = gens.iter().map(|w| w.exponent_sums(self.rank)).collect();
        Ok(lattice_contains(&rows, &g.exponent_sums(self.rank)))
    }

    fn canonical_key(&self, w: &Word) -> Option<Vec<i64>> {
        Some(w.exponent_sums(self.rank))
    }
}

/// A finite permutation group given by generator images.
#[derive(Debug, Clone)]
pub struct PermGroupOracle {
    hom: FiniteHom,
}

impl PermGroupOracle {
    pub fn new(images: Vec<Perm>) -> Result<PermGroupOracle, QuotientError> {
        let degree = images.first().map_or(1, Perm::degree);
        Ok(PermGroupOracle {
            hom: FiniteHom::new(degree, images)?,
        })
    }
}

impl GroupOracle for PermGroupOracle {
    fn name(&self) -> &str {
        "permutation"
    }

    fn rank(&self) -> usize {
        self.hom.rank()
    }

    fn is_trivial(&self, w: &Word) -> Result<bool, OracleError> {
        Ok(self.hom.kills(w))
    }

    fn is_member(&self, g: &Word, gens: &[Word]) -> Result<bool, OracleError> {
        let target = self.hom.evaluate(g);
        let images: Vec<Perm> = gens.iter().map(|w| self.hom.evaluate(w)).collect();
        if images.is_empty() {
            return Ok(target.is_identity());
        }
        let elems = closure_elements(&images, usize::MAX)
            .ok_or_else(|| OracleError::Failure("closure overflow".into()))?;
        Ok(elems.contains(&target))
    }

    fn canonical_key(&self, w: &Word) -> Option<Vec<i64>> {
        Some(
            self.hom
                .evaluate(w)
                .images()
                .iter()
                .map(|&v| i64::from(v))
                .collect(),
        )
    }
}
