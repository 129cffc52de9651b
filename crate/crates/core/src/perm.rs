//! Dense permutations of `{1..n}` and the two-generator alternating group.
//!
//! Points are 1-based at every I/O boundary (cycle notation, [`Perm::apply`])
//! and 0-based inside the image arrays. Composition is functional: in
//! `a.compose(&b)` the right factor `b` is applied first.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

/// Largest degree accepted by the dense factorization routines.
pub const MAX_DENSE_DEGREE: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("invalid degree {0}")]
    InvalidDegree(usize),
    #[error("images do not form a bijection")]
    NotABijection,
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("permutation is odd")]
    OddPermutation,
    #[error("gcd({q}, {n}) != 1")]
    NotCoprime { q: u64, n: usize },
    #[error("degree {degree} exceeds dense bound {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("word of length {length} exceeds budget {budget}")]
    LengthBudget { length: u64, budget: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A permutation of `{1..n}` stored as its 0-based image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<u32>) -> Result<Perm, PermError> {
        if images.is_empty() {
            return Err(PermError::InvalidDegree(0));
        }
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let x = x as usize;
            if x >= images.len() || seen[x] {
                return Err(PermError::NotABijection);
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of the given degree from 1-based disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Perm, PermError> {
        if degree == 0 {
            return Err(PermError::InvalidDegree(0));
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for &p in cycle {
                if p == 0 || p > degree {
                    return Err(PermError::PointOutOfRange { point: p, degree });
                }
                if touched[p - 1] {
                    return Err(PermError::NotABijection);
                }
                touched[p - 1] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                images[p - 1] = (next - 1) as u32;
            }
        }
        Ok(Perm { images })
    }

    /// Parses cycle notation such as `(1,2,3)(5,6)`; the identity is `()`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm, PermError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut cycles = Vec::new();
        let mut rest = compact.as_str();
        if rest.is_empty() {
            return Err(PermError::Parse("empty permutation".into()));
        }
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::Parse(format!("expected '(' in {text:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| PermError::Parse(format!("unclosed cycle in {text:?}")))?;
            let inner = &body[..close];
            if !inner.is_empty() {
                let cycle = inner
                    .split(',')
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| PermError::Parse(format!("bad point {s:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                cycles.push(cycle);
            }
            rest = &body[close + 1..];
        }
        Perm::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image table.
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a 1-based point.
    pub fn apply(&self, point: usize) -> Result<usize, PermError> {
        if point == 0 || point > self.degree() {
            return Err(PermError::PointOutOfRange {
                point,
                degree: self.degree(),
            });
        }
        Ok(self.images[point - 1] as usize + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn compose(&self, other: &Perm) -> Result<Perm, PermError> {
        self.check_degree(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Perm) -> Perm {
        Perm {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Perm { images }
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, exponent: i64) -> Perm {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = exponent.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&sq);
            }
            sq = sq.compose_unchecked(&sq);
            e >>= 1;
        }
        acc
    }

    /// Nontrivial cycles as 1-based point lists, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x] as usize;
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn parity(&self) -> Parity {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycles()
            .iter()
            .fold(BigUint::one(), |acc, c| acc.lcm(&BigUint::from(c.len())))
    }

    fn check_degree(&self, other: &Perm) -> Result<(), PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self)
    }
}

/// `[a, b] = a b a⁻¹ b⁻¹`.
pub fn commutator(a: &Perm, b: &Perm) -> Result<Perm, PermError> {
    a.check_degree(b)?;
    Ok(a.compose_unchecked(b)
        .compose_unchecked(&a.inverse())
        .compose_unchecked(&b.inverse()))
}

/// The n-cycle `(1, 2, ..., n)` for odd `n >= 5`.
pub fn cycle_alpha(n: usize) -> Result<Perm, PermError> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(PermError::InvalidDegree(n));
    }
    Ok(Perm {
        images: (0..n as u32).map(|x| (x + 1) % n as u32).collect(),
    })
}

/// The 3-cycle `(1, 2, 3)` in degree `n >= 3`.
pub fn three_cycle_beta(n: usize) -> Result<Perm, PermError> {
    if n < 3 {
        return Err(PermError::InvalidDegree(n));
    }
    let mut images: Vec<u32> = (0..n as u32).collect();
    images[0] = 1;
    images[1] = 2;
    images[2] = 0;
    Ok(Perm { images })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    /// The shift generator `α_n^q`.
    A,
    /// The 3-cycle `β`.
    B,
}

/// A maximal run `gen^exp` inside a [`GenWord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenRun {
    pub gen: Gen,
    pub exp: i64,
}

/// Freely reduced word over `{A, A⁻¹, B, B⁻¹}`, stored as alternating runs.
///
/// Text form writes one letter per symbol: `A a B b`, lowercase for inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GenWord {
    runs: Vec<GenRun>,
}

impl GenWord {
    pub fn new() -> GenWord {
        GenWord::default()
    }

    pub fn runs(&self) -> &[GenRun] {
        &self.runs
    }

    /// Appends `gen^exp`, merging with the last run.
    pub fn push(&mut self, gen: Gen, exp: i64) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.runs.last_mut() {
            if last.gen == gen {
                last.exp += exp;
                if last.exp == 0 {
                    self.runs.pop();
                }
                return;
            }
        }
        self.runs.push(GenRun { gen, exp });
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|r| r.exp.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Evaluates the word with `A ↦ α_n^q` and `B ↦ β` in degree `n`.
    ///
    /// Runs in `O(n + runs)`: the product is kept as `α^offset ∘ P` and each
    /// `β` is conjugated past the pending shift instead of composing densely.
    pub fn evaluate(&self, n: usize, q: u64) -> Result<Perm, PermError> {
        if n < 3 {
            return Err(PermError::InvalidDegree(n));
        }
        let q = (q % n as u64) as usize;
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut position: Vec<u32> = (0..n as u32).collect();
        let mut offset = 0usize;
        for run in self.runs.iter().rev() {
            match run.gen {
                Gen::A => {
                    let e = run.exp.rem_euclid(n as i64) as usize;
                    offset = (offset + e * q) % n;
                }
                Gen::B => {
                    let start = (n - offset) % n;
                    let pts = [start, (start + 1) % n, (start + 2) % n];
                    for _ in 0..run.exp.rem_euclid(3) {
                        // left-multiply the stored part by (pts0, pts1, pts2)
                        let slots = pts.map(|v| position[v]);
                        for (i, &slot) in slots.iter().enumerate() {
                            let next = pts[(i + 1) % 3];
                            images[slot as usize] = next as u32;
                            position[next] = slot;
                        }
                    }
                }
            }
        }
        for x in images.iter_mut() {
            *x = ((*x as usize + offset) % n) as u32;
        }
        Ok(Perm { images })
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for run in &self.runs {
            let letter = match (run.gen, run.exp > 0) {
                (Gen::A, true) => 'A',
                (Gen::A, false) => 'a',
                (Gen::B, true) => 'B',
                (Gen::B, false) => 'b',
            };
            for _ in 0..run.exp.unsigned_abs() {
                write!(f, "{letter}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for GenWord {
    type Err = PermError;

    fn from_str(s: &str) -> Result<GenWord, PermError> {
        let mut word = GenWord::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            match c {
                'A' => word.push(Gen::A, 1),
                'a' => word.push(Gen::A, -1),
                'B' => word.push(Gen::B, 1),
                'b' => word.push(Gen::B, -1),
                other => return Err(PermError::Parse(format!("unknown letter {other:?}"))),
            }
        }
        Ok(word)
    }
}

/// Writes an even permutation of odd degree `n >= 5` as a word in
/// `A = α_n^q` and `B = β`, with `gcd(q, n) = 1`.
///
/// The conjugate `A^k B A^-k` is the consecutive 3-cycle on points
/// `kq, kq+1, kq+2` (0-based), so every window `(w, w+1, w+2)` is reachable with
/// `k = w q⁻¹ mod n`. Tokens are sorted into place by insertion, moving each one
/// left by steps of one or two; the step sequence for each token is chosen by a
/// small shortest-path search over window conjugators, since consecutive windows
/// share their `A` runs after free reduction.
pub fn factor_in_alt(target: &Perm, q: u64) -> Result<GenWord, PermError> {
    let n = target.degree();
    if n > MAX_DENSE_DEGREE {
        return Err(PermError::DegreeTooLarge {
            degree: n,
            max: MAX_DENSE_DEGREE,
        });
    }
    if n < 5 || n.is_multiple_of(2) {
        return Err(PermError::InvalidDegree(n));
    }
    if !target.is_even() {
        return Err(PermError::OddPermutation);
    }
    if q.gcd(&(n as u64)) != 1 {
        return Err(PermError::NotCoprime { q, n });
    }
    let q_mod = (q % n as u64) as i64;
    let q_inv = (q_mod.extended_gcd(&(n as i64)).x).rem_euclid(n as i64);

    let word = match shift_amount(target) {
        Some(c) => {
            let mut w = GenWord::new();
            w.push(Gen::A, centered(c as i64 * q_inv, n));
            w
        }
        None => WindowSorter::new(target, q_inv).run(),
    };

    let budget = 12 * (n as u64) * (n as u64);
    if word.len() > budget {
        return Err(PermError::LengthBudget {
            length: word.len(),
            budget,
        });
    }
    Ok(word)
}

/// `Some(c)` when the permutation is `x ↦ x + c mod n`.
fn shift_amount(p: &Perm) -> Option<usize> {
    let n = p.degree();
    let c = p.images[0] as usize;
    p.images
        .iter()
        .enumerate()
        .all(|(x, &y)| y as usize == (x + c) % n)
        .then_some(c)
}

fn centered(value: i64, n: usize) -> i64 {
    let n = n as i64;
    let r = value.rem_euclid(n);
    if r > n / 2 {
        r - n
    } else {
        r
    }
}

/// A window rotation: `(w, w+1, w+2)` raised to `exp = ±1`, acting on positions.
#[derive(Clone, Copy, Debug)]
struct WindowMove {
    window: usize,
    exp: i64,
}

struct WindowSorter {
    n: usize,
    q_inv: i64,
    /// `arrangement[p]` is the token currently at position `p`.
    arrangement: Vec<usize>,
    location: Vec<usize>,
    moves: Vec<WindowMove>,
}

impl WindowSorter {
    fn new(target: &Perm, q_inv: i64) -> WindowSorter {
        let n = target.degree();
        let arrangement: Vec<usize> = target.images.iter().map(|&x| x as usize).collect();
        let mut location = vec![0; n];
        for (p, &t) in arrangement.iter().enumerate() {
            location[t] = p;
        }
        WindowSorter {
            n,
            q_inv,
            arrangement,
            location,
            moves: Vec::new(),
        }
    }

    fn key(&self, window: usize) -> i64 {
        (window as i64 * self.q_inv).rem_euclid(self.n as i64)
    }

    fn hop(&self, from: i64, to: i64) -> u64 {
        let n = self.n as i64;
        let d = (to - from).rem_euclid(n);
        d.min(n - d) as u64
    }

    fn apply(&mut self, mv: WindowMove) {
        let w = mv.window;
        let (a, b, c) = (
            self.arrangement[w],
            self.arrangement[w + 1],
            self.arrangement[w + 2],
        );
        let rotated = if mv.exp > 0 { [c, a, b] } else { [b, c, a] };
        for (i, &t) in rotated.iter().enumerate() {
            self.arrangement[w + i] = t;
            self.location[t] = w + i;
        }
        self.moves.push(mv);
    }

    /// Cheapest move sequence carrying the token at `from` to `to < from`,
    /// never touching positions below `to`.
    fn plan(&self, from: usize, to: usize, prev_key: i64) -> Vec<WindowMove> {
        // arrival state: 0 = last window sits at the position, 1 = at position - 1,
        // 2 = the starting position (last key is `prev_key`)
        const START: usize = 2;
        let span = from - to;
        let mut cost = vec![[u64::MAX; 3]; span + 1];
        let mut back: Vec<[Option<(usize, usize, WindowMove)>; 3]> = vec![[None; 3]; span + 1];
        cost[span][START] = 0;
        for off in (1..=span).rev() {
            let pos = off + to;
            for state in 0..3 {
                let base = cost[off][state];
                if base == u64::MAX {
                    continue;
                }
                let last_key = match state {
                    0 => self.key(pos),
                    1 => self.key(pos - 1),
                    _ => prev_key,
                };
                for (dest, mv, via) in self.moves_from(pos, to) {
                    let c = base + self.hop(last_key, self.key(mv.window)) + 1;
                    let slot = &mut cost[dest - to][via];
                    if c < *slot {
                        *slot = c;
                        back[dest - to][via] = Some((off, state, mv));
                    }
                }
            }
        }
        let mut state = if cost[0][0] <= cost[0][1] { 0 } else { 1 };
        let mut off = 0;
        let mut path = Vec::new();
        while off != span {
            let (prev_off, prev_state, mv) = back[off][state].expect("token can always move left");
            path.push(mv);
            off = prev_off;
            state = prev_state;
        }
        path.reverse();
        path
    }

    /// Moves available to a token at `pos`: (destination, move, arrival via).
    fn moves_from(&self, pos: usize, floor: usize) -> Vec<(usize, WindowMove, usize)> {
        let n = self.n;
        let mut out = Vec::with_capacity(3);
        if pos >= floor + 2 {
            // (w, w+1, w+2) sends w+2 to w
            out.push((
                pos - 2,
                WindowMove {
                    window: pos - 2,
                    exp: 1,
                },
                0,
            ));
            // inverse sends w+2 to w+1
            out.push((
                pos - 1,
                WindowMove {
                    window: pos - 2,
                    exp: -1,
                },
                1,
            ));
        }
        if pos > floor && pos + 1 < n {
            // inverse of (w, w+1, w+2) sends w+1 to w
            out.push((
                pos - 1,
                WindowMove {
                    window: pos - 1,
                    exp: -1,
                },
                0,
            ));
        }
        out
    }

    fn run(mut self) -> GenWord {
        let n = self.n;
        let mut prev_key = 0i64;
        for token in 0..n - 3 {
            let from = self.location[token];
            if from == token {
                continue;
            }
            for mv in self.plan(from, token, prev_key) {
                self.apply(mv);
                prev_key = self.key(mv.window);
            }
            debug_assert_eq!(self.location[token], token);
        }
        let tail = n - 3;
        if self.arrangement[tail] != tail {
            // remaining three tokens form a 3-cycle since the input is even
            let exp = if self.arrangement[tail + 2] == tail {
                1
            } else {
                -1
            };
            self.apply(WindowMove { window: tail, exp });
        }
        debug_assert!(self.arrangement.iter().enumerate().all(|(i, &t)| i == t));

        // target = m_last ∘ … ∘ m_1, so the word lists moves in reverse order
        let mut word = GenWord::new();
        let mut current = 0i64;
        for mv in self.moves.iter().rev() {
            let k = self.key(mv.window);
            word.push(Gen::A, centered(k - current, n));
            word.push(Gen::B, mv.exp);
            current = k;
        }
        word.push(Gen::A, centered(-current, n));
        word
    }
}
