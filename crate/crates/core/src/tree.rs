//! The Cayley tree of the free group F2 = <a, b>, with exact arithmetic.
//!
//! Vertices are reduced words, edges have length one, and points may sit at a
//! rational offset along an edge. Everything in this module is exact:
//! distances, Busemann values, projections and isometry actions are computed
//! over `BigRational` and word combinatorics, so identities that hold in the
//! tree hold with equality rather than within a tolerance.
//!
//! Ends (boundary points) are eventually periodic reduced letter sequences
//! `pre . per^inf` kept in canonical form: minimal preperiod, primitive
//! period. Every end produced by this crate — fixed ends of isometries,
//! cylinder directions, images of either under word maps — has this shape,
//! and canonicity makes end equality a structural comparison.

use crate::error::{Cat0Error, Result};
use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Rat = Ratio<BigInt>;

/// Letters a, a^-1, b, b^-1 encoded as 0..4; `inv` flips the low bit.
pub type Letter = u8;

pub const LETTERS: [Letter; 4] = [0, 1, 2, 3];

#[inline]
pub fn inv(l: Letter) -> Letter {
    l ^ 1
}

pub fn letter_name(l: Letter) -> &'static str {
    match l {
        0 => "a",
        1 => "a^-1",
        2 => "b",
        3 => "b^-1",
        _ => "?",
    }
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact conversion from a finite float (every finite f64 is rational).
pub fn rat_from_f64(t: f64) -> Result<Rat> {
    Rat::from_float(t)
        .ok_or_else(|| Cat0Error::DomainError(format!("parameter {t} is not finite")))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------------
// Reduced words
// ---------------------------------------------------------------------------

/// A reduced word over {a, a^-1, b, b^-1}: a group element and, equally, the
/// tree vertex it names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn gen(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Builds a word from letters, cancelling adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            debug_assert!(l < 4);
            if out.last() == Some(&inv(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| inv(l)).collect())
    }

    pub fn push(&self, l: Letter) -> Word {
        self.mul(&Word::gen(l))
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Length of the longest common prefix with `other`.
    pub fn lcp(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(x, y)| x == y)
            .count()
    }

    /// Graph distance between the vertices named by `self` and `other`.
    pub fn vertex_dist(&self, other: &Word) -> i64 {
        let c = self.lcp(other) as i64;
        self.0.len() as i64 + other.0.len() as i64 - 2 * c
    }

    /// Cyclic reduction: (s, c) with `self = s c s^-1` and `c` cyclically
    /// reduced (empty only for the identity).
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut lo = 0usize;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == inv(self.0[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        (Word(self.0[..lo].to_vec()), Word(self.0[lo..hi].to_vec()))
    }

    /// Parses words like `ab^-1a`, `a^3b^-2`, `e` (identity). Capital `A`/`B`
    /// are accepted as inverse letters.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "1" {
            return Ok(Word::identity());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0usize;
        let mut letters: Vec<Letter> = Vec::new();
        while i < chars.len() {
            let base = match chars[i] {
                'a' => 0u8,
                'A' => 1u8,
                'b' => 2u8,
                'B' => 3u8,
                c => {
                    return Err(Cat0Error::Parse(format!(
                        "unexpected character `{c}` in word"
                    )))
                }
            };
            i += 1;
            let mut exp: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                exp = text
                    .parse()
                    .map_err(|_| Cat0Error::Parse(format!("bad exponent `{text}`")))?;
            }
            let l = if exp < 0 { inv(base) } else { base };
            for _ in 0..exp.unsigned_abs() {
                letters.push(l);
            }
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let mut i = 0usize;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = j - i;
            let (ch, neg) = match l {
                0 => ('a', false),
                1 => ('a', true),
                2 => ('b', false),
                3 => ('b', true),
                _ => unreachable!(),
            };
            match (neg, run) {
                (false, 1) => write!(f, "{ch}")?,
                (false, n) => write!(f, "{ch}^{n}")?,
                (true, n) => write!(f, "{ch}^-{n}")?,
            }
            i = j;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A point of the tree: a vertex, or a rational offset along an edge.
///
/// Canonical form: `edge = Some((l, q))` is the point at distance `q`
/// (0 < q < 1) from `base` along the edge towards `base * l`, where `base * l`
/// is the longer endpoint word. Offsets 0 and 1 normalize to vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreePoint {
    base: Word,
    edge: Option<(Letter, Rat)>,
}

impl TreePoint {
    pub fn vertex(w: Word) -> TreePoint {
        TreePoint { base: w, edge: None }
    }

    /// Point at offset `q in [0, 1]` from vertex `v` along the edge towards
    /// `v * l`; endpoints normalize to vertices.
    pub fn on_edge(v: Word, l: Letter, q: Rat) -> Result<TreePoint> {
        if q < Rat::zero() || q > Rat::one() {
            return Err(Cat0Error::InvalidPoint(format!(
                "edge offset {q} outside [0, 1]"
            )));
        }
        if q.is_zero() {
            return Ok(TreePoint::vertex(v));
        }
        if q.is_one() {
            return Ok(TreePoint::vertex(v.push(l)));
        }
        if v.last() == Some(inv(l)) {
            // v*l is the parent: reorient so the base is the shorter word.
            let parent = v.push(l);
            let back = inv(l);
            Ok(TreePoint {
                base: parent,
                edge: Some((back, Rat::one() - q)),
            })
        } else {
            Ok(TreePoint {
                base: v,
                edge: Some((l, q)),
            })
        }
    }

    pub fn as_vertex(&self) -> Option<&Word> {
        if self.edge.is_none() {
            Some(&self.base)
        } else {
            None
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.edge.is_none()
    }

    /// Endpoint vertices of the supporting cell with the cost of reaching
    /// each from the point; a vertex yields itself at cost zero.
    pub fn anchors(&self) -> Vec<(Word, Rat)> {
        match &self.edge {
            None => vec![(self.base.clone(), Rat::zero())],
            Some((l, q)) => vec![
                (self.base.clone(), q.clone()),
                (self.base.push(*l), Rat::one() - q.clone()),
            ],
        }
    }

    fn same_edge(&self, other: &TreePoint) -> bool {
        match (&self.edge, &other.edge) {
            (Some((l1, _)), Some((l2, _))) => l1 == l2 && self.base == other.base,
            _ => false,
        }
    }

    /// Structural view: base vertex and, for edge points, (letter, offset).
    pub fn parts(&self) -> (&Word, Option<(Letter, &Rat)>) {
        (&self.base, self.edge.as_ref().map(|(l, q)| (*l, q)))
    }
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.edge {
            None => write!(f, "{}", self.base),
            Some((l, q)) => write!(f, "{}+{} {}", self.base, q, letter_name(*l)),
        }
    }
}

impl fmt::Debug for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact distance between two tree points.
pub fn dist(p: &TreePoint, q: &TreePoint) -> Rat {
    if p.same_edge(q) {
        let a = &p.edge.as_ref().unwrap().1;
        let b = &q.edge.as_ref().unwrap().1;
        return (a.clone() - b.clone()).abs();
    }
    let mut best: Option<Rat> = None;
    for (u, cu) in p.anchors() {
        for (v, cv) in q.anchors() {
            let d = cu.clone() + rat_int(u.vertex_dist(&v)) + cv.clone();
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
    }
    best.unwrap()
}

// ---------------------------------------------------------------------------
// Ends
// ---------------------------------------------------------------------------

/// An end of the tree: the eventually periodic reduced sequence
/// `pre . per^inf` in canonical form (minimal preperiod, primitive period).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeEnd {
    pre: Vec<Letter>,
    per: Vec<Letter>,
}

impl TreeEnd {
    pub fn new(pre: &[Letter], per: &[Letter]) -> Result<TreeEnd> {
        if per.is_empty() {
            return Err(Cat0Error::InvalidPoint("end needs a non-empty period".into()));
        }
        let probe: Vec<Letter> = pre
            .iter()
            .chain(per.iter())
            .chain(per.iter())
            .copied()
            .collect();
        if probe.windows(2).any(|w| w[1] == inv(w[0])) {
            return Err(Cat0Error::InvalidPoint("end sequence is not reduced".into()));
        }
        let mut pre = pre.to_vec();
        let mut per = per.to_vec();
        for d in 1..per.len() {
            if per.len() % d == 0 && per.chunks(d).all(|c| c == &per[..d]) {
                per.truncate(d);
                break;
            }
        }
        while let Some(&last) = pre.last() {
            if last == *per.last().unwrap() {
                pre.pop();
                let l = per.pop().unwrap();
                per.insert(0, l);
            } else {
                break;
            }
        }
        Ok(TreeEnd { pre, per })
    }

    /// The end reached by following `w` and then repeating its final letter:
    /// the canonical direction of a vertex as seen from the root.
    pub fn from_direction(w: &Word) -> Result<TreeEnd> {
        match w.last() {
            None => Err(Cat0Error::Precondition(
                "identity word has no direction".into(),
            )),
            Some(l) => TreeEnd::new(&w.letters()[..w.len() - 1], &[l]),
        }
    }

    /// Periodic end `w w w ...` for cyclically reduced `w`.
    pub fn periodic(w: &Word) -> Result<TreeEnd> {
        if w.is_empty() {
            return Err(Cat0Error::Precondition("identity has no periodic end".into()));
        }
        let (_, core) = w.cyclic_reduce();
        if core.len() != w.len() {
            return Err(Cat0Error::Precondition(format!(
                "{w} is not cyclically reduced"
            )));
        }
        TreeEnd::new(&[], w.letters())
    }

    pub fn letter(&self, k: usize) -> Letter {
        if k < self.pre.len() {
            self.pre[k]
        } else {
            self.per[(k - self.pre.len()) % self.per.len()]
        }
    }

    /// First `n` letters as a vertex on the ray from the root.
    pub fn word_prefix(&self, n: usize) -> Word {
        Word((0..n).map(|k| self.letter(k)).collect())
    }

    pub fn pre_len(&self) -> usize {
        self.pre.len()
    }

    pub fn per_len(&self) -> usize {
        self.per.len()
    }

    /// Longest common prefix with another end; `None` means equal ends.
    pub fn lcp(&self, other: &TreeEnd) -> Option<usize> {
        if self == other {
            return None;
        }
        let bound =
            self.pre.len() + other.pre.len() + 2 * self.per.len() * other.per.len() + 2;
        (0..bound).find(|&k| self.letter(k) != other.letter(k))
    }

    /// Left translation by a reduced word, exactly.
    pub fn translate(&self, w: &Word) -> TreeEnd {
        if w.is_empty() {
            return self.clone();
        }
        let n = w.len() + self.pre.len() + 2 * self.per.len() + 2;
        let s = self.word_prefix(n);
        let r = w.mul(&s);
        let phase = (n - self.pre.len()) % self.per.len();
        let mut per_rot = self.per[phase..].to_vec();
        per_rot.extend_from_slice(&self.per[..phase]);
        TreeEnd::new(r.letters(), &per_rot).expect("translated end stays reduced")
    }

    /// Parses `pre|per`; a bare word `w` means "follow w, then repeat its
    /// final letter" (the direction of the vertex w).
    pub fn parse(s: &str) -> Result<TreeEnd> {
        let s = s.trim();
        if let Some((pre, per)) = s.split_once('|') {
            let pre = Word::parse(pre)?;
            let per = Word::parse(per)?;
            if per.is_empty() {
                return Err(Cat0Error::Parse("end period must be non-empty".into()));
            }
            TreeEnd::new(pre.letters(), per.letters())
        } else {
            TreeEnd::from_direction(&Word::parse(s)?)
        }
    }
}

impl fmt::Display for TreeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}",
            Word(self.pre.clone()),
            Word(self.per.clone())
        )
    }
}

impl fmt::Debug for TreeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Visual distance between ends as seen from the root: 2^-lcp, 0 for equal.
pub fn end_visual_distance(x: &TreeEnd, y: &TreeEnd) -> f64 {
    match x.lcp(y) {
        None => 0.0,
        Some(k) if k > 1060 => 0.0,
        Some(k) => (2f64).powi(-(k as i32)),
    }
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

/// Forward letter supply of a geodesic: a finite prefix plus an optional
/// periodic tail. Locally reduced by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pre: Vec<Letter>,
    per: Vec<Letter>,
}

impl Stream {
    pub fn finite(pre: Vec<Letter>) -> Stream {
        Stream { pre, per: Vec::new() }
    }

    pub fn periodic(pre: Vec<Letter>, per: Vec<Letter>) -> Stream {
        Stream { pre, per }
    }

    pub fn get(&self, k: usize) -> Option<Letter> {
        if k < self.pre.len() {
            Some(self.pre[k])
        } else if self.per.is_empty() {
            None
        } else {
            Some(self.per[(k - self.pre.len()) % self.per.len()])
        }
    }

    pub fn is_infinite(&self) -> bool {
        !self.per.is_empty()
    }
}

/// A geodesic in the tree: a vertex anchor `v0` at parameter `t0`, letter
/// streams in both directions, and an exact (possibly unbounded) domain.
/// The anchor may lie outside the domain; evaluation only covers the domain.
#[derive(Clone, Debug)]
pub struct TreeGeodesic {
    v0: Word,
    t0: Rat,
    fwd: Stream,
    bwd: Stream,
    lo: Option<Rat>,
    hi: Option<Rat>,
}

impl TreeGeodesic {
    pub fn lo(&self) -> Option<&Rat> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Rat> {
        self.hi.as_ref()
    }

    pub fn anchor(&self) -> (&Word, &Rat) {
        (&self.v0, &self.t0)
    }

    fn in_domain(&self, t: &Rat) -> bool {
        self.lo.as_ref().map_or(true, |lo| t >= lo)
            && self.hi.as_ref().map_or(true, |hi| t <= hi)
    }

    /// Exact evaluation at rational parameter `t`.
    pub fn eval(&self, t: &Rat) -> Result<TreePoint> {
        if !self.in_domain(t) {
            return Err(Cat0Error::DomainError(format!(
                "parameter {t} outside geodesic domain"
            )));
        }
        let delta = t.clone() - self.t0.clone();
        let (stream, steps) = if delta >= Rat::zero() {
            (&self.fwd, delta)
        } else {
            (&self.bwd, -delta)
        };
        let n = steps.floor();
        let frac = steps.clone() - n.clone();
        let n = n
            .to_integer()
            .to_usize()
            .ok_or_else(|| Cat0Error::DomainError("parameter out of range".into()))?;
        let mut v = self.v0.clone();
        for k in 0..n {
            let l = stream.get(k).ok_or_else(|| {
                Cat0Error::DomainError("geodesic stream exhausted inside domain".into())
            })?;
            v = v.push(l);
        }
        if frac.is_zero() {
            Ok(TreePoint::vertex(v))
        } else {
            let l = stream.get(n).ok_or_else(|| {
                Cat0Error::DomainError("geodesic stream exhausted inside domain".into())
            })?;
            TreePoint::on_edge(v, l, frac)
        }
    }

    /// The end in the +t (sign > 0) or -t direction, when infinite.
    pub fn end_at(&self, positive: bool) -> Option<TreeEnd> {
        let stream = if positive { &self.fwd } else { &self.bwd };
        if !stream.is_infinite() {
            return None;
        }
        let k = self.v0.len() + stream.pre.len() + 2 * stream.per.len() + 2;
        let mut v = self.v0.clone();
        for i in 0..k {
            v = v.push(stream.get(i).unwrap());
        }
        let phase = (k - stream.pre.len()) % stream.per.len();
        let mut per_rot = stream.per[phase..].to_vec();
        per_rot.extend_from_slice(&stream.per[..phase]);
        Some(TreeEnd::new(v.letters(), &per_rot).expect("stream end is reduced"))
    }

    /// Shifts the parameter so that the old parameter `s` becomes 0.
    pub fn reanchor(&self, s: &Rat) -> TreeGeodesic {
        TreeGeodesic {
            v0: self.v0.clone(),
            t0: self.t0.clone() - s.clone(),
            fwd: self.fwd.clone(),
            bwd: self.bwd.clone(),
            lo: self.lo.as_ref().map(|x| x.clone() - s.clone()),
            hi: self.hi.as_ref().map(|x| x.clone() - s.clone()),
        }
    }

    /// Reverses orientation: new(t) = old(-t).
    pub fn reverse(&self) -> TreeGeodesic {
        TreeGeodesic {
            v0: self.v0.clone(),
            t0: -self.t0.clone(),
            fwd: self.bwd.clone(),
            bwd: self.fwd.clone(),
            lo: self.hi.as_ref().map(|x| -x.clone()),
            hi: self.lo.as_ref().map(|x| -x.clone()),
        }
    }

    /// Restricts the domain to `[a, b]` (must be inside the current domain).
    pub fn restrict(&self, a: Rat, b: Rat) -> Result<TreeGeodesic> {
        if a > b || !self.in_domain(&a) || !self.in_domain(&b) {
            return Err(Cat0Error::DomainError(
                "restriction outside geodesic domain".into(),
            ));
        }
        Ok(TreeGeodesic {
            v0: self.v0.clone(),
            t0: self.t0.clone(),
            fwd: self.fwd.clone(),
            bwd: self.bwd.clone(),
            lo: Some(a),
            hi: Some(b),
        })
    }

    /// Left translation by a word (an isometry of the tree).
    pub fn translate(&self, w: &Word) -> TreeGeodesic {
        // The letter streams describe steps relative to the moving vertex, so
        // they are unchanged; only the anchor vertex moves.
        TreeGeodesic {
            v0: w.mul(&self.v0),
            t0: self.t0.clone(),
            fwd: self.fwd.clone(),
            bwd: self.bwd.clone(),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        }
    }

    /// All tree vertices of the geodesic with parameters in `[a, b]`.
    pub fn vertices_between(&self, a: &Rat, b: &Rat) -> Result<Vec<(Rat, Word)>> {
        let mut out = Vec::new();
        let mut k = (a.clone() - self.t0.clone()).ceil();
        let kmax = (b.clone() - self.t0.clone()).floor();
        while k <= kmax {
            let t = self.t0.clone() + k.clone();
            if self.in_domain(&t) {
                if let Ok(p) = self.eval(&t) {
                    out.push((t, p.as_vertex().unwrap().clone()));
                }
            }
            k += Rat::one();
        }
        Ok(out)
    }
}

/// Letters of the vertex path from `u` to `v` (empty when equal).
fn vertex_path_letters(u: &Word, v: &Word) -> Vec<Letter> {
    u.inverse().mul(v).letters().to_vec()
}

/// Stream following end `xi` starting from depth `j` of its ray.
fn end_stream_from_depth(xi: &TreeEnd, j: usize) -> Stream {
    let start = j.max(xi.pre_len());
    let pre: Vec<Letter> = (j..start).map(|k| xi.letter(k)).collect();
    let phase = (start - xi.pre_len()) % xi.per_len();
    let mut per = xi.per[phase..].to_vec();
    per.extend_from_slice(&xi.per[..phase]);
    Stream::periodic(pre, per)
}

/// Stream describing the path from vertex `u` towards end `xi`.
fn ray_stream_from_vertex(u: &Word, xi: &TreeEnd) -> Stream {
    let mut j = 0usize;
    while j < u.len() && u.letters()[j] == xi.letter(j) {
        j += 1;
    }
    let mut pre: Vec<Letter> = (j..u.len()).rev().map(|i| inv(u.letters()[i])).collect();
    let tail = end_stream_from_depth(xi, j);
    pre.extend_from_slice(&tail.pre);
    Stream::periodic(pre, tail.per)
}

/// The segment from `p` to `q` parametrized by arclength on `[0, d]`.
/// Requires `p != q`.
pub fn segment(p: &TreePoint, q: &TreePoint) -> Result<TreeGeodesic> {
    let d = dist(p, q);
    if d.is_zero() {
        return Err(Cat0Error::Precondition(
            "degenerate segment in tree layer".into(),
        ));
    }
    if p.same_edge(q) {
        let (l, qp) = p.edge.clone().unwrap();
        let (_, qq) = q.edge.clone().unwrap();
        // Parametrize within the single edge; anchor at the base vertex.
        if qq > qp {
            return Ok(TreeGeodesic {
                v0: p.base.clone(),
                t0: -qp,
                fwd: Stream::finite(vec![l]),
                bwd: Stream::finite(vec![]),
                lo: Some(Rat::zero()),
                hi: Some(d),
            });
        } else {
            return Ok(TreeGeodesic {
                v0: p.base.push(l),
                t0: -(Rat::one() - qp),
                fwd: Stream::finite(vec![inv(l)]),
                bwd: Stream::finite(vec![]),
                lo: Some(Rat::zero()),
                hi: Some(d),
            });
        }
    }
    // Choose the anchor pair realizing the distance.
    let mut best: Option<(Word, Rat, Word, Rat, Rat)> = None;
    for (u, cu) in p.anchors() {
        for (v, cv) in q.anchors() {
            let total = cu.clone() + rat_int(u.vertex_dist(&v)) + cv.clone();
            if best.as_ref().map_or(true, |(_, _, _, _, t)| total < *t) {
                best = Some((u.clone(), cu.clone(), v, cv.clone(), total));
            }
        }
    }
    let (u, cu, v, cv, total) = best.unwrap();
    debug_assert_eq!(total, d);
    let mut fwd = vertex_path_letters(&u, &v);
    if !cv.is_zero() {
        // One more letter into q's edge.
        let (vb, l, _) = {
            let (l, qq) = q.edge.clone().unwrap();
            (q.base.clone(), l, qq)
        };
        if v == vb {
            fwd.push(l);
        } else {
            fwd.push(inv(l));
        }
    }
    let mut bwd = Vec::new();
    if !cu.is_zero() {
        let (l, _) = p.edge.clone().unwrap();
        if u == p.base {
            bwd.push(l);
        } else {
            bwd.push(inv(l));
        }
    }
    Ok(TreeGeodesic {
        v0: u,
        t0: cu,
        fwd: Stream::finite(fwd),
        bwd: Stream::finite(bwd),
        lo: Some(Rat::zero()),
        hi: Some(d),
    })
}

/// The ray from `p` to the end `xi`, parametrized on `[0, inf)`.
pub fn ray(p: &TreePoint, xi: &TreeEnd) -> Result<TreeGeodesic> {
    // Exit anchor: the anchor u with busemann(xi; p -> u) = -cost(u).
    let mut exit: Option<(Word, Rat)> = None;
    for (u, cu) in p.anchors() {
        let b = busemann(xi, p, &TreePoint::vertex(u.clone()));
        if b == -cu.clone() {
            exit = Some((u, cu));
            break;
        }
    }
    let (u, cu) = exit.ok_or_else(|| {
        Cat0Error::Precondition("no exit anchor; point data inconsistent".into())
    })?;
    let fwd = ray_stream_from_vertex(&u, xi);
    let mut bwd = Vec::new();
    if !cu.is_zero() {
        let (l, _) = p.edge.clone().unwrap();
        if u == p.base {
            bwd.push(l);
        } else {
            bwd.push(inv(l));
        }
    }
    Ok(TreeGeodesic {
        v0: u,
        t0: cu,
        fwd,
        bwd: Stream::finite(bwd),
        lo: Some(Rat::zero()),
        hi: None,
    })
}

/// The line from end `xi` (at -inf) to end `eta` (at +inf), anchored with
/// parameter 0 at their branch vertex.
pub fn line(xi: &TreeEnd, eta: &TreeEnd) -> Result<TreeGeodesic> {
    let k = xi.lcp(eta).ok_or_else(|| {
        Cat0Error::Precondition("line endpoints must be distinct ends".into())
    })?;
    let v0 = xi.word_prefix(k);
    Ok(TreeGeodesic {
        v0,
        t0: Rat::zero(),
        fwd: end_stream_from_depth(eta, k),
        bwd: end_stream_from_depth(xi, k),
        lo: None,
        hi: None,
    })
}

// ---------------------------------------------------------------------------
// Busemann function and projections
// ---------------------------------------------------------------------------

/// Exact Busemann value b_xi(y, z) = lim_T [ d(xi_T, z) - d(xi_T, y) ].
/// The limit saturates once the ray prefix passes every anchor involved.
pub fn busemann(xi: &TreeEnd, y: &TreePoint, z: &TreePoint) -> Rat {
    let depth = y
        .anchors()
        .iter()
        .chain(z.anchors().iter())
        .map(|(w, _)| w.len())
        .max()
        .unwrap_or(0);
    let t = depth + xi.pre_len() + xi.per_len() + 2;
    let x_t = TreePoint::vertex(xi.word_prefix(t));
    let value = dist(&x_t, z) - dist(&x_t, y);
    debug_assert_eq!(value, {
        let x_t2 = TreePoint::vertex(xi.word_prefix(t + 1));
        dist(&x_t2, z) - dist(&x_t2, y)
    });
    value
}

/// Exact projection parameter of the point `x` onto `g` (clamped to the
/// domain). Returns the parameter of the unique nearest point.
pub fn project_point(g: &TreeGeodesic, x: &TreePoint) -> Result<Rat> {
    let mut candidates: Vec<Rat> = Vec::new();
    for (u, cu) in x.anchors() {
        if let Some(t) = vertex_foot_param(g, &u)? {
            candidates.push(t.clone());
            candidates.push(t.clone() + cu.clone());
            candidates.push(t - cu.clone());
        }
    }
    if let Some(lo) = &g.lo {
        candidates.push(lo.clone());
    }
    if let Some(hi) = &g.hi {
        candidates.push(hi.clone());
    }
    let mut best: Option<(Rat, Rat)> = None;
    for t in candidates {
        if !g.in_domain(&t) {
            // Clamp candidates into the domain.
            continue;
        }
        let p = g.eval(&t)?;
        let d = dist(x, &p);
        if best.as_ref().map_or(true, |(_, bd)| d < *bd) {
            best = Some((t, d));
        }
    }
    best.map(|(t, _)| t)
        .ok_or_else(|| Cat0Error::DomainError("projection found no candidate".into()))
}

/// Foot parameter of vertex `x` on the unclamped geodesic line through `g`,
/// found by walking downhill from the anchor. Returns `None` when a stream
/// runs out before the walk settles (cannot happen on infinite streams).
fn vertex_foot_param(g: &TreeGeodesic, x: &Word) -> Result<Option<Rat>> {
    let xp = TreePoint::vertex(x.clone());
    let vertex_at = |k: i64| -> Option<Word> {
        let mut v = g.v0.clone();
        let (stream, n) = if k >= 0 {
            (&g.fwd, k as usize)
        } else {
            (&g.bwd, (-k) as usize)
        };
        for i in 0..n {
            v = v.push(stream.get(i)?);
        }
        Some(v)
    };
    let dist_at = |k: i64| -> Option<Rat> {
        vertex_at(k).map(|v| dist(&xp, &TreePoint::vertex(v)))
    };
    let mut k: i64 = 0;
    let mut dk = match dist_at(0) {
        Some(d) => d,
        None => return Ok(None),
    };
    // Walk in the decreasing direction until a local minimum.
    loop {
        let up = dist_at(k + 1);
        let down = dist_at(k - 1);
        match (up, down) {
            (Some(u), _) if u < dk => {
                k += 1;
                dk = u;
            }
            (_, Some(d)) if d < dk => {
                k -= 1;
                dk = d;
            }
            (None, _) | (_, None) => {
                // Stream exhausted at a domain end: the clamped candidates
                // (domain endpoints) cover this case.
                return Ok(Some(g.t0.clone() + rat_int(k)));
            }
            _ => break,
        }
    }
    Ok(Some(g.t0.clone() + rat_int(k)))
}

/// Exact projection of an end onto a geodesic. `Ok(Ok(t))` is an attained
/// foot; `Ok(Err(positive))` means the Busemann objective decreases forever
/// towards the +t (true) or -t (false) end of an unbounded geodesic.
pub fn project_end(g: &TreeGeodesic, xi: &TreeEnd) -> Result<std::result::Result<Rat, bool>> {
    if let Some(end) = g.end_at(true) {
        if &end == xi {
            return match &g.hi {
                Some(hi) => Ok(Ok(hi.clone())),
                None => Ok(Err(true)),
            };
        }
    }
    if let Some(end) = g.end_at(false) {
        if &end == xi {
            return match &g.lo {
                Some(lo) => Ok(Ok(lo.clone())),
                None => Ok(Err(false)),
            };
        }
    }
    let depth = g.v0.len()
        + xi.pre_len()
        + g.fwd.pre.len()
        + g.bwd.pre.len()
        + 2 * (xi.per_len() + g.fwd.per.len().max(1) + g.bwd.per.len().max(1))
        + 4;
    let t1 = project_point(g, &TreePoint::vertex(xi.word_prefix(depth)))?;
    let t2 = project_point(g, &TreePoint::vertex(xi.word_prefix(depth + xi.per_len())))?;
    if t1 != t2 {
        return Err(Cat0Error::Inconclusive(
            "end projection did not stabilize".into(),
        ));
    }
    Ok(Ok(t1))
}

// ---------------------------------------------------------------------------
// Isometries (left translations)
// ---------------------------------------------------------------------------

/// Applies the left translation by `w` to a point.
pub fn apply(w: &Word, p: &TreePoint) -> TreePoint {
    match &p.edge {
        None => TreePoint::vertex(w.mul(&p.base)),
        Some((l, q)) => TreePoint::on_edge(w.mul(&p.base), *l, q.clone())
            .expect("offset stays in (0,1)"),
    }
}

/// Translation length of `w`: the length of its cyclically reduced core.
pub fn translation_length(w: &Word) -> i64 {
    let (_, core) = w.cyclic_reduce();
    core.len() as i64
}

/// All `4 * 3^(n-1)` reduced words of length `n`, ordered lexicographically
/// by letter code (`a < a^-1 < b < b^-1`); just the identity for `n = 0`.
pub fn reduced_words_of_length(n: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * 3);
        for w in &out {
            for &l in &LETTERS {
                if w.last().map_or(true, |p| inv(p) != l) {
                    next.push(w.push(l));
                }
            }
        }
        out = next;
    }
    out
}

/// Axis data of a non-elliptic word: the invariant line (anchored so that
/// w . axis(t) = axis(t + tau)), with repelling and attracting ends.
pub struct TreeAxis {
    pub line: TreeGeodesic,
    pub tau: i64,
    pub attracting: TreeEnd,
    pub repelling: TreeEnd,
}

pub fn axis(w: &Word) -> Result<TreeAxis> {
    let (s, core) = w.cyclic_reduce();
    if core.is_empty() {
        return Err(Cat0Error::Precondition(
            "identity word has no axis".into(),
        ));
    }
    let attracting = TreeEnd::periodic(&core)?.translate(&s);
    let repelling = TreeEnd::periodic(&core.inverse())?.translate(&s);
    let mut g = line(&repelling, &attracting)?;
    // Anchor so that parameter 0 sits at the vertex s on the axis.
    let foot = vertex_foot_param(&g, &s)?
        .ok_or_else(|| Cat0Error::Inconclusive("axis anchoring failed".into()))?;
    g = g.reanchor(&foot);
    Ok(TreeAxis {
        line: g,
        tau: core.len() as i64,
        attracting,
        repelling,
    })
}

/// Direction from `x` through `y` (distinct points), as an end: extend the
/// segment beyond `y` by repeating its final step letter.
pub fn direction_through(x: &TreePoint, y: &TreePoint) -> Result<TreeEnd> {
    let d = dist(x, y);
    if d.is_zero() {
        return Err(Cat0Error::Precondition(
            "direction needs distinct points".into(),
        ));
    }
    // Far anchor of y: the endpoint v with y between x and v.
    let (v, _) = y
        .anchors()
        .into_iter()
        .find(|(v, cv)| dist(x, &TreePoint::vertex(v.clone())) == d.clone() + cv.clone())
        .ok_or_else(|| Cat0Error::Inconclusive("no far anchor found".into()))?;
    // Near anchor of x: the endpoint the path to v leaves through.
    let mut u_best: Option<(Word, Rat)> = None;
    for (u, cu) in x.anchors() {
        let total = cu.clone() + rat_int(u.vertex_dist(&v));
        if u_best.as_ref().map_or(true, |(_, t)| total < *t) {
            u_best = Some((u, total));
        }
    }
    let (u, _) = u_best.unwrap();
    let ell = if u != v {
        u.inverse().mul(&v).last().unwrap()
    } else {
        // v is an anchor of x itself; the final step enters v from x's edge.
        let (lx, _) = x
            .edge
            .clone()
            .expect("anchor coincidence requires an edge point");
        if v == x.base {
            inv(lx)
        } else {
            lx
        }
    };
    Ok(TreeEnd::periodic(&Word::gen(ell))?.translate(&v))
}
