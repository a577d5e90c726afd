//! Boundary dynamics of finitely generated isometry groups: limit-set
//! samples, elementarity tests, ping-pong free subgroups, fixed-pair
//! atlases, transitivity movers, dense boundary orbits, and families of
//! pairwise non-conjugate words.
//!
//! Every statement reported as a *certificate* here is decided in exact
//! arithmetic on frozen data (see [`crate::exact`]): hyperbolic-plane
//! generators are frozen into rational matrices, tree generators are already
//! exact words, and all ball inclusions, boundary memberships and trace
//! comparisons are then computed without rounding. Floating point is used
//! only to *choose* objects (ball radii, candidate words); never to verify
//! them.

use std::collections::HashMap;

use num::BigRational;

use crate::boundary::{direction_from, visual_distance};
use crate::contracting::SamplingPlan;
use crate::error::{Cat0Error, Result};
use crate::exact::{Arc, Cylinder, ProjPoint, QMat};
use crate::h2;
use crate::isometry::{basepoint, classify, is_rank_one, Classification, Isometry, RankOneVerdict};
use crate::space::{distance, BoundaryPoint, Point, Space};
use crate::tol::{Tolerances, K_MAX};
use crate::tree::{TreeEnd, Word};

// ---------------------------------------------------------------------------
// Group words
// ---------------------------------------------------------------------------

/// A freely reduced word over the generators of a [`GeneratedGroup`].
/// Letter `+i` is the `i`-th generator (1-based) and `-i` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupWord(Vec<i32>);

impl GroupWord {
    pub fn identity() -> GroupWord {
        GroupWord(Vec::new())
    }

    /// Single-letter word; `index` is 0-based into the generator list.
    pub fn letter(index: usize, positive: bool) -> GroupWord {
        let l = index as i32 + 1;
        GroupWord(vec![if positive { l } else { -l }])
    }

    pub fn from_letters(letters: &[i32]) -> Result<GroupWord> {
        let mut w = GroupWord::identity();
        for &l in letters {
            if l == 0 {
                return Err(Cat0Error::Parse("word letters must be nonzero".into()));
            }
            w = w.mul(&GroupWord(vec![l]));
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product with free reduction at the junction.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Run-length display using the supplied generator names, e.g. `G^2H^-1`.
    pub fn display(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "e".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * if l > 0 { 1 } else { -1 };
            let name = &names[(l.unsigned_abs() - 1) as usize];
            match run {
                1 => out.push_str(name),
                n => out.push_str(&format!("{name}^{n}")),
            }
            i = j;
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Generated groups
// ---------------------------------------------------------------------------

/// A finite list of named generating isometries of one model space.
#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    space: Space,
    gens: Vec<Isometry>,
    names: Vec<String>,
}

impl GeneratedGroup {
    pub fn new(named: Vec<(String, Isometry)>) -> Result<GeneratedGroup> {
        if named.is_empty() {
            return Err(Cat0Error::Precondition(
                "a generated group needs at least one generator".into(),
            ));
        }
        let space = named[0].1.space();
        for (name, g) in &named {
            if g.space() != space {
                return Err(Cat0Error::ModelMismatch(format!(
                    "generator {name} lives in {:?}, expected {:?}",
                    g.space(),
                    space
                )));
            }
            if name.is_empty() {
                return Err(Cat0Error::Parse("generator names must be non-empty".into()));
            }
        }
        let names: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Cat0Error::Parse("generator names must be distinct".into()));
        }
        Ok(GeneratedGroup {
            space,
            gens: named.into_iter().map(|(_, g)| g).collect(),
            names,
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.gens
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn word_text(&self, w: &GroupWord) -> String {
        w.display(&self.names)
    }

    /// The isometry a word evaluates to, composing left to right (the word
    /// `st` acts by `s` after `t` on points: `(st).x = s.(t.x)`).
    pub fn evaluate(&self, w: &GroupWord) -> Result<Isometry> {
        let mut acc = Isometry::identity(self.space);
        for &l in w.letters() {
            acc = acc.compose(&self.letter_iso(l))?;
        }
        Ok(acc)
    }

    fn letter_iso(&self, l: i32) -> Isometry {
        let g = &self.gens[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            g.clone()
        } else {
            g.inverse()
        }
    }

    /// All freely reduced words of length at most `max_len` in length-lex
    /// order (identity first; letters ordered `g1, g1^-1, g2, g2^-1, ...`).
    pub fn words_up_to(&self, max_len: usize) -> Vec<GroupWord> {
        let letters: Vec<i32> = (1..=self.gens.len() as i32).flat_map(|i| [i, -i]).collect();
        let mut all = vec![GroupWord::identity()];
        let mut frontier = vec![GroupWord::identity()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * letters.len());
            for w in &frontier {
                for &l in &letters {
                    if w.0.last() == Some(&-l) {
                        continue;
                    }
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(GroupWord(v));
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    }

    /// Same enumeration with each word's isometry, built incrementally.
    pub fn words_with_isometries(&self, max_len: usize) -> Result<Vec<(GroupWord, Isometry)>> {
        let letters: Vec<i32> = (1..=self.gens.len() as i32).flat_map(|i| [i, -i]).collect();
        let id = (GroupWord::identity(), Isometry::identity(self.space));
        let mut all = vec![id.clone()];
        let mut frontier = vec![id];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * letters.len());
            for (w, iso) in &frontier {
                for &l in &letters {
                    if w.0.last() == Some(&-l) {
                        continue;
                    }
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push((GroupWord(v), iso.compose(&self.letter_iso(l))?));
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(all)
    }

    /// Exact forms of the generators; only the hyperbolic plane (frozen
    /// rational matrices) and the tree (words) support exact arithmetic.
    pub fn exact_generators(&self) -> Result<Vec<ExactIso>> {
        self.gens
            .iter()
            .map(|g| match g {
                Isometry::H2(m) => Ok(ExactIso::Mat(QMat::from_mobius(m)?)),
                Isometry::Tree(w) => Ok(ExactIso::TreeWord(w.clone())),
                _ => Err(Cat0Error::Precondition(
                    "exact boundary certificates need the hyperbolic plane or the tree".into(),
                )),
            })
            .collect()
    }

    /// Exact form of a word, computed as an exact product of frozen
    /// generators (never by freezing a floating-point composite).
    pub fn exact_iso(&self, w: &GroupWord) -> Result<ExactIso> {
        exact_word(&self.exact_generators()?, w)
    }
}

/// Exact product of a word over pre-frozen generators.
fn exact_word(gens: &[ExactIso], w: &GroupWord) -> Result<ExactIso> {
    let mut acc = match gens.first() {
        Some(ExactIso::Mat(_)) => ExactIso::Mat(QMat::identity()),
        Some(ExactIso::TreeWord(_)) => ExactIso::TreeWord(Word::identity()),
        None => {
            return Err(Cat0Error::Precondition(
                "exact evaluation needs at least one generator".into(),
            ))
        }
    };
    for &l in w.letters() {
        let g = &gens[(l.unsigned_abs() - 1) as usize];
        let g = if l > 0 { g.clone() } else { g.inverse()? };
        acc = acc.mul(&g);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Exact isometries and boundary points
// ---------------------------------------------------------------------------

/// An isometry in a form supporting exact boundary arithmetic: a rational
/// matrix on the hyperbolic plane, or a word on the tree.
#[derive(Clone, Debug)]
pub enum ExactIso {
    Mat(QMat),
    TreeWord(Word),
}

impl ExactIso {
    pub fn mul(&self, other: &ExactIso) -> ExactIso {
        match (self, other) {
            (ExactIso::Mat(a), ExactIso::Mat(b)) => ExactIso::Mat(a.mul(b)),
            (ExactIso::TreeWord(a), ExactIso::TreeWord(b)) => ExactIso::TreeWord(a.mul(b)),
            _ => panic!("mixed exact isometry models"),
        }
    }

    pub fn inverse(&self) -> Result<ExactIso> {
        match self {
            ExactIso::Mat(m) => Ok(ExactIso::Mat(m.inverse()?)),
            ExactIso::TreeWord(w) => Ok(ExactIso::TreeWord(w.inverse())),
        }
    }

    pub fn pow(&self, n: i64) -> Result<ExactIso> {
        match self {
            ExactIso::Mat(m) => Ok(ExactIso::Mat(m.pow(n)?)),
            ExactIso::TreeWord(w) => {
                let base = if n >= 0 { w.clone() } else { w.inverse() };
                let mut out = Word::identity();
                for _ in 0..n.unsigned_abs() {
                    out = out.mul(&base);
                }
                Ok(ExactIso::TreeWord(out))
            }
        }
    }

    pub fn apply_point(&self, p: &ExactBoundaryPt) -> ExactBoundaryPt {
        match (self, p) {
            (ExactIso::Mat(m), ExactBoundaryPt::Circle(x)) => ExactBoundaryPt::Circle(m.apply(x)),
            (ExactIso::TreeWord(w), ExactBoundaryPt::End(e)) => ExactBoundaryPt::End(e.translate(w)),
            _ => panic!("mixed exact isometry models"),
        }
    }
}

/// A boundary point in exact form: a rational projective point on the circle
/// at infinity, or a tree end.
#[derive(Clone, Debug)]
pub enum ExactBoundaryPt {
    Circle(ProjPoint),
    End(TreeEnd),
}

impl ExactBoundaryPt {
    pub fn from_boundary(p: &BoundaryPoint) -> Result<ExactBoundaryPt> {
        match p {
            BoundaryPoint::H2(x) => Ok(ExactBoundaryPt::Circle(ProjPoint::from_h2(x)?)),
            BoundaryPoint::Tree(e) => Ok(ExactBoundaryPt::End(e.clone())),
            _ => Err(Cat0Error::Precondition(
                "exact boundary points exist for the hyperbolic plane and the tree".into(),
            )),
        }
    }

    pub fn to_boundary(&self) -> BoundaryPoint {
        match self {
            ExactBoundaryPt::Circle(p) => BoundaryPoint::H2(p.to_h2()),
            ExactBoundaryPt::End(e) => BoundaryPoint::Tree(e.clone()),
        }
    }

    pub fn same_point(&self, other: &ExactBoundaryPt) -> bool {
        match (self, other) {
            (ExactBoundaryPt::Circle(a), ExactBoundaryPt::Circle(b)) => a == b,
            (ExactBoundaryPt::End(a), ExactBoundaryPt::End(b)) => a.lcp(b).is_none(),
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Boundary balls
// ---------------------------------------------------------------------------

/// An open "ball" in the visual boundary with exact membership and image
/// operations: an open arc on the circle at infinity, or a cylinder in the
/// end space of the tree.
#[derive(Clone, Debug)]
pub enum BoundaryBall {
    Arc(Arc),
    Cyl(Cylinder),
}

impl BoundaryBall {
    pub fn contains(&self, p: &ExactBoundaryPt) -> bool {
        match (self, p) {
            (BoundaryBall::Arc(a), ExactBoundaryPt::Circle(x)) => a.contains(x),
            (BoundaryBall::Cyl(c), ExactBoundaryPt::End(e)) => c.contains_end(e),
            _ => panic!("mixed boundary ball models"),
        }
    }

    /// Exact image; a cylinder may split into several cylinders under
    /// translation, an arc always maps to one arc.
    pub fn apply(&self, g: &ExactIso) -> Result<Vec<BoundaryBall>> {
        match (self, g) {
            (BoundaryBall::Arc(a), ExactIso::Mat(m)) => Ok(vec![BoundaryBall::Arc(a.apply(m)?)]),
            (BoundaryBall::Cyl(c), ExactIso::TreeWord(w)) => {
                Ok(c.translate(w).into_iter().map(BoundaryBall::Cyl).collect())
            }
            _ => panic!("mixed boundary ball models"),
        }
    }

    /// Does `other` contain the closure of `self`? (Cylinders are clopen, so
    /// for them this is plain containment.)
    pub fn closure_inside(&self, other: &BoundaryBall) -> bool {
        match (self, other) {
            (BoundaryBall::Arc(a), BoundaryBall::Arc(b)) => b.contains_closure_of(a),
            (BoundaryBall::Cyl(a), BoundaryBall::Cyl(b)) => a.subset_of(b),
            _ => panic!("mixed boundary ball models"),
        }
    }

    /// Closures do not meet.
    pub fn closed_disjoint(&self, other: &BoundaryBall) -> bool {
        match (self, other) {
            (BoundaryBall::Arc(a), BoundaryBall::Arc(b)) => a.closed_disjoint(b),
            (BoundaryBall::Cyl(a), BoundaryBall::Cyl(b)) => a.disjoint(b),
            _ => panic!("mixed boundary ball models"),
        }
    }

    /// Open intersection is nonempty.
    pub fn meets(&self, other: &BoundaryBall) -> bool {
        match (self, other) {
            (BoundaryBall::Arc(a), BoundaryBall::Arc(b)) => a.meets(b),
            (BoundaryBall::Cyl(a), BoundaryBall::Cyl(b)) => a.intersection(b).is_some(),
            _ => panic!("mixed boundary ball models"),
        }
    }

    /// Connected components of the open intersection.
    pub fn intersection(&self, other: &BoundaryBall) -> Vec<BoundaryBall> {
        match (self, other) {
            (BoundaryBall::Arc(a), BoundaryBall::Arc(b)) => {
                a.intersection(b).into_iter().map(BoundaryBall::Arc).collect()
            }
            (BoundaryBall::Cyl(a), BoundaryBall::Cyl(b)) => {
                a.intersection(b).into_iter().map(BoundaryBall::Cyl).collect()
            }
            _ => panic!("mixed boundary ball models"),
        }
    }

    /// A strictly smaller ball whose closure lies inside `self`; cylinders
    /// are clopen and shrink to themselves.
    pub fn shrink(&self) -> Result<BoundaryBall> {
        match self {
            BoundaryBall::Arc(a) => Ok(BoundaryBall::Arc(a.shrink()?)),
            BoundaryBall::Cyl(c) => Ok(BoundaryBall::Cyl(c.clone())),
        }
    }

    pub fn interior_point(&self) -> Result<ExactBoundaryPt> {
        match self {
            BoundaryBall::Arc(a) => Ok(ExactBoundaryPt::Circle(a.interior_point())),
            BoundaryBall::Cyl(c) => Ok(ExactBoundaryPt::End(c.interior_end())),
        }
    }

    pub fn visual_diameter(&self) -> f64 {
        match self {
            BoundaryBall::Arc(a) => a.visual_diameter(),
            BoundaryBall::Cyl(c) => c.visual_diameter(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            BoundaryBall::Arc(a) => format!(
                "arc({:.6} .. {:.6})",
                a.lo().to_f64(),
                a.hi().to_f64()
            ),
            BoundaryBall::Cyl(c) => format!("cylinder({})", c.prefix()),
        }
    }

}

fn pieces_in_ball(pieces: &[BoundaryBall], ball: &BoundaryBall) -> bool {
    pieces.iter().all(|p| p.closure_inside(ball))
}

fn pieces_meet(pieces: &[BoundaryBall], ball: &BoundaryBall) -> bool {
    pieces.iter().any(|p| p.meets(ball))
}

/// A product open set `U1 x U2` in the product of two boundary copies.
#[derive(Clone, Debug)]
pub struct ProductOpen {
    pub f1: BoundaryBall,
    pub f2: BoundaryBall,
}

impl ProductOpen {
    pub fn new(f1: BoundaryBall, f2: BoundaryBall) -> ProductOpen {
        ProductOpen { f1, f2 }
    }

    pub fn describe(&self) -> String {
        format!("{} x {}", self.f1.describe(), self.f2.describe())
    }
}

// ---------------------------------------------------------------------------
// Limit-set samples
// ---------------------------------------------------------------------------

/// One sampled limit direction: the first (length-lex) word whose orbit
/// point realises it.
#[derive(Clone, Debug)]
pub struct LimitPoint {
    pub word: GroupWord,
    pub text: String,
    pub direction: BoundaryPoint,
    pub displacement: f64,
}

#[derive(Clone, Debug)]
pub struct LimitSetSample {
    pub space: Space,
    pub max_len: usize,
    /// Orbit points at distance at least this from the basepoint were kept.
    pub threshold: f64,
    pub points: Vec<LimitPoint>,
    /// Set when the orbit shows no escape to infinity up to `max_len`.
    pub diagnostic: Option<String>,
}

/// Samples directions to far orbit points of the basepoint `x0` under all
/// reduced words of length at most `max_len`. Keeps words whose orbit point
/// lies at distance at least `min(r_esc, max displacement)` and deduplicates
/// directions at visual distance `eps_dedup`, keeping the length-lex first
/// witness. If the orbit has not outgrown its half-length maximum the group
/// looks bounded and an empty sample with a diagnostic is returned.
pub fn limit_set_sample(
    group: &GeneratedGroup,
    x0: &Point,
    max_len: usize,
    tol: &Tolerances,
) -> Result<LimitSetSample> {
    if x0.space() != group.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "basepoint lives in {:?}, group in {:?}",
            x0.space(),
            group.space()
        )));
    }
    let words = group.words_with_isometries(max_len)?;
    let half = max_len.div_ceil(2);
    let mut displacements = Vec::with_capacity(words.len());
    let mut max_all = 0.0f64;
    let mut max_half = 0.0f64;
    for (w, iso) in &words {
        let d = distance(x0, &iso.apply(x0)?)?;
        if d > max_all {
            max_all = d;
        }
        if w.len() <= half && d > max_half {
            max_half = d;
        }
        displacements.push(d);
    }

    if max_all < tol.r_esc && max_all <= max_half + tol.eps_dedup {
        return Ok(LimitSetSample {
            space: group.space(),
            max_len,
            threshold: f64::INFINITY,
            points: Vec::new(),
            diagnostic: Some(format!(
                "orbit stays within {max_all:.4} of the basepoint up to length {max_len} \
                 with no growth past length {half}; the group looks bounded"
            )),
        });
    }

    let threshold = tol.r_esc.min(max_all);
    let mut points: Vec<LimitPoint> = Vec::new();
    for ((w, iso), d) in words.iter().zip(&displacements) {
        if *d < threshold {
            continue;
        }
        let dir = direction_from(x0, &iso.apply(x0)?)?;
        let mut dup = false;
        for p in &points {
            if visual_distance(&p.direction, &dir)? <= tol.eps_dedup {
                dup = true;
                break;
            }
        }
        if !dup {
            points.push(LimitPoint {
                word: w.clone(),
                text: group.word_text(w),
                direction: dir,
                displacement: *d,
            });
        }
    }
    Ok(LimitSetSample {
        space: group.space(),
        max_len,
        threshold,
        points,
        diagnostic: None,
    })
}

/// Well-separated ordered pairs from the first `cap` sampled directions:
/// every ordered pair at visual distance at least `sep_min`.
pub fn reference_pairs(
    sample: &LimitSetSample,
    cap: usize,
    tol: &Tolerances,
) -> Result<Vec<(BoundaryPoint, BoundaryPoint)>> {
    let dirs: Vec<&BoundaryPoint> = sample
        .points
        .iter()
        .take(cap)
        .map(|p| &p.direction)
        .collect();
    let mut out = Vec::new();
    for (i, a) in dirs.iter().enumerate() {
        for (j, b) in dirs.iter().enumerate() {
            if i != j && visual_distance(a, b)? >= tol.sep_min {
                out.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Elementarity
// ---------------------------------------------------------------------------

/// What happened to one candidate global fixed point on the boundary.
#[derive(Clone, Debug)]
pub struct CandidateFate {
    pub point: BoundaryPoint,
    /// Largest visual displacement of the candidate under a generator.
    pub max_move: f64,
    /// Name of a generator moving it past `eps_dedup`, if any.
    pub moved_by: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ElementarityReport {
    pub nonelementary: bool,
    pub sample_count: usize,
    pub candidates: Vec<CandidateFate>,
    pub reason: String,
}

/// Candidate boundary points that could be fixed by the whole group. Any
/// globally fixed point must appear in this list, so checking that every
/// candidate is moved by some generator rules out a global fixed point.
fn global_fixed_candidates(group: &GeneratedGroup, tol: &Tolerances) -> Result<Vec<BoundaryPoint>> {
    match group.space() {
        // A global fixed point is fixed by the first nontrivial generator
        // in particular, so its fixed boundary set contains all candidates.
        Space::H2 | Space::Tree => {
            for g in group.generators() {
                if g.is_identity(1e-12) {
                    continue;
                }
                return Ok(match classify(g, tol)? {
                    Classification::Elliptic { .. } => Vec::new(),
                    Classification::Axial {
                        attracting,
                        repelling,
                        ..
                    } => vec![attracting, repelling],
                    Classification::Parabolic { fixed } => vec![fixed],
                });
            }
            Ok(Vec::new())
        }
        // The boundary action of a rigid motion is its rotation part, so a
        // globally fixed direction is a common unit eigenvector with
        // eigenvalue one: a nonzero vector in the intersection of the
        // kernels of (q_i - I).
        Space::Euclid(d) => {
            let mut rows: Vec<Vec<f64>> = Vec::new();
            for g in group.generators() {
                if let Isometry::Euclid(e) = g {
                    let q = e.matrix();
                    for i in 0..d {
                        let mut row = q[i].clone();
                        row[i] -= 1.0;
                        rows.push(row);
                    }
                }
            }
            match nullspace_vector(&rows, d) {
                Some(v) => {
                    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
                    Ok(vec![BoundaryPoint::Euclid(v), BoundaryPoint::Euclid(neg)])
                }
                None => Ok(Vec::new()),
            }
        }
        // Suspension boundary: the two poles are candidates whenever the
        // vertical parts preserve orientation, and an interior point (theta,
        // xi) can only be global when xi is fixed by every hyperbolic part;
        // a flip generator forces theta = pi/2, so that representative
        // covers all interior candidates.
        Space::ProdH2R => {
            let mut cands = vec![
                BoundaryPoint::Prod {
                    theta: 0.0,
                    h2: None,
                },
                BoundaryPoint::Prod {
                    theta: std::f64::consts::PI,
                    h2: None,
                },
            ];
            let mut interior: Vec<h2::H2Boundary> = Vec::new();
            let mut saw_nontrivial_h = false;
            for g in group.generators() {
                if let Isometry::Prod { h, .. } = g {
                    if h.is_identity(1e-12) {
                        continue;
                    }
                    saw_nontrivial_h = true;
                    match h2::classify(h, tol.eps_class) {
                        h2::H2Class::Axial {
                            attracting,
                            repelling,
                            ..
                        } => {
                            interior.push(attracting);
                            interior.push(repelling);
                        }
                        h2::H2Class::Parabolic { fixed } => interior.push(fixed),
                        _ => {}
                    }
                    break;
                }
            }
            if !saw_nontrivial_h {
                // Purely vertical group: every equatorial direction is
                // fixed by the hyperbolic parts; one representative serves.
                interior.push(h2::H2Boundary::Infinity);
            }
            for xi in interior {
                cands.push(BoundaryPoint::Prod {
                    theta: std::f64::consts::FRAC_PI_2,
                    h2: Some(xi),
                });
            }
            Ok(cands)
        }
    }
}

/// One nonzero vector in the common kernel of the stacked rows, or None.
fn nullspace_vector(rows: &[Vec<f64>], d: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let (best, val) = (r..m.len())
            .map(|i| (i, m[i][c].abs()))
            .fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < 1e-9 {
            continue;
        }
        m.swap(r, best);
        let p = m[r][c];
        for i in 0..m.len() {
            if i != r {
                let f = m[i][c] / p;
                for j in 0..d {
                    m[i][j] -= f * m[r][j];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free = (0..d).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![0.0; d];
    v[free] = 1.0;
    for (ri, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -m[ri][free] / m[ri][pc];
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Some(v.into_iter().map(|x| x / n).collect())
}

/// Tests the two-sided definition: at least three distinct limit directions
/// and no boundary point fixed by the whole group. The candidate list comes
/// from `global_fixed_candidates`; a candidate moved at most `eps_dedup`
/// by every generator counts as globally fixed.
pub fn is_nonelementary(
    group: &GeneratedGroup,
    max_len: usize,
    tol: &Tolerances,
) -> Result<ElementarityReport> {
    let sample = limit_set_sample(group, &basepoint(group.space()), max_len, tol)?;
    if sample.points.len() < 3 {
        let reason = match &sample.diagnostic {
            Some(d) => d.clone(),
            None => format!(
                "only {} distinct limit directions at word length {}",
                sample.points.len(),
                max_len
            ),
        };
        return Ok(ElementarityReport {
            nonelementary: false,
            sample_count: sample.points.len(),
            candidates: Vec::new(),
            reason,
        });
    }

    let mut fates = Vec::new();
    let mut fixed_candidate: Option<usize> = None;
    for point in global_fixed_candidates(group, tol)? {
        let mut max_move = 0.0f64;
        let mut moved_by = None;
        for (g, name) in group.generators().iter().zip(group.names()) {
            let image = g.apply_boundary(&point)?;
            let v = visual_distance(&image, &point)?;
            if v > max_move {
                max_move = v;
            }
            if v > tol.eps_dedup && moved_by.is_none() {
                moved_by = Some(name.clone());
            }
        }
        if moved_by.is_none() && fixed_candidate.is_none() {
            fixed_candidate = Some(fates.len());
        }
        fates.push(CandidateFate {
            point,
            max_move,
            moved_by,
        });
    }

    match fixed_candidate {
        Some(i) => Ok(ElementarityReport {
            nonelementary: false,
            sample_count: sample.points.len(),
            reason: format!(
                "boundary point {:?} moves at most {:.2e} under every generator",
                fates[i].point, fates[i].max_move
            ),
            candidates: fates,
        }),
        None => Ok(ElementarityReport {
            nonelementary: true,
            sample_count: sample.points.len(),
            reason: format!(
                "{} limit directions and every fixed-point candidate is moved by a generator",
                sample.points.len()
            ),
            candidates: fates,
        }),
    }
}

// ---------------------------------------------------------------------------
// Moving a pair of boundary points into a ball
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PairMove {
    pub word: GroupWord,
    pub text: String,
    pub images: (BoundaryPoint, BoundaryPoint),
}

/// First (length-lex) word mapping both points of `pair` into `target`,
/// with membership decided exactly.
pub fn move_pair_into(
    group: &GeneratedGroup,
    pair: (&BoundaryPoint, &BoundaryPoint),
    target: &BoundaryBall,
    max_len: usize,
) -> Result<PairMove> {
    let a = ExactBoundaryPt::from_boundary(pair.0)?;
    let b = ExactBoundaryPt::from_boundary(pair.1)?;
    let gens = group.exact_generators()?;
    for w in group.words_up_to(max_len) {
        let iso = exact_word(&gens, &w)?;
        let ia = iso.apply_point(&a);
        let ib = iso.apply_point(&b);
        if target.contains(&ia) && target.contains(&ib) {
            return Ok(PairMove {
                text: group.word_text(&w),
                word: w,
                images: (ia.to_boundary(), ib.to_boundary()),
            });
        }
    }
    Err(Cat0Error::Inconclusive(format!(
        "no word of length at most {max_len} maps the pair into {}",
        target.describe()
    )))
}

// ---------------------------------------------------------------------------
// Fixed-point balls shared by ping-pong and the word families
// ---------------------------------------------------------------------------

/// Separated balls around the four fixed points of two axial isometries:
/// order is attracting(g), repelling(g), attracting(h), repelling(h).
#[derive(Clone, Debug)]
pub struct FixedPointFrame {
    pub space: Space,
    pub centers: [BoundaryPoint; 4],
    pub exact_centers: [ExactBoundaryPt; 4],
    pub balls: [BoundaryBall; 4],
    /// Visual ball radius (circle boundaries only).
    pub radius: Option<f64>,
    /// Cylinder depth (tree only).
    pub depth: Option<usize>,
    pub min_separation: f64,
}

fn fixed_point_frame(g: &Isometry, h: &Isometry, tol: &Tolerances) -> Result<FixedPointFrame> {
    if g.space() != h.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "the two maps live in different models: {:?} vs {:?}",
            g.space(),
            h.space()
        )));
    }
    let space = g.space();
    if !matches!(space, Space::H2 | Space::Tree) {
        return Err(Cat0Error::Precondition(
            "free-group certificates need exact boundary arithmetic, which the \
             hyperbolic plane and the tree provide; flat and product models have \
             no rank-one isometries to feed them anyway"
                .into(),
        ));
    }

    let fixed_pair = |iso: &Isometry, which: &str| -> Result<(BoundaryPoint, BoundaryPoint)> {
        match classify(iso, tol)? {
            Classification::Axial {
                attracting,
                repelling,
                ..
            } => Ok((attracting, repelling)),
            other => Err(Cat0Error::Precondition(format!(
                "ping-pong needs axial inputs; the {which} map is {}",
                other.kind()
            ))),
        }
    };
    let (ag, rg) = fixed_pair(g, "first")?;
    let (ah, rh) = fixed_pair(h, "second")?;
    let centers = [ag, rg, ah, rh];
    let exact_centers = [
        ExactBoundaryPt::from_boundary(&centers[0])?,
        ExactBoundaryPt::from_boundary(&centers[1])?,
        ExactBoundaryPt::from_boundary(&centers[2])?,
        ExactBoundaryPt::from_boundary(&centers[3])?,
    ];
    for i in 0..4 {
        for j in (i + 1)..4 {
            if exact_centers[i].same_point(&exact_centers[j]) {
                return Err(Cat0Error::Precondition(format!(
                    "the four fixed points are not pairwise distinct: \
                     point {i} equals point {j}"
                )));
            }
        }
    }

    let mut min_separation = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            min_separation = min_separation.min(visual_distance(&centers[i], &centers[j])?);
        }
    }

    match space {
        Space::H2 => {
            // Quarter of the minimal pairwise visual distance; arcs this
            // small around points this far apart are always disjoint.
            let radius = min_separation / 4.0;
            let mut balls = Vec::with_capacity(4);
            for c in &centers {
                let BoundaryPoint::H2(x) = c else { unreachable!() };
                balls.push(BoundaryBall::Arc(Arc::around(x, radius)?));
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if !balls[i].closed_disjoint(&balls[j]) {
                        return Err(Cat0Error::Inconclusive(format!(
                            "radius {radius} fails to separate the fixed-point balls"
                        )));
                    }
                }
            }
            let balls: [BoundaryBall; 4] = balls.try_into().expect("four balls");
            Ok(FixedPointFrame {
                space,
                centers,
                exact_centers,
                balls,
                radius: Some(radius),
                depth: None,
                min_separation,
            })
        }
        Space::Tree => {
            // Coarsest separating cylinders: depth one past the largest
            // pairwise common prefix, so equal-depth prefixes are distinct
            // (and hence the cylinders disjoint).
            let ends: Vec<&TreeEnd> = exact_centers
                .iter()
                .map(|e| match e {
                    ExactBoundaryPt::End(t) => t,
                    _ => unreachable!(),
                })
                .collect();
            let mut depth = 1usize;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let l = ends[i].lcp(ends[j]).expect("distinct ends");
                    depth = depth.max(l + 1);
                }
            }
            let mut balls = Vec::with_capacity(4);
            for e in &ends {
                balls.push(BoundaryBall::Cyl(Cylinder::new(e.word_prefix(depth))?));
            }
            let balls: [BoundaryBall; 4] = balls.try_into().expect("four balls");
            Ok(FixedPointFrame {
                space,
                centers,
                exact_centers,
                balls,
                radius: None,
                depth: Some(depth),
                min_separation,
            })
        }
        _ => unreachable!(),
    }
}

fn exact_of(iso: &Isometry) -> Result<ExactIso> {
    match iso {
        Isometry::H2(m) => Ok(ExactIso::Mat(QMat::from_mobius(m)?)),
        Isometry::Tree(w) => Ok(ExactIso::TreeWord(w.clone())),
        _ => Err(Cat0Error::Precondition(
            "exact boundary certificates need the hyperbolic plane or the tree".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Ping-pong
// ---------------------------------------------------------------------------

/// Exact trace data and a contraction verdict for one certified word.
#[derive(Clone, Debug)]
pub struct WordCheck {
    pub text: String,
    /// Decided exactly: |trace| > 2 sqrt(det) on the plane, nonempty cyclic
    /// core on the tree.
    pub axial: bool,
    pub tau: f64,
    /// |trace| / sqrt(det) (circle models only).
    pub normalized_trace: Option<f64>,
    pub rank_one: RankOneVerdict,
}

/// Certificate that suitable powers of two axial maps play ping-pong, with
/// per-word exact checks over the certified generators.
#[derive(Clone, Debug)]
pub struct PingPongCertificate {
    pub space: Space,
    pub k: i64,
    pub ell: i64,
    pub m_range: i64,
    pub frame: FixedPointFrame,
    /// Certified generators: `G = g^k`, `H = h^ell`.
    pub gen_g: Isometry,
    pub gen_h: Isometry,
    pub exact_g: ExactIso,
    pub exact_h: ExactIso,
    pub l_free: usize,
    pub words: Vec<WordCheck>,
    pub all_axial: bool,
    pub all_rank_one: bool,
    pub min_translation: f64,
    pub min_normalized_trace: Option<f64>,
}

impl PingPongCertificate {
    /// Every certified word is axial with translation length clear of zero
    /// and passes the sampling rank-one test.
    pub fn pass(&self, tol: &Tolerances) -> bool {
        self.all_axial && self.all_rank_one && self.min_translation > tol.delta_free
    }
}

/// Finds the smallest power `p` such that `e^p` maps the closures of the
/// balls at `sources` into the ball `target_plus` and `e^-p` maps them into
/// `target_minus`, with each image ball also mapped into itself. The
/// invariance upgrades the finitely many checks to every multiple of `p`:
/// once a set lands inside the target ball, applying the power again keeps
/// it there, so `e^{mp}` works for all nonzero `m` by induction on `|m|`.
fn symmetric_power(
    e: &ExactIso,
    balls: &[BoundaryBall; 4],
    sources: [usize; 2],
    target_plus: usize,
    target_minus: usize,
    cap: i64,
) -> Result<Option<i64>> {
    'outer: for p in 1..=cap {
        for (pw, tgt) in [(e.pow(p)?, target_plus), (e.pow(-p)?, target_minus)] {
            for s in [sources[0], sources[1], tgt] {
                if !pieces_in_ball(&balls[s].apply(&pw)?, &balls[tgt]) {
                    continue 'outer;
                }
            }
        }
        return Ok(Some(p));
    }
    Ok(None)
}

/// Builds a ping-pong certificate for two rank-one maps: disjoint balls
/// around the four fixed points, minimal powers `k`, `ell` whose positive
/// and negative multiples map the other pair's closed balls into the
/// attracting/repelling ball (verified for `0 < |m| <= m_range` and certified
/// for all `m` by ball invariance), then an exact axiality check and a
/// sampled contraction verdict for every reduced word of length at most
/// `l_free` over the certified generators.
pub fn ping_pong_construct(
    g: &Isometry,
    h: &Isometry,
    m_range: i64,
    l_free: usize,
    tol: &Tolerances,
) -> Result<PingPongCertificate> {
    let frame = fixed_point_frame(g, h, tol)?;
    for (iso, which) in [(g, "first"), (h, "second")] {
        let cert = is_rank_one(iso, &SamplingPlan::light(), tol)?;
        if cert.verdict == RankOneVerdict::NotRankOne {
            return Err(Cat0Error::Precondition(format!(
                "the {which} map failed the rank-one test: {}",
                cert.reason
            )));
        }
    }
    let eg = exact_of(g)?;
    let eh = exact_of(h)?;
    let cap = K_MAX as i64;

    // Positive powers of g pull the h-balls into the attracting ball 0,
    // negative powers push them into the repelling ball 1; and vice versa.
    let k = symmetric_power(&eg, &frame.balls, [2, 3], 0, 1, cap)?;
    let ell = symmetric_power(&eh, &frame.balls, [0, 1], 2, 3, cap)?;
    let (Some(k), Some(ell)) = (k, ell) else {
        return Err(Cat0Error::Inconclusive(format!(
            "no power up to {cap} maps the opposite balls inside the fixed-point \
             balls; the fixed points may be too close (minimal separation {:.3e})",
            frame.min_separation
        )));
    };

    // Spot-check the literal inclusion family for small multiples; the
    // invariance established above certifies the rest of the integers.
    for m in 1..=m_range {
        let checks = [
            (eg.pow(m * k)?, [2usize, 3], 0usize),
            (eg.pow(-m * k)?, [2, 3], 1),
            (eh.pow(m * ell)?, [0, 1], 2),
            (eh.pow(-m * ell)?, [0, 1], 3),
        ];
        for (p, srcs, tgt) in checks {
            for s in srcs {
                if !pieces_in_ball(&frame.balls[s].apply(&p)?, &frame.balls[tgt]) {
                    return Err(Cat0Error::Inconclusive(format!(
                        "inclusion family broke at multiple {m} despite invariance"
                    )));
                }
            }
        }
    }

    let gen_g = g.pow(k);
    let gen_h = h.pow(ell);
    let exact_g = eg.pow(k)?;
    let exact_h = eh.pow(ell)?;
    let cert_group = GeneratedGroup::new(vec![
        ("G".to_string(), gen_g.clone()),
        ("H".to_string(), gen_h.clone()),
    ])?;
    let exact_gens = [exact_g.clone(), exact_h.clone()];

    let mut words = Vec::new();
    let mut all_axial = true;
    let mut all_rank_one = true;
    let mut min_translation = f64::INFINITY;
    let mut min_nt: Option<f64> = None;
    for w in cert_group.words_up_to(l_free) {
        if w.is_empty() {
            continue;
        }
        let exact = exact_word(&exact_gens, &w)?;
        let (axial, tau, nt) = match &exact {
            ExactIso::Mat(m) => {
                let axial = m.is_axial_trace();
                let nt = m.normalized_trace();
                let tau = if nt > 2.0 { 2.0 * (nt / 2.0).acosh() } else { 0.0 };
                (axial, tau, Some(nt))
            }
            ExactIso::TreeWord(tw) => {
                let (_, core) = tw.cyclic_reduce();
                (!core.is_empty(), core.len() as f64, None)
            }
        };
        let iso = cert_group.evaluate(&w)?;
        let verdict = is_rank_one(&iso, &SamplingPlan::light(), tol)?.verdict;
        all_axial &= axial;
        all_rank_one &= verdict == RankOneVerdict::RankOne;
        min_translation = min_translation.min(tau);
        if let Some(v) = nt {
            min_nt = Some(min_nt.map_or(v, |m: f64| m.min(v)));
        }
        words.push(WordCheck {
            text: cert_group.word_text(&w),
            axial,
            tau,
            normalized_trace: nt,
            rank_one: verdict,
        });
    }

    Ok(PingPongCertificate {
        space: frame.space,
        k,
        ell,
        m_range,
        frame,
        gen_g,
        gen_h,
        exact_g,
        exact_h,
        l_free,
        words,
        all_axial,
        all_rank_one,
        min_translation,
        min_normalized_trace: min_nt,
    })
}

// ---------------------------------------------------------------------------
// Boundary embedding of the free group
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    pub depth: usize,
    /// Number of reduced words at the final depth.
    pub leaf_words: usize,
    /// Pairwise disjointness of the nested images at the final depth.
    pub disjoint: bool,
    /// Maximal visual diameter of the image sets at each depth `1..=depth`.
    pub level_diameters: Vec<f64>,
    pub strictly_shrinking: bool,
    pub pass: bool,
}

/// Nests the ping-pong balls along reduced words: the set of a word
/// `s1 s2 .. sd` is `(s1 .. s_{d-1})` applied to the ball of its last
/// letter. Checks exact pairwise disjointness at the final depth and that
/// the maximal diameter strictly shrinks level by level — the Cantor-set
/// picture of the free group's boundary inside the visual boundary.
pub fn boundary_embedding_check(
    cert: &PingPongCertificate,
    depth: usize,
) -> Result<EmbeddingReport> {
    if depth == 0 {
        return Err(Cat0Error::Precondition("embedding depth must be positive".into()));
    }
    let exact_gens = [cert.exact_g.clone(), cert.exact_h.clone()];
    let ball_of_letter = |l: i32| -> &BoundaryBall {
        let idx = match l {
            1 => 0,
            -1 => 1,
            2 => 2,
            _ => 3,
        };
        &cert.frame.balls[idx]
    };

    let alphabet = [1i32, -1, 2, -2];
    let mut level: Vec<Vec<i32>> = alphabet.iter().map(|&l| vec![l]).collect();
    let mut level_diameters = Vec::new();
    let mut final_sets: Vec<Vec<BoundaryBall>> = Vec::new();
    for d in 1..=depth {
        let mut max_diam = 0.0f64;
        let mut sets = Vec::with_capacity(level.len());
        for letters in &level {
            let prefix = GroupWord::from_letters(&letters[..letters.len() - 1])?;
            let iso = exact_word(&exact_gens, &prefix)?;
            let pieces = ball_of_letter(letters[letters.len() - 1]).apply(&iso)?;
            for p in &pieces {
                max_diam = max_diam.max(p.visual_diameter());
            }
            sets.push(pieces);
        }
        level_diameters.push(max_diam);
        if d == depth {
            final_sets = sets;
            break;
        }
        let mut next = Vec::with_capacity(level.len() * 3);
        for letters in &level {
            let last = letters[letters.len() - 1];
            for &l in &alphabet {
                if l != -last {
                    let mut v = letters.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        level = next;
    }

    let mut disjoint = true;
    'pairs: for i in 0..final_sets.len() {
        for j in (i + 1)..final_sets.len() {
            for a in &final_sets[i] {
                for b in &final_sets[j] {
                    if !a.closed_disjoint(b) {
                        disjoint = false;
                        break 'pairs;
                    }
                }
            }
        }
    }
    let strictly_shrinking = level_diameters.windows(2).all(|w| w[1] < w[0]);
    Ok(EmbeddingReport {
        depth,
        leaf_words: final_sets.len(),
        disjoint,
        level_diameters,
        strictly_shrinking,
        pass: disjoint && strictly_shrinking,
    })
}

// ---------------------------------------------------------------------------
// Cantor addresses over a ping-pong frame
// ---------------------------------------------------------------------------

/// The Cantor-set structure a ping-pong certificate induces on the limit
/// set: level-`d` pieces are `(s1..s_{d-1})` applied to the ball of the last
/// letter, over reduced words in the certified generators. Knowing an
/// address inside a set makes movers constructible by prefix surgery
/// instead of search.
#[derive(Clone, Debug)]
pub struct CantorFrame {
    balls: [BoundaryBall; 4],
    gens: [ExactIso; 2],
}

impl PingPongCertificate {
    pub fn cantor_frame(&self) -> CantorFrame {
        CantorFrame {
            balls: self.frame.balls.clone(),
            gens: [self.exact_g.clone(), self.exact_h.clone()],
        }
    }
}

const CANTOR_ALPHABET: [i32; 4] = [1, -1, 2, -2];

impl CantorFrame {
    fn ball_of_letter(&self, l: i32) -> &BoundaryBall {
        let idx = match l {
            1 => 0,
            -1 => 1,
            2 => 2,
            _ => 3,
        };
        &self.balls[idx]
    }

    fn letter_iso(&self, l: i32) -> Result<ExactIso> {
        let base = &self.gens[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            Ok(base.clone())
        } else {
            base.inverse()
        }
    }

    /// Finds the address of a level set whose closure lies inside `region`,
    /// by depth-first refinement of the level sets that still meet it.
    /// Returns None when the caps run out before a level set fits — e.g.
    /// when `region` dodges the limit set.
    fn address_inside(&self, region: &BoundaryBall) -> Result<Option<GroupWord>> {
        let ident = exact_word(&self.gens, &GroupWord::identity())?;
        let mut stack: Vec<(Vec<i32>, ExactIso)> = Vec::new();
        for &l in CANTOR_ALPHABET.iter().rev() {
            stack.push((vec![l], ident.clone()));
        }
        let mut visited = 0usize;
        while let Some((addr, prefix)) = stack.pop() {
            visited += 1;
            if visited > 4096 {
                return Ok(None);
            }
            let last = addr[addr.len() - 1];
            let pieces = self.ball_of_letter(last).apply(&prefix)?;
            if !pieces.is_empty() && pieces.iter().all(|p| p.closure_inside(region)) {
                return Ok(Some(GroupWord::from_letters(&addr)?));
            }
            if addr.len() >= 64 || !pieces.iter().any(|p| p.meets(region)) {
                continue;
            }
            let child_prefix = prefix.mul(&self.letter_iso(last)?);
            for &l in CANTOR_ALPHABET.iter().rev() {
                if l != -last {
                    let mut child = addr.clone();
                    child.push(l);
                    stack.push((child, child_prefix.clone()));
                }
            }
        }
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Fixed-pair atlas
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct AtlasPair {
    pub word: GroupWord,
    pub text: String,
    pub attracting: BoundaryPoint,
    pub repelling: BoundaryPoint,
    pub tau: f64,
}

#[derive(Clone, Debug)]
pub struct FixedPairAtlas {
    pub max_len: usize,
    pub pairs: Vec<AtlasPair>,
    /// How far a reference pair can be from its nearest atlas pair, in the
    /// max metric on ordered pairs; None when no reference pairs were given.
    pub covering_radius: Option<f64>,
    pub reference_count: usize,
}

/// Bucket key for deduplicating fixed-point pairs without a quadratic scan.
enum PairBuckets {
    /// Circle angles bucketed at the dedup resolution.
    Circle {
        width: f64,
        count: i64,
        map: HashMap<(i64, i64), Vec<usize>>,
    },
    /// Tree ends keyed by the prefix whose cylinder has diameter below the
    /// dedup threshold, making the bucket test itself exact.
    Ends {
        depth: usize,
        map: HashMap<(Word, Word), Vec<usize>>,
    },
    Linear(Vec<usize>),
}

impl PairBuckets {
    fn new(space: Space, eps: f64) -> PairBuckets {
        match space {
            Space::H2 => {
                let width = (2.0 * eps.asin()).max(1e-6);
                let count = (std::f64::consts::TAU / width).ceil() as i64;
                PairBuckets::Circle {
                    width,
                    count,
                    map: HashMap::new(),
                }
            }
            Space::Tree => {
                let depth = (1.0 / eps).log2().ceil() as usize;
                PairBuckets::Ends {
                    depth,
                    map: HashMap::new(),
                }
            }
            _ => PairBuckets::Linear(Vec::new()),
        }
    }

    fn candidates(&self, a: &BoundaryPoint, r: &BoundaryPoint) -> Vec<usize> {
        match self {
            PairBuckets::Circle { width, count, map } => {
                let (ia, ir) = (circle_bucket(a, *width), circle_bucket(r, *width));
                let mut out = Vec::new();
                for da in -1..=1i64 {
                    for dr in -1..=1i64 {
                        let key = ((ia + da).rem_euclid(*count), (ir + dr).rem_euclid(*count));
                        if let Some(v) = map.get(&key) {
                            out.extend_from_slice(v);
                        }
                    }
                }
                out
            }
            PairBuckets::Ends { depth, map } => map
                .get(&end_bucket(a, r, *depth))
                .cloned()
                .unwrap_or_default(),
            PairBuckets::Linear(all) => all.clone(),
        }
    }

    fn insert(&mut self, a: &BoundaryPoint, r: &BoundaryPoint, idx: usize) {
        match self {
            PairBuckets::Circle { width, count, map } => {
                let key = (
                    circle_bucket(a, *width).rem_euclid(*count),
                    circle_bucket(r, *width).rem_euclid(*count),
                );
                map.entry(key).or_default().push(idx);
            }
            PairBuckets::Ends { depth, map } => {
                map.entry(end_bucket(a, r, *depth)).or_default().push(idx);
            }
            PairBuckets::Linear(all) => all.push(idx),
        }
    }
}

fn circle_bucket(p: &BoundaryPoint, width: f64) -> i64 {
    let BoundaryPoint::H2(x) = p else {
        panic!("circle bucket on a non-circle point")
    };
    (x.circle_angle() / width).floor() as i64
}

fn end_bucket(a: &BoundaryPoint, r: &BoundaryPoint, depth: usize) -> (Word, Word) {
    let (BoundaryPoint::Tree(ea), BoundaryPoint::Tree(er)) = (a, r) else {
        panic!("end bucket on non-tree points")
    };
    (ea.word_prefix(depth), er.word_prefix(depth))
}

/// Collects the (attracting, repelling) pairs of all axial words of length
/// at most `max_len`, deduplicated at `eps_dedup` keeping the length-lex
/// first witness, and measures how densely they cover the given reference
/// pairs (max metric over the two factors).
pub fn fixed_pair_atlas(
    group: &GeneratedGroup,
    max_len: usize,
    reference: &[(BoundaryPoint, BoundaryPoint)],
    tol: &Tolerances,
) -> Result<FixedPairAtlas> {
    let mut pairs: Vec<AtlasPair> = Vec::new();
    let mut buckets = PairBuckets::new(group.space(), tol.eps_dedup);
    for (w, iso) in group.words_with_isometries(max_len)? {
        if w.is_empty() {
            continue;
        }
        let Classification::Axial {
            tau,
            attracting,
            repelling,
            ..
        } = classify(&iso, tol)?
        else {
            continue;
        };
        let mut dup = false;
        for idx in buckets.candidates(&attracting, &repelling) {
            let p = &pairs[idx];
            if visual_distance(&p.attracting, &attracting)? <= tol.eps_dedup
                && visual_distance(&p.repelling, &repelling)? <= tol.eps_dedup
            {
                dup = true;
                break;
            }
        }
        if dup {
            continue;
        }
        buckets.insert(&attracting, &repelling, pairs.len());
        pairs.push(AtlasPair {
            text: group.word_text(&w),
            word: w,
            attracting,
            repelling,
            tau,
        });
    }

    let covering_radius = if reference.is_empty() {
        None
    } else {
        let mut worst = 0.0f64;
        for (ra, rr) in reference {
            let mut best = f64::INFINITY;
            for p in &pairs {
                let d = visual_distance(&p.attracting, ra)?
                    .max(visual_distance(&p.repelling, rr)?);
                if d < best {
                    best = d;
                }
            }
            if best > worst {
                worst = best;
            }
        }
        Some(worst)
    };

    Ok(FixedPairAtlas {
        max_len,
        pairs,
        covering_radius,
        reference_count: reference.len(),
    })
}

// ---------------------------------------------------------------------------
// Transitivity movers
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MoverReport {
    pub word: GroupWord,
    pub text: String,
    /// How the word was found: "overlap", "recipe", "surgery", or "search".
    pub via: String,
}

/// Finds a word sending the product open `w1` across `w2`: the image of
/// each factor of `w1` meets the corresponding factor of `w2`, decided
/// exactly. Tries the identity, then the two-step recipe (a power of an
/// atlas element `u` with attracting point in `w1.f1` and repelling point
/// in `w2.f2`, corrected by a power of an atlas element `w` attracting into
/// `w2.f1`), then — when a Cantor frame is supplied — prefix surgery on
/// level-set addresses, then a plain length-lex search. Surgery is what
/// scales: atlas pairs and short words run out once the windows shrink
/// below their resolution, while addresses just grow longer.
pub fn transitivity_mover(
    group: &GeneratedGroup,
    atlas: &FixedPairAtlas,
    cantor: Option<&CantorFrame>,
    w1: &ProductOpen,
    w2: &ProductOpen,
    max_len: usize,
) -> Result<MoverReport> {
    if w1.f1.meets(&w2.f1) && w1.f2.meets(&w2.f2) {
        return Ok(MoverReport {
            word: GroupWord::identity(),
            text: "e".into(),
            via: "overlap".into(),
        });
    }

    let gens = group.exact_generators()?;
    let meets_both = |iso: &ExactIso| -> Result<bool> {
        Ok(pieces_meet(&w1.f1.apply(iso)?, &w2.f1)
            && pieces_meet(&w1.f2.apply(iso)?, &w2.f2))
    };

    // Recipe: u^-k parks w1.f2 deep inside w2.f2 near the repelling point
    // of u; then a power of w (attracting inside w2.f1, repelling inside the
    // parked set, so that its positive powers barely move it) pulls the
    // other factor across w2.f1.
    let u_cands: Vec<&AtlasPair> = atlas
        .pairs
        .iter()
        .filter(|p| {
            pair_in_ball(p, &w1.f1, &w2.f2).unwrap_or(false)
        })
        .take(8)
        .collect();
    for u in u_cands {
        let eu = exact_word(&gens, &u.word)?;
        for k in 1..=8i64 {
            let euk_inv = eu.pow(-k)?;
            let parked = w1.f2.apply(&euk_inv)?;
            if !pieces_in_ball(&parked, &w2.f2) {
                continue;
            }
            let w_cands: Vec<&AtlasPair> = atlas
                .pairs
                .iter()
                .filter(|p| {
                    let att = ExactBoundaryPt::from_boundary(&p.attracting);
                    let rep = ExactBoundaryPt::from_boundary(&p.repelling);
                    match (att, rep) {
                        (Ok(a), Ok(r)) => {
                            w2.f1.contains(&a) && parked.iter().any(|piece| piece.contains(&r))
                        }
                        _ => false,
                    }
                })
                .take(8)
                .collect();
            for wp in w_cands {
                let ew = exact_word(&gens, &wp.word)?;
                for l in 1..=8i64 {
                    let cand = ew.pow(l)?.mul(&euk_inv);
                    if meets_both(&cand)? {
                        let word = wp.word.pow(l).mul(&u.word.pow(-k));
                        return Ok(MoverReport {
                            text: group.word_text(&word),
                            word,
                            via: format!(
                                "recipe: u={}, k={k}, w={}, l={l}",
                                u.text, wp.text
                            ),
                        });
                    }
                }
            }
        }
    }

    // Prefix surgery: with level-set addresses s inside a source factor and
    // t inside the opposite target factor, the word t·pad·s^-1 cancels the
    // whole address below s — ends under s spray across every branch off t,
    // reaching the first target factor — while the other source factor
    // lands at the fixed offset s^-1·(its address), prefixed by t and hence
    // inside the second. Short pads repair junction cancellations; each
    // candidate is checked exactly, so a bad junction only costs a try.
    if let Some(frame) = cantor {
        let s1 = frame.address_inside(&w1.f1)?;
        let s2 = frame.address_inside(&w1.f2)?;
        let t1 = frame.address_inside(&w2.f1)?;
        let t2 = frame.address_inside(&w2.f2)?;
        let mut pads = vec![GroupWord::identity()];
        for &a in &CANTOR_ALPHABET {
            pads.push(GroupWord::from_letters(&[a])?);
            for &b in &CANTOR_ALPHABET {
                if b != -a {
                    pads.push(GroupWord::from_letters(&[a, b])?);
                }
            }
        }
        let variants = [(&t2, &s1), (&t1, &s2)];
        for (t, s) in variants {
            let (Some(t), Some(s)) = (t, s) else { continue };
            for pad in &pads {
                let word = t.mul(pad).mul(&s.inverse());
                if word.is_empty() {
                    continue;
                }
                if meets_both(&exact_word(&gens, &word)?)? {
                    return Ok(MoverReport {
                        text: group.word_text(&word),
                        word,
                        via: "surgery".into(),
                    });
                }
            }
        }
    }

    for w in group.words_up_to(max_len) {
        if w.is_empty() {
            continue;
        }
        if meets_both(&exact_word(&gens, &w)?)? {
            return Ok(MoverReport {
                text: group.word_text(&w),
                word: w,
                via: "search".into(),
            });
        }
    }
    Err(Cat0Error::Inconclusive(format!(
        "no word of length at most {max_len} moves {} across {}",
        w1.describe(),
        w2.describe()
    )))
}

fn pair_in_ball(p: &AtlasPair, att_ball: &BoundaryBall, rep_ball: &BoundaryBall) -> Result<bool> {
    let a = ExactBoundaryPt::from_boundary(&p.attracting)?;
    let r = ExactBoundaryPt::from_boundary(&p.repelling)?;
    Ok(att_ball.contains(&a) && rep_ball.contains(&r))
}

// ---------------------------------------------------------------------------
// Dense orbits
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct OrbitVisit {
    pub index: usize,
    pub word: GroupWord,
    pub text: String,
    /// Exact verification that the word maps the constructed pair into
    /// target `index`.
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct DenseOrbitReport {
    /// The constructed pair of boundary points.
    pub pair: (BoundaryPoint, BoundaryPoint),
    pub visits: Vec<OrbitVisit>,
    /// Index of the first target no mover could reach, if any.
    pub failed_at: Option<usize>,
    pub pass: bool,
}

/// Builds one pair of boundary points whose orbit visits every target in
/// `targets`: starting from the first target, each stage pulls the next
/// target back through a mover, intersects factorwise, and shrinks, so the
/// final interior pair is carried into every target by its mover. Every
/// visit is re-verified exactly. A mover failure returns the partial result
/// with the failing index recorded.
pub fn dense_orbit_construct(
    group: &GeneratedGroup,
    atlas: &FixedPairAtlas,
    cantor: Option<&CantorFrame>,
    targets: &[ProductOpen],
    max_len: usize,
) -> Result<DenseOrbitReport> {
    if targets.is_empty() {
        return Err(Cat0Error::Precondition("need at least one target".into()));
    }
    for (i, t) in targets.iter().enumerate() {
        if !t.f1.closed_disjoint(&t.f2) {
            return Err(Cat0Error::Precondition(format!(
                "target {i} has overlapping factors; pairs of distinct boundary \
                 points need disjoint factor sets"
            )));
        }
    }

    let gens = group.exact_generators()?;
    let mut v = targets[0].clone();
    let mut visit_words = vec![GroupWord::identity()];
    let mut failed_at = None;
    for (i, target) in targets.iter().enumerate().skip(1) {
        let mover = match transitivity_mover(group, atlas, cantor, &v, target, max_len) {
            Ok(m) => m,
            Err(Cat0Error::Inconclusive(_)) => {
                failed_at = Some(i);
                break;
            }
            Err(e) => return Err(e),
        };
        let inv = exact_word(&gens, &mover.word)?.inverse()?;
        let mut new_factors = Vec::with_capacity(2);
        for (vf, tf) in [(&v.f1, &target.f1), (&v.f2, &target.f2)] {
            let mut found = None;
            for piece in tf.apply(&inv)? {
                if let Some(c) = vf.intersection(&piece).into_iter().next() {
                    found = Some(c);
                    break;
                }
            }
            let Some(c) = found else {
                return Err(Cat0Error::Inconclusive(format!(
                    "mover for target {i} was verified but the pullback misses \
                     the running window; this should not happen"
                )));
            };
            new_factors.push(c.shrink()?);
        }
        v = ProductOpen::new(new_factors.remove(0), new_factors.remove(0));
        visit_words.push(mover.word);
    }

    let z1 = v.f1.interior_point()?;
    let z2 = v.f2.interior_point()?;
    let mut visits = Vec::with_capacity(visit_words.len());
    for (i, w) in visit_words.iter().enumerate() {
        let iso = exact_word(&gens, w)?;
        let verified = targets[i].f1.contains(&iso.apply_point(&z1))
            && targets[i].f2.contains(&iso.apply_point(&z2));
        visits.push(OrbitVisit {
            index: i,
            word: w.clone(),
            text: group.word_text(w),
            verified,
        });
    }
    let pass = failed_at.is_none() && visits.iter().all(|v| v.verified);
    Ok(DenseOrbitReport {
        pair: (z1.to_boundary(), z2.to_boundary()),
        visits,
        failed_at,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Non-conjugate families
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub tuple: (i64, i64, i64, i64),
    pub text: String,
    /// Exact axiality of the word.
    pub axial: bool,
    /// Ball certificates: attracting/repelling points of the word and of
    /// its three comparison conjugates land in the prescribed balls.
    pub memberships: [bool; 4],
    /// Exact conjugacy invariant, rendered as text (trace^2/det for the
    /// circle, the canonical cyclic word for the tree).
    pub invariant: String,
    pub tau: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    /// Strong-inclusion power shared by both generators.
    pub power: i64,
    pub rows: Vec<FamilyRow>,
    pub invariants_distinct: bool,
    pub distinct_from_inputs: bool,
    pub g_invariant: String,
    pub h_invariant: String,
    pub pass: bool,
}

enum ConjInvariant {
    Rational(BigRational),
    Cyclic(Word),
}

impl ConjInvariant {
    fn of(e: &ExactIso) -> Result<ConjInvariant> {
        match e {
            ExactIso::Mat(m) => Ok(ConjInvariant::Rational(m.trace_invariant()?)),
            ExactIso::TreeWord(w) => Ok(ConjInvariant::Cyclic(cyclic_canonical(w))),
        }
    }

    fn same(&self, other: &ConjInvariant) -> bool {
        match (self, other) {
            (ConjInvariant::Rational(a), ConjInvariant::Rational(b)) => a == b,
            (ConjInvariant::Cyclic(a), ConjInvariant::Cyclic(b)) => a == b,
            _ => false,
        }
    }

    fn text(&self) -> String {
        match self {
            ConjInvariant::Rational(r) => format!("tr^2/det = {r}"),
            ConjInvariant::Cyclic(w) => format!("cyclic {w}"),
        }
    }
}

/// Lexicographically smallest rotation of the cyclically reduced core; two
/// tree words are conjugate exactly when these agree.
fn cyclic_canonical(w: &Word) -> Word {
    let (_, core) = w.cyclic_reduce();
    let letters = core.letters();
    if letters.is_empty() {
        return core;
    }
    let mut best: Option<Vec<u8>> = None;
    for i in 0..letters.len() {
        let rot: Vec<u8> = letters[i..].iter().chain(&letters[..i]).copied().collect();
        if best.as_ref().map_or(true, |b| rot < *b) {
            best = Some(rot);
        }
    }
    Word::from_letters(best.expect("nonempty"))
}

fn axial_and_tau(e: &ExactIso) -> (bool, f64) {
    match e {
        ExactIso::Mat(m) => {
            let nt = m.normalized_trace();
            (
                m.is_axial_trace(),
                if nt > 2.0 { 2.0 * (nt / 2.0).acosh() } else { 0.0 },
            )
        }
        ExactIso::TreeWord(w) => {
            let (_, core) = w.cyclic_reduce();
            (!core.is_empty(), core.len() as f64)
        }
    }
}

/// Certifies that an axial map's attracting point lies in `att` and its
/// repelling point in `rep`, without computing the (often irrational) fixed
/// points: `f` maps the closure of `att` strictly inside itself, so its
/// non-repelling fixed point sits there, and symmetrically for `f^-1`.
fn fixed_points_in(f: &ExactIso, att: &BoundaryBall, rep: &BoundaryBall) -> Result<bool> {
    Ok(pieces_in_ball(&att.apply(f)?, att) && pieces_in_ball(&rep.apply(&f.inverse()?)?, rep))
}

/// Builds the family `f(n,m,k,l) = G^n H^m G^k H^-l` over the given tuples
/// (all entries at least 3), where `G = g^p`, `H = h^p` and `p` is the
/// smallest power for which each generator maps every closed fixed-point
/// ball except its repelling one strictly inside its attracting ball (and
/// symmetrically for inverses). Each row carries exact ball certificates
/// locating the fixed points of the word and of three of its conjugates,
/// plus an exact conjugacy invariant; the family passes when all rows pass
/// and the invariants are pairwise distinct and differ from the inputs'.
pub fn nonconjugate_family(
    g: &Isometry,
    h: &Isometry,
    tuples: &[(i64, i64, i64, i64)],
    tol: &Tolerances,
) -> Result<FamilyReport> {
    for t in tuples {
        if t.0 < 3 || t.1 < 3 || t.2 < 3 || t.3 < 3 {
            return Err(Cat0Error::Precondition(format!(
                "family exponents must all be at least 3, got {t:?}"
            )));
        }
    }
    let frame = fixed_point_frame(g, h, tol)?;
    let eg = exact_of(g)?;
    let eh = exact_of(h)?;
    let balls = &frame.balls;

    let strong = |p: i64| -> Result<bool> {
        let checks = [
            (eg.pow(p)?, [0usize, 2, 3], 0usize),
            (eg.pow(-p)?, [1, 2, 3], 1),
            (eh.pow(p)?, [0, 1, 2], 2),
            (eh.pow(-p)?, [0, 1, 3], 3),
        ];
        for (e, srcs, tgt) in checks {
            for s in srcs {
                if !pieces_in_ball(&balls[s].apply(&e)?, &balls[tgt]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let cap = K_MAX as i64;
    let mut power = None;
    for p in 1..=cap {
        if strong(p)? {
            power = Some(p);
            break;
        }
    }
    let Some(p) = power else {
        return Err(Cat0Error::Inconclusive(format!(
            "no power up to {cap} gives the strong ball inclusions"
        )));
    };

    let gg = eg.pow(p)?;
    let hh = eh.pow(p)?;
    let mut rows = Vec::with_capacity(tuples.len());
    let mut invariants = Vec::with_capacity(tuples.len());
    for &(n, m, k, l) in tuples {
        let f = gg.pow(n)?.mul(&hh.pow(m)?).mul(&gg.pow(k)?).mul(&hh.pow(-l)?);
        let f1 = gg.pow(-1)?.mul(&f).mul(&gg);
        let f2 = hh
            .inverse()?
            .mul(&gg.pow(-n)?)
            .mul(&f)
            .mul(&gg.pow(n)?)
            .mul(&hh);
        let f3 = hh.inverse()?.mul(&f).mul(&hh);
        let memberships = [
            fixed_points_in(&f, &balls[0], &balls[2])?,
            fixed_points_in(&f1, &balls[0], &balls[1])?,
            fixed_points_in(&f2, &balls[2], &balls[3])?,
            fixed_points_in(&f3, &balls[3], &balls[2])?,
        ];
        let (axial, tau) = axial_and_tau(&f);
        let invariant = ConjInvariant::of(&f)?;
        let pass = axial && memberships.iter().all(|&b| b);
        rows.push(FamilyRow {
            tuple: (n, m, k, l),
            text: format!("G^{n}H^{m}G^{k}H^-{l} (G=g^{p}, H=h^{p})"),
            axial,
            memberships,
            invariant: invariant.text(),
            tau,
            pass,
        });
        invariants.push(invariant);
    }

    let mut invariants_distinct = true;
    for i in 0..invariants.len() {
        for j in (i + 1)..invariants.len() {
            if invariants[i].same(&invariants[j]) {
                invariants_distinct = false;
            }
        }
    }
    let gi = ConjInvariant::of(&eg)?;
    let hi = ConjInvariant::of(&eh)?;
    let distinct_from_inputs = invariants
        .iter()
        .all(|v| !v.same(&gi) && !v.same(&hi));
    let pass = invariants_distinct
        && distinct_from_inputs
        && rows.iter().all(|r| r.pass);
    Ok(FamilyReport {
        power: p,
        rows,
        invariants_distinct,
        distinct_from_inputs,
        g_invariant: gi.text(),
        h_invariant: hi.text(),
        pass,
    })
}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid::EuclIso;
    use crate::h2::{mobius_conjugate, H2Boundary, Mobius};
    use crate::tree::Word;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    /// z -> 4z together with its conjugate by the boundary swap fixing
    /// {1, -1}; the four fixed points are infinity, 0, 1, -1.
    fn scaling_pair() -> (Isometry, Isometry) {
        let g = Mobius::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let h = mobius_conjugate(&[1.0, 1.0, 1.0, -1.0], &g).unwrap();
        (Isometry::H2(g), Isometry::H2(h))
    }

    fn scaling_group() -> GeneratedGroup {
        let (g, h) = scaling_pair();
        GeneratedGroup::new(vec![("g".into(), g), ("h".into(), h)]).unwrap()
    }

    fn tree_pair() -> (Isometry, Isometry) {
        (
            Isometry::Tree(Word::parse("a").unwrap()),
            Isometry::Tree(Word::parse("b").unwrap()),
        )
    }

    fn tree_group() -> GeneratedGroup {
        let (a, b) = tree_pair();
        GeneratedGroup::new(vec![("a".into(), a), ("b".into(), b)]).unwrap()
    }

    #[test]
    fn group_words_reduce_and_display() {
        let names = vec!["G".to_string(), "H".to_string()];
        let w = GroupWord::from_letters(&[1, 1, 2, -1]).unwrap();
        assert_eq!(w.display(&names), "G^2HG^-1");
        assert_eq!(GroupWord::identity().display(&names), "e");
        let u = GroupWord::from_letters(&[1, 2]).unwrap();
        assert!(u.mul(&u.inverse()).is_empty());
        assert_eq!(u.pow(-2).letters(), &[-2, -1, -2, -1]);
        assert!(GroupWord::from_letters(&[1, 0]).is_err());
    }

    #[test]
    fn word_enumeration_is_length_lex() {
        let words = scaling_group().words_up_to(3);
        assert_eq!(words.len(), 53); // 1 + 4 + 12 + 36 reduced words
        let first: Vec<Vec<i32>> = words.iter().take(6).map(|w| w.letters().to_vec()).collect();
        assert_eq!(
            first,
            vec![vec![], vec![1], vec![-1], vec![2], vec![-2], vec![1, 1]]
        );
    }

    #[test]
    fn frame_of_the_scaling_pair() {
        let (g, h) = scaling_pair();
        let frame = fixed_point_frame(&g, &h, &tols()).unwrap();
        assert!(matches!(
            frame.centers[0],
            BoundaryPoint::H2(H2Boundary::Infinity)
        ));
        for (i, want) in [(1usize, 0.0f64), (2, 1.0), (3, -1.0)] {
            match frame.centers[i] {
                BoundaryPoint::H2(H2Boundary::Real(x)) => assert_eq!(x, want),
                ref other => panic!("center {i} should be real, got {other:?}"),
            }
        }
        // Minimal pairwise separation is vis(0, 1) = 1/sqrt(2); a quarter of
        // it, frozen.
        assert_eq!(frame.radius, Some(0.17677669529663687));
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(frame.balls[i].closed_disjoint(&frame.balls[j]));
            }
        }
    }

    #[test]
    fn scaling_pair_ping_pong_needs_square() {
        let (g, h) = scaling_pair();
        let cert = ping_pong_construct(&g, &h, 3, 2, &tols()).unwrap();
        assert_eq!((cert.k, cert.ell), (2, 2));
        assert_eq!(cert.words.len(), 16); // reduced words of length 1 and 2
        assert!(cert.all_axial && cert.all_rank_one);
        assert!((cert.min_translation - 16f64.ln()).abs() < 1e-9);
        assert!(cert.pass(&tols()));
    }

    #[test]
    fn tree_pair_ping_pong_depth_one() {
        let (a, b) = tree_pair();
        let cert = ping_pong_construct(&a, &b, 2, 3, &tols()).unwrap();
        assert_eq!((cert.k, cert.ell), (1, 1));
        assert_eq!(cert.frame.depth, Some(1));
        assert_eq!(cert.words.len(), 52); // 4 + 12 + 36
        assert!((cert.min_translation - 1.0).abs() < 1e-12);
        assert!(cert.pass(&tols()));
    }

    #[test]
    fn embedding_level_sets_shrink_and_separate() {
        let (a, b) = tree_pair();
        let cert = ping_pong_construct(&a, &b, 1, 1, &tols()).unwrap();
        let emb = boundary_embedding_check(&cert, 3).unwrap();
        assert!(emb.pass && emb.disjoint && emb.strictly_shrinking);
        assert_eq!(emb.leaf_words, 36);
        assert_eq!(emb.level_diameters, vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn tree_limit_sample_hits_all_deep_words() {
        let sample =
            limit_set_sample(&tree_group(), &basepoint(Space::Tree), 6, &tols()).unwrap();
        assert_eq!(sample.threshold, 6.0);
        assert_eq!(sample.points.len(), 972); // 4 * 3^5 reduced words of length 6
        assert!(sample.diagnostic.is_none());
    }

    #[test]
    fn cyclic_group_limit_set_is_two_points() {
        let g = Isometry::H2(Mobius::new(2.0, 0.0, 0.0, 0.5).unwrap());
        let group = GeneratedGroup::new(vec![("g".into(), g)]).unwrap();
        let sample = limit_set_sample(&group, &basepoint(Space::H2), 6, &tols()).unwrap();
        assert_eq!(sample.points.len(), 2);
        let rep = is_nonelementary(&group, 6, &tols()).unwrap();
        assert!(!rep.nonelementary);
    }

    #[test]
    fn common_fixed_point_blocks_nonelementarity() {
        let g = Isometry::H2(Mobius::new(2.0, 0.0, 0.0, 0.5).unwrap());
        let p = Isometry::H2(Mobius::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let group = GeneratedGroup::new(vec![("g".into(), g), ("p".into(), p)]).unwrap();
        // The whole group fixes infinity; the far orbit never spreads into
        // three directions, so the certificate correctly refuses to call
        // this nonelementary.
        let rep = is_nonelementary(&group, 6, &tols()).unwrap();
        assert!(!rep.nonelementary);
        assert!(!rep.reason.is_empty());
    }

    #[test]
    fn ping_pong_pairs_are_nonelementary() {
        assert!(is_nonelementary(&scaling_group(), 5, &tols()).unwrap().nonelementary);
        assert!(is_nonelementary(&tree_group(), 5, &tols()).unwrap().nonelementary);
    }

    #[test]
    fn euclidean_translations_are_elementary() {
        let s = Isometry::Euclid(EuclIso::translation(vec![1.0, 0.0]));
        let t = Isometry::Euclid(EuclIso::translation(vec![0.0, 1.0]));
        let group = GeneratedGroup::new(vec![("s".into(), s), ("t".into(), t)]).unwrap();
        let rep = is_nonelementary(&group, 6, &tols()).unwrap();
        assert!(!rep.nonelementary);
        // Translations act trivially at infinity, so a candidate direction
        // survives unmoved.
        assert!(rep.candidates.iter().any(|c| c.moved_by.is_none()));
    }

    #[test]
    fn ping_pong_rejects_flat_and_elliptic_inputs() {
        let s = Isometry::Euclid(EuclIso::translation(vec![1.0, 0.0]));
        let t = Isometry::Euclid(EuclIso::translation(vec![0.0, 1.0]));
        assert!(matches!(
            ping_pong_construct(&s, &t, 1, 1, &tols()),
            Err(Cat0Error::Precondition(_))
        ));
        let (g, _) = scaling_pair();
        let rot = Isometry::H2(Mobius::rotation_at_i(0.7));
        assert!(matches!(
            ping_pong_construct(&g, &rot, 1, 1, &tols()),
            Err(Cat0Error::Precondition(_))
        ));
    }

    #[test]
    fn pair_move_finds_shortest_witness() {
        let group = scaling_group();
        let inf = BoundaryPoint::H2(H2Boundary::Infinity);
        let zero = BoundaryPoint::H2(H2Boundary::Real(0.0));
        let target = BoundaryBall::Arc(Arc::around(&H2Boundary::Real(1.0), 0.2).unwrap());
        let mv = move_pair_into(&group, (&inf, &zero), &target, 3).unwrap();
        assert_eq!(mv.text, "h^2");
        let (a, b) = mv.images;
        match a {
            BoundaryPoint::H2(H2Boundary::Real(x)) => assert!((x - 17.0 / 15.0).abs() < 1e-15),
            other => panic!("unexpected image {other:?}"),
        }
        match b {
            BoundaryPoint::H2(H2Boundary::Real(x)) => assert!((x - 15.0 / 17.0).abs() < 1e-15),
            other => panic!("unexpected image {other:?}"),
        }
    }

    fn certified_group(cert: &PingPongCertificate, names: [&str; 2]) -> GeneratedGroup {
        GeneratedGroup::new(vec![
            (names[0].to_string(), cert.gen_g.clone()),
            (names[1].to_string(), cert.gen_h.clone()),
        ])
        .unwrap()
    }

    #[test]
    fn mover_crosses_between_frame_corners() {
        let (g, h) = scaling_pair();
        let cert = ping_pong_construct(&g, &h, 1, 1, &tols()).unwrap();
        let group = certified_group(&cert, ["G", "H"]);
        let atlas = fixed_pair_atlas(&group, 4, &[], &tols()).unwrap();
        let frame = cert.cantor_frame();
        let w1 = ProductOpen::new(cert.frame.balls[0].clone(), cert.frame.balls[1].clone());
        let w2 = ProductOpen::new(cert.frame.balls[2].clone(), cert.frame.balls[3].clone());
        let stay = transitivity_mover(&group, &atlas, Some(&frame), &w1, &w1, 3).unwrap();
        assert_eq!(stay.via, "overlap");
        let mv = transitivity_mover(&group, &atlas, Some(&frame), &w1, &w2, 3).unwrap();
        // Independent exact re-check of the returned word.
        let gens = group.exact_generators().unwrap();
        let iso = exact_word(&gens, &mv.word).unwrap();
        assert!(pieces_meet(&w1.f1.apply(&iso).unwrap(), &w2.f1));
        assert!(pieces_meet(&w1.f2.apply(&iso).unwrap(), &w2.f2));
        // The two-step recipe resolves ball-sized windows: u = GH parks the
        // second factor, w = HG^2H pulls the first across, and the product
        // reduces to HG.
        assert!(mv.via.starts_with("recipe"), "via: {}", mv.via);
        assert_eq!(mv.text, "HG");
    }

    #[test]
    fn mover_surgery_reaches_deep_windows() {
        let (g, h) = scaling_pair();
        let cert = ping_pong_construct(&g, &h, 1, 1, &tols()).unwrap();
        let group = certified_group(&cert, ["G", "H"]);
        let atlas = fixed_pair_atlas(&group, 4, &[], &tols()).unwrap();
        let frame = cert.cantor_frame();
        let gens = group.exact_generators().unwrap();
        // Windows several levels deep, far below the atlas resolution.
        let m1 = exact_word(&gens, &GroupWord::from_letters(&[1, 1, 2]).unwrap()).unwrap();
        let m2 = exact_word(&gens, &GroupWord::from_letters(&[-1, -2]).unwrap()).unwrap();
        let v1 = cert.frame.balls[0].apply(&m1).unwrap().remove(0);
        let v2 = cert.frame.balls[1].apply(&m2).unwrap().remove(0);
        let w1 = ProductOpen::new(v1, v2);
        let w2 = ProductOpen::new(cert.frame.balls[2].clone(), cert.frame.balls[3].clone());
        let mv = transitivity_mover(&group, &atlas, Some(&frame), &w1, &w2, 2).unwrap();
        assert_eq!(mv.via, "surgery");
        let iso = exact_word(&gens, &mv.word).unwrap();
        assert!(pieces_meet(&w1.f1.apply(&iso).unwrap(), &w2.f1));
        assert!(pieces_meet(&w1.f2.apply(&iso).unwrap(), &w2.f2));
    }

    #[test]
    fn dense_orbit_visits_both_targets() {
        let (g, h) = scaling_pair();
        let cert = ping_pong_construct(&g, &h, 1, 1, &tols()).unwrap();
        let group = certified_group(&cert, ["G", "H"]);
        let atlas = fixed_pair_atlas(&group, 4, &[], &tols()).unwrap();
        let frame = cert.cantor_frame();
        let b = &cert.frame.balls;
        let targets = vec![
            ProductOpen::new(b[0].clone(), b[1].clone()),
            ProductOpen::new(b[2].clone(), b[3].clone()),
        ];
        let rep = dense_orbit_construct(&group, &atlas, Some(&frame), &targets, 3).unwrap();
        assert!(rep.failed_at.is_none());
        assert_eq!(rep.visits.len(), 2);
        assert!(rep.pass);
    }

    #[test]
    fn tree_dense_orbit_visits_three_targets() {
        let (a, b) = tree_pair();
        let cert = ping_pong_construct(&a, &b, 1, 1, &tols()).unwrap();
        let group = certified_group(&cert, ["A", "B"]);
        let atlas = fixed_pair_atlas(&group, 3, &[], &tols()).unwrap();
        let frame = cert.cantor_frame();
        let bl = &cert.frame.balls;
        let targets = vec![
            ProductOpen::new(bl[0].clone(), bl[2].clone()),
            ProductOpen::new(bl[1].clone(), bl[3].clone()),
            ProductOpen::new(bl[2].clone(), bl[0].clone()),
        ];
        let rep = dense_orbit_construct(&group, &atlas, Some(&frame), &targets, 3).unwrap();
        assert!(rep.pass, "failed at {:?}", rep.failed_at);
        assert_eq!(rep.visits.len(), 3);
    }

    #[test]
    fn scaling_family_rows_are_pairwise_nonconjugate() {
        let (g, h) = scaling_pair();
        let rep =
            nonconjugate_family(&g, &h, &[(3, 3, 3, 3), (3, 3, 3, 4), (4, 3, 3, 3)], &tols())
                .unwrap();
        assert_eq!(rep.power, 2);
        assert!(rep.invariants_distinct && rep.distinct_from_inputs);
        assert!(rep.rows.iter().all(|r| r.pass && r.axial));
        assert!(rep.pass);
    }

    #[test]
    fn tree_family_invariant_is_the_cyclic_word() {
        let (a, b) = tree_pair();
        let rep = nonconjugate_family(&a, &b, &[(3, 3, 3, 3)], &tols()).unwrap();
        assert_eq!(rep.power, 1);
        let row = &rep.rows[0];
        assert!(row.pass);
        assert!((row.tau - 12.0).abs() < 1e-12);
        assert_eq!(row.invariant, "cyclic a^3b^3a^3b^-3");
        assert!(rep.pass);
    }

    #[test]
    fn family_rejects_small_exponents() {
        let (g, h) = scaling_pair();
        assert!(matches!(
            nonconjugate_family(&g, &h, &[(2, 3, 3, 3)], &tols()),
            Err(Cat0Error::Precondition(_))
        ));
    }

    #[test]
    fn atlas_covering_radius_shrinks_with_length() {
        let group = scaling_group();
        let sample = limit_set_sample(&group, &basepoint(Space::H2), 5, &tols()).unwrap();
        let refs = reference_pairs(&sample, 8, &tols()).unwrap();
        assert!(!refs.is_empty());
        let small = fixed_pair_atlas(&group, 2, &refs, &tols()).unwrap();
        let large = fixed_pair_atlas(&group, 4, &refs, &tols()).unwrap();
        let (rs, rl) = (small.covering_radius.unwrap(), large.covering_radius.unwrap());
        assert!(rl < rs, "covering radius should drop: {rs} -> {rl}");
        assert!(large.pairs.len() > small.pairs.len());
    }
}
