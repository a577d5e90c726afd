//! Exact arithmetic for boundary certificates.
//!
//! Free-subgroup and word-family certificates must not hinge on floating-point
//! luck: once the neighborhoods are fixed, every inclusion they claim is
//! decided in integer arithmetic. The trick is that an `f64` *is* a rational
//! number, so any quantity that was found numerically (a ball radius, an arc
//! endpoint) can be frozen into a `BigRational` and treated exactly from then
//! on.
//!
//! Two backends cover the models whose boundaries carry exact structure:
//!
//! * the hyperbolic-plane circle, with points of `RP^1` in integer projective
//!   coordinates, Mobius matrices over `BigRational`, and open arcs decided
//!   by an exact cyclic-orientation predicate;
//! * the tree's end space, with cylinders (all ends extending a fixed reduced
//!   prefix) under exact word arithmetic.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Cat0Error, Result};
use crate::h2::{H2Boundary, Mobius};
use crate::tree::{inv, Letter, TreeEnd, Word, LETTERS};

// ---------------------------------------------------------------------------
// Rational 2x2 matrices
// ---------------------------------------------------------------------------

/// A 2x2 matrix over the rationals, acting projectively on the circle
/// `RP^1 = R u {inf}`. Entries are exact; a matrix built from a [`Mobius`]
/// freezes that isometry's `f64` entries bit-for-bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or_else(|| {
        Cat0Error::InvalidPoint(format!("{x} is not a finite number"))
    })
}

impl QMat {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> QMat {
        QMat { a, b, c, d }
    }

    pub fn identity() -> QMat {
        QMat::new(
            BigRational::one(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::one(),
        )
    }

    /// Freezes the entries of a Mobius isometry. Exact: no rounding happens,
    /// the rational equals the double.
    pub fn from_mobius(m: &Mobius) -> Result<QMat> {
        Ok(QMat::new(
            rational(m.a)?,
            rational(m.b)?,
            rational(m.c)?,
            rational(m.d)?,
        ))
    }

    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.d
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        QMat::new(
            &self.a * &other.a + &self.b * &other.c,
            &self.a * &other.b + &self.b * &other.d,
            &self.c * &other.a + &self.d * &other.c,
            &self.c * &other.b + &self.d * &other.d,
        )
    }

    pub fn inverse(&self) -> Result<QMat> {
        let det = self.det();
        if det.is_zero() {
            return Err(Cat0Error::Precondition("singular matrix".into()));
        }
        Ok(QMat::new(
            &self.d / &det,
            -&self.b / &det,
            -&self.c / &det,
            &self.a / &det,
        ))
    }

    pub fn pow(&self, n: i64) -> Result<QMat> {
        let mut base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = QMat::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// The conjugacy invariant `trace^2 / det`, exact. Projectively invariant
    /// (scaling the matrix cancels) and constant on conjugacy classes; two
    /// axial matrices with different values are not conjugate.
    pub fn trace_invariant(&self) -> Result<BigRational> {
        let det = self.det();
        if det.is_zero() {
            return Err(Cat0Error::Precondition("singular matrix".into()));
        }
        let t = self.trace();
        Ok(&t * &t / det)
    }

    /// Whether the normalized trace exceeds 2 in absolute value, i.e.
    /// `trace^2 > 4 det` — the exact axiality test for det > 0 classes.
    pub fn is_axial_trace(&self) -> bool {
        let t = self.trace();
        &t * &t > BigRational::from_i64(4).unwrap() * self.det()
    }

    /// Normalized |trace| as a float, for reporting margins.
    pub fn normalized_trace(&self) -> f64 {
        let t = self.trace().to_f64().unwrap_or(f64::NAN).abs();
        let d = self.det().to_f64().unwrap_or(f64::NAN);
        t / d.sqrt()
    }

    /// Projective action on the circle.
    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let n = BigRational::from(p.n.clone());
        let d = BigRational::from(p.d.clone());
        ProjPoint::from_pair(&self.a * &n + &self.b * &d, &self.c * n + &self.d * d)
    }
}

// ---------------------------------------------------------------------------
// Points of RP^1
// ---------------------------------------------------------------------------

/// A point of the circle `RP^1`, in canonical integer projective coordinates:
/// `n/d` with `gcd(n, d) = 1` and `d > 0`, or `inf = (1 : 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    n: BigInt,
    d: BigInt,
}

impl ProjPoint {
    pub fn infinity() -> ProjPoint {
        ProjPoint {
            n: BigInt::one(),
            d: BigInt::zero(),
        }
    }

    pub fn from_pair(num: BigRational, den: BigRational) -> ProjPoint {
        // Clear the inner denominators, then reduce the integer pair.
        let scale = den.denom() * num.denom();
        let n = (num * BigRational::from(scale.clone())).to_integer();
        let d = (den * BigRational::from(scale)).to_integer();
        ProjPoint::canonical(n, d)
    }

    fn canonical(mut n: BigInt, mut d: BigInt) -> ProjPoint {
        if d.is_zero() {
            assert!(!n.is_zero(), "(0 : 0) is not a projective point");
            return ProjPoint::infinity();
        }
        let g = num::integer::gcd(n.clone(), d.clone());
        n /= &g;
        d /= &g;
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        ProjPoint { n, d }
    }

    pub fn from_rational(q: &BigRational) -> ProjPoint {
        ProjPoint::canonical(q.numer().clone(), q.denom().clone())
    }

    /// Freezes an `f64` coordinate exactly.
    pub fn from_f64(x: f64) -> Result<ProjPoint> {
        if x.is_infinite() {
            return Ok(ProjPoint::infinity());
        }
        Ok(ProjPoint::from_rational(&rational(x)?))
    }

    pub fn from_h2(b: &H2Boundary) -> Result<ProjPoint> {
        match b {
            H2Boundary::Infinity => Ok(ProjPoint::infinity()),
            H2Boundary::Real(x) => ProjPoint::from_f64(*x),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.d.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinity() {
            f64::INFINITY
        } else {
            BigRational::new(self.n.clone(), self.d.clone())
                .to_f64()
                .unwrap_or(f64::NAN)
        }
    }

    pub fn to_h2(&self) -> H2Boundary {
        if self.is_infinity() {
            H2Boundary::Infinity
        } else {
            H2Boundary::Real(self.to_f64())
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_infinity() {
            None
        } else {
            Some(BigRational::new(self.n.clone(), self.d.clone()))
        }
    }

    fn pair_det(&self, other: &ProjPoint) -> BigInt {
        &self.n * &other.d - &other.n * &self.d
    }
}

/// Sign of the cyclic orientation of a point triple on `RP^1`: `1` when
/// `(a, b, c)` is counterclockwise for the circle orientation in which the
/// real line is traversed in increasing order (Cayley angle increasing),
/// `-1` clockwise, `0` when two of the points coincide.
pub fn orient(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> i32 {
    // The sign of the product of the three pair determinants; multiplying
    // the signs avoids the BigInt products.
    sign(&a.pair_det(b)) * sign(&b.pair_det(c)) * sign(&c.pair_det(a))
}

fn sign(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Arcs
// ---------------------------------------------------------------------------

/// An open arc of the circle, swept counterclockwise from `lo` to `hi`
/// (endpoints excluded, never the full circle).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    lo: ProjPoint,
    hi: ProjPoint,
}

impl Arc {
    pub fn new(lo: ProjPoint, hi: ProjPoint) -> Result<Arc> {
        if lo == hi {
            return Err(Cat0Error::Precondition(
                "arc endpoints must be distinct".into(),
            ));
        }
        Ok(Arc { lo, hi })
    }

    pub fn lo(&self) -> &ProjPoint {
        &self.lo
    }

    pub fn hi(&self) -> &ProjPoint {
        &self.hi
    }

    /// The visual ball around a boundary point, as an arc: all points at
    /// chordal distance < `radius` from `center`. The ideal endpoints are
    /// irrational; they are evaluated as doubles and frozen, so the arc is an
    /// exactly-known set that agrees with the ideal ball to `f64` accuracy.
    pub fn around(center: &H2Boundary, radius: f64) -> Result<Arc> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Cat0Error::Precondition(format!(
                "visual radius must lie in (0, 1), got {radius}"
            )));
        }
        let theta = center.circle_angle();
        let half = 2.0 * radius.asin();
        let lo = H2Boundary::from_circle_angle(theta - half);
        let hi = H2Boundary::from_circle_angle(theta + half);
        Arc::new(ProjPoint::from_h2(&lo)?, ProjPoint::from_h2(&hi)?)
    }

    /// Exact open membership.
    pub fn contains(&self, p: &ProjPoint) -> bool {
        orient(&self.lo, p, &self.hi) > 0
    }

    /// Exact closed membership.
    pub fn closure_contains(&self, p: &ProjPoint) -> bool {
        *p == self.lo || *p == self.hi || self.contains(p)
    }

    /// Whether the closed arc `other` is contained in this open arc.
    pub fn contains_closure_of(&self, other: &Arc) -> bool {
        self.contains(&other.lo)
            && self.contains(&other.hi)
            && !other.closure_contains(&self.lo)
            && !other.closure_contains(&self.hi)
    }

    /// Whether the closures of the two arcs are disjoint.
    pub fn closed_disjoint(&self, other: &Arc) -> bool {
        !self.closure_contains(&other.lo)
            && !self.closure_contains(&other.hi)
            && !other.closure_contains(&self.lo)
            && !other.closure_contains(&self.hi)
    }

    /// Whether the open arcs intersect.
    pub fn meets(&self, other: &Arc) -> bool {
        self.contains(&other.lo)
            || self.contains(&other.hi)
            || other.contains(&self.lo)
            || other.contains(&self.hi)
            // One arc may contain the other entirely, endpoints included.
            || self == other
    }

    /// Connected components of the open intersection (zero, one or two arcs).
    ///
    /// Every component runs counterclockwise from one arc's `lo` to one arc's
    /// `hi`; a candidate of that shape is a component exactly when no
    /// endpoint of either arc lies in its interior (membership cannot switch
    /// inside it) and one interior point lies in both arcs.
    pub fn intersection(&self, other: &Arc) -> Vec<Arc> {
        if self == other {
            return vec![self.clone()];
        }
        let ends = [&self.lo, &self.hi, &other.lo, &other.hi];
        let mut out: Vec<Arc> = Vec::new();
        for lo in [&self.lo, &other.lo] {
            for hi in [&self.hi, &other.hi] {
                if lo == hi {
                    continue;
                }
                let cand = Arc {
                    lo: (*lo).clone(),
                    hi: (*hi).clone(),
                };
                if ends.iter().any(|e| cand.contains(e)) {
                    continue;
                }
                let mid = cand.interior_point();
                if self.contains(&mid) && other.contains(&mid) && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
        out
    }

    /// An exact interior point: the midpoint for a finite arc, otherwise a
    /// point chosen on the unbounded side. Always satisfies [`Arc::contains`].
    pub fn interior_point(&self) -> ProjPoint {
        let two = BigRational::from_i64(2).unwrap();
        let one = BigRational::one();
        match (self.lo.as_rational(), self.hi.as_rational()) {
            (Some(a), Some(b)) => {
                if a < b {
                    ProjPoint::from_rational(&((a + b) / two))
                } else {
                    // The arc wraps through infinity.
                    ProjPoint::infinity()
                }
            }
            (None, Some(b)) => ProjPoint::from_rational(&(b - one)),
            (Some(a), None) => ProjPoint::from_rational(&(a + one)),
            (None, None) => unreachable!("endpoints are distinct"),
        }
    }

    /// A closed sub-arc sitting strictly inside this open arc, with the same
    /// interior point.
    pub fn shrink(&self) -> Result<Arc> {
        let m = self.interior_point();
        let lo = Arc::new(self.lo.clone(), m.clone())?.interior_point();
        let hi = Arc::new(m, self.hi.clone())?.interior_point();
        let sub = Arc::new(lo, hi)?;
        debug_assert!(self.contains_closure_of(&sub));
        Ok(sub)
    }

    /// Image under a nonsingular rational matrix. Orientation-preserving
    /// matrices (det > 0) map the arc endpoint-to-endpoint; orientation-
    /// reversing ones swap the sweep.
    pub fn apply(&self, m: &QMat) -> Result<Arc> {
        let det = self.apply_det(m)?;
        let lo = m.apply(&self.lo);
        let hi = m.apply(&self.hi);
        if det > 0 {
            Arc::new(lo, hi)
        } else {
            Arc::new(hi, lo)
        }
    }

    fn apply_det(&self, m: &QMat) -> Result<i32> {
        let det = m.det();
        if det.is_zero() {
            return Err(Cat0Error::Precondition("singular matrix".into()));
        }
        Ok(if det.is_positive() { 1 } else { -1 })
    }

    /// Angular width in radians, from the frozen endpoints.
    pub fn angular_width(&self) -> f64 {
        let a = self.lo.to_h2().circle_angle();
        let b = self.hi.to_h2().circle_angle();
        let w = b - a;
        w.rem_euclid(std::f64::consts::TAU)
    }

    /// Diameter in the chordal metric.
    pub fn visual_diameter(&self) -> f64 {
        let w = self.angular_width();
        if w >= std::f64::consts::PI {
            1.0
        } else {
            (0.5 * w).sin()
        }
    }
}

// ---------------------------------------------------------------------------
// Tree cylinders
// ---------------------------------------------------------------------------

/// A cylinder of tree ends: every end extending the (non-empty, reduced)
/// `prefix`. Cylinders are clopen, so closure operations are trivial here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    prefix: Word,
}

impl Cylinder {
    pub fn new(prefix: Word) -> Result<Cylinder> {
        if prefix.is_empty() {
            return Err(Cat0Error::Precondition(
                "a cylinder needs a non-empty prefix".into(),
            ));
        }
        Ok(Cylinder { prefix })
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn contains_end(&self, e: &TreeEnd) -> bool {
        e.word_prefix(self.prefix.len()) == self.prefix
    }

    pub fn subset_of(&self, other: &Cylinder) -> bool {
        self.prefix.len() >= other.prefix.len()
            && self.prefix.prefix(other.prefix.len()) == other.prefix
    }

    pub fn disjoint(&self, other: &Cylinder) -> bool {
        !self.subset_of(other) && !other.subset_of(self)
    }

    pub fn intersection(&self, other: &Cylinder) -> Option<Cylinder> {
        if self.subset_of(other) {
            Some(self.clone())
        } else if other.subset_of(self) {
            Some(other.clone())
        } else {
            None
        }
    }

    /// The three cylinders one letter deeper.
    pub fn children(&self) -> Vec<Cylinder> {
        let last = self.prefix.last().expect("prefix is non-empty");
        LETTERS
            .iter()
            .filter(|&&l| l != inv(last))
            .map(|&l| Cylinder {
                prefix: self.prefix.push(l),
            })
            .collect()
    }

    /// Image under left translation by `w`, as a finite union of cylinders.
    /// When the cancellation in `w * prefix` swallows the whole prefix the
    /// image is not a single cylinder, and the cylinder is split into its
    /// children first.
    pub fn translate(&self, w: &Word) -> Vec<Cylinder> {
        let r = w.mul(&self.prefix);
        let cancelled = (w.len() + self.prefix.len() - r.len()) / 2;
        if cancelled < self.prefix.len() {
            vec![Cylinder { prefix: r }]
        } else {
            self.children()
                .into_iter()
                .flat_map(|c| c.translate(w))
                .collect()
        }
    }

    /// Whether this cylinder is covered by the union of `others`, decided by
    /// prefix logic: either some member's prefix is an ancestor, or all three
    /// children are covered recursively.
    pub fn subset_of_union(&self, others: &[Cylinder]) -> bool {
        if others.iter().any(|o| self.subset_of(o)) {
            return true;
        }
        let horizon = others.iter().map(|o| o.depth()).max().unwrap_or(0);
        if self.depth() >= horizon {
            return false;
        }
        self.children().iter().all(|c| c.subset_of_union(others))
    }

    /// The canonical end inside the cylinder: follow the prefix, then repeat
    /// its last letter.
    pub fn interior_end(&self) -> TreeEnd {
        TreeEnd::from_direction(&self.prefix).expect("prefix is non-empty")
    }

    /// Exact diameter in the end metric `2^-lcp`: two ends in the cylinder
    /// can disagree right after the prefix.
    pub fn visual_diameter(&self) -> f64 {
        (2f64).powi(-(self.prefix.len() as i32))
    }

    /// The letter alphabet, re-exported for enumeration convenience.
    pub fn letters() -> [Letter; 4] {
        LETTERS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64) -> ProjPoint {
        ProjPoint::from_f64(x).unwrap()
    }

    #[test]
    fn orientation_matches_the_real_order() {
        let (a, b, c) = (pt(-1.0), pt(0.5), pt(3.0));
        assert_eq!(orient(&a, &b, &c), 1);
        assert_eq!(orient(&c, &b, &a), -1);
        assert_eq!(orient(&a, &b, &ProjPoint::infinity()), 1);
        assert_eq!(orient(&a, &a, &c), 0);
    }

    #[test]
    fn arc_membership_and_wrapping() {
        // (−1, 3) as a plain interval.
        let plain = Arc::new(pt(-1.0), pt(3.0)).unwrap();
        assert!(plain.contains(&pt(0.0)));
        assert!(!plain.contains(&pt(5.0)));
        assert!(!plain.contains(&ProjPoint::infinity()));
        assert!(!plain.contains(&pt(-1.0)));

        // Swept the other way the arc passes through infinity.
        let wrap = Arc::new(pt(3.0), pt(-1.0)).unwrap();
        assert!(wrap.contains(&ProjPoint::infinity()));
        assert!(wrap.contains(&pt(100.0)));
        assert!(!wrap.contains(&pt(0.0)));
    }

    #[test]
    fn arc_inclusion_and_disjointness() {
        let big = Arc::new(pt(-2.0), pt(4.0)).unwrap();
        let small = Arc::new(pt(0.0), pt(1.0)).unwrap();
        assert!(big.contains_closure_of(&small));
        assert!(!small.contains_closure_of(&big));

        // An arc covering the complement is not inside, even though both of
        // its endpoints are.
        let sneak = Arc::new(pt(0.0), pt(-3.0)).unwrap();
        assert!(big.contains(&sneak.lo));
        assert!(!big.contains_closure_of(&sneak));

        let far = Arc::new(pt(10.0), pt(11.0)).unwrap();
        assert!(big.closed_disjoint(&far));
        assert!(!big.closed_disjoint(&small));
    }

    #[test]
    fn arc_images_follow_the_matrix() {
        // z -> 4z expands (1, 2) to (4, 8).
        let m = QMat::new(
            BigRational::from_i64(4).unwrap(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::one(),
        );
        let a = Arc::new(pt(1.0), pt(2.0)).unwrap();
        let img = a.apply(&m).unwrap();
        assert_eq!(img, Arc::new(pt(4.0), pt(8.0)).unwrap());

        // z -> -z reverses orientation, so the sweep flips.
        let flip = QMat::new(
            -BigRational::one(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::one(),
        );
        let img = a.apply(&flip).unwrap();
        assert_eq!(img, Arc::new(pt(-2.0), pt(-1.0)).unwrap());
    }

    #[test]
    fn interior_points_and_shrinking() {
        let plain = Arc::new(pt(-1.0), pt(3.0)).unwrap();
        assert_eq!(plain.interior_point(), pt(1.0));
        let wrap = Arc::new(pt(3.0), pt(-1.0)).unwrap();
        assert!(wrap.contains(&wrap.interior_point()));
        let half = Arc::new(ProjPoint::infinity(), pt(0.0)).unwrap();
        assert!(half.contains(&half.interior_point()));

        for arc in [plain, wrap, half] {
            let sub = arc.shrink().unwrap();
            assert!(arc.contains_closure_of(&sub));
        }
    }

    #[test]
    fn intersection_components() {
        let a = Arc::new(pt(0.0), pt(4.0)).unwrap();
        let b = Arc::new(pt(2.0), pt(6.0)).unwrap();
        let both = a.intersection(&b);
        assert_eq!(both, vec![Arc::new(pt(2.0), pt(4.0)).unwrap()]);

        // A thin arc against an almost-full one: two components.
        let thin = Arc::new(pt(1.0), pt(5.0)).unwrap();
        let full = Arc::new(pt(2.0), pt(1.5)).unwrap();
        let comps = thin.intersection(&full);
        assert_eq!(comps.len(), 2);
        for c in &comps {
            let m = c.interior_point();
            assert!(thin.contains(&m) && full.contains(&m));
        }

        let apart = Arc::new(pt(10.0), pt(12.0)).unwrap();
        assert!(a.intersection(&apart).is_empty());
    }

    #[test]
    fn visual_balls_are_arcs_around_their_center() {
        let u2 = Arc::around(&H2Boundary::Real(0.0), 0.25).unwrap();
        assert!(u2.contains(&pt(0.0)));
        assert!(u2.contains(&pt(0.2)));
        assert!(!u2.contains(&pt(0.6)));

        let u1 = Arc::around(&H2Boundary::Infinity, 0.25).unwrap();
        assert!(u1.contains(&ProjPoint::infinity()));
        assert!(u1.contains(&pt(100.0)));
        assert!(!u1.contains(&pt(0.0)));

        // Chordal radius 1/4 around 0 means |x|/sqrt(1+x^2) < 1/4 on the
        // line, i.e. |x| < 1/sqrt(15).
        let edge = 1.0 / 15f64.sqrt();
        assert!(u2.contains(&pt(edge * 0.999)));
        assert!(!u2.contains(&pt(edge * 1.001)));
    }

    #[test]
    fn exact_trace_certificates() {
        // z -> 4z, frozen from its normalized Mobius form.
        let g = QMat::from_mobius(&Mobius::new(4.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(g.is_axial_trace());
        assert!((g.normalized_trace() - 2.5).abs() < 1e-12);

        let rot = QMat::from_mobius(&Mobius::rotation_at_i(0.7)).unwrap();
        assert!(!rot.is_axial_trace());

        let id = QMat::identity();
        assert!(!id.is_axial_trace());
        assert_eq!(
            g.trace_invariant().unwrap(),
            BigRational::new(BigInt::from(25), BigInt::from(4))
        );
    }

    #[test]
    fn cylinder_prefix_logic() {
        let w = |s: &str| Word::parse(s).unwrap();
        let ca = Cylinder::new(w("a")).unwrap();
        let caa = Cylinder::new(w("a^2")).unwrap();
        let cb = Cylinder::new(w("b")).unwrap();

        assert!(caa.subset_of(&ca));
        assert!(!ca.subset_of(&caa));
        assert!(ca.disjoint(&cb));
        assert_eq!(caa.intersection(&ca), Some(caa.clone()));
        assert_eq!(ca.intersection(&cb), None);

        assert!(ca.contains_end(&TreeEnd::parse("a^3").unwrap()));
        assert!(!ca.contains_end(&TreeEnd::parse("ba").unwrap()));

        // Children cover the cylinder and nothing less does.
        assert!(ca.subset_of_union(&ca.children()));
        assert!(!ca.subset_of_union(&ca.children()[..2].to_vec()));
    }

    #[test]
    fn cylinder_translation_splits_on_cancellation() {
        let w = |s: &str| Word::parse(s).unwrap();
        let cb = Cylinder::new(w("b")).unwrap();
        // No cancellation: a . cyl(b) = cyl(ab).
        assert_eq!(
            cb.translate(&w("a")),
            vec![Cylinder::new(w("ab")).unwrap()]
        );
        // Full cancellation: b^-1 . cyl(b) is everything except cyl(b^-1)
        // seen from the root — the three children translate to the three
        // cylinders at depth 1 other than cyl(b^-1).
        let img = cb.translate(&w("b^-1"));
        assert_eq!(img.len(), 3);
        for c in &img {
            assert_eq!(c.depth(), 1);
            assert!(c.disjoint(&Cylinder::new(w("b^-1")).unwrap()));
        }
    }
}
