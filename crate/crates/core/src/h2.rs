//! The hyperbolic plane as the upper half-plane, with Mobius machinery.
//!
//! Points are complex numbers with positive imaginary part; orientation
//! preserving isometries are real Mobius transformations of determinant one.
//! Geodesics are kept as *frames*: a Mobius map `M` with the geodesic given
//! by `t -> M(i e^t)`. The frame form is numerically robust where the
//! (center, radius) form of a half-circle is not — nearly vertical geodesics
//! have no stable center — and makes evaluation, reversal and reanchoring
//! closed under composition.
//!
//! Distances use `2 asinh(|z-w| / (2 sqrt(Im z Im w)))`, which is exact in
//! the small-separation regime where `acosh(1 + eps)` loses half its digits.

use crate::error::{Cat0Error, Result};
use num::complex::Complex64;
use std::fmt;

pub type C = Complex64;

/// Hyperbolic distance in the upper half-plane.
pub fn dist(z: C, w: C) -> f64 {
    let num = (z - w).norm();
    let den = 2.0 * (z.im * w.im).sqrt();
    2.0 * (num / den).asinh()
}

/// A boundary point of the upper half-plane: a real number or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum H2Boundary {
    Real(f64),
    Infinity,
}

impl H2Boundary {
    /// Angle of the image on the unit circle under the Cayley transform
    /// z -> (z - i)/(z + i); infinity maps to angle 0.
    pub fn circle_angle(&self) -> f64 {
        match self {
            H2Boundary::Infinity => 0.0,
            H2Boundary::Real(x) => {
                let u = (C::new(*x, -1.0)) / (C::new(*x, 1.0));
                u.arg()
            }
        }
    }

    /// Point on the unit circle under the Cayley transform.
    pub fn circle_point(&self) -> (f64, f64) {
        let a = self.circle_angle();
        (a.cos(), a.sin())
    }

    /// Inverse of [`H2Boundary::circle_angle`]: the boundary point whose
    /// Cayley image sits at angle `phi` on the unit circle.
    pub fn from_circle_angle(phi: f64) -> H2Boundary {
        let s = (0.5 * phi).sin();
        if s.abs() < 1e-15 {
            H2Boundary::Infinity
        } else {
            H2Boundary::Real(-(0.5 * phi).cos() / s)
        }
    }
}

impl fmt::Display for H2Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            H2Boundary::Infinity => write!(f, "inf"),
            H2Boundary::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Chordal (visual) distance between boundary points: half the Euclidean
/// chord between their Cayley images, i.e. |sin((phi1 - phi2)/2)|.
pub fn boundary_chordal(x: &H2Boundary, y: &H2Boundary) -> f64 {
    match (x, y) {
        (H2Boundary::Infinity, H2Boundary::Infinity) => 0.0,
        (H2Boundary::Infinity, H2Boundary::Real(v))
        | (H2Boundary::Real(v), H2Boundary::Infinity) => 1.0 / (1.0 + v * v).sqrt(),
        (H2Boundary::Real(u), H2Boundary::Real(v)) => {
            (u - v).abs() / ((1.0 + u * u).sqrt() * (1.0 + v * v).sqrt())
        }
    }
}

// ---------------------------------------------------------------------------
// Mobius transformations
// ---------------------------------------------------------------------------

/// A real Mobius transformation of the upper half-plane, stored with
/// determinant normalized to one. `Mobius` doubles as a geodesic frame.
#[derive(Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    /// Builds from matrix entries; the determinant must be positive
    /// (orientation preserving) and is scaled away.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Mobius> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Cat0Error::InvalidPoint(format!(
                "mobius determinant {det} must be positive and finite"
            )));
        }
        let s = det.sqrt();
        Ok(Mobius {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Mobius {
        Mobius {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        // Both factors have det 1, so the product does too.
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn apply(&self, z: C) -> C {
        (C::new(self.a, 0.0) * z + self.b) / (C::new(self.c, 0.0) * z + self.d)
    }

    pub fn apply_boundary(&self, x: &H2Boundary) -> H2Boundary {
        match x {
            H2Boundary::Infinity => {
                if self.c.abs() < f64::MIN_POSITIVE {
                    H2Boundary::Infinity
                } else {
                    H2Boundary::Real(self.a / self.c)
                }
            }
            H2Boundary::Real(x) => {
                let den = self.c * x + self.d;
                if den.abs() < f64::MIN_POSITIVE {
                    H2Boundary::Infinity
                } else {
                    H2Boundary::Real((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn is_identity(&self, eps: f64) -> bool {
        // Projectively: allow the sign flip.
        let s = if self.a + self.d >= 0.0 { 1.0 } else { -1.0 };
        (s * self.a - 1.0).abs() < eps
            && (s * self.d - 1.0).abs() < eps
            && (s * self.b).abs() < eps
            && (s * self.c).abs() < eps
    }

    /// Translation moving `i` to the point `z`.
    pub fn translation_to(z: C) -> Result<Mobius> {
        if !(z.im > 0.0) {
            return Err(Cat0Error::InvalidPoint(format!(
                "{z} is not in the upper half-plane"
            )));
        }
        let s = z.im.sqrt();
        Ok(Mobius {
            a: s,
            b: z.re / s,
            c: 0.0,
            d: 1.0 / s,
        })
    }

    /// Rotation about `i` whose tangent action at `i` is rotation by `phi`.
    pub fn rotation_at_i(phi: f64) -> Mobius {
        // The map z -> (cos(h) z + sin(h))/(-sin(h) z + cos(h)) has tangent
        // derivative 1/(cos h - i sin h)^2 = e^{2ih} at i; take h = phi/2.
        let h = phi / 2.0;
        Mobius {
            a: h.cos(),
            b: h.sin(),
            c: -h.sin(),
            d: h.cos(),
        }
    }
}

/// Conjugates `m` by the raw real matrix `c = [p q; r s]` (row major),
/// returning `c m c^-1` as an orientation-preserving map. Unlike a `Mobius`,
/// the conjugator may have negative determinant — e.g. a reflection swapping
/// two boundary points — because conjugation preserves the determinant sign
/// of `m` regardless.
pub fn mobius_conjugate(c: &[f64; 4], m: &Mobius) -> Result<Mobius> {
    let [p, q, r, s] = *c;
    let det = p * s - q * r;
    if det.abs() < f64::MIN_POSITIVE || !det.is_finite() {
        return Err(Cat0Error::InvalidPoint(format!(
            "conjugator determinant {det} must be nonzero and finite"
        )));
    }
    // c * m * adj(c) equals det(c) * (c m c^-1); the scalar drops out of the
    // projective action and the determinant stays positive either way.
    let (ma, mb, mc, md) = (m.a, m.b, m.c, m.d);
    let (t00, t01) = (p * ma + q * mc, p * mb + q * md);
    let (t10, t11) = (r * ma + s * mc, r * mb + s * md);
    Mobius::new(
        t00 * s - t01 * r,
        -t00 * q + t01 * p,
        t10 * s - t11 * r,
        -t10 * q + t11 * p,
    )
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Geodesic frames
// ---------------------------------------------------------------------------

/// Evaluates the frame geodesic `t -> M(i e^t)` without overflow: for large
/// |t| the expression is rearranged so the exponential only ever shrinks.
pub fn frame_eval(m: &Mobius, t: f64) -> C {
    let i = C::new(0.0, 1.0);
    if t >= 0.0 {
        let s = (-t).exp();
        // M(i e^t) = (a i + b s) / (c i + d s)
        (C::new(m.b, 0.0) * s + i * m.a) / (C::new(m.d, 0.0) * s + i * m.c)
    } else {
        let s = t.exp();
        (i * (m.a * s) + m.b) / (i * (m.c * s) + m.d)
    }
}

/// Boundary endpoint of the frame geodesic in the forward (`true`) or
/// backward direction.
pub fn frame_end(m: &Mobius, forward: bool) -> H2Boundary {
    if forward {
        m.apply_boundary(&H2Boundary::Infinity)
    } else {
        m.apply_boundary(&H2Boundary::Real(0.0))
    }
}

/// Frame through `z` whose forward direction makes angle `theta` with the
/// positive real axis (tangent direction e^{i theta} at `z`).
pub fn frame_through(z: C, theta: f64) -> Result<Mobius> {
    let t = Mobius::translation_to(z)?;
    // The vertical frame leaves i with tangent direction pi/2.
    Ok(t.compose(&Mobius::rotation_at_i(theta - std::f64::consts::FRAC_PI_2)))
}

/// Tangent direction at `z` of the geodesic from `z` to `w` (requires
/// distinct points).
pub fn direction_between(z: C, w: C) -> Result<f64> {
    if (z - w).norm() == 0.0 {
        return Err(Cat0Error::Precondition(
            "direction needs distinct points".into(),
        ));
    }
    // Normalize z to i, then read the direction off the disk model.
    let wp = C::new((w.re - z.re) / z.im, w.im / z.im);
    let i = C::new(0.0, 1.0);
    let u = (wp - i) / (wp + i);
    Ok(u.arg() + std::f64::consts::FRAC_PI_2)
}

/// Tangent direction at `z` of the ray towards the boundary point `xi`.
pub fn direction_to_boundary(z: C, xi: &H2Boundary) -> f64 {
    // Normalize z to i; the ray to xi' in the disk leaves the origin
    // straight towards the Cayley image of xi'.
    let u = match xi {
        H2Boundary::Infinity => {
            // (z - i)/(z + i) at infinity is 1... after normalizing z to i,
            // infinity stays infinity, whose Cayley image is 1.
            C::new(1.0, 0.0)
        }
        H2Boundary::Real(x) => {
            let xp = (x - z.re) / z.im;
            (C::new(xp, -1.0)) / (C::new(xp, 1.0))
        }
    };
    u.arg() + std::f64::consts::FRAC_PI_2
}

/// Frame of the geodesic line from boundary point `p` (at -inf) to `q`
/// (at +inf); the points must be distinct.
pub fn frame_between_boundary(p: &H2Boundary, q: &H2Boundary) -> Result<Mobius> {
    match (p, q) {
        (H2Boundary::Infinity, H2Boundary::Infinity) => Err(Cat0Error::Precondition(
            "line endpoints must be distinct".into(),
        )),
        (H2Boundary::Real(p), H2Boundary::Infinity) => Mobius::new(1.0, *p, 0.0, 1.0),
        (H2Boundary::Infinity, H2Boundary::Real(q)) => Mobius::new(*q, -1.0, 1.0, 0.0),
        (H2Boundary::Real(p), H2Boundary::Real(q)) => {
            if p == q {
                return Err(Cat0Error::Precondition(
                    "line endpoints must be distinct".into(),
                ));
            }
            if q > p {
                Mobius::new(*q, *p, 1.0, 1.0)
            } else {
                Mobius::new(*q, -p, 1.0, -1.0)
            }
        }
    }
}

/// Frame shifted so the new parameter 0 sits at old parameter `s`.
pub fn frame_reanchor(m: &Mobius, s: f64) -> Mobius {
    let h = (s / 2.0).exp();
    m.compose(&Mobius {
        a: h,
        b: 0.0,
        c: 0.0,
        d: 1.0 / h,
    })
}

/// Frame of the reversed geodesic: new(t) = old(-t).
pub fn frame_reverse(m: &Mobius) -> Mobius {
    // i e^{-t} = J(i e^t) with J(z) = -1/z.
    m.compose(&Mobius {
        a: 0.0,
        b: -1.0,
        c: 1.0,
        d: 0.0,
    })
}

/// Frame at parameter `t` of `m`, turned by `phi` (so `phi = pi/2` yields
/// the leftward unit normal ray at `m`'s point).
pub fn frame_normal(m: &Mobius, t: f64, phi: f64) -> Mobius {
    let h = (t / 2.0).exp();
    let shift = Mobius {
        a: h,
        b: 0.0,
        c: 0.0,
        d: 1.0 / h,
    };
    m.compose(&shift).compose(&Mobius::rotation_at_i(phi))
}

// ---------------------------------------------------------------------------
// Busemann functions
// ---------------------------------------------------------------------------

/// Closed-form Busemann function: b_xi(y, z) is the limit of
/// d(x, z) - d(x, y) as x runs to `xi`, normalized so it decreases at unit
/// rate along rays towards `xi`.
pub fn busemann(xi: &H2Boundary, y: C, z: C) -> f64 {
    match xi {
        H2Boundary::Infinity => y.im.ln() - z.im.ln(),
        H2Boundary::Real(p) => {
            let ny = (y - p).norm_sqr() / y.im;
            let nz = (z - p).norm_sqr() / z.im;
            nz.ln() - ny.ln()
        }
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// The three isometry types of a CAT(0) space, with per-type data.
#[derive(Clone, Debug, PartialEq)]
pub enum H2Class {
    Identity,
    Elliptic { fixed: C, angle: f64 },
    Parabolic { fixed: H2Boundary },
    Axial {
        tau: f64,
        attracting: H2Boundary,
        repelling: H2Boundary,
    },
}

/// Classifies by the determinant-one trace: |tr| < 2 elliptic, |tr| = 2
/// parabolic (or the identity), |tr| > 2 axial with tau = 2 acosh(|tr|/2).
/// `eps` is the width of the equality band around |tr| = 2.
pub fn classify(m: &Mobius, eps: f64) -> H2Class {
    if m.is_identity(eps) {
        return H2Class::Identity;
    }
    // Normalize the projective sign so the trace is non-negative.
    let (a, b, c, d) = if m.trace() >= 0.0 {
        (m.a, m.b, m.c, m.d)
    } else {
        (-m.a, -m.b, -m.c, -m.d)
    };
    let tr = a + d;
    if (tr - 2.0).abs() < eps {
        let fixed = if c.abs() < f64::MIN_POSITIVE {
            H2Boundary::Infinity
        } else {
            H2Boundary::Real((a - d) / (2.0 * c))
        };
        return H2Class::Parabolic { fixed };
    }
    if tr < 2.0 {
        // Elliptic: interior fixed point, rotation angle from the trace.
        let disc = (4.0 - tr * tr).sqrt();
        let fixed = if c.abs() < f64::MIN_POSITIVE {
            // a z + b = d z with a = 1/d: fixed point of a rotation must
            // still be interior; solve (a - d) z + b = 0.
            let z = -b / (a - d);
            C::new(z, 0.0) // placeholder; c == 0 elliptic is impossible
        } else {
            C::new((a - d) / (2.0 * c), disc / (2.0 * c.abs()))
        };
        // Tangent derivative at the fixed point is e^{-i alpha} with
        // tr = 2 cos(alpha/2); report alpha in (0, 2 pi).
        let angle = 2.0 * (tr / 2.0).acos();
        return H2Class::Elliptic { fixed, angle };
    }
    // Axial.
    let tau = 2.0 * (tr / 2.0).acosh();
    let disc = (tr * tr - 4.0).sqrt();
    let (attracting, repelling) = if c.abs() < f64::MIN_POSITIVE {
        // Fixed points: infinity and b/(d - a).
        let finite = H2Boundary::Real(b / (d - a));
        if a.abs() > d.abs() {
            (H2Boundary::Infinity, finite)
        } else {
            (finite, H2Boundary::Infinity)
        }
    } else {
        (
            H2Boundary::Real((a - d + disc) / (2.0 * c)),
            H2Boundary::Real((a - d - disc) / (2.0 * c)),
        )
    };
    H2Class::Axial {
        tau,
        attracting,
        repelling,
    }
}

/// Center and radius of the Euclidean circle realizing the hyperbolic
/// circle of radius `r` around `z0`.
pub fn circle_euclidean(z0: C, r: f64) -> (C, f64) {
    (
        C::new(z0.re, z0.im * r.cosh()),
        z0.im * r.sinh(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: C = C::new(0.0, 1.0);

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() < eps
    }

    fn close_c(a: C, b: C, eps: f64) -> bool {
        (a - b).norm() < eps
    }

    #[test]
    fn distance_basics() {
        assert!(close(dist(I, C::new(0.0, 2.0)), std::f64::consts::LN_2, 1e-14));
        assert!(close(
            dist(C::new(3.0, 1.0), C::new(3.0, 4.0)),
            4f64.ln(),
            1e-14
        ));
        // Symmetry and triangle inequality on a sample.
        let z = C::new(0.3, 0.7);
        let w = C::new(-1.0, 2.5);
        let u = C::new(4.0, 0.2);
        assert!(close(dist(z, w), dist(w, z), 1e-15));
        assert!(dist(z, u) <= dist(z, w) + dist(w, u) + 1e-12);
    }

    #[test]
    fn frame_eval_is_unit_speed() {
        let m = Mobius::new(2.0, 1.0, 1.0, 1.0).unwrap();
        for (s, t) in [(0.0, 1.0), (-2.0, 0.5), (3.0, 3.25)] {
            let d = dist(frame_eval(&m, s), frame_eval(&m, t));
            assert!(close(d, (s - t).abs(), 1e-10), "s={s} t={t} d={d}");
        }
    }

    #[test]
    fn frame_eval_no_overflow() {
        let m = Mobius::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let z = frame_eval(&m, 1e7);
        assert!(z.re.is_finite());
        let w = frame_eval(&m, -1e7);
        assert!(w.re.is_finite());
    }

    #[test]
    fn frame_through_points() {
        let z = C::new(-0.5, 1.5);
        let w = C::new(2.0, 0.25);
        let theta = direction_between(z, w).unwrap();
        let m = frame_through(z, theta).unwrap();
        assert!(close_c(frame_eval(&m, 0.0), z, 1e-12));
        let d = dist(z, w);
        assert!(close_c(frame_eval(&m, d), w, 1e-10));
    }

    #[test]
    fn frame_between_boundary_points() {
        let m = frame_between_boundary(&H2Boundary::Real(-1.0), &H2Boundary::Real(1.0)).unwrap();
        // Unit half-circle: at t = 0 the point i.
        assert!(close_c(frame_eval(&m, 0.0), I, 1e-12));
        assert_eq!(frame_end(&m, true), H2Boundary::Real(1.0));
        assert_eq!(frame_end(&m, false), H2Boundary::Real(-1.0));
        let v = frame_between_boundary(&H2Boundary::Real(3.0), &H2Boundary::Infinity).unwrap();
        assert_eq!(frame_end(&v, true), H2Boundary::Infinity);
        assert!(close_c(frame_eval(&v, 0.0), C::new(3.0, 1.0), 1e-12));
    }

    #[test]
    fn reanchor_and_reverse() {
        let m = Mobius::new(1.0, 2.0, 0.5, 3.0).unwrap();
        let shifted = frame_reanchor(&m, 1.25);
        assert!(close_c(frame_eval(&shifted, 0.0), frame_eval(&m, 1.25), 1e-12));
        assert!(close_c(frame_eval(&shifted, -0.5), frame_eval(&m, 0.75), 1e-12));
        let rev = frame_reverse(&m);
        assert!(close_c(frame_eval(&rev, 0.7), frame_eval(&m, -0.7), 1e-12));
    }

    #[test]
    fn busemann_along_ray() {
        // Vertical ray to infinity from 2i.
        let y = C::new(0.0, 2.0);
        for t in [0.5f64, 1.0, 4.0] {
            let z = C::new(0.0, 2.0 * t.exp());
            assert!(close(busemann(&H2Boundary::Infinity, y, z), -t, 1e-12));
        }
        // Ray to the boundary point 0.
        let y2 = I;
        for t in [0.5f64, 2.0] {
            let z = C::new(0.0, (-t).exp());
            assert!(close(busemann(&H2Boundary::Real(0.0), y2, z), -t, 1e-12));
        }
    }

    #[test]
    fn busemann_is_lipschitz_and_cocycle() {
        let xi = H2Boundary::Real(1.5);
        let pts = [I, C::new(2.0, 0.5), C::new(-1.0, 3.0)];
        for &y in &pts {
            for &z in &pts {
                let b = busemann(&xi, y, z);
                assert!(b.abs() <= dist(y, z) + 1e-12);
                for &w in &pts {
                    let cocycle =
                        busemann(&xi, y, w) - (busemann(&xi, y, z) + busemann(&xi, z, w));
                    assert!(cocycle.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn busemann_equivariance() {
        let g = Mobius::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let xi = H2Boundary::Real(0.25);
        let y = C::new(0.4, 1.1);
        let z = C::new(-0.3, 0.6);
        let lhs = busemann(&g.apply_boundary(&xi), g.apply(y), g.apply(z));
        let rhs = busemann(&xi, y, z);
        assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn classify_axial() {
        let g = Mobius::new(2.0, 0.0, 0.0, 0.5).unwrap();
        match classify(&g, 1e-9) {
            H2Class::Axial {
                tau,
                attracting,
                repelling,
            } => {
                assert!(close(tau, 4f64.ln(), 1e-12));
                assert_eq!(attracting, H2Boundary::Infinity);
                assert_eq!(repelling, H2Boundary::Real(0.0));
            }
            other => panic!("expected axial, got {other:?}"),
        }
        // Off-diagonal axial with finite fixed points.
        let h = Mobius::new(2.0, 1.0, 1.0, 1.0).unwrap();
        match classify(&h, 1e-9) {
            H2Class::Axial {
                attracting: H2Boundary::Real(att),
                repelling: H2Boundary::Real(rep),
                ..
            } => {
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                assert!(close(att, phi, 1e-12));
                assert!(close(rep, 1.0 - phi, 1e-12));
            }
            other => panic!("expected axial, got {other:?}"),
        }
    }

    #[test]
    fn classify_parabolic_and_elliptic() {
        let p = Mobius::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(
            classify(&p, 1e-9),
            H2Class::Parabolic {
                fixed: H2Boundary::Infinity
            }
        );
        let r = Mobius::rotation_at_i(1.0);
        match classify(&r, 1e-9) {
            H2Class::Elliptic { fixed, angle } => {
                assert!(close_c(fixed, I, 1e-12));
                assert!(close(angle, 1.0, 1e-12));
            }
            other => panic!("expected elliptic, got {other:?}"),
        }
        assert_eq!(classify(&Mobius::identity(), 1e-9), H2Class::Identity);
    }

    #[test]
    fn axial_translates_along_axis() {
        let g = Mobius::new(2.0, 1.0, 1.0, 1.0).unwrap();
        if let H2Class::Axial {
            tau,
            attracting,
            repelling,
        } = classify(&g, 1e-9)
        {
            let axis = frame_between_boundary(&repelling, &attracting).unwrap();
            for t in [-1.0, 0.0, 2.5] {
                let moved = g.apply(frame_eval(&axis, t));
                assert!(close_c(moved, frame_eval(&axis, t + tau), 1e-10));
            }
        } else {
            panic!("expected axial");
        }
    }

    #[test]
    fn rotation_tangent_direction() {
        // frame_through with theta = pi/2 is the vertical frame.
        let m = frame_through(I, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(close_c(frame_eval(&m, 1.0), C::new(0.0, std::f64::consts::E), 1e-12));
        // theta = 0 points along the positive real axis: the unit
        // half-circle through i towards 1.
        let m0 = frame_through(I, 0.0).unwrap();
        match frame_end(&m0, true) {
            H2Boundary::Real(x) => assert!(close(x, 1.0, 1e-12)),
            other => panic!("expected a real endpoint, got {other:?}"),
        }
    }

    #[test]
    fn boundary_chordal_metric() {
        let a = H2Boundary::Real(0.0);
        let b = H2Boundary::Real(1.0);
        let inf = H2Boundary::Infinity;
        assert!(close(boundary_chordal(&a, &inf), 1.0, 1e-15));
        assert!(close(boundary_chordal(&a, &b), 1.0 / 2f64.sqrt(), 1e-15));
        assert_eq!(boundary_chordal(&inf, &inf), 0.0);
        // Triangle inequality sample.
        let c = H2Boundary::Real(-2.0);
        assert!(
            boundary_chordal(&a, &c)
                <= boundary_chordal(&a, &b) + boundary_chordal(&b, &c) + 1e-15
        );
    }

    #[test]
    fn circle_euclidean_form() {
        let (ctr, rad) = circle_euclidean(C::new(2.0, 1.0), 1.0);
        // Points on the Euclidean circle are at hyperbolic distance 1.
        for k in 0..8 {
            let ang = k as f64 * std::f64::consts::FRAC_PI_4;
            let p = ctr + C::new(rad * ang.cos(), rad * ang.sin());
            assert!(close(dist(C::new(2.0, 1.0), p), 1.0, 1e-12));
        }
    }
}
