//! The model spaces behind one interface: points, distances, geodesics.
//!
//! Four models are supported — the hyperbolic plane, Euclidean n-space, the
//! Cayley tree of F2, and the product H2 x R. Points, boundary points,
//! geodesics and isometries are tagged enums; mixing models is a runtime
//! `ModelMismatch` error rather than a compile-time one, which is what lets
//! the command-line tools take the space as data.
//!
//! Geodesics are unit-speed with explicit (possibly unbounded) parameter
//! domains. Each variant stores the representation its model evaluates most
//! stably: a Mobius frame for H2, base-plus-direction for E^n, exact letter
//! streams for the tree, and a frame-with-speeds pair for the product.

use crate::error::{Cat0Error, Result};
use crate::euclid;
use crate::h2::{self, H2Boundary, Mobius, C};
use crate::tree::{self, rat_from_f64, rat_to_f64, TreeEnd, TreeGeodesic, TreePoint};
use num::Zero;
use std::fmt;

/// Slack allowed when checking geodesic domain membership in floats.
const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    H2,
    Euclid(usize),
    Tree,
    ProdH2R,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::H2 => write!(f, "h2"),
            Space::Euclid(n) => write!(f, "eucl{n}"),
            Space::Tree => write!(f, "tree"),
            Space::ProdH2R => write!(f, "prod"),
        }
    }
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    H2(C),
    Euclid(Vec<f64>),
    Tree(TreePoint),
    Prod(C, f64),
}

impl Point {
    pub fn space(&self) -> Space {
        match self {
            Point::H2(_) => Space::H2,
            Point::Euclid(v) => Space::Euclid(v.len()),
            Point::Tree(_) => Space::Tree,
            Point::Prod(_, _) => Space::ProdH2R,
        }
    }

    pub fn h2(x: f64, y: f64) -> Result<Point> {
        if !(y > 0.0) {
            return Err(Cat0Error::InvalidPoint(format!(
                "imaginary part {y} must be positive"
            )));
        }
        Ok(Point::H2(C::new(x, y)))
    }

    pub fn prod(x: f64, y: f64, z: f64) -> Result<Point> {
        if !(y > 0.0) {
            return Err(Cat0Error::InvalidPoint(format!(
                "imaginary part {y} must be positive"
            )));
        }
        Ok(Point::Prod(C::new(x, y), z))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::H2(z) => write!(f, "{} {}", z.re, z.im),
            Point::Euclid(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            Point::Tree(p) => write!(f, "{p}"),
            Point::Prod(z, x) => write!(f, "{} {} {}", z.re, z.im, x),
        }
    }
}

/// Checks two points live in the same model, returning it.
pub fn same_space(p: &Point, q: &Point) -> Result<Space> {
    let (sp, sq) = (p.space(), q.space());
    if sp != sq {
        return Err(Cat0Error::ModelMismatch(format!(
            "points live in different models: {sp} vs {sq}"
        )));
    }
    Ok(sp)
}

/// Distance between two points of the same model.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    same_space(p, q)?;
    Ok(match (p, q) {
        (Point::H2(z), Point::H2(w)) => h2::dist(*z, *w),
        (Point::Euclid(x), Point::Euclid(y)) => euclid::dist(x, y),
        (Point::Tree(x), Point::Tree(y)) => rat_to_f64(&tree::dist(x, y)),
        (Point::Prod(z, x), Point::Prod(w, y)) => {
            let dh = h2::dist(*z, *w);
            (dh * dh + (x - y) * (x - y)).sqrt()
        }
        _ => unreachable!(),
    })
}

// ---------------------------------------------------------------------------
// Boundary points
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint {
    H2(H2Boundary),
    /// Unit direction vector.
    Euclid(Vec<f64>),
    Tree(TreeEnd),
    /// Suspension coordinates: polar angle `theta` in [0, pi] from the
    /// upward vertical, and the H2 direction (absent exactly at the poles).
    Prod { theta: f64, h2: Option<H2Boundary> },
}

impl BoundaryPoint {
    pub fn space(&self) -> Space {
        match self {
            BoundaryPoint::H2(_) => Space::H2,
            BoundaryPoint::Euclid(v) => Space::Euclid(v.len()),
            BoundaryPoint::Tree(_) => Space::Tree,
            BoundaryPoint::Prod { .. } => Space::ProdH2R,
        }
    }

    pub fn euclid_dir(v: &[f64]) -> Result<BoundaryPoint> {
        Ok(BoundaryPoint::Euclid(euclid::normalize(v)?))
    }

    pub fn prod(theta: f64, h2dir: Option<H2Boundary>) -> Result<BoundaryPoint> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Cat0Error::InvalidPoint(format!(
                "suspension angle {theta} outside [0, pi]"
            )));
        }
        let polar = theta.sin().abs() < 1e-12;
        match (&h2dir, polar) {
            (None, false) => Err(Cat0Error::InvalidPoint(
                "non-polar suspension point needs an H2 direction".into(),
            )),
            (Some(_), true) => Err(Cat0Error::InvalidPoint(
                "polar suspension point must omit the H2 direction".into(),
            )),
            _ => Ok(BoundaryPoint::Prod { theta, h2: h2dir }),
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::H2(b) => write!(f, "{b}"),
            BoundaryPoint::Euclid(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            BoundaryPoint::Tree(e) => write!(f, "{e}"),
            BoundaryPoint::Prod { theta, h2: Some(b) } => write!(f, "{theta} {b}"),
            BoundaryPoint::Prod { theta, h2: None } => write!(f, "{theta} pole"),
        }
    }
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub(crate) enum Form {
    /// Degenerate single-point "geodesic" (zero-length segment).
    Constant(Point),
    H2(Mobius),
    Euclid { base: Vec<f64>, dir: Vec<f64> },
    Tree(TreeGeodesic),
    Prod {
        /// Frame of the H2 factor; `None` means that factor is constant.
        frame: Option<Mobius>,
        /// First-factor point when the frame is absent.
        p1: C,
        /// Horizontal speed (>= 0) and vertical speed; sh^2 + sv^2 = 1.
        sh: f64,
        sv: f64,
        /// Vertical coordinate at parameter 0.
        z0: f64,
    },
}

/// A unit-speed geodesic with parameter domain `[lo, hi]` (infinite ends
/// allowed).
#[derive(Clone, Debug)]
pub struct Geodesic {
    pub(crate) form: Form,
    pub(crate) lo: f64,
    pub(crate) hi: f64,
}

impl Geodesic {
    pub fn space(&self) -> Space {
        match &self.form {
            Form::Constant(p) => p.space(),
            Form::H2(_) => Space::H2,
            Form::Euclid { base, .. } => Space::Euclid(base.len()),
            Form::Tree(_) => Space::Tree,
            Form::Prod { .. } => Space::ProdH2R,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.form, Form::Constant(_))
    }

    fn clamp_param(&self, t: f64) -> Result<f64> {
        if t >= self.lo && t <= self.hi {
            return Ok(t);
        }
        if t >= self.lo - DOMAIN_SLACK && t <= self.lo {
            return Ok(self.lo);
        }
        if t <= self.hi + DOMAIN_SLACK && t >= self.hi {
            return Ok(self.hi);
        }
        Err(Cat0Error::DomainError(format!(
            "parameter {t} outside domain [{}, {}]",
            self.lo, self.hi
        )))
    }

    pub fn eval(&self, t: f64) -> Result<Point> {
        let t = self.clamp_param(t)?;
        Ok(match &self.form {
            Form::Constant(p) => p.clone(),
            Form::H2(m) => Point::H2(h2::frame_eval(m, t)),
            Form::Euclid { base, dir } => Point::Euclid(euclid::axpy(base, t, dir)),
            Form::Tree(g) => {
                let exact = rat_from_f64(t)?;
                let exact = clamp_rat(&exact, g.lo(), g.hi());
                Point::Tree(g.eval(&exact)?)
            }
            Form::Prod {
                frame,
                p1,
                sh,
                sv,
                z0,
            } => {
                let z = match frame {
                    Some(m) => h2::frame_eval(m, sh * t),
                    None => *p1,
                };
                Point::Prod(z, z0 + sv * t)
            }
        })
    }

    /// Exact evaluation on the tree model (identity elsewhere is the f64
    /// path); used by the exact tree pipelines.
    pub fn tree_form(&self) -> Option<&TreeGeodesic> {
        match &self.form {
            Form::Tree(g) => Some(g),
            _ => None,
        }
    }

    /// Boundary endpoint in the +t (forward) direction, when the domain is
    /// unbounded on that side.
    pub fn forward_end(&self) -> Option<BoundaryPoint> {
        if self.hi.is_finite() {
            return None;
        }
        self.direction_end(true)
    }

    pub fn backward_end(&self) -> Option<BoundaryPoint> {
        if self.lo.is_finite() {
            return None;
        }
        self.direction_end(false)
    }

    fn direction_end(&self, forward: bool) -> Option<BoundaryPoint> {
        match &self.form {
            Form::Constant(_) => None,
            Form::H2(m) => Some(BoundaryPoint::H2(h2::frame_end(m, forward))),
            Form::Euclid { dir, .. } => {
                let d = if forward {
                    dir.clone()
                } else {
                    euclid::scale(dir, -1.0)
                };
                Some(BoundaryPoint::Euclid(d))
            }
            Form::Tree(g) => g.end_at(forward).map(BoundaryPoint::Tree),
            Form::Prod { frame, sh, sv, .. } => {
                let sv_dir = if forward { *sv } else { -*sv };
                let theta = sv_dir.clamp(-1.0, 1.0).acos();
                let h2dir = if *sh > 0.0 {
                    frame.as_ref().map(|m| h2::frame_end(m, forward))
                } else {
                    None
                };
                Some(BoundaryPoint::Prod { theta, h2: h2dir })
            }
        }
    }

    /// Shifts the parameter so old `s` becomes 0.
    pub fn reanchor(&self, s: f64) -> Result<Geodesic> {
        self.clamp_param(s)?;
        let form = match &self.form {
            Form::Constant(p) => Form::Constant(p.clone()),
            Form::H2(m) => Form::H2(h2::frame_reanchor(m, s)),
            Form::Euclid { base, dir } => Form::Euclid {
                base: euclid::axpy(base, s, dir),
                dir: dir.clone(),
            },
            Form::Tree(g) => Form::Tree(g.reanchor(&rat_from_f64(s)?)),
            Form::Prod {
                frame,
                p1,
                sh,
                sv,
                z0,
            } => Form::Prod {
                frame: frame.as_ref().map(|m| h2::frame_reanchor(m, sh * s)),
                p1: *p1,
                sh: *sh,
                sv: *sv,
                z0: z0 + sv * s,
            },
        };
        Ok(Geodesic {
            form,
            lo: self.lo - s,
            hi: self.hi - s,
        })
    }

    /// Reverses orientation: new(t) = old(-t).
    pub fn reverse(&self) -> Geodesic {
        let form = match &self.form {
            Form::Constant(p) => Form::Constant(p.clone()),
            Form::H2(m) => Form::H2(h2::frame_reverse(m)),
            Form::Euclid { base, dir } => Form::Euclid {
                base: base.clone(),
                dir: euclid::scale(dir, -1.0),
            },
            Form::Tree(g) => Form::Tree(g.reverse()),
            Form::Prod {
                frame,
                p1,
                sh,
                sv,
                z0,
            } => Form::Prod {
                frame: frame.as_ref().map(h2::frame_reverse),
                p1: *p1,
                sh: *sh,
                sv: -*sv,
                z0: *z0,
            },
        };
        Geodesic {
            form,
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Restricts the domain to `[a, b]`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Geodesic> {
        if a > b {
            return Err(Cat0Error::DomainError(format!(
                "empty restriction [{a}, {b}]"
            )));
        }
        let a = self.clamp_param(a)?;
        let b = self.clamp_param(b)?;
        let form = match &self.form {
            Form::Tree(g) => {
                let (ra, rb) = (rat_from_f64(a)?, rat_from_f64(b)?);
                Form::Tree(g.restrict(
                    clamp_rat(&ra, g.lo(), g.hi()),
                    clamp_rat(&rb, g.lo(), g.hi()),
                )?)
            }
            other => other.clone(),
        };
        Ok(Geodesic { form, lo: a, hi: b })
    }
}

fn clamp_rat(
    t: &tree::Rat,
    lo: Option<&tree::Rat>,
    hi: Option<&tree::Rat>,
) -> tree::Rat {
    let mut out = t.clone();
    if let Some(lo) = lo {
        if out < *lo {
            out = lo.clone();
        }
    }
    if let Some(hi) = hi {
        if out > *hi {
            out = hi.clone();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Geodesic constructors
// ---------------------------------------------------------------------------

/// Unit-speed segment from `p` to `q` on `[0, d(p, q)]`; coincident points
/// give the degenerate constant geodesic.
pub fn geodesic_between(p: &Point, q: &Point) -> Result<Geodesic> {
    same_space(p, q)?;
    let d = distance(p, q)?;
    match (p, q) {
        (Point::Tree(a), Point::Tree(b)) => {
            if tree::dist(a, b).is_zero() {
                return Ok(Geodesic {
                    form: Form::Constant(p.clone()),
                    lo: 0.0,
                    hi: 0.0,
                });
            }
            let g = tree::segment(a, b)?;
            Ok(Geodesic {
                form: Form::Tree(g),
                lo: 0.0,
                hi: d,
            })
        }
        _ if d == 0.0 => Ok(Geodesic {
            form: Form::Constant(p.clone()),
            lo: 0.0,
            hi: 0.0,
        }),
        (Point::H2(z), Point::H2(w)) => {
            let theta = h2::direction_between(*z, *w)?;
            Ok(Geodesic {
                form: Form::H2(h2::frame_through(*z, theta)?),
                lo: 0.0,
                hi: d,
            })
        }
        (Point::Euclid(x), Point::Euclid(y)) => Ok(Geodesic {
            form: Form::Euclid {
                base: x.clone(),
                dir: euclid::scale(&euclid::sub(y, x), 1.0 / d),
            },
            lo: 0.0,
            hi: d,
        }),
        (Point::Prod(z1, x1), Point::Prod(z2, x2)) => {
            let dh = h2::dist(*z1, *z2);
            let sh = dh / d;
            let sv = (x2 - x1) / d;
            let frame = if dh > 0.0 {
                let theta = h2::direction_between(*z1, *z2)?;
                Some(h2::frame_through(*z1, theta)?)
            } else {
                None
            };
            Ok(Geodesic {
                form: Form::Prod {
                    frame,
                    p1: *z1,
                    sh,
                    sv,
                    z0: *x1,
                },
                lo: 0.0,
                hi: d,
            })
        }
        _ => unreachable!(),
    }
}

/// Unit-speed ray from `p` towards the boundary point `xi` on `[0, inf)`.
pub fn geodesic_ray(p: &Point, xi: &BoundaryPoint) -> Result<Geodesic> {
    if p.space() != xi.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "point in {} but boundary point in {}",
            p.space(),
            xi.space()
        )));
    }
    let form = match (p, xi) {
        (Point::H2(z), BoundaryPoint::H2(b)) => {
            let theta = h2::direction_to_boundary(*z, b);
            Form::H2(h2::frame_through(*z, theta)?)
        }
        (Point::Euclid(x), BoundaryPoint::Euclid(u)) => Form::Euclid {
            base: x.clone(),
            dir: u.clone(),
        },
        (Point::Tree(a), BoundaryPoint::Tree(e)) => Form::Tree(tree::ray(a, e)?),
        (Point::Prod(z, x), BoundaryPoint::Prod { theta, h2: h2dir }) => {
            let sv = theta.cos();
            let sh = theta.sin().max(0.0);
            let frame = if sh > 1e-12 {
                let b = h2dir.as_ref().ok_or_else(|| {
                    Cat0Error::InvalidPoint("missing H2 direction".into())
                })?;
                let dir = h2::direction_to_boundary(*z, b);
                Some(h2::frame_through(*z, dir)?)
            } else {
                None
            };
            Form::Prod {
                frame,
                p1: *z,
                sh,
                sv,
                z0: *x,
            }
        }
        _ => unreachable!(),
    };
    Ok(Geodesic {
        form,
        lo: 0.0,
        hi: f64::INFINITY,
    })
}

/// Bi-infinite geodesic from `xi` (at -inf) to `eta` (at +inf). Errors when
/// no such line exists; where the line exists but is not unique (Euclidean
/// antipodes, product poles) the representative through the origin (resp.
/// through (i, 0)) is returned.
pub fn geodesic_line(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<Geodesic> {
    if xi.space() != eta.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "boundary points in different models: {} vs {}",
            xi.space(),
            eta.space()
        )));
    }
    let form = match (xi, eta) {
        (BoundaryPoint::H2(p), BoundaryPoint::H2(q)) => {
            Form::H2(h2::frame_between_boundary(p, q)?)
        }
        (BoundaryPoint::Euclid(u), BoundaryPoint::Euclid(v)) => {
            let opposite = euclid::norm(&euclid::add(u, v));
            if opposite > 1e-9 {
                return Err(Cat0Error::Precondition(
                    "Euclidean directions admit a line only when antipodal".into(),
                ));
            }
            Form::Euclid {
                base: vec![0.0; u.len()],
                dir: v.clone(),
            }
        }
        (BoundaryPoint::Tree(a), BoundaryPoint::Tree(b)) => Form::Tree(tree::line(a, b)?),
        (
            BoundaryPoint::Prod { theta: t1, h2: b1 },
            BoundaryPoint::Prod { theta: t2, h2: b2 },
        ) => {
            if (t1 + t2 - std::f64::consts::PI).abs() > 1e-9 {
                return Err(Cat0Error::Precondition(
                    "suspension angles must be supplementary for a line".into(),
                ));
            }
            let sv = t2.cos();
            let sh = t2.sin().max(0.0);
            if sh > 1e-12 {
                let (b1, b2) = match (b1, b2) {
                    (Some(b1), Some(b2)) => (b1, b2),
                    _ => {
                        return Err(Cat0Error::InvalidPoint(
                            "missing H2 direction".into(),
                        ))
                    }
                };
                if b1 == b2 {
                    return Err(Cat0Error::Precondition(
                        "no geodesic joins suspension points over one H2 direction"
                            .into(),
                    ));
                }
                Form::Prod {
                    frame: Some(h2::frame_between_boundary(b1, b2)?),
                    p1: C::new(0.0, 1.0),
                    sh,
                    sv,
                    z0: 0.0,
                }
            } else {
                // Pole-to-pole: vertical lines; canonical one through (i, 0).
                Form::Prod {
                    frame: None,
                    p1: C::new(0.0, 1.0),
                    sh: 0.0,
                    sv,
                    z0: 0.0,
                }
            }
        }
        _ => unreachable!(),
    };
    Ok(Geodesic {
        form,
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    })
}

// ---------------------------------------------------------------------------
// Comparison geometry
// ---------------------------------------------------------------------------

/// Data from one comparison-triangle check.
#[derive(Clone, Copy, Debug)]
pub struct ComparisonReport {
    /// Distance between the two side points in the model space.
    pub actual: f64,
    /// Distance between the matching points of the flat comparison triangle.
    pub comparison: f64,
    /// `comparison - actual`; non-negative in a CAT(0) space.
    pub margin: f64,
}

/// Thin-triangle check: for the triangle (x, y, z), compares
/// d(sigma_xy(s), sigma_xz(t)) with the same distance in the Euclidean
/// comparison triangle. `s` in [0, d(x,y)], `t` in [0, d(x,z)].
pub fn cat0_margin(
    x: &Point,
    y: &Point,
    z: &Point,
    s: f64,
    t: f64,
) -> Result<ComparisonReport> {
    same_space(x, y)?;
    same_space(x, z)?;
    let dxy = distance(x, y)?;
    let dxz = distance(x, z)?;
    let dyz = distance(y, z)?;
    if s < -DOMAIN_SLACK || s > dxy + DOMAIN_SLACK || t < -DOMAIN_SLACK || t > dxz + DOMAIN_SLACK
    {
        return Err(Cat0Error::DomainError(format!(
            "side parameters ({s}, {t}) outside sides of lengths ({dxy}, {dxz})"
        )));
    }
    let s = s.clamp(0.0, dxy);
    let t = t.clamp(0.0, dxz);
    // Points on the sides.
    let p = if dxy == 0.0 {
        x.clone()
    } else {
        geodesic_between(x, y)?.eval(s)?
    };
    let q = if dxz == 0.0 {
        x.clone()
    } else {
        geodesic_between(x, z)?.eval(t)?
    };
    let actual = distance(&p, &q)?;
    // Comparison triangle laid flat: x at the origin, y on the axis.
    let cos_alpha = if dxy == 0.0 || dxz == 0.0 {
        1.0
    } else {
        ((dxy * dxy + dxz * dxz - dyz * dyz) / (2.0 * dxy * dxz)).clamp(-1.0, 1.0)
    };
    let sin_alpha = (1.0 - cos_alpha * cos_alpha).max(0.0).sqrt();
    let pbar = (s, 0.0);
    let qbar = (t * cos_alpha, t * sin_alpha);
    let comparison = ((pbar.0 - qbar.0).powi(2) + (pbar.1 - qbar.1).powi(2)).sqrt();
    Ok(ComparisonReport {
        actual,
        comparison,
        margin: comparison - actual,
    })
}

/// Convexity check for `f(t) = d(g(t), h(t))` along two geodesics sharing
/// parameter values: returns
/// `lam*f(t0) + (1-lam)*f(t1) - f(lam*t0 + (1-lam)*t1)`
/// for the affine weight `lam` in [0, 1] (non-negative in a CAT(0) space
/// because the pointwise distance between geodesics is convex).
pub fn convexity_margin(g: &Geodesic, h: &Geodesic, t0: f64, t1: f64, lam: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lam) {
        return Err(Cat0Error::DomainError(format!(
            "affine weight {lam} outside [0, 1]"
        )));
    }
    let f = |t: f64| -> Result<f64> { distance(&g.eval(t)?, &h.eval(t)?) };
    let tm = lam * t0 + (1.0 - lam) * t1;
    Ok(lam * f(t0)? + (1.0 - lam) * f(t1)? - f(tm)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Word;

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() < eps
    }

    #[test]
    fn model_mismatch_is_loud() {
        let p = Point::h2(0.0, 1.0).unwrap();
        let q = Point::Euclid(vec![0.0, 0.0]);
        assert!(matches!(
            distance(&p, &q),
            Err(Cat0Error::ModelMismatch(_))
        ));
    }

    #[test]
    fn segment_endpoints_all_models() {
        let cases: Vec<(Point, Point)> = vec![
            (Point::h2(0.0, 1.0).unwrap(), Point::h2(2.0, 0.5).unwrap()),
            (
                Point::Euclid(vec![0.0, 1.0, 2.0]),
                Point::Euclid(vec![3.0, -1.0, 0.5]),
            ),
            (
                Point::Tree(TreePoint::vertex(Word::parse("ab").unwrap())),
                Point::Tree(TreePoint::vertex(Word::parse("b^-1a").unwrap())),
            ),
            (
                Point::prod(0.0, 1.0, 0.0).unwrap(),
                Point::prod(1.0, 2.0, 3.0).unwrap(),
            ),
        ];
        for (p, q) in cases {
            let d = distance(&p, &q).unwrap();
            let g = geodesic_between(&p, &q).unwrap();
            let p0 = g.eval(0.0).unwrap();
            let p1 = g.eval(d).unwrap();
            assert!(distance(&p0, &p).unwrap() < 1e-9, "{p} start");
            assert!(distance(&p1, &q).unwrap() < 1e-9, "{q} end");
            // Midpoint splits the distance.
            let mid = g.eval(d / 2.0).unwrap();
            assert!(close(distance(&p, &mid).unwrap(), d / 2.0, 1e-9));
            assert!(close(distance(&mid, &q).unwrap(), d / 2.0, 1e-9));
        }
    }

    #[test]
    fn degenerate_segment() {
        let p = Point::h2(1.0, 2.0).unwrap();
        let g = geodesic_between(&p, &p).unwrap();
        assert!(g.is_degenerate());
        assert_eq!(g.eval(0.0).unwrap(), p);
    }

    #[test]
    fn rays_are_unit_speed() {
        let cases: Vec<(Point, BoundaryPoint)> = vec![
            (
                Point::h2(1.0, 1.0).unwrap(),
                BoundaryPoint::H2(H2Boundary::Real(-2.0)),
            ),
            (
                Point::Euclid(vec![1.0, 1.0]),
                BoundaryPoint::euclid_dir(&[3.0, 4.0]).unwrap(),
            ),
            (
                Point::Tree(TreePoint::vertex(Word::parse("b").unwrap())),
                BoundaryPoint::Tree(TreeEnd::parse("e|ab").unwrap()),
            ),
            (
                Point::prod(0.0, 1.0, 1.0).unwrap(),
                BoundaryPoint::prod(
                    std::f64::consts::FRAC_PI_4,
                    Some(H2Boundary::Infinity),
                )
                .unwrap(),
            ),
        ];
        for (p, xi) in cases {
            let g = geodesic_ray(&p, &xi).unwrap();
            assert!(distance(&g.eval(0.0).unwrap(), &p).unwrap() < 1e-9);
            for (s, t) in [(0.0, 1.0), (1.0, 3.5), (2.0, 10.0)] {
                let a = g.eval(s).unwrap();
                let b = g.eval(t).unwrap();
                assert!(
                    close(distance(&a, &b).unwrap(), t - s, 1e-8),
                    "{xi:?} at ({s}, {t})"
                );
            }
        }
    }

    #[test]
    fn lines_hit_their_ends() {
        let g = geodesic_line(
            &BoundaryPoint::H2(H2Boundary::Real(-1.0)),
            &BoundaryPoint::H2(H2Boundary::Real(1.0)),
        )
        .unwrap();
        assert_eq!(
            g.forward_end(),
            Some(BoundaryPoint::H2(H2Boundary::Real(1.0)))
        );
        assert_eq!(
            g.backward_end(),
            Some(BoundaryPoint::H2(H2Boundary::Real(-1.0)))
        );
        // Euclidean line needs antipodal directions.
        let u = BoundaryPoint::euclid_dir(&[1.0, 0.0]).unwrap();
        let v = BoundaryPoint::euclid_dir(&[-1.0, 0.0]).unwrap();
        assert!(geodesic_line(&u, &v).is_ok());
        let w = BoundaryPoint::euclid_dir(&[0.0, 1.0]).unwrap();
        assert!(matches!(
            geodesic_line(&u, &w),
            Err(Cat0Error::Precondition(_))
        ));
    }

    #[test]
    fn product_line_speeds() {
        let xi = BoundaryPoint::prod(
            3.0 * std::f64::consts::FRAC_PI_4,
            Some(H2Boundary::Real(0.0)),
        )
        .unwrap();
        let eta = BoundaryPoint::prod(
            std::f64::consts::FRAC_PI_4,
            Some(H2Boundary::Real(2.0)),
        )
        .unwrap();
        let g = geodesic_line(&xi, &eta).unwrap();
        assert_eq!(g.forward_end(), Some(eta));
        // Wrong angles: no line.
        let bad = BoundaryPoint::prod(
            std::f64::consts::FRAC_PI_3,
            Some(H2Boundary::Real(2.0)),
        )
        .unwrap();
        let xi2 = BoundaryPoint::prod(
            3.0 * std::f64::consts::FRAC_PI_4,
            Some(H2Boundary::Real(0.0)),
        )
        .unwrap();
        assert!(geodesic_line(&xi2, &bad).is_err());
    }

    #[test]
    fn reanchor_reverse_restrict() {
        let p = Point::h2(0.0, 1.0).unwrap();
        let q = Point::h2(3.0, 2.0).unwrap();
        let g = geodesic_between(&p, &q).unwrap();
        let d = g.hi();
        let r = g.reanchor(d / 2.0).unwrap();
        assert!(distance(&r.eval(0.0).unwrap(), &g.eval(d / 2.0).unwrap()).unwrap() < 1e-9);
        let rev = g.reverse();
        assert!(distance(&rev.eval(-d).unwrap(), &q).unwrap() < 1e-9);
        // `restrict` keeps the original parametrization.
        let sub = g.restrict(1.0, d.min(1.5)).unwrap();
        assert!(sub.eval(1.25).is_ok());
        assert!(sub.eval(0.5).is_err());
        assert!(sub.eval(2.0).is_err());
    }

    #[test]
    fn cat0_margin_nonnegative() {
        // Hyperbolic triangles are thin: margin strictly positive inside.
        let x = Point::h2(0.0, 1.0).unwrap();
        let y = Point::h2(4.0, 1.0).unwrap();
        let z = Point::h2(2.0, 3.0).unwrap();
        let rep = cat0_margin(&x, &y, &z, 1.5, 1.0).unwrap();
        assert!(rep.margin >= 0.0);
        assert!(rep.margin > 1e-3, "strictly curved");
        // Euclidean triangles are exactly flat.
        let ex = Point::Euclid(vec![0.0, 0.0]);
        let ey = Point::Euclid(vec![3.0, 0.0]);
        let ez = Point::Euclid(vec![0.0, 4.0]);
        let rep = cat0_margin(&ex, &ey, &ez, 1.0, 2.0).unwrap();
        assert!(rep.margin.abs() < 1e-12);
        // Trees are as thin as it gets.
        let tx = Point::Tree(TreePoint::vertex(Word::parse("a").unwrap()));
        let ty = Point::Tree(TreePoint::vertex(Word::parse("b").unwrap()));
        let tz = Point::Tree(TreePoint::vertex(Word::parse("a^2b").unwrap()));
        let rep = cat0_margin(&tx, &ty, &tz, 1.0, 1.0).unwrap();
        assert!(rep.margin >= -1e-12);
    }

    #[test]
    fn convexity_margin_nonnegative() {
        let g = geodesic_between(
            &Point::h2(-2.0, 1.0).unwrap(),
            &Point::h2(2.0, 1.0).unwrap(),
        )
        .unwrap();
        let h = geodesic_between(
            &Point::h2(-1.0, 3.0).unwrap(),
            &Point::h2(1.5, 2.0).unwrap(),
        )
        .unwrap();
        // Both segments contain [0, 1] in their parameter domains.
        for lam in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let m = convexity_margin(&g, &h, 0.0, 1.0, lam).unwrap();
            assert!(m >= -1e-10, "lam = {lam}, margin {m}");
        }
    }

    #[test]
    fn tree_eval_is_exact_under_f64_params() {
        let p = Point::Tree(TreePoint::vertex(Word::parse("a").unwrap()));
        let q = Point::Tree(TreePoint::vertex(Word::parse("b").unwrap()));
        let g = geodesic_between(&p, &q).unwrap();
        let mid = g.eval(1.0).unwrap();
        assert_eq!(mid, Point::Tree(TreePoint::vertex(Word::identity())));
    }
}
