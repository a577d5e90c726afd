//! The boundary at infinity: rays, Busemann functions, horoballs, a visual
//! metric, and convergence at infinity.
//!
//! Busemann functions are evaluated by closed forms (exact on the tree). The
//! definitional limit `d(gamma(T), z) - d(gamma(T), y)` is also provided, as
//! an independent oracle: it is what the closed forms are tested against. At
//! large `T` the naive evaluation overflows or cancels catastrophically, so
//! the oracle computes the *difference* of distances through algebraically
//! identical rearrangements that stay finite — it is still the honest value
//! at the honest point, just associated differently.

use crate::error::{Cat0Error, Result};
use crate::euclid;
use crate::h2::{self, H2Boundary, C};
use crate::space::{
    distance, geodesic_ray, same_space, BoundaryPoint, Geodesic, Point, Space,
};
use crate::tree::{self, rat_to_f64, TreeEnd, TreePoint};

/// Unit-speed ray from `x` towards `xi` on `[0, inf)`.
pub fn ray_from(x: &Point, xi: &BoundaryPoint) -> Result<Geodesic> {
    geodesic_ray(x, xi)
}

fn check_boundary_space(xi: &BoundaryPoint, y: &Point, z: &Point) -> Result<()> {
    let sp = same_space(y, z)?;
    if xi.space() != sp {
        return Err(Cat0Error::ModelMismatch(format!(
            "boundary point in {} but points in {}",
            xi.space(),
            sp
        )));
    }
    Ok(())
}

/// Busemann function `b_xi(y, z) = lim_t d(gamma(t), z) - d(gamma(t), y)`
/// along any geodesic `gamma` tending to `xi`. Antisymmetric in `(y, z)`,
/// 1-Lipschitz in each argument, and a cocycle over the basepoint.
pub fn busemann(xi: &BoundaryPoint, y: &Point, z: &Point) -> Result<f64> {
    check_boundary_space(xi, y, z)?;
    Ok(match (xi, y, z) {
        (BoundaryPoint::H2(b), Point::H2(yy), Point::H2(zz)) => h2::busemann(b, *yy, *zz),
        (BoundaryPoint::Euclid(u), Point::Euclid(yy), Point::Euclid(zz)) => {
            euclid::busemann(u, yy, zz)
        }
        (BoundaryPoint::Tree(e), Point::Tree(yy), Point::Tree(zz)) => {
            rat_to_f64(&tree::busemann(e, yy, zz))
        }
        (BoundaryPoint::Prod { theta, h2: dir }, Point::Prod(y1, y2), Point::Prod(z1, z2)) => {
            // A unit-speed ray at suspension angle theta splits its speed as
            // (sin theta, cos theta) over the factors; the Busemann function
            // combines the factor values with those weights.
            let b1 = match dir {
                Some(d) => h2::busemann(d, *y1, *z1),
                None => 0.0,
            };
            theta.sin() * b1 + theta.cos() * (y2 - z2)
        }
        _ => unreachable!(),
    })
}

/// `d(x, z) - d(x, y)` in H2, stable when `x` sits at (or near) the real
/// line. Writing `d(x, w) = 2 asinh(u_w)` with
/// `u_w = |x - w| / (2 sqrt(Im x Im w))`, the difference is
///
/// ```text
/// 2 ln(u_z / u_y) + 2 ln((1 + sqrt(1 + u_z^-2)) / (1 + sqrt(1 + u_y^-2)))
/// ```
///
/// and `u_z / u_y = (|x - z| sqrt(Im y)) / (|x - y| sqrt(Im z))` never
/// touches `Im x`: the expression stays finite as `Im x -> 0`, where the
/// correction logarithm vanishes.
fn h2_dist_difference(x: C, z: C, y: C) -> f64 {
    if x == z {
        return -h2::dist(x, y);
    }
    if x == y {
        return h2::dist(x, z);
    }
    let az = (x - z).norm();
    let ay = (x - y).norm();
    let ratio = (az * y.im.sqrt()) / (ay * z.im.sqrt());
    let inv_uz2 = 4.0 * x.im * z.im / (az * az);
    let inv_uy2 = 4.0 * x.im * y.im / (ay * ay);
    let correction = (1.0 + (1.0 + inv_uz2).sqrt()) / (1.0 + (1.0 + inv_uy2).sqrt());
    2.0 * (ratio.ln() + correction.ln())
}

/// The definitional-limit oracle: `d(gamma(T), z) - d(gamma(T), y)` for the
/// ray `gamma` from `y` towards `xi`, evaluated at `T = t_cap`.
///
/// Exact on the tree (the difference saturates once the probe vertex passes
/// every branch point). On the float models the difference is computed in
/// rearranged closed form so that `t_cap = 1e6` neither overflows nor
/// cancels; when `xi` involves the point at infinity everything is first
/// moved by the isometry `w -> -1/w`, which is transparent to distances.
pub fn busemann_limit(
    xi: &BoundaryPoint,
    y: &Point,
    z: &Point,
    t_cap: f64,
) -> Result<f64> {
    check_boundary_space(xi, y, z)?;
    if !(t_cap > 0.0) || !t_cap.is_finite() {
        return Err(Cat0Error::DomainError(format!(
            "probe time {t_cap} must be positive and finite"
        )));
    }
    let flip = |w: C| -w.inv();
    match (xi, y, z) {
        (BoundaryPoint::H2(b), Point::H2(yy), Point::H2(zz)) => {
            if matches!(b, H2Boundary::Infinity) {
                return busemann_limit(
                    &BoundaryPoint::H2(H2Boundary::Real(0.0)),
                    &Point::H2(flip(*yy)),
                    &Point::H2(flip(*zz)),
                    t_cap,
                );
            }
            let ray = geodesic_ray(y, xi)?;
            let x = match ray.eval(t_cap)? {
                Point::H2(x) => x,
                _ => unreachable!(),
            };
            Ok(h2_dist_difference(x, *zz, *yy))
        }
        (BoundaryPoint::Euclid(u), Point::Euclid(yy), Point::Euclid(zz)) => {
            // d(x,z) - d(x,y) = (|x-z|^2 - |x-y|^2) / (|x-z| + |x-y|) and the
            // squared terms telescope to 2 T <y-z, u> + |y-z|^2.
            let ymz = euclid::sub(yy, zz);
            let num = 2.0 * t_cap * euclid::dot(&ymz, u) + euclid::dot(&ymz, &ymz);
            let x = euclid::axpy(yy, t_cap, u);
            Ok(num / (euclid::dist(&x, zz) + t_cap))
        }
        (BoundaryPoint::Tree(e), Point::Tree(yy), Point::Tree(zz)) => {
            // Probe at the vertex of depth about t_cap towards xi; all tree
            // quantities are exact rationals.
            let slack = yy
                .anchors()
                .iter()
                .chain(zz.anchors().iter())
                .map(|(w, _)| w.len())
                .max()
                .unwrap_or(0);
            let n = t_cap.ceil() as usize + slack + 2;
            let probe = TreePoint::vertex(e.word_prefix(n));
            Ok(rat_to_f64(&(tree::dist(&probe, zz) - tree::dist(&probe, yy))))
        }
        (
            BoundaryPoint::Prod { theta, h2: dir },
            Point::Prod(y1, y2),
            Point::Prod(z1, z2),
        ) => {
            if matches!(dir, Some(H2Boundary::Infinity)) {
                let xi2 = BoundaryPoint::Prod {
                    theta: *theta,
                    h2: Some(H2Boundary::Real(0.0)),
                };
                return busemann_limit(
                    &xi2,
                    &Point::Prod(flip(*y1), *y2),
                    &Point::Prod(flip(*z1), *z2),
                    t_cap,
                );
            }
            // gamma(T) = (c(sh T), y2 + sv T) with c the factor ray from y1.
            // With delta = d(x1, z1) - d(x1, y1) (stable, above) and
            // w = y2 - z2, the squared product distances differ by
            // num = delta^2 + 2 (sh T) delta + w^2 + 2 T sv w, and
            // d(x, y) = T exactly, so the difference is num / (d(x,z) + T).
            let t = t_cap;
            let (sh, sv) = (theta.sin(), theta.cos());
            let ray = geodesic_ray(y, xi)?;
            let x1 = match ray.eval(t)? {
                Point::Prod(x1, _) => x1,
                _ => unreachable!(),
            };
            let delta = h2_dist_difference(x1, *z1, *y1);
            let w = y2 - z2;
            let num = delta * delta + 2.0 * (sh * t) * delta + w * w + 2.0 * t * sv * w;
            let dz = (t * t + num).max(0.0).sqrt();
            Ok(num / (dz + t))
        }
        _ => unreachable!(),
    }
}

/// Horoball membership: `z` lies in the closed horoball centred at `xi`
/// through `x0` iff `b_xi(x0, z) <= 0` (exact on the tree).
pub fn horoball_contains(xi: &BoundaryPoint, x0: &Point, z: &Point) -> Result<bool> {
    check_boundary_space(xi, x0, z)?;
    if let (BoundaryPoint::Tree(e), Point::Tree(yy), Point::Tree(zz)) = (xi, x0, z) {
        use num::Zero;
        return Ok(tree::busemann(e, yy, zz) <= tree::Rat::zero());
    }
    Ok(busemann(xi, x0, z)? <= 0.0)
}

// ---------------------------------------------------------------------------
// The visual metric
// ---------------------------------------------------------------------------

fn prod_embed(theta: f64, dir: &Option<H2Boundary>) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    match dir {
        Some(b) => {
            let (px, py) = b.circle_point();
            [c, s * px, s * py]
        }
        None => [c, 0.0, 0.0],
    }
}

/// A metric on the boundary inducing the cone topology: half-chordal on the
/// H2 circle, the angle on Euclidean directions, `2^-(common prefix)` on
/// tree ends, and the half-chordal metric of the suspension embedding
/// `(cos theta, sin theta * circle(xi))` on the product.
pub fn visual_distance(xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<f64> {
    if xi.space() != eta.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "boundary points in different models: {} vs {}",
            xi.space(),
            eta.space()
        )));
    }
    Ok(match (xi, eta) {
        (BoundaryPoint::H2(a), BoundaryPoint::H2(b)) => h2::boundary_chordal(a, b),
        (BoundaryPoint::Euclid(u), BoundaryPoint::Euclid(v)) => euclid::direction_angle(u, v),
        (BoundaryPoint::Tree(a), BoundaryPoint::Tree(b)) => tree::end_visual_distance(a, b),
        (
            BoundaryPoint::Prod { theta: t1, h2: d1 },
            BoundaryPoint::Prod { theta: t2, h2: d2 },
        ) => {
            let f = prod_embed(*t1, d1);
            let g = prod_embed(*t2, d2);
            let dd: f64 = f.iter().zip(g.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            0.5 * dd.sqrt()
        }
        _ => unreachable!(),
    })
}

// ---------------------------------------------------------------------------
// Convergence at infinity
// ---------------------------------------------------------------------------

/// Boundary direction of the ray from `y` through `x` (the two points must
/// be distinct).
pub fn direction_from(y: &Point, x: &Point) -> Result<BoundaryPoint> {
    same_space(y, x)?;
    if distance(y, x)? <= 0.0 {
        return Err(Cat0Error::Precondition(
            "coincident points have no direction".into(),
        ));
    }
    Ok(match (y, x) {
        (Point::H2(a), Point::H2(b)) => {
            let theta = h2::direction_between(*a, *b)?;
            BoundaryPoint::H2(h2::frame_end(&h2::frame_through(*a, theta)?, true))
        }
        (Point::Euclid(a), Point::Euclid(b)) => {
            BoundaryPoint::Euclid(euclid::normalize(&euclid::sub(b, a))?)
        }
        (Point::Tree(a), Point::Tree(b)) => BoundaryPoint::Tree(tree::direction_through(a, b)?),
        (Point::Prod(a1, a2), Point::Prod(b1, b2)) => {
            let dh = h2::dist(*a1, *b1);
            let dv = b2 - a2;
            let theta = dh.atan2(dv);
            if theta.sin().abs() < 1e-12 {
                BoundaryPoint::Prod {
                    theta: if dv >= 0.0 { 0.0 } else { std::f64::consts::PI },
                    h2: None,
                }
            } else {
                let phi = h2::direction_between(*a1, *b1)?;
                let dir = h2::frame_end(&h2::frame_through(*a1, phi)?, true);
                BoundaryPoint::Prod {
                    theta,
                    h2: Some(dir),
                }
            }
        }
        _ => unreachable!(),
    })
}

/// Outcome of a convergence-at-infinity test.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// Limiting boundary coordinate, when one was detected.
    pub limit: Option<BoundaryPoint>,
    /// Largest pairwise visual distance among the tail directions (infinite
    /// when a tail direction is undefined).
    pub residual: f64,
}

/// Decides whether a finite sequence converges at infinity as seen from `y`:
/// the distances `d(y, x_i)` must strictly increase across the last quarter
/// of the sequence, and the ray directions from `y` must agree pairwise
/// within `eps_conv` there. On success the direction of the final point is
/// reported as the limit.
pub fn converge_at_infinity(
    points: &[Point],
    y: &Point,
    eps_conv: f64,
) -> Result<ConvergenceReport> {
    if points.len() < 2 {
        return Err(Cat0Error::Precondition(
            "convergence test needs at least two points".into(),
        ));
    }
    let n = points.len();
    let start = n - (n / 4).max(2).min(n);
    let tail = &points[start..];

    let mut escapes = true;
    let mut prev = distance(y, &tail[0])?;
    for x in &tail[1..] {
        let d = distance(y, x)?;
        if d <= prev {
            escapes = false;
        }
        prev = d;
    }

    let dirs: Vec<Option<BoundaryPoint>> =
        tail.iter().map(|x| direction_from(y, x).ok()).collect();
    let mut residual: f64 = 0.0;
    for i in 0..dirs.len() {
        for j in (i + 1)..dirs.len() {
            match (&dirs[i], &dirs[j]) {
                (Some(a), Some(b)) => residual = residual.max(visual_distance(a, b)?),
                _ => residual = f64::INFINITY,
            }
        }
    }

    let limit = if escapes && residual <= eps_conv {
        dirs.last().and_then(|d| d.clone())
    } else {
        None
    };
    Ok(ConvergenceReport { limit, residual })
}

/// A deterministic spread of `n` boundary points, for sampling "for every
/// boundary point" hypotheses: evenly spaced circle angles on the hyperbolic
/// plane, evenly spaced (resp. quasi-uniform) directions in the flat plane
/// (resp. higher dimensions), the ends through all shortest reduced words
/// covering the tree, and a poles-plus-slope-rows sweep on the product.
pub fn boundary_grid(space: Space, n: usize) -> Result<Vec<BoundaryPoint>> {
    use std::f64::consts::{PI, TAU};
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = match space {
        Space::H2 => (0..n)
            .map(|j| {
                let phi = TAU * (j as f64 + 0.5) / n as f64;
                BoundaryPoint::H2(H2Boundary::from_circle_angle(phi))
            })
            .collect(),
        Space::Euclid(1) => (0..n)
            .map(|j| BoundaryPoint::Euclid(vec![if j % 2 == 0 { 1.0 } else { -1.0 }]))
            .collect(),
        Space::Euclid(2) => (0..n)
            .map(|j| {
                let phi = TAU * (j as f64 + 0.5) / n as f64;
                BoundaryPoint::Euclid(vec![phi.cos(), phi.sin()])
            })
            .collect(),
        Space::Euclid(d) => {
            // Quasi-uniform directions from incommensurate frequencies
            // (square roots of a prime-valued polynomial), then normalized.
            let mut grid = Vec::with_capacity(n);
            for j in 0..n {
                let v: Vec<f64> = (0..d)
                    .map(|i| (((j + 1) * (i * i + i + 41)) as f64).sqrt().sin())
                    .collect();
                grid.push(BoundaryPoint::euclid_dir(&v)?);
            }
            grid
        }
        Space::Tree => {
            let mut len = 1usize;
            while 4 * 3usize.pow(len as u32 - 1) < n {
                len += 1;
            }
            tree::reduced_words_of_length(len)
                .iter()
                .take(n)
                .map(|w| Ok(BoundaryPoint::Tree(TreeEnd::from_direction(w)?)))
                .collect::<Result<Vec<_>>>()?
        }
        Space::ProdH2R => {
            let mut grid = vec![
                BoundaryPoint::prod(0.0, None)?,
                BoundaryPoint::prod(PI, None)?,
            ];
            let rows = ((n.saturating_sub(2)) as f64 / 8.0).ceil().max(1.0) as usize;
            'fill: for i in 1..=rows {
                let theta = PI * i as f64 / (rows + 1) as f64;
                for j in 0..8 {
                    if grid.len() >= n {
                        break 'fill;
                    }
                    let phi = TAU * (j as f64 + 0.5) / 8.0;
                    grid.push(BoundaryPoint::prod(
                        theta,
                        Some(H2Boundary::from_circle_angle(phi)),
                    )?);
                }
            }
            grid
        }
    };
    out.truncate(n);
    Ok(out)
}
