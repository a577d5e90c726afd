//! Shortest-distance projection onto geodesics.
//!
//! Two objectives are minimized along a geodesic: the distance to an interior
//! point, and a Busemann function of a boundary point. Both are convex, so a
//! certified 1-D scheme applies: exponential bracketing over unbounded
//! domains, then ternary search. The tree model bypasses the numeric path
//! entirely — its projections are computed in exact arithmetic.
//!
//! A boundary projection reports the whole *flat* sublevel interval
//! `{t : f(t) <= min + tau_flat}` because the minimum set of a Busemann
//! function along a geodesic can be a nondegenerate (even unbounded)
//! interval; an objective that strictly decreases across the doubling
//! horizon is reported as escaping to that infinite end.

use crate::boundary::{busemann, converge_at_infinity, ray_from};
use crate::error::{Cat0Error, Result};
use crate::euclid;
use crate::space::{distance, BoundaryPoint, Form, Geodesic, Point};
use crate::tol::Tolerances;
use crate::tree::{self, rat_to_f64};

/// Where a boundary point lands when projected to a geodesic.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionResult {
    /// The infimum is attained: `[lo, hi]` is the sublevel interval at depth
    /// `tau_flat` above the minimum (possibly unbounded where the objective
    /// stays flat across the probe horizon), `at` the located argmin, and
    /// `value` the minimum.
    Interior { lo: f64, hi: f64, at: f64, value: f64 },
    /// The objective strictly decreases out to the probe horizon: the
    /// projection is the infinite end (`forward` tells which one).
    Escapes { forward: bool },
}

impl ProjectionResult {
    /// The located argmin, when the projection is interior.
    pub fn argmin(&self) -> Option<f64> {
        match self {
            ProjectionResult::Interior { at, .. } => Some(*at),
            ProjectionResult::Escapes { .. } => None,
        }
    }

    /// The flat interval, when the projection is interior.
    pub fn interval(&self) -> Option<(f64, f64)> {
        match self {
            ProjectionResult::Interior { lo, hi, .. } => Some((*lo, *hi)),
            ProjectionResult::Escapes { .. } => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Certified 1-D minimization of convex objectives
// ---------------------------------------------------------------------------

enum Bracket {
    Interval(f64, f64),
    Escapes(bool),
}

/// A parameter inside the domain to start probing from (0 when admissible).
fn domain_anchor(g: &Geodesic) -> f64 {
    if g.lo() <= 0.0 && 0.0 <= g.hi() {
        0.0
    } else if g.lo().is_finite() {
        g.lo()
    } else {
        g.hi()
    }
}

/// Brackets the minimum of a convex `f` over `[lo, hi]`, walking doubling
/// steps over unbounded sides. Strict decrease through all `probe_k`
/// doublings is reported as an escape; strict decrease in *both* directions
/// contradicts convexity and fails loudly.
fn bracket_minimum(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    anchor: f64,
    probe_k: u32,
) -> Result<Bracket> {
    if lo.is_finite() && hi.is_finite() {
        return Ok(Bracket::Interval(lo, hi));
    }
    let t0 = anchor;
    let f0 = f(t0)?;
    let l = (t0 - 1.0).max(lo);
    let r = (t0 + 1.0).min(hi);
    let fl = if l < t0 { f(l)? } else { f0 };
    let fr = if r > t0 { f(r)? } else { f0 };
    if fl < f0 && fr < f0 {
        return Err(Cat0Error::Inconclusive(
            "objective decreases in both directions along the geodesic — not convex".into(),
        ));
    }
    let walk = |f: &mut dyn FnMut(f64) -> Result<f64>,
                sign: f64,
                end: f64,
                seed: f64|
     -> Result<Bracket> {
        let mut prev = seed;
        for k in 1..=probe_k {
            let t = t0 + sign * (2.0f64).powi(k as i32);
            if (sign > 0.0 && t >= end) || (sign < 0.0 && t <= end) {
                // Bounded after all on this side.
                return Ok(Bracket::Interval(end.min(t0), end.max(t0)));
            }
            let v = f(t)?;
            if v >= prev {
                return Ok(Bracket::Interval(t.min(t0), t.max(t0)));
            }
            prev = v;
        }
        Ok(Bracket::Escapes(sign > 0.0))
    };
    if fr < f0 {
        walk(f, 1.0, hi, fr)
    } else if fl < f0 {
        walk(f, -1.0, lo, fl)
    } else {
        Ok(Bracket::Interval(l, r))
    }
}

/// Ternary search for the minimum of a convex `f` on `[a, b]`.
fn ternary_min(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    iters: u32,
) -> Result<(f64, f64)> {
    for _ in 0..iters {
        if b - a < f64::EPSILON * (a.abs() + b.abs() + 1.0) {
            break;
        }
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        let v1 = f(m1)?;
        let v2 = f(m2)?;
        if v1 < v2 {
            b = m2;
        } else if v1 > v2 {
            a = m1;
        } else {
            a = m1;
            b = m2;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)?))
}

/// Walks outward from the argmin until `f` exceeds `thresh`, then bisects the
/// crossing; returns the signed infinity when `f` stays below `thresh` out to
/// the probe horizon.
fn sublevel_edge(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    at: f64,
    thresh: f64,
    sign: f64,
    end: f64,
    probe_k: u32,
    eps_param: f64,
) -> Result<f64> {
    let mut below = at;
    let mut above = None;
    if end.is_finite() {
        if f(end)? <= thresh {
            return Ok(end);
        }
        above = Some(end);
    } else {
        for k in 0..=probe_k {
            let t = at + sign * (2.0f64).powi(k as i32);
            if f(t)? > thresh {
                above = Some(t);
                break;
            }
            below = t;
        }
    }
    let Some(mut above) = above else {
        return Ok(sign * f64::INFINITY);
    };
    for _ in 0..200 {
        if (above - below).abs() <= eps_param {
            break;
        }
        let mid = 0.5 * (above + below);
        if f(mid)? <= thresh {
            below = mid;
        } else {
            above = mid;
        }
    }
    Ok(below)
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

/// Unclamped foot parameter on the models where the distance objective
/// minimizes in closed form: orthogonal projection in E^n, the pulled-back
/// imaginary-axis foot in H2, and the vertical coordinate on vertical
/// product geodesics.
fn closed_form_foot(g: &Geodesic, x: &Point) -> Option<f64> {
    match (&g.form, x) {
        (Form::H2(m), Point::H2(z)) => {
            // Pull back by the frame: the foot of w on the imaginary axis is
            // i|w|, reached at parameter ln|w|.
            let w = m.inverse().apply(*z);
            Some(w.norm().ln())
        }
        (Form::Euclid { base, dir }, Point::Euclid(v)) => {
            Some(euclid::dot(&euclid::sub(v, base), dir))
        }
        (Form::Prod { frame: None, sv, z0, .. }, Point::Prod(_, h)) => Some((h - z0) / sv),
        _ => None,
    }
}

/// Parameter of the point of `g` closest to `x` (exact on the tree). The
/// distance objective is proper, so this always lands in the domain.
pub fn project_point(g: &Geodesic, x: &Point, tol: &Tolerances) -> Result<f64> {
    if g.space() != x.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "geodesic in {} but point in {}",
            g.space(),
            x.space()
        )));
    }
    if g.is_degenerate() {
        return Ok(g.lo());
    }
    if let (Some(tg), Point::Tree(tp)) = (g.tree_form(), x) {
        return Ok(rat_to_f64(&tree::project_point(tg, tp)?));
    }
    if let Some(t) = closed_form_foot(g, x) {
        return Ok(t.clamp(g.lo(), g.hi()));
    }
    let mut f = |t: f64| distance(x, &g.eval(t)?);
    let anchor = domain_anchor(g);
    match bracket_minimum(&mut f, g.lo(), g.hi(), anchor, tol.probe_k as u32)? {
        Bracket::Escapes(_) => Err(Cat0Error::Inconclusive(
            "distance to a point kept decreasing across the probe horizon".into(),
        )),
        Bracket::Interval(a, b) => {
            let (t, _) = ternary_min(&mut f, a, b, tol.ternary_iters as u32)?;
            Ok(t)
        }
    }
}

/// Projects a boundary point onto `g` by minimizing `t -> b_xi(y, γ(t))`.
/// The result does not depend on the basepoint `y` (the Busemann cocycle
/// shifts the objective by a constant). Exact on the tree, where the flat
/// interval is always the single minimizing parameter.
pub fn project_boundary(
    g: &Geodesic,
    xi: &BoundaryPoint,
    y: &Point,
    tol: &Tolerances,
) -> Result<ProjectionResult> {
    if g.space() != xi.space() {
        return Err(Cat0Error::ModelMismatch(format!(
            "geodesic in {} but boundary point in {}",
            g.space(),
            xi.space()
        )));
    }
    if let (Some(tg), BoundaryPoint::Tree(e), Point::Tree(yy)) = (g.tree_form(), xi, y) {
        return Ok(match tree::project_end(tg, e)? {
            Ok(t) => {
                let value = rat_to_f64(&tree::busemann(e, yy, &tg.eval(&t)?));
                let tf = rat_to_f64(&t);
                ProjectionResult::Interior {
                    lo: tf,
                    hi: tf,
                    at: tf,
                    value,
                }
            }
            Err(forward) => ProjectionResult::Escapes { forward },
        });
    }
    if g.is_degenerate() {
        let value = busemann(xi, y, &g.eval(g.lo())?)?;
        return Ok(ProjectionResult::Interior {
            lo: g.lo(),
            hi: g.lo(),
            at: g.lo(),
            value,
        });
    }
    let mut f = |t: f64| busemann(xi, y, &g.eval(t)?);
    let anchor = domain_anchor(g);
    let probe_k = tol.probe_k as u32;
    match bracket_minimum(&mut f, g.lo(), g.hi(), anchor, probe_k)? {
        Bracket::Escapes(forward) => Ok(ProjectionResult::Escapes { forward }),
        Bracket::Interval(a, b) => {
            let (at, value) = ternary_min(&mut f, a, b, tol.ternary_iters as u32)?;
            let thresh = value + tol.tau_flat;
            let lo = sublevel_edge(&mut f, at, thresh, -1.0, g.lo(), probe_k, tol.eps_param)?;
            let hi = sublevel_edge(&mut f, at, thresh, 1.0, g.hi(), probe_k, tol.eps_param)?;
            Ok(ProjectionResult::Interior { lo, hi, at, value })
        }
    }
}

// ---------------------------------------------------------------------------
// The two projection retraction checks
// ---------------------------------------------------------------------------

/// Max deviation of the geodesic retraction: footing a ray `c` from the
/// boundary projection of `xi` back onto `g` must return the foot. Returns
/// `max_t |project_point(g, c(t)) - t_foot|` over the sampled ray times.
pub fn ray_projection_drift(
    g: &Geodesic,
    xi: &BoundaryPoint,
    t_samples: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    let y = g.eval(domain_anchor(g))?;
    let pr = project_boundary(g, xi, &y, tol)?;
    let at = pr.argmin().ok_or_else(|| {
        Cat0Error::Precondition("boundary projection is not interior".into())
    })?;
    let foot = g.eval(at)?;
    let c = ray_from(&foot, xi)?;
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        let tp = project_point(g, &c.eval(t)?, tol)?;
        worst = worst.max((tp - at).abs());
    }
    Ok(worst)
}

/// Outcome of projecting a convergent sequence.
#[derive(Clone, Debug)]
pub struct SequenceProjectionReport {
    /// Whether the projected parameters track the boundary projection.
    pub pass: bool,
    /// Final projected parameter (the accumulation witness).
    pub witness_param: f64,
}

/// Projects a sequence that converges at infinity and checks the projections
/// accumulate in the boundary projection of its limit (padded by
/// `eps_lemma`), or escape to the matching infinite end.
pub fn sequence_projection_check(
    g: &Geodesic,
    points: &[Point],
    tol: &Tolerances,
) -> Result<SequenceProjectionReport> {
    let y = g.eval(domain_anchor(g))?;
    let conv = converge_at_infinity(points, &y, tol.eps_conv)?;
    let xi = conv.limit.ok_or_else(|| {
        Cat0Error::Precondition("sequence does not converge at infinity".into())
    })?;
    let pr = project_boundary(g, &xi, &y, tol)?;

    let n = points.len();
    let start = n - (n / 4).max(2).min(n);
    let mut params = Vec::with_capacity(n - start);
    for x in &points[start..] {
        params.push(project_point(g, x, tol)?);
    }
    let witness = *params.last().expect("tail is nonempty");

    let pass = match pr {
        ProjectionResult::Interior { lo, hi, .. } => {
            witness >= lo - tol.eps_lemma && witness <= hi + tol.eps_lemma
        }
        ProjectionResult::Escapes { forward } => {
            let mut monotone = true;
            for w in params.windows(2) {
                if forward && w[1] <= w[0] {
                    monotone = false;
                }
                if !forward && w[1] >= w[0] {
                    monotone = false;
                }
            }
            monotone
        }
    };
    Ok(SequenceProjectionReport {
        pass,
        witness_param: witness,
    })
}

/// Smallest distance between the images of two geodesics, located by
/// minimizing the (convex) distance from `g(t)` to the image of `h`. When the
/// infimum is only approached toward an infinite end of `g` — asymptotic
/// lines — the value at the deepest probe of the bracketing walk is returned.
pub fn geodesic_gap(g: &Geodesic, h: &Geodesic, tol: &Tolerances) -> Result<f64> {
    let mut f = |t: f64| -> Result<f64> {
        let x = g.eval(t)?;
        let s = project_point(h, &x, tol)?;
        distance(&x, &h.eval(s)?)
    };
    let anchor = domain_anchor(g);
    match bracket_minimum(&mut f, g.lo(), g.hi(), anchor, tol.probe_k as u32)? {
        Bracket::Interval(a, b) => Ok(ternary_min(&mut f, a, b, tol.ternary_iters as u32)?.1),
        Bracket::Escapes(forward) => {
            let sign = if forward { 1.0 } else { -1.0 };
            f(anchor + sign * (2.0f64).powi(tol.probe_k as i32))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::h2::H2Boundary;
    use crate::space::geodesic_line;
    use crate::tree::{TreeEnd, TreePoint, Word};

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn imaginary_axis() -> Geodesic {
        geodesic_line(
            &BoundaryPoint::H2(H2Boundary::Real(0.0)),
            &BoundaryPoint::H2(H2Boundary::Infinity),
        )
        .unwrap()
    }

    /// The line fixed by the letter a, anchored at the identity vertex.
    fn tree_a_axis() -> Geodesic {
        geodesic_line(
            &BoundaryPoint::Tree(TreeEnd::periodic(&Word::parse("a^-1").unwrap()).unwrap()),
            &BoundaryPoint::Tree(TreeEnd::periodic(&Word::parse("a").unwrap()).unwrap()),
        )
        .unwrap()
    }

    fn x_axis() -> Geodesic {
        geodesic_line(
            &BoundaryPoint::euclid_dir(&[-1.0, 0.0]).unwrap(),
            &BoundaryPoint::euclid_dir(&[1.0, 0.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn orthogonal_projection_in_the_plane() {
        let t = project_point(&x_axis(), &Point::Euclid(vec![3.0, 7.0]), &tols()).unwrap();
        assert!((t - 3.0).abs() < 1e-6, "t = {t}");
    }

    #[test]
    fn h2_foot_of_one_plus_i() {
        // The orthogonal semicircle through 1+i meets the imaginary axis at
        // i*sqrt(2), which the axis parametrization reaches at (log 2)/2.
        let t = project_point(&imaginary_axis(), &Point::h2(1.0, 1.0).unwrap(), &tols()).unwrap();
        assert!((t - 0.5 * 2.0f64.ln()).abs() < 1e-6, "t = {t}");
    }

    #[test]
    fn tree_projection_is_the_branch_vertex() {
        let g = tree_a_axis();
        let t = project_point(&g, &Point::Tree(TreePoint::vertex(Word::parse("b").unwrap())), &tols())
            .unwrap();
        assert_eq!(t, 0.0);
    }

    #[test]
    fn boundary_projection_interior_and_escaping() {
        let g = imaginary_axis();
        let y = Point::h2(0.0, 1.0).unwrap();
        // An endpoint of the geodesic: the Busemann objective never stops
        // decreasing.
        let pr = project_boundary(
            &g,
            &BoundaryPoint::H2(H2Boundary::Infinity),
            &y,
            &tols(),
        )
        .unwrap();
        assert_eq!(pr, ProjectionResult::Escapes { forward: true });

        // A transverse boundary point projects to the symmetric foot i.
        let pr = project_boundary(&g, &BoundaryPoint::H2(H2Boundary::Real(1.0)), &y, &tols())
            .unwrap();
        match pr {
            ProjectionResult::Interior { lo, hi, at, value } => {
                assert!(at.abs() < 1e-6, "at = {at}");
                assert!(value.abs() < 1e-9, "value = {value}");
                // Quadratic minimum: the tau_flat sublevel has width
                // about 2*sqrt(2 tau_flat).
                assert!(lo < 0.0 && hi > 0.0);
                assert!(hi < 3e-3 && lo > -3e-3, "[{lo}, {hi}]");
            }
            other => panic!("expected interior, got {other:?}"),
        }
    }

    #[test]
    fn tree_boundary_projection_is_exact() {
        let g = tree_a_axis();
        let y = Point::Tree(TreePoint::vertex(Word::identity()));
        let xi = BoundaryPoint::Tree(TreeEnd::periodic(&Word::parse("b").unwrap()).unwrap());
        let pr = project_boundary(&g, &xi, &y, &tols()).unwrap();
        assert_eq!(
            pr,
            ProjectionResult::Interior {
                lo: 0.0,
                hi: 0.0,
                at: 0.0,
                value: 0.0
            }
        );
    }

    #[test]
    fn orthogonal_direction_gives_unbounded_flat_interval() {
        // In the plane the Busemann function of a perpendicular direction is
        // constant along the geodesic: the whole line minimizes.
        let g = x_axis();
        let y = Point::Euclid(vec![0.0, 0.0]);
        let xi = BoundaryPoint::euclid_dir(&[0.0, 1.0]).unwrap();
        let pr = project_boundary(&g, &xi, &y, &tols()).unwrap();
        match pr {
            ProjectionResult::Interior { lo, hi, value, .. } => {
                assert!(lo.is_infinite() && lo < 0.0);
                assert!(hi.is_infinite() && hi > 0.0);
                assert!(value.abs() < 1e-12);
            }
            other => panic!("expected flat interior, got {other:?}"),
        }
    }

    #[test]
    fn ray_retraction_returns_to_the_foot() {
        let samples = [1.0, 5.0, 20.0];
        // H2: ray from the foot i towards 1.
        let drift = ray_projection_drift(
            &imaginary_axis(),
            &BoundaryPoint::H2(H2Boundary::Real(1.0)),
            &samples,
            &tols(),
        )
        .unwrap();
        assert!(drift <= 1e-6, "drift = {drift}");

        // Tree: collapses to the branch vertex, exactly.
        let g = tree_a_axis();
        let xi = BoundaryPoint::Tree(TreeEnd::periodic(&Word::parse("b").unwrap()).unwrap());
        let drift = ray_projection_drift(&g, &xi, &samples, &tols()).unwrap();
        assert_eq!(drift, 0.0);

        // Plane: vertical ray over the origin.
        let drift = ray_projection_drift(
            &x_axis(),
            &BoundaryPoint::euclid_dir(&[0.0, 1.0]).unwrap(),
            &samples,
            &tols(),
        )
        .unwrap();
        assert!(drift <= 1e-6, "drift = {drift}");
    }

    #[test]
    fn sequence_projection_tracks_the_limit() {
        let g = imaginary_axis();
        // Sequence sinking to the real point 1: projections accumulate at 0.
        let sink: Vec<Point> = (1..=20)
            .map(|n| Point::h2(1.0 - (0.5f64).powi(n), (0.5f64).powi(n)).unwrap())
            .collect();
        let rep = sequence_projection_check(&g, &sink, &tols()).unwrap();
        assert!(rep.pass, "witness {}", rep.witness_param);
        assert!(rep.witness_param.abs() < 1e-3);

        // Sequence running up the axis itself: escapes to the + end.
        let up: Vec<Point> = (1..=12)
            .map(|n| Point::h2(0.0, (2.0f64).powi(n)).unwrap())
            .collect();
        let rep = sequence_projection_check(&g, &up, &tols()).unwrap();
        assert!(rep.pass);

        // Tree: b a^n converges to b a a a..., all projections at the origin.
        let gt = tree_a_axis();
        let seq: Vec<Point> = (1..=10)
            .map(|n| {
                let mut w = Word::parse("b").unwrap();
                for _ in 0..n {
                    w = w.mul(&Word::parse("a").unwrap());
                }
                Point::Tree(TreePoint::vertex(w))
            })
            .collect();
        let rep = sequence_projection_check(&gt, &seq, &tols()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.witness_param, 0.0);
    }
}
