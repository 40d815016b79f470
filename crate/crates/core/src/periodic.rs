//! Periodic orbits of a view: scanning, classification, and the parameter
//! solvers for window birth (saddle-node) and window end (crisis).

use crate::error::{Error, Result};
use crate::map::{bisect, logistic_deriv, MapView, CRIT};
use crate::tol;
use crate::trapping;

/// Sign structure of the multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitKind {
    /// Positive multiplier: the map preserves orientation along the orbit.
    Regular,
    /// Negative multiplier: orientation reverses each period.
    Flip,
    /// Multiplier within [`tol::TOL_SUPER`] of zero: the orbit passes through
    /// the critical point at working precision.
    Superstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Attracting,
    Repelling,
    /// |multiplier| within [`tol::TOL_NEUTRAL`] of 1: too close to a
    /// bifurcation to call.
    Neutral,
}

/// A periodic orbit of a view, stored starting at the point nearest the
/// critical point.
#[derive(Clone, Debug)]
pub struct PeriodicOrbit {
    /// Orbit points in dynamical order; `points[0]` is nearest to `c`.
    pub points: Vec<f64>,
    /// Exact period under the view.
    pub period: usize,
    /// Derivative of the period-th iterate along the orbit.
    pub multiplier: f64,
    pub kind: OrbitKind,
    pub stability: Stability,
}

impl PeriodicOrbit {
    /// The orbit point nearest the critical point.
    pub fn p1(&self) -> f64 {
        self.points[0]
    }

    /// Distance of the orbit from the critical point.
    pub fn rho(&self) -> f64 {
        (self.p1() - CRIT).abs()
    }

    /// Number of intervals in the cyclic trapping region bounded by this
    /// orbit: the period for regular orbits, twice that for flip orbits
    /// (each orbit point bounds two adjacent intervals). Superstable orbits
    /// carry collapsed regions and count like regular ones.
    pub fn region_period(&self) -> usize {
        match self.kind {
            OrbitKind::Flip => 2 * self.period,
            _ => self.period,
        }
    }
}

/// Result of scanning one view for orbits of one period.
#[derive(Clone, Debug)]
pub struct OrbitScan {
    /// Exact-period orbits found, outermost first (decreasing distance from
    /// the critical point).
    pub orbits: Vec<PeriodicOrbit>,
    /// Roots of `V^k(x) - x` located (all periods dividing k, after
    /// deduplication).
    pub roots_found: usize,
    /// Set when the scan saw evidence of missed structure: an iterated orbit
    /// point failed to match any root, grouping failed, the dip budget ran
    /// out, or the exact-period root count is not a multiple of k.
    pub coarse_scan: bool,
}

/// Classify a multiplier into orbit kind and stability.
pub fn classify(multiplier: f64) -> (OrbitKind, Stability) {
    let kind = if multiplier.abs() <= tol::TOL_SUPER {
        OrbitKind::Superstable
    } else if multiplier < 0.0 {
        OrbitKind::Flip
    } else {
        OrbitKind::Regular
    };
    let stability = if (multiplier.abs() - 1.0).abs() <= tol::TOL_NEUTRAL {
        Stability::Neutral
    } else if multiplier.abs() < 1.0 {
        Stability::Attracting
    } else {
        Stability::Repelling
    };
    (kind, stability)
}

/// Distinct orbits closer than this (in canonical-point distance) are the
/// same orbit seen from two roots. Twin orbits born at a fold separate like
/// the square root of the parameter distance, so even at BRACKET_MU past
/// birth they sit ~1e-5 apart; points of one orbit recovered from different
/// roots agree to Newton tolerance (~1e-12). The value also bounds how
/// sharply the transcritical crossing at mu = 1 is resolved, so it is kept
/// at the root-merge scale rather than looser.
const DEDUP_ORBIT: f64 = tol::ROOT_MERGE;

/// Golden-section refinement windows spent per scan before giving up and
/// flagging the scan coarse.
const DIP_BUDGET: usize = 20_000;

/// Find all orbits of exact period `k` of `view`.
///
/// Roots of `g(x) = V^k(x) - x` are located on a uniform grid of at least
/// `scan_density` cells (raised to `1000 * k` if below) by three detectors:
/// grid points where `g` vanishes outright, sign changes between neighbours,
/// and golden-section refinement of sampled local extrema with the wrong
/// sign, which exposes root pairs narrower than the grid (fresh folds).
/// Roots are then grouped into orbits, walking each orbit with a Newton
/// re-polish per step so error does not compound along repelling orbits.
pub fn find_periodic_orbits(
    view: &MapView,
    k: usize,
    scan_density: usize,
) -> Result<OrbitScan> {
    if k == 0 {
        return Err(Error::Parameter("period must be >= 1".into()));
    }
    let dom = view.domain();
    if dom.width() <= 0.0 {
        return Err(Error::Parameter("view domain is degenerate".into()));
    }
    let n = scan_density.max(1000 * k);
    let h = dom.width() / n as f64;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { dom.hi } else { dom.lo + i as f64 * h })
        .collect();
    let gk = |x: f64| {
        let mut y = x;
        for _ in 0..k {
            y = view.eval_raw(y);
        }
        y - x
    };
    let gv: Vec<f64> = xs.iter().map(|&x| gk(x)).collect();

    let mut roots: Vec<f64> = Vec::new();
    let mut zeroed = vec![false; n + 1];
    for i in 0..=n {
        if gv[i].abs() <= tol::TOL_ZERO {
            zeroed[i] = true;
            roots.push(xs[i]);
        }
    }
    for i in 0..n {
        if zeroed[i] || zeroed[i + 1] {
            continue;
        }
        if gv[i].signum() != gv[i + 1].signum() {
            roots.push(bisect(&gk, xs[i], xs[i + 1])?);
        }
    }

    let mut coarse = false;
    let mut dips = 0usize;
    {
        let mut refine = |a: f64, b: f64, maximize: bool, roots: &mut Vec<f64>| {
            if dips >= DIP_BUDGET {
                coarse = true;
                return;
            }
            dips += 1;
            let (xm, gm) = golden_extremum(&gk, a, b, maximize);
            if gm.abs() <= tol::TOL_ZERO {
                roots.push(xm);
                return;
            }
            if (gm > 0.0) != maximize {
                return;
            }
            for (lo, hi) in [(a, xm), (xm, b)] {
                let (gl, gh) = (gk(lo), gk(hi));
                if gl.abs() > tol::TOL_ZERO
                    && gh.abs() > tol::TOL_ZERO
                    && gl.signum() != gh.signum()
                {
                    if let Ok(r) = bisect(&gk, lo, hi) {
                        roots.push(r);
                    }
                }
            }
        };
        for i in 1..n {
            if zeroed[i - 1] || zeroed[i] || zeroed[i + 1] {
                continue;
            }
            if gv[i] < -tol::TOL_ZERO && gv[i] >= gv[i - 1] && gv[i] >= gv[i + 1] {
                refine(xs[i - 1], xs[i + 1], true, &mut roots);
            } else if gv[i] > tol::TOL_ZERO && gv[i] <= gv[i - 1] && gv[i] <= gv[i + 1] {
                refine(xs[i - 1], xs[i + 1], false, &mut roots);
            }
        }
        // Cells next to an exact-zero grid root can hide a second root with
        // no sign change; probe both directions.
        for i in 0..=n {
            if !zeroed[i] {
                continue;
            }
            if i < n && !zeroed[i + 1] {
                refine(xs[i], xs[i + 1], true, &mut roots);
                refine(xs[i], xs[i + 1], false, &mut roots);
            }
            if i > 0 && !zeroed[i - 1] {
                refine(xs[i - 1], xs[i], true, &mut roots);
                refine(xs[i - 1], xs[i], false, &mut roots);
            }
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= tol::ROOT_MERGE);

    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    let mut canon_seen: Vec<f64> = Vec::new();
    let mut exact_k_roots = 0usize;
    for &r in &roots {
        let Some((d, _)) = exact_period(view, r, k) else {
            coarse = true;
            continue;
        };
        if d < k {
            continue;
        }
        exact_k_roots += 1;
        let mut pts = Vec::with_capacity(k);
        let mut y = polish_root(view, r, k).unwrap_or(r);
        for i in 0..k {
            pts.push(y);
            if i + 1 < k {
                let raw = view.eval_raw(y);
                // Re-polishing resets the error to root tolerance at each
                // step; along strongly repelling orbits the raw iterate
                // alone would drift by the accumulated multiplier.
                y = match polish_root(view, raw, k) {
                    Some(p) if (p - raw).abs() <= 1e-7 => p,
                    _ => raw,
                };
            }
        }
        let canon = pts.iter().cloned().fold(f64::INFINITY, f64::min);
        if canon_seen.iter().any(|&c| (c - canon).abs() <= DEDUP_ORBIT) {
            continue;
        }
        canon_seen.push(canon);
        let p1_idx = (0..k)
            .min_by(|&i, &j| {
                (pts[i] - CRIT).abs().total_cmp(&(pts[j] - CRIT).abs())
            })
            .unwrap();
        pts.rotate_left(p1_idx);
        let (_, mult) = view.iterate_with_derivative(pts[0], k as u64)?;
        let (kind, stability) = classify(mult);
        orbits.push(PeriodicOrbit {
            points: pts,
            period: k,
            multiplier: mult,
            kind,
            stability,
        });
    }
    if exact_k_roots % k != 0 {
        coarse = true;
    }
    orbits.sort_by(|a, b| b.rho().total_cmp(&a.rho()));
    Ok(OrbitScan {
        orbits,
        roots_found: roots.len(),
        coarse_scan: coarse,
    })
}

/// Smallest divisor `d` of `k` with `V^d(x) = x` at root tolerance (scaled
/// by the local derivative), together with the derivative of `V^d` at `x`.
pub(crate) fn exact_period(view: &MapView, x: f64, k: usize) -> Option<(usize, f64)> {
    for d in divisors(k) {
        let (y, dd) = view.iterate_with_derivative(x, d as u64).ok()?;
        if (y - x).abs() <= (dd.abs() + 1.0) * tol::ROOT_MERGE {
            return Some((d, dd));
        }
    }
    None
}

/// Newton polish of a root of `V^k(x) - x`. Returns `None` when Newton
/// leaves the domain, stalls (derivative of the residual near zero, as at a
/// fold), or fails to reach root tolerance.
pub(crate) fn polish_root(view: &MapView, x0: f64, k: usize) -> Option<f64> {
    let dom = view.domain();
    let mut x = x0;
    for _ in 0..30 {
        let (y, d) = view.iterate_with_derivative(x, k as u64).ok()?;
        let gp = d - 1.0;
        if gp.abs() < 1e-12 {
            return None;
        }
        let step = (y - x) / gp;
        let xn = x - step;
        if !dom.contains(xn) {
            return None;
        }
        x = xn;
        if step.abs() <= 0.5 * tol::TOL_ROOT {
            return Some(x);
        }
    }
    let (y, d) = view.iterate_with_derivative(x, k as u64).ok()?;
    if (y - x).abs() <= (d.abs() + 1.0) * tol::TOL_ROOT {
        Some(x)
    } else {
        None
    }
}

fn divisors(k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=k).filter(|d| k % d == 0).collect();
    out.sort_unstable();
    out
}

/// Golden-section search for an extremum of `g` on `[a, b]`.
fn golden_extremum(g: impl Fn(f64) -> f64, a: f64, b: f64, maximize: bool) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let sign = if maximize { -1.0 } else { 1.0 };
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (sign * g(x1), sign * g(x2));
    for _ in 0..70 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = sign * g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = sign * g(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, g(xm))
}

/// Parameter at which new orbits of exact period `k` first exist inside the
/// bracket, resolved by bisection on the orbit count to [`tol::BRACKET_MU`]
/// and then polished onto the fold condition (`V^k(x) = x`, `(V^k)'(x) = 1`)
/// with a two-variable Newton iteration when it converges.
pub fn solve_window_birth(k: usize, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi <= 4.0) {
        return Err(Error::Parameter(format!(
            "bracket [{lo}, {hi}] not inside (0, 4]"
        )));
    }
    let count = |mu: f64| -> Result<usize> {
        let v = MapView::base(mu)?;
        Ok(find_periodic_orbits(&v, k, 1000 * k)?.orbits.len())
    };
    let n_lo = count(lo)?;
    if count(hi)? <= n_lo {
        return Err(Error::NotFound(format!(
            "no new period-{k} orbits appear on [{lo}, {hi}]"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol::BRACKET_MU {
        let m = 0.5 * (a + b);
        if count(m)? > n_lo {
            b = m;
        } else {
            a = m;
        }
    }
    let mu_bis = 0.5 * (a + b);
    Ok(polish_fold(k, mu_bis, b).unwrap_or(mu_bis))
}

/// Two-variable Newton refinement of a fold: solve `F^k(x) - x = 0` and
/// `(F^k)'(x) - 1 = 0` for `(x, mu)`, seeded from the orbit with multiplier
/// nearest +1 just above the bisection value. Falls back to `None` (caller
/// keeps the bisection value) when no fold-like orbit exists at the probe
/// parameter or Newton wanders.
fn polish_fold(k: usize, mu0: f64, mu_probe: f64) -> Option<f64> {
    let v = MapView::base(mu_probe).ok()?;
    let scan = find_periodic_orbits(&v, k, 1000 * k).ok()?;
    let cand = scan
        .orbits
        .iter()
        .min_by(|a, b| {
            (a.multiplier - 1.0)
                .abs()
                .total_cmp(&(b.multiplier - 1.0).abs())
        })?;
    if (cand.multiplier - 1.0).abs() > 0.5 {
        return None;
    }
    let (mut x, mut mu) = (cand.p1(), mu0);
    for _ in 0..60 {
        let (g1, g2, a, b, c, m) = fold_system(mu, x, k);
        let det = (a - 1.0) * m - b * c;
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = (g1 * m - g2 * b) / det;
        let dmu = ((a - 1.0) * g2 - c * g1) / det;
        x -= dx;
        mu -= dmu;
        if !(-0.01..=1.01).contains(&x) || (mu - mu0).abs() > 0.01 {
            return None;
        }
        if dx.abs() < 1e-13 && dmu.abs() < 1e-13 {
            return ((mu - mu0).abs() <= 10.0 * tol::BRACKET_MU).then_some(mu);
        }
    }
    None
}

/// Value and sensitivities of `F_mu^k` at `x` by forward accumulation:
/// returns `(F^k(x) - x, (F^k)'(x) - 1, dy/dx, dy/dmu, d2y/dx2, d(dy/dx)/dmu)`.
fn fold_system(mu: f64, x: f64, k: usize) -> (f64, f64, f64, f64, f64, f64) {
    let (mut y, mut a, mut b, mut c, mut m) = (x, 1.0, 0.0, 0.0, 0.0);
    for _ in 0..k {
        let s = 1.0 - 2.0 * y;
        let na = mu * s * a;
        let nb = y * (1.0 - y) + mu * s * b;
        let nc = mu * (s * c - 2.0 * a * a);
        let nm = s * a + mu * (s * m - 2.0 * b * a);
        y = mu * y * (1.0 - y);
        a = na;
        b = nb;
        c = nc;
        m = nm;
    }
    (y - x, a - 1.0, a, b, c, m)
}

/// Parameter at which the critical orbit lands on the boundary orbit of the
/// period-`k_region` family after `preperiod` steps (the crisis ending the
/// family's window).
///
/// The residual `F^preperiod(c) - p1(mu)` is scanned for sign changes across
/// the bracket; each candidate is resolved by bisection to
/// [`tol::BRACKET_MU`] and then confirmed by checking that the family's
/// cyclic trapping region holds just below the candidate and fails just
/// above it. Without the confirmation, incidental zero crossings of the
/// residual inside the chaotic regime would be reported as crises.
pub fn solve_crisis(k_region: usize, preperiod: usize, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi <= 4.0) {
        return Err(Error::Parameter(format!(
            "bracket [{lo}, {hi}] not inside (0, 4]"
        )));
    }
    if k_region == 0 || preperiod == 0 {
        return Err(Error::Parameter(
            "region period and preperiod must be >= 1".into(),
        ));
    }
    let residual = |mu: f64| -> Option<f64> {
        let v = MapView::base(mu).ok()?;
        let mut y = CRIT;
        for _ in 0..preperiod {
            y = v.eval_raw(y);
        }
        Some(y - boundary_orbit(mu, k_region)?.p1())
    };
    let n = 64;
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let mu = lo + (hi - lo) * i as f64 / n as f64;
        match residual(mu) {
            Some(r) => {
                if let Some((pm, pr)) = prev {
                    if pr.signum() != r.signum() {
                        candidates.push((pm, mu));
                    }
                }
                prev = Some((mu, r));
            }
            None => prev = None,
        }
    }
    for (a, b) in candidates {
        let (mut a, mut b) = (a, b);
        let ra = residual(a).unwrap();
        let mut sa = ra.signum();
        while b - a > tol::BRACKET_MU {
            let m = 0.5 * (a + b);
            match residual(m) {
                Some(rm) if rm.signum() == sa => {
                    a = m;
                    sa = rm.signum();
                }
                Some(_) => b = m,
                None => break,
            }
        }
        let mu_star = 0.5 * (a + b);
        if crisis_confirms(k_region, mu_star) {
            return Ok(mu_star);
        }
    }
    Err(Error::NotFound(format!(
        "no confirmed period-{k_region} crisis on [{lo}, {hi}]"
    )))
}

/// The repelling regular orbit bounding the period-`k` family at `mu`:
/// the nonzero fixed point for `k = 1`, otherwise the outermost regular
/// repelling orbit of exact period `k`.
fn boundary_orbit(mu: f64, k: usize) -> Option<PeriodicOrbit> {
    if k == 1 {
        if mu <= 1.0 {
            return None;
        }
        let p = 1.0 - 1.0 / mu;
        let mult = logistic_deriv(mu, p);
        let (kind, stability) = classify(mult);
        return Some(PeriodicOrbit {
            points: vec![p],
            period: 1,
            multiplier: mult,
            kind,
            stability,
        });
    }
    let v = MapView::base(mu).ok()?;
    let scan = find_periodic_orbits(&v, k, 1000 * k).ok()?;
    scan.orbits
        .into_iter()
        .filter(|o| o.kind == OrbitKind::Regular && o.stability == Stability::Repelling)
        .max_by(|a, b| a.rho().total_cmp(&b.rho()))
}

/// A genuine crisis ends the family: its trapping region must build just
/// below the candidate parameter and fail just above it.
fn crisis_confirms(k_region: usize, mu_star: f64) -> bool {
    let delta = 1e-6;
    region_valid(k_region, mu_star - delta) == Some(true)
        && region_valid(k_region, mu_star + delta) != Some(true)
}

fn region_valid(k: usize, mu: f64) -> Option<bool> {
    if !(mu > 0.0 && mu <= 4.0) {
        return None;
    }
    let v = MapView::base(mu).ok()?;
    let orbit = boundary_orbit(mu, k)?;
    Some(trapping::build_cyclic_region(&v, &orbit).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify(0.5), (OrbitKind::Regular, Stability::Attracting));
        assert_eq!(classify(-0.5), (OrbitKind::Flip, Stability::Attracting));
        assert_eq!(classify(1.5), (OrbitKind::Regular, Stability::Repelling));
        assert_eq!(classify(-1.5), (OrbitKind::Flip, Stability::Repelling));
        assert_eq!(classify(0.0), (OrbitKind::Superstable, Stability::Attracting));
        assert_eq!(classify(1e-10).0, OrbitKind::Superstable);
        assert_eq!(classify(1.0).1, Stability::Neutral);
        assert_eq!(classify(-1.0).1, Stability::Neutral);
        assert_eq!(classify(1.0 + 2e-9).1, Stability::Repelling);
    }

    #[test]
    fn fixed_points_match_closed_forms() {
        let mu = 3.2;
        let v = MapView::base(mu).unwrap();
        let scan = find_periodic_orbits(&v, 1, 2000).unwrap();
        assert_eq!(scan.orbits.len(), 2);
        assert!(!scan.coarse_scan);
        // Outermost first: the zero fixed point.
        let zero = &scan.orbits[0];
        let inner = &scan.orbits[1];
        assert!(zero.p1().abs() < 1e-12);
        assert!((zero.multiplier - mu).abs() < 1e-9);
        assert_eq!(zero.stability, Stability::Repelling);
        assert!((inner.p1() - (1.0 - 1.0 / mu)).abs() < 1e-12);
        assert!((inner.multiplier - (2.0 - mu)).abs() < 1e-9);
        assert_eq!(inner.kind, OrbitKind::Flip);
        assert_eq!(inner.stability, Stability::Repelling);
        assert_eq!(inner.region_period(), 2);
    }

    #[test]
    fn two_cycle_matches_quadratic_roots() {
        // The 2-cycle of the base map solves a quadratic:
        // points (mu + 1 +- sqrt((mu + 1)(mu - 3))) / (2 mu),
        // multiplier 4 + 2 mu - mu^2.
        let mu = 3.2f64;
        let s = ((mu + 1.0) * (mu - 3.0)).sqrt();
        let lo = (mu + 1.0 - s) / (2.0 * mu);
        let hi = (mu + 1.0 + s) / (2.0 * mu);
        let v = MapView::base(mu).unwrap();
        let scan = find_periodic_orbits(&v, 2, 2000).unwrap();
        assert_eq!(scan.orbits.len(), 1, "exact-period filter drops fixed points");
        let orbit = &scan.orbits[0];
        assert!((orbit.p1() - lo).abs() < 1e-10);
        assert!((orbit.points[1] - hi).abs() < 1e-10);
        assert!((orbit.multiplier - (4.0 + 2.0 * mu - mu * mu)).abs() < 1e-9);
        assert_eq!(orbit.stability, Stability::Attracting);
        assert_eq!(orbit.kind, OrbitKind::Regular);
    }

    #[test]
    fn period_three_pair_inside_window() {
        let mu = 3.85;
        let v = MapView::base(mu).unwrap();
        let scan = find_periodic_orbits(&v, 3, 3000).unwrap();
        assert_eq!(scan.orbits.len(), 2);
        let regular: Vec<_> = scan
            .orbits
            .iter()
            .filter(|o| o.kind == OrbitKind::Regular)
            .collect();
        let flip: Vec<_> = scan
            .orbits
            .iter()
            .filter(|o| o.kind == OrbitKind::Flip)
            .collect();
        assert_eq!(regular.len(), 1);
        assert_eq!(flip.len(), 1);
        assert_eq!(regular[0].stability, Stability::Repelling);
        assert_eq!(flip[0].stability, Stability::Repelling);
        // The regular orbit bounds the window structure: it sits farther
        // from c than the flip orbit's nearest point.
        assert!(regular[0].rho() > flip[0].rho());
        // Orbit points genuinely return.
        for o in &scan.orbits {
            for &p in &o.points {
                let y = v.eval_n(p, 3).unwrap();
                assert!((y - p).abs() < 1e-8);
            }
        }
        // Independent root count: a plain dense sign scan of F^3 - x must
        // agree with the grouped result (6 period-3 roots + 2 fixed points).
        let dense = 200_000;
        let mut crossings = 0;
        let g = |x: f64| v.eval_n(x, 3).unwrap() - x;
        let mut prev = g(0.0);
        for i in 1..=dense {
            let x = i as f64 / dense as f64;
            let cur = g(x);
            if prev == 0.0 || prev.signum() != cur.signum() {
                crossings += 1;
            }
            prev = cur;
        }
        assert_eq!(crossings, 8);
        assert_eq!(scan.roots_found, 8);
    }

    #[test]
    fn fresh_fold_pair_is_resolved_below_grid_width() {
        // Just above the period-3 birth the twin orbits are separated by far
        // less than the scan grid; the dip refinement must still find both.
        let below = find_periodic_orbits(&MapView::base(3.8284).unwrap(), 3, 3000).unwrap();
        assert_eq!(below.orbits.len(), 0);
        let above = find_periodic_orbits(&MapView::base(3.8285).unwrap(), 3, 3000).unwrap();
        assert_eq!(above.orbits.len(), 2);
    }

    #[test]
    fn window_birth_period_three() {
        let mu = solve_window_birth(3, (3.8, 3.86)).unwrap();
        assert!(
            (mu - 3.8284271247461903).abs() < 1e-9,
            "got {mu}"
        );
    }

    #[test]
    fn window_birth_period_one_transcritical() {
        let mu = solve_window_birth(1, (0.5, 1.5)).unwrap();
        assert!((mu - 1.0).abs() < 1e-9, "got {mu}");
    }

    #[test]
    fn window_birth_period_five() {
        let mu = solve_window_birth(5, (3.7, 3.75)).unwrap();
        assert!((mu - 3.738172375265962).abs() < 1e-6, "got {mu}");
    }

    #[test]
    fn crisis_of_flip_fixed_family() {
        let mu = solve_crisis(1, 3, (3.6, 3.75)).unwrap();
        assert!((mu - 3.678573510428322).abs() < 1e-8, "got {mu}");
    }

    #[test]
    fn crisis_ending_period_three_window() {
        let mu = solve_crisis(3, 6, (3.84, 3.86)).unwrap();
        assert!((mu - 3.856800652477765).abs() < 1e-6, "got {mu}");
    }

    #[test]
    fn crisis_requires_sign_change_in_bracket() {
        assert!(matches!(
            solve_crisis(1, 3, (3.2, 3.4)),
            Err(Error::NotFound(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scanned_orbits_return_and_multiplier_checks(mu in 3.0f64..3.9, k in 1usize..3) {
            let v = MapView::base(mu).unwrap();
            let scan = find_periodic_orbits(&v, k, 1500 * k).unwrap();
            for o in &scan.orbits {
                prop_assert_eq!(o.points.len(), k);
                for &p in &o.points {
                    let y = v.eval_n(p, k as u64).unwrap();
                    prop_assert!((y - p).abs() < 1e-8);
                }
                // Multiplier against a central difference of V^k (stencil
                // must stay inside the domain, so skip boundary orbits).
                let h = 1e-7;
                if o.p1() >= h && o.p1() <= 1.0 - h {
                    let fd = (v.eval_n(o.p1() + h, k as u64).unwrap()
                        - v.eval_n(o.p1() - h, k as u64).unwrap()) / (2.0 * h);
                    prop_assert!((o.multiplier - fd).abs() < 1e-4 * o.multiplier.abs().max(1.0));
                }
            }
        }
    }
}
