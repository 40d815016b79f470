//! Cyclic trapping regions around periodic orbits, in the maximal
//! convention.
//!
//! A cyclic trapping region over a boundary orbit is a cycle of closed
//! intervals `J_1, ..., J_r`, each `J_i` spanned by an orbit point `p_i` and
//! a partner `q_i`, with `V(J_i)` contained in `J_(i+1)` (indices cyclic).
//! `J_1` contains the critical point and its image sits strictly inside
//! `J_2`; every other image fills its target exactly. The maximal choice
//! takes `q_1` to be the symmetric partner of `p_1` (same value, opposite
//! branch) and recovers the remaining partners backward through branch
//! preimages: `V(q_i) = q_(i+1)` with `q_(r+1) = q_1`.
//!
//! Regular orbits (positive multiplier) bound `r = k` intervals; flip orbits
//! bound `r = 2k`, the p-sequence wrapping the orbit twice so that two
//! intervals meet at each orbit point.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::{bisect, MapView, CRIT};
use crate::periodic::{OrbitKind, PeriodicOrbit};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Regular,
    Flip,
}

/// A cyclic trapping region together with the orbit that bounds it.
#[derive(Clone, Debug)]
pub struct CyclicTrappingRegion {
    /// `J_1, ..., J_r` in dynamical order; `intervals[0]` contains `c`.
    pub intervals: Vec<Interval>,
    pub kind: RegionKind,
    /// The boundary orbit (period `k`; `r` is `k` or `2k`).
    pub orbit: PeriodicOrbit,
    /// Set when the boundary orbit passes through the critical point at
    /// working precision: the intervals collapse to points and the region
    /// carries no interior.
    pub degenerate: bool,
}

impl CyclicTrappingRegion {
    /// Number of intervals `r`.
    pub fn period(&self) -> usize {
        self.intervals.len()
    }

    /// The central interval (the one containing the critical point).
    pub fn j1(&self) -> Interval {
        self.intervals[0]
    }

    pub fn p1(&self) -> f64 {
        self.orbit.p1()
    }

    /// Hull of all intervals.
    pub fn hull(&self) -> Interval {
        self.intervals
            .iter()
            .skip(1)
            .fold(self.intervals[0], |acc, iv| acc.hull(iv))
    }

    /// Least distance from `x` to the region (zero inside any interval).
    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` lies in the open interior of some interval.
    pub fn contains_interior(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains_interior(x))
    }
}

/// Build the maximal cyclic trapping region over `orbit` under `view`.
///
/// Fails when the orbit admits no such region: the symmetric partner does
/// not exist, a branch preimage in the q-chain leaves its branch, interiors
/// of distinct intervals overlap beyond [`tol::TOL_REGION`], or an interval
/// image overshoots its target. An orbit through the critical point (at
/// working precision) yields a degenerate region of zero-width intervals,
/// flagged but not an error.
pub fn build_cyclic_region(
    view: &MapView,
    orbit: &PeriodicOrbit,
) -> Result<CyclicTrappingRegion> {
    let k = orbit.period;
    if k == 0 || orbit.points.len() != k {
        return Err(Error::Parameter("orbit has inconsistent period".into()));
    }
    let r = orbit.region_period();
    let kind = match orbit.kind {
        OrbitKind::Flip => RegionKind::Flip,
        _ => RegionKind::Regular,
    };
    let p: Vec<f64> = (0..r).map(|i| orbit.points[i % k]).collect();
    if orbit.kind == OrbitKind::Superstable || orbit.rho() <= 10.0 * tol::TOL_ROOT {
        return Ok(CyclicTrappingRegion {
            intervals: p.iter().map(|&x| Interval::point(x)).collect(),
            kind,
            orbit: orbit.clone(),
            degenerate: true,
        });
    }

    let q1 = view.symmetric_point(p[0])?;
    let mut q = vec![f64::NAN; r];
    q[0] = q1;
    let mut next = q1;
    for i in (1..r).rev() {
        let qi = branch_preimage(view, next, p[i])?;
        q[i] = qi;
        next = qi;
    }
    let intervals: Vec<Interval> = (0..r).map(|i| Interval::new(p[i], q[i])).collect();

    if !intervals[0].contains_interior(CRIT) {
        return Err(Error::Region(
            "central interval does not contain the critical point".into(),
        ));
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| intervals[a].lo.total_cmp(&intervals[b].lo));
    for w in order.windows(2) {
        let overlap = intervals[w[0]].interior_overlap(&intervals[w[1]]);
        if overlap > tol::TOL_REGION {
            return Err(Error::Region(format!(
                "interval interiors overlap by {overlap:.3e}"
            )));
        }
    }
    for i in 0..r {
        let img = view.image_of(intervals[i]);
        let tgt = &intervals[(i + 1) % r];
        if !tgt.contains_interval(&img, tol::TOL_REGION) {
            let over = (tgt.lo - img.lo).max(img.hi - tgt.hi);
            return Err(Error::Region(format!(
                "image of interval {} overshoots interval {} by {over:.3e}",
                i + 1,
                (i + 1) % r + 1
            )));
        }
    }
    Ok(CyclicTrappingRegion {
        intervals,
        kind,
        orbit: orbit.clone(),
        degenerate: false,
    })
}

/// Preimage of `target` under one view step, restricted to the branch of
/// the domain on the same side of `c` as `anchor`. For the base map the
/// quadratic is solved directly; for composite views the preimage is
/// bisected, which stays on the chosen branch by construction.
fn branch_preimage(view: &MapView, target: f64, anchor: f64) -> Result<f64> {
    let dom = view.domain();
    let (lo, hi) = if anchor < CRIT {
        (dom.lo, CRIT)
    } else {
        (CRIT, dom.hi)
    };
    if view.step() == 1 {
        let mu = view.mu();
        let rad = 1.0 - 4.0 * target / mu;
        if rad < -1e-9 {
            return Err(Error::Region(format!(
                "no preimage of {target}: above the critical value"
            )));
        }
        let s = rad.max(0.0).sqrt();
        let y = if anchor < CRIT {
            0.5 * (1.0 - s)
        } else {
            0.5 * (1.0 + s)
        };
        if y < lo - tol::DOMAIN_SLACK || y > hi + tol::DOMAIN_SLACK {
            return Err(Error::Region(format!(
                "branch preimage {y} leaves the view domain"
            )));
        }
        return Ok(y.clamp(lo, hi));
    }
    let g = |y: f64| view.eval_raw(y) - target;
    let (ga, gb) = (g(lo), g(hi));
    if ga.abs() <= tol::TOL_ZERO {
        return Ok(lo);
    }
    if gb.abs() <= tol::TOL_ZERO {
        return Ok(hi);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::Region(format!(
            "no preimage of {target} on the branch [{lo}, {hi}]"
        )));
    }
    bisect(g, lo, hi)
}

/// Sampled check of the trapping property, independent of how the region
/// was built.
#[derive(Clone, Copy, Debug)]
pub struct RegionReport {
    pub passed: bool,
    /// Samples whose image left the target interval by more than
    /// [`tol::TOL_REGION`].
    pub containment_failures: usize,
    /// Largest distance any sampled image landed outside its target.
    pub max_overshoot: f64,
    pub interiors_disjoint: bool,
}

/// Sample each interval uniformly (`samples_per_interval` points, endpoints
/// included) and test that images land in the next interval, plus pairwise
/// interior disjointness.
pub fn verify_region(
    view: &MapView,
    region: &CyclicTrappingRegion,
    samples_per_interval: usize,
) -> RegionReport {
    let r = region.intervals.len();
    let spi = samples_per_interval.max(2);
    let mut failures = 0usize;
    let mut max_over = 0.0f64;
    for i in 0..r {
        let j = region.intervals[i];
        let t = region.intervals[(i + 1) % r];
        for s in 0..spi {
            let x = if j.is_degenerate() {
                j.lo
            } else {
                j.lo + j.width() * s as f64 / (spi - 1) as f64
            };
            let d = t.distance_to(view.eval_raw(x));
            if d > tol::TOL_REGION {
                failures += 1;
            }
            max_over = max_over.max(d);
        }
    }
    let mut disjoint = true;
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| region.intervals[a].lo.total_cmp(&region.intervals[b].lo));
    for w in order.windows(2) {
        if region.intervals[w[0]].interior_overlap(&region.intervals[w[1]]) > tol::TOL_REGION {
            disjoint = false;
        }
    }
    RegionReport {
        passed: failures == 0 && disjoint,
        containment_failures: failures,
        max_overshoot: max_over,
        interiors_disjoint: disjoint,
    }
}

/// First `n >= 0` at which the orbit of `x` under the view enters the open
/// interior of the region, `None` if it never does within `n_max` steps.
/// Degenerate regions have empty interior, so they always give `None`, as
/// does an `x` outside the view domain.
pub fn escape_time(
    view: &MapView,
    region: &CyclicTrappingRegion,
    x: f64,
    n_max: usize,
) -> Option<usize> {
    if region.degenerate {
        return None;
    }
    let mut y = view.clamp_domain(x).ok()?;
    for n in 0..=n_max {
        if region.contains_interior(y) {
            return Some(n);
        }
        y = view.eval_raw(y);
    }
    None
}
