//! Level-by-level construction of the tower of chain-recurrent nodes.
//!
//! The builder walks down the renormalization structure of the map. At each
//! level it holds a view `V` (the base map at level one, a restriction of
//! `l^s` to the central interval of the previous node's region below) and
//! decides what the next node is:
//!
//! 1. probe the attractor of `V` from the critical point; an attracting
//!    fixed point of `V` is the bottom of the tower (an attracting orbit
//!    node);
//! 2. otherwise, a repelling flip fixed point of `V` whose cyclic trapping
//!    region builds is the next repelling node (the period-doubling
//!    cascade); the builder descends into `V^2` on the region's central
//!    interval;
//! 3. otherwise, if the attractor of `V` splits into `m >= 2` cyclically
//!    permuted bands, the regular repelling orbit bounding them is the
//!    boundary of a sub-window; the points that never fall into its region
//!    form a Cantor node, and the builder descends into `V^m`;
//! 4. otherwise the attractor is a single chaotic class filling the
//!    enclosing region: a terminal node, classified by whether the critical
//!    orbit currently sits on the enclosing boundary orbit (crisis) or not.
//!
//! Node data (orbits, regions, samples) is stored in base-map coordinates
//! throughout, lifting view-level objects through the conjugacy before they
//! are recorded.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::{MapView, CRIT};
use crate::numfmt::fmt_sig15;
use crate::periodic::{
    self, classify, find_periodic_orbits, OrbitKind, PeriodicOrbit, Stability,
};
use crate::tol;
use crate::trapping::{build_cyclic_region, CyclicTrappingRegion};
use serde::{Deserialize, Serialize};

/// Budgets and resolutions for [`build_tower`].
#[derive(Clone, Debug)]
pub struct TowerOptions {
    /// Maximum number of repelling levels before the builder truncates and
    /// reports the remainder as a suspected Cantor attractor.
    pub max_depth: usize,
    /// View iterations discarded before the attractor probe starts.
    pub n_transient: usize,
    /// View iterations the probe spends looking for a near-return of the
    /// post-transient orbit.
    pub n_detect: usize,
    /// Trail length recorded for band detection.
    pub band_samples: usize,
    /// Scan grid cells per unit period when searching for orbits.
    pub scan_density_per_period: usize,
    /// Target point count for Cantor-set samples.
    pub cantor_grid: usize,
    /// Per-level budget in base-map applications; levels that would exceed
    /// it truncate the tower instead of running.
    pub max_level_work: u64,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            max_depth: 64,
            n_transient: 10_000,
            n_detect: 100_000,
            band_samples: 4096,
            scan_density_per_period: 1000,
            cantor_grid: 2048,
            max_level_work: 200_000_000,
        }
    }
}

/// Refinement of the bottom (attracting) node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttractorClass {
    /// Attracting periodic orbit.
    Periodic,
    /// Chaotic class filling the enclosing region's intervals.
    Chaotic,
    /// Reported when the builder truncates: the cascade was still producing
    /// levels, consistent with an infinitely renormalizable Cantor
    /// attractor, but unverified.
    SuspectedCantor,
    /// Neutral orbit at a fold (saddle-node) at working precision.
    Fold,
    /// Chaotic class whose critical orbit sits on the enclosing boundary
    /// orbit at working precision: a crisis parameter.
    Crisis,
}

impl AttractorClass {
    pub fn subtype_str(&self) -> &'static str {
        match self {
            AttractorClass::Periodic => "A1",
            AttractorClass::Chaotic => "A2",
            AttractorClass::SuspectedCantor => "A3-suspected",
            AttractorClass::Fold => "A4",
            AttractorClass::Crisis => "A5",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// The repelling fixed point at the origin.
    Zero,
    /// A repelling flip orbit from the period-doubling cascade.
    FlipOrbit,
    /// A repelling Cantor set around a sub-window's boundary orbit.
    CantorSet,
    /// The attracting class at the bottom.
    Attracting(AttractorClass),
}

impl NodeKind {
    pub fn kind_str(&self) -> &'static str {
        match self {
            NodeKind::Zero => "Zero",
            NodeKind::FlipOrbit => "FlipOrbit",
            NodeKind::CantorSet => "CantorSet",
            NodeKind::Attracting(_) => "Attracting",
        }
    }
}

/// One chain-recurrent node.
#[derive(Clone, Debug)]
pub struct Node {
    pub index: usize,
    pub kind: NodeKind,
    /// Distinguished orbit in base coordinates: the node itself for orbit
    /// nodes, the boundary orbit for Cantor nodes, absent for terminal
    /// chaotic classes.
    pub orbit: Option<PeriodicOrbit>,
    /// Cyclic trapping region in base coordinates. Terminal chaotic nodes
    /// reuse the enclosing (previous) node's region.
    pub region: CyclicTrappingRegion,
    /// Distance of the class from the critical point: the boundary orbit's
    /// distance for orbit-carrying nodes, zero for classes that reach `c`.
    pub rho: f64,
    /// Representative points of the class beyond the orbit: the escape
    /// filtered grid for Cantor nodes, a trail subset for terminal chaotic
    /// nodes, empty otherwise. Base coordinates, sorted.
    pub sample: Vec<f64>,
}

impl Node {
    /// Orbit period when the node carries one, else the region period.
    pub fn period(&self) -> usize {
        self.orbit
            .as_ref()
            .map(|o| o.period)
            .unwrap_or_else(|| self.region.period())
    }

    /// Number of intervals in the node's region (the base-coordinate `|T|`).
    pub fn region_period(&self) -> usize {
        self.region.period()
    }

    pub fn p1(&self) -> Option<f64> {
        self.orbit.as_ref().map(|o| o.p1())
    }

    pub fn multiplier(&self) -> Option<f64> {
        self.orbit.as_ref().map(|o| o.multiplier)
    }
}

/// The tower of chain-recurrent nodes at one parameter.
#[derive(Clone, Debug)]
pub struct Tower {
    pub mu: f64,
    /// Nodes ordered by strictly decreasing `rho`.
    pub nodes: Vec<Node>,
    /// `weights[j]` is `|T(N_(j+1))| / |T(N_j)|`, one per consecutive pair.
    pub weights: Vec<u32>,
    /// Set when the builder stopped at its depth or work budget with the
    /// cascade still descending.
    pub truncated: bool,
    /// Set at `mu = 4`, where the critical orbit lands exactly on the fixed
    /// point at the origin and the whole interval is one class.
    pub degenerate: bool,
}

struct ProbeCycle {
    period: usize,
    point: f64,
}

/// Build the tower at `mu` (must lie in `(1, 4]`).
pub fn build_tower(mu: f64, opts: &TowerOptions) -> Result<Tower> {
    if !(mu > 1.0 && mu <= 4.0) || !mu.is_finite() {
        return Err(Error::Parameter(format!("mu = {mu} outside (1, 4]")));
    }
    let base = MapView::base(mu)?;
    if mu == 4.0 {
        return full_interval_tower(&base);
    }

    let zero = zero_orbit(mu);
    let zero_region = build_cyclic_region(&base, &zero)?;
    let mut nodes = vec![Node {
        index: 0,
        kind: NodeKind::Zero,
        rho: zero.rho(),
        orbit: Some(zero),
        region: zero_region,
        sample: Vec::new(),
    }];
    let mut truncated = false;
    let mut view = base.clone();

    loop {
        let level = nodes.len();
        let step = view.step() as u64;
        if level > opts.max_depth
            || (opts.n_transient + opts.n_detect) as u64 * step > opts.max_level_work
        {
            truncated = true;
            nodes.push(suspected_node(level, nodes.last().unwrap()));
            break;
        }

        let (probe, trail) = attractor_probe(&view, opts);

        if let Some(cycle) = &probe {
            if cycle.period == 1 {
                let nominal = view.step() as usize;
                let orbit = lift_orbit(&base, cycle.point, nominal, level)?;
                let region = build_cyclic_region(&base, &orbit)?;
                nodes.push(Node {
                    index: level,
                    kind: NodeKind::Attracting(AttractorClass::Periodic),
                    rho: orbit.rho(),
                    orbit: Some(orbit),
                    region,
                    sample: Vec::new(),
                });
                break;
            }
        }

        if let Some(node) = flip_descent(&base, &view, opts, level)? {
            let j1 = node.region.j1();
            nodes.push(node);
            view = MapView::renormalized(mu, view.step() * 2, j1)?;
            continue;
        }

        if let Some(m) = detect_bands(&trail, &probe) {
            let scan_cost =
                (opts.scan_density_per_period * m * m) as u64 * step;
            if scan_cost > opts.max_level_work {
                truncated = true;
                nodes.push(suspected_node(level, nodes.last().unwrap()));
                break;
            }
            match band_descent(&base, &view, opts, m, level)? {
                BandOutcome::Cantor(node) => {
                    let j1 = node.region.j1();
                    nodes.push(node);
                    view = MapView::renormalized(mu, view.step() * m as u32, j1)?;
                    continue;
                }
                BandOutcome::Fold(node) => {
                    nodes.push(node);
                    break;
                }
                BandOutcome::None => {}
            }
        }

        nodes.push(terminal_chaotic_node(&base, level, nodes.last().unwrap(), &trail));
        break;
    }

    finish_tower(mu, nodes, truncated)
}

/// Validate orderings and compute edge weights.
fn finish_tower(mu: f64, nodes: Vec<Node>, truncated: bool) -> Result<Tower> {
    for w in nodes.windows(2) {
        if w[1].rho >= w[0].rho {
            return Err(Error::Tower {
                level: w[1].index,
                reason: format!(
                    "rho failed to decrease: {} then {}",
                    w[0].rho, w[1].rho
                ),
            });
        }
    }
    let mut weights = Vec::with_capacity(nodes.len().saturating_sub(1));
    for w in nodes.windows(2) {
        let (a, b) = (w[0].region_period(), w[1].region_period());
        if a == 0 || b % a != 0 {
            return Err(Error::Tower {
                level: w[1].index,
                reason: format!("region period {b} is not a multiple of {a}"),
            });
        }
        weights.push((b / a) as u32);
    }
    Ok(Tower {
        mu,
        nodes,
        weights,
        truncated,
        degenerate: false,
    })
}

fn zero_orbit(mu: f64) -> PeriodicOrbit {
    let (kind, stability) = classify(mu);
    PeriodicOrbit {
        points: vec![0.0],
        period: 1,
        multiplier: mu,
        kind,
        stability,
    }
}

/// At `mu = 4` the critical point maps to 1 and then exactly to the fixed
/// point at the origin; the chain-recurrent set is the whole interval, one
/// crisis-merged class.
fn full_interval_tower(base: &MapView) -> Result<Tower> {
    let orbit = zero_orbit(base.mu());
    let region = build_cyclic_region(base, &orbit)?;
    Ok(Tower {
        mu: base.mu(),
        nodes: vec![Node {
            index: 0,
            kind: NodeKind::Attracting(AttractorClass::Crisis),
            orbit: Some(orbit),
            region,
            rho: 0.0,
            sample: Vec::new(),
        }],
        weights: Vec::new(),
        truncated: false,
        degenerate: true,
    })
}

/// Iterate the critical orbit past the transient, then look for a
/// near-return and polish it into an attracting cycle. Returns the cycle
/// (if verified attracting) and a trail of post-detection iterates for band
/// analysis.
fn attractor_probe(view: &MapView, opts: &TowerOptions) -> (Option<ProbeCycle>, Vec<f64>) {
    let mut x = CRIT;
    for _ in 0..opts.n_transient {
        x = view.eval_raw(x);
    }
    let anchor = x;
    let mut y = x;
    let mut found = None;
    let mut rejects = 0;
    for m in 1..=opts.n_detect {
        y = view.eval_raw(y);
        if (y - anchor).abs() <= tol::TOL_DETECT {
            // Periods beyond the polish cap are indistinguishable from
            // chaos at this budget; count them as rejects.
            if m <= 4096 {
                if let Some(p) = periodic::polish_root(view, y, m) {
                    if let Some((d, mult)) = periodic::exact_period(view, p, m) {
                        if classify(mult).1 == Stability::Attracting {
                            found = Some(ProbeCycle { period: d, point: p });
                            break;
                        }
                    }
                }
            }
            rejects += 1;
            if rejects >= 6 {
                break;
            }
        }
    }
    let mut trail = Vec::with_capacity(opts.band_samples);
    let mut z = y;
    for _ in 0..opts.band_samples {
        z = view.eval_raw(z);
        trail.push(z);
    }
    (found, trail)
}

/// Case 2: a repelling flip fixed point of the view whose base-coordinate
/// region builds.
fn flip_descent(
    base: &MapView,
    view: &MapView,
    opts: &TowerOptions,
    level: usize,
) -> Result<Option<Node>> {
    let scan = find_periodic_orbits(view, 1, opts.scan_density_per_period)?;
    let mut cands: Vec<&PeriodicOrbit> = scan
        .orbits
        .iter()
        .filter(|o| o.kind == OrbitKind::Flip && o.stability == Stability::Repelling)
        .collect();
    cands.sort_by(|a, b| b.rho().total_cmp(&a.rho()));
    for cand in cands {
        let nominal = view.step() as usize;
        let orbit = match lift_orbit(base, cand.p1(), nominal, level) {
            Ok(o) => o,
            Err(_) => continue,
        };
        if let Ok(region) = build_cyclic_region(base, &orbit) {
            if region.degenerate {
                continue;
            }
            return Ok(Some(Node {
                index: level,
                kind: NodeKind::FlipOrbit,
                rho: orbit.rho(),
                orbit: Some(orbit),
                region,
                sample: Vec::new(),
            }));
        }
    }
    Ok(None)
}

enum BandOutcome {
    Cantor(Node),
    Fold(Node),
    None,
}

/// Case 3: the attractor splits into `m` bands. The boundary of the
/// sub-window is the outermost regular repelling orbit of view-period `m`
/// whose base region builds; the points of the view domain that never fall
/// into that region sample the Cantor node. When only a neutral regular
/// orbit exists (a fold at working precision), the node is the attracting
/// fold class instead.
fn band_descent(
    base: &MapView,
    view: &MapView,
    opts: &TowerOptions,
    m: usize,
    level: usize,
) -> Result<BandOutcome> {
    let scan = find_periodic_orbits(view, m, opts.scan_density_per_period * m)?;
    let mut regular: Vec<&PeriodicOrbit> = scan
        .orbits
        .iter()
        .filter(|o| o.kind == OrbitKind::Regular && o.stability == Stability::Repelling)
        .collect();
    regular.sort_by(|a, b| b.rho().total_cmp(&a.rho()));
    for cand in regular {
        let nominal = view.step() as usize * m;
        let orbit = match lift_orbit(base, cand.p1(), nominal, level) {
            Ok(o) => o,
            Err(_) => continue,
        };
        if let Ok(region) = build_cyclic_region(base, &orbit) {
            if region.degenerate {
                continue;
            }
            let sample = cantor_sample(base, view, &orbit, &region, opts);
            return Ok(BandOutcome::Cantor(Node {
                index: level,
                kind: NodeKind::CantorSet,
                rho: orbit.rho(),
                orbit: Some(orbit),
                region,
                sample,
            }));
        }
    }
    // Fold: a neutral regular orbit with a valid region, seen only within
    // ~TOL_NEUTRAL of a window birth.
    for cand in scan
        .orbits
        .iter()
        .filter(|o| o.stability == Stability::Neutral && o.multiplier > 0.0)
    {
        let nominal = view.step() as usize * m;
        if let Ok(orbit) = lift_orbit(base, cand.p1(), nominal, level) {
            if let Ok(region) = build_cyclic_region(base, &orbit) {
                return Ok(BandOutcome::Fold(Node {
                    index: level,
                    kind: NodeKind::Attracting(AttractorClass::Fold),
                    rho: orbit.rho(),
                    orbit: Some(orbit),
                    region,
                    sample: Vec::new(),
                }));
            }
        }
    }
    Ok(BandOutcome::None)
}

/// Case 4: terminal chaotic class. Distinguishes a crisis (critical orbit
/// on the enclosing boundary orbit at working precision) from ordinary
/// chaotic filling.
fn terminal_chaotic_node(base: &MapView, level: usize, prev: &Node, trail: &[f64]) -> Node {
    let class = match prev.p1() {
        Some(p1) => {
            let bound = 2 * prev.region_period() + 2;
            let mut y = CRIT;
            let mut hit = false;
            for _ in 0..bound {
                y = base.eval_raw(y);
                if (y - p1).abs() <= tol::TOL_CRISIS {
                    hit = true;
                    break;
                }
            }
            if hit {
                AttractorClass::Crisis
            } else {
                AttractorClass::Chaotic
            }
        }
        None => AttractorClass::Chaotic,
    };
    let stride = (trail.len() / 64).max(1);
    let mut sample: Vec<f64> = trail.iter().copied().step_by(stride).collect();
    sample.sort_by(f64::total_cmp);
    Node {
        index: level,
        kind: NodeKind::Attracting(class),
        orbit: None,
        region: prev.region.clone(),
        rho: 0.0,
        sample,
    }
}

fn suspected_node(level: usize, prev: &Node) -> Node {
    Node {
        index: level,
        kind: NodeKind::Attracting(AttractorClass::SuspectedCantor),
        orbit: None,
        region: prev.region.clone(),
        rho: 0.0,
        sample: Vec::new(),
    }
}

/// Smallest band count `m >= 2` whose index-classes of the trail have
/// pairwise disjoint hulls. With a verified attracting cycle only divisors
/// of its period are candidates; for chaotic trails all counts up to a cap
/// are tried.
fn detect_bands(trail: &[f64], probe: &Option<ProbeCycle>) -> Option<usize> {
    let candidates: Vec<usize> = match probe {
        Some(c) => {
            if c.period < 2 {
                return None;
            }
            (2..=c.period).filter(|d| c.period % d == 0).collect()
        }
        None => (2..=64).collect(),
    };
    for &m in &candidates {
        if m * 8 > trail.len() {
            break;
        }
        if clusters_cyclically(trail, m) {
            return Some(m);
        }
    }
    None
}

fn clusters_cyclically(trail: &[f64], m: usize) -> bool {
    let mut hulls: Vec<Interval> = Vec::with_capacity(m);
    for r in 0..m {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut i = r;
        while i < trail.len() {
            lo = lo.min(trail[i]);
            hi = hi.max(trail[i]);
            i += m;
        }
        if !lo.is_finite() {
            return false;
        }
        hulls.push(Interval::new(lo, hi));
    }
    hulls.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    hulls.windows(2).all(|w| w[1].lo - w[0].hi > 1e-9)
}

/// Preimages of the boundary periodic orbit, pulled back under the base map
/// and kept inside the view's attractor core but outside the region's
/// interior. Forward escape filtering cannot produce this set in binary64:
/// rounding pushes orbits off the repelling set within a few hundred steps
/// and the survivor list collapses to the fixed boundary points. The set
/// attracts under pullback, so the preimage tree converges onto it instead.
///
/// The core of a view with step `s` occupies `s` base-map intervals, the
/// forward images of the span between the view's first two critical values.
/// Clipping to those arenas keeps the pullback on this level's set: without
/// the clip the tree also lands on every shallower level's set, and it keeps
/// out boundary preimages with no backward continuation (nothing maps onto
/// them, so no chain returns to them and they are not chain-recurrent).
fn cantor_sample(
    base: &MapView,
    view: &MapView,
    orbit: &PeriodicOrbit,
    region: &CyclicTrappingRegion,
    opts: &TowerOptions,
) -> Vec<f64> {
    let cap = opts.cantor_grid.max(2);
    let mu = base.mu();
    let vc = view.eval_raw(CRIT);
    let vc2 = view.eval_raw(vc);
    let mut arenas = vec![Interval::new(vc, vc2)];
    for _ in 1..view.step() {
        let prev = *arenas.last().expect("arena chain starts nonempty");
        let lo_img = base.eval_raw(prev.lo);
        let hi_img = base.eval_raw(prev.hi);
        let next = if prev.contains_interior(CRIT) {
            Interval::new(lo_img.min(hi_img), mu / 4.0)
        } else {
            Interval::new(lo_img, hi_img)
        };
        arenas.push(next);
    }
    // A computed preimage of a boundary point can round to either side of
    // the stored endpoint; pull it back onto the endpoint so the interior
    // cut below cannot discard boundary orbits.
    let snap = |x: f64| {
        for iv in &region.intervals {
            if (x - iv.lo).abs() <= tol::TOL_ROOT {
                return iv.lo;
            }
            if (x - iv.hi).abs() <= tol::TOL_ROOT {
                return iv.hi;
            }
        }
        x
    };
    let keep = |x: f64| {
        arenas.iter().any(|a| a.contains(x)) && !region.contains_interior(x)
    };
    // The seed orbit is periodic, so it reappears among its own preimages
    // and each pullback step contains the previous one. Iterating the whole
    // set therefore only ever grows it; no separate frontier is needed.
    let mut sample: Vec<f64> = orbit
        .points
        .iter()
        .map(|&x| snap(x))
        .filter(|&x| keep(x))
        .collect();
    sample.sort_by(f64::total_cmp);
    for _ in 0..64 {
        if sample.len() >= cap || sample.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(sample.len() * 2);
        for &y in &sample {
            let disc = 0.25 - y / mu;
            if disc < 0.0 {
                continue;
            }
            let r = disc.sqrt();
            for x in [0.5 - r, 0.5 + r] {
                let x = snap(x);
                if keep(x) {
                    next.push(x);
                }
            }
        }
        next.sort_by(f64::total_cmp);
        next.dedup_by(|b, a| (*b - *a).abs() <= tol::ROOT_MERGE);
        sample = next;
    }
    sample
}

/// Lift a view-level orbit point to its base-map orbit. The base period
/// must come out exactly `nominal` (view period times view step); anything
/// else indicates the level structure is inconsistent.
fn lift_orbit(base: &MapView, x0: f64, nominal: usize, level: usize) -> Result<PeriodicOrbit> {
    let Some((d, _)) = periodic::exact_period(base, x0, nominal) else {
        return Err(Error::Tower {
            level,
            reason: format!("orbit at {x0} does not close after {nominal} base steps"),
        });
    };
    if d != nominal {
        return Err(Error::Tower {
            level,
            reason: format!("orbit at {x0} has base period {d}, expected {nominal}"),
        });
    }
    let mut pts = Vec::with_capacity(nominal);
    let mut y = periodic::polish_root(base, x0, nominal).unwrap_or(x0);
    for i in 0..nominal {
        pts.push(y);
        if i + 1 < nominal {
            let raw = base.eval_raw(y);
            y = match periodic::polish_root(base, raw, nominal) {
                Some(p) if (p - raw).abs() <= 1e-7 => p,
                _ => raw,
            };
        }
    }
    let p1_idx = (0..nominal)
        .min_by(|&i, &j| (pts[i] - CRIT).abs().total_cmp(&(pts[j] - CRIT).abs()))
        .unwrap();
    pts.rotate_left(p1_idx);
    let (_, mult) = base.iterate_with_derivative(pts[0], nominal as u64)?;
    let (kind, stability) = classify(mult);
    Ok(PeriodicOrbit {
        points: pts,
        period: nominal,
        multiplier: mult,
        kind,
        stability,
    })
}

/// Find a point within `delta` of `p1(N_i)`, on the interior side of its
/// central interval, whose base orbit approaches `N_j` within `delta` in at
/// most `n_max` steps. Starting offsets shrink geometrically from `delta`;
/// the first that works is returned.
pub fn edge_witness(
    tower: &Tower,
    i: usize,
    j: usize,
    delta: f64,
    n_max: usize,
) -> Result<f64> {
    if i >= j || j >= tower.nodes.len() {
        return Err(Error::Parameter(format!(
            "need i < j < {}, got ({i}, {j})",
            tower.nodes.len()
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::Parameter("delta must be positive".into()));
    }
    let src = &tower.nodes[i];
    let Some(p1) = src.p1() else {
        return Err(Error::Parameter(format!(
            "node {i} carries no orbit to anchor a witness"
        )));
    };
    let target = &tower.nodes[j];
    let base = MapView::base(tower.mu)?;
    let j1 = src.region.j1();
    let dir = if CRIT >= p1 { 1.0 } else { -1.0 };
    let hits = |y: f64| -> bool {
        if let Some(o) = &target.orbit {
            if o.points.iter().any(|&p| (y - p).abs() <= delta) {
                return true;
            }
        }
        if !target.sample.is_empty() {
            // sample is sorted; nearest neighbour by binary search
            let idx = target.sample.partition_point(|&s| s < y);
            for k in idx.saturating_sub(1)..(idx + 1).min(target.sample.len()) {
                if (y - target.sample[k]).abs() <= delta {
                    return true;
                }
            }
        }
        if target.orbit.is_none() && target.sample.is_empty() {
            return target.region.distance_to(y) <= delta;
        }
        false
    };
    for t in 0..48 {
        let x0 = p1 + dir * delta * 0.5f64.powi(t);
        if !j1.contains(x0) || x0 == p1 {
            continue;
        }
        let mut y = x0;
        let mut ok = false;
        for _ in 0..=n_max {
            if hits(y) {
                ok = true;
                break;
            }
            y = base.eval_raw(y);
        }
        if ok {
            return Ok(x0);
        }
    }
    Err(Error::NotFound(format!(
        "no witness from node {i} to node {j} within delta = {delta}"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerFormat {
    Dot,
    Json,
}

/// Flat serialization mirror of a tower. Field order here is the key order
/// in the JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerDoc {
    pub mu: f64,
    pub truncated: bool,
    pub nodes: Vec<NodeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub index: usize,
    pub kind: String,
    pub subtype: Option<String>,
    pub period: usize,
    pub rho: f64,
    pub p1: Option<f64>,
    pub multiplier: Option<f64>,
    pub j1: [f64; 2],
    pub weight_to_next: Option<u32>,
}

impl Tower {
    pub fn to_doc(&self) -> TowerDoc {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| NodeDoc {
                index: n.index,
                kind: n.kind.kind_str().to_string(),
                subtype: match n.kind {
                    NodeKind::Attracting(c) => Some(c.subtype_str().to_string()),
                    _ => None,
                },
                period: n.period(),
                rho: n.rho,
                p1: n.p1(),
                multiplier: n.multiplier(),
                j1: {
                    let iv = n.region.j1();
                    [iv.lo, iv.hi]
                },
                weight_to_next: self.weights.get(i).copied(),
            })
            .collect();
        TowerDoc {
            mu: self.mu,
            truncated: self.truncated,
            nodes,
        }
    }
}

/// Serialize a tower. Both formats are deterministic byte-for-byte.
pub fn serialize_tower(tower: &Tower, format: TowerFormat) -> String {
    match format {
        TowerFormat::Json => doc_to_json(&tower.to_doc()),
        TowerFormat::Dot => tower_to_dot(tower),
    }
}

/// Render the document form as JSON. Hand-built so that key order, number
/// formatting, and whitespace are fixed; serializing, parsing, and
/// serializing again reproduces the bytes.
pub fn doc_to_json(doc: &TowerDoc) -> String {
    let fmt_opt = |v: Option<f64>| match v {
        Some(x) => fmt_sig15(x),
        None => "null".to_string(),
    };
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"mu\": {},\n", fmt_sig15(doc.mu)));
    out.push_str(&format!("  \"truncated\": {},\n", doc.truncated));
    out.push_str("  \"nodes\": [\n");
    for (i, n) in doc.nodes.iter().enumerate() {
        let subtype = match &n.subtype {
            Some(s) => format!("\"{s}\""),
            None => "null".to_string(),
        };
        let weight = match n.weight_to_next {
            Some(w) => w.to_string(),
            None => "null".to_string(),
        };
        out.push_str(&format!(
            "    {{\"index\": {}, \"kind\": \"{}\", \"subtype\": {}, \"period\": {}, \"rho\": {}, \"p1\": {}, \"multiplier\": {}, \"j1\": [{}, {}], \"weight_to_next\": {}}}{}\n",
            n.index,
            n.kind,
            subtype,
            n.period,
            fmt_sig15(n.rho),
            fmt_opt(n.p1),
            fmt_opt(n.multiplier),
            fmt_sig15(n.j1[0]),
            fmt_sig15(n.j1[1]),
            weight,
            if i + 1 < doc.nodes.len() { "," } else { "" },
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn parse_tower_json(s: &str) -> Result<TowerDoc> {
    serde_json::from_str(s)
        .map_err(|e| Error::Parameter(format!("invalid tower JSON: {e}")))
}

fn tower_to_dot(tower: &Tower) -> String {
    let mut out = String::new();
    out.push_str("digraph tower {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [shape=box];\n");
    for n in &tower.nodes {
        let label = match n.kind {
            NodeKind::Attracting(c) => format!(
                "N{} Attracting({}) period={} rho={}",
                n.index,
                c.subtype_str(),
                n.period(),
                fmt_sig15(n.rho)
            ),
            _ => format!(
                "N{} {} period={} rho={}",
                n.index,
                n.kind.kind_str(),
                n.period(),
                fmt_sig15(n.rho)
            ),
        };
        out.push_str(&format!("  n{} [label=\"{}\"];\n", n.index, label));
    }
    for i in 0..tower.nodes.len() {
        for j in (i + 1)..tower.nodes.len() {
            if j == i + 1 {
                out.push_str(&format!(
                    "  n{} -> n{} [label=\"w={}\"];\n",
                    i, j, tower.weights[i]
                ));
            } else {
                out.push_str(&format!("  n{} -> n{};\n", i, j));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> TowerOptions {
        TowerOptions::default()
    }

    #[test]
    fn tower_below_first_doubling_has_two_nodes() {
        let t = build_tower(2.5, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 2);
        assert!(!t.truncated);
        assert_eq!(t.nodes[0].kind, NodeKind::Zero);
        assert_eq!(
            t.nodes[1].kind,
            NodeKind::Attracting(AttractorClass::Periodic)
        );
        // The fixed point at 2.5 is flip-attracting, so its region has two
        // intervals and the edge weight is 2.
        assert_eq!(t.weights, vec![2]);
        let p = 1.0 - 1.0 / 2.5;
        assert!((t.nodes[1].p1().unwrap() - p).abs() < 1e-10);
        assert!((t.nodes[1].multiplier().unwrap() - (2.0 - 2.5)).abs() < 1e-9);
    }

    #[test]
    fn tower_with_attracting_two_cycle() {
        let t = build_tower(3.2, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(t.nodes[0].kind, NodeKind::Zero);
        assert_eq!(t.nodes[1].kind, NodeKind::FlipOrbit);
        assert_eq!(
            t.nodes[2].kind,
            NodeKind::Attracting(AttractorClass::Periodic)
        );
        assert_eq!(t.nodes[2].period(), 2);
        // 2-cycle at 3.2 is regular attracting: final weight 1.
        assert_eq!(t.weights, vec![2, 1]);
        assert!((t.nodes[2].multiplier().unwrap() - 0.16).abs() < 1e-9);
        // rho strictly decreases down the tower.
        assert!(t.nodes[0].rho > t.nodes[1].rho);
        assert!(t.nodes[1].rho > t.nodes[2].rho);
    }

    #[test]
    fn tower_with_flip_attracting_four_cycle() {
        let t = build_tower(3.5, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 4);
        let kinds: Vec<_> = t.nodes.iter().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NodeKind::Zero,
                NodeKind::FlipOrbit,
                NodeKind::FlipOrbit,
                NodeKind::Attracting(AttractorClass::Periodic),
            ]
        );
        assert_eq!(t.nodes[3].period(), 4);
        // The 4-cycle at 3.5 is itself flip, so every weight is 2.
        assert_eq!(t.weights, vec![2, 2, 2]);
        // Central intervals nest strictly.
        for w in t.nodes.windows(2) {
            let outer = w[0].region.j1();
            let inner = w[1].region.j1();
            assert!(outer.lo < inner.lo && inner.hi < outer.hi);
        }
    }

    #[test]
    fn tower_with_period_eight_cascade() {
        let t = build_tower(3.56, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 5);
        assert_eq!(t.nodes[4].period(), 8);
        assert_eq!(t.weights, vec![2, 2, 2, 2]);
        assert_eq!(
            t.nodes[4].kind,
            NodeKind::Attracting(AttractorClass::Periodic)
        );
    }

    #[test]
    fn tower_with_cantor_node_in_period_three_window() {
        let t = build_tower(3.83, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(t.nodes[0].kind, NodeKind::Zero);
        assert_eq!(t.nodes[1].kind, NodeKind::CantorSet);
        assert_eq!(
            t.nodes[2].kind,
            NodeKind::Attracting(AttractorClass::Periodic)
        );
        assert_eq!(t.nodes[1].region_period(), 3);
        assert_eq!(t.nodes[2].period(), 3);
        // Attracting 3-cycle at 3.83 is regular: weights 3 then 1.
        assert_eq!(t.weights, vec![3, 1]);
        // The Cantor sample is nonempty and excluded from the trapping
        // region's interior.
        assert!(!t.nodes[1].sample.is_empty());
        for &x in t.nodes[1].sample.iter().take(50) {
            assert!(!t.nodes[1].region.contains_interior(x));
        }
        assert!((t.nodes[2].multiplier().unwrap() - 0.329881696435285).abs() < 1e-6);
    }

    #[test]
    fn tower_with_two_band_chaos() {
        let t = build_tower(3.6, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(t.nodes[1].kind, NodeKind::FlipOrbit);
        assert_eq!(
            t.nodes[2].kind,
            NodeKind::Attracting(AttractorClass::Chaotic)
        );
        // Terminal chaotic node reuses the enclosing region.
        assert_eq!(t.nodes[2].region_period(), t.nodes[1].region_period());
        assert_eq!(t.weights, vec![2, 1]);
        assert!(!t.nodes[2].sample.is_empty());
    }

    #[test]
    fn tower_with_one_band_chaos() {
        let t = build_tower(3.7, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(
            t.nodes[1].kind,
            NodeKind::Attracting(AttractorClass::Chaotic)
        );
        assert_eq!(t.weights, vec![1]);
    }

    #[test]
    fn tower_at_crisis_parameter_tags_a5() {
        // End of the period-3 window: the critical orbit hits the boundary
        // orbit after six steps.
        let t = build_tower(3.856800652477765, &opts()).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(t.nodes[1].kind, NodeKind::CantorSet);
        assert_eq!(
            t.nodes[2].kind,
            NodeKind::Attracting(AttractorClass::Crisis)
        );
    }

    #[test]
    fn tower_at_mu_four_is_single_degenerate_node() {
        let t = build_tower(4.0, &opts()).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(
            t.nodes[0].kind,
            NodeKind::Attracting(AttractorClass::Crisis)
        );
        assert_eq!(t.nodes[0].region.j1(), Interval::new(0.0, 1.0));
        assert_eq!(t.nodes[0].p1(), Some(0.0));
        assert_eq!(t.nodes[0].multiplier(), Some(4.0));
        assert!(t.weights.is_empty());
    }

    #[test]
    fn tower_truncates_inside_the_cascade() {
        // Near the cascade accumulation every level keeps doubling; with a
        // depth cap of 8 the builder must truncate and flag the remainder.
        let mut o = opts();
        o.max_depth = 8;
        let t = build_tower(3.5699456, &o).unwrap();
        assert!(t.truncated);
        assert_eq!(t.nodes.len(), 10);
        assert_eq!(
            t.nodes.last().unwrap().kind,
            NodeKind::Attracting(AttractorClass::SuspectedCantor)
        );
        let w = &t.weights;
        assert!(w[..w.len() - 1].iter().all(|&x| x == 2));
        assert_eq!(*w.last().unwrap(), 1);
    }

    #[test]
    fn dot_output_shape() {
        let t = build_tower(2.5, &opts()).unwrap();
        let dot = serialize_tower(&t, TowerFormat::Dot);
        assert_eq!(dot.matches("->").count(), 1);
        assert_eq!(dot.matches("[label=\"N").count(), 2);
        assert!(dot.contains("w=2"));

        let t2 = build_tower(3.5, &opts()).unwrap();
        let dot2 = serialize_tower(&t2, TowerFormat::Dot);
        // Complete graph on 4 nodes: 6 edges.
        assert_eq!(dot2.matches("->").count(), 6);
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        for mu in [2.5, 3.2, 3.5, 3.83] {
            let t = build_tower(mu, &opts()).unwrap();
            let s1 = serialize_tower(&t, TowerFormat::Json);
            let doc = parse_tower_json(&s1).unwrap();
            let s2 = doc_to_json(&doc);
            assert_eq!(s1, s2, "round trip at mu = {mu}");
            assert_eq!(doc.nodes.len(), t.nodes.len());
        }
    }

    #[test]
    fn json_fields_at_cantor_tower() {
        let t = build_tower(3.83, &opts()).unwrap();
        let doc = parse_tower_json(&serialize_tower(&t, TowerFormat::Json)).unwrap();
        assert_eq!(doc.nodes.len(), 3);
        assert_eq!(doc.nodes[0].kind, "Zero");
        assert_eq!(doc.nodes[0].subtype, None);
        assert_eq!(doc.nodes[0].p1, Some(0.0));
        assert_eq!(doc.nodes[1].kind, "CantorSet");
        assert_eq!(doc.nodes[1].weight_to_next, Some(1));
        assert_eq!(doc.nodes[2].kind, "Attracting");
        assert_eq!(doc.nodes[2].subtype.as_deref(), Some("A1"));
        assert_eq!(doc.nodes[2].weight_to_next, None);
        assert_eq!(doc.nodes[0].weight_to_next, Some(3));
    }

    #[test]
    fn terminal_chaotic_nodes_serialize_null_orbit_data() {
        let t = build_tower(3.7, &opts()).unwrap();
        let doc = t.to_doc();
        assert_eq!(doc.nodes[1].subtype.as_deref(), Some("A2"));
        assert_eq!(doc.nodes[1].p1, None);
        assert_eq!(doc.nodes[1].multiplier, None);
    }

    #[test]
    fn witnesses_connect_nodes_downward() {
        let t = build_tower(2.5, &opts()).unwrap();
        let x0 = edge_witness(&t, 0, 1, 1e-3, 20_000).unwrap();
        assert!(x0 > 0.0 && x0 <= 1e-3);

        let t2 = build_tower(3.5, &opts()).unwrap();
        let x1 = edge_witness(&t2, 1, 3, 1e-3, 50_000).unwrap();
        let p1 = t2.nodes[1].p1().unwrap();
        // The largest offset tried is exactly delta; allow one ulp of slack.
        assert!((x1 - p1).abs() <= 1e-3 * (1.0 + 1e-12));

        let t3 = build_tower(3.83, &opts()).unwrap();
        // Zero to the Cantor node: transit orbits pass near the Cantor set.
        let x2 = edge_witness(&t3, 0, 1, 1e-3, 50_000).unwrap();
        assert!(x2 > 0.0 && x2 <= 1e-3);
        // Zero to the attracting cycle.
        edge_witness(&t3, 0, 2, 1e-3, 50_000).unwrap();
    }

    #[test]
    fn witness_rejects_bad_arguments() {
        let t = build_tower(2.5, &opts()).unwrap();
        assert!(edge_witness(&t, 1, 1, 1e-3, 100).is_err());
        assert!(edge_witness(&t, 0, 5, 1e-3, 100).is_err());
        assert!(edge_witness(&t, 0, 1, -1.0, 100).is_err());
    }

    #[test]
    fn mu_outside_range_is_rejected() {
        assert!(build_tower(1.0, &opts()).is_err());
        assert!(build_tower(4.2, &opts()).is_err());
        assert!(build_tower(f64::NAN, &opts()).is_err());
    }
}
