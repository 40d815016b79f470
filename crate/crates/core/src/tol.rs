//! Numerical tolerances used across the crate, with the reasoning that fixed
//! each value. Keeping them in one place makes the orderings between them
//! visible; several routines rely on those orderings, and the tests at the
//! bottom pin them.

/// Root-finding tolerance in phase space. Bisection and Newton polish stop
/// when the bracket or step is below this. Double precision carries ~1e-16
/// relative error; orbit points sit in [0, 1], and one map application
/// amplifies error by at most 4, so 1e-12 leaves four orders of headroom
/// above the noise floor while staying far below every structural scale the
/// crate meets (the narrowest intervals handled are ~1e-7 wide).
pub const TOL_ROOT: f64 = 1e-12;

/// Threshold on |multiplier| below which an orbit is treated as superstable.
/// The multiplier of a k-orbit through a point at distance d from the
/// critical point scales like d * mu^k, so 1e-9 corresponds to an orbit
/// point within ~1e-10 of the critical point: closer than any parameter
/// the crate is driven at, but far above root noise.
pub const TOL_SUPER: f64 = 1e-9;

/// Dead zone around |multiplier| = 1 inside which stability is not called.
/// Near a fold or period doubling the multiplier moves linearly in mu, so
/// 1e-9 marks orbits within ~1e-9 in parameter of the bifurcation; callers
/// that land inside the zone report the neutral case instead of guessing.
pub const TOL_NEUTRAL: f64 = 1e-9;

/// Allowed overshoot when checking that the image of a trapping interval
/// lands inside the next one. Interval endpoints come from roots known to
/// TOL_ROOT and one further map application multiplies that by at most 4;
/// 1e-9 also absorbs the endpoint sampling error in `verify_region`.
pub const TOL_REGION: f64 = 1e-9;

/// Phase-space distance at which the critical orbit is said to hit a
/// boundary orbit point (crisis detection). The hit is exact at the crisis
/// parameter and moves linearly in mu, so with parameters resolved to
/// BRACKET_MU the residual distance is ~1e-9; 1e-8 accepts that without
/// accepting near misses from neighbouring structure (~1e-4 away).
pub const TOL_CRISIS: f64 = 1e-8;

/// Parameter-space bracket width at which mu bisections (window birth,
/// crisis) stop. The quantities compared in those bisections move at order
/// one per unit mu, so 1e-10 in mu matches ~1e-10 in the detected quantity,
/// well inside every acceptance tolerance (1e-6 and coarser).
pub const BRACKET_MU: f64 = 1e-10;

/// Return-distance threshold for the attractor probe. After the transient
/// the orbit sits within ~1e-6 of the attracting cycle even at the slow
/// (nearly neutral) parameters the builder visits, and distinct points of
/// the cycles met are separated by far more; candidates are always polished
/// and verified afterwards, so a loose detection threshold only costs a
/// rejected polish, never a wrong answer.
pub const TOL_DETECT: f64 = 1e-6;

/// Magnitude below which a sampled residual is treated as an exact zero.
/// f(x) - x evaluated in doubles on [0, 1] carries absolute error of a few
/// ulps (~1e-16); grid points that land exactly on a root (x = 0 at mu
/// integer, for instance) produce residuals at that level, never above
/// 1e-14.
pub const TOL_ZERO: f64 = 1e-13;

/// Slack allowed when checking that a point lies in a view's domain, to
/// absorb rounding from upstream computations; points inside the slack are
/// clamped onto the domain. One map application of a boundary point lands
/// outside by at most a few ulps of the endpoint arithmetic, so 1e-9 is
/// generous without masking genuine escapes (structural distances are
/// >=1e-7).
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Multiple of TOL_ROOT used when merging duplicate roots from a scan and
/// when matching an iterated root against a scanned one. Matching distance
/// additionally scales with the orbit multiplier at the point of use.
pub const ROOT_MERGE: f64 = 100.0 * TOL_ROOT;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orderings_hold() {
        // Root accuracy must dominate every structural tolerance.
        assert!(TOL_ROOT < TOL_REGION);
        assert!(TOL_ROOT < TOL_SUPER);
        assert!(TOL_ROOT < TOL_CRISIS);
        // Exact-zero detection must sit below root tolerance, else scans
        // would invent roots.
        assert!(TOL_ZERO < TOL_ROOT);
        // Crisis hits are resolved to BRACKET_MU in parameter, giving ~1e-9
        // residuals; TOL_CRISIS must sit above that product.
        assert!(BRACKET_MU * 10.0 <= TOL_CRISIS);
        // Probe detection is deliberately loose; it must stay above the
        // verification tolerances it feeds.
        assert!(TOL_DETECT > TOL_SUPER);
        assert!(DOMAIN_SLACK >= TOL_REGION);
    }
}
