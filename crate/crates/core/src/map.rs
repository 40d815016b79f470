//! The logistic map and its renormalized views.
//!
//! A view is `l_mu^step` restricted to a closed interval containing the
//! critical point `c = 1/2` in its interior. The base map is the view with
//! `step = 1` on `[0, 1]`. Tower levels below the first are explored through
//! views whose domain is the central interval of the previous level's
//! trapping region, so every routine downstream of the builder works on a
//! `MapView` rather than on the raw map.

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::tol;

/// The critical point of the logistic map.
pub const CRIT: f64 = 0.5;

/// One application of the base map.
#[inline]
pub fn logistic(mu: f64, x: f64) -> f64 {
    mu * x * (1.0 - x)
}

/// Derivative of the base map in `x`.
#[inline]
pub fn logistic_deriv(mu: f64, x: f64) -> f64 {
    mu * (1.0 - 2.0 * x)
}

/// Which way the view bends at the critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// The view attains its maximum over the domain at `c` (odd-like views,
    /// including the base map).
    MaxAtC,
    /// The view attains its minimum at `c`.
    MinAtC,
}

/// `l_mu^step` restricted to `domain`.
#[derive(Clone, Debug)]
pub struct MapView {
    mu: f64,
    step: u32,
    domain: Interval,
    orientation: Orientation,
}

impl MapView {
    /// The base map on `[0, 1]`.
    pub fn base(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(MapView {
            mu,
            step: 1,
            domain: Interval::new(0.0, 1.0),
            orientation: Orientation::MaxAtC,
        })
    }

    /// `l_mu^step` on `domain`. The domain must lie in `[0, 1]` and contain
    /// the critical point strictly inside.
    pub fn renormalized(mu: f64, step: u32, domain: Interval) -> Result<Self> {
        check_mu(mu)?;
        if step == 0 {
            return Err(Error::Parameter("step must be >= 1".into()));
        }
        if domain.lo < -tol::DOMAIN_SLACK || domain.hi > 1.0 + tol::DOMAIN_SLACK {
            return Err(Error::Parameter(format!(
                "domain [{}, {}] leaves [0, 1]",
                domain.lo, domain.hi
            )));
        }
        if !(domain.lo < CRIT && CRIT < domain.hi) {
            return Err(Error::Parameter(format!(
                "domain [{}, {}] must contain the critical point strictly inside",
                domain.lo, domain.hi
            )));
        }
        let domain = Interval::new(domain.lo.max(0.0), domain.hi.min(1.0));
        let mut view = MapView {
            mu,
            step,
            domain,
            orientation: Orientation::MaxAtC,
        };
        let probe = 0.5 * (domain.lo + CRIT);
        view.orientation = if view.eval_raw(CRIT) >= view.eval_raw(probe) {
            Orientation::MaxAtC
        } else {
            Orientation::MinAtC
        };
        Ok(view)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of base-map applications per view step.
    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_base(&self) -> bool {
        self.step == 1 && self.domain.lo == 0.0 && self.domain.hi == 1.0
    }

    /// Check `x` against the domain, clamping points within
    /// [`tol::DOMAIN_SLACK`] of a boundary onto it.
    pub fn clamp_domain(&self, x: f64) -> Result<f64> {
        if self.domain.contains(x) {
            return Ok(x);
        }
        if self.domain.distance_to(x) <= tol::DOMAIN_SLACK {
            return Ok(self.domain.clamp(x));
        }
        Err(Error::Domain {
            x,
            lo: self.domain.lo,
            hi: self.domain.hi,
        })
    }

    /// One view step without a domain check. Intermediate base iterates of a
    /// renormalized view travel outside the domain by design; only the input
    /// is meant to lie in it.
    #[inline]
    pub(crate) fn eval_raw(&self, x: f64) -> f64 {
        let mut y = x;
        for _ in 0..self.step {
            y = logistic(self.mu, y);
        }
        y
    }

    /// One view step.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_raw(self.clamp_domain(x)?))
    }

    /// `n` view steps.
    pub fn eval_n(&self, x: f64, n: u64) -> Result<f64> {
        let mut y = self.clamp_domain(x)?;
        for _ in 0..n {
            y = self.eval_raw(y);
        }
        Ok(y)
    }

    /// `n` view steps together with the derivative of the composite along
    /// the way (chain rule over `n * step` base applications).
    pub fn iterate_with_derivative(&self, x: f64, n: u64) -> Result<(f64, f64)> {
        let mut y = self.clamp_domain(x)?;
        let mut d = 1.0;
        let total = n * self.step as u64;
        for _ in 0..total {
            d *= logistic_deriv(self.mu, y);
            y = logistic(self.mu, y);
        }
        Ok((y, d))
    }

    /// The point on the opposite branch with the same value, found by
    /// bisection of `V(y) = V(x)` on the other side of `c`. For the base map
    /// this is exactly `1 - x`.
    pub fn symmetric_point(&self, x: f64) -> Result<f64> {
        let x = self.clamp_domain(x)?;
        if x == CRIT {
            return Ok(CRIT);
        }
        if self.is_base() {
            return Ok(1.0 - x);
        }
        let target = self.eval_raw(x);
        let (a, b) = if x < CRIT {
            (CRIT, self.domain.hi)
        } else {
            (self.domain.lo, CRIT)
        };
        let g = |y: f64| self.eval_raw(y) - target;
        let (ga, gb) = (g(a), g(b));
        if ga.abs() <= tol::TOL_ZERO {
            return Ok(a);
        }
        if gb.abs() <= tol::TOL_ZERO {
            return Ok(b);
        }
        if ga.signum() == gb.signum() {
            return Err(Error::NoSymmetricPoint { x });
        }
        bisect(g, a, b)
    }

    /// The critical orbit `[c, V(c), ..., V^n(c)]` (length `n + 1`).
    pub fn critical_orbit(&self, n: usize) -> Vec<f64> {
        let mut orbit = Vec::with_capacity(n + 1);
        let mut y = CRIT;
        orbit.push(y);
        for _ in 0..n {
            y = self.eval_raw(y);
            orbit.push(y);
        }
        orbit
    }

    /// Exact image of an interval under one view step: the image hull is
    /// composed one base application at a time, adding the critical value
    /// whenever the current interval straddles `c`.
    pub fn image_of(&self, iv: Interval) -> Interval {
        let mut cur = iv;
        for _ in 0..self.step {
            let a = logistic(self.mu, cur.lo);
            let b = logistic(self.mu, cur.hi);
            let mut img = Interval::new(a, b);
            if cur.contains(CRIT) {
                img = img.hull(&Interval::point(logistic(self.mu, CRIT)));
            }
            cur = img;
        }
        cur
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 4.0) || !mu.is_finite() {
        return Err(Error::Parameter(format!("mu = {mu} outside (0, 4]")));
    }
    Ok(())
}

/// Bisect `g` for a root on `[a, b]`; the endpoint values must have opposite
/// signs. Stops when the bracket is below [`tol::TOL_ROOT`].
pub(crate) fn bisect(g: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        if hi - lo <= tol::TOL_ROOT {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_values() {
        let f = MapView::base(4.0).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 1.0);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        let g = MapView::base(2.0).unwrap();
        assert_eq!(g.eval(0.5).unwrap(), 0.5);
        // Nonzero fixed point 1 - 1/mu.
        let mu = 3.2;
        let p = 1.0 - 1.0 / mu;
        let h = MapView::base(mu).unwrap();
        assert!((h.eval(p).unwrap() - p).abs() < 1e-15);
        assert!((logistic_deriv(mu, p) - (2.0 - mu)).abs() < 1e-12);
    }

    #[test]
    fn critical_orbit_mu4_lands_on_zero() {
        let f = MapView::base(4.0).unwrap();
        assert_eq!(f.critical_orbit(3), vec![0.5, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn critical_orbit_tail_cycles_with_period_three() {
        let f = MapView::base(3.83).unwrap();
        let orbit = f.critical_orbit(1000);
        let n = orbit.len() - 1;
        assert!((orbit[n] - orbit[n - 3]).abs() < 1e-6);
        assert!((orbit[n - 1] - orbit[n - 4]).abs() < 1e-6);
        // Genuinely period three, not one.
        assert!((orbit[n] - orbit[n - 1]).abs() > 1e-3);
    }

    #[test]
    fn domain_checks_and_slack() {
        let iv = Interval::new(0.3, 0.7);
        let v = MapView::renormalized(3.5, 2, iv).unwrap();
        assert!(v.eval(0.8).is_err());
        // Rounding overshoot within slack clamps onto the boundary.
        let y = v.eval(0.7 + 1e-10).unwrap();
        assert_eq!(y, v.eval(0.7).unwrap());
        assert!(MapView::renormalized(3.5, 2, Interval::new(0.6, 0.9)).is_err());
        assert!(MapView::base(4.5).is_err());
        assert!(MapView::base(0.0).is_err());
    }

    #[test]
    fn renormalized_view_orientation() {
        // At mu = 3.5, l^2 on the central interval of the flip fixed point
        // has a minimum at c: l(c) sits high, and a second application sends
        // high values low.
        let p = 1.0 - 1.0 / 3.5;
        let j1 = Interval::new(1.0 - p, p);
        let v = MapView::renormalized(3.5, 2, j1).unwrap();
        assert_eq!(v.orientation(), Orientation::MinAtC);
        let b = MapView::base(3.5).unwrap();
        assert_eq!(b.orientation(), Orientation::MaxAtC);
    }

    #[test]
    fn symmetric_point_base_is_reflection() {
        let f = MapView::base(3.7).unwrap();
        assert_eq!(f.symmetric_point(0.2).unwrap(), 0.8);
        assert_eq!(f.symmetric_point(CRIT).unwrap(), CRIT);
    }

    #[test]
    fn symmetric_point_involution_on_renormalized_view() {
        let p = 1.0 - 1.0 / 3.5;
        let j1 = Interval::new(1.0 - p, p);
        let v = MapView::renormalized(3.5, 2, j1).unwrap();
        for &x in &[0.31, 0.4, 0.45, 0.55, 0.62, 0.7] {
            let s = v.symmetric_point(x).unwrap();
            assert!((s - CRIT).signum() != (x - CRIT).signum());
            assert!((v.eval(s).unwrap() - v.eval(x).unwrap()).abs() < 1e-10);
            let back = v.symmetric_point(s).unwrap();
            assert!((back - x).abs() < 1e-9, "x = {x}, back = {back}");
        }
    }

    #[test]
    fn image_of_straddling_interval_includes_critical_value() {
        let f = MapView::base(4.0).unwrap();
        let img = f.image_of(Interval::new(0.2, 0.8));
        assert!((img.lo - 0.64).abs() < 1e-15);
        assert_eq!(img.hi, 1.0);
        // Monotone piece: endpoints only.
        let img2 = f.image_of(Interval::new(0.1, 0.2));
        assert!((img2.lo - logistic(4.0, 0.1)).abs() < 1e-15);
        assert!((img2.hi - logistic(4.0, 0.2)).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences_on_composite() {
        let v = MapView::renormalized(3.83, 3, Interval::new(0.44, 0.56)).unwrap();
        let h = 1e-6;
        for &x in &[0.45, 0.47, 0.53, 0.55] {
            let (_, d) = v.iterate_with_derivative(x, 1).unwrap();
            let fd = (v.eval(x + h).unwrap() - v.eval(x - h).unwrap()) / (2.0 * h);
            assert!(
                (d - fd).abs() <= 1e-5 * d.abs().max(1.0),
                "x = {x}: analytic {d}, finite difference {fd}"
            );
        }
    }

    proptest! {
        #[test]
        fn eval_stays_in_range(mu in 0.01f64..4.0, x in 0.0f64..1.0) {
            let f = MapView::base(mu).unwrap();
            let y = f.eval(x).unwrap();
            prop_assert!(y >= 0.0);
            prop_assert!(y <= mu / 4.0 + 1e-12);
        }

        #[test]
        fn eval_is_symmetric(mu in 0.01f64..4.0, x in 0.0f64..1.0) {
            let f = MapView::base(mu).unwrap();
            let a = f.eval(x).unwrap();
            let b = f.eval(1.0 - x).unwrap();
            prop_assert!((a - b).abs() <= 1e-14);
        }

        #[test]
        fn base_derivative_matches_finite_differences(
            mu in 0.5f64..4.0,
            x in 0.01f64..0.99,
        ) {
            let d = logistic_deriv(mu, x);
            prop_assume!(d.abs() > 1e-3);
            let h = 1e-6;
            let fd = (logistic(mu, x + h) - logistic(mu, x - h)) / (2.0 * h);
            prop_assert!((d - fd).abs() <= 1e-5 * d.abs());
        }

        #[test]
        fn iterate_derivative_is_chain_product(
            mu in 0.5f64..4.0,
            x in 0.0f64..1.0,
            n in 1u64..6,
        ) {
            let f = MapView::base(mu).unwrap();
            let (y, d) = f.iterate_with_derivative(x, n).unwrap();
            let mut z = x;
            let mut prod = 1.0;
            for _ in 0..n {
                prod *= logistic_deriv(mu, z);
                z = logistic(mu, z);
            }
            prop_assert_eq!(y, z);
            prop_assert_eq!(d, prod);
        }
    }
}
