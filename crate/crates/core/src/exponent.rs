//! The Hoeffding error exponent `D(delta)` through the tilted family.
//!
//! For `0 < delta < D(Q||P)` there is a unique `a*` in `(0, 1)` with
//! `D(Q_a*||P) = delta`, and then `D(delta) = D(Q_a*||Q)`. Because
//! `g(a) = D(Q_a||P)` is strictly decreasing (its derivative is
//! `-(1-a) Var_a(log p/q)`), `a*` is found by plain bisection.
//!
//! The canonical spread parameters stored in [`ExponentSolution`] are the
//! variance and absolute third central moment of `log p/q` under `Q_a*`. The
//! moments of `log q_a*/p` and `log q_a*/q` used by the finite-sample
//! constants follow from them by the scalings `(1-a*)` and `a*`.

use crate::dist::{TiltedFamily, DEGENERATE_VARIANCE};
use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_section_min};

/// Width of the final bisection bracket for `a*`.
pub const ALPHA_TOL: f64 = 1e-13;

/// `g(a) = D(Q_a||P) = -log Z(a) - (1-a) Z'(a)/Z(a)`.
pub fn g_alpha(family: &TiltedFamily, alpha: f64) -> f64 {
    let m = family.tilted_moments(alpha);
    -m.log_z - (1.0 - alpha) * m.mean
}

/// `D(Q_a||Q) = a Z'(a)/Z(a) - log Z(a)`.
pub fn h_alpha(family: &TiltedFamily, alpha: f64) -> f64 {
    let m = family.tilted_moments(alpha);
    alpha * m.mean - m.log_z
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSolution {
    /// Constraint level on the second error exponent, nats.
    pub delta: f64,
    pub alpha_star: f64,
    /// `D(delta) = D(Q_a*||Q)`.
    pub d_delta: f64,
    /// `Var(log p/q)` under `Q_a*`.
    pub sigma_star_sq: f64,
    /// `E|log p/q - E log p/q|^3` under `Q_a*`.
    pub rho_star: f64,
    /// `log Z(a*)`.
    pub log_z: f64,
}

impl ExponentSolution {
    pub fn sigma_star(&self) -> f64 {
        self.sigma_star_sq.sqrt()
    }

    /// Variance of `log q_a*/p` under `Q_a*`.
    pub fn tau1_sq(&self) -> f64 {
        (1.0 - self.alpha_star).powi(2) * self.sigma_star_sq
    }

    /// Variance of `log q_a*/q` under `Q_a*`.
    pub fn tau2_sq(&self) -> f64 {
        self.alpha_star.powi(2) * self.sigma_star_sq
    }

    /// Absolute third central moment of `log q_a*/p` under `Q_a*`.
    pub fn r1(&self) -> f64 {
        (1.0 - self.alpha_star).powi(3) * self.rho_star
    }

    /// Absolute third central moment of `log q_a*/q` under `Q_a*`.
    pub fn r2(&self) -> f64 {
        self.alpha_star.powi(3) * self.rho_star
    }

    /// `D(delta)` rebuilt from `delta` and `log Z(a*)` alone:
    /// `-(a*/(1-a*)) delta - log Z(a*)/(1-a*)`. It agrees with `d_delta` up
    /// to the bisection error.
    pub fn exponent_identity(&self) -> f64 {
        let a = self.alpha_star;
        -(a * self.delta + self.log_z) / (1.0 - a)
    }

    /// Coefficient `1 / (2 (1 - a*))` of `log n` in the refined approximation.
    pub fn log_n_coefficient(&self) -> f64 {
        0.5 / (1.0 - self.alpha_star)
    }
}

/// Solve `D(Q_a||P) = delta` for `a` and evaluate the exponent there.
pub fn solve_alpha_star(family: &TiltedFamily, delta: f64) -> Result<ExponentSolution> {
    if family.is_degenerate() {
        return Err(Error::DegenerateFamily);
    }
    let max = family.kl_qp();
    if !(delta > 0.0 && delta < max) {
        return Err(Error::DeltaOutOfRange { delta, max });
    }
    let alpha_star = bisect(|a| g_alpha(family, a) - delta, 0.0, 1.0, ALPHA_TOL);
    let m = family.tilted_moments(alpha_star);
    Ok(ExponentSolution {
        delta,
        alpha_star,
        d_delta: alpha_star * m.mean - m.log_z,
        sigma_star_sq: m.variance,
        rho_star: m.abs_third_central,
        log_z: m.log_z,
    })
}

/// First and second derivatives in `a` of `D(Q_a||P)` and `D(Q_a||Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentDerivatives {
    /// `d/da D(Q_a||P) = -(1-a) V`.
    pub d_dp: f64,
    /// `d/da D(Q_a||Q) = a V`.
    pub d_dq: f64,
    /// `V - (1-a) M3`.
    pub d2_dp: f64,
    /// `V + a M3`.
    pub d2_dq: f64,
}

/// Here `V` and `M3` are the variance and signed third central moment of
/// `log p/q` under `Q_a`.
pub fn exponent_derivatives(family: &TiltedFamily, alpha: f64) -> ExponentDerivatives {
    let m = family.tilted_moments(alpha);
    let (v, m3) = (m.variance, m.third_central);
    ExponentDerivatives {
        d_dp: -(1.0 - alpha) * v,
        d_dq: alpha * v,
        d2_dp: v - (1.0 - alpha) * m3,
        d2_dq: v + alpha * m3,
    }
}

/// Infimum of the variance and supremum of the absolute third central moment
/// of `log p/q` over the tilted family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalMoments {
    pub sigma0_sq: f64,
    pub rho0: f64,
    pub alpha_sigma0: f64,
    pub alpha_rho0: f64,
}

pub const EXTREMAL_GRID: usize = 1025;

pub fn extremal_moments(family: &TiltedFamily) -> Result<ExtremalMoments> {
    extremal_moments_on_grid(family, EXTREMAL_GRID)
}

/// Grid search over `a` in `[0, 1]` (endpoints are the moments under `Q` and
/// `P`) followed by golden-section refinement inside the cells adjacent to
/// the best grid point.
pub fn extremal_moments_on_grid(family: &TiltedFamily, points: usize) -> Result<ExtremalMoments> {
    assert!(points >= 3, "need at least three grid points");
    let step = 1.0 / (points - 1) as f64;
    let grid: Vec<(f64, f64, f64)> = (0..points)
        .map(|i| {
            let a = if i == points - 1 { 1.0 } else { i as f64 * step };
            let m = family.tilted_moments(a);
            (a, m.variance, m.abs_third_central)
        })
        .collect();

    let refine = |center: usize, f: &dyn Fn(f64) -> f64| {
        let lo = center.saturating_sub(1) as f64 * step;
        let hi = ((center + 1).min(points - 1) as f64 * step).min(1.0);
        golden_section_min(f, lo, hi, 1e-12)
    };

    let i_var = (0..points).min_by(|&x, &y| grid[x].1.total_cmp(&grid[y].1)).expect("non-empty grid");
    let (a_ref, v_ref) = refine(i_var, &|a| family.tilted_moments(a).variance);
    let (alpha_sigma0, sigma0_sq) = if v_ref < grid[i_var].1 { (a_ref, v_ref) } else { (grid[i_var].0, grid[i_var].1) };

    let i_rho = (0..points).max_by(|&x, &y| grid[x].2.total_cmp(&grid[y].2)).expect("non-empty grid");
    let (a_ref, neg_r) = refine(i_rho, &|a| -family.tilted_moments(a).abs_third_central);
    let (alpha_rho0, rho0) = if -neg_r > grid[i_rho].2 { (a_ref, -neg_r) } else { (grid[i_rho].0, grid[i_rho].2) };

    if sigma0_sq < DEGENERATE_VARIANCE {
        return Err(Error::DegenerateFamily);
    }
    Ok(ExtremalMoments { sigma0_sq, rho0, alpha_sigma0, alpha_rho0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{kl_divergence, FiniteDistribution};

    fn paper_pair() -> TiltedFamily {
        TiltedFamily::new(FiniteDistribution::bernoulli(0.6).unwrap(), FiniteDistribution::bernoulli(0.25).unwrap()).unwrap()
    }

    #[test]
    fn g_limits() {
        let f = paper_pair();
        assert!(g_alpha(&f, 1.0 - 1e-9).abs() < 1e-7);
        assert!((g_alpha(&f, 1e-9) - f.kl_qp()).abs() < 1e-6);
        assert!((g_alpha(&f, 0.0) - f.kl_qp()).abs() < 1e-15);
        assert!((h_alpha(&f, 1.0) - f.kl_pq()).abs() < 1e-15);
    }

    #[test]
    fn g_matches_direct_divergence() {
        let f = paper_pair();
        for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let direct = kl_divergence(&f.tilt(a), f.p()).unwrap();
            assert!((g_alpha(&f, a) - direct).abs() < 1e-11, "a = {a}");
            let direct_q = kl_divergence(&f.tilt(a), f.q()).unwrap();
            assert!((h_alpha(&f, a) - direct_q).abs() < 1e-11, "a = {a}");
        }
    }

    #[test]
    fn g_strictly_decreasing() {
        let f = paper_pair();
        let vals: Vec<f64> = (0..=512).map(|i| g_alpha(&f, i as f64 / 512.0)).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn solution_at_table_level() {
        // mpmath oracle, 40 digits
        let s = solve_alpha_star(&paper_pair(), 0.19443).unwrap();
        assert!((s.alpha_star - 0.140_398_295_963_137_36).abs() < 1e-12);
        assert!((s.d_delta - 0.004_467_330_855_834_000_6).abs() < 1e-13);
        assert!((s.sigma_star_sq - 0.467_347_214_376_848_25).abs() < 1e-12);
        assert!((s.rho_star - 0.412_497_951_173_454_26).abs() < 1e-12);
        assert!(((-50.0 * s.d_delta).exp() - 0.799_821_626_706_609).abs() < 1e-10);

        let s = solve_alpha_star(&paper_pair(), 0.05).unwrap();
        assert!((s.alpha_star - 0.578_320_124_630_053_05).abs() < 1e-12);
        assert!((s.d_delta - 0.087_779_800_399_433_086).abs() < 1e-13);
    }

    #[test]
    fn solution_invariants() {
        let f = paper_pair();
        let s = solve_alpha_star(&f, 0.1).unwrap();
        assert!((g_alpha(&f, s.alpha_star) - 0.1).abs() < 1e-10);
        assert!((s.d_delta - kl_divergence(&f.tilt(s.alpha_star), f.q()).unwrap()).abs() < 1e-10);
        let a = s.alpha_star;
        let identity = -a / (1.0 - a) * s.delta - s.log_z / (1.0 - a);
        assert!((s.d_delta - identity).abs() < 1e-9);
        assert!((s.d_delta - s.exponent_identity()).abs() < 1e-9);
        assert!(s.rho_star >= s.sigma_star_sq.powf(1.5));
    }

    #[test]
    fn alpha_star_endpoints() {
        let f = paper_pair();
        let near_max = solve_alpha_star(&f, 0.999 * f.kl_qp()).unwrap();
        assert!(near_max.alpha_star < 0.01);
        let near_zero = solve_alpha_star(&f, 1e-6).unwrap();
        assert!(near_zero.alpha_star > 0.99);
    }

    #[test]
    fn solver_errors() {
        let f = paper_pair();
        assert!(matches!(solve_alpha_star(&f, 0.0), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(solve_alpha_star(&f, f.kl_qp()), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(solve_alpha_star(&f, -1.0), Err(Error::DeltaOutOfRange { .. })));
        let same = TiltedFamily::new(FiniteDistribution::bernoulli(0.5).unwrap(), FiniteDistribution::bernoulli(0.5).unwrap()).unwrap();
        assert_eq!(solve_alpha_star(&same, 0.1), Err(Error::DegenerateFamily));
    }

    #[test]
    fn d_delta_nonincreasing() {
        let f = paper_pair();
        let max = f.kl_qp();
        let ds: Vec<f64> = (1..=50).map(|i| solve_alpha_star(&f, max * i as f64 / 51.0).unwrap().d_delta).collect();
        assert!(ds.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn derivative_signs_and_finite_differences() {
        let f = paper_pair();
        for i in 1..20 {
            let d = exponent_derivatives(&f, i as f64 / 20.0);
            assert!(d.d_dp < 0.0 && d.d_dq > 0.0);
        }
        let (a, h) = (0.3, 1e-5);
        let d = exponent_derivatives(&f, a);
        let fd = (g_alpha(&f, a + h) - g_alpha(&f, a - h)) / (2.0 * h);
        assert!(((d.d_dp - fd) / d.d_dp).abs() < 1e-6);
        let fd2 = (exponent_derivatives(&f, a + h).d_dq - exponent_derivatives(&f, a - h).d_dq) / (2.0 * h);
        assert!(((d.d2_dq - fd2) / d.d2_dq).abs() < 1e-5);
    }

    #[test]
    fn scaling_identities_against_direct_moments() {
        let f = paper_pair();
        let s = solve_alpha_star(&f, 0.15).unwrap();
        let qa = f.tilt(s.alpha_star);
        let direct = |other: &FiniteDistribution| {
            // moments of log q_a/other under q_a
            let pts: Vec<(f64, f64)> = f
                .support()
                .iter()
                .map(|&i| (qa.probs()[i], qa.probs()[i].ln() - other.probs()[i].ln()))
                .collect();
            let mean: f64 = pts.iter().map(|(w, x)| w * x).sum();
            let var: f64 = pts.iter().map(|(w, x)| w * (x - mean).powi(2)).sum();
            let abs3: f64 = pts.iter().map(|(w, x)| w * (x - mean).abs().powi(3)).sum();
            (var, abs3)
        };
        let (t1, r1) = direct(f.p());
        let (t2, r2) = direct(f.q());
        assert!((t1 - s.tau1_sq()).abs() < 1e-11);
        assert!((t2 - s.tau2_sq()).abs() < 1e-11);
        assert!((r1 - s.r1()).abs() < 1e-11);
        assert!((r2 - s.r2()).abs() < 1e-11);
    }

    #[test]
    fn extremal_values() {
        let f = paper_pair();
        let e = extremal_moments(&f).unwrap();
        // minimum variance sits at a = 0 (moments under Q); mpmath
        assert!((e.sigma0_sq - 0.424_171_652_904_992_5).abs() < 1e-12);
        assert_eq!(e.alpha_sigma0, 0.0);
        assert!((e.rho0 - 0.425_324_663_658_42).abs() < 1e-12);

        let s = solve_alpha_star(&f, 0.19443).unwrap();
        assert!(e.sigma0_sq <= s.sigma_star_sq && e.rho0 >= s.rho_star);

        let fine = extremal_moments_on_grid(&f, 2049).unwrap();
        assert!((fine.sigma0_sq - e.sigma0_sq).abs() < 1e-8);
        assert!((fine.rho0 - e.rho0).abs() < 1e-8);
    }

    #[test]
    fn extremal_degenerate() {
        let same = TiltedFamily::new(FiniteDistribution::bernoulli(0.5).unwrap(), FiniteDistribution::bernoulli(0.5).unwrap()).unwrap();
        assert_eq!(extremal_moments(&same), Err(Error::DegenerateFamily));
    }
}
