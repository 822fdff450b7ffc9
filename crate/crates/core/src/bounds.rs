//! Closed-form finite-sample bounds and approximations for `log e*_1`.
//!
//! Everything is computed in nats on the log scale; probabilities only appear
//! in [`BoundReport`] accessors.

use std::f64::consts::LN_2;

use crate::dist::{LlrMoments, TiltedFamily};
use crate::error::{Error, Result};
use crate::exponent::{extremal_moments, solve_alpha_star, ExponentSolution, ExtremalMoments};
use crate::gaussian::{phi_inv, sqrt_2pi, INV_SQRT_2PI};

/// Default `Delta` in the Stein-regime converse.
pub const DEFAULT_STEIN_DELTA: f64 = 1.0;

/// `(1/gamma) (1 - e2 - P(log dP/dQ > log gamma))`, clamped below at 0.
///
/// Any test with second error `e2` has first error at least this large.
pub fn one_shot_converse_rhs(e2: f64, p_tail: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    Ok(((1.0 - e2 - p_tail) / gamma).max(0.0))
}

/// A bound that may only hold from some sample size on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Value(f64),
    /// The bound's hypothesis fails; it holds for `n >= min_n`.
    Invalid { min_n: u64 },
}

impl BoundValue {
    pub fn value(self) -> Option<f64> {
        match self {
            BoundValue::Value(v) => Some(v),
            BoundValue::Invalid { .. } => None,
        }
    }

    pub fn is_valid(self) -> bool {
        matches!(self, BoundValue::Value(_))
    }
}

/// Sample size together with the second-error budget, given either as `eps`
/// or as the exponent `delta = -log(eps) / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub n: u64,
    pub epsilon: f64,
    /// `log eps`; kept separately because `exp(-n delta)` underflows early.
    pub log_epsilon: f64,
    pub delta: f64,
}

impl BoundQuery {
    pub fn with_epsilon(n: u64, epsilon: f64) -> Result<Self> {
        check_n(n)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon = {epsilon} must lie in (0, 1)")));
        }
        let log_epsilon = epsilon.ln();
        Ok(Self { n, epsilon, log_epsilon, delta: -log_epsilon / n as f64 })
    }

    /// Budget given as `log eps < 0`.
    pub fn with_log_epsilon(n: u64, log_epsilon: f64) -> Result<Self> {
        check_n(n)?;
        if !(log_epsilon < 0.0 && log_epsilon.is_finite()) {
            return Err(Error::Domain(format!("log epsilon = {log_epsilon} must be negative and finite")));
        }
        Ok(Self { n, epsilon: log_epsilon.exp(), log_epsilon, delta: -log_epsilon / n as f64 })
    }

    pub fn with_delta(n: u64, delta: f64) -> Result<Self> {
        check_n(n)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("delta = {delta} must be positive")));
        }
        let log_epsilon = -(n as f64) * delta;
        Ok(Self { n, epsilon: log_epsilon.exp(), log_epsilon, delta })
    }

    fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sample size n must be at least 1".into()));
    }
    Ok(())
}

fn be_constant(mom: &LlrMoments) -> Result<f64> {
    mom.be_constant.ok_or(Error::DegenerateFamily)
}

/// Smallest integer `n` with `n >= x`, for nonnegative `x`.
fn ceil_u64(x: f64) -> u64 {
    (x.ceil() as u64).max(1)
}

/// Smallest integer `n` with `n > x`, for nonnegative `x`.
fn above_u64(x: f64) -> u64 {
    x.floor() as u64 + 1
}

/// Lower bound on `log e*_1(n, eps)` for fixed `eps`, from a Berry–Esseen
/// argument with free parameter `Delta > 0`. `mom` are the LLR moments
/// under `P`.
///
/// Valid for `n >= ((B + Delta)/(1 - eps))^2` with `B = T/(2 sigma^3)`.
pub fn stein_converse(q: &BoundQuery, mom: &LlrMoments, big_delta: f64) -> Result<BoundValue> {
    stein_converse_with(q, mom, big_delta, &phi_inv)
}

/// Standard normal quantile used by the Stein-regime bounds; swappable so
/// that verification can inject a faulty one.
pub type Quantile<'a> = &'a dyn Fn(f64) -> Result<f64>;

/// [`stein_converse`] with an explicit quantile function.
pub fn stein_converse_with(q: &BoundQuery, mom: &LlrMoments, big_delta: f64, quantile: Quantile) -> Result<BoundValue> {
    if !(big_delta > 0.0) {
        return Err(Error::Domain(format!("Delta = {big_delta} must be positive")));
    }
    let b = be_constant(mom)?;
    let min_n = ceil_u64(((b + big_delta) / (1.0 - q.epsilon)).powi(2));
    if q.n < min_n {
        return Ok(BoundValue::Invalid { min_n });
    }
    let u = q.epsilon + (b + big_delta) / q.sqrt_n();
    let z = if u >= 1.0 { f64::INFINITY } else { quantile(u)? };
    Ok(BoundValue::Value(
        -(q.n as f64) * mom.mean - q.sqrt_n() * mom.sigma() * z - 0.5 * q.log_n() + big_delta.ln(),
    ))
}

/// Upper bound on `log e*_1(n, eps)` for fixed `eps`; valid for
/// `n > (B/eps)^2`.
pub fn stein_achievability(q: &BoundQuery, mom: &LlrMoments) -> Result<BoundValue> {
    stein_achievability_with(q, mom, &phi_inv)
}

/// [`stein_achievability`] with an explicit quantile function.
pub fn stein_achievability_with(q: &BoundQuery, mom: &LlrMoments, quantile: Quantile) -> Result<BoundValue> {
    let b = be_constant(mom)?;
    let min_n = above_u64((b / q.epsilon).powi(2));
    if q.n < min_n {
        return Ok(BoundValue::Invalid { min_n });
    }
    let sigma = mom.sigma();
    let z = quantile(q.epsilon - b / q.sqrt_n())?;
    Ok(BoundValue::Value(
        -(q.n as f64) * mom.mean - q.sqrt_n() * sigma * z - 0.5 * q.log_n() + (1.0 / (sqrt_2pi() * sigma) + 2.0 * b).ln(),
    ))
}

/// Upper bound on `E[exp(-S) 1{S >= x}]` for a sum `S` of `n` i.i.d. terms
/// with standard deviation `sigma` and absolute third central moment `rho`.
pub fn be2_bound(sigma: f64, rho: f64, n: u64, x: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
    }
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("rho = {rho} must be nonnegative")));
    }
    check_n(n)?;
    Ok((INV_SQRT_2PI + rho / (sigma * sigma)) * (-x).exp() / ((n as f64).sqrt() * sigma))
}

/// The constant `C` with `log E*_1(n, delta) <= -n D(delta) - log n / (2(1-a*)) + C`
/// for every `n >= 1`.
///
/// The two Berry–Esseen terms use the spreads of `log q_a*/q` (`tau2`, `r2`)
/// and of `log q_a*/p` (`tau1`, `r1`) under `Q_a*`.
pub fn achievability_constant(sol: &ExponentSolution) -> f64 {
    let a = sol.alpha_star;
    let term = |tau_sq: f64, r: f64| {
        let tau = tau_sq.sqrt();
        (1.0 / (tau * sqrt_2pi()) + r / (tau_sq * tau)).ln()
    };
    term(sol.tau2_sq(), sol.r2()) + a / (1.0 - a) * term(sol.tau1_sq(), sol.r1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseConstant {
    /// `C'` with `log E*_1(n, delta) >= -n D(delta) - log n / (2(1-a*)) + C'`.
    pub c_prime: f64,
    pub m: f64,
    /// First sample size from which the lower bound is guaranteed.
    pub n_min: u64,
    /// Smallest `n0` with `log n <= (1-a*) sigma*^2 sqrt(n)` for all `n >= n0`.
    pub n0: u64,
}

/// Smallest `n0 >= 1` such that `log n <= c sqrt(n)` for every `n >= n0`.
///
/// `c sqrt(n) - log n` is decreasing up to `n = 4/c^2` and increasing
/// afterwards, so the answer is 1 when the minimum is nonnegative and
/// otherwise the first integer past the upper root.
pub fn log_sqrt_threshold(c: f64) -> u64 {
    assert!(c > 0.0, "log_sqrt_threshold needs c > 0");
    let f = |n: f64| c * n.sqrt() - n.ln();
    let turn = 4.0 / (c * c);
    if f(turn) >= 0.0 {
        return 1;
    }
    let mut hi = 2.0 * turn;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let root = crate::numeric::bisect(f, turn, hi, 1e-9 * hi);
    let mut n0 = root.floor().max(1.0);
    while f(n0) < 0.0 {
        n0 += 1.0;
    }
    while n0 - 1.0 > turn && f(n0 - 1.0) >= 0.0 {
        n0 -= 1.0;
    }
    n0 as u64
}

/// Constant `C'` of the matching lower bound, its auxiliary `m`, and the
/// sample size from which it holds.
pub fn converse_constant(sol: &ExponentSolution, ext: &ExtremalMoments) -> Result<ConverseConstant> {
    if !(ext.sigma0_sq > 0.0) || !(sol.sigma_star_sq > 0.0) {
        return Err(Error::DegenerateFamily);
    }
    let a = sol.alpha_star;
    let s2 = sol.sigma_star_sq;
    let rho0 = ext.rho0;
    let ratio = rho0 / ext.sigma0_sq.powf(1.5) + 1.0;

    let m = -2.0 * sqrt_2pi() * (1.0 - a) * ratio * (s2 + rho0).sqrt();
    let c_prime = LN_2 / (1.0 - a) - (s2 + 2.0 * rho0) * (2.0 - a) / (2.0 * (1.0 - a)) - (ext.sigma0_sq - rho0).abs() / 2.0 + m;

    let n0 = log_sqrt_threshold((1.0 - a) * s2);
    let n_be = above_u64(7.0 * ratio * ratio);
    let n_taylor = above_u64((s2 + 2.0 * rho0 - 2.0 * m + 2.0 * LN_2).powi(2) / ((1.0 - a).powi(2) * s2 * s2));
    Ok(ConverseConstant { c_prime, m, n_min: n_be.max(n_taylor).max(n0), n0 })
}

/// Everything that depends only on the pair `(P, Q)`, computed once.
#[derive(Debug, Clone)]
pub struct BoundContext {
    family: TiltedFamily,
    moments: LlrMoments,
    extremal: ExtremalMoments,
    stein_delta: f64,
}

impl BoundContext {
    pub fn new(family: TiltedFamily) -> Result<Self> {
        if family.is_degenerate() {
            return Err(Error::DegenerateFamily);
        }
        let moments = family.moments_under_p();
        let extremal = extremal_moments(&family)?;
        Ok(Self { family, moments, extremal, stein_delta: DEFAULT_STEIN_DELTA })
    }

    /// Use `big_delta` as the free parameter of the Stein-regime converse.
    pub fn with_stein_delta(mut self, big_delta: f64) -> Result<Self> {
        if !(big_delta > 0.0) {
            return Err(Error::Domain(format!("Delta = {big_delta} must be positive")));
        }
        self.stein_delta = big_delta;
        Ok(self)
    }

    pub fn family(&self) -> &TiltedFamily {
        &self.family
    }

    pub fn moments(&self) -> &LlrMoments {
        &self.moments
    }

    pub fn extremal(&self) -> &ExtremalMoments {
        &self.extremal
    }

    /// All approximations and bounds at `q`.
    pub fn report(&self, q: &BoundQuery) -> Result<BoundReport> {
        let sol = match solve_alpha_star(&self.family, q.delta) {
            Ok(sol) => Some(sol),
            Err(Error::DeltaOutOfRange { .. }) => None,
            Err(e) => return Err(e),
        };
        let converse = sol.as_ref().map(|s| converse_constant(s, &self.extremal)).transpose()?;
        let stein_conv = if q.epsilon > 0.0 { Some(stein_converse(q, &self.moments, self.stein_delta)?) } else { None };
        let stein_ach = if q.epsilon > 0.0 { Some(stein_achievability(q, &self.moments)?) } else { None };
        Ok(approximations(q, sol.as_ref(), &self.moments, converse, stein_conv, stein_ach))
    }
}

/// The four approximations to `log e*_1` and the bounds around them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    pub epsilon: f64,
    pub log_epsilon: f64,
    pub delta: f64,
    /// `-n D(P||Q)`.
    pub stein: f64,
    /// `-n D(P||Q) - sqrt(n) sigma Phi^-1(eps) - log(n)/2`; absent when `eps`
    /// underflows.
    pub strassen: Option<f64>,
    /// `-n D(delta)`; absent unless `0 < delta < D(Q||P)`.
    pub hoeffding: Option<f64>,
    /// `-n D(delta) - log(n) / (2(1-a*))`.
    pub new_approx: Option<f64>,
    pub alpha_star: Option<f64>,
    pub d_delta: Option<f64>,
    pub c: Option<f64>,
    pub c_prime: Option<f64>,
    pub m: Option<f64>,
    pub n0: Option<u64>,
    pub n_min_converse: Option<u64>,
    pub stein_converse: Option<BoundValue>,
    pub stein_achievability: Option<BoundValue>,
}

/// Assemble a report from precomputed pieces.
pub fn approximations(
    q: &BoundQuery,
    sol: Option<&ExponentSolution>,
    mom: &LlrMoments,
    converse: Option<ConverseConstant>,
    stein_converse: Option<BoundValue>,
    stein_achievability: Option<BoundValue>,
) -> BoundReport {
    let n = q.n as f64;
    let stein = -n * mom.mean;
    let strassen = phi_inv(q.epsilon).ok().map(|z| stein - q.sqrt_n() * mom.sigma() * z - 0.5 * q.log_n());
    let hoeffding = sol.map(|s| -n * s.d_delta);
    let new_approx = sol.map(|s| -n * s.d_delta - s.log_n_coefficient() * q.log_n());
    BoundReport {
        n: q.n,
        epsilon: q.epsilon,
        log_epsilon: q.log_epsilon,
        delta: q.delta,
        stein,
        strassen,
        hoeffding,
        new_approx,
        alpha_star: sol.map(|s| s.alpha_star),
        d_delta: sol.map(|s| s.d_delta),
        c: sol.map(achievability_constant),
        c_prime: converse.map(|c| c.c_prime),
        m: converse.map(|c| c.m),
        n0: converse.map(|c| c.n0),
        n_min_converse: converse.map(|c| c.n_min),
        stein_converse,
        stein_achievability,
    }
}

impl BoundReport {
    /// `new_approx + C`, an upper bound on `log E*_1(n, delta)`.
    pub fn achievability_bound(&self) -> Option<f64> {
        Some(self.new_approx? + self.c?)
    }

    /// `new_approx + C'`, a lower bound on `log E*_1(n, delta)` once
    /// `n >= n_min_converse`.
    pub fn converse_bound(&self) -> Option<f64> {
        Some(self.new_approx? + self.c_prime?)
    }

    pub fn converse_valid(&self) -> bool {
        self.n_min_converse.is_some_and(|m| self.n >= m)
    }

    pub fn stein_prob(&self) -> f64 {
        self.stein.exp()
    }

    /// Unclamped: the approximation can exceed 1 for small `n`.
    pub fn strassen_prob(&self) -> Option<f64> {
        self.strassen.map(f64::exp)
    }

    pub fn strassen_prob_clamped(&self) -> Option<f64> {
        self.strassen_prob().map(|p| p.min(1.0))
    }

    pub fn hoeffding_prob(&self) -> Option<f64> {
        self.hoeffding.map(f64::exp)
    }

    pub fn new_approx_prob(&self) -> Option<f64> {
        self.new_approx.map(f64::exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::FiniteDistribution;
    use crate::oracle::build_atom_table;

    fn paper_pair() -> TiltedFamily {
        TiltedFamily::new(FiniteDistribution::bernoulli(0.6).unwrap(), FiniteDistribution::bernoulli(0.25).unwrap()).unwrap()
    }

    #[test]
    fn one_shot() {
        assert_eq!(one_shot_converse_rhs(1.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(one_shot_converse_rhs(0.0, 0.0, 2.0).unwrap(), 0.5);
        assert!(one_shot_converse_rhs(0.1, 0.1, 0.0).is_err());
    }

    #[test]
    fn one_shot_below_exact_n1() {
        let f = paper_pair();
        let t = build_atom_table(&f, 1).unwrap();
        for gamma in [0.5f64, 1.0, 2.0] {
            for e2 in [0.0, 0.1, 0.4, 0.7] {
                let p_tail: f64 = f.llr().iter().zip(f.p().probs()).filter(|(l, _)| **l > gamma.ln()).map(|(_, p)| p).sum();
                let lb = one_shot_converse_rhs(e2, p_tail, gamma).unwrap();
                assert!(lb <= t.e1_star(e2).unwrap().e1_star + 1e-15);
            }
        }
    }

    #[test]
    fn queries() {
        let q = BoundQuery::with_epsilon(50, 0.01).unwrap();
        assert!((q.delta - 0.01f64.ln() / -50.0).abs() < 1e-16);
        let q = BoundQuery::with_delta(10_000, 0.2).unwrap();
        assert_eq!(q.epsilon, 0.0);
        assert_eq!(q.log_epsilon, -2000.0);
        assert!(BoundQuery::with_epsilon(0, 0.5).is_err());
        assert!(BoundQuery::with_epsilon(5, 1.0).is_err());
        assert!(BoundQuery::with_delta(5, 0.0).is_err());
    }

    #[test]
    fn stein_thresholds() {
        let mom = paper_pair().moments_under_p();
        let b = mom.be_constant.unwrap();
        let q = BoundQuery::with_epsilon(1, 0.5).unwrap();
        let want = (((b + 1.0) / 0.5).powi(2)).ceil() as u64;
        assert_eq!(stein_converse(&q, &mom, 1.0).unwrap(), BoundValue::Invalid { min_n: want });
        assert!(want > 1);
        let q = BoundQuery::with_epsilon(want, 0.5).unwrap();
        assert!(stein_converse(&q, &mom, 1.0).unwrap().is_valid());
        let q = BoundQuery::with_epsilon(2, 0.01).unwrap();
        let want = ((b / 0.01).powi(2)).floor() as u64 + 1;
        assert_eq!(stein_achievability(&q, &mom).unwrap(), BoundValue::Invalid { min_n: want });
    }

    #[test]
    fn stein_converse_small_delta_diverges() {
        let mom = paper_pair().moments_under_p();
        let q = BoundQuery::with_epsilon(10_000, 0.5).unwrap();
        let a = stein_converse(&q, &mom, 1.0).unwrap().value().unwrap();
        let b = stein_converse(&q, &mom, 1e-8).unwrap().value().unwrap();
        let c = stein_converse(&q, &mom, 1e-300).unwrap().value().unwrap();
        assert!(a.is_finite() && b < a && c < b);
    }

    #[test]
    fn stein_achievability_leading_order() {
        let f = paper_pair();
        let mom = f.moments_under_p();
        let q = BoundQuery::with_epsilon(100_000, 0.5).unwrap();
        let v = stein_achievability(&q, &mom).unwrap().value().unwrap();
        let lead = -1e5 * f.kl_pq();
        assert!(((v - lead) / lead).abs() < 0.01);
    }

    #[test]
    fn stein_bounds_sandwich_oracle() {
        let f = paper_pair();
        let mom = f.moments_under_p();
        for n in [200u64, 500, 1000] {
            let t = build_atom_table(&f, n as usize).unwrap();
            for eps in [0.3, 0.5, 0.7] {
                let q = BoundQuery::with_epsilon(n, eps).unwrap();
                let exact = t.e1_star(eps).unwrap().log_e1_star;
                if let Some(lb) = stein_converse(&q, &mom, 1.0).unwrap().value() {
                    assert!(lb <= exact, "n={n} eps={eps}");
                }
                if let Some(ub) = stein_achievability(&q, &mom).unwrap().value() {
                    assert!(exact <= ub, "n={n} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn be2_scaling() {
        assert!(be2_bound(0.0, 1.0, 4, 0.0).is_err());
        let a = be2_bound(0.7, 0.4, 4, 0.5).unwrap();
        let b = be2_bound(0.7, 0.4, 16, 0.5).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
        assert!(be2_bound(0.7, 0.4, 4, 800.0).unwrap() == 0.0);
    }

    #[test]
    fn be2_dominates_enumeration_n8() {
        let f = paper_pair();
        let sol = solve_alpha_star(&f, 0.19443).unwrap();
        let a = sol.alpha_star;
        // Z = log q_a/p = -(1-a) llr - log Z(a), under Q_a
        let w = f.tilt(a);
        let z: Vec<f64> = f.llr().iter().map(|l| -(1.0 - a) * l - sol.log_z).collect();
        let n = 8;
        for x in [-1.0, 0.0, 1.0, 2.0] {
            let mut lhs = 0.0;
            for ones in 0..=n {
                let s = ones as f64 * z[1] + (n - ones) as f64 * z[0];
                if s >= x {
                    let binom = (0..ones).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64);
                    lhs += binom * w.probs()[1].powi(ones as i32) * w.probs()[0].powi((n - ones) as i32) * (-s).exp();
                }
            }
            let rhs = be2_bound(sol.tau1_sq().sqrt(), sol.r1(), n as u64, x).unwrap();
            assert!(lhs <= rhs, "x={x}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn c_matches_canonical_form() {
        let f = paper_pair();
        for delta in [0.05, 0.1, 0.15, 0.19443] {
            let sol = solve_alpha_star(&f, delta).unwrap();
            let (a, s, rho) = (sol.alpha_star, sol.sigma_star(), sol.rho_star);
            let canonical = (1.0 / (s * a * sqrt_2pi()) + rho / s.powi(3)).ln()
                + a / (1.0 - a) * (1.0 / (s * (1.0 - a) * sqrt_2pi()) + rho / s.powi(3)).ln();
            assert!((achievability_constant(&sol) - canonical).abs() < 1e-12);
        }
    }

    #[test]
    fn c_is_asymmetric() {
        let f = paper_pair();
        let sol = solve_alpha_star(&f, 0.1).unwrap();
        let a = sol.alpha_star;
        let term = |t: f64| (1.0 / (sol.sigma_star() * t * sqrt_2pi()) + sol.rho_star / sol.sigma_star().powi(3)).ln();
        let swapped = term(1.0 - a) + a / (1.0 - a) * term(a);
        assert!((swapped - achievability_constant(&sol)).abs() > 1e-3);
    }

    #[test]
    fn c_bounds_oracle_at_n50() {
        let f = paper_pair();
        let ctx = BoundContext::new(f.clone()).unwrap();
        let t = build_atom_table(&f, 50).unwrap();
        let q = BoundQuery::with_delta(50, 0.19443).unwrap();
        let r = ctx.report(&q).unwrap();
        let exact = t.big_e1_star(0.19443).unwrap().log_e1_star;
        assert!(exact <= r.achievability_bound().unwrap());
    }

    #[test]
    fn n0_threshold() {
        // c >= 2/e: the inequality holds everywhere
        assert_eq!(log_sqrt_threshold(1.0), 1);
        for c in [0.05, 0.2, 0.5, 0.7] {
            let n0 = log_sqrt_threshold(c);
            let f = |n: u64| c * (n as f64).sqrt() - (n as f64).ln();
            assert!(f(n0) >= 0.0);
            assert!(n0 == 1 || f(n0 - 1) < 0.0);
            assert!((n0..n0 + 10_000).all(|n| f(n) >= 0.0));
        }
    }

    #[test]
    fn converse_constants_paper_pair() {
        let f = paper_pair();
        let ext = extremal_moments(&f).unwrap();
        for (delta, n_min) in [(0.05, 3262u64), (0.1, 3081), (0.15, 3184), (0.19443, 3389)] {
            let sol = solve_alpha_star(&f, delta).unwrap();
            let cc = converse_constant(&sol, &ext).unwrap();
            assert!(cc.m < 0.0);
            assert!(cc.c_prime <= achievability_constant(&sol));
            assert_eq!(cc.n_min, n_min, "delta={delta}");
        }
    }

    #[test]
    fn table_row_one_approximations() {
        let ctx = BoundContext::new(paper_pair()).unwrap();
        let q = BoundQuery::with_epsilon(50, 5.808_677_817_566_538e-5).unwrap();
        let r = ctx.report(&q).unwrap();
        assert!((r.strassen_prob().unwrap() - 84.169827).abs() < 1e-4);
        assert!((r.hoeffding_prob().unwrap() - 0.80399457).abs() < 1e-7);
        assert!((r.new_approx_prob().unwrap() - 0.082957113).abs() < 1e-8);
        assert!((r.stein_prob() - 1.1315876e-6).abs() < 1e-12);
        assert_eq!(r.strassen_prob_clamped(), Some(1.0));
    }

    #[test]
    fn out_of_range_delta_is_na() {
        let ctx = BoundContext::new(paper_pair()).unwrap();
        let q = BoundQuery::with_epsilon(5, 0.01).unwrap();
        let r = ctx.report(&q).unwrap();
        assert!(r.delta > ctx.family().kl_qp());
        assert!(r.hoeffding.is_none() && r.new_approx.is_none() && r.c.is_none());
        assert!(r.strassen.is_some());
    }

    #[test]
    fn new_approx_decreases_in_n() {
        let ctx = BoundContext::new(paper_pair()).unwrap();
        let vals: Vec<f64> = (1..200).map(|n| ctx.report(&BoundQuery::with_delta(n, 0.1).unwrap()).unwrap().new_approx.unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn degenerate_pair_rejected() {
        let f = TiltedFamily::new(FiniteDistribution::bernoulli(0.3).unwrap(), FiniteDistribution::bernoulli(0.3).unwrap()).unwrap();
        assert!(matches!(BoundContext::new(f), Err(Error::DegenerateFamily)));
    }
}
