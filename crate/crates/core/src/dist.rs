//! Finite-alphabet distributions and the geometric-mixture family between two
//! of them.
//!
//! Everything here works with the counting measure on `{0, .., k-1}`, so every
//! integral is a finite sum. Sums over symbols use compensated summation and
//! products `p^a q^(1-a)` are formed as `exp(a ln p + (1-a) ln q)` on the
//! common support.

use crate::error::{Error, Result};
use crate::numeric::{golden_section_min, kahan_sum, log_sum_exp};

/// Tolerance on `sum(probs) == 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Below this the variance of the log-likelihood ratio is treated as zero.
pub const DEGENERATE_VARIANCE: f64 = 1e-14;

/// A probability vector indexed by symbol id.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        if let Some((i, x)) = probs.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {i} = {x} is not a probability")));
        }
        let total = kahan_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    /// `Bern(p)` on `{0, 1}`: mass `p` on symbol 1.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("bernoulli parameter {p} not in [0, 1]")));
        }
        Self::new(vec![1.0 - p, p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Alphabet size.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Symbols carrying positive mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(i, _)| i)
    }
}

fn check_same_alphabet(a: &FiniteDistribution, b: &FiniteDistribution) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::AlphabetMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// Relative entropy `D(a||b)` in nats.
pub fn kl_divergence(a: &FiniteDistribution, b: &FiniteDistribution) -> Result<f64> {
    check_same_alphabet(a, b)?;
    let mut terms = Vec::with_capacity(a.len());
    for (i, (&ai, &bi)) in a.probs.iter().zip(&b.probs).enumerate() {
        if ai == 0.0 {
            continue;
        }
        if bi == 0.0 {
            return Err(Error::SupportMismatch { symbol: i });
        }
        terms.push(ai * (ai.ln() - bi.ln()));
    }
    Ok(kahan_sum(terms).max(0.0))
}

/// Squared Hellinger distance with the convention `1 - sum(sqrt(a b))`, so
/// that it lies in `[0, 1]` and equals `1 - Z(1/2)`.
pub fn hellinger_sq(a: &FiniteDistribution, b: &FiniteDistribution) -> Result<f64> {
    check_same_alphabet(a, b)?;
    let bc = kahan_sum(a.probs.iter().zip(&b.probs).map(|(&x, &y)| (x * y).sqrt()));
    Ok((1.0 - bc).clamp(0.0, 1.0))
}

/// Moments of the log-likelihood ratio `log p/q` under some reference law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrMoments {
    /// `E[log p/q]`; the relative entropy `D(P||Q)` when the reference is `P`.
    pub mean: f64,
    pub variance: f64,
    /// `E|log p/q - mean|^3`.
    pub abs_third_central: f64,
    /// Berry–Esseen ratio `T / (2 sigma^3)`; `None` when the variance is
    /// below [`DEGENERATE_VARIANCE`].
    pub be_constant: Option<f64>,
}

impl LlrMoments {
    fn from_weighted(weights: &[f64], llr: &[f64]) -> Self {
        let mean = kahan_sum(weights.iter().zip(llr).map(|(w, l)| w * l));
        let variance = kahan_sum(weights.iter().zip(llr).map(|(w, l)| w * (l - mean).powi(2)));
        let abs_third_central = kahan_sum(weights.iter().zip(llr).map(|(w, l)| w * (l - mean).abs().powi(3)));
        let be_constant = (variance >= DEGENERATE_VARIANCE).then(|| abs_third_central / (2.0 * variance.powf(1.5)));
        Self { mean, variance, abs_third_central, be_constant }
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    /// True when the log-likelihood ratio is (numerically) constant.
    pub fn is_degenerate(&self) -> bool {
        self.be_constant.is_none()
    }
}

/// Moments of `log p/q` when `X ~ reference`.
///
/// `p` and `q` must be mutually absolutely continuous and `reference` must
/// live on their support.
pub fn llr_moments(reference: &FiniteDistribution, p: &FiniteDistribution, q: &FiniteDistribution) -> Result<LlrMoments> {
    check_same_alphabet(p, q)?;
    check_same_alphabet(reference, p)?;
    let mut weights = Vec::new();
    let mut llr = Vec::new();
    for i in 0..p.len() {
        let (r, pi, qi) = (reference.probs[i], p.probs[i], q.probs[i]);
        if (pi > 0.0) != (qi > 0.0) {
            return Err(Error::SupportMismatch { symbol: i });
        }
        if r == 0.0 {
            continue;
        }
        if pi == 0.0 {
            return Err(Error::SupportMismatch { symbol: i });
        }
        weights.push(r);
        llr.push(pi.ln() - qi.ln());
    }
    Ok(LlrMoments::from_weighted(&weights, &llr))
}

/// Central moments of `log p/q` under a tilted law `Q_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    pub alpha: f64,
    /// `log Z(a)`.
    pub log_z: f64,
    /// `E[log p/q] = Z'(a)/Z(a)`.
    pub mean: f64,
    pub variance: f64,
    /// Signed `E[(log p/q - mean)^3]`.
    pub third_central: f64,
    pub abs_third_central: f64,
}

/// `Z` and its first three derivatives in `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZDerivatives {
    pub z: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// A pair `(P, Q)` with identical supports, together with the tilted family
/// `q_a = p^a q^(1-a) / Z(a)` that interpolates from `Q` (`a = 0`) to `P`
/// (`a = 1`).
#[derive(Debug, Clone)]
pub struct TiltedFamily {
    p: FiniteDistribution,
    q: FiniteDistribution,
    support: Vec<usize>,
    log_p: Vec<f64>,
    log_q: Vec<f64>,
    llr: Vec<f64>,
}

impl TiltedFamily {
    /// Fails unless `p` and `q` share an alphabet of size at least two and
    /// have exactly the same support.
    pub fn new(p: FiniteDistribution, q: FiniteDistribution) -> Result<Self> {
        check_same_alphabet(&p, &q)?;
        if p.len() < 2 {
            return Err(Error::InvalidDistribution("alphabet needs at least two symbols".into()));
        }
        let mut support = Vec::new();
        for i in 0..p.len() {
            match (p.probs[i] > 0.0, q.probs[i] > 0.0) {
                (true, true) => support.push(i),
                (false, false) => {}
                _ => return Err(Error::SupportMismatch { symbol: i }),
            }
        }
        let log_p: Vec<f64> = support.iter().map(|&i| p.probs[i].ln()).collect();
        let log_q: Vec<f64> = support.iter().map(|&i| q.probs[i].ln()).collect();
        let llr = log_p.iter().zip(&log_q).map(|(a, b)| a - b).collect();
        Ok(Self { p, q, support, log_p, log_q, llr })
    }

    pub fn p(&self) -> &FiniteDistribution {
        &self.p
    }

    pub fn q(&self) -> &FiniteDistribution {
        &self.q
    }

    /// Symbol ids of the common support, in increasing order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `log p/q` per support symbol (same indexing as [`support`](Self::support)).
    pub fn llr(&self) -> &[f64] {
        &self.llr
    }

    pub fn log_p(&self) -> &[f64] {
        &self.log_p
    }

    pub fn log_q(&self) -> &[f64] {
        &self.log_q
    }

    /// The family with the roles of `P` and `Q` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            p: self.q.clone(),
            q: self.p.clone(),
            support: self.support.clone(),
            log_p: self.log_q.clone(),
            log_q: self.log_p.clone(),
            llr: self.llr.iter().map(|l| -l).collect(),
        }
    }

    /// `D(P||Q)`.
    pub fn kl_pq(&self) -> f64 {
        kl_divergence(&self.p, &self.q).expect("supports checked at construction")
    }

    /// `D(Q||P)`, the upper end of the admissible constraint range.
    pub fn kl_qp(&self) -> f64 {
        kl_divergence(&self.q, &self.p).expect("supports checked at construction")
    }

    /// Moments of `log p/q` under `P` (the Stein-regime quantities).
    pub fn moments_under_p(&self) -> LlrMoments {
        let w: Vec<f64> = self.support.iter().map(|&i| self.p.probs[i]).collect();
        LlrMoments::from_weighted(&w, &self.llr)
    }

    /// True when `P = Q` on the support (the log-likelihood ratio is constant).
    pub fn is_degenerate(&self) -> bool {
        self.moments_under_p().is_degenerate()
    }

    fn log_weights(&self, alpha: f64) -> impl Iterator<Item = f64> + '_ {
        self.log_p.iter().zip(&self.log_q).map(move |(lp, lq)| alpha * lp + (1.0 - alpha) * lq)
    }

    /// `Z(a) = sum p^a q^(1-a)`.
    pub fn z(&self, alpha: f64) -> f64 {
        kahan_sum(self.log_weights(alpha).map(f64::exp))
    }

    /// `log Z(a)`, evaluated with log-sum-exp.
    pub fn log_z(&self, alpha: f64) -> f64 {
        let lw: Vec<f64> = self.log_weights(alpha).collect();
        log_sum_exp(&lw)
    }

    /// `Z, Z', Z'', Z'''` at `alpha` in one pass; `Z^(m) = sum p^a q^(1-a) (log p/q)^m`.
    pub fn z_derivatives(&self, alpha: f64) -> ZDerivatives {
        let mut acc = [crate::numeric::KahanSum::new(); 4];
        for (lw, l) in self.log_weights(alpha).zip(&self.llr) {
            let w = lw.exp();
            acc[0].add(w);
            acc[1].add(w * l);
            acc[2].add(w * l * l);
            acc[3].add(w * l * l * l);
        }
        ZDerivatives { z: acc[0].value(), d1: acc[1].value(), d2: acc[2].value(), d3: acc[3].value() }
    }

    /// Tilted probabilities on the support; the endpoints return `q` and `p`
    /// verbatim.
    fn tilted_weights(&self, alpha: f64) -> (f64, Vec<f64>) {
        if alpha == 0.0 {
            return (0.0, self.support.iter().map(|&i| self.q.probs[i]).collect());
        }
        if alpha == 1.0 {
            return (0.0, self.support.iter().map(|&i| self.p.probs[i]).collect());
        }
        let lw: Vec<f64> = self.log_weights(alpha).collect();
        let log_z = log_sum_exp(&lw);
        (log_z, lw.iter().map(|x| (x - log_z).exp()).collect())
    }

    /// The tilted distribution `Q_a` over the full alphabet.
    pub fn tilt(&self, alpha: f64) -> FiniteDistribution {
        if alpha == 0.0 {
            return self.q.clone();
        }
        if alpha == 1.0 {
            return self.p.clone();
        }
        let (_, w) = self.tilted_weights(alpha);
        let mut probs = vec![0.0; self.p.len()];
        for (&i, wi) in self.support.iter().zip(w) {
            probs[i] = wi;
        }
        FiniteDistribution { probs }
    }

    /// Moments of `log p/q` under `Q_a`, `a` in `[0, 1]`.
    pub fn tilted_moments(&self, alpha: f64) -> TiltedMoments {
        let (log_z, w) = self.tilted_weights(alpha);
        let llr = &self.llr;
        let mean = kahan_sum(w.iter().zip(llr).map(|(w, l)| w * l));
        let dev = || w.iter().zip(llr).map(move |(w, l)| (w, l - mean));
        let variance = kahan_sum(dev().map(|(w, d)| w * d * d));
        let third_central = kahan_sum(dev().map(|(w, d)| w * d * d * d));
        let abs_third_central = kahan_sum(dev().map(|(w, d)| w * d.abs().powi(3)));
        TiltedMoments { alpha, log_z, mean, variance, third_central, abs_third_central }
    }

    /// Chernoff information `-min_a log Z(a)` and its minimiser.
    pub fn chernoff_point(&self) -> (f64, f64) {
        if self.llr.iter().all(|&l| l == 0.0) {
            return (0.5, 0.0);
        }
        let (alpha, min_log_z) = golden_section_min(|a| self.log_z(a), 0.0, 1.0, 1e-12);
        (alpha, (-min_log_z).max(0.0))
    }
}

/// Chernoff information `C(P, Q) = -min_{a in [0,1]} log Z(a)`.
pub fn chernoff_information(family: &TiltedFamily) -> f64 {
    family.chernoff_point().1
}
