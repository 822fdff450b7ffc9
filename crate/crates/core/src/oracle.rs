//! Exact optimal first-error probability for `P^n` vs `Q^n` on a finite
//! alphabet.
//!
//! The sum of per-sample log-likelihood ratios is a sufficient statistic and
//! depends only on the symbol counts, so the product space collapses onto the
//! `C(n+k-1, k-1)` compositions of `n` into `k` parts. Each composition is an
//! atom carrying its LLR and its `P^n`/`Q^n` masses (in log form). The
//! randomized Neyman–Pearson test then declares `Q` on the atoms with the
//! smallest LLR until their `P`-mass reaches the budget `eps`, splitting the
//! boundary atom so that the second error equals `eps` exactly.

use crate::dist::TiltedFamily;
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, log_factorials, log_sub_exp, log_sum_exp};

/// Largest atom table we are willing to build.
pub const MAX_ATOMS: u128 = 2_000_000;

/// Atoms whose LLR values agree to this relative precision are merged.
pub const MERGE_RTOL: f64 = 1e-12;

/// Number of compositions of `n` into `k` nonnegative parts, saturating.
pub fn atom_count(k: usize, n: usize) -> u128 {
    if k == 0 {
        return 0;
    }
    // C(n+k-1, k-1), built up multiplicatively to stay exact.
    let r = (k - 1).min(n) as u128;
    let top = (n + k - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..r {
        c = match c.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrAtom {
    /// Sum of the per-sample log-likelihood ratios.
    pub llr: f64,
    pub log_p: f64,
    pub log_q: f64,
}

/// Distribution of the LLR sum under both hypotheses, sorted by LLR.
#[derive(Debug, Clone)]
pub struct LlrAtomTable {
    n: usize,
    atoms: Vec<LlrAtom>,
    /// `log P(atoms[..=j])`.
    log_p_prefix: Vec<f64>,
    /// `log Q(atoms[j..])`.
    log_q_suffix: Vec<f64>,
}

fn for_each_composition(k: usize, n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(counts: &mut Vec<usize>, idx: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
        if idx + 1 == counts.len() {
            counts[idx] = remaining;
            f(counts);
            return;
        }
        for c in 0..=remaining {
            counts[idx] = c;
            rec(counts, idx + 1, remaining - c, f);
        }
    }
    let mut counts = vec![0; k];
    rec(&mut counts, 0, n, f);
}

/// Build the atom table of the `n`-sample LLR sum.
pub fn build_atom_table(family: &TiltedFamily, n: usize) -> Result<LlrAtomTable> {
    if n == 0 {
        return Err(Error::Domain("sample size n = 0".into()));
    }
    let k = family.support().len();
    let count = atom_count(k, n);
    if count > MAX_ATOMS {
        return Err(Error::TooLarge { atoms: count, limit: MAX_ATOMS });
    }

    let lf = log_factorials(n);
    let (llr, log_p, log_q) = (family.llr(), family.log_p(), family.log_q());
    let mut raw = Vec::with_capacity(count as usize);
    for_each_composition(k, n, &mut |counts| {
        let mut atom = LlrAtom { llr: 0.0, log_p: lf[n], log_q: lf[n] };
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c_f = c as f64;
            atom.llr += c_f * llr[i];
            atom.log_p += c_f * log_p[i] - lf[c];
            atom.log_q += c_f * log_q[i] - lf[c];
        }
        raw.push(atom);
    });
    raw.sort_by(|a, b| a.llr.total_cmp(&b.llr));

    let scale = n as f64 * llr.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let tol = MERGE_RTOL * scale.max(f64::MIN_POSITIVE);
    let mut atoms: Vec<LlrAtom> = Vec::with_capacity(raw.len());
    let mut group_start = f64::NAN;
    for a in raw {
        match atoms.last_mut() {
            Some(last) if (a.llr - group_start).abs() <= tol => {
                last.log_p = log_add_exp(last.log_p, a.log_p);
                last.log_q = log_add_exp(last.log_q, a.log_q);
            }
            _ => {
                group_start = a.llr;
                atoms.push(a);
            }
        }
    }
    Ok(LlrAtomTable::from_sorted_atoms(n, atoms))
}

/// Result of the randomized Neyman–Pearson test at a given budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// Optimal `e1 = Q^n(declare P)`.
    pub e1_star: f64,
    pub log_e1_star: f64,
    /// LLR value of the boundary atom.
    pub threshold_llr: f64,
    /// Fraction of the boundary atom on which `Q` is declared.
    pub boundary_weight: f64,
    pub epsilon_used: f64,
    pub log_epsilon: f64,
}

impl LlrAtomTable {
    fn from_sorted_atoms(n: usize, atoms: Vec<LlrAtom>) -> Self {
        let mut log_p_prefix = Vec::with_capacity(atoms.len());
        let mut acc = f64::NEG_INFINITY;
        for a in &atoms {
            acc = log_add_exp(acc, a.log_p);
            log_p_prefix.push(acc);
        }
        let mut log_q_suffix = vec![f64::NEG_INFINITY; atoms.len()];
        let mut acc = f64::NEG_INFINITY;
        for (j, a) in atoms.iter().enumerate().rev() {
            acc = log_add_exp(acc, a.log_q);
            log_q_suffix[j] = acc;
        }
        Self { n, atoms, log_p_prefix, log_q_suffix }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[LlrAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `log` of the total `P` and `Q` masses (both should be 0).
    pub fn log_totals(&self) -> (f64, f64) {
        let lp: Vec<f64> = self.atoms.iter().map(|a| a.log_p).collect();
        let lq: Vec<f64> = self.atoms.iter().map(|a| a.log_q).collect();
        (log_sum_exp(&lp), log_sum_exp(&lq))
    }

    /// `log P^n(LLR <= atoms[j].llr)` for every atom: the second-error levels
    /// attainable without randomization.
    pub fn log_deterministic_levels(&self) -> &[f64] {
        &self.log_p_prefix
    }

    /// The attainable deterministic level closest to `eps` in log scale.
    pub fn snap_log_epsilon(&self, eps: f64) -> f64 {
        let target = eps.ln();
        self.log_p_prefix
            .iter()
            .copied()
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            .unwrap_or(target)
    }

    /// Optimal first error for second-error budget `eps` in `[0, 1]`.
    pub fn e1_star(&self, eps: f64) -> Result<OracleResult> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("error budget {eps}")));
        }
        Ok(self.e1_star_log(eps.ln()))
    }

    /// `E*_1(n, delta) = e*_1(exp(-n delta))`.
    pub fn big_e1_star(&self, delta: f64) -> Result<OracleResult> {
        if !(delta >= 0.0) {
            return Err(Error::Domain(format!("delta = {delta}")));
        }
        Ok(self.e1_star_log(-(self.n as f64) * delta))
    }

    /// Same as [`e1_star`](Self::e1_star) with the budget given as `log eps`,
    /// so that budgets far below the smallest double are handled.
    pub fn e1_star_log(&self, log_eps: f64) -> OracleResult {
        let last = self.atoms.len() - 1;
        let epsilon_used = log_eps.exp();
        // the total P-mass can round a hair above 1
        if log_eps >= self.log_p_prefix[last].min(0.0) {
            return OracleResult {
                e1_star: 0.0,
                log_e1_star: f64::NEG_INFINITY,
                threshold_llr: self.atoms[last].llr,
                boundary_weight: 1.0,
                epsilon_used,
                log_epsilon: log_eps,
            };
        }
        let j = self.log_p_prefix.partition_point(|&c| c <= log_eps);
        let below = if j == 0 { f64::NEG_INFINITY } else { self.log_p_prefix[j - 1] };
        let log_rem = log_sub_exp(log_eps, below);
        let w = (log_rem - self.atoms[j].log_p).exp().clamp(0.0, 1.0);
        let above = if j == last { f64::NEG_INFINITY } else { self.log_q_suffix[j + 1] };
        let log_e1 = log_add_exp(self.atoms[j].log_q + (-w).ln_1p(), above);
        OracleResult {
            e1_star: log_e1.exp(),
            log_e1_star: log_e1,
            threshold_llr: self.atoms[j].llr,
            boundary_weight: w,
            epsilon_used,
            log_epsilon: log_eps,
        }
    }
}

/// Brute-force optimum over all randomized tests on the product space, for
/// tiny problems (alphabet at most 3, `n` at most 2).
///
/// Minimising `e1` subject to `e2 <= eps` is a fractional knapsack over the
/// outcomes: spend the `P`-budget on outcomes in decreasing order of `q/p`.
pub fn lp_cross_check(family: &TiltedFamily, n: usize, eps: f64) -> Result<f64> {
    let k = family.p().len();
    if k > 3 || n > 2 || n == 0 {
        return Err(Error::TooLarge { atoms: (k as u128).pow(n as u32), limit: 9 });
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("error budget {eps}")));
    }
    let (p, q) = (family.p().probs(), family.q().probs());
    let mut outcomes: Vec<(f64, f64)> = Vec::new();
    for idx in 0..k.pow(n as u32) {
        let (mut pm, mut qm, mut rest) = (1.0, 1.0, idx);
        for _ in 0..n {
            pm *= p[rest % k];
            qm *= q[rest % k];
            rest /= k;
        }
        if pm > 0.0 || qm > 0.0 {
            outcomes.push((pm, qm));
        }
    }
    outcomes.sort_by(|a, b| (b.1 / b.0).total_cmp(&(a.1 / a.0)));
    let mut budget = eps;
    let mut e1 = 0.0;
    for (pm, qm) in outcomes {
        let t = if pm <= budget { 1.0 } else { budget / pm };
        budget -= t * pm;
        e1 += (1.0 - t) * qm;
    }
    Ok(e1)
}
