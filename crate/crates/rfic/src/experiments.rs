//! Monte Carlo estimators over quenched disorder.
//!
//! Every driver here follows the same discipline: replicas (or samples) are
//! indexed, each index derives its own deterministic random stream, the
//! parallel map collects results *in index order*, and every reduction is a
//! sequential fold over that order.  Reruns with the same seed are therefore
//! byte-identical regardless of the worker-thread count.

use crate::csvout::{headers, Cell, Table};
use crate::disorder::{DisorderLaw, FieldWindow, Spin};
use crate::extrema::{fisher_z, record_gaps, two_sided_extrema, FieldSource, TwoSidedOptions};
use crate::rng::SplitMix64;
use crate::transfer::{
    bend, gibbs_sample, log_partition_stream, mismatch_probability, sandwich_l, sandwich_r,
    ModelParams,
};
use crate::{Result, RficError};
use rayon::prelude::*;

/// Shared plumbing for the replica-driven estimators.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub law: DisorderLaw,
    pub replicas: u64,
    pub seed: u64,
    /// Per-side window override in sites; default `⌈64Γ²/ϑ²⌉`.
    pub window: Option<i64>,
    /// Sandwich tolerance override; default `10⁻⁸·Γ`.
    pub tol: Option<f64>,
    /// Worker threads; `None` leaves the choice to the runtime.  Output never
    /// depends on this.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(law: DisorderLaw, replicas: u64, seed: u64) -> ExperimentConfig {
        assert!(replicas >= 1, "at least one replica is required");
        ExperimentConfig {
            law,
            replicas,
            seed,
            window: None,
            tol: None,
            threads: None,
        }
    }

    fn pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.unwrap_or(0))
            .build()
            .expect("worker pool construction does not fail")
    }

    /// Default per-side window for bracketing infinite-volume chains.
    fn window_for(&self, gamma: f64) -> i64 {
        self.window
            .unwrap_or_else(|| ((64.0 * gamma * gamma / self.law.variance()).ceil() as i64).max(64))
    }

    fn tol_for(&self, gamma: f64) -> f64 {
        self.tol.unwrap_or(1e-8 * gamma)
    }
}

/// One estimator row of a sweep.
#[derive(Clone, Debug)]
pub struct EstimateRow {
    /// The swept parameter (Γ here).
    pub sweep: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub kept: u64,
    pub dropped: u64,
    /// Estimator-specific derived column (`Γ·estimate/loglogΓ` for the
    /// site-zero densities).
    pub derived: f64,
    /// More than 10% of replicas dropped; the fixed CSV schema has no column
    /// for this, so callers surface it on the side (logs, JSON consumers).
    pub flagged: bool,
}

/// `ln ln Γ`, the scale of the discrepancy bounds.
fn loglog(gamma: f64) -> f64 {
    assert!(
        gamma > std::f64::consts::E,
        "the loglog-scaled column requires Γ > e, got {gamma}"
    );
    gamma.ln().ln()
}

/// Mean and standard error of replica-level values (sequential fold).
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

/// Unbiased sample variance.
fn sample_var(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64
}

/// Pearson correlation; `0` when either side is degenerate.
fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Kolmogorov–Smirnov statistic of a sample against the unit-rate exponential.
fn ks_exp1(sample: &[f64]) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("gap excesses are finite"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = 1.0 - (-x).exp();
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// Everything the site-zero estimators need from one disorder replica: the
/// combined field `m₀ = l₋₁ + 2h₀ + r₁` (from converged sandwich brackets)
/// and the two-sided stretch sign at the origin.
struct SiteZero {
    m: f64,
    s_fisher: i8,
}

/// Runs one replica; `None` means the replica is dropped (sandwich tolerance
/// unmet after two window doublings, or record stabilization failed).
fn site_zero(
    law: &DisorderLaw,
    gamma: f64,
    seed: u64,
    replica: u64,
    window: i64,
    tol: f64,
) -> Option<SiteZero> {
    let params = ModelParams::from_gamma(gamma).ok()?;
    let h0 = FieldWindow::sample(law, seed, replica, 0, 0).h(0);
    let mut bracket = None;
    let mut w = window;
    for _ in 0..3 {
        let left = FieldWindow::sample(law, seed, replica, -w, -1);
        let sl = sandwich_l(&left, &params, tol);
        let right = FieldWindow::sample(law, seed, replica, 1, w);
        let sr = sandwich_r(&right, &params, tol);
        if sl.converged && sr.converged {
            bracket = Some((sl.midpoint(), sr.midpoint()));
            break;
        }
        w *= 2;
    }
    let (l, r) = bracket?;
    let source = FieldSource::Law {
        law,
        seed,
        stream: replica,
    };
    let ts = two_sided_extrema(&source, gamma, 0, 0, &TwoSidedOptions::default()).ok()?;
    let s_fisher = fisher_z(&ts, 0, 0).sign(0);
    Some(SiteZero {
        m: l + 2.0 * h0 + r,
        s_fisher,
    })
}

/// Maps every replica through `site_zero` and a kernel, keeping index order.
fn replica_values(
    config: &ExperimentConfig,
    gamma: f64,
    kernel: impl Fn(&SiteZero) -> f64 + Sync,
) -> (Vec<f64>, u64) {
    let window = config.window_for(gamma);
    let tol = config.tol_for(gamma);
    let pool = config.pool();
    let per_replica: Vec<Option<f64>> = pool.install(|| {
        (0..config.replicas)
            .into_par_iter()
            .map(|rep| {
                site_zero(&config.law, gamma, config.seed, rep, window, tol)
                    .map(|sz| kernel(&sz))
            })
            .collect()
    });
    let kept: Vec<f64> = per_replica.iter().filter_map(|v| *v).collect();
    let dropped = config.replicas - kept.len() as u64;
    (kept, dropped)
}

fn density_row(config: &ExperimentConfig, gamma: f64, values: Vec<f64>, dropped: u64) -> EstimateRow {
    let (estimate, stderr) = mean_and_stderr(&values);
    EstimateRow {
        sweep: gamma,
        estimate,
        stderr,
        kept: values.len() as u64,
        dropped,
        derived: gamma * estimate / loglog(gamma),
        flagged: dropped * 10 > config.replicas,
    }
}

/// Replica estimate of the site-zero discrepancy density: the Gibbs
/// probability that the origin spin disagrees with the two-sided stretch
/// sign, `1/(1+e^{s·m₀})` for `s = ±1` and `1` for the abstention `s = 0`.
///
/// Replica `r` reuses stream `r` of the seed across the whole sweep, so the
/// estimates at different Γ are coupled through common disorder — the decay
/// in Γ is visible without the replica noise floor.
pub fn estimate_d_gamma(config: &ExperimentConfig, sweep: &[f64]) -> Vec<EstimateRow> {
    sweep
        .iter()
        .map(|&gamma| {
            let (values, dropped) =
                replica_values(config, gamma, |sz| mismatch_probability(sz.m, sz.s_fisher));
            density_row(config, gamma, values, dropped)
        })
        .collect()
}

/// Replica estimate of `P(sign(m₀) ≠ s₀)`: how often the marginal-field sign
/// and the stretch sign disagree outright (ties in `m₀` count as `+`).
pub fn sm_vs_sf_density(config: &ExperimentConfig, sweep: &[f64]) -> Vec<EstimateRow> {
    sweep
        .iter()
        .map(|&gamma| {
            let (values, dropped) = replica_values(config, gamma, |sz| {
                let s_m: i8 = if sz.m >= 0.0 { 1 } else { -1 };
                f64::from(u8::from(s_m != sz.s_fisher))
            });
            density_row(config, gamma, values, dropped)
        })
        .collect()
}

pub fn discrepancy_table(rows: &[EstimateRow]) -> Table {
    let mut t = Table::new(headers::DISCREPANCY);
    for r in rows {
        t.push(vec![
            Cell::from(r.sweep),
            Cell::from(r.estimate),
            Cell::from(r.stderr),
            Cell::from(r.kept),
            Cell::from(r.dropped),
            Cell::from(r.derived),
        ]);
    }
    t
}

pub fn sm_vs_sf_table(rows: &[EstimateRow]) -> Table {
    let mut t = Table::new(headers::SM_VS_SF);
    for r in rows {
        t.push(vec![
            Cell::from(r.sweep),
            Cell::from(r.estimate),
            Cell::from(r.stderr),
            Cell::from(r.kept),
            Cell::from(r.dropped),
            Cell::from(r.derived),
        ]);
    }
    t
}

/// Discrepancy statistics of one window length under a fixed disorder draw.
#[derive(Clone, Copy, Debug)]
pub struct DnPoint {
    pub n: i64,
    /// Mean site-fraction of Gibbs spins disagreeing with the stretch signs.
    pub mean: f64,
    /// Unbiased variance of that fraction over the Gibbs samples.
    pub var: f64,
    pub samples: u64,
}

/// Samples the window discrepancy for each length in `grid` on one frozen
/// field (stream 0 of the seed), using `samples` exact Gibbs draws under
/// `(+,+)` boundary spins.  Sites whose stretch sign is `0` always count as
/// disagreements.
pub fn dn_trajectory(
    config: &ExperimentConfig,
    gamma: f64,
    grid: &[i64],
    samples: u64,
) -> Result<Vec<DnPoint>> {
    assert!(samples >= 1);
    let params = ModelParams::from_gamma(gamma)?;
    let pool = config.pool();
    let mut out = Vec::with_capacity(grid.len());
    for &n in grid {
        assert!(n >= 1, "window lengths must be positive");
        let field = FieldWindow::sample(&config.law, config.seed, 0, 1, n);
        let source = FieldSource::Law {
            law: &config.law,
            seed: config.seed,
            stream: 0,
        };
        let ts = two_sided_extrema(&source, gamma, 1, n, &TwoSidedOptions::default())?;
        let profile = fisher_z(&ts, 1, n);
        let signs: Vec<i8> = (1..=n).map(|site| profile.sign(site)).collect();
        let ds: Vec<f64> = pool.install(|| {
            (0..samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = SplitMix64::for_site(config.seed, n as u64, s as i64);
                    let spins = gibbs_sample(&field, &params, Spin::Up, Spin::Up, &mut rng);
                    let mismatches = spins
                        .iter()
                        .zip(&signs)
                        .filter(|(spin, sign)| **spin != **sign)
                        .count();
                    mismatches as f64 / n as f64
                })
                .collect()
        });
        let mean = ds.iter().sum::<f64>() / samples as f64;
        out.push(DnPoint {
            n,
            mean,
            var: sample_var(&ds),
            samples,
        });
    }
    Ok(out)
}

pub fn dn_table(points: &[DnPoint]) -> Table {
    let mut t = Table::new(headers::DN);
    for p in points {
        t.push(vec![
            Cell::from(p.n),
            Cell::from(p.mean),
            Cell::from(p.var),
            Cell::from(p.samples),
            Cell::from(p.var * p.n as f64),
        ]);
    }
    t
}

/// Binned long-run occupation of the left boundary chain on `[−Γ, Γ]`.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub gamma: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub samples: u64,
    /// Steps consumed before the `±Γ` bracket met (the stationarity
    /// certificate); sampling starts only after this point.
    pub burn_in: u64,
}

/// The densest qualifying interval of a histogram scan.
#[derive(Clone, Copy, Debug)]
pub struct IntervalMax {
    /// `P̂(I)·Γ/|I|` at the maximizing interval.
    pub c1_hat: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// `(left, right)` edges of bin `i`.
    pub fn edges(&self, i: usize) -> (f64, f64) {
        (
            -self.gamma + i as f64 * self.bin_width,
            -self.gamma + (i + 1) as f64 * self.bin_width,
        )
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(headers::INVHIST);
        for (i, &c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.edges(i);
            t.push(vec![Cell::from(lo), Cell::from(hi), Cell::from(c)]);
        }
        t
    }

    /// Autocorrelation of the centred bin-count sequence at `lag` bins.
    pub fn autocorrelation(&self, lag: usize) -> f64 {
        let n = self.counts.len();
        assert!(lag < n, "lag {lag} out of range for {n} bins");
        let mean = self.counts.iter().sum::<u64>() as f64 / n as f64;
        let x: Vec<f64> = self.counts.iter().map(|&c| c as f64 - mean).collect();
        let denom: f64 = x.iter().map(|v| v * v).sum();
        if denom == 0.0 {
            return 0.0;
        }
        let num: f64 = x.iter().zip(&x[lag..]).map(|(a, b)| a * b).sum();
        num / denom
    }

    /// Scans every interval of length at least `min_len` (in chain units) and
    /// returns the maximal `P̂(I)·Γ/|I|` — the empirical constant of the
    /// small-interval occupation bound.
    pub fn interval_max(&self, min_len: f64) -> IntervalMax {
        let bins = self.counts.len();
        let min_bins = ((min_len / self.bin_width).ceil() as usize).clamp(1, bins);
        let mut prefix = vec![0u64; bins + 1];
        for (i, &c) in self.counts.iter().enumerate() {
            prefix[i + 1] = prefix[i] + c;
        }
        let total = self.samples as f64;
        let mut best = IntervalMax {
            c1_hat: 0.0,
            lo: -self.gamma,
            hi: self.gamma,
        };
        for len in min_bins..=bins {
            let width = len as f64 * self.bin_width;
            for start in 0..=(bins - len) {
                let mass = (prefix[start + len] - prefix[start]) as f64 / total;
                let value = mass * self.gamma / width;
                if value > best.c1_hat {
                    best = IntervalMax {
                        c1_hat: value,
                        lo: self.edges(start).0,
                        hi: self.edges(start + len - 1).1,
                    };
                }
            }
        }
        best
    }
}

/// Runs the left chain to stationarity and bins `sites` further values.
///
/// Burn-in is certified by coupling: the two extreme starts `∓Γ` are driven
/// by the same fields until their gap falls below `10⁻¹²·Γ`; sampling then
/// continues from the midpoint.  Single-threaded by construction (the chain
/// is sequential), so output is trivially thread-count independent.
pub fn invariant_histogram(
    config: &ExperimentConfig,
    gamma: f64,
    sites: u64,
    bin_width: Option<f64>,
) -> Result<Histogram> {
    assert!(gamma > 0.0 && sites >= 1);
    let width = bin_width.unwrap_or(gamma / 500.0);
    assert!(width > 0.0 && width.is_finite());
    let bins = ((2.0 * gamma / width).ceil() as usize).max(1);
    let mut rng = SplitMix64::for_stream(config.seed, 0);
    let tol = 1e-12 * gamma.max(1.0);
    let cap = 1_000_000 + (2000.0 * gamma * gamma / config.law.variance()) as u64;
    let (mut lower, mut upper) = (-gamma, gamma);
    let mut burn_in = 0u64;
    while upper - lower > tol {
        if burn_in >= cap {
            return Err(RficError::NoCoalescence {
                lo: 0,
                hi: burn_in as i64,
                gap: upper - lower,
            });
        }
        let h = config.law.sample(&mut rng);
        lower = bend(gamma, lower + 2.0 * h);
        upper = bend(gamma, upper + 2.0 * h);
        burn_in += 1;
    }
    let mut l = 0.5 * (lower + upper);
    let mut counts = vec![0u64; bins];
    for _ in 0..sites {
        let h = config.law.sample(&mut rng);
        l = bend(gamma, l + 2.0 * h);
        let idx = (((l + gamma) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram {
        gamma,
        bin_width: width,
        counts,
        samples: sites,
        burn_in,
    })
}

/// Record-gap statistics of one Γ value.
#[derive(Clone, Copy, Debug)]
pub struct ScalingRow {
    pub gamma: f64,
    /// Mean of `|level gap|/Γ − 1` (limit value 1).
    pub mean_gap_excess: f64,
    pub var_gap_excess: f64,
    /// Kolmogorov–Smirnov distance of the gap excesses from Exp(1).
    pub ks_exp1: f64,
    /// Mean of `ϑ²·(u_{j+1}−u_j)/Γ²`.
    pub mean_scaled_spacing: f64,
    /// Correlation between consecutive even-index gap excesses (an
    /// independence diagnostic; the even subsequence is asymptotically IID).
    pub corr_even: f64,
    pub count: usize,
}

/// Harvests `count` record gaps per Γ from one streamed walk and reduces them
/// to the renewal-scaling diagnostics.
pub fn scaling_sweep(
    config: &ExperimentConfig,
    sweep: &[f64],
    count: usize,
) -> Result<Vec<ScalingRow>> {
    assert!(count >= 4, "too few gaps for the diagnostics");
    let theta2 = config.law.variance();
    let mut rows = Vec::with_capacity(sweep.len());
    for &gamma in sweep {
        let gaps = record_gaps(&config.law, gamma, count, config.seed, 0)?;
        let excess: Vec<f64> = gaps
            .iter()
            .map(|g| {
                let e = g.gap.abs() / gamma - 1.0;
                debug_assert!(e >= -1e-12, "gap below Γ: {}", g.gap);
                e.max(0.0)
            })
            .collect();
        let (mean_gap_excess, _) = mean_and_stderr(&excess);
        let spacings: Vec<f64> = gaps
            .iter()
            .map(|g| theta2 * g.spacing as f64 / (gamma * gamma))
            .collect();
        let even: Vec<f64> = gaps
            .iter()
            .zip(&excess)
            .filter(|(g, _)| g.index % 2 == 0)
            .map(|(_, e)| *e)
            .collect();
        let corr_even = if even.len() >= 3 {
            pearson(&even[..even.len() - 1], &even[1..])
        } else {
            0.0
        };
        rows.push(ScalingRow {
            gamma,
            mean_gap_excess,
            var_gap_excess: sample_var(&excess),
            ks_exp1: ks_exp1(&excess),
            mean_scaled_spacing: spacings.iter().sum::<f64>() / spacings.len() as f64,
            corr_even,
            count: gaps.len(),
        });
    }
    Ok(rows)
}

pub fn scaling_table(rows: &[ScalingRow]) -> Table {
    let mut t = Table::new(headers::SCALING);
    for r in rows {
        t.push(vec![
            Cell::from(r.gamma),
            Cell::from(r.mean_gap_excess),
            Cell::from(r.ks_exp1),
            Cell::from(r.mean_scaled_spacing),
            Cell::from(r.corr_even),
        ]);
    }
    t
}

/// One coupling value of a free-energy sweep.
#[derive(Clone, Copy, Debug)]
pub struct FreeEnergyRow {
    pub j: f64,
    /// Mean over replicas of `(1/N)·log Z^{++}`.
    pub f_hat: f64,
    pub stderr: f64,
    /// `2J·(f̂ − J)`, the leading excess over the aligned ground state.
    pub two_j_excess: f64,
    pub replicas: u64,
}

/// Streams `n` sites per replica through the log-partition recursion for each
/// coupling in the sweep.  Replica `r` replays stream `r`, so the sweep sees
/// common disorder across couplings.
pub fn free_energy(config: &ExperimentConfig, j_sweep: &[f64], n: u64) -> Result<Vec<FreeEnergyRow>> {
    assert!(n >= 1);
    let pool = config.pool();
    let mut rows = Vec::with_capacity(j_sweep.len());
    for &j in j_sweep {
        let params = ModelParams::new(j)?;
        let law = &config.law;
        let values: Vec<f64> = pool.install(|| {
            (0..config.replicas)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = SplitMix64::for_stream(config.seed, rep);
                    let fields = (0..n).map(move |_| law.sample(&mut rng));
                    log_partition_stream(fields, &params, Spin::Up, Spin::Up) / n as f64
                })
                .collect()
        });
        let (f_hat, stderr) = mean_and_stderr(&values);
        rows.push(FreeEnergyRow {
            j,
            f_hat,
            stderr,
            two_j_excess: 2.0 * j * (f_hat - j),
            replicas: config.replicas,
        });
    }
    Ok(rows)
}

pub fn free_energy_table(rows: &[FreeEnergyRow]) -> Table {
    let mut t = Table::new(headers::FREE_ENERGY);
    for r in rows {
        t.push(vec![
            Cell::from(r.j),
            Cell::from(r.f_hat),
            Cell::from(r.stderr),
            Cell::from(r.two_j_excess),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extrema::SignProfile;

    fn gauss(replicas: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(DisorderLaw::Gauss { sigma: 1.0 }, replicas, seed)
    }

    #[test]
    fn discrepancy_rows_are_thread_invariant_probabilities() {
        let mut one = gauss(12, 5);
        one.threads = Some(1);
        let mut four = gauss(12, 5);
        four.threads = Some(4);
        let sweep = [5.0];
        let a = estimate_d_gamma(&one, &sweep);
        let b = estimate_d_gamma(&four, &sweep);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].estimate.to_bits(), b[0].estimate.to_bits());
        assert_eq!(a[0].stderr.to_bits(), b[0].stderr.to_bits());
        assert_eq!((a[0].kept, a[0].dropped), (b[0].kept, b[0].dropped));
        assert_eq!(a[0].kept + a[0].dropped, 12);
        assert!(a[0].estimate > 0.0 && a[0].estimate < 1.0);
        assert!(a[0].stderr >= 0.0);
        assert_eq!(
            discrepancy_table(&a).to_csv(),
            discrepancy_table(&b).to_csv()
        );
    }

    #[test]
    fn sign_mismatch_density_is_a_small_probability() {
        let config = gauss(24, 9);
        let rows = sm_vs_sf_density(&config, &[6.0]);
        let r = &rows[0];
        assert_eq!(r.kept + r.dropped, 24);
        assert!(r.estimate >= 0.0 && r.estimate <= 1.0);
        // Sign mismatches are rare events at moderate Γ; the mean cannot
        // exceed the soft-mismatch kernel's by construction arguments, and at
        // this scale it is far below ½.
        assert!(r.estimate < 0.5, "estimate {}", r.estimate);
    }

    #[test]
    fn dn_points_behave_and_zero_field_gives_unit_discrepancy() {
        let config = gauss(1, 3);
        let points = dn_trajectory(&config, 5.0, &[200, 400], 20).unwrap();
        assert_eq!(points.len(), 2);
        for p in &points {
            assert!(p.mean >= 0.0 && p.mean <= 1.0);
            assert!(p.var >= 0.0);
            assert_eq!(p.samples, 20);
        }

        // A zero field with an all-abstaining profile disagrees at every
        // site of every Gibbs draw.
        let field = FieldWindow::from_values(1, vec![0.0; 40]);
        let params = ModelParams::from_gamma(2.0).unwrap();
        let profile = SignProfile::zeros(1, 40);
        for s in 0..10 {
            let mut rng = SplitMix64::for_site(11, 0, s);
            let spins = gibbs_sample(&field, &params, Spin::Up, Spin::Up, &mut rng);
            let d = spins
                .iter()
                .enumerate()
                .filter(|(i, spin)| **spin != profile.sign(*i as i64 + 1))
                .count() as f64
                / 40.0;
            assert_eq!(d, 1.0);
        }
    }

    #[test]
    fn histogram_counts_and_symmetry() {
        let config = gauss(1, 21);
        let hist = invariant_histogram(&config, 8.0, 1_000_000, None).unwrap();
        assert_eq!(hist.counts.iter().sum::<u64>(), 1_000_000);
        assert_eq!(hist.bins(), 1000);
        assert!(hist.burn_in > 0);
        assert!((hist.autocorrelation(0) - 1.0).abs() < 1e-12);

        // Symmetric law ⇒ the occupation of [−Γ,0) and (0,Γ] agree closely.
        let half = hist.bins() / 2;
        let left: u64 = hist.counts[..half].iter().sum();
        let right: u64 = hist.counts[half..].iter().sum();
        let imbalance = (left as f64 - right as f64).abs() / hist.samples as f64;
        assert!(imbalance < 0.1, "imbalance {imbalance}");

        // Mirror comparison in total variation, on the normalized histogram.
        let tv: f64 = hist
            .counts
            .iter()
            .zip(hist.counts.iter().rev())
            .map(|(&a, &b)| (a as f64 - b as f64).abs())
            .sum::<f64>()
            / (2.0 * hist.samples as f64);
        assert!(tv < 0.1, "mirror total variation {tv}");

        // The interval scan reports a positive density constant and an
        // interval inside the support.
        let imax = hist.interval_max(8.0f64.ln().ln());
        assert!(imax.c1_hat > 0.0);
        assert!(imax.lo >= -8.0 && imax.hi <= 8.0 + 1e-9);
    }

    #[test]
    fn two_point_law_histogram_shows_the_comb() {
        let config = ExperimentConfig::new(DisorderLaw::TwoPoint { a: 2.0 }, 1, 4);
        let hist = invariant_histogram(&config, 20.0, 2_000_000, None).unwrap();
        // Steps move mass in jumps of 4 chain units; bin width is Γ/500 =
        // 0.04, so the comb period is 100 bins.  Compare against lags with no
        // rational relation to the period.
        let comb = hist.autocorrelation(100);
        assert!(
            comb > hist.autocorrelation(71) && comb > hist.autocorrelation(62),
            "comb {comb} vs {} and {}",
            hist.autocorrelation(71),
            hist.autocorrelation(62)
        );
    }

    #[test]
    fn mixture_law_histogram_is_flat_away_from_walls_and_lattice_spikes() {
        let config = ExperimentConfig::new(DisorderLaw::AtomNormalMix, 1, 4);
        let hist = invariant_histogram(&config, 20.0, 20_000_000, None).unwrap();

        // Background flatness over the middle half, measured by a quantile
        // ratio so the handful of spike bins cannot dominate.
        let mut half: Vec<u64> = hist.counts[hist.bins() / 4..3 * hist.bins() / 4].to_vec();
        half.sort_unstable();
        let p10 = half[half.len() / 10] as f64;
        let p90 = half[9 * half.len() / 10] as f64;
        let median = half[half.len() / 2] as f64;
        assert!(p90 / p10 < 1.3, "background not flat: p90/p10 {}", p90 / p10);

        // The clamp leaves point masses on both walls: the extreme bins beat
        // everything strictly inside by a wide margin.
        let wall = hist.counts[0].min(*hist.counts.last().unwrap()) as f64;
        assert!(wall > 5.0 * median, "wall mass {wall} vs median {median}");

        // The exact −4 jump carries the upper-wall atom down the lattice
        // Γ−4k, leaving a geometrically decaying spike at each stop; check
        // the one at 8 (three jumps down) still towers over the background.
        let spike = hist
            .counts
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let (lo, hi) = hist.edges(*i);
                hi > 7.9 && lo < 8.1
            })
            .map(|(_, &c)| c)
            .max()
            .unwrap() as f64;
        assert!(spike > 2.0 * median, "spike {spike} vs median {median}");
    }

    #[test]
    fn scaling_rows_carry_sane_diagnostics() {
        let config = gauss(1, 7);
        let rows = scaling_sweep(&config, &[6.0], 600).unwrap();
        let r = &rows[0];
        assert_eq!(r.count, 600);
        assert!(r.mean_gap_excess > 0.5 && r.mean_gap_excess < 1.6, "{r:?}");
        assert!(r.ks_exp1 > 0.0 && r.ks_exp1 < 0.25, "{r:?}");
        assert!(r.mean_scaled_spacing > 0.1 && r.mean_scaled_spacing < 20.0, "{r:?}");
        assert!(r.corr_even.abs() < 0.3, "{r:?}");
    }

    #[test]
    fn free_energy_approaches_the_aligned_ground_state_from_above() {
        let mut config = gauss(4, 13);
        config.threads = Some(2);
        let rows = free_energy(&config, &[2.0], 20_000).unwrap();
        let r = &rows[0];
        assert!(r.f_hat > r.j, "{r:?}");
        assert!(r.two_j_excess > 0.5 && r.two_j_excess < 1.6, "{r:?}");
        assert!(r.stderr >= 0.0);

        // Determinism across worker counts.
        let mut single = gauss(4, 13);
        single.threads = Some(1);
        let again = free_energy(&single, &[2.0], 20_000).unwrap();
        assert_eq!(r.f_hat.to_bits(), again[0].f_hat.to_bits());
    }
}
