//! Exact finite-volume computations: partition functions, boundary-information
//! chains, Gibbs marginals and Gibbs sampling.
//!
//! The left chain `l_n = log Z^{a+}_{ℓ,n} − log Z^{a−}_{ℓ,n}` (superscripts are
//! the virtual spins clamped beyond the window edges) measures how strongly the
//! window `[ℓ, n]` pushes the *next* spin up; symmetrically the right chain
//! `r_n = log Z^{+b}_{n,r} − log Z^{−b}_{n,r}` is the message travelling left.
//! Both evolve by one scalar recursion,
//!
//! ```text
//! l_n = b_Γ(l_{n−1} + 2 h_n),     b_Γ(x) = log( (1 + e^{Γ+x}) / (e^Γ + e^x) ),
//! ```
//!
//! with `b_Γ` odd, increasing, squashing into `(−Γ, Γ)`, and contracting with
//! slope at most `tanh(Γ/2) = (1−ε)/(1+ε)` where `ε = e^{−Γ}`. Site marginals
//! come out of the two chains as `P(σ_n = +1) = logistic(l_{n−1} + 2h_n + r_{n+1})`.

use crate::disorder::{FieldWindow, Spin};
use crate::rng::SplitMix64;
use crate::{Result, RficError};
use rand::{Rng, RngCore};

/// Coupling constants derived from `J`: the wall cost `Γ = 2J` and `ε = e^{−Γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    j: f64,
    gamma: f64,
    epsilon: f64,
}

impl ModelParams {
    /// Builds parameters from the coupling `J ≥ 0`.
    pub fn new(j: f64) -> Result<ModelParams> {
        if !j.is_finite() || j < 0.0 {
            return Err(RficError::InvalidCoupling {
                j,
                reason: "J must be finite and non-negative".into(),
            });
        }
        Ok(ModelParams {
            j,
            gamma: 2.0 * j,
            epsilon: (-2.0 * j).exp(),
        })
    }

    /// Builds parameters from the wall cost `Γ = 2J`.
    pub fn from_gamma(gamma: f64) -> Result<ModelParams> {
        ModelParams::new(0.5 * gamma)
    }

    /// The coupling `J`.
    #[inline]
    pub fn j(&self) -> f64 {
        self.j
    }

    /// The wall cost `Γ = 2J`.
    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `ε = e^{−Γ}`.
    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Uniform bound on the slope of [`bend`]: `tanh(Γ/2) = (1−ε)/(1+ε) < 1`.
    #[inline]
    pub fn contraction_factor(&self) -> f64 {
        (1.0 - self.epsilon) / (1.0 + self.epsilon)
    }
}

/// `log(1 + e^x)`, stable over the whole real line.
#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `log(e^x + e^y)`, stable; tolerates `−∞` in either argument.
#[inline]
pub fn logaddexp(x: f64, y: f64) -> f64 {
    let m = x.max(y);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + (-(x - y).abs()).exp().ln_1p()
}

/// The squashing nonlinearity `b_Γ(x) = log((1 + e^{Γ+x}) / (e^Γ + e^x))`:
/// odd, strictly increasing, with range `(−Γ, Γ)` and maximal slope `tanh(Γ/2)`.
///
/// Evaluated on `|x|` with the sign copied afterwards, so the function is
/// *bitwise* odd (chain trajectories for a negated field are exact sign
/// mirrors, zeros included). Inside `|x| ≤ Γ` the form
/// `|x| + softplus(−Γ−|x|) − softplus(−Γ+|x|)` has no cancellation; beyond the
/// wall the algebraically identical `Γ + softplus(−Γ−|x|) − log1p(e^{Γ−|x|})`
/// keeps every term small, so arbitrarily large inputs stay exact.
#[inline]
pub fn bend(gamma: f64, x: f64) -> f64 {
    let ax = x.abs();
    let magnitude = if ax < gamma {
        ax + softplus(-gamma - ax) - softplus(-gamma + ax)
    } else {
        gamma + softplus(-gamma - ax) - (gamma - ax).exp().ln_1p()
    };
    magnitude.copysign(x)
}

/// One step of the left chain: `l ↦ b_Γ(l + 2h)`.
#[inline]
pub fn step_l(y: f64, h: f64, params: &ModelParams) -> f64 {
    bend(params.gamma(), y + 2.0 * h)
}

/// One step of the right chain: `r ↦ b_Γ(r + 2h)` (applied right to left).
#[inline]
pub fn step_r(y: f64, h: f64, params: &ModelParams) -> f64 {
    bend(params.gamma(), y + 2.0 * h)
}

/// `1 / (1 + e^{−m})`, stable for any `m`.
#[inline]
pub fn logistic(m: f64) -> f64 {
    if m >= 0.0 {
        1.0 / (1.0 + (-m).exp())
    } else {
        let e = m.exp();
        e / (1.0 + e)
    }
}

/// `log Z` over a window streamed as an iterator of field values.
///
/// The window need not be materialised; this is what the long free-energy runs
/// use. The empty window yields the pure boundary bond `J·a·b`.
pub fn log_partition_stream(
    fields: impl IntoIterator<Item = f64>,
    params: &ModelParams,
    a: Spin,
    b: Spin,
) -> f64 {
    let j = params.j();
    // log-weights of the two states of the running rightmost spin.
    let (mut w_up, mut w_dn) = match a {
        Spin::Up => (0.0, f64::NEG_INFINITY),
        Spin::Down => (f64::NEG_INFINITY, 0.0),
    };
    for h in fields {
        let up = logaddexp(w_up + j, w_dn - j) + h;
        let dn = logaddexp(w_up - j, w_dn + j) - h;
        (w_up, w_dn) = (up, dn);
    }
    logaddexp(w_up + j * b.sign(), w_dn - j * b.sign())
}

/// `log Z^{ab}` of a field window.
pub fn log_partition(field: &FieldWindow, params: &ModelParams, a: Spin, b: Spin) -> f64 {
    log_partition_stream(field.values().iter().copied(), params, a, b)
}

/// Free energy per site of the zero-field window of length `n` with aligned
/// boundary spins: the transfer matrix diagonalises, giving
/// `((N+1)·log 2cosh J + log(1 + tanh(J)^{N+1}) − log 2)/N` exactly.
pub fn zero_field_free_energy(params: &ModelParams, n: u64) -> f64 {
    assert!(n >= 1);
    let j = params.j();
    // log 2cosh(j) without overflow for large j.
    let log2cosh = j + (-2.0 * j).exp().ln_1p();
    let pow = ((n + 1) as f64 * j.tanh().ln()).exp();
    ((n + 1) as f64 * log2cosh + pow.ln_1p() - std::f64::consts::LN_2) / n as f64
}

/// Values of a chain, one per site of a contiguous range.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPath {
    lo: i64,
    values: Vec<f64>,
}

impl ChainPath {
    pub fn from_values(lo: i64, values: Vec<f64>) -> ChainPath {
        ChainPath { lo, values }
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// The chain value at `site`; panics outside the range.
    #[inline]
    pub fn value(&self, site: i64) -> f64 {
        self.values[(site - self.lo) as usize]
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The value at the last site.
    #[inline]
    pub fn last(&self) -> f64 {
        *self.values.last().expect("chain paths are never empty")
    }
}

/// Runs the left chain from an arbitrary start value seated at `field.lo − 1`.
pub fn run_l_from(field: &FieldWindow, params: &ModelParams, init: f64) -> ChainPath {
    let mut values = Vec::with_capacity(field.len() + 1);
    let mut y = init;
    values.push(y);
    for &h in field.values() {
        y = step_l(y, h, params);
        values.push(y);
    }
    ChainPath {
        lo: field.lo() - 1,
        values,
    }
}

/// The left chain with boundary spin `a`: `l_{ℓ−1} = aΓ`, values on `[ℓ−1, r]`.
pub fn run_l(field: &FieldWindow, params: &ModelParams, a: Spin) -> ChainPath {
    run_l_from(field, params, a.sign() * params.gamma())
}

/// Runs the right chain from an arbitrary start value seated at `field.hi + 1`.
pub fn run_r_from(field: &FieldWindow, params: &ModelParams, init: f64) -> ChainPath {
    let mut values = vec![0.0; field.len() + 1];
    let mut y = init;
    values[field.len()] = y;
    for (i, &h) in field.values().iter().enumerate().rev() {
        y = step_r(y, h, params);
        values[i] = y;
    }
    ChainPath {
        lo: field.lo(),
        values,
    }
}

/// The right chain with boundary spin `b`: `r_{r+1} = bΓ`, values on `[ℓ, r+1]`.
pub fn run_r(field: &FieldWindow, params: &ModelParams, b: Spin) -> ChainPath {
    run_r_from(field, params, b.sign() * params.gamma())
}

/// The local field sum `m_n = l_{n−1} + 2 h_n + r_{n+1}` and its sign
/// (`+1` on ties, matching the convention for the finite-volume spin guess).
#[inline]
pub fn m_and_sign(l_prev: f64, h: f64, r_next: f64) -> (f64, i8) {
    let m = l_prev + 2.0 * h + r_next;
    (m, if m >= 0.0 { 1 } else { -1 })
}

/// `P(σ_n = +1)` given the two chain messages around site `n`.
#[inline]
pub fn gibbs_marginal(l_prev: f64, h: f64, r_next: f64) -> f64 {
    logistic(l_prev + 2.0 * h + r_next)
}

/// Probability that a Gibbs spin disagrees with the guess `s ∈ {−1, 0, +1}`
/// at a site with local field sum `m`: exactly `P(σ ≠ s) = 1/(1 + e^{s·m})`
/// for `s = ±1`, and by convention `1` for the abstention `s = 0`.
#[inline]
pub fn mismatch_probability(m: f64, s: i8) -> f64 {
    match s {
        0 => 1.0,
        _ => logistic(-f64::from(s) * m),
    }
}

/// Draws one exact Gibbs configuration of the window under boundary spins
/// `(a, b)`: the right chain is precomputed, then spins are emitted left to
/// right from the exact conditional
/// `P(σ_n = +1 | σ_{n−1}) = logistic(Γ σ_{n−1} + 2 h_n + r_{n+1})`.
pub fn gibbs_sample(
    field: &FieldWindow,
    params: &ModelParams,
    a: Spin,
    b: Spin,
    rng: &mut impl RngCore,
) -> Vec<i8> {
    let r = run_r(field, params, b);
    let gamma = params.gamma();
    let mut out = Vec::with_capacity(field.len());
    let mut prev = a.sign() * gamma; // Γ·σ_{n−1}, starting from the boundary spin.
    for site in field.lo()..=field.hi() {
        let p_up = logistic(prev + 2.0 * field.h(site) + r.value(site + 1));
        let spin = if rng.random::<f64>() < p_up { 1i8 } else { -1i8 };
        out.push(spin);
        prev = f64::from(spin) * gamma;
    }
    out
}

/// A two-sided bracket of an infinite-volume chain value at one site.
#[derive(Clone, Copy, Debug)]
pub struct SandwichValue {
    /// Site the bracket refers to.
    pub site: i64,
    /// Chain value started from the lowest admissible value `−Γ`.
    pub lower: f64,
    /// Chain value started from the highest admissible value `+Γ`.
    pub upper: f64,
    /// Number of chain steps taken to cross the window.
    pub steps: usize,
    /// Whether `upper − lower ≤ tol` at the end of the window.
    pub converged: bool,
}

impl SandwichValue {
    /// Width of the bracket (always `≥ 0` by monotonicity of the step map).
    #[inline]
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// The midpoint estimate of the bracketed value.
    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

fn run_sandwich(
    fields: impl Iterator<Item = f64>,
    params: &ModelParams,
    site: i64,
    tol: f64,
) -> SandwichValue {
    let gamma = params.gamma();
    let mut lower = -gamma;
    let mut upper = gamma;
    let mut steps = 0usize;
    for h in fields {
        steps += 1;
        if lower == upper {
            // Chains already met bitwise; one evaluation drives both.
            lower = bend(gamma, lower + 2.0 * h);
            upper = lower;
        } else {
            lower = bend(gamma, lower + 2.0 * h);
            upper = bend(gamma, upper + 2.0 * h);
        }
    }
    SandwichValue {
        site,
        lower,
        upper,
        steps,
        converged: upper - lower <= tol,
    }
}

/// Brackets the infinite-volume *left* chain at the window's last site by
/// running the two extreme chains `l_{lo−1} = ∓Γ` forward across the window.
pub fn sandwich_l(field: &FieldWindow, params: &ModelParams, tol: f64) -> SandwichValue {
    run_sandwich(field.values().iter().copied(), params, field.hi(), tol)
}

/// Brackets the infinite-volume *right* chain at the window's first site by
/// running the two extreme chains `r_{hi+1} = ∓Γ` backward across the window.
pub fn sandwich_r(field: &FieldWindow, params: &ModelParams, tol: f64) -> SandwichValue {
    run_sandwich(field.values().iter().rev().copied(), params, field.lo(), tol)
}

/// Convenience: a deterministic per-replica RNG for Gibbs sampling.
pub fn replica_rng(seed: u64, replica: u64) -> SplitMix64 {
    SplitMix64::for_stream(seed, replica)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::DisorderLaw;
    use crate::oracle;

    fn window(values: &[f64]) -> FieldWindow {
        FieldWindow::from_values(1, values.to_vec())
    }

    #[test]
    fn bend_reference_value() {
        // b_4(4) = 4 + log(1+e^{−8}) − log 2, about 3.3072.
        let exact = 4.0 + (-8.0f64).exp().ln_1p() - 2.0f64.ln();
        assert!((bend(4.0, 4.0) - exact).abs() < 1e-12);
        assert!((bend(4.0, 4.0) - 3.3072).abs() < 1e-3);
    }

    #[test]
    fn bend_is_bitwise_odd() {
        let mut rng = SplitMix64::for_stream(5, 0);
        for _ in 0..1000 {
            let x = 400.0 * (rng.random::<f64>() - 0.5);
            let gamma = 8.0 * rng.random::<f64>();
            assert_eq!(bend(gamma, -x).to_bits(), (-bend(gamma, x)).to_bits());
        }
        assert_eq!(bend(3.0, -0.0).to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn bend_confines_monotonically() {
        let gamma = 5.0;
        let mut prev = f64::NEG_INFINITY;
        for i in -2000..=2000 {
            let x = i as f64 * 0.01;
            let y = bend(gamma, x);
            assert!(y > -gamma && y < gamma, "range violated at {x}");
            assert!(y.abs() <= x.abs() + 1e-15, "|b(x)| ≤ |x| violated at {x}");
            assert!(y >= prev, "monotonicity violated at {x}");
            prev = y;
        }
    }

    #[test]
    fn bend_survives_huge_arguments() {
        assert_eq!(bend(4.0, 1e308), 4.0);
        assert_eq!(bend(4.0, -1e308), -4.0);
        assert_eq!(bend(4.0, 1e4), 4.0);
        assert!(bend(700.0, 800.0).is_finite());
    }

    #[test]
    fn log_partition_matches_enumeration() {
        let mut rng = SplitMix64::for_stream(11, 0);
        let params = ModelParams::new(0.9).unwrap();
        for trial in 0..50 {
            let n = 1 + (rng.next_u64() % 8) as usize;
            let values: Vec<f64> = (0..n).map(|_| 4.0 * (rng.random::<f64>() - 0.5)).collect();
            let field = window(&values);
            for a in Spin::ALL {
                for b in Spin::ALL {
                    let reference = oracle::enumerate(&values, params.j(), a, b, 1e-9).unwrap();
                    let fast = log_partition(&field, &params, a, b);
                    let rel = (fast - reference.log_z).abs() / reference.log_z.abs().max(1.0);
                    assert!(rel < 1e-13, "trial {trial}: {fast} vs {}", reference.log_z);
                }
            }
        }
    }

    #[test]
    fn zero_field_closed_form_matches_the_recursion() {
        for &(j, n) in &[(0.7, 1u64), (1.3, 9), (3.0, 40), (4.0, 1000)] {
            let params = ModelParams::new(j).unwrap();
            let field = FieldWindow::from_values(1, vec![0.0; n as usize]);
            let direct = log_partition(&field, &params, Spin::Up, Spin::Up) / n as f64;
            let closed = zero_field_free_energy(&params, n);
            assert!(
                (direct - closed).abs() < 1e-12 * direct.abs().max(1.0),
                "J={j} N={n}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn log_partition_zero_field_closed_form() {
        let params = ModelParams::new(0.7).unwrap();
        for n in [10usize, 100] {
            let field = window(&vec![0.0; n]);
            let lam = 2.0 * params.j().cosh();
            // log of ((2cosh J)^{N+1} + (2sinh J)^{N+1})/2, in stable form.
            let expected = (n as f64 + 1.0) * lam.ln()
                + (params.j().tanh().powi(n as i32 + 1)).ln_1p()
                - 2.0f64.ln();
            let got = log_partition(&field, &params, Spin::Up, Spin::Up);
            assert!(
                (got - expected).abs() < 1e-12 * expected.abs(),
                "n={n}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn empty_window_is_pure_boundary_bond() {
        let params = ModelParams::new(1.3).unwrap();
        let field = FieldWindow::from_values(5, vec![]);
        for a in Spin::ALL {
            for b in Spin::ALL {
                let z = log_partition(&field, &params, a, b);
                assert_eq!(z, params.j() * a.sign() * b.sign());
            }
        }
    }

    #[test]
    fn chains_equal_log_partition_differences() {
        let values = [0.4, -1.1, 0.2, 0.9, -0.3, 1.7];
        let field = window(&values);
        let params = ModelParams::new(1.1).unwrap();
        for a in Spin::ALL {
            let l = run_l(&field, &params, a);
            for n in field.lo()..=field.hi() {
                let prefix = FieldWindow::from_values(
                    field.lo(),
                    values[..(n - field.lo() + 1) as usize].to_vec(),
                );
                let expected = log_partition(&prefix, &params, a, Spin::Up)
                    - log_partition(&prefix, &params, a, Spin::Down);
                assert!(
                    (l.value(n) - expected).abs() < 1e-10,
                    "l at {n}: {} vs {expected}",
                    l.value(n)
                );
            }
        }
        for b in Spin::ALL {
            let r = run_r(&field, &params, b);
            for n in field.lo()..=field.hi() {
                let suffix = FieldWindow::from_values(n, values[(n - field.lo()) as usize..].to_vec());
                let expected = log_partition(&suffix, &params, Spin::Up, b)
                    - log_partition(&suffix, &params, Spin::Down, b);
                assert!(
                    (r.value(n) - expected).abs() < 1e-10,
                    "r at {n}: {} vs {expected}",
                    r.value(n)
                );
            }
        }
    }

    #[test]
    fn chain_marginals_match_enumeration() {
        let values = [0.4, -2.1, 0.2, 3.0, -0.3];
        let field = window(&values);
        let params = ModelParams::new(0.8).unwrap();
        for a in Spin::ALL {
            for b in Spin::ALL {
                let reference = oracle::enumerate(&values, params.j(), a, b, 1e-9).unwrap();
                let l = run_l(&field, &params, a);
                let r = run_r(&field, &params, b);
                for n in field.lo()..=field.hi() {
                    let p = gibbs_marginal(l.value(n - 1), field.h(n), r.value(n + 1));
                    let q = reference.marginals[(n - field.lo()) as usize];
                    assert!((p - q).abs() < 1e-12, "site {n}: {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn mismatch_probability_is_the_exact_disagreement_chance() {
        // Guess +1 against m = −5: the spin is almost surely −1.
        assert!((mismatch_probability(-5.0, 1) - logistic(5.0)).abs() < 1e-15);
        // Aligned guess against a strong field: almost never wrong.
        assert!(mismatch_probability(30.0, 1) < 1e-12);
        // Abstention always counts as wrong.
        assert_eq!(mismatch_probability(0.0, 0), 1.0);
        assert_eq!(mismatch_probability(7.0, 0), 1.0);
        // At a tie the two signed guesses are coin flips.
        assert_eq!(mismatch_probability(0.0, 1), 0.5);
        assert_eq!(mismatch_probability(0.0, -1), 0.5);
    }

    #[test]
    fn gibbs_sampler_reproduces_enumerated_marginals() {
        let values = [0.3, -0.8, 0.5, -0.2];
        let field = window(&values);
        let params = ModelParams::new(0.6).unwrap();
        let reference = oracle::enumerate(&values, params.j(), Spin::Up, Spin::Down, 1e-9).unwrap();
        let mut rng = SplitMix64::for_stream(99, 0);
        let samples = 40_000;
        let mut up_counts = vec![0u64; values.len()];
        for _ in 0..samples {
            let conf = gibbs_sample(&field, &params, Spin::Up, Spin::Down, &mut rng);
            for (c, s) in up_counts.iter_mut().zip(&conf) {
                if *s == 1 {
                    *c += 1;
                }
            }
        }
        for (i, c) in up_counts.iter().enumerate() {
            let p_hat = *c as f64 / samples as f64;
            let p = reference.marginals[i];
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            assert!(
                (p_hat - p).abs() < 5.0 * se + 1e-4,
                "site {i}: {p_hat} vs {p} (se {se})"
            );
        }
    }

    #[test]
    fn gibbs_zero_coupling_gives_independent_spins() {
        let values = [0.7, -0.4, 0.0, 1.2];
        let field = window(&values);
        let params = ModelParams::new(0.0).unwrap();
        let mut rng = SplitMix64::for_stream(123, 0);
        let samples = 30_000;
        let mut up = vec![0u64; 4];
        let mut pair_match = 0u64;
        for _ in 0..samples {
            let conf = gibbs_sample(&field, &params, Spin::Up, Spin::Up, &mut rng);
            for (c, s) in up.iter_mut().zip(&conf) {
                if *s == 1 {
                    *c += 1;
                }
            }
            if conf[1] == conf[2] {
                pair_match += 1;
            }
        }
        for (i, &h) in values.iter().enumerate() {
            let p_hat = up[i] as f64 / samples as f64;
            let p = logistic(2.0 * h);
            assert!((p_hat - p).abs() < 0.01, "site {i}: {p_hat} vs {p}");
        }
        // Neighbours are independent: P(σ₂ = σ₃) = p₂p₃ + (1−p₂)(1−p₃).
        let (p2, p3) = (logistic(-0.8), logistic(0.0));
        let expected = p2 * p3 + (1.0 - p2) * (1.0 - p3);
        let got = pair_match as f64 / samples as f64;
        assert!((got - expected).abs() < 0.01, "{got} vs {expected}");
    }

    #[test]
    fn gibbs_zero_field_domain_lengths() {
        let params = ModelParams::new(0.8).unwrap();
        let n = 200_000;
        let field = FieldWindow::from_values(1, vec![0.0; n]);
        let mut rng = SplitMix64::for_stream(7, 1);
        let conf = gibbs_sample(&field, &params, Spin::Up, Spin::Up, &mut rng);
        let flips = conf.windows(2).filter(|w| w[0] != w[1]).count();
        // Wall probability per bond: 1 − p_J = 1/(1 + e^{2J});
        // equivalently mean domain length e^{2J} + 1.
        let q = 1.0 / (1.0 + (2.0 * params.j()).exp());
        let q_hat = flips as f64 / (n - 1) as f64;
        let se = (q * (1.0 - q) / n as f64).sqrt();
        assert!((q_hat - q).abs() < 5.0 * se, "{q_hat} vs {q} (se {se})");
        let mean_domain = (n - 1) as f64 / flips as f64;
        assert!(
            (mean_domain - ((2.0 * params.j()).exp() + 1.0)).abs() < 0.15,
            "mean domain {mean_domain}"
        );
    }

    #[test]
    fn negated_field_mirrors_chain_bitwise() {
        let law = DisorderLaw::Gauss { sigma: 1.0 };
        let field = FieldWindow::sample(&law, 31, 0, 1, 300);
        let negated =
            FieldWindow::from_values(1, field.values().iter().map(|h| -h).collect());
        let params = ModelParams::new(2.0).unwrap();
        for a in Spin::ALL {
            let direct = run_l(&field, &params, a);
            let mirrored = run_l(&negated, &params, a.flip());
            for (x, y) in direct.values().iter().zip(mirrored.values()) {
                assert_eq!(x.to_bits(), (-y).to_bits());
            }
        }
    }

    #[test]
    fn sandwich_brackets_and_contracts() {
        let law = DisorderLaw::Gauss { sigma: 1.0 };
        let params = ModelParams::from_gamma(10.0).unwrap();
        let field = FieldWindow::sample(&law, 17, 0, 1, 4000);
        let s = sandwich_l(&field, &params, 1e-8 * params.gamma());
        assert!(s.converged, "gap {}", s.gap());
        assert!(s.gap() >= 0.0);
        assert_eq!(s.site, 4000);
        assert_eq!(s.steps, 4000);
        // Any interior start lands inside the bracket.
        let mid = run_l_from(&field, &params, 0.37).last();
        assert!(s.lower - 1e-12 <= mid && mid <= s.upper + 1e-12);
        // The certificate bound: gap ≤ 2Γ e^{−εk} after k steps.
        let k = field.len() as f64;
        assert!(s.gap() <= 2.0 * params.gamma() * (-params.epsilon() * k).exp());
    }

    #[test]
    fn sandwich_right_matches_left_under_reversal() {
        // Running the right chain on (h_1..h_n) equals running the left chain
        // on the reversed sequence: both fold the same steps in the same order.
        let values = [0.3, -1.9, 0.8, 0.1, -0.4];
        let reversed: Vec<f64> = values.iter().rev().copied().collect();
        let params = ModelParams::from_gamma(3.0).unwrap();
        let a = sandwich_r(&FieldWindow::from_values(1, values.to_vec()), &params, 1e-6);
        let b = sandwich_l(
            &FieldWindow::from_values(1, reversed.clone()),
            &params,
            1e-6,
        );
        assert_eq!(a.lower.to_bits(), b.lower.to_bits());
        assert_eq!(a.upper.to_bits(), b.upper.to_bits());
    }

    #[test]
    fn sandwich_zero_field_never_converges() {
        let params = ModelParams::from_gamma(6.0).unwrap();
        let field = FieldWindow::from_values(1, vec![0.0; 500]);
        let s = sandwich_l(&field, &params, 1e-8);
        assert!(!s.converged);
        // With no field the bracket stays symmetric and shrinks only at the
        // slow ε-rate; after 500 steps it is still far above any useful tol.
        assert_eq!(s.lower.to_bits(), (-s.upper).to_bits());
        assert!(s.gap() > 0.1, "gap {}", s.gap());
    }
}
