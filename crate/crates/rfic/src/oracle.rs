//! Brute-force reference implementations.
//!
//! Everything here is deliberately naive: partition functions by summing over
//! all `2^N` configurations, ground states by exhaustive maximization, spin
//! profiles by extremum bullet-checking straight from the definition. These
//! serve as independent oracles for the fast implementations in the other
//! modules; none of this code shares logic with them.

use crate::disorder::{FieldWindow, Spin, WalkPath};
use crate::extrema::ExtremumKind;
use crate::reflected::{exact_sign, run_hat_l, run_hat_r};
use crate::transfer::{log_partition, ModelParams};
use crate::{Result, RficError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::HashSet;

/// Hard cap on enumerable window lengths (`2^N` configurations).
pub const MAX_ENUM_SITES: usize = 24;

/// Default energy band within which configurations count as tied maximizers
/// in floating-point enumeration.
pub const DEFAULT_TIE_BAND: f64 = 1e-9;

/// Result of exhausting all configurations of a window.
#[derive(Clone, Debug)]
pub struct Enumeration {
    /// `log Z` for the window and boundary pair.
    pub log_z: f64,
    /// `P(σ_n = +1)` per site, in window order.
    pub marginals: Vec<f64>,
    /// The maximal energy `max_σ H(σ)`.
    pub max_h: f64,
    /// Every configuration with `H ≥ max_h − tie_band`, each as `±1` per site.
    pub maximizers: Vec<Vec<i8>>,
}

#[inline]
fn spin_of_bit(mask: u64, i: usize) -> f64 {
    if mask >> i & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Energy `H(σ) = J Σ σ_{n−1}σ_n + Σ h_n σ_n` with boundary spins `a, b`.
fn energy(field: &[f64], j: f64, a: Spin, b: Spin, mask: u64) -> f64 {
    let mut e = 0.0;
    let mut prev = a.sign();
    for (i, &h) in field.iter().enumerate() {
        let s = spin_of_bit(mask, i);
        e += j * prev * s + h * s;
        prev = s;
    }
    e + j * prev * b.sign()
}

fn config_of_mask(mask: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { 1i8 } else { -1i8 })
        .collect()
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_ENUM_SITES {
        return Err(RficError::WindowTooLong {
            len,
            max: MAX_ENUM_SITES,
        });
    }
    Ok(())
}

/// Sums over all `2^N` configurations: exact `log Z`, site marginals, and the
/// set of (near-)maximizers within `tie_band` of the maximal energy.
///
/// The empty window is allowed and contributes the pure boundary-bond weight
/// `log Z = J·a·b` with the empty configuration as its only maximizer.
pub fn enumerate(field: &[f64], j: f64, a: Spin, b: Spin, tie_band: f64) -> Result<Enumeration> {
    check_len(field.len())?;
    let n = field.len();
    if n == 0 {
        let e = j * a.sign() * b.sign();
        return Ok(Enumeration {
            log_z: e,
            marginals: vec![],
            max_h: e,
            maximizers: vec![vec![]],
        });
    }
    let total = 1u64 << n;
    // Pass 1: maximal energy, so pass 2 can work with safe scaled weights.
    let mut max_h = f64::NEG_INFINITY;
    for mask in 0..total {
        max_h = max_h.max(energy(field, j, a, b, mask));
    }
    // Pass 2: scaled partition sums and tied maximizers.
    let mut z = 0.0;
    let mut plus_sums = vec![0.0; n];
    let mut maximizers = Vec::new();
    for mask in 0..total {
        let e = energy(field, j, a, b, mask);
        let w = (e - max_h).exp();
        z += w;
        for (i, sum) in plus_sums.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *sum += w;
            }
        }
        if e >= max_h - tie_band {
            maximizers.push(config_of_mask(mask, n));
        }
    }
    Ok(Enumeration {
        log_z: max_h + z.ln(),
        marginals: plus_sums.iter().map(|s| s / z).collect(),
        max_h,
        maximizers,
    })
}

/// Exact-arithmetic energy of one configuration.
fn energy_exact(field: &[BigRational], j: &BigRational, a: Spin, b: Spin, mask: u64) -> BigRational {
    let sgn = |x: f64| BigInt::from(x as i64);
    let mut e = BigRational::zero();
    let mut prev = sgn(a.sign());
    for (i, h) in field.iter().enumerate() {
        let s = sgn(spin_of_bit(mask, i));
        e += j * BigRational::from(&prev * &s) + h * BigRational::from(s.clone());
        prev = s;
    }
    e + j * BigRational::from(prev * sgn(b.sign()))
}

/// Exhaustive ground-state search in exact rational arithmetic: returns the
/// maximal energy and *all* configurations attaining it exactly. This decides
/// ties (e.g. stretches of height exactly `Γ`) with no floating-point doubt.
pub fn enumerate_maximizers_exact(
    field: &[BigRational],
    j: &BigRational,
    a: Spin,
    b: Spin,
) -> Result<(BigRational, Vec<Vec<i8>>)> {
    check_len(field.len())?;
    let n = field.len();
    if n == 0 {
        let e = j * BigRational::from(BigInt::from((a.sign() * b.sign()) as i64));
        return Ok((e, vec![vec![]]));
    }
    let mut best: Option<BigRational> = None;
    let mut maximizers: Vec<Vec<i8>> = Vec::new();
    for mask in 0..1u64 << n {
        let e = energy_exact(field, j, a, b, mask);
        match &best {
            Some(m) if e < *m => {}
            Some(m) if e == *m => maximizers.push(config_of_mask(mask, n)),
            _ => {
                best = Some(e);
                maximizers.clear();
                maximizers.push(config_of_mask(mask, n));
            }
        }
    }
    Ok((best.expect("non-empty window"), maximizers))
}

/// The per-site consensus of a set of configurations: `+1`/`−1` where all agree,
/// `0` where they differ. Applied to a maximizer set this is the zero-temperature
/// spin profile with `0` marking degenerate sites.
pub fn consensus_sign(configs: &[Vec<i8>]) -> Vec<i8> {
    if configs.is_empty() {
        return vec![];
    }
    let n = configs[0].len();
    (0..n)
        .map(|i| {
            let first = configs[0][i];
            if configs.iter().all(|c| c[i] == first) {
                first
            } else {
                0
            }
        })
        .collect()
}

/// Configurations as an order-free set for equality comparisons.
pub fn config_set(configs: &[Vec<i8>]) -> HashSet<Vec<i8>> {
    configs.iter().cloned().collect()
}

// ---------------------------------------------------------------------------
// Finite-volume Γ-extrema and the predicted ground-state family
// ---------------------------------------------------------------------------

/// A finite-window Γ-extremum of the field walk: a position where the walk is
/// extremal on a bracket whose two flanks are each justified either by a
/// Γ-swing or by the matching boundary spin. `attains` lists every position
/// in the window attaining `level` inside the extremum's plateau, in
/// increasing order; a domain wall of a maximizer may sit at any of them.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteExtremum {
    pub kind: ExtremumKind,
    pub attains: Vec<i64>,
    pub level: f64,
}

impl FiniteExtremum {
    pub fn u(&self) -> i64 {
        self.attains[0]
    }

    pub fn u_plus(&self) -> i64 {
        *self.attains.last().expect("non-empty plateau")
    }
}

/// Exact-arithmetic twin of [`FiniteExtremum`] for crafted rational fields,
/// where stretches of height exactly `Γ` are decided with no rounding doubt.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteExtremumExact {
    pub kind: ExtremumKind,
    pub attains: Vec<i64>,
    pub level: BigRational,
}

/// The quadratic-time candidate scan shared by the float and exact paths.
///
/// Position `u` (index into `values`, index 0 being the bond site just left
/// of the window) is a Γ-maximum candidate if some bracket `[s, t] ∋ u` keeps
/// the walk at or below `values[u]` throughout, with the left flank reaching
/// down by `Γ` — or running off the window start while the left boundary spin
/// is up — and the right flank reaching down by `Γ` — or running off the end
/// while the right boundary spin is down. Minimum candidates mirror this.
/// `gap_ge` receives `(high, low)` with `high ≥ low` and decides
/// `high − low ≥ Γ`.
fn candidates_impl<T: PartialOrd>(
    values: &[T],
    a: Spin,
    b: Spin,
    gap_ge: &dyn Fn(&T, &T) -> bool,
) -> Vec<(ExtremumKind, usize)> {
    let n = values.len() as i64;
    let mut out = Vec::new();
    for u in 0..values.len() {
        let su = &values[u];

        let scan = |kind: ExtremumKind, rightward: bool| -> bool {
            let (boundary, step) = match (kind, rightward) {
                (ExtremumKind::Max, false) => (a == Spin::Up, -1i64),
                (ExtremumKind::Max, true) => (b == Spin::Down, 1),
                (ExtremumKind::Min, false) => (a == Spin::Down, -1),
                (ExtremumKind::Min, true) => (b == Spin::Up, 1),
            };
            let mut j = u as i64 + step;
            while 0 <= j && j < n {
                let v = &values[j as usize];
                let (extremal, justified) = match kind {
                    ExtremumKind::Max => (v <= su, gap_ge(su, v)),
                    ExtremumKind::Min => (v >= su, gap_ge(v, su)),
                };
                if !extremal {
                    return false;
                }
                if justified {
                    return true;
                }
                j += step;
            }
            // Ran off the window with extremality intact: the flank can only
            // be justified by the boundary spin.
            boundary
        };

        let is_max = scan(ExtremumKind::Max, false) && scan(ExtremumKind::Max, true);
        let is_min = scan(ExtremumKind::Min, false) && scan(ExtremumKind::Min, true);
        assert!(
            !(is_max && is_min),
            "a position cannot be justified as both extremum kinds"
        );
        if is_max {
            out.push((ExtremumKind::Max, u));
        } else if is_min {
            out.push((ExtremumKind::Min, u));
        }
    }
    out
}

/// Groups candidate positions into alternating extrema and checks the
/// structure this module relies on: candidates of one extremum share one
/// level exactly, runs alternate in kind, consecutive levels differ by at
/// least `Γ`, the first kind matches the left boundary spin and the count's
/// parity matches the boundary pair.
fn group_runs<T: Clone + PartialEq>(
    values: &[T],
    cands: &[(ExtremumKind, usize)],
    offset: i64,
    a: Spin,
    b: Spin,
    gap_ge: &dyn Fn(&T, &T) -> bool,
) -> Vec<(ExtremumKind, Vec<i64>, T)> {
    let mut runs: Vec<(ExtremumKind, Vec<i64>, T)> = Vec::new();
    for &(kind, u) in cands {
        match runs.last_mut() {
            Some((k, attains, level)) if *k == kind => {
                assert!(
                    values[u] == *level,
                    "same-kind candidates without an opposite one between share a level"
                );
                attains.push(offset + u as i64);
            }
            _ => runs.push((kind, vec![offset + u as i64], values[u].clone())),
        }
    }
    for pair in runs.windows(2) {
        assert_ne!(pair[0].0, pair[1].0, "extremum kinds alternate");
        let (hi, lo) = match pair[0].0 {
            ExtremumKind::Max => (&pair[0].2, &pair[1].2),
            ExtremumKind::Min => (&pair[1].2, &pair[0].2),
        };
        assert!(gap_ge(hi, lo), "consecutive extremum levels differ by ≥ Γ");
    }
    if let Some(first) = runs.first() {
        assert_eq!(
            first.0 == ExtremumKind::Max,
            a == Spin::Up,
            "first extremum kind matches the left boundary spin"
        );
    }
    assert_eq!(
        a == b,
        runs.len() % 2 == 0,
        "boundary spins agree exactly when the extremum count is even"
    );
    runs
}

/// Finds all finite-window Γ-extrema of the walk under boundary spins
/// `(a, b)`; the walk's first position plays the bond site left of the
/// window. Quadratic time — this is reference machinery, not production.
pub fn finite_extrema(walk: &WalkPath, gamma: f64, a: Spin, b: Spin) -> Vec<FiniteExtremum> {
    assert!(gamma > 0.0);
    let gap_ge = |hi: &f64, lo: &f64| hi - lo >= gamma;
    let cands = candidates_impl(walk.values(), a, b, &gap_ge);
    group_runs(walk.values(), &cands, walk.lo(), a, b, &gap_ge)
        .into_iter()
        .map(|(kind, attains, level)| FiniteExtremum {
            kind,
            attains,
            level,
        })
        .collect()
}

/// Exact twin of [`finite_extrema`] on a rational walk whose index 0 is the
/// bond site left of the window.
pub fn finite_extrema_exact(
    values: &[BigRational],
    gamma: &BigRational,
    a: Spin,
    b: Spin,
) -> Vec<FiniteExtremumExact> {
    assert!(*gamma > BigRational::zero());
    let gap_ge = |hi: &BigRational, lo: &BigRational| hi - lo >= *gamma;
    let cands = candidates_impl(values, a, b, &gap_ge);
    group_runs(values, &cands, 0, a, b, &gap_ge)
        .into_iter()
        .map(|(kind, attains, level)| FiniteExtremumExact {
            kind,
            attains,
            level,
        })
        .collect()
}

/// Assembles the predicted set of ground-state configurations from the
/// Γ-extrema.
///
/// Base configurations place one domain wall per extremum, at any position of
/// its plateau; the stretch ending at extremum `s` carries the spin climbing
/// into it (`+` for a maximum, `−` for a minimum) and the final stretch
/// carries the right boundary spin. On top of that, any set of pairwise
/// non-adjacent interior stretches whose level climb is exactly `Γ` may be
/// *removed* — flipped to the preceding stretch's spin — which trades two
/// walls against the stretch's field energy at zero net cost. Removing a
/// stretch erases the walls at both of its end extrema, so their plateau
/// choices become irrelevant; duplicates are collapsed.
fn family_from<L>(
    ext: &[(ExtremumKind, &[i64], &L)],
    walk_lo: i64,
    walk_hi: i64,
    removable_gap: &dyn Fn(&L, &L) -> bool,
    a: Spin,
    b: Spin,
) -> Vec<Vec<i8>> {
    let k = ext.len();
    let n_sites = (walk_hi - walk_lo) as usize;
    if k == 0 {
        assert_eq!(a, b, "no extrema forces agreeing boundary spins");
        return vec![vec![a.int(); n_sites]];
    }
    // Stretch signs, 1-based: stretch `s ≤ k` ends at extremum `s`.
    let mut sign = vec![0i8; k + 2];
    for s in 1..=k {
        sign[s] = ext[s - 1].0.approach_sign();
    }
    sign[k + 1] = b.int();
    assert_eq!(sign[1], a.int());
    for s in 1..=k {
        assert_eq!(sign[s + 1], -sign[s], "stretch spins alternate");
    }

    let removable: Vec<usize> = (2..=k)
        .filter(|&s| removable_gap(ext[s - 2].2, ext[s - 1].2))
        .collect();

    let mut set: HashSet<Vec<i8>> = HashSet::new();
    for mask in 0u64..1 << removable.len() {
        let chosen: Vec<usize> = removable
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        // Adjacent removals would annihilate a whole stretch pair at an
        // energy loss; they never produce maximizers.
        if chosen.windows(2).any(|w| w[1] - w[0] < 2) {
            continue;
        }
        let mut removed = vec![false; k + 2];
        for &s in &chosen {
            removed[s] = true;
        }
        // Extrema whose wall survives, hence whose plateau choice matters.
        let relevant: Vec<usize> = (1..=k).filter(|&t| !removed[t] && !removed[t + 1]).collect();

        let mut idx = vec![0usize; relevant.len()];
        loop {
            let mut wall = vec![0i64; k + 2];
            wall[0] = walk_lo;
            wall[k + 1] = walk_hi;
            for t in 1..=k {
                wall[t] = ext[t - 1].1[0];
            }
            for (slot, &t) in relevant.iter().enumerate() {
                wall[t] = ext[t - 1].1[idx[slot]];
            }
            let mut config = vec![0i8; n_sites];
            for s in 1..=k + 1 {
                let sgn = if removed[s] { sign[s - 1] } else { sign[s] };
                for site in (wall[s - 1] + 1)..=wall[s] {
                    config[(site - walk_lo - 1) as usize] = sgn;
                }
            }
            set.insert(config);

            let mut carried = true;
            for (slot, &t) in relevant.iter().enumerate() {
                idx[slot] += 1;
                if idx[slot] < ext[t - 1].1.len() {
                    carried = false;
                    break;
                }
                idx[slot] = 0;
            }
            if carried {
                break;
            }
        }
    }
    let mut out: Vec<Vec<i8>> = set.into_iter().collect();
    out.sort();
    out
}

/// Predicted ground-state set from float extrema; exact level comparisons are
/// sound here because the instances carrying exact-`Γ` stretches are dyadic.
pub fn maximizer_family(
    extrema: &[FiniteExtremum],
    walk_lo: i64,
    walk_hi: i64,
    gamma: f64,
    a: Spin,
    b: Spin,
) -> Vec<Vec<i8>> {
    let tuples: Vec<(ExtremumKind, &[i64], &f64)> = extrema
        .iter()
        .map(|e| (e.kind, e.attains.as_slice(), &e.level))
        .collect();
    family_from(
        &tuples,
        walk_lo,
        walk_hi,
        &|x: &f64, y: &f64| (x - y).abs() == gamma,
        a,
        b,
    )
}

/// Exact twin of [`maximizer_family`].
pub fn maximizer_family_exact(
    extrema: &[FiniteExtremumExact],
    walk_lo: i64,
    walk_hi: i64,
    gamma: &BigRational,
    a: Spin,
    b: Spin,
) -> Vec<Vec<i8>> {
    let tuples: Vec<(ExtremumKind, &[i64], &BigRational)> = extrema
        .iter()
        .map(|e| (e.kind, e.attains.as_slice(), &e.level))
        .collect();
    family_from(
        &tuples,
        walk_lo,
        walk_hi,
        &|x: &BigRational, y: &BigRational| (x - y).abs() == *gamma,
        a,
        b,
    )
}

/// Exact rational walk of a rational field, anchored at zero one position
/// before the first site.
pub fn walk_exact(field: &[BigRational]) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(field.len() + 1);
    let mut s = BigRational::zero();
    out.push(s.clone());
    for h in field {
        s += h;
        out.push(s.clone());
    }
    out
}

/// Left hard-wall chain in exact rational arithmetic; values at positions
/// `0..=N` with position 0 the bond site left of the window.
pub fn hat_l_exact(field: &[BigRational], gamma: &BigRational, a: Spin) -> Vec<BigRational> {
    let neg = -gamma.clone();
    let two = BigRational::from(BigInt::from(2));
    let mut y = match a {
        Spin::Up => gamma.clone(),
        Spin::Down => neg.clone(),
    };
    let mut out = vec![y.clone()];
    for h in field {
        y = &y + &two * h;
        if y > *gamma {
            y = gamma.clone();
        } else if y < neg {
            y = neg.clone();
        }
        out.push(y.clone());
    }
    out
}

/// Zero-temperature tri-state spin profile from the finite-window hard-wall
/// chains: `sign(l̂_{n−1} + 2h_n + r̂_{n+1})`, with 0 marking sites whose
/// combined hard field vanishes.
pub fn hat_consensus(field: &FieldWindow, gamma: f64, a: Spin, b: Spin) -> Vec<i8> {
    let l = run_hat_l(field, gamma, a);
    let r = run_hat_r(field, gamma, b);
    (field.lo()..=field.hi())
        .map(|n| exact_sign(l.value(n - 1) + 2.0 * field.h(n) + r.value(n + 1)))
        .collect()
}

/// Compares the predicted ground-state family against exhaustive enumeration
/// and returns the common size; a mismatch reports a configuration from the
/// symmetric difference.
pub fn check_maximizer_structure(
    field: &[f64],
    j: f64,
    a: Spin,
    b: Spin,
    tie_band: f64,
) -> Result<usize> {
    let n = field.len() as i64;
    let enumeration = enumerate(field, j, a, b, tie_band)?;
    let window = FieldWindow::from_values(1, field.to_vec());
    let walk = WalkPath::from_field(&window);
    let extrema = finite_extrema(&walk, 2.0 * j, a, b);
    let family = maximizer_family(&extrema, 0, n, 2.0 * j, a, b);
    compare_families(&family, &enumeration.maximizers)
}

/// Exact twin of [`check_maximizer_structure`] for rational instances.
pub fn check_maximizer_structure_exact(
    field: &[BigRational],
    j: &BigRational,
    a: Spin,
    b: Spin,
) -> Result<usize> {
    let n = field.len() as i64;
    let (_, enumerated) = enumerate_maximizers_exact(field, j, a, b)?;
    let gamma = BigRational::from(BigInt::from(2)) * j;
    let walk = walk_exact(field);
    let extrema = finite_extrema_exact(&walk, &gamma, a, b);
    let family = maximizer_family_exact(&extrema, 0, n, &gamma, a, b);
    compare_families(&family, &enumerated)
}

fn compare_families(family: &[Vec<i8>], enumerated: &[Vec<i8>]) -> Result<usize> {
    let fam = config_set(family);
    let enu = config_set(enumerated);
    if fam == enu {
        return Ok(fam.len());
    }
    let witness = fam
        .symmetric_difference(&enu)
        .next()
        .cloned()
        .unwrap_or_default();
    Err(RficError::MaximizerMismatch {
        family_len: fam.len(),
        enumerated_len: enu.len(),
        witness,
    })
}

/// Convergence of the scaled free-energy difference between the two right
/// boundary spins toward its zero-temperature value, along doubling inverse
/// temperatures `β = 1, 2, 4, …, 256`.
#[derive(Clone, Debug)]
pub struct BetaConvergence {
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Ground-state energy difference from enumeration.
    pub limit: f64,
}

/// Tracks `(log Z^{a,+} − log Z^{a,−})/β` at coupling `βJ` and field `βh`
/// against the enumerated ground-state energy difference.
pub fn beta_limit_check(field: &[f64], j: f64, a: Spin) -> Result<BetaConvergence> {
    let plus = enumerate(field, j, a, Spin::Up, DEFAULT_TIE_BAND)?;
    let minus = enumerate(field, j, a, Spin::Down, DEFAULT_TIE_BAND)?;
    let limit = plus.max_h - minus.max_h;
    let mut betas = Vec::new();
    let mut values = Vec::new();
    let mut gaps = Vec::new();
    let mut beta = 1.0;
    while beta <= 256.0 {
        let params = ModelParams::new(beta * j)?;
        let scaled = FieldWindow::from_values(1, field.iter().map(|h| beta * h).collect());
        let v = (log_partition(&scaled, &params, a, Spin::Up)
            - log_partition(&scaled, &params, a, Spin::Down))
            / beta;
        betas.push(beta);
        values.push(v);
        gaps.push((v - limit).abs());
        beta *= 2.0;
    }
    Ok(BetaConvergence {
        betas,
        values,
        gaps,
        limit,
    })
}
