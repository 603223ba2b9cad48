//! Hard-wall boundary chains: the clamped one-step map, exact values via
//! pair coalescence, closed forms read off the walk's first swings, the
//! combined hard field with its exact sign, and smooth-vs-hard proximity
//! sampling.
//!
//! The hard-wall chains replace the smooth squashing map by a clamp to
//! `[−Γ, Γ]`. Clamping makes forgetting *exact*: two chains started from the
//! opposite walls become bitwise identical at the first Γ-swing of the
//! driving walk, because both are flattened onto the same wall. This exact
//! coalescence is the ground truth against which the closed-form expressions
//! are checked.

use crate::disorder::{DisorderLaw, FieldWindow, Spin, WalkPath};
use crate::transfer::{sandwich_l, ChainPath, ModelParams};
use crate::{Result, RficError};

/// One hard-wall step: `clamp(y + 2h, [−Γ, Γ])`.
#[inline]
pub fn step_hat(y: f64, h: f64, gamma: f64) -> f64 {
    (y + 2.0 * h).clamp(-gamma, gamma)
}

/// Exact sign with `sign(0) = 0`.
#[inline]
pub fn exact_sign(m: f64) -> i8 {
    if m > 0.0 {
        1
    } else if m < 0.0 {
        -1
    } else {
        0
    }
}

/// Left hard-wall chain over the window, initialized at `aΓ` one site before
/// it; values on `[lo − 1, hi]`.
pub fn run_hat_l(field: &FieldWindow, gamma: f64, a: Spin) -> ChainPath {
    let mut values = Vec::with_capacity(field.len() + 1);
    let mut y = a.sign() * gamma;
    values.push(y);
    for site in field.lo()..=field.hi() {
        y = step_hat(y, field.h(site), gamma);
        values.push(y);
    }
    ChainPath::from_values(field.lo() - 1, values)
}

/// Right hard-wall chain over the window, initialized at `bΓ` one site after
/// it; values on `[lo, hi + 1]`.
pub fn run_hat_r(field: &FieldWindow, gamma: f64, b: Spin) -> ChainPath {
    let mut values = Vec::with_capacity(field.len() + 1);
    let mut y = b.sign() * gamma;
    values.push(y);
    for site in (field.lo()..=field.hi()).rev() {
        y = step_hat(y, field.h(site), gamma);
        values.push(y);
    }
    values.reverse();
    ChainPath::from_values(field.lo(), values)
}

/// A hard-wall chain with the far boundary provably forgotten: the two
/// extreme initial conditions `±Γ` agree bitwise from `coalesced_at` onward
/// (toward the window interior), and `values` holds that common trajectory.
#[derive(Clone, Debug)]
pub struct CoalescedChain {
    pub values: ChainPath,
    pub coalesced_at: i64,
}

/// Runs the left chain from both walls at the window start and returns the
/// common values on `[coalesced_at, hi]`. Coalescence is exact — the first
/// Γ-swing of the field pins both chains to the same wall — so the two
/// trajectories are compared bitwise, and a window without any swing (for
/// instance a zero field) is an error, never an approximation.
pub fn hat_l_pair(field: &FieldWindow, gamma: f64) -> Result<CoalescedChain> {
    assert!(gamma > 0.0);
    let (lo, hi) = (field.lo(), field.hi());
    let mut up = gamma;
    let mut dn = -gamma;
    let mut merged_at = None;
    for site in lo..=hi {
        up = step_hat(up, field.h(site), gamma);
        dn = step_hat(dn, field.h(site), gamma);
        if up.to_bits() == dn.to_bits() {
            merged_at = Some(site);
            break;
        }
    }
    let Some(start) = merged_at else {
        return Err(RficError::NoCoalescence {
            lo,
            hi,
            gap: up - dn,
        });
    };
    let mut values = Vec::with_capacity((hi - start + 1) as usize);
    values.push(up);
    let mut y = up;
    for site in (start + 1)..=hi {
        y = step_hat(y, field.h(site), gamma);
        values.push(y);
    }
    Ok(CoalescedChain {
        values: ChainPath::from_values(start, values),
        coalesced_at: start,
    })
}

/// Mirror of [`hat_l_pair`] for the right chain: common values on
/// `[lo, coalesced_at]`.
pub fn hat_r_pair(field: &FieldWindow, gamma: f64) -> Result<CoalescedChain> {
    assert!(gamma > 0.0);
    let (lo, hi) = (field.lo(), field.hi());
    let mut up = gamma;
    let mut dn = -gamma;
    let mut merged_at = None;
    for site in (lo..=hi).rev() {
        up = step_hat(up, field.h(site), gamma);
        dn = step_hat(dn, field.h(site), gamma);
        if up.to_bits() == dn.to_bits() {
            merged_at = Some(site);
            break;
        }
    }
    let Some(end) = merged_at else {
        return Err(RficError::NoCoalescence {
            lo,
            hi,
            gap: up - dn,
        });
    };
    let mut values = Vec::with_capacity((end - lo + 1) as usize);
    values.push(up);
    let mut y = up;
    for site in (lo..end).rev() {
        y = step_hat(y, field.h(site), gamma);
        values.push(y);
    }
    values.reverse();
    Ok(CoalescedChain {
        values: ChainPath::from_values(lo, values),
        coalesced_at: end,
    })
}

/// Closed-form value of the left hard-wall chain at `site`, read off the walk
/// scanned leftward from there.
///
/// Scanning `R_j = S_{site−j}`, the chain last touched the **top** wall if
/// `R` completes a Γ-drop from its running maximum first (the wall contact
/// sits at the first site attaining that maximum), giving
/// `Γ + 2(S_site − max)`; if a Γ-rise from the running minimum completes
/// first the value is `−Γ + 2(S_site − min)`. No clamping happens after the
/// contact, so the formula is exact.
pub fn hat_l_explicit(walk: &WalkPath, gamma: f64, site: i64) -> Result<f64> {
    assert!(walk.lo() <= site && site <= walk.hi());
    let anchor = walk.s(site);
    let mut max_v = anchor;
    let mut min_v = anchor;
    for j in 1..=(site - walk.lo()) {
        let v = walk.s(site - j);
        if v > max_v {
            max_v = v;
        } else if max_v - v >= gamma {
            return Ok(gamma + 2.0 * (anchor - max_v));
        }
        if v < min_v {
            min_v = v;
        } else if v - min_v >= gamma {
            return Ok(-gamma + 2.0 * (anchor - min_v));
        }
    }
    Err(RficError::WindowExhausted {
        lo: walk.lo(),
        hi: site,
        waiting_for: "a Γ-swing of the walk left of the evaluation site".into(),
    })
}

/// Closed-form value of the right hard-wall chain at `site`, read off the
/// walk scanned rightward from `site − 1`.
///
/// Scanning `F_j = S_{site−1+j}`, a Γ-drop from the running maximum
/// completing first means the chain (which runs leftward) last touched the
/// **bottom** wall, giving `−Γ + 2(max − S_{site−1})`; a Γ-rise first gives
/// `Γ + 2(min − S_{site−1})`.
pub fn hat_r_explicit(walk: &WalkPath, gamma: f64, site: i64) -> Result<f64> {
    assert!(walk.lo() <= site - 1 && site - 1 <= walk.hi());
    let anchor = walk.s(site - 1);
    let mut max_v = anchor;
    let mut min_v = anchor;
    for j in 1..=(walk.hi() - (site - 1)) {
        let v = walk.s(site - 1 + j);
        if v > max_v {
            max_v = v;
        } else if max_v - v >= gamma {
            return Ok(-gamma + 2.0 * (max_v - anchor));
        }
        if v < min_v {
            min_v = v;
        } else if v - min_v >= gamma {
            return Ok(gamma + 2.0 * (min_v - anchor));
        }
    }
    Err(RficError::WindowExhausted {
        lo: site - 1,
        hi: walk.hi(),
        waiting_for: "a Γ-swing of the walk right of the evaluation site".into(),
    })
}

/// The hard combined field and its exact sign at one site.
#[derive(Clone, Copy, Debug)]
pub struct HatSite {
    pub site: i64,
    pub l_prev: f64,
    pub r_next: f64,
    pub m_hat: f64,
    pub sign: i8,
}

/// Computes `m̂_n = l̂_{n−1} + 2h_n + r̂_{n+1}` and its exact sign on
/// `[lo, hi]`, with both hard-wall chains obtained by pair coalescence. The
/// field must extend far enough on both sides for the chains to have
/// provably forgotten their walls before entering the target range.
pub fn hat_profile(field: &FieldWindow, gamma: f64, lo: i64, hi: i64) -> Result<Vec<HatSite>> {
    assert!(field.lo() <= lo && hi <= field.hi() && lo <= hi);
    let left = hat_l_pair(field, gamma)?;
    if left.coalesced_at > lo - 1 {
        return Err(RficError::WindowExhausted {
            lo: field.lo(),
            hi: field.hi(),
            waiting_for: format!(
                "left-chain coalescence at or before site {} (got {})",
                lo - 1,
                left.coalesced_at
            ),
        });
    }
    let right = hat_r_pair(field, gamma)?;
    if right.coalesced_at < hi + 1 {
        return Err(RficError::WindowExhausted {
            lo: field.lo(),
            hi: field.hi(),
            waiting_for: format!(
                "right-chain coalescence at or after site {} (got {})",
                hi + 1,
                right.coalesced_at
            ),
        });
    }
    Ok((lo..=hi)
        .map(|site| {
            let l_prev = left.values.value(site - 1);
            let r_next = right.values.value(site + 1);
            let m_hat = l_prev + 2.0 * field.h(site) + r_next;
            HatSite {
                site,
                l_prev,
                r_next,
                m_hat,
                sign: exact_sign(m_hat),
            }
        })
        .collect())
}

/// One replica of the smooth-vs-hard comparison at the origin.
#[derive(Clone, Copy, Debug)]
pub struct ProximityRow {
    pub replica: u64,
    /// Smooth chain value (sandwich midpoint) at site 0.
    pub l_mid: f64,
    /// Hard-wall closed-form value at site 0.
    pub l_hat: f64,
    /// `|l_mid − l_hat|`.
    pub gap: f64,
}

/// Gap statistics between the smooth and hard left chains at the origin.
#[derive(Clone, Debug)]
pub struct ProximityReport {
    pub rows: Vec<ProximityRow>,
    /// Replicas dropped because the sandwich or the closed form did not
    /// resolve within the allowed window.
    pub dropped: usize,
    /// `loglog Γ + shift`, the reporting threshold for large gaps.
    pub threshold: f64,
    /// Fraction of kept replicas with `gap > threshold`.
    pub exceed_fraction: f64,
}

/// Samples `|l₀ − l̂₀|` over independent disorder replicas: per replica the
/// smooth value comes from the monotone sandwich (midpoint, tolerance
/// `10⁻⁸·Γ`), the hard value from the closed form on the same field. The
/// exceedance threshold is `loglog Γ + shift`; the constant is a report
/// parameter, not an asserted value.
pub fn proximity_sample(
    law: &DisorderLaw,
    gamma: f64,
    replicas: u64,
    seed: u64,
    threshold_shift: f64,
) -> Result<ProximityReport> {
    let params = ModelParams::from_gamma(gamma)?;
    let theta2 = law.variance();
    let base = ((64.0 * gamma * gamma / theta2).ceil() as i64).max(64);
    let tol = 1e-8 * gamma;
    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for replica in 0..replicas {
        let mut width = base;
        let mut resolved = None;
        // Up to two window doublings before dropping the replica.
        for _ in 0..3 {
            let field = FieldWindow::sample(law, seed, replica, -width, 0);
            let sandwich = sandwich_l(&field, &params, tol);
            if !sandwich.converged {
                width *= 2;
                continue;
            }
            let walk = WalkPath::from_field(&field);
            match hat_l_explicit(&walk, gamma, 0) {
                Ok(l_hat) => {
                    resolved = Some((sandwich.midpoint(), l_hat));
                    break;
                }
                Err(_) => {
                    width *= 2;
                }
            }
        }
        match resolved {
            Some((l_mid, l_hat)) => rows.push(ProximityRow {
                replica,
                l_mid,
                l_hat,
                gap: (l_mid - l_hat).abs(),
            }),
            None => dropped += 1,
        }
    }
    let threshold = gamma.max(1.0 + 1e-9).ln().ln() + threshold_shift;
    let exceed = rows.iter().filter(|r| r.gap > threshold).count();
    let exceed_fraction = if rows.is_empty() {
        0.0
    } else {
        exceed as f64 / rows.len() as f64
    };
    Ok(ProximityReport {
        rows,
        dropped,
        threshold,
        exceed_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{bend, step_l};

    fn gaussian_field(seed: u64, lo: i64, hi: i64) -> FieldWindow {
        let law = DisorderLaw::Gauss { sigma: 1.0 };
        FieldWindow::sample(&law, seed, 0, lo, hi)
    }

    #[test]
    fn step_hat_clamps_and_dominates_smooth_map() {
        assert_eq!(step_hat(0.0, 0.0, 4.0), 0.0);
        assert_eq!(step_hat(3.0, 3.0, 4.0), 4.0);
        assert_eq!(step_hat(-3.0, -3.0, 4.0), -4.0);
        let gamma = 4.0;
        let params = ModelParams::from_gamma(gamma).unwrap();
        for i in -400..=400 {
            let y = i as f64 / 50.0; // state grid in [−8, 8] pre-clamp
            let y = y.clamp(-gamma, gamma);
            for h in [-1.3, -0.2, 0.0, 0.4, 2.1] {
                let hard = step_hat(y, h, gamma);
                let smooth = step_l(y, h, &params);
                let x = y + 2.0 * h;
                if x >= 0.0 {
                    assert!(hard >= smooth, "y={y} h={h}");
                } else {
                    assert!(hard <= smooth, "y={y} h={h}");
                }
                // The clamp dominates the squashing map in absolute value.
                assert!(hard.abs() >= bend(gamma, x).abs() - 1e-15);
            }
        }
    }

    #[test]
    fn finite_hat_chains_by_hand() {
        let field = FieldWindow::from_values(1, vec![1.0, -2.0]);
        let l = run_hat_l(&field, 3.0, Spin::Up);
        assert_eq!(l.values(), &[3.0, 3.0, -1.0]);
        assert_eq!(l.lo(), 0);
        let r = run_hat_r(&field, 3.0, Spin::Down);
        // r̂₃ = −3; r̂₂ = clamp(−3 − 4) = −3; r̂₁ = clamp(−3 + 2) = −1.
        assert_eq!(r.values(), &[-1.0, -3.0, -3.0]);
        assert_eq!(r.lo(), 1);
    }

    #[test]
    fn pair_coalesces_exactly_and_matches_both_wall_starts() {
        for seed in 0..30u64 {
            let field = gaussian_field(seed, 1, 400);
            let pair = hat_l_pair(&field, 4.0).expect("a Γ-swing in 400 Gaussian sites");
            let up = run_hat_l(&field, 4.0, Spin::Up);
            let dn = run_hat_l(&field, 4.0, Spin::Down);
            for site in pair.coalesced_at..=field.hi() {
                assert_eq!(pair.values.value(site).to_bits(), up.value(site).to_bits());
                assert_eq!(pair.values.value(site).to_bits(), dn.value(site).to_bits());
            }
            // Strictly before coalescence the wall starts disagree.
            let before = pair.coalesced_at - 1;
            if before >= field.lo() - 1 {
                assert_ne!(up.value(before).to_bits(), dn.value(before).to_bits());
            }
        }
    }

    #[test]
    fn zero_field_never_coalesces() {
        let field = FieldWindow::from_values(1, vec![0.0; 1000]);
        match hat_l_pair(&field, 2.0) {
            Err(RficError::NoCoalescence { gap, .. }) => assert_eq!(gap, 4.0),
            other => panic!("expected NoCoalescence, got {other:?}"),
        }
        assert!(matches!(
            hat_r_pair(&field, 2.0),
            Err(RficError::NoCoalescence { .. })
        ));
    }

    #[test]
    fn closed_form_matches_coalescence_left_and_right() {
        for gamma in [4.0, 8.0] {
            for seed in 0..100u64 {
                let width = (40.0 * gamma * gamma) as i64;
                let field = gaussian_field(seed ^ (gamma as u64) << 32, -width, width);
                let walk = WalkPath::from_field(&field);
                let lpair = hat_l_pair(&field, gamma).unwrap();
                assert!(lpair.coalesced_at <= width - 10, "late coalescence");
                let l_explicit = hat_l_explicit(&walk, gamma, width).unwrap();
                assert!(
                    (l_explicit - lpair.values.value(width)).abs() <= 1e-12,
                    "gamma {gamma} seed {seed}"
                );
                let rpair = hat_r_pair(&field, gamma).unwrap();
                let r_explicit = hat_r_explicit(&walk, gamma, -width).unwrap();
                assert!((r_explicit - rpair.values.value(-width)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn negating_the_field_negates_the_closed_form() {
        for seed in 0..40u64 {
            let field = gaussian_field(seed, -600, 0);
            let negated =
                FieldWindow::from_values(-600, field.values().iter().map(|h| -h).collect());
            let walk = WalkPath::from_field(&field);
            let neg_walk = WalkPath::from_field(&negated);
            let a = hat_l_explicit(&walk, 5.0, 0).unwrap();
            let b = hat_l_explicit(&neg_walk, 5.0, 0).unwrap();
            assert_eq!(a, -b, "branches must swap under negation");
        }
    }

    #[test]
    fn right_chain_is_left_chain_of_the_negated_mirror() {
        for seed in 0..40u64 {
            let field = gaussian_field(seed, 1, 700);
            let walk = WalkPath::from_field(&field);
            let mirrored = WalkPath::from_values(
                -walk.hi(),
                walk.values().iter().rev().map(|v| -v).collect(),
            );
            let r1 = hat_r_explicit(&walk, 3.5, 1).unwrap();
            let l0 = hat_l_explicit(&mirrored, 3.5, 0).unwrap();
            assert_eq!(r1.to_bits(), l0.to_bits());
        }
    }

    /// Integer staircase with a two-site top plateau: the combined hard field
    /// must vanish exactly on the plateau's interior and carry the slope
    /// signs elsewhere.
    #[test]
    fn plateau_sites_have_exactly_zero_hard_field() {
        let mut h = vec![-1.0; 4];
        h.extend(vec![1.0; 7]); // S₁₁ = 3
        h.push(-1.0); // S₁₂ = 2
        h.push(1.0); // S₁₃ = 3 again: plateau {11, 13}
        h.extend(vec![-1.0; 6]); // S₁₉ = −3
        h.extend(vec![1.0; 6]); // S₂₅ = 3
        let field = FieldWindow::from_values(1, h);
        let gamma = 3.0;
        let profile = hat_profile(&field, gamma, 12, 21).unwrap();
        let by_site = |n: i64| profile.iter().find(|s| s.site == n).unwrap();
        assert_eq!(by_site(12).m_hat, 0.0);
        assert_eq!(by_site(12).sign, 0);
        assert_eq!(by_site(13).m_hat, 0.0);
        assert_eq!(by_site(13).sign, 0);
        assert_eq!(by_site(14).m_hat, -2.0);
        assert_eq!(by_site(14).sign, -1);
        assert_eq!(by_site(21).m_hat, 4.0);
        assert_eq!(by_site(21).sign, 1);
    }

    #[test]
    fn sawtooth_hard_field_follows_the_teeth() {
        let mut h = Vec::new();
        for _ in 0..30 {
            h.push(3.0);
            h.push(-3.0);
        }
        let field = FieldWindow::from_values(1, h);
        let profile = hat_profile(&field, 2.0, 10, 50).unwrap();
        for site in &profile {
            let expected = if site.site % 2 == 1 { 1 } else { -1 };
            assert_eq!(site.sign, expected, "site {}", site.site);
            assert_eq!(site.m_hat.abs(), 2.0);
        }
    }

    #[test]
    fn proximity_report_basics() {
        let law = DisorderLaw::Gauss { sigma: 1.0 };
        let report = proximity_sample(&law, 6.0, 40, 9, 10.0).unwrap();
        assert_eq!(report.rows.len() + report.dropped, 40);
        assert!(!report.rows.is_empty());
        for row in &report.rows {
            assert!(row.l_mid.abs() <= 6.0);
            assert!(row.l_hat.abs() <= 6.0);
            assert!(row.gap >= 0.0);
        }
        assert!(report.threshold > 10.0);
        assert!(report.exceed_fraction <= 1.0);
        // Deterministic rerun.
        let again = proximity_sample(&law, 6.0, 40, 9, 10.0).unwrap();
        assert_eq!(report.rows.len(), again.rows.len());
        for (a, b) in report.rows.iter().zip(&again.rows) {
            assert_eq!(a.l_mid.to_bits(), b.l_mid.to_bits());
            assert_eq!(a.l_hat.to_bits(), b.l_hat.to_bits());
        }
    }
}
