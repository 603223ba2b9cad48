//! Disorder laws, reproducible field windows, and the random walk of partial sums.
//!
//! A *field window* holds the i.i.d. external fields `h_n` on a contiguous range
//! of sites. Sampling is counter-based (see [`crate::rng`]): the value at a site
//! depends only on `(law, seed, stream, site)`, never on the window bounds, so
//! windows can be enlarged on either side without disturbing existing values.
//!
//! The *walk* associated with fields on `[ℓ, r]` is
//!
//! ```text
//! S_n − S_{n−1} = h_n   for n ∈ [ℓ, r],
//! ```
//!
//! defined on `[ℓ−1, r]` and anchored at `S_0 = 0` whenever site 0 lies in that
//! range (otherwise at its left edge). Values are accumulated outward from the
//! anchor, which keeps every `S_n` bitwise identical across window enlargements.

use crate::rng::SplitMix64;
use crate::{Result, RficError};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use std::fmt;
use std::str::FromStr;

/// A boundary spin, `+1` or `−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Both values, in the order `(+1, −1)`.
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    /// The spin as `+1.0` or `−1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    /// The spin as `+1` or `−1`.
    #[inline]
    pub fn int(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    /// The opposite spin.
    #[inline]
    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// `+1 ↦ Up`, anything negative ↦ `Down`.
    #[inline]
    pub fn from_int(s: i8) -> Spin {
        if s >= 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Up => write!(f, "+1"),
            Spin::Down => write!(f, "-1"),
        }
    }
}

/// Distribution of one field value. All laws are centred: `E[h] = 0`.
///
/// Grammar accepted by [`DisorderLaw::from_str`]:
///
/// * `twopoint:a` — `±a` with equal weight,
/// * `gauss:sigma` — centred Gaussian with standard deviation `sigma`,
/// * `uniform:a` — uniform on `[−a, a]`,
/// * `fig2mix` — equal-weight mixture of a point mass at `−2` and a Gaussian
///   with mean `2` and variance `1/√2`,
/// * `table:x1:w1,x2:w2,...` — finite atoms `xi` with weights `wi` (normalised
///   internally; the weighted mean must vanish).
#[derive(Clone, Debug, PartialEq)]
pub enum DisorderLaw {
    /// `±a` with probability ½ each.
    TwoPoint { a: f64 },
    /// Centred Gaussian with standard deviation `sigma`.
    Gauss { sigma: f64 },
    /// Uniform on `[−a, a]`.
    Uniform { a: f64 },
    /// Equal-weight mixture of `δ_{−2}` and a Gaussian with mean 2, variance `1/√2`.
    AtomNormalMix,
    /// Finite list of `(value, weight)` atoms, weights normalised internally.
    Table { atoms: Vec<(f64, f64)> },
}

/// Standard deviation of the Gaussian component of [`DisorderLaw::AtomNormalMix`]:
/// its variance is `1/√2`, so the deviation is `2^(−1/4)`.
fn mix_component_sd() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2.sqrt()
}

impl DisorderLaw {
    /// Validated constructor for table laws.
    pub fn table(atoms: Vec<(f64, f64)>) -> Result<DisorderLaw> {
        let law = DisorderLaw::Table { atoms };
        law.validate()?;
        Ok(law)
    }

    /// Checks centring and non-degeneracy; builtin laws only need positive scale.
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Err(RficError::InvalidLaw { reason });
        match self {
            DisorderLaw::TwoPoint { a } | DisorderLaw::Uniform { a } => {
                if !a.is_finite() || *a <= 0.0 {
                    return invalid(format!("scale must be finite and positive, got {a}"));
                }
            }
            DisorderLaw::Gauss { sigma } => {
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return invalid(format!("sigma must be finite and positive, got {sigma}"));
                }
            }
            DisorderLaw::AtomNormalMix => {}
            DisorderLaw::Table { atoms } => {
                if atoms.is_empty() {
                    return invalid("table law needs at least one atom".into());
                }
                let mut total = 0.0;
                for &(x, w) in atoms {
                    if !x.is_finite() || !w.is_finite() || w <= 0.0 {
                        return invalid(format!(
                            "table atoms need finite values and positive weights, got ({x}, {w})"
                        ));
                    }
                    total += w;
                }
                let mean: f64 = atoms.iter().map(|&(x, w)| x * w).sum::<f64>() / total;
                let scale = atoms.iter().map(|&(x, _)| x.abs()).fold(1.0, f64::max);
                if mean.abs() > 1e-12 * scale {
                    return invalid(format!("atoms have non-zero mean {mean:e}"));
                }
                let var: f64 = atoms.iter().map(|&(x, w)| x * x * w).sum::<f64>() / total;
                if var <= 0.0 {
                    return invalid("table law is concentrated at 0 (zero variance)".into());
                }
            }
        }
        Ok(())
    }

    /// `E[h] = 0` for every admissible law (tables are validated to be centred).
    pub fn mean(&self) -> f64 {
        0.0
    }

    /// The variance `ϑ² = E[h²]` of one field value.
    pub fn variance(&self) -> f64 {
        match self {
            DisorderLaw::TwoPoint { a } => a * a,
            DisorderLaw::Gauss { sigma } => sigma * sigma,
            DisorderLaw::Uniform { a } => a * a / 3.0,
            // ½·(−2)² + ½·(2² + 1/√2)
            DisorderLaw::AtomNormalMix => 4.0 + 0.5 * std::f64::consts::FRAC_1_SQRT_2,
            DisorderLaw::Table { atoms } => {
                let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
                atoms.iter().map(|&(x, w)| x * x * w).sum::<f64>() / total
            }
        }
    }

    /// Whether the law has no atoms (continuous distribution). Decimation's
    /// structural guarantees assume an atomless law.
    pub fn is_atomless(&self) -> bool {
        matches!(
            self,
            DisorderLaw::Gauss { .. } | DisorderLaw::Uniform { .. }
        )
    }

    /// Draws one field value.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> f64 {
        match self {
            DisorderLaw::TwoPoint { a } => {
                if rng.next_u64() >> 63 == 1 {
                    *a
                } else {
                    -*a
                }
            }
            DisorderLaw::Gauss { sigma } => sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng),
            DisorderLaw::Uniform { a } => {
                let u: f64 = rng.random();
                a * (2.0 * u - 1.0)
            }
            DisorderLaw::AtomNormalMix => {
                if rng.next_u64() >> 63 == 1 {
                    -2.0
                } else {
                    2.0 + mix_component_sd()
                        * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
                }
            }
            DisorderLaw::Table { atoms } => {
                let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
                let mut u = total * rng.random::<f64>();
                for &(x, w) in atoms {
                    if u < w {
                        return x;
                    }
                    u -= w;
                }
                atoms.last().expect("validated non-empty").0
            }
        }
    }
}

impl FromStr for DisorderLaw {
    type Err = RficError;

    fn from_str(s: &str) -> Result<DisorderLaw> {
        let parse_err = |reason: &str| RficError::LawParse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(&format!("`{t}` is not a number")))
        };
        let law = match s.split_once(':') {
            None => match s.trim() {
                "fig2mix" => DisorderLaw::AtomNormalMix,
                _ => return Err(parse_err("expected name:params or `fig2mix`")),
            },
            Some((name, rest)) => match name.trim() {
                "twopoint" => DisorderLaw::TwoPoint { a: num(rest)? },
                "gauss" => DisorderLaw::Gauss { sigma: num(rest)? },
                "uniform" => DisorderLaw::Uniform { a: num(rest)? },
                "table" => {
                    let mut atoms = Vec::new();
                    for pair in rest.split(',') {
                        let (x, w) = pair
                            .split_once(':')
                            .ok_or_else(|| parse_err("table atoms are value:weight pairs"))?;
                        atoms.push((num(x)?, num(w)?));
                    }
                    DisorderLaw::Table { atoms }
                }
                _ => return Err(parse_err("unknown law name")),
            },
        };
        law.validate()?;
        Ok(law)
    }
}

impl fmt::Display for DisorderLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisorderLaw::TwoPoint { a } => write!(f, "twopoint:{a}"),
            DisorderLaw::Gauss { sigma } => write!(f, "gauss:{sigma}"),
            DisorderLaw::Uniform { a } => write!(f, "uniform:{a}"),
            DisorderLaw::AtomNormalMix => write!(f, "fig2mix"),
            DisorderLaw::Table { atoms } => {
                write!(f, "table:")?;
                for (i, (x, w)) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}:{w}")?;
                }
                Ok(())
            }
        }
    }
}

/// The field value at one site — a pure function of its arguments.
#[inline]
pub fn sample_site(law: &DisorderLaw, seed: u64, stream: u64, site: i64) -> f64 {
    law.sample(&mut SplitMix64::for_site(seed, stream, site))
}

/// Fields `h_n` on a contiguous site range `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldWindow {
    lo: i64,
    values: Vec<f64>,
}

impl FieldWindow {
    /// Wraps explicit values; `values[0]` sits at site `lo`.
    pub fn from_values(lo: i64, values: Vec<f64>) -> FieldWindow {
        FieldWindow { lo, values }
    }

    /// Samples the window `[lo, hi]` (inclusive; empty when `hi < lo`).
    pub fn sample(law: &DisorderLaw, seed: u64, stream: u64, lo: i64, hi: i64) -> FieldWindow {
        let values = (lo..=hi)
            .map(|site| sample_site(law, seed, stream, site))
            .collect();
        FieldWindow { lo, values }
    }

    /// First site.
    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last site (`lo − 1` for an empty window).
    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// Number of sites.
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the window holds no sites.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The field at `site`; panics if the site is outside the window.
    #[inline]
    pub fn h(&self, site: i64) -> f64 {
        self.values[(site - self.lo) as usize]
    }

    /// All values in site order.
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grows the window to cover `[new_lo, new_hi]`, sampling only the new sites.
    /// Existing values are untouched; with per-site sampling the result equals a
    /// fresh sample of the larger window.
    pub fn grow_sampled(
        &mut self,
        law: &DisorderLaw,
        seed: u64,
        stream: u64,
        new_lo: i64,
        new_hi: i64,
    ) {
        if new_lo < self.lo {
            let mut prefix: Vec<f64> = (new_lo..self.lo)
                .map(|site| sample_site(law, seed, stream, site))
                .collect();
            prefix.append(&mut self.values);
            self.values = prefix;
            self.lo = new_lo;
        }
        if new_hi > self.hi() {
            for site in (self.hi() + 1)..=new_hi {
                self.values.push(sample_site(law, seed, stream, site));
            }
        }
    }
}

/// The partial-sum walk on `[lo, hi]` (one site left of its field window).
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPath {
    lo: i64,
    s: Vec<f64>,
}

impl WalkPath {
    /// Builds the walk of `field`, defined on `[field.lo − 1, field.hi]`,
    /// anchored at `S_0 = 0` when site 0 is in that range (else at the left edge),
    /// and accumulated outward from the anchor so enlarging the field window
    /// never changes an existing value.
    pub fn from_field(field: &FieldWindow) -> WalkPath {
        let lo = field.lo() - 1;
        let hi = field.hi();
        let len = (hi - lo + 1) as usize;
        let anchor = 0i64.clamp(lo, hi);
        let mut s = vec![0.0; len];
        let idx = |site: i64| (site - lo) as usize;
        for site in (anchor + 1)..=hi {
            s[idx(site)] = s[idx(site - 1)] + field.h(site);
        }
        for site in (lo..anchor).rev() {
            s[idx(site)] = s[idx(site + 1)] - field.h(site + 1);
        }
        WalkPath { lo, s }
    }

    /// Wraps explicit walk values; `s[0]` sits at site `lo`.
    pub fn from_values(lo: i64, s: Vec<f64>) -> WalkPath {
        WalkPath { lo, s }
    }

    /// First site with a walk value.
    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last site with a walk value.
    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.s.len() as i64 - 1
    }

    /// Number of sites carrying walk values.
    #[inline]
    pub fn len(&self) -> usize {
        self.s.len()
    }

    /// Whether the path is empty.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `S_site`; panics outside the domain.
    #[inline]
    pub fn s(&self, site: i64) -> f64 {
        self.s[(site - self.lo) as usize]
    }

    /// All walk values in site order.
    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.s
    }

    /// The reversed walk `S^rv_n = S_{−n}` on `[−hi, −lo]`.
    ///
    /// This is a pure value copy — bitwise exact — and corresponds to running
    /// through the negated-and-reversed field sequence.
    pub fn reversed(&self) -> WalkPath {
        let mut s = self.s.clone();
        s.reverse();
        WalkPath { lo: -self.hi(), s }
    }
}
