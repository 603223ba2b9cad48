//! Γ-extrema of the walk: scanning, two-sided stabilization, spin profiles,
//! ladder epochs and record-gap statistics.
//!
//! A *record* is a confirmed Γ-extremum: scanning left to right, a maximum is
//! confirmed the first time the walk drops `Γ` below the running maximum, a
//! minimum when it rises `Γ` above the running minimum. Each record stores
//! where the extreme level was first (`u`) and last (`u_plus`) attained, the
//! level itself, and the confirmation time `t_confirm`. Records alternate in
//! kind, consecutive levels differ by at least `Γ`, and
//! `u_j ≤ u_plus_j < t_confirm_j ≤ u_{j+1}` — asserted after every scan.
//!
//! Spin profiles: between consecutive records the walk moves from one extreme
//! level to the other; when that move strictly exceeds `Γ` the intervening
//! sites inherit the direction of travel (`+1` rising into a maximum, `−1`
//! falling into a minimum). Everything else — plateaus between first and last
//! attainment, stretches of height exactly `Γ`, and sites whose classification
//! the window has not confirmed — stays `0`.

use crate::disorder::{sample_site, DisorderLaw, FieldWindow, WalkPath};
use crate::{Result, RficError};
use serde::Serialize;

/// Kind of a confirmed extremum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ExtremumKind {
    Max,
    Min,
}

impl ExtremumKind {
    /// The opposite kind.
    #[inline]
    pub fn flip(self) -> ExtremumKind {
        match self {
            ExtremumKind::Max => ExtremumKind::Min,
            ExtremumKind::Min => ExtremumKind::Max,
        }
    }

    /// Lower-case name for CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        }
    }

    /// Sign of the stretch leading into an extremum of this kind:
    /// `+1` rising into a maximum, `−1` falling into a minimum.
    #[inline]
    pub fn approach_sign(self) -> i8 {
        match self {
            ExtremumKind::Max => 1,
            ExtremumKind::Min => -1,
        }
    }
}

/// One confirmed Γ-extremum of the walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtremumRecord {
    pub kind: ExtremumKind,
    /// First site attaining the extreme level.
    pub u: i64,
    /// Last site attaining the extreme level before confirmation.
    pub u_plus: i64,
    /// The extreme walk value.
    pub level: f64,
    /// Site at which the opposite Γ-swing completed, confirming the record.
    pub t_confirm: i64,
}

/// Which swing direction opens a scan.
///
/// `DecreaseFirst` (the standard) waits for a Γ-drop first, so the leading
/// record is a maximum; `IncreaseFirst` is its mirror image. Away from the
/// scan start both conventions confirm the same records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanConvention {
    DecreaseFirst,
    IncreaseFirst,
}

impl ScanConvention {
    fn opening_kind(self) -> ExtremumKind {
        match self {
            ScanConvention::DecreaseFirst => ExtremumKind::Max,
            ScanConvention::IncreaseFirst => ExtremumKind::Min,
        }
    }
}

/// Streaming record scanner: feed walk values site by site, collect records as
/// their confirmations complete. This one state machine backs the one-sided
/// scan, the two-sided construction and the record-gap stream.
#[derive(Clone, Debug)]
pub struct RecordScanner {
    gamma: f64,
    kind: ExtremumKind,
    best: f64,
    first: i64,
    last: i64,
    started: bool,
}

impl RecordScanner {
    pub fn new(gamma: f64, convention: ScanConvention) -> RecordScanner {
        assert!(gamma > 0.0, "record scanning needs Γ > 0");
        RecordScanner {
            gamma,
            kind: convention.opening_kind(),
            best: f64::NAN,
            first: 0,
            last: 0,
            started: false,
        }
    }

    /// Consumes the walk value at `site`; sites must arrive in increasing
    /// order. Returns the record confirmed at this site, if any.
    #[inline]
    pub fn feed(&mut self, site: i64, value: f64) -> Option<ExtremumRecord> {
        if !self.started {
            self.started = true;
            self.best = value;
            self.first = site;
            self.last = site;
            return None;
        }
        let improves = match self.kind {
            ExtremumKind::Max => value > self.best,
            ExtremumKind::Min => value < self.best,
        };
        if improves {
            self.best = value;
            self.first = site;
            self.last = site;
            return None;
        }
        if value == self.best {
            self.last = site;
            return None;
        }
        let swing = match self.kind {
            ExtremumKind::Max => self.best - value,
            ExtremumKind::Min => value - self.best,
        };
        if swing >= self.gamma {
            let record = ExtremumRecord {
                kind: self.kind,
                u: self.first,
                u_plus: self.last,
                level: self.best,
                t_confirm: site,
            };
            // The next extremum is tracked over [t_confirm, …], this site included.
            self.kind = self.kind.flip();
            self.best = value;
            self.first = site;
            self.last = site;
            return Some(record);
        }
        None
    }
}

/// Result of a one-sided scan over `[from, to]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremaScan {
    pub records: Vec<ExtremumRecord>,
    pub from: i64,
    pub to: i64,
    pub gamma: f64,
    pub convention: ScanConvention,
}

impl ExtremaScan {
    /// Whether the window ended before even the first swing completed.
    pub fn no_swing(&self) -> bool {
        self.records.is_empty()
    }
}

/// Asserts the structural theorems on a record sequence: alternation,
/// interleaving of positions, and level gaps of at least `Γ`.
fn assert_record_structure(records: &[ExtremumRecord], gamma: f64) {
    for pair in records.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        assert_eq!(a.kind, b.kind.flip(), "record kinds must alternate");
        assert!(
            a.u <= a.u_plus && a.u_plus < a.t_confirm && a.t_confirm <= b.u,
            "record interleaving violated: {a:?} then {b:?}"
        );
        assert!(
            (a.level - b.level).abs() >= gamma,
            "level gap below Γ: {a:?} then {b:?}"
        );
    }
    if let Some(last) = records.last() {
        assert!(last.u <= last.u_plus && last.u_plus < last.t_confirm);
    }
}

/// Scans `walk` over `[from, to]` and returns every record confirmed inside.
pub fn scan_extrema(
    walk: &WalkPath,
    from: i64,
    to: i64,
    gamma: f64,
    convention: ScanConvention,
) -> ExtremaScan {
    assert!(walk.lo() <= from && to <= walk.hi() && from <= to);
    let mut scanner = RecordScanner::new(gamma, convention);
    let mut records = Vec::new();
    for site in from..=to {
        if let Some(record) = scanner.feed(site, walk.s(site)) {
            records.push(record);
        }
    }
    assert_record_structure(&records, gamma);
    ExtremaScan {
        records,
        from,
        to,
        gamma,
        convention,
    }
}

/// First completed Γ-swing of each direction, scanning from the left end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstSwing {
    /// `(t, u)`: first time the walk sits Γ below its running maximum, and the
    /// first site attaining that maximum.
    pub down: Option<(i64, i64)>,
    /// `(t, u)`: first time the walk sits Γ above its running minimum, and the
    /// first site attaining that minimum.
    pub up: Option<(i64, i64)>,
}

impl FirstSwing {
    /// The direction completing first, as `(kind, t, u)` where `Max` means the
    /// drop finished first (confirming a maximum). A tie is impossible — the
    /// same site cannot complete both a Γ-drop and a Γ-rise — and is asserted.
    pub fn first(&self) -> Option<(ExtremumKind, i64, i64)> {
        match (self.down, self.up) {
            (None, None) => None,
            (Some((t, u)), None) => Some((ExtremumKind::Max, t, u)),
            (None, Some((t, u))) => Some((ExtremumKind::Min, t, u)),
            (Some((td, ud)), Some((tu, uu))) => {
                assert_ne!(td, tu, "a Γ-drop and a Γ-rise cannot complete together");
                if td < tu {
                    Some((ExtremumKind::Max, td, ud))
                } else {
                    Some((ExtremumKind::Min, tu, uu))
                }
            }
        }
    }
}

/// Finds the first Γ-drop and the first Γ-rise of `walk` on `[from, to]`
/// in a single pass.
pub fn first_swing(walk: &WalkPath, from: i64, to: i64, gamma: f64) -> FirstSwing {
    assert!(walk.lo() <= from && to <= walk.hi() && from <= to);
    let mut max_v = walk.s(from);
    let mut max_first = from;
    let mut min_v = max_v;
    let mut min_first = from;
    let mut down = None;
    let mut up = None;
    for site in (from + 1)..=to {
        let v = walk.s(site);
        if down.is_none() {
            if v > max_v {
                max_v = v;
                max_first = site;
            } else if max_v - v >= gamma {
                down = Some((site, max_first));
            }
        }
        if up.is_none() {
            if v < min_v {
                min_v = v;
                min_first = site;
            } else if v - min_v >= gamma {
                up = Some((site, min_first));
            }
        }
        if down.is_some() && up.is_some() {
            break;
        }
    }
    FirstSwing { down, up }
}

/// A `±1/0` profile over a contiguous site range.
#[derive(Clone, Debug, PartialEq)]
pub struct SignProfile {
    lo: i64,
    signs: Vec<i8>,
}

impl SignProfile {
    /// All-zero profile on `[lo, hi]`.
    pub fn zeros(lo: i64, hi: i64) -> SignProfile {
        SignProfile {
            lo,
            signs: vec![0; (hi - lo + 1).max(0) as usize],
        }
    }

    #[inline]
    pub fn lo(&self) -> i64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> i64 {
        self.lo + self.signs.len() as i64 - 1
    }

    /// The sign at `site`; panics outside the range.
    #[inline]
    pub fn sign(&self, site: i64) -> i8 {
        self.signs[(site - self.lo) as usize]
    }

    #[inline]
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Sets `[from, to] ∩ domain` to `value`.
    fn fill(&mut self, from: i64, to: i64, value: i8) {
        let lo = from.max(self.lo);
        let hi = to.min(self.hi());
        for site in lo..=hi {
            self.signs[(site - self.lo) as usize] = value;
        }
    }

    /// Classifies the stretch `(prev_u_plus, record.u]` by the record's
    /// approach sign when the level travel strictly exceeds `Γ`.
    fn classify_stretch(
        &mut self,
        prev_u_plus: i64,
        prev_level: f64,
        record: &ExtremumRecord,
        gamma: f64,
    ) {
        let swing = match record.kind {
            ExtremumKind::Max => record.level - prev_level,
            ExtremumKind::Min => prev_level - record.level,
        };
        if swing > gamma {
            self.fill(prev_u_plus + 1, record.u, record.kind.approach_sign());
        }
    }
}

/// One-sided zero-temperature profile on `[from+1, to]`.
///
/// Each stretch leading into a record is classified against the previous
/// record's level; the very first stretch is classified against the walk level
/// at the scan anchor itself, so an opening climb steeper than `Γ` counts.
pub fn fisher_plus(walk: &WalkPath, scan: &ExtremaScan) -> SignProfile {
    let mut profile = SignProfile::zeros(scan.from + 1, scan.to);
    if let Some(first) = scan.records.first() {
        profile.classify_stretch(scan.from, walk.s(scan.from), first, scan.gamma);
    }
    for pair in scan.records.windows(2) {
        profile.classify_stretch(pair[0].u_plus, pair[0].level, &pair[1], scan.gamma);
    }
    profile
}

/// Where the fields of a two-sided construction come from.
pub enum FieldSource<'a> {
    /// Unbounded i.i.d. fields, reproducibly indexed by site.
    Law {
        law: &'a DisorderLaw,
        seed: u64,
        stream: u64,
    },
    /// A fixed finite window; growth is clamped to its bounds.
    Fixed(&'a FieldWindow),
}

/// Window sizing for of the two-sided construction, in sites.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoSidedOptions {
    /// First left extent; default `⌈4Γ²/ϑ²⌉`.
    pub base_window: Option<i64>,
    /// Hard cap on the left extent; default `⌈1024Γ²/ϑ²⌉`.
    pub cap_window: Option<i64>,
}

/// Two-sided record sequence around a target range, with its supporting walk.
#[derive(Clone, Debug)]
pub struct TwoSidedExtrema {
    /// All records of the final round, in scan order.
    pub records: Vec<ExtremumRecord>,
    /// The field window of the final round.
    pub field: FieldWindow,
    /// The walk of the final round (absolute site coordinates, anchored at 0).
    pub walk: WalkPath,
    /// Γ used for the scan.
    pub gamma: f64,
    /// Number of records with `u < 0`.
    pub negative_count: usize,
    /// Left field edges of the two agreeing rounds, for diagnostics.
    pub agreed_rounds: (i64, i64),
}

impl TwoSidedExtrema {
    /// Index (into `records`) of the label-0 record: the last one with `u < 0`.
    pub fn anchor_index(&self) -> Option<usize> {
        self.negative_count.checked_sub(1)
    }

    /// Label of record `idx`: the anchor gets 0, labels increase rightwards.
    pub fn label_of(&self, idx: usize) -> i64 {
        idx as i64 + 1 - self.negative_count as i64
    }
}

fn ceil_i64(x: f64) -> i64 {
    x.ceil() as i64
}

/// Builds the stabilized two-sided record sequence around `[target_lo, target_hi]`.
///
/// The scan window starts `⌈4Γ²/ϑ²⌉` sites left of the target's cover region
/// (which always includes the origin) and doubles leftward until two
/// successive rounds confirm the same records — compared by `(kind, u,
/// u_plus, level)`; confirmation times depend on the scan start and are
/// excluded — across the record run bracketing the cover region. The window
/// also grows rightward until some confirmed record sits at or beyond the
/// target's right edge, so every target site ends up between records.
///
/// A `Fixed` source clamps growth to its bounds, and once the whole window is
/// in view its scan is final (a zero field yields an empty, trivially stable
/// record sequence). A `Law` source that reaches the cap without agreement
/// fails with [`RficError::StabilizationFailed`].
pub fn two_sided_extrema(
    source: &FieldSource,
    gamma: f64,
    target_lo: i64,
    target_hi: i64,
    opts: &TwoSidedOptions,
) -> Result<TwoSidedExtrema> {
    assert!(target_lo <= target_hi);
    let theta2 = match source {
        FieldSource::Law { law, .. } => law.variance(),
        FieldSource::Fixed(f) => {
            let n = f.len().max(1) as f64;
            let v = f.values().iter().map(|h| h * h).sum::<f64>() / n;
            if v > 0.0 {
                v
            } else {
                1.0
            }
        }
    };
    let base = opts
        .base_window
        .unwrap_or_else(|| ceil_i64(4.0 * gamma * gamma / theta2))
        .max(16);
    let cap = opts
        .cap_window
        .unwrap_or_else(|| ceil_i64(1024.0 * gamma * gamma / theta2))
        .max(base);
    let cover_lo = target_lo.min(0);
    let cover_hi = target_hi;
    let (field_lo_bound, field_hi_bound, clamped) = match source {
        FieldSource::Law { .. } => (cover_lo - cap, cover_hi + cap, false),
        FieldSource::Fixed(f) => (f.lo(), f.hi(), true),
    };

    // One growing field buffer across all rounds; values never change.
    let mut field = match source {
        FieldSource::Law { law, seed, stream } => {
            let lo = (cover_lo - base).max(field_lo_bound);
            let hi = (cover_hi + base).min(field_hi_bound);
            FieldWindow::sample(law, *seed, *stream, lo, hi)
        }
        FieldSource::Fixed(f) => {
            fixed_slice(f, (cover_lo - base).max(f.lo()), (cover_hi + base).min(f.hi()))
        }
    };

    let grow_to = |field: &mut FieldWindow, lo: i64, hi: i64| match source {
        FieldSource::Law { law, seed, stream } => field.grow_sampled(law, *seed, *stream, lo, hi),
        FieldSource::Fixed(f) => {
            *field = fixed_slice(f, lo.min(field.lo()).max(f.lo()), hi.max(field.hi()).min(f.hi()));
        }
    };

    // The comparable key of a record run: everything but confirmation times.
    let key_of = |records: &[ExtremumRecord], from: usize, to: usize| -> Vec<(ExtremumKind, i64, i64, u64)> {
        records[from..=to]
            .iter()
            .map(|r| (r.kind, r.u, r.u_plus, r.level.to_bits()))
            .collect()
    };

    let mut previous_key: Option<Vec<(ExtremumKind, i64, i64, u64)>> = None;
    let mut previous_left = field.lo();
    let mut round = 0u32;
    loop {
        let desired_left = (cover_lo - (base << round.min(40))).max(field_lo_bound);
        let keep_right = field.hi();
        grow_to(&mut field, desired_left, keep_right);

        // Grow right until a confirmed record reaches past the target.
        let (scan, records_cover_right) = loop {
            let walk = WalkPath::from_field(&field);
            let scan = scan_extrema(&walk, walk.lo(), walk.hi(), gamma, ScanConvention::DecreaseFirst);
            let covered = scan.records.iter().any(|r| r.u >= cover_hi);
            if covered || field.hi() >= field_hi_bound {
                break (scan, covered);
            }
            let slack = (field.hi() - cover_hi).max(base);
            let keep_left = field.lo();
            grow_to(&mut field, keep_left, (cover_hi + 2 * slack).min(field_hi_bound));
        };
        if !records_cover_right && !clamped {
            return Err(RficError::WindowExhausted {
                lo: field.lo(),
                hi: field.hi(),
                waiting_for: "a confirmed record at or beyond the target's right edge".into(),
            });
        }

        let i_from = scan.records.iter().rposition(|r| r.u_plus < cover_lo);
        let i_to = scan.records.iter().position(|r| r.u >= cover_hi);
        let at_left_bound = field.lo() <= field_lo_bound;
        let key = match (i_from, i_to) {
            (Some(a), Some(b)) => Some(key_of(&scan.records, a, b)),
            (Some(a), None) if clamped => {
                let last = scan.records.len() - 1;
                Some(key_of(&scan.records, a, last))
            }
            (None, _) if clamped => {
                // Fixed windows may hold no record left of the cover region
                // (or none at all); compare what exists.
                if scan.records.is_empty() {
                    Some(vec![])
                } else {
                    let last = scan.records.len() - 1;
                    Some(key_of(&scan.records, 0, i_to.unwrap_or(last)))
                }
            }
            (None, _) if at_left_bound => {
                return Err(RficError::NoLeftAnchor {
                    lo: field.lo(),
                    hi: field.hi(),
                });
            }
            _ => None,
        };

        let finish = |scan: ExtremaScan, field: &FieldWindow, prev_left: i64| {
            let negative_count = scan.records.iter().filter(|r| r.u < 0).count();
            Ok(TwoSidedExtrema {
                records: scan.records,
                field: field.clone(),
                walk: WalkPath::from_field(field),
                gamma,
                negative_count,
                agreed_rounds: (prev_left, field.lo()),
            })
        };
        let agreed = matches!((&previous_key, &key), (Some(p), Some(c)) if p == c);
        if agreed {
            return finish(scan, &field, previous_left);
        }
        if at_left_bound {
            if clamped {
                // The fixed window is all there is; its full scan is final.
                let left = field.lo();
                return finish(scan, &field, left);
            }
            return Err(RficError::StabilizationFailed {
                previous_left,
                last_left: field.lo(),
                cap,
            });
        }
        previous_key = key;
        previous_left = field.lo();
        round += 1;
        if round > 64 {
            return Err(RficError::StabilizationFailed {
                previous_left,
                last_left: field.lo(),
                cap,
            });
        }
    }
}

/// The sub-window `[lo, hi] ∩ f` of a fixed field (empty when inverted).
fn fixed_slice(f: &FieldWindow, lo: i64, hi: i64) -> FieldWindow {
    let lo = lo.max(f.lo());
    let hi = hi.min(f.hi());
    if hi < lo {
        return FieldWindow::from_values(f.lo(), Vec::new());
    }
    FieldWindow::from_values(lo, (lo..=hi).map(|s| f.h(s)).collect())
}

/// Two-sided zero-temperature profile on `[lo, hi]` from stabilized records:
/// stretches between consecutive records are classified by approach sign when
/// their travel strictly exceeds `Γ`; plateaus, exact-Γ stretches and sites
/// outside the record run stay `0`. No virtual anchor is involved.
pub fn fisher_z(ts: &TwoSidedExtrema, lo: i64, hi: i64) -> SignProfile {
    let mut profile = SignProfile::zeros(lo, hi);
    for pair in ts.records.windows(2) {
        profile.classify_stretch(pair[0].u_plus, pair[0].level, &pair[1], ts.gamma);
    }
    profile
}

/// Strictly ascending ladder epochs, stopped at the first epoch whose
/// excursion dips `Γ` deep.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderEpochs {
    /// `ϱ_0 < ϱ_1 < …` (strict walk records), ending at the selected epoch.
    pub rho: Vec<i64>,
    /// Depth that stopped the search (`≥ Γ`).
    pub depth: f64,
}

impl LadderEpochs {
    /// The selected epoch `ϱ_K`: the first whose following excursion is Γ-deep.
    /// Coincides with the first site attaining the pre-drop maximum.
    pub fn selected(&self) -> i64 {
        *self.rho.last().expect("rho always holds at least ϱ_0")
    }
}

/// Walks the strictly ascending ladder of `walk` from `from`: `ϱ_0 = from`,
/// `ϱ_{k+1}` the next site with `S > S_{ϱ_k}`. Stops at the first epoch whose
/// excursion reaches `Γ` below its own level and asserts that this epoch is
/// exactly the first-maximum site of the first Γ-drop.
pub fn ladder_epochs(walk: &WalkPath, from: i64, to: i64, gamma: f64) -> Result<LadderEpochs> {
    assert!(walk.lo() <= from && to <= walk.hi() && from <= to);
    let mut rho = vec![from];
    let mut level = walk.s(from);
    let mut depth = 0.0f64;
    for site in (from + 1)..=to {
        let v = walk.s(site);
        if v > level {
            rho.push(site);
            level = v;
            depth = 0.0;
        } else {
            depth = depth.max(level - v);
            if depth >= gamma {
                let swing = first_swing(walk, from, to, gamma);
                let (t_down, u_down) = swing.down.expect("a Γ-deep excursion is a Γ-drop");
                assert!(t_down == site, "excursion depth and first drop disagree");
                assert!(
                    u_down == *rho.last().unwrap(),
                    "ladder epoch {} is not the first-maximum site {u_down}",
                    rho.last().unwrap()
                );
                return Ok(LadderEpochs { rho, depth });
            }
        }
    }
    Err(RficError::WindowExhausted {
        lo: from,
        hi: to,
        waiting_for: "a ladder excursion of depth Γ".into(),
    })
}

/// One gap between consecutive confirmed records of an unbounded scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RecordGap {
    /// 1-based index of the earlier record of the pair.
    pub index: usize,
    /// `u_{j+1} − u_j` (always positive).
    pub spacing: i64,
    /// `level_{j+1} − level_j` (signed; `|gap| ≥ Γ`, alternating in sign).
    pub gap: f64,
}

/// Streams the walk of a law rightward from the origin and harvests the first
/// `count` record-to-record gaps. Site values are indexed deterministically,
/// so the stream is independent of any chunking. Fails if a safety bound of
/// 2^40 sites is exhausted first.
pub fn record_gaps(
    law: &DisorderLaw,
    gamma: f64,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<RecordGap>> {
    let mut scanner = RecordScanner::new(gamma, ScanConvention::DecreaseFirst);
    let mut records: Vec<ExtremumRecord> = Vec::with_capacity(count + 1);
    let mut s = 0.0f64;
    scanner.feed(0, s);
    let safety: i64 = 1 << 40;
    let mut site = 0i64;
    while records.len() <= count {
        site += 1;
        if site > safety {
            return Err(RficError::WindowExhausted {
                lo: 0,
                hi: safety,
                waiting_for: format!("{} records (found {})", count + 1, records.len()),
            });
        }
        s += sample_site(law, seed, stream, site);
        if let Some(record) = scanner.feed(site, s) {
            records.push(record);
        }
    }
    assert_record_structure(&records, gamma);
    Ok(records
        .windows(2)
        .enumerate()
        .map(|(i, pair)| RecordGap {
            index: i + 1,
            spacing: pair[1].u - pair[0].u,
            gap: pair[1].level - pair[0].level,
        })
        .collect())
}
