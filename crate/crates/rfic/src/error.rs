//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by chain construction, scanning, and experiments.
///
/// Everything that is a *theorem* of the model (alternation of extremum kinds,
/// conservation under decimation, …) is enforced with assertions instead: a
/// violation there is a bug in this crate, not a condition for callers to handle.
#[derive(Debug, Error)]
pub enum RficError {
    /// A law string (e.g. `gauss:1`, `table:x1:w1,...`) could not be parsed.
    #[error("cannot parse disorder law `{input}`: {reason}")]
    LawParse { input: String, reason: String },

    /// A disorder law that violates the model's standing assumptions
    /// (fields must be centred with finite positive variance).
    #[error("invalid disorder law: {reason}")]
    InvalidLaw { reason: String },

    /// A coupling parameter outside its admissible range.
    #[error("invalid coupling J = {j}: {reason}")]
    InvalidCoupling { j: f64, reason: String },

    /// An enumeration was requested on a window too long to enumerate.
    #[error("window of length {len} exceeds the enumeration limit {max}")]
    WindowTooLong { len: usize, max: usize },

    /// A scan consumed its whole window without the event it was waiting for.
    #[error("window [{lo}, {hi}] exhausted before {waiting_for}")]
    WindowExhausted {
        lo: i64,
        hi: i64,
        waiting_for: String,
    },

    /// Hard-wall chains started from the two walls never met inside the window.
    #[error(
        "hard-wall chains did not coalesce within [{lo}, {hi}] (remaining gap {gap:e}); \
         a zero or near-zero field never produces the required Γ-swing"
    )]
    NoCoalescence { lo: i64, hi: i64, gap: f64 },

    /// Two-sided record stabilization still disagreed at the window-growth cap.
    #[error(
        "two-sided extrema failed to stabilize: rounds with left edge {previous_left} and \
         {last_left} disagree and the window cap {cap} sites is reached"
    )]
    StabilizationFailed {
        previous_left: i64,
        last_left: i64,
        cap: i64,
    },

    /// A two-sided scan needed a record left of the origin but none exists.
    #[error("no record left of the origin to anchor relabeling in [{lo}, {hi}]")]
    NoLeftAnchor { lo: i64, hi: i64 },

    /// Decimation asked to act on a chain with fewer than three bonds.
    #[error("decimation step requires at least 3 bonds, chain has {len}")]
    ChainTooShort { len: usize },

    /// The constructed maximizer family disagrees with brute-force enumeration.
    #[error(
        "maximizer family mismatch: {family_len} constructed vs {enumerated_len} enumerated; \
         first differing configuration {witness:?}"
    )]
    MaximizerMismatch {
        family_len: usize,
        enumerated_len: usize,
        witness: Vec<i8>,
    },

    /// An invalid argument outside the law grammar (format names, sweeps, …).
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },

    /// Writing an output file failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
