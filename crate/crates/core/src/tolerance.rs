//! Floating-point tolerances. Everything else is exact.

/// Relative residual allowed in Parseval identities.
pub const PARSEVAL_REL: f64 = 1e-9;

/// Relative agreement between direct and fast character sums, measured
/// against `|B|`.
pub const TRANSFORM_REL: f64 = 1e-9;

/// Slack, relative to `|B|` (or the matching power of `|B|`), granted to
/// floating comparisons against a proven lower bound.
pub const MAGNITUDE_SLACK: f64 = 1e-9;
