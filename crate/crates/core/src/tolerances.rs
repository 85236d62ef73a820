//! Numerical tolerances.  Everything else in the crate is exact; these only apply
//! to the concurrence computations, whose target values (0, 1/2, √2/3, √6/3, 2/3)
//! are separated by far more than any of them.

/// Bisection width for polynomial roots (relative to the root for roots above 1).
pub const ROOT_TOL: f64 = 1e-12;

/// Matching floating-point concurrences against class values.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Negative Heron radicands above `-HERON_CLAMP` are treated as zero.
pub const HERON_CLAMP: f64 = 1e-12;
