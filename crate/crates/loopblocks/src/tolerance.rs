//! Numerical tolerances shared by the library and its tests.

/// Distance from an integer allowed when a float result is rounded to a count.
pub const INTEGER_ROUNDING: f64 = 1e-6;

/// Character-table row orthogonality.
pub const ORTHOGONALITY: f64 = 1e-9;

/// Column orthogonality of character tables.
pub const COLUMN_ORTHOGONALITY: f64 = 1e-8;

/// Symmetry and unitarity of the S matrix.
pub const S_MATRIX: f64 = 1e-9;

/// The inverted-argument S-matrix inner product.
pub const S_INVERTED_PRODUCT: f64 = 1e-8;

/// Entanglement-entropy identities.
pub const ENTROPY: f64 = 1e-12;

/// Rounds `x` to the nearest integer if it is within [`INTEGER_ROUNDING`].
pub fn round_to_integer(x: f64) -> Option<i128> {
    let r = x.round();
    if (x - r).abs() <= INTEGER_ROUNDING && r.abs() < 9.0e15 {
        Some(r as i128)
    } else {
        None
    }
}
