//! Mixed-radix indexing over qudit basis states.
//!
//! The first qudit is the most significant digit, so for dims `[3, 2]` the
//! basis `|2⟩|0⟩` sits at index 4 of the 6-vector.

use crate::error::{Error, Result};

/// Checks that every dimension is at least 2.
pub fn check_dims(dims: &[usize]) -> Result<()> {
    if let Some((i, d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
        return Err(Error::InvalidDims(format!("qudit {i} has dimension {d} (< 2)")));
    }
    Ok(())
}

/// Product of all dimensions, `None` on overflow.
pub fn total_dim(dims: &[usize]) -> Option<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

/// `strides[i] = Π_{j>i} dims[j]`. Panics on overflow; callers check
/// [`total_dim`] first.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * dims[i + 1];
    }
    out
}

pub fn radix_index(digits: &[usize], dims: &[usize]) -> Result<usize> {
    if digits.len() != dims.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), found: digits.len() });
    }
    let mut index = 0usize;
    for (qudit, (&digit, &dim)) in digits.iter().zip(dims).enumerate() {
        if digit >= dim {
            return Err(Error::DigitOutOfRange { qudit, digit, dim });
        }
        index = index
            .checked_mul(dim)
            .and_then(|v| v.checked_add(digit))
            .ok_or(Error::DimensionOverflow)?;
    }
    Ok(index)
}

/// Inverse of [`radix_index`]. `index` is reduced modulo the total dimension.
pub fn index_to_digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

/// Formats digits the way counts keys and state dumps print them: `2,0,1`.
pub fn format_digits(digits: &[usize]) -> String {
    let mut s = String::with_capacity(digits.len() * 2);
    for (i, d) in digits.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&d.to_string());
    }
    s
}
