//! Matrix exponential via scaling-and-squaring with a Padé(13) kernel.
//!
//! Order 13 is used unconditionally; with the tiny matrices handled here the
//! cost of skipping the lower-order branches is irrelevant and the code path
//! stays unique and deterministic.

use super::{re, ComplexMatrix};
use crate::error::Result;

// Padé(13) numerator coefficients b_0..b_13 (denominator uses alternating
// signs of the same set).
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the unscaled Padé(13) approximant stays below
// unit roundoff (Higham's theta_13).
const THETA_13: f64 = 5.371920351148152;

/// Computes `exp(M)` for a square complex matrix.
///
/// Relative accuracy is at the 1e-13 level for `|M| <= 10`, comfortably
/// inside the 1e-12 contract used by the propagation layers.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.require_square("expm")?;
    let n = m.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if n == 1 {
        let mut out = ComplexMatrix::zeros(1, 1);
        out[(0, 0)] = m[(0, 0)].exp();
        return Ok(out);
    }

    let norm = m.norm_one();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.scale(re(0.5f64.powi(squarings as i32)));

    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

fn pade13(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let w1 = &(&a6.scale(re(B[13])) + &a4.scale(re(B[11]))) + &a2.scale(re(B[9]));
    let w2 = &(&(&w1 * &a6) + &a6.scale(re(B[7])))
        + &(&(&a4.scale(re(B[5])) + &a2.scale(re(B[3]))) + &id.scale(re(B[1])));
    let u = a * &w2;

    let v1 = &(&a6.scale(re(B[12])) + &a4.scale(re(B[10]))) + &a2.scale(re(B[8]));
    let v = &(&(&v1 * &a6) + &a6.scale(re(B[6])))
        + &(&(&a4.scale(re(B[4])) + &a2.scale(re(B[2]))) + &id.scale(re(B[0])));

    // exp(A) ~ (V - U)^{-1} (V + U); V - U is far from singular inside theta_13.
    let num = &v + &u;
    let den = &v - &u;
    super::solve(&den, &num).expect("Pade denominator is nonsingular inside the theta bound")
}

/// Truncated Taylor series, used as an independent oracle in tests.
#[cfg(test)]
pub fn expm_taylor(m: &ComplexMatrix, terms: usize) -> ComplexMatrix {
    let n = m.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=terms {
        term = &term * m;
        term = term.scale(re(1.0 / k as f64));
        sum = &sum + &term;
    }
    sum
}
