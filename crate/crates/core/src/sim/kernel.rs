//! In-place gate kernels on flat amplitude buffers.
//!
//! Gates are addressed by bit position in the flat index, which lets the same
//! kernels drive both pure states and vectorized density matrices.

use num_complex::Complex64;

use super::gates::{Mat2, Monomial4};

/// Inserts a zero bit at position `bit`, shifting higher bits up.
#[inline]
pub(crate) fn insert_zero_bit(x: usize, bit: usize) -> usize {
    let low = x & ((1 << bit) - 1);
    ((x >> bit) << (bit + 1)) | low
}

pub(crate) fn apply_1q(amps: &mut [Complex64], bit: usize, m: &Mat2) {
    let stride = 1usize << bit;
    let [[m00, m01], [m10, m11]] = *m;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a, *b);
            *a = m00 * x0 + m01 * x1;
            *b = m10 * x0 + m11 * x1;
        }
    }
}

/// Applies a monomial two-wire gate. `bit_first` is the matrix's most
/// significant wire.
pub(crate) fn apply_2q_monomial(amps: &mut [Complex64], bit_first: usize, bit_second: usize, m: &Monomial4) {
    debug_assert_ne!(bit_first, bit_second);
    let (lo_bit, hi_bit) = if bit_first < bit_second {
        (bit_first, bit_second)
    } else {
        (bit_second, bit_first)
    };
    let f = 1usize << bit_first;
    let s = 1usize << bit_second;
    let offsets = [0, s, f, f | s];
    let diagonal = m.src == [0, 1, 2, 3];
    for k in 0..amps.len() >> 2 {
        let base = insert_zero_bit(insert_zero_bit(k, lo_bit), hi_bit);
        if diagonal {
            for r in 0..4 {
                amps[base | offsets[r]] *= m.phase[r];
            }
        } else {
            let old = offsets.map(|o| amps[base | o]);
            for r in 0..4 {
                amps[base | offsets[r]] = m.phase[r] * old[m.src[r]];
            }
        }
    }
}

pub(crate) fn conj2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

pub(crate) fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
