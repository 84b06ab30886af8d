//! Dense 4×4 reference simulation with Gaussian-integer entries.
//!
//! Projectors `(𝟙 ± P)/2` are applied without the factor 1/2, so every
//! intermediate matrix has Gaussian-integer entries and the final weight is
//! an exact dyadic rational.

use num_complex::Complex;

use super::TraceItem;
use crate::observables::Pauli;

pub type Matrix4 = [[Complex<i64>; 4]; 4];

const ZERO: Complex<i64> = Complex { re: 0, im: 0 };
const ONE: Complex<i64> = Complex { re: 1, im: 0 };

fn single_qubit(letter: char) -> [[Complex<i64>; 2]; 2] {
    let c = |re, im| Complex::new(re, im);
    match letter {
        'I' => [[c(1, 0), c(0, 0)], [c(0, 0), c(1, 0)]],
        'X' => [[c(0, 0), c(1, 0)], [c(1, 0), c(0, 0)]],
        'Y' => [[c(0, 0), c(0, -1)], [c(0, 1), c(0, 0)]],
        'Z' => [[c(1, 0), c(0, 0)], [c(0, 0), c(-1, 0)]],
        _ => unreachable!(),
    }
}

/// `σ_first ⊗ σ_second` as an explicit matrix.
pub fn pauli_matrix(p: Pauli) -> Matrix4 {
    let (a, b) = (single_qubit(p.letter(0)), single_qubit(p.letter(1)));
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    m
}

pub fn identity() -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

/// An exact non-negative weight `numerator / 2^denominator_log2` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicWeight {
    pub numerator: u64,
    pub denominator_log2: u32,
}

impl DyadicWeight {
    fn reduced(mut numerator: u64, mut denominator_log2: u32) -> DyadicWeight {
        if numerator == 0 {
            return DyadicWeight { numerator: 0, denominator_log2: 0 };
        }
        while denominator_log2 > 0 && numerator.is_multiple_of(2) {
            numerator /= 2;
            denominator_log2 -= 1;
        }
        DyadicWeight { numerator, denominator_log2 }
    }

    pub fn is_nonzero(&self) -> bool {
        self.numerator != 0
    }
}

/// Probability of observing `trace` in sequence on `𝟙/4`.
///
/// With `M = (𝟙 ± P_n)···(𝟙 ± P_1)` the weight is `tr(M M†) / 4^(n+1)`.
/// Entries of `M` stay below `2^n` in modulus, so `i64` is ample for the
/// trace lengths used here (up to about 28 steps).
pub fn dense_oracle_check(trace: &[TraceItem]) -> DyadicWeight {
    let mut m = identity();
    for &(p, outcome) in trace {
        let mut proj = pauli_matrix(p);
        for (i, row) in proj.iter_mut().enumerate() {
            for entry in row.iter_mut() {
                *entry *= outcome.as_i32() as i64;
            }
            row[i] += ONE;
        }
        m = matmul(&proj, &m);
    }
    let total: i64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    DyadicWeight::reduced(total as u64, 2 * (trace.len() as u32 + 1))
}
