//! Small finite fields and exact linear algebra over them.

#![allow(clippy::suspicious_arithmetic_impl, clippy::needless_range_loop)]

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

pub trait FiniteField:
    Copy + Eq + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Send + Sync + 'static
{
    const ORDER: usize;
    const ZERO: Self;
    const ONE: Self;
    /// Reduction polynomial, for reports.
    const POLY_LABEL: &'static str;

    /// The element with index `i` in `0..ORDER`; index 0 is zero.
    fn from_index(i: usize) -> Self;

    fn inv(self) -> Option<Self>;
}

/// Reduction polynomial x^8 + x^4 + x^3 + x + 1.
pub const GF256_POLY: u16 = 0x11B;
/// Generator used to build the log/antilog tables.
pub const GF256_GENERATOR: u8 = 0x03;

const fn mul_shift_reduce(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= (GF256_POLY & 0xFF) as u8;
        }
        b >>= 1;
    }
    acc
}

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x = 1u8;
    let mut i = 0;
    while i < 255 {
        exp[i] = x;
        log[x as usize] = i as u8;
        x = mul_shift_reduce(x, GF256_GENERATOR);
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

/// Element of GF(2^8) in polynomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf256(pub u8);

impl Add for Gf256 {
    type Output = Gf256;
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Sub for Gf256 {
    type Output = Gf256;
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    fn mul(self, rhs: Gf256) -> Gf256 {
        gf_mul(self, rhs)
    }
}

pub fn gf_mul(a: Gf256, b: Gf256) -> Gf256 {
    if a.0 == 0 || b.0 == 0 {
        return Gf256(0);
    }
    let l = TABLES.log[a.0 as usize] as usize + TABLES.log[b.0 as usize] as usize;
    Gf256(TABLES.exp[l])
}

impl FiniteField for Gf256 {
    const ORDER: usize = 256;
    const ZERO: Self = Gf256(0);
    const ONE: Self = Gf256(1);
    const POLY_LABEL: &'static str = "0x11B";

    fn from_index(i: usize) -> Self {
        Gf256(i as u8)
    }

    fn inv(self) -> Option<Self> {
        (self.0 != 0).then(|| Gf256(TABLES.exp[255 - TABLES.log[self.0 as usize] as usize]))
    }
}

/// The two-element field; addition is XOR, multiplication AND.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf2(pub bool);

impl Add for Gf2 {
    type Output = Gf2;
    fn add(self, rhs: Gf2) -> Gf2 {
        Gf2(self.0 ^ rhs.0)
    }
}

impl Sub for Gf2 {
    type Output = Gf2;
    fn sub(self, rhs: Gf2) -> Gf2 {
        Gf2(self.0 ^ rhs.0)
    }
}

impl Mul for Gf2 {
    type Output = Gf2;
    fn mul(self, rhs: Gf2) -> Gf2 {
        Gf2(self.0 & rhs.0)
    }
}

impl FiniteField for Gf2 {
    const ORDER: usize = 2;
    const ZERO: Self = Gf2(false);
    const ONE: Self = Gf2(true);
    const POLY_LABEL: &'static str = "0x3";

    fn from_index(i: usize) -> Self {
        Gf2(i == 1)
    }

    fn inv(self) -> Option<Self> {
        self.0.then_some(self)
    }
}

/// Reduces `rows` in place to row echelon form and returns the rank.
pub fn rank<F: FiniteField>(rows: &mut [Vec<F>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != F::ZERO) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inv().expect("pivot is nonzero");
        for c in col..cols {
            rows[rank][c] = rows[rank][c] * inv;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != F::ZERO {
                let factor = rows[r][col];
                for c in col..cols {
                    let sub = factor * rows[rank][c];
                    rows[r][c] = rows[r][c] - sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves the square system `matrix * x = rhs`; `None` when singular.
pub fn solve<F: FiniteField>(matrix: &[Vec<F>], rhs: &[F]) -> Option<Vec<F>> {
    let n = matrix.len();
    let mut aug: Vec<Vec<F>> =
        matrix.iter().zip(rhs).map(|(row, &b)| row.iter().copied().chain(std::iter::once(b)).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| aug[r][col] != F::ZERO)?;
        aug.swap(col, pivot);
        let inv = aug[col][col].inv()?;
        for c in col..=n {
            aug[col][c] = aug[col][c] * inv;
        }
        for r in 0..n {
            if r != col && aug[r][col] != F::ZERO {
                let factor = aug[r][col];
                for c in col..=n {
                    let sub = factor * aug[col][c];
                    aug[r][c] = aug[r][c] - sub;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n]).collect())
}
