//! Exact integer matrix products: the linear analogue of the free-group
//! experiments. Products are kept as arbitrary-precision integers and logs
//! are only taken when a value is reported.
//!
//! Walk products follow `A_n ... A_1`: each new increment multiplies on the
//! left. (The automorphism walk multiplies on the right; see
//! `walk::abelianized_increment` for the translation.)

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> IntMatrix {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        IntMatrix { n, entries }
    }

    pub fn zero(n: usize) -> IntMatrix {
        IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<IntMatrix> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedMatrix);
        }
        Ok(IntMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Result<IntMatrix> {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.n)
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                entries.push(self.entries[i * n + j].clone());
            }
        }
        IntMatrix { n, entries }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Exact determinant (Bareiss fraction-free elimination).
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// Largest bit length among the entries.
    pub fn max_entry_bits(&self) -> u64 {
        self.entries.iter().map(|x| x.bits()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..n {
                    let (a, b) = (&self.entries[i * n + k], &other.entries[k * n + j]);
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                entries.push(acc);
            }
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn pow(&self, mut k: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same dimension");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        acc
    }
}

/// `A * B`.
pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    a.mul(b)
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({self})")
    }
}

/// Row-major literal: `[[1,1],[0,1]]`.
impl FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<IntMatrix> {
        let err = |message: &str| Error::Parse {
            position: 0,
            message: format!("matrix literal {s:?}: {message}"),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(|| err("expected [[...],...]"))?;
        let rows = inner
            .split("],[")
            .map(|row| {
                row.split(',')
                    .map(|x| BigInt::from_str(x).map_err(|_| err("bad integer")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::from_rows(rows).map_err(|_| err("matrix must be square"))
    }
}

/// Natural log of `|x|`, accurate to double precision for any size; `-inf` for zero.
pub fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.abs().to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(a + sqrt(b))` for nonnegative `a`, `b`, without overflow.
fn ln_sum_sqrt(a: &BigInt, b: &BigInt) -> f64 {
    let scale = a.bits().max(b.bits().div_ceil(2));
    let shift = scale.saturating_sub(480);
    let x = (a >> shift).to_f64().expect("scaled");
    let y = (b >> (2 * shift)).to_f64().expect("scaled").sqrt();
    let s = x + y;
    if s == 0.0 {
        return f64::NEG_INFINITY;
    }
    s.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Log of the max-absolute-row-sum operator norm (`l_inf -> l_inf`); `-inf` for zero.
pub fn log_norm(a: &IntMatrix) -> f64 {
    let best = a
        .rows()
        .map(|row| row.iter().map(|x| x.abs()).sum::<BigInt>())
        .max()
        .unwrap_or_default();
    big_ln(&best)
}

/// Log of the max-absolute-entry vector norm.
pub fn log_vec_norm(v: &[BigInt]) -> f64 {
    v.iter().map(|x| x.abs()).max().map(|m| big_ln(&m)).unwrap_or(f64::NEG_INFINITY)
}

/// Bracket on `log rho(A)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct MatrixBracket {
    pub lower: f64,
    pub upper: f64,
    /// Exact value, available in dimension <= 2.
    pub exact: Option<f64>,
}

impl MatrixBracket {
    fn exact(v: f64) -> MatrixBracket {
        MatrixBracket {
            lower: v,
            upper: v,
            exact: Some(v),
        }
    }

    pub fn scaled(&self, factor: f64) -> MatrixBracket {
        MatrixBracket {
            lower: self.lower * factor,
            upper: self.upper * factor,
            exact: self.exact.map(|v| v * factor),
        }
    }
}

/// Largest power-of-two exponent `2^j` used by the Gelfand bracket.
pub const GELFAND_STEPS: u32 = 6;

/// Log spectral radius: exact from the characteristic polynomial in
/// dimension 2, otherwise the Gelfand bracket over `A^(2^j)`, `j <= 6`.
pub fn spectral_radius(a: &IntMatrix) -> MatrixBracket {
    match a.dim() {
        1 => MatrixBracket::exact(big_ln(a.get(0, 0))),
        2 => MatrixBracket::exact(log_rho_2x2(a)),
        n => {
            let mut upper = f64::INFINITY;
            let mut lower = f64::NEG_INFINITY;
            let mut power = a.clone();
            let ln_n = (n as f64).ln();
            for j in 0..=GELFAND_STEPS {
                let k = (1u64 << j) as f64;
                upper = upper.min(log_norm(&power) / k);
                lower = lower.max((big_ln(&power.trace()) - ln_n) / k);
                if j < GELFAND_STEPS {
                    power = power.mul(&power).expect("same dimension");
                }
            }
            MatrixBracket {
                lower: lower.min(upper),
                upper,
                exact: None,
            }
        }
    }
}

fn log_rho_2x2(a: &IntMatrix) -> f64 {
    let t = a.trace();
    let d = a.determinant();
    let disc = &t * &t - BigInt::from(4) * &d;
    if disc.is_negative() {
        // complex pair, |eigenvalue|^2 = det
        0.5 * big_ln(&d)
    } else {
        ln_sum_sqrt(&t.abs(), &disc) - std::f64::consts::LN_2
    }
}

/// `(n, (1/n) log ||A_n ... A_1 v||)` for `n = 1..`.
pub fn vector_growth(increments: &[IntMatrix], v: &[BigInt]) -> Result<Vec<(usize, f64)>> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::InvalidArgument("vector must be nonzero".into()));
    }
    let mut cur = v.to_vec();
    let mut out = Vec::with_capacity(increments.len());
    for (i, a) in increments.iter().enumerate() {
        cur = a.mul_vec(&cur)?;
        let n = i + 1;
        out.push((n, log_vec_norm(&cur) / n as f64));
    }
    Ok(out)
}

/// One step of the Guivarc'h/Furstenberg-Kesten comparison, already divided by `n`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GuivarchRecord {
    pub n: usize,
    pub spectral: MatrixBracket,
    pub norm: f64,
}

/// Incrementally maintained product `A_n ... A_1`.
#[derive(Clone, Debug)]
pub struct MatrixProduct {
    product: IntMatrix,
    n: usize,
    bit_budget: u64,
}

impl MatrixProduct {
    pub fn new(dim: usize, bit_budget: u64) -> MatrixProduct {
        MatrixProduct {
            product: IntMatrix::identity(dim),
            n: 0,
            bit_budget,
        }
    }

    /// Left-multiplies by the next increment.
    pub fn push(&mut self, a: &IntMatrix) -> Result<()> {
        let next = a.mul(&self.product)?;
        if next.max_entry_bits() > self.bit_budget {
            return Err(Error::BitBudgetExceeded {
                budget: self.bit_budget,
            });
        }
        self.product = next;
        self.n += 1;
        Ok(())
    }

    pub fn product(&self) -> &IntMatrix {
        &self.product
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn record(&self) -> GuivarchRecord {
        let inv_n = 1.0 / self.n.max(1) as f64;
        GuivarchRecord {
            n: self.n,
            spectral: spectral_radius(&self.product).scaled(inv_n),
            norm: log_norm(&self.product) * inv_n,
        }
    }
}

/// Default entry bit-size guard.
pub const DEFAULT_BIT_BUDGET: u64 = 1_000_000;

/// Per-`n` spectral bracket and norm of `A_n ... A_1`, both divided by `n`.
pub fn guivarch_series(increments: &[IntMatrix], bit_budget: u64) -> Result<Vec<GuivarchRecord>> {
    let dim = increments.first().map(IntMatrix::dim).unwrap_or(1);
    let mut product = MatrixProduct::new(dim, bit_budget);
    let mut out = Vec::with_capacity(increments.len());
    for a in increments {
        product.push(a)?;
        out.push(product.record());
    }
    Ok(out)
}
