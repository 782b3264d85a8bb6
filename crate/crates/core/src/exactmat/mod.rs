//! Exact rational dense linear algebra.
//!
//! Everything in this module is computed over `Q` with arbitrary precision;
//! no floating point is used anywhere. Ranks and kernels come from a
//! fraction-free (Bareiss) echelon form, PSD decisions from symmetric
//! elimination with positive diagonal pivots, and hull queries from a small
//! exact simplex using Bland's rule.

mod elim;
mod lp;
mod psd;

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use elim::{cokernel_basis, echelon, gale_dual, kernel_basis, rank, solve_square, Echelon};
pub use lp::{
    lp_max_min_weight, LinearProgram, LpSolution, LpStatus, MaxMinWeight, MaxMinWeightStatus,
    Relation,
};
pub use psd::{psd_certify, PsdReport};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Largest row or column count accepted by the elimination routines.
pub const MAX_DIM: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix of shape {rows}x{cols} exceeds the {limit}x{limit} scale limit")]
    ScaleExceeded {
        rows: usize,
        cols: usize,
        limit: usize,
    },
    #[error("matrix is not symmetric (first mismatch at ({0}, {1}))")]
    NotSymmetric(usize, usize),
    #[error("rows have unequal lengths")]
    RaggedRows,
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("matrix is singular")]
    Singular,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub(crate) fn check_scale(rows: usize, cols: usize) -> Result<(), MatError> {
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(MatError::ScaleExceeded {
            rows,
            cols,
            limit: MAX_DIM,
        });
    }
    Ok(())
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text form: `num/den` in lowest terms, or just `num` when `den == 1`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, MatError> {
    let err = || MatError::ParseRational(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d),
        None => (trimmed, "1"),
    };
    let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
    let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Scales a rational vector to a primitive integer vector: integer entries
/// with gcd 1 and the first nonzero entry positive. The zero vector is
/// returned unchanged.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &gcd * &sign))
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MatError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatError::RaggedRows);
        }
        let nrows = rows.len();
        Ok(Self {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix with an explicit column count, so that `0 x k` shapes survive.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self, MatError> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatError::RaggedRows);
        }
        let nrows = rows.len();
        Ok(Self {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| int(x)))
                .collect(),
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[Vec<Rational>], rows: usize) -> Result<Self, MatError> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(MatError::RaggedRows);
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, MatError> {
        if self.cols != other.rows {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, MatError> {
        if self.cols != v.len() {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `vᵀ M`.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, MatError> {
        if self.rows != v.len() {
            return Err(MatError::DimensionMismatch(format!(
                "vector of length {} times {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        Ok(out)
    }

    /// `xᵀ M x` for a square matrix.
    pub fn quadratic_form(&self, x: &[Rational]) -> Result<Rational, MatError> {
        let mx = self.mul_vec(x)?;
        Ok(dot(x, &mx))
    }

    pub fn select_rows(&self, indices: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(indices.len(), self.cols);
        for (r, &i) in indices.iter().enumerate() {
            for j in 0..self.cols {
                out[(r, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                out[(r, c)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn neg(&self) -> RatMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// First `(i, j)` with `M[i][j] != M[j][i]`, if any.
    pub fn symmetry_defect(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect().is_none()
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(deserializer)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect())
            .collect::<Result<Vec<Vec<Rational>>, _>>()
            .map_err(serde::de::Error::custom)?;
        RatMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// Serde adapters for rationals in canonical `"num/den"` string form.
pub mod ratser {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        format_rational(value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let strings: Vec<String> = values.iter().map(format_rational).collect();
            strings.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            value.as_ref().map(format_rational).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod option_vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<Vec<Rational>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            value
                .as_ref()
                .map(|v| v.iter().map(format_rational).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<Rational>>, D::Error> {
            Option::<Vec<String>>::deserialize(d)?
                .map(|v| {
                    v.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .transpose()
        }
    }
}
