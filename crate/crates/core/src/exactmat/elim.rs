use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{check_scale, MatError, RatMatrix, Rational};

/// Row echelon form over the integers, produced by Bareiss elimination.
///
/// Each row of the input is first cleared of denominators (row scaling does
/// not change the row space). Entries of `rows` are minors of that scaled
/// matrix, so they stay bounded by Hadamard's inequality.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    /// Original row index of each echelon row.
    pub row_order: Vec<usize>,
    /// The first `rank` rows of the echelon form.
    pub rows: Vec<Vec<BigInt>>,
    pub cols: usize,
}

fn integer_rows(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * &lcm).to_integer()).collect()
        })
        .collect()
}

pub fn echelon(m: &RatMatrix) -> Result<Echelon, MatError> {
    check_scale(m.rows(), m.cols())?;
    let mut a = integer_rows(m);
    let mut order: Vec<usize> = (0..m.rows()).collect();
    let (nrows, ncols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivot_cols = Vec::new();

    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        order.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[c];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let value = pivot * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&value % &prev).is_zero(), "Bareiss division not exact");
                row[j] = value / &prev;
            }
        }
        prev = a[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }

    a.truncate(r);
    Ok(Echelon {
        rank: r,
        pivot_cols,
        row_order: order,
        rows: a,
        cols: ncols,
    })
}

pub fn rank(m: &RatMatrix) -> Result<usize, MatError> {
    Ok(echelon(m)?.rank)
}

/// Reduced row echelon rows (pivots normalized to 1) from a Bareiss echelon.
fn reduced_rows(e: &Echelon) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = e
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    for k in (0..e.rank).rev() {
        let pc = e.pivot_cols[k];
        let inv = rows[k][pc].recip();
        for x in rows[k].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[k].clone();
        for row in rows.iter_mut().take(k) {
            let factor = row[pc].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
    }
    rows
}

/// Basis of the right kernel `{v : M v = 0}`, one vector per free column in
/// ascending column order, with a 1 in that free column.
pub fn kernel_basis(m: &RatMatrix) -> Result<Vec<Vec<Rational>>, MatError> {
    let e = echelon(m)?;
    let rref = reduced_rows(&e);
    let mut is_pivot = vec![false; e.cols];
    for &c in &e.pivot_cols {
        is_pivot[c] = true;
    }
    let basis = (0..e.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); e.cols];
            v[f] = Rational::one();
            for (k, &pc) in e.pivot_cols.iter().enumerate() {
                v[pc] = -rref[k][f].clone();
            }
            v
        })
        .collect();
    Ok(basis)
}

/// Basis of the left kernel `{v : vᵀ M = 0}`.
pub fn cokernel_basis(m: &RatMatrix) -> Result<Vec<Vec<Rational>>, MatError> {
    kernel_basis(&m.transpose())
}

/// Gale dual of a vector configuration given as the rows of `p_hat`:
/// an `n × (n − rank)` matrix `Γ` with `Γᵀ P̂ = 0` and full column rank.
pub fn gale_dual(p_hat: &RatMatrix) -> Result<RatMatrix, MatError> {
    if p_hat.rows() < p_hat.cols() {
        return Err(MatError::Precondition(format!(
            "Gale dual needs at least as many vectors as coordinates, got {}x{}",
            p_hat.rows(),
            p_hat.cols()
        )));
    }
    let basis = cokernel_basis(p_hat)?;
    RatMatrix::from_columns(&basis, p_hat.rows())
}

/// Solves `A x = b` for square nonsingular `A` by Gauss-Jordan elimination.
pub fn solve_square(a: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>, MatError> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(MatError::DimensionMismatch(format!(
            "solve with {}x{} system and rhs of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    check_scale(n, n)?;
    let mut aug: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !aug[i][c].is_zero())
            .ok_or(MatError::Singular)?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for x in aug[c].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = aug[c].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    Ok(aug.into_iter().map(|mut row| row.pop().unwrap()).collect())
}
