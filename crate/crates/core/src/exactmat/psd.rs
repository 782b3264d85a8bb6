use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{check_scale, ratser, solve_square, MatError, RatMatrix, Rational};

/// Outcome of an exact positive-semidefiniteness check.
///
/// When `is_psd` holds, `pivot_values` are the strictly positive pivots of a
/// symmetric elimination in `pivot_permutation` order and their count is the
/// rank. Otherwise `failure_witness` is a vector `x` with `xᵀ S x =
/// witness_value < 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_psd: bool,
    pub rank: usize,
    pub pivot_permutation: Vec<usize>,
    #[serde(with = "ratser::vec")]
    pub pivot_values: Vec<Rational>,
    #[serde(with = "ratser::option_vec")]
    pub failure_witness: Option<Vec<Rational>>,
    #[serde(with = "ratser::option")]
    pub witness_value: Option<Rational>,
}

/// Decides whether a symmetric matrix is positive semidefinite.
///
/// Pivots only on strictly positive diagonal entries of the remaining Schur
/// complement, always taking the lowest such index. The procedure stops when
/// the remaining block has a negative diagonal entry, or a zero diagonal with
/// a nonzero off-diagonal entry (a PSD matrix with a zero diagonal entry has a
/// zero row). In both cases a witness is lifted back to the original
/// coordinates and its quadratic form is evaluated on the input.
pub fn psd_certify(s: &RatMatrix) -> Result<PsdReport, MatError> {
    check_scale(s.rows(), s.cols())?;
    if let Some((i, j)) = s.symmetry_defect() {
        return Err(MatError::NotSymmetric(i, j));
    }
    let n = s.rows();
    let mut schur = s.clone();
    let mut active = vec![true; n];
    let mut pivots = Vec::new();
    let mut pivot_values = Vec::new();

    loop {
        let positive = (0..n).find(|&i| active[i] && schur[(i, i)].is_positive());
        let Some(p) = positive else {
            break;
        };
        let pivot = schur[(p, p)].clone();
        active[p] = false;
        let rest: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        for &i in &rest {
            if schur[(i, p)].is_zero() {
                continue;
            }
            let factor = &schur[(i, p)] / &pivot;
            for &j in &rest {
                if !schur[(p, j)].is_zero() {
                    let delta = &factor * &schur[(p, j)];
                    schur[(i, j)] -= delta;
                }
            }
        }
        pivots.push(p);
        pivot_values.push(pivot);
    }

    let rest: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    let mut residual = vec![Rational::zero(); n];
    if let Some(&i) = rest.iter().find(|&&i| schur[(i, i)].is_negative()) {
        residual[i] = Rational::from_integer(1.into());
    } else {
        let off_diagonal = rest.iter().enumerate().find_map(|(a, &i)| {
            rest[a + 1..]
                .iter()
                .find(|&&j| !schur[(i, j)].is_zero())
                .map(|&j| (i, j))
        });
        let Some((i, j)) = off_diagonal else {
            return Ok(PsdReport {
                is_psd: true,
                rank: pivots.len(),
                pivot_permutation: pivots,
                pivot_values,
                failure_witness: None,
                witness_value: None,
            });
        };
        residual[i] = Rational::from_integer(1.into());
        residual[j] = if schur[(i, j)].is_positive() {
            Rational::from_integer((-1).into())
        } else {
            Rational::from_integer(1.into())
        };
    }

    // Lift: choose the pivot coordinates z so that x = (z, y) annihilates the
    // eliminated rows, which makes xᵀ S x equal the Schur complement value.
    let witness = lift_witness(s, &pivots, &rest, &residual)?;
    let value = s.quadratic_form(&witness)?;
    debug_assert!(value.is_negative());
    Ok(PsdReport {
        is_psd: false,
        rank: pivots.len(),
        pivot_permutation: pivots,
        pivot_values,
        failure_witness: Some(witness),
        witness_value: Some(value),
    })
}

fn lift_witness(
    s: &RatMatrix,
    pivots: &[usize],
    rest: &[usize],
    residual: &[Rational],
) -> Result<Vec<Rational>, MatError> {
    let mut x = residual.to_vec();
    if pivots.is_empty() {
        return Ok(x);
    }
    let a = s.submatrix(pivots, pivots);
    let rhs: Vec<Rational> = pivots
        .iter()
        .map(|&p| {
            -rest
                .iter()
                .fold(Rational::zero(), |acc, &r| acc + &s[(p, r)] * &residual[r])
        })
        .collect();
    let z = solve_square(&a, &rhs)?;
    for (&p, zp) in pivots.iter().zip(z) {
        x[p] = zp;
    }
    Ok(x)
}
