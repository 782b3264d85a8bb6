//! The degree-2 Veronese map `x ↦ x̂x̂ᵀ` and the quadric-separation oracles
//! built on it.
//!
//! Symmetric matrices are kept as matrices. Where a coordinate vector is
//! needed we use the upper triangle in row-major order, and the trace inner
//! product is applied explicitly (off-diagonal terms counted twice) so no
//! irrational basis scaling ever appears.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmat::{
    self, lp_max_min_weight, ratser, LinearProgram, LpStatus, MaxMinWeightStatus, RatMatrix,
    Rational, Relation,
};
use crate::framework::{edge_directions, Framework, FrameworkError};
use crate::{Error, Result};

/// `x̂x̂ᵀ` for `x̂ = (x, 1)`: symmetric, rank one, bottom-right entry 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VeronesePoint(RatMatrix);

impl VeronesePoint {
    pub fn matrix(&self) -> &RatMatrix {
        &self.0
    }

    /// Upper-triangle entries, row-major, including the constant corner.
    pub fn coords(&self) -> Vec<Rational> {
        symmetric_coords(&self.0)
    }

    /// Coordinates in the affine chart: the upper triangle without the corner.
    pub fn affine_coords(&self) -> Vec<Rational> {
        let mut c = self.coords();
        c.pop();
        c
    }
}

pub fn veronese(x: &[Rational]) -> VeronesePoint {
    let mut hat = x.to_vec();
    hat.push(Rational::one());
    let k = hat.len();
    let mut m = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = &hat[i] * &hat[j];
        }
    }
    VeronesePoint(m)
}

/// Upper triangle of a square matrix, row-major.
pub fn symmetric_coords(m: &RatMatrix) -> Vec<Rational> {
    let k = m.rows();
    (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].clone())
        .collect()
}

/// Weights turning upper-triangle coordinates into the trace inner product.
fn trace_weights(k: usize) -> Vec<Rational> {
    (0..k)
        .flat_map(|i| (i..k).map(move |j| if i == j { 1 } else { 2 }))
        .map(exactmat::int)
        .collect()
}

fn symmetric_from_coords(coords: &[Rational], k: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(k, k);
    let mut it = coords.iter();
    for i in 0..k {
        for j in i..k {
            let x = it.next().expect("coordinate count").clone();
            m[(i, j)] = x.clone();
            m[(j, i)] = x;
        }
    }
    m
}

/// `⟨X, Y⟩ = Tr(XY) = Σ X_ij Y_ij` for symmetric `X`, `Y`.
pub fn trace_inner(x: &RatMatrix, y: &RatMatrix) -> Result<Rational> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(exactmat::MatError::DimensionMismatch(format!(
            "trace inner product of {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        ))
        .into());
    }
    let mut acc = Rational::zero();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            acc += &x[(i, j)] * &y[(i, j)];
        }
    }
    Ok(acc)
}

/// Affine dimension of the Veronese images of a nonempty point set.
pub fn veronese_affine_span_dim<P: AsRef<[Rational]>>(points: &[P]) -> Result<usize> {
    let first = points.first().ok_or(FrameworkError::EmptyPointSet)?;
    let base = veronese(first.as_ref()).affine_coords();
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| {
            veronese(p.as_ref())
                .affine_coords()
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    if diffs.is_empty() {
        return Ok(0);
    }
    let width = base.len();
    Ok(exactmat::rank(&RatMatrix::from_rows_with_cols(
        diffs, width,
    )?)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicReport {
    pub conic_exists: bool,
    pub direction_veronese_rank: usize,
    pub max_rank: usize,
    /// Nonzero symmetric `d × d` matrix `Q` with `eᵀQe = 0` for every edge direction.
    pub witness_conic: Option<RatMatrix>,
}

/// Decides whether the edge directions lie on a conic at infinity, i.e. a
/// nonzero quadratic form vanishes on all of them.
pub fn conic_at_infinity(framework: &Framework) -> Result<ConicReport> {
    if framework.edges().is_empty() {
        return Err(Error::NoEdges);
    }
    let d = framework.dimension();
    let weights = trace_weights(d);
    let rows: Vec<Vec<Rational>> = edge_directions(framework)
        .iter()
        .map(|e| {
            (0..d)
                .flat_map(|i| (i..d).map(move |j| (i, j)))
                .zip(&weights)
                .map(|((i, j), w)| w * &e[i] * &e[j])
                .collect()
        })
        .collect();
    let max_rank = weights.len();
    let system = RatMatrix::from_rows_with_cols(rows, max_rank)?;
    let rank = exactmat::rank(&system)?;
    let witness_conic = exactmat::kernel_basis(&system)?
        .first()
        .map(|q| symmetric_from_coords(q, d));
    Ok(ConicReport {
        conic_exists: rank < max_rank,
        direction_veronese_rank: rank,
        max_rank,
        witness_conic,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HullStatus {
    RelativeInteriorIntersect,
    DisjointStrictlySeparable,
    BoundaryInconclusive,
}

/// How `conv V(p)` and `conv V(q)` meet.
///
/// For an interior intersection the weights are all at least `t_star > 0`
/// and reproduce `common_point` from both sides. For strict separation,
/// `separating_quadric` is a symmetric `(d+1) × (d+1)` matrix `Q` with
/// `x̂ᵀQx̂ ≤ −1` on every `p` and `≥ 1` on every `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullIntersectionReport {
    pub status: HullStatus,
    #[serde(with = "ratser::option")]
    pub t_star: Option<Rational>,
    #[serde(with = "ratser::option_vec")]
    pub weights_p: Option<Vec<Rational>>,
    #[serde(with = "ratser::option_vec")]
    pub weights_q: Option<Vec<Rational>>,
    pub common_point: Option<RatMatrix>,
    pub separating_quadric: Option<RatMatrix>,
}

fn combination(points: &[VeronesePoint], weights: &[Rational]) -> RatMatrix {
    let k = points[0].matrix().rows();
    let mut acc = RatMatrix::zeros(k, k);
    for (v, w) in points.iter().zip(weights) {
        for i in 0..k {
            for j in 0..k {
                acc[(i, j)] += w * &v.matrix()[(i, j)];
            }
        }
    }
    acc
}

pub fn hull_relation(
    p: &[Vec<Rational>],
    q: &[Vec<Rational>],
    d: usize,
) -> Result<HullIntersectionReport> {
    if p.is_empty() || q.is_empty() {
        return Err(FrameworkError::EmptyPointSet.into());
    }
    if let Some(x) = p.iter().chain(q).find(|x| x.len() != d) {
        return Err(FrameworkError::PointDimension {
            vertex: 0,
            got: x.len(),
            dimension: d,
        }
        .into());
    }
    let vp: Vec<VeronesePoint> = p.iter().map(|x| veronese(x)).collect();
    let vq: Vec<VeronesePoint> = q.iter().map(|x| veronese(x)).collect();
    let (np, nq) = (p.len(), q.len());
    let chart = vp[0].affine_coords().len();

    let mut rows: Vec<Vec<Rational>> = vec![Vec::with_capacity(np + nq); chart];
    for v in &vp {
        for (row, c) in rows.iter_mut().zip(v.affine_coords()) {
            row.push(c);
        }
    }
    for v in &vq {
        for (row, c) in rows.iter_mut().zip(v.affine_coords()) {
            row.push(-c);
        }
    }
    let mut conv_p = vec![Rational::one(); np];
    conv_p.extend(vec![Rational::zero(); nq]);
    let mut conv_q = vec![Rational::zero(); np];
    conv_q.extend(vec![Rational::one(); nq]);
    rows.push(conv_p);
    rows.push(conv_q);
    let mut b = vec![Rational::zero(); chart];
    b.extend([Rational::one(), Rational::one()]);
    let a = RatMatrix::from_rows_with_cols(rows, np + nq)?;

    let interior = lp_max_min_weight(&a, &b)?;
    if interior.status == MaxMinWeightStatus::Optimal {
        let t = interior.t_star.expect("optimal t");
        let mut weights = interior.weights.expect("optimal weights");
        let weights_q = weights.split_off(np);
        let from_p = combination(&vp, &weights);
        let from_q = combination(&vq, &weights_q);
        let sums_ok = weights.iter().fold(Rational::zero(), |s, w| s + w).is_one()
            && weights_q
                .iter()
                .fold(Rational::zero(), |s, w| s + w)
                .is_one();
        if from_p != from_q || !sums_ok || weights.iter().chain(&weights_q).any(|w| *w < t) {
            return Err(Error::Internal(
                "hull LP returned an invalid common point".into(),
            ));
        }
        let status = if t.is_positive() {
            HullStatus::RelativeInteriorIntersect
        } else {
            HullStatus::BoundaryInconclusive
        };
        return Ok(HullIntersectionReport {
            status,
            t_star: Some(t),
            weights_p: Some(weights),
            weights_q: Some(weights_q),
            common_point: Some(from_p),
            separating_quadric: None,
        });
    }

    let k = d + 1;
    let weights = trace_weights(k);
    let nvars = weights.len();
    let mut lp = LinearProgram::new(nvars);
    for j in 0..nvars {
        lp.set_free(j);
    }
    let weighted = |v: &VeronesePoint| -> Vec<Rational> {
        v.coords()
            .iter()
            .zip(&weights)
            .map(|(c, w)| c * w)
            .collect()
    };
    for v in &vp {
        lp.add_constraint(weighted(v), Relation::Le, -Rational::one())?;
    }
    for v in &vq {
        lp.add_constraint(weighted(v), Relation::Ge, Rational::one())?;
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Ok(HullIntersectionReport {
            status: HullStatus::BoundaryInconclusive,
            t_star: None,
            weights_p: None,
            weights_q: None,
            common_point: None,
            separating_quadric: None,
        });
    }
    let quadric = symmetric_from_coords(&sol.x.expect("feasible point"), k);
    for v in &vp {
        if trace_inner(v.matrix(), &quadric)? > -Rational::one() {
            return Err(Error::Internal("separating quadric fails on p".into()));
        }
    }
    for v in &vq {
        if trace_inner(v.matrix(), &quadric)? < Rational::one() {
            return Err(Error::Internal("separating quadric fails on q".into()));
        }
    }
    Ok(HullIntersectionReport {
        status: HullStatus::DisjointStrictlySeparable,
        t_star: None,
        weights_p: None,
        weights_q: None,
        common_point: None,
        separating_quadric: Some(quadric),
    })
}

/// Evaluates the quadric `x̂ᵀQx̂`.
pub fn evaluate_quadric(quadric: &RatMatrix, x: &[Rational]) -> Result<Rational> {
    let mut hat = x.to_vec();
    hat.push(Rational::one());
    Ok(quadric.quadratic_form(&hat)?)
}
