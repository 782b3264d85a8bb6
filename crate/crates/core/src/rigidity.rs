//! Rigidity matrices, equilibrium stresses, and stress matrices.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmat::{self, primitive_integer_vector, ratser, RatMatrix, Rational};
use crate::framework::{affine_span_dim, config_matrix, Framework};
use crate::{Error, Result};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of trivial (Euclidean) infinitesimal motions in dimension `d`.
pub fn trivial_motions(d: usize) -> usize {
    binomial(d + 1, 2)
}

/// Edge-by-coordinate matrix; column `vertex * d + k` holds coordinate `k`
/// of `vertex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityMatrix {
    pub matrix: RatMatrix,
    pub edges: Vec<(usize, usize)>,
    pub dimension: usize,
}

impl RigidityMatrix {
    pub fn column(&self, vertex: usize, coord: usize) -> usize {
        vertex * self.dimension + coord
    }
}

pub fn rigidity_matrix(framework: &Framework) -> RigidityMatrix {
    let d = framework.dimension();
    let edges = framework.edges().to_vec();
    let mut matrix = RatMatrix::zeros(edges.len(), d * framework.vertex_count());
    for (row, &(i, j)) in edges.iter().enumerate() {
        for k in 0..d {
            let diff = &framework.point(j)[k] - &framework.point(i)[k];
            matrix[(row, i * d + k)] = -diff.clone();
            matrix[(row, j * d + k)] = diff;
        }
    }
    RigidityMatrix {
        matrix,
        edges,
        dimension: d,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinitesimalRigidityReport {
    pub rigid: bool,
    pub rank: usize,
    pub expected_rank: usize,
    pub span_dim: usize,
    pub full_span: bool,
}

/// Decides infinitesimal rigidity: `rank R = d·n − C(d+1, 2)` with the
/// configuration spanning `min(d, n−1)` affine dimensions.
pub fn is_infinitesimally_rigid(framework: &Framework) -> Result<InfinitesimalRigidityReport> {
    let (n, d) = (framework.vertex_count(), framework.dimension());
    if n < d || n == 0 {
        return Err(Error::TooFewVertices { n, d });
    }
    let rank = exactmat::rank(&rigidity_matrix(framework).matrix)?;
    let expected_rank = d * n - trivial_motions(d);
    let span_dim = affine_span_dim(framework.points())?;
    let full_span = span_dim == d.min(n - 1);
    Ok(InfinitesimalRigidityReport {
        rigid: full_span && rank == expected_rank,
        rank,
        expected_rank,
        span_dim,
        full_span,
    })
}

/// Per-edge stress coefficients, in the framework's edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StressVector(#[serde(with = "ratser::vec")] pub Vec<Rational>);

impl StressVector {
    pub fn zero(edges: usize) -> Self {
        Self(vec![Rational::zero(); edges])
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

/// Symmetric graph-supported matrix with `Ω·1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StressMatrix(pub RatMatrix);

impl StressMatrix {
    pub fn matrix(&self) -> &RatMatrix {
        &self.0
    }
}

/// Basis of the equilibrium stresses (the cokernel of `R`), each scaled to a
/// primitive integer vector whose first nonzero entry is positive.
pub fn stress_basis(framework: &Framework) -> Result<Vec<StressVector>> {
    let r = rigidity_matrix(framework);
    Ok(exactmat::cokernel_basis(&r.matrix)?
        .iter()
        .map(|v| StressVector(primitive_integer_vector(v)))
        .collect())
}

/// `Ω = Σ ω_ij (e_i − e_j)(e_i − e_j)ᵀ`, after checking `ωᵀR = 0`.
pub fn assemble_stress_matrix(
    framework: &Framework,
    stress: &StressVector,
) -> Result<StressMatrix> {
    let edges = framework.edges();
    if stress.0.len() != edges.len() {
        return Err(Error::StressLength {
            got: stress.0.len(),
            edges: edges.len(),
        });
    }
    let r = rigidity_matrix(framework);
    let residual = r.matrix.left_mul_vec(&stress.0)?;
    if !residual.iter().all(Zero::is_zero) {
        let text: Vec<String> = residual.iter().map(exactmat::format_rational).collect();
        return Err(Error::NotEquilibrium {
            residual: format!("[{}]", text.join(", ")),
        });
    }
    let n = framework.vertex_count();
    let mut omega = RatMatrix::zeros(n, n);
    for (w, &(i, j)) in stress.0.iter().zip(edges) {
        omega[(i, j)] -= w;
        omega[(j, i)] -= w;
        omega[(i, i)] += w;
        omega[(j, j)] += w;
    }
    debug_assert!({
        let ones = vec![Rational::one(); n];
        omega.mul_vec(&ones).unwrap().iter().all(Zero::is_zero)
            && omega.mul(&config_matrix(framework)).unwrap().is_zero()
    });
    Ok(StressMatrix(omega))
}

/// Edge, rank, stress, and flex counts, each computed independently.
///
/// `identity_holds` checks `m − d·n = s − f` with `f` the raw kernel
/// dimension. Subtracting the trivial motions from both sides gives the
/// rigidity-normalized form `m − (d·n − C(d+1,2)) = s − (f − C(d+1,2))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxwellAudit {
    pub m_edges: usize,
    pub n_vertices: usize,
    pub d: usize,
    pub r: usize,
    pub s: usize,
    pub f: usize,
    pub trivial_motions: usize,
    pub nontrivial_flexes: i64,
    pub identity_holds: bool,
}

pub fn maxwell_audit(framework: &Framework) -> Result<MaxwellAudit> {
    let (n, d) = (framework.vertex_count(), framework.dimension());
    if n < d || n == 0 {
        return Err(Error::TooFewVertices { n, d });
    }
    let r_mat = rigidity_matrix(framework);
    let m = framework.edges().len();
    let r = exactmat::rank(&r_mat.matrix)?;
    let s = exactmat::cokernel_basis(&r_mat.matrix)?.len();
    let f = exactmat::kernel_basis(&r_mat.matrix)?.len();
    let trivial = trivial_motions(d);
    let identity_holds = m as i64 - (d * n) as i64 == s as i64 - f as i64 && m - r == s;
    Ok(MaxwellAudit {
        m_edges: m,
        n_vertices: n,
        d,
        r,
        s,
        f,
        trivial_motions: trivial,
        nontrivial_flexes: f as i64 - trivial as i64,
        identity_holds,
    })
}

/// The `d` translation fields and `C(d, 2)` infinitesimal rotation fields,
/// as vectors in the column layout of the rigidity matrix.
pub fn trivial_flexes(framework: &Framework) -> Vec<Vec<Rational>> {
    let (n, d) = (framework.vertex_count(), framework.dimension());
    let mut fields = Vec::with_capacity(trivial_motions(d));
    for k in 0..d {
        let mut v = vec![Rational::zero(); n * d];
        for i in 0..n {
            v[i * d + k] = Rational::one();
        }
        fields.push(v);
    }
    for a in 0..d {
        for b in a + 1..d {
            let mut v = vec![Rational::zero(); n * d];
            for i in 0..n {
                let p = framework.point(i);
                v[i * d + a] = -p[b].clone();
                v[i * d + b] = p[a].clone();
            }
            fields.push(v);
        }
    }
    fields
}
