//! Realizations of `K_{m,n}`: the alternating moment-curve core, vertex
//! trilateration, and the full builder with its audit.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{certify_superstable, SuperStabilityCertificate};
use crate::exactmat::{self, ratser, Rational};
use crate::framework::{
    affine_span_dim, is_general_position, BipartitePartition, Configuration, Framework, Graph,
};
use crate::rigidity::{binomial, is_infinitesimally_rigid, stress_basis};
use crate::veronese::veronese_affine_span_dim;
use crate::{Error, Result};

pub const DEFAULT_RETRY_BUDGET: usize = 16;

/// Affine dimension `D = C(d+2, 2) − 1` of the Veronese chart.
pub fn veronese_dim(d: usize) -> usize {
    binomial(d + 2, 2) - 1
}

/// `(t, t², …, t^d)`.
pub fn moment_curve(t: &Rational, d: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(d);
    let mut power = Rational::one();
    for _ in 0..d {
        power *= t;
        out.push(power.clone());
    }
    out
}

/// Interleaved curve parameters `s₁ < t₁ < s₂ < … < s_{d+1} < t_{d+1}`:
/// even positions place part U, odd positions part V.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreSpec {
    pub dimension: usize,
    #[serde(with = "ratser::vec")]
    pub parameters: Vec<Rational>,
}

impl CoreSpec {
    pub fn new(dimension: usize, parameters: Vec<Rational>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidCoreSpec(
                "dimension must be at least 1".into(),
            ));
        }
        if parameters.len() != 2 * (dimension + 1) {
            return Err(Error::InvalidCoreSpec(format!(
                "need {} parameters, got {}",
                2 * (dimension + 1),
                parameters.len()
            )));
        }
        if let Some(w) = parameters.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCoreSpec(format!(
                "parameters must strictly increase ({} >= {})",
                exactmat::format_rational(&w[0]),
                exactmat::format_rational(&w[1])
            )));
        }
        Ok(Self {
            dimension,
            parameters,
        })
    }

    /// Parameters `1, 2, …, 2d+2`, i.e. `sᵢ = 2i − 1`, `tⱼ = 2j`.
    pub fn default_for(dimension: usize) -> Result<Self> {
        Self::new(
            dimension,
            (1..=2 * (dimension as i64 + 1))
                .map(exactmat::int)
                .collect(),
        )
    }

    pub fn u_parameters(&self) -> impl Iterator<Item = &Rational> {
        self.parameters.iter().step_by(2)
    }

    pub fn v_parameters(&self) -> impl Iterator<Item = &Rational> {
        self.parameters.iter().skip(1).step_by(2)
    }
}

/// A verified core: both parts span `E^d`, the Veronese images span `2d`
/// affine dimensions, and the framework is super stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Core {
    pub spec: CoreSpec,
    pub framework: Framework,
    pub u_span_dim: usize,
    pub v_span_dim: usize,
    pub veronese_span_dim: usize,
    pub certificate: SuperStabilityCertificate,
}

/// Places the alternating points on the moment curve without checking
/// anything beyond the parameter order.
pub fn core_framework(spec: &CoreSpec) -> Result<Framework> {
    let d = spec.dimension;
    let p = spec.u_parameters().map(|t| moment_curve(t, d)).collect();
    let q = spec.v_parameters().map(|t| moment_curve(t, d)).collect();
    Ok(Framework::complete_bipartite(d, p, q)?)
}

pub fn build_core(d: usize, spec: Option<&CoreSpec>) -> Result<Core> {
    let spec = match spec {
        Some(s) if s.dimension != d => {
            return Err(Error::InvalidCoreSpec(format!(
                "core parameters are for dimension {}, requested {d}",
                s.dimension
            )))
        }
        Some(s) => s.clone(),
        None => CoreSpec::default_for(d)?,
    };
    let framework = core_framework(&spec)?;
    let (p, q) = framework.part_points().expect("bipartite core");
    let u_span_dim = affine_span_dim(&p)?;
    let v_span_dim = affine_span_dim(&q)?;
    if u_span_dim != d || v_span_dim != d {
        return Err(Error::CheckFailed(format!(
            "core parts span {u_span_dim} and {v_span_dim} dimensions, expected {d}"
        )));
    }
    let veronese_span = veronese_affine_span_dim(framework.points())?;
    if veronese_span != 2 * d {
        return Err(Error::CheckFailed(format!(
            "core Veronese span is {veronese_span}, expected {}",
            2 * d
        )));
    }
    let certificate = certify_superstable(&framework, None)?;
    if !certificate.verdict {
        return Err(Error::CheckFailed("core is not super stable".into()));
    }
    Ok(Core {
        spec,
        framework,
        u_span_dim,
        v_span_dim,
        veronese_span_dim: veronese_span,
        certificate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

/// Adds a vertex at `point` to `side`, joined to every vertex of the other
/// part. The other part must have at least `d+1` vertices affinely spanning
/// `E^d`. The canonical `U`-then-`V` vertex layout is preserved, so adding
/// to `U` shifts every `V` index up by one.
pub fn trilaterate(framework: &Framework, side: Side, point: Vec<Rational>) -> Result<Framework> {
    let partition = framework
        .partition()
        .filter(|p| p.is_canonical())
        .ok_or(Error::NotCompleteBipartite)?;
    let d = framework.dimension();
    if point.len() != d {
        return Err(crate::framework::FrameworkError::PointDimension {
            vertex: framework.vertex_count(),
            got: point.len(),
            dimension: d,
        }
        .into());
    }
    let (u, v) = (partition.u().len(), partition.v().len());
    let opposite = match side {
        Side::U => partition.v(),
        Side::V => partition.u(),
    };
    let neighbours: Vec<&Vec<Rational>> =
        opposite.iter().map(|&i| &framework.points()[i]).collect();
    if neighbours.len() < d + 1 || affine_span_dim(&neighbours)? != d {
        return Err(Error::SpanHypothesis(format!(
            "the opposite part has {} vertices spanning {} of {d} dimensions",
            neighbours.len(),
            affine_span_dim(&neighbours)?
        )));
    }

    let new_index = match side {
        Side::U => u,
        Side::V => u + v,
    };
    let shift = |x: usize| if x >= new_index { x + 1 } else { x };
    let mut edges: Vec<(usize, usize)> = framework
        .edges()
        .iter()
        .map(|&(a, b)| (shift(a), shift(b)))
        .collect();
    let mut points = framework.points().to_vec();
    points.insert(new_index, point);
    let (new_u, new_v) = match side {
        Side::U => (u + 1, v),
        Side::V => (u, v + 1),
    };
    match side {
        Side::U => edges.extend((new_u..new_u + new_v).map(|j| (new_index, j))),
        Side::V => edges.extend((0..new_u).map(|i| (i, new_index))),
    }
    let graph = Graph::new(new_u + new_v, &edges)?;
    let partition = BipartitePartition::new((0..new_u).collect(), (new_u..new_u + new_v).collect());
    Ok(Framework::new(
        graph,
        Some(partition),
        Configuration::new(d, points)?,
    )?)
}

/// Seeded stream of "generic" rational points. Each attempt draws from its
/// own ChaCha stream, indexed by `counter`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub counter: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn next_stream(&mut self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.counter);
        self.counter += 1;
        rng
    }
}

/// Integer numerator in `[−10⁶, 10⁶]` over a denominator in `[1, 10³]`.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    let num: i64 = rng.gen_range(-1_000_000..=1_000_000);
    let den: i64 = rng.gen_range(1..=1_000);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn random_point(rng: &mut impl Rng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| random_rational(rng)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HendricksonGate {
    pub passes: bool,
    pub reasons: Vec<String>,
}

/// `m, n ≥ d+1` and `m + n ≥ C(d+2, 2) + 1`.
pub fn hendrickson_gate(d: usize, m: usize, n: usize) -> HendricksonGate {
    let mut reasons = Vec::new();
    if m < d + 1 {
        reasons.push(format!("m < d+1 ({m} < {})", d + 1));
    }
    if n < d + 1 {
        reasons.push(format!("n < d+1 ({n} < {})", d + 1));
    }
    let bound = binomial(d + 2, 2) + 1;
    if m + n < bound {
        reasons.push(format!("m + n = {} < {bound}", m + n));
    }
    HendricksonGate {
        passes: reasons.is_empty(),
        reasons,
    }
}

/// The three Gale ranks behind the stress count of a complete bipartite
/// framework whose parts both span `E^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BolkerRothDim {
    pub gale_rank_u: usize,
    pub gale_rank_v: usize,
    pub gale_rank_veronese: usize,
    pub dimension: usize,
}

pub fn bolker_roth_dim(framework: &Framework) -> Result<BolkerRothDim> {
    if !framework.is_complete_bipartite() {
        return Err(Error::NotCompleteBipartite);
    }
    let d = framework.dimension();
    let (p, q) = framework.part_points().expect("partition present");
    for (name, part) in [("U", &p), ("V", &q)] {
        let span = affine_span_dim(part)?;
        if span != d {
            return Err(Error::SpanHypothesis(format!(
                "part {name} spans {span} of {d} dimensions"
            )));
        }
    }
    let gale_rank = |m: &exactmat::RatMatrix| -> Result<usize> {
        Ok(exactmat::rank(&exactmat::gale_dual(m)?)?)
    };
    let hat =
        |pts: &[Vec<Rational>]| Configuration::new(d, pts.to_vec()).map(|c| c.homogeneous_matrix());
    let gale_rank_u = gale_rank(&hat(&p)?)?;
    let gale_rank_v = gale_rank(&hat(&q)?)?;
    let lifted = exactmat::RatMatrix::from_rows(
        framework
            .points()
            .iter()
            .map(|x| crate::veronese::veronese(x).coords())
            .collect(),
    )?;
    // The Veronese vectors live in R^{D+1}; with fewer points than
    // coordinates the Gale dual is still the cokernel of that matrix.
    let gale_rank_veronese = lifted.rows() - exactmat::rank(&lifted)?;
    Ok(BolkerRothDim {
        gale_rank_u,
        gale_rank_v,
        gale_rank_veronese,
        dimension: gale_rank_u * gale_rank_v + gale_rank_veronese,
    })
}

/// Checks from the proof, recorded for a finished construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionAudit {
    pub seed: u64,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub core_superstable: bool,
    pub general_position: bool,
    pub stress_dim: usize,
    pub stress_dim_expected: usize,
    pub bolker_roth_dim: usize,
    pub rigidity_rank: usize,
    pub rigidity_rank_expected: usize,
    pub inf_rigid: bool,
    pub veronese_span_dim: usize,
    pub veronese_full_span: bool,
    pub retries_used: usize,
    /// Inherited from the super stable core through trilateration; recorded,
    /// not recomputed.
    pub universally_rigid_by_trilateration: bool,
}

impl ConstructionAudit {
    pub fn passes(&self) -> bool {
        self.core_superstable
            && self.general_position
            && self.inf_rigid
            && self.veronese_full_span
            && self.stress_dim == self.stress_dim_expected
            && self.stress_dim == self.bolker_roth_dim
            && self.rigidity_rank == self.rigidity_rank_expected
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KmnConstruction {
    pub framework: Framework,
    pub audit: ConstructionAudit,
    pub core: Core,
}

/// Expected stress dimension for generic trilateration of the core:
/// `(m−d−1)(n−d−1) + (m+n−D−1)`, which is `(m−d−1)(n−d−1) + 1` when
/// `m + n = D + 2`.
pub fn expected_stress_dim(d: usize, m: usize, n: usize) -> usize {
    (m - d - 1) * (n - d - 1) + (m + n - veronese_dim(d) - 1)
}

/// Order in which vertices are added to reach `K_{m,n}` from the core: the
/// smaller part that still needs vertices goes first, ties to U.
pub fn trilateration_order(d: usize, m: usize, n: usize) -> Vec<Side> {
    let (mut u, mut v) = (d + 1, d + 1);
    let mut order = Vec::new();
    while u < m || v < n {
        let side = match (u < m, v < n) {
            (true, true) if v < u => Side::V,
            (true, _) => Side::U,
            (false, _) => Side::V,
        };
        match side {
            Side::U => u += 1,
            Side::V => v += 1,
        }
        order.push(side);
    }
    order
}

pub fn build_kmn(d: usize, m: usize, n: usize, rng: &mut RandomSource) -> Result<KmnConstruction> {
    build_kmn_with_budget(d, m, n, rng, DEFAULT_RETRY_BUDGET)
}

/// Builds the core, then trilaterates random rational vertices until the
/// target sizes are reached. Every check is computed exactly; a failed
/// sample is discarded and redrawn, up to `budget` attempts.
pub fn build_kmn_with_budget(
    d: usize,
    m: usize,
    n: usize,
    rng: &mut RandomSource,
    budget: usize,
) -> Result<KmnConstruction> {
    let gate = hendrickson_gate(d, m, n);
    if d == 0 || !gate.passes {
        let mut reasons = gate.reasons;
        if d == 0 {
            reasons.push("d must be at least 1".into());
        }
        return Err(Error::GateFailure { reasons });
    }
    let core = build_core(d, None)?;
    let order = trilateration_order(d, m, n);
    let expected_stress = expected_stress_dim(d, m, n);
    let expected_rank = d * (m + n) - binomial(d + 1, 2);
    let full_span = veronese_dim(d);

    for attempt in 0..budget.max(1) {
        let mut stream = rng.next_stream();
        let mut framework = core.framework.clone();
        for &side in &order {
            let point = random_point(&mut stream, d);
            framework = match trilaterate(&framework, side, point) {
                Ok(f) => f,
                // A random point on top of an existing one; redraw everything.
                Err(Error::Framework(_)) => break,
                Err(e) => return Err(e),
            };
        }
        if framework.vertex_count() != m + n {
            continue;
        }
        if !is_general_position(framework.config())? {
            continue;
        }
        let veronese_span = veronese_affine_span_dim(framework.points())?;
        if veronese_span != full_span {
            continue;
        }
        let stress_dim = stress_basis(&framework)?.len();
        let rigidity = is_infinitesimally_rigid(&framework)?;
        let bolker_roth = bolker_roth_dim(&framework)?;
        let audit = ConstructionAudit {
            seed: rng.seed,
            d,
            m,
            n,
            core_superstable: core.certificate.verdict,
            general_position: true,
            stress_dim,
            stress_dim_expected: expected_stress,
            bolker_roth_dim: bolker_roth.dimension,
            rigidity_rank: rigidity.rank,
            rigidity_rank_expected: expected_rank,
            inf_rigid: rigidity.rigid,
            veronese_span_dim: veronese_span,
            veronese_full_span: true,
            retries_used: attempt,
            universally_rigid_by_trilateration: true,
        };
        if audit.passes() {
            return Ok(KmnConstruction {
                framework,
                audit,
                core,
            });
        }
    }
    Err(Error::RetryExhausted {
        seed: rng.seed,
        attempts: budget.max(1),
    })
}

/// Whether the stress matrix built from `stress` has an all-zero diagonal.
pub fn has_zero_diagonal(stress_matrix: &exactmat::RatMatrix) -> bool {
    stress_matrix.diagonal().iter().all(Zero::is_zero)
}
