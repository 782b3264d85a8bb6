//! Super-stability certificates and the consolidated construction report.

use serde::{Deserialize, Serialize};

use crate::construct::{
    build_kmn_with_budget, ConstructionAudit, RandomSource, DEFAULT_RETRY_BUDGET,
};
use crate::exactmat::{self, psd_certify, PsdReport, RatMatrix};
use crate::framework::{affine_span_dim, Framework};
use crate::rigidity::{assemble_stress_matrix, stress_basis, StressVector};
use crate::veronese::{conic_at_infinity, ConicReport};
use crate::{Error, Result};

/// Self-contained super-stability evidence; every field can be re-checked
/// with independent arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperStabilityCertificate {
    pub dimension: usize,
    pub span_dim: usize,
    pub stress: StressVector,
    pub stress_matrix: RatMatrix,
    pub stress_matrix_rank: usize,
    pub expected_rank: usize,
    pub psd: PsdReport,
    pub conic: ConicReport,
    pub verdict: bool,
}

fn certificate_for(
    framework: &Framework,
    stress: StressVector,
    span_dim: usize,
) -> Result<SuperStabilityCertificate> {
    let d = framework.dimension();
    let n = framework.vertex_count();
    let omega = assemble_stress_matrix(framework, &stress)?.0;
    let stress_matrix_rank = exactmat::rank(&omega)?;
    let psd = psd_certify(&omega)?;
    let conic = conic_at_infinity(framework)?;
    let expected_rank = n - d - 1;
    let verdict =
        span_dim == d && psd.is_psd && stress_matrix_rank == expected_rank && !conic.conic_exists;
    Ok(SuperStabilityCertificate {
        dimension: d,
        span_dim,
        stress,
        stress_matrix: omega,
        stress_matrix_rank,
        expected_rank,
        psd,
        conic,
        verdict,
    })
}

/// Checks for a PSD equilibrium stress matrix of rank `n − d − 1` with the
/// edge directions off every conic at infinity.
///
/// Without a supplied stress the stress space must be one-dimensional; both
/// signs of its basis vector are tried and the passing one (or else the
/// normalized one) is reported. Frameworks whose points do not affinely span
/// `E^d` are rejected.
pub fn certify_superstable(
    framework: &Framework,
    stress: Option<&StressVector>,
) -> Result<SuperStabilityCertificate> {
    let d = framework.dimension();
    let span_dim = affine_span_dim(framework.points())?;
    if span_dim != d {
        return Err(Error::SpanHypothesis(format!(
            "points span {span_dim} of {d} dimensions"
        )));
    }
    if framework.edges().is_empty() {
        return Err(Error::NoEdges);
    }
    if let Some(s) = stress {
        return certificate_for(framework, s.clone(), span_dim);
    }
    let basis = stress_basis(framework)?;
    if basis.len() != 1 {
        return Err(Error::StressSearchOutOfScope { dim: basis.len() });
    }
    let positive = certificate_for(framework, basis[0].clone(), span_dim)?;
    if positive.verdict {
        return Ok(positive);
    }
    let negative = certificate_for(framework, basis[0].negated(), span_dim)?;
    Ok(if negative.verdict { negative } else { positive })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClaimBasis {
    /// Backed by an exact computation in this run.
    Computed,
    /// Follows from a cited theorem whose hypotheses were computed.
    Theorem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub fact: String,
    pub basis: ClaimBasis,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub citation: Option<String>,
}

impl Claim {
    fn computed(fact: String, holds: bool) -> Self {
        Self {
            fact,
            basis: ClaimBasis::Computed,
            holds,
            citation: None,
        }
    }

    fn theorem(fact: String, holds: bool, citation: &str) -> Self {
        Self {
            fact,
            basis: ClaimBasis::Theorem,
            holds,
            citation: Some(citation.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GgrReport {
    pub seed: u64,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub framework: Framework,
    pub audit: ConstructionAudit,
    pub core_framework: Framework,
    pub core_certificate: SuperStabilityCertificate,
    pub claims: Vec<Claim>,
}

impl GgrReport {
    pub fn all_hold(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }
}

pub fn ggr_report(d: usize, m: usize, n: usize, seed: u64) -> Result<GgrReport> {
    ggr_report_with_budget(d, m, n, seed, DEFAULT_RETRY_BUDGET)
}

/// Builds `K_{m,n}`, certifies its core, and separates what was computed
/// from what is inherited through cited theorems.
pub fn ggr_report_with_budget(
    d: usize,
    m: usize,
    n: usize,
    seed: u64,
    budget: usize,
) -> Result<GgrReport> {
    let built = build_kmn_with_budget(d, m, n, &mut RandomSource::new(seed), budget)?;
    let core_certificate = certify_superstable(&built.core.framework, None)?;
    let audit = built.audit;
    let k = d + 1;
    let stress_ok =
        audit.stress_dim == audit.stress_dim_expected && audit.stress_dim == audit.bolker_roth_dim;
    let claims = vec![
        Claim::computed(
            format!(
                "core K_{{{k},{k}}} is super stable (PSD stress matrix of rank {}, no conic at infinity)",
                core_certificate.stress_matrix_rank
            ),
            core_certificate.verdict,
        ),
        Claim::computed(
            format!("configuration of K_{{{m},{n}}} is in general position"),
            audit.general_position,
        ),
        Claim::computed(
            format!(
                "rigidity matrix rank {} = d(m+n) − C(d+1,2) = {}: infinitesimally rigid",
                audit.rigidity_rank, audit.rigidity_rank_expected
            ),
            audit.inf_rigid && audit.rigidity_rank == audit.rigidity_rank_expected,
        ),
        Claim::computed(
            format!(
                "stress space dimension {} = expected {} = Bolker–Roth count {}",
                audit.stress_dim, audit.stress_dim_expected, audit.bolker_roth_dim
            ),
            stress_ok,
        ),
        Claim::computed(
            format!(
                "Veronese images span {} affine dimensions",
                audit.veronese_span_dim
            ),
            audit.veronese_full_span,
        ),
        Claim::theorem(
            format!("core K_{{{k},{k}}} is universally rigid"),
            core_certificate.verdict,
            "Connelly: super stable frameworks are universally rigid",
        ),
        Claim::theorem(
            format!("K_{{{m},{n}}} framework is universally rigid"),
            core_certificate.verdict && audit.universally_rigid_by_trilateration,
            "trilateration: joining a new vertex to d+1 affinely spanning vertices preserves universal rigidity",
        ),
        Claim::theorem(
            format!("K_{{{m},{n}}} is generically globally rigid in dimension {d}"),
            core_certificate.verdict
                && audit.universally_rigid_by_trilateration
                && audit.inf_rigid
                && audit.general_position,
            "Gortler–Healy–Thurston: an infinitesimally rigid, universally rigid general-position framework certifies generic global rigidity",
        ),
    ];
    Ok(GgrReport {
        seed,
        d,
        m,
        n,
        framework: built.framework,
        audit,
        core_framework: built.core.framework,
        core_certificate,
        claims,
    })
}
