//! A quick invariant suite for `d ≤ 3`, run by `rigidcert selftest`.

use std::time::Instant;

use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use crate::construct::{
    bolker_roth_dim, build_core, build_kmn, has_zero_diagonal, hendrickson_gate, moment_curve,
    random_point, RandomSource,
};
use crate::exactmat::int;
use crate::framework::{is_general_position, Configuration, Framework, Graph};
use crate::rigidity::{assemble_stress_matrix, maxwell_audit, stress_basis};
use crate::veronese::{evaluate_quadric, hull_relation, veronese_affine_span_dim, HullStatus};
use crate::{to_canonical_json, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestCase {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub cases: Vec<SelftestCase>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }
}

fn case(name: &str, check: impl FnOnce() -> Result<(bool, String)>) -> SelftestCase {
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(outcome) => outcome,
        Err(e) => (false, format!("error: {e}")),
    };
    SelftestCase {
        name: name.to_string(),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

/// Random complete bipartite framework with both parts spanning `E^d`,
/// or `None` when the sample is degenerate.
fn random_bipartite(rng: &mut impl Rng, d: usize, u: usize, v: usize) -> Option<Framework> {
    let p = (0..u).map(|_| random_point(rng, d)).collect();
    let q = (0..v).map(|_| random_point(rng, d)).collect();
    let f = Framework::complete_bipartite(d, p, q).ok()?;
    is_general_position(f.config()).ok()?.then_some(f)
}

fn random_graph_framework(rng: &mut impl Rng, d: usize, n: usize) -> Option<Framework> {
    let points: Vec<Vec<_>> = (0..n)
        .map(|_| (0..d).map(|_| int(rng.gen_range(-4..=4))).collect())
        .collect();
    let edges: Vec<(usize, usize)> = (0..n)
        .tuple_combinations()
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    let graph = Graph::new(n, &edges).ok()?;
    Framework::new(graph, None, Configuration::new(d, points).ok()?).ok()
}

pub fn run_selftest(seed: u64) -> SelftestReport {
    let mut cases = Vec::new();

    cases.push(case("core super stability, d = 1..3", || {
        let mut ranks = Vec::new();
        for d in 1..=3 {
            let core = build_core(d, None)?;
            let c = &core.certificate;
            if !(c.verdict && c.psd.is_psd && c.stress_matrix_rank == d + 1) {
                return Ok((false, format!("d = {d}: rank {}", c.stress_matrix_rank)));
            }
            ranks.push(c.stress_matrix_rank);
        }
        Ok((
            true,
            format!("stress matrix ranks {ranks:?} (expected [2, 3, 4])"),
        ))
    }));

    cases.push(case("stress counts of built K_{m,n}", || {
        let mut seen = Vec::new();
        for (d, m, n, stress, rank) in [(2, 3, 4, 1, 11), (3, 4, 7, 1, 27), (3, 5, 6, 3, 27)] {
            let built = build_kmn(d, m, n, &mut RandomSource::new(seed))?;
            let a = &built.audit;
            seen.push(format!(
                "K_{{{m},{n}}} d={d}: s={} r={}",
                a.stress_dim, a.rigidity_rank
            ));
            if a.stress_dim != stress || a.rigidity_rank != rank || !a.passes() {
                return Ok((false, seen.join(", ")));
            }
        }
        Ok((true, seen.join(", ")))
    }));

    cases.push(case("Bolker–Roth count equals stress dimension", || {
        let mut rng = RandomSource::new(seed).next_stream();
        let mut checked = 0;
        while checked < 20 {
            let d = rng.gen_range(1..=3);
            let u = rng.gen_range(d + 1..=6);
            let v = rng.gen_range(d + 1..=6);
            let Some(f) = random_bipartite(&mut rng, d, u, v) else {
                continue;
            };
            let br = bolker_roth_dim(&f)?.dimension;
            let s = stress_basis(&f)?.len();
            if br != s {
                return Ok((false, format!("K_{{{u},{v}}} d={d}: {br} vs {s}")));
            }
            checked += 1;
        }
        Ok((true, format!("{checked} frameworks agree")))
    }));

    cases.push(case("Maxwell identity m − dn = s − f", || {
        let mut rng = RandomSource::new(seed.wrapping_add(1)).next_stream();
        let mut checked = 0;
        while checked < 50 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(d.max(2)..=8);
            let Some(f) = random_graph_framework(&mut rng, d, n) else {
                continue;
            };
            if !maxwell_audit(&f)?.identity_holds {
                return Ok((false, format!("fails on {}", f.to_json())));
            }
            checked += 1;
        }
        Ok((true, format!("{checked} fuzzed frameworks")))
    }));

    cases.push(case(
        "every (2d+1)-subset of core Veronese images spans 2d",
        || {
            for d in 1..=3 {
                let core = build_core(d, None)?;
                for subset in core.framework.points().iter().combinations(2 * d + 1) {
                    if veronese_affine_span_dim(&subset)? != 2 * d {
                        return Ok((false, format!("d = {d}")));
                    }
                }
            }
            Ok((true, "d = 1, 2, 3".into()))
        },
    ));

    cases.push(case(
        "hull relation: cores intersect, blocked sets separate",
        || {
            for d in 1..=3 {
                let (p, q) = build_core(d, None)?
                    .framework
                    .part_points()
                    .expect("bipartite");
                let r = hull_relation(&p, &q, d)?;
                if r.status != HullStatus::RelativeInteriorIntersect {
                    return Ok((false, format!("core d = {d}: {:?}", r.status)));
                }
            }
            let curve = |ts: [i64; 3]| {
                ts.iter()
                    .map(|&t| moment_curve(&int(t), 2))
                    .collect::<Vec<_>>()
            };
            let (p, q) = (curve([1, 2, 3]), curve([4, 5, 6]));
            let r = hull_relation(&p, &q, 2)?;
            let Some(quadric) = r.separating_quadric.as_ref() else {
                return Ok((false, format!("negative control: {:?}", r.status)));
            };
            let below = p
                .iter()
                .all(|x| evaluate_quadric(quadric, x).is_ok_and(|v| v <= int(-1)));
            let above = q
                .iter()
                .all(|x| evaluate_quadric(quadric, x).is_ok_and(|v| v >= int(1)));
            Ok((
                below && above,
                "negative control separated by a verified quadric".into(),
            ))
        },
    ));

    cases.push(case(
        "necessity: zero-diagonal stress and Hendrickson gate",
        || {
            let mut rng = RandomSource::new(seed.wrapping_add(2)).next_stream();
            let f = loop {
                if let Some(f) = random_bipartite(&mut rng, 3, 5, 5) {
                    break f;
                }
            };
            let basis = stress_basis(&f)?;
            if basis.len() != 1 {
                return Ok((false, format!("stress dimension {}", basis.len())));
            }
            let omega = assemble_stress_matrix(&f, &basis[0])?;
            let zero_diag = has_zero_diagonal(&omega.0) && !omega.0.is_zero();
            let gate = !hendrickson_gate(3, 4, 4).passes && !hendrickson_gate(2, 2, 9).passes;
            Ok((
                zero_diag && gate,
                format!("zero diagonal: {zero_diag}, gate rejects: {gate}"),
            ))
        },
    ));

    cases.push(case("seeded construction is reproducible", || {
        let a = build_kmn(2, 3, 4, &mut RandomSource::new(seed))?;
        let b = build_kmn(2, 3, 4, &mut RandomSource::new(seed))?;
        let same = to_canonical_json(&a.framework) == to_canonical_json(&b.framework)
            && to_canonical_json(&a.audit) == to_canonical_json(&b.audit);
        Ok((same, "byte-identical JSON".into()))
    }));

    SelftestReport { seed, cases }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let report = run_selftest(0);
        for c in &report.cases {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(report.cases.len(), 8);
    }
}
