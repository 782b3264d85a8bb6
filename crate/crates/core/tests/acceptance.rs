//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! limit. Exact criteria have zero tolerance. Values are cross-checked
//! against the small oracles in this file rather than trusted from the
//! library alone.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rigidcert::construct::{
    bolker_roth_dim, build_core, build_kmn, hendrickson_gate, moment_curve, RandomSource,
};
use rigidcert::exactmat::Rational;
use rigidcert::framework::{is_general_position, Configuration, Framework, Graph};
use rigidcert::rigidity::{maxwell_audit, stress_basis};
use rigidcert::veronese::{hull_relation, veronese_affine_span_dim, HullStatus};

mod oracle {
    //! Plain Gaussian elimination on `Vec<Vec<Rational>>`, written
    //! independently of the library's fraction-free code.
    use super::*;

    pub fn rank(mut m: Vec<Vec<Rational>>) -> usize {
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] / &m[r][c];
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * p;
                }
            }
            r += 1;
        }
        r
    }

    pub fn det(mut m: Vec<Vec<Rational>>) -> Rational {
        let n = m.len();
        let mut acc = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap(p, c);
                acc = -acc;
            }
            acc *= &m[c][c];
            for i in c + 1..n {
                let f = &m[i][c] / &m[c][c];
                let pivot_row = m[c].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * p;
                }
            }
        }
        acc
    }

    /// PSD iff every principal minor is nonnegative.
    pub fn is_psd(m: &[Vec<Rational>]) -> bool {
        let n = m.len();
        (1..=n).all(|k| {
            (0..n).combinations(k).all(|idx| {
                let sub = idx
                    .iter()
                    .map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect())
                    .collect();
                !det(sub).is_negative()
            })
        })
    }

    pub fn rigidity_rows(f: &Framework) -> Vec<Vec<Rational>> {
        let d = f.dimension();
        f.edges()
            .iter()
            .map(|&(i, j)| {
                let mut row = vec![Rational::zero(); d * f.vertex_count()];
                for k in 0..d {
                    row[i * d + k] = &f.point(i)[k] - &f.point(j)[k];
                    row[j * d + k] = &f.point(j)[k] - &f.point(i)[k];
                }
                row
            })
            .collect()
    }

    pub fn stress_dim(f: &Framework) -> usize {
        f.edges().len() - rank(rigidity_rows(f))
    }

    /// Upper triangle of `x̂x̂ᵀ` with `x̂ = (x, 1)`, minus the constant entry.
    pub fn veronese(x: &[Rational]) -> Vec<Rational> {
        let mut hat = x.to_vec();
        hat.push(Rational::one());
        let k = hat.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in i..k {
                if (i, j) != (k - 1, k - 1) {
                    out.push(&hat[i] * &hat[j]);
                }
            }
        }
        out
    }

    pub fn affine_dim(points: &[Vec<Rational>]) -> usize {
        let base = &points[0];
        rank(
            points[1..]
                .iter()
                .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
                .collect(),
        )
    }

    pub fn omega(f: &Framework, w: &[Rational]) -> Vec<Vec<Rational>> {
        let n = f.vertex_count();
        let mut o = vec![vec![Rational::zero(); n]; n];
        for (x, &(i, j)) in w.iter().zip(f.edges()) {
            o[i][i] += x;
            o[j][j] += x;
            o[i][j] -= x;
            o[j][i] -= x;
        }
        o
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        BigInt::from(rng.gen_range(-40i64..=40)),
        BigInt::from(rng.gen_range(1i64..=5)),
    )
}

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn criterion_1() -> Check {
    for d in 1..=3 {
        let core = lib(build_core(d, None))?;
        let cert = &core.certificate;
        let n = core.framework.vertex_count();
        let omega = oracle::omega(&core.framework, &cert.stress.0);
        ensure(oracle::rank(cert.stress_matrix.to_rows()) == d + 1, || {
            format!("d={d}: rank")
        })?;
        ensure(oracle::rank(omega.clone()) == n - d - 1, || {
            format!("d={d}: oracle rank")
        })?;
        ensure(oracle::is_psd(&omega), || {
            format!("d={d}: principal minor negative")
        })?;
        ensure(cert.psd.is_psd && cert.stress_matrix_rank == d + 1, || {
            format!("d={d}: certificate")
        })?;
        ensure(!cert.conic.conic_exists, || {
            format!("d={d}: conic at infinity")
        })?;
        // No conic: the weighted direction products have full rank C(d+1,2).
        let rows = core
            .framework
            .edges()
            .iter()
            .map(|&(i, j)| {
                let e: Vec<Rational> = (0..d)
                    .map(|k| &core.framework.point(j)[k] - &core.framework.point(i)[k])
                    .collect();
                (0..d)
                    .flat_map(|a| (a..d).map(move |b| (a, b)))
                    .map(|(a, b)| &e[a] * &e[b])
                    .collect()
            })
            .collect();
        ensure(oracle::rank(rows) == d * (d + 1) / 2, || {
            format!("d={d}: oracle conic rank")
        })?;
    }
    Ok("PSD stress ranks 2, 3, 4; no conic at infinity".into())
}

fn criterion_2() -> Check {
    let mut seen = Vec::new();
    for (d, m, n, stress, rank) in [(2, 3, 4, 1, 11), (3, 4, 7, 1, 27), (3, 5, 6, 3, 27)] {
        let built = lib(build_kmn(d, m, n, &mut RandomSource::new(2024)))?;
        let f = &built.framework;
        let r = oracle::rank(oracle::rigidity_rows(f));
        let s = f.edges().len() - r;
        ensure(s == stress && r == rank, || {
            format!("K_{{{m},{n}}} d={d}: s={s} r={r}")
        })?;
        ensure(
            built.audit.stress_dim == stress && built.audit.rigidity_rank == rank,
            || format!("K_{{{m},{n}}} d={d}: audit disagrees with oracle"),
        )?;
        seen.push(format!("({s}, {r})"));
    }
    Ok(format!("(stress, rank) = {}", seen.join(" ")))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut nontrivial = 0;
    while checked < 200 {
        let d = rng.gen_range(1..=3);
        let u = rng.gen_range(d + 1..=7);
        let v = rng.gen_range(d + 1..=7);
        let p = (0..u)
            .map(|_| (0..d).map(|_| small_rational(&mut rng)).collect())
            .collect();
        let q = (0..v)
            .map(|_| (0..d).map(|_| small_rational(&mut rng)).collect())
            .collect();
        let Ok(f) = Framework::complete_bipartite(d, p, q) else {
            continue;
        };
        if !lib(is_general_position(f.config()))? {
            continue;
        }
        let br = lib(bolker_roth_dim(&f))?.dimension;
        let direct = oracle::stress_dim(&f);
        ensure(br == direct, || {
            format!("K_{{{u},{v}}} d={d}: Bolker–Roth {br}, cokernel {direct}")
        })?;
        ensure(lib(stress_basis(&f))?.len() == direct, || {
            "stress basis size".into()
        })?;
        nontrivial += usize::from(direct > 0);
        checked += 1;
    }
    Ok(format!(
        "{checked}/200 agree ({nontrivial} with nonzero stresses)"
    ))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 500 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(d.max(2)..=10);
        let density = rng.gen_range(0.1..0.9);
        let points: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..d).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        let edges: Vec<(usize, usize)> = (0..n)
            .tuple_combinations()
            .filter(|_| rng.gen_bool(density))
            .collect();
        let Ok(graph) = Graph::new(n, &edges) else {
            continue;
        };
        let Ok(config) = Configuration::new(d, points) else {
            continue;
        };
        let Ok(f) = Framework::new(graph, None, config) else {
            continue;
        };
        let a = lib(maxwell_audit(&f))?;
        let r = oracle::rank(oracle::rigidity_rows(&f));
        let (m, dn) = (f.edges().len(), d * n);
        ensure(a.identity_holds, || {
            format!("identity fails on {}", f.to_json())
        })?;
        ensure(a.r == r && a.s == m - r && a.f == dn - r, || {
            format!("audit (r,s,f)=({},{},{}) vs oracle r={r}", a.r, a.s, a.f)
        })?;
        checked += 1;
    }
    Ok(format!(
        "{checked}/500 fuzzed frameworks satisfy m − dn = s − f"
    ))
}

fn criterion_5() -> Check {
    let mut subsets = 0;
    for d in 1..=3 {
        let core = lib(build_core(d, None))?;
        for subset in core
            .framework
            .points()
            .iter()
            .cloned()
            .combinations(2 * d + 1)
        {
            let lifted: Vec<Vec<Rational>> = subset.iter().map(|x| oracle::veronese(x)).collect();
            ensure(oracle::affine_dim(&lifted) == 2 * d, || {
                format!("d={d}: oracle span")
            })?;
            ensure(lib(veronese_affine_span_dim(&subset))? == 2 * d, || {
                format!("d={d}: library span")
            })?;
            subsets += 1;
        }
    }
    ensure(subsets == 4 + 6 + 8, || format!("{subsets} subsets"))?;
    Ok(format!("{subsets} subsets, each of affine dimension 2d"))
}

fn quadric_value(q: &rigidcert::exactmat::RatMatrix, x: &[Rational]) -> Rational {
    let mut hat = x.to_vec();
    hat.push(Rational::one());
    let mut acc = Rational::zero();
    for i in 0..hat.len() {
        for j in 0..hat.len() {
            acc += &hat[i] * &q[(i, j)] * &hat[j];
        }
    }
    acc
}

fn criterion_6() -> Check {
    let mut t_stars = Vec::new();
    for d in 1..=3 {
        let (p, q) = lib(build_core(d, None))?
            .framework
            .part_points()
            .ok_or("no parts")?;
        let r = lib(hull_relation(&p, &q, d))?;
        ensure(r.status == HullStatus::RelativeInteriorIntersect, || {
            format!("d={d}: {:?}", r.status)
        })?;
        let t = r.t_star.clone().ok_or("no t*")?;
        let (wp, wq) = (
            r.weights_p.clone().ok_or("no weights")?,
            r.weights_q.clone().ok_or("no weights")?,
        );
        ensure(
            t.is_positive() && wp.iter().chain(&wq).all(|w| *w >= t),
            || "weights below t*".into(),
        )?;
        let combine = |pts: &[Vec<Rational>], w: &[Rational]| {
            let mut acc = vec![Rational::zero(); oracle::veronese(&pts[0]).len()];
            for (x, wi) in pts.iter().zip(w) {
                for (a, v) in acc.iter_mut().zip(oracle::veronese(x)) {
                    *a += wi * v;
                }
            }
            acc
        };
        let sum = |w: &[Rational]| w.iter().fold(Rational::zero(), |a, b| a + b);
        ensure(sum(&wp).is_one() && sum(&wq).is_one(), || {
            "weights do not sum to 1".into()
        })?;
        ensure(combine(&p, &wp) == combine(&q, &wq), || {
            format!("d={d}: combinations differ")
        })?;
        t_stars.push(rigidcert::exactmat::format_rational(&t));
    }
    let curve = |ts: [i64; 3]| {
        ts.iter()
            .map(|&t| moment_curve(&int(t), 2))
            .collect::<Vec<_>>()
    };
    let (p, q) = (curve([1, 2, 3]), curve([4, 5, 6]));
    let r = lib(hull_relation(&p, &q, 2))?;
    ensure(r.status == HullStatus::DisjointStrictlySeparable, || {
        format!("control: {:?}", r.status)
    })?;
    let quadric = r.separating_quadric.ok_or("no quadric")?;
    ensure(quadric.is_symmetric(), || "quadric not symmetric".into())?;
    ensure(
        p.iter().all(|x| quadric_value(&quadric, x) <= int(-1))
            && q.iter().all(|x| quadric_value(&quadric, x) >= int(1)),
        || "quadric does not separate".into(),
    )?;
    Ok(format!(
        "cores intersect with t* = {}; control separated",
        t_stars.join(", ")
    ))
}

fn criterion_7() -> Check {
    let mut rng = RandomSource::new(7).next_stream();
    let f = loop {
        let p = (0..5)
            .map(|_| rigidcert::construct::random_point(&mut rng, 3))
            .collect();
        let q = (0..5)
            .map(|_| rigidcert::construct::random_point(&mut rng, 3))
            .collect();
        if let Ok(f) = Framework::complete_bipartite(3, p, q) {
            if lib(is_general_position(f.config()))? {
                break f;
            }
        }
    };
    ensure(oracle::stress_dim(&f) == 1, || {
        "oracle stress dimension is not 1".into()
    })?;
    let basis = lib(stress_basis(&f))?;
    ensure(basis.len() == 1, || {
        format!("stress dimension {}", basis.len())
    })?;
    let omega = oracle::omega(&f, &basis[0].0);
    ensure((0..10).all(|i| omega[i][i].is_zero()), || {
        "nonzero diagonal entry".into()
    })?;
    ensure(omega.iter().flatten().any(|x| !x.is_zero()), || {
        "stress matrix is zero".into()
    })?;
    ensure(!oracle::is_psd(&omega), || {
        "zero-diagonal stress matrix reported PSD".into()
    })?;

    let g = hendrickson_gate(3, 4, 4);
    ensure(!g.passes && g.reasons == ["m + n = 8 < 11"], || {
        format!("(3,4,4): {:?}", g.reasons)
    })?;
    let g = hendrickson_gate(2, 2, 9);
    ensure(
        !g.passes && g.reasons.iter().any(|r| r.starts_with("m < d+1")),
        || format!("(2,2,9): {:?}", g.reasons),
    )?;
    Ok("generic K_{5,5} in 3-space: 1-dim stress space, zero diagonal; gate rejects (3,4,4), (2,2,9)".into())
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rigidcert"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited with {:?}", out.status.code())
    })?;
    Ok(out.stdout)
}

fn criterion_8() -> Check {
    let runs: [&[&str]; 2] = [
        &["construct", "-d", "2", "-m", "3", "-n", "4", "--seed", "11"],
        &["report", "-d", "2", "-m", "3", "-n", "4", "--seed", "11"],
    ];
    for args in runs {
        let (a, b) = (run_bin(args)?, run_bin(args)?);
        ensure(!a.is_empty() && a == b, || {
            format!("{} output differs between runs", args[0])
        })?;
        let v: serde_json::Value = serde_json::from_slice(&a).map_err(|e| e.to_string())?;
        ensure(v["seed"] == 11, || "seed missing from JSON".into())?;
    }
    let other = run_bin(&["construct", "-d", "2", "-m", "3", "-n", "4", "--seed", "12"])?;
    ensure(other != run_bin(runs[0])?, || {
        "different seeds gave identical output".into()
    })?;
    Ok("construct and report are byte-identical per seed".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 core super stability", 5, criterion_1),
        ("2 stress-dimension count", 30, criterion_2),
        ("3 Bolker–Roth oracle", 120, criterion_3),
        ("4 Maxwell identity", 120, criterion_4),
        ("5 Veronese span of subsets", 5, criterion_5),
        ("6 hull relation", 30, criterion_6),
        ("7 necessity", 10, criterion_7),
        ("8 determinism", 10, criterion_8),
    ];
    let mut failures = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let line = match (&outcome, in_time) {
            (Ok(detail), true) => format!("PASS {name}: {detail}"),
            (Ok(detail), false) => format!("FAIL {name}: over the {limit}s limit ({detail})"),
            (Err(e), _) => format!("FAIL {name}: {e}"),
        };
        if !(outcome.is_ok() && in_time) {
            failures += 1;
        }
        println!("{line} [{:.2}s / {limit}s]", elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
