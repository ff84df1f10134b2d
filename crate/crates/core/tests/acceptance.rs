//! Acceptance criteria, each checked over its parameter grid at its stated
//! tolerance. Prints one PASS/FAIL line per criterion.

use std::io::Write;

use projcalc::harness::{run_suite, Report, SampleCounts, Status, Suite, SuiteSpec};

const P_GRID: [f64; 4] = [1.5, 2.0, 3.0, 4.0];
const N_GRID: [usize; 3] = [2, 8, 32];
const SEED: u64 = 20240611;

fn spec(suite: Suite, p: f64, n: usize) -> SuiteSpec {
    let mut s = SuiteSpec::new(suite);
    s.p = p;
    s.n = n;
    s.seed = SEED;
    s
}

fn run(spec: &SuiteSpec) -> Report {
    run_suite(spec).unwrap_or_else(|e| panic!("{spec:?}: {e}"))
}

/// Runs over `(p, n)` pairs and collects reports.
fn grid(suite: Suite, ps: &[f64], ns: &[usize], tweak: impl Fn(&mut SuiteSpec)) -> Vec<Report> {
    let mut out = Vec::new();
    for &p in ps {
        for &n in ns {
            let mut s = spec(suite, p, n);
            tweak(&mut s);
            out.push(run(&s));
        }
    }
    out
}

struct Outcome {
    checked: usize,
    problems: Vec<String>,
}

/// Every case whose id ends with one of `suffixes` must pass; each suffix
/// must be present in every report.
fn require(reports: &[Report], suffixes: &[&str]) -> Outcome {
    let mut checked = 0;
    let mut problems = Vec::new();
    for r in reports {
        let tag = format!("p={} n={} density={}", r.config.p, r.config.n, r.config.mask_density);
        for sfx in suffixes {
            let cases: Vec<_> = r.cases.iter().filter(|c| c.id.ends_with(sfx)).collect();
            if cases.is_empty() {
                problems.push(format!("{tag}: no case {sfx}"));
            }
            for c in cases {
                checked += 1;
                if c.status != Status::Pass {
                    problems.push(format!("{tag}: {} {:?} {:?}", c.id, c.status, c.metrics));
                }
            }
        }
    }
    Outcome { checked, problems }
}

fn merge(parts: impl IntoIterator<Item = Outcome>) -> Outcome {
    parts.into_iter().fold(
        Outcome {
            checked: 0,
            problems: Vec::new(),
        },
        |mut acc, o| {
            acc.checked += o.checked;
            acc.problems.extend(o.problems);
            acc
        },
    )
}

fn strip_timestamp(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn acceptance() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    let space = grid(Suite::SpaceIdentities, &P_GRID, &N_GRID, |_| {});
    results.push((
        1,
        "duality identities",
        require(
            &space,
            &[
                "pairing-identity",
                "dual-norm-identity",
                "inverse-primal",
                "inverse-dual",
                "two-sided-inequality-upper",
                "two-sided-inequality-lower",
            ],
        ),
    ));

    let proj = grid(Suite::Projections, &P_GRID, &N_GRID, |_| {});
    results.push((
        2,
        "projection optimality",
        require(
            &proj,
            &[
                "ball/distance-minimality",
                "ball/variational-residual",
                "cylinder/distance-minimality",
                "cylinder/variational-residual",
                "subspace/distance-minimality",
                "subspace/variational-residual",
                "cone/distance-minimality",
                "cone/variational-residual",
            ],
        ),
    ));

    let deriv = grid(Suite::Derivatives, &P_GRID, &N_GRID, |_| {});
    results.push((
        3,
        "Fréchet agreement",
        require(&deriv, &["ball/frechet-vs-gateaux", "cylinder/frechet-vs-gateaux"]),
    ));

    let ball = grid(Suite::CoderivBall, &P_GRID, &N_GRID, |_| {});
    let cyl = grid(Suite::CoderivCylinder, &P_GRID, &N_GRID, |_| {});
    results.push((
        4,
        "adjoint identity",
        merge([
            require(&ball, &["ball/adjoint-identity", "ball/fd-adjoint"]),
            require(&cyl, &["cylinder/adjoint-identity", "cylinder/fd-adjoint"]),
        ]),
    ));

    let sphere: Vec<Report> = ball
        .iter()
        .filter(|r| r.config.n == 8 && [1.5, 2.0, 3.0].contains(&r.config.p))
        .cloned()
        .collect();
    let hilbert: Vec<Report> = sphere.iter().filter(|r| r.config.p == 2.0).cloned().collect();
    results.push((
        5,
        "sphere theta*-membership grid",
        merge([
            require(&sphere, &["ball/sphere-grid", "ball/sphere-grid-construction", "ball/holder-certificate"]),
            require(&hilbert, &["ball/hilbert-iff"]),
        ]),
    ));

    let at8 = |rs: &[Report]| -> Vec<Report> { rs.iter().filter(|r| r.config.n == 8).cloned().collect() };
    results.push((
        6,
        "empty fiber",
        merge([
            require(&at8(&ball), &["ball/empty-fiber", "ball/empty-fiber-radial-probe"]),
            require(&at8(&cyl), &["cylinder/empty-fiber", "cylinder/empty-fiber-radial-probe"]),
        ]),
    ));

    let mut iff = Vec::new();
    let mut full = Vec::new();
    for density in [0.25, 0.5, 1.0] {
        let reports = grid(Suite::CoderivCylinder, &P_GRID, &[8], |s| {
            s.mask_density = density;
            s.samples.cylinder_cases = 10;
        });
        if density == 1.0 {
            full.extend(reports.iter().cloned());
        }
        iff.extend(reports);
    }
    results.push((
        7,
        "cylinder iff",
        merge([
            require(&iff, &["cylinder/iff-grid", "cylinder/iff-grid-construction", "cylinder/full-mask-matches-ball"]),
            require(&full, &["cylinder/full-mask-grid-matches-ball"]),
        ]),
    ));

    let cone = grid(Suite::CoderivCone, &P_GRID, &[8], |_| {});
    results.push((
        8,
        "cone conditions",
        require(
            &cone,
            &[
                "cone/theta-query",
                "cone/theta-membership-grid",
                "cone/theta-membership-construction",
                "cone/duality-image-member",
                "cone/interval-inside",
                "cone/interval-outside",
            ],
        ),
    ));

    results.push((
        9,
        "nonsmoothness witnesses",
        require(
            &deriv,
            &[
                "ball/nonsmoothness-witness",
                "cylinder/nonsmoothness-witness",
                "cone/nonsmoothness-witness",
            ],
        ),
    ));

    let decomp = grid(Suite::Decomposition, &P_GRID, &N_GRID, |_| {});
    results.push((
        10,
        "decomposition",
        require(&decomp, &["recomposition", "dual-recomposition", "small-o-ratio"]),
    ));

    let all = spec(Suite::All, 3.0, 8);
    let first = run(&all);
    let second = run(&all);
    let mut problems = Vec::new();
    if strip_timestamp(&first.to_json()) != strip_timestamp(&second.to_json()) {
        problems.push("reports differ outside the timestamp".to_owned());
    }
    if !first.summary.uncovered.is_empty() {
        problems.push(format!("operations never called: {:?}", first.summary.uncovered));
    }
    if first.config.samples != SampleCounts::default() {
        problems.push("suite=all did not use the default sample counts".to_owned());
    }
    results.push((11, "determinism", Outcome { checked: 2, problems }));

    // Written to the stream directly so the lines survive output capture.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    let mut failed = 0;
    for (k, name, outcome) in &results {
        let status = if outcome.problems.is_empty() { "PASS" } else { "FAIL" };
        writeln!(out, "{status} criterion {k:>2}: {name} ({} cases checked)", outcome.checked).unwrap();
        for p in &outcome.problems {
            writeln!(out, "      {p}").unwrap();
        }
        failed += usize::from(!outcome.problems.is_empty());
    }
    drop(out);
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
