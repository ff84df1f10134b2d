//! Suite runner: seeded instance generation, invariant and acceptance
//! checks for every module, and machine-readable reports.

mod coderiv_suites;
mod derivative_suite;
pub mod instance;
mod oracle_suite;
mod projection_suite;
pub mod report;
mod space_suites;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{self, touch, Op};
use crate::error::{Error, Result};
use crate::oracle::OracleConfig;
use crate::space::LpSpace;

pub use instance::{gen_instance, Instance, InstanceParams, Regime, SetKind, WeightsMode};
pub use report::{Case, Report, Status, Summary};

use instance::{build_space, fnv1a};
use report::Tally;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SpaceIdentities,
    Decomposition,
    Projections,
    Derivatives,
    CoderivBall,
    CoderivCylinder,
    CoderivCone,
    OracleCrosscheck,
    All,
}

impl Suite {
    /// Every suite except `All`, in execution order.
    pub const MODULES: [Suite; 8] = [
        Suite::SpaceIdentities,
        Suite::Decomposition,
        Suite::Projections,
        Suite::Derivatives,
        Suite::CoderivBall,
        Suite::CoderivCylinder,
        Suite::CoderivCone,
        Suite::OracleCrosscheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SpaceIdentities => "space-identities",
            Suite::Decomposition => "decomposition",
            Suite::Projections => "projections",
            Suite::Derivatives => "derivatives",
            Suite::CoderivBall => "coderiv-ball",
            Suite::CoderivCylinder => "coderiv-cylinder",
            Suite::CoderivCone => "coderiv-cone",
            Suite::OracleCrosscheck => "oracle-crosscheck",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::MODULES
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

/// How many samples each check draws.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleCounts {
    /// Random points for the space and decomposition identities.
    pub points: usize,
    /// Exterior points per set in the projection checks.
    pub projection_points: usize,
    /// Feasible competitors per exterior point.
    pub competitors: usize,
    /// Interior and exterior points (each) for derivative and adjoint checks.
    pub derivative_points: usize,
    /// Random directions or `(y*, v)` pairs per derivative point.
    pub directions_per_point: usize,
    /// Boundary `(x̄, v)` pairs for the up/down consistency check.
    pub direction_pairs: usize,
    /// Boundary points per set for nonsmoothness witnesses.
    pub witness_points: usize,
    /// Constructed sphere `θ*`-membership queries.
    pub membership_cases: usize,
    /// Constructed cylinder `θ*`-membership queries.
    pub cylinder_cases: usize,
    /// Random queries comparing the full-mask cylinder with the ball.
    pub consistency_queries: usize,
    /// Constructed cone `θ*`-membership queries.
    pub cone_cases: usize,
    /// Random points for each of the other cone checks.
    pub cone_points: usize,
    /// Boundary points for the empty-fiber check.
    pub empty_fiber_points: usize,
    /// Random `x*` candidates per empty-fiber point.
    pub empty_fiber_candidates: usize,
    /// Closed-form singletons and perturbations sent to the oracle.
    pub oracle_points: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            points: 1000,
            projection_points: 200,
            competitors: 200,
            derivative_points: 100,
            directions_per_point: 10,
            direction_pairs: 500,
            witness_points: 50,
            membership_cases: 20,
            cylinder_cases: 30,
            consistency_queries: 50,
            cone_cases: 40,
            cone_points: 20,
            empty_fiber_points: 3,
            empty_fiber_candidates: 10,
            oracle_points: 5,
        }
    }
}

impl SampleCounts {
    fn validate(&self) -> Result<()> {
        let all = [
            self.points,
            self.projection_points,
            self.competitors,
            self.derivative_points,
            self.directions_per_point,
            self.direction_pairs,
            self.witness_points,
            self.membership_cases,
            self.cylinder_cases,
            self.consistency_queries,
            self.cone_cases,
            self.cone_points,
            self.empty_fiber_points,
            self.empty_fiber_candidates,
            self.oracle_points,
        ];
        if all.contains(&0) {
            return Err(Error::InvalidConfig("sample counts must be positive".into()));
        }
        Ok(())
    }
}

/// Everything a suite run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub suite: Suite,
    pub n: usize,
    pub p: f64,
    pub weights: WeightsMode,
    pub r: f64,
    pub mask_density: f64,
    pub seed: u64,
    pub samples: SampleCounts,
    /// Multiplies every numerical tolerance; thresholds that separate
    /// verdicts are not scaled.
    pub tol_scale: f64,
}

impl SuiteSpec {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            n: 8,
            p: 3.0,
            weights: WeightsMode::Unit,
            r: 1.0,
            mask_density: 0.5,
            seed: 42,
            samples: SampleCounts::default(),
            tol_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n = {} but the suites need n >= 2", self.n)));
        }
        LpSpace::new(self.n, self.p)?;
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidRadius(self.r));
        }
        if !(self.mask_density > 0.0 && self.mask_density <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "mask density {} outside (0, 1]",
                self.mask_density
            )));
        }
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance scale {} must be positive", self.tol_scale)));
        }
        self.samples.validate()
    }

    fn params(&self) -> InstanceParams {
        InstanceParams {
            n: self.n,
            p: self.p,
            weights: self.weights,
            r: self.r,
            mask_density: self.mask_density,
        }
    }

    /// Command line that reruns `suite` with this configuration.
    pub fn repro_command(&self, suite: Suite) -> String {
        let weights = match self.weights {
            WeightsMode::Unit => "unit",
            WeightsMode::Random => "random",
        };
        let mut cmd = format!(
            "projcalc run --suite {} --n {} --p {} --r {} --mask-density {} --seed {} --tol-scale {} --weights {}",
            suite, self.n, self.p, self.r, self.mask_density, self.seed, self.tol_scale, weights
        );
        if self.samples != SampleCounts::default() {
            let json = serde_json::to_string(&self.samples).expect("sample counts serialize");
            cmd.push_str(&format!(" --samples '{json}'"));
        }
        cmd.push_str(" --out report.json");
        cmd
    }
}

/// Runs the requested suite single-threaded and returns its report with
/// cases sorted by id.
pub fn run_suite(spec: &SuiteSpec) -> Result<Report> {
    spec.validate()?;
    coverage::reset();
    touch(Op::RunSuite);
    let suites: Vec<Suite> = match spec.suite {
        Suite::All => Suite::MODULES.to_vec(),
        s => vec![s],
    };
    let mut cases = Vec::new();
    for suite in suites {
        let mut ctx = Ctx::new(spec, suite)?;
        if let Err(e) = run_module(&mut ctx) {
            let mut t = Tally::boolean(format!("{suite}/unexpected-error"), format!("unexpected error: {e}"));
            t.check(false, Vec::new);
            ctx.push(t);
        }
        cases.extend(ctx.cases);
    }
    cases.sort_by(|a, b| a.id.cmp(&b.id));

    let counts = coverage::snapshot();
    let uncovered = if spec.suite == Suite::All {
        counts.iter().filter(|(_, &c)| c == 0).map(|(k, _)| k.to_string()).collect()
    } else {
        Vec::new()
    };
    let count = |s: Status| cases.iter().filter(|c| c.status == s).count();
    let summary = Summary {
        total: cases.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        undetermined: count(Status::Undetermined),
        coverage: counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        uncovered,
    };
    Ok(Report {
        suite: spec.suite.name().to_owned(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        config: spec.clone(),
        cases,
        summary,
    })
}

fn run_module(ctx: &mut Ctx) -> Result<()> {
    match ctx.suite {
        Suite::SpaceIdentities => space_suites::space_identities(ctx),
        Suite::Decomposition => space_suites::decomposition(ctx),
        Suite::Projections => projection_suite::run(ctx),
        Suite::Derivatives => derivative_suite::run(ctx),
        Suite::CoderivBall => coderiv_suites::ball(ctx),
        Suite::CoderivCylinder => coderiv_suites::cylinder(ctx),
        Suite::CoderivCone => coderiv_suites::cone(ctx),
        Suite::OracleCrosscheck => oracle_suite::run(ctx),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

/// Per-module state shared by the checks.
pub(crate) struct Ctx<'a> {
    pub spec: &'a SuiteSpec,
    pub suite: Suite,
    pub space: LpSpace,
    repro: String,
    pub cases: Vec<Case>,
}

impl<'a> Ctx<'a> {
    fn new(spec: &'a SuiteSpec, suite: Suite) -> Result<Self> {
        Ok(Self {
            spec,
            suite,
            space: build_space(&spec.params(), spec.seed)?,
            repro: spec.repro_command(suite),
            cases: Vec::new(),
        })
    }

    /// Independent generator for the draw named `label`.
    pub fn rng(&self, label: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed(label))
    }

    /// Seed derived from the run seed, the module and `label`.
    pub fn seed(&self, label: &str) -> u64 {
        self.spec.seed ^ fnv1a(format!("{}/{label}", self.suite).as_bytes())
    }

    pub fn tol(&self, t: f64) -> f64 {
        t * self.spec.tol_scale
    }

    /// Case `id` passing while observed values stay `≤ limit · tol_scale`.
    pub fn tally(&self, id: &str, anchor: &str, limit: f64) -> Tally {
        Tally::new(format!("{}/{id}", self.suite), anchor, self.tol(limit))
    }

    /// Case `id` made of boolean checks.
    pub fn checks(&self, id: &str, anchor: &str) -> Tally {
        Tally::boolean(format!("{}/{id}", self.suite), anchor)
    }

    pub fn push(&mut self, t: Tally) {
        let case = t.finish(&self.repro);
        self.cases.push(case);
    }

    pub fn instance(&self, kind: SetKind, regime: Regime, index: usize) -> Result<Instance> {
        let label = format!("{}/{}/{index}", kind.name(), regime.name());
        gen_instance(&self.spec.params(), kind, regime, self.seed(&label))
    }

    pub fn oracle(&self, label: &str) -> OracleConfig {
        OracleConfig::with_seed(self.seed(&format!("oracle/{label}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::MODULES.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = SuiteSpec::new(Suite::All);
        assert!(spec.validate().is_ok());
        spec.p = 0.9;
        assert_eq!(run_suite(&spec).unwrap_err(), Error::InvalidExponent(0.9));
        let mut spec = SuiteSpec::new(Suite::All);
        spec.mask_density = 0.0;
        assert!(spec.validate().is_err());
        let mut spec = SuiteSpec::new(Suite::All);
        spec.samples.points = 0;
        assert!(spec.validate().is_err());
        let mut spec = SuiteSpec::new(Suite::All);
        spec.n = 1;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn repro_mentions_samples_only_when_changed() {
        let mut spec = SuiteSpec::new(Suite::All);
        assert!(!spec.repro_command(Suite::Projections).contains("--samples"));
        spec.samples.points = 5;
        let cmd = spec.repro_command(Suite::Projections);
        assert!(cmd.contains("--suite projections"));
        assert!(cmd.contains("\"points\":5"));
    }
}
