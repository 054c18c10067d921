//! Worked examples as data fixtures, replayed through the full pipeline.
//!
//! Each fixture is one JSON document. Running it never errors: every check
//! lands in the [`EntryReport`] as a field, so one broken value does not hide
//! the rest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integerize::{verify, CanonicalForm, Identity, IntTerm, IntegerSolution};
use crate::pipeline::{Pipeline, Problem};
use crate::quartic::{Quartic, QuarticPoint};
use crate::rational::Rational;
use crate::reduction::build_k4_quartic;
use crate::weierstrass::{CurvePoint, LongWeierstrass};

const BUILTIN: &[(&str, &str)] = &[
    ("ex2.3", include_str!("../corpus/ex2.3.json")),
    ("ex2.4", include_str!("../corpus/ex2.4.json")),
    ("ex2.5", include_str!("../corpus/ex2.5.json")),
    ("ex2.6", include_str!("../corpus/ex2.6.json")),
    ("ex2.7a", include_str!("../corpus/ex2.7a.json")),
    ("ex2.7b", include_str!("../corpus/ex2.7b.json")),
    ("ex2.8", include_str!("../corpus/ex2.8.json")),
    ("ex2.9", include_str!("../corpus/ex2.9.json")),
    ("ex3.7a", include_str!("../corpus/ex3.7a.json")),
    ("ex3.7b", include_str!("../corpus/ex3.7b.json")),
    ("ex3.7c", include_str!("../corpus/ex3.7c.json")),
    ("ex3.8", include_str!("../corpus/ex3.8.json")),
];

/// `lhs = rhs` as written in the source, integer terms only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrintedIdentity {
    pub lhs: Vec<IntTerm>,
    pub rhs: Vec<IntTerm>,
}

impl Identity for PrintedIdentity {
    fn lhs_total(&self) -> Rational {
        self.lhs.iter().map(IntTerm::eval).sum()
    }

    fn rhs_total(&self) -> Rational {
        self.rhs.iter().map(IntTerm::eval).sum()
    }

    fn signed_terms(&self) -> Vec<Rational> {
        self.lhs.iter().map(IntTerm::eval).chain(self.rhs.iter().map(|t| -t.eval())).collect()
    }
}

/// A printed identity known to be wrong, with the identity the pipeline
/// derives from the same generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Erratum {
    pub note: String,
    pub corrected: PrintedIdentity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrintedPoint {
    pub label: String,
    pub generator: usize,
    pub multiple: i64,
    pub point: CurvePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSolution {
    pub generator: usize,
    pub multiple: i64,
    #[serde(default)]
    pub printed_variables: BTreeMap<String, Rational>,
    #[serde(default)]
    pub printed: Option<PrintedIdentity>,
    #[serde(default)]
    pub erratum: Option<Erratum>,
}

/// One worked example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub id: String,
    #[serde(default)]
    pub description: String,
    /// Recorded for reference; never checked.
    #[serde(default)]
    pub claimed_rank: Option<u32>,
    pub problem: Problem,
    #[serde(default)]
    pub base_point: Option<QuarticPoint>,
    pub expected_curve: LongWeierstrass,
    #[serde(default)]
    pub expected_q: Option<Rational>,
    #[serde(default)]
    pub expected_quartic: Option<Quartic>,
    #[serde(default)]
    pub expected_shifted_quartic: Option<Quartic>,
    #[serde(default)]
    pub expected_long_curve: Option<LongWeierstrass>,
    pub generators: Vec<CurvePoint>,
    /// Generators on the long model from the quartic map, one per entry of `generators`.
    #[serde(default)]
    pub long_generators: Vec<CurvePoint>,
    #[serde(default)]
    pub quartic_points: Vec<QuarticPoint>,
    #[serde(default)]
    pub printed_points: Vec<PrintedPoint>,
    #[serde(default)]
    pub solutions: Vec<ExpectedSolution>,
}

impl Fixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let fx: Fixture = serde_json::from_str(text)?;
        fx.validate()?;
        Ok(fx)
    }

    fn validate(&self) -> Result<()> {
        let fail = |message: String| Err(Error::Fixture { id: self.id.clone(), message });
        let n = self.generators.len();
        if !self.long_generators.is_empty() && self.long_generators.len() != n {
            return fail(format!("{} long generators for {n} generators", self.long_generators.len()));
        }
        for g in self.printed_points.iter().map(|p| p.generator).chain(self.solutions.iter().map(|s| s.generator)) {
            if g >= n {
                return fail(format!("generator index {g} out of range ({n} generators)"));
            }
        }
        Ok(())
    }

    /// Replays the example. Never fails; problems are recorded in the report.
    pub fn run(&self) -> EntryReport {
        let mut report = EntryReport {
            id: self.id.clone(),
            description: self.description.clone(),
            claimed_rank: self.claimed_rank,
            curve: None,
            curve_match: false,
            generators_on_curve: Vec::new(),
            checks: Vec::new(),
            solutions: Vec::new(),
            passed: false,
        };
        let pipeline = match Pipeline::new(self.problem.clone(), self.base_point.as_ref()) {
            Ok(p) => p,
            Err(e) => {
                report.check("pipeline", false, e.to_string());
                return report;
            }
        };
        let curve = pipeline.curve();
        report.curve = Some(curve.to_string());
        report.curve_match = *curve == self.expected_curve;
        report.generators_on_curve = self.generators.iter().map(|g| curve.contains(g)).collect();

        if let Some(q) = &self.expected_q {
            let got = pipeline.root();
            report.check("q", got == Some(q), got.map_or("none".into(), ToString::to_string));
        }
        if let Some(expected) = &self.expected_quartic {
            let got = match (&self.problem, pipeline.quartic_route()) {
                (_, Some(route)) => Ok(route.quartic.clone()),
                (Problem::De(p), None) => build_k4_quartic(p),
                (Problem::CubesFifths(_), None) => unreachable!("cubes-fifths always has a quartic route"),
            };
            match got {
                Ok(got) => report.check("quartic", got == *expected, got.to_string()),
                Err(e) => report.check("quartic", false, e.to_string()),
            }
        }
        let route = pipeline.quartic_route();
        if let Some(expected) = &self.expected_shifted_quartic {
            let got = route.map(|r| &r.cubic_map.quartic);
            report.check("shifted quartic", got == Some(expected), got.map_or("none".into(), ToString::to_string));
        }
        if let Some(expected) = &self.expected_long_curve {
            let got = route.map(|r| &r.cubic_map.curve);
            report.check("long curve", got == Some(expected), got.map_or("none".into(), ToString::to_string));
        }
        for (i, long) in self.long_generators.iter().enumerate() {
            let name = format!("long model of generator {}", i + 1);
            match route.map(|r| r.square.inverse(&self.generators[i])) {
                Some(Ok(got)) => report.check(&name, got == *long, got.to_string()),
                Some(Err(e)) => report.check(&name, false, e.to_string()),
                None => report.check(&name, false, "no quartic route".into()),
            }
        }
        for pt in &self.quartic_points {
            let name = format!("quartic point {pt}");
            match route.map(|r| (r.quartic.contains(pt), r.to_curve_point(pt))) {
                Some((true, Ok(image))) => {
                    let ok = curve.contains(&image);
                    report.check(&name, ok, format!("maps to {image}"));
                }
                Some((false, _)) => report.check(&name, false, "not on the quartic".into()),
                Some((_, Err(e))) => report.check(&name, false, e.to_string()),
                None => report.check(&name, false, "no quartic route".into()),
            }
        }
        for pp in &self.printed_points {
            match curve.scalar_mul(pp.multiple, &self.generators[pp.generator]) {
                Ok(got) => report.check(&pp.label, got == pp.point, got.to_string()),
                Err(e) => report.check(&pp.label, false, e.to_string()),
            }
        }
        for exp in &self.solutions {
            report.solutions.push(self.run_solution(&pipeline, exp));
        }
        report.passed = report.curve_match
            && report.generators_on_curve.iter().all(|&b| b)
            && report.checks.iter().all(|c| c.passed)
            && report.solutions.iter().all(SolutionReport::passed);
        report
    }

    fn run_solution(&self, pipeline: &Pipeline, exp: &ExpectedSolution) -> SolutionReport {
        let printed_verified = exp.printed.as_ref().map(verify);
        let mut out = SolutionReport {
            generator: exp.generator + 1,
            multiple: exp.multiple,
            pipeline_verified: false,
            variables_match: false,
            printed_verified,
            matches_printed: None,
            erratum: exp.erratum.as_ref().map(|e| e.note.clone()),
            corrected_verified: None,
            identity: None,
            error: None,
        };
        let provenance = format!("{}:gen{}*{}", self.id, exp.generator + 1, exp.multiple);
        let gen = &self.generators[exp.generator];
        let solved = pipeline
            .curve()
            .scalar_mul(exp.multiple, gen)
            .and_then(|pt| Ok((pipeline.point_to_solution(&pt)?, pt)))
            .and_then(|(rat, pt)| Ok((pipeline.solve_point(&pt, provenance)?, rat)));
        let (sol, rational) = match solved {
            Ok(pair) => pair,
            Err(e) => {
                out.error = Some(e.to_string());
                return out;
            }
        };
        out.pipeline_verified = sol.verified && verify(&sol) && verify(&rational);
        out.variables_match = exp.printed_variables.iter().all(|(k, v)| rational.variable(k) == Some(v));
        let ours = CanonicalForm::of(&sol);
        out.matches_printed = exp.printed.as_ref().map(|p| CanonicalForm::of(p) == ours);
        if let Some(err) = &exp.erratum {
            out.corrected_verified = Some(verify(&err.corrected) && CanonicalForm::of(&err.corrected) == ours);
        }
        out.identity = Some(sol.to_string());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    /// 1-based generator index.
    pub generator: usize,
    pub multiple: i64,
    pub pipeline_verified: bool,
    pub variables_match: bool,
    pub printed_verified: Option<bool>,
    pub matches_printed: Option<bool>,
    pub erratum: Option<String>,
    pub corrected_verified: Option<bool>,
    pub identity: Option<String>,
    pub error: Option<String>,
}

impl SolutionReport {
    /// The pipeline identity verifies, and either the printed identity checks
    /// out and matches it, or an erratum supplies one that does.
    pub fn passed(&self) -> bool {
        let printed_ok = match (self.printed_verified, self.matches_printed) {
            (None, _) => true,
            (Some(v), m) => v && m == Some(true),
        };
        let errata_ok = self.corrected_verified == Some(true);
        self.pipeline_verified && self.variables_match && (printed_ok || errata_ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub description: String,
    pub claimed_rank: Option<u32>,
    pub curve: Option<String>,
    pub curve_match: bool,
    pub generators_on_curve: Vec<bool>,
    pub checks: Vec<Check>,
    pub solutions: Vec<SolutionReport>,
    pub passed: bool,
}

impl EntryReport {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }

    /// Human-readable reasons this entry failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.curve_match {
            out.push(format!("curve mismatch: got {}", self.curve.as_deref().unwrap_or("none")));
        }
        for (i, ok) in self.generators_on_curve.iter().enumerate() {
            if !ok {
                out.push(format!("generator {} is not on the curve", i + 1));
            }
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            out.push(format!("{}: {}", c.name, c.detail));
        }
        for s in self.solutions.iter().filter(|s| !s.passed()) {
            let what = match &s.error {
                Some(e) => e.clone(),
                None => format!(
                    "pipeline_verified={} variables_match={} printed_verified={:?} matches_printed={:?}",
                    s.pipeline_verified, s.variables_match, s.printed_verified, s.matches_printed
                ),
            };
            out.push(format!("solution gen{}*{}: {what}", s.generator, s.multiple));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<EntryReport>,
    pub passed: usize,
    pub failed: usize,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<8} {:>4}  {:<5} {:<5} {:<9} result", "id", "rank", "curve", "gens", "solutions");
        for e in &self.entries {
            let gens_ok = e.generators_on_curve.iter().filter(|&&b| b).count();
            let sols_ok = e.solutions.iter().filter(|s| s.passed()).count();
            let _ = writeln!(
                s,
                "{:<8} {:>4}  {:<5} {:<5} {:<9} {}",
                e.id,
                e.claimed_rank.map_or("-".into(), |r| r.to_string()),
                if e.curve_match { "ok" } else { "FAIL" },
                format!("{gens_ok}/{}", e.generators_on_curve.len()),
                format!("{sols_ok}/{}", e.solutions.len()),
                if e.passed { "PASS" } else { "FAIL" },
            );
            for f in e.failures() {
                let _ = writeln!(s, "    {f}");
            }
        }
        let _ = writeln!(s, "{} passed, {} failed", self.passed, self.failed);
        s
    }
}

/// The fixtures compiled into the library.
pub fn builtin() -> Result<Vec<Fixture>> {
    BUILTIN
        .iter()
        .map(|(id, text)| {
            Fixture::from_json(text).map_err(|e| match e {
                Error::Fixture { .. } => e,
                other => Error::Fixture { id: id.to_string(), message: other.to_string() },
            })
        })
        .collect()
}

/// Every `*.json` file in `dir`, in file-name order.
pub fn load_dir(dir: &Path) -> Result<Vec<Fixture>> {
    let io_err = |e: std::io::Error| Error::Fixture { id: dir.display().to_string(), message: e.to_string() };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(io_err)?;
            Fixture::from_json(&text).map_err(|e| match e {
                Error::Fixture { .. } => e,
                other => Error::Fixture { id: p.display().to_string(), message: other.to_string() },
            })
        })
        .collect()
}

/// Runs all fixtures in parallel; entries keep their input order.
pub fn run_all(fixtures: &[Fixture]) -> CorpusReport {
    let entries: Vec<EntryReport> = fixtures.par_iter().map(Fixture::run).collect();
    let passed = entries.iter().filter(|e| e.passed).count();
    CorpusReport { failed: entries.len() - passed, passed, entries }
}

/// The pipeline's identity for a fixture solution, for callers that want the
/// full record rather than the report summary.
pub fn solve_expected(fixture: &Fixture, index: usize) -> Result<IntegerSolution> {
    let exp = fixture
        .solutions
        .get(index)
        .ok_or_else(|| Error::Fixture { id: fixture.id.clone(), message: format!("no solution {index}") })?;
    let pipeline = Pipeline::new(fixture.problem.clone(), fixture.base_point.as_ref())?;
    let pt = pipeline.curve().scalar_mul(exp.multiple, &fixture.generators[exp.generator])?;
    pipeline.solve_point(&pt, format!("{}:gen{}*{}", fixture.id, exp.generator + 1, exp.multiple))
}
