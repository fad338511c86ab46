//! Scenario files and reports.
//!
//! Inputs are TOML documents:
//!
//! ```toml
//! schema_version = "1"
//! model = "ideal"          # or "practical"
//!
//! [scenario]               # the fault population and techniques
//! [program]                # applications to evaluate or simulate
//! [constraints]            # optimizer constraints
//! [search]                 # optimizer grid and step
//! [template]               # parameterized scenario for sensitivity runs
//! [sensitivity]            # factors and eFAST settings
//! ```
//!
//! Every section is optional; commands check for the ones they need.
//! Unknown keys are rejected and all cross-references are resolved on load.
//! [`ScenarioFile::to_toml`] writes the canonical form, which loads back to
//! an equal value and reserializes to identical bytes.
//!
//! Reports are CSV (UTF-8, LF, reals with 17 significant digits) or plain
//! text tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::difficulty::{DifficultyCurve, Effort};
use crate::error::{Error, Result};
use crate::model::{
    CostBreakdown, CostModel, Detection, DocumentClass, Fault, FaultId, Program, Scenario, Technique,
    TechniqueId,
};
use crate::optimize::{Constraints, HeuristicOptions, OptimizationResult};
use crate::practical::{DefectType, DefectTypeId, PracticalScenario, PracticalTechnique};
use crate::sensitivity::{
    Factor, Grouping, IdealTemplate, OutputMeasure, PracticalTemplate, SampleMatrix, ScenarioTemplate,
    SensitivityDesign, SensitivityResult,
};
use crate::simulate::SimEstimate;

pub const SCHEMA_MAJOR: u32 = 1;
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ideal,
    Practical,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ideal => "ideal",
            ModelKind::Practical => "practical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedScenario {
    Ideal(Scenario),
    Practical(PracticalScenario),
}

impl LoadedScenario {
    pub fn cost_model(&self) -> &dyn CostModel {
        match self {
            LoadedScenario::Ideal(s) => s,
            LoadedScenario::Practical(s) => s,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            LoadedScenario::Ideal(_) => ModelKind::Ideal,
            LoadedScenario::Practical(_) => ModelKind::Practical,
        }
    }
}

/// Optimizer settings that are not constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    /// Efforts tried by the exhaustive search.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub effort_grid: Vec<Effort>,
    #[serde(default)]
    pub heuristic: HeuristicOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivitySpec {
    pub design: SensitivityDesign,
    pub output: OutputMeasure,
}

/// A validated input file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub schema_version: String,
    pub model: ModelKind,
    pub scenario: Option<LoadedScenario>,
    pub program: Option<Program>,
    pub constraints: Option<Constraints>,
    pub search: Option<SearchSettings>,
    pub template: Option<ScenarioTemplate>,
    pub sensitivity: Option<SensitivitySpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionEntry {
    fault: FaultId,
    removal_cost: f64,
    difficulty: DifficultyCurve,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TechniqueEntry {
    id: TechniqueId,
    #[serde(default)]
    name: String,
    setup_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    execution_cost_rate: Option<f64>,
    capable_classes: Vec<DocumentClass>,
    #[serde(default)]
    detections: Vec<DetectionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealSection {
    labour_rate: f64,
    faults: Vec<Fault>,
    techniques: Vec<TechniqueEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeEntry {
    defect_type: DefectTypeId,
    avg_removal_cost: f64,
    difficulty_slope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PracticalTechniqueEntry {
    id: TechniqueId,
    #[serde(default)]
    name: String,
    avg_setup_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    execution_cost_rate: Option<f64>,
    types: Vec<TypeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PracticalSection {
    labour_rate: f64,
    expected_fault_count: u32,
    defect_types: Vec<DefectType>,
    techniques: Vec<PracticalTechniqueEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensitivitySection {
    #[serde(default)]
    output: OutputMeasure,
    grouping: Grouping,
    samples_per_curve: usize,
    resamples: usize,
    #[serde(default = "default_interference")]
    interference: usize,
    factors: Vec<Factor>,
}

fn default_interference() -> usize {
    4
}

#[derive(Debug, Deserialize)]
struct Header {
    schema_version: String,
    model: ModelKind,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "S: Deserialize<'de>, T: Deserialize<'de>"))]
struct RawFile<S, T> {
    schema_version: String,
    model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scenario: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    program: Option<Program>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constraints: Option<Constraints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    search: Option<SearchSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    template: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sensitivity: Option<SensitivitySection>,
}

/// Converts a byte offset to 1-based line and column.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(text: &str, e: toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
    Error::Syntax {
        line,
        column,
        message: e.message().trim().to_string(),
    }
}

fn from_toml<D: DeserializeOwned>(text: &str) -> Result<D> {
    toml::from_str(text).map_err(|e| syntax(text, e))
}

fn check_schema(version: &str) -> Result<()> {
    let major = version.split('.').next().unwrap_or_default();
    if major.parse::<u32>() == Ok(SCHEMA_MAJOR) {
        Ok(())
    } else {
        Err(Error::SchemaVersion(version.to_string()))
    }
}

impl IdealSection {
    fn build(self) -> Result<Scenario> {
        let techniques = self
            .techniques
            .into_iter()
            .map(|t| {
                let mut detections = BTreeMap::new();
                for d in t.detections {
                    let entry = Detection {
                        removal_cost: d.removal_cost,
                        difficulty: d.difficulty,
                    };
                    if detections.insert(d.fault, entry).is_some() {
                        return Err(Error::invariant(
                            "unique_ids",
                            format!("technique {} lists fault {} twice", t.id, d.fault),
                        ));
                    }
                }
                Ok(Technique {
                    id: t.id,
                    name: t.name,
                    setup_cost: t.setup_cost,
                    execution_cost_rate: t.execution_cost_rate,
                    capable_classes: t.capable_classes.into_iter().collect(),
                    detections,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(self.labour_rate, self.faults, techniques)
    }

    fn from_scenario(s: &Scenario) -> Self {
        IdealSection {
            labour_rate: s.labour_rate(),
            faults: s.faults().to_vec(),
            techniques: s
                .techniques()
                .iter()
                .map(|t| TechniqueEntry {
                    id: t.id,
                    name: t.name.clone(),
                    setup_cost: t.setup_cost,
                    execution_cost_rate: t.execution_cost_rate,
                    capable_classes: t.capable_classes.iter().copied().collect(),
                    detections: t
                        .detections
                        .iter()
                        .map(|(&fault, d)| DetectionEntry {
                            fault,
                            removal_cost: d.removal_cost,
                            difficulty: d.difficulty,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl PracticalSection {
    fn build(self) -> Result<PracticalScenario> {
        let techniques = self
            .techniques
            .into_iter()
            .map(|t| {
                let mut avg_removal_cost = BTreeMap::new();
                let mut difficulty_slope = BTreeMap::new();
                for e in t.types {
                    if avg_removal_cost.insert(e.defect_type, e.avg_removal_cost).is_some() {
                        return Err(Error::invariant(
                            "unique_ids",
                            format!("technique {} lists defect type {} twice", t.id, e.defect_type),
                        ));
                    }
                    difficulty_slope.insert(e.defect_type, e.difficulty_slope);
                }
                Ok(PracticalTechnique {
                    id: t.id,
                    name: t.name,
                    avg_setup_cost: t.avg_setup_cost,
                    execution_cost_rate: t.execution_cost_rate,
                    avg_removal_cost,
                    difficulty_slope,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PracticalScenario::new(self.defect_types, self.expected_fault_count, techniques, self.labour_rate)
    }

    fn from_scenario(s: &PracticalScenario) -> Self {
        PracticalSection {
            labour_rate: s.labour_rate(),
            expected_fault_count: s.expected_fault_count(),
            defect_types: s.defect_types().to_vec(),
            techniques: s
                .techniques()
                .iter()
                .map(|t| PracticalTechniqueEntry {
                    id: t.id,
                    name: t.name.clone(),
                    avg_setup_cost: t.avg_setup_cost,
                    execution_cost_rate: t.execution_cost_rate,
                    types: t
                        .avg_removal_cost
                        .iter()
                        .map(|(&defect_type, &avg_removal_cost)| TypeEntry {
                            defect_type,
                            avg_removal_cost,
                            difficulty_slope: t.difficulty_slope[&defect_type],
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl SensitivitySection {
    fn into_spec(self) -> SensitivitySpec {
        SensitivitySpec {
            output: self.output,
            design: SensitivityDesign {
                factors: self.factors,
                grouping: self.grouping,
                samples_per_curve: self.samples_per_curve,
                resamples: self.resamples,
                interference: self.interference,
            },
        }
    }

    fn from_spec(s: &SensitivitySpec) -> Self {
        SensitivitySection {
            output: s.output,
            grouping: s.design.grouping,
            samples_per_curve: s.design.samples_per_curve,
            resamples: s.design.resamples,
            interference: s.design.interference,
            factors: s.design.factors.clone(),
        }
    }
}

fn assemble<S, T>(
    raw: RawFile<S, T>,
    scenario: impl FnOnce(S) -> Result<LoadedScenario>,
    template: impl FnOnce(T) -> ScenarioTemplate,
) -> ScenarioFileResult {
    Ok(ScenarioFile {
        schema_version: raw.schema_version,
        model: raw.model,
        scenario: raw.scenario.map(scenario).transpose()?,
        program: raw.program,
        constraints: raw.constraints,
        search: raw.search,
        template: raw.template.map(template),
        sensitivity: raw.sensitivity.map(SensitivitySection::into_spec),
    })
}

type ScenarioFileResult = Result<ScenarioFile>;

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let header: Header = from_toml(text)?;
    check_schema(&header.schema_version)?;
    let file = match header.model {
        ModelKind::Ideal => assemble(
            from_toml::<RawFile<IdealSection, IdealTemplate>>(text)?,
            |s| s.build().map(LoadedScenario::Ideal),
            ScenarioTemplate::Ideal,
        )?,
        ModelKind::Practical => assemble(
            from_toml::<RawFile<PracticalSection, PracticalTemplate>>(text)?,
            |s| s.build().map(LoadedScenario::Practical),
            ScenarioTemplate::Practical,
        )?,
    };
    file.validate()?;
    Ok(file)
}

impl ScenarioFile {
    /// Cross-section checks.
    pub fn validate(&self) -> Result<()> {
        let techniques = self.scenario.as_ref().map(|s| s.cost_model().technique_ids());
        if let (Some(program), Some(ids)) = (&self.program, &techniques) {
            check_program(program, ids)?;
        }
        if let Some(c) = &self.constraints {
            match &techniques {
                Some(ids) => c.validate(ids)?,
                None => return Err(Error::Config("[constraints] needs a [scenario] section".into())),
            }
        }
        if let Some(t) = &self.template {
            t.cost_terms()?;
        }
        if let Some(s) = &self.sensitivity {
            if self.template.is_none() {
                return Err(Error::Config("[sensitivity] needs a [template] section".into()));
            }
            s.design.validate_sampling()?;
            s.design.validate_bindings()?;
        }
        Ok(())
    }

    /// The cost model of the `[scenario]` section.
    pub fn cost_model(&self) -> Result<&dyn CostModel> {
        self.scenario
            .as_ref()
            .map(LoadedScenario::cost_model)
            .ok_or_else(|| Error::Config("file has no [scenario] section".into()))
    }

    /// Canonical TOML form.
    pub fn to_toml(&self) -> Result<String> {
        let sensitivity = self.sensitivity.as_ref().map(SensitivitySection::from_spec);
        let out = match self.model {
            ModelKind::Ideal => toml::to_string(&RawFile {
                schema_version: self.schema_version.clone(),
                model: self.model,
                scenario: match &self.scenario {
                    Some(LoadedScenario::Ideal(s)) => Some(IdealSection::from_scenario(s)),
                    None => None,
                    Some(_) => return Err(mixed_models()),
                },
                program: self.program.clone(),
                constraints: self.constraints.clone(),
                search: self.search.clone(),
                template: match &self.template {
                    Some(ScenarioTemplate::Ideal(t)) => Some(t.clone()),
                    None => None,
                    Some(_) => return Err(mixed_models()),
                },
                sensitivity,
            }),
            ModelKind::Practical => toml::to_string(&RawFile {
                schema_version: self.schema_version.clone(),
                model: self.model,
                scenario: match &self.scenario {
                    Some(LoadedScenario::Practical(s)) => Some(PracticalSection::from_scenario(s)),
                    None => None,
                    Some(_) => return Err(mixed_models()),
                },
                program: self.program.clone(),
                constraints: self.constraints.clone(),
                search: self.search.clone(),
                template: match &self.template {
                    Some(ScenarioTemplate::Practical(t)) => Some(t.clone()),
                    None => None,
                    Some(_) => return Err(mixed_models()),
                },
                sensitivity,
            }),
        };
        out.map_err(|e| Error::Numeric(format!("cannot serialize scenario: {e}")))
    }
}

fn mixed_models() -> Error {
    Error::Config("scenario and template sections disagree with the declared model".into())
}

fn check_program(program: &Program, techniques: &[TechniqueId]) -> Result<()> {
    let known: BTreeSet<_> = techniques.iter().collect();
    for a in &program.applications {
        if !known.contains(&a.technique) {
            return Err(Error::unresolved("technique", a.technique));
        }
    }
    Ok(())
}

/// Parses a program given either as TOML (`applications = [...]`) or
/// inline as `technique:hours` pairs separated by commas, e.g. `0:10,3:5`.
/// An empty string is the empty program.
pub fn parse_program(text: &str) -> Result<Program> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Program::default());
    }
    if trimmed.contains('=') || trimmed.starts_with('[') {
        return from_toml(text);
    }
    trimmed
        .split(',')
        .enumerate()
        .map(|(k, item)| {
            let bad = |message: String| Error::Syntax {
                line: 1,
                column: k + 1,
                message,
            };
            let (t, e) = item
                .split_once(':')
                .ok_or_else(|| bad(format!("expected technique:hours, got {item:?}")))?;
            let t: TechniqueId = t
                .trim()
                .parse()
                .map_err(|_| bad(format!("invalid technique id {t:?}")))?;
            let hours: f64 = e.trim().parse().map_err(|_| bad(format!("invalid effort {e:?}")))?;
            let effort = Effort::new(hours).map_err(|err| bad(err.to_string()))?;
            Ok((t, effort))
        })
        .collect::<Result<Vec<_>>>()
        .map(Program::new)
}

/// Checks a program against a loaded scenario.
pub fn check_program_against(program: &Program, model: &dyn CostModel) -> Result<()> {
    check_program(program, &model.technique_ids())
}

/// Formats a real with 17 significant digits, trimming redundant zeros
/// but always keeping one fractional digit.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-6..21).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        let _ = write!(out, "{head}.{tail}e{exp}");
        return out;
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits);
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            out.push_str(".0");
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Csv,
    #[default]
    Text,
}

/// Anything a command reports.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Breakdown(&'a CostBreakdown),
    Sensitivity {
        result: &'a SensitivityResult,
        seed: u64,
    },
    Optimum {
        result: &'a OptimizationResult,
        seed: Option<u64>,
    },
    Estimate {
        estimate: &'a SimEstimate,
        seed: u64,
    },
}

pub fn write_report(report: Report<'_>, format: ReportFormat) -> Vec<u8> {
    let mut out = String::new();
    match (report, format) {
        (Report::Breakdown(b), ReportFormat::Csv) => {
            out.push_str("direct,future,revenue,roi\n");
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_real(b.direct),
                format_real(b.future),
                format_real(b.revenue),
                format_real(b.roi)
            );
        }
        (Report::Breakdown(b), ReportFormat::Text) => {
            for (k, v) in [("direct", b.direct), ("future", b.future), ("revenue", b.revenue), ("roi", b.roi)] {
                let _ = writeln!(out, "{k:<10}{}", format_real(v));
            }
        }
        (Report::Sensitivity { result, .. }, ReportFormat::Csv) => {
            out.push_str("factor,first_order,total_order\n");
            for i in &result.indices {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    csv_field(&i.name),
                    format_real(i.first_order),
                    format_real(i.total_order)
                );
            }
        }
        (Report::Sensitivity { result, seed }, ReportFormat::Text) => {
            let _ = writeln!(out, "seed: {seed}");
            if result.degenerate {
                out.push_str("degenerate: model output is constant on a search curve; indices reported as 0\n");
            }
            let width = result.indices.iter().map(|i| i.name.len()).max().unwrap_or(0).max(6);
            let _ = writeln!(out, "{:<width$}  {:>20}  {:>20}", "factor", "first_order", "total_order");
            for i in result.ranked_by_total() {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>20}  {:>20}",
                    i.name,
                    format_real(i.first_order),
                    format_real(i.total_order)
                );
            }
        }
        (Report::Optimum { result, seed }, ReportFormat::Csv) => {
            out.push_str("seed,objective,evaluations,position,technique,effort\n");
            let seed = seed.map(|s| s.to_string()).unwrap_or_default();
            let head = format!("{seed},{},{}", format_real(result.objective), result.evaluations);
            if result.best_program.is_empty() {
                let _ = writeln!(out, "{head},,,");
            }
            for (k, a) in result.best_program.applications.iter().enumerate() {
                let _ = writeln!(out, "{head},{},{},{}", k + 1, a.technique, format_real(a.effort.hours()));
            }
        }
        (Report::Optimum { result, seed }, ReportFormat::Text) => {
            match seed {
                Some(s) => {
                    let _ = writeln!(out, "seed: {s}");
                }
                None => out.push_str("search: exhaustive\n"),
            }
            let _ = writeln!(out, "objective: {}", format_real(result.objective));
            let _ = writeln!(out, "evaluations: {}", result.evaluations);
            if result.best_program.is_empty() {
                out.push_str("program: (empty)\n");
            } else {
                out.push_str("position  technique  effort\n");
                for (k, a) in result.best_program.applications.iter().enumerate() {
                    let _ = writeln!(out, "{:<8}  {:<9}  {}", k + 1, a.technique, format_real(a.effort.hours()));
                }
            }
        }
        (Report::Estimate { estimate, seed }, ReportFormat::Csv) => {
            out.push_str(
                "seed,n,mean_direct,stderr_direct,mean_future,stderr_future,\
                 mean_revenue,stderr_revenue,mean_screened,stderr_screened\n",
            );
            let _ = write!(out, "{seed},{}", estimate.n);
            for s in [estimate.direct, estimate.future, estimate.revenue, estimate.screened] {
                let _ = write!(out, ",{},{}", format_real(s.mean), format_real(s.stderr));
            }
            out.push('\n');
        }
        (Report::Estimate { estimate, seed }, ReportFormat::Text) => {
            let _ = writeln!(out, "seed: {seed}");
            let _ = writeln!(out, "runs: {}", estimate.n);
            let _ = writeln!(out, "{:<10}{:>24}  {:>24}", "quantity", "mean", "stderr");
            for (k, s) in [
                ("direct", estimate.direct),
                ("future", estimate.future),
                ("revenue", estimate.revenue),
                ("screened", estimate.screened),
            ] {
                let _ = writeln!(out, "{k:<10}{:>24}  {:>24}", format_real(s.mean), format_real(s.stderr));
            }
        }
    }
    out.into_bytes()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `samples.csv`: one column per factor, one row per model evaluation.
pub fn write_samples_csv(samples: &SampleMatrix) -> Vec<u8> {
    let mut out = samples.names.iter().map(|n| csv_field(n)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &samples.rows {
        out.push_str(&row.iter().map(|&v| format_real(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// `output.csv`: the single column `y`, aligned with `samples.csv`.
pub fn write_output_csv(outputs: &[f64]) -> Vec<u8> {
    let mut out = String::from("y\n");
    for &y in outputs {
        out.push_str(&format_real(y));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn read_output_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "y" => {}
        _ => {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: "expected header `y`".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            l.trim().parse::<f64>().map_err(|_| Error::Syntax {
                line: k + 1,
                column: 1,
                message: format!("invalid number {l:?}"),
            })
        })
        .collect()
}
