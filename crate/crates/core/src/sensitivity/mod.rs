//! Variance-based global sensitivity analysis of the cost models.
//!
//! A [`SensitivityDesign`] lists uncertain input factors with their
//! marginal distributions and how each sampled value binds into a
//! [`ScenarioTemplate`]. [`efast_indices`] turns any real-valued model into
//! first-order and total-order indices; [`analyze_template`] runs the whole
//! pipeline against a scenario template.

mod binding;
mod distribution;
mod efast;
pub mod presets;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use binding::{
    analyze_template, bind, bind_and_evaluate, FaultSpec, IdealTemplate, OutputMeasure,
    PracticalTechniqueSpec, PracticalTemplate, ScenarioTemplate, TechniqueEffort, TechniqueSpec,
    TemplateAnalysis,
};
pub use distribution::FactorDistribution;
pub use efast::{analyze_outputs, efast_indices, generate_samples, FrequencyPlan, SampleMatrix};

use crate::error::{Error, Result};
use crate::model::TechniqueId;

/// Where a sampled factor value goes.
///
/// Targets with a `technique` selector apply to that technique only
/// (detailed grouping) or to every technique when it is absent (abstract
/// grouping). Categorical targets round the value to an index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case", deny_unknown_fields)]
pub enum Binding {
    Effort {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        technique: Option<TechniqueId>,
    },
    SetupCost {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        technique: Option<TechniqueId>,
    },
    RemovalCost {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        technique: Option<TechniqueId>,
    },
    /// Average difficulty; curve parameters are re-derived from it.
    MeanDifficulty {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        technique: Option<TechniqueId>,
    },
    /// Index into exponential, linear, constant, sigmoid.
    DifficultyForm {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        technique: Option<TechniqueId>,
    },
    FieldRemovalCost,
    FieldEffectCost,
    FailureProbability,
    LabourRate,
    /// Index into the template's technique sequences.
    Sequence,
    /// Index into the template's fault class patterns.
    DefectClass,
    /// Number of predecessors per fault.
    Predecessors,
    /// Fraction of the first defect type; the others are rescaled.
    DefectFraction,
    /// A plain model input, for closed-form models; not bindable into a
    /// scenario.
    Variable,
}

impl Binding {
    pub fn technique(&self) -> Option<TechniqueId> {
        match self {
            Binding::Effort { technique }
            | Binding::SetupCost { technique }
            | Binding::RemovalCost { technique }
            | Binding::MeanDifficulty { technique }
            | Binding::DifficultyForm { technique } => *technique,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub name: String,
    pub distribution: FactorDistribution,
    pub binding: Binding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// One factor per quantity, shared by all techniques.
    Abstract,
    /// Per-technique factors allowed.
    Detailed,
}

/// Factors plus eFAST sampling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityDesign {
    pub factors: Vec<Factor>,
    pub grouping: Grouping,
    /// Points per search curve, `Ns` (odd).
    pub samples_per_curve: usize,
    /// Random-phase resamples per factor, `Nr`.
    pub resamples: usize,
    /// Interference order `M`.
    #[serde(default = "default_interference")]
    pub interference: usize,
}

fn default_interference() -> usize {
    4
}

impl SensitivityDesign {
    /// Checks everything needed to sample: factor names, distributions and
    /// the frequency budget.
    pub fn validate_sampling(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::Design("design has no factors".into()));
        }
        let mut names = BTreeSet::new();
        for f in &self.factors {
            if !names.insert(f.name.as_str()) {
                return Err(Error::Design(format!("duplicate factor name {:?}", f.name)));
            }
            f.distribution
                .validate()
                .map_err(|e| Error::Design(format!("factor {:?}: {e}", f.name)))?;
        }
        if self.resamples == 0 {
            return Err(Error::Design("resamples must be at least 1".into()));
        }
        FrequencyPlan::new(self.samples_per_curve, self.interference, self.factors.len())?;
        Ok(())
    }

    /// Checks that every factor binds to a distinct scenario field and that
    /// the grouping is respected.
    pub fn validate_bindings(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for f in &self.factors {
            if f.binding == Binding::Variable {
                return Err(Error::Design(format!(
                    "factor {:?} is not bound to any scenario field",
                    f.name
                )));
            }
            if self.grouping == Grouping::Abstract && f.binding.technique().is_some() {
                return Err(Error::Design(format!(
                    "factor {:?} binds a single technique, which the abstract grouping does not allow",
                    f.name
                )));
            }
            if !seen.insert(&f.binding) {
                return Err(Error::Design(format!(
                    "factor {:?} binds the same field as an earlier factor",
                    f.name
                )));
            }
        }
        Ok(())
    }

    pub fn factor_names(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorIndices {
    pub name: String,
    pub first_order: f64,
    pub total_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityResult {
    /// One entry per factor, in declaration order.
    pub indices: Vec<FactorIndices>,
    /// Some search curve produced a constant output; indices are reported
    /// as zero.
    pub degenerate: bool,
}

impl SensitivityResult {
    pub fn get(&self, name: &str) -> Option<&FactorIndices> {
        self.indices.iter().find(|i| i.name == name)
    }

    /// Indices sorted by descending total order, ties by name.
    pub fn ranked_by_total(&self) -> Vec<&FactorIndices> {
        let mut v: Vec<_> = self.indices.iter().collect();
        v.sort_by(|a, b| {
            b.total_order
                .total_cmp(&a.total_order)
                .then_with(|| a.name.cmp(&b.name))
        });
        v
    }

    /// Indices sorted by descending first order, ties by name.
    pub fn ranked_by_first(&self) -> Vec<&FactorIndices> {
        let mut v: Vec<_> = self.indices.iter().collect();
        v.sort_by(|a, b| {
            b.first_order
                .total_cmp(&a.first_order)
                .then_with(|| a.name.cmp(&b.name))
        });
        v
    }
}
