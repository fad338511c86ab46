//! Cost-benefit models for software defect-detection techniques.
//!
//! The crate provides the ideal fault-level model ([`model`]), the
//! defect-type based practical model ([`practical`]), a Monte-Carlo
//! simulator used as an independent oracle ([`simulate`]), extended-FAST
//! sensitivity analysis ([`sensitivity`]), an optimizer for technique
//! programs ([`optimize`]) and the scenario file format ([`io`]).

pub mod difficulty;
pub mod error;
pub mod io;
pub mod model;
pub mod optimize;
pub mod practical;
pub mod random;
pub mod seed;
pub mod sensitivity;
pub mod simulate;

pub use difficulty::{CurveForm, DifficultyCurve, Effort};
pub use error::{Error, Result};
pub use model::{
    roi, Application, CostBreakdown, CostModel, CostTerms, Detection, DocumentClass, Fault, FaultId,
    Program, Scenario, StandardTechnique, Technique, TechniqueId,
};
pub use practical::{DefectType, DefectTypeId, PracticalScenario, PracticalTechnique};
pub use simulate::{SimEstimate, SimOutcome, Simulator, Statistic};
