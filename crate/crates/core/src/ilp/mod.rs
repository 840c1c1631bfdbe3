//! k-path ILP models (MinPathError and LeastSquares), safe-sequence
//! variable fixing, LP/MPS export and an exact solver for tiny instances.

mod lp;
mod model;
mod nnls;
mod simplex;
mod tiny;

pub use lp::{parse_mps, LinearProgram, Row, Sense, VarKind, Variable};
pub use model::{
    apply_safety_fixing, build_model, fixing_statistics, percentile_subset, safety_mode,
    FixRecord, FixingStatistics, IlpModel, Problem, SafetyLevel,
};
pub use nnls::nnls;
pub use simplex::{minimize, Constraint, LpOutcome};
pub use tiny::{assignment, is_valid_solution, solve_tiny, solve_tiny_model, PathSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Lp,
    Mps,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lp" => Ok(ExportFormat::Lp),
            "mps" => Ok(ExportFormat::Mps),
            other => Err(format!("unknown export format {:?} (expected lp or mps)", other)),
        }
    }
}

pub fn export_model(model: &IlpModel, format: ExportFormat) -> String {
    match format {
        ExportFormat::Lp => model.lp.to_lp(),
        ExportFormat::Mps => model.lp.to_mps(),
    }
}
