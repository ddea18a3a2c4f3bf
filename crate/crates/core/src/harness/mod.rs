//! Experiment configuration, training runs, bound verification and result files.

mod config;
mod plots;
mod runner;
mod sweep;
mod verify;

pub use config::{AllTag, LandscapeKind, ModeSelection, RunConfig, Scenario, SweepConfig, VerifyConfig};
pub use plots::{emit_plots, ACCURACY_VS_K_CSV, SWEEP_CSV, VERIFY_CSV};
pub use runner::{
    run_experiment, run_feel, run_on, scenario_bound_params, write_records, Problem, RoundRecord,
    RunOutcome, RunSummary, TEST_FRACTION,
};
pub use sweep::{sweep_bounds, sweep_points, write_sweep, SweepPoint, SweepRow};
pub use verify::{
    grid, simulate_errors, verify_perr, verify_point, write_verify, PerrPoint, PerrScenario,
    VerifyRow,
};
