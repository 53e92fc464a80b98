//! Scenario runner: signaling derivatives, grid deviations, scheme
//! comparisons and cutoff-scaling fits.

mod run;
mod scenario;
mod sweep;

pub use run::{
    compare_schemes, richardson_derivative, run_scenario, CompareRow, ObservableSeries,
    SignalingReport,
};
pub use scenario::{
    Alice, BobObservable, CompiledSystem, FieldObservable, FieldSystem, Metric, OscillatorSystem,
    PacketTerm, Plan, Scenario, SchemeId, SpinSystem, SweepAxis, SweepSpec, System, SystemKind,
    SCENARIO_VERSION,
};
pub use sweep::{cutoff_sweep, Fit, SweepReport, Trend};

/// Compiles and runs `scenario`, including its attached sweep.
pub fn run(scenario: &Scenario) -> crate::Result<SignalingReport> {
    let plan = scenario.compile()?;
    let mut report = run_scenario(&plan)?;
    if let Some(spec) = &scenario.sweep {
        report.sweep = Some(cutoff_sweep(scenario, spec)?);
    }
    Ok(report)
}
