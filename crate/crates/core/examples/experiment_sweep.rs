//! Small seeded sweep written as CSV to stdout.

use mms_multialloc::harness::{run_experiment, write_csv, ExperimentConfig, InstanceClass, Method, Overrides};
use mms_multialloc::DEFAULT_BUDGET;

fn main() -> mms_multialloc::Result<()> {
    let cfg = ExperimentConfig {
        master_seed: 1,
        trials: 3,
        n: vec![2, 3],
        m: vec![6],
        classes: vec![InstanceClass::Additive, InstanceClass::Threshold],
        methods: vec![Method::MonotoneGoods, Method::MonotoneChores, Method::AdditiveChores],
        overrides: Overrides::default(),
        budget: DEFAULT_BUDGET,
        timing: false,
        output: None,
    };
    let report = run_experiment(&cfg)?;
    for (cell, trial, msg) in &report.failures {
        eprintln!("cell {cell} trial {trial}: {msg}");
    }
    write_csv(&report.records, std::io::stdout())
}
