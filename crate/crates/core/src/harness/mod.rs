//! Bound calculators, the diameter-theorem pipeline, instance generators
//! and the suite runner behind the command-line tool.

pub mod bounds;
pub mod instances;
pub mod pipeline;
pub mod report;
pub mod suite;

pub use bounds::{bound_calculator, bound_calculator_ln, BoundReport, ChainReplay};
pub use instances::{enumerate_instances, Generator};
pub use pipeline::{theorem1_pipeline, Theorem1Report};
pub use suite::{run_suite, run_suite_with, CheckName, CheckOutcome, LemmaCheck, SuiteConfig, SuiteReport};
