//! Command-line front end: single points, sweeps, figure datasets and the
//! oracle validation suite.

pub mod claims;
pub mod config;
pub mod figure;
pub mod sweep;
pub mod validate;

pub use config::{Config, ConfigError};
pub use figure::{FigureId, FigureJob};
pub use sweep::{write_csv, Axis, AxisRange, Evaluation, Row, RowStatus, SweepError, SweepSpec};
pub use validate::{GridLevel, Mutation, SuiteReport, ValidateOptions, ValidationReport};
