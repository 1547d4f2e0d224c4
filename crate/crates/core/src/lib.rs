//! Phase sensitivity and quantum Fisher information of a lossy Mach–Zehnder
//! interferometer fed with a coherent state and squeezed vacuum, with `m`
//! photons added either at the coherent input port (scheme A) or inside the
//! interferometer (scheme B).
//!
//! All φ-derivatives are carried analytically by [`DualComplex`].

pub mod dual;
pub mod genfun;
pub mod metrology;
pub mod params;

pub use dual::DualComplex;
pub use metrology::{Detector, MetrologyError, QfiReport, SensitivityReport};
pub use params::{chi_omega, ExperimentParams, ParamError, Scheme, DEFAULT_MAX_ADDED};
