//! Electro-optic sampling of THz vacuum and source field correlations.

pub mod analysis;
pub mod config;
pub mod correlators;
pub mod dielectric;
pub mod error;
pub mod fdt;
pub mod io;
pub mod numerics;
pub mod signal;
pub mod units;

pub use analysis::{AnalysisConfig, RawTraceSet};
pub use config::RunConfig;
pub use correlators::CorrelatorSample;
pub use dielectric::{CrystalParams, DielectricModel};
pub use error::{Error, Result};
pub use fdt::FdtReport;
pub use signal::{ComplexSpectrum, ExperimentGeometry, SignalKind, TimeTrace};
