//! Forward model curves and fits against count data.

mod chisq;
mod fidelity;
mod fringe;
mod model;

pub use chisq::{chi_squared, ChiSquared};
pub use fidelity::{fit_fidelity, grid_from_range, FidelityEstimate, FidelityModel};
pub use fringe::{fit_fringe, fit_sinusoid, FringeFit};
pub use model::{model_curves, CountData, RamseyProbe, ScanSpec, ScanVariable};
