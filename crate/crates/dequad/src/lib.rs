//! Double-exponential quadrature with singularity-aware conformal maps.
//!
//! The classic DE (tanh-sinh) formula loses its fast convergence when the
//! integrand has singularities close to the integration path, because the
//! effective strip of analyticity shrinks. This crate restores the full
//! strip width π/2 by composing the usual interval map with a closed-form
//! conformal map onto a slit plane whose slits cover the singularities:
//!
//! ```text
//! H(t) = C sinh(t − T) + Σⱼ 2 Dⱼ arctan(e^{t−bⱼ}) + D₀
//! ```
//!
//! The map's parameters are calibrated by a damped Newton solve so the
//! boundary of the strip threads exactly between the singularity tips.
//!
//! Modules:
//! - [`endpoint_maps`]: interval-specific ψ-maps and singularity preimages.
//! - [`transform`]: the slit map H, its derivative, and the cheap variant.
//! - [`calibration`]: the nonlinear parameter solve and its validation.
//! - [`quadrature`]: trapezoid evaluation, mesh selection, and sweeps.
//! - [`problems`]: built-in benchmark integrands and the JSON problem format.
//! - [`oracle`]: independent adaptive Gauss–Kronrod reference values.
//! - [`cli`]: the `dequad` command-line front end.

pub mod calibration;
pub mod cli;
pub mod endpoint_maps;
pub mod error;
pub mod oracle;
pub mod problems;
pub mod quadrature;
pub mod transform;

pub use error::{Error, Result};
