pub mod basis;
pub mod cardinal;
pub mod constants;
pub mod cutoff;
pub mod error;
pub mod evolve;
mod fft;
pub mod fit;
pub mod harness;
pub mod lattice;
pub mod multiplier;
pub mod quadrature;
pub mod spectral;
pub mod symbols;

pub use basis::{make_basis, BasisFunction, BasisSpec, Decay, Family};
pub use cardinal::{CardinalFunction, CardinalSymbol};
pub use error::{Error, Result};
pub use lattice::LatticeSumParams;
pub use quadrature::{QuadResult, QuadratureGrid};
pub use spectral::{DensitySpec, SpectralDensity, Weight};
pub use cutoff::CutoffSpec;
pub use symbols::{make_symbol, levy_symbol, LevySpec, Symbol, SymbolSpec};
pub use multiplier::{heat_multiplier, scheme_multiplier, MultiplierField, SchemeMultiplier};
pub use constants::{ConstantsReport, ReportOptions};
pub use evolve::{generator_stencil, integrate_mol, GeneratorStencil, LatticeState, TimeIntegrator};
pub use harness::{run_study, ExperimentConfig, StudyKind, StudyResult};
