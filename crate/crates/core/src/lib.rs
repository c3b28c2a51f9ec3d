//! Spectra, Fredholm classification and essential spectra of weighted
//! composition operators `T f = w * (f o phi)` on `C(K)`, where `(K, phi)` is
//! presented as invariant blocks joined by isolated-point trajectories.
//!
//! Everything is generic over [`Scalar`]; [`Rational`] inputs make every
//! threshold comparison exact.

pub mod classifier;
pub mod cycle_means;
pub mod error;
pub mod essential;
pub mod io;
pub mod model;
pub mod oracle;
pub mod partition;
pub mod sample;
pub mod scalar;
pub mod spectral_set;
pub mod verify;

pub use classifier::{classify, crossing_exists, Direction, FredholmReport, FredholmStatus, SigmaMembership};
pub use cycle_means::{block_radial_spectrum, scc_decompose, BlockSpectrumSummary, WeightedDigraph};
pub use error::{Result, Rule, SpectraError, Violation};
pub use essential::{essential_spectra, sigma5_by_components, sigma_term, EssentialSpectra};
pub use model::{
    Anchor, AperiodicBlock, Block, ClopenPeriodicBlock, CoreEntry, CycleBlock, Lambda, LogWeight, ProductSpec,
    SystemDescription, SystemDraft, Trajectory,
};
pub use partition::{full_spectrum, one_sided, OneSided, OneSidedResult, PartitionAssignment, SystemAnalysis};
pub use scalar::{rational, Rational, Scalar};
pub use spectral_set::SpectralSet;

pub type ExactSystem = SystemDescription<Rational>;
pub type FloatSystem = SystemDescription<f64>;
pub type ExactSet = SpectralSet<Rational>;
pub type FloatSet = SpectralSet<f64>;
pub type ExactLambda = Lambda<Rational>;
pub type FloatLambda = Lambda<f64>;
