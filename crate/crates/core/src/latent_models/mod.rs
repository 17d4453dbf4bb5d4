//! Latent-space generative modeling: Gaussian mixtures fitted by EM, latent
//! vector arithmetic, and decoders from codes back to point clouds.

mod algebra;
mod codes;
mod decoder;
mod em;
mod gmm;

pub use algebra::{analogy, apply_edit, attribute_vector, interpolate, GroupReduction};
pub use codes::LatentCodeSet;
pub use decoder::{decode, Decoder, ExternalDecoder, LinearDecoder};
pub use em::{fit_em, EmConfig, FitDiagnostics, GmmFit};
pub use gmm::{gmm_sample, log_likelihood, CovarianceType, Covariances, GmmModel};
