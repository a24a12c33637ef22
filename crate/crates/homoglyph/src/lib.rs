//! Homoglyph (name spoofing) detection.
//!
//! Strings are rasterized into fixed-size binary images, embedded into a
//! 32-dimensional metric space by a small convolutional network trained with
//! a Siamese contrastive loss, and matched against a whitelist of protected
//! names through a forest of randomized KD-Trees. A query whose embedding
//! lands within a distance threshold of a whitelisted name is reported as a
//! spoof.
//!
//! The crate is organized along the pipeline:
//!
//! - [`render`] — deterministic rasterization of names into 150×12 binary images
//! - [`net`] — the convolutional embedder: forward, hand-derived backward,
//!   RMSProp updates and the training loop
//! - [`index`] — randomized KD-Tree forest with a checks-budget query, plus an
//!   exact linear-scan oracle
//! - [`corpus`] — dataset synthesis: edit-distance mining of benign pairs and
//!   confusable-table spoof generation
//! - [`baselines`] — edit distance and visually weighted edit distance scorers
//! - [`eval`] — ROC/AUC, recall-vs-checks timing, edit-distance histograms and
//!   PCA projections
//!
//! All numeric kernels are generic over the scalar type through [`Real`];
//! the reference pipeline instantiates them at `f64` (the aliases below).

use sha2::{Digest, Sha256};

pub mod baselines;
pub mod corpus;
pub mod eval;
pub mod index;
pub mod net;
pub mod render;

/// Scalar type accepted by the numeric kernels (`f32`, `f64`).
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssignOps
    + std::iter::Sum
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + num_traits::NumAssignOps
        + std::iter::Sum
        + std::fmt::Debug
        + Send
        + Sync
        + 'static
{
}

/// Dimension of the learned embedding space.
pub const EMBED_DIM: usize = 32;

/// The pipeline scalar. Training contracts require double precision; `f32`
/// instantiations of the kernels are available for inference-only use.
pub type Scalar = f64;

/// [`net::WeightSet`] at the pipeline scalar.
pub type WeightSet = net::WeightSet<Scalar>;
/// [`net::FeatureVector`] at the pipeline scalar.
pub type FeatureVector = net::FeatureVector<Scalar>;
/// [`index::KdForest`] at the pipeline scalar.
pub type KdForest = index::KdForest<Scalar>;

/// The bundled font face, pinned by [`BUNDLED_FONT_SHA256`].
pub const BUNDLED_FONT: &[u8] = include_bytes!("../data/DejaVuSans.ttf");

/// SHA-256 of [`BUNDLED_FONT`]; rendering output is only reproducible
/// against this exact file.
pub const BUNDLED_FONT_SHA256: &str =
    "3fdf69cabf06049ea70a00b5919340e2ce1e6d02b0cc3c4b44fb6801bd1e0d22";

/// Identifier recorded for the bundled face.
pub const BUNDLED_FONT_ID: &str = "DejaVuSans";

pub(crate) const BUNDLED_CONFUSABLES_TSV: &str = include_str!("../data/confusables.tsv");

/// Lowercase hex SHA-256 digest. Used to pin data files in manifests and
/// to tie model and index files to the font they were produced with.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        write!(out, "{byte:02x}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_font_checksum_matches() {
        assert_eq!(sha256_hex(BUNDLED_FONT), BUNDLED_FONT_SHA256);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
