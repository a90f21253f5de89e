//! Single-source baselines: spectral clustering on the network, k-means on the features.

mod kmeans;
mod spectral;

pub use kmeans::{kmeans, lloyd, KmeansFit};
pub use spectral::{spectral_clustering, spectral_embedding, SpectralConfig, SpectralEmbedding};
