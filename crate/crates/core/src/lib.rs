//! Spectral clustering and testability of edge-weighted graphs through the
//! normalized modularity matrix
//!
//! ```text
//! M_D = D^{-1/2} W D^{-1/2} − √d √dᵀ
//! ```
//!
//! of a volume-normalized graph. Its spectrum lies in `[−1, 1]`; the
//! eigenvalues of largest magnitude carry the cluster structure (positive
//! ones communities, negative ones anti-communities), and the eigenvectors
//! give vertex representatives whose weighted k-means clustering yields
//! volume-regular cluster pairs.
//!
//! ```
//! use modspec::generators::{classical, Classical};
//! use modspec::spectral::decompose;
//!
//! let g = classical(Classical::TwoCliquesBridge(5)).unwrap();
//! let dec = decompose(&g).unwrap();
//! assert!(dec.mus()[0] > 0.9);
//! assert_eq!(dec.structural_count(0.4), 1);
//! ```

pub mod clustering;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod quality;
pub mod regularity;
pub mod rng;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{VertexSet, WeightedGraph};
pub use spectral::{decompose, SpectralDecomposition};

// Book chapters, compiled so that their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/modularity-matrix.md")]
    mod modularity_matrix {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/quality.md")]
    mod quality {}
    #[doc = include_str!("../../../book/src/regularity.md")]
    mod regularity {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
}
