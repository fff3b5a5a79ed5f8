//! Frequency-coded single-photon QKD over a dispersive fiber: wavepacket
//! propagation, channel model, protocol Monte Carlo, and secrecy bounds.

pub mod channel;
pub mod error;
pub mod protocol;
pub mod security;
pub mod wavepacket;

pub use error::Error;
/// Complex dispersion coefficients appear throughout the public API.
pub use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
///
/// The output order is by index either way, so callers observe identical
/// results from both code paths.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential version of [`map_indexed`], always available so the parallel
/// path can be compared against it.
pub(crate) fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
