//! Balanced vertex separators for string graphs.
//!
//! The pipeline: estimate the all-pairs multicommodity vertex congestion of a
//! graph with a multiplicative-weights solver ([`congestion::vcong_mwu`]),
//! turn the dual vertex weighting into a 1-Lipschitz line embedding
//! ([`cutfinder::bourgain_line`]), round the embedding to a sparse vertex cut
//! by sweeping thresholds ([`cutfinder::sweep_round`]), and recurse until
//! every component is balanced ([`separator::build_separator`]).
//! [`drawing`] spot-checks the congestion bounds by sampling random path
//! systems, and [`geometry`] supplies exact-arithmetic string-graph instances
//! to run all of this on.
//!
//! Built with rayon data-parallel kernels by default; disable the `parallel`
//! feature for a strictly sequential build. Results are byte-identical either
//! way: every parallel reduction collects in a fixed order.

pub mod congestion;
pub mod cutfinder;
pub mod drawing;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod separator;

mod lp;
mod matching;
mod par;
mod shortest;

pub use error::{Error, Result};

/// Caps the global thread pool (0 = one thread per core). Call once, before
/// any parallel work. No-op in sequential builds.
pub fn init_threads(limit: usize) {
    #[cfg(feature = "parallel")]
    {
        if limit > 0 {
            // Ignore the error: the pool can only be configured once.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(limit)
                .build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = limit;
}
