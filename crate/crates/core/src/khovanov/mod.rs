//! Khovanov homology over the rationals, its collapsed grading, and kappa.
//!
//! Two engines compute the same bigraded dimensions: a naive cube of
//! resolutions (`cube_complex`, size-guarded, kept as the reference) and a
//! scan-order simplification engine (`khovanov_homology_scan`) that deloops
//! circles and cancels isomorphisms crossing by crossing. Gradings are
//! reported with both signs flipped relative to the usual internal cube
//! convention, so the unknot sits at (0, -1) and (0, 1) and kappa of the
//! unknot is -1.

mod cube;
mod dims;
mod scan;

pub use cube::{
    cube_complex, cube_complex_with_limit, khovanov_homology, khovanov_homology_with_limit,
    DEFAULT_NAIVE_LIMIT,
};
pub use dims::{collapse, graded_euler_char, BigradedDims, CollapsedHomology, LaurentPoly};
pub use scan::khovanov_homology_scan;

use crate::diagram::PlanarDiagram;

#[derive(Debug, thiserror::Error)]
pub enum KhError {
    #[error("diagram has {crossings} crossings, naive cube limited to {limit}")]
    TooManyCrossings { crossings: usize, limit: usize },
}

/// The minimum of i - j over the support of the bigraded homology.
pub fn kappa(d: &PlanarDiagram) -> Result<i32, KhError> {
    let h = khovanov_homology_scan(d)?;
    Ok(collapse(&h).kappa().expect("nonempty link has nonzero homology"))
}
