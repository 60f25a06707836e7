//! Exact computation of Khovanov-side and Heegaard-Floer-side invariants for
//! twisted knot families: planar diagrams and twist-box templates, Khovanov
//! homology over the rationals (naive cube and a delooping/cancellation scan),
//! the collapsed grading and its minimum `kappa`, skein long-exact-sequence
//! dimension checks, Legendrian front Thurston-Bennequin numbers, and integer
//! surgery mapping cones over F2 for CFK-style input complexes.

pub mod diagram;
pub mod hfcone;
pub mod homalg;
pub mod khovanov;
pub mod lescheck;
pub mod paperbench;

pub use diagram::{
    build_family, parse_family, parse_pd, FamilySpec, FrontDiagram, PlanarDiagram,
};
pub use hfcone::{
    build_As, cone_homology, constraint_check, default_window, epsilon, parse_cfk, tau, vh_maps,
    CfkComplex, CfkError, CfkGenerator, SurgeryReport, VhMaps,
};
pub use khovanov::{
    graded_euler_char, kappa, khovanov_homology, khovanov_homology_scan, BigradedDims,
    CollapsedHomology,
};
