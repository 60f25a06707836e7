//! Link diagrams: PD codes, Morse-sequence construction, parametric knot
//! families and Legendrian fronts.

pub mod annulus;
mod builder;
mod families;
mod front;
mod pd;

pub use builder::{braid_closure, pretzel, Cross, MorseBuilder};
pub use families::{build_family, marked_crossing, parse_family, Family, FamilyError, FamilySpec, Form};
pub use front::{build_front_kn, front_tb, FrontDiagram, FrontEvent};
pub use pd::{parse_pd, DiagramError, DiagramSummary, PlanarDiagram};
