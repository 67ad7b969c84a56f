//! Exact cohomology rings of the local models, their classes, and ring maps.

mod class;
mod map;
mod ring;

pub use class::{same_ring, CohClass};
pub use map::RingMap;
pub use ring::{Poly, RingKind, RingModel, Sparse};
