//! Exact-arithmetic computations over finite sites: categories and nerves,
//! Grothendieck topologies, presheaves and sheafification, Cech and
//! nonabelian cohomology, natural-system cochain complexes, simplicial
//! machinery, groupoid-valued descent and stacks, and tree cell complexes.
//!
//! Everything is finite and exact: homology goes through Smith normal form
//! over arbitrary-precision integers, groupoid questions through bounded
//! exhaustive search.

pub mod cech;
pub mod error;
pub mod exact;
pub mod fincat;
pub mod groups;
pub mod presheaf;
pub mod site;
pub mod sset;

pub use error::{Budget, DescentError};
