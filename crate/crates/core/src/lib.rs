//! Tile-set synthesis for coloured rectangular patterns under the abstract
//! Tile Assembly Model, with exact and heuristic partition search, an ASP
//! bridge and a kinetic reliability model.

pub mod asp;
pub mod atam;
pub mod dsu;
pub mod error;
pub mod ktam;
pub mod mgta;
pub mod partition;
pub mod pattern;
pub mod search;

pub use atam::{Assembly, SeedAssembly, TileSystem, TileType, Verdict};
pub use error::{AssemblyError, KineticError, ParseError, PartitionError};
pub use mgta::{Constructibility, MgtaState};
pub use partition::{colour_partition, ColourPartition, Partition};
pub use pattern::{Colour, Pattern};
