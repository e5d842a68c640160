//! Khovanov homology of tangle diagrams.
//!
//! A diagram enters as an extended planar-diagram code ([`codec`]), is
//! resolved state by state ([`resolution`]), turned into a cube of linear
//! maps ([`cube`]) and finally a q-graded cochain complex whose homology is
//! computed exactly ([`homology`], [`linalg`]). [`moves`] rewrites diagrams
//! by Reidemeister moves and generates random ones for testing.

pub mod codec;
pub mod cube;
pub mod homology;
pub mod laurent;
pub mod linalg;
pub mod moves;
pub mod resolution;
mod union_find;

pub use codec::{parse_gauss_code, parse_pd_code, serialize_pd_code, CodecError, SignType, TangleDiagram};
pub use homology::{BigradedTable, HomologyError, HomologySummary};
pub use laurent::Laurent;
pub use linalg::FieldChoice;
