//! Exact tools for enumerating and checking the isotropy weights of circle
//! actions with isolated fixed points: multigraphs, edge magnitudes,
//! localization identities and Hattori's Laurent-polynomial constraints.

pub mod classify;
pub mod error;
pub mod fixtures;
pub mod graphs;
pub mod hattori;
pub mod laurent;
pub mod linalg;
pub mod localization;
pub mod magnitudes;
pub mod model;
pub mod verify;

pub use error::{Error, Result};
pub use model::{CanonicalKey, MagnitudeLabeling, Multigraph, Profile, WeightSystem, WeightedMultigraph};
