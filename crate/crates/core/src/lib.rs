//! Symmetry-preserving finite-difference schemes for the 1-D heat transfer
//! equation with a source,
//!
//! ```text
//! u_t = (K(u) u_x)_x + Q(u).
//! ```
//!
//! For every special pair (K, Q) that enlarges the Lie point symmetry group
//! of the equation, this crate provides the difference scheme and the mesh
//! that inherit the full group: orthogonal uniform grids, invariant
//! log-spaced time grids, orthogonal grids that are nonuniform in space,
//! moving (evolutionary) meshes with flat time layers, and Lagrangian
//! mass-coordinate grids.
//!
//! The main pieces:
//!
//! * [`model`] — the group classification: which (K, Q) cases admit which
//!   generators, meshes and schemes, and how the cases map into one another.
//! * [`symmetry`] — numerical Lie machinery: one-parameter group flows,
//!   stencil transport, mesh-geometry invariance conditions, and the
//!   invariance audit that measures how well a scheme survives a flow.
//! * [`meshes`] — invariant time meshes and mass-coordinate grid setup.
//! * [`schemes`] — every difference model as a stencil residual plus a
//!   layer-to-layer stepper.
//! * [`transforms`] — the point changes of variables linking the cases,
//!   acting on points, layers and whole discrete solutions.
//! * [`conservation`] — discrete conservation-law checkers for the
//!   mass-coordinate scheme.
//! * [`exact`] — closed-form reference solutions, including the
//!   fundamental-solution family that the moving-mesh model integrates
//!   exactly.

pub mod audit;
pub mod conservation;
pub mod error;
pub mod exact;
pub mod invariants;
pub mod meshes;
pub mod model;
pub mod schemes;
pub mod stencil;
pub mod symmetry;
pub mod transforms;

pub use error::{Error, Result};
pub use meshes::{Layer, TimeMesh};
pub use model::{HeatModel, KFamily, MeshClass, ModelEntry, QFamily};
pub use schemes::{Boundary, SchemeId, SchemeParams, StepResult};
pub use stencil::{MassStencil, Stencil};
pub use symmetry::{MeshConditionReport, SymmetryGenerator};
pub use transforms::TransformId;
