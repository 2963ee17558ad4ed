//! Central sets (medial axes) of finite disk unions on the Euclidean plane,
//! the unit sphere and the hyperbolic plane, and a numerical verification
//! engine for Kneser–Poulsen-type area inequalities built on them.

pub mod ball_union;
pub mod central_set;
pub mod checker;
pub mod cli;
pub mod contraction;
pub mod geom;
pub mod random;
pub mod scene;
pub mod svg;

pub use ball_union::{BallConfiguration, BallPolytope, TopologyReport, UnionError};
pub use central_set::{CentralComplex, CentralSetError, Location, Subcomplex};
pub use contraction::{CenterMap, PiecewiseIsometry};
pub use geom::{Disk, GeodesicLine, GeomError, Isometry, Point, Surface};
