//! Exterior free boundary minimal catenoidal hypersurfaces in R^{n+1}:
//! construction of the family `C_alpha`, its explicit Jacobi fields, the
//! Morse index through a Robin-boundary Sturm–Liouville reduction, end
//! asymptotics, and numerical checks of the geometric identities.

pub mod catenoid;
pub mod ends;
pub mod error;
pub mod export;
pub mod geometry_checks;
pub mod jacobi;
pub mod numerics;
pub mod profile;
pub mod shooting;
pub mod spectrum;

pub use catenoid::{make_catenoid, CatenoidFamily, FlatSolution, Meridian, SurfacePoint};
pub use error::{Error, Result};
pub use profile::{profile, ProfileFunction};
