//! Capacity scaling of multi-antenna wireless backhaul networks.
//!
//! Deployments ([`geometry`]), line-of-sight MIMO channels ([`channel`]),
//! link rates under interference ([`linkrate`]), cut-set bounds and scaling
//! laws ([`bounds`]), highway and long-hop routing ([`routing`]), and the
//! seeded scenario drivers behind the `backhaul` CLI ([`experiments`]).
//!
//! ```
//! use backhaul::geometry::NetworkRealization;
//! use backhaul::routing::{build_highways, plan_routes};
//!
//! let net = NetworkRealization::lattice(12, 1.0, 0.0, 1).unwrap();
//! let plan = plan_routes(&net, &build_highways(&net, 1.0).unwrap()).unwrap();
//! assert_eq!(plan.unroutable(), 0);
//! ```

pub mod bounds;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod linkrate;
pub mod routing;
pub mod seed;

pub use error::{Error, Result};
