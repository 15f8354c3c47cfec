//! Short-hop highway routing and greedy long-hop routing.

pub mod flow;
pub mod highways;
pub mod longhop;
pub mod plan;

pub use highways::{build_highways, HighwayCensus, HighwaySystem, Orientation};
pub use longhop::{long_hop_route, LongHopResult};
pub use plan::{per_connection_rate, plan_routes, Bottleneck, ConnectionRate, ConnectionRoute, RoutePlan};
