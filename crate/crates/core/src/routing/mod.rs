//! Atom-array routing: grid transfers that realize the group actions
//! needed to couple ancillas with their data qubits.

pub mod actions;
pub mod grid;
pub mod shuffle;

pub use actions::{
    route_left_action, route_right_action, route_se_round, verify_se_round, Action, MonomialRoute, RoundRoute,
    RoundSummary, RouteOptions, Sector,
};
pub use grid::{GridTransfer, Lattice, MoveScript, RoutingError, ScriptSummary};
pub use shuffle::{permute_1d, riffle_shuffle};
