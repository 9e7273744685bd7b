//! The long-range electrical network on ℤ with conductances `m(|v − u|)`.

pub mod energy;
pub mod flow;
pub mod resistance;

pub use energy::{energy_bound, flow_energy, paper_energy_bound, BoundForm, FlowEnergy, Interval};
pub use flow::{block_index, dyadic_flow, verify_flow, Dyadic, FlowReport};
pub use resistance::{
    effective_resistance, effective_resistance_capped, resistance_profile, ResistancePoint,
    ResistanceProfile, DEFAULT_MAX_RADIUS,
};
