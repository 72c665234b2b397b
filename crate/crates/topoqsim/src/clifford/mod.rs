//! Fock-space representation of Majorana vortices: states, exchanges,
//! parity observables, projective measurements, and the measurement-based
//! decomposition of braid unitaries.

pub mod decomposition;
pub mod measure;
pub mod operator;
pub mod space;
pub mod unitary;

pub use measure::{
    BornSampler, ForcedOutcomes, MeasurementOutcome, OccupancyOutcome, OutcomePicker,
};
pub use operator::ParityObservable;
pub use space::{gamma_action, FockSpace, StateVector, MAX_MODES};
pub use unitary::{braid_unitary, BraidWord, Exchange};
