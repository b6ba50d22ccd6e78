//! Complex symmetry of composition operators with linear fractional symbols
//! on the Hardy space H²(D), with finite-section numerical verification.

pub mod cli;
pub mod compop;
pub mod hardy;
pub mod mobius;
pub mod conjfinder;
pub mod csym;
pub mod paperchecks;
