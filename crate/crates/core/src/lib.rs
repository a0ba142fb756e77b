//! Fair division of indivisible goods.
//!
//! Four allocation rules over additive valuations, with the certificates used
//! to audit them:
//!
//! * [`maxsum`]: utilitarian, each item to an agent who values it most;
//! * [`leximin`]: fractional leximin via iterated linear programs;
//! * [`propm`]: integral PROPm (proportional up to the maximin item);
//! * [`mms`]: three-quarters maximin-share approximation, the exact MMS
//!   oracle, and the leftover completion pass.
//!
//! [`bench`] runs all four over a corpus and aggregates welfare and
//! egalitarian metrics by number of agents.

pub mod algorithm;
pub mod bench;
pub mod leximin;
pub mod lp;
pub mod maxsum;
pub mod mms;
pub mod model;
pub mod propm;

pub use algorithm::Algorithm;
pub use leximin::{allocate_leximin, check_leximin_dominance, LeximinError, LeximinState};
pub use maxsum::allocate_maxsum;
pub use mms::{
    allocate_mms34, complete_leftovers, mms_exact, mms_ratio, MmsError, MmsProfile, MmsValue,
    ReductionTrace,
};
pub use model::{
    min_utility, sum_utility, utilities, validate_instance, Allocation, Instance, ModelError,
    UtilityVector, EPS,
};
pub use propm::{allocate_propm, check_propm, PropmCertificate};
