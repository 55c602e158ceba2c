//! Access-model oracles and the encoding unitaries built from them.

mod distribution;
mod encoders;
pub mod io;
mod purified;

pub use crate::ledger::{QueryCounts, QueryKind, QueryLedger};
pub use distribution::{Distribution, SampleSpace, MAX_BITS};
pub use encoders::{
    closeness_problem, closeness_unitary, kwise_problem, kwise_unitary, subset_registers, u_copy,
    u_tilde, v_k, CLOSENESS_CONTROL, COPY_REGISTER,
};
pub use purified::{
    from_discrete_oracle, from_pure_state_oracle, haar_unitary, make_purified_oracle, GarbageStyle,
    PurifiedOracle, WORKSPACE_REGISTER,
};
