//! Compactification of finite and finitely presented selfmap systems.
//!
//! Given a map `T` from a set to itself whose iterated images shrink to a
//! single fixed point — the *star* — this crate builds a compact order
//! topology on the set, one atom at a time, and emits a machine-checkable
//! witness of the construction:
//!
//! 1. **Condition check** — the iterated images `TⁿX` must intersect in
//!    exactly one point ([`check_condition`], [`check_condition_ray`]).
//! 2. **Forest decomposition** — away from the star, points fall into
//!    classes whose forward orbits merge; each class is a tree and splits
//!    into exact-depth levels ([`decompose`], [`first_kind_chain`],
//!    [`second_kind_branches`]).
//! 3. **Atomization** — each level chain gets a pair of finite partition
//!    families: a backward pushforward pass (`π`) and a forward relating
//!    pass (`λ`) whose blocks — the *atoms* — map onto each other level by
//!    level ([`atomize_chain`]).
//! 4. **Well-orders** — bottom atoms are well-ordered and the orders are
//!    lifted lexicographically, making every level map order-preserving
//!    ([`compactify_chain`]).
//! 5. **Witness** — atom orders plus per-point addresses and certificates
//!    assemble into a [`TopologyWitness`] ([`build_witness`]), which the
//!    independent [`checker`] re-derives from scratch ([`verify_witness`]).
//!
//! The [`pipeline`] module chains all of this behind one call with a stable
//! exit-code contract, and [`dot`] renders systems and witnesses for
//! graphviz.
//!
//! ```
//! use compactify::{build_witness, verify_witness, Instance, SelfmapSystem};
//!
//! let system = SelfmapSystem::new(vec![0, 0, 0, 1])?;
//! let instance = Instance::finite(system);
//! let witness = build_witness(&instance)?;
//! assert_eq!(witness.star, Some(0));
//! assert!(verify_witness(&instance, &witness)?.passed);
//! # Ok::<(), compactify::Error>(())
//! ```

pub mod chain;
pub mod checker;
pub mod dot;
pub mod error;
pub mod forest;
pub mod generate;
pub mod instance;
pub mod order;
pub mod partition;
pub mod pipeline;
pub mod ray;
pub mod system;
pub mod witness;

pub use chain::{atomize_chain, verify_atomization, Atomization, Chain};
pub use checker::{
    verify_continuity_at_star, verify_witness, CheckReport, RuleId, Violation,
};
pub use error::{Error, Result};
pub use forest::{
    decompose, first_kind_chain, second_kind_branches, BranchStructure, ClassDecomposition,
    ClassKind, OrbitClass,
};
pub use generate::{gen_system, GeneratorConfig, Shape};
pub use instance::Instance;
pub use order::{
    compactify_chain, compactify_chain_with, lift_order, wo_order, wo_order_with, AtomOrder,
    ChainWitness, LexEntry, OrderPolicy,
};
pub use partition::{
    is_t_related, preimage_partition, pushforward, relate, MapBetween, Partition, Point,
};
pub use pipeline::{run_pipeline, run_pipeline_instance, PipelineOutcome, PipelineReport};
pub use ray::{check_condition_ray, BranchTree, RayPresentation};
pub use system::{check_condition, orbit, preimage, ConditionReport, SelfmapSystem};
pub use witness::{
    build_witness, build_witness_with, BranchWitnessRecord, ClassWitnessRecord, PointAddress,
    TailSchema, TopologyWitness,
};
