//! Module algebra for Petri nets.
//!
//! Modules are graphs with a left and a right interface of labeled, indexed
//! nodes. [`compose`] merges the right interface of one module with the left
//! interface of another, [`closure`] merges a module's right interface with
//! its own left interface, and [`abstract_of`] replaces a module's interior
//! by a single named node. Composition is associative with the empty module
//! as identity.
//!
//! ```
//! use netmod::dsl::eval_binding;
//!
//! let env = netmod::parse(
//!     "alphabet { places: a; transitions: t }
//!      module step { place p label a marking 1; transition x label t; arc p -> x; left: p; right: x }
//!      module back { transition x label t; place q label a; arc x -> q; left: x; right: q }
//!      ring := (step . back)^c",
//! )
//! .unwrap();
//! let ring = eval_binding(&env, "ring").unwrap();
//! assert!(ring.left().is_empty() && ring.right().is_empty());
//! assert_eq!(ring.nodes().len(), 2);
//! ```

pub mod calculus;
pub mod dsl;
pub mod error;
pub mod export;
pub mod iso;
pub mod module;
pub mod net;
pub mod random;
pub mod sim;

pub use calculus::{
    abstract_of, closure, compose, empty_module, harmonic_pairs, is_atomic, is_monolithic, seam,
    HarmonicPair,
};
pub use dsl::{parse, DslError, Environment, ModuleExpr};
pub use error::{CalcError, ExportError, IsoError, NetError, SimError};
pub use iso::{isomorphic, structural_equal, verify_witness, IsoOptions, IsoWitness};
pub use module::{
    check_interfaces_well_formed, Alphabet, AtomicNodeId, Interface, Label, Module, Node, NodeId,
    NodeKind,
};
pub use net::{factorize, net_to_module, transition_atom, validate_net, Factorization, NetView};
