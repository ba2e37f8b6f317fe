//! Serialization: Graphviz, PNML and a canonical JSON dump.

mod dot;
mod dump;
mod pnml;

pub use dot::to_dot;
pub use dump::{dump, load, CanonicalDump, DumpNode, DumpSlot, DumpTokens};
pub use pnml::{check_pnml, pnml_ids, to_pnml, PnmlSummary, PNML_NS, PTNET_TYPE};
