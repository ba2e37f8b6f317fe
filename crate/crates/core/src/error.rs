use thiserror::Error;

use crate::module::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("interfaces share node {0}")]
    NonDisjointInterfaces(String),
    #[error("operands share atomic node {0}; instantiate fresh copies first")]
    NonDisjointOperands(String),
    #[error("harmonic pair {0} / {1} would merge nodes of different kinds")]
    KindMismatch(String, String),
    #[error("module has no name")]
    UnnamedModule,
    #[error("label `{0}` is declared both as a place and as a transition label")]
    AlphabetConflict(Label),
    #[error("label `{0}` is used with inconsistent node kinds")]
    LabelKindConflict(Label),
    #[error("unknown node: {0}")]
    UnknownNode(String),
    #[error("node {0} occurs twice in one interface")]
    DuplicateSlot(String),
    #[error("two node ids share an atom: {0}")]
    OverlappingNodeIds(String),
    #[error("marking on a node that is not a place (or zero marking): {0}")]
    MarkingOnNonPlace(String),
    #[error("indices of label `{0}` are not contiguous")]
    IndexGap(Label),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("not bipartite: {}", .0.join(", "))]
    NotBipartite(Vec<String>),
    #[error("abstract nodes present: {}", .0.join(", "))]
    AbstractNodePresent(Vec<String>),
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("isolated element {0}")]
    IsolatedElement(String),
    #[error("malformed net: {0}")]
    Malformed(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("isomorphism search exceeded its budget of {0} steps")]
    SearchBudgetExceeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("marking refers to {0}, which is not a place of the net")]
    InvalidMarking(String),
    #[error("predicate error: {0}")]
    Predicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("not a net: {0}")]
    NotANet(#[from] NetError),
    #[error("dump parse error: {0}")]
    ParseError(String),
    #[error("invalid PNML: {0}")]
    InvalidPnml(String),
}
