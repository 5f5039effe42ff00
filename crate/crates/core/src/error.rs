use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by the whole engine. Every validator reports the first
/// offending datum in canonical order, so failures are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("associativity fails on composable triple ({f}, {g}, {h})")]
    AssocFailure { f: usize, g: usize, h: usize },

    #[error("identity law fails at object {object}: {details}")]
    IdentityFailure { object: usize, details: String },

    #[error("composition table defect on pair ({f}, {g}): {details}")]
    NonComposable { f: usize, g: usize, details: String },

    #[error("operands live over different base categories")]
    BaseMismatch,

    #[error("expected maps into a common target: {details}")]
    TargetMismatch { details: String },

    #[error("expected maps out of a common source: {details}")]
    SourceMismatch { details: String },

    #[error("functor law fails for presheaf: {details}")]
    FunctorLawFailure { details: String },

    #[error("naturality fails at morphism {morphism}: {details}")]
    NaturalityFailure { morphism: usize, details: String },

    #[error("subobject is not stable under restriction along morphism {morphism}")]
    NotRestrictionStable { morphism: usize },

    #[error("budget exceeded while building {what}: needs more than {limit} elements")]
    BudgetExceeded { what: String, limit: usize },

    #[error("lattice axiom fails: {axiom} at {witness}")]
    LatticeAxiomFailure { axiom: String, witness: String },

    #[error("stage {object} fails lattice axiom: {axiom} at {witness}")]
    StageAxiomFailure {
        object: usize,
        axiom: String,
        witness: String,
    },

    #[error("map is not a lattice homomorphism: {details}")]
    NotAHomomorphism { details: String },

    #[error("ill-typed formula or term: {details}")]
    IllTyped { details: String },

    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },

    #[error("parse error at offset {offset}: {details}")]
    ParseError { offset: usize, details: String },

    #[error("object is not connected along the required proposition: {details}")]
    NotConnected { details: String },

    #[error("two defining clauses disagree for {what}: {details}")]
    ClauseDisagreement { what: String, details: String },

    #[error("no isomorphism found where one is required: {details}")]
    IsoNotFound { details: String },

    #[error("supplied square is not a pullback: {details}")]
    NotAPullback { details: String },

    #[error("object is not orthogonal to the little Sierpinski cone maps: {details}")]
    NotLittleComplete { details: String },

    #[error("Sierpinski extension is not unique: {details}")]
    ExtensionNotUnique { details: String },

    #[error("invalid model data: {details}")]
    InvalidModel { details: String },
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            limit,
        }
    }
}
