//! Error type shared by the whole crate.

use crate::guard::GuardKind;
use thiserror::Error;

/// Identifiers in witnesses are the dense integer ids used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("object {object} has no identity morphism")]
    MissingIdentity { object: usize },

    #[error("associativity fails on the composable triple (h={h}, g={g}, f={f})")]
    NonAssociative { h: usize, g: usize, f: usize },

    #[error("composite entry ({g}, {f}) is ill-typed or names a morphism with wrong endpoints")]
    IllTypedComposite { g: usize, f: usize },

    #[error("composable pair ({g}, {f}) has no entry in the composition table")]
    MissingComposite { g: usize, f: usize },

    #[error("identity law fails at morphism {f}")]
    BrokenIdentityLaw { f: usize },

    #[error("morphism {morphism} has out-of-range endpoints")]
    BadMorphism { morphism: usize },

    #[error("functor does not preserve {law} (witness morphism {witness})")]
    NotAFunctor { law: &'static str, witness: usize },

    #[error("presheaf is not functorial: act({g}) . act({f}) differs from act({f}.{g}) at element {element}")]
    NotFunctorial { f: usize, g: usize, element: usize },

    #[error("presheaf action table for morphism {morphism} is malformed")]
    BadAction { morphism: usize },

    #[error("map component at object {object} is malformed")]
    BadComponent { object: usize },

    #[error("naturality fails for morphism {morphism} at element {element}")]
    NotNatural { morphism: usize, element: usize },

    #[error("operands live over different base categories")]
    BaseMismatch,

    #[error("maps are not composable / do not share the required (co)domain")]
    NotComposable,

    #[error("the given square is not a pullback")]
    NotAPullback,

    #[error("the given cocone is not a colimit")]
    NotAColimit,

    #[error("subobject is not closed under the presheaf action (morphism {morphism}, element {element})")]
    NotActionClosed { morphism: usize, element: usize },

    #[error("structure notion violates the restriction laws: {detail}")]
    BadNotion { detail: String },

    #[error("size guard {} exceeded: needed {needed}, limit {limit}", .guard.name())]
    SizeGuardExceeded { guard: GuardKind, limit: usize, needed: usize },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
