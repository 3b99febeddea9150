use thiserror::Error;

/// Errors raised by constructions and constructors across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("function is not total: `{0}` has no image")]
    NotTotal(String),

    #[error("`{element}` is not a member of the {role}")]
    NotAMember { element: String, role: &'static str },

    #[error("naturality fails at `{0}`")]
    NotNatural(String),

    #[error("ill-typed: {0}")]
    IllTyped(String),

    #[error("unknown sort `{0}`")]
    UnknownSort(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("illegal tuple: {0}")]
    IllegalTuple(String),

    #[error("infomorphism condition fails for sort `{sort}` and value `{value}`")]
    NotInfomorphism { sort: String, value: String },

    #[error("invalid table: row `{key}` violates attribute `{attribute}`")]
    InvalidTable { key: String, attribute: String },

    #[error("enumeration too large: {count} exceeds the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },

    #[error("type domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("shared attribute `{attribute}` has sort `{left}` on one side and `{right}` on the other")]
    SortClash {
        attribute: String,
        left: String,
        right: String,
    },

    #[error("name clash: {0}")]
    NameClash(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Outcome of a check that either holds or produces a counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Accept,
    Reject(W),
}

impl<W> Verdict<W> {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Accept => None,
            Verdict::Reject(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Accept => Verdict::Accept,
            Verdict::Reject(w) => Verdict::Reject(f(w)),
        }
    }
}

impl<W> From<Option<W>> for Verdict<W> {
    fn from(found: Option<W>) -> Self {
        match found {
            None => Verdict::Accept,
            Some(w) => Verdict::Reject(w),
        }
    }
}
