use thiserror::Error;

use crate::enumeration::Family;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("chain size must be at least 1")]
    ZeroChain,
    #[error("chain size {n} exceeds the supported maximum of {max}")]
    ChainTooLarge { n: usize, max: u8 },
    #[error("point {point} is outside the chain [1, {n}]")]
    PointOutOfRange { point: usize, n: u8 },
    #[error("domain point {0} is assigned twice")]
    DuplicateDomainPoint(u8),
    #[error("the empty transformation is not a member of any family")]
    EmptyMap,
    #[error("chain sizes differ: {left} vs {right}")]
    SizeMismatch { left: u8, right: u8 },
    #[error("point set must be nonempty")]
    EmptySet,
    #[error("generator list must be nonempty")]
    EmptyGenerators,
    #[error("cannot parse map literal {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("malformed canonical key")]
    BadKey,
    #[error("n = {n} exceeds the guard of {limit} for {what}; pass --force to override")]
    ResourceGuard { what: &'static str, n: u8, limit: u8 },
    #[error("height {height} is outside the factorizable range 1..={max} for n = {n}")]
    HeightOutOfRange { height: usize, max: usize, n: u8 },
    #[error("full-domain factorization requires dom = [n]")]
    NotFullDomain,
    #[error("{map} is not a member of {family}")]
    NotInFamily { map: String, family: Family },
    #[error("no factor pair found for {0}; the bounded search was exhausted")]
    SearchExhausted(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("n = {0} is too small; the construction needs n >= 3")]
    ChainTooSmall(u8),
    #[error("the generator list does not generate the target")]
    NotAGeneratingSet,
    #[error("element {0} is outside the semigroup")]
    NotAMember(String),
    #[error("unsupported rank target: {0}")]
    UnsupportedTarget(String),
    #[error("certification failed: {0}")]
    Certification(String),
}
