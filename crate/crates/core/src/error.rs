use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A hypothesis, adversary, or dataset was applied to the wrong kind of
    /// instance (vector vs. abstract point) or to the wrong dimension.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// A validation failure: bad weights, label outside {-1, +1}, parameter
    /// out of range, and so on.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("empty dataset")]
    EmptyDataset,

    /// The worst-case loss enumerates perturbations; a raw ball adversary has
    /// no finite list to scan.
    #[error(
        "worst-case loss requires a finite-atom adversary; discretize the ball \
         onto a translation grid or use the halfspace closed form"
    )]
    WorstCaseNeedsAtoms,

    #[error("enumeration budget exceeded: needed {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("loss `{0}` is not a Lipschitz function of the margin")]
    NonLipschitz(String),

    #[error("loss `{0}` is not {{0,1}}-valued")]
    NonBinaryLoss(String),

    /// A perturbation-set map assigned no image to some point, so no
    /// perturbation function can be constructed for it.
    #[error("perturbation map has an empty image set at point {0}")]
    EmptyImageSet(u64),

    #[error("exact mode supports at most {max} examples, got {n}")]
    ExactModeTooLarge { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
