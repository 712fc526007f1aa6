use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("name `{0}` is already declared or reserved")]
    DuplicateName(String),
    #[error("expression is not invertible: {0}")]
    NotInvertible(String),
    #[error("analytic function applied to a matrix-valued argument")]
    MatrixFuncArgument,
    #[error("kind error: {0}")]
    Kind(String),
    #[error("potential `{0}` is not registered")]
    UnregisteredPotential(String),
    #[error("nonlocal action undefined: no characteristic image registered for potential `{potential}` under {characteristic}")]
    NonlocalActionUndefined {
        potential: String,
        characteristic: String,
    },
    #[error("invalid solved form: {0}")]
    InvalidSolvedForm(String),
    #[error("mod-F reduction does not terminate at jet {0}")]
    ReductionCycle(String),
    #[error("potential `{name}` fails cross-derivative compatibility; residual {residual}")]
    IncompatiblePotential { name: String, residual: String },
    #[error(
        "characteristic image for `{name}` is inconsistent with its gradient; residual {residual}"
    )]
    InconsistentImage { name: String, residual: String },
    #[error("bracket of basis elements {i} and {j} is not in the span of the basis: {bracket}")]
    BracketNotInSpan { i: usize, j: usize, bracket: String },
    #[error("basis characteristics are linearly dependent")]
    BasisDependent,
    #[error("`{0}` is not a symmetry of the equation")]
    NotASymmetry(String),
    #[error("Backlund system is not integrable for seed {0}")]
    NotIntegrable(String),
    #[error("invalid linear operator: {0}")]
    InvalidOperator(String),
    #[error("parse error at {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown catalog entry `{0}`")]
    UnknownPde(String),
    #[error("catalog: {0}")]
    Catalog(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            message: message.into(),
        }
    }
}
