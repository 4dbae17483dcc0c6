use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large (must be below 2^62)")]
    ModulusTooLarge(u64),
    #[error("unrecognized field `{0}` (expected `q` or `fp:<prime>`)")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("division at {pos} is only allowed between integer literals")]
    NonLiteralDivision { pos: usize },
    #[error("zero denominator at {pos}")]
    ZeroDenominator { pos: usize },
    #[error("coefficient field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("ambient variables differ: [{left}] vs [{right}]")]
    VariableMismatch { left: String, right: String },
    #[error("substitution needs {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable `{0}` occurs but is not in the target ambient")]
    VariableNotInTarget(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected a map of the form `(expr, expr)`: {0}")]
    Shape(String),
}

/// Why a map failed the automorphism test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotAutReason {
    ConstantComponent,
    DegreeNotDivisible { dx: u32, dy: u32 },
    LeadingFormsNotProportional { dx: u32, dy: u32 },
    SingularAffine,
    NonInvertibleLetter,
}

impl std::fmt::Display for NotAutReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NotAutReason::ConstantComponent => write!(f, "a component is constant"),
            NotAutReason::DegreeNotDivisible { dx, dy } => {
                write!(f, "component degrees {dx} and {dy} do not divide")
            }
            NotAutReason::LeadingFormsNotProportional { dx, dy } => write!(
                f,
                "leading form of the degree-{dx} component is not a multiple of a power of the degree-{dy} one"
            ),
            NotAutReason::SingularAffine => write!(f, "the affine part is singular"),
            NotAutReason::NonInvertibleLetter => write!(f, "a factor is not invertible"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(NotAutReason),
    #[error("degenerate input: the zero map")]
    DegenerateInput,
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {index} does not belong to its tagged factor")]
    WrongFactor { index: usize },
    #[error("letters {index} and {} lie in the same factor", index + 1)]
    NotAlternating { index: usize },
    #[error("letter {index} lies in S = A ∩ E")]
    LetterInS { index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NilpotentError {
    #[error("specialization at sample {index} is not in E_{degree}")]
    SampleNotInEn { index: usize, degree: u32 },
    #[error("specialization at sample {index} is not an automorphism")]
    SampleNotAutomorphism { index: usize },
    #[error("generator {index} is not an invertible affine map")]
    NotAffine { index: usize },
    #[error("the generators have no common eigenvector over any available field")]
    NotNilpotentOrNotTriangularizable,
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid family: {0}")]
    Family(String),
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("config parse error: {0}")]
    ConfigSyntax(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Nilpotent(#[from] NilpotentError),
}

impl LabError {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        LabError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
