use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("statement has no terminator (expected `;` or `.`)")]
    MissingTerminator,
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("inconsistent sum: {0}")]
    InconsistentSum(String),
    #[error("ran out of index names for `{0}`")]
    OutOfIndices(String),
    #[error("rule shape: {0}")]
    RuleShape(String),
    #[error("term has {0} indices; canonicalisation is limited to 8")]
    TooManyIndices(usize),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("property {property} does not take option `{option}`")]
    UnknownOption { property: String, option: String },
    #[error("invalid property: {0}")]
    InvalidProperty(String),
    #[error("conflicting properties on {0}")]
    ConflictingProperty(String),
    #[error("index `{0}` has no declared values")]
    NoValues(String),
    #[error("undefined value: {0}")]
    Undefined(String),
    #[error("unsupported integral: {0}")]
    UnsupportedIntegral(String),
    #[error("unknown scalar function `{0}`")]
    UnknownFunction(String),
    #[error("not a scalar expression: {0}")]
    NotScalar(String),
    #[error("metric is singular")]
    SingularMetric,
    #[error("missing property: {0}")]
    MissingProperty(String),
    #[error("cannot enumerate index `{0}`: it is not position=fixed with values")]
    CannotEnumerate(String),
    #[error("no components known for `{0}`")]
    UnknownHead(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("bad arguments to {op}: {message}")]
    BadArguments { op: String, message: String },
    #[error("line {line}: {source}")]
    AtStatement {
        line: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            message: message.into(),
        }
    }

    pub(crate) fn args(op: &str, message: impl Into<String>) -> Self {
        Error::BadArguments {
            op: op.to_string(),
            message: message.into(),
        }
    }
}
