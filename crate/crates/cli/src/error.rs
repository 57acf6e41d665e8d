use thiserror::Error;

/// Failure of a run, grouped by exit status.
///
/// | code | meaning |
/// |------|---------|
/// | 2 | bad flags or config file |
/// | 3 | an input file could not be read |
/// | 4 | input data failed parsing or validation |
/// | 5 | fitting, forecasting or a model file failed |
/// | 6 | an output could not be written |
#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error("data: {0}")]
    Data(String),
    #[error("model: {0}")]
    Model(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Data(_) => 4,
            CliError::Model(_) => 5,
            CliError::Output(_) => 6,
        }
    }
}

impl From<epicurve::Error> for CliError {
    fn from(err: epicurve::Error) -> Self {
        use epicurve::Error as E;
        let msg = err.to_string();
        match err {
            E::Io(_) => CliError::Input(msg),
            E::Config(_) => CliError::Usage(msg),
            E::TooShort { .. }
            | E::FlatTrend(_)
            | E::DegenerateRate { .. }
            | E::InvalidParams(_)
            | E::InvalidCapacity(_)
            | E::ZeroHorizon
            | E::ModelFormat(_) => CliError::Model(msg),
            _ => CliError::Data(msg),
        }
    }
}
