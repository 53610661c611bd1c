use nettomo::expander::ExpanderError;
use nettomo::netgraph::NetError;
use nettomo::pathsel::PathSelError;
use nettomo::sim::SimError;
use nettomo::tomo::TomoError;
use nettomo::topogen::TopoError;
use serde::Serialize;
use thiserror::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input file, or an invalid value in it.
    #[error("{0}")]
    Input(String),
    /// The instance admits no solution.
    #[error("{0}")]
    Infeasible(String),
    /// An exhaustive check refused a graph above its size limit.
    #[error("{0}")]
    SizeGuard(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::SizeGuard(_) => 5,
            CliError::Other(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Infeasible(_) => "infeasible",
            CliError::SizeGuard(_) => "size-guard",
            CliError::Other(_) => "internal",
        }
    }

    /// Prefixes the message with the file it came from.
    pub fn in_file(self, file: &std::path::Path) -> Self {
        let wrap = |m: String| format!("{}: {m}", file.display());
        match self {
            CliError::Input(m) => CliError::Input(wrap(m)),
            CliError::Infeasible(m) => CliError::Infeasible(wrap(m)),
            CliError::SizeGuard(m) => CliError::SizeGuard(wrap(m)),
            CliError::Other(m) => CliError::Other(wrap(m)),
        }
    }
}

#[derive(Serialize)]
pub struct ErrorJson<'a> {
    pub error: &'a str,
    pub code: i32,
    pub message: String,
}

pub fn error_json(kind: &str, code: i32, message: String) -> String {
    serde_json::to_string(&ErrorJson {
        error: kind,
        code,
        message,
    })
    .expect("serializable")
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::Overflow => CliError::Other(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ExpanderError> for CliError {
    fn from(e: ExpanderError) -> Self {
        match e {
            ExpanderError::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
            ExpanderError::UncoveredLinks(_) => CliError::Input(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<TomoError> for CliError {
    fn from(e: TomoError) -> Self {
        match e {
            TomoError::Parse { .. }
            | TomoError::Io(_)
            | TomoError::LengthMismatch { .. }
            | TomoError::BadEntry { .. }
            | TomoError::Empty => CliError::Input(e.to_string()),
            TomoError::Inconsistent => CliError::Infeasible(e.to_string()),
            TomoError::Expander(inner) => inner.into(),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<PathSelError> for CliError {
    fn from(e: PathSelError) -> Self {
        match e {
            PathSelError::UncoveredLinks(_)
            | PathSelError::Infeasible
            | PathSelError::HeuristicFailure { .. }
            | PathSelError::HeuristicExhausted { .. }
            | PathSelError::NodeLimit => CliError::Infeasible(e.to_string()),
            PathSelError::LengthMismatch { .. } => CliError::Input(e.to_string()),
            PathSelError::Expander(inner) => inner.into(),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<TopoError> for CliError {
    fn from(e: TopoError) -> Self {
        match e {
            TopoError::InvalidConfig(_) | TopoError::TooFewBoundary => {
                CliError::Input(e.to_string())
            }
            TopoError::Net(inner) => inner.into(),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_) => CliError::Input(e.to_string()),
            SimError::Topo(inner) => inner.into(),
            SimError::Expander(inner) => inner.into(),
            SimError::Tomo(inner) => inner.into(),
            SimError::PathSel(inner) => inner.into(),
            _ => CliError::Other(e.to_string()),
        }
    }
}
