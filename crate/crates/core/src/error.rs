use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} already has a self-loop")]
    DuplicateSelfLoop { vertex: usize },

    #[error("vertex index {index} out of range for a graph with {vertex_count} vertices")]
    IndexOutOfRange { index: usize, vertex_count: usize },

    #[error("graph generation failed: {0}")]
    GenerationFailed(String),

    #[error("graph is not in class S: tree components {}", format_components(.tree_components))]
    NotInClassS { tree_components: Vec<Vec<usize>> },

    #[error("pop cap of {cap} exceeded before reaching a sink-free state")]
    PopCapExceeded { cap: u64 },

    #[error("not a subgraph: {0}")]
    NotASubgraph(String),

    #[error("no directed spanning tree to root {root}: vertices {unreachable:?} cannot reach it")]
    NoSpanningTree { root: usize, unreachable: Vec<usize> },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("too few samples: {0}")]
    TooFewSamples(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("choice rule {0} depends on history and has no exact-chain counterpart")]
    UnsupportedRule(String),

    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn format_components(components: &[Vec<usize>]) -> String {
    components
        .iter()
        .map(|c| {
            let inner: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
