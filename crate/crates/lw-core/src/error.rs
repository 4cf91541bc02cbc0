use thiserror::Error;

/// Errors surfaced by the simulator, query engine, skills, plans, and training.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("unknown object `{name}`; known objects: {known:?}")]
    UnknownObject { name: String, known: Vec<String> },

    #[error("query parse error at `{at}`: {reason}")]
    QueryParse { at: String, reason: String },

    #[error("episode horizon exceeded: step {0} is past the 500-step limit")]
    HorizonExceeded(usize),

    #[error("unknown skill `{0}`")]
    UnknownSkill(String),

    #[error("invalid plan for task `{task}`: {reason}")]
    InvalidPlan { task: String, reason: String },

    #[error("no plan steps recovered from completion text")]
    EmptyPlan { raw: String },

    #[error("skill call `{0}` does not match `robot.<verb>(\"<args>\")`")]
    BadSkillCall(String),

    #[error("demo generation for task `{task}` exhausted {attempts} attempts before reaching {wanted} successes")]
    DemoRetryBudget {
        task: String,
        attempts: usize,
        wanted: usize,
    },

    #[error("batch size {batch} is not divisible as required: {reason}")]
    BadBatch { batch: usize, reason: String },

    #[error("missing replay fixture for prompt hash {hash} sample {sample}")]
    MissingFixture { hash: String, sample: usize },

    #[error("completion transport failure: {0}")]
    Transport(String),

    #[error("completion endpoint returned status {status}: {body}")]
    HttpStatus { status: u16, body: String },

    #[error("missing plan for task `{0}`")]
    MissingPlan(String),

    #[error("missing demonstrations for task `{0}`")]
    MissingDemos(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
