use thiserror::Error;

#[derive(Error, Debug)]
pub enum DescentError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("degree {0} out of range")]
    DegreeOutOfRange(i64),
    #[error("missing pullback of ({0}, {1})")]
    MissingPullback(String, String),
    #[error("not a sheaf: {0}")]
    NotASheaf(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("{0}")]
    Invalid(String),
}

/// Step counter shared by exhaustive searches; exceeding the cap aborts the
/// computation with a budget error instead of truncating silently.
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_steps: u64,
    steps: std::cell::Cell<u64>,
}

impl Budget {
    pub fn new(max_steps: u64) -> Self {
        Budget { max_steps, steps: std::cell::Cell::new(0) }
    }

    pub fn charge(&self, n: u64, what: &str) -> Result<(), DescentError> {
        let s = self.steps.get().saturating_add(n);
        self.steps.set(s);
        if s > self.max_steps {
            Err(DescentError::Budget(format!("{what} exceeded {} steps", self.max_steps)))
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(50_000_000)
    }
}
