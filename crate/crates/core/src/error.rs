use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Expected fitness under the current distribution is zero.
    #[error("degenerate selection{}: total fitness is zero", fmt_generation(*.generation))]
    DegenerateSelection { generation: Option<usize> },

    #[error(transparent)]
    Ambivalence(#[from] Box<AmbivalenceViolation>),

    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

fn fmt_generation(generation: Option<usize>) -> String {
    match generation {
        Some(g) => format!(" at generation {g}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, found: usize) -> Self {
        Error::Dimension {
            context,
            expected,
            found,
        }
    }

    /// Attaches a generation number to a degenerate-selection error.
    pub fn at_generation(self, generation: usize) -> Self {
        match self {
            Error::DegenerateSelection { .. } => Error::DegenerateSelection {
                generation: Some(generation),
            },
            other => other,
        }
    }
}

/// Witness that a transmission function is not ambivalent under a theme map:
/// two parent tuples with identical themes whose children land in `theme`
/// with different probability.
#[derive(Debug, Error, Clone, PartialEq)]
#[error(
    "not ambivalent: child theme {theme} given parent themes {parent_themes:?} has mass \
     {first_mass} for parents {first_parents:?} but {second_mass} for parents {second_parents:?}"
)]
pub struct AmbivalenceViolation {
    pub theme: usize,
    pub parent_themes: Vec<usize>,
    pub first_parents: Vec<usize>,
    pub first_mass: f64,
    pub second_parents: Vec<usize>,
    pub second_mass: f64,
}
