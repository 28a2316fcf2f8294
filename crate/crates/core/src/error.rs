use thiserror::Error;

use crate::geometry::Point;
use crate::lp::simplex::LpError;

/// Errors produced by the solver pipeline and the instance I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{} point(s) of P are not covered by any square", .uncovered.len())]
    InfeasibleInput { uncovered: Vec<Point> },

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("no square of the solution contains witness ({}, {})", .0.x, .0.y)]
    NoCoveringSquare(Point),

    #[error("instance has {m} squares, exact oracle limit is {max_m}")]
    TooLarge { m: usize, max_m: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}{message}", .line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, message: String },

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
