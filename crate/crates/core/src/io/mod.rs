//! Instance files, reproducible generators, SVG output and report rendering.

pub mod format;
pub mod generate;
pub mod report;
pub mod svg;

pub use format::{parse_instance, serialize_instance};
pub use generate::{generate_instance, GeneratorParams, WitnessMode};
pub use report::{Report, SolveReport};
pub use svg::render_svg;
