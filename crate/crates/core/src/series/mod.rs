//! Exact truncated series: weighted multivariate jets and their logarithmic
//! extension.

mod jet;
mod log;
mod space;

pub use jet::MultiJet;
pub use log::{LogSeries, NO_TAIL};
pub use space::JetSpace;
