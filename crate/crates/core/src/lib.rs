pub mod error;
pub mod expr;
pub mod hardy;
pub mod inequalities;
pub mod pathology;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod selftest;
pub mod sequences;
pub mod space;
pub mod summation;

pub use error::{Error, Result};
