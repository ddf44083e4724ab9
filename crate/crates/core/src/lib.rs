pub mod algebra;
pub mod doubling;
pub mod error;
pub mod exact_cover;
pub mod fano;
pub mod partitions;
pub mod perfect;
pub mod pipeline;
pub mod sqs;
pub mod sts;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
