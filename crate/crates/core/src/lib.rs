pub mod abelian;
pub mod affine;
pub mod backend;
pub mod cohomology;
pub mod corpus;
pub mod error;
pub mod exact;
pub mod fraction;
pub mod hodge;
pub mod oracle;
pub mod registry;
pub mod report;
pub mod suite;
pub mod surface;

pub use error::{Error, Result};
