//! Cappell–Shaneson triples, ideal classes of `Z[θₙ]` and Gompf equivalence.

pub mod cancel;
pub mod cstriple;
pub mod cubicorder;
pub mod enumerate;
pub mod error;
pub mod families;
pub mod gompf;
pub mod intarith;
pub(crate) mod serde_int;

pub use cancel::CancelToken;
pub use cstriple::CsTriple;
pub use error::{Error, Result};
