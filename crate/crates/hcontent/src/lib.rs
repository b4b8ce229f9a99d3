//! Hausdorff content, cone coverings, decompositions and width bounds on finite metric models.

pub mod coarea;
pub mod cone;
pub mod content;
pub mod decomposition;
pub mod error;
pub mod improve;
pub mod io;
pub mod lw;
pub mod num;
pub mod pushout;
pub mod setcover;
pub mod space;
pub mod width;

pub use error::{Error, Result};
