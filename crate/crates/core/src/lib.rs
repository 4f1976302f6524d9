#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod ext;
pub mod geometry;
pub mod hk;
pub mod model1d;
pub mod needle;
pub mod quad;

pub use error::{Error, Result};
pub use ext::ExtReal;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model-functions.md")]
    mod model_functions {}
    #[doc = include_str!("../../../book/src/needles.md")]
    mod needles {}
    #[doc = include_str!("../../../book/src/geometries.md")]
    mod geometries {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
