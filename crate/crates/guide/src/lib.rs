//! Guide chapters, compiled as doc-tests so the samples in the book keep
//! building against the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/census.md")]
pub mod census {}
#[doc = include_str!("../../../book/src/colourings.md")]
pub mod colourings {}
#[doc = include_str!("../../../book/src/collages.md")]
pub mod collages {}
#[doc = include_str!("../../../book/src/discharging.md")]
pub mod discharging {}
#[doc = include_str!("../../../book/src/game.md")]
pub mod game {}
#[doc = include_str!("../../../book/src/density.md")]
pub mod density {}
#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}
