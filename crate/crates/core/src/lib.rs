//! Optimal error probabilities for testing `P^n` against `Q^n` on a finite
//! alphabet: an exact randomized Neyman-Pearson oracle, the tilted-family
//! exponent, and finite-sample bounds and approximations.

pub mod bounds;
pub mod dist;
pub mod error;
pub mod exponent;
pub mod gaussian;
pub mod numeric;
pub mod oracle;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tilting.md")]
    mod tilting {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/exponents.md")]
    mod exponents {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
}
