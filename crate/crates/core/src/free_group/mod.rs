//! Exact arithmetic on words in `F_N` and on automorphisms given by
//! generator images with certified inverse images.

mod automorphism;
pub mod elementary;
mod image;
mod parse;
mod word;

pub use automorphism::Automorphism;
pub use image::{ImageLength, ImageLengths, ImageWeights, LetterBudget};
pub use parse::{parse_automorphism, parse_automorphism_parts, parse_substitution, parse_word};
pub use word::{CyclicWord, Letter, Word, MAX_RANK};
