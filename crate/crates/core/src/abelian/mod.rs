//! Finite abelian groups, their characters and automorphisms, and exact
//! cyclotomic arithmetic for character values.

pub mod automorphism;
pub mod character;
pub mod cyclotomic;
pub mod group;
pub mod snf;

pub use automorphism::{enumerate_automorphisms, GroupAutomorphism, DEFAULT_AUT_BOUND};
pub use character::{character_from_turns, enumerate_characters, Character, RationalTurn};
pub use cyclotomic::{root_of_unity, Cyclotomic, CyclotomicField, Field};
pub use group::{canonicalize_subgroup, AbelianGroup, GroupElement};
