//! Exact computation of the globular homology, the negative and positive
//! corner homologies and the oriented Hurewicz morphisms of free
//! ω-categories generated by finite cubical sets.
//!
//! The pipeline is: a [`cubical_sets::CubicalSet`] (or a grid model) is
//! compiled to a [`free_cat::Polygraph2`], whose free 2-category supplies the
//! cells of the chain complexes built in [`invariants`]. Singular cubes over
//! that category live in [`nerve`]; [`cube_model`] is the combinatorics of
//! the cubes `I^n` themselves, and [`homology_engine`] does the integer
//! linear algebra.

pub mod cube_model;
pub mod cubical_sets;
pub mod fixtures;
pub mod free_cat;
pub mod homology_engine;
pub mod invariants;
pub mod nerve;
