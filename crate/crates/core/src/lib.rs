//! Computational tools for free groups and parafree groups.

pub mod abelian;
pub mod fox;
pub mod homology;
pub mod magnus;
pub mod modp;
pub mod parafree;
pub mod presentation;
pub mod pro_p;
pub mod ring;
pub mod words;
