//! Finite strict ω-categories and the machinery around ω-weak equivalences:
//! reversible cells and ω-equivalence, cylinders and the functor Γ, the
//! gluing factorization, immersions and lifting problems, polygraphs, and
//! the unit-padding/truncation/collapse functors between n-categories and
//! ω-categories.

#![allow(clippy::needless_range_loop)]

pub mod category;
pub mod cyl_laws;
pub mod cylinder;
pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod functor;
pub mod gamma;
pub mod gluing;
pub mod json;
pub mod modelcheck;
pub mod ops;
pub mod polygraph;
pub mod presentation;
pub mod product;
pub mod random;
pub mod report;
pub mod search;
pub mod shift;
pub mod suite;
pub mod transfer;
pub mod validate;

pub use category::{Cell, FiniteOmegaCat, RawCategory};
pub use equivalence::{EqvTable, EqvWitness};
pub use error::{OmcError, Result};
pub use functor::{validate_functor, Functor};
pub use report::{CheckReport, Verdict, Violation};
pub use validate::validate_category;
