//! Coefficient types for matrix-unit combinations.
//!
//! Everything combinatorial in this crate (ideals, envelopes, reachability) is
//! scalar-free. Coefficients only enter through linear combinations of matrix
//! units and the blocks they compress to, so those are generic over [`Scalar`].

use std::fmt::Debug;

use num_traits::Num;

/// A coefficient ring element: integers, rationals or floats.
pub trait Scalar: Num + Clone + Debug + PartialEq + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + Clone + Debug + PartialEq + Send + Sync + 'static {}
