//! Potential-line total search problems and the reductions around them:
//! EOPL/EOML instances with verifiers and solvers, an exact Lemke solver for
//! P-matrix LCPs, the P-LCP to EOPL encoding, piecewise-linear contraction
//! circuits with their line construction and fixpoint algorithms, and the
//! CLS-style reductions between local optimisation and meta-metric contraction.

pub mod cls;
pub mod contraction;
pub mod error;
pub mod exact;
pub mod gen;
pub mod lcp;
pub mod line;
pub mod linfixp;
pub mod plcp;
pub mod reductions;

pub use error::{Error, Result};
pub use exact::{Rational, RationalMatrix};

pub use line::{BitVector, EomlInstance, EoplInstance, Solution, SolutionKind, SvlInstance, UfeoplInstance};
