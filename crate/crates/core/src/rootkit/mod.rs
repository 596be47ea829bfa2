//! Root counting: exact Sturm sequences over ℚ, discriminants, one-parameter families,
//! certified zero isolation for the averaged-function spans, and Wronskians.

pub mod isolate;
pub mod parametric;
pub mod poly;
pub mod wronskian;

pub use isolate::{isolate_zeros, SpanFunction, Zero, ZeroReport};
pub use parametric::{parametric_root_regions, ParametricFamily, RootRegion};
pub use poly::{descartes_bound, discriminant, resultant, sturm_count, RationalPolynomial};
pub use wronskian::{wronskians, Basis, WronskianReport};
