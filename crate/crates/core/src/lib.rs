//! Exact computations for a family of rigid but not infinitesimally rigid
//! product-quotient surfaces S_n, the minimal resolutions of
//! X_n = (C × C)/(Z/nZ)² where C is the (Z/nZ)²-triangle curve.
//!
//! Everything is integer arithmetic: characters and group elements are
//! residue pairs, roots of unity are exponents mod n, and line bundles on
//! P¹ are their degrees.

pub mod cover;
pub mod error;
pub mod group;
pub mod product;
pub mod quotient;
pub mod rigidity;

pub use cover::{BranchPoint, DegreeTable, EigensheafDegree, Power, TriangleCoverData};
pub use error::{Error, Result};
pub use group::{Character, GroupElement, GroupModulus, RootOfUnityExponent, TwistMatrix};
pub use product::{Kodaira, ManifoldSummary};
pub use quotient::{InvariantsReport, NodeRecord, ProductQuotientInput, SurfaceInvariants};
pub use rigidity::{CharacterSextuple, Conclusion, ObstructionMatrix, RigidityCertificate};
