//! Exact construction and certification of valuatively independent section
//! bases for the Fermat family of plane cubics.

pub mod basis;
pub mod cost;
pub mod rational;
pub mod sections;
pub mod series;
pub mod skeleton;
pub mod verify;

pub use basis::{build_basis, BasisDescriptor, BasisEntry, BuildError, Builder, LambdaEntry};
pub use cost::{cost, AffineGerm, CostBreakdown};
pub use rational::Rational;
pub use sections::{CertificationError, HullCertificate, Section, ValuationProfile};
pub use series::{LowerHull, PLFunction, TruncatedSeries};
pub use skeleton::{LatticeVector, PolytopePoint, SkeletonPoint};
pub use verify::{verify_theorem, Certificate, VerifyError, VerifyOptions};
