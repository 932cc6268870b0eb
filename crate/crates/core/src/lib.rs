//! Rational points of bounded height on split Chatelet surfaces
//! Y^2 + Z^2 = X (a3 X + b3)(a4 X + b4): direct enumeration, torsor classes,
//! the Moebius-decomposed counting identity, and the local densities that
//! make up the leading constant.

pub mod arith;
pub mod config;
pub mod densities;
pub mod error;
pub mod export;
pub mod gaussian;
pub mod lattice;
pub mod points;
pub mod sums;
pub mod surface;

pub use error::{Error, Result};
pub use gaussian::{GaussInt, GaussRational, IdealRep, SplitPrime};
pub use lattice::{Lattice2, Minima};
pub use points::{Component, FigureColor, PointRecord, RationalPoint, TorsorLift};
pub use surface::{validate, BadPrimeData, Region, SigmaPrimeTerm, SurfaceSpec, TorsorClass};
pub use config::FileConfig;
pub use densities::{ConstantReport, DensityReport, FitRow, LocalDensity, Method, Sigma2};
pub use export::{CountRow, Format, PointRow};
pub use sums::{Bound, CmValue, DVector, Strategy, TWeight};
