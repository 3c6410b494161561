//! Spray geometry and projective metrizability conditions.

pub mod catalog;
pub mod expr;
pub mod geom;
pub mod jet;
pub mod jetmat;
pub mod metriz;
pub mod model;
pub mod point;
pub mod sample;
pub mod spray;

pub use expr::{parse, Expr, ExprError};
pub use jet::{Jet, JetError};
pub use point::PointTM;
pub use spray::SprayModel;
