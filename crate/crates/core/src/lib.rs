pub mod error;
pub mod experiment;
pub mod geometry;
pub mod oracle;
pub mod packing;
pub mod special;
pub mod spectra;
pub mod transform;
pub mod vecmath;
pub mod zeroset;

pub use error::{Error, Result};
pub use geometry::{Body, Curvature, FrequencyBall, NormalCone, Shape, Smoothness};
pub use transform::{Method, Resolution, TransformEvaluator};
