//! Multiresolution analysis: projection, prediction, multi-scale transform,
//! thresholding and grid adaptation.

mod adapt;
mod norm;
mod prediction;
mod threshold;
mod transform;

pub use adapt::{adapt, adapt_uniform, encode_forest, Adapted, ForestDetails};
pub use norm::{norm_l2, norm_l2_uniform};
pub use prediction::{project, AxisStencil, PredictionScheme};
pub use threshold::{threshold, KeptSet, ThresholdSpec};
pub use transform::{decode, encode, sample_uniform, MultiScale};
