//! Alpha-stable and general Levy noise: increment sampling, path
//! generation from a generating triplet, and the rescaling / limit
//! algebra of triplets.

mod limits;
mod measure;
mod sample;
mod stable;
mod triplet;

pub use limits::{limit_triplet, LimitCase, TripletLimit};
pub use measure::{GFunction, LevyMeasureSpec, PowerLawSpec};
pub use sample::{sample_levy_path, sample_stable_path, LevyPathOptions};
pub use stable::StableLaw;
pub use triplet::LevyTriplet;

/// The fixed truncation function `h(z) = -1 v (z ^ 1)` all triplet drifts
/// are stated against.
pub fn truncation(z: f64) -> f64 {
    z.clamp(-1.0, 1.0)
}
