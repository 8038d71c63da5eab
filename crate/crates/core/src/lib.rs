pub mod dieudonne;
pub mod group;
pub mod json;
pub mod matrix;
pub mod orbit;
pub mod sample;
pub mod scalar;
pub mod witt;
pub mod zip;
