pub mod analysis;
pub mod checkpoint;
pub mod config;
pub mod dynamics;
pub mod output;
pub mod spectral;
pub mod tangent;
