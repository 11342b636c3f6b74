pub mod exact;
pub mod json;
pub mod matrix_core;
pub mod rootdata;
pub mod nilpotent;
pub mod semiconj;
pub mod cones;
pub mod cohomology;
pub mod app;
