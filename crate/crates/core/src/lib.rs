pub mod analytics;
pub mod covers;
pub mod flow;
pub mod geometry;
pub mod group;
pub mod mesh;
pub mod monodromy;
