pub mod clusters;
pub mod descriptors;
pub mod geom;
pub mod ingestion;
pub mod proximity;
