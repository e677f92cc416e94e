pub mod annotate;
pub mod bundled;
pub mod classifier;
pub mod feedback;
pub mod insights;
pub mod models;
pub mod scheduler;
pub mod service;
pub mod store;
pub mod taxonomy;
pub mod text;
pub mod trainer;
