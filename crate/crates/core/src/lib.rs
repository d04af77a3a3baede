pub mod geo;
pub mod term_graph;
pub mod rules;
pub mod ingest;
pub mod storm;
pub mod layout;
pub mod metrics;
