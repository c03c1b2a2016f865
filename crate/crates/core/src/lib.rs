pub mod analytics;
pub mod cli;
pub mod client;
pub mod export;
pub mod model;
pub mod pipeline;
pub mod replay;
