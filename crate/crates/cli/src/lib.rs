//! Command-line front end and HTTP service for Real-Win-Worth models.

pub mod cli;
pub mod server;

pub use cli::{run, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
