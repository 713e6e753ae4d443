//! Library side of the `confluent` command: configuration, corpus layout, reports and
//! the subcommand implementations.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod report;
