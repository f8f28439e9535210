pub mod commands;
pub mod corpus;
pub mod manifest;
pub mod random;
pub mod report;
pub mod suite;
