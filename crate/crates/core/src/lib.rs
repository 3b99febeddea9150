pub mod error;
pub mod gen;
pub mod io;
pub mod laws;
pub mod queries;
pub mod relations;
pub mod sets;
pub mod signatures;
pub mod tables;
pub mod tuples;
pub mod typedomains;
