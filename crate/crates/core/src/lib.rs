//! Static extraction of web API requests from JavaScript, conformance
//! checking against OpenAPI 2.0 style specifications, and inference of
//! path-templated specifications from request logs.

pub mod cli;
pub mod conformance;
pub mod extract;
pub mod inference;
pub mod pipeline;
pub mod service;
pub mod source;
pub mod spec_model;
pub mod string_flow;
