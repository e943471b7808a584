//! HTTP service and command line for the itinera planner.
//!
//! Request handling lives in [`api`] and is independent of the transport;
//! [`http`] exposes it over HTTP/1.1 and [`cli`] drives the batch commands.

pub mod api;
pub mod chat;
pub mod cli;
pub mod http;
pub mod store;

pub use api::{Api, ApiError, Response, SessionEnvelope};
pub use store::SessionStore;
