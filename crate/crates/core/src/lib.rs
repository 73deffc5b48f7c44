//! Deep links into files, documents and their parts.

pub mod convert;
pub mod error;
pub mod fetch;
pub mod link;
pub mod rdf;
pub mod render;
pub mod resolve;
pub mod resource;
pub mod selector;
pub mod server;
pub mod service;
pub mod store;
pub mod xml;

pub use error::{ErrorCode, ResolveError};
pub use link::{DeepLink, LinkError, Segment};
pub use resolve::{Resolver, ResolverConfig};
pub use resource::{Resource, ResourceKind};
