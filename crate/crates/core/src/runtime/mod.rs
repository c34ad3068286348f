//! Server and client state machines. Both are transport-agnostic: they
//! consume decoded messages and return the messages they want sent.

mod client;
mod log;
mod server;

pub use client::{ClientConfig, ClientNode, ClientPhase, ProbeMode};
pub use log::{EventLog, LogEntry, LogKind};
pub use server::ServerNode;

use crate::geometry::GeometryError;
use crate::net::Message;
use crate::scene::{NodeId, ObjectId, SceneError};
use crate::sync::SyncError;
use thiserror::Error;

/// A message a node wants delivered, addressed by node id; the driver owns
/// the actual transport.
#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub to: NodeId,
    pub message: Message,
}

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("state update for unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("unexpected {what} from {from}")]
    UnexpectedMessage { from: NodeId, what: &'static str },
    #[error("no join reply within {timeout}s")]
    JoinTimeout { timeout: f64 },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
