//! The wire protocol and two interchangeable transports: a deterministic
//! simulated network for experiments and a datagram socket for live runs.

mod link;
mod live;
mod sim;
mod wire;

pub use link::{Jitter, Link, LinkModel};
pub use live::LiveTransport;
pub use sim::{Firing, SimError, SimEvent, Simulation};
pub use wire::{
    decode, encode, Message, ProtocolError, HEADER_LEN, MAX_DATAGRAM, MAX_SNAPSHOT_OBJECTS,
    STATE_ENTRY_LEN,
};

use crate::scene::NodeId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid link: {what}")]
    BadLink { what: &'static str },
    #[error("no known address for {0}")]
    UnknownPeer(NodeId),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
