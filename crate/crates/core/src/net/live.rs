use crate::net::wire::{decode, encode, Message, MAX_DATAGRAM};
use crate::net::NetError;
use crate::scene::NodeId;
use std::collections::BTreeMap;
use std::io::ErrorKind;
use std::net::{SocketAddr, ToSocketAddrs, UdpSocket};
use std::time::Duration;

/// Datagram transport for running nodes on real sockets. Speaks the same
/// bytes as the simulated network, so a node driven over loopback behaves
/// identically to one driven in simulation.
pub struct LiveTransport {
    socket: UdpSocket,
    peers: BTreeMap<NodeId, SocketAddr>,
}

impl LiveTransport {
    /// Bind a socket; use port 0 to let the OS pick one.
    pub fn bind<A: ToSocketAddrs>(addr: A) -> Result<Self, NetError> {
        let socket = UdpSocket::bind(addr)?;
        Ok(Self {
            socket,
            peers: BTreeMap::new(),
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr, NetError> {
        Ok(self.socket.local_addr()?)
    }

    pub fn add_peer(&mut self, node: NodeId, addr: SocketAddr) {
        self.peers.insert(node, addr);
    }

    pub fn send(&self, sender: NodeId, to: NodeId, msg: &Message) -> Result<(), NetError> {
        let addr = *self.peers.get(&to).ok_or(NetError::UnknownPeer(to))?;
        let bytes = encode(sender, msg)?;
        self.socket.send_to(&bytes, addr)?;
        Ok(())
    }

    /// Wait up to `timeout` for one datagram. Returns `None` on timeout.
    pub fn recv_timeout(
        &self,
        timeout: Duration,
    ) -> Result<Option<(NodeId, Message)>, NetError> {
        self.socket.set_read_timeout(Some(timeout))?;
        let mut buf = [0u8; MAX_DATAGRAM + 1];
        match self.socket.recv_from(&mut buf) {
            Ok((n, _)) => {
                let (sender, msg) = decode(&buf[..n])?;
                Ok(Some((sender, msg)))
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock || e.kind() == ErrorKind::TimedOut => {
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }
}
