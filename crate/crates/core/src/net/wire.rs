use crate::geometry::{MotionKind, Vec3};
use crate::scene::{ActionDescriptor, ActionId, ControlPacketObject, NodeId, ObjectId};
use crate::{Posed, Quaterniond};
use thiserror::Error;

/// Largest encoded message accepted; everything fits one datagram.
pub const MAX_DATAGRAM: usize = 1400;
/// Fixed header: type byte, sender id, payload length.
pub const HEADER_LEN: usize = 9;
/// Encoded size of one object state entry.
pub const STATE_ENTRY_LEN: usize = 113;
/// Most objects a single snapshot message can carry within the datagram
/// limit.
pub const MAX_SNAPSHOT_OBJECTS: usize =
    (MAX_DATAGRAM - HEADER_LEN - 4) / STATE_ENTRY_LEN;

const TYPE_JOIN: u8 = 0x01;
const TYPE_JOIN_ACK: u8 = 0x02;
const TYPE_LOCK_REQUEST: u8 = 0x03;
const TYPE_LOCK_GRANT: u8 = 0x04;
const TYPE_LOCK_DENY: u8 = 0x05;
const TYPE_STATE_UPDATE: u8 = 0x06;
const TYPE_PROBE_PING: u8 = 0x07;
const TYPE_PROBE_PONG: u8 = 0x08;
const TYPE_LOCK_RELEASE: u8 = 0x09;

const KIND_ROTATION: u8 = 0;
const KIND_TRANSLATION: u8 = 1;

const ORIENTATION_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("encoded message of {len} bytes exceeds the {MAX_DATAGRAM}-byte datagram limit")]
    Oversize { len: usize },
    #[error("unknown message type byte 0x{byte:02X}")]
    UnknownType { byte: u8 },
    #[error("message truncated: needed {needed} bytes, had {have}")]
    Truncated { needed: usize, have: usize },
    #[error("{extra} bytes left over after decoding")]
    TrailingBytes { extra: usize },
    #[error("orientation is not unit length (norm {norm})")]
    NonUnitOrientation { norm: f64 },
    #[error("unknown motion kind byte 0x{byte:02X}")]
    UnknownKind { byte: u8 },
}

/// Everything the nodes say to each other.
#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    /// Client asks to enter the session.
    Join,
    /// Server's reply: the full scene as of the send instant.
    JoinAck { objects: Vec<ControlPacketObject> },
    /// Client asks for the edit lock on one object.
    LockRequest { object: ObjectId },
    LockGrant { object: ObjectId },
    LockDeny { object: ObjectId },
    /// Authoritative object state, broadcast when an action begins.
    StateUpdate(ControlPacketObject),
    /// Delay probe; the receiver echoes it back unchanged.
    ProbePing { probe_id: u32, origin_time: f64 },
    ProbePong { probe_id: u32, origin_time: f64 },
    /// Holder gives the edit lock back.
    LockRelease { object: ObjectId },
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn put_vec3(buf: &mut Vec<u8>, v: Vec3<f64>) {
    put_f64(buf, v.x);
    put_f64(buf, v.y);
    put_f64(buf, v.z);
}

fn put_state(buf: &mut Vec<u8>, cpo: &ControlPacketObject) {
    put_u32(buf, cpo.object_id.0);
    put_f64(buf, cpo.server_timestamp);
    put_vec3(buf, cpo.pose.position);
    put_f64(buf, cpo.pose.orientation.w);
    put_f64(buf, cpo.pose.orientation.x);
    put_f64(buf, cpo.pose.orientation.y);
    put_f64(buf, cpo.pose.orientation.z);
    put_u32(buf, cpo.action.id.0);
    buf.push(match cpo.action.kind {
        MotionKind::Rotation => KIND_ROTATION,
        MotionKind::Translation => KIND_TRANSLATION,
    });
    put_vec3(buf, cpo.action.direction);
    put_f64(buf, cpo.action.velocity);
    put_f64(buf, cpo.action.start_time);
}

/// Serialize a message from `sender` into one datagram.
pub fn encode(sender: NodeId, msg: &Message) -> Result<Vec<u8>, ProtocolError> {
    let mut payload = Vec::new();
    let msg_type = match msg {
        Message::Join => TYPE_JOIN,
        Message::JoinAck { objects } => {
            put_u32(&mut payload, objects.len() as u32);
            for o in objects {
                put_state(&mut payload, o);
            }
            TYPE_JOIN_ACK
        }
        Message::LockRequest { object } => {
            put_u32(&mut payload, object.0);
            TYPE_LOCK_REQUEST
        }
        Message::LockGrant { object } => {
            put_u32(&mut payload, object.0);
            TYPE_LOCK_GRANT
        }
        Message::LockDeny { object } => {
            put_u32(&mut payload, object.0);
            TYPE_LOCK_DENY
        }
        Message::StateUpdate(cpo) => {
            put_state(&mut payload, cpo);
            TYPE_STATE_UPDATE
        }
        Message::ProbePing {
            probe_id,
            origin_time,
        } => {
            put_u32(&mut payload, *probe_id);
            put_f64(&mut payload, *origin_time);
            TYPE_PROBE_PING
        }
        Message::ProbePong {
            probe_id,
            origin_time,
        } => {
            put_u32(&mut payload, *probe_id);
            put_f64(&mut payload, *origin_time);
            TYPE_PROBE_PONG
        }
        Message::LockRelease { object } => {
            put_u32(&mut payload, object.0);
            TYPE_LOCK_RELEASE
        }
    };
    let total = HEADER_LEN + payload.len();
    if total > MAX_DATAGRAM {
        return Err(ProtocolError::Oversize { len: total });
    }
    let mut out = Vec::with_capacity(total);
    out.push(msg_type);
    put_u32(&mut out, sender.0);
    put_u32(&mut out, payload.len() as u32);
    out.extend_from_slice(&payload);
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, at: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ProtocolError> {
        if self.buf.len() - self.at < n {
            return Err(ProtocolError::Truncated {
                needed: self.at + n,
                have: self.buf.len(),
            });
        }
        let out = &self.buf[self.at..self.at + n];
        self.at += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, ProtocolError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, ProtocolError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, ProtocolError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn vec3(&mut self) -> Result<Vec3<f64>, ProtocolError> {
        Ok(Vec3::new(self.f64()?, self.f64()?, self.f64()?))
    }

    // The norm check is negated so a NaN norm is rejected, not let through.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn state(&mut self) -> Result<ControlPacketObject, ProtocolError> {
        let object_id = ObjectId(self.u32()?);
        let server_timestamp = self.f64()?;
        let position = self.vec3()?;
        let orientation = Quaterniond::new(self.f64()?, self.f64()?, self.f64()?, self.f64()?);
        let norm = orientation.norm();
        if !((norm - 1.0).abs() <= ORIENTATION_NORM_TOL) {
            return Err(ProtocolError::NonUnitOrientation { norm });
        }
        let action_id = ActionId(self.u32()?);
        let kind = match self.u8()? {
            KIND_ROTATION => MotionKind::Rotation,
            KIND_TRANSLATION => MotionKind::Translation,
            byte => return Err(ProtocolError::UnknownKind { byte }),
        };
        let direction = self.vec3()?;
        let velocity = self.f64()?;
        let start_time = self.f64()?;
        Ok(ControlPacketObject {
            object_id,
            server_timestamp,
            pose: Posed::new(position, orientation),
            action: ActionDescriptor {
                id: action_id,
                kind,
                direction,
                velocity,
                start_time,
            },
        })
    }

    fn finish(&self) -> Result<(), ProtocolError> {
        if self.at != self.buf.len() {
            return Err(ProtocolError::TrailingBytes {
                extra: self.buf.len() - self.at,
            });
        }
        Ok(())
    }
}

/// Parse one datagram back into sender and message. Inverse of [`encode`].
pub fn decode(bytes: &[u8]) -> Result<(NodeId, Message), ProtocolError> {
    if bytes.len() > MAX_DATAGRAM {
        return Err(ProtocolError::Oversize { len: bytes.len() });
    }
    let mut r = Reader::new(bytes);
    let msg_type = r.u8()?;
    let sender = NodeId(r.u32()?);
    let payload_len = r.u32()? as usize;
    let declared = HEADER_LEN.saturating_add(payload_len);
    if bytes.len() < declared {
        return Err(ProtocolError::Truncated {
            needed: declared,
            have: bytes.len(),
        });
    }
    if bytes.len() > declared {
        return Err(ProtocolError::TrailingBytes {
            extra: bytes.len() - declared,
        });
    }
    let msg = match msg_type {
        TYPE_JOIN => Message::Join,
        TYPE_JOIN_ACK => {
            let count = r.u32()?;
            let mut objects = Vec::new();
            for _ in 0..count {
                objects.push(r.state()?);
            }
            Message::JoinAck { objects }
        }
        TYPE_LOCK_REQUEST => Message::LockRequest {
            object: ObjectId(r.u32()?),
        },
        TYPE_LOCK_GRANT => Message::LockGrant {
            object: ObjectId(r.u32()?),
        },
        TYPE_LOCK_DENY => Message::LockDeny {
            object: ObjectId(r.u32()?),
        },
        TYPE_STATE_UPDATE => Message::StateUpdate(r.state()?),
        TYPE_PROBE_PING => Message::ProbePing {
            probe_id: r.u32()?,
            origin_time: r.f64()?,
        },
        TYPE_PROBE_PONG => Message::ProbePong {
            probe_id: r.u32()?,
            origin_time: r.f64()?,
        },
        TYPE_LOCK_RELEASE => Message::LockRelease {
            object: ObjectId(r.u32()?),
        },
        byte => return Err(ProtocolError::UnknownType { byte }),
    };
    r.finish()?;
    Ok((sender, msg))
}
