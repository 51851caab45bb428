//! Framed binary protocol between coordinator and workers.
//!
//! Every frame is `"OFS1"`, a one-byte message type, a 4-byte big-endian
//! payload length, then the payload.

use std::io::{self, Read, Write};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::strategy::TaskId;

pub const MAGIC: [u8; 4] = *b"OFS1";
pub const PROTOCOL_VERSION: u16 = 1;
/// Frames larger than this are treated as corrupt.
pub const MAX_PAYLOAD: u32 = 256 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum MessageType {
    Hello = 1,
    Task = 2,
    Result = 3,
    Ping = 4,
    Bye = 5,
}

impl MessageType {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            1 => MessageType::Hello,
            2 => MessageType::Task,
            3 => MessageType::Result,
            4 => MessageType::Ping,
            5 => MessageType::Bye,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireMessage {
    pub kind: MessageType,
    pub payload: Vec<u8>,
}

impl WireMessage {
    pub fn new(kind: MessageType, payload: Vec<u8>) -> Self {
        WireMessage { kind, payload }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(9 + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&self.encode())?;
        w.flush()?;
        Ok(())
    }

    /// Reads one frame. A bad magic, an unknown type or an oversized length
    /// is a protocol error; the caller is expected to drop the connection.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut header = [0u8; 9];
        r.read_exact(&mut header)?;
        if header[..4] != MAGIC {
            return Err(Error::Protocol(format!("bad magic {:?}", &header[..4])));
        }
        let kind = MessageType::from_byte(header[4])
            .ok_or_else(|| Error::Protocol(format!("unknown message type {}", header[4])))?;
        let len = u32::from_be_bytes([header[5], header[6], header[7], header[8]]);
        if len > MAX_PAYLOAD {
            return Err(Error::Protocol(format!("frame of {len} bytes exceeds limit")));
        }
        let mut payload = vec![0u8; len as usize];
        r.read_exact(&mut payload)?;
        Ok(WireMessage { kind, payload })
    }

    pub fn ping() -> Self {
        WireMessage::new(MessageType::Ping, Vec::new())
    }

    pub fn bye() -> Self {
        WireMessage::new(MessageType::Bye, Vec::new())
    }
}

/// True when `err` means the peer went away rather than misbehaved.
pub fn is_disconnect(err: &Error) -> bool {
    match err {
        Error::Io(e) => matches!(
            e.kind(),
            io::ErrorKind::UnexpectedEof
                | io::ErrorKind::ConnectionReset
                | io::ErrorKind::ConnectionAborted
                | io::ErrorKind::BrokenPipe
        ),
        _ => false,
    }
}

/// Big-endian cursor over a payload; every read fails cleanly on truncation.
pub struct PayloadReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> PayloadReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        PayloadReader { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::decode(format!("payload truncated: need {n} bytes at offset {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn string(&mut self) -> Result<String> {
        let len = self.u16()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|e| Error::decode(format!("invalid UTF-8: {e}")))
    }

    pub fn rest(&mut self) -> &'a [u8] {
        let s = &self.buf[self.pos..];
        self.pos = self.buf.len();
        s
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::decode(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

/// Big-endian payload builder.
#[derive(Default)]
pub struct PayloadWriter {
    buf: Vec<u8>,
}

impl PayloadWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u16(&mut self, v: u16) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    /// u16 length prefix then UTF-8 bytes. Panics above 65535 bytes.
    pub fn string(&mut self, s: &str) -> &mut Self {
        let len = u16::try_from(s.len()).expect("string longer than 65535 bytes");
        self.u16(len);
        self.buf.extend_from_slice(s.as_bytes());
        self
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(b);
        self
    }

    pub fn finish(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.buf)
    }
}

/// HELLO payload: protocol version then worker name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hello {
    pub version: u16,
    pub name: String,
}

impl Hello {
    pub fn encode(&self) -> WireMessage {
        let payload = PayloadWriter::new().u16(self.version).string(&self.name).finish();
        WireMessage::new(MessageType::Hello, payload)
    }

    pub fn decode(payload: &[u8]) -> Result<Self> {
        let mut r = PayloadReader::new(payload);
        let hello = Hello { version: r.u16()?, name: r.string()? };
        r.finish()?;
        Ok(hello)
    }
}

/// TASK payload: task id then the opaque task bytes.
pub fn encode_task(task_id: TaskId, payload: &[u8]) -> WireMessage {
    let payload = PayloadWriter::new().u64(task_id).bytes(payload).finish();
    WireMessage::new(MessageType::Task, payload)
}

pub fn decode_task(payload: &[u8]) -> Result<(TaskId, Vec<u8>)> {
    let mut r = PayloadReader::new(payload);
    let id = r.u64()?;
    Ok((id, r.rest().to_vec()))
}

/// RESULT payload: task id, status byte (0 ok, 1 failed), pure execution
/// time in nanoseconds, then the result bytes (or the failure message).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultFrame {
    pub task_id: TaskId,
    pub succeeded: bool,
    pub pure_execution_time: Duration,
    pub payload: Vec<u8>,
}

impl ResultFrame {
    pub fn encode(&self) -> WireMessage {
        let nanos = u64::try_from(self.pure_execution_time.as_nanos()).unwrap_or(u64::MAX);
        let payload = PayloadWriter::new()
            .u64(self.task_id)
            .u8(if self.succeeded { 0 } else { 1 })
            .u64(nanos)
            .bytes(&self.payload)
            .finish();
        WireMessage::new(MessageType::Result, payload)
    }

    pub fn decode(payload: &[u8]) -> Result<Self> {
        let mut r = PayloadReader::new(payload);
        let task_id = r.u64()?;
        let succeeded = match r.u8()? {
            0 => true,
            1 => false,
            s => return Err(Error::decode(format!("bad result status {s}"))),
        };
        let pure_execution_time = Duration::from_nanos(r.u64()?);
        Ok(ResultFrame { task_id, succeeded, pure_execution_time, payload: r.rest().to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_layout_is_exact() {
        let m = WireMessage::new(MessageType::Task, vec![0xAB, 0xCD]);
        assert_eq!(m.encode(), vec![b'O', b'F', b'S', b'1', 2, 0, 0, 0, 2, 0xAB, 0xCD]);
        let back = WireMessage::read_from(&mut m.encode().as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_frames() {
        let mut bad_magic = WireMessage::ping().encode();
        bad_magic[0] = b'X';
        assert!(matches!(WireMessage::read_from(&mut bad_magic.as_slice()), Err(Error::Protocol(_))));

        let mut bad_type = WireMessage::ping().encode();
        bad_type[4] = 9;
        assert!(matches!(WireMessage::read_from(&mut bad_type.as_slice()), Err(Error::Protocol(_))));

        let short = &WireMessage::new(MessageType::Task, vec![1, 2, 3]).encode()[..10];
        let err = WireMessage::read_from(&mut &short[..]).unwrap_err();
        assert!(is_disconnect(&err));
    }

    #[test]
    fn hello_and_result_payloads() {
        let h = Hello { version: PROTOCOL_VERSION, name: "w-1".into() };
        let m = h.encode();
        assert_eq!(m.payload, vec![0, 1, 0, 3, b'w', b'-', b'1']);
        assert_eq!(Hello::decode(&m.payload).unwrap(), h);

        let r = ResultFrame {
            task_id: 42,
            succeeded: false,
            pure_execution_time: Duration::from_nanos(1500),
            payload: b"oops".to_vec(),
        };
        assert_eq!(ResultFrame::decode(&r.encode().payload).unwrap(), r);

        let (id, body) = decode_task(&encode_task(7, b"xyz").payload).unwrap();
        assert_eq!((id, body.as_slice()), (7, &b"xyz"[..]));
        assert!(decode_task(&[0, 0, 1]).is_err());
    }
}
