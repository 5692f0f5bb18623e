//! Capture-file reading, frame decoding, and deterministic synthetic
//! capture generation.

mod decode;
mod gen;
mod pcap;

pub use decode::{decode, DecodeError};
pub use gen::{gen_capture, GenError, GenSpec, Plant, ProtocolMix};
pub use pcap::{read_capture, ByteOrder, CaptureHeader, CaptureReader, PacketRecord, PcapError};

use std::fmt;
use std::net::Ipv4Addr;
use std::ops::Range;

/// Protocol class of a decoded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketProto {
    Tcp,
    Udp,
    Icmp,
    /// IPv4 with a transport protocol other than TCP/UDP/ICMP.
    OtherIp,
    /// Non-IPv4 EtherType; carries no inspectable payload.
    NonIp,
}

impl fmt::Display for PacketProto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PacketProto::Tcp => "tcp",
            PacketProto::Udp => "udp",
            PacketProto::Icmp => "icmp",
            PacketProto::OtherIp => "other_ip",
            PacketProto::NonIp => "non_ip",
        })
    }
}

/// A decoded capture record. The payload is kept as a span into the raw
/// frame bytes and is guaranteed in-bounds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPacket {
    pub proto: PacketProto,
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    /// Present iff tcp/udp.
    pub src_port: Option<u16>,
    pub dst_port: Option<u16>,
    /// Ordinal of the packet in its capture.
    pub index: u64,
    data: Vec<u8>,
    payload: Range<usize>,
}

impl ParsedPacket {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        proto: PacketProto,
        src_ip: Ipv4Addr,
        dst_ip: Ipv4Addr,
        src_port: Option<u16>,
        dst_port: Option<u16>,
        index: u64,
        data: Vec<u8>,
        payload: Range<usize>,
    ) -> Self {
        debug_assert!(payload.start <= payload.end && payload.end <= data.len());
        ParsedPacket { proto, src_ip, dst_ip, src_port, dst_port, index, data, payload }
    }

    /// Build a packet directly from its parts, payload spanning all of
    /// `payload` bytes. Intended for tests and synthetic pipelines.
    pub fn from_parts(
        proto: PacketProto,
        src_ip: Ipv4Addr,
        dst_ip: Ipv4Addr,
        src_port: Option<u16>,
        dst_port: Option<u16>,
        index: u64,
        payload: Vec<u8>,
    ) -> Self {
        let span = 0..payload.len();
        ParsedPacket::new(proto, src_ip, dst_ip, src_port, dst_port, index, payload, span)
    }

    pub fn payload(&self) -> &[u8] {
        &self.data[self.payload.clone()]
    }

    /// The raw frame bytes the payload span points into.
    pub fn frame(&self) -> &[u8] {
        &self.data
    }

    pub fn payload_range(&self) -> Range<usize> {
        self.payload.clone()
    }
}
