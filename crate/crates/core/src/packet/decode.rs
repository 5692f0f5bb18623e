//! Ethernet II / IPv4 frame decoding.
//!
//! The decoder classifies frames into tcp/udp/icmp/other-IPv4/non-IP and
//! extracts endpoints plus the application payload span. All offsets are
//! clamped to the captured bytes; the IPv4 total-length field is trusted
//! only when it fits inside the capture. Fragments are not reassembled;
//! each fragment's bytes are inspected as captured.

use super::pcap::PacketRecord;
use super::{PacketProto, ParsedPacket};
use std::net::Ipv4Addr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("frame too short ({0} bytes)")]
    ShortFrame(usize),
    #[error("bad IPv4 header length {0}")]
    BadIpHeaderLen(u8),
    #[error("bad TCP data offset {0}")]
    BadTcpOffset(u8),
}

const ETHERTYPE_IPV4: u16 = 0x0800;
const ETHERTYPE_VLAN: u16 = 0x8100;

fn be16(data: &[u8], off: usize) -> u16 {
    u16::from_be_bytes([data[off], data[off + 1]])
}

/// Decode one captured record into a [`ParsedPacket`] with ordinal `index`.
pub fn decode(rec: PacketRecord, index: u64) -> Result<ParsedPacket, DecodeError> {
    let data = rec.data;
    let len = data.len();
    if len < 14 {
        return Err(DecodeError::ShortFrame(len));
    }

    // EtherType, skipping any VLAN tags.
    let mut et_off = 12;
    let mut ethertype = be16(&data, et_off);
    while ethertype == ETHERTYPE_VLAN {
        et_off += 4;
        if et_off + 2 > len {
            return Err(DecodeError::ShortFrame(len));
        }
        ethertype = be16(&data, et_off);
    }
    let ip0 = et_off + 2;

    if ethertype != ETHERTYPE_IPV4 {
        return Ok(ParsedPacket::new(
            PacketProto::NonIp,
            Ipv4Addr::UNSPECIFIED,
            Ipv4Addr::UNSPECIFIED,
            None,
            None,
            index,
            data,
            0..0,
        ));
    }

    if ip0 + 20 > len {
        return Err(DecodeError::ShortFrame(len));
    }
    let ihl = data[ip0] & 0x0f;
    if ihl < 5 {
        return Err(DecodeError::BadIpHeaderLen(ihl));
    }
    let ip_header_end = ip0 + ihl as usize * 4;
    if ip_header_end > len {
        return Err(DecodeError::ShortFrame(len));
    }

    let total_len = be16(&data, ip0 + 2) as usize;
    // Trust the total-length field only when it covers the IP header and
    // fits in the capture; otherwise fall back to the captured bytes.
    let ip_end = if total_len >= ihl as usize * 4 && ip0 + total_len <= len {
        ip0 + total_len
    } else {
        len
    };

    let proto_byte = data[ip0 + 9];
    let src_ip = Ipv4Addr::new(data[ip0 + 12], data[ip0 + 13], data[ip0 + 14], data[ip0 + 15]);
    let dst_ip = Ipv4Addr::new(data[ip0 + 16], data[ip0 + 17], data[ip0 + 18], data[ip0 + 19]);
    let l4 = ip_header_end;

    let clamp_span = |start: usize| -> std::ops::Range<usize> {
        let end = ip_end;
        if start >= end {
            end..end
        } else {
            start..end
        }
    };

    match proto_byte {
        6 => {
            // Need ports plus the data-offset byte.
            if l4 + 13 > len {
                return Err(DecodeError::ShortFrame(len));
            }
            let src_port = be16(&data, l4);
            let dst_port = be16(&data, l4 + 2);
            let data_off = data[l4 + 12] >> 4;
            if data_off < 5 {
                return Err(DecodeError::BadTcpOffset(data_off));
            }
            let span = clamp_span(l4 + data_off as usize * 4);
            Ok(ParsedPacket::new(PacketProto::Tcp, src_ip, dst_ip, Some(src_port), Some(dst_port), index, data, span))
        }
        17 => {
            if l4 + 8 > len {
                return Err(DecodeError::ShortFrame(len));
            }
            let src_port = be16(&data, l4);
            let dst_port = be16(&data, l4 + 2);
            let span = clamp_span(l4 + 8);
            Ok(ParsedPacket::new(PacketProto::Udp, src_ip, dst_ip, Some(src_port), Some(dst_port), index, data, span))
        }
        1 => {
            if l4 + 8 > len {
                return Err(DecodeError::ShortFrame(len));
            }
            // Payload excludes the 8-byte ICMP header.
            let span = clamp_span(l4 + 8);
            Ok(ParsedPacket::new(PacketProto::Icmp, src_ip, dst_ip, None, None, index, data, span))
        }
        _ => {
            let span = clamp_span(l4);
            Ok(ParsedPacket::new(PacketProto::OtherIp, src_ip, dst_ip, None, None, index, data, span))
        }
    }
}
