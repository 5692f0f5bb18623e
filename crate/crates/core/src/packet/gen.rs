//! Deterministic synthetic capture generation.
//!
//! Output is bit-identical for a given (spec, seed): packet protocols,
//! lengths, endpoints and payload bytes all come from one seeded stream,
//! and planted patterns are spliced in at exact payload offsets afterwards.

use super::pcap::{write_header, write_record};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("protocol mix has zero total weight")]
    EmptyMix,
    #[error("payload length range {min}..={max} is invalid (max {limit})")]
    BadPayloadRange { min: usize, max: usize, limit: usize },
    #[error("plant {plant}: packet index {packet} is beyond the {count}-packet capture")]
    PlantOutOfRange { plant: usize, packet: u64, count: u64 },
    #[error("plant {plant}: empty pattern")]
    EmptyPlantPattern { plant: usize },
    #[error("plant {plant}: offset {offset} + pattern length {pattern_len} exceeds the {payload_len}-byte payload of packet {packet}")]
    PlantDoesNotFit { plant: usize, packet: u64, offset: usize, pattern_len: usize, payload_len: usize },
}

/// Relative weights for the generated protocol mix. `other` emits IPv4
/// frames with an unassigned transport protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolMix {
    pub tcp: u32,
    pub udp: u32,
    pub icmp: u32,
    pub other: u32,
}

impl Default for ProtocolMix {
    fn default() -> Self {
        ProtocolMix { tcp: 6, udp: 3, icmp: 1, other: 0 }
    }
}

/// A pattern spliced into one packet's payload at a fixed offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plant {
    pub pattern: Vec<u8>,
    pub packet: u64,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub count: u64,
    pub mix: ProtocolMix,
    /// Inclusive payload length bounds.
    pub payload_len: (usize, usize),
    pub plants: Vec<Plant>,
}

const MAX_PAYLOAD: usize = 60_000;
const SNAPLEN: u32 = 65_535;

#[derive(Clone, Copy, PartialEq)]
enum GenProto {
    Tcp,
    Udp,
    Icmp,
    Other,
}

/// Produce a complete little-endian capture byte stream.
pub fn gen_capture(spec: &GenSpec, seed: u64) -> Result<Vec<u8>, GenError> {
    let total_weight = spec.mix.tcp as u64 + spec.mix.udp as u64 + spec.mix.icmp as u64 + spec.mix.other as u64;
    if total_weight == 0 {
        return Err(GenError::EmptyMix);
    }
    let (min_len, max_len) = spec.payload_len;
    if min_len > max_len || max_len > MAX_PAYLOAD {
        return Err(GenError::BadPayloadRange { min: min_len, max: max_len, limit: MAX_PAYLOAD });
    }
    for (i, plant) in spec.plants.iter().enumerate() {
        if plant.pattern.is_empty() {
            return Err(GenError::EmptyPlantPattern { plant: i });
        }
        if plant.packet >= spec.count {
            return Err(GenError::PlantOutOfRange { plant: i, packet: plant.packet, count: spec.count });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    write_header(&mut out, SNAPLEN);

    for index in 0..spec.count {
        let pick = rng.gen_range(0..total_weight);
        let proto = if pick < spec.mix.tcp as u64 {
            GenProto::Tcp
        } else if pick < (spec.mix.tcp + spec.mix.udp) as u64 {
            GenProto::Udp
        } else if pick < (spec.mix.tcp + spec.mix.udp + spec.mix.icmp) as u64 {
            GenProto::Icmp
        } else {
            GenProto::Other
        };
        let payload_len = rng.gen_range(min_len..=max_len);
        let src_ip: [u8; 4] = rng.gen::<u32>().to_be_bytes();
        let dst_ip: [u8; 4] = rng.gen::<u32>().to_be_bytes();
        let src_port: u16 = rng.gen();
        let dst_port: u16 = rng.gen();
        let mut payload = vec![0u8; payload_len];
        rng.fill(payload.as_mut_slice());

        for (i, plant) in spec.plants.iter().enumerate() {
            if plant.packet != index {
                continue;
            }
            let end = plant.offset + plant.pattern.len();
            if end > payload.len() {
                return Err(GenError::PlantDoesNotFit {
                    plant: i,
                    packet: index,
                    offset: plant.offset,
                    pattern_len: plant.pattern.len(),
                    payload_len: payload.len(),
                });
            }
            payload[plant.offset..end].copy_from_slice(&plant.pattern);
        }

        let frame = build_frame(proto, index, src_ip, dst_ip, src_port, dst_port, &payload);
        let ts_sec = 1_700_000_000u32 + (index / 1000) as u32;
        let ts_usec = (index % 1000) as u32 * 1000;
        write_record(&mut out, ts_sec, ts_usec, &frame);
    }
    Ok(out)
}

fn build_frame(
    proto: GenProto,
    index: u64,
    src_ip: [u8; 4],
    dst_ip: [u8; 4],
    src_port: u16,
    dst_port: u16,
    payload: &[u8],
) -> Vec<u8> {
    let l4 = match proto {
        GenProto::Tcp => {
            let mut h = Vec::with_capacity(20);
            h.extend_from_slice(&src_port.to_be_bytes());
            h.extend_from_slice(&dst_port.to_be_bytes());
            h.extend_from_slice(&[0u8; 8]); // seq, ack
            h.push(5 << 4); // data offset 5
            h.push(0x18); // PSH|ACK
            h.extend_from_slice(&[0xff, 0xff]); // window
            h.extend_from_slice(&[0u8; 4]); // checksum, urgent
            h
        }
        GenProto::Udp => {
            let mut h = Vec::with_capacity(8);
            h.extend_from_slice(&src_port.to_be_bytes());
            h.extend_from_slice(&dst_port.to_be_bytes());
            h.extend_from_slice(&((8 + payload.len()) as u16).to_be_bytes());
            h.extend_from_slice(&[0, 0]);
            h
        }
        GenProto::Icmp => {
            let mut h = Vec::with_capacity(8);
            h.push(8); // echo request
            h.push(0);
            h.extend_from_slice(&[0, 0]); // checksum
            h.extend_from_slice(&(index as u16).to_be_bytes());
            h.extend_from_slice(&1u16.to_be_bytes());
            h
        }
        GenProto::Other => Vec::new(),
    };
    let proto_byte = match proto {
        GenProto::Tcp => 6,
        GenProto::Udp => 17,
        GenProto::Icmp => 1,
        GenProto::Other => 253,
    };

    let total = 20 + l4.len() + payload.len();
    let mut f = Vec::with_capacity(14 + total);
    f.extend_from_slice(&[2, 0, 0, 0, 0, 1]);
    f.extend_from_slice(&[2, 0, 0, 0, 0, 2]);
    f.extend_from_slice(&0x0800u16.to_be_bytes());
    f.push(0x45);
    f.push(0);
    f.extend_from_slice(&(total as u16).to_be_bytes());
    f.extend_from_slice(&(index as u16).to_be_bytes());
    f.extend_from_slice(&[0, 0]); // flags/frag
    f.push(64);
    f.push(proto_byte);
    f.extend_from_slice(&[0, 0]); // checksum unused
    f.extend_from_slice(&src_ip);
    f.extend_from_slice(&dst_ip);
    f.extend_from_slice(&l4);
    f.extend_from_slice(payload);
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::{decode, read_capture, PacketProto};

    fn tcp_only(count: u64, len: usize) -> GenSpec {
        GenSpec {
            count,
            mix: ProtocolMix { tcp: 1, udp: 0, icmp: 0, other: 0 },
            payload_len: (len, len),
            plants: Vec::new(),
        }
    }

    #[test]
    fn single_tcp_packet_size_arithmetic() {
        // 24-byte header + 16-byte record header + 14+20+20+10 frame.
        let bytes = gen_capture(&tcp_only(1, 10), 1).unwrap();
        assert_eq!(bytes.len(), 24 + 16 + 64);
        let mut r = read_capture(&bytes[..]).unwrap();
        let rec = r.next().unwrap().unwrap();
        assert_eq!(rec.caplen, 64);
        assert!(r.next().is_none());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let spec = GenSpec {
            count: 50,
            mix: ProtocolMix::default(),
            payload_len: (10, 80),
            plants: vec![Plant { pattern: b"attack".to_vec(), packet: 7, offset: 2 }],
        };
        assert_eq!(gen_capture(&spec, 42).unwrap(), gen_capture(&spec, 42).unwrap());
        assert_ne!(gen_capture(&spec, 42).unwrap(), gen_capture(&spec, 43).unwrap());
    }

    #[test]
    fn plant_lands_at_requested_offset() {
        let mut spec = tcp_only(3, 10);
        spec.plants.push(Plant { pattern: b"attack".to_vec(), packet: 1, offset: 2 });
        let bytes = gen_capture(&spec, 9).unwrap();
        let packets: Vec<_> = read_capture(&bytes[..])
            .unwrap()
            .enumerate()
            .map(|(i, r)| decode(r.unwrap(), i as u64).unwrap())
            .collect();
        assert_eq!(packets.len(), 3);
        assert_eq!(packets[1].proto, PacketProto::Tcp);
        assert_eq!(&packets[1].payload()[2..8], b"attack");
    }

    #[test]
    fn plant_bounds_checked() {
        let mut spec = tcp_only(1, 10);
        spec.plants.push(Plant { pattern: vec![b'x'; 8], packet: 0, offset: 5 });
        assert!(matches!(gen_capture(&spec, 1), Err(GenError::PlantDoesNotFit { .. })));

        let mut spec = tcp_only(1, 10);
        spec.plants.push(Plant { pattern: b"x".to_vec(), packet: 5, offset: 0 });
        assert!(matches!(gen_capture(&spec, 1), Err(GenError::PlantOutOfRange { .. })));
    }

    #[test]
    fn zero_weight_mix_rejected() {
        let spec = GenSpec {
            count: 1,
            mix: ProtocolMix { tcp: 0, udp: 0, icmp: 0, other: 0 },
            payload_len: (1, 1),
            plants: Vec::new(),
        };
        assert_eq!(gen_capture(&spec, 1), Err(GenError::EmptyMix));
    }
}
