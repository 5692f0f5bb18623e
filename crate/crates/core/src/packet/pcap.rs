//! Classic capture-file format: 24-byte global header, then per-packet
//! 16-byte record headers plus captured bytes. Both byte orders and the
//! nanosecond magic variant are accepted; only Ethernet link type 1 is
//! supported.

use std::io::Read;
use thiserror::Error;

const MAGIC_USEC: u32 = 0xa1b2_c3d4;
const MAGIC_NSEC: u32 = 0xa1b2_3c4d;
pub(crate) const LINKTYPE_ETHERNET: u32 = 1;

#[derive(Debug, Error)]
pub enum PcapError {
    #[error("unknown capture magic {0:#010x}")]
    UnknownMagic(u32),
    #[error("unsupported link type {0} (only Ethernet, link type 1)")]
    UnsupportedLinkType(u32),
    #[error("capture header truncated")]
    ShortHeader,
    #[error("record {index}: {reason}")]
    BadRecord { index: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

impl ByteOrder {
    fn u32_from(self, b: [u8; 4]) -> u32 {
        match self {
            ByteOrder::Little => u32::from_le_bytes(b),
            ByteOrder::Big => u32::from_be_bytes(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaptureHeader {
    pub byte_order: ByteOrder,
    pub snaplen: u32,
    pub link_type: u32,
    /// True for the nanosecond-precision magic; record timestamps are
    /// normalized to microseconds on read.
    pub nanosecond: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketRecord {
    pub ts_sec: u32,
    /// Microseconds (nanosecond captures are divided by 1000).
    pub ts_usec: u32,
    pub caplen: u32,
    pub origlen: u32,
    pub data: Vec<u8>,
}

/// Streaming record reader over any byte source.
///
/// A truncated trailing record ends iteration and sets [`truncated`];
/// it is a warning, not an error. A record header claiming more captured
/// bytes than the snap length (or than the original length) is corrupt
/// and yields an error.
///
/// [`truncated`]: CaptureReader::truncated
pub struct CaptureReader<R: Read> {
    reader: R,
    header: CaptureHeader,
    index: u64,
    truncated: bool,
    done: bool,
}

/// Decode the global header and return a record iterator over the rest.
pub fn read_capture<R: Read>(mut reader: R) -> Result<CaptureReader<R>, PcapError> {
    let mut raw = [0u8; 24];
    if read_full(&mut reader, &mut raw)? != 24 {
        return Err(PcapError::ShortHeader);
    }
    let magic_le = u32::from_le_bytes([raw[0], raw[1], raw[2], raw[3]]);
    let magic_be = u32::from_be_bytes([raw[0], raw[1], raw[2], raw[3]]);
    let (byte_order, nanosecond) = if magic_le == MAGIC_USEC {
        (ByteOrder::Little, false)
    } else if magic_be == MAGIC_USEC {
        (ByteOrder::Big, false)
    } else if magic_le == MAGIC_NSEC {
        (ByteOrder::Little, true)
    } else if magic_be == MAGIC_NSEC {
        (ByteOrder::Big, true)
    } else {
        return Err(PcapError::UnknownMagic(magic_le));
    };
    let field = |off: usize| byte_order.u32_from([raw[off], raw[off + 1], raw[off + 2], raw[off + 3]]);
    let snaplen = field(16);
    let link_type = field(20);
    if link_type != LINKTYPE_ETHERNET {
        return Err(PcapError::UnsupportedLinkType(link_type));
    }
    let header = CaptureHeader { byte_order, snaplen, link_type, nanosecond };
    Ok(CaptureReader { reader, header, index: 0, truncated: false, done: false })
}

impl<R: Read> CaptureReader<R> {
    pub fn header(&self) -> &CaptureHeader {
        &self.header
    }

    /// True once iteration ended on a partially written trailing record.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Records yielded so far.
    pub fn records_read(&self) -> u64 {
        self.index
    }
}

impl<R: Read> Iterator for CaptureReader<R> {
    type Item = Result<PacketRecord, PcapError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut head = [0u8; 16];
        let n = match read_full(&mut self.reader, &mut head) {
            Ok(n) => n,
            Err(e) => {
                self.done = true;
                return Some(Err(e.into()));
            }
        };
        if n == 0 {
            self.done = true;
            return None;
        }
        if n < 16 {
            self.truncated = true;
            self.done = true;
            return None;
        }
        let order = self.header.byte_order;
        let field = |off: usize| order.u32_from([head[off], head[off + 1], head[off + 2], head[off + 3]]);
        let ts_sec = field(0);
        let mut ts_usec = field(4);
        if self.header.nanosecond {
            ts_usec /= 1000;
        }
        let caplen = field(8);
        let origlen = field(12);
        if caplen > self.header.snaplen {
            self.done = true;
            return Some(Err(PcapError::BadRecord {
                index: self.index,
                reason: format!("caplen {} exceeds snaplen {}", caplen, self.header.snaplen),
            }));
        }
        if caplen > origlen {
            self.done = true;
            return Some(Err(PcapError::BadRecord {
                index: self.index,
                reason: format!("caplen {} exceeds original length {}", caplen, origlen),
            }));
        }
        let mut data = vec![0u8; caplen as usize];
        let got = match read_full(&mut self.reader, &mut data) {
            Ok(got) => got,
            Err(e) => {
                self.done = true;
                return Some(Err(e.into()));
            }
        };
        if got < caplen as usize {
            self.truncated = true;
            self.done = true;
            return None;
        }
        self.index += 1;
        Some(Ok(PacketRecord { ts_sec, ts_usec, caplen, origlen, data }))
    }
}

/// Read until the buffer is full or EOF; returns bytes read.
fn read_full<R: Read>(reader: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Append a little-endian microsecond-magic global header.
pub(crate) fn write_header(out: &mut Vec<u8>, snaplen: u32) {
    out.extend_from_slice(&MAGIC_USEC.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // version major
    out.extend_from_slice(&4u16.to_le_bytes()); // version minor
    out.extend_from_slice(&0i32.to_le_bytes()); // thiszone
    out.extend_from_slice(&0u32.to_le_bytes()); // sigfigs
    out.extend_from_slice(&snaplen.to_le_bytes());
    out.extend_from_slice(&LINKTYPE_ETHERNET.to_le_bytes());
}

pub(crate) fn write_record(out: &mut Vec<u8>, ts_sec: u32, ts_usec: u32, frame: &[u8]) {
    out.extend_from_slice(&ts_sec.to_le_bytes());
    out.extend_from_slice(&ts_usec.to_le_bytes());
    out.extend_from_slice(&(frame.len() as u32).to_le_bytes());
    out.extend_from_slice(&(frame.len() as u32).to_le_bytes());
    out.extend_from_slice(frame);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le_header() -> Vec<u8> {
        let mut v = Vec::new();
        write_header(&mut v, 65535);
        v
    }

    fn be_header() -> Vec<u8> {
        let mut v = Vec::new();
        v.extend_from_slice(&MAGIC_USEC.to_be_bytes());
        v.extend_from_slice(&2u16.to_be_bytes());
        v.extend_from_slice(&4u16.to_be_bytes());
        v.extend_from_slice(&0i32.to_be_bytes());
        v.extend_from_slice(&0u32.to_be_bytes());
        v.extend_from_slice(&65535u32.to_be_bytes());
        v.extend_from_slice(&1u32.to_be_bytes());
        v
    }

    #[test]
    fn empty_little_endian_capture() {
        let bytes = le_header();
        let mut r = read_capture(&bytes[..]).unwrap();
        assert_eq!(r.header().byte_order, ByteOrder::Little);
        assert!(!r.header().nanosecond);
        assert_eq!(r.header().snaplen, 65535);
        assert!(r.next().is_none());
        assert!(!r.truncated());
    }

    #[test]
    fn empty_big_endian_capture() {
        let bytes = be_header();
        let mut r = read_capture(&bytes[..]).unwrap();
        assert_eq!(r.header().byte_order, ByteOrder::Big);
        assert!(r.next().is_none());
    }

    #[test]
    fn unknown_magic_rejected() {
        let mut bytes = le_header();
        bytes[0..4].copy_from_slice(&0xdeadbeefu32.to_le_bytes());
        assert!(matches!(read_capture(&bytes[..]), Err(PcapError::UnknownMagic(_))));
    }

    #[test]
    fn non_ethernet_rejected() {
        let mut bytes = le_header();
        bytes[20..24].copy_from_slice(&101u32.to_le_bytes());
        assert!(matches!(read_capture(&bytes[..]), Err(PcapError::UnsupportedLinkType(101))));
    }

    #[test]
    fn nanosecond_magic_scales_timestamps() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&MAGIC_NSEC.to_le_bytes());
        bytes.extend_from_slice(&le_header()[4..]);
        write_record(&mut bytes, 10, 0, &[0u8; 4]);
        let usec_off = 24 + 4;
        bytes[usec_off..usec_off + 4].copy_from_slice(&123_456u32.to_le_bytes());
        let mut r = read_capture(&bytes[..]).unwrap();
        assert!(r.header().nanosecond);
        let rec = r.next().unwrap().unwrap();
        assert_eq!(rec.ts_usec, 123);
    }

    #[test]
    fn record_roundtrip() {
        let mut bytes = le_header();
        write_record(&mut bytes, 7, 9, b"abcdef");
        let mut r = read_capture(&bytes[..]).unwrap();
        let rec = r.next().unwrap().unwrap();
        assert_eq!((rec.ts_sec, rec.ts_usec, rec.caplen, rec.origlen), (7, 9, 6, 6));
        assert_eq!(rec.data, b"abcdef");
        assert!(r.next().is_none());
    }

    #[test]
    fn truncated_trailing_record_is_warning() {
        let mut bytes = le_header();
        write_record(&mut bytes, 0, 0, &[1, 2, 3, 4]);
        bytes.truncate(bytes.len() - 2);
        let mut r = read_capture(&bytes[..]).unwrap();
        assert!(r.next().is_none());
        assert!(r.truncated());

        // Partial record header, same treatment.
        let mut bytes = le_header();
        bytes.extend_from_slice(&[0u8; 7]);
        let mut r = read_capture(&bytes[..]).unwrap();
        assert!(r.next().is_none());
        assert!(r.truncated());
    }

    #[test]
    fn overclaiming_record_is_error() {
        let mut bytes = Vec::new();
        write_header(&mut bytes, 10);
        // Record header claiming caplen 20 with snaplen 10.
        bytes.extend_from_slice(&0u32.to_le_bytes());
        bytes.extend_from_slice(&0u32.to_le_bytes());
        bytes.extend_from_slice(&20u32.to_le_bytes());
        bytes.extend_from_slice(&20u32.to_le_bytes());
        bytes.extend_from_slice(&[0u8; 20]);
        let mut r = read_capture(&bytes[..]).unwrap();
        assert!(matches!(r.next(), Some(Err(PcapError::BadRecord { .. }))));
        assert!(r.next().is_none());
    }
}
