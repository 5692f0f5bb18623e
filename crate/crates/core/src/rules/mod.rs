//! Rule-language subset: header five-tuple constraints plus an ordered
//! content list with the six supported modifiers (content, nocase, offset,
//! depth, distance, within).
//!
//! Other rule options are legal in source files but unsupported here; rules
//! using them are skipped, not rejected, so large stock rulesets stay
//! loadable. Parsing lives in [`parse`]; every parsed rule can be
//! serialized back to one canonical line via [`std::fmt::Display`] and
//! reparsed to a structurally equal value.

mod parse;

pub use parse::{parse_content_arg, parse_rule, parse_ruleset, ParseOutcome, RuleParseError, RulesetError, SkipReason};

use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;

/// Rule action. Only `alert` exists in this subset; other actions are
/// parse errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Alert,
}

/// Protocols a rule can constrain; also the automaton partition key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Tcp,
    Udp,
    Icmp,
    Ip,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::Tcp, Protocol::Udp, Protocol::Icmp, Protocol::Ip];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Tcp => "tcp",
            Protocol::Udp => "udp",
            Protocol::Icmp => "icmp",
            Protocol::Ip => "ip",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `->`
    Uni,
    /// `<>`
    Bi,
}

/// Address constraint: `any`, a CIDR block, or a one-level list, with
/// optional negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddrSpec {
    pub negated: bool,
    pub kind: AddrKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AddrKind {
    Any,
    Cidr { addr: Ipv4Addr, prefix: u8 },
    List(Vec<AddrSpec>),
}

impl AddrSpec {
    pub fn any() -> Self {
        AddrSpec { negated: false, kind: AddrKind::Any }
    }

    pub fn cidr(addr: Ipv4Addr, prefix: u8) -> Self {
        debug_assert!(prefix <= 32);
        AddrSpec { negated: false, kind: AddrKind::Cidr { addr, prefix } }
    }

    /// Whether this spec accepts `ip`. Negation inverts the member test;
    /// a list accepts when any member accepts.
    pub fn matches(&self, ip: Ipv4Addr) -> bool {
        let base = match &self.kind {
            AddrKind::Any => true,
            AddrKind::Cidr { addr, prefix } => cidr_contains(*addr, *prefix, ip),
            AddrKind::List(members) => members.iter().any(|m| m.matches(ip)),
        };
        base != self.negated
    }
}

fn cidr_contains(net: Ipv4Addr, prefix: u8, ip: Ipv4Addr) -> bool {
    let mask = if prefix == 0 { 0u32 } else { u32::MAX << (32 - prefix as u32) };
    (u32::from(ip) & mask) == (u32::from(net) & mask)
}

/// Port constraint: `any`, a single port, or an inclusive range, with
/// optional negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortSpec {
    pub negated: bool,
    pub kind: PortKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    Any,
    Single(u16),
    Range(u16, u16),
}

impl PortSpec {
    pub fn any() -> Self {
        PortSpec { negated: false, kind: PortKind::Any }
    }

    pub fn single(port: u16) -> Self {
        PortSpec { negated: false, kind: PortKind::Single(port) }
    }

    /// Whether this spec accepts `port`. A portless packet (`None`) is
    /// vacuously accepted regardless of negation.
    pub fn matches(&self, port: Option<u16>) -> bool {
        let port = match port {
            Some(p) => p,
            None => return true,
        };
        let base = match self.kind {
            PortKind::Any => true,
            PortKind::Single(p) => port == p,
            PortKind::Range(lo, hi) => (lo..=hi).contains(&port),
        };
        base != self.negated
    }
}

/// One content option with its modifiers. `offset`/`depth` window the
/// match absolutely from the payload start; `distance`/`within` window it
/// relative to the previous content's match. The two pairs never co-occur
/// on the same content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentPattern {
    pub bytes: Vec<u8>,
    pub nocase: bool,
    pub offset: Option<u32>,
    pub depth: Option<u32>,
    pub distance: Option<u32>,
    pub within: Option<u32>,
}

impl ContentPattern {
    pub fn new(bytes: Vec<u8>) -> Self {
        ContentPattern { bytes, nocase: false, offset: None, depth: None, distance: None, within: None }
    }

    pub fn uses_absolute_window(&self) -> bool {
        self.offset.is_some() || self.depth.is_some()
    }

    pub fn uses_relative_window(&self) -> bool {
        self.distance.is_some() || self.within.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleHeader {
    pub action: Action,
    pub protocol: Protocol,
    pub src_addr: AddrSpec,
    pub src_port: PortSpec,
    pub direction: Direction,
    pub dst_addr: AddrSpec,
    pub dst_port: PortSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub header: RuleHeader,
    pub msg: String,
    pub sid: u32,
    /// In rule-source order; positional modifiers are relative to the
    /// previous entry.
    pub contents: Vec<ContentPattern>,
}

/// A `$NAME` binding. The raw value is parsed in both address and port
/// context up front; use-site position picks the right reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarValue {
    pub addr: Option<AddrSpec>,
    pub port: Option<PortSpec>,
    pub raw: String,
}

pub type Variables = BTreeMap<String, VarValue>;

impl VarValue {
    /// Parse a `NAME=VALUE` right-hand side. Variable values may not
    /// reference other variables.
    pub fn parse(raw: &str) -> Result<VarValue, RuleParseError> {
        let empty = Variables::new();
        let addr = parse::parse_addr_spec(raw, &empty).ok();
        let port = parse::parse_port_spec(raw, &empty).ok();
        if addr.is_none() && port.is_none() {
            return Err(RuleParseError::BadVariableValue(raw.to_string()));
        }
        Ok(VarValue { addr, port, raw: raw.to_string() })
    }
}

/// Result of loading a whole rules file: parsed rules plus a per-line
/// record of what was skipped and what failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub variables: Variables,
    /// (line number, reason) for comment/blank/unsupported-option lines.
    pub skipped: Vec<(usize, String)>,
    /// (line number, message) for lines that failed to parse.
    pub errors: Vec<(usize, String)>,
}

impl RuleSet {
    /// Rule counts per protocol, ordered tcp, udp, icmp, ip.
    pub fn protocol_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for r in &self.rules {
            let idx = match r.header.protocol {
                Protocol::Tcp => 0,
                Protocol::Udp => 1,
                Protocol::Icmp => 2,
                Protocol::Ip => 3,
            };
            counts[idx] += 1;
        }
        counts
    }
}

// ---------------------------------------------------------------------------
// Canonical serialization. `format!("{rule}")` yields one line that reparses
// to a structurally equal Rule.

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("alert")
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Uni => "->",
            Direction::Bi => "<>",
        })
    }
}

impl fmt::Display for AddrSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        match &self.kind {
            AddrKind::Any => f.write_str("any"),
            AddrKind::Cidr { addr, prefix } => write!(f, "{}/{}", addr, prefix),
            AddrKind::List(members) => {
                f.write_str("[")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", m)?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for PortSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        match self.kind {
            PortKind::Any => f.write_str("any"),
            PortKind::Single(p) => write!(f, "{}", p),
            PortKind::Range(lo, hi) => write!(f, "{}:{}", lo, hi),
        }
    }
}

/// Escape a msg string for quoting: `"`, `\` and `;` get a backslash.
fn write_escaped_msg(f: &mut fmt::Formatter<'_>, msg: &str) -> fmt::Result {
    for c in msg.chars() {
        match c {
            '"' | '\\' | ';' => write!(f, "\\{}", c)?,
            _ => write!(f, "{}", c)?,
        }
    }
    Ok(())
}

/// Canonical content text: printable ASCII stays literal, everything else
/// (and the `"` `\` `;` `|` metacharacters) goes into `|HH HH|` hex runs.
pub fn content_to_canonical(bytes: &[u8]) -> String {
    let mut out = String::new();
    let mut hex_run: Vec<u8> = Vec::new();
    let flush = |out: &mut String, run: &mut Vec<u8>| {
        if !run.is_empty() {
            out.push('|');
            for (i, b) in run.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{:02X}", b));
            }
            out.push('|');
            run.clear();
        }
    };
    for &b in bytes {
        let literal = (0x20..=0x7e).contains(&b) && !matches!(b, b'"' | b'\\' | b';' | b'|');
        if literal {
            flush(&mut out, &mut hex_run);
            out.push(b as char);
        } else {
            hex_run.push(b);
        }
    }
    flush(&mut out, &mut hex_run);
    out
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        write!(
            f,
            "{} {} {} {} {} {} {} (",
            h.action, h.protocol, h.src_addr, h.src_port, h.direction, h.dst_addr, h.dst_port
        )?;
        f.write_str("msg:\"")?;
        write_escaped_msg(f, &self.msg)?;
        f.write_str("\"; ")?;
        for c in &self.contents {
            write!(f, "content:\"{}\"; ", content_to_canonical(&c.bytes))?;
            if c.nocase {
                f.write_str("nocase; ")?;
            }
            if let Some(v) = c.offset {
                write!(f, "offset:{}; ", v)?;
            }
            if let Some(v) = c.depth {
                write!(f, "depth:{}; ", v)?;
            }
            if let Some(v) = c.distance {
                write!(f, "distance:{}; ", v)?;
            }
            if let Some(v) = c.within {
                write!(f, "within:{}; ", v)?;
            }
        }
        write!(f, "sid:{};)", self.sid)
    }
}
