//! Line-oriented parser for the supported rule grammar:
//!
//! ```text
//! action protocol addr port dir addr port ( options )
//! ```
//!
//! with options `msg:"…";`, `sid:N;`, `content:"…";`, `nocase;`,
//! `offset:N;`, `depth:N;`, `distance:N;`, `within:N;`. Address specs are
//! `any`, `A.B.C.D/P` (bare addresses read as /32), `$VAR`, `!spec` or a
//! one-level `[spec,spec,…]` list; port specs are `any`, `N`, `N:M`, `:M`,
//! `N:`, `!spec` or `$VAR`.
//!
//! A line parses to a rule, a skip (comments, blanks, rules using legal
//! but unsupported options), or a hard error (malformed syntax, violated
//! content invariants, unresolved variables).

use super::{
    Action, AddrKind, AddrSpec, ContentPattern, Direction, PortKind, PortSpec, Protocol, Rule,
    RuleHeader, RuleSet, Variables,
};
use std::collections::BTreeMap;
use std::fmt;
use std::net::Ipv4Addr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleParseError {
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("unsupported rule action \"{0}\"")]
    BadAction(String),
    #[error("unknown protocol \"{0}\"")]
    BadProtocol(String),
    #[error("bad direction \"{0}\" (expected -> or <>)")]
    BadDirection(String),
    #[error("expected 7 header fields before the options, found {0}")]
    BadHeaderShape(usize),
    #[error("bad address spec \"{spec}\": {reason}")]
    BadAddr { spec: String, reason: String },
    #[error("nested address lists are not allowed")]
    NestedList,
    #[error("bad port spec \"{spec}\": {reason}")]
    BadPort { spec: String, reason: String },
    #[error("unresolved variable ${0}")]
    UnresolvedVariable(String),
    #[error("variable ${name} is not usable as {expected}")]
    VariableKind { name: String, expected: &'static str },
    #[error("variable value \"{0}\" parses as neither address nor port spec")]
    BadVariableValue(String),
    #[error("option syntax error: {0}")]
    OptionSyntax(String),
    #[error("unterminated string")]
    UnterminatedString,
    #[error("missing semicolon after option \"{0}\"")]
    MissingSemicolon(String),
    #[error("bad escape sequence in string: {0}")]
    BadEscape(String),
    #[error("empty content")]
    EmptyContent,
    #[error("odd hex digit count in content hex run")]
    OddHexDigits,
    #[error("non-hex character {0:?} inside content hex run")]
    NonHexInPipes(char),
    #[error("unterminated hex run in content")]
    UnterminatedPipes,
    #[error("bad integer for option \"{option}\": {value}")]
    BadInteger { option: String, value: String },
    #[error("duplicate option \"{0}\"")]
    DuplicateOption(String),
    #[error("modifier \"{0}\" appears before any content")]
    ModifierBeforeContent(String),
    #[error("distance/within may not appear on the first content")]
    RelativeOnFirstContent,
    #[error("offset/depth cannot co-occur with distance/within on one content")]
    ConflictingModifiers,
    #[error("depth {depth} is shorter than the {len}-byte content")]
    DepthTooSmall { depth: u32, len: usize },
    #[error("option \"{option}\" must be positive")]
    ZeroNotAllowed { option: String },
    #[error("missing sid option")]
    MissingSid,
    #[error("trailing content after options: \"{0}\"")]
    TrailingContent(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RulesetError {
    #[error("duplicate sid {sid} on lines {first_line} and {second_line}")]
    DuplicateSid { sid: u32, first_line: usize, second_line: usize },
    #[error("no rules parsed: {error_count} hard error(s), first at line {first_line}: {first_error}")]
    NoRulesParsed { error_count: usize, first_line: usize, first_error: String },
}

/// Why a line was skipped rather than parsed into a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    Comment,
    Blank,
    UnsupportedOption(String),
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::Comment => f.write_str("comment"),
            SkipReason::Blank => f.write_str("blank"),
            SkipReason::UnsupportedOption(name) => write!(f, "unsupported option: {}", name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseOutcome {
    Rule(Rule),
    Skip(SkipReason),
}

/// Parse one logical rule line (continuations already joined).
pub fn parse_rule(line: &str, variables: &Variables) -> Result<ParseOutcome, RuleParseError> {
    let line = line.trim();
    if line.is_empty() {
        return Ok(ParseOutcome::Skip(SkipReason::Blank));
    }
    if line.starts_with('#') {
        return Ok(ParseOutcome::Skip(SkipReason::Comment));
    }

    let open = line.find('(').ok_or(RuleParseError::UnbalancedParens)?;
    let (header_text, rest) = line.split_at(open);
    let (options_text, after) = split_options(rest)?;
    if !after.trim().is_empty() {
        return Err(RuleParseError::TrailingContent(after.trim().to_string()));
    }

    let header = parse_header(header_text, variables)?;
    let raw_options = tokenize_options(options_text)?;
    build_rule(header, raw_options)
}

/// `rest` starts at '('. Returns (inner options text, trailing text).
fn split_options(rest: &str) -> Result<(&str, &str), RuleParseError> {
    debug_assert!(rest.starts_with('('));
    let bytes = rest.as_bytes();
    let mut in_quote = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        if escaped {
            escaped = false;
            continue;
        }
        match b {
            b'\\' if in_quote => escaped = true,
            b'"' => in_quote = !in_quote,
            b')' if !in_quote => return Ok((&rest[1..i], &rest[i + 1..])),
            _ => {}
        }
    }
    Err(RuleParseError::UnbalancedParens)
}

fn parse_header(text: &str, variables: &Variables) -> Result<RuleHeader, RuleParseError> {
    let tokens = header_tokens(text)?;
    if tokens.len() != 7 {
        return Err(RuleParseError::BadHeaderShape(tokens.len()));
    }
    let action = match tokens[0] {
        "alert" => Action::Alert,
        other => return Err(RuleParseError::BadAction(other.to_string())),
    };
    let protocol = match tokens[1] {
        "tcp" => Protocol::Tcp,
        "udp" => Protocol::Udp,
        "icmp" => Protocol::Icmp,
        "ip" => Protocol::Ip,
        other => return Err(RuleParseError::BadProtocol(other.to_string())),
    };
    let src_addr = parse_addr_spec(tokens[2], variables)?;
    let src_port = parse_port_spec(tokens[3], variables)?;
    let direction = match tokens[4] {
        "->" => Direction::Uni,
        "<>" => Direction::Bi,
        other => return Err(RuleParseError::BadDirection(other.to_string())),
    };
    let dst_addr = parse_addr_spec(tokens[5], variables)?;
    let dst_port = parse_port_spec(tokens[6], variables)?;
    Ok(RuleHeader { action, protocol, src_addr, src_port, direction, dst_addr, dst_port })
}

/// Split the header on whitespace, keeping bracketed lists whole.
fn header_tokens(text: &str) -> Result<Vec<&str>, RuleParseError> {
    let mut tokens = Vec::new();
    let mut depth = 0usize;
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match c {
            '[' => {
                depth += 1;
                if start.is_none() {
                    start = Some(i);
                }
            }
            ']' => {
                if depth == 0 {
                    return Err(RuleParseError::BadAddr {
                        spec: text.trim().to_string(),
                        reason: "unbalanced ]".to_string(),
                    });
                }
                depth -= 1;
            }
            c if c.is_whitespace() && depth == 0 => {
                if let Some(s) = start.take() {
                    tokens.push(&text[s..i]);
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if let Some(s) = start {
        tokens.push(&text[s..]);
    }
    if depth != 0 {
        return Err(RuleParseError::BadAddr {
            spec: text.trim().to_string(),
            reason: "unbalanced [".to_string(),
        });
    }
    Ok(tokens)
}

pub(crate) fn parse_addr_spec(token: &str, variables: &Variables) -> Result<AddrSpec, RuleParseError> {
    let token = token.trim();
    let bad = |reason: &str| RuleParseError::BadAddr { spec: token.to_string(), reason: reason.to_string() };
    if token.is_empty() {
        return Err(bad("empty"));
    }
    if let Some(rest) = token.strip_prefix('!') {
        let mut inner = parse_addr_spec(rest, variables)?;
        inner.negated = !inner.negated;
        return Ok(inner);
    }
    if token == "any" {
        return Ok(AddrSpec::any());
    }
    if let Some(name) = token.strip_prefix('$') {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad("bad variable name"));
        }
        let value = variables
            .get(name)
            .ok_or_else(|| RuleParseError::UnresolvedVariable(name.to_string()))?;
        return value
            .addr
            .clone()
            .ok_or_else(|| RuleParseError::VariableKind { name: name.to_string(), expected: "an address spec" });
    }
    if let Some(inner) = token.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or_else(|| bad("unbalanced ["))?;
        let mut members = Vec::new();
        for part in split_list(inner) {
            let part = part.trim();
            if part.is_empty() {
                return Err(bad("empty list member"));
            }
            if part.trim_start_matches('!').starts_with('[') {
                return Err(RuleParseError::NestedList);
            }
            let member = parse_addr_spec(part, variables)?;
            if matches!(member.kind, AddrKind::List(_)) {
                return Err(RuleParseError::NestedList);
            }
            members.push(member);
        }
        if members.is_empty() {
            return Err(bad("empty list"));
        }
        return Ok(AddrSpec { negated: false, kind: AddrKind::List(members) });
    }
    // CIDR block; a bare address reads as /32.
    let (ip_text, prefix) = match token.split_once('/') {
        Some((ip, p)) => {
            let prefix: u8 = p.parse().map_err(|_| bad("bad prefix length"))?;
            if prefix > 32 {
                return Err(bad("prefix length out of range"));
            }
            (ip, prefix)
        }
        None => (token, 32),
    };
    let octets: Vec<&str> = ip_text.split('.').collect();
    if octets.len() != 4 {
        return Err(bad("expected A.B.C.D"));
    }
    let mut addr = [0u8; 4];
    for (i, o) in octets.iter().enumerate() {
        addr[i] = o.parse().map_err(|_| bad("bad octet"))?;
    }
    Ok(AddrSpec::cidr(Ipv4Addr::from(addr), prefix))
}

/// Split a list body on commas; members cannot themselves contain commas
/// because nesting is rejected.
fn split_list(inner: &str) -> impl Iterator<Item = &str> {
    inner.split(',')
}

pub(crate) fn parse_port_spec(token: &str, variables: &Variables) -> Result<PortSpec, RuleParseError> {
    let token = token.trim();
    let bad = |reason: &str| RuleParseError::BadPort { spec: token.to_string(), reason: reason.to_string() };
    if token.is_empty() {
        return Err(bad("empty"));
    }
    if let Some(rest) = token.strip_prefix('!') {
        let mut inner = parse_port_spec(rest, variables)?;
        inner.negated = !inner.negated;
        return Ok(inner);
    }
    if token == "any" {
        return Ok(PortSpec::any());
    }
    if let Some(name) = token.strip_prefix('$') {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad("bad variable name"));
        }
        let value = variables
            .get(name)
            .ok_or_else(|| RuleParseError::UnresolvedVariable(name.to_string()))?;
        return value
            .port
            .clone()
            .ok_or_else(|| RuleParseError::VariableKind { name: name.to_string(), expected: "a port spec" });
    }
    let parse_port = |s: &str| -> Result<u16, RuleParseError> {
        let v: u32 = s.parse().map_err(|_| bad("bad port number"))?;
        u16::try_from(v).map_err(|_| bad("port out of range"))
    };
    if let Some((lo_text, hi_text)) = token.split_once(':') {
        if lo_text.is_empty() && hi_text.is_empty() {
            return Err(bad("empty range"));
        }
        let lo = if lo_text.is_empty() { 0 } else { parse_port(lo_text)? };
        let hi = if hi_text.is_empty() { u16::MAX } else { parse_port(hi_text)? };
        if lo > hi {
            return Err(bad("inverted range"));
        }
        return Ok(PortSpec { negated: false, kind: PortKind::Range(lo, hi) });
    }
    Ok(PortSpec::single(parse_port(token)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum OptValue {
    None,
    Plain(String),
    /// Raw text between the quotes, escapes intact.
    Quoted(String),
}

fn tokenize_options(text: &str) -> Result<Vec<(String, OptValue)>, RuleParseError> {
    let bytes = text.as_bytes();
    let mut i = 0usize;
    let mut options = Vec::new();
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return Ok(options);
        }
        let name_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || matches!(bytes[i], b'_' | b'-' | b'.')) {
            i += 1;
        }
        if i == name_start {
            return Err(RuleParseError::OptionSyntax(format!(
                "expected option name, found {:?}",
                text[i..].chars().next().unwrap_or(' ')
            )));
        }
        let name = text[name_start..i].to_string();
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let value = if i < bytes.len() && bytes[i] == b':' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'"' {
                i += 1;
                let raw_start = i;
                let mut escaped = false;
                let end = loop {
                    if i >= bytes.len() {
                        return Err(RuleParseError::UnterminatedString);
                    }
                    if escaped {
                        escaped = false;
                    } else if bytes[i] == b'\\' {
                        escaped = true;
                    } else if bytes[i] == b'"' {
                        break i;
                    }
                    i += 1;
                };
                i += 1;
                OptValue::Quoted(text[raw_start..end].to_string())
            } else {
                let start = i;
                while i < bytes.len() && bytes[i] != b';' {
                    i += 1;
                }
                OptValue::Plain(text[start..i].trim().to_string())
            }
        } else {
            OptValue::None
        };
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() || bytes[i] != b';' {
            return Err(RuleParseError::MissingSemicolon(name));
        }
        i += 1;
        options.push((name, value));
    }
}

fn build_rule(header: RuleHeader, options: Vec<(String, OptValue)>) -> Result<ParseOutcome, RuleParseError> {
    let mut msg: Option<String> = None;
    let mut sid: Option<u32> = None;
    let mut contents: Vec<ContentPattern> = Vec::new();

    let require_plain = |name: &str, value: &OptValue| -> Result<String, RuleParseError> {
        match value {
            OptValue::Plain(v) if !v.is_empty() => Ok(v.clone()),
            _ => Err(RuleParseError::OptionSyntax(format!("option \"{}\" needs an unquoted value", name))),
        }
    };
    let parse_u32 = |name: &str, v: &str| -> Result<u32, RuleParseError> {
        v.parse::<u32>().map_err(|_| RuleParseError::BadInteger { option: name.to_string(), value: v.to_string() })
    };

    for (name, value) in &options {
        match name.as_str() {
            "msg" => {
                let raw = match value {
                    OptValue::Quoted(raw) => raw,
                    _ => return Err(RuleParseError::OptionSyntax("msg needs a quoted value".to_string())),
                };
                if msg.replace(unescape_text(raw)?).is_some() {
                    return Err(RuleParseError::DuplicateOption("msg".to_string()));
                }
            }
            "sid" => {
                let v = parse_u32("sid", &require_plain("sid", value)?)?;
                if v == 0 {
                    return Err(RuleParseError::ZeroNotAllowed { option: "sid".to_string() });
                }
                if sid.replace(v).is_some() {
                    return Err(RuleParseError::DuplicateOption("sid".to_string()));
                }
            }
            "content" => {
                let raw = match value {
                    OptValue::Quoted(raw) => raw,
                    _ => return Err(RuleParseError::OptionSyntax("content needs a quoted value".to_string())),
                };
                contents.push(ContentPattern::new(parse_content_arg(raw)?));
            }
            "nocase" => {
                if !matches!(value, OptValue::None) {
                    return Err(RuleParseError::OptionSyntax("nocase takes no value".to_string()));
                }
                let c = contents.last_mut().ok_or_else(|| RuleParseError::ModifierBeforeContent("nocase".to_string()))?;
                if c.nocase {
                    return Err(RuleParseError::DuplicateOption("nocase".to_string()));
                }
                c.nocase = true;
            }
            "offset" | "depth" | "distance" | "within" => {
                let v = parse_u32(name, &require_plain(name, value)?)?;
                let first = contents.len() == 1;
                let c = contents.last_mut().ok_or_else(|| RuleParseError::ModifierBeforeContent(name.clone()))?;
                apply_positional(name, v, c, first)?;
            }
            _ => return Ok(ParseOutcome::Skip(SkipReason::UnsupportedOption(name.clone()))),
        }
    }

    let sid = sid.ok_or(RuleParseError::MissingSid)?;
    Ok(ParseOutcome::Rule(Rule { header, msg: msg.unwrap_or_default(), sid, contents }))
}

fn apply_positional(name: &str, v: u32, c: &mut ContentPattern, first: bool) -> Result<(), RuleParseError> {
    let dup = || RuleParseError::DuplicateOption(name.to_string());
    match name {
        "offset" => {
            if c.uses_relative_window() {
                return Err(RuleParseError::ConflictingModifiers);
            }
            if c.offset.replace(v).is_some() {
                return Err(dup());
            }
        }
        "depth" => {
            if c.uses_relative_window() {
                return Err(RuleParseError::ConflictingModifiers);
            }
            if v == 0 {
                return Err(RuleParseError::ZeroNotAllowed { option: "depth".to_string() });
            }
            if (v as usize) < c.bytes.len() {
                return Err(RuleParseError::DepthTooSmall { depth: v, len: c.bytes.len() });
            }
            if c.depth.replace(v).is_some() {
                return Err(dup());
            }
        }
        "distance" => {
            if first {
                return Err(RuleParseError::RelativeOnFirstContent);
            }
            if c.uses_absolute_window() {
                return Err(RuleParseError::ConflictingModifiers);
            }
            if c.distance.replace(v).is_some() {
                return Err(dup());
            }
        }
        "within" => {
            if first {
                return Err(RuleParseError::RelativeOnFirstContent);
            }
            if c.uses_absolute_window() {
                return Err(RuleParseError::ConflictingModifiers);
            }
            if v == 0 {
                return Err(RuleParseError::ZeroNotAllowed { option: "within".to_string() });
            }
            if c.within.replace(v).is_some() {
                return Err(dup());
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Unescape a quoted msg-style string: `\"`, `\\`, `\;` and `\|` resolve to
/// the bare character.
fn unescape_text(raw: &str) -> Result<String, RuleParseError> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(e @ ('"' | '\\' | ';' | '|')) => out.push(e),
                Some(other) => return Err(RuleParseError::BadEscape(format!("\\{}", other))),
                None => return Err(RuleParseError::BadEscape("trailing backslash".to_string())),
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Decode a content argument into raw bytes.
///
/// ASCII segments copy verbatim; `|…|` runs hold whitespace-separated hex
/// byte pairs; `\"`, `\\`, `\;` and `\|` unescape. Surrounding quotes, if
/// present, are stripped first.
pub fn parse_content_arg(text: &str) -> Result<Vec<u8>, RuleParseError> {
    let text = strip_outer_quotes(text);
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b'|' => {
                let close = bytes[i + 1..]
                    .iter()
                    .position(|&b| b == b'|')
                    .ok_or(RuleParseError::UnterminatedPipes)?;
                let run = &text[i + 1..i + 1 + close];
                let mut digits = Vec::new();
                for c in run.chars() {
                    if c.is_ascii_whitespace() {
                        continue;
                    }
                    if !c.is_ascii_hexdigit() {
                        return Err(RuleParseError::NonHexInPipes(c));
                    }
                    digits.push(c);
                }
                if digits.len() % 2 != 0 {
                    return Err(RuleParseError::OddHexDigits);
                }
                for pair in digits.chunks(2) {
                    let hi = pair[0].to_digit(16).unwrap() as u8;
                    let lo = pair[1].to_digit(16).unwrap() as u8;
                    out.push(hi << 4 | lo);
                }
                i += close + 2;
            }
            b'\\' => {
                match bytes.get(i + 1) {
                    Some(e @ (b'"' | b'\\' | b';' | b'|')) => out.push(*e),
                    Some(other) => {
                        return Err(RuleParseError::BadEscape(format!("\\{}", *other as char)))
                    }
                    None => return Err(RuleParseError::BadEscape("trailing backslash".to_string())),
                }
                i += 2;
            }
            b => {
                out.push(b);
                i += 1;
            }
        }
    }
    if out.is_empty() {
        return Err(RuleParseError::EmptyContent);
    }
    Ok(out)
}

fn strip_outer_quotes(text: &str) -> &str {
    if text.len() >= 2 && text.starts_with('"') && text.ends_with('"') && !text.ends_with("\\\"") {
        &text[1..text.len() - 1]
    } else {
        text
    }
}

/// Parse a whole rules file: physical lines ending in `\` are joined with
/// the next line, then each logical line goes through [`parse_rule`].
///
/// Per-line failures do not abort the load; they are recorded in
/// [`RuleSet::errors`]. The load fails only when nothing parsed and at
/// least one hard error occurred, or on a duplicate sid.
pub fn parse_ruleset(text: &str, variables: &Variables) -> Result<RuleSet, RulesetError> {
    let mut rules = Vec::new();
    let mut skipped = Vec::new();
    let mut errors = Vec::new();
    let mut sid_lines: BTreeMap<u32, usize> = BTreeMap::new();

    let mut logical = String::new();
    let mut logical_start = 0usize;
    let mut pending = false;

    let mut handle = |line: &str, line_no: usize| -> Result<(), RulesetError> {
        match parse_rule(line, variables) {
            Ok(ParseOutcome::Rule(rule)) => {
                if let Some(&first) = sid_lines.get(&rule.sid) {
                    return Err(RulesetError::DuplicateSid {
                        sid: rule.sid,
                        first_line: first,
                        second_line: line_no,
                    });
                }
                sid_lines.insert(rule.sid, line_no);
                rules.push(rule);
            }
            Ok(ParseOutcome::Skip(reason)) => skipped.push((line_no, reason.to_string())),
            Err(e) => errors.push((line_no, e.to_string())),
        }
        Ok(())
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if !pending {
            logical_start = line_no;
        }
        if let Some(joined) = line.strip_suffix('\\') {
            logical.push_str(joined);
            pending = true;
            continue;
        }
        logical.push_str(line);
        handle(&logical, logical_start)?;
        logical.clear();
        pending = false;
    }
    if pending {
        handle(&logical, logical_start)?;
    }

    if rules.is_empty() && !errors.is_empty() {
        let (first_line, first_error) = errors[0].clone();
        return Err(RulesetError::NoRulesParsed { error_count: errors.len(), first_line, first_error });
    }
    Ok(RuleSet { rules, variables: variables.clone(), skipped, errors })
}
