//! JSON file format for capture-generator specs.
//!
//! ```json
//! {
//!   "count": 1000,
//!   "mix": { "tcp": 6, "udp": 3, "icmp": 1, "other": 0 },
//!   "payload_len": { "min": 32, "max": 128 },
//!   "plants": [ { "pattern": "attack|0D 0A|", "packet": 7, "offset": 2 } ]
//! }
//! ```
//!
//! Plant patterns use the content-argument syntax, so `|HH HH|` hex runs
//! embed arbitrary bytes. `mix` and `plants` are optional.

use nids_core::packet::{GenSpec, Plant, ProtocolMix};
use nids_core::rules::parse_content_arg;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpecFile {
    pub count: u64,
    #[serde(default)]
    pub mix: MixFile,
    pub payload_len: PayloadLenFile,
    #[serde(default)]
    pub plants: Vec<PlantFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixFile {
    #[serde(default)]
    pub tcp: u32,
    #[serde(default)]
    pub udp: u32,
    #[serde(default)]
    pub icmp: u32,
    #[serde(default)]
    pub other: u32,
}

impl Default for MixFile {
    fn default() -> Self {
        let d = ProtocolMix::default();
        MixFile { tcp: d.tcp, udp: d.udp, icmp: d.icmp, other: d.other }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayloadLenFile {
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantFile {
    pub pattern: String,
    pub packet: u64,
    pub offset: usize,
}

impl GenSpecFile {
    pub fn into_spec(self) -> Result<GenSpec, String> {
        let mut plants = Vec::with_capacity(self.plants.len());
        for (i, p) in self.plants.into_iter().enumerate() {
            let pattern = parse_content_arg(&p.pattern)
                .map_err(|e| format!("plant {}: bad pattern: {}", i, e))?;
            plants.push(Plant { pattern, packet: p.packet, offset: p.offset });
        }
        Ok(GenSpec {
            count: self.count,
            mix: ProtocolMix {
                tcp: self.mix.tcp,
                udp: self.mix.udp,
                icmp: self.mix.icmp,
                other: self.mix.other,
            },
            payload_len: (self.payload_len.min, self.payload_len.max),
            plants,
        })
    }
}
