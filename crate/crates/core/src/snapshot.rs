//! Binary network snapshots for fast reload.
//!
//! Layout: an 8-byte magic, a little-endian `u32` format version, then the
//! id maps, adjacency arrays and degree sums encoded with bincode. Files with
//! another version are rejected, as are files whose stored degree sums differ
//! from the ones recomputed on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeVocabulary, Csr, IdMap, SbaNetwork};

pub const MAGIC: &[u8; 8] = b"VIALSNAP";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct RawCsr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl RawCsr {
    fn of(csr: &Csr) -> Self {
        let (offsets, cols, weights) = csr.raw();
        RawCsr { offsets: offsets.to_vec(), cols: cols.to_vec(), weights: weights.to_vec() }
    }

    fn into_csr(self) -> Result<Csr> {
        Csr::from_raw(self.offsets, self.cols, self.weights)
    }
}

#[derive(Serialize, Deserialize, PartialEq)]
struct Degrees {
    social: Vec<f64>,
    behavior: Vec<f64>,
    attribute: Vec<f64>,
    item: Vec<f64>,
    value: Vec<f64>,
}

impl Degrees {
    fn of(net: &SbaNetwork) -> Self {
        Degrees {
            social: (0..net.n_social()).map(|u| net.social_degree(u)).collect(),
            behavior: (0..net.n_social()).map(|u| net.behavior_degree(u)).collect(),
            attribute: (0..net.n_social()).map(|u| net.attribute_degree(u)).collect(),
            item: (0..net.n_behavior()).map(|y| net.item_degree(y)).collect(),
            value: (0..net.n_attribute()).map(|a| net.value_degree(a)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Payload {
    users: Vec<String>,
    items: Vec<String>,
    values: Vec<String>,
    types: Vec<String>,
    value_type: Vec<usize>,
    social: RawCsr,
    behavior: RawCsr,
    attribute: RawCsr,
    degrees: Degrees,
}

fn config() -> bincode::config::Configuration {
    bincode::config::standard()
}

pub fn to_bytes(network: &SbaNetwork) -> Result<Vec<u8>> {
    let vocab = network.vocab();
    let payload = Payload {
        users: network.users().names().to_vec(),
        items: network.items().names().to_vec(),
        values: vocab.values().names().to_vec(),
        types: vocab.type_names().to_vec(),
        value_type: (0..vocab.n_values()).map(|a| vocab.type_of(a)).collect(),
        social: RawCsr::of(network.social_adj()),
        behavior: RawCsr::of(network.behavior_adj()),
        attribute: RawCsr::of(network.attribute_adj()),
        degrees: Degrees::of(network),
    };
    let mut out = Vec::with_capacity(64 + 24 * network.link_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    bincode::serde::encode_into_std_write(&payload, &mut out, config())
        .map_err(|e| Error::Snapshot(format!("encode: {e}")))?;
    Ok(out)
}

pub fn from_bytes(bytes: &[u8]) -> Result<SbaNetwork> {
    let header = MAGIC.len() + 4;
    if bytes.len() < header || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::Snapshot("not a network snapshot".into()));
    }
    let version = u32::from_le_bytes(bytes[MAGIC.len()..header].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Snapshot(format!("snapshot version {version}, this build reads version {VERSION}")));
    }
    let (payload, used): (Payload, usize) = bincode::serde::decode_from_slice(&bytes[header..], config())
        .map_err(|e| Error::Snapshot(format!("decode: {e}")))?;
    if header + used != bytes.len() {
        return Err(Error::Snapshot("trailing bytes after payload".into()));
    }
    let vocab = AttributeVocabulary::from_parts(payload.values, payload.types, payload.value_type)?;
    let network = SbaNetwork::from_parts(
        IdMap::from_names(payload.users)?,
        IdMap::from_names(payload.items)?,
        vocab,
        payload.social.into_csr()?,
        payload.behavior.into_csr()?,
        payload.attribute.into_csr()?,
    )?;
    if Degrees::of(&network) != payload.degrees {
        return Err(Error::Snapshot("stored degree sums do not match the adjacency".into()));
    }
    Ok(network)
}

pub fn save(network: &SbaNetwork, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(network)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<SbaNetwork> {
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    #[test]
    fn round_trip() {
        let net = fixtures::sab();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("net.bin");
        save(&net, &p).unwrap();
        assert_eq!(load(&p).unwrap(), net);
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let net = fixtures::sab();
        let mut bytes = to_bytes(&net).unwrap();
        bytes[MAGIC.len()] = 99;
        let err = from_bytes(&bytes).unwrap_err();
        assert!(err.to_string().contains("version 99"), "{err}");
        assert!(from_bytes(b"hello").is_err());
        let mut truncated = to_bytes(&net).unwrap();
        truncated.truncate(truncated.len() - 3);
        assert!(from_bytes(&truncated).is_err());
    }
}
