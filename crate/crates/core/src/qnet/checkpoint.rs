//! Agent checkpoint file.
//!
//! Layout: magic `DDQNCKPT`, u32 LE version, u64 LE header length, a JSON
//! header (shape, hyperparameters, seed, episode count, parameter counts),
//! then the online and target parameters as little-endian f64 in
//! [`QNetwork::to_flat`] order (per layer: weights row-major, then
//! biases). Round-trips bit-exactly.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::QNetwork;
use super::AgentHyperparams;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"DDQNCKPT";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub layer_sizes: Vec<usize>,
    pub hyperparams: AgentHyperparams,
    pub seed: u64,
    pub episodes_trained: usize,
    pub param_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub online: QNetwork,
    pub target: QNetwork,
}

fn write_flat(out: &mut impl Write, flat: &[f64]) -> Result<()> {
    for v in flat {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_flat(input: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    let mut buf = [0u8; 8];
    let mut flat = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut buf)?;
        flat.push(f64::from_le_bytes(buf));
    }
    Ok(flat)
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let header_json = serde_json::to_vec(&checkpoint.header)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(header_json.len() as u64).to_le_bytes())?;
    out.write_all(&header_json)?;
    write_flat(&mut out, &checkpoint.online.to_flat())?;
    write_flat(&mut out, &checkpoint.target.to_flat())?;
    out.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let malformed = |reason: &str| Error::MalformedFile {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    let mut input = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(malformed("bad magic"));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    if u32::from_le_bytes(word) != VERSION {
        return Err(malformed("unsupported version"));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let mut header_json = vec![0u8; u64::from_le_bytes(len) as usize];
    input.read_exact(&mut header_json)?;
    let header: CheckpointHeader =
        serde_json::from_slice(&header_json).map_err(|e| malformed(&e.to_string()))?;
    let online_flat = read_flat(&mut input, header.param_count)?;
    let target_flat = read_flat(&mut input, header.param_count)?;
    let online = QNetwork::from_flat(&header.layer_sizes, &online_flat)?;
    let target = QNetwork::from_flat(&header.layer_sizes, &target_flat)?;
    Ok(Checkpoint { header, online, target })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.ckpt");
        let sizes = vec![10, 32, 32, 5];
        let online = QNetwork::init(&sizes, 77);
        let target = QNetwork::init(&sizes, 78);
        let checkpoint = Checkpoint {
            header: CheckpointHeader {
                layer_sizes: sizes,
                hyperparams: AgentHyperparams::default(),
                seed: 77,
                episodes_trained: 123,
                param_count: online.param_count(),
            },
            online,
            target,
        };
        save_checkpoint(&path, &checkpoint).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded, checkpoint);
        for (a, b) in loaded.online.to_flat().iter().zip(checkpoint.online.to_flat()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        std::fs::write(&path, b"not a checkpoint").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
