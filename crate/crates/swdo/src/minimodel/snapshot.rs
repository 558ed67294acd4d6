//! Weight snapshots: one JSON header line (format tag, dimensions, config,
//! seed, parameter-group layout) followed by every parameter as raw
//! little-endian 64-bit floats in group order.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimodel::{mat::Mat, ModelConfig, ModelDims, ModelWeights};

const FORMAT_TAG: &str = "swdo-weights-v1";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    seed: u64,
    config: ModelConfig,
    dims: ModelDims,
    groups: Vec<GroupEntry>,
}

#[derive(Serialize, Deserialize)]
struct GroupEntry {
    name: String,
    len: usize,
}

/// Write weights with their provenance (config and training seed).
pub fn save(path: &Path, weights: &ModelWeights, config: &ModelConfig, seed: u64) -> Result<()> {
    let groups = weights.param_groups();
    let header = Header {
        format: FORMAT_TAG.to_string(),
        seed,
        config: config.clone(),
        dims: weights.dims,
        groups: groups
            .iter()
            .map(|(name, values)| GroupEntry {
                name: name.to_string(),
                len: values.len(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec(&header).map_err(|e| Error::data(e.to_string()))?;
    out.push(b'\n');
    for (_, values) in &groups {
        for v in *values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(&out)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Read a snapshot back; validates the format tag and parameter counts.
pub fn load(path: &Path) -> Result<(ModelWeights, ModelConfig, u64)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::data("snapshot has no header line".to_string()))?;
    let header: Header = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::data(format!("snapshot header: {e}")))?;
    if header.format != FORMAT_TAG {
        return Err(Error::data(format!(
            "snapshot format '{}' unsupported (want {FORMAT_TAG})",
            header.format
        )));
    }
    let total: usize = header.groups.iter().map(|g| g.len).sum();
    let payload = &bytes[newline + 1..];
    if payload.len() != total * 8 {
        return Err(Error::data(format!(
            "snapshot payload has {} bytes, expected {}",
            payload.len(),
            total * 8
        )));
    }
    let mut values = Vec::with_capacity(total);
    for chunk in payload.chunks_exact(8) {
        values.push(f64::from_le_bytes(chunk.try_into().expect("8-byte chunk")));
    }

    let dims = header.dims;
    let mut weights = ModelWeights {
        dims,
        conv_w: Vec::new(),
        conv_b: Vec::new(),
        wq: Mat::zeros(dims.d, dims.d),
        wk: Mat::zeros(dims.d, dims.d),
        wv: Mat::zeros(dims.d, dims.d),
        dense_w: Vec::new(),
        dense_b: 0.0,
    };
    let mut offset = 0;
    for entry in &header.groups {
        let slice = &values[offset..offset + entry.len];
        offset += entry.len;
        match entry.name.as_str() {
            "conv_w" => weights.conv_w = slice.to_vec(),
            "conv_b" => weights.conv_b = slice.to_vec(),
            "wq" => weights.wq = Mat::from_vec(dims.d, dims.d, slice.to_vec())?,
            "wk" => weights.wk = Mat::from_vec(dims.d, dims.d, slice.to_vec())?,
            "wv" => weights.wv = Mat::from_vec(dims.d, dims.d, slice.to_vec())?,
            "dense_w" => weights.dense_w = slice.to_vec(),
            "dense_b" => weights.dense_b = slice[0],
            other => {
                return Err(Error::data(format!(
                    "snapshot has unknown parameter group '{other}'"
                )))
            }
        }
    }
    let expected_conv = dims.filters * dims.channels * dims.kernel * dims.kernel;
    if weights.conv_w.len() != expected_conv
        || weights.conv_b.len() != dims.filters
        || weights.dense_w.len() != dims.n_t * dims.d
    {
        return Err(Error::data(
            "snapshot group sizes do not match its dimensions".to_string(),
        ));
    }
    Ok((weights, header.config, header.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimodel::ModelWeights;

    fn config() -> ModelConfig {
        ModelConfig {
            filters_size: 2,
            kernel_size: 3,
            lr: 1e-3,
            l2_reg: 1e-4,
            l1_reg: 1e-5,
            batch_size: 4,
            epochs: 2,
            att_reg_weight: 1e-4,
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("weights.bin");
        let weights = ModelWeights::init(&config(), 1, 8, 8, 99).unwrap();
        save(&path, &weights, &config(), 99).unwrap();
        let (loaded, loaded_config, seed) = load(&path).unwrap();
        assert_eq!(loaded, weights);
        assert_eq!(loaded_config, config());
        assert_eq!(seed, 99);
    }

    #[test]
    fn snapshot_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("weights.bin");
        let weights = ModelWeights::init(&config(), 1, 8, 8, 1).unwrap();
        save(&path, &weights, &config(), 1).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        std::fs::write(&path, &bytes).unwrap();
        assert!(load(&path).is_err());

        std::fs::write(&path, b"not a snapshot").unwrap();
        assert!(load(&path).is_err());
    }
}
