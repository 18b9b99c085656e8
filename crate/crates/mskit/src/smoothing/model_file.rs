//! Trained-smoother persistence: a versioned magic string, a JSON header
//! describing the architecture, and a flat little-endian binary64 parameter
//! block.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::{AdaptiveSmoother, HIDDEN_CHANNELS};
use super::train::TrainedSmoother;
use super::GlobalSmoother;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Magic string and format version on the first line of a model file.
pub const MODEL_MAGIC: &str = "MSKIT-SMOOTHER-v1";

/// JSON header describing the stored model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub regime: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<usize>>,
    /// Whether predicted rows are renormalized to sum 1 (always true here).
    pub normalized: bool,
    /// Seed the model was trained with, for provenance.
    pub seed: u64,
    pub learnable_count: usize,
    pub state_count: usize,
}

/// Writes a trained smoother to `path`.
pub fn save_smoother<T: Scalar>(
    path: &Path,
    smoother: &TrainedSmoother<T>,
    seed: u64,
) -> Result<()> {
    let (header, block) = match smoother {
        TrainedSmoother::Global(g) => {
            let block: Vec<f64> = g.logits().iter().map(|l| l.as_f64()).collect();
            let header = ModelHeader {
                regime: "global".into(),
                k: g.width(),
                c_in: None,
                channels: None,
                normalized: true,
                seed,
                learnable_count: block.len(),
                state_count: 0,
            };
            (header, block)
        }
        TrainedSmoother::Adaptive(net) => {
            let mut block: Vec<f64> = net.params_flat().iter().map(|p| p.as_f64()).collect();
            let state: Vec<f64> = net.state_flat().iter().map(|p| p.as_f64()).collect();
            let header = ModelHeader {
                regime: "adaptive".into(),
                k: net.width(),
                c_in: Some(net.input_channels()),
                channels: Some(HIDDEN_CHANNELS.to_vec()),
                normalized: true,
                seed,
                learnable_count: block.len(),
                state_count: state.len(),
            };
            block.extend(state);
            (header, block)
        }
    };

    let mut out: Vec<u8> = Vec::new();
    writeln!(out, "{MODEL_MAGIC}")?;
    serde_json::to_writer(&mut out, &header).map_err(|e| Error::Io(e.into()))?;
    out.push(b'\n');
    out.extend_from_slice(&(block.len() as u64).to_le_bytes());
    for v in &block {
        out.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a trained smoother back, validating magic, header, and block size.
pub fn load_smoother<T: Scalar>(path: &Path) -> Result<(TrainedSmoother<T>, ModelHeader)> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path)?;
    let mut reader = BufReader::new(file);

    let mut magic = String::new();
    reader.read_line(&mut magic)?;
    if magic.trim_end() != MODEL_MAGIC {
        return Err(Error::parse(&name, 1, format!("bad magic: expected {MODEL_MAGIC}")));
    }
    let mut header_line = String::new();
    reader.read_line(&mut header_line)?;
    let header: ModelHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::parse(&name, 2, format!("bad header: {e}")))?;

    let mut count_bytes = [0u8; 8];
    reader.read_exact(&mut count_bytes)?;
    let count = u64::from_le_bytes(count_bytes) as usize;
    if count != header.learnable_count + header.state_count {
        return Err(Error::parse(
            &name,
            2,
            format!(
                "block holds {count} values, header declares {} + {}",
                header.learnable_count, header.state_count
            ),
        ));
    }
    let mut block = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        reader.read_exact(&mut buf)?;
        block.push(f64::from_le_bytes(buf));
    }

    let smoother = match header.regime.as_str() {
        "global" => {
            if block.len() != header.k {
                return Err(Error::parse(&name, 2, "global block size must equal K"));
            }
            let logits: Vec<T> = block.iter().map(|&v| T::of(v)).collect();
            TrainedSmoother::Global(GlobalSmoother::from_logits(logits)?)
        }
        "adaptive" => {
            let c_in = header
                .c_in
                .ok_or_else(|| Error::parse(&name, 2, "adaptive header missing c_in"))?;
            if let Some(channels) = &header.channels {
                if channels != &HIDDEN_CHANNELS {
                    return Err(Error::parse(
                        &name,
                        2,
                        format!("unsupported channel plan {channels:?}, expected {HIDDEN_CHANNELS:?}"),
                    ));
                }
            }
            let mut net = AdaptiveSmoother::<T>::new(c_in, header.k, 0)?;
            if header.learnable_count != net.param_count() {
                return Err(Error::parse(
                    &name,
                    2,
                    format!(
                        "header declares {} learnable values, architecture K={} c_in={c_in} has {}",
                        header.learnable_count,
                        header.k,
                        net.param_count()
                    ),
                ));
            }
            let params: Vec<T> =
                block[..header.learnable_count].iter().map(|&v| T::of(v)).collect();
            let state: Vec<T> =
                block[header.learnable_count..].iter().map(|&v| T::of(v)).collect();
            net.set_params_flat(&params)?;
            net.set_state_flat(&state)?;
            TrainedSmoother::Adaptive(net)
        }
        other => return Err(Error::parse(&name, 2, format!("unknown regime \"{other}\""))),
    };
    Ok((smoother, header))
}
