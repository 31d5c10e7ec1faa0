//! Binary model checkpoints.
//!
//! Layout (little-endian): `NPKG`, then u32 version, model kind
//! (0 tucker, 1 distmult, 2 complex), n_e, n_r, d_e, d_r and a flag word
//! (bit 0: batch normalization present). The payload is f64: entity table,
//! relation table, core tensor (TuckER only), then for batch normalization
//! gamma, beta, running mean and running variance of the head layer followed
//! by the same four vectors of the hidden layer.

use std::io::{Read, Write};

use super::batchnorm::BatchNorm;
use super::model::{BatchNormPair, KgcModelParams, ModelKind};
use crate::embedding::{read_f64s, read_u32, to_u32, write_f64s, EmbeddingMatrix};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"NPKG";
pub const CHECKPOINT_VERSION: u32 = 1;
const FLAG_BATCHNORM: u32 = 1;

pub fn save_checkpoint<W: Write>(params: &KgcModelParams, mut out: W) -> Result<()> {
    out.write_all(CHECKPOINT_MAGIC)?;
    let flags = if params.batchnorm.is_some() { FLAG_BATCHNORM } else { 0 };
    for v in [
        CHECKPOINT_VERSION,
        params.kind.code(),
        to_u32(params.entity_count())?,
        to_u32(params.relation_count())?,
        to_u32(params.entity_dim())?,
        to_u32(params.relation_dim())?,
        flags,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    write_f64s(&mut out, params.entities.values())?;
    write_f64s(&mut out, params.relations.values())?;
    write_f64s(&mut out, &params.core)?;
    if let Some(bn) = &params.batchnorm {
        for layer in [&bn.head, &bn.hidden] {
            for v in [&layer.gamma, &layer.beta, &layer.running_mean, &layer.running_var] {
                write_f64s(&mut out, v)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn load_checkpoint<R: Read>(mut input: R) -> Result<KgcModelParams> {
    let mut magic = [0u8; 4];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Format("checkpoint too short".into()))?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("not a checkpoint (bad magic)".into()));
    }
    let version = read_u32(&mut input)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let kind = ModelKind::from_code(read_u32(&mut input)?)?;
    let n_e = read_u32(&mut input)? as usize;
    let n_r = read_u32(&mut input)? as usize;
    let d_e = read_u32(&mut input)? as usize;
    let d_r = read_u32(&mut input)? as usize;
    let flags = read_u32(&mut input)?;
    if flags & !FLAG_BATCHNORM != 0 {
        return Err(Error::Format(format!("unknown checkpoint flags {flags:#x}")));
    }

    let entities = EmbeddingMatrix::from_values(n_e, d_e, read_f64s(&mut input, n_e * d_e)?)?;
    let relations = EmbeddingMatrix::from_values(n_r, d_r, read_f64s(&mut input, n_r * d_r)?)?;
    let core_len = if kind == ModelKind::Tucker { d_e * d_r * d_e } else { 0 };
    let core = read_f64s(&mut input, core_len)?;
    let batchnorm = if flags & FLAG_BATCHNORM != 0 {
        let mut layer = || -> Result<BatchNorm> {
            let mut bn = BatchNorm::new(d_e);
            bn.gamma = read_f64s(&mut input, d_e)?;
            bn.beta = read_f64s(&mut input, d_e)?;
            bn.running_mean = read_f64s(&mut input, d_e)?;
            bn.running_var = read_f64s(&mut input, d_e)?;
            Ok(bn)
        };
        let head = layer()?;
        let hidden = layer()?;
        Some(BatchNormPair { head, hidden })
    } else {
        None
    };
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after checkpoint payload".into()));
    }
    KgcModelParams::new(kind, entities, relations, core, batchnorm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn roundtrip_all_kinds() {
        for kind in ModelKind::ALL {
            for bn in [false, true] {
                let p = KgcModelParams::random(kind, 6, 4, 4, 4, bn, &mut rng::seeded(3)).unwrap();
                let mut buf = Vec::new();
                save_checkpoint(&p, &mut buf).unwrap();
                assert_eq!(load_checkpoint(&buf[..]).unwrap(), p);
            }
        }
    }

    #[test]
    fn corrupt_inputs_are_format_errors() {
        let p = KgcModelParams::random(ModelKind::Tucker, 3, 2, 2, 2, false, &mut rng::seeded(3)).unwrap();
        let mut buf = Vec::new();
        save_checkpoint(&p, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[1] = b'X';
        assert!(matches!(load_checkpoint(&bad[..]), Err(Error::Format(_))));
        assert!(matches!(load_checkpoint(&buf[..buf.len() - 3]), Err(Error::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(load_checkpoint(&long[..]), Err(Error::Format(_))));
    }
}
