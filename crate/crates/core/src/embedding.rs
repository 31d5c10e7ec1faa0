//! Dense row-major embedding tables and their on-disk formats.
//!
//! Text: a `<rows> <dim>` header, then `<label> <v1> ... <vdim>` per row with
//! values at 9 significant digits. Binary: `NPEM`, version, rows, dim (u32
//! little-endian), then `rows * dim` little-endian f64.

use std::io::{BufRead, Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::kgdata::Vocab;

pub const EMBEDDING_MAGIC: &[u8; 4] = b"NPEM";
pub const EMBEDDING_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            values: vec![0.0; rows * dim],
        }
    }

    pub fn from_values(rows: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * dim {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: rows * dim,
            });
        }
        Ok(Self { rows, dim, values })
    }

    /// Every value drawn uniformly from `[-bound, bound)`.
    pub fn uniform<R: Rng + ?Sized>(rows: usize, dim: usize, bound: f64, rng: &mut R) -> Self {
        let values = (0..rows * dim)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        Self { rows, dim, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Row-wise concatenation `[self | other]`.
    pub fn concat_columns(&self, other: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: other.rows,
            });
        }
        let dim = self.dim + other.dim;
        let mut values = Vec::with_capacity(self.rows * dim);
        for i in 0..self.rows {
            values.extend_from_slice(self.row(i));
            values.extend_from_slice(other.row(i));
        }
        Ok(Self {
            rows: self.rows,
            dim,
            values,
        })
    }

    pub fn write_text<W: Write>(&self, labels: &[String], mut out: W) -> Result<()> {
        if labels.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: self.rows,
            });
        }
        writeln!(out, "{} {}", self.rows, self.dim)?;
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.contains(char::is_whitespace) {
                return Err(Error::Format(format!(
                    "label `{label}` cannot be written to a whitespace-separated file"
                )));
            }
            out.write_all(label.as_bytes())?;
            for v in self.row(i) {
                write!(out, " {v:.8e}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads the text format, returning labels in file order.
    pub fn read_text<R: BufRead>(input: R) -> Result<(Vec<String>, EmbeddingMatrix)> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("missing header".into()))??;
        let mut header = header.split_whitespace().map(str::parse::<usize>);
        let (rows, dim) = match (header.next(), header.next(), header.next()) {
            (Some(Ok(r)), Some(Ok(d)), None) => (r, d),
            _ => return Err(Error::Format("header must be `<rows> <dim>`".into())),
        };
        let mut labels = Vec::with_capacity(rows);
        let mut values = Vec::with_capacity(rows * dim);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let label = fields.next().unwrap_or_default().to_string();
            let before = values.len();
            for field in fields {
                values.push(field.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 2,
                    message: format!("bad value `{field}`: {e}"),
                })?);
            }
            if values.len() - before != dim {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("expected {dim} values, found {}", values.len() - before),
                });
            }
            labels.push(label);
        }
        if labels.len() != rows {
            return Err(Error::Format(format!(
                "header announces {rows} rows, file has {}",
                labels.len()
            )));
        }
        Ok((labels, EmbeddingMatrix { rows, dim, values }))
    }

    /// Reorders rows read from a text file into vocabulary id order.
    pub fn align_to_vocab(labels: &[String], matrix: &EmbeddingMatrix, vocab: &Vocab) -> Result<EmbeddingMatrix> {
        if labels.len() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                actual: labels.len(),
            });
        }
        let mut out = EmbeddingMatrix::zeros(vocab.len(), matrix.dim);
        let mut seen = vec![false; vocab.len()];
        for (i, label) in labels.iter().enumerate() {
            let id = vocab
                .id(label)
                .ok_or_else(|| Error::Format(format!("embedding label `{label}` not in vocabulary")))?;
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::Format(format!("duplicate embedding label `{label}`")));
            }
            out.row_mut(id).copy_from_slice(matrix.row(i));
        }
        Ok(out)
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(EMBEDDING_MAGIC)?;
        for v in [EMBEDDING_VERSION, to_u32(self.rows)?, to_u32(self.dim)?] {
            out.write_all(&v.to_le_bytes())?;
        }
        write_f64s(&mut out, &self.values)
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<EmbeddingMatrix> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != EMBEDDING_MAGIC {
            return Err(Error::Format("bad embedding magic".into()));
        }
        let version = read_u32(&mut input)?;
        if version != EMBEDDING_VERSION {
            return Err(Error::Format(format!("unsupported embedding version {version}")));
        }
        let rows = read_u32(&mut input)? as usize;
        let dim = read_u32(&mut input)? as usize;
        let values = read_f64s(&mut input, rows * dim)?;
        Ok(EmbeddingMatrix { rows, dim, values })
    }
}

pub(crate) fn to_u32(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Format(format!("{v} does not fit in u32")))
}

pub(crate) fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

pub(crate) fn write_f64s<W: Write>(out: &mut W, values: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub(crate) fn read_f64s<R: Read>(input: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; count * 8];
    input.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated payload".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
