use std::io::Read as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use symcanon_core::gaussian::{BipartiteCovariance, GaussianChannel};
use symcanon_core::{Error, Mat, MatrixDoc};

/// A parsed input document together with the digest of its raw bytes.
pub struct Input {
    pub value: Value,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Input> {
    let bytes = if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .context("reading standard input")?;
        buf
    } else {
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?
    };
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(Input { value, sha256 })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    n: usize,
    x: MatrixDoc,
    y: MatrixDoc,
    #[serde(default)]
    #[allow(dead_code)]
    validity_residual: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    n: usize,
    gamma_a: MatrixDoc,
    gamma_b: MatrixDoc,
    x: MatrixDoc,
}

fn decode<T: for<'de> Deserialize<'de>>(value: &Value, what: &str) -> Result<T, Error> {
    T::deserialize(value).map_err(|e| Error::Parse(format!("not a {what} document: {e}")))
}

fn has(value: &Value, key: &str) -> bool {
    value.get(key).is_some()
}

fn check_n(declared: usize, actual: usize) -> Result<(), Error> {
    if declared == actual {
        Ok(())
    } else {
        Err(Error::DimensionError(format!(
            "document declares n = {declared} but its matrices describe n = {actual}"
        )))
    }
}

pub fn matrix(value: &Value) -> Result<Mat, Error> {
    decode::<MatrixDoc>(value, "matrix")?.to_mat()
}

/// A plain matrix, or the `x` field of a channel or bipartite state.
pub fn operand(value: &Value) -> Result<Mat, Error> {
    if has(value, "rows") {
        matrix(value)
    } else if let Some(x) = value.get("x") {
        matrix(x)
    } else {
        Err(Error::Parse(
            "expected a matrix document or a document with an `x` matrix".into(),
        ))
    }
}

pub fn channel(value: &Value) -> Result<GaussianChannel, Error> {
    let doc: ChannelDoc = decode(value, "channel")?;
    let ch = GaussianChannel::new(doc.x.to_mat()?, doc.y.to_mat()?)?;
    check_n(doc.n, ch.n)?;
    Ok(ch)
}

/// A bipartite document, or a party-major `4n x 4n` covariance matrix.
pub fn bipartite(value: &Value) -> Result<BipartiteCovariance, Error> {
    if has(value, "rows") {
        return BipartiteCovariance::from_full(&matrix(value)?);
    }
    let doc: StateDoc = decode(value, "bipartite state")?;
    let g = BipartiteCovariance::new(
        doc.gamma_a.to_mat()?,
        doc.gamma_b.to_mat()?,
        doc.x.to_mat()?,
    )?;
    check_n(doc.n, g.n)?;
    Ok(g)
}
