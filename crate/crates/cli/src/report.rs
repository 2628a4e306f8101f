use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use worm_core::{ChainParams, Graph};

#[derive(Debug, Clone, Serialize)]
pub struct GraphInfo {
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub sha256: String,
}

impl GraphInfo {
    pub fn new(g: &Graph, source: String) -> Self {
        GraphInfo {
            source,
            n: g.n(),
            m: g.m(),
            max_degree: g.max_degree(),
            sha256: graph_hash(g),
        }
    }
}

/// SHA-256 of the canonical edge-list text.
pub fn graph_hash(g: &Graph) -> String {
    hex::encode(Sha256::digest(g.to_edge_list().as_bytes()))
}

/// Fields shared by every report.
#[derive(Debug, Serialize)]
pub struct Header<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub graph: &'a GraphInfo,
    pub params: ChainParams,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    pub header: Header<'a>,
    #[serde(flatten)]
    pub body: T,
    pub pass: bool,
}

pub fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> io::Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()
}
