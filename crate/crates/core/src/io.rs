//! Text (`.hg`), binary (`.hgb`) and truth-sidecar (`.truth`) formats.
//!
//! Vertex ids are 1-based in every text format and 0-based in memory.

use std::path::Path;

use crate::comb::for_each_colex;
use crate::error::{HpcError, Result};
use crate::model::{DUniformHypergraph, Hypothesis, PlantedInstance};

pub const BINARY_MAGIC: &[u8; 4] = b"HPCB";
pub const BINARY_VERSION: u8 = 0x01;
const BINARY_HEADER_LEN: usize = 4 + 1 + 1 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
}

impl Format {
    /// `.hgb` is binary, anything else text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("hgb") => Format::Binary,
            _ => Format::Text,
        }
    }
}

pub fn encode(g: &DUniformHypergraph, format: Format) -> Vec<u8> {
    match format {
        Format::Text => encode_text(g).into_bytes(),
        Format::Binary => encode_binary(g),
    }
}

pub fn decode(bytes: &[u8], format: Format) -> Result<DUniformHypergraph> {
    match format {
        Format::Text => {
            let s = std::str::from_utf8(bytes).map_err(|e| HpcError::parse(format!("byte {}", e.valid_up_to()), "invalid UTF-8"))?;
            decode_text(s)
        }
        Format::Binary => decode_binary(bytes),
    }
}

pub fn encode_text(g: &DUniformHypergraph) -> String {
    let mut out = format!("{} {} {}\n", g.d(), g.n(), g.edge_count());
    let mut rank = 0usize;
    for_each_colex(g.n(), g.d(), |c| {
        if g.has_rank(rank) {
            let line: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        rank += 1;
    });
    out
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(HpcError::parse(format!("line {line}"), format!("{what}: expected decimal, got {tok:?}")));
    }
    tok.parse()
        .map_err(|_| HpcError::parse(format!("line {line}"), format!("{what}: value {tok} too large")))
}

pub fn decode_text(s: &str) -> Result<DUniformHypergraph> {
    let mut lines = s.split('\n');
    let header = lines.next().unwrap_or("");
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 3 {
        return Err(HpcError::parse("line 1", "header must be \"d N M\""));
    }
    let d = parse_usize(fields[0], 1, "d")?;
    let n = parse_usize(fields[1], 1, "N")?;
    let m = parse_usize(fields[2], 1, "M")?;
    let mut g = DUniformHypergraph::empty(n, d).map_err(|e| HpcError::parse("line 1", e.to_string()))?;
    if m > g.slot_count() {
        return Err(HpcError::parse("line 1", format!("M = {m} exceeds C(N, d) = {}", g.slot_count())));
    }
    let mut verts = Vec::with_capacity(d);
    for i in 0..m {
        let lineno = i + 2;
        let line = lines
            .next()
            .ok_or_else(|| HpcError::parse(format!("line {lineno}"), format!("expected {m} edge lines")))?;
        verts.clear();
        for tok in line.split(' ') {
            let v = parse_usize(tok, lineno, "vertex")?;
            if v == 0 || v > n {
                return Err(HpcError::parse(format!("line {lineno}"), format!("vertex {v} outside 1..={n}")));
            }
            verts.push(v - 1);
        }
        if verts.len() != d {
            return Err(HpcError::parse(
                format!("line {lineno}"),
                format!("edge has {} vertices, expected {d}", verts.len()),
            ));
        }
        if let Some(w) = verts.windows(2).find(|w| w[0] >= w[1]) {
            let msg = if w[0] == w[1] {
                format!("duplicate vertex {}", w[0] + 1)
            } else {
                "vertices not strictly increasing".to_string()
            };
            return Err(HpcError::parse(format!("line {lineno}"), msg));
        }
        let r = g.ranker().rank_sorted(&verts);
        if g.has_rank(r) {
            return Err(HpcError::parse(format!("line {lineno}"), "duplicate edge"));
        }
        g.set_rank(r, true);
    }
    match (lines.next(), lines.next()) {
        (Some(""), None) => Ok(g),
        (None, _) => Err(HpcError::parse(format!("line {}", m + 1), "missing final LF")),
        _ => Err(HpcError::parse(format!("line {}", m + 2), "trailing content after edge lines")),
    }
}

pub fn encode_binary(g: &DUniformHypergraph) -> Vec<u8> {
    let nbytes = g.slot_count().div_ceil(8);
    let mut out = Vec::with_capacity(BINARY_HEADER_LEN + nbytes);
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    out.push(g.d() as u8);
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    let bytes = g.words().iter().flat_map(|w| w.to_le_bytes());
    out.extend(bytes.take(nbytes));
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DUniformHypergraph> {
    if bytes.len() < BINARY_HEADER_LEN {
        return Err(HpcError::parse(format!("offset {}", bytes.len()), "truncated header"));
    }
    if &bytes[0..4] != BINARY_MAGIC {
        return Err(HpcError::parse("offset 0", "bad magic"));
    }
    if bytes[4] != BINARY_VERSION {
        return Err(HpcError::parse("offset 4", format!("unsupported version {}", bytes[4])));
    }
    let d = bytes[5] as usize;
    let n64 = u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes"));
    let n = usize::try_from(n64).map_err(|_| HpcError::parse("offset 6", "N too large"))?;
    let shape = DUniformHypergraph::empty(n, d).map_err(|e| HpcError::parse("offset 5", e.to_string()))?;
    let nbytes = shape.slot_count().div_ceil(8);
    let payload = &bytes[BINARY_HEADER_LEN..];
    if payload.len() != nbytes {
        return Err(HpcError::parse(
            format!("offset {BINARY_HEADER_LEN}"),
            format!("expected {nbytes} edge bytes, found {}", payload.len()),
        ));
    }
    let words: Vec<u64> = payload
        .chunks(8)
        .map(|c| {
            let mut b = [0u8; 8];
            b[..c.len()].copy_from_slice(c);
            u64::from_le_bytes(b)
        })
        .collect();
    DUniformHypergraph::from_words(n, d, words)
        .map_err(|e| HpcError::parse(format!("offset {}", bytes.len() - 1), e.to_string()))
}

pub fn encode_truth(inst: &PlantedInstance) -> String {
    match (&inst.hypothesis, &inst.clique) {
        (Hypothesis::H1, Some(k)) => {
            let ids: Vec<String> = k.iter().map(|v| (v + 1).to_string()).collect();
            format!("H1\n{}\n", ids.join(" "))
        }
        _ => "H0\n".to_string(),
    }
}

/// Parses a truth sidecar into `(hypothesis, clique)` with 0-based ids.
pub fn decode_truth(s: &str, n: usize) -> Result<(Hypothesis, Option<Vec<usize>>)> {
    let mut lines = s.lines();
    match lines.next() {
        Some("H0") => Ok((Hypothesis::H0, None)),
        Some("H1") => {
            let line = lines.next().unwrap_or("");
            let mut k = Vec::new();
            for tok in line.split_whitespace() {
                let v = parse_usize(tok, 2, "vertex")?;
                if v == 0 || v > n {
                    return Err(HpcError::parse("line 2", format!("vertex {v} outside 1..={n}")));
                }
                k.push(v - 1);
            }
            if k.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HpcError::parse("line 2", "clique ids not strictly increasing"));
            }
            Ok((Hypothesis::H1, Some(k)))
        }
        other => Err(HpcError::parse("line 1", format!("expected H0 or H1, got {other:?}"))),
    }
}
