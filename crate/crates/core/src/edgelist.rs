//! Comma-separated edge-list serialization.
//!
//! ```text
//! #n=<int>,T=<int>,t1=<int>,directed=<0|1>,kind=<binary|count>
//! <t>,<i>,<j>,<w>
//! ...
//! ```
//!
//! Times and node indices are 1-based on disk and 0-based in memory.
//! Undirected networks store one record per unordered pair with `i < j`.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::network::{DynamicNetwork, EdgeKind, Snapshot};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header: {0}")]
    Header(String),
    #[error("line {line}: malformed record `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: node index {index} outside 1..={n}")]
    NodeOutOfRange { line: usize, index: i64, n: usize },
    #[error("line {line}: time {t} outside 1..={len}")]
    TimeOutOfRange { line: usize, t: i64, len: usize },
    #[error("line {line}: negative weight {w}")]
    NegativeWeight { line: usize, w: i64 },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: i64 },
    #[error("line {line}: weight {w} is not valid for a binary network")]
    NonBinary { line: usize, w: i64 },
    #[error("line {line}: records must be sorted by t")]
    Unsorted { line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Header {
    n: usize,
    len: usize,
    t1: usize,
    directed: bool,
    kind: EdgeKind,
}

fn parse_header(line: &str) -> Result<Header, EdgeListError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| EdgeListError::Header(line.to_string()))?;
    let (mut n, mut len, mut t1, mut directed, mut kind) = (None, None, None, None, None);
    for field in body.split(',') {
        let (key, value) = field
            .trim()
            .split_once('=')
            .ok_or_else(|| EdgeListError::Header(format!("field `{field}` has no `=`")))?;
        let bad = || EdgeListError::Header(format!("bad value `{value}` for `{key}`"));
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
            "T" => len = Some(value.parse::<usize>().map_err(|_| bad())?),
            "t1" => t1 = Some(value.parse::<usize>().map_err(|_| bad())?),
            "directed" => {
                directed = Some(match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad()),
                })
            }
            "kind" => kind = Some(value.parse::<EdgeKind>().map_err(|_| bad())?),
            other => return Err(EdgeListError::Header(format!("unknown field `{other}`"))),
        }
    }
    let missing = |k: &str| EdgeListError::Header(format!("missing `{k}`"));
    Ok(Header {
        n: n.ok_or_else(|| missing("n"))?,
        len: len.ok_or_else(|| missing("T"))?,
        t1: t1.ok_or_else(|| missing("t1"))?,
        directed: directed.ok_or_else(|| missing("directed"))?,
        kind: kind.ok_or_else(|| missing("kind"))?,
    })
}

/// Parses an edge-list stream into a network.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<DynamicNetwork, EdgeListError> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            None => return Err(EdgeListError::MissingHeader),
            Some((_, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break parse_header(line.trim())?;
            }
        }
    };

    let mut snapshots = vec![Snapshot::empty(header.n, header.directed, header.kind); header.len];
    let mut last_t = 0i64;
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let malformed = || EdgeListError::Malformed {
            line: lineno,
            text: text.to_string(),
        };
        let fields: Vec<i64> = text
            .split(',')
            .map(|f| f.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| malformed())?;
        let [t, i, j, w] = fields[..] else {
            return Err(malformed());
        };
        if t < 1 || t as usize > header.len {
            return Err(EdgeListError::TimeOutOfRange {
                line: lineno,
                t,
                len: header.len,
            });
        }
        if t < last_t {
            return Err(EdgeListError::Unsorted { line: lineno });
        }
        last_t = t;
        for index in [i, j] {
            if index < 1 || index as usize > header.n {
                return Err(EdgeListError::NodeOutOfRange {
                    line: lineno,
                    index,
                    n: header.n,
                });
            }
        }
        if i == j {
            return Err(EdgeListError::SelfLoop { line: lineno, node: i });
        }
        if w < 0 {
            return Err(EdgeListError::NegativeWeight { line: lineno, w });
        }
        if header.kind == EdgeKind::Binary && w > 1 {
            return Err(EdgeListError::NonBinary { line: lineno, w });
        }
        let w = u32::try_from(w).map_err(|_| malformed())?;
        snapshots[(t - 1) as usize].set_edge((i - 1) as usize, (j - 1) as usize, w);
    }
    Ok(DynamicNetwork::new(snapshots, header.t1))
}

/// Writes `net` as an edge list. Zero weights are omitted.
pub fn write_edge_list<W: Write>(net: &DynamicNetwork, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "#n={},T={},t1={},directed={},kind={}",
        net.n(),
        net.len(),
        net.t1(),
        u8::from(net.directed()),
        net.kind()
    )?;
    for (idx, s) in net.snapshots().iter().enumerate() {
        for (i, j, w) in s.edges() {
            writeln!(out, "{},{},{},{}", idx + 1, i + 1, j + 1, w)?;
        }
    }
    Ok(())
}
