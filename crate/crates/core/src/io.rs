//! Reading and writing graphs as plain edge lists or Matrix Market files.
//!
//! Edge lists hold one `u v` or `u v w` record per line; lines starting with
//! `#` or `%` are comments. Node ids are remapped to a dense range in
//! ascending order of the original id, unless the file carries a
//! `# nodes N` directive (written by [`write_edgelist`]), in which case ids
//! are taken verbatim so isolated nodes survive a round trip.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot open {path}")]
    Open { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    EdgeList,
    MatrixMarket,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edgelist" | "el" | "txt" => Ok(Format::EdgeList),
            "mm" | "mtx" | "matrix_market" => Ok(Format::MatrixMarket),
            other => Err(format!("unknown graph format `{other}`")),
        }
    }
}

/// A loaded graph plus the original id of every dense node id.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub original_ids: Vec<u64>,
}

pub fn load(path: impl AsRef<Path>, format: Format) -> Result<LoadedGraph, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IoError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    match format {
        Format::EdgeList => parse_edgelist(reader),
        Format::MatrixMarket => parse_matrix_market(reader),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Collects directed records and folds them into undirected edges.
///
/// A pair listed in both directions is one edge mentioned twice (SNAP-style
/// symmetric listings), so its weight is taken from a single direction.
/// Repeats in the same direction are parallel edges and are summed.
#[derive(Default)]
struct RecordSet {
    // (lo, hi) -> (sum of lo->hi weights, sum of hi->lo weights)
    pairs: HashMap<(usize, usize), (f64, f64)>,
    order: Vec<(usize, usize)>,
    weighted: bool,
}

impl RecordSet {
    fn push(&mut self, u: usize, v: usize, w: Option<f64>, line: usize) -> Result<(), IoError> {
        if let Some(x) = w {
            if !(x > 0.0 && x.is_finite()) {
                return Err(parse_err(line, format!("nonpositive edge weight {x}")));
            }
            self.weighted = true;
        }
        if u == v {
            return Ok(());
        }
        let key = (u.min(v), u.max(v));
        let entry = self.pairs.entry(key).or_insert_with(|| {
            self.order.push(key);
            (0.0, 0.0)
        });
        if u < v {
            entry.0 += w.unwrap_or(1.0);
        } else {
            entry.1 += w.unwrap_or(1.0);
        }
        Ok(())
    }

    fn into_graph(self, n: usize) -> Result<Graph, IoError> {
        let weighted = self.weighted;
        let pairs = self.pairs;
        let edges = self.order.into_iter().map(|key| {
            let (fwd, bwd) = pairs[&key];
            (key.0, key.1, weighted.then_some(fwd.max(bwd)))
        });
        Ok(Graph::build(n, edges)?)
    }
}

fn parse_weight(tok: Option<&str>, line: usize) -> Result<Option<f64>, IoError> {
    tok.map(|t| {
        t.parse::<f64>()
            .map_err(|_| parse_err(line, format!("bad weight `{t}`")))
    })
    .transpose()
}

fn parse_nodes_directive(text: &str) -> Option<usize> {
    let rest = text.trim_start_matches(['#', '%']).trim();
    let mut it = rest.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some("nodes"), Some(n), None) => n.parse().ok(),
        _ => None,
    }
}

pub fn parse_edgelist(reader: impl BufRead) -> Result<LoadedGraph, IoError> {
    let mut declared: Option<usize> = None;
    let mut raw: Vec<(u64, u64, Option<f64>, usize)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('#') || text.starts_with('%') {
            if raw.is_empty() && declared.is_none() {
                declared = parse_nodes_directive(text);
            }
            continue;
        }
        let mut toks = text.split_whitespace();
        let mut id = |what: &str| -> Result<u64, IoError> {
            let t = toks
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing {what} node id")))?;
            t.parse()
                .map_err(|_| parse_err(lineno, format!("bad node id `{t}`")))
        };
        let u = id("source")?;
        let v = id("target")?;
        let w = parse_weight(toks.next(), lineno)?;
        if let Some(extra) = toks.next() {
            return Err(parse_err(
                lineno,
                format!("unexpected trailing token `{extra}`"),
            ));
        }
        raw.push((u, v, w, lineno));
    }

    let (n, original_ids, map) = match declared {
        Some(n) => (n, (0..n as u64).collect(), None),
        None => {
            let mut ids: Vec<u64> = raw.iter().flat_map(|r| [r.0, r.1]).collect();
            ids.sort_unstable();
            ids.dedup();
            let map: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            (ids.len(), ids, Some(map))
        }
    };
    let index = |x: u64| map.as_ref().map_or(x as usize, |m| m[&x]);

    let mut records = RecordSet::default();
    for (u, v, w, lineno) in raw {
        let (a, b) = (index(u), index(v));
        if a >= n || b >= n {
            return Err(parse_err(
                lineno,
                format!("node id {} exceeds declared node count {n}", u.max(v)),
            ));
        }
        records.push(a, b, w, lineno)?;
    }
    Ok(LoadedGraph {
        graph: records.into_graph(n)?,
        original_ids,
    })
}

/// Parses a coordinate-format Matrix Market file. `pattern`, `real` and
/// `integer` fields are accepted; `general` matrices are symmetrized.
pub fn parse_matrix_market(reader: impl BufRead) -> Result<LoadedGraph, IoError> {
    let mut lines = reader.lines().enumerate();
    let (header_no, header) = match lines.next() {
        Some((i, l)) => (i + 1, l?),
        None => {
            return Ok(LoadedGraph {
                graph: Graph::empty(0),
                original_ids: Vec::new(),
            })
        }
    };
    let head: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if head.len() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
        return Err(parse_err(header_no, "missing %%MatrixMarket matrix header"));
    }
    if head[2] != "coordinate" {
        return Err(parse_err(header_no, "only coordinate format is supported"));
    }
    let pattern = match head[3].as_str() {
        "pattern" => true,
        "real" | "integer" | "double" => false,
        other => return Err(parse_err(header_no, format!("unsupported field `{other}`"))),
    };
    if !matches!(head[4].as_str(), "symmetric" | "general") {
        return Err(parse_err(
            header_no,
            format!("unsupported symmetry `{}`", head[4]),
        ));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut records = RecordSet::default();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') || text.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        let num = |t: &str| -> Result<usize, IoError> {
            t.parse()
                .map_err(|_| parse_err(lineno, format!("bad integer `{t}`")))
        };
        let Some((rows, cols)) = size else {
            if toks.len() != 3 {
                return Err(parse_err(lineno, "expected `rows cols nnz` size line"));
            }
            let (r, c) = (num(toks[0])?, num(toks[1])?);
            if r != c {
                return Err(parse_err(lineno, "adjacency matrix must be square"));
            }
            size = Some((r, c));
            continue;
        };
        if toks.len() < 2 {
            return Err(parse_err(lineno, "expected `row col [value]`"));
        }
        let (i, j) = (num(toks[0])?, num(toks[1])?);
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(lineno, format!("entry ({i}, {j}) out of bounds")));
        }
        let w = if pattern {
            None
        } else {
            parse_weight(toks.get(2).copied(), lineno)?.map(f64::abs)
        };
        // Explicit zeros carry no edge.
        if w == Some(0.0) {
            continue;
        }
        records.push(i - 1, j - 1, w, lineno)?;
    }
    let n = size.map_or(0, |s| s.0);
    Ok(LoadedGraph {
        graph: records.into_graph(n)?,
        original_ids: (1..=n as u64).collect(),
    })
}

/// Writes `g` as an edge list with a `# nodes N` directive. Weights are
/// written in shortest round-trip form, so reloading is bit-exact.
pub fn write_edgelist(w: &mut impl Write, g: &Graph, header: &[String]) -> io::Result<()> {
    for h in header {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "# nodes {}", g.n())?;
    let weighted = g.is_weighted();
    for (u, v, wt) in g.edges() {
        if weighted {
            writeln!(w, "{u} {v} {wt:?}")?;
        } else {
            writeln!(w, "{u} {v}")?;
        }
    }
    Ok(())
}

pub fn store_edgelist(path: impl AsRef<Path>, g: &Graph, header: &[String]) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_edgelist(&mut out, g, header)?;
    out.flush()?;
    Ok(())
}

/// Reads one real number per line (blank and comment lines skipped).
pub fn read_scores(path: impl AsRef<Path>) -> Result<Vec<f64>, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IoError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let x: f64 = text
            .parse()
            .map_err(|_| parse_err(idx + 1, format!("bad number `{text}`")))?;
        if x.is_nan() {
            return Err(parse_err(idx + 1, "NaN score"));
        }
        out.push(x);
    }
    Ok(out)
}

/// Reads `original_id centroid_id` records.
pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<(u64, u64)>, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IoError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = text.split_whitespace().collect();
        let parse = |t: &str| -> Result<u64, IoError> {
            t.parse()
                .map_err(|_| parse_err(idx + 1, format!("bad node id `{t}`")))
        };
        match toks.as_slice() {
            [a, b] => out.push((parse(a)?, parse(b)?)),
            _ => return Err(parse_err(idx + 1, "expected two ids")),
        }
    }
    Ok(out)
}
