//! Line-oriented lattice text format.
//!
//! ```text
//! # comment
//! pq <p> <q>
//! edge <id> <v1> <v2>
//! face <id> <e1> ... <ep>      (counterclockwise)
//! vertex <id> <e1> ... <eq>    (counterclockwise)
//! ```
//!
//! Ids within each record kind must be exactly `0..count` (any order).

use std::fmt::Write as _;

use super::{LatticeData, LatticeError};

fn parse_err(line: usize, message: impl Into<String>) -> LatticeError {
    LatticeError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num(tok: &str, line: usize, what: &str) -> Result<usize, LatticeError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

/// Collects `(id, payload)` records into a dense vector, rejecting gaps and
/// duplicates.
fn densify<T>(
    kind: &str,
    mut records: Vec<(usize, usize, T)>,
) -> Result<Vec<T>, LatticeError> {
    records.sort_by_key(|r| r.0);
    let mut out = Vec::with_capacity(records.len());
    for (expected, (id, line, payload)) in records.into_iter().enumerate() {
        if id != expected {
            let message = if id < expected {
                format!("duplicate {kind} id {id}")
            } else {
                format!("{kind} ids are not consecutive: missing {expected}")
            };
            return Err(parse_err(line, message));
        }
        out.push(payload);
    }
    Ok(out)
}

/// Parses lattice text without checking any of the lattice invariants.
pub fn parse_lattice(text: &str) -> Result<LatticeData, LatticeError> {
    let mut pq: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    let mut vertices = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let keyword = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        match keyword {
            "pq" => {
                if pq.is_some() {
                    return Err(parse_err(line, "duplicate pq header"));
                }
                if rest.len() != 2 {
                    return Err(parse_err(line, "expected `pq <p> <q>`"));
                }
                let p = parse_num(rest[0], line, "p")?;
                let q = parse_num(rest[1], line, "q")?;
                if p < 3 || q < 3 {
                    return Err(parse_err(line, "p and q must be at least 3"));
                }
                pq = Some((p, q));
            }
            "edge" => {
                if rest.len() != 3 {
                    return Err(parse_err(line, "expected `edge <id> <v1> <v2>`"));
                }
                let id = parse_num(rest[0], line, "edge id")?;
                let a = parse_num(rest[1], line, "vertex id")?;
                let b = parse_num(rest[2], line, "vertex id")?;
                edges.push((id, line, [a, b]));
            }
            "face" | "vertex" => {
                if rest.len() < 2 {
                    return Err(parse_err(line, format!("`{keyword}` record needs an id and edges")));
                }
                let id = parse_num(rest[0], line, "id")?;
                let list = rest[1..]
                    .iter()
                    .map(|t| parse_num(t, line, "edge id"))
                    .collect::<Result<Vec<_>, _>>()?;
                if keyword == "face" {
                    faces.push((id, line, list));
                } else {
                    vertices.push((id, line, list));
                }
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }

    let (p, q) = pq.ok_or_else(|| parse_err(0, "missing `pq <p> <q>` header"))?;
    Ok(LatticeData {
        p,
        q,
        edges: densify("edge", edges)?,
        faces: densify("face", faces)?,
        vertex_rotations: densify("vertex", vertices)?,
        label: None,
    })
}

/// Renders lattice data in the text format. Parsing the output yields the
/// same data (minus the label, which is emitted as a comment).
pub fn write_lattice(data: &LatticeData) -> String {
    let mut out = String::new();
    if let Some(label) = &data.label {
        let _ = writeln!(out, "# {label}");
    }
    let _ = writeln!(out, "pq {} {}", data.p, data.q);
    for (i, [a, b]) in data.edges.iter().enumerate() {
        let _ = writeln!(out, "edge {i} {a} {b}");
    }
    for (kind, lists) in [("face", &data.faces), ("vertex", &data.vertex_rotations)] {
        for (i, list) in lists.iter().enumerate() {
            let _ = write!(out, "{kind} {i}");
            for e in list {
                let _ = write!(out, " {e}");
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "\
# 2x2 torus
pq 4 4
edge 0 0 1
edge 1 1 0
edge 2 2 3
edge 3 3 2
edge 4 0 2
edge 5 1 3
edge 6 2 0
edge 7 3 1
face 0 0 5 2 4
face 1 1 4 3 5
face 2 2 7 0 6
face 3 3 6 1 7
vertex 0 0 4 1 6
vertex 1 1 5 0 7
vertex 2 2 6 3 4
vertex 3 3 7 2 5
";

    #[test]
    fn parses_records_and_comments() {
        let data = parse_lattice(SQUARE).unwrap();
        assert_eq!((data.p, data.q), (4, 4));
        assert_eq!(data.edges.len(), 8);
        assert_eq!(data.faces[1], vec![1, 4, 3, 5]);
        assert_eq!(data.vertex_rotations[3], vec![3, 7, 2, 5]);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let data = parse_lattice(SQUARE).unwrap();
        assert_eq!(parse_lattice(&write_lattice(&data)).unwrap(), data);
    }

    #[test]
    fn rejects_missing_header() {
        let err = parse_lattice("edge 0 0 1\n").unwrap_err();
        assert!(err.to_string().contains("pq"));
    }

    #[test]
    fn rejects_gaps_and_duplicates() {
        let err = parse_lattice("pq 4 4\nedge 0 0 1\nedge 2 1 0\n").unwrap_err();
        assert!(err.to_string().contains("missing 1"), "{err}");
        let err = parse_lattice("pq 4 4\nedge 0 0 1\nedge 0 1 0\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn rejects_unknown_keyword() {
        let err = parse_lattice("pq 4 4\ncell 0 1 2\n").unwrap_err();
        assert!(matches!(err, LatticeError::Parse { line: 2, .. }));
    }
}
