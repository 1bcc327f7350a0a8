//! Line-oriented text snapshots of a configuration.
//!
//! ```text
//! n=4 protocol=two-slot k=2
//! 0 L1
//! 1 O0
//! 2 F
//! 3 F
//! 0 1
//! ```
//!
//! One line per node in id order, then one line per active edge `u v` with
//! `u < v` in lexicographic order. Rendering is canonical, so a parsed
//! snapshot re-renders to the same bytes.

use std::fmt::Write as _;

use super::config::Configuration;
use super::state::NodeState;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub protocol: String,
    pub k: u32,
    pub config: Configuration,
}

pub fn render(config: &Configuration, protocol: &str, k: u32) -> String {
    let mut out = String::new();
    writeln!(out, "n={} protocol={} k={}", config.n(), protocol, k).unwrap();
    for (u, s) in config.states().iter().enumerate() {
        writeln!(out, "{u} {s}").unwrap();
    }
    for (u, v) in config.active_edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_canonical_usize(tok: &str, line: usize) -> Result<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) || (tok.len() > 1 && tok.starts_with('0')) {
        return Err(parse_err(line, format!("expected a non-negative integer, got {tok:?}")));
    }
    tok.parse().map_err(|_| parse_err(line, format!("integer out of range: {tok}")))
}

pub fn parse(text: &str) -> Result<Snapshot> {
    let mut lines = text.split_terminator('\n').enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty snapshot"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let [n_f, p_f, k_f] = fields.as_slice() else {
        return Err(parse_err(1, "header must be `n=<int> protocol=<name> k=<int>`"));
    };
    let field = |f: &str, key: &str| -> Result<String> {
        f.strip_prefix(key).map(str::to_owned).ok_or_else(|| parse_err(1, format!("expected `{key}...` in header")))
    };
    let n = parse_canonical_usize(&field(n_f, "n=")?, 1)?;
    let protocol = field(p_f, "protocol=")?;
    if protocol.is_empty() {
        return Err(parse_err(1, "empty protocol name"));
    }
    let k = parse_canonical_usize(&field(k_f, "k=")?, 1)? as u32;

    let mut config = Configuration::uniform(n, NodeState::Free);
    for expected in 0..n {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(expected + 2, "missing node line"))?;
        let (id, st) = l.split_once(' ').ok_or_else(|| parse_err(ln, "expected `<id> <state>`"))?;
        if parse_canonical_usize(id, ln)? != expected {
            return Err(parse_err(ln, format!("node lines must be in id order, expected {expected}")));
        }
        let s: NodeState = st.parse().map_err(|e: Error| parse_err(ln, e.to_string()))?;
        config.set_state(expected, s);
    }
    let mut last: Option<(usize, usize)> = None;
    for (ln, l) in lines {
        let (a, b) = l.split_once(' ').ok_or_else(|| parse_err(ln, "expected `<u> <v>`"))?;
        let (u, v) = (parse_canonical_usize(a, ln)?, parse_canonical_usize(b, ln)?);
        if u >= v || v >= n {
            return Err(parse_err(ln, format!("edge ({u}, {v}) must satisfy u < v < n")));
        }
        if last.is_some_and(|p| p >= (u, v)) {
            return Err(parse_err(ln, "edges must be strictly increasing"));
        }
        last = Some((u, v));
        config.set_edge(u, v, true);
    }
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(parse_err(0, "snapshot must end with a newline"));
    }
    Ok(Snapshot { protocol, k, config })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_example() {
        let text = "n=4 protocol=two-slot k=2\n0 L1\n1 O0\n2 F\n3 F\n0 1\n";
        let snap = parse(text).unwrap();
        assert_eq!(snap.protocol, "two-slot");
        assert_eq!(snap.config.degree(0), 1);
        assert_eq!(snap.config.free_count(), 2);
        assert_eq!(render(&snap.config, &snap.protocol, snap.k), text);
    }

    #[test]
    fn rejects_non_canonical() {
        for bad in [
            "n=2 protocol=x k=2\n0 L0\n1 F\n1 0\n",
            "n=2 protocol=x k=2\n1 L0\n0 F\n",
            "n=2 protocol=x k=02\n0 L0\n1 F\n",
            "n=3 protocol=x k=2\n0 L0\n1 F\n2 F\n0 2\n0 1\n",
            "n=2 protocol=x k=2\n0 L0\n1 F",
            "n=2 protocol=x k=2\n0 L0\n",
            "n=2 protocol=x\n0 L0\n1 F\n",
        ] {
            assert!(parse(bad).is_err(), "{bad:?}");
        }
    }
}
