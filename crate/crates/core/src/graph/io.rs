//! Plain edge-list format: a header line `n m`, then `m` lines `u v` (0-based).

use crate::error::{Error, Result};

use super::LabeledGraph;

/// Parses a graph spanning all of `[n]`.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let nums = |l: &str| -> Result<Vec<usize>> {
        l.split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad token {t:?}"))))
            .collect()
    };
    let h = nums(header)?;
    if h.len() != 2 {
        return Err(Error::Parse(format!("header must be `n m`, got {header:?}")));
    }
    let (n, m) = (h[0], h[1]);
    let mut g = LabeledGraph::edgeless(n);
    let mut count = 0;
    for line in lines {
        let e = nums(line)?;
        if e.len() != 2 {
            return Err(Error::Parse(format!("edge line must be `u v`, got {line:?}")));
        }
        g.add_edge(e[0], e[1])?;
        count += 1;
    }
    if count != m {
        return Err(Error::Parse(format!("header promises {m} edges, found {count}")));
    }
    Ok(g)
}

pub fn write_edge_list(g: &LabeledGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.num_edges());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
