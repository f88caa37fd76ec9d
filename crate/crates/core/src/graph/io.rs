//! Line-oriented text formats. Blank lines and lines starting with `#` are
//! skipped everywhere.

use std::fmt::Write as _;

use super::{Graph, PairSet};
use crate::error::{Error, Result};

/// Iterator over meaningful lines as `(1-based line number, trimmed text)`.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.next()
    }

    /// Next line, or a parse error naming what was expected.
    pub fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next()
            .ok_or_else(|| Error::parse(0, format!("unexpected end of input, expected {what}")))
    }

    /// Next line split on whitespace, which must start with `keyword`.
    pub fn header(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>)> {
        let (no, line) = self.expect(&format!("`{keyword}` header"))?;
        let mut toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() != Some(&keyword) {
            return Err(Error::parse(no, format!("expected `{keyword}` header, found `{line}`")));
        }
        toks.remove(0);
        Ok((no, toks))
    }
}

impl<'a> Iterator for Lines<'a> {
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t));
        }
        None
    }
}

pub fn field<T: std::str::FromStr>(line: usize, tok: Option<&&str>, name: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing field `{name}`")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad value `{tok}` for field `{name}`")))
}

pub fn expect_arity(line: usize, toks: &[&str], arity: usize, what: &str) -> Result<()> {
    if toks.len() != arity {
        return Err(Error::parse(
            line,
            format!("{what} needs {arity} fields, found {}", toks.len()),
        ));
    }
    Ok(())
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = String::with_capacity(16 * g.m() + 32);
    writeln!(s, "graph {} {}", g.n(), g.m()).unwrap();
    for e in g.edges() {
        writeln!(s, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    s
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = Lines::new(text);
    read_graph(&mut lines)
}

pub fn read_graph(lines: &mut Lines<'_>) -> Result<Graph> {
    let (no, h) = lines.header("graph")?;
    expect_arity(no, &h, 2, "graph header")?;
    let n: usize = field(no, h.first(), "n")?;
    let m: usize = field(no, h.get(1), "m")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, line) = lines.expect("edge line")?;
        let t: Vec<&str> = line.split_whitespace().collect();
        expect_arity(no, &t, 3, "edge line")?;
        let u: usize = field(no, t.first(), "u")?;
        let v: usize = field(no, t.get(1), "v")?;
        let w: u64 = field(no, t.get(2), "w")?;
        if u >= n || v >= n {
            return Err(Error::parse(no, format!("vertex out of range (n = {n})")));
        }
        edges.push((u, v, w));
    }
    Graph::new(n, edges)
}

pub fn write_pairs(p: &PairSet) -> String {
    let mut s = String::new();
    writeln!(s, "pairs {}", p.len()).unwrap();
    for &(u, v) in p.as_slice() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

/// Pair list; duplicates are accepted.
pub fn parse_pairs(text: &str, n: usize) -> Result<PairSet> {
    read_pairs(&mut Lines::new(text), n)
}

pub fn read_pairs(lines: &mut Lines<'_>, n: usize) -> Result<PairSet> {
    let (no, h) = lines.header("pairs")?;
    expect_arity(no, &h, 1, "pairs header")?;
    let count: usize = field(no, h.first(), "count")?;
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let (no, line) = lines.expect("pair line")?;
        let t: Vec<&str> = line.split_whitespace().collect();
        expect_arity(no, &t, 2, "pair line")?;
        let u: usize = field(no, t.first(), "u")?;
        let v: usize = field(no, t.get(1), "v")?;
        if u >= n || v >= n || u == v {
            return Err(Error::parse(no, format!("invalid pair ({u}, {v}) for n = {n}")));
        }
        pairs.push((u, v));
    }
    PairSet::new(n, pairs, true)
}

pub fn write_ranking(ranking: &[usize]) -> String {
    let mut s = String::new();
    writeln!(s, "ranking {}", ranking.len()).unwrap();
    for v in ranking {
        writeln!(s, "{v}").unwrap();
    }
    s
}

/// Vertex ids, highest priority first; must be a permutation of `0..n`.
pub fn parse_ranking(text: &str) -> Result<Vec<usize>> {
    let mut lines = Lines::new(text);
    let (no, h) = lines.header("ranking")?;
    expect_arity(no, &h, 1, "ranking header")?;
    let n: usize = field(no, h.first(), "n")?;
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (no, line) = lines.expect("ranking entry")?;
        for tok in line.split_whitespace() {
            let v: usize = field(no, Some(&tok), "vertex")?;
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::parse(
                    no,
                    format!("ranking entry {v} is out of range or repeated"),
                ));
            }
            out.push(v);
        }
    }
    if out.len() != n {
        return Err(Error::parse(
            0,
            format!("ranking lists {} ids, header says {n}", out.len()),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn graph_round_trip() {
        let g = generate(
            &Family::Random {
                n: 30,
                m: 60,
                max_weight: 9,
            },
            2,
        )
        .unwrap();
        let text = write_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        let commented = format!("# made by hand\n\n{text}");
        assert_eq!(parse_graph(&commented).unwrap(), g);
    }

    #[test]
    fn graph_errors_name_the_line() {
        let err = parse_graph("graph 3 2\n0 1 1\n1 x 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(parse_graph("graph 3 2\n0 1 1\n").is_err());
        assert!(parse_graph("grph 3 0\n").is_err());
        assert!(parse_graph("graph 2 1\n0 5 1\n").is_err());
    }

    #[test]
    fn pairs_and_ranking() {
        let p = PairSet::new(5, vec![(0, 4), (2, 3), (0, 4)], true).unwrap();
        assert_eq!(parse_pairs(&write_pairs(&p), 5).unwrap(), p);
        assert!(parse_pairs("pairs 1\n2 2\n", 5).is_err());
        let r = vec![3, 1, 0, 2];
        assert_eq!(parse_ranking(&write_ranking(&r)).unwrap(), r);
        assert!(parse_ranking("ranking 3\n0\n0\n1\n").is_err());
    }
}
