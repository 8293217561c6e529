//! s-t vertex cuts and path-preserving variants over plain digraphs.
//!
//! The minimum s-t vertex cut is computed by vertex-splitting maximum flow.
//! The path-preserving variants ask for a vertex set whose removal destroys
//! every s-to-t path while at least one t-to-s path survives; they are decided
//! by exact subset enumeration with a preserve-check before the cut-check.
//! Cut sets never include `s` or `t`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::error::{Error, Result};

/// An unweighted digraph over token-named vertices, no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    vertices: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl DiGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = String>,
        edges: &[(String, String)],
    ) -> Result<Self> {
        let mut vs: Vec<String> = vertices.into_iter().collect();
        vs.sort();
        vs.dedup();
        let mut g = DiGraph {
            vertices: vs,
            edges: BTreeSet::new(),
        };
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn index_of(&self, v: &str) -> Result<usize> {
        self.vertices
            .binary_search_by(|x| x.as_str().cmp(v))
            .map_err(|_| Error::UnknownVertex(v.to_string()))
    }

    pub fn add_edge(&mut self, u: &str, v: &str) -> Result<()> {
        let (i, j) = (self.index_of(u)?, self.index_of(v)?);
        if i == j {
            return Err(Error::InvalidInput(format!("self-loop on {u}")));
        }
        self.edges.insert((i, j));
        Ok(())
    }

    pub fn has_edge_idx(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.vertices[i].as_str(), self.vertices[j].as_str()))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Reachability with a removed vertex set.
    #[allow(clippy::needless_range_loop)]
    pub fn has_path(&self, from: usize, to: usize, removed: &BTreeSet<usize>) -> bool {
        if removed.contains(&from) || removed.contains(&to) {
            return false;
        }
        if from == to {
            return true;
        }
        let n = self.len();
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if !seen[y] && !removed.contains(&y) && self.has_edge_idx(x, y) {
                    if y == to {
                        return true;
                    }
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }
}

/// Parse a digraph file: a `vertices:` line, then one `u v` line per edge.
pub fn parse_digraph(text: &str) -> Result<DiGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty digraph file".into(),
    })?;
    let rest = header.strip_prefix("vertices:").ok_or(Error::Parse {
        line: lineno,
        msg: "expected `vertices:` header".into(),
    })?;
    let vertices: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
    if vertices.is_empty() {
        return Err(Error::Parse {
            line: lineno,
            msg: "empty vertex list".into(),
        });
    }
    let mut g = DiGraph::new(vertices, &[])?;
    for (lineno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                msg: "expected `u v` edge line".into(),
            });
        }
        g.add_edge(toks[0], toks[1]).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
    }
    Ok(g)
}

/// Canonical digraph serialization: sorted vertices, sorted edges.
pub fn serialize_digraph(g: &DiGraph) -> String {
    let mut out = String::from("vertices: ");
    out.push_str(&g.vertices().join(" "));
    out.push('\n');
    for (u, v) in g.edges() {
        out.push_str(u);
        out.push(' ');
        out.push_str(v);
        out.push('\n');
    }
    out
}

/// Minimum-cardinality internal vertex set disconnecting all s-to-t paths,
/// via vertex-splitting maximum flow. Errors on a direct s-to-t edge.
#[allow(clippy::needless_range_loop)]
pub fn min_st_vertex_cut(g: &DiGraph, s: &str, t: &str) -> Result<(usize, Vec<String>)> {
    let si = g.index_of(s)?;
    let ti = g.index_of(t)?;
    if si == ti {
        return Err(Error::InvalidInput("s and t must differ".into()));
    }
    if g.has_edge_idx(si, ti) {
        return Err(Error::UncuttableEdge {
            s: s.to_string(),
            t: t.to_string(),
        });
    }
    let n = g.len();
    // node 2i = v_in, 2i+1 = v_out; split edge capacity 1 for internal vertices
    let nodes = 2 * n;
    let inf = n as i64 + 1;
    let mut cap: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for v in 0..n {
        let c = if v == si || v == ti { inf } else { 1 };
        cap.insert((2 * v, 2 * v + 1), c);
    }
    for &(u, v) in &g.edges {
        cap.insert((2 * u + 1, 2 * v), inf);
    }
    let source = 2 * si + 1;
    let sink = 2 * ti;
    let mut flow: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let residual = |cap: &BTreeMap<(usize, usize), i64>,
                    flow: &BTreeMap<(usize, usize), i64>,
                    u: usize,
                    v: usize| {
        cap.get(&(u, v)).copied().unwrap_or(0) - flow.get(&(u, v)).copied().unwrap_or(0)
            + flow.get(&(v, u)).copied().unwrap_or(0)
    };
    loop {
        // BFS augmenting path
        let mut prev = vec![usize::MAX; nodes];
        prev[source] = source;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for v in 0..nodes {
                if prev[v] == usize::MAX && residual(&cap, &flow, u, v) > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut v = sink;
        while v != source {
            let u = prev[v];
            // push 1 unit along (u, v)
            let back = flow.get(&(v, u)).copied().unwrap_or(0);
            if back > 0 {
                flow.insert((v, u), back - 1);
            } else {
                *flow.entry((u, v)).or_insert(0) += 1;
            }
            v = u;
        }
    }
    // min cut: vertices whose split edge crosses the residual-reachable set
    let mut reach = vec![false; nodes];
    reach[source] = true;
    let mut stack = vec![source];
    while let Some(u) = stack.pop() {
        for v in 0..nodes {
            if !reach[v] && residual(&cap, &flow, u, v) > 0 {
                reach[v] = true;
                stack.push(v);
            }
        }
    }
    let cut: Vec<String> = (0..n)
        .filter(|&v| v != si && v != ti && reach[2 * v] && !reach[2 * v + 1])
        .map(|v| g.vertices[v].clone())
        .collect();
    Ok((cut.len(), cut))
}

/// Is `cut` a path-preserving vertex cut: no s-to-t path, some t-to-s path?
pub fn is_path_preserving_cut(g: &DiGraph, si: usize, ti: usize, cut: &BTreeSet<usize>) -> bool {
    g.has_path(ti, si, cut) && !g.has_path(si, ti, cut)
}

fn pp_search<F: Fn(&BTreeSet<usize>) -> bool>(
    g: &DiGraph,
    s: &str,
    t: &str,
    max_size: usize,
    admissible: F,
) -> Result<Option<Vec<String>>> {
    let si = g.index_of(s)?;
    let ti = g.index_of(t)?;
    if si == ti {
        return Err(Error::InvalidInput("s and t must differ".into()));
    }
    let pool: Vec<usize> = (0..g.len()).filter(|&v| v != si && v != ti).collect();
    for k in 0..=max_size.min(pool.len()) {
        for combo in pool.iter().copied().combinations(k) {
            let cut: BTreeSet<usize> = combo.iter().copied().collect();
            if !admissible(&cut) {
                continue;
            }
            // preserve-check first: it prunes most candidates early
            if !g.has_path(ti, si, &cut) {
                continue;
            }
            if !g.has_path(si, ti, &cut) {
                return Ok(Some(combo.iter().map(|&v| g.vertices[v].clone()).collect()));
            }
        }
    }
    Ok(None)
}

/// Path-preserving vertex cut of size at most `k`.
pub fn ppvc_decide(g: &DiGraph, s: &str, t: &str, k: usize) -> Result<(bool, Option<Vec<String>>)> {
    let w = pp_search(g, s, t, k, |_| true)?;
    Ok((w.is_some(), w))
}

/// Path-preserving cut with at most `x` unlabeled and at least `y` labeled
/// vertices. An unsatisfiable bound (`y` larger than the label set) is a
/// negative decision, not an error.
pub fn mippvc_decide(
    g: &DiGraph,
    s: &str,
    t: &str,
    labeled: &BTreeSet<String>,
    x: usize,
    y: usize,
) -> Result<(bool, Option<Vec<String>>)> {
    let mut lab = BTreeSet::new();
    for v in labeled {
        lab.insert(g.index_of(v)?);
    }
    if y > lab.len() {
        return Ok((false, None));
    }
    let max_size = x + lab.len();
    let w = pp_search(g, s, t, max_size, |cut| {
        let labeled_in = cut.iter().filter(|v| lab.contains(v)).count();
        cut.len() - labeled_in <= x && labeled_in >= y
    })?;
    Ok((w.is_some(), w))
}

/// Path-preserving cut of size at most `k` taking whole color classes; the
/// colors of `s` and `t` are never cuttable.
pub fn cppvc_decide(
    g: &DiGraph,
    s: &str,
    t: &str,
    coloring: &BTreeMap<String, String>,
    k: usize,
) -> Result<(bool, Option<Vec<String>>)> {
    let color_classes = color_classes(g, coloring)?;
    let si = g.index_of(s)?;
    let ti = g.index_of(t)?;
    let forbidden: BTreeSet<&str> = [coloring[s].as_str(), coloring[t].as_str()]
        .into_iter()
        .collect();
    let usable: Vec<&(String, Vec<usize>)> = color_classes
        .iter()
        .filter(|(c, _)| !forbidden.contains(c.as_str()))
        .collect();
    let _ = (si, ti);
    let mut best: Option<Vec<String>> = None;
    // subsets of whole classes within the size budget, smallest total first
    let mut selections: Vec<Vec<usize>> = Vec::new();
    collect_class_unions(&usable, 0, k, &mut Vec::new(), &mut selections);
    selections.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for sel in selections {
        let cut: BTreeSet<usize> = sel.iter().copied().collect();
        if is_path_preserving_cut(g, si, ti, &cut) {
            best = Some(cut.iter().map(|&v| g.vertices[v].clone()).collect());
            break;
        }
    }
    Ok((best.is_some(), best))
}

/// Colored path-preserving cut that must contain at least `min_labeled`
/// vertices from `labeled` classes and no vertices outside them. Used by the
/// grouped candidate-addition driver, where the cut is the not-added side.
pub fn colored_min_inclusion_cut(
    g: &DiGraph,
    s: &str,
    t: &str,
    coloring: &BTreeMap<String, String>,
    labeled: &BTreeSet<String>,
    min_labeled: usize,
) -> Result<(bool, Option<Vec<String>>)> {
    let color_classes = color_classes(g, coloring)?;
    let si = g.index_of(s)?;
    let ti = g.index_of(t)?;
    let mut lab = BTreeSet::new();
    for v in labeled {
        lab.insert(g.index_of(v)?);
    }
    let usable: Vec<&(String, Vec<usize>)> = color_classes
        .iter()
        .filter(|(_, vs)| vs.iter().all(|v| lab.contains(v)))
        .collect();
    let mut selections: Vec<Vec<usize>> = Vec::new();
    collect_class_unions(&usable, 0, g.len(), &mut Vec::new(), &mut selections);
    selections.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for sel in selections {
        if sel.len() < min_labeled {
            continue;
        }
        let cut: BTreeSet<usize> = sel.iter().copied().collect();
        if is_path_preserving_cut(g, si, ti, &cut) {
            return Ok((
                true,
                Some(cut.iter().map(|&v| g.vertices[v].clone()).collect()),
            ));
        }
    }
    Ok((false, None))
}

fn color_classes(
    g: &DiGraph,
    coloring: &BTreeMap<String, String>,
) -> Result<Vec<(String, Vec<usize>)>> {
    for v in g.vertices() {
        if !coloring.contains_key(v) {
            return Err(Error::InvalidInput(format!("coloring misses vertex {v}")));
        }
    }
    let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, v) in g.vertices().iter().enumerate() {
        classes.entry(coloring[v].clone()).or_default().push(i);
    }
    Ok(classes.into_iter().collect())
}

fn collect_class_unions(
    usable: &[&(String, Vec<usize>)],
    i: usize,
    budget: usize,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if i == usable.len() {
        let mut sel = acc.clone();
        sel.sort_unstable();
        out.push(sel);
        return;
    }
    collect_class_unions(usable, i + 1, budget, acc, out);
    let class = &usable[i].1;
    if class.len() <= budget {
        let before = acc.len();
        acc.extend(class.iter().copied());
        collect_class_unions(usable, i + 1, budget - class.len(), acc, out);
        acc.truncate(before);
    }
}
