//! Graphs, signed graphs, matrix-derived graphs, block decomposition and
//! subdivision pattern recognition.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpnError};
use crate::matcore::SymMatrix;

/// Simple undirected graph on vertices `0..n`, edges stored as ordered pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// Graph plus a {+,-} sign on every edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedGraph {
    pub graph: Graph,
    signs: BTreeMap<(usize, usize), Sign>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(SpnError::BadParams(format!("invalid edge ({i},{j})")));
        }
        self.edges.insert((i.min(j), i.max(j)));
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.edges.remove(&(i.min(j), i.max(j)));
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Connected components as sorted vertex sets (isolated vertices included).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// BFS distances from `s`; `usize::MAX` when unreachable.
    pub fn distances(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_acyclic(&self) -> bool {
        // A forest has exactly n - #components edges.
        self.edge_count() + self.components().len() == self.n
    }

    /// Vertex-induced subgraph, relabeled to 0..k following `vertices` order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = BTreeMap::new();
        for (k, &v) in vertices.iter().enumerate() {
            index.insert(v, k);
        }
        let mut g = Graph::new(vertices.len());
        for &(a, b) in &self.edges {
            if let (Some(&x), Some(&y)) = (index.get(&a), index.get(&b)) {
                g.add_edge(x, y).unwrap();
            }
        }
        g
    }

    /// True when `self`'s edges are a subset of `other`'s (same vertex count).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.is_subset(&other.edges)
    }

    /// Two-coloring of a connected subgraph reached from `s`; None if an odd
    /// cycle exists, otherwise the color classes.
    pub fn bipartition_from(&self, s: usize) -> Option<Vec<i8>> {
        let mut color = vec![-1i8; self.n];
        color[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if color[w] == -1 {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
        Some(color)
    }

    /// Finds an odd cycle if one exists (as a vertex list).
    pub fn odd_cycle(&self) -> Option<Vec<usize>> {
        let mut color = vec![-1i8; self.n];
        let mut parent = vec![usize::MAX; self.n];
        for s in 0..self.n {
            if color[s] != -1 {
                continue;
            }
            color[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if color[w] == -1 {
                        color[w] = 1 - color[v];
                        parent[w] = v;
                        queue.push_back(w);
                    } else if color[w] == color[v] {
                        // walk both vertices up to a common ancestor
                        let mut pv = vec![v];
                        let mut pw = vec![w];
                        let mut a = v;
                        let mut b = w;
                        let mut seen: BTreeSet<usize> = [v].into();
                        while parent[a] != usize::MAX {
                            a = parent[a];
                            pv.push(a);
                            seen.insert(a);
                        }
                        while !seen.contains(&b) {
                            b = parent[b];
                            pw.push(b);
                        }
                        let cut = pv.iter().position(|&x| x == b).unwrap();
                        let mut cycle = pv[..=cut].to_vec();
                        let mut back = pw;
                        back.pop();
                        back.reverse();
                        cycle.extend(back);
                        return Some(cycle);
                    }
                }
            }
        }
        None
    }
}

impl SignedGraph {
    pub fn new(n: usize) -> Self {
        SignedGraph {
            graph: Graph::new(n),
            signs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn add_edge(&mut self, i: usize, j: usize, sign: Sign) -> Result<()> {
        self.graph.add_edge(i, j)?;
        self.signs.insert((i.min(j), i.max(j)), sign);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.graph.remove_edge(i, j);
        self.signs.remove(&(i.min(j), i.max(j)));
    }

    pub fn sign(&self, i: usize, j: usize) -> Option<Sign> {
        self.signs.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn edges_signed(&self) -> impl Iterator<Item = (usize, usize, Sign)> + '_ {
        self.signs.iter().map(|(&(i, j), &s)| (i, j, s))
    }

    pub fn underlying(&self) -> &Graph {
        &self.graph
    }
}

// ---------------------------------------------------------------------------
// Matrix-derived graphs
// ---------------------------------------------------------------------------

/// The five graphs attached to a symmetric matrix: G(A), the signed graph,
/// G_-(A), G_+(A) and G_{-1}(A). Entries with |a_ij| <= tol count as zero;
/// G_{-1} uses |a_ij + 1| <= tol.
pub fn derive_graphs(a: &SymMatrix, tol: f64) -> (Graph, SignedGraph, Graph, Graph, Graph) {
    let n = a.n();
    let mut g = Graph::new(n);
    let mut gs = SignedGraph::new(n);
    let mut gm = Graph::new(n);
    let mut gp = Graph::new(n);
    let mut gm1 = Graph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a.get(i, j);
            if v.abs() > tol {
                g.add_edge(i, j).unwrap();
                if v > 0.0 {
                    gs.add_edge(i, j, Sign::Plus).unwrap();
                    gp.add_edge(i, j).unwrap();
                } else {
                    gs.add_edge(i, j, Sign::Minus).unwrap();
                    gm.add_edge(i, j).unwrap();
                }
            }
            if (v + 1.0).abs() <= tol {
                gm1.add_edge(i, j).unwrap();
            }
        }
    }
    (g, gs, gm, gp, gm1)
}

/// Negative/positive edge split plus the connected components of the negative
/// graph, each flagged with whether its vertex span induces only negative
/// edges in the signed graph.
pub fn negative_structure(gs: &SignedGraph) -> (Graph, Graph, Vec<(Vec<usize>, bool)>) {
    let n = gs.n();
    let mut neg = Graph::new(n);
    let mut pos = Graph::new(n);
    for (i, j, s) in gs.edges_signed() {
        match s {
            Sign::Minus => neg.add_edge(i, j).unwrap(),
            Sign::Plus => pos.add_edge(i, j).unwrap(),
        }
    }
    let comps = neg
        .components()
        .into_iter()
        .map(|comp| {
            let inside: BTreeSet<usize> = comp.iter().copied().collect();
            let induced_only = pos
                .edges()
                .all(|(a, b)| !(inside.contains(&a) && inside.contains(&b)));
            (comp, induced_only)
        })
        .collect();
    (neg, pos, comps)
}

// ---------------------------------------------------------------------------
// Blocks (biconnected components)
// ---------------------------------------------------------------------------

/// A block of a graph: the vertex set in original labels plus the compact
/// graph on those vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub vertices: Vec<usize>,
    pub graph: Graph,
}

/// Biconnected-component decomposition via depth-first search with low-links.
/// Isolated vertices yield no block; a bridge yields a single-edge block.
pub fn blocks(g: &Graph) -> Vec<Block> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut out: Vec<Vec<(usize, usize)>> = Vec::new();

    fn dfs(
        g: &Graph,
        u: usize,
        parent: usize,
        disc: &mut [usize],
        low: &mut [usize],
        timer: &mut usize,
        edge_stack: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        disc[u] = *timer;
        low[u] = *timer;
        *timer += 1;
        for w in g.neighbors(u) {
            if disc[w] == usize::MAX {
                edge_stack.push((u, w));
                dfs(g, w, u, disc, low, timer, edge_stack, out);
                low[u] = low[u].min(low[w]);
                if low[w] >= disc[u] {
                    let mut comp = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        comp.push(e);
                        if e == (u, w) {
                            break;
                        }
                    }
                    out.push(comp);
                }
            } else if w != parent && disc[w] < disc[u] {
                edge_stack.push((u, w));
                low[u] = low[u].min(disc[w]);
            }
        }
    }

    for s in 0..n {
        if disc[s] == usize::MAX {
            dfs(g, s, usize::MAX, &mut disc, &mut low, &mut timer, &mut edge_stack, &mut out);
        }
    }

    out.into_iter()
        .map(|edges| {
            let mut vs: BTreeSet<usize> = BTreeSet::new();
            for &(a, b) in &edges {
                vs.insert(a);
                vs.insert(b);
            }
            let vertices: Vec<usize> = vs.into_iter().collect();
            let index: BTreeMap<usize, usize> =
                vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            let mut graph = Graph::new(vertices.len());
            for (a, b) in edges {
                graph.add_edge(index[&a], index[&b]).unwrap();
            }
            Block { vertices, graph }
        })
        .collect()
}

/// 2-connected: at least 3 vertices, connected, and no cut vertex.
pub fn is_two_connected(g: &Graph) -> bool {
    if g.n() < 3 || !g.is_connected() {
        return false;
    }
    let bl = blocks(g);
    bl.len() == 1 && bl[0].vertices.len() == g.n()
}

// ---------------------------------------------------------------------------
// Topological core (suppression of degree-2 vertices)
// ---------------------------------------------------------------------------

/// Canonical form for subdivision recognition: branch vertices (degree != 2)
/// plus the maximal paths through degree-2 vertices connecting them. A graph
/// in which every vertex has degree 2 (a cycle) is stored as a single closed
/// path and no branch vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopoCore {
    pub branch_vertices: Vec<usize>,
    /// Vertex sequences; endpoints are branch vertices except for the closed
    /// cycle case where first == last.
    pub paths: Vec<Vec<usize>>,
}

impl TopoCore {
    /// Multiset of (endpoint pair, path length) labels of the core multigraph.
    pub fn core_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = self
            .paths
            .iter()
            .map(|p| {
                let a = *p.first().unwrap();
                let b = *p.last().unwrap();
                (a.min(b), a.max(b), p.len() - 1)
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Re-expands the core back into a graph on the original vertex set.
    pub fn expand(&self, n: usize) -> Graph {
        let mut g = Graph::new(n);
        for p in &self.paths {
            for w in p.windows(2) {
                g.add_edge(w[0], w[1]).unwrap();
            }
        }
        g
    }
}

pub fn topo_core(g: &Graph) -> Result<TopoCore> {
    if !g.is_connected() || g.edge_count() == 0 {
        return Err(SpnError::DisconnectedInput);
    }
    // Vertices with any degree other than 2 are branch vertices. Isolated
    // vertices cannot occur in a connected graph with at least one edge.
    let branch: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) != 2 && g.degree(v) > 0).collect();
    if branch.is_empty() {
        // Pure cycle: one closed path starting at the smallest vertex.
        let start = (0..g.n()).find(|&v| g.degree(v) > 0).unwrap();
        let mut path = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let nbrs = g.neighbors(cur);
            let next = if nbrs[0] != prev { nbrs[0] } else { nbrs[1] };
            path.push(next);
            prev = cur;
            cur = next;
            if cur == start {
                break;
            }
        }
        return Ok(TopoCore {
            branch_vertices: vec![],
            paths: vec![path],
        });
    }
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut paths = Vec::new();
    for &b in &branch {
        for x in g.neighbors(b) {
            let key = (b.min(x), b.max(x));
            if used.contains(&key) {
                continue;
            }
            used.insert(key);
            let mut path = vec![b, x];
            let mut prev = b;
            let mut cur = x;
            while g.degree(cur) == 2 {
                let nbrs = g.neighbors(cur);
                let next = if nbrs[0] != prev { nbrs[0] } else { nbrs[1] };
                used.insert((cur.min(next), cur.max(next)));
                path.push(next);
                prev = cur;
                cur = next;
            }
            paths.push(path);
        }
    }
    Ok(TopoCore {
        branch_vertices: branch,
        paths,
    })
}

// ---------------------------------------------------------------------------
// Block recognition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockClass {
    Edge,
    Cycle { len: usize },
    TnExact { k: usize },
    K2n { m: usize },
    DiamondSubdivision,
    TnSubdivisionProper { k: usize },
    K4Exact,
    Drn { k: usize },
    K4Subdivided2to5,
    K4SubdividedAll6,
    Other,
}

/// Classifies a 2-connected graph (or single edge) against the block families
/// of the SPN characterization. Tie-breaking: exact T_n and K_{2,n} win over
/// the generic two-branch-vertex classes; the diamond family (3 core paths)
/// wins over the proper T_n-subdivision bucket.
pub fn recognize_block(b: &Graph) -> Result<BlockClass> {
    let n = b.n();
    if n == 2 && b.edge_count() == 1 {
        return Ok(BlockClass::Edge);
    }
    if !is_two_connected(b) {
        return Err(SpnError::NotTwoConnected);
    }
    if (0..n).all(|v| b.degree(v) == 2) {
        return Ok(BlockClass::Cycle { len: n });
    }
    if let Some(k) = match_tn_exact(b) {
        return Ok(BlockClass::TnExact { k });
    }
    if let Some(m) = match_k2n_exact(b) {
        return Ok(BlockClass::K2n { m });
    }
    let core = topo_core(b)?;
    let nb = core.branch_vertices.len();
    let ce = core.core_edges();
    if nb == 2 {
        let p = ce.len();
        if p == 3 {
            return Ok(BlockClass::DiamondSubdivision);
        }
        if p >= 4 {
            return Ok(BlockClass::TnSubdivisionProper { k: p + 1 });
        }
        return Ok(BlockClass::Other);
    }
    if nb == 4 && core.branch_vertices.iter().all(|&v| b.degree(v) == 3) && ce.len() == 6 {
        // The core must be a simple K4: every branch pair joined by one path.
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(a, bb, _) in &ce {
            if a == bb || !pairs.insert((a, bb)) {
                return Ok(BlockClass::Other);
            }
        }
        if pairs.len() != 6 {
            return Ok(BlockClass::Other);
        }
        let subdivided: Vec<usize> = ce.iter().filter(|&&(_, _, l)| l >= 2).map(|&(_, _, l)| l).collect();
        return Ok(match subdivided.len() {
            0 => BlockClass::K4Exact,
            1 => BlockClass::Drn { k: subdivided[0] + 3 },
            2..=5 => BlockClass::K4Subdivided2to5,
            _ => BlockClass::K4SubdividedAll6,
        });
    }
    Ok(BlockClass::Other)
}

fn match_tn_exact(b: &Graph) -> Option<usize> {
    let n = b.n();
    if n < 4 || b.edge_count() != 2 * n - 3 {
        return None;
    }
    let hubs: Vec<usize> = (0..n).filter(|&v| b.degree(v) == n - 1).collect();
    if hubs.len() != 2 || !b.has_edge(hubs[0], hubs[1]) {
        return None;
    }
    for v in 0..n {
        if v == hubs[0] || v == hubs[1] {
            continue;
        }
        if b.degree(v) != 2 || !b.has_edge(v, hubs[0]) || !b.has_edge(v, hubs[1]) {
            return None;
        }
    }
    Some(n)
}

fn match_k2n_exact(b: &Graph) -> Option<usize> {
    let n = b.n();
    if n < 5 {
        return None;
    }
    let m = n - 2;
    if b.edge_count() != 2 * m {
        return None;
    }
    let hubs: Vec<usize> = (0..n).filter(|&v| b.degree(v) == m).collect();
    // For m = 2 this would be C4, already classified as a cycle.
    if hubs.len() != 2 || b.has_edge(hubs[0], hubs[1]) {
        return None;
    }
    for v in 0..n {
        if v == hubs[0] || v == hubs[1] {
            continue;
        }
        if b.degree(v) != 2 || !b.has_edge(v, hubs[0]) || !b.has_edge(v, hubs[1]) {
            return None;
        }
    }
    Some(m)
}

// ---------------------------------------------------------------------------
// Subdivision containment
// ---------------------------------------------------------------------------

/// A verified topological embedding of a pattern H into a host G: an injective
/// vertex map plus one internally disjoint path per pattern edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    /// `vertex_map[v]` is the host vertex for pattern vertex `v`.
    pub vertex_map: Vec<usize>,
    /// Pattern edges in sorted order with their routed host paths.
    pub paths: Vec<((usize, usize), Vec<usize>)>,
}

impl Embedding {
    /// Machine check: endpoints match the vertex map, paths exist in the host,
    /// and interiors are disjoint from each other and from all mapped vertices.
    pub fn verify(&self, g: &Graph, h: &Graph) -> bool {
        if self.vertex_map.len() != h.n() {
            return false;
        }
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for &v in &self.vertex_map {
            if v >= g.n() || !seen.insert(v) {
                return false;
            }
        }
        let h_edges: Vec<(usize, usize)> = h.edges().collect();
        if self.paths.len() != h_edges.len() {
            return false;
        }
        let mapped: BTreeSet<usize> = self.vertex_map.iter().copied().collect();
        let mut interior_seen: BTreeSet<usize> = BTreeSet::new();
        for (k, ((hu, hv), path)) in self.paths.iter().enumerate() {
            if (*hu, *hv) != h_edges[k] {
                return false;
            }
            if path.len() < 2
                || path[0] != self.vertex_map[*hu]
                || *path.last().unwrap() != self.vertex_map[*hv]
            {
                return false;
            }
            for w in path.windows(2) {
                if !g.has_edge(w[0], w[1]) {
                    return false;
                }
            }
            for &inner in &path[1..path.len() - 1] {
                if mapped.contains(&inner) || !interior_seen.insert(inner) {
                    return false;
                }
            }
        }
        true
    }

    pub fn subdivided_path_count(&self) -> usize {
        self.paths.iter().filter(|(_, p)| p.len() > 2).count()
    }
}

struct SubdivisionSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    h_edges: Vec<(usize, usize)>,
    /// Accept filter over the completed embedding.
    accept: Box<dyn Fn(&Embedding) -> bool + 'a>,
}

impl<'a> SubdivisionSearch<'a> {
    fn run(&self) -> Option<Embedding> {
        let hn = self.h.n();
        // Order pattern vertices by decreasing degree for earlier pruning.
        let mut order: Vec<usize> = (0..hn).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.h.degree(v)));
        let mut vmap = vec![usize::MAX; hn];
        let mut used = vec![false; self.g.n()];
        self.assign(&order, 0, &mut vmap, &mut used)
    }

    fn assign(
        &self,
        order: &[usize],
        k: usize,
        vmap: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Embedding> {
        if k == order.len() {
            let mut paths: Vec<((usize, usize), Vec<usize>)> = Vec::new();
            let mut interior_used = used.clone();
            return self.route(0, vmap, &mut interior_used, &mut paths);
        }
        let hv = order[k];
        let need = self.h.degree(hv);
        for gv in 0..self.g.n() {
            if used[gv] || self.g.degree(gv) < need {
                continue;
            }
            vmap[hv] = gv;
            used[gv] = true;
            if let Some(e) = self.assign(order, k + 1, vmap, used) {
                return Some(e);
            }
            used[gv] = false;
            vmap[hv] = usize::MAX;
        }
        None
    }

    fn route(
        &self,
        e: usize,
        vmap: &[usize],
        used: &mut Vec<bool>,
        paths: &mut Vec<((usize, usize), Vec<usize>)>,
    ) -> Option<Embedding> {
        if e == self.h_edges.len() {
            let emb = Embedding {
                vertex_map: vmap.to_vec(),
                paths: paths.clone(),
            };
            if (self.accept)(&emb) && emb.verify(self.g, self.h) {
                return Some(emb);
            }
            return None;
        }
        let (hu, hv) = self.h_edges[e];
        let (src, dst) = (vmap[hu], vmap[hv]);
        let mut path = vec![src];
        self.dfs_paths(src, dst, &mut path, used, |p, used| {
            paths.push(((hu, hv), p.to_vec()));
            let res = self.route(e + 1, vmap, used, paths);
            if res.is_none() {
                paths.pop();
            }
            res
        })
    }

    /// Enumerates simple paths from `cur` to `dst` whose interior avoids
    /// `used` vertices, invoking `on_found` for each (backtracking on None).
    fn dfs_paths<F>(
        &self,
        cur: usize,
        dst: usize,
        path: &mut Vec<usize>,
        used: &mut Vec<bool>,
        mut on_found: F,
    ) -> Option<Embedding>
    where
        F: FnMut(&[usize], &mut Vec<bool>) -> Option<Embedding>,
    {
        fn go<F>(
            s: &SubdivisionSearch,
            cur: usize,
            dst: usize,
            path: &mut Vec<usize>,
            used: &mut Vec<bool>,
            on_found: &mut F,
        ) -> Option<Embedding>
        where
            F: FnMut(&[usize], &mut Vec<bool>) -> Option<Embedding>,
        {
            for w in s.g.neighbors(cur) {
                if w == dst {
                    path.push(w);
                    // Interiors become blocked for later edges.
                    let interior: Vec<usize> = path[1..path.len() - 1].to_vec();
                    for &v in &interior {
                        used[v] = true;
                    }
                    let res = on_found(path, used);
                    if res.is_some() {
                        return res;
                    }
                    for &v in &interior {
                        used[v] = false;
                    }
                    path.pop();
                    continue;
                }
                if used[w] || path.contains(&w) {
                    continue;
                }
                path.push(w);
                let res = go(s, w, dst, path, used, on_found);
                if res.is_some() {
                    return res;
                }
                path.pop();
            }
            None
        }
        go(self, cur, dst, path, used, &mut on_found)
    }
}

/// Does `g` contain a subgraph that is a subdivision of `h`? Returns a
/// machine-verified embedding on success.
pub fn contains_subdivision(g: &Graph, h: &Graph) -> Result<Option<Embedding>> {
    if h.n() > 8 {
        return Err(SpnError::PatternTooLarge(format!("pattern has {} vertices", h.n())));
    }
    if g.n() > 20 {
        return Err(SpnError::PatternTooLarge(format!("host has {} vertices", g.n())));
    }
    let search = SubdivisionSearch {
        g,
        h,
        h_edges: h.edges().collect(),
        accept: Box::new(|_| true),
    };
    Ok(search.run())
}

/// Specialised query for the forbidden K4 family: an embedding of K4 in which
/// at least two and at most five routed paths have length >= 2.
pub fn contains_k4_two_to_five_subdivided(g: &Graph) -> Result<Option<Embedding>> {
    if g.n() > 20 {
        return Err(SpnError::PatternTooLarge(format!("host has {} vertices", g.n())));
    }
    let k4 = catalog_complete(4);
    let search = SubdivisionSearch {
        g,
        h: &k4,
        h_edges: k4.edges().collect(),
        accept: Box::new(|emb: &Embedding| {
            let s = emb.subdivided_path_count();
            (2..=5).contains(&s)
        }),
    };
    Ok(search.run())
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

pub fn catalog_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(SpnError::BadParams("cycle needs n >= 3".into()));
    }
    let mut g = Graph::new(n);
    for i in 0..n {
        g.add_edge(i, (i + 1) % n)?;
    }
    Ok(g)
}

pub fn catalog_path(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(SpnError::BadParams("path needs n >= 1".into()));
    }
    let mut g = Graph::new(n);
    for i in 0..n.saturating_sub(1) {
        g.add_edge(i, i + 1)?;
    }
    Ok(g)
}

pub fn catalog_complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            g.add_edge(i, j).unwrap();
        }
    }
    g
}

/// T_k: k-2 triangles sharing the base edge (0,1).
pub fn catalog_tn(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(SpnError::BadParams("T_n needs n >= 3".into()));
    }
    let mut g = Graph::new(k);
    g.add_edge(0, 1)?;
    for a in 2..k {
        g.add_edge(0, a)?;
        g.add_edge(1, a)?;
    }
    Ok(g)
}

/// K_{2,m} with hubs 0 and 1.
pub fn catalog_k2n(m: usize) -> Result<Graph> {
    if m < 1 {
        return Err(SpnError::BadParams("K_{2,n} needs n >= 1".into()));
    }
    let mut g = Graph::new(m + 2);
    for a in 2..m + 2 {
        g.add_edge(0, a)?;
        g.add_edge(1, a)?;
    }
    Ok(g)
}

/// DR_n: K4 with the edge (0,1) replaced by an independent path of length n-3.
pub fn catalog_drn(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(SpnError::BadParams("DR_n needs n >= 4".into()));
    }
    let mut g = catalog_complete(4);
    if n == 4 {
        return Ok(g);
    }
    g = subdivide_edge(&g, (0, 1), n - 4)?;
    Ok(g)
}

/// The fan on 5 vertices: path 0-1-3-4 plus hub 2 adjacent to all four.
pub fn catalog_f5() -> Graph {
    Graph::from_edges(5, &[(0, 1), (1, 3), (3, 4), (0, 2), (1, 2), (2, 3), (2, 4)]).unwrap()
}

/// CD_6: hexagon 0-2-3-5-4-1-0 plus the chords 1-2 and 3-4.
pub fn catalog_cd6() -> Graph {
    Graph::from_edges(
        6,
        &[(0, 1), (0, 2), (1, 2), (1, 4), (2, 3), (3, 4), (3, 5), (4, 5)],
    )
    .unwrap()
}

/// Replaces the edge by an independent path with `times` new inner vertices
/// (i.e. the edge is subdivided `times` times). New vertices get fresh labels.
pub fn subdivide_edge(g: &Graph, edge: (usize, usize), times: usize) -> Result<Graph> {
    if !g.has_edge(edge.0, edge.1) {
        return Err(SpnError::BadParams(format!("no edge ({},{})", edge.0, edge.1)));
    }
    let mut out = Graph::new(g.n() + times);
    for (a, b) in g.edges() {
        if (a.min(b), a.max(b)) != (edge.0.min(edge.1), edge.0.max(edge.1)) {
            out.add_edge(a, b)?;
        }
    }
    let mut prev = edge.0;
    for k in 0..times {
        out.add_edge(prev, g.n() + k)?;
        prev = g.n() + k;
    }
    out.add_edge(prev, edge.1)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Isomorphism and canonical forms (small graphs)
// ---------------------------------------------------------------------------

/// Canonical edge list: the lexicographically smallest edge set over all
/// vertex relabelings that sort degrees descending. Adequate for n <= 8.
pub fn canonical_form(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.n();
    assert!(n <= 10, "canonical_form is for small graphs");
    let mut degs: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut class_of = vec![0usize; n];
    // degree classes, sorted descending
    let mut uniq: Vec<usize> = degs.clone();
    uniq.sort_unstable_by(|a, b| b.cmp(a));
    uniq.dedup();
    for v in 0..n {
        class_of[v] = uniq.iter().position(|&d| d == degs[v]).unwrap();
    }
    degs.sort_unstable_by(|a, b| b.cmp(a));
    let mut best: Option<Vec<(usize, usize)>> = None;
    // perm[slot] = original vertex assigned to that slot; slots are grouped by
    // degree class in descending order.
    let mut slots_by_class: Vec<Vec<usize>> = vec![Vec::new(); uniq.len()];
    for (slot, &d) in degs.iter().enumerate() {
        let c = uniq.iter().position(|&x| x == d).unwrap();
        slots_by_class[c].push(slot);
    }
    let mut assignment = vec![usize::MAX; n]; // original vertex -> slot
    fn rec(
        g: &Graph,
        class_of: &[usize],
        slots_by_class: &[Vec<usize>],
        used_slots: &mut Vec<bool>,
        assignment: &mut Vec<usize>,
        v: usize,
        best: &mut Option<Vec<(usize, usize)>>,
    ) {
        let n = g.n();
        if v == n {
            let mut edges: Vec<(usize, usize)> = g
                .edges()
                .map(|(a, b)| {
                    let (x, y) = (assignment[a], assignment[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            edges.sort_unstable();
            match best {
                None => *best = Some(edges),
                Some(b) => {
                    if edges < *b {
                        *b = edges;
                    }
                }
            }
            return;
        }
        for &slot in &slots_by_class[class_of[v]] {
            if used_slots[slot] {
                continue;
            }
            used_slots[slot] = true;
            assignment[v] = slot;
            rec(g, class_of, slots_by_class, used_slots, assignment, v + 1, best);
            assignment[v] = usize::MAX;
            used_slots[slot] = false;
        }
    }
    let mut used_slots = vec![false; n];
    rec(g, &class_of, &slots_by_class, &mut used_slots, &mut assignment, 0, &mut best);
    best.unwrap_or_default()
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    g.n() == h.n() && g.edge_count() == h.edge_count() && canonical_form(g) == canonical_form(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowtie() -> Graph {
        Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn blocks_examples() {
        let bl = blocks(&bowtie());
        assert_eq!(bl.len(), 2);
        for b in &bl {
            assert_eq!(b.graph.edge_count(), 3);
            assert_eq!(b.vertices.len(), 3);
        }

        // a tree with 5 edges: five single-edge blocks
        let tree = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let bl = blocks(&tree);
        assert_eq!(bl.len(), 5);
        assert!(bl.iter().all(|b| b.graph.edge_count() == 1));

        let c6 = catalog_cycle(6).unwrap();
        let bl = blocks(&c6);
        assert_eq!(bl.len(), 1);
        assert_eq!(bl[0].vertices.len(), 6);
    }

    #[test]
    fn blocks_partition_edges_and_are_two_connected_or_edges() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(2..10);
            let mut g = Graph::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.3) {
                        g.add_edge(i, j).unwrap();
                    }
                }
            }
            let bl = blocks(&g);
            let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for b in &bl {
                for (x, y) in b.graph.edges() {
                    let (a, c) = (b.vertices[x], b.vertices[y]);
                    *count.entry((a.min(c), a.max(c))).or_default() += 1;
                }
                assert!(b.graph.edge_count() == 1 || is_two_connected(&b.graph));
            }
            assert_eq!(count.len(), g.edge_count());
            assert!(count.values().all(|&c| c == 1));
        }
    }

    #[test]
    fn topo_core_examples() {
        let c7 = catalog_cycle(7).unwrap();
        let core = topo_core(&c7).unwrap();
        assert!(core.branch_vertices.is_empty());
        assert_eq!(core.paths.len(), 1);
        assert_eq!(core.paths[0].len(), 8);

        let dr6 = catalog_drn(6).unwrap();
        let core = topo_core(&dr6).unwrap();
        assert_eq!(core.branch_vertices.len(), 4);
        let lens: Vec<usize> = {
            let mut l: Vec<usize> = core.core_edges().iter().map(|&(_, _, l)| l).collect();
            l.sort_unstable();
            l
        };
        assert_eq!(lens, vec![1, 1, 1, 1, 1, 3]);

        let k24 = catalog_k2n(4).unwrap();
        let core = topo_core(&k24).unwrap();
        assert_eq!(core.branch_vertices.len(), 2);
        assert_eq!(core.paths.len(), 4);
        assert!(core.core_edges().iter().all(|&(_, _, l)| l == 2));
    }

    #[test]
    fn topo_core_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            // random 2-connected-ish graph: cycle plus chords
            let n = rng.gen_range(3..9);
            let mut g = catalog_cycle(n).unwrap();
            for i in 0..n {
                for j in (i + 2)..n {
                    if rng.gen_bool(0.2) {
                        g.add_edge(i, j).unwrap();
                    }
                }
            }
            let core = topo_core(&g).unwrap();
            assert_eq!(core.expand(g.n()), g);
        }
    }

    #[test]
    fn recognize_examples() {
        assert_eq!(
            recognize_block(&Graph::from_edges(2, &[(0, 1)]).unwrap()).unwrap(),
            BlockClass::Edge
        );
        assert_eq!(
            recognize_block(&catalog_cycle(3).unwrap()).unwrap(),
            BlockClass::Cycle { len: 3 }
        );
        assert_eq!(
            recognize_block(&catalog_tn(5).unwrap()).unwrap(),
            BlockClass::TnExact { k: 5 }
        );
        assert_eq!(
            recognize_block(&catalog_tn(4).unwrap()).unwrap(),
            BlockClass::TnExact { k: 4 }
        );
        assert_eq!(
            recognize_block(&catalog_k2n(3).unwrap()).unwrap(),
            BlockClass::K2n { m: 3 }
        );
        assert_eq!(
            recognize_block(&catalog_drn(5).unwrap()).unwrap(),
            BlockClass::Drn { k: 5 }
        );
        assert_eq!(recognize_block(&catalog_complete(4)).unwrap(), BlockClass::K4Exact);

        // K_{3,3} minus an edge: a K4 with three subdivided edges
        let mut k33 = Graph::new(6);
        for i in [0usize, 1, 2] {
            for j in [3usize, 4, 5] {
                k33.add_edge(i, j).unwrap();
            }
        }
        k33.remove_edge(2, 5);
        assert_eq!(recognize_block(&k33).unwrap(), BlockClass::K4Subdivided2to5);

        // theta graph: diamond subdivision
        let theta = Graph::from_edges(5, &[(0, 1), (0, 2), (2, 1), (0, 3), (3, 4), (4, 1)]).unwrap();
        assert_eq!(recognize_block(&theta).unwrap(), BlockClass::DiamondSubdivision);

        // T5 with its base edge subdivided: proper Tn subdivision
        let t5sub = subdivide_edge(&catalog_tn(5).unwrap(), (0, 1), 1).unwrap();
        assert_eq!(
            recognize_block(&t5sub).unwrap(),
            BlockClass::TnSubdivisionProper { k: 5 }
        );

        assert_eq!(recognize_block(&catalog_f5()).unwrap(), BlockClass::Other);
        assert_eq!(recognize_block(&catalog_cd6()).unwrap(), BlockClass::Other);
    }

    #[test]
    fn tn3_is_triangle() {
        assert!(is_isomorphic(&catalog_tn(3).unwrap(), &catalog_cycle(3).unwrap()));
    }

    #[test]
    fn dr5_matches_subdivided_k4() {
        let by_subdivision = subdivide_edge(&catalog_complete(4), (0, 1), 1).unwrap();
        assert!(is_isomorphic(&by_subdivision, &catalog_drn(5).unwrap()));
    }

    #[test]
    fn contains_subdivision_examples() {
        let f5 = catalog_f5();
        let emb = contains_subdivision(&f5, &f5).unwrap().expect("identity embedding");
        assert!(emb.verify(&f5, &f5));
        assert!(emb.paths.iter().all(|(_, p)| p.len() == 2));

        let c6 = catalog_cycle(6).unwrap();
        assert!(contains_subdivision(&c6, &f5).unwrap().is_none());

        let mut k33 = Graph::new(6);
        for i in [0usize, 1, 2] {
            for j in [3usize, 4, 5] {
                k33.add_edge(i, j).unwrap();
            }
        }
        k33.remove_edge(2, 5);
        let hit = contains_k4_two_to_five_subdivided(&k33).unwrap().expect("K4 pattern");
        assert!(hit.verify(&k33, &catalog_complete(4)));
        assert!((2..=5).contains(&hit.subdivided_path_count()));

        // K4 itself has zero subdivided paths, so the 2-to-5 query must fail.
        assert!(contains_k4_two_to_five_subdivided(&catalog_complete(4)).unwrap().is_none());
        // DR5 has exactly one subdivided path.
        assert!(contains_k4_two_to_five_subdivided(&catalog_drn(5).unwrap()).unwrap().is_none());
    }

    #[test]
    fn derive_graphs_on_f5_witness() {
        let a = crate::classifier::f5_witness_matrix();
        let (g, _gs, gm, _gp, gm1) = derive_graphs(&a, 1e-12);
        assert!(is_isomorphic(&g, &catalog_f5()));
        assert_eq!(g, catalog_f5());
        let path: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        assert_eq!(gm.edges().collect::<Vec<_>>(), path);
        assert_eq!(gm1.edges().collect::<Vec<_>>(), path);

        let i5 = SymMatrix::identity(5);
        let (g, _, gm, gp, gm1) = derive_graphs(&i5, 1e-12);
        assert_eq!(g.edge_count() + gm.edge_count() + gp.edge_count() + gm1.edge_count(), 0);
    }

    #[test]
    fn negative_structure_examples() {
        // all-negative triangle
        let mut gs = SignedGraph::new(3);
        gs.add_edge(0, 1, Sign::Minus).unwrap();
        gs.add_edge(1, 2, Sign::Minus).unwrap();
        gs.add_edge(0, 2, Sign::Minus).unwrap();
        let (neg, pos, comps) = negative_structure(&gs);
        assert_eq!(neg.edge_count(), 3);
        assert_eq!(pos.edge_count(), 0);
        assert_eq!(comps.len(), 1);
        assert!(comps[0].1);

        // all-positive graph: n singleton components
        let mut gs = SignedGraph::new(4);
        gs.add_edge(0, 1, Sign::Plus).unwrap();
        gs.add_edge(2, 3, Sign::Plus).unwrap();
        let (_, _, comps) = negative_structure(&gs);
        assert_eq!(comps.len(), 4);

        // signed F5 from the witness matrix: negative path, not induced-only
        let a = crate::classifier::f5_witness_matrix();
        let (_, gs, _, _, _) = derive_graphs(&a, 1e-12);
        let (_, _, comps) = negative_structure(&gs);
        assert_eq!(comps.len(), 1);
        assert!(!comps[0].1, "a_13 > 0 lies inside the negative component span");
    }

    #[test]
    fn completeness_against_core_matching_bruteforce() {
        // On hosts small enough, the backtracking search must agree with a
        // brute-force subgraph enumeration tested by multigraph core matching.
        use rand::{Rng, SeedableRng};
        let f5 = catalog_f5();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut hosts: Vec<Graph> = vec![
            catalog_f5(),
            catalog_cycle(6).unwrap(),
            catalog_tn(6).unwrap(),
            catalog_drn(6).unwrap(),
            subdivide_edge(&catalog_f5(), (0, 1), 1).unwrap(),
        ];
        for _ in 0..12 {
            let n = rng.gen_range(5..7);
            let mut g = Graph::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(i, j).unwrap();
                    }
                }
            }
            hosts.push(g);
        }
        for host in &hosts {
            let fast = contains_subdivision(host, &f5).unwrap().is_some();
            let slow = bruteforce_contains_subdivision(host, &f5);
            assert_eq!(fast, slow, "disagreement on host {host:?}");
        }
    }

    /// Brute force: a subgraph S of G is a subdivision of H iff the multigraph
    /// core of S is isomorphic to the multigraph core of H.
    fn bruteforce_contains_subdivision(g: &Graph, h: &Graph) -> bool {
        let h_core = multigraph_core_labels(h);
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let m = edges.len();
        assert!(m <= 16, "brute force capped");
        for mask in 1u32..(1 << m) {
            let mut s = Graph::new(g.n());
            for (k, &(a, b)) in edges.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    s.add_edge(a, b).unwrap();
                }
            }
            let verts: Vec<usize> = (0..s.n()).filter(|&v| s.degree(v) > 0).collect();
            if verts.is_empty() {
                continue;
            }
            let sub = s.induced(&verts);
            if !sub.is_connected() || sub.edge_count() == 0 {
                continue;
            }
            if topo_core(&sub).is_err() {
                continue;
            }
            if multigraph_core_isomorphic(&multigraph_core_labels(&sub), &h_core) {
                return true;
            }
        }
        false
    }

    /// Multigraph core as (#branch vertices, sorted multiset of branch-pair
    /// multiplicities by canonical relabeling). Only valid for tiny cores.
    fn multigraph_core_labels(g: &Graph) -> (usize, Vec<Vec<usize>>) {
        let core = topo_core(g).unwrap();
        let branch = &core.branch_vertices;
        let k = branch.len();
        let mut mult = vec![vec![0usize; k]; k];
        let index: BTreeMap<usize, usize> = branch.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for p in &core.paths {
            let a = index[&p[0]];
            let b = index[p.last().unwrap()];
            mult[a][b] += 1;
            if a != b {
                mult[b][a] += 1;
            }
        }
        (k, mult)
    }

    fn multigraph_core_isomorphic(a: &(usize, Vec<Vec<usize>>), b: &(usize, Vec<Vec<usize>>)) -> bool {
        if a.0 != b.0 {
            return false;
        }
        let k = a.0;
        if k == 0 {
            return true;
        }
        let idx: Vec<usize> = (0..k).collect();
        permutations(&idx).into_iter().any(|perm| {
            (0..k).all(|i| (0..k).all(|j| a.1[i][j] == b.1[perm[i]][perm[j]]))
        })
    }

    fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for (k, &x) in items.iter().enumerate() {
            let rest: Vec<usize> = items.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, &y)| y).collect();
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
}
