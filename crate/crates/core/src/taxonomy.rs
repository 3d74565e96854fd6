//! Class hierarchy parsing, validation, and structural queries.
//!
//! A [`Taxonomy`] is a rooted hierarchy over named nodes. The root is
//! bookkept separately and is *not* one of the indexed nodes: the `N`
//! indexed nodes are the leaves (indices `0..n`, sorted lexicographically)
//! followed by the internal non-root nodes (indices `n..N`, also sorted).
//! Keeping the root virtual makes leaf-only views a prefix slice and keeps
//! node counts aligned with how dataset taxonomies are usually reported.

use std::collections::{HashMap, HashSet};
use std::fmt;

use ndarray::{Array1, ArrayView1};
use thiserror::Error;

/// Hard cap on enumerated leaf-to-root paths in DAG mode.
pub const PATH_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("empty hierarchy: no edges found")]
    Empty,
    #[error("malformed line {line}: expected `parent<TAB>child`, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("duplicate edge {parent:?} -> {child:?}")]
    DuplicateEdge { parent: String, child: String },
    #[error("no root: every node has a parent (the edge set contains a cycle)")]
    NoRoot,
    #[error("multiple roots: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("cycle detected involving {0:?}")]
    Cycle(Vec<String>),
    #[error("orphan nodes unreachable from root {root:?}: {nodes:?}")]
    Orphans { root: String, nodes: Vec<String> },
    #[error("node {node:?} has {count} parents; tree mode allows exactly one")]
    MultipleParents { node: String, count: usize },
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("node {0:?} is not a leaf")]
    NotALeaf(String),
    #[error("operation requires a tree; taxonomy was built in DAG mode")]
    TreeRequired,
    #[error("leaf {leaf:?} has more than {cap} root paths; enumeration aborted")]
    PathCapExceeded { leaf: String, cap: usize },
}

/// Whether multi-parent nodes are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Tree,
    Dag,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Tree => write!(f, "tree"),
            Mode::Dag => write!(f, "dag"),
        }
    }
}

/// One leaf-to-root path: the indexed nodes `b_0..b_{k-1}` starting at the
/// leaf; the virtual root is the implicit terminal element `b_k`.
/// `parent_counts[j]` is the number of parents of `b_j` (the root counts as
/// a parent), which drives the mass-splitting factors in DAG smoothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncestralPath {
    pub nodes: Vec<usize>,
    pub parent_counts: Vec<usize>,
}

impl AncestralPath {
    /// Number of edges to the root (`k`).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A validated, immutable class hierarchy.
pub struct Taxonomy {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    root: String,
    n_leaves: usize,
    mode: Mode,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    root_child: Vec<bool>,
    levels: Vec<usize>,
}

impl Taxonomy {
    /// Parse a tab-separated `parent<TAB>child` edge list.
    ///
    /// Lines that are empty or start with `#` are ignored. The root is
    /// inferred as the unique node that never appears as a child. Node
    /// ordering is deterministic: leaves sorted lexicographically first,
    /// then internal nodes sorted lexicographically.
    pub fn parse(source: &str, mode: Mode) -> Result<Self, TaxonomyError> {
        let mut edges: Vec<(String, String)> = Vec::new();
        let mut seen: HashSet<(String, String)> = HashSet::new();
        for (lineno, raw) in source.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (parent, child) = line.split_once('\t').ok_or(TaxonomyError::MalformedLine {
                line: lineno + 1,
                content: line.to_string(),
            })?;
            let parent = parent.trim();
            let child = child.trim();
            if parent.is_empty() || child.is_empty() || child.contains('\t') {
                return Err(TaxonomyError::MalformedLine {
                    line: lineno + 1,
                    content: line.to_string(),
                });
            }
            let key = (parent.to_string(), child.to_string());
            if !seen.insert(key.clone()) {
                return Err(TaxonomyError::DuplicateEdge {
                    parent: key.0,
                    child: key.1,
                });
            }
            edges.push(key);
        }
        if edges.is_empty() {
            return Err(TaxonomyError::Empty);
        }
        Self::from_edges(&edges, mode)
    }

    fn from_edges(edges: &[(String, String)], mode: Mode) -> Result<Self, TaxonomyError> {
        let mut names: Vec<String> = Vec::new();
        let mut name_ix: HashMap<String, usize> = HashMap::new();
        let mut intern = |name: &str, names: &mut Vec<String>, ix: &mut HashMap<String, usize>| {
            *ix.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };

        let mut adj_children: Vec<Vec<usize>> = Vec::new();
        let mut adj_parents: Vec<Vec<usize>> = Vec::new();
        for (p, c) in edges {
            if p == c {
                return Err(TaxonomyError::Cycle(vec![p.clone()]));
            }
            let pi = intern(p, &mut names, &mut name_ix);
            let ci = intern(c, &mut names, &mut name_ix);
            let len = names.len();
            adj_children.resize(len, Vec::new());
            adj_parents.resize(len, Vec::new());
            adj_children[pi].push(ci);
            adj_parents[ci].push(pi);
        }
        let total = names.len();
        adj_children.resize(total, Vec::new());
        adj_parents.resize(total, Vec::new());

        // Root inference: the unique node that never appears as a child.
        let mut roots: Vec<usize> = (0..total).filter(|&v| adj_parents[v].is_empty()).collect();
        if roots.is_empty() {
            return Err(TaxonomyError::NoRoot);
        }
        if roots.len() > 1 {
            let mut ids: Vec<String> = roots.drain(..).map(|v| names[v].clone()).collect();
            ids.sort();
            return Err(TaxonomyError::MultipleRoots(ids));
        }
        let root = roots[0];

        // Cycle check over the whole edge set (Kahn's algorithm); whatever
        // cannot be topologically ordered sits on or below a cycle.
        let mut indeg: Vec<usize> = adj_parents.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..total).filter(|&v| indeg[v] == 0).collect();
        let mut ordered = 0usize;
        while let Some(v) = queue.pop() {
            ordered += 1;
            for &c in &adj_children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if ordered != total {
            let mut cyclic: Vec<String> = (0..total)
                .filter(|&v| indeg[v] > 0)
                .map(|v| names[v].clone())
                .collect();
            cyclic.sort();
            return Err(TaxonomyError::Cycle(cyclic));
        }

        // Reachability from the root; acyclic unreachable nodes are orphans.
        let mut reached = vec![false; total];
        let mut stack = vec![root];
        reached[root] = true;
        while let Some(v) = stack.pop() {
            for &c in &adj_children[v] {
                if !reached[c] {
                    reached[c] = true;
                    stack.push(c);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            let mut orphans: Vec<String> = (0..total)
                .filter(|&v| !reached[v])
                .map(|v| names[v].clone())
                .collect();
            orphans.sort();
            return Err(TaxonomyError::Orphans {
                root: names[root].clone(),
                nodes: orphans,
            });
        }

        if mode == Mode::Tree {
            for v in 0..total {
                if v != root && adj_parents[v].len() > 1 {
                    return Err(TaxonomyError::MultipleParents {
                        node: names[v].clone(),
                        count: adj_parents[v].len(),
                    });
                }
            }
        }

        // Final indexing: leaves first, then internal nodes, both sorted.
        let mut leaves: Vec<usize> = (0..total)
            .filter(|&v| v != root && adj_children[v].is_empty())
            .collect();
        let mut internal: Vec<usize> = (0..total)
            .filter(|&v| v != root && !adj_children[v].is_empty())
            .collect();
        leaves.sort_by(|&a, &b| names[a].cmp(&names[b]));
        internal.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let n_leaves = leaves.len();

        let mut order: Vec<usize> = leaves;
        order.extend(internal);
        let mut new_ix = vec![usize::MAX; total];
        for (new, &old) in order.iter().enumerate() {
            new_ix[old] = new;
        }

        let count = order.len();
        let mut nodes = Vec::with_capacity(count);
        let mut children = vec![Vec::new(); count];
        let mut parents = vec![Vec::new(); count];
        let mut root_child = vec![false; count];
        for (new, &old) in order.iter().enumerate() {
            nodes.push(names[old].clone());
            for &c in &adj_children[old] {
                children[new].push(new_ix[c]);
            }
            for &p in &adj_parents[old] {
                if p == root {
                    root_child[new] = true;
                } else {
                    parents[new].push(new_ix[p]);
                }
            }
            children[new].sort_unstable();
            parents[new].sort_unstable();
        }
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        // Levels: minimum distance from the root (BFS).
        let mut levels = vec![usize::MAX; count];
        let mut frontier: Vec<usize> = (0..count).filter(|&v| root_child[v]).collect();
        let mut depth = 1usize;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &v in &frontier {
                if levels[v] == usize::MAX {
                    levels[v] = depth;
                    next.extend(children[v].iter().copied());
                }
            }
            frontier = next;
            depth += 1;
        }

        Ok(Taxonomy {
            nodes,
            index,
            root: names[root].clone(),
            n_leaves,
            mode,
            children,
            parents,
            root_child,
            levels,
        })
    }

    /// Number of leaf classes (`n`).
    pub fn num_leaves(&self) -> usize {
        self.n_leaves
    }

    /// Number of indexed (non-root) nodes (`N`).
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn node_id(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn is_leaf(&self, idx: usize) -> bool {
        idx < self.n_leaves
    }

    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    /// Indexed (non-root) parents of a node.
    pub fn parents(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    /// Whether the root is a direct parent of this node.
    pub fn has_root_parent(&self, idx: usize) -> bool {
        self.root_child[idx]
    }

    /// Total parent count, including the root when applicable.
    pub fn parent_count(&self, idx: usize) -> usize {
        self.parents[idx].len() + usize::from(self.root_child[idx])
    }

    /// Depth of an indexed node below the root (root children are level 1).
    /// In DAG mode this is the minimum distance.
    pub fn level(&self, idx: usize) -> usize {
        self.levels[idx]
    }

    /// Depth of a node referenced by identifier; the root itself is level 0.
    pub fn level_of(&self, id: &str) -> Result<usize, TaxonomyError> {
        if id == self.root {
            return Ok(0);
        }
        self.index_of(id)
            .map(|i| self.levels[i])
            .ok_or_else(|| TaxonomyError::UnknownNode(id.to_string()))
    }

    /// Deepest level present among indexed nodes.
    pub fn max_depth(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// Node counts per level, for levels `1..=max_depth`.
    pub fn depth_histogram(&self) -> Vec<(usize, usize)> {
        let max = self.max_depth();
        let mut counts = vec![0usize; max + 1];
        for &l in &self.levels {
            counts[l] += 1;
        }
        (1..=max).map(|l| (l, counts[l])).collect()
    }

    /// All leaf-to-root paths for a leaf, in deterministic order.
    ///
    /// Tree mode returns exactly one path. DAG mode enumerates every simple
    /// path, erroring out above [`PATH_CAP`] paths.
    pub fn ancestral_paths(&self, leaf: usize) -> Result<Vec<AncestralPath>, TaxonomyError> {
        if !self.is_leaf(leaf) {
            return Err(TaxonomyError::NotALeaf(self.nodes[leaf].clone()));
        }
        let mut paths = Vec::new();
        let mut current = vec![leaf];
        self.extend_paths(leaf, &mut current, &mut paths)?;
        Ok(paths)
    }

    fn extend_paths(
        &self,
        leaf: usize,
        current: &mut Vec<usize>,
        paths: &mut Vec<AncestralPath>,
    ) -> Result<(), TaxonomyError> {
        let last = *current.last().expect("path never empty");
        if self.root_child[last] {
            if paths.len() >= PATH_CAP {
                return Err(TaxonomyError::PathCapExceeded {
                    leaf: self.nodes[leaf].clone(),
                    cap: PATH_CAP,
                });
            }
            paths.push(AncestralPath {
                nodes: current.clone(),
                parent_counts: current.iter().map(|&v| self.parent_count(v)).collect(),
            });
        }
        for &p in &self.parents[last] {
            current.push(p);
            self.extend_paths(leaf, current, paths)?;
            current.pop();
        }
        Ok(())
    }

    /// Height of the lowest common ancestor of two leaves above the deeper
    /// of the two, in edges. `lca_height(a, a) == 0`. Tree mode only.
    pub fn lca_height(&self, leaf_a: usize, leaf_b: usize) -> Result<usize, TaxonomyError> {
        if self.mode == Mode::Dag {
            return Err(TaxonomyError::TreeRequired);
        }
        for leaf in [leaf_a, leaf_b] {
            if !self.is_leaf(leaf) {
                return Err(TaxonomyError::NotALeaf(self.nodes[leaf].clone()));
            }
        }
        if leaf_a == leaf_b {
            return Ok(0);
        }
        let chain_a = self.root_chain(leaf_a);
        let set_a: HashSet<usize> = chain_a.iter().copied().collect();
        let mut lca_level = 0usize; // the root, if no indexed ancestor is shared
        for v in self.root_chain(leaf_b) {
            if set_a.contains(&v) {
                lca_level = self.levels[v];
                break;
            }
        }
        Ok(self.levels[leaf_a].max(self.levels[leaf_b]) - lca_level)
    }

    /// The unique chain from a node up to (excluding) the root. Tree mode.
    fn root_chain(&self, mut v: usize) -> Vec<usize> {
        let mut chain = vec![v];
        while !self.root_child[v] {
            v = self.parents[v][0];
            chain.push(v);
        }
        chain
    }

    /// Reflexive-transitive closure over the indexed nodes.
    pub fn reachability(&self) -> ReachabilityMatrix {
        ReachabilityMatrix::from_taxonomy(self)
    }
}

/// Dense boolean reflexive-transitive closure of the parent-to-child
/// adjacency: `r[i][j]` is set iff `j` is a descendant of `i` or `j == i`.
/// Rows are packed into 64-bit words.
pub struct ReachabilityMatrix {
    words: Vec<u64>,
    stride: usize,
    n_nodes: usize,
    n_leaves: usize,
}

impl ReachabilityMatrix {
    pub fn from_taxonomy(t: &Taxonomy) -> Self {
        let n = t.num_nodes();
        let stride = n.div_ceil(64);
        let mut words = vec![0u64; n * stride];
        for i in 0..n {
            words[i * stride + i / 64] |= 1 << (i % 64);
            for &c in t.children(i) {
                words[i * stride + c / 64] |= 1 << (c % 64);
            }
        }
        // Transitive closure, Floyd-Warshall over bit-packed rows.
        for k in 0..n {
            for i in 0..n {
                if words[i * stride + k / 64] >> (k % 64) & 1 == 1 && i != k {
                    for w in 0..stride {
                        let v = words[k * stride + w];
                        words[i * stride + w] |= v;
                    }
                }
            }
        }
        ReachabilityMatrix {
            words,
            stride,
            n_nodes: n,
            n_leaves: t.num_leaves(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn num_leaves(&self) -> usize {
        self.n_leaves
    }

    /// `r[i][j]`: is `j` in the subtree of `i` (including `j == i`)?
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.words[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    /// Indices of all descendants of `i`, including `i` itself.
    pub fn descendants(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for w in 0..self.stride {
            let mut bits = self.words[i * self.stride + w];
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// `R v`: subtree sums. `out[i] = sum_j r[i][j] v[j]`.
    pub fn apply(&self, v: ArrayView1<f64>) -> Array1<f64> {
        debug_assert_eq!(v.len(), self.n_nodes);
        let mut out = Array1::zeros(self.n_nodes);
        for i in 0..self.n_nodes {
            let mut acc = 0.0;
            for w in 0..self.stride {
                let mut bits = self.words[i * self.stride + w];
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    acc += v[w * 64 + b];
                    bits &= bits - 1;
                }
            }
            out[i] = acc;
        }
        out
    }

    /// `R^T v`: scatter along rows. `out[j] = sum_i r[i][j] v[i]`.
    pub fn transpose_apply(&self, v: ArrayView1<f64>) -> Array1<f64> {
        debug_assert_eq!(v.len(), self.n_nodes);
        let mut out = Array1::zeros(self.n_nodes);
        for i in 0..self.n_nodes {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for w in 0..self.stride {
                let mut bits = self.words[i * self.stride + w];
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    out[w * 64 + b] += vi;
                    bits &= bits - 1;
                }
            }
        }
        out
    }

    /// Sum of `v` over the leaf descendants of `i` only.
    pub fn leaf_mass(&self, i: usize, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for w in 0..self.stride.min(self.n_leaves.div_ceil(64)) {
            let mut bits = self.words[i * self.stride + w];
            if (w + 1) * 64 > self.n_leaves {
                let keep = self.n_leaves - w * 64;
                bits &= if keep == 64 { !0 } else { (1u64 << keep) - 1 };
            }
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                acc += v[w * 64 + b];
                bits &= bits - 1;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANIMALS: &str = "root\tDog\nroot\tCat\nDog\tHusky\nDog\tBeagle\n";

    fn animals() -> Taxonomy {
        Taxonomy::parse(ANIMALS, Mode::Tree).unwrap()
    }

    #[test]
    fn parses_animal_toy() {
        let t = animals();
        assert_eq!(t.num_leaves(), 3);
        assert_eq!(t.num_nodes(), 4);
        assert_eq!(t.root(), "root");
        // leaves-first lexicographic: Beagle, Cat, Husky, then Dog
        let ids: Vec<&str> = (0..4).map(|i| t.node_id(i)).collect();
        assert_eq!(ids, vec!["Beagle", "Cat", "Husky", "Dog"]);
        assert!(t.is_leaf(0) && t.is_leaf(2) && !t.is_leaf(3));
    }

    #[test]
    fn rejects_cycle() {
        let err = Taxonomy::parse("A\tB\nB\tA\n", Mode::Dag).unwrap_err();
        assert!(matches!(err, TaxonomyError::NoRoot | TaxonomyError::Cycle(_)));
        // cycle below a valid root
        let err = Taxonomy::parse("root\tA\nA\tB\nB\tC\nC\tB\n", Mode::Dag).unwrap_err();
        match err {
            TaxonomyError::Cycle(nodes) => assert_eq!(nodes, vec!["B", "C"]),
            other => panic!("expected cycle, got {other}"),
        }
    }

    #[test]
    fn rejects_self_loop_and_duplicates_and_empty() {
        assert!(matches!(
            Taxonomy::parse("A\tA\n", Mode::Tree),
            Err(TaxonomyError::Cycle(_))
        ));
        assert!(matches!(
            Taxonomy::parse("root\tA\nroot\tA\n", Mode::Tree),
            Err(TaxonomyError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            Taxonomy::parse("# only comments\n\n", Mode::Tree),
            Err(TaxonomyError::Empty)
        ));
        assert!(matches!(
            Taxonomy::parse("root A no tab\n", Mode::Tree),
            Err(TaxonomyError::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn rejects_multiple_roots() {
        let err = Taxonomy::parse("r1\tA\nr2\tB\n", Mode::Tree).unwrap_err();
        match err {
            TaxonomyError::MultipleRoots(ids) => assert_eq!(ids, vec!["r1", "r2"]),
            other => panic!("expected multiple roots, got {other}"),
        }
    }

    #[test]
    fn tree_mode_rejects_multi_parent() {
        let diamond = "root\tX\nroot\tY\nX\tL\nY\tL\n";
        assert!(matches!(
            Taxonomy::parse(diamond, Mode::Tree),
            Err(TaxonomyError::MultipleParents { count: 2, .. })
        ));
        assert!(Taxonomy::parse(diamond, Mode::Dag).is_ok());
    }

    #[test]
    fn cifar_fixture_counts() {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/cifar100.tsv"
        ))
        .unwrap();
        let t = Taxonomy::parse(&text, Mode::Tree).unwrap();
        assert_eq!(t.num_leaves(), 100);
        assert_eq!(t.num_nodes(), 120);
        assert_eq!(t.max_depth(), 2);
        assert_eq!(t.depth_histogram(), vec![(1, 20), (2, 100)]);
    }

    #[test]
    fn levels() {
        let t = animals();
        assert_eq!(t.level_of("root").unwrap(), 0);
        assert_eq!(t.level_of("Dog").unwrap(), 1);
        assert_eq!(t.level_of("Husky").unwrap(), 2);
        assert!(matches!(
            t.level_of("Wolf"),
            Err(TaxonomyError::UnknownNode(_))
        ));
    }

    #[test]
    fn reachability_animal_toy() {
        let t = animals();
        let r = t.reachability();
        let dog = t.index_of("Dog").unwrap();
        let husky = t.index_of("Husky").unwrap();
        let beagle = t.index_of("Beagle").unwrap();
        let cat = t.index_of("Cat").unwrap();
        assert!(r.contains(dog, husky));
        assert!(r.contains(dog, beagle));
        assert!(!r.contains(cat, husky));
        assert!(r.contains(cat, cat));
    }

    #[test]
    fn reachability_single_leaf() {
        let t = Taxonomy::parse("root\tonly\n", Mode::Tree).unwrap();
        let r = t.reachability();
        assert_eq!(r.num_nodes(), 1);
        assert!(r.contains(0, 0));
    }

    #[test]
    fn reachability_chain_transitivity() {
        let t = Taxonomy::parse("root\tA\nA\tB\nB\tC\n", Mode::Tree).unwrap();
        let r = t.reachability();
        let a = t.index_of("A").unwrap();
        let c = t.index_of("C").unwrap();
        assert!(r.contains(a, c));
        assert!(!r.contains(c, a));
    }

    #[test]
    fn paths_tree() {
        let t = animals();
        let husky = t.index_of("Husky").unwrap();
        let paths = t.ancestral_paths(husky).unwrap();
        assert_eq!(paths.len(), 1);
        let dog = t.index_of("Dog").unwrap();
        assert_eq!(paths[0].nodes, vec![husky, dog]);
        assert_eq!(paths[0].len(), 2);
        assert_eq!(paths[0].parent_counts, vec![1, 1]);

        let err = t.ancestral_paths(dog).unwrap_err();
        assert!(matches!(err, TaxonomyError::NotALeaf(ref s) if s == "Dog"));
    }

    #[test]
    fn paths_chain_depth4() {
        let t = Taxonomy::parse("root\tA\nA\tB\nB\tC\nC\tD\n", Mode::Tree).unwrap();
        let d = t.index_of("D").unwrap();
        let paths = t.ancestral_paths(d).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len(), 4);
    }

    #[test]
    fn paths_diamond_dag() {
        let t = Taxonomy::parse("root\tX\nroot\tY\nX\tL\nY\tL\n", Mode::Dag).unwrap();
        let l = t.index_of("L").unwrap();
        let paths = t.ancestral_paths(l).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert_eq!(p.len(), 2);
            assert_eq!(p.parent_counts[0], 2, "L has two parents");
            assert_eq!(p.parent_counts[1], 1);
        }
    }

    #[test]
    fn path_cap_enforced() {
        // A ladder of diamonds doubles the path count per rung: 2^14 > cap.
        let mut s = String::from("root\ta0\nroot\tb0\n");
        for i in 0..13 {
            for p in ["a", "b"] {
                for c in ["a", "b"] {
                    s.push_str(&format!("{p}{i}\t{c}{}\n", i + 1));
                }
            }
        }
        s.push_str("a13\tleaf\nb13\tleaf\n");
        let t = Taxonomy::parse(&s, Mode::Dag).unwrap();
        let leaf = t.index_of("leaf").unwrap();
        assert!(matches!(
            t.ancestral_paths(leaf),
            Err(TaxonomyError::PathCapExceeded { .. })
        ));
    }

    #[test]
    fn lca_heights() {
        let t = animals();
        let husky = t.index_of("Husky").unwrap();
        let beagle = t.index_of("Beagle").unwrap();
        let cat = t.index_of("Cat").unwrap();
        assert_eq!(t.lca_height(husky, beagle).unwrap(), 1);
        assert_eq!(t.lca_height(husky, cat).unwrap(), 2);
        assert_eq!(t.lca_height(cat, husky).unwrap(), 2);
        assert_eq!(t.lca_height(husky, husky).unwrap(), 0);
    }

    #[test]
    fn lca_rejects_dag() {
        let t = Taxonomy::parse("root\tX\nroot\tY\nX\tL\nY\tL\n", Mode::Dag).unwrap();
        let l = t.index_of("L").unwrap();
        assert!(matches!(
            t.lca_height(l, l),
            Err(TaxonomyError::TreeRequired)
        ));
    }

    #[test]
    fn leaf_mass_sums_leaf_prefix_only() {
        let t = animals();
        let r = t.reachability();
        let dog = t.index_of("Dog").unwrap();
        // values: Beagle .1, Cat .2, Husky .3, Dog 99 (ignored: not a leaf)
        let v = [0.1, 0.2, 0.3, 99.0];
        assert!((r.leaf_mass(dog, &v) - 0.4).abs() < 1e-15);
        assert!((r.leaf_mass(t.index_of("Cat").unwrap(), &v) - 0.2).abs() < 1e-15);
    }
}
