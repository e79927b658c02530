//! Labeled directed graphs and the subset arithmetic used all over the
//! crate: membership, determinization, synchronization and isolation checks
//! all reduce to stepping sets of states through labels.

use std::collections::BTreeSet;
use std::fmt;

use crate::alphabet::{Alphabet, SymbolId};

/// A set of graph states, packed into 64-bit blocks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    blocks: Vec<u64>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet {
            blocks: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for q in 0..n {
            s.insert(q);
        }
        s
    }

    pub fn single(n: usize, q: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(q);
        s
    }

    pub fn insert(&mut self, q: usize) {
        self.blocks[q / 64] |= 1 << (q % 64);
    }

    pub fn contains(&self, q: usize) -> bool {
        self.blocks
            .get(q / 64)
            .is_some_and(|b| b & (1 << (q % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &b)| {
            (0..64).filter(move |j| b & (1 << j) != 0).map(move |j| i * 64 + j)
        })
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .any(|(a, b)| a & b != 0)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        StateSet {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite directed graph with alphabet-labeled edges.
#[derive(Clone)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    names: Vec<String>,
    adj: Vec<Vec<(SymbolId, usize)>>,
}

impl LabeledGraph {
    pub fn new(alphabet: Alphabet) -> Self {
        LabeledGraph {
            alphabet,
            names: Vec::new(),
            adj: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.adj.push(Vec::new());
        self.names.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, label: SymbolId, to: usize) {
        debug_assert!(label < self.alphabet.len());
        if !self.adj[from].contains(&(label, to)) {
            self.adj[from].push((label, to));
            self.adj[from].sort_unstable();
        }
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn find_state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges_from(&self, q: usize) -> &[(SymbolId, usize)] {
        &self.adj[q]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, SymbolId, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(q, es)| es.iter().map(move |&(a, r)| (q, a, r)))
    }

    pub fn out_labels(&self, q: usize) -> BTreeSet<SymbolId> {
        self.adj[q].iter().map(|&(a, _)| a).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.adj.iter().all(|es| {
            es.windows(2).all(|w| w[0].0 != w[1].0) // adj is sorted by label
        })
    }

    /// All states reachable from `set` by one edge labeled `a`.
    pub fn step(&self, set: &StateSet, a: SymbolId) -> StateSet {
        let mut out = StateSet::empty(self.state_count());
        for q in set.iter() {
            for &(l, r) in &self.adj[q] {
                if l == a {
                    out.insert(r);
                }
            }
        }
        out
    }

    pub fn step_word(&self, set: &StateSet, w: &[SymbolId]) -> StateSet {
        let mut cur = set.clone();
        for &a in w {
            if cur.is_empty() {
                break;
            }
            cur = self.step(&cur, a);
        }
        cur
    }

    /// For each state, the set reachable by a path labeled `w`.
    pub fn word_relation(&self, w: &[SymbolId]) -> Vec<StateSet> {
        (0..self.state_count())
            .map(|q| self.step_word(&StateSet::single(self.state_count(), q), w))
            .collect()
    }

    /// Whether some cycle spells a power of `w` (equivalently, the periodic
    /// sequence `...www...` labels a bi-infinite walk).
    pub fn has_cycle_spelling(&self, w: &[SymbolId]) -> bool {
        let rel = self.word_relation(w);
        // transitive closure of the w-step relation, then look for a loop
        let n = self.state_count();
        let mut reach = rel.clone();
        loop {
            let mut changed = false;
            for q in 0..n {
                let mut acc = reach[q].clone();
                for r in reach[q].iter() {
                    acc.union_with(&reach[r]);
                }
                if acc != reach[q] {
                    reach[q] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).any(|q| reach[q].contains(q))
    }

    pub fn reversed(&self) -> LabeledGraph {
        let mut g = LabeledGraph::new(self.alphabet.clone());
        for name in &self.names {
            g.add_state(name.clone());
        }
        for (q, a, r) in self.edges() {
            g.add_edge(r, a, q);
        }
        g
    }

    /// Strongly connected components, in reverse topological order.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        // iterative Tarjan
        let n = self.state_count();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut result = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut work: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&mut (q, ref mut ei)) = work.last_mut() {
                if *ei == 0 {
                    index[q] = counter;
                    low[q] = counter;
                    counter += 1;
                    stack.push(q);
                    on_stack[q] = true;
                }
                if *ei < self.adj[q].len() {
                    let (_, r) = self.adj[q][*ei];
                    *ei += 1;
                    if index[r] == usize::MAX {
                        work.push((r, 0));
                    } else if on_stack[r] {
                        low[q] = low[q].min(index[r]);
                    }
                } else {
                    work.pop();
                    if let Some(&(parent, _)) = work.last() {
                        low[parent] = low[parent].min(low[q]);
                    }
                    if low[q] == index[q] {
                        let mut comp = Vec::new();
                        while let Some(r) = stack.pop() {
                            on_stack[r] = false;
                            comp.push(r);
                            if r == q {
                                break;
                            }
                        }
                        result.push(comp);
                    }
                }
            }
        }
        result
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.state_count() > 0 && self.sccs().len() == 1
    }

    /// States lying on some cycle.
    pub fn cyclic_states(&self) -> StateSet {
        let n = self.state_count();
        let mut cyc = StateSet::empty(n);
        for comp in self.sccs() {
            if comp.len() > 1 {
                for &q in &comp {
                    cyc.insert(q);
                }
            } else {
                let q = comp[0];
                if self.adj[q].iter().any(|&(_, r)| r == q) {
                    cyc.insert(q);
                }
            }
        }
        cyc
    }

    /// Restricts to states on bi-infinite paths (reachable from a cycle and
    /// reaching a cycle). Returns the trimmed graph and the old-to-new state
    /// mapping.
    pub fn trimmed(&self) -> (LabeledGraph, Vec<Option<usize>>) {
        let n = self.state_count();
        let cyc = self.cyclic_states();
        let forward = self.reachable_from(&cyc);
        let backward = self.reversed().reachable_from(&cyc);
        let keep = forward.intersection(&backward);
        let mut map = vec![None; n];
        let mut g = LabeledGraph::new(self.alphabet.clone());
        for q in keep.iter() {
            map[q] = Some(g.add_state(self.names[q].clone()));
        }
        for (q, a, r) in self.edges() {
            if let (Some(nq), Some(nr)) = (map[q], map[r]) {
                g.add_edge(nq, a, nr);
            }
        }
        (g, map)
    }

    fn reachable_from(&self, start: &StateSet) -> StateSet {
        let mut seen = start.clone();
        let mut frontier: Vec<usize> = start.iter().collect();
        while let Some(q) = frontier.pop() {
            for &(_, r) in &self.adj[q] {
                if !seen.contains(r) {
                    seen.insert(r);
                    frontier.push(r);
                }
            }
        }
        seen
    }

    /// Gcd of cycle lengths within the component of `root` (which must be a
    /// strongly connected set of states); 0 when the component has no cycle.
    pub fn cycle_length_gcd(&self, component: &[usize]) -> usize {
        let n = self.state_count();
        let mut in_comp = StateSet::empty(n);
        for &q in component {
            in_comp.insert(q);
        }
        let root = component[0];
        let mut level = vec![i64::MIN; n];
        level[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(q) = queue.pop_front() {
            for &(_, r) in &self.adj[q] {
                if in_comp.contains(r) && level[r] == i64::MIN {
                    level[r] = level[q] + 1;
                    queue.push_back(r);
                }
            }
        }
        let mut g: i64 = 0;
        for &q in component {
            for &(_, r) in &self.adj[q] {
                if in_comp.contains(r) {
                    g = gcd(g, (level[q] + 1 - level[r]).abs());
                }
            }
        }
        g as usize
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph over {} with {} states:", self.alphabet, self.state_count())?;
        for (q, a, r) in self.edges() {
            writeln!(
                f,
                "  {} -{}-> {}",
                self.names[q],
                self.alphabet.symbol(a),
                self.names[r]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_graph() -> LabeledGraph {
        // states: last symbol seen; "11" impossible
        let mut g = LabeledGraph::new(Alphabet::digits(2));
        let a = g.add_state("0");
        let b = g.add_state("1");
        g.add_edge(a, 0, a);
        g.add_edge(a, 1, b);
        g.add_edge(b, 0, a);
        g
    }

    #[test]
    fn state_set_ops() {
        let mut s = StateSet::empty(70);
        s.insert(3);
        s.insert(69);
        assert!(s.contains(3) && s.contains(69) && !s.contains(4));
        assert_eq!(s.count(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 69]);
        let f = StateSet::full(70);
        assert_eq!(f.count(), 70);
        assert!(f.intersects(&s));
        assert_eq!(f.intersection(&s), s);
    }

    #[test]
    fn stepping_and_words() {
        let g = golden_graph();
        let all = StateSet::full(2);
        assert_eq!(g.step(&all, 1).iter().collect::<Vec<_>>(), vec![1]);
        assert!(g.step_word(&all, &[1, 1]).is_empty());
        assert!(!g.step_word(&all, &[1, 0, 1]).is_empty());
    }

    #[test]
    fn cycle_spelling() {
        let g = golden_graph();
        assert!(g.has_cycle_spelling(&[0]));
        assert!(g.has_cycle_spelling(&[0, 1]));
        assert!(!g.has_cycle_spelling(&[1]));
    }

    #[test]
    fn sccs_and_trim() {
        let mut g = LabeledGraph::new(Alphabet::digits(2));
        let a = g.add_state("a");
        let b = g.add_state("b");
        let dead = g.add_state("dead");
        g.add_edge(a, 0, b);
        g.add_edge(b, 1, a);
        g.add_edge(a, 1, dead); // no way back, no cycle at dead
        assert_eq!(g.sccs().len(), 2);
        let (t, map) = g.trimmed();
        assert_eq!(t.state_count(), 2);
        assert!(map[dead].is_none());
        assert!(t.is_strongly_connected());
    }

    #[test]
    fn mixing_gcd() {
        let g = golden_graph();
        let comp: Vec<usize> = vec![0, 1];
        assert_eq!(g.cycle_length_gcd(&comp), 1); // cycles of length 1 and 2

        let mut two = LabeledGraph::new(Alphabet::digits(2));
        let a = two.add_state("a");
        let b = two.add_state("b");
        two.add_edge(a, 0, b);
        two.add_edge(b, 1, a);
        assert_eq!(two.cycle_length_gcd(&[a, b]), 2);
    }
}
