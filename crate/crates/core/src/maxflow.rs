//! s-t networks for capacity forms, solved by shortest augmenting paths.
//!
//! Cut convention: a variable node on the sink side takes value 1. A cost
//! paid when `x_i = 1` is an arc `s → i`, a cost paid when `x_i = 0` is an arc
//! `i → t`, and a cost paid when `x_u = 1, x_v = 0` is an arc `v → u`.

use std::collections::VecDeque;

use crate::error::Result;
use crate::pbf::{to_capacity_form, CapacityForm, QuadraticPoly, SubsetMask, MAX_VARS};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: Rational,
}

/// Nodes `0..n_vars` are variables, followed by the source and the sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    pub n_vars: usize,
    pub arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(n_vars: usize) -> Self {
        FlowNetwork {
            n_vars,
            arcs: Vec::new(),
        }
    }

    pub fn source(&self) -> usize {
        self.n_vars
    }

    pub fn sink(&self) -> usize {
        self.n_vars + 1
    }

    pub fn n_nodes(&self) -> usize {
        self.n_vars + 2
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: Rational) {
        assert!(!cap.is_negative(), "negative capacity");
        assert!(from < self.n_nodes() && to < self.n_nodes() && from != to);
        self.arcs.push(Arc { from, to, cap });
    }

    /// Total capacity of arcs leaving the given source side.
    pub fn cut_capacity(&self, source_side: &[bool]) -> Rational {
        self.arcs
            .iter()
            .filter(|a| source_side[a.from] && !source_side[a.to])
            .map(|a| &a.cap)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub flow_value: Rational,
    /// Membership of every node (variables, source, sink) in the source side.
    pub source_side: Vec<bool>,
    /// Variable values: `true` on the sink side.
    pub labeling: Vec<bool>,
    /// Amount pushed by each augmenting path, in order.
    pub augmentations: Vec<Rational>,
}

impl CutResult {
    pub fn labeling_mask(&self) -> Option<SubsetMask> {
        (self.labeling.len() <= MAX_VARS).then(|| {
            SubsetMask::from_indices(
                self.labeling
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| **b)
                    .map(|(i, _)| i),
            )
        })
    }
}

pub fn build_network(c: &CapacityForm) -> FlowNetwork {
    let mut net = FlowNetwork::new(c.n_nodes());
    let (s, t) = (net.source(), net.sink());
    for i in 0..c.n_nodes() {
        if !c.sink_cap(i).is_zero() {
            net.add_arc(s, i, c.sink_cap(i).clone());
        }
        if !c.src_cap(i).is_zero() {
            net.add_arc(i, t, c.src_cap(i).clone());
        }
    }
    for ((u, v), cap) in c.pair_caps() {
        if !cap.is_zero() {
            net.add_arc(v, u, cap.clone());
        }
    }
    net
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<Rational>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(net: &FlowNetwork) -> Self {
        let mut r = Residual {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); net.n_nodes()],
        };
        for a in &net.arcs {
            if a.cap.is_zero() {
                continue;
            }
            r.adj[a.from].push(r.head.len());
            r.head.push(a.to);
            r.cap.push(a.cap.clone());
            r.adj[a.to].push(r.head.len());
            r.head.push(a.from);
            r.cap.push(Rational::zero());
        }
        r
    }

    /// Shortest augmenting path as a list of residual edge ids.
    fn bfs_path(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut via = vec![usize::MAX; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if !seen[v] && self.cap[e].is_positive() {
                    seen[v] = true;
                    via[v] = e;
                    if v == t {
                        let mut path = Vec::new();
                        let mut w = t;
                        while w != s {
                            let e = via[w];
                            path.push(e);
                            w = self.head[e ^ 1];
                        }
                        return Some(path);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Nodes that can still reach `t` through positive residual edges.
    fn reaches(&self, t: usize) -> Vec<bool> {
        let mut can = vec![false; self.adj.len()];
        can[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                // `e` leaves v; its twin `e ^ 1` enters v from head[e].
                let u = self.head[e];
                if !can[u] && self.cap[e ^ 1].is_positive() {
                    can[u] = true;
                    queue.push_back(u);
                }
            }
        }
        can
    }
}

/// Maximum flow and the minimum cut with the largest source side, which
/// puts the fewest variables at 1.
pub fn max_flow(net: &FlowNetwork) -> CutResult {
    let (s, t) = (net.source(), net.sink());
    let mut r = Residual::new(net);
    let mut flow = Rational::zero();
    let mut augmentations = Vec::new();
    while let Some(path) = r.bfs_path(s, t) {
        let push = path
            .iter()
            .map(|&e| &r.cap[e])
            .min()
            .expect("non-empty path")
            .clone();
        for &e in &path {
            r.cap[e] -= &push;
            r.cap[e ^ 1] += &push;
        }
        flow += &push;
        augmentations.push(push);
    }
    let reaches_t = r.reaches(t);
    let source_side: Vec<bool> = reaches_t.iter().map(|b| !b).collect();
    let labeling = reaches_t[..net.n_vars].to_vec();
    CutResult {
        flow_value: flow,
        source_side,
        labeling,
        augmentations,
    }
}

/// Minimum of a capacity form and a minimizing labeling.
pub fn minimize_capacity_form(c: &CapacityForm) -> (Rational, Vec<bool>) {
    let cut = max_flow(&build_network(c));
    (&c.c_empty + &cut.flow_value, cut.labeling)
}

/// Minimum of a submodular quadratic over all variables jointly.
pub fn minimize_quadratic(h: &QuadraticPoly) -> Result<(Rational, SubsetMask)> {
    let c = to_capacity_form(h)?;
    let (v, lab) = minimize_capacity_form(&c);
    if lab.len() > MAX_VARS {
        return Err(crate::error::Error::TooManyVariables {
            what: "a labeling mask",
            n: lab.len(),
            cap: MAX_VARS,
        });
    }
    let mask =
        SubsetMask::from_indices(lab.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i));
    Ok((v, mask))
}

/// `min_z h(x, z)` for a fixed labeling of the original block, by a cut over
/// the auxiliary block only. Works for any number of auxiliaries.
pub fn min_over_aux(h: &QuadraticPoly, x: &[bool]) -> Result<(Rational, Vec<bool>)> {
    let k = h.n_x();
    assert_eq!(x.len(), k, "labeling must cover the original block");
    let m = h.n_aux();
    let mut q = QuadraticPoly::zero(0, m);
    let mut constant = h.constant().clone();
    for (i, &xi) in x.iter().enumerate() {
        if xi {
            constant += h.linear(i);
        }
    }
    for a in 0..m {
        q.add_linear(a, h.linear(k + a));
    }
    for ((i, j), c) in h.pairs() {
        match (i < k, j < k) {
            (true, true) => {
                if x[i] && x[j] {
                    constant += c;
                }
            }
            (true, false) => {
                if x[i] {
                    q.add_linear(j - k, c);
                }
            }
            (false, false) => q.add_pair(i - k, j - k, c),
            (false, true) => unreachable!("pairs are stored with i < j"),
        }
    }
    q.add_constant(&constant);
    let c = to_capacity_form(&q)?;
    Ok(minimize_capacity_form(&c))
}
