// SPDX-License-Identifier: Apache-2.0

//! k×m cuts: disjoint subcircuits with at most `k` boundary inputs and `m`
//! boundary outputs, plus extraction and substitution of single blocks.
//!
//! Clusters are numbered in topological rank: every net crossing between
//! clusters flows from a lower id to a higher one, which keeps the quotient
//! graph acyclic through both the greedy pass and the refinement moves.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{Driver, GateKind, NetId, Netlist, NetlistBuilder};

/// A block of the parent netlist. Member nodes are named by the nets they
/// drive, so a subcircuit can be checked against any netlist that keeps
/// those names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subcircuit {
    pub id: usize,
    pub nodes: Vec<String>,
    pub inputs: Vec<String>,
    /// Ordered most significant first: by the earliest primary output each
    /// net reaches, then by depth.
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub k: usize,
    pub m: usize,
    pub subcircuits: Vec<Subcircuit>,
    /// Parent node index to subcircuit id.
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcircuitSummary {
    pub id: usize,
    pub node_count: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.subcircuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subcircuits.is_empty()
    }

    pub fn report(&self) -> Vec<SubcircuitSummary> {
        self.subcircuits
            .iter()
            .map(|s| SubcircuitSummary {
                id: s.id,
                node_count: s.nodes.len(),
                inputs: s.inputs.clone(),
                outputs: s.outputs.clone(),
            })
            .collect()
    }
}

struct Graph<'a> {
    n: &'a Netlist,
    consumers: Vec<Vec<usize>>,
    is_po: Vec<bool>,
}

impl<'a> Graph<'a> {
    fn new(n: &'a Netlist) -> Self {
        let mut is_po = vec![false; n.net_count()];
        for &o in n.outputs() {
            is_po[o] = true;
        }
        Graph {
            n,
            consumers: n.consumers(),
            is_po,
        }
    }

    fn driver_node(&self, net: NetId) -> Option<usize> {
        match self.n.driver(net) {
            Some(Driver::Node(i)) => Some(i),
            _ => None,
        }
    }

    /// Boundary input and output nets of the node set `inside`.
    fn boundary(&self, members: &[usize], inside: impl Fn(usize) -> bool) -> (BTreeSet<NetId>, BTreeSet<NetId>) {
        let mut ins = BTreeSet::new();
        let mut outs = BTreeSet::new();
        for &v in members {
            let node = &self.n.nodes()[v];
            for &f in &node.fanin {
                if !self.driver_node(f).is_some_and(&inside) {
                    ins.insert(f);
                }
            }
            let o = node.output;
            let cons = &self.consumers[o];
            if self.is_po[o] || cons.is_empty() || cons.iter().any(|&c| !inside(c)) {
                outs.insert(o);
            }
        }
        (ins, outs)
    }
}

/// Node visiting order: depth-first postorder from the primary outputs,
/// shallowest outputs first.
fn visit_order(n: &Netlist) -> Vec<usize> {
    let levels = n.levels();
    let net_level = |net: NetId| match n.driver(net) {
        Some(Driver::Node(i)) => levels[i],
        _ => 0,
    };
    let mut roots: Vec<(usize, usize, NetId)> = n.outputs().iter().enumerate().map(|(j, &o)| (net_level(o), j, o)).collect();
    roots.sort();
    let mut seen = vec![false; n.nodes().len()];
    let mut order = Vec::with_capacity(n.nodes().len());
    let visit = |root: usize, order: &mut Vec<usize>, seen: &mut Vec<bool>| {
        if seen[root] {
            return;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let fanin = &n.nodes()[v].fanin;
            if *next < fanin.len() {
                let f = fanin[*next];
                *next += 1;
                if let Some(Driver::Node(u)) = n.driver(f) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push((u, 0));
                    }
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    };
    for (_, _, o) in roots {
        if let Some(Driver::Node(i)) = n.driver(o) {
            visit(i, &mut order, &mut seen);
        }
    }
    // Logic that reaches no primary output, in the netlist's own order.
    for &i in n.topo_order() {
        visit(i, &mut order, &mut seen);
    }
    order
}

/// Partitions `n` into subcircuits with at most `k` inputs and `m` outputs.
pub fn decompose(n: &Netlist, k: usize, m: usize) -> Result<Partition> {
    if k == 0 || m == 0 {
        return Err(Error::Config("k and m must be at least 1".into()));
    }
    if let Some(node) = n.nodes().iter().find(|node| node.fanin.len() > k) {
        return Err(Error::NodeTooWide {
            node: n.net_name(node.output).to_string(),
            fanin: node.fanin.len(),
            k,
        });
    }
    let g = Graph::new(n);
    let mut assign = vec![usize::MAX; n.nodes().len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for v in visit_order(n) {
        if let Some(cur) = clusters.last() {
            let id = clusters.len() - 1;
            let mut trial = cur.clone();
            trial.push(v);
            let (ins, outs) = g.boundary(&trial, |u| u == v || assign[u] == id);
            if ins.len() <= k && outs.len() <= m {
                assign[v] = id;
                clusters[id].push(v);
                continue;
            }
        }
        assign[v] = clusters.len();
        clusters.push(vec![v]);
    }
    refine(&g, &mut assign, &mut clusters, k, m);
    Ok(finish(&g, k, m, assign, clusters))
}

/// One pass of single-node moves between neighbouring clusters, accepted
/// when they lower the total boundary size without breaking any bound.
fn refine(g: &Graph, assign: &mut [usize], clusters: &mut [Vec<usize>], k: usize, m: usize) {
    let cost = |members: &[usize], id: usize, assign: &[usize]| {
        let (i, o) = g.boundary(members, |u| assign[u] == id);
        (i.len(), o.len())
    };
    for v in visit_order(g.n) {
        let from = assign[v];
        if clusters[from].len() == 1 {
            continue;
        }
        let node = &g.n.nodes()[v];
        let lo = node.fanin.iter().filter_map(|&f| g.driver_node(f)).map(|u| assign[u]).max();
        let hi = g.consumers[node.output].iter().map(|&w| assign[w]).min();
        let mut targets: Vec<usize> = node
            .fanin
            .iter()
            .filter_map(|&f| g.driver_node(f))
            .map(|u| assign[u])
            .chain(g.consumers[node.output].iter().map(|&w| assign[w]))
            .filter(|&t| t != from && lo.is_none_or(|l| t >= l) && hi.is_none_or(|h| t <= h))
            .collect();
        targets.sort_unstable();
        targets.dedup();
        let (fi, fo) = cost(&clusters[from], from, assign);
        for to in targets {
            let (ti, to_o) = cost(&clusters[to], to, assign);
            assign[v] = to;
            let from_members: Vec<usize> = clusters[from].iter().copied().filter(|&u| u != v).collect();
            let mut to_members = clusters[to].clone();
            to_members.push(v);
            let (fi2, fo2) = cost(&from_members, from, assign);
            let (ti2, to2) = cost(&to_members, to, assign);
            let ok = fi2 <= k && fo2 <= m && ti2 <= k && to2 <= m && fi2 + fo2 + ti2 + to2 < fi + fo + ti + to_o;
            if ok {
                clusters[from] = from_members;
                clusters[to] = to_members;
                break;
            }
            assign[v] = from;
        }
    }
}

fn finish(g: &Graph, k: usize, m: usize, assign: Vec<usize>, clusters: Vec<Vec<usize>>) -> Partition {
    let n = g.n;
    let significance = output_significance(g);
    let levels = n.levels();
    let topo_rank = {
        let mut r = vec![0usize; n.nodes().len()];
        for (pos, &i) in n.topo_order().iter().enumerate() {
            r[i] = pos;
        }
        r
    };
    let input_rank = |net: NetId| match n.driver(net) {
        Some(Driver::Input(i)) => (0, i),
        Some(Driver::Node(v)) => (1, topo_rank[v]),
        None => (2, net),
    };
    let subcircuits = clusters
        .iter()
        .enumerate()
        .map(|(id, members)| {
            let mut members = members.clone();
            members.sort_by_key(|&v| topo_rank[v]);
            let (ins, outs) = g.boundary(&members, |u| assign[u] == id);
            let mut ins: Vec<NetId> = ins.into_iter().collect();
            ins.sort_by_key(|&f| input_rank(f));
            let mut outs: Vec<NetId> = outs.into_iter().collect();
            outs.sort_by_key(|&o| {
                let depth = g.driver_node(o).map_or(0, |v| levels[v]);
                (significance[o], std::cmp::Reverse(depth), n.net_name(o).to_string())
            });
            let name = |net: NetId| n.net_name(net).to_string();
            Subcircuit {
                id,
                nodes: members.iter().map(|&v| name(n.nodes()[v].output)).collect(),
                inputs: ins.into_iter().map(name).collect(),
                outputs: outs.into_iter().map(name).collect(),
            }
        })
        .collect();
    Partition {
        k,
        m,
        subcircuits,
        assignment: assign,
    }
}

/// Index of the most significant primary output each net can reach.
fn output_significance(g: &Graph) -> Vec<usize> {
    let n = g.n;
    let mut sig = vec![usize::MAX; n.net_count()];
    for (j, &o) in n.outputs().iter().enumerate() {
        sig[o] = sig[o].min(j);
    }
    for &v in n.topo_order().iter().rev() {
        let node = &n.nodes()[v];
        let s = sig[node.output];
        for &f in &node.fanin {
            sig[f] = sig[f].min(s);
        }
    }
    sig
}

fn resolve_nodes(n: &Netlist, s: &Subcircuit) -> Result<Vec<usize>> {
    s.nodes
        .iter()
        .map(|name| match n.net_id(name).and_then(|id| n.driver(id)) {
            Some(Driver::Node(i)) => Ok(i),
            _ => Err(Error::StaleSubcircuit(s.id)),
        })
        .collect()
}

/// The subcircuit as a standalone netlist over its boundary nets.
pub fn extract(n: &Netlist, s: &Subcircuit) -> Result<Netlist> {
    let members = resolve_nodes(n, s)?;
    let member_set: HashSet<usize> = members.iter().copied().collect();
    let mut b = NetlistBuilder::new(format!("{}_s{}", n.name(), s.id));
    for name in &s.inputs {
        if n.net_id(name).is_none() {
            return Err(Error::StaleSubcircuit(s.id));
        }
        b.input(name);
    }
    for &v in n.topo_order().iter().filter(|v| member_set.contains(v)) {
        let node = &n.nodes()[v];
        let fanin = node.fanin.iter().map(|&f| b.net(n.net_name(f))).collect();
        let out = b.net(n.net_name(node.output));
        b.push_node(out, fanin, node.function.clone());
    }
    for name in &s.outputs {
        let id = b.net(name);
        b.output(id);
    }
    b.build().map_err(|_| Error::StaleSubcircuit(s.id))
}

/// Replaces the nodes of `s` by `replacement`, whose ports line up with the
/// boundary lists of `s` by position.
pub fn substitute(n: &Netlist, s: &Subcircuit, replacement: &Netlist) -> Result<Netlist> {
    substitute_many(n, &[(s, replacement)])
}

/// Several substitutions of disjoint subcircuits at once.
pub fn substitute_many(n: &Netlist, replacements: &[(&Subcircuit, &Netlist)]) -> Result<Netlist> {
    let mut removed = HashSet::new();
    for (s, r) in replacements {
        if r.inputs().len() != s.inputs.len() || r.outputs().len() != s.outputs.len() {
            return Err(Error::Ports(format!(
                "replacement for subcircuit {} has {}/{} ports, boundary has {}/{}",
                s.id,
                r.inputs().len(),
                r.outputs().len(),
                s.inputs.len(),
                s.outputs.len()
            )));
        }
        for v in resolve_nodes(n, s)? {
            if !removed.insert(v) {
                return Err(Error::Config(format!("subcircuit {} overlaps another replacement", s.id)));
            }
        }
    }
    let mut b = NetlistBuilder::new(n.name());
    for &i in n.inputs() {
        b.input(n.net_name(i));
    }
    for (v, node) in n.nodes().iter().enumerate() {
        if removed.contains(&v) {
            continue;
        }
        let fanin = node.fanin.iter().map(|&f| b.net(n.net_name(f))).collect();
        let out = b.net(n.net_name(node.output));
        b.push_node(out, fanin, node.function.clone());
    }
    for (s, r) in replacements {
        splice(&mut b, s, r);
    }
    for &o in n.outputs() {
        let id = b.net(n.net_name(o));
        b.output(id);
    }
    b.build()
}

fn splice(b: &mut NetlistBuilder, s: &Subcircuit, r: &Netlist) {
    let mut map: HashMap<NetId, NetId> = HashMap::new();
    for (&pi, name) in r.inputs().iter().zip(&s.inputs) {
        map.insert(pi, b.net(name));
    }
    // Outputs driven by a node of `r` take the boundary name directly;
    // aliases of inputs or of an earlier output become buffers.
    let mut buffers = Vec::new();
    for (&po, name) in r.outputs().iter().zip(&s.outputs) {
        let target = b.net(name);
        match r.driver(po) {
            Some(Driver::Node(_)) if !map.contains_key(&po) => {
                map.insert(po, target);
            }
            _ => buffers.push((po, target)),
        }
    }
    for &v in r.topo_order() {
        let node = &r.nodes()[v];
        let out = match map.get(&node.output) {
            Some(&id) => id,
            None => {
                let id = internal_net(b, s.id, r.net_name(node.output));
                map.insert(node.output, id);
                id
            }
        };
        let fanin = node.fanin.iter().map(|f| map[f]).collect();
        b.push_node(out, fanin, node.function.clone());
    }
    for (src, target) in buffers {
        b.push_node(target, vec![map[&src]], crate::netlist::NodeFunction::Gate(GateKind::Buf));
    }
}

fn internal_net(b: &mut NetlistBuilder, id: usize, name: &str) -> NetId {
    let candidate = format!("_s{id}_{name}");
    if b.has_net(&candidate) {
        b.fresh_net(&format!("{candidate}_"))
    } else {
        b.net(&candidate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::netlist::parse_blif;

    fn small() -> Netlist {
        parse_blif(".model t\n.inputs a b c\n.outputs x y\n.names a b t\n11 1\n.names t c x\n1- 1\n-1 1\n.names t c y\n10 1\n01 1\n.end\n").unwrap()
    }

    #[test]
    fn small_circuit_is_one_block() {
        let n = small();
        let p = decompose(&n, 10, 10).unwrap();
        assert_eq!(p.len(), 1);
        let s = &p.subcircuits[0];
        assert_eq!(s.inputs, vec!["a", "b", "c"]);
        assert_eq!(s.outputs, vec!["x", "y"]);
        let e = extract(&n, s).unwrap();
        assert_eq!(e.truth_table().unwrap(), n.truth_table().unwrap());
    }

    #[test]
    fn multiplier_needs_several_blocks() {
        let p = decompose(&fixtures::array_multiplier(8), 10, 10).unwrap();
        assert!(p.len() >= 2);
        assert_eq!(p, decompose(&fixtures::array_multiplier(8), 10, 10).unwrap());
    }

    #[test]
    fn wide_node_is_rejected() {
        let n = parse_blif(".model w\n.inputs a b c\n.outputs y\n.names a b c y\n111 1\n.end\n").unwrap();
        assert_eq!(
            decompose(&n, 2, 4).unwrap_err(),
            Error::NodeTooWide {
                node: "y".into(),
                fanin: 3,
                k: 2
            }
        );
        assert!(decompose(&n, 0, 4).is_err());
    }

    #[test]
    fn single_and_extracts_to_one_gate() {
        let n = small();
        let p = decompose(&n, 2, 1).unwrap();
        let s = p.subcircuits.iter().find(|s| s.nodes == vec!["t"]).expect("AND alone");
        let e = extract(&n, s).unwrap();
        assert_eq!(e.nodes().len(), 1);
        assert_eq!(e.input_names(), vec!["a", "b"]);
    }

    #[test]
    fn substitute_constant_zero() {
        let n = small();
        let p = decompose(&n, 2, 1).unwrap();
        let s = p.subcircuits.iter().find(|s| s.nodes == vec!["t"]).unwrap();
        let mut b = NetlistBuilder::new("zero");
        b.input("p");
        b.input("q");
        let z = b.named_gate(GateKind::Const0, &[], "z");
        b.output(z);
        let r = substitute(&n, s, &b.build().unwrap()).unwrap();
        // With t = 0: x = c, y = c.
        for c in [false, true] {
            for ab in 0..4 {
                let out = r.simulate(&[ab & 2 != 0, ab & 1 != 0, c]).unwrap();
                assert_eq!(out, vec![c, c]);
            }
        }
    }

    #[test]
    fn wire_replacements_become_buffers() {
        let n = small();
        let p = decompose(&n, 2, 1).unwrap();
        let s = p.subcircuits.iter().find(|s| s.nodes == vec!["t"]).unwrap();
        let mut b = NetlistBuilder::new("wire");
        let p0 = b.input("p");
        b.input("q");
        b.output(p0);
        let r = substitute(&n, s, &b.build().unwrap()).unwrap();
        assert_eq!(r.simulate(&[true, false, false]).unwrap(), vec![true, true]);
    }

    #[test]
    fn stale_and_mismatched_substitutions() {
        let n = small();
        let p = decompose(&n, 10, 10).unwrap();
        let mut s = p.subcircuits[0].clone();
        let r = extract(&n, &s).unwrap();
        let tiny = parse_blif(".model z\n.inputs a\n.outputs y\n.names a y\n1 1\n.end\n").unwrap();
        assert!(matches!(substitute(&n, &s, &tiny), Err(Error::Ports(_))));
        s.nodes.push("nope".into());
        assert_eq!(extract(&n, &s).unwrap_err(), Error::StaleSubcircuit(0));
        assert_eq!(substitute(&n, &s, &r).unwrap_err(), Error::StaleSubcircuit(0));
    }

    #[test]
    fn report_lists_every_block() {
        let n = fixtures::ripple_carry_adder(4);
        let p = decompose(&n, 4, 4).unwrap();
        let report = p.report();
        assert_eq!(report.len(), p.len());
        assert_eq!(report.iter().map(|r| r.node_count).sum::<usize>(), n.nodes().len());
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"node_count\""));
    }
}
