//! Dijkstra shortest paths and the per-order induced networks.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::model::{EdgeId, ModeClass, Network, ProductOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: u64,
}

/// Directed graph with non-negative integer arc costs.
#[derive(Clone, Debug, Default)]
pub struct Digraph {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(node_count: usize) -> Self {
        Digraph { arcs: Vec::new(), out: vec![Vec::new(); node_count] }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, cost: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { from, to, cost });
        self.out[from].push(id);
        id
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn out_arcs(&self, node: usize) -> &[usize] {
        &self.out[node]
    }
}

#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub dist: Vec<Option<u64>>,
    pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Arc indices of the shortest path from the source to `target`.
    pub fn path(&self, graph: &Digraph, target: usize) -> Option<Vec<usize>> {
        self.dist[target]?;
        let mut arcs = Vec::new();
        let mut node = target;
        while let Some(a) = self.pred[node] {
            arcs.push(a);
            node = graph.arcs[a].from;
        }
        arcs.reverse();
        Some(arcs)
    }
}

/// Single-source shortest paths. Predecessors change only on strict
/// improvement, so equal-cost ties resolve to the first arc relaxed.
pub fn dijkstra(graph: &Digraph, source: usize) -> ShortestPaths {
    let n = graph.node_count();
    let mut dist = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &a in &graph.out[u] {
            let arc = graph.arcs[a];
            let nd = d + arc.cost;
            if dist[arc.to].map_or(true, |cur| nd < cur) {
                dist[arc.to] = Some(nd);
                pred[arc.to] = Some(a);
                heap.push(Reverse((nd, arc.to)));
            }
        }
    }
    ShortestPaths { dist, pred }
}

/// Mode family of a per-order induced network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedNetwork {
    /// Air connections only.
    Air,
    /// Ground plus LCL connections.
    Lcl,
    /// Ground plus one FCL unit, excluding its fixed charge.
    Fcl(EdgeId),
}

/// Cheapest route of one order in one induced network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PricedRoute {
    pub edges: Vec<EdgeId>,
    pub cost_cents: u64,
}

/// Builds the induced network for `order` and returns its cheapest route.
///
/// Ocean networks are layered: ground edges exist in a pre-ocean and a
/// post-ocean copy, and the admitted ocean edges lead from the first copy to
/// the second, so every route crosses the ocean exactly once.
pub fn cheapest_route(net: &Network, order: &ProductOrder, induced: InducedNetwork) -> Option<PricedRoute> {
    let n = net.locations.len();
    let (graph, tags, source, target) = match induced {
        InducedNetwork::Air => {
            let mut g = Digraph::new(n);
            let mut tags = Vec::new();
            for e in net.edges_of(ModeClass::Air) {
                g.add_arc(e.origin.index(), e.dest.index(), e.order_cost_cents(order));
                tags.push(e.id);
            }
            (g, tags, order.origin.index(), order.destination.index())
        }
        InducedNetwork::Lcl | InducedNetwork::Fcl(_) => {
            let mut g = Digraph::new(2 * n);
            let mut tags = Vec::new();
            for e in &net.edges {
                let admitted = match (induced, e.mode.class) {
                    (_, ModeClass::Ground) => {
                        let c = e.order_cost_cents(order);
                        g.add_arc(e.origin.index(), e.dest.index(), c);
                        g.add_arc(n + e.origin.index(), n + e.dest.index(), c);
                        tags.push(e.id);
                        tags.push(e.id);
                        false
                    }
                    (InducedNetwork::Lcl, ModeClass::Lcl) => true,
                    (InducedNetwork::Fcl(m), ModeClass::Fcl) => e.id == m,
                    _ => false,
                };
                if admitted {
                    g.add_arc(e.origin.index(), n + e.dest.index(), e.order_cost_cents(order));
                    tags.push(e.id);
                }
            }
            (g, tags, order.origin.index(), n + order.destination.index())
        }
    };
    let sp = dijkstra(&graph, source);
    let arcs = sp.path(&graph, target)?;
    Some(PricedRoute {
        edges: arcs.iter().map(|&a| tags[a]).collect(),
        cost_cents: sp.dist[target].expect("reachable"),
    })
}
