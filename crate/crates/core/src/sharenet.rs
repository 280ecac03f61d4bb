//! The extended shareability network: order nodes split into origin and
//! destination, driver nodes, virtual source and sink, and three link classes
//! (virtual, connectivity, internal). Carrying one unit of flow through an
//! order's internal link means the order is served.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sinkprox::SinkDag;
use crate::trip::{Driver, Instance, Order, TravelModel, ZoneId};

/// A node of the extended network. Indices are positions in the network's own
/// order/driver lists, not instance ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeRef {
    Source,
    Sink,
    DriverNode(usize),
    OrderOrigin(usize),
    OrderDest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkClass {
    /// Source to drivers, destinations/drivers to sink.
    Virtual,
    /// Driver-to-order and order-to-order feasible successions.
    Connectivity,
    /// Origin-to-destination inside one order; the only weighted class.
    Internal,
}

/// A directed link with unit capacity bounds and an integer weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub upper: u8,
    pub lower: u8,
    pub weight: i64,
    pub class: LinkClass,
}

/// A driver's availability at network-construction time: where and when they
/// next become idle. A fresh driver is available from their start tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverAvail {
    pub id: u64,
    pub free_time: i64,
    pub zone: ZoneId,
}

impl From<&Driver> for DriverAvail {
    fn from(d: &Driver) -> Self {
        DriverAvail { id: d.id, free_time: d.start_time, zone: d.start_zone }
    }
}

/// Order `i` can be followed by order `j`: the deadhead from `i`'s destination
/// reaches `j`'s origin before pickup, and the idle gap fits under the cap.
pub fn connectable_orders(i: &Order, j: &Order, travel: &TravelModel, idle_cap: i64) -> bool {
    let tt = travel.travel_time(i.dest, j.origin).expect("valid zones");
    i.dropoff as f64 + tt <= j.pickup as f64 && j.pickup - i.dropoff <= idle_cap
}

/// Driver `k` can take order `j` as their next service.
pub fn connectable_driver(k: &DriverAvail, j: &Order, travel: &TravelModel, idle_cap: i64) -> bool {
    let tt = travel.travel_time(k.zone, j.origin).expect("valid zones");
    k.free_time as f64 + tt <= j.pickup as f64 && j.pickup - k.free_time <= idle_cap
}

/// The extended shareability network. Immutable once built.
#[derive(Debug, Clone)]
pub struct ShareNet {
    nodes: Vec<NodeRef>,
    links: Vec<Link>,
    orders: Vec<Order>,
    drivers: Vec<DriverAvail>,
    sink_time: i64,
}

impl ShareNet {
    /// Builds the network over the given orders and driver availabilities.
    ///
    /// With a `window = [w0, w1]`, only orders with pickup inside the window
    /// and drivers with `free_time < w1` are included. Internal link weights
    /// come from `weights` by order id (missing entries default to 1).
    pub fn build(
        orders: &[Order],
        drivers: &[DriverAvail],
        travel: &TravelModel,
        idle_cap: i64,
        horizon_end: i64,
        window: Option<(i64, i64)>,
        weights: Option<&BTreeMap<u64, i64>>,
    ) -> ShareNet {
        let in_scope_orders: Vec<Order> = match window {
            Some((w0, w1)) => orders
                .iter()
                .filter(|o| o.pickup >= w0 && o.pickup <= w1)
                .copied()
                .collect(),
            None => orders.to_vec(),
        };
        let in_scope_drivers: Vec<DriverAvail> = match window {
            Some((_, w1)) => drivers.iter().filter(|d| d.free_time < w1).copied().collect(),
            None => drivers.to_vec(),
        };
        let n = in_scope_orders.len();
        let m = in_scope_drivers.len();

        // Sink time: end of the construction horizon, covering the latest
        // drop-off of any included order.
        let mut sink_time = window.map(|(_, w1)| w1).unwrap_or(horizon_end);
        for o in &in_scope_orders {
            sink_time = sink_time.max(o.dropoff);
        }

        let mut nodes = Vec::with_capacity(2 + m + 2 * n);
        nodes.push(NodeRef::Source);
        nodes.push(NodeRef::Sink);
        for k in 0..m {
            nodes.push(NodeRef::DriverNode(k));
        }
        for i in 0..n {
            nodes.push(NodeRef::OrderOrigin(i));
            nodes.push(NodeRef::OrderDest(i));
        }
        let driver_node = |k: usize| 2 + k;
        let origin_node = |i: usize| 2 + m + 2 * i;
        let dest_node = |i: usize| 2 + m + 2 * i + 1;

        let weight_of = |o: &Order| -> i64 {
            weights.map(|w| w.get(&o.id).copied().unwrap_or(1)).unwrap_or(1)
        };

        let mut links = Vec::new();
        let mut push = |from: usize, to: usize, weight: i64, class: LinkClass| {
            links.push(Link { from, to, upper: 1, lower: 0, weight, class });
        };

        for k in 0..m {
            push(0, driver_node(k), 0, LinkClass::Virtual);
        }
        for (k, d) in in_scope_drivers.iter().enumerate() {
            for (j, o) in in_scope_orders.iter().enumerate() {
                if connectable_driver(d, o, travel, idle_cap) {
                    push(driver_node(k), origin_node(j), 0, LinkClass::Connectivity);
                }
            }
        }
        for (i, o) in in_scope_orders.iter().enumerate() {
            push(origin_node(i), dest_node(i), weight_of(o), LinkClass::Internal);
        }
        for (i, oi) in in_scope_orders.iter().enumerate() {
            for (j, oj) in in_scope_orders.iter().enumerate() {
                if i != j && connectable_orders(oi, oj, travel, idle_cap) {
                    push(dest_node(i), origin_node(j), 0, LinkClass::Connectivity);
                }
            }
        }
        for i in 0..n {
            push(dest_node(i), 1, 0, LinkClass::Virtual);
        }
        for k in 0..m {
            push(driver_node(k), 1, 0, LinkClass::Virtual);
        }

        ShareNet { nodes, links, orders: in_scope_orders, drivers: in_scope_drivers, sink_time }
    }

    pub fn nodes(&self) -> &[NodeRef] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Orders included in this network, in node order.
    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn drivers(&self) -> &[DriverAvail] {
        &self.drivers
    }

    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    pub fn driver_count(&self) -> usize {
        self.drivers.len()
    }

    /// Time attribute of the sink node.
    pub fn sink_time(&self) -> i64 {
        self.sink_time
    }

    pub fn source_index(&self) -> usize {
        0
    }

    pub fn sink_index(&self) -> usize {
        1
    }

    pub fn driver_node(&self, k: usize) -> usize {
        2 + k
    }

    pub fn origin_node(&self, i: usize) -> usize {
        2 + self.drivers.len() + 2 * i
    }

    pub fn dest_node(&self, i: usize) -> usize {
        2 + self.drivers.len() + 2 * i + 1
    }

    /// Kahn topological order; `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for l in &self.links {
            adj[l.from].push(l.to);
            indeg[l.to] += 1;
        }
        let mut queue: std::collections::VecDeque<usize> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &adj[v] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    queue.push_back(u);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Projects onto order nodes plus the sink: the graph sink proximity is
    /// defined on. Node `i` is the i-th order, node `order_count` is the sink.
    pub fn order_projection(&self) -> OrderProjection {
        let n = self.orders.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for l in &self.links {
            match (self.nodes[l.from], self.nodes[l.to], l.class) {
                (NodeRef::OrderDest(i), NodeRef::OrderOrigin(j), LinkClass::Connectivity) => {
                    adj[i].push(j);
                }
                (NodeRef::OrderDest(i), NodeRef::Sink, LinkClass::Virtual) => {
                    adj[i].push(n);
                }
                _ => {}
            }
        }
        OrderProjection {
            dag: SinkDag { adj, sink: n },
            order_ids: self.orders.iter().map(|o| o.id).collect(),
            dropoffs: self.orders.iter().map(|o| o.dropoff).collect(),
            t_sink: self.sink_time,
        }
    }

    /// Debug edge-list export: one `from_kind:id,to_kind:id,u,l,w` line per
    /// link, in construction order.
    pub fn export_edges(&self) -> String {
        let mut out = String::new();
        for l in &self.links {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.node_label(l.from),
                self.node_label(l.to),
                l.upper,
                l.lower,
                l.weight
            ));
        }
        out
    }

    pub(crate) fn node_label(&self, idx: usize) -> String {
        match self.nodes[idx] {
            NodeRef::Source => "source:0".to_string(),
            NodeRef::Sink => "sink:0".to_string(),
            NodeRef::DriverNode(k) => format!("driver:{}", self.drivers[k].id),
            NodeRef::OrderOrigin(i) => format!("origin:{}", self.orders[i].id),
            NodeRef::OrderDest(i) => format!("dest:{}", self.orders[i].id),
        }
    }
}

/// Order-node projection of a [`ShareNet`], the input to sink proximity.
#[derive(Debug, Clone)]
pub struct OrderProjection {
    pub dag: SinkDag,
    pub order_ids: Vec<u64>,
    pub dropoffs: Vec<i64>,
    /// Time attribute of the sink node.
    pub t_sink: i64,
}

/// Spec-level builder: the full instance (or a pickup-time window of it) with
/// fresh drivers.
pub fn build_sharenet(
    inst: &Instance,
    window: Option<(i64, i64)>,
    weights: Option<&BTreeMap<u64, i64>>,
) -> ShareNet {
    let avail: Vec<DriverAvail> = inst.drivers.iter().map(DriverAvail::from).collect();
    ShareNet::build(
        &inst.orders,
        &avail,
        &inst.travel,
        inst.idle_cap,
        inst.horizon.1,
        window,
        weights,
    )
}
