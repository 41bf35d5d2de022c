//! Geometry of a compiled macro-tile: the computation zone rectangle and
//! the wire paths that carry side bits from the macro-tile border to the
//! zone's bottom row.
//!
//! Wires are routed one after another in canonical order (left, right,
//! bottom, top; bit 0 upward/rightward first) by breadth-first search on
//! the free cells, so the layout is a pure function of (N, k, machine).
//! Paths never touch the border (except at their own start cell), the
//! zone, or one another.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::machine::CheckerMachine;
use crate::tile::Region;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WirePath {
    pub side: u32,
    pub bit: u32,
    /// Cells from the border start cell to the delivery cell just below
    /// the zone's input column; the delivery cell's top edge feeds the
    /// zone.
    pub cells: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: u32,
    pub k: u32,
    pub program_len: u32,
    /// Zone rectangle in macro-tile coordinates.
    pub zone: Region,
    /// 4k wires in canonical order (side major, bit minor).
    pub wires: Vec<WirePath>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutInfeasible(pub String);

impl fmt::Display for LayoutInfeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layout infeasible: {}", self.0)
    }
}

impl Layout {
    pub fn zone_w(&self) -> u32 {
        self.zone.width
    }

    pub fn zone_h(&self) -> u32 {
        self.zone.height
    }

    /// Start cell of a wire on the macro-tile border.
    pub fn wire_start(n: u32, k: u32, side: u32, bit: u32) -> (u32, u32) {
        let c = (n - k) / 2 + bit;
        match side {
            0 => (0, c),
            1 => (n - 1, c),
            2 => (c, 0),
            _ => (c, n - 1),
        }
    }

    /// Is this border-side cell one of the k centered bit cells?
    pub fn centered_bit_index(n: u32, k: u32, pos: u32) -> Option<u32> {
        let c0 = (n - k) / 2;
        if pos >= c0 && pos < c0 + k {
            Some(pos - c0)
        } else {
            None
        }
    }
}

/// Deterministic canonical layout: zone centered, wires BFS-routed in
/// canonical order. Fails (with a reason) when N cannot host the zone,
/// the centered bit cells, or all 4k disjoint wires.
pub fn plan_layout(n: u32, k: u32, machine: &CheckerMachine) -> Result<Layout, LayoutInfeasible> {
    if machine.k != k {
        return Err(LayoutInfeasible(format!(
            "machine expects k={}, layout asked for k={k}",
            machine.k
        )));
    }
    if k == 0 || n < k + 2 {
        return Err(LayoutInfeasible(format!(
            "centered bit cells need 1 <= k <= N-2 (k={k}, N={n})"
        )));
    }
    let zw = machine.min_zone_width();
    let zh = machine.time_budget;
    if zw + 2 > n || zh + 3 > n {
        return Err(LayoutInfeasible(format!(
            "zone {zw}x{zh} plus margins does not fit N={n}"
        )));
    }
    let zx = (n - zw) / 2;
    let zy = (n - zh) / 2;
    if zy < 2 {
        return Err(LayoutInfeasible("no room for wires below the zone".into()));
    }
    let zone = Region::new(zx as i64, zy as i64, zw, zh);

    // Obstacles shared by all wires: the zone and the border ring.
    let mut blocked: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (x, y) in zone.cells() {
        blocked.insert((x as u32, y as u32));
    }
    for i in 0..n {
        blocked.insert((i, 0));
        blocked.insert((i, n - 1));
        blocked.insert((0, i));
        blocked.insert((n - 1, i));
    }
    // Delivery cells, one per input column.
    let mut targets = Vec::new();
    for side in 0..4u32 {
        for bit in 0..k {
            let col = machine.input_column(side, bit);
            targets.push((zx + col, zy - 1));
        }
    }
    for &t in &targets {
        blocked.insert(t);
    }

    let mut wires = Vec::new();
    for side in 0..4u32 {
        for bit in 0..k {
            let idx = (side * k + bit) as usize;
            let start = Layout::wire_start(n, k, side, bit);
            let goal = targets[idx];
            let mut free = blocked.clone();
            free.remove(&start);
            free.remove(&goal);
            let path = bfs_route(n, start, goal, &free).ok_or_else(|| {
                LayoutInfeasible(format!("wire side {side} bit {bit} cannot be routed"))
            })?;
            for &c in &path {
                blocked.insert(c);
            }
            wires.push(WirePath { side, bit, cells: path });
        }
    }

    // Paths are disjoint by construction of the obstacle set.
    let mut seen = BTreeSet::new();
    for w in &wires {
        for &c in &w.cells {
            assert!(seen.insert(c), "wire cells must be disjoint");
        }
    }
    Ok(Layout { n, k, program_len: machine.program.len() as u32, zone, wires })
}

/// Shortest path by BFS with the fixed neighbor order down, left, right,
/// up; `blocked` cells are impassable.
fn bfs_route(
    n: u32,
    start: (u32, u32),
    goal: (u32, u32),
    blocked: &BTreeSet<(u32, u32)>,
) -> Option<Vec<(u32, u32)>> {
    const ORDER: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
    let idx = |c: (u32, u32)| (c.1 * n + c.0) as usize;
    let mut parent: Vec<u32> = vec![u32::MAX; (n * n) as usize];
    let mut queue = alloc::collections::VecDeque::new();
    parent[idx(start)] = idx(start) as u32;
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            let mut path = vec![cur];
            let mut at = cur;
            while at != start {
                let p = parent[idx(at)];
                at = (p % n, p / n);
                path.push(at);
            }
            path.reverse();
            return Some(path);
        }
        for (dx, dy) in ORDER {
            let nx = cur.0 as i64 + dx;
            let ny = cur.1 as i64 + dy;
            if nx < 0 || ny < 0 || nx >= n as i64 || ny >= n as i64 {
                continue;
            }
            let nc = (nx as u32, ny as u32);
            if blocked.contains(&nc) || parent[idx(nc)] != u32::MAX {
                continue;
            }
            parent[idx(nc)] = idx(cur) as u32;
            queue.push_back(nc);
        }
    }
    None
}
