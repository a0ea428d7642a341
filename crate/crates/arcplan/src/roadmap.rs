//! Tangent-graph roadmap construction and shortest paths.
//!
//! Nodes are the points where tangent lines touch inflated obstacle
//! boundaries; edges are collision-free tangent segments plus boundary spans
//! between parameter-adjacent anchors. Every anchor is split into two nodes,
//! one per boundary traversal sense, and tangent edges only connect nodes
//! whose senses agree with the tangent direction. Heading continuity along
//! any graph path is therefore structural, which is exactly what a
//! double-integrator needs to follow the result without stopping.

use crate::geometry::{InflatedObstacle, PieceKind};
use crate::parallel;
use crate::tangents::{self, TangentError, TangentKind};
use crate::vec2::Vec2;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

pub type ObstacleId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoadmapError {
    #[error("overlapping-obstacles: inflated obstacles {0} and {1} intersect")]
    OverlappingObstacles(usize, usize),
    #[error("tangent solver failed for obstacle pair ({0}, {1}): {2}")]
    TangentFailure(usize, usize, TangentError),
    #[error("point-inside-obstacle: {which} terminal lies inside inflated obstacle {id}")]
    TerminalInsideObstacle { which: &'static str, id: usize },
    #[error("no-path: terminals are not connected in the roadmap")]
    NoPath,
    #[error("out-of-range: parameter {gamma} outside [0, {total}]")]
    OutOfRange { gamma: f64, total: f64 },
    #[error("terminals have not been attached to the roadmap")]
    TerminalsMissing,
}

/// Boundary traversal sense. `Ccw` follows increasing arc length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sense {
    Ccw,
    Cw,
}

impl Sense {
    fn flip(self) -> Sense {
        match self {
            Sense::Ccw => Sense::Cw,
            Sense::Cw => Sense::Ccw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Start,
    Goal,
    Boundary {
        obstacle: ObstacleId,
        gamma: f64,
        sense: Sense,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub kind: NodeKind,
    pub position: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeGeometry {
    Straight { from: Vec2, to: Vec2 },
    Boundary {
        obstacle: ObstacleId,
        gamma_from: f64,
        gamma_to: f64,
        sense: Sense,
    },
}

/// A directed roadmap edge.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub geometry: EdgeGeometry,
    pub length: f64,
}

/// A tangent segment anchored at up to two obstacle boundaries.
#[derive(Debug, Clone, Copy)]
pub struct TangentEdge {
    pub a: Anchor,
    pub b: Anchor,
    pub pa: Vec2,
    pub pb: Vec2,
    pub kind: TangentKind,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    Boundary { obstacle: ObstacleId, gamma: f64 },
    Free(Vec2),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Terminal {
    Start,
    Goal,
}

/// The tangent-graph roadmap over a set of inflated obstacles.
#[derive(Debug, Clone)]
pub struct Roadmap {
    obstacles: Vec<InflatedObstacle>,
    /// Obstacle-to-obstacle tangents that survived collision pruning.
    pair_tangents: Vec<TangentEdge>,
    /// Terminal-to-obstacle tangents (populated by `attach_terminals`).
    terminal_tangents: Vec<(Terminal, ObstacleId, f64, Vec2)>,
    terminals: Option<(Vec2, Vec2)>,
    direct_edge: bool,
    /// Ellipse filter focal data: `(start, goal, major_axis_length)`.
    ellipse: Option<(Vec2, Vec2, f64)>,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    start_node: Option<usize>,
    goal_node: Option<usize>,
}

/// Worst-case ratio between boundary-hugging and straight-line travel,
/// maximized over the obstacle set: `max_k perimeter_k / (4 rho_in_k)`.
/// Returns 1 for an empty set (the shortest path is the straight line).
pub fn kappa_m(obstacles: &[InflatedObstacle]) -> f64 {
    obstacles
        .iter()
        .map(|o| o.perimeter() / (4.0 * o.min_inradius()))
        .fold(1.0_f64, f64::max)
}

/// Builds the roadmap over pairwise-disjoint inflated obstacles, computing
/// common tangents for every obstacle pair (in parallel when the `parallel`
/// feature is enabled) and pruning tangents blocked by third obstacles.
pub fn build_roadmap(obstacles: &[InflatedObstacle]) -> Result<Roadmap, RoadmapError> {
    build_roadmap_impl(obstacles, true)
}

/// Sequential twin of [`build_roadmap`]; same output, single-threaded.
pub fn build_roadmap_seq(obstacles: &[InflatedObstacle]) -> Result<Roadmap, RoadmapError> {
    build_roadmap_impl(obstacles, false)
}

fn build_roadmap_impl(
    obstacles: &[InflatedObstacle],
    use_parallel: bool,
) -> Result<Roadmap, RoadmapError> {
    for i in 0..obstacles.len() {
        for j in (i + 1)..obstacles.len() {
            if obstacles[i].closure_intersects(&obstacles[j]) {
                return Err(RoadmapError::OverlappingObstacles(i, j));
            }
        }
    }

    let mut pairs = Vec::new();
    for i in 0..obstacles.len() {
        for j in (i + 1)..obstacles.len() {
            pairs.push((i, j));
        }
    }
    let solve = |(i, j): (usize, usize)| ((i, j), tangents::common_tangents(&obstacles[i], &obstacles[j]));
    let results = if use_parallel {
        parallel::map_collect(pairs, solve)
    } else {
        parallel::map_collect_seq(pairs, solve)
    };

    let mut pair_tangents = Vec::new();
    for ((i, j), res) in results {
        let tangents = res.map_err(|e| match e {
            TangentError::OverlappingObstacles => RoadmapError::OverlappingObstacles(i, j),
            other => RoadmapError::TangentFailure(i, j, other),
        })?;
        for t in tangents {
            if !tangents_blocked(t.pair.p1, t.pair.p2, obstacles) {
                pair_tangents.push(TangentEdge {
                    a: Anchor::Boundary {
                        obstacle: i,
                        gamma: t.pair.gamma1,
                    },
                    b: Anchor::Boundary {
                        obstacle: j,
                        gamma: t.pair.gamma2,
                    },
                    pa: t.pair.p1,
                    pb: t.pair.p2,
                    kind: t.kind,
                    length: t.length,
                });
            }
        }
    }

    let mut roadmap = Roadmap {
        obstacles: obstacles.to_vec(),
        pair_tangents,
        terminal_tangents: Vec::new(),
        terminals: None,
        direct_edge: false,
        ellipse: None,
        nodes: Vec::new(),
        edges: Vec::new(),
        adjacency: Vec::new(),
        start_node: None,
        goal_node: None,
    };
    roadmap.assemble();
    Ok(roadmap)
}

fn tangents_blocked(a: Vec2, b: Vec2, obstacles: &[InflatedObstacle]) -> bool {
    tangents::segment_collides(a, b, obstacles)
}

impl Roadmap {
    pub fn obstacles(&self) -> &[InflatedObstacle] {
        &self.obstacles
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Distinct tangency anchor points (ignoring the sense split).
    pub fn anchor_count(&self) -> usize {
        let mut anchors: Vec<(usize, u64)> = self
            .nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Boundary { obstacle, gamma, .. } => Some((obstacle, gamma.to_bits())),
                _ => None,
            })
            .collect();
        anchors.sort_unstable();
        anchors.dedup();
        anchors.len()
    }

    /// Surviving obstacle-to-obstacle tangent segments.
    pub fn pair_tangents(&self) -> &[TangentEdge] {
        &self.pair_tangents
    }

    /// Adds start and goal nodes: tangents from each terminal to every
    /// obstacle (collision-pruned) and the direct segment when free.
    pub fn attach_terminals(mut self, start: Vec2, goal: Vec2) -> Result<Roadmap, RoadmapError> {
        for (id, obs) in self.obstacles.iter().enumerate() {
            if obs.signed_clearance(start) <= 0.0 {
                return Err(RoadmapError::TerminalInsideObstacle { which: "start", id });
            }
            if obs.signed_clearance(goal) <= 0.0 {
                return Err(RoadmapError::TerminalInsideObstacle { which: "goal", id });
            }
        }

        let mut terminal_tangents = Vec::new();
        let queries: Vec<(Terminal, usize)> = (0..self.obstacles.len())
            .flat_map(|id| [(Terminal::Start, id), (Terminal::Goal, id)])
            .collect();
        let results = parallel::map_collect(queries, |(term, id)| {
            let p = match term {
                Terminal::Start => start,
                Terminal::Goal => goal,
            };
            (term, id, tangents::point_tangents(p, &self.obstacles[id]))
        });
        for (term, id, res) in results {
            let p = match term {
                Terminal::Start => start,
                Terminal::Goal => goal,
            };
            match res {
                Ok(tangs) => {
                    for t in tangs {
                        if !tangents_blocked(p, t.point, &self.obstacles) {
                            terminal_tangents.push((term, id, t.gamma, t.point));
                        }
                    }
                }
                Err(TangentError::PointInsideObstacle) => {
                    return Err(RoadmapError::TerminalInsideObstacle {
                        which: if term == Terminal::Start { "start" } else { "goal" },
                        id,
                    })
                }
                Err(e) => {
                    return Err(RoadmapError::TangentFailure(id, id, e));
                }
            }
        }

        self.terminal_tangents = terminal_tangents;
        self.terminals = Some((start, goal));
        self.direct_edge = start.distance(goal) > 1e-12
            && !tangents_blocked(start, goal, &self.obstacles);
        self.assemble();
        Ok(self)
    }

    /// Removes boundary anchors outside the ellipse with foci at the
    /// terminals and major-axis length `kappa_m * |goal - start|`. Terminals
    /// are never removed; boundary spans re-chain over the survivors.
    pub fn ellipse_filter(self) -> Result<Roadmap, RoadmapError> {
        let kappa = kappa_m(&self.obstacles);
        self.ellipse_filter_with_kappa(kappa)
    }

    /// Ellipse filter with an explicit detour bound.
    pub fn ellipse_filter_with_kappa(mut self, kappa: f64) -> Result<Roadmap, RoadmapError> {
        let (start, goal) = self.terminals.ok_or(RoadmapError::TerminalsMissing)?;
        self.ellipse = Some((start, goal, kappa * start.distance(goal)));
        self.assemble();
        Ok(self)
    }

    fn inside_ellipse(&self, p: Vec2) -> bool {
        match self.ellipse {
            None => true,
            // Closed containment keeps boundary-of-ellipse nodes.
            Some((f1, f2, major)) => f1.distance(p) + f2.distance(p) <= major + 1e-12,
        }
    }

    /// Rebuilds nodes, edges, and adjacency from the tangent descriptors.
    fn assemble(&mut self) {
        self.nodes.clear();
        self.edges.clear();
        self.start_node = None;
        self.goal_node = None;

        // Anchor sets per obstacle, after the ellipse predicate.
        let mut anchors: Vec<Vec<f64>> = vec![Vec::new(); self.obstacles.len()];
        let keep_pair: Vec<&TangentEdge> = self
            .pair_tangents
            .iter()
            .filter(|t| self.inside_ellipse(t.pa) && self.inside_ellipse(t.pb))
            .collect();
        let keep_term: Vec<&(Terminal, ObstacleId, f64, Vec2)> = self
            .terminal_tangents
            .iter()
            .filter(|(_, _, _, p)| self.inside_ellipse(*p))
            .collect();
        for t in &keep_pair {
            if let Anchor::Boundary { obstacle, gamma } = t.a {
                anchors[obstacle].push(gamma);
            }
            if let Anchor::Boundary { obstacle, gamma } = t.b {
                anchors[obstacle].push(gamma);
            }
        }
        for (_, id, gamma, _) in &keep_term {
            anchors[*id].push(*gamma);
        }
        for list in &mut anchors {
            list.sort_by(|a, b| a.partial_cmp(b).unwrap());
            list.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        }

        // Node table: boundary nodes ordered by (obstacle, gamma, sense),
        // then start and goal.
        let mut node_index = std::collections::BTreeMap::new();
        for (id, list) in anchors.iter().enumerate() {
            for &gamma in list {
                for sense in [Sense::Ccw, Sense::Cw] {
                    let idx = self.nodes.len();
                    self.nodes.push(Node {
                        kind: NodeKind::Boundary {
                            obstacle: id,
                            gamma,
                            sense,
                        },
                        position: self.obstacles[id].boundary_point(gamma),
                    });
                    node_index.insert((id, gamma.to_bits(), sense), idx);
                }
            }
        }
        if let Some((start, goal)) = self.terminals {
            self.start_node = Some(self.nodes.len());
            self.nodes.push(Node {
                kind: NodeKind::Start,
                position: start,
            });
            self.goal_node = Some(self.nodes.len());
            self.nodes.push(Node {
                kind: NodeKind::Goal,
                position: goal,
            });
        }

        let lookup = |id: usize, gamma: f64, sense: Sense| -> usize {
            node_index[&(id, gamma.to_bits(), sense)]
        };
        // Sense whose heading at the anchor matches the given direction.
        let sense_for = |id: usize, gamma: f64, dir: Vec2| -> Sense {
            if self.obstacles[id].boundary_tangent(gamma).dot(dir) >= 0.0 {
                Sense::Ccw
            } else {
                Sense::Cw
            }
        };

        let mut edges = Vec::new();
        for t in &keep_pair {
            let (Anchor::Boundary { obstacle: ia, gamma: ga }, Anchor::Boundary { obstacle: ib, gamma: gb }) =
                (t.a, t.b)
            else {
                continue;
            };
            let u = (t.pb - t.pa).normalized();
            // Forward traversal a -> b and its reverse.
            let sa = sense_for(ia, ga, u);
            let sb = sense_for(ib, gb, u);
            edges.push(Edge {
                from: lookup(ia, ga, sa),
                to: lookup(ib, gb, sb),
                geometry: EdgeGeometry::Straight { from: t.pa, to: t.pb },
                length: t.length,
            });
            edges.push(Edge {
                from: lookup(ib, gb, sb.flip()),
                to: lookup(ia, ga, sa.flip()),
                geometry: EdgeGeometry::Straight { from: t.pb, to: t.pa },
                length: t.length,
            });
        }

        if let Some((start, goal)) = self.terminals {
            for (term, id, gamma, p) in &keep_term {
                match term {
                    Terminal::Start => {
                        let u = (*p - start).normalized();
                        let s = sense_for(*id, *gamma, u);
                        edges.push(Edge {
                            from: self.start_node.unwrap(),
                            to: lookup(*id, *gamma, s),
                            geometry: EdgeGeometry::Straight { from: start, to: *p },
                            length: start.distance(*p),
                        });
                    }
                    Terminal::Goal => {
                        let u = (goal - *p).normalized();
                        let s = sense_for(*id, *gamma, u);
                        edges.push(Edge {
                            from: lookup(*id, *gamma, s),
                            to: self.goal_node.unwrap(),
                            geometry: EdgeGeometry::Straight { from: *p, to: goal },
                            length: goal.distance(*p),
                        });
                    }
                }
            }
            if self.direct_edge {
                edges.push(Edge {
                    from: self.start_node.unwrap(),
                    to: self.goal_node.unwrap(),
                    geometry: EdgeGeometry::Straight { from: start, to: goal },
                    length: start.distance(goal),
                });
            }
        }

        // Boundary spans between parameter-adjacent anchors, both senses.
        for (id, list) in anchors.iter().enumerate() {
            let obs = &self.obstacles[id];
            if list.len() < 2 {
                continue;
            }
            for k in 0..list.len() {
                let g_from = list[k];
                let g_to = list[(k + 1) % list.len()];
                let length = obs.forward_gamma_distance(g_from, g_to);
                if length < 1e-12 {
                    continue;
                }
                edges.push(Edge {
                    from: lookup(id, g_from, Sense::Ccw),
                    to: lookup(id, g_to, Sense::Ccw),
                    geometry: EdgeGeometry::Boundary {
                        obstacle: id,
                        gamma_from: g_from,
                        gamma_to: g_to,
                        sense: Sense::Ccw,
                    },
                    length,
                });
                edges.push(Edge {
                    from: lookup(id, g_to, Sense::Cw),
                    to: lookup(id, g_from, Sense::Cw),
                    geometry: EdgeGeometry::Boundary {
                        obstacle: id,
                        gamma_from: g_to,
                        gamma_to: g_from,
                        sense: Sense::Cw,
                    },
                    length,
                });
            }
        }

        edges.sort_by_key(|e| (e.from, e.to));
        self.adjacency = vec![Vec::new(); self.nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            self.adjacency[e.from].push(i);
        }
        self.edges = edges;
    }

    /// Minimum-length path from start to goal. Ties break on fewer edges,
    /// then on lexicographic predecessor order, so results are reproducible.
    pub fn shortest_path(&self) -> Result<PlannedPath, RoadmapError> {
        let (start, goal) = self.terminals.ok_or(RoadmapError::TerminalsMissing)?;
        if start.distance(goal) < 1e-12 {
            return Ok(PlannedPath::empty(start));
        }
        let s = self.start_node.ok_or(RoadmapError::TerminalsMissing)?;
        let g = self.goal_node.ok_or(RoadmapError::TerminalsMissing)?;

        #[derive(PartialEq)]
        struct Key {
            dist: f64,
            hops: u32,
            node: usize,
        }
        impl Eq for Key {}
        impl Ord for Key {
            fn cmp(&self, other: &Self) -> Ordering {
                self.dist
                    .total_cmp(&other.dist)
                    .then(self.hops.cmp(&other.hops))
                    .then(self.node.cmp(&other.node))
                    .reverse()
            }
        }
        impl PartialOrd for Key {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let n = self.nodes.len();
        let mut best: Vec<Option<(f64, u32, usize)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        best[s] = Some((0.0, 0, usize::MAX));
        heap.push(Key {
            dist: 0.0,
            hops: 0,
            node: s,
        });

        while let Some(Key { dist, hops, node }) = heap.pop() {
            let Some((bd, bh, _)) = best[node] else { continue };
            if dist > bd || (dist == bd && hops > bh) {
                continue;
            }
            if node == g {
                break;
            }
            for &ei in &self.adjacency[node] {
                let e = &self.edges[ei];
                let nd = dist + e.length;
                let nh = hops + 1;
                let better = match best[e.to] {
                    None => true,
                    Some((cd, ch, ce)) => {
                        nd < cd || (nd == cd && (nh < ch || (nh == ch && ei < ce)))
                    }
                };
                if better {
                    best[e.to] = Some((nd, nh, ei));
                    heap.push(Key {
                        dist: nd,
                        hops: nh,
                        node: e.to,
                    });
                }
            }
        }

        let Some(_) = best[g] else {
            return Err(RoadmapError::NoPath);
        };
        let mut chain = Vec::new();
        let mut cur = g;
        while cur != s {
            let (_, _, ei) = best[cur].unwrap();
            chain.push(ei);
            cur = self.edges[ei].from;
        }
        chain.reverse();
        let edge_refs: Vec<&Edge> = chain.iter().map(|&i| &self.edges[i]).collect();
        Ok(PlannedPath::from_edges(start, goal, &edge_refs, &self.obstacles))
    }

    /// Exhaustive minimum over all simple start-to-goal paths. Only viable
    /// on small graphs; used to cross-check the search.
    pub fn brute_force_shortest_length(&self) -> Option<f64> {
        let s = self.start_node?;
        let g = self.goal_node?;
        let mut visited = vec![false; self.nodes.len()];
        let mut best = f64::INFINITY;
        fn dfs(
            rm: &Roadmap,
            node: usize,
            goal: usize,
            acc: f64,
            visited: &mut [bool],
            best: &mut f64,
        ) {
            if acc >= *best {
                return;
            }
            if node == goal {
                *best = acc;
                return;
            }
            visited[node] = true;
            for &ei in &rm.adjacency[node] {
                let e = &rm.edges[ei];
                if !visited[e.to] {
                    dfs(rm, e.to, goal, acc + e.length, visited, best);
                }
            }
            visited[node] = false;
        }
        dfs(self, s, g, 0.0, &mut visited, &mut best);
        best.is_finite().then_some(best)
    }
}

/// One geometric segment of a planned path.
#[derive(Debug, Clone, Copy)]
pub enum PathSegment {
    Straight {
        from: Vec2,
        to: Vec2,
        length: f64,
    },
    Arc {
        obstacle: ObstacleId,
        center: Vec2,
        radius: f64,
        /// Boundary angle at segment entry.
        angle_from: f64,
        /// Boundary angle at segment exit; below `angle_from` for clockwise traversal.
        angle_to: f64,
        ccw: bool,
        gamma_from: f64,
        gamma_to: f64,
        length: f64,
    },
}

impl PathSegment {
    pub fn length(&self) -> f64 {
        match self {
            PathSegment::Straight { length, .. } | PathSegment::Arc { length, .. } => *length,
        }
    }
}

/// A heading-continuous path of alternating straights and circular arcs,
/// parameterized by arc length from the start.
#[derive(Debug, Clone)]
pub struct PlannedPath {
    segments: Vec<PathSegment>,
    cumulative: Vec<f64>,
    total_length: f64,
    start: Vec2,
    goal: Vec2,
}

impl PlannedPath {
    fn empty(at: Vec2) -> PlannedPath {
        PlannedPath {
            segments: Vec::new(),
            cumulative: vec![0.0],
            total_length: 0.0,
            start: at,
            goal: at,
        }
    }

    fn from_edges(
        start: Vec2,
        goal: Vec2,
        edges: &[&Edge],
        obstacles: &[InflatedObstacle],
    ) -> PlannedPath {
        // Merge consecutive boundary edges on the same obstacle and sense.
        #[derive(Clone, Copy)]
        enum Item {
            Straight(Vec2, Vec2),
            Span(ObstacleId, f64, f64, Sense),
        }
        let mut items: Vec<Item> = Vec::new();
        for e in edges {
            match e.geometry {
                EdgeGeometry::Straight { from, to } => items.push(Item::Straight(from, to)),
                EdgeGeometry::Boundary {
                    obstacle,
                    gamma_from,
                    gamma_to,
                    sense,
                } => match items.last_mut() {
                    Some(Item::Span(o, _, g_to, s)) if *o == obstacle && *s == sense => {
                        debug_assert!(
                            obstacles[obstacle].cyclic_gamma_distance(*g_to, gamma_from) < 1e-9
                        );
                        *g_to = gamma_to;
                    }
                    _ => items.push(Item::Span(obstacle, gamma_from, gamma_to, sense)),
                },
            }
        }

        let mut segments: Vec<PathSegment> = Vec::new();
        let mut push_straight = |segments: &mut Vec<PathSegment>, from: Vec2, to: Vec2| {
            let length = from.distance(to);
            if length < 1e-12 {
                return;
            }
            if let Some(PathSegment::Straight {
                to: prev_to,
                from: prev_from,
                length: prev_len,
            }) = segments.last_mut()
            {
                // Merge collinear continuations.
                let d_prev = (*prev_to - *prev_from).normalized();
                let d_new = (to - from).normalized();
                if prev_to.distance(from) < 1e-9 && d_prev.cross(d_new).abs() < 1e-9 {
                    *prev_to = to;
                    *prev_len = prev_from.distance(to);
                    return;
                }
            }
            segments.push(PathSegment::Straight { from, to, length });
        };

        for item in items {
            match item {
                Item::Straight(a, b) => push_straight(&mut segments, a, b),
                Item::Span(id, g_from, g_to, sense) => {
                    decompose_span(&obstacles[id], id, g_from, g_to, sense, &mut segments, &mut push_straight);
                }
            }
        }

        let mut cumulative = Vec::with_capacity(segments.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for s in &segments {
            acc += s.length();
            cumulative.push(acc);
        }
        PlannedPath {
            segments,
            cumulative,
            total_length: acc,
            start,
            goal,
        }
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn start(&self) -> Vec2 {
        self.start
    }

    pub fn goal(&self) -> Vec2 {
        self.goal
    }

    pub fn straight_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, PathSegment::Straight { .. }))
            .count()
    }

    pub fn arc_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, PathSegment::Arc { .. }))
            .count()
    }

    fn locate(&self, gamma: f64) -> Result<(usize, f64), RoadmapError> {
        let tol = 1e-9 * (1.0 + self.total_length);
        if gamma < -tol || gamma > self.total_length + tol {
            return Err(RoadmapError::OutOfRange {
                gamma,
                total: self.total_length,
            });
        }
        if self.segments.is_empty() {
            return Ok((usize::MAX, 0.0));
        }
        let g = gamma.clamp(0.0, self.total_length);
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&g).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        }
        .min(self.segments.len() - 1);
        Ok((idx, g - self.cumulative[idx]))
    }

    /// Position after traveling `gamma` along the path.
    pub fn path_point(&self, gamma: f64) -> Result<Vec2, RoadmapError> {
        let (idx, local) = self.locate(gamma)?;
        if idx == usize::MAX {
            return Ok(self.start);
        }
        Ok(match &self.segments[idx] {
            PathSegment::Straight { from, to, length } => {
                from.lerp(*to, if *length > 0.0 { local / length } else { 0.0 })
            }
            PathSegment::Arc {
                center,
                radius,
                angle_from,
                ccw,
                ..
            } => {
                let psi = angle_from + if *ccw { local / radius } else { -local / radius };
                *center + Vec2::from_angle(psi) * *radius
            }
        })
    }

    /// Heading angle (radians) after traveling `gamma` along the path.
    pub fn path_heading(&self, gamma: f64) -> Result<f64, RoadmapError> {
        self.path_heading_vec(gamma).map(Vec2::angle)
    }

    /// Unit heading vector at `gamma`.
    pub fn path_heading_vec(&self, gamma: f64) -> Result<Vec2, RoadmapError> {
        let (idx, local) = self.locate(gamma)?;
        if idx == usize::MAX {
            return Ok(Vec2::new(1.0, 0.0));
        }
        Ok(match &self.segments[idx] {
            PathSegment::Straight { from, to, .. } => (*to - *from).normalized(),
            PathSegment::Arc {
                radius,
                angle_from,
                ccw,
                ..
            } => {
                let psi = angle_from + if *ccw { local / radius } else { -local / radius };
                let t = Vec2::from_angle(psi).perp();
                if *ccw {
                    t
                } else {
                    -t
                }
            }
        })
    }

    /// Second derivative of position with respect to arc length (zero on
    /// straights, center-pointing with magnitude `1/radius` on arcs).
    pub fn curvature_at(&self, gamma: f64) -> Result<Vec2, RoadmapError> {
        let (idx, local) = self.locate(gamma)?;
        if idx == usize::MAX {
            return Ok(Vec2::ZERO);
        }
        Ok(match &self.segments[idx] {
            PathSegment::Straight { .. } => Vec2::ZERO,
            PathSegment::Arc {
                radius,
                angle_from,
                ccw,
                ..
            } => {
                let psi = angle_from + if *ccw { local / radius } else { -local / radius };
                -Vec2::from_angle(psi) / *radius
            }
        })
    }

    /// Arc radius at `gamma` when the parameter falls on an arc segment.
    pub fn arc_radius_at(&self, gamma: f64) -> Option<f64> {
        let (idx, _) = self.locate(gamma).ok()?;
        if idx == usize::MAX {
            return None;
        }
        match &self.segments[idx] {
            PathSegment::Arc { radius, .. } => Some(*radius),
            PathSegment::Straight { .. } => None,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn decompose_span(
    obs: &InflatedObstacle,
    id: ObstacleId,
    g_from: f64,
    g_to: f64,
    sense: Sense,
    segments: &mut Vec<PathSegment>,
    push_straight: &mut impl FnMut(&mut Vec<PathSegment>, Vec2, Vec2),
) {
    let span = match sense {
        Sense::Ccw => obs.forward_gamma_distance(g_from, g_to),
        Sense::Cw => obs.forward_gamma_distance(g_to, g_from),
    };
    let mut remaining = span;
    let mut g = obs.wrap_gamma(g_from);
    while remaining > 1e-12 {
        let (idx, local) = obs.piece_at(g);
        let piece = &obs.pieces()[idx];
        let (take, g_next) = match sense {
            Sense::Ccw => {
                let room = piece.length - local;
                if room < 1e-12 {
                    g = obs.wrap_gamma(g + room.max(0.0) + 1e-13);
                    continue;
                }
                let take = room.min(remaining);
                (take, obs.wrap_gamma(g + take))
            }
            Sense::Cw => {
                if local < 1e-12 {
                    // Step onto the previous piece.
                    g = obs.wrap_gamma(g - 1e-13);
                    continue;
                }
                let take = local.min(remaining);
                (take, obs.wrap_gamma(g - take))
            }
        };
        match &piece.kind {
            PieceKind::Segment { .. } => {
                let a = obs.boundary_point(g);
                let b = obs.boundary_point(if sense == Sense::Ccw { g + take } else { g - take });
                push_straight(segments, a, b);
            }
            PieceKind::Arc {
                center,
                radius,
                start_angle,
                ..
            } => {
                if take * radius > 0.0 && take > 1e-12 {
                    let psi_here = start_angle + local / radius;
                    let (angle_from, angle_to, ccw) = match sense {
                        Sense::Ccw => (psi_here, psi_here + take / radius, true),
                        Sense::Cw => (psi_here, psi_here - take / radius, false),
                    };
                    segments.push(PathSegment::Arc {
                        obstacle: id,
                        center: *center,
                        radius: *radius,
                        angle_from,
                        angle_to,
                        ccw,
                        gamma_from: g,
                        gamma_to: g_next,
                        length: take,
                    });
                }
            }
        }
        g = g_next;
        remaining -= take;
    }
}

// ---------------------------------------------------------------------------
// Path intersection counting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Prim {
    Seg(Vec2, Vec2),
    /// Circle arc with angular interval `[lo, lo + span]`, `span <= 2 pi`.
    Arc {
        center: Vec2,
        radius: f64,
        lo: f64,
        span: f64,
    },
}

fn path_prims(path: &PlannedPath) -> Vec<Prim> {
    path.segments()
        .iter()
        .map(|s| match *s {
            PathSegment::Straight { from, to, .. } => Prim::Seg(from, to),
            PathSegment::Arc {
                center,
                radius,
                angle_from,
                angle_to,
                ..
            } => {
                let (a, b) = if angle_to >= angle_from {
                    (angle_from, angle_to)
                } else {
                    (angle_to, angle_from)
                };
                Prim::Arc {
                    center,
                    radius,
                    lo: a.rem_euclid(std::f64::consts::TAU),
                    span: (b - a).min(std::f64::consts::TAU),
                }
            }
        })
        .collect()
}

const XTOL: f64 = 1e-9;

fn in_arc(lo: f64, span: f64, ang: f64, ang_tol: f64) -> bool {
    (ang - lo).rem_euclid(std::f64::consts::TAU) <= span + ang_tol
        || (ang - lo).rem_euclid(std::f64::consts::TAU) >= std::f64::consts::TAU - ang_tol
}

/// Intersection artifacts between two primitives: isolated points and
/// shared sub-curves (represented by their endpoints).
fn prim_intersections(a: &Prim, b: &Prim) -> Vec<(Vec2, Vec2)> {
    match (a, b) {
        (Prim::Seg(p1, p2), Prim::Seg(q1, q2)) => seg_seg(*p1, *p2, *q1, *q2),
        (Prim::Seg(p1, p2), Prim::Arc { center, radius, lo, span }) => {
            seg_arc(*p1, *p2, *center, *radius, *lo, *span)
        }
        (Prim::Arc { center, radius, lo, span }, Prim::Seg(p1, p2)) => {
            seg_arc(*p1, *p2, *center, *radius, *lo, *span)
        }
        (
            Prim::Arc { center: c1, radius: r1, lo: lo1, span: s1 },
            Prim::Arc { center: c2, radius: r2, lo: lo2, span: s2 },
        ) => arc_arc(*c1, *r1, *lo1, *s1, *c2, *r2, *lo2, *s2),
    }
}

fn seg_seg(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> Vec<(Vec2, Vec2)> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let denom = d1.cross(d2);
    let scale = d1.norm() * d2.norm();
    if denom.abs() <= 1e-12 * scale.max(1e-30) {
        // Parallel; collinear overlap?
        let off = (q1 - p1).cross(d1.normalized());
        if off.abs() > XTOL {
            return Vec::new();
        }
        let len = d1.norm();
        let t1 = (q1 - p1).dot(d1) / (len * len);
        let t2 = (q2 - p1).dot(d1) / (len * len);
        let (a, b) = (t1.min(t2).max(0.0), t1.max(t2).min(1.0));
        if b < a - XTOL / len.max(XTOL) {
            return Vec::new();
        }
        let pa = p1 + d1 * a.clamp(0.0, 1.0);
        let pb = p1 + d1 * b.clamp(0.0, 1.0);
        return vec![(pa, pb)];
    }
    let t = (q1 - p1).cross(d2) / denom;
    let s = (q1 - p1).cross(d1) / denom;
    let tol_t = XTOL / d1.norm().max(XTOL);
    let tol_s = XTOL / d2.norm().max(XTOL);
    if (-tol_t..=1.0 + tol_t).contains(&t) && (-tol_s..=1.0 + tol_s).contains(&s) {
        let p = p1 + d1 * t.clamp(0.0, 1.0);
        vec![(p, p)]
    } else {
        Vec::new()
    }
}

fn seg_arc(p1: Vec2, p2: Vec2, c: Vec2, r: f64, lo: f64, span: f64) -> Vec<(Vec2, Vec2)> {
    let d = p2 - p1;
    let len = d.norm();
    if len < 1e-15 {
        return Vec::new();
    }
    let f = p1 - c;
    // |f + t d|^2 = r^2
    let aq = d.dot(d);
    let bq = 2.0 * f.dot(d);
    let cq = f.dot(f) - r * r;
    let disc = bq * bq - 4.0 * aq * cq;
    let ang_tol = XTOL / r;
    let mut out = Vec::new();
    let mut push_candidate = |t: f64| {
        let tol_t = XTOL / len;
        if !(-tol_t..=1.0 + tol_t).contains(&t) {
            return;
        }
        let p = p1 + d * t.clamp(0.0, 1.0);
        let ang = (p - c).angle();
        if in_arc(lo, span, ang, ang_tol) {
            out.push((p, p));
        }
    };
    if disc >= 0.0 {
        let sq = disc.sqrt();
        push_candidate((-bq - sq) / (2.0 * aq));
        if sq > 0.0 {
            push_candidate((-bq + sq) / (2.0 * aq));
        }
    } else {
        // Near-tangential contact.
        let t_closest = (-bq / (2.0 * aq)).clamp(0.0, 1.0);
        let p = p1 + d * t_closest;
        if (p.distance(c) - r).abs() <= XTOL {
            push_candidate(t_closest);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn arc_arc(
    c1: Vec2,
    r1: f64,
    lo1: f64,
    s1: f64,
    c2: Vec2,
    r2: f64,
    lo2: f64,
    s2: f64,
) -> Vec<(Vec2, Vec2)> {
    let d = c2.distance(c1);
    let ang_tol1 = XTOL / r1;
    let ang_tol2 = XTOL / r2;
    if d < XTOL && (r1 - r2).abs() < XTOL {
        // Same circle: angular interval overlaps.
        let mut out = Vec::new();
        // Work relative to lo1.
        let rel = (lo2 - lo1).rem_euclid(std::f64::consts::TAU);
        for start in [rel, rel - std::f64::consts::TAU] {
            let a = start.max(0.0);
            let b = (start + s2).min(s1);
            if b >= a - ang_tol1 {
                let pa = c1 + Vec2::from_angle(lo1 + a.max(0.0)) * r1;
                let pb = c1 + Vec2::from_angle(lo1 + b.min(s1)) * r1;
                out.push((pa, pb));
            }
        }
        return out;
    }
    if d > r1 + r2 + XTOL || d < (r1 - r2).abs() - XTOL {
        return Vec::new();
    }
    let d = d.max(1e-15);
    let axis = (c2 - c1) / d;
    let x = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - x * x;
    let h = h2.max(0.0).sqrt();
    let base = c1 + axis * x;
    let mut out = Vec::new();
    let mut push = |p: Vec2| {
        let a1 = (p - c1).angle();
        let a2 = (p - c2).angle();
        if in_arc(lo1, s1, a1, ang_tol1) && in_arc(lo2, s2, a2, ang_tol2) {
            out.push((p, p));
        }
    };
    push(base + axis.perp() * h);
    if h > 0.0 {
        push(base - axis.perp() * h);
    }
    out
}

/// Number of connected components of the geometric intersection of two
/// path traces. Tangential touching counts; identical traces count as one.
pub fn count_path_intersections(path1: &PlannedPath, path2: &PlannedPath) -> usize {
    let prims1 = path_prims(path1);
    let prims2 = path_prims(path2);
    let mut elements: Vec<(Vec2, Vec2)> = Vec::new();
    for a in &prims1 {
        for b in &prims2 {
            elements.extend(prim_intersections(a, b));
        }
    }
    if elements.is_empty() {
        return 0;
    }

    // Union-find over elements; connect when endpoint sets come within tol.
    let n = elements.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let close = |a: &(Vec2, Vec2), b: &(Vec2, Vec2)| -> bool {
        let tol = 1e-6;
        for p in [a.0, a.1] {
            for q in [b.0, b.1] {
                if p.distance(q) < tol {
                    return true;
                }
            }
        }
        // Endpoint of one inside the other overlap segment.
        crate::vec2::point_segment_distance(a.0, b.0, b.1) < tol
            || crate::vec2::point_segment_distance(a.1, b.0, b.1) < tol
            || crate::vec2::point_segment_distance(b.0, a.0, a.1) < tol
            || crate::vec2::point_segment_distance(b.1, a.0, a.1) < tol
    };
    for i in 0..n {
        for j in (i + 1)..n {
            if close(&elements[i], &elements[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}
