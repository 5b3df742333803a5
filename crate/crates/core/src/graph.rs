//! Metric graphs: vertices, oriented edges, bonds, subdivision and cutting.
//!
//! Vertex and edge ids are opaque integers. Internally both are stored sorted
//! by id and addressed by index, so every matrix layout derived from a graph is
//! reproducible.

use std::collections::BTreeMap;

use crate::conditions::VertexCondition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: u64,
    pub condition: VertexCondition,
}

/// An edge identified with `[0, length]`, running from `tail` (x = 0) to
/// `head` (x = length). `tail` and `head` are vertex indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: u64,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// Which end of an edge touches a vertex. Head sorts before tail so that a
/// self-loop lists its incoming end first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Head,
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

impl EdgeEnd {
    /// Sign converting the oriented derivative d/dx at this end into the
    /// derivative pointing into the edge. This is the only place where the
    /// orientation enters a derivative.
    pub fn into_edge_sign(self) -> f64 {
        match self.end {
            End::Tail => 1.0,
            End::Head => -1.0,
        }
    }

    /// Bond leaving the vertex through this end.
    pub fn outgoing_bond(self) -> usize {
        match self.end {
            End::Tail => 2 * self.edge,
            End::Head => 2 * self.edge + 1,
        }
    }

    /// Bond arriving at the vertex through this end.
    pub fn incoming_bond(self) -> usize {
        match self.end {
            End::Head => 2 * self.edge,
            End::Tail => 2 * self.edge + 1,
        }
    }
}

/// Directed copy of an edge. Bond `2e` runs tail to head, bond `2e + 1` is its
/// reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond(pub usize);

impl Bond {
    pub fn edge(self) -> usize {
        self.0 / 2
    }
    pub fn is_forward(self) -> bool {
        self.0 % 2 == 0
    }
    pub fn reversed(self) -> Bond {
        Bond(self.0 ^ 1)
    }
}

/// A location on an edge, addressed by edge id and coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOnEdge {
    pub edge: u64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeEnd>>,
}

impl MetricGraph {
    /// Builds a graph from vertices and `(id, tail id, head id, length)` edges.
    /// Connectivity is not required here; document input checks it.
    pub fn new(
        mut vertices: Vec<Vertex>,
        edges: Vec<(u64, u64, u64, f64)>,
    ) -> Result<MetricGraph> {
        vertices.sort_by_key(|v| v.id);
        if vertices.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidGraph("duplicate vertex id".into()));
        }
        let index: BTreeMap<u64, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let mut es = Vec::with_capacity(edges.len());
        for (id, tail, head, length) in edges {
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} has non-positive length {length}"
                )));
            }
            let t = *index.get(&tail).ok_or(Error::UnknownVertex(tail))?;
            let h = *index.get(&head).ok_or(Error::UnknownVertex(head))?;
            es.push(Edge { id, tail: t, head: h, length });
        }
        es.sort_by_key(|e| e.id);
        if es.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidGraph("duplicate edge id".into()));
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, e) in es.iter().enumerate() {
            incidence[e.tail].push(EdgeEnd { edge: i, end: End::Tail });
            incidence[e.head].push(EdgeEnd { edge: i, end: End::Head });
        }
        for ends in &mut incidence {
            ends.sort();
        }
        Ok(MetricGraph { vertices, edges: es, incidence })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn bond_count(&self) -> usize {
        2 * self.edges.len()
    }
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }
    pub fn min_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }
    pub fn max_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// Edge ends at vertex `v`, sorted by (edge index, head before tail).
    pub fn ends(&self, v: usize) -> &[EdgeEnd] {
        &self.incidence[v]
    }
    /// Degree of `v`; a self-loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }
    pub fn vertex_at(&self, end: EdgeEnd) -> usize {
        let e = &self.edges[end.edge];
        match end.end {
            End::Tail => e.tail,
            End::Head => e.head,
        }
    }

    pub fn vertex_index(&self, id: u64) -> Result<usize> {
        self.vertices
            .binary_search_by_key(&id, |v| v.id)
            .map_err(|_| Error::UnknownVertex(id))
    }
    pub fn edge_index(&self, id: u64) -> Result<usize> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map_err(|_| Error::UnknownEdge(id))
    }

    pub fn condition(&self, v: usize) -> &VertexCondition {
        &self.vertices[v].condition
    }

    /// Copy of the graph with the condition at vertex index `v` replaced.
    pub fn with_condition(&self, v: usize, condition: VertexCondition) -> MetricGraph {
        let mut g = self.clone();
        g.vertices[v].condition = condition;
        g
    }

    /// Copy of the graph with the same condition placed at every listed vertex.
    pub fn with_conditions(&self, vs: &[usize], condition: VertexCondition) -> MetricGraph {
        let mut g = self.clone();
        for &v in vs {
            g.vertices[v].condition = condition;
        }
        g
    }

    /// Copy of the graph with every vertex Neumann–Kirchhoff.
    pub fn with_all_nk(&self) -> MetricGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.condition = VertexCondition::NeumannKirchhoff;
        }
        g
    }

    /// Copy of the graph with edge index `e` reversed. Derivatives on that
    /// edge change sign, so an s-point becomes a (-s)-point.
    pub fn reversed_edge(&self, e: usize) -> MetricGraph {
        let mut g = self.clone();
        let edge = &mut g.edges[e];
        std::mem::swap(&mut edge.tail, &mut edge.head);
        g.rebuild_incidence();
        g
    }

    fn rebuild_incidence(&mut self) {
        let mut incidence = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            incidence[e.tail].push(EdgeEnd { edge: i, end: End::Tail });
            incidence[e.head].push(EdgeEnd { edge: i, end: End::Head });
        }
        for ends in &mut incidence {
            ends.sort();
        }
        self.incidence = incidence;
    }

    /// Connected-component label for every vertex, labels numbered from 0 in
    /// order of first appearance.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let a = find(&mut parent, e.tail);
            let b = find(&mut parent, e.head);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut out = vec![0; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[v] = label[r];
        }
        (out, next)
    }

    pub fn components(&self) -> usize {
        self.component_labels().1
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    /// First Betti number E - V + C.
    pub fn betti(&self) -> usize {
        self.edges.len() + self.components() - self.vertices.len()
    }

    fn next_vertex_id(&self) -> u64 {
        self.vertices.last().map_or(0, |v| v.id + 1)
    }
    fn next_edge_id(&self) -> u64 {
        self.edges.last().map_or(0, |e| e.id + 1)
    }
}

/// Result of [`subdivide`]: the refined graph and, for every input point, the
/// vertex index it became.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: MetricGraph,
    pub point_vertices: Vec<usize>,
}

/// Inserts a Neumann–Kirchhoff vertex of degree two at every interior point.
/// Points at `x = 0` or `x = length` resolve to the incident vertex. The first
/// piece of a split edge keeps the edge id; later pieces and new vertices get
/// fresh ids above the current maxima, in order of (edge id, x).
pub fn subdivide(graph: &MetricGraph, points: &[PointOnEdge]) -> Result<Subdivision> {
    let mut per_edge: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
    let mut resolved = vec![None; points.len()];
    for (i, p) in points.iter().enumerate() {
        let e = graph.edge_index(p.edge)?;
        let edge = &graph.edges[e];
        if !(p.x >= 0.0 && p.x <= edge.length) {
            return Err(Error::PointOutOfRange { edge: p.edge, x: p.x, length: edge.length });
        }
        if p.x == 0.0 {
            resolved[i] = Some(edge.tail);
        } else if p.x == edge.length {
            resolved[i] = Some(edge.head);
        } else {
            per_edge.entry(e).or_default().push((p.x, i));
        }
    }

    let mut vertices = graph.vertices.clone();
    let mut next_v = graph.next_vertex_id();
    let mut next_e = graph.next_edge_id();
    let mut new_edges = Vec::new();
    let mut new_vertex_ids = vec![None; points.len()];
    for (e, edge) in graph.edges.iter().enumerate() {
        let tail_id = graph.vertices[edge.tail].id;
        let head_id = graph.vertices[edge.head].id;
        let Some(list) = per_edge.get_mut(&e) else {
            new_edges.push((edge.id, tail_id, head_id, edge.length));
            continue;
        };
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicatePoint { edge: edge.id, x: w[0].0 });
        }
        let mut prev_id = tail_id;
        let mut prev_x = 0.0;
        let mut edge_id = edge.id;
        for &(x, i) in list.iter() {
            let vid = next_v;
            next_v += 1;
            vertices.push(Vertex { id: vid, condition: VertexCondition::NeumannKirchhoff });
            new_vertex_ids[i] = Some(vid);
            new_edges.push((edge_id, prev_id, vid, x - prev_x));
            edge_id = next_e;
            next_e += 1;
            prev_id = vid;
            prev_x = x;
        }
        new_edges.push((edge_id, prev_id, head_id, edge.length - prev_x));
    }
    let refined = MetricGraph::new(vertices, new_edges)?;
    let mut point_vertices = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        let v = match (resolved[i], new_vertex_ids[i]) {
            (Some(v), _) => refined.vertex_index(graph.vertices[v].id)?,
            (None, Some(id)) => refined.vertex_index(id)?,
            (None, None) => unreachable!("every point is resolved or inserted"),
        };
        point_vertices.push(v);
    }
    Ok(Subdivision { graph: refined, point_vertices })
}

/// A location to cut at: an edge point or an existing degree-2 vertex id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutLocation {
    Point(PointOnEdge),
    Vertex(u64),
}

#[derive(Debug, Clone)]
pub struct CutResult {
    pub graph: MetricGraph,
    pub components: usize,
    /// Edge index in the input graph to edge index in the cut graph. Edge ids
    /// are preserved, so this is the identity on ids.
    pub edge_map: Vec<usize>,
    /// For every cut location, the two new degree-1 vertex indices. The first
    /// carries the incoming (head) end when there is one.
    pub sides: Vec<(usize, usize)>,
}

/// Cuts the graph at each location, splitting a degree-2 vertex into two
/// degree-1 vertices that inherit its condition. The incoming side keeps the
/// vertex id; the other side gets a fresh id.
pub fn cut(graph: &MetricGraph, locations: &[CutLocation]) -> Result<CutResult> {
    let points: Vec<PointOnEdge> = locations
        .iter()
        .filter_map(|l| match l {
            CutLocation::Point(p) => Some(*p),
            CutLocation::Vertex(_) => None,
        })
        .collect();
    let sub = subdivide(graph, &points)?;
    let g = &sub.graph;
    let mut point_iter = sub.point_vertices.iter();
    let mut cut_vertices = Vec::with_capacity(locations.len());
    for l in locations {
        let v = match l {
            CutLocation::Point(_) => *point_iter.next().expect("one vertex per point"),
            CutLocation::Vertex(id) => g.vertex_index(*id)?,
        };
        if g.degree(v) != 2 {
            return Err(Error::UnsupportedDegree {
                vertex: g.vertices[v].id,
                degree: g.degree(v),
                expected: "2",
            });
        }
        if cut_vertices.contains(&v) {
            return Err(Error::InvalidGraph(format!(
                "vertex {} listed twice in cut set",
                g.vertices[v].id
            )));
        }
        cut_vertices.push(v);
    }

    let mut vertices = g.vertices.clone();
    let mut next_v = g.next_vertex_id();
    // second-side vertex id for every (vertex, end) that is rewired
    let mut rewire: BTreeMap<EdgeEnd, u64> = BTreeMap::new();
    let mut side_ids = Vec::with_capacity(cut_vertices.len());
    for &v in &cut_vertices {
        let ends = g.ends(v);
        // the incoming end stays on the original vertex
        let second = if ends[0].end == End::Tail && ends[1].end == End::Head {
            ends[0]
        } else {
            ends[1]
        };
        let id = next_v;
        next_v += 1;
        vertices.push(Vertex { id, condition: g.vertices[v].condition });
        rewire.insert(second, id);
        side_ids.push((g.vertices[v].id, id));
    }
    let edges = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let tail = rewire
                .get(&EdgeEnd { edge: i, end: End::Tail })
                .copied()
                .unwrap_or(g.vertices[e.tail].id);
            let head = rewire
                .get(&EdgeEnd { edge: i, end: End::Head })
                .copied()
                .unwrap_or(g.vertices[e.head].id);
            (e.id, tail, head, e.length)
        })
        .collect();
    let out = MetricGraph::new(vertices, edges)?;
    let edge_map = graph
        .edges
        .iter()
        .map(|e| out.edge_index(e.id))
        .collect::<Result<Vec<_>>>()?;
    let sides = side_ids
        .into_iter()
        .map(|(a, b)| Ok((out.vertex_index(a)?, out.vertex_index(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let components = out.components();
    Ok(CutResult { graph: out, components, edge_map, sides })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nk(id: u64) -> Vertex {
        Vertex { id, condition: VertexCondition::NeumannKirchhoff }
    }

    fn interval(l: f64) -> MetricGraph {
        MetricGraph::new(vec![nk(0), nk(1)], vec![(0, 0, 1, l)]).unwrap()
    }

    fn star3() -> MetricGraph {
        MetricGraph::new(
            vec![nk(0), nk(1), nk(2), nk(3)],
            vec![(0, 0, 1, 1.0), (1, 0, 2, 2.0), (2, 0, 3, 3.0)],
        )
        .unwrap()
    }

    fn glasses() -> MetricGraph {
        MetricGraph::new(
            vec![nk(0), nk(1)],
            vec![(0, 0, 0, 1.0), (1, 0, 1, 0.7), (2, 1, 1, 1.3)],
        )
        .unwrap()
    }

    #[test]
    fn subdivide_single_edge() {
        let s = subdivide(&interval(2.0), &[PointOnEdge { edge: 0, x: 1.0 }]).unwrap();
        let lengths: Vec<f64> = s.graph.edges().iter().map(|e| e.length).collect();
        assert_eq!(lengths, vec![1.0, 1.0]);
        assert_eq!(s.graph.degree(s.point_vertices[0]), 2);
    }

    #[test]
    fn subdivide_empty_is_identity() {
        let g = star3();
        assert_eq!(subdivide(&g, &[]).unwrap().graph, g);
    }

    #[test]
    fn subdivide_star_midpoints() {
        let g = star3();
        let pts: Vec<_> = g
            .edges()
            .iter()
            .map(|e| PointOnEdge { edge: e.id, x: e.length / 2.0 })
            .collect();
        let s = subdivide(&g, &pts).unwrap();
        assert_eq!(s.graph.edge_count(), 6);
        assert_eq!(s.graph.vertex_count(), 7);
        assert_eq!(s.graph.total_length(), g.total_length());
        assert!(s.graph.is_connected());
    }

    #[test]
    fn subdivide_endpoints_resolve_to_vertices() {
        let g = interval(2.0);
        let s = subdivide(&g, &[PointOnEdge { edge: 0, x: 2.0 }]).unwrap();
        assert_eq!(s.graph, g);
        assert_eq!(s.point_vertices, vec![1]);
    }

    #[test]
    fn subdivide_rejects_duplicates_and_range() {
        let g = interval(2.0);
        let p = PointOnEdge { edge: 0, x: 0.5 };
        assert!(matches!(subdivide(&g, &[p, p]), Err(Error::DuplicatePoint { .. })));
        let q = PointOnEdge { edge: 0, x: 2.5 };
        assert!(matches!(subdivide(&g, &[q]), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn betti_examples() {
        assert_eq!(star3().betti(), 0);
        let loop1 = MetricGraph::new(vec![nk(0)], vec![(0, 0, 0, 1.0)]).unwrap();
        assert_eq!(loop1.betti(), 1);
        assert_eq!(loop1.degree(0), 2);
        assert_eq!(glasses().betti(), 2);
    }

    #[test]
    fn cut_interval_at_midpoint() {
        let c = cut(&interval(2.0), &[CutLocation::Point(PointOnEdge { edge: 0, x: 1.0 })])
            .unwrap();
        assert_eq!(c.components, 2);
        assert_eq!(c.graph.betti(), 0);
        let (a, b) = c.sides[0];
        assert_eq!(c.graph.degree(a), 1);
        assert_eq!(c.graph.degree(b), 1);
        assert_eq!(c.graph.ends(a)[0].end, End::Head);
    }

    #[test]
    fn cut_loop_opens_it() {
        let loop1 = MetricGraph::new(vec![nk(0)], vec![(0, 0, 0, 1.0)]).unwrap();
        let c = cut(&loop1, &[CutLocation::Point(PointOnEdge { edge: 0, x: 0.3 })]).unwrap();
        assert_eq!(c.components, 1);
        assert_eq!(c.graph.betti(), 0);
        // the loop vertex itself has degree two and can be cut as well
        let c = cut(&loop1, &[CutLocation::Vertex(0)]).unwrap();
        assert_eq!((c.components, c.graph.betti()), (1, 0));
    }

    #[test]
    fn cut_glasses_on_both_loops() {
        let g = glasses();
        let c = cut(
            &g,
            &[
                CutLocation::Point(PointOnEdge { edge: 0, x: 0.5 }),
                CutLocation::Point(PointOnEdge { edge: 2, x: 0.5 }),
            ],
        )
        .unwrap();
        assert_eq!(c.graph.betti(), 0);
        assert_eq!(c.components, 1);
        assert!((c.graph.total_length() - g.total_length()).abs() < 1e-15);
    }

    #[test]
    fn cut_rejects_high_degree() {
        assert!(matches!(
            cut(&star3(), &[CutLocation::Vertex(0)]),
            Err(Error::UnsupportedDegree { degree: 3, .. })
        ));
    }

    #[test]
    fn bonds_are_an_involution() {
        for b in 0..8 {
            let b = Bond(b);
            assert_ne!(b, b.reversed());
            assert_eq!(b.reversed().reversed(), b);
            assert_eq!(b.edge(), b.reversed().edge());
        }
    }
}
