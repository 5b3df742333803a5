//! The Robin map Λ_s(c) on a marked point set B.
//!
//! Cutting the graph at B leaves domains D_i. On each domain the boundary
//! value problem -u'' = c u, γ^s(u) = w on the attachments to B, and the
//! graph's own conditions elsewhere, is solved in closed form, and the
//! γ^s⋆ data of the solution gives the domain block. The blocks are summed
//! with weight +1 on the incoming (side 1) attachment of a point and -1 on
//! the outgoing one, so that Λ_s(c) γ^s(f) = γ₁^s⋆(f) - γ₂^s⋆(f).

use nalgebra::DMatrix;
use std::f64::consts::FRAC_PI_2;

use crate::conditions::{sides, vertex_block, ExtendedReal, PrueferAngle, VertexCondition};
use crate::error::{Error, Result};
use crate::graph::{cut, subdivide, CutLocation, End, EdgeEnd, MetricGraph};
use crate::linalg::inertia;

/// A graph with the points of B turned into vertices, in the coordinate
/// order of ℓ²(B).
#[derive(Debug, Clone)]
pub struct MarkedGraph {
    pub graph: MetricGraph,
    /// Vertex index in `graph` of every member of B.
    pub marked: Vec<usize>,
    /// (edge id, x) of every member, the sort key of ℓ²(B). A vertex member
    /// is placed at its incoming end when it has one.
    pub positions: Vec<(u64, f64)>,
}

impl MarkedGraph {
    pub fn new(graph: &MetricGraph, b: &[CutLocation]) -> Result<MarkedGraph> {
        let mut keyed = Vec::with_capacity(b.len());
        for loc in b {
            let key = match *loc {
                CutLocation::Point(p) => {
                    let e = graph.edge_index(p.edge)?;
                    let l = graph.edges()[e].length;
                    if !(0.0..=l).contains(&p.x) {
                        return Err(Error::PointOutOfRange { edge: p.edge, x: p.x, length: l });
                    }
                    (p.edge, p.x)
                }
                CutLocation::Vertex(id) => {
                    let v = graph.vertex_index(id)?;
                    let ends = graph.ends(v);
                    let end = ends.iter().find(|e| e.end == End::Head).or(ends.first());
                    let Some(end) = end else {
                        return Err(Error::UnsupportedDegree { vertex: id, degree: 0, expected: "1 or 2" });
                    };
                    let edge = &graph.edges()[end.edge];
                    (edge.id, if end.end == End::Head { edge.length } else { 0.0 })
                }
            };
            keyed.push((key, *loc));
        }
        keyed.sort_by(|a, b| a.0 .0.cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));

        let points: Vec<_> = keyed
            .iter()
            .filter_map(|(_, l)| match l {
                CutLocation::Point(p) => Some(*p),
                CutLocation::Vertex(_) => None,
            })
            .collect();
        let sub = subdivide(graph, &points)?;
        let mut next_point = sub.point_vertices.iter();
        let mut marked = Vec::with_capacity(keyed.len());
        for (_, loc) in &keyed {
            let v = match loc {
                CutLocation::Point(_) => *next_point.next().expect("one vertex per point"),
                CutLocation::Vertex(id) => sub.graph.vertex_index(*id)?,
            };
            let id = sub.graph.vertices()[v].id;
            match sub.graph.degree(v) {
                1 => {}
                2 => {
                    sides(&sub.graph, v)?;
                }
                d => return Err(Error::UnsupportedDegree { vertex: id, degree: d, expected: "1 or 2" }),
            }
            if marked.contains(&v) {
                return Err(Error::InvalidGraph(format!("vertex {id} marked twice")));
            }
            marked.push(v);
        }
        Ok(MarkedGraph {
            graph: sub.graph,
            marked,
            positions: keyed.into_iter().map(|(k, _)| k).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.marked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marked.is_empty()
    }

    /// The graph with δ_s(t) on every marked vertex.
    pub fn family(&self, s: ExtendedReal, t: ExtendedReal) -> MetricGraph {
        self.graph.with_conditions(&self.marked, VertexCondition::delta_s(s, t))
    }
}

/// Which trace of a marked point a domain sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    /// The incoming end, derivative pointing into the vertex.
    One,
    /// The outgoing end, derivative pointing into the edge.
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attachment {
    /// Coordinate of the point in ℓ²(B).
    pub point: usize,
    /// Vertex index in the cut graph.
    pub vertex: usize,
    pub end: EdgeEnd,
    pub side: Side,
    pub chi: f64,
}

#[derive(Debug, Clone)]
pub struct Domain {
    /// Edge indices in the cut graph.
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Sorted by (point, side).
    pub attachments: Vec<Attachment>,
}

#[derive(Debug, Clone)]
pub struct DomainDecomposition {
    pub cut: MetricGraph,
    pub domains: Vec<Domain>,
    pub points: usize,
}

pub fn decompose(marked: &MarkedGraph) -> Result<DomainDecomposition> {
    let g = &marked.graph;
    let cut_ids: Vec<CutLocation> = marked
        .marked
        .iter()
        .filter(|&&v| g.degree(v) == 2)
        .map(|&v| CutLocation::Vertex(g.vertices()[v].id))
        .collect();
    let c = cut(g, &cut_ids)?;
    let mut attachments = Vec::new();
    let mut cut_sides = c.sides.iter();
    for (point, &v) in marked.marked.iter().enumerate() {
        let mut attach = |vertex: usize| {
            let end = c.graph.ends(vertex)[0];
            let side = if end.end == End::Head { Side::One } else { Side::Two };
            let chi = if side == Side::One { 1.0 } else { -1.0 };
            attachments.push(Attachment { point, vertex, end, side, chi });
        };
        if g.degree(v) == 2 {
            let &(a, b) = cut_sides.next().expect("one side pair per cut vertex");
            attach(a);
            attach(b);
        } else {
            attach(c.graph.vertex_index(g.vertices()[v].id)?);
        }
    }
    let (labels, count) = c.graph.component_labels();
    let mut domains: Vec<Domain> =
        (0..count).map(|_| Domain { edges: vec![], vertices: vec![], attachments: vec![] }).collect();
    for (e, edge) in c.graph.edges().iter().enumerate() {
        domains[labels[edge.tail]].edges.push(e);
    }
    for v in 0..c.graph.vertex_count() {
        domains[labels[v]].vertices.push(v);
    }
    for a in attachments {
        domains[labels[a.vertex]].attachments.push(a);
    }
    for d in &mut domains {
        d.attachments.sort_by(|a, b| (a.point, a.side).cmp(&(b.point, b.side)));
    }
    Ok(DomainDecomposition { cut: c.graph, domains, points: marked.len() })
}

/// Value and oriented derivative of the two real basis solutions of
/// -u'' = c u on [0, l] at x.
fn basis(c: f64, l: f64, x: f64) -> ([f64; 2], [f64; 2]) {
    if c > 0.0 {
        let k = c.sqrt();
        let (s, co) = (k * x).sin_cos();
        ([co, s], [-k * s, k * co])
    } else if c < 0.0 {
        let kappa = (-c).sqrt();
        let e1 = (-kappa * x).exp();
        let e2 = (-kappa * (l - x)).exp();
        ([e1, e2], [-kappa * e1, kappa * e2])
    } else {
        ([1.0, x], [0.0, 1.0])
    }
}

/// Singular values below this fraction of the largest mark c as resonant.
pub const RESONANCE: f64 = 1e-12;

/// Value and oriented derivative at x of the edge solution with basis
/// coefficients `p`.
pub fn evaluate_solution(c: f64, l: f64, p: [f64; 2], x: f64) -> (f64, f64) {
    let (val, der) = basis(c, l, x);
    (val[0] * p[0] + val[1] * p[1], der[0] * p[0] + der[1] * p[1])
}

fn end_x(cut: &MetricGraph, end: EdgeEnd) -> (f64, f64) {
    let l = cut.edges()[end.edge].length;
    (l, if end.end == End::Tail { 0.0 } else { l })
}

/// The domain boundary value problem as a square system; the last rows are
/// the γ^s data of the attachments, in order.
fn domain_system(cut: &MetricGraph, domain: &Domain, s: ExtendedReal, c: f64) -> Result<(DMatrix<f64>, usize)> {
    let alpha = PrueferAngle::from_s(s);
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let local = |e: usize| domain.edges.iter().position(|&x| x == e).expect("edge in domain");
    let n = 2 * domain.edges.len();
    let at = |end: EdgeEnd| {
        let (l, x) = end_x(cut, end);
        basis(c, l, x)
    };
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut row = 0;
    for &v in &domain.vertices {
        if domain.attachments.iter().any(|a| a.vertex == v) {
            continue;
        }
        let block = vertex_block(cut, v)?;
        for r in 0..block.a.nrows() {
            for (i, end) in block.ends.iter().enumerate() {
                let (val, der) = at(*end);
                let col = 2 * local(end.edge);
                let sign = end.into_edge_sign();
                for j in 0..2 {
                    m[(row, col + j)] += block.a[(r, i)] * val[j] + block.b[(r, i)] * sign * der[j];
                }
            }
            row += 1;
        }
    }
    let first = row;
    for a in &domain.attachments {
        let (val, der) = at(a.end);
        let col = 2 * local(a.end.edge);
        for j in 0..2 {
            m[(row, col + j)] = ca * val[j] - sa * der[j];
        }
        row += 1;
    }
    debug_assert_eq!(row, n);
    if n > 0 {
        let sv = m.clone().singular_values();
        if sv.min() < RESONANCE * sv.max() {
            return Err(Error::Resonance(c));
        }
    }
    Ok((m, first))
}

/// Basis coefficients per domain edge (in `domain.edges` order) of the
/// solutions with γ^s data given by the columns of `w`.
pub fn solve_domain(
    cut: &MetricGraph,
    domain: &Domain,
    s: ExtendedReal,
    c: f64,
    w: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (m, first) = domain_system(cut, domain, s, c)?;
    let mut rhs = DMatrix::<f64>::zeros(m.nrows(), w.ncols());
    rhs.view_mut((first, 0), (w.nrows(), w.ncols())).copy_from(w);
    m.lu().solve(&rhs).ok_or(Error::Resonance(c))
}

/// Λ_s^D(c) on the attachments of one domain: column j holds the γ^s⋆ data
/// of the solution whose γ^s data is the j-th unit vector.
pub fn domain_map(cut: &MetricGraph, domain: &Domain, s: ExtendedReal, c: f64) -> Result<DMatrix<f64>> {
    let nb = domain.attachments.len();
    if domain.edges.is_empty() {
        return Ok(DMatrix::zeros(nb, nb));
    }
    let alpha = PrueferAngle::from_s(s);
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let sol = solve_domain(cut, domain, s, c, &DMatrix::identity(nb, nb))?;
    let mut out = DMatrix::zeros(nb, nb);
    for (i, a) in domain.attachments.iter().enumerate() {
        let (l, x) = end_x(cut, a.end);
        let col = 2 * domain.edges.iter().position(|&e| e == a.end.edge).expect("edge in domain");
        for j in 0..nb {
            let (f, df) = evaluate_solution(c, l, [sol[(col, j)], sol[(col + 1, j)]], x);
            out[(i, j)] = sa * f + ca * df;
        }
    }
    Ok(out)
}

/// Λ_s(c) as a |B| × |B| matrix.
#[derive(Debug, Clone)]
pub struct RobinMap {
    pub matrix: DMatrix<f64>,
    pub c: f64,
    pub s: ExtendedReal,
}

/// Eigenvalues with |μ| at most this fraction of max(1, ‖Λ‖) count as zero.
pub const NULL_TOLERANCE: f64 = 1e-9;

impl RobinMap {
    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    fn symmetric_part(&self) -> DMatrix<f64> {
        (&self.matrix + self.matrix.transpose()) * 0.5
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.matrix.nrows() == 0 {
            return vec![];
        }
        let mut e: Vec<f64> = self.symmetric_part().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// (Mor, Pos, nullity).
    pub fn indices(&self) -> (usize, usize, usize) {
        let scale = self.matrix.amax().max(1.0);
        let (neg, zero, pos) = inertia(&self.symmetric_part(), NULL_TOLERANCE * scale);
        (neg, pos, zero)
    }
}

/// Weighted block sum of the domain maps.
pub fn assemble_decomposed(dec: &DomainDecomposition, s: ExtendedReal, c: f64) -> Result<RobinMap> {
    let mut matrix = DMatrix::zeros(dec.points, dec.points);
    for d in &dec.domains {
        if d.attachments.is_empty() {
            continue;
        }
        let block = domain_map(&dec.cut, d, s, c)?;
        for (i, ai) in d.attachments.iter().enumerate() {
            for (j, aj) in d.attachments.iter().enumerate() {
                matrix[(ai.point, aj.point)] += ai.chi * block[(i, j)];
            }
        }
    }
    Ok(RobinMap { matrix, c, s })
}

pub fn assemble(marked: &MarkedGraph, s: ExtendedReal, c: f64) -> Result<RobinMap> {
    assemble_decomposed(&decompose(marked)?, s, c)
}

/// Prüfer angle τ = atan t of the coupling at which a marked vertex's
/// condition degenerates and one spectral curve enters from -∞, with the
/// curve present for τ slightly above the returned value.
pub fn singular_tau(marked: &MarkedGraph, point: usize, s: ExtendedReal) -> f64 {
    let g = &marked.graph;
    let v = marked.marked[point];
    match s {
        ExtendedReal::Infinity => -FRAC_PI_2,
        ExtendedReal::Finite(sv) => {
            if g.degree(v) == 2 {
                0.0
            } else if g.ends(v)[0].end == End::Head {
                sv.atan()
            } else {
                (-sv).atan()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{PointOnEdge, Vertex};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const NK: VertexCondition = VertexCondition::NeumannKirchhoff;

    fn graph(n: usize, edges: Vec<(u64, u64, u64, f64)>) -> MetricGraph {
        let vs = (0..n).map(|i| Vertex { id: i as u64, condition: NK }).collect();
        MetricGraph::new(vs, edges).unwrap()
    }

    fn point(edge: u64, x: f64) -> CutLocation {
        CutLocation::Point(PointOnEdge { edge, x })
    }

    #[test]
    fn interval_midpoint_decomposition() {
        let g = graph(2, vec![(0, 0, 1, 2.0)]);
        let m = MarkedGraph::new(&g, &[point(0, 1.0)]).unwrap();
        let d = decompose(&m).unwrap();
        assert_eq!(d.domains.len(), 2);
        let chis: Vec<f64> = d.domains.iter().flat_map(|d| d.attachments.iter().map(|a| a.chi)).collect();
        assert_eq!(chis.iter().sum::<f64>(), 0.0);
        assert_eq!(chis.len(), 2);
        let empty = decompose(&MarkedGraph::new(&g, &[]).unwrap()).unwrap();
        assert_eq!(empty.domains.len(), 1);
        assert_eq!(assemble_decomposed(&empty, ExtendedReal::Infinity, 2.0).unwrap().matrix.nrows(), 0);
    }

    #[test]
    fn degree_three_member_is_rejected() {
        let g = graph(4, vec![(0, 0, 1, 1.0), (1, 0, 2, 1.0), (2, 0, 3, 1.0)]);
        assert!(matches!(
            MarkedGraph::new(&g, &[CutLocation::Vertex(0)]),
            Err(Error::UnsupportedDegree { vertex: 0, degree: 3, .. })
        ));
    }

    #[test]
    fn single_interval_dirichlet_to_neumann() {
        // data w at the tail, Neumann far end: f = w cos(k(L - x))/cos(kL),
        // so f'(0) = w k tan(kL); the tail is side 2, so Λ = -k tan(kL)
        let (l, k) = (1.3, 1.7);
        let g = graph(2, vec![(0, 0, 1, l)]);
        let m = MarkedGraph::new(&g, &[CutLocation::Vertex(0)]).unwrap();
        let r = assemble(&m, ExtendedReal::Infinity, k * k).unwrap();
        assert!((r.matrix[(0, 0)] + k * (k * l).tan()).abs() < 1e-9);
    }

    #[test]
    fn interval_midpoint_two_sided() {
        let (l, k) = (0.9, 2.2);
        let g = graph(2, vec![(0, 0, 1, 2.0 * l)]);
        let m = MarkedGraph::new(&g, &[point(0, l)]).unwrap();
        let r = assemble(&m, ExtendedReal::Infinity, k * k).unwrap();
        assert!((r.matrix[(0, 0)] + 2.0 * k * (k * l).tan()).abs() < 1e-9);
        // negative c: tan becomes -tanh
        let kappa = 1.4;
        let r = assemble(&m, ExtendedReal::Infinity, -kappa * kappa).unwrap();
        assert!((r.matrix[(0, 0)] - 2.0 * kappa * (kappa * l).tanh()).abs() < 1e-9);
    }

    #[test]
    fn resonance_is_reported() {
        let g = graph(2, vec![(0, 0, 1, PI)]);
        let m = MarkedGraph::new(&g, &[CutLocation::Vertex(0)]).unwrap();
        // Dirichlet at 0 and Neumann at π resonate at k = 1/2
        assert!(matches!(assemble(&m, ExtendedReal::Infinity, 0.25), Err(Error::Resonance(_))));
        let near = assemble(&m, ExtendedReal::Infinity, 0.25 + 1e-9).unwrap();
        assert!(near.matrix.amax() > 1e6);
    }

    #[test]
    fn star_block_matches_closed_form() {
        // outer vertices at x = 0, NK centre at x = L
        let (l, k) = (1.0, 1.1);
        let g = graph(4, vec![(0, 1, 0, l), (1, 2, 0, l), (2, 3, 0, l)]);
        let m = MarkedGraph::new(&g, &[1, 2, 3].map(CutLocation::Vertex)).unwrap();
        let r = assemble(&m, ExtendedReal::Infinity, k * k).unwrap();
        let (s, c) = (k * l).sin_cos();
        let off = k / (3.0 * s * c);
        let diag = off - k * c / s;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { diag } else { off };
                // tails at the outer vertices: weight -1
                assert!((r.matrix[(i, j)] + want).abs() < 1e-10, "{i}{j}");
            }
        }
    }

    fn random_setup(seed: u64) -> (MarkedGraph, ExtendedReal) {
        let lengths = [0.7, 1.3, 0.9, 1.1, 0.6];
        let g = graph(4, vec![(0, 0, 1, lengths[0]), (1, 1, 2, lengths[1]), (2, 2, 0, lengths[2]), (3, 2, 3, lengths[3]), (4, 3, 3, lengths[4])]);
        let x = 0.1 + 0.05 * (seed % 7) as f64;
        let b = [point(0, x), point(1, 0.5), point(4, 0.3), CutLocation::Vertex(1)];
        let s = [ExtendedReal::Infinity, ExtendedReal::Finite(0.0), ExtendedReal::Finite(1.3), ExtendedReal::Finite(-0.4)][(seed % 4) as usize];
        (MarkedGraph::new(&g, &b[..3]).unwrap(), s)
    }

    /// Observed, not derived from the construction: between poles every
    /// eigenvalue of the map is nonincreasing in c.
    #[test]
    fn eigenvalues_decrease_in_c_between_poles() {
        let (h, mut steps) = (1e-4, 0);
        for seed in 0..28 {
            let (m, s) = random_setup(seed);
            for i in 0..60 {
                let c = -5.0 + i as f64;
                let (Ok(a), Ok(b)) = (assemble(&m, s, c), assemble(&m, s, c + h)) else { continue };
                let (ea, eb) = (a.eigenvalues(), b.eigenvalues());
                // a pole between c and c + h sends one eigenvalue through ∞
                if ea.iter().chain(&eb).any(|x| x.abs() > 1e3) {
                    continue;
                }
                for (x, y) in ea.iter().zip(&eb) {
                    assert!(*y <= *x + 1e-9 * x.abs().max(1.0), "seed {seed} c {c}: {x} -> {y}");
                }
                steps += 1;
            }
        }
        assert!(steps > 1000, "{steps}");
    }

    proptest! {
        #[test]
        fn symmetric(seed in 0u64..28, c in -5.0f64..60.0) {
            let (m, s) = random_setup(seed);
            match assemble(&m, s, c) {
                Ok(r) => {
                    prop_assert!(r.asymmetry() <= 1e-9 * r.matrix.amax().max(1.0));
                    let (a, b, z) = r.indices();
                    prop_assert_eq!(a + b + z, m.len());
                }
                Err(Error::Resonance(_)) => {}
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }
    }

    #[test]
    fn dirichlet_data_matches_finite_differences() {
        let (m, _) = random_setup(3);
        let dec = decompose(&m).unwrap();
        let c = 7.3;
        let r = assemble_decomposed(&dec, ExtendedReal::Infinity, c).unwrap();
        // f₁' - f₂' at every point for the solution with data e_j, one-sided
        // derivatives from second-order finite differences
        let h = 1e-5;
        for j in 0..m.len() {
            let mut jump = vec![0.0; m.len()];
            for d in &dec.domains {
                let w = DMatrix::from_fn(d.attachments.len(), 1, |i, _| {
                    if d.attachments[i].point == j { 1.0 } else { 0.0 }
                });
                let sol = solve_domain(&dec.cut, d, ExtendedReal::Infinity, c, &w).unwrap();
                for a in &d.attachments {
                    let (l, x) = end_x(&dec.cut, a.end);
                    let col = 2 * d.edges.iter().position(|&e| e == a.end.edge).unwrap();
                    let p = [sol[(col, 0)], sol[(col + 1, 0)]];
                    let f = |y: f64| evaluate_solution(c, l, p, y).0;
                    let slope = if x == 0.0 {
                        (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h)
                    } else {
                        (3.0 * f(l) - 4.0 * f(l - h) + f(l - 2.0 * h)) / (2.0 * h)
                    };
                    jump[a.point] += a.chi * slope;
                }
            }
            for i in 0..m.len() {
                assert!((jump[i] - r.matrix[(i, j)]).abs() < 1e-6, "{i} {j}");
            }
        }
    }
}
