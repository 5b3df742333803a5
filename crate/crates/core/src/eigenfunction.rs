//! Eigenfunctions on the edges: evaluation, L² normalization, s-points,
//! s-domains, genericity and the quadratic form.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::conditions::{vertex_form, ExtendedReal, VertexForm};
use crate::error::{Error, Result};
use crate::graph::{cut, CutLocation, End, EdgeEnd, MetricGraph, PointOnEdge};
use crate::solver::{Eigenpair, Normalization, Wave};

/// One edge of an eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWave {
    pub edge: usize,
    pub wave: Wave,
    pub length: f64,
    pub a: Complex64,
    pub b: Complex64,
}

impl EdgeWave {
    /// Value and derivative d/dx in the edge orientation.
    pub fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        let (a, b, l) = (self.a, self.b, self.length);
        match self.wave {
            Wave::Oscillatory(k) => {
                let e1 = Complex64::from_polar(1.0, k * x);
                let e2 = Complex64::from_polar(1.0, k * (l - x));
                let ik = Complex64::new(0.0, k);
                (a * e1 + b * e2, ik * (a * e1 - b * e2))
            }
            Wave::Evanescent(kappa) => {
                let e1 = (-kappa * x).exp();
                let e2 = (-kappa * (l - x)).exp();
                (a * e1 + b * e2, kappa * (b * e2 - a * e1))
            }
            Wave::Zero => (a + b * x, b),
        }
    }

    /// ∫|f|² over the edge.
    pub fn norm_squared(&self) -> f64 {
        let (a, b, l) = (self.a, self.b, self.length);
        let sq = a.norm_sqr() + b.norm_sqr();
        let cross = (a * b.conj()).re;
        match self.wave {
            Wave::Oscillatory(k) => l * sq + 2.0 * cross * (k * l).sin() / k,
            Wave::Evanescent(kappa) => {
                sq * (-(-2.0 * kappa * l).exp_m1()) / (2.0 * kappa) + 2.0 * cross * l * (-kappa * l).exp()
            }
            Wave::Zero => a.norm_sqr() * l + cross * l * l + b.norm_sqr() * l * l * l / 3.0,
        }
    }

    /// ∫|f'|² over the edge.
    pub fn energy(&self) -> f64 {
        let (a, b, l) = (self.a, self.b, self.length);
        let sq = a.norm_sqr() + b.norm_sqr();
        let cross = (a * b.conj()).re;
        match self.wave {
            Wave::Oscillatory(k) => k * k * (l * sq - 2.0 * cross * (k * l).sin() / k),
            Wave::Evanescent(kappa) => {
                kappa * kappa
                    * (sq * (-(-2.0 * kappa * l).exp_m1()) / (2.0 * kappa)
                        - 2.0 * cross * l * (-kappa * l).exp())
            }
            Wave::Zero => b.norm_sqr() * l,
        }
    }

    /// For oscillatory waves, f = A cos kx + B sin kx with complex A, B.
    fn cos_sin(&self) -> Option<(f64, Complex64, Complex64)> {
        match self.wave {
            Wave::Oscillatory(k) => {
                let e = Complex64::from_polar(1.0, k * self.length);
                Some((k, self.a + self.b * e, Complex64::i() * (self.a - self.b * e)))
            }
            _ => None,
        }
    }
}

/// A function on the whole graph given edge by edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    pub edges: Vec<EdgeWave>,
}

impl GraphFunction {
    /// Builds the function from a coefficient vector, entries (2e, 2e + 1)
    /// belonging to edge e.
    pub fn new(graph: &MetricGraph, wave: Wave, coeffs: &DVector<Complex64>) -> GraphFunction {
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| EdgeWave {
                edge: e,
                wave,
                length: edge.length,
                a: coeffs[2 * e],
                b: coeffs[2 * e + 1],
            })
            .collect();
        GraphFunction { edges }
    }

    pub fn from_eigenpair(graph: &MetricGraph, eig: &Eigenpair, which: usize) -> GraphFunction {
        GraphFunction::new(graph, eig.wave, &eig.amplitudes[which])
    }

    pub fn coefficients(&self) -> DVector<Complex64> {
        DVector::from_iterator(2 * self.edges.len(), self.edges.iter().flat_map(|w| [w.a, w.b]))
    }

    /// Value and oriented derivative at one edge end.
    pub fn at_end(&self, end: EdgeEnd) -> (Complex64, Complex64) {
        let w = &self.edges[end.edge];
        match end.end {
            End::Tail => w.evaluate(0.0),
            End::Head => w.evaluate(w.length),
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.edges.iter().map(EdgeWave::norm_squared).sum()
    }

    pub fn scale(&mut self, z: Complex64) {
        for w in &mut self.edges {
            w.a *= z;
            w.b *= z;
        }
    }

    /// Rescales to unit L² norm.
    pub fn normalize(&mut self) {
        let n = self.norm_squared().sqrt();
        self.scale(Complex64::from(1.0 / n));
    }

    /// Rotates the global phase so that the largest vertex value is real and
    /// positive; falls back to edge midpoints when every vertex value is tiny.
    pub fn align_phase(&mut self) {
        let mut best = Complex64::from(0.0);
        for w in &self.edges {
            for x in [0.0, w.length] {
                let v = w.evaluate(x).0;
                if v.norm() > best.norm() {
                    best = v;
                }
            }
        }
        let sup = self.sup_estimate();
        if best.norm() < 1e-6 * sup {
            for w in &self.edges {
                let v = w.evaluate(0.5 * w.length).0;
                if v.norm() > best.norm() {
                    best = v;
                }
            }
        }
        if best.norm() > 0.0 {
            self.scale(best.conj() / best.norm());
        }
    }

    /// Largest amplitude over the edges, |A| + |B| in the cos/sin form.
    pub fn sup_estimate(&self) -> f64 {
        self.edges
            .iter()
            .map(|w| match w.cos_sin() {
                Some((_, a, b)) => a.norm().hypot(b.norm()),
                None => w.a.norm() + w.b.norm(),
            })
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part at edge ends relative to the sup estimate.
    pub fn imaginary_defect(&self) -> f64 {
        let sup = self.sup_estimate().max(f64::MIN_POSITIVE);
        self.edges
            .iter()
            .flat_map(|w| {
                let (f0, _) = w.evaluate(0.0);
                let (fm, _) = w.evaluate(0.5 * w.length);
                [f0.im.abs(), fm.im.abs()]
            })
            .fold(0.0, f64::max)
            / sup
    }
}

/// An eigenpair rescaled to unit L² norm.
pub fn l2_normalize(eig: &Eigenpair, graph: &MetricGraph) -> Eigenpair {
    let mut out = eig.clone();
    for a in &mut out.amplitudes {
        let n = GraphFunction::new(graph, eig.wave, a).norm_squared().sqrt();
        *a /= Complex64::from(n);
    }
    out.normalization = Normalization::UnitL2;
    out
}

/// s-points of an eigenfunction, sorted by (edge id, x).
#[derive(Debug, Clone, PartialEq)]
pub struct SPointSet {
    pub s: ExtendedReal,
    pub points: Vec<PointOnEdge>,
    /// Roots within 1e-9 ℓ of an edge end, attributed to the vertex.
    pub grazing: usize,
}

impl SPointSet {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Interior s-points in closed form. Writing the aligned real function as
/// f = R cos(kx + φ), the condition f' = s f becomes tan(kx + φ) = -s/k,
/// and f = 0 for s = ∞.
pub fn find_s_points(graph: &MetricGraph, f: &GraphFunction, s: ExtendedReal) -> Result<SPointSet> {
    let sup = f.sup_estimate();
    let mut points = Vec::new();
    let mut grazing = 0;
    for w in &f.edges {
        let Some((k, a, b)) = w.cos_sin() else {
            return Err(Error::Precondition("s-points need a positive eigenvalue".into()));
        };
        let (a, b) = (a.re, b.re);
        let r = a.hypot(b);
        let id = graph.edges()[w.edge].id;
        if r <= 1e-10 * sup {
            return Err(Error::DegenerateEdge(id));
        }
        // A cos kx + B sin kx = R cos(kx + φ)
        let phi = (-b).atan2(a);
        let theta0 = match s {
            ExtendedReal::Infinity => FRAC_PI_2,
            ExtendedReal::Finite(s) => (-s / k).atan(),
        };
        let lo = phi;
        let hi = k * w.length + phi;
        let m0 = ((lo - theta0) / PI).ceil() as i64;
        let mut m = m0 - 1;
        loop {
            let theta = theta0 + m as f64 * PI;
            m += 1;
            if theta < lo - 1e-12 {
                continue;
            }
            if theta > hi + 1e-12 {
                break;
            }
            let x = (theta - phi) / k;
            let tol = 1e-9 * w.length;
            if x <= tol || x >= w.length - tol {
                if x > -tol && x < w.length + tol {
                    grazing += 1;
                }
                continue;
            }
            points.push(PointOnEdge { edge: id, x });
        }
    }
    points.sort_by(|p, q| p.edge.cmp(&q.edge).then(p.x.total_cmp(&q.x)));
    Ok(SPointSet { s, points, grazing })
}

/// s-domains: the components left after cutting at the s-points.
#[derive(Debug, Clone, PartialEq)]
pub struct SDomainPartition {
    /// Edge ids of the cut graph, grouped by component.
    pub domains: Vec<Vec<u64>>,
    /// Total length per domain.
    pub lengths: Vec<f64>,
    pub nu: usize,
    /// n - ν_s for the eigenvalue index n.
    pub deficiency: i64,
}

pub fn partition(graph: &MetricGraph, points: &SPointSet, n: usize) -> Result<SDomainPartition> {
    let locations: Vec<CutLocation> = points.points.iter().map(|p| CutLocation::Point(*p)).collect();
    let c = cut(graph, &locations)?;
    let (labels, count) = c.graph.component_labels();
    let mut domains = vec![Vec::new(); count];
    let mut lengths = vec![0.0; count];
    for e in c.graph.edges() {
        domains[labels[e.tail]].push(e.id);
        lengths[labels[e.tail]] += e.length;
    }
    Ok(SDomainPartition { domains, lengths, nu: count, deficiency: n as i64 - count as i64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexDiagnostic {
    pub vertex: u64,
    pub value: f64,
    pub derivatives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub simple: bool,
    /// Vertices of degree above two: |f(v)| and |f'| on each incident end,
    /// relative to the sup estimate (derivatives also divided by k).
    pub vertices: Vec<VertexDiagnostic>,
    pub generic: bool,
}

/// Values or derivatives below this fraction of the sup count as vanishing.
pub const VANISHING: f64 = 1e-8;

pub fn genericity(graph: &MetricGraph, eig: &Eigenpair) -> GenericityReport {
    let f = GraphFunction::from_eigenpair(graph, eig, 0);
    let sup = f.sup_estimate().max(f64::MIN_POSITIVE);
    let k = eig.wave.k_or_kappa().max(1.0);
    let mut vertices = Vec::new();
    let mut ok = eig.multiplicity == 1;
    for v in 0..graph.vertex_count() {
        if graph.degree(v) <= 2 {
            continue;
        }
        let ends = graph.ends(v);
        let value = ends.iter().map(|e| f.at_end(*e).0.norm()).fold(0.0, f64::max) / sup;
        let derivatives: Vec<f64> = ends.iter().map(|e| f.at_end(*e).1.norm() / (k * sup)).collect();
        if value < VANISHING || derivatives.iter().any(|&d| d < VANISHING) {
            ok = false;
        }
        vertices.push(VertexDiagnostic { vertex: graph.vertices()[v].id, value, derivatives });
    }
    GenericityReport { simple: eig.multiplicity == 1, vertices, generic: ok }
}

/// The quadratic form of the graph's conditions evaluated on f: Dirichlet
/// energy plus the vertex boundary terms. Fails when f violates a
/// continuity or Dirichlet constraint of the form domain.
pub fn evaluate_form(graph: &MetricGraph, f: &GraphFunction) -> Result<f64> {
    let mut total: f64 = f.edges.iter().map(EdgeWave::energy).sum();
    let scale = f.sup_estimate().max(f64::MIN_POSITIVE);
    let tol = 1e-7 * scale;
    for v in 0..graph.vertex_count() {
        let (ends, form) = vertex_form(graph, v)?;
        let vals: Vec<Complex64> = ends.iter().map(|e| f.at_end(*e).0).collect();
        let id = graph.vertices()[v].id;
        match form {
            VertexForm::Shared { coeff } => {
                if vals.iter().any(|u| (u - vals[0]).norm() > tol) {
                    return Err(Error::DomainViolation(id));
                }
                if let Some(u) = vals.first() {
                    total += coeff * u.norm_sqr();
                }
            }
            VertexForm::Dirichlet => {
                if vals.iter().any(|u| u.norm() > tol) {
                    return Err(Error::DomainViolation(id));
                }
            }
            VertexForm::Free { .. } => {
                let r = form.matrix().unwrap();
                for i in 0..vals.len() {
                    for j in 0..vals.len() {
                        total += r[(i, j)] * (vals[i].conj() * vals[j]).re;
                    }
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::VertexCondition;
    use crate::graph::Vertex;
    use crate::solver::Solver;
    use proptest::prelude::*;

    const NK: VertexCondition = VertexCondition::NeumannKirchhoff;

    fn graph(conds: &[VertexCondition], edges: Vec<(u64, u64, u64, f64)>) -> MetricGraph {
        let vs = conds
            .iter()
            .enumerate()
            .map(|(i, c)| Vertex { id: i as u64, condition: *c })
            .collect();
        MetricGraph::new(vs, edges).unwrap()
    }

    fn cosine_on(l: f64, k: f64) -> (MetricGraph, GraphFunction) {
        let g = graph(&[NK, NK], vec![(0, 0, 1, l)]);
        let a = Complex64::from(0.5);
        let b = Complex64::from_polar(0.5, -k * l);
        let f = GraphFunction { edges: vec![EdgeWave { edge: 0, wave: Wave::Oscillatory(k), length: l, a, b }] };
        (g, f)
    }

    #[test]
    fn cosine_coefficients() {
        let (_, f) = cosine_on(PI, 1.3);
        for x in [0.0, 0.4, 2.0] {
            let (v, d) = f.edges[0].evaluate(x);
            assert!((v - (1.3 * x).cos()).norm() < 1e-14);
            assert!((d + 1.3 * (1.3 * x).sin()).norm() < 1e-14);
        }
        let w = &f.edges[0];
        let (v0, _) = w.evaluate(0.0);
        assert!((v0 - (w.a + w.b * Complex64::from_polar(1.0, 1.3 * PI))).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-6;
        for wave in [Wave::Oscillatory(2.3), Wave::Evanescent(1.7), Wave::Zero] {
            let w = EdgeWave { edge: 0, wave, length: 1.4, a: Complex64::new(0.3, -0.2), b: Complex64::new(-0.5, 0.9) };
            for x in [0.2, 0.7, 1.1] {
                let fd = (w.evaluate(x + h).0 - w.evaluate(x - h).0) / (2.0 * h);
                assert!((fd - w.evaluate(x).1).norm() < 1e-6);
            }
        }
    }

    fn trapezoid(w: &EdgeWave, f: impl Fn(Complex64, Complex64) -> f64, n: usize) -> f64 {
        let h = w.length / n as f64;
        (0..=n)
            .map(|i| {
                let (v, d) = w.evaluate(i as f64 * h);
                let wt = if i == 0 || i == n { 0.5 } else { 1.0 };
                wt * f(v, d)
            })
            .sum::<f64>()
            * h
    }

    proptest! {
        #[test]
        fn closed_form_norms_match_quadrature(
            kind in 0usize..3, k in 0.1f64..30.0, l in 0.3f64..2.0,
            ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0,
        ) {
            let wave = [Wave::Oscillatory(k), Wave::Evanescent(k), Wave::Zero][kind];
            let w = EdgeWave { edge: 0, wave, length: l, a: Complex64::new(ar, ai), b: Complex64::new(br, bi) };
            let n2 = trapezoid(&w, |v, _| v.norm_sqr(), 10_000);
            let e2 = trapezoid(&w, |_, d| d.norm_sqr(), 10_000);
            let scale = (w.a.norm_sqr() + w.b.norm_sqr()) * l * (1.0 + k * k * l * l);
            prop_assert!((w.norm_squared() - n2).abs() <= 1e-8 * scale.max(1e-3));
            prop_assert!((w.energy() - e2).abs() <= 1e-8 * scale.max(1e-3) * (1.0 + k * k));
        }
    }

    #[test]
    fn neumann_interval_normalized_value() {
        let l = 2.5;
        let s = Solver::new(&graph(&[NK, NK], vec![(0, 0, 1, l)])).unwrap();
        for eig in s.lowest_pairs(5).unwrap() {
            let e = l2_normalize(&eig, &s_graph(l));
            let mut f = GraphFunction::from_eigenpair(&s_graph(l), &e, 0);
            f.align_phase();
            let v0 = f.edges[0].evaluate(0.0).0;
            let want = if eig.index == 1 { 1.0 / l } else { 2.0 / l };
            assert!((v0.norm_sqr() - want).abs() < 1e-10, "{} {}", eig.index, v0);
        }
    }

    fn s_graph(l: f64) -> MetricGraph {
        graph(&[NK, NK], vec![(0, 0, 1, l)])
    }

    #[test]
    fn s_points_on_cosines() {
        let (g, f) = cosine_on(PI, 1.0);
        let p = find_s_points(&g, &f, ExtendedReal::Infinity).unwrap();
        assert_eq!(p.count(), 1);
        assert!((p.points[0].x - FRAC_PI_2).abs() < 1e-14);
        let p = find_s_points(&g, &f, ExtendedReal::Finite(0.0)).unwrap();
        assert_eq!(p.count(), 0);
        assert_eq!(p.grazing, 2);

        let (g, f) = cosine_on(PI, 2.0);
        let p = find_s_points(&g, &f, ExtendedReal::Finite(1.0)).unwrap();
        assert_eq!(p.count(), 2);
        for q in &p.points {
            assert!((-2.0 * (2.0 * q.x).tan() - 1.0).abs() < 1e-12);
        }
        // grid scan of f' - s f as the oracle
        let n = 1_000_000;
        let mut changes = 0;
        let h = PI / n as f64;
        let g_at = |x: f64| -2.0 * (2.0 * x).sin() - (2.0 * x).cos();
        for i in 0..n {
            if g_at(i as f64 * h).signum() != g_at((i + 1) as f64 * h).signum() {
                changes += 1;
            }
        }
        assert_eq!(changes, 2);
    }

    #[test]
    fn partition_counts() {
        let (g, f) = cosine_on(PI, 3.0);
        let p = find_s_points(&g, &f, ExtendedReal::Infinity).unwrap();
        assert_eq!(p.count(), 3);
        let d = partition(&g, &p, 4).unwrap();
        assert_eq!(d.nu, 4);
        assert_eq!(d.deficiency, 0);
        assert!((d.lengths.iter().sum::<f64>() - PI).abs() < 1e-14);
        let none = SPointSet { s: ExtendedReal::Infinity, points: vec![], grazing: 0 };
        assert_eq!(partition(&g, &none, 1).unwrap().nu, 1);
    }

    #[test]
    fn form_identity_on_eigenpairs() {
        let conds = [
            VertexCondition::delta(1.5),
            NK,
            VertexCondition::delta_s(ExtendedReal::Finite(0.7), ExtendedReal::Finite(-2.0)),
            VertexCondition::delta(-1.0),
        ];
        let g = graph(&conds, vec![(0, 0, 1, 1.0), (1, 0, 2, 0.8), (2, 2, 3, 1.3), (3, 1, 0, 0.5)]);
        let s = Solver::new(&g).unwrap();
        for eig in s.lowest_pairs(8).unwrap() {
            let eig = l2_normalize(&eig, &g);
            let f = GraphFunction::from_eigenpair(&g, &eig, 0);
            let form = evaluate_form(&g, &f).unwrap();
            assert!((form - eig.lambda).abs() < 1e-8 * eig.lambda.abs().max(1.0), "{} {}", form, eig.lambda);
        }
    }

    #[test]
    fn constant_has_zero_form_and_discontinuity_is_rejected() {
        let g = graph(&[NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 1, 2, 1.0)]);
        let one = Complex64::from(1.0);
        let zero = Complex64::from(0.0);
        let f = GraphFunction::new(&g, Wave::Zero, &DVector::from_vec(vec![one, zero, one, zero]));
        assert_eq!(evaluate_form(&g, &f).unwrap(), 0.0);
        let f = GraphFunction::new(&g, Wave::Zero, &DVector::from_vec(vec![one, zero, one * 2.0, zero]));
        assert!(matches!(evaluate_form(&g, &f), Err(Error::DomainViolation(1))));
    }

    #[test]
    fn genericity_of_stars() {
        let third = PI / 3.0;
        let eq = graph(&[NK, NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 0, 2, 1.0), (2, 0, 3, 1.0)]);
        let s = Solver::new(&eq).unwrap();
        let pairs = s.lowest_pairs(10).unwrap();
        assert!(pairs.iter().any(|p| !genericity(&eq, p).generic));
        let inc = graph(&[NK, NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 0, 2, 2f64.sqrt()), (2, 0, 3, third)]);
        let s = Solver::new(&inc).unwrap();
        let first = &s.lowest_pairs(2).unwrap()[1];
        assert!(genericity(&inc, first).generic);
        let lp = graph(&[NK], vec![(0, 0, 0, 2.0 * PI)]);
        let pair = &Solver::new(&lp).unwrap().lowest_pairs(3).unwrap()[1];
        assert!(!genericity(&lp, pair).generic);
    }

    #[test]
    fn continuity_at_star_centre() {
        let g = graph(&[NK, NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 0, 2, 2f64.sqrt()), (2, 0, 3, PI / 3.0)]);
        let s = Solver::new(&g).unwrap();
        for eig in s.lowest_pairs(12).unwrap() {
            let f = GraphFunction::from_eigenpair(&g, &eig, 0);
            let vals: Vec<Complex64> = g.ends(0).iter().map(|e| f.at_end(*e).0).collect();
            assert!((vals[0] - vals[1]).norm() < 1e-9 && (vals[0] - vals[2]).norm() < 1e-9);
        }
    }

    #[test]
    fn reversing_an_edge_flips_s() {
        let g = graph(&[NK, NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 0, 2, 2f64.sqrt()), (2, 0, 3, PI / 3.0)]);
        let s = Solver::new(&g).unwrap();
        let eig = &s.lowest_pairs(7).unwrap()[6];
        let mut f = GraphFunction::from_eigenpair(&g, eig, 0);
        f.align_phase();
        let r = g.reversed_edge(1);
        // the same function in reversed coordinates swaps (a, b)
        let mut fr = f.clone();
        let w = &mut fr.edges[1];
        std::mem::swap(&mut w.a, &mut w.b);
        let s_val = ExtendedReal::Finite(0.9);
        let p = find_s_points(&g, &f, s_val).unwrap();
        let q = find_s_points(&r, &fr, ExtendedReal::Finite(-0.9)).unwrap();
        let on1 = |set: &SPointSet| set.points.iter().filter(|p| p.edge == 1).map(|p| p.x).collect::<Vec<_>>();
        let l = g.edges()[1].length;
        let mut mirrored: Vec<f64> = on1(&q).iter().map(|x| l - x).collect();
        mirrored.sort_by(f64::total_cmp);
        let direct = on1(&p);
        assert_eq!(direct.len(), mirrored.len());
        for (a, b) in direct.iter().zip(&mirrored) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
