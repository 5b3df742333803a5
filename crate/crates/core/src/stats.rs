//! Robin–Neumann gaps and local Weyl-law averages.

use std::cell::RefCell;

use crate::conditions::VertexCondition;
use crate::eigenfunction::{l2_normalize, GraphFunction};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::solver::{Eigenpair, Solver};

/// Prefix means of a sequence.
pub fn cesaro(seq: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    seq.iter()
        .enumerate()
        .map(|(i, x)| {
            sum += x;
            sum / (i + 1) as f64
        })
        .collect()
}

/// The limiting mean gap (2σ/L) Σ_{v ∈ V_R} 1/deg(v).
pub fn rng_target(graph: &MetricGraph, robin: &[usize], sigma: f64) -> f64 {
    let inv: f64 = robin.iter().map(|&v| 1.0 / graph.degree(v) as f64).sum();
    2.0 * sigma / graph.total_length() * inv
}

/// Gaps d_n(σ) = λ_n(σ) - λ_n(0), n = 1..N, with δ(σ) on the Robin set and
/// the graph's own conditions elsewhere. Copies of a multiple eigenvalue are
/// paired in sorted order.
#[derive(Debug, Clone)]
pub struct RngSequence {
    pub sigma: f64,
    pub values: Vec<f64>,
    pub means: Vec<f64>,
    pub target: f64,
}

pub fn robin_graph(graph: &MetricGraph, robin: &[usize], sigma: f64) -> MetricGraph {
    graph.with_conditions(robin, VertexCondition::delta(sigma))
}

pub fn rng(graph: &MetricGraph, robin: &[usize], sigma: f64, n: usize) -> Result<RngSequence> {
    let base = Solver::new(&robin_graph(graph, robin, 0.0))?.lowest(n)?;
    let moved = if sigma == 0.0 { base.clone() } else { Solver::new(&robin_graph(graph, robin, sigma))?.lowest(n)? };
    let values: Vec<f64> = moved.iter().zip(&base).map(|(a, b)| a - b).collect();
    Ok(RngSequence { sigma, means: cesaro(&values), values, target: rng_target(graph, robin, sigma) })
}

/// Largest |d_n(σ_{i+1}) - d_n(σ_i)| / |σ_{i+1} - σ_i| over a σ-grid, per n.
pub fn lipschitz(graph: &MetricGraph, robin: &[usize], sigmas: &[f64], n: usize) -> Result<Vec<f64>> {
    let spectra = sigmas
        .iter()
        .map(|&s| Solver::new(&robin_graph(graph, robin, s))?.lowest(n))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0f64; n];
    for (w, s) in spectra.windows(2).zip(sigmas.windows(2)) {
        let h = (s[1] - s[0]).abs();
        for i in 0..n {
            out[i] = out[i].max((w[1][i] - w[0][i]).abs() / h);
        }
    }
    Ok(out)
}

/// dλ_n/dt at coupling t: Σ_{v ∈ V_R} |f_n(v)|² for the unit eigenfunction,
/// averaged over an orthonormal basis when λ_n is multiple. Returns the value
/// and the multiplicity.
pub fn vertex_weight(graph: &MetricGraph, robin: &[usize], t: f64, n: usize) -> Result<(f64, usize)> {
    let g = robin_graph(graph, robin, t);
    let pairs = Solver::new(&g)?.lowest_pairs(n)?;
    let eig = pairs
        .iter()
        .find(|p| p.index <= n && n < p.index + p.multiplicity)
        .ok_or_else(|| Error::Incomplete { reason: format!("eigenvalue {n} not reached"), found: vec![] })?;
    Ok((basis_average(&g, eig, |f| robin.iter().map(|&v| vertex_value_sq(&g, f, v)).sum()), eig.multiplicity))
}

fn vertex_value_sq(graph: &MetricGraph, f: &GraphFunction, v: usize) -> f64 {
    f.at_end(graph.ends(v)[0]).0.norm_sqr()
}

fn basis_average(graph: &MetricGraph, eig: &Eigenpair, value: impl Fn(&GraphFunction) -> f64) -> f64 {
    let e = l2_normalize(eig, graph);
    let total: f64 = (0..e.multiplicity).map(|i| value(&GraphFunction::from_eigenpair(graph, &e, i))).sum();
    total / e.multiplicity as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct HadamardRng {
    pub value: f64,
    pub evaluations: usize,
    /// Evaluations at which λ_n was multiple.
    pub degenerate: usize,
    /// Every evaluation was degenerate and the endpoint difference was used.
    pub fallback: bool,
}

/// d_n(σ) as ∫_0^σ dλ_n/dt dt by adaptive quadrature.
pub fn rng_hadamard(graph: &MetricGraph, robin: &[usize], sigma: f64, n: usize, tol: f64) -> Result<HadamardRng> {
    if sigma == 0.0 {
        return Ok(HadamardRng { value: 0.0, evaluations: 0, degenerate: 0, fallback: false });
    }
    let state = RefCell::new((0usize, 0usize, None::<Error>));
    let out = quadrature::integrate(
        |t| match vertex_weight(graph, robin, t, n) {
            Ok((w, m)) => {
                let mut s = state.borrow_mut();
                s.0 += 1;
                if m > 1 {
                    s.1 += 1;
                }
                w
            }
            Err(e) => {
                state.borrow_mut().2.get_or_insert(e);
                0.0
            }
        },
        0.0,
        sigma,
        tol,
    );
    let (evaluations, degenerate, err) = state.into_inner();
    if let Some(e) = err {
        return Err(e);
    }
    if evaluations > 0 && degenerate == evaluations {
        let d = rng(graph, robin, sigma, n)?;
        return Ok(HadamardRng { value: d.values[n - 1], evaluations, degenerate, fallback: true });
    }
    Ok(HadamardRng { value: out.integral, evaluations, degenerate, fallback: false })
}

/// Per-eigenfunction data for the local Weyl law over the first N positive
/// eigenvalues of the graph, L²-normalized. A multiple eigenvalue contributes
/// every vector of an orthonormal eigenbasis.
#[derive(Debug, Clone)]
pub struct WeylStats {
    pub total_length: f64,
    pub degrees: Vec<usize>,
    /// |f_n(v)|², indexed [v][n].
    pub vertex_sq: Vec<Vec<f64>>,
    /// |A_e|² and |A_ê|² of the forward and backward bond, indexed [e][n].
    pub forward_sq: Vec<Vec<f64>>,
    pub backward_sq: Vec<Vec<f64>>,
    /// Running largest |⟨A_j Ā_e⟩| and |⟨A_ĵ Ā_ê⟩| over j ≠ e, per prefix.
    pub cross: Vec<f64>,
}

pub fn weyl_stats(graph: &MetricGraph, n: usize) -> Result<WeylStats> {
    let solver = Solver::new(graph)?;
    let zero = solver.count_below(1e-9);
    let pairs = solver.lowest_pairs(n + zero)?;
    let (nv, ne) = (graph.vertex_count(), graph.edge_count());
    let mut vertex_sq = vec![Vec::with_capacity(n); nv];
    let mut forward_sq = vec![Vec::with_capacity(n); ne];
    let mut backward_sq = vec![Vec::with_capacity(n); ne];
    let mut cross = Vec::with_capacity(n);
    // running sums of A_j Ā_e and A_ĵ Ā_ê, upper triangle
    let mut fsum = vec![num_complex::Complex64::new(0.0, 0.0); ne * ne];
    let mut bsum = fsum.clone();
    let mut count = 0usize;
    'pairs: for p in pairs.iter().filter(|p| p.lambda > 1e-9) {
        let e = l2_normalize(p, graph);
        for i in 0..e.multiplicity {
            if count == n {
                break 'pairs;
            }
            let f = GraphFunction::from_eigenpair(graph, &e, i);
            for (v, row) in vertex_sq.iter_mut().enumerate() {
                row.push(vertex_value_sq(graph, &f, v));
            }
            for (j, w) in f.edges.iter().enumerate() {
                forward_sq[j].push(w.a.norm_sqr());
                backward_sq[j].push(w.b.norm_sqr());
                for (l, u) in f.edges.iter().enumerate().skip(j + 1) {
                    fsum[j * ne + l] += w.a * u.a.conj();
                    bsum[j * ne + l] += w.b * u.b.conj();
                }
            }
            count += 1;
            let worst = fsum.iter().chain(&bsum).map(|z| z.norm()).fold(0.0, f64::max);
            cross.push(worst / count as f64);
        }
    }
    if count < n {
        return Err(Error::Incomplete { reason: format!("only {count} positive eigenfunctions"), found: vec![] });
    }
    Ok(WeylStats {
        total_length: graph.total_length(),
        degrees: (0..nv).map(|v| graph.degree(v)).collect(),
        vertex_sq,
        forward_sq,
        backward_sq,
        cross,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl WeylStats {
    pub fn len(&self) -> usize {
        self.cross.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cross.is_empty()
    }

    pub fn vertex_mean(&self, v: usize, n: usize) -> f64 {
        mean(&self.vertex_sq[v][..n])
    }

    pub fn vertex_target(&self, v: usize) -> f64 {
        2.0 / (self.degrees[v] as f64 * self.total_length)
    }

    pub fn forward_mean(&self, e: usize, n: usize) -> f64 {
        mean(&self.forward_sq[e][..n])
    }

    pub fn backward_mean(&self, e: usize, n: usize) -> f64 {
        mean(&self.backward_sq[e][..n])
    }

    pub fn amplitude_target(&self) -> f64 {
        1.0 / (2.0 * self.total_length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;
    use std::f64::consts::PI;

    const NK: VertexCondition = VertexCondition::NeumannKirchhoff;

    fn graph(n: usize, edges: Vec<(u64, u64, u64, f64)>) -> MetricGraph {
        let vs = (0..n).map(|i| Vertex { id: i as u64, condition: NK }).collect();
        MetricGraph::new(vs, edges).unwrap()
    }

    fn star() -> MetricGraph {
        graph(4, vec![(0, 0, 1, 1.0), (1, 0, 2, 2f64.sqrt()), (2, 0, 3, PI / 3.0)])
    }

    #[test]
    fn cesaro_means() {
        assert_eq!(cesaro(&[2.0; 5]), vec![2.0; 5]);
        let harmonic: Vec<f64> = (1..=10000).map(|n| 1.0 / n as f64).collect();
        assert!(*cesaro(&harmonic).last().unwrap() < 1e-3);
        let alt: Vec<f64> = (1..=1001).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(cesaro(&alt).last().unwrap().abs() < 1e-3);
    }

    #[test]
    fn zero_coupling_has_no_gap() {
        let d = rng(&star(), &[0], 0.0, 20).unwrap();
        assert!(d.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn interval_ground_gap() {
        let g = graph(2, vec![(0, 0, 1, 1.0)]);
        let d = rng(&g, &[0], 1.0, 3).unwrap();
        let (mut a, mut b) = (0.0, PI / 2.0 - 1e-12);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m * m.tan() < 1.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((d.values[0] - a * a).abs() < 1e-10);
        assert!(d.values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn hadamard_matches_endpoints() {
        let g = star();
        let d = rng(&g, &[0], 5.5, 5).unwrap();
        let h = rng_hadamard(&g, &[0], 5.5, 5, 1e-8).unwrap();
        assert!(!h.fallback);
        assert!((h.value - d.values[4]).abs() < 1e-6, "{h:?} {}", d.values[4]);
    }

    #[test]
    fn interval_endpoint_weyl_is_exact() {
        let g = graph(2, vec![(0, 0, 1, 2.3)]);
        let w = weyl_stats(&g, 40).unwrap();
        for n in 0..40 {
            assert!((w.vertex_sq[0][n] - 2.0 / 2.3).abs() < 1e-9);
        }
        assert!((w.forward_mean(0, 40) - w.amplitude_target()).abs() < 1e-9);
    }
}
