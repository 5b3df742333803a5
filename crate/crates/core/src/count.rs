//! Exact eigenvalue counting through the quadratic form.
//!
//! For λ outside the Dirichlet spectra of the single edges, every function in
//! the form domain splits into a part that solves -f'' = λf on each edge and a
//! part vanishing at all edge ends. The two parts are orthogonal for the
//! shifted form, so
//!
//! ```text
//! N(λ) = #{eigenvalues < λ} = N_D(λ) + Mor(Q_λ)
//! ```
//!
//! with N_D the number of edge Dirichlet eigenvalues (mπ/ℓ_e)² below λ and
//! Q_λ the shifted form restricted to edge-wise solutions, a small symmetric
//! matrix in the vertex values.

use nalgebra::DMatrix;

use crate::conditions::{form_bound, vertex_form, VertexForm};
use crate::error::Result;
use crate::graph::{End, EdgeEnd, MetricGraph};

/// Distance of √λ ℓ/π to an integer below which an edge is split.
pub const POLE_WINDOW: f64 = 1e-3;

/// Ratio to the bounded entries above which a diagonal term is eliminated
/// first.
const DOMINANT: f64 = 1e4;

/// Number of negative eigenvalues of a symmetric matrix. The `large` rows are
/// diagonally dominant; their block is eliminated first so that the rest is
/// never resolved against entries of their size: In(Q) = In(Q_LL) + In(Q/Q_LL).
fn morse_index(q: &DMatrix<f64>, large: &[bool]) -> usize {
    let negative = |m: &DMatrix<f64>| {
        if m.nrows() == 0 {
            0
        } else {
            m.clone().symmetric_eigenvalues().iter().filter(|&&mu| mu < 0.0).count()
        }
    };
    let l: Vec<usize> = (0..q.nrows()).filter(|&i| large[i]).collect();
    if l.is_empty() {
        return negative(q);
    }
    let s: Vec<usize> = (0..q.nrows()).filter(|&i| !large[i]).collect();
    let qll = q.select_rows(&l).select_columns(&l);
    let qls = q.select_rows(&l).select_columns(&s);
    let qss = q.select_rows(&s).select_columns(&s);
    let x = qll.clone().lu().solve(&qls).expect("dominant block is invertible");
    let schur = qss - qls.transpose() * x;
    negative(&qll) + negative(&(0.5 * (&schur + schur.transpose())))
}

#[derive(Debug, Clone)]
pub struct MorseCounter {
    /// (tail dof, head dof, length) per edge; `None` marks a Dirichlet end
    edges: Vec<(Option<usize>, Option<usize>, f64)>,
    /// bounded boundary terms (row, col, value)
    terms: Vec<(usize, usize, f64)>,
    /// dof pairs (a, b) replaced by ((u_a + u_b)/√2, (u_a - u_b)/√2)
    rotations: Vec<(usize, usize)>,
    /// diagonal terms in rotated coordinates, possibly huge
    diagonal: Vec<(usize, f64)>,
    dofs: usize,
    bound: f64,
}

impl MorseCounter {
    pub fn new(graph: &MetricGraph) -> Result<MorseCounter> {
        let mut end_dof = std::collections::BTreeMap::<EdgeEnd, Option<usize>>::new();
        let mut terms = Vec::new();
        let mut rotations = Vec::new();
        let mut diagonal = Vec::new();
        let mut dofs = 0;
        let mut bound: f64 = 0.0;
        for v in 0..graph.vertex_count() {
            let (ends, form) = vertex_form(graph, v)?;
            bound = bound.max(form_bound(&form));
            match form {
                VertexForm::Shared { coeff } => {
                    for e in &ends {
                        end_dof.insert(*e, Some(dofs));
                    }
                    if coeff != 0.0 {
                        diagonal.push((dofs, coeff));
                    }
                    dofs += 1;
                }
                VertexForm::Dirichlet => {
                    for e in &ends {
                        end_dof.insert(*e, None);
                    }
                }
                VertexForm::Free { r, jump } => {
                    for (i, e) in ends.iter().enumerate() {
                        end_dof.insert(*e, Some(dofs + i));
                    }
                    if ends.len() == 1 {
                        diagonal.push((dofs, r[(0, 0)]));
                    } else {
                        for i in 0..ends.len() {
                            for j in 0..ends.len() {
                                if r[(i, j)] != 0.0 {
                                    terms.push((dofs + i, dofs + j, r[(i, j)]));
                                }
                            }
                        }
                    }
                    if jump != 0.0 {
                        // jump |u₁ - u₂|² = 2 jump q² for q = (u₁ - u₂)/√2
                        rotations.push((dofs, dofs + 1));
                        diagonal.push((dofs + 1, 2.0 * jump));
                    }
                    dofs += ends.len();
                }
            }
        }
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                (
                    end_dof[&EdgeEnd { edge: i, end: End::Tail }],
                    end_dof[&EdgeEnd { edge: i, end: End::Head }],
                    e.length,
                )
            })
            .collect();
        Ok(MorseCounter { edges, terms, rotations, diagonal, dofs, bound })
    }

    /// Edge pieces at λ: (tail dof, head dof, length). An edge whose √λ ℓ/π is
    /// within POLE_WINDOW of an integer n ≥ 1 is split where the first piece
    /// holds half a wavelength, so neither piece sits near its own pole; the
    /// split point adds one dof. Without it the small eigenvalue of the edge
    /// block is lost to cancellation between entries of size k/δ.
    fn pieces(&self, lambda: f64) -> (Vec<(Option<usize>, Option<usize>, f64)>, usize) {
        let mut out = Vec::with_capacity(self.edges.len());
        let mut dofs = self.dofs;
        let k = if lambda > 0.0 { lambda.sqrt() } else { 0.0 };
        for &(t, h, l) in &self.edges {
            let x = k * l / std::f64::consts::PI;
            if x > 0.5 && (x - x.round()).abs() < POLE_WINDOW {
                let l0 = 0.5 * l / x;
                out.push((t, Some(dofs), l0));
                out.push((Some(dofs), h, l - l0));
                dofs += 1;
            } else {
                out.push((t, h, l));
            }
        }
        (out, dofs)
    }

    /// Bounded part of the shifted form (L - λ) on piecewise solutions, in
    /// the vertex dofs (jump pairs rotated) and the split points of near-pole
    /// edges.
    fn bounded_matrix(&self, lambda: f64) -> DMatrix<f64> {
        let (pieces, dofs) = self.pieces(lambda);
        let mut q = DMatrix::zeros(dofs, dofs);
        for &(i, j, v) in &self.terms {
            q[(i, j)] += v;
        }
        for (t, h, l) in pieces {
            let (diag, off) = edge_energy(lambda, l);
            if let Some(t) = t {
                q[(t, t)] += diag;
            }
            if let Some(h) = h {
                q[(h, h)] += diag;
            }
            if let (Some(t), Some(h)) = (t, h) {
                q[(t, h)] += off;
                q[(h, t)] += off;
            }
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for &(a, b) in &self.rotations {
            // rows, then columns
            for j in 0..dofs {
                let (x, y) = (q[(a, j)], q[(b, j)]);
                q[(a, j)] = r * (x + y);
                q[(b, j)] = r * (x - y);
            }
            for i in 0..dofs {
                let (x, y) = (q[(i, a)], q[(i, b)]);
                q[(i, a)] = r * (x + y);
                q[(i, b)] = r * (x - y);
            }
        }
        q
    }

    /// Shifted form (L - λ) in the coordinates used for counting.
    pub fn form_matrix(&self, lambda: f64) -> DMatrix<f64> {
        let mut q = self.bounded_matrix(lambda);
        for &(i, v) in &self.diagonal {
            q[(i, i)] += v;
        }
        q
    }

    /// Number of piece Dirichlet eigenvalues below λ, for the pieces used by
    /// `form_matrix`.
    pub fn dirichlet_count(&self, lambda: f64) -> usize {
        if lambda <= 0.0 {
            return 0;
        }
        let k = lambda.sqrt();
        self.pieces(lambda)
            .0
            .iter()
            .map(|&(_, _, l)| {
                let x = k * l / std::f64::consts::PI;
                (x.ceil() as usize).saturating_sub(1)
            })
            .sum()
    }

    /// Relative distance of √λ to the nearest edge Dirichlet wave number.
    pub fn pole_distance(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return f64::INFINITY;
        }
        let k = lambda.sqrt();
        self.edges
            .iter()
            .map(|&(_, _, l)| {
                let x = k * l / std::f64::consts::PI;
                if x < 0.5 {
                    f64::INFINITY
                } else {
                    (x - x.round()).abs() / x
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// N(λ), the number of eigenvalues strictly below λ. λ must not be an
    /// eigenvalue.
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut q = self.bounded_matrix(lambda);
        let scale = q.amax().max(1.0);
        let mut large = vec![false; q.nrows()];
        for &(i, v) in &self.diagonal {
            q[(i, i)] += v;
            large[i] = v.abs() > DOMINANT * scale;
        }
        self.dirichlet_count(lambda) + morse_index(&q, &large)
    }

    /// Largest boundary-term coefficient that can lower the form.
    pub fn boundary_bound(&self) -> f64 {
        self.bound
    }

    /// A λ with N(λ) = 0, certified by the count itself.
    pub fn lower_bound(&self) -> f64 {
        let c = self.bound;
        let lmin = self.edges.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
        let mut lam = -(8.0 * c * c + 8.0 * c / lmin + 1.0);
        while self.count_below(lam) > 0 {
            lam *= 2.0;
        }
        lam
    }
}

/// Diagonal and off-diagonal entry of ∫|h'|² - λ∫|h|² for the solution h of
/// -h'' = λh on [0, l] with end values (u0, u1).
fn edge_energy(lambda: f64, l: f64) -> (f64, f64) {
    let y2 = lambda * l * l;
    if y2.abs() < 1e-4 {
        // y cot y and y csc y (λ > 0), x coth x and x csch x (λ = -x²/l² < 0)
        // share one series in y² = λ l²
        let d = 1.0 - y2 / 3.0 - y2 * y2 / 45.0 - 2.0 * y2.powi(3) / 945.0;
        let o = 1.0 + y2 / 6.0 + 7.0 * y2 * y2 / 360.0 + 31.0 * y2.powi(3) / 15120.0;
        (d / l, -o / l)
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        let (s, c) = (k * l).sin_cos();
        (k * c / s, -k / s)
    } else {
        let kappa = (-lambda).sqrt();
        let x = kappa * l;
        let e = (-2.0 * x).exp();
        // coth and csch written to avoid overflow for large x
        let coth = (1.0 + e) / (1.0 - e);
        let csch = 2.0 * (-x).exp() / (1.0 - e);
        (kappa * coth, -kappa * csch)
    }
}
