//! The δ_s family of vertex conditions.
//!
//! A marked vertex of degree two has a side 1 (the incoming, head end) and a
//! side 2 (the outgoing, tail end). With the oriented derivative f' = d/dx the
//! traces are
//!
//! ```text
//! γ^s  = cos α f - sin α f'
//! γ^s* = sin α f + cos α f'
//! ```
//!
//! and the condition reads γ_1^s = γ_2^s, γ_2^s* - γ_1^s* = t γ^s, with t = ∞
//! meaning γ_1^s = γ_2^s = 0. Everything solver-facing is expressed as
//! `A u + B u' = 0` where u' is the derivative pointing into the edge; the
//! sign conversion lives in [`EdgeEnd::into_edge_sign`].

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{End, EdgeEnd, MetricGraph};

/// A real number or the single point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinity => None,
        }
    }

    /// Parses a decimal number, or `inf`, `+inf`, `-inf`, `∞` for the point
    /// at infinity.
    pub fn parse(text: &str) -> Result<ExtendedReal> {
        match text.trim() {
            "inf" | "+inf" | "-inf" | "infinity" | "∞" => Ok(ExtendedReal::Infinity),
            s => {
                let x: f64 = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
                Ok(ExtendedReal::from(x))
            }
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        if x.is_infinite() {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(x)
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

/// Prüfer angle α ∈ [0, π) with s = cot α. The values α = 0 (s = ∞) and
/// α = π/2 (s = 0) are represented exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrueferAngle {
    alpha: f64,
}

impl PrueferAngle {
    pub fn from_alpha(alpha: f64) -> PrueferAngle {
        let a = alpha.rem_euclid(std::f64::consts::PI);
        PrueferAngle { alpha: if a.is_finite() { a } else { 0.0 } }
    }

    pub fn from_s(s: ExtendedReal) -> PrueferAngle {
        match s {
            ExtendedReal::Infinity => PrueferAngle { alpha: 0.0 },
            ExtendedReal::Finite(x) if x == 0.0 => PrueferAngle { alpha: FRAC_PI_2 },
            ExtendedReal::Finite(x) => PrueferAngle { alpha: 1.0_f64.atan2(x) },
        }
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn s(self) -> ExtendedReal {
        if self.alpha == 0.0 {
            ExtendedReal::Infinity
        } else if self.alpha == FRAC_PI_2 {
            ExtendedReal::Finite(0.0)
        } else {
            ExtendedReal::Finite(self.cos() / self.sin())
        }
    }

    pub fn cos(self) -> f64 {
        if self.alpha == FRAC_PI_2 {
            0.0
        } else {
            self.alpha.cos()
        }
    }

    pub fn sin(self) -> f64 {
        if self.alpha == 0.0 {
            0.0
        } else if self.alpha == FRAC_PI_2 {
            1.0
        } else {
            self.alpha.sin()
        }
    }

    pub fn is_dirichlet(self) -> bool {
        self.alpha == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexCondition {
    NeumannKirchhoff,
    DeltaS { alpha: PrueferAngle, t: ExtendedReal },
}

impl Default for VertexCondition {
    fn default() -> Self {
        VertexCondition::NeumannKirchhoff
    }
}

impl VertexCondition {
    /// δ coupling: continuity and a derivative jump σ f(v).
    pub fn delta(sigma: impl Into<ExtendedReal>) -> VertexCondition {
        VertexCondition::DeltaS { alpha: PrueferAngle::from_s(ExtendedReal::Infinity), t: sigma.into() }
    }

    /// δ' coupling, the s = 0 member of the family.
    pub fn delta_prime(sigma: impl Into<ExtendedReal>) -> VertexCondition {
        VertexCondition::DeltaS { alpha: PrueferAngle::from_s(ExtendedReal::Finite(0.0)), t: sigma.into() }
    }

    pub fn delta_s(s: ExtendedReal, t: ExtendedReal) -> VertexCondition {
        VertexCondition::DeltaS { alpha: PrueferAngle::from_s(s), t }
    }
}

/// `(A, B)` for a degree-2 marked vertex acting on `(u, u')` ordered
/// (side 1, side 2), with u' pointing into the edges. Rows have unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionMatrices {
    pub a: Matrix2<f64>,
    pub b: Matrix2<f64>,
}

pub fn condition_matrices(alpha: PrueferAngle, t: ExtendedReal) -> ConditionMatrices {
    let (c, s) = (alpha.cos(), alpha.sin());
    let (a, b) = match t {
        ExtendedReal::Infinity => (
            Matrix2::new(c, 0.0, 0.0, c),
            Matrix2::new(s, 0.0, 0.0, -s),
        ),
        ExtendedReal::Finite(t) if t == 0.0 => (
            Matrix2::new(c, -c, -s, s),
            Matrix2::new(s, s, c, c),
        ),
        ExtendedReal::Finite(t) => (
            Matrix2::new(c, -c, 0.5 * c * t + s, 0.5 * c * t - s),
            Matrix2::new(s, s, 0.5 * s * t - c, -0.5 * s * t - c),
        ),
    };
    let mut m = ConditionMatrices { a, b };
    for r in 0..2 {
        let n = (m.a.row(r).norm_squared() + m.b.row(r).norm_squared()).sqrt();
        m.a.row_mut(r).scale_mut(1.0 / n);
        m.b.row_mut(r).scale_mut(1.0 / n);
    }
    m
}

/// γ^s and γ^s* on both sides of a marked vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceVector {
    pub side1: (f64, f64),
    pub side2: (f64, f64),
}

fn rotate(f: f64, df: f64, alpha: PrueferAngle) -> (f64, f64) {
    let (c, s) = (alpha.cos(), alpha.sin());
    (c * f - s * df, s * f + c * df)
}

/// Traces from values and oriented derivatives on both sides.
pub fn trace(values: (f64, f64, f64, f64), alpha: PrueferAngle) -> TraceVector {
    let (f1, df1, f2, df2) = values;
    TraceVector { side1: rotate(f1, df1, alpha), side2: rotate(f2, df2, alpha) }
}

/// Traces at a degree-1 vertex: the missing side copies γ^s and has γ^s* = 0.
pub fn trace_single(f: f64, df: f64, present: End, alpha: PrueferAngle) -> TraceVector {
    let (g, gs) = rotate(f, df, alpha);
    match present {
        End::Head => TraceVector { side1: (g, gs), side2: (g, 0.0) },
        End::Tail => TraceVector { side1: (g, 0.0), side2: (g, gs) },
    }
}

/// Robin coefficient ρ (u' = ρ u, u' into the edge) of a degree-1 δ_s vertex
/// whose single end is `end`. `None` means the vertex is Dirichlet.
pub fn robin_coefficient(alpha: PrueferAngle, t: ExtendedReal, end: End) -> Option<f64> {
    let (c, s) = (alpha.cos(), alpha.sin());
    let (num, den) = match (t, end) {
        (ExtendedReal::Infinity, End::Head) => (-c, s),
        (ExtendedReal::Infinity, End::Tail) => (c, s),
        (ExtendedReal::Finite(t), End::Head) => (s + t * c, c - t * s),
        (ExtendedReal::Finite(t), End::Tail) => (t * c - s, c + t * s),
    };
    if den == 0.0 || (num / den).is_infinite() {
        None
    } else {
        Some(num / den)
    }
}

/// Condition rows `A u + B u' = 0` over the ends at one vertex.
#[derive(Debug, Clone)]
pub struct VertexBlock {
    pub ends: Vec<EdgeEnd>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

/// Side 1 (head) and side 2 (tail) ends of a degree-2 marked vertex.
pub fn sides(graph: &MetricGraph, v: usize) -> Result<[EdgeEnd; 2]> {
    let ends = graph.ends(v);
    let id = graph.vertices()[v].id;
    if ends.len() != 2 {
        return Err(Error::UnsupportedDegree { vertex: id, degree: ends.len(), expected: "2" });
    }
    match (ends[0].end, ends[1].end) {
        (End::Head, End::Tail) => Ok([ends[0], ends[1]]),
        (End::Tail, End::Head) => Ok([ends[1], ends[0]]),
        _ => Err(Error::Orientation(id)),
    }
}

fn continuity_rows(d: usize, extra: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut a = DMatrix::zeros(d - 1 + extra, d);
    for i in 0..d - 1 {
        a[(i, i)] = std::f64::consts::FRAC_1_SQRT_2;
        a[(i, i + 1)] = -std::f64::consts::FRAC_1_SQRT_2;
    }
    (a, DMatrix::zeros(d - 1 + extra, d))
}

pub fn vertex_block(graph: &MetricGraph, v: usize) -> Result<VertexBlock> {
    let d = graph.degree(v);
    let id = graph.vertices()[v].id;
    if d == 0 {
        return Ok(VertexBlock { ends: vec![], a: DMatrix::zeros(0, 0), b: DMatrix::zeros(0, 0) });
    }
    match *graph.condition(v) {
        VertexCondition::NeumannKirchhoff => {
            let (a, mut b) = continuity_rows(d, 1);
            let w = 1.0 / (d as f64).sqrt();
            b.row_mut(d - 1).fill(w);
            Ok(VertexBlock { ends: graph.ends(v).to_vec(), a, b })
        }
        VertexCondition::DeltaS { alpha, t } if alpha.is_dirichlet() => match t {
            ExtendedReal::Infinity => Ok(VertexBlock {
                ends: graph.ends(v).to_vec(),
                a: DMatrix::identity(d, d),
                b: DMatrix::zeros(d, d),
            }),
            ExtendedReal::Finite(t) => {
                // Σ u' = t u, with u averaged over the (continuous) end values
                let (mut a, mut b) = continuity_rows(d, 1);
                let n = (1.0 + t * t / d as f64).sqrt();
                a.row_mut(d - 1).fill(-t / d as f64 / n);
                b.row_mut(d - 1).fill(1.0 / n);
                Ok(VertexBlock { ends: graph.ends(v).to_vec(), a, b })
            }
        },
        VertexCondition::DeltaS { alpha, t } => match d {
            1 => {
                let end = graph.ends(v)[0];
                let (a, b) = match robin_coefficient(alpha, t, end.end) {
                    None => (1.0, 0.0),
                    Some(rho) => {
                        let n = (1.0 + rho * rho).sqrt();
                        (-rho / n, 1.0 / n)
                    }
                };
                Ok(VertexBlock {
                    ends: vec![end],
                    a: DMatrix::from_element(1, 1, a),
                    b: DMatrix::from_element(1, 1, b),
                })
            }
            2 => {
                let ends = sides(graph, v)?;
                let m = condition_matrices(alpha, t);
                Ok(VertexBlock {
                    ends: ends.to_vec(),
                    a: DMatrix::from_fn(2, 2, |i, j| m.a[(i, j)]),
                    b: DMatrix::from_fn(2, 2, |i, j| m.b[(i, j)]),
                })
            }
            _ => Err(Error::UnsupportedDegree { vertex: id, degree: d, expected: "1 or 2" }),
        },
    }
}

/// σ_v(k) = -(A + ikB)⁻¹(A - ikB), indexed by the block's end order. Valid
/// for any complex k where A + ikB is invertible.
pub fn block_scattering(block: &VertexBlock, k: Complex64) -> Option<DMatrix<Complex64>> {
    let ik = Complex64::i() * k;
    let a = block.a.map(Complex64::from);
    let b = block.b.map(Complex64::from);
    let lhs = &a + &b * ik;
    let rhs = -(&a - &b * ik);
    lhs.lu().solve(&rhs)
}

/// The 2×2 scattering matrix of a degree-2 marked vertex, (side 1, side 2).
pub fn vertex_scattering(m: &ConditionMatrices, k: f64) -> Result<Matrix2<Complex64>> {
    let ik = Complex64::new(0.0, k);
    let a = m.a.map(Complex64::from);
    let b = m.b.map(Complex64::from);
    let lhs = a + b * ik;
    let rhs = -(a - b * ik);
    lhs.lu().solve(&rhs).ok_or(Error::SingularCondition(0))
}

/// Dof structure and boundary term of a vertex in the quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexForm {
    /// One shared value for every end, boundary term `coeff |u|²`.
    Shared { coeff: f64 },
    /// All end values vanish.
    Dirichlet,
    /// Independent values per end, boundary term `uᵀ R u + jump |u₁ - u₂|²`.
    /// The jump part is kept apart because it grows without bound near a
    /// degenerate coupling; it is zero unless there are exactly two ends.
    Free { r: DMatrix<f64>, jump: f64 },
}

impl VertexForm {
    /// The full boundary matrix of a free form.
    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            VertexForm::Free { r, jump } if *jump != 0.0 => {
                let w = *jump;
                Some(r + DMatrix::from_row_slice(2, 2, &[w, -w, -w, w]))
            }
            VertexForm::Free { r, .. } => Some(r.clone()),
            _ => None,
        }
    }
}

/// Form description of vertex `v`, with ends in the order of `vertex_block`.
pub fn vertex_form(graph: &MetricGraph, v: usize) -> Result<(Vec<EdgeEnd>, VertexForm)> {
    let d = graph.degree(v);
    let id = graph.vertices()[v].id;
    let ends = graph.ends(v).to_vec();
    match *graph.condition(v) {
        VertexCondition::NeumannKirchhoff => Ok((ends, VertexForm::Shared { coeff: 0.0 })),
        VertexCondition::DeltaS { alpha, t } if alpha.is_dirichlet() => match t {
            ExtendedReal::Infinity => Ok((ends, VertexForm::Dirichlet)),
            ExtendedReal::Finite(t) => Ok((ends, VertexForm::Shared { coeff: t })),
        },
        VertexCondition::DeltaS { alpha, t } => match d {
            0 => Ok((ends, VertexForm::Shared { coeff: 0.0 })),
            1 => Ok((
                ends.clone(),
                match robin_coefficient(alpha, t, ends[0].end) {
                    None => VertexForm::Dirichlet,
                    Some(rho) => VertexForm::Free { r: DMatrix::from_element(1, 1, rho), jump: 0.0 },
                },
            )),
            2 => {
                let ends = sides(graph, v)?.to_vec();
                let s = alpha.cos() / alpha.sin();
                let hard = DMatrix::from_row_slice(2, 2, &[-s, 0.0, 0.0, s]);
                Ok((
                    ends,
                    match t {
                        ExtendedReal::Finite(t) if t == 0.0 => VertexForm::Shared { coeff: 0.0 },
                        ExtendedReal::Infinity => VertexForm::Free { r: hard, jump: 0.0 },
                        ExtendedReal::Finite(t) => {
                            VertexForm::Free { r: hard, jump: -1.0 / (alpha.sin().powi(2) * t) }
                        }
                    },
                ))
            }
            _ => Err(Error::UnsupportedDegree { vertex: id, degree: d, expected: "1 or 2" }),
        },
    }
}

/// A constant C ≥ 0 such that the vertex boundary term is bounded below by
/// -C Σ |u|². Used to seed the search window for negative eigenvalues.
pub fn form_bound(form: &VertexForm) -> f64 {
    match form {
        VertexForm::Shared { coeff } => (-coeff).max(0.0),
        VertexForm::Dirichlet => 0.0,
        VertexForm::Free { .. } => {
            let e = form.matrix().unwrap().symmetric_eigen();
            (-e.eigenvalues.min()).max(0.0)
        }
    }
}

/// Derivative of a simple eigenvalue in t at a set of marked points, from the
/// values of a unit-norm eigenfunction on both sides of each point.
pub fn hadamard_derivative(
    alpha: PrueferAngle,
    t: ExtendedReal,
    sides: &[(f64, f64)],
) -> Result<f64> {
    if alpha.is_dirichlet() {
        return Ok(sides.iter().map(|(f1, _)| f1 * f1).sum());
    }
    match t {
        ExtendedReal::Finite(t) if t != 0.0 => {
            let w = 1.0 / (alpha.sin().powi(2) * t * t);
            Ok(sides.iter().map(|(f1, f2)| w * (f2 - f1).powi(2)).sum())
        }
        _ => Err(Error::Precondition(
            "the t-derivative formula needs finite non-zero t when s is finite".into(),
        )),
    }
}
