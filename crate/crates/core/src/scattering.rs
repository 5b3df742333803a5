//! Bond scattering matrix S(k), the quantum evolution map U(k) = S(k)e^{ikL},
//! the secular function, and the vertex-condition matrix in edge-wave
//! coefficients used for kernels at complex k.
//!
//! On edge e the coefficients are the forward and reverse bond amplitudes:
//! f_e(x) = a_{2e} e^{ikx} + a_{2e+1} e^{ik(ℓ-x)}.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::conditions::{block_scattering, vertex_block, VertexBlock};
use crate::error::{Error, Result};
use crate::graph::{End, MetricGraph};
use crate::linalg::unitary_eigen;

/// Vertex blocks of a graph, precomputed for repeated evaluation in k.
#[derive(Debug, Clone)]
pub struct Scattering {
    blocks: Vec<VertexBlock>,
    vertex_ids: Vec<u64>,
    lengths: Vec<f64>,
    /// true when no block depends on k
    constant: bool,
}

impl Scattering {
    pub fn new(graph: &MetricGraph) -> Result<Scattering> {
        let blocks = (0..graph.vertex_count())
            .map(|v| vertex_block(graph, v))
            .collect::<Result<Vec<_>>>()?;
        // σ_v is k-independent exactly when B = 0 or A = 0 on every row
        let constant = blocks.iter().all(|b| {
            (0..b.a.nrows()).all(|r| b.a.row(r).norm() == 0.0 || b.b.row(r).norm() == 0.0)
        });
        Ok(Scattering {
            blocks,
            vertex_ids: graph.vertices().iter().map(|v| v.id).collect(),
            lengths: graph.edges().iter().map(|e| e.length).collect(),
            constant,
        })
    }

    pub fn bond_count(&self) -> usize {
        2 * self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn is_k_independent(&self) -> bool {
        self.constant
    }

    pub fn blocks(&self) -> &[VertexBlock] {
        &self.blocks
    }

    /// S(k) with `S[out][in]` coupling the bond arriving at a vertex to the
    /// bond leaving it.
    pub fn s_matrix(&self, k: Complex64) -> Result<DMatrix<Complex64>> {
        let n = self.bond_count();
        let mut s = DMatrix::zeros(n, n);
        for (v, block) in self.blocks.iter().enumerate() {
            if block.ends.is_empty() {
                continue;
            }
            let sigma =
                block_scattering(block, k).ok_or(Error::SingularCondition(self.vertex_ids[v]))?;
            for (i, ei) in block.ends.iter().enumerate() {
                for (j, ej) in block.ends.iter().enumerate() {
                    s[(ej.outgoing_bond(), ei.incoming_bond())] += sigma[(j, i)];
                }
            }
        }
        Ok(s)
    }

    /// U(k) = S(k) e^{ikL}, for real k > 0.
    pub fn u_matrix(&self, k: f64) -> Result<DMatrix<Complex64>> {
        let mut u = self.s_matrix(Complex64::from(k))?;
        for b in 0..u.ncols() {
            let phase = Complex64::from_polar(1.0, k * self.lengths[b / 2]);
            u.column_mut(b).iter_mut().for_each(|z| *z *= phase);
        }
        Ok(u)
    }

    /// det S(k) from the vertex blocks. Each block maps incoming bonds to the
    /// reversed outgoing bonds, and reversal is a product of E transpositions.
    pub fn det_s(&self, k: f64) -> Result<Complex64> {
        let sign = if self.lengths.len() % 2 == 0 { 1.0 } else { -1.0 };
        let mut d = Complex64::from(sign);
        for (v, block) in self.blocks.iter().enumerate() {
            if block.ends.is_empty() {
                continue;
            }
            let sigma = block_scattering(block, Complex64::from(k))
                .ok_or(Error::SingularCondition(self.vertex_ids[v]))?;
            d *= sigma.determinant();
        }
        Ok(d)
    }

    /// Rows of the vertex conditions applied to f_e = a e^{ikx} + b e^{ik(ℓ-x)}
    /// for complex k ≠ 0; with k = iκ these are decaying exponentials.
    pub fn boundary_matrix(&self, k: Complex64) -> DMatrix<Complex64> {
        let ik = Complex64::i() * k;
        self.assemble_rows(|edge, end| {
            let e = (ik * self.lengths[edge]).exp();
            match end {
                // (value, into-edge derivative) as coefficients of (a, b)
                End::Tail => ([Complex64::from(1.0), e], [ik, -ik * e]),
                End::Head => ([e, Complex64::from(1.0)], [-ik * e, ik]),
            }
        })
    }

    /// Vertex conditions applied to f_e = p + q x, the k = 0 solutions.
    pub fn boundary_matrix_zero(&self) -> DMatrix<Complex64> {
        let one = Complex64::from(1.0);
        let zero = Complex64::from(0.0);
        self.assemble_rows(|edge, end| match end {
            End::Tail => ([one, zero], [zero, one]),
            End::Head => ([one, Complex64::from(self.lengths[edge])], [zero, -one]),
        })
    }

    fn assemble_rows<F>(&self, coeffs: F) -> DMatrix<Complex64>
    where
        F: Fn(usize, End) -> ([Complex64; 2], [Complex64; 2]),
    {
        let rows: usize = self.blocks.iter().map(|b| b.a.nrows()).sum();
        let mut m = DMatrix::zeros(rows, self.bond_count());
        let mut r0 = 0;
        for block in &self.blocks {
            for (i, end) in block.ends.iter().enumerate() {
                let (val, der) = coeffs(end.edge, end.end);
                for r in 0..block.a.nrows() {
                    for c in 0..2 {
                        m[(r0 + r, 2 * end.edge + c)] +=
                            val[c] * block.a[(r, i)] + der[c] * block.b[(r, i)];
                    }
                }
            }
            r0 += block.a.nrows();
        }
        m
    }
}

/// F(k) = det(I - U(k)) together with the eigenphases of U(k).
#[derive(Debug, Clone)]
pub struct SecularEvaluation {
    pub k: f64,
    pub value: Complex64,
    /// Eigenphases in [0, 2π), sorted.
    pub phases: Vec<f64>,
    /// Distance of the nearest eigenphase to 0 mod 2π.
    pub nearest: f64,
}

pub fn secular(scattering: &Scattering, k: f64) -> Result<SecularEvaluation> {
    let u = scattering.u_matrix(k)?;
    let n = u.nrows();
    let value = (DMatrix::identity(n, n) - &u).determinant();
    let (raw, _) = unitary_eigen(&u)?;
    let mut phases: Vec<f64> = raw.iter().map(|p| p.rem_euclid(std::f64::consts::TAU)).collect();
    phases.sort_by(f64::total_cmp);
    let nearest = raw.iter().map(|p| p.abs()).fold(f64::INFINITY, f64::min);
    Ok(SecularEvaluation { k, value, phases, nearest })
}

/// Residual ‖(I - U(k))a‖ / ‖a‖.
pub fn kernel_residual(scattering: &Scattering, k: f64, a: &DVector<Complex64>) -> Result<f64> {
    let u = scattering.u_matrix(k)?;
    Ok((a - &u * a).norm() / a.norm())
}
