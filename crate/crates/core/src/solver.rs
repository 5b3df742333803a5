//! Eigenvalue solver.
//!
//! Above a small wave number the eigenphases of U(k) = S(k)e^{ikL} are
//! followed continuously in k; every passage of a phase through 2πZ is an
//! eigenvalue k², refined by Brent's method on the tracked phase. Below that
//! wave number, including the negative spectrum and λ = 0, eigenvalues are
//! isolated by bisection on the exact counting function of [`crate::count`].
//! Every slice is certified by comparing the number found with the count.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::count::MorseCounter;
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{unitary_eigen, wrap};
use crate::scattering::Scattering;

/// How an eigenfunction looks on the edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    /// λ = k² > 0, f = a e^{ikx} + b e^{ik(ℓ-x)}
    Oscillatory(f64),
    /// λ = -κ² < 0, f = a e^{-κx} + b e^{-κ(ℓ-x)}
    Evanescent(f64),
    /// λ = 0, f = a + b x
    Zero,
}

impl Wave {
    pub fn from_lambda(lambda: f64) -> Wave {
        if lambda > 0.0 {
            Wave::Oscillatory(lambda.sqrt())
        } else if lambda < 0.0 {
            Wave::Evanescent((-lambda).sqrt())
        } else {
            Wave::Zero
        }
    }

    pub fn lambda(self) -> f64 {
        match self {
            Wave::Oscillatory(k) => k * k,
            Wave::Evanescent(kappa) => -kappa * kappa,
            Wave::Zero => 0.0,
        }
    }

    /// k for positive, κ for negative eigenvalues, 0 at λ = 0.
    pub fn k_or_kappa(self) -> f64 {
        match self {
            Wave::Oscillatory(k) => k,
            Wave::Evanescent(kappa) => kappa,
            Wave::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Coefficient vector of unit Euclidean norm.
    UnitVector,
    /// Eigenfunction of unit L² norm.
    UnitL2,
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// 1-based index of the first copy, counting multiplicity.
    pub index: usize,
    pub lambda: f64,
    pub wave: Wave,
    pub multiplicity: usize,
    /// Orthonormal coefficient vectors, entries (2e, 2e + 1) belonging to edge e.
    pub amplitudes: Vec<DVector<Complex64>>,
    pub normalization: Normalization,
}

/// Evidence that a slice holds every eigenvalue of its window.
#[derive(Debug, Clone, Default)]
pub struct Certificate {
    /// Window actually certified: eigenvalues in `[lo, hi)`.
    pub lo: f64,
    pub hi: f64,
    /// N(hi) - N(lo) from the counting function.
    pub counted: usize,
    /// Eigenvalues located, with multiplicity.
    pub found: usize,
    /// Upward and downward passages of eigenphases through 2πZ.
    pub up: usize,
    pub down: usize,
    /// Largest mismatch between the tracked phase sum and arg det U.
    pub winding_defect: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    pub eigenpairs: Vec<Eigenpair>,
    pub certificate: Certificate,
}

impl SpectrumSlice {
    /// Eigenvalues repeated by multiplicity.
    pub fn values(&self) -> Vec<f64> {
        self.eigenpairs
            .iter()
            .flat_map(|e| std::iter::repeat(e.lambda).take(e.multiplicity))
            .collect()
    }
}

/// Solver state for one graph.
#[derive(Debug, Clone)]
pub struct Solver {
    scattering: Scattering,
    morse: MorseCounter,
    l_max: f64,
    l_total: f64,
    /// Eigenphase tracking starts here; below it the counting function rules.
    k_split: f64,
    lower: f64,
    /// Largest accepted k-step.
    h_max: f64,
}

/// Result of following the phases over a k-interval.
struct Track {
    roots: Vec<f64>,
    up: usize,
    down: usize,
    winding_defect: f64,
}

/// Phases and eigenvectors of U at one k, with continuous lifts.
#[derive(Clone)]
struct PhaseState {
    k: f64,
    phases: Vec<f64>,
    lifts: Vec<f64>,
    vecs: DMatrix<Complex64>,
}

struct Tolerance;

impl roots::Convergency<f64> for Tolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= 4.0 * f64::EPSILON * x1.abs().max(x2.abs()).max(1.0)
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 200
    }
}

/// Greedy assignment by eigenvector overlap: `perm[j]` is the new column
/// continuing old column j.
fn match_columns(old: &DMatrix<Complex64>, new: &DMatrix<Complex64>) -> Vec<usize> {
    let n = old.ncols();
    let overlap = old.adjoint() * new;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            pairs.push((overlap[(j, i)].norm_sqr(), j, i));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (_, j, i) in pairs {
        if perm[j] == usize::MAX && !used[i] {
            perm[j] = i;
            used[i] = true;
        }
    }
    perm
}

impl Solver {
    pub fn new(graph: &MetricGraph) -> Result<Solver> {
        let scattering = Scattering::new(graph)?;
        let morse = MorseCounter::new(graph)?;
        let l_max = graph.max_length();
        let lower = morse.lower_bound();
        // An eigenvalue at the split would be claimed by neither side, so the
        // split is moved down until no eigenphase is near 0 there.
        let mut k_split = 0.5 * PI / l_max;
        for _ in 0..40 {
            let (phases, _) = unitary_eigen(&scattering.u_matrix(k_split)?)?;
            if phases.iter().all(|p| p.abs() > 1e-3) {
                break;
            }
            k_split *= 0.93;
        }
        Ok(Solver {
            scattering,
            morse,
            l_max,
            l_total: graph.total_length(),
            k_split,
            lower,
            h_max: PI / (6.0 * l_max),
        })
    }

    pub fn scattering(&self) -> &Scattering {
        &self.scattering
    }

    pub fn morse(&self) -> &MorseCounter {
        &self.morse
    }

    /// A certified lower bound: no eigenvalue lies below it.
    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    /// Moves λ off the edge Dirichlet spectra, where the counting matrix is
    /// singular, by a relative amount of at most about 1e-8.
    fn regular_point(&self, lambda: f64, upward: bool) -> f64 {
        let mut x = lambda;
        let step = 1e-9 * lambda.abs().max(1.0 / (self.l_max * self.l_max));
        let mut i = 0.0;
        while self.morse.pole_distance(x) < 1e-10 && i < 16.0 {
            i += 1.0;
            x = if upward { lambda + i * step } else { lambda - i * step };
        }
        x
    }

    /// N(λ) from the counting function, λ nudged off edge Dirichlet values.
    pub fn count_below(&self, lambda: f64) -> usize {
        self.morse.count_below(self.regular_point(lambda, false))
    }

    /// N(λ) with the part above the tracking threshold obtained from phase
    /// passages alone, without the counting function.
    pub fn count_below_tracked(&self, lambda: f64) -> Result<usize> {
        let lambda_split = self.k_split * self.k_split;
        if lambda <= lambda_split {
            return Ok(self.morse.count_below(lambda));
        }
        let base = self.morse.count_below(lambda_split);
        let t = self.track(self.k_split, lambda.sqrt(), false)?;
        Ok(base + t.up + t.down)
    }

    fn decompose(&self, k: f64) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        unitary_eigen(&self.scattering.u_matrix(k)?)
    }

    fn initial_state(&self, k: f64) -> Result<PhaseState> {
        let (phases, vecs) = self.decompose(k)?;
        Ok(PhaseState { k, lifts: phases.clone(), phases, vecs })
    }

    /// Advances `s` to `k`; returns the new state and the largest phase jump.
    fn advance(&self, s: &PhaseState, k: f64) -> Result<(PhaseState, f64)> {
        let (phases, vecs) = self.decompose(k)?;
        let perm = match_columns(&s.vecs, &vecs);
        let n = phases.len();
        let mut lifts = vec![0.0; n];
        let mut new_phases = vec![0.0; n];
        let mut new_vecs = DMatrix::zeros(n, n);
        let mut max_jump: f64 = 0.0;
        for j in 0..n {
            let i = perm[j];
            let jump = wrap(phases[i] - s.phases[j]);
            max_jump = max_jump.max(jump.abs());
            lifts[j] = s.lifts[j] + jump;
            new_phases[j] = phases[i];
            new_vecs.set_column(j, &vecs.column(i));
        }
        Ok((PhaseState { k, phases: new_phases, lifts, vecs: new_vecs }, max_jump))
    }

    /// Follows the eigenphases from `ka` to `kb`, collecting every passage
    /// through 2πZ. With `refine`, each passage is located to machine
    /// precision; otherwise only counted.
    fn track_with(&self, ka: f64, kb: f64, refine: bool, h_max: f64) -> Result<Track> {
        let mut out = Track { roots: vec![], up: 0, down: 0, winding_defect: 0.0 };
        if kb <= ka {
            return Ok(out);
        }
        let mut state = self.initial_state(ka)?;
        let mut h = (h_max / 4.0).min(kb - ka);
        while state.k < kb {
            let k_new = (state.k + h).min(kb);
            let (next, jump) = self.advance(&state, k_new)?;
            let h_min = 1e-12 * k_new.max(1.0);
            if jump >= PI / 4.0 && k_new - state.k > h_min {
                h = 0.5 * (k_new - state.k);
                continue;
            }
            for j in 0..next.lifts.len() {
                let (a, b) = (state.lifts[j], next.lifts[j]);
                let (fa, fb) = ((a / TAU).floor(), (b / TAU).floor());
                if fb > fa {
                    for m in (fa as i64 + 1)..=(fb as i64) {
                        out.up += 1;
                        if refine {
                            out.roots.push(self.refine(&state, &next, j, m as f64 * TAU)?);
                        }
                    }
                } else if fa > fb {
                    for m in (fb as i64 + 1)..=(fa as i64) {
                        out.down += 1;
                        if refine {
                            out.roots.push(self.refine(&state, &next, j, m as f64 * TAU)?);
                        }
                    }
                }
            }
            // the tracked phase sum must equal arg det U = arg det S + 2kL
            let det = self.scattering.det_s(k_new)?;
            let total: f64 = next.phases.iter().sum();
            let defect = wrap(total - det.arg() - 2.0 * k_new * self.l_total).abs();
            out.winding_defect = out.winding_defect.max(defect);
            state = next;
            if jump < PI / 16.0 {
                h = (2.0 * h).min(h_max);
            }
        }
        Ok(out)
    }

    fn track(&self, ka: f64, kb: f64, refine: bool) -> Result<Track> {
        self.track_with(ka, kb, refine, self.h_max)
    }

    /// Locates k in [s0.k, s1.k] where lift j equals `target`.
    fn refine(&self, s0: &PhaseState, s1: &PhaseState, j: usize, target: f64) -> Result<f64> {
        let g = |k: f64| -> f64 {
            if k <= s0.k {
                return s0.lifts[j] - target;
            }
            if k >= s1.k {
                return s1.lifts[j] - target;
            }
            match self.advance(s0, k) {
                Ok((s, _)) => s.lifts[j] - target,
                Err(_) => f64::NAN,
            }
        };
        let (ga, gb) = (g(s0.k), g(s1.k));
        if ga == 0.0 {
            return Ok(s0.k);
        }
        if gb == 0.0 {
            return Ok(s1.k);
        }
        match roots::find_root_brent(s0.k, s1.k, g, &mut Tolerance) {
            Ok(k) => Ok(k),
            Err(_) => {
                // plain bisection as a fallback
                let (mut a, mut b) = (s0.k, s1.k);
                let sa = ga > 0.0;
                while b - a > 4.0 * f64::EPSILON * b {
                    let m = 0.5 * (a + b);
                    if (g(m) > 0.0) == sa {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                Ok(0.5 * (a + b))
            }
        }
    }

    /// Eigenvalues in [lo, hi) by bisection on the counting function, as
    /// (λ, multiplicity). Only valid below the first edge Dirichlet value.
    fn bisect_counts(&self, lo: f64, hi: f64, out: &mut Vec<(f64, usize)>) {
        let scale = 1.0 / (self.l_max * self.l_max);
        let n_lo = self.morse.count_below(lo);
        let n_hi = self.morse.count_below(hi);
        self.bisect_rec(lo, hi, n_lo, n_hi, scale, out);
    }

    fn bisect_rec(&self, lo: f64, hi: f64, n_lo: usize, n_hi: usize, scale: f64, out: &mut Vec<(f64, usize)>) {
        if n_hi <= n_lo {
            return;
        }
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * mid.abs().max(scale) || mid <= lo || mid >= hi {
            out.push((mid, n_hi - n_lo));
            return;
        }
        let n_mid = self.morse.count_below(mid);
        self.bisect_rec(lo, mid, n_lo, n_mid, scale, out);
        self.bisect_rec(mid, hi, n_mid, n_hi, scale, out);
    }

    /// Merges sorted roots into (k, multiplicity) clusters. Roots closer than
    /// the phase tolerance 1e-7 translated to k are one eigenvalue.
    fn cluster(&self, mut roots: Vec<f64>) -> Vec<(f64, usize)> {
        roots.sort_by(f64::total_cmp);
        let tol = 1e-7 / self.l_total.max(1e-300);
        let mut out: Vec<(f64, usize, f64)> = Vec::new();
        for k in roots {
            match out.last_mut() {
                Some(last) if k - last.2 <= tol * k.max(1.0) => {
                    last.0 += k;
                    last.1 += 1;
                    last.2 = k;
                }
                _ => out.push((k, 1, k)),
            }
        }
        out.into_iter().map(|(sum, m, _)| (sum / m as f64, m)).collect()
    }

    /// Amplitude vectors for an eigenvalue of multiplicity m: the m
    /// eigenvectors of U(k) with phase closest to 0, or the m smallest right
    /// singular vectors of the condition matrix for λ ≤ 0.
    pub fn amplitudes(&self, wave: Wave, m: usize) -> Result<Vec<DVector<Complex64>>> {
        match wave {
            Wave::Oscillatory(k) => {
                let (phases, vecs) = self.decompose(k)?;
                let mut idx: Vec<usize> = (0..phases.len()).collect();
                idx.sort_by(|&a, &b| phases[a].abs().total_cmp(&phases[b].abs()));
                let tol = 1e-6;
                if phases[idx[m - 1]].abs() > tol {
                    return Err(Error::StaleEigenvalue(k));
                }
                // re-orthonormalise the chosen eigenvectors
                let mut basis = DMatrix::zeros(phases.len(), m);
                for (c, &i) in idx.iter().take(m).enumerate() {
                    basis.set_column(c, &vecs.column(i));
                }
                let q = basis.qr().q();
                Ok((0..m).map(|c| q.column(c).into_owned()).collect())
            }
            Wave::Evanescent(kappa) => {
                let mtx = self.scattering.boundary_matrix(Complex64::new(0.0, kappa));
                smallest_singular_vectors(&mtx, m, kappa)
            }
            Wave::Zero => {
                let mtx = self.scattering.boundary_matrix_zero();
                smallest_singular_vectors(&mtx, m, 0.0)
            }
        }
    }

    /// All eigenvalues in [lo, hi] as values with multiplicity, certified.
    pub fn eigenvalues(&self, lo: f64, hi: f64) -> Result<(Vec<(f64, usize)>, Certificate)> {
        let lo = lo.max(self.lower);
        let lo_eval = self.regular_point(lo, false);
        let hi_eval = self.regular_point(hi, true);
        if hi_eval <= lo_eval {
            return Ok((vec![], Certificate { lo: lo_eval, hi: hi_eval, ..Default::default() }));
        }
        let n_lo = self.morse.count_below(lo_eval);
        let counted = self.morse.count_below(hi_eval) - n_lo;
        let lambda_split = self.k_split * self.k_split;
        let scale = 1.0 / (self.l_max * self.l_max);

        let mut found = Vec::new();
        if lo_eval < lambda_split {
            let mut low = Vec::new();
            self.bisect_counts(lo_eval, hi_eval.min(lambda_split), &mut low);
            for (lam, m) in low {
                let lam = if lam.abs() < 1e-10 * scale { 0.0 } else { lam };
                found.push((lam, m));
            }
        }
        let mut cert = Certificate { lo: lo_eval, hi: hi_eval, counted, ..Default::default() };
        if hi_eval > lambda_split {
            let ka = lo_eval.max(lambda_split).sqrt();
            let kb = hi_eval.sqrt();
            let mut h_max = self.h_max;
            let mut attempt = 0;
            loop {
                let t = self.track_with(ka, kb, true, h_max)?;
                let high: Vec<(f64, usize)> = self
                    .cluster(t.roots)
                    .into_iter()
                    .map(|(k, m)| (k * k, m))
                    .filter(|&(lam, _)| lam >= lo_eval && lam < hi_eval)
                    .collect();
                let total: usize =
                    found.iter().map(|f| f.1).sum::<usize>() + high.iter().map(|f| f.1).sum::<usize>();
                cert.up = t.up;
                cert.down = t.down;
                cert.winding_defect = t.winding_defect;
                if total == counted && t.winding_defect < 1e-6 {
                    found.extend(high);
                    break;
                }
                attempt += 1;
                if attempt > 3 {
                    found.extend(high);
                    let values = found.iter().map(|f| f.0).collect();
                    return Err(Error::Incomplete {
                        reason: format!(
                            "located {total} eigenvalues in [{lo_eval}, {hi_eval}), counting function gives {counted}"
                        ),
                        found: values,
                    });
                }
                h_max /= 4.0;
            }
        }
        cert.found = found.iter().map(|f| f.1).sum();
        if cert.found != counted {
            return Err(Error::Incomplete {
                reason: format!("located {} eigenvalues, counting function gives {counted}", cert.found),
                found: found.iter().map(|f| f.0).collect(),
            });
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok((found, cert))
    }

    /// Eigenpairs with λ in [lo, hi], certified complete.
    pub fn find_eigenvalues(&self, lo: f64, hi: f64) -> Result<SpectrumSlice> {
        let (values, certificate) = self.eigenvalues(lo, hi)?;
        let mut index = self.morse.count_below(certificate.lo) + 1;
        let mut eigenpairs = Vec::with_capacity(values.len());
        for (lambda, m) in values {
            let wave = Wave::from_lambda(lambda);
            let amplitudes = self.amplitudes(wave, m)?;
            eigenpairs.push(Eigenpair {
                index,
                lambda,
                wave,
                multiplicity: m,
                amplitudes,
                normalization: Normalization::UnitVector,
            });
            index += m;
        }
        Ok(SpectrumSlice { eigenpairs, certificate })
    }

    /// All negative eigenvalues.
    pub fn negative_spectrum(&self) -> Result<SpectrumSlice> {
        let scale = 1.0 / (self.l_max * self.l_max);
        self.find_eigenvalues(self.lower, -1e-9 * scale)
    }

    /// Smallest λ with N(λ) ≥ n.
    pub fn level_for_count(&self, n: usize) -> f64 {
        let mut hi = (PI * (n as f64 + 2.0) / self.l_total).powi(2).max(1.0 / (self.l_max * self.l_max));
        while self.count_below(hi) < n {
            hi *= 1.5;
        }
        hi
    }

    /// The first n eigenvalues counting multiplicity, as (λ, multiplicity);
    /// the last cluster may extend past n.
    pub fn lowest_values(&self, n: usize) -> Result<Vec<(f64, usize)>> {
        if n == 0 {
            return Ok(vec![]);
        }
        let mut hi = self.level_for_count(n);
        // make sure the n-th eigenvalue lies strictly below hi
        hi += 1e-6 * hi.abs().max(1.0);
        let (values, _) = self.eigenvalues(self.lower, hi)?;
        let mut out = Vec::new();
        let mut total = 0;
        for (lam, m) in values {
            if total >= n {
                break;
            }
            out.push((lam, m));
            total += m;
        }
        Ok(out)
    }

    /// The first n eigenvalues, repeated by multiplicity.
    pub fn lowest(&self, n: usize) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = self
            .lowest_values(n)?
            .into_iter()
            .flat_map(|(l, m)| std::iter::repeat(l).take(m))
            .collect();
        out.truncate(n);
        Ok(out)
    }

    /// Eigenpairs covering indices 1..=n.
    pub fn lowest_pairs(&self, n: usize) -> Result<Vec<Eigenpair>> {
        let values = self.lowest_values(n)?;
        let mut index = 1;
        let mut out = Vec::with_capacity(values.len());
        for (lambda, m) in values {
            let wave = Wave::from_lambda(lambda);
            out.push(Eigenpair {
                index,
                lambda,
                wave,
                multiplicity: m,
                amplitudes: self.amplitudes(wave, m)?,
                normalization: Normalization::UnitVector,
            });
            index += m;
        }
        Ok(out)
    }
}

fn smallest_singular_vectors(
    m: &DMatrix<Complex64>,
    count: usize,
    at: f64,
) -> Result<Vec<DVector<Complex64>>> {
    let n = m.ncols();
    let mut sq = DMatrix::zeros(m.nrows().max(n), n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smax = svd.singular_values.max();
    if svd.singular_values[idx[count - 1]] > 1e-6 * smax {
        return Err(Error::StaleEigenvalue(at));
    }
    Ok(idx.iter().take(count).map(|&i| v_t.row(i).adjoint()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::VertexCondition;
    use crate::graph::Vertex;

    const NK: VertexCondition = VertexCondition::NeumannKirchhoff;

    fn graph(conds: &[VertexCondition], edges: Vec<(u64, u64, u64, f64)>) -> MetricGraph {
        let vs = conds
            .iter()
            .enumerate()
            .map(|(i, c)| Vertex { id: i as u64, condition: *c })
            .collect();
        MetricGraph::new(vs, edges).unwrap()
    }

    #[test]
    fn equilateral_star_with_centre_coupling() {
        // (π/2)² sits on the default tracking split, and the phases at some
        // k stall the plain shifted QR iteration
        let g = graph(&[VertexCondition::delta(1.0), NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 0, 2, 1.0), (2, 0, 3, 1.0)]);
        let s = Solver::new(&g).unwrap();
        let vals = s.lowest_values(200).unwrap();
        assert!(vals.iter().any(|&(l, m)| (l - PI * PI / 4.0).abs() < 1e-10 && m == 2));
        assert!(vals.iter().map(|v| v.1).sum::<usize>() >= 200);
    }

    #[test]
    fn neumann_interval_window() {
        let s = Solver::new(&graph(&[NK, NK], vec![(0, 0, 1, PI)])).unwrap();
        let slice = s.find_eigenvalues(0.5, 9.5).unwrap();
        let ks: Vec<f64> = slice.eigenpairs.iter().map(|e| e.wave.k_or_kappa()).collect();
        assert_eq!(ks.len(), 3);
        for (i, k) in ks.iter().enumerate() {
            assert!((k - (i + 1) as f64).abs() < 1e-12, "{k}");
        }
        assert_eq!(slice.eigenpairs[0].index, 2);
        assert!(slice.eigenpairs.iter().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn loop_window_is_degenerate() {
        let s = Solver::new(&graph(&[NK], vec![(0, 0, 0, TAU)])).unwrap();
        let slice = s.find_eigenvalues(0.5, 4.5).unwrap();
        let got: Vec<(f64, usize)> = slice.eigenpairs.iter().map(|e| (e.lambda, e.multiplicity)).collect();
        assert_eq!(got.len(), 2);
        assert!((got[0].0 - 1.0).abs() < 1e-12 && got[0].1 == 2);
        assert!((got[1].0 - 4.0).abs() < 1e-12 && got[1].1 == 2);
        assert_eq!(slice.eigenpairs[0].amplitudes.len(), 2);
    }

    #[test]
    fn robin_end_matches_transcendental_root() {
        // f'(0) = f(0), f'(1) = 0 → k tan k = 1 for f = cos(k(1 - x))
        let s = Solver::new(&graph(&[VertexCondition::delta(1.0), NK], vec![(0, 0, 1, 1.0)])).unwrap();
        let (mut a, mut b) = (1e-6, PI / 2.0 - 1e-9);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m * m.tan() - 1.0 > 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let lam = s.lowest(1).unwrap()[0];
        assert!((lam.sqrt() - 0.5 * (a + b)).abs() < 1e-10);
    }

    #[test]
    fn zero_mode_and_negative_state() {
        let s = Solver::new(&graph(&[NK, NK, NK], vec![(0, 0, 1, 1.0), (1, 1, 2, 2.0)])).unwrap();
        let slice = s.find_eigenvalues(-1.0, 0.1).unwrap();
        assert_eq!(slice.eigenpairs.len(), 1);
        assert_eq!(slice.eigenpairs[0].lambda, 0.0);
        assert!(s.negative_spectrum().unwrap().eigenpairs.is_empty());

        // δ(-4) at the midpoint of the unit interval: one bound state,
        // f = cosh(κ(1/2 - |x - 1/2|)), 2κ tanh(κ/2) = 4
        let g = graph(
            &[NK, VertexCondition::delta(-4.0), NK],
            vec![(0, 0, 1, 0.5), (1, 1, 2, 0.5)],
        );
        let s = Solver::new(&g).unwrap();
        let neg = s.negative_spectrum().unwrap();
        assert_eq!(neg.eigenpairs.len(), 1);
        let kappa = neg.eigenpairs[0].wave.k_or_kappa();
        assert!((2.0 * kappa * (kappa / 2.0).tanh() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn tracked_and_counted_agree() {
        let g = graph(
            &[VertexCondition::delta(2.0), NK, NK, NK],
            vec![(0, 0, 1, 1.0), (1, 0, 2, 2f64.sqrt()), (2, 0, 3, PI / 3.0)],
        );
        let s = Solver::new(&g).unwrap();
        for lam in [3.0, 50.0, 333.3] {
            assert_eq!(s.count_below(lam), s.count_below_tracked(lam).unwrap());
        }
    }
}
