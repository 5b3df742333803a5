//! The δ_s family H^s(t) on a marked set B: spectral curves, level
//! crossings and spectral flow, and the checks built on them.
//!
//! The coupling is handled through τ = atan t ∈ [-π/2, π/2], both ends
//! being the hard condition t = ∞. Spectral curves increase with τ. Each
//! member of B has one τ at which its condition degenerates; just above it
//! one curve enters from -∞. Between these points the count N(c; τ) of
//! eigenvalues below c is non-increasing, and at a degenerate point it takes
//! the limit from the left.

use std::f64::consts::FRAC_PI_2;

use crate::conditions::ExtendedReal;
use crate::count::MorseCounter;
use crate::eigenfunction::{find_s_points, genericity, l2_normalize, partition, GraphFunction};
use crate::error::{Error, Result};
use crate::graph::{cut, CutLocation, MetricGraph};
use crate::robin::{assemble, singular_tau, MarkedGraph};
use crate::solver::{Eigenpair, Solver};

pub fn tau_of(t: ExtendedReal) -> f64 {
    match t {
        ExtendedReal::Infinity => FRAC_PI_2,
        ExtendedReal::Finite(t) => t.atan(),
    }
}

pub fn t_of(tau: f64) -> ExtendedReal {
    if tau.abs() >= FRAC_PI_2 {
        ExtendedReal::Infinity
    } else {
        ExtendedReal::Finite(tau.tan())
    }
}

/// The δ_s family on one marked set.
#[derive(Debug, Clone)]
pub struct Family {
    pub marked: MarkedGraph,
    pub s: ExtendedReal,
    /// (τ, number of curves entering just above τ), ascending in τ.
    singular: Vec<(f64, usize)>,
}

impl Family {
    pub fn new(graph: &MetricGraph, b: &[CutLocation], s: ExtendedReal) -> Result<Family> {
        Ok(Family::from_marked(MarkedGraph::new(graph, b)?, s))
    }

    pub fn from_marked(marked: MarkedGraph, s: ExtendedReal) -> Family {
        let mut singular: Vec<(f64, usize)> = Vec::new();
        for p in 0..marked.len() {
            let tau = singular_tau(&marked, p, s);
            match singular.iter_mut().find(|(t, _)| *t == tau) {
                Some(entry) => entry.1 += 1,
                None => singular.push((tau, 1)),
            }
        }
        singular.sort_by(|a, b| a.0.total_cmp(&b.0));
        Family { marked, s, singular }
    }

    pub fn singular_points(&self) -> &[(f64, usize)] {
        &self.singular
    }

    pub fn at(&self, t: ExtendedReal) -> MetricGraph {
        self.marked.family(self.s, t)
    }

    pub fn at_tau(&self, tau: f64) -> MetricGraph {
        self.at(t_of(tau))
    }

    /// N(c; τ) from the counting function.
    pub fn count_below(&self, tau: f64, level: f64) -> Result<usize> {
        Ok(MorseCounter::new(&self.at_tau(tau))?.count_below(level))
    }

    /// N(c; τ) from the eigenvalue solver's phase tracking.
    pub fn count_below_tracked(&self, tau: f64, level: f64) -> Result<usize> {
        Solver::new(&self.at_tau(tau))?.count_below_tracked(level)
    }

    /// Moves the level off the edge Dirichlet values of the marked graph.
    pub fn regular_level(&self, level: f64) -> Result<f64> {
        let m = MorseCounter::new(&self.at(ExtendedReal::Finite(0.0)))?;
        let mut c = level;
        let step = 1e-9 * level.abs().max(1.0);
        while m.pole_distance(c) < 1e-10 {
            c += step;
        }
        Ok(c)
    }

    /// Continuity regions covering [τ0, τ1]: (start, end, entering curves at
    /// the start).
    fn regions(&self, tau0: f64, tau1: f64) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::new();
        let mut start = tau0;
        let mut entering = self.entering_at(tau0);
        for &(sigma, d) in &self.singular {
            if sigma > tau0 && sigma < tau1 {
                out.push((start, sigma, entering));
                start = sigma;
                entering = d;
            }
        }
        out.push((start, tau1, entering));
        out
    }

    fn entering_at(&self, tau: f64) -> usize {
        self.singular.iter().filter(|(s, _)| *s == tau).map(|(_, d)| d).sum()
    }

    /// A point just above a degenerate τ where every entering curve is
    /// already present and still below the level.
    fn just_above(&self, sigma: f64, entering: usize, level: f64, end: f64) -> Result<(f64, usize)> {
        let base = self.count_below(sigma, level)?;
        if entering == 0 {
            return Ok((sigma, base));
        }
        let mut delta = 1e-3_f64.min(0.5 * (end - sigma));
        while delta > 1e-13 {
            let n = self.count_below(sigma + delta, level)?;
            if n == base + entering {
                return Ok((sigma + delta, n));
            }
            delta *= 0.1;
        }
        Err(Error::Incomplete {
            reason: format!("curves entering at τ = {sigma} not resolved below level {level}"),
            found: vec![],
        })
    }
}

/// One passage of spectral curves through a level, always upward.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub tau: f64,
    pub t: ExtendedReal,
    /// Sorted position of the lowest crossing curve just before the passage.
    pub curve: usize,
    pub multiplicity: usize,
}

/// Width in τ below which a count drop is reported as one crossing.
pub const TAU_TOLERANCE: f64 = 1e-13;

fn locate(
    family: &Family,
    level: f64,
    lo: (f64, usize),
    hi: (f64, usize),
    out: &mut Vec<Crossing>,
) -> Result<()> {
    if lo.1 == hi.1 {
        return Ok(());
    }
    if lo.1 < hi.1 {
        return Err(Error::Incomplete {
            reason: format!("count rises from {} to {} between τ = {} and {}", lo.1, hi.1, lo.0, hi.0),
            found: vec![],
        });
    }
    if hi.0 - lo.0 <= TAU_TOLERANCE {
        let tau = 0.5 * (lo.0 + hi.0);
        let m = lo.1 - hi.1;
        out.push(Crossing { tau, t: t_of(tau), curve: lo.1 + 1 - m, multiplicity: m });
        return Ok(());
    }
    let mid = 0.5 * (lo.0 + hi.0);
    let n = family.count_below(mid, level)?;
    locate(family, level, lo, (mid, n), out)?;
    locate(family, level, (mid, n), hi, out)
}

/// Every crossing of `level` for τ in [τ0, τ1], located to TAU_TOLERANCE.
pub fn crossings(family: &Family, level: f64, tau0: f64, tau1: f64) -> Result<Vec<Crossing>> {
    let mut out = Vec::new();
    for (a, b, entering) in family.regions(tau0, tau1) {
        let start = family.just_above(a, entering, level, b)?;
        let end = (b, family.count_below(b, level)?);
        locate(family, level, start, end, &mut out)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowCount {
    pub level: f64,
    pub interval: (f64, f64),
    pub flow: i64,
    pub crossings: Vec<Crossing>,
}

/// Spectral flow through `level` over t ∈ [t0, t1], the t-line read from
/// -∞ to +∞. The partition formula on the counting function and the
/// phase-tracked counts on a grid of `cells` per region must agree with the
/// enumerated crossings.
pub fn spectral_flow(
    family: &Family,
    level: f64,
    t0: ExtendedReal,
    t1: ExtendedReal,
    cells: usize,
) -> Result<FlowCount> {
    let tau0 = match t0 {
        ExtendedReal::Infinity => -FRAC_PI_2,
        t => tau_of(t),
    };
    let tau1 = tau_of(t1);
    if tau1 < tau0 {
        return Err(Error::Precondition("flow interval must be increasing".into()));
    }
    let level = family.regular_level(level)?;
    let mut partition_flow = 0i64;
    let mut tracked_flow = 0i64;
    let mut list = Vec::new();
    for (a, b, entering) in family.regions(tau0, tau1) {
        let start = family.just_above(a, entering, level, b)?;
        let end = (b, family.count_below(b, level)?);
        partition_flow += start.1 as i64 - end.1 as i64;

        let cells = cells.max(1);
        let mut prev: Option<(f64, usize, usize)> = None;
        for i in 0..=cells {
            let tau = start.0 + (end.0 - start.0) * i as f64 / cells as f64;
            let tracked = family.count_below_tracked(tau, level)?;
            let counted = if i == 0 {
                start.1
            } else if i == cells {
                end.1
            } else {
                family.count_below(tau, level)?
            };
            if let Some((ptau, ptracked, pcounted)) = prev {
                if tracked > ptracked {
                    return Err(Error::FlowMismatch {
                        partition: partition_flow,
                        crossings: tracked_flow - (tracked - ptracked) as i64,
                    });
                }
                tracked_flow += ptracked as i64 - tracked as i64;
                locate(family, level, (ptau, pcounted), (tau, counted), &mut list)?;
            }
            prev = Some((tau, tracked, counted));
        }
    }
    let enumerated: i64 = list.iter().map(|c| c.multiplicity as i64).sum();
    if partition_flow != tracked_flow || partition_flow != enumerated {
        return Err(Error::FlowMismatch { partition: partition_flow, crossings: tracked_flow.min(enumerated) });
    }
    Ok(FlowCount { level, interval: (tau0, tau1), flow: partition_flow, crossings: list })
}

/// Spectra of the family along a t-grid.
#[derive(Debug, Clone)]
pub struct CurveSlice {
    pub t: ExtendedReal,
    pub tau: f64,
    /// Continuity region: number of degenerate points strictly below τ.
    pub region: usize,
    /// Eigenvalues below λ_max with multiplicity; curve n is entry n - 1.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpectralCurveFamily {
    pub s: ExtendedReal,
    pub lambda_max: f64,
    pub slices: Vec<CurveSlice>,
}

impl SpectralCurveFamily {
    /// Largest decrease of a curve between neighbouring slices of one region.
    pub fn monotonicity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.slices.windows(2) {
            if w[0].region != w[1].region {
                continue;
            }
            for (a, b) in w[0].values.iter().zip(&w[1].values) {
                worst = worst.max(a - b);
            }
        }
        worst
    }
}

/// Width in t of the excluded window just past a degenerate coupling.
pub const EPSILON_GRID: f64 = 1e-3;

/// Curves labelled by sorted position, which at crossings of curves is an
/// admissible branch choice. Neighbouring slices of one region whose curves
/// move by more than `resolution` get a midpoint, up to `max_slices`.
pub fn track_curves(
    family: &Family,
    grid: &[ExtendedReal],
    lambda_max: f64,
    resolution: f64,
    max_slices: usize,
) -> Result<SpectralCurveFamily> {
    // grid nodes keep their t exactly; refinement midpoints map back from τ
    let slice = |tau: f64, t: ExtendedReal| -> Result<CurveSlice> {
        let g = family.at(t);
        let solver = Solver::new(&g)?;
        let (values, _) = solver.eigenvalues(solver.lower_bound(), lambda_max)?;
        let region = family.singular.iter().filter(|(s, _)| *s < tau).count();
        Ok(CurveSlice {
            t,
            tau,
            region,
            values: values.into_iter().flat_map(|(l, m)| std::iter::repeat(l).take(m)).collect(),
        })
    };
    let mut nodes: Vec<(f64, ExtendedReal)> = grid
        .iter()
        .map(|&t| match t {
            ExtendedReal::Infinity => (FRAC_PI_2, t),
            t => (tau_of(t), t),
        })
        .collect();
    // curves entering from -∞ make the window just past a degenerate
    // coupling useless for matching
    nodes.retain(|&(tau, _)| {
        !family.singular.iter().any(|&(sigma, _)| {
            sigma > -FRAC_PI_2 && tau > sigma && tau.tan() - sigma.tan() < EPSILON_GRID
        })
    });
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.dedup_by(|a, b| a.0 == b.0);
    let mut slices = nodes.into_iter().map(|(tau, t)| slice(tau, t)).collect::<Result<Vec<_>>>()?;
    let mut i = 0;
    while i + 1 < slices.len() && slices.len() < max_slices {
        let (a, b) = (&slices[i], &slices[i + 1]);
        let moved = a.region == b.region
            && (a.values.len() != b.values.len()
                || a.values.iter().zip(&b.values).any(|(x, y)| (x - y).abs() > resolution));
        if moved && b.tau - a.tau > 1e-6 {
            let tau = 0.5 * (a.tau + b.tau);
            let mid = slice(tau, t_of(tau))?;
            slices.insert(i + 1, mid);
        } else {
            i += 1;
        }
    }
    Ok(SpectralCurveFamily { s: family.s, lambda_max, slices })
}

/// A level strictly between 0 and every positive eigenvalue of H(0) and of
/// H(∞), for flows through "ε > 0 small enough".
pub fn small_positive_level(family: &Family) -> Result<f64> {
    let mut bound = f64::INFINITY;
    for t in [ExtendedReal::Finite(0.0), ExtendedReal::Infinity] {
        let solver = Solver::new(&family.at(t))?;
        let zero = solver.count_below(1e-9);
        let vals = solver.lowest(zero + 1)?;
        if let Some(&l) = vals.get(zero) {
            bound = bound.min(l);
        }
    }
    Ok(0.5 * bound)
}

/// Sf through a small positive level of the δ_0 family on B over [0, ∞],
/// with β_Γ - β_cut for comparison.
#[derive(Debug, Clone)]
pub struct BettiFlow {
    pub flow: FlowCount,
    pub betti: usize,
    pub betti_cut: usize,
}

pub fn betti_flow(graph: &MetricGraph, b: &[CutLocation]) -> Result<BettiFlow> {
    let family = Family::new(graph, b, ExtendedReal::Finite(0.0))?;
    let level = small_positive_level(&family)?;
    let flow = spectral_flow(&family, level, ExtendedReal::Finite(0.0), ExtendedReal::Infinity, 4)?;
    let cut_graph = cut(graph, b)?.graph;
    Ok(BettiFlow { flow, betti: graph.betti(), betti_cut: cut_graph.betti() })
}

/// λ_n as the s-point data of f_n: real aligned unit eigenfunction, its
/// s-points and the family placed on them.
#[derive(Debug, Clone)]
pub struct SPointFamily {
    pub function: GraphFunction,
    pub points: Vec<CutLocation>,
    pub family: Family,
}

fn checked_generic(graph: &MetricGraph, eig: &Eigenpair) -> Result<GraphFunction> {
    if !genericity(graph, eig).generic {
        return Err(Error::Precondition(format!("eigenpair {} is not generic", eig.index)));
    }
    let e = l2_normalize(eig, graph);
    let mut f = GraphFunction::from_eigenpair(graph, &e, 0);
    f.align_phase();
    Ok(f)
}

/// k_n > π/ℓ_min, the high-eigenvalue regime.
pub fn above_threshold(graph: &MetricGraph, eig: &Eigenpair) -> bool {
    eig.lambda > 0.0 && eig.lambda.sqrt() > std::f64::consts::PI / graph.min_length()
}

pub fn s_point_family(graph: &MetricGraph, eig: &Eigenpair, s: ExtendedReal) -> Result<SPointFamily> {
    let f = checked_generic(graph, eig)?;
    let set = find_s_points(graph, &f, s)?;
    let points: Vec<CutLocation> = set.points.iter().map(|p| CutLocation::Point(*p)).collect();
    let family = Family::new(graph, &points, s)?;
    Ok(SPointFamily { function: f, points, family })
}

/// Transversal crossings of the flat level λ_n by the other spectral curves
/// of the family on the s-points of f_n.
///
/// A transversal crossing shows up at both λ_n - η and λ_n + η at nearly the
/// same τ. A curve tending to λ_n at the hard end crosses only one of the two
/// levels, near |t| ~ 1/η; such unpaired crossings must lie outside `window`.
/// The search covers |t| ≤ 10 `window`.
#[derive(Debug, Clone)]
pub struct FlatCurveReport {
    pub count: usize,
    pub t_values: Vec<f64>,
    pub window: f64,
    /// Crossings of a single level beyond the window.
    pub asymptotic: usize,
}

/// Largest τ-distance between the two crossings of one transversal passage.
pub const PAIRING_TOLERANCE: f64 = 1e-6;

pub fn flat_curve_intersections(graph: &MetricGraph, eig: &Eigenpair, s: ExtendedReal) -> Result<FlatCurveReport> {
    if !above_threshold(graph, eig) {
        return Err(Error::Precondition("requires k_n > π/ℓ_min".into()));
    }
    let sp = s_point_family(graph, eig, s)?;
    let eta = 1e-9 * eig.lambda;
    let window = 1e3 * (eig.lambda.sqrt() + 1.0 / graph.min_length());
    // the counting function loses the η-scale near the hard end, so the
    // search stops at |t| = 10 window
    let reach = (10.0 * window).atan();
    let above = crossings(&sp.family, eig.lambda + eta, -reach, reach)?;
    let mut below: Vec<Option<Crossing>> =
        crossings(&sp.family, eig.lambda - eta, -reach, reach)?.into_iter().map(Some).collect();
    let outside = |c: &Crossing| c.t.finite().is_none_or(|t| t.abs() > window);
    let (mut count, mut t_values, mut asymptotic) = (0, Vec::new(), 0);
    for c in &above {
        let partner = below
            .iter_mut()
            .filter(|b| b.as_ref().is_some_and(|b| (b.tau - c.tau).abs() <= PAIRING_TOLERANCE))
            .min_by(|a, b| {
                let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
                (a.tau - c.tau).abs().total_cmp(&(b.tau - c.tau).abs())
            });
        match partner.and_then(Option::take) {
            Some(b) if b.multiplicity == c.multiplicity => {
                count += c.multiplicity;
                t_values.push(t_of(0.5 * (b.tau + c.tau)).finite().unwrap_or(f64::INFINITY));
            }
            Some(b) => {
                return Err(Error::Incomplete {
                    reason: format!("crossing multiplicities {} and {} at τ = {}", c.multiplicity, b.multiplicity, c.tau),
                    found: vec![],
                })
            }
            None if outside(c) => asymptotic += c.multiplicity,
            None => {
                return Err(Error::Incomplete {
                    reason: format!("unpaired crossing of λ + η at t = {}", c.t),
                    found: vec![],
                })
            }
        }
    }
    for b in below.into_iter().flatten() {
        if !outside(&b) {
            return Err(Error::Incomplete { reason: format!("unpaired crossing of λ - η at t = {}", b.t), found: vec![] });
        }
        asymptotic += b.multiplicity;
    }
    Ok(FlatCurveReport { count, t_values, window, asymptotic })
}

/// Everything entering the index formula for one eigenpair and one s.
#[derive(Debug, Clone)]
pub struct IndexCheck {
    pub n: usize,
    pub s: ExtendedReal,
    pub phi_s: usize,
    pub phi_inf: usize,
    pub nu_s: usize,
    pub deficiency: i64,
    pub epsilon: f64,
    pub mor: usize,
    pub pos: usize,
    pub nullity: usize,
    /// Mor for s = ∞, φ_∞ - Pos otherwise.
    pub predicted: i64,
    /// Multiplicity of λ_n for the hard condition on the s-points.
    pub hard_multiplicity: usize,
    /// 1 + number of hard eigenvalues below λ_n.
    pub hard_position: usize,
}

impl IndexCheck {
    pub fn holds(&self) -> bool {
        self.deficiency == self.predicted
    }

    pub fn expected_hard_position(&self) -> usize {
        if self.s.is_infinite() {
            1
        } else {
            1 + self.phi_inf
        }
    }
}

/// The index formula at the s-points of a simple eigenpair. `next` is the
/// next distinct eigenvalue of the graph above λ_n.
pub fn index_check(graph: &MetricGraph, eig: &Eigenpair, next: f64, s: ExtendedReal) -> Result<IndexCheck> {
    if eig.multiplicity != 1 {
        return Err(Error::Precondition("index formula needs a simple eigenvalue".into()));
    }
    let f = checked_generic(graph, eig)?;
    let set = find_s_points(graph, &f, s)?;
    let nodal = find_s_points(graph, &f, ExtendedReal::Infinity)?;
    let parts = partition(graph, &set, eig.index)?;
    let points: Vec<CutLocation> = set.points.iter().map(|p| CutLocation::Point(*p)).collect();
    let marked = MarkedGraph::new(graph, &points)?;

    let lambda = eig.lambda;
    let hard = MorseCounter::new(&marked.family(s, ExtendedReal::Infinity))?;
    let tiny = 1e-9 * lambda.abs().max(1.0);
    let below = hard.count_below(lambda - tiny);
    let base = hard.count_below(lambda + tiny);
    let g1 = next - lambda;
    // nearest hard eigenvalue above λ_n, if closer than the next eigenvalue
    let mut g = g1;
    if hard.count_below(lambda + g1) > base {
        let (mut lo, mut hi) = (lambda + tiny, lambda + g1);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hard.count_below(mid) > base {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        g = lo - lambda;
    }
    let epsilon = 0.5 * g;
    let map = assemble(&marked, s, lambda + epsilon)?;
    let (mor, pos, nullity) = map.indices();
    let phi_inf = nodal.count();
    let predicted = if s.is_infinite() { mor as i64 } else { phi_inf as i64 - pos as i64 };
    Ok(IndexCheck {
        n: eig.index,
        s,
        phi_s: set.count(),
        phi_inf,
        nu_s: parts.nu,
        deficiency: parts.deficiency,
        epsilon,
        mor,
        pos,
        nullity,
        predicted,
        hard_multiplicity: base - below,
        hard_position: below + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::VertexCondition;
    use crate::graph::{PointOnEdge, Vertex};
    use std::f64::consts::PI;

    const NK: VertexCondition = VertexCondition::NeumannKirchhoff;

    fn graph(n: usize, edges: Vec<(u64, u64, u64, f64)>) -> MetricGraph {
        let vs = (0..n).map(|i| Vertex { id: i as u64, condition: NK }).collect();
        MetricGraph::new(vs, edges).unwrap()
    }

    fn point(edge: u64, x: f64) -> CutLocation {
        CutLocation::Point(PointOnEdge { edge, x })
    }

    fn star() -> MetricGraph {
        graph(4, vec![(0, 0, 1, 1.0), (1, 0, 2, 2f64.sqrt()), (2, 0, 3, PI / 3.0)])
    }

    fn glasses() -> MetricGraph {
        graph(2, vec![(0, 0, 0, 1.3), (1, 0, 1, 0.8), (2, 1, 1, 1.7)])
    }

    #[test]
    fn t_zero_is_neumann_kirchhoff() {
        let g = star();
        for s in [ExtendedReal::Infinity, ExtendedReal::Finite(0.0), ExtendedReal::Finite(-1.5)] {
            let f = Family::new(&g, &[point(0, 0.4), point(2, 0.5)], s).unwrap();
            let a = Solver::new(&f.at(ExtendedReal::Finite(0.0))).unwrap().lowest(8).unwrap();
            let b = Solver::new(&g).unwrap().lowest(8).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9 * y.max(1.0));
            }
        }
    }

    #[test]
    fn curves_are_monotone() {
        let f = Family::new(&star(), &[CutLocation::Vertex(1)], ExtendedReal::Infinity).unwrap();
        let grid: Vec<ExtendedReal> = (-8..=8).map(|i| ExtendedReal::Finite(i as f64 * 0.75)).collect();
        let c = track_curves(&f, &grid, 40.0, 2.0, 60).unwrap();
        assert!(c.monotonicity_defect() < 1e-9);
        assert!(c.slices.len() > grid.len());
    }

    #[test]
    fn interval_crossing_matches_transcendental_root() {
        // δ(t) at the x = 0 end of [0, 1], Neumann far end: u'(0) = t u(0),
        // so f = cos(k(1 - x)) sits at level k² when t = k tan k
        let g = graph(2, vec![(0, 0, 1, 1.0)]);
        let f = Family::new(&g, &[CutLocation::Vertex(0)], ExtendedReal::Infinity).unwrap();
        let c = 1.7;
        let xs = crossings(&f, c, -FRAC_PI_2, FRAC_PI_2).unwrap();
        let k = c.sqrt();
        let want = k * k.tan();
        assert_eq!(xs.len(), 1);
        assert!((xs[0].t.finite().unwrap() - want).abs() < 1e-9, "{xs:?} {want}");
    }

    #[test]
    fn flow_through_level_equals_marked_count() {
        let g = glasses();
        for s in [ExtendedReal::Infinity, ExtendedReal::Finite(0.0), ExtendedReal::Finite(0.8)] {
            let f = Family::new(&g, &[point(0, 0.5), point(1, 0.3), point(2, 1.1)], s).unwrap();
            let fc = spectral_flow(&f, 11.3, ExtendedReal::Infinity, ExtendedReal::Infinity, 3).unwrap();
            assert_eq!(fc.flow, 3, "{s}");
        }
    }

    #[test]
    fn glasses_betti_flows() {
        let g = glasses();
        let both = betti_flow(&g, &[point(0, 0.6), point(2, 0.9)]).unwrap();
        assert_eq!(both.flow.flow, 2);
        assert_eq!(both.betti - both.betti_cut, 2);
        let one = betti_flow(&g, &[point(0, 0.6)]).unwrap();
        assert_eq!(one.flow.flow, 1);
        let bridge = betti_flow(&g, &[point(1, 0.4)]).unwrap();
        assert_eq!(bridge.flow.flow, 0);
    }

    #[test]
    fn crossings_match_robin_map() {
        let g = glasses();
        let b = [point(0, 0.5), point(1, 0.3), point(2, 1.1)];
        for s in [ExtendedReal::Infinity, ExtendedReal::Finite(0.3)] {
            let f = Family::new(&g, &b, s).unwrap();
            let c = 9.7;
            let mut ts: Vec<f64> = crossings(&f, c, -FRAC_PI_2, FRAC_PI_2)
                .unwrap()
                .iter()
                .flat_map(|x| std::iter::repeat_n(-x.t.finite().unwrap(), x.multiplicity))
                .collect();
            ts.sort_by(f64::total_cmp);
            let eig = assemble(&f.marked, s, c).unwrap().eigenvalues();
            assert_eq!(ts.len(), eig.len());
            for (a, b) in ts.iter().zip(&eig) {
                assert!((a - b).abs() < 1e-6 * b.abs().max(1.0), "{a} {b}");
            }
        }
    }

    #[test]
    fn index_formula_on_star() {
        let g = star();
        let solver = Solver::new(&g).unwrap();
        let pairs = solver.lowest_pairs(31).unwrap();
        let mut checked = 0;
        for w in pairs.windows(2) {
            let eig = &w[0];
            if !above_threshold(&g, eig) || !genericity(&g, eig).generic {
                continue;
            }
            for s in [ExtendedReal::Infinity, ExtendedReal::Finite(0.0), ExtendedReal::Finite(1.0)] {
                let r = index_check(&g, eig, w[1].lambda, s).unwrap();
                assert!(r.holds(), "{r:?}");
                assert_eq!(r.hard_multiplicity, r.nu_s);
                assert_eq!(r.hard_position, r.expected_hard_position());
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn flat_level_crossings_on_tree_and_cycle() {
        let g = star();
        let pairs = Solver::new(&g).unwrap().lowest_pairs(20).unwrap();
        let eig = pairs.iter().rev().find(|p| above_threshold(&g, p) && genericity(&g, p).generic).unwrap();
        assert_eq!(flat_curve_intersections(&g, eig, ExtendedReal::Infinity).unwrap().count, 0);
        let lasso = graph(2, vec![(0, 0, 0, 2.1), (1, 0, 1, 0.9)]);
        let pairs = Solver::new(&lasso).unwrap().lowest_pairs(20).unwrap();
        let eig = pairs.iter().rev().find(|p| above_threshold(&lasso, p) && genericity(&lasso, p).generic).unwrap();
        for s in [ExtendedReal::Infinity, ExtendedReal::Finite(0.0)] {
            let r = flat_curve_intersections(&lasso, eig, s);
            assert_eq!(r.as_ref().map(|r| r.count).ok(), Some(1), "{s} {r:?}");
        }
    }
}
