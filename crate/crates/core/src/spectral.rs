//! Eigenvalue counting and the integrated density of states.
//!
//! Counting is exact-integer: the number of pencil eigenvalues of (A, D)
//! at or below λ equals the number of negative pivots of the symmetric
//! factorisation of A − λD (Sylvester's law of inertia), evaluated through
//! the chain/border elimination of [`crate::qgraph`]. Counting functions are
//! right-continuous step functions recovered by spectrum slicing on the
//! inertia counts. On top of that sit the normalised counting functions
//! N_ω^Q = n_ω^Q / |E_Q|, their Cauchy behaviour along Følner boxes, the
//! spectral shift ξ = n₂ − n₁ with its 4|Q||S| bound, the expected localised
//! trace of the spectral projector, and the pattern-frequency reconstruction
//! of ξ averages.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cayley::{subgraph, EdgeKey, Subgraph};
use crate::error::{Error, Result};
use crate::field::{colour_at, Colour, DisorderField, Pattern};
use crate::group::{boundary_r, thicken, FiniteSet, FolnerBox, GeneratorSet, GroupElement};
use crate::mixing;
use crate::qgraph::{
    assemble, dimension_upper_bound, single_edge_dirichlet_discrete, Assignment,
    DiscreteHamiltonian, Model,
};

/// Number of pencil eigenvalues ≤ λ, right-continuous convention. A
/// near-singular factorisation (λ numerically on an eigenvalue) is resolved
/// by retrying with the relative nudge τ = 10⁻¹⁰·(1+|λ|); the event is
/// logged. Nudging upward keeps the ≤ convention.
pub fn count_leq(ham: &DiscreteHamiltonian, lambda: f64) -> usize {
    const MAX_NUDGE: usize = 6;
    let mut shift = lambda;
    for attempt in 0..MAX_NUDGE {
        match ham.try_inertia(shift) {
            Ok(c) => {
                if attempt > 0 {
                    log::debug!(
                        "count_leq: near-singular at λ={lambda}, resolved with nudge {:+e}",
                        shift - lambda
                    );
                }
                return c;
            }
            Err(_) => {
                let tau = 1e-10 * (1.0 + lambda.abs());
                shift = lambda + tau * (attempt as f64 + 1.0);
            }
        }
    }
    log::warn!("count_leq: nudges exhausted at λ={lambda}, forcing tiny pivots");
    ham.inertia_forced(lambda)
}

/// A monotone, right-continuous step function stored as sorted breakpoints
/// with cumulative (raw) counts; `norm` rescales values on evaluation.
#[derive(Clone, Debug)]
pub struct CountingFunction {
    breaks: Vec<f64>,
    cum: Vec<f64>,
    norm: f64,
}

impl CountingFunction {
    pub fn from_jumps(mut jumps: Vec<(f64, f64)>) -> CountingFunction {
        jumps.retain(|&(_, j)| j != 0.0);
        jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut breaks = Vec::with_capacity(jumps.len());
        let mut cum = Vec::with_capacity(jumps.len());
        let mut acc = 0.0;
        for (x, j) in jumps {
            acc += j;
            if breaks.last() == Some(&x) {
                *cum.last_mut().unwrap() = acc;
            } else {
                breaks.push(x);
                cum.push(acc);
            }
        }
        CountingFunction { breaks, cum, norm: 1.0 }
    }

    pub fn from_eigenvalues(evs: &[f64]) -> CountingFunction {
        CountingFunction::from_jumps(evs.iter().map(|&e| (e, 1.0)).collect())
    }

    /// Normalisation constant applied on evaluation (e.g. |E_Q|).
    pub fn with_norm(mut self, norm: f64) -> CountingFunction {
        assert!(norm > 0.0);
        self.norm = norm;
        self
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Raw (unnormalised) count at x.
    pub fn raw_value(&self, x: f64) -> f64 {
        let idx = self.breaks.partition_point(|&b| b <= x);
        if idx == 0 {
            0.0
        } else {
            self.cum[idx - 1]
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.raw_value(x) / self.norm
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// Normalised jump sizes aligned with `breakpoints`.
    pub fn jumps(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.breaks.len());
        let mut prev = 0.0;
        for &c in &self.cum {
            out.push((c - prev) / self.norm);
            prev = c;
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0) / self.norm
    }

    /// Raw counts multiplied by a constant (e.g. |E_Q| copies of one edge).
    pub fn scaled_counts(&self, factor: f64) -> CountingFunction {
        CountingFunction {
            breaks: self.breaks.clone(),
            cum: self.cum.iter().map(|c| c * factor).collect(),
            norm: self.norm,
        }
    }

    /// Exact sup distance of two normalised step functions: both are
    /// constant between consecutive merged breakpoints, so the sup over ℝ is
    /// attained at a merged breakpoint (both vanish at −∞).
    pub fn sup_distance(&self, other: &CountingFunction) -> f64 {
        let mut sup = 0.0f64;
        for &b in self.breaks.iter().chain(other.breaks.iter()) {
            sup = sup.max((self.value(b) - other.value(b)).abs());
        }
        sup
    }
}

/// All pencil eigenvalues ≤ λ_max (with multiplicity) by bisection on the
/// inertia counts, as a right-continuous counting function. Breakpoints are
/// resolved to width 10⁻⁹·(1+|λ|).
pub fn counting_function(ham: &DiscreteHamiltonian, lambda_max: f64) -> CountingFunction {
    let lo = ham.lambda_lower_bound() - 1.0;
    let n_lo = count_leq(ham, lo);
    debug_assert_eq!(n_lo, 0, "Gershgorin bound must sit below the spectrum");
    let n_hi = count_leq(ham, lambda_max);
    let mut jumps: Vec<(f64, f64)> = Vec::with_capacity(n_hi - n_lo);
    let mut stack = vec![(lo, lambda_max, n_lo, n_hi)];
    while let Some((a, b, na, nb)) = stack.pop() {
        if nb == na {
            continue;
        }
        if b - a <= 1e-9 * (1.0 + a.abs()) {
            jumps.push((0.5 * (a + b), (nb - na) as f64));
            continue;
        }
        let mid = 0.5 * (a + b);
        let nm = count_leq(ham, mid);
        stack.push((a, mid, na, nm));
        stack.push((mid, b, nm, nb));
    }
    CountingFunction::from_jumps(jumps)
}

/// Eigenvalue count of the Dirichlet Laplacian on one edge:
/// n_D(λ) = |{n ≥ 1 : n²π² ≤ λ}|.
pub fn dirichlet_count(lambda: f64) -> u64 {
    if lambda < PI * PI {
        return 0;
    }
    let mut k = (lambda.sqrt() / PI).floor() as u64;
    while ((k + 1) as f64 * PI).powi(2) <= lambda {
        k += 1;
    }
    while k >= 1 && (k as f64 * PI).powi(2) > lambda {
        k -= 1;
    }
    k
}

/// Dirichlet decoupling on Γ_Q: n_D^Q(λ) = |E_Q| n_D(λ) = |Q||S| n_D(λ).
pub fn dirichlet_count_q(q_len: usize, s_len: usize, lambda: f64) -> u64 {
    (q_len * s_len) as u64 * dirichlet_count(lambda)
}

/// Discrete analogue of n_D at mesh M: counting function of the single-edge
/// Dirichlet chain (closed form), truncated at λ_max.
pub fn discrete_dirichlet_counting(mesh: usize, lambda_max: f64) -> CountingFunction {
    let evs: Vec<f64> = single_edge_dirichlet_discrete(mesh)
        .into_iter()
        .filter(|&e| e <= lambda_max)
        .collect();
    CountingFunction::from_eigenvalues(&evs)
}

/// Discrete n_D count at a single λ.
pub fn discrete_dirichlet_count(mesh: usize, lambda: f64) -> u64 {
    single_edge_dirichlet_discrete(mesh).iter().filter(|&&e| e <= lambda).count() as u64
}

/// Conservative per-edge counting-function error of the discretisation at
/// mesh M below λ_max: the worst displacement of a discrete single-edge
/// Dirichlet eigenvalue from n²π², divided by the smallest gap between
/// consecutive exact eigenvalues in range. Tracked explicitly so acceptance
/// tolerances can carry it as ε_disc.
pub fn discretization_error(mesh: usize, lambda_max: f64) -> f64 {
    let disc = single_edge_dirichlet_discrete(mesh);
    let mut max_shift = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut prev = 0.0f64;
    for (k, &d) in disc.iter().enumerate() {
        let exact = ((k + 1) as f64 * PI).powi(2);
        if exact > 1.5 * lambda_max + 10.0 {
            break;
        }
        max_shift = max_shift.max((d - exact).abs());
        if k > 0 {
            min_gap = min_gap.min(exact - prev);
        }
        prev = exact;
    }
    if !min_gap.is_finite() {
        min_gap = PI * PI;
    }
    max_shift / min_gap
}

/// The spectral shift ξ_{H₁,H₂} = n_{H₂} − n_{H₁} as an integer step
/// function on the merged breakpoints.
#[derive(Clone, Debug)]
pub struct ShiftFunction {
    breaks: Vec<f64>,
    values: Vec<i64>,
}

pub fn spectral_shift(n1: &CountingFunction, n2: &CountingFunction) -> ShiftFunction {
    let mut breaks: Vec<f64> =
        n1.breakpoints().iter().chain(n2.breakpoints().iter()).copied().collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let values = breaks
        .iter()
        .map(|&b| (n2.raw_value(b) - n1.raw_value(b)).round() as i64)
        .collect();
    ShiftFunction { breaks, values }
}

impl ShiftFunction {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn value(&self, x: f64) -> i64 {
        let idx = self.breaks.partition_point(|&b| b <= x);
        if idx == 0 {
            0
        } else {
            self.values[idx - 1]
        }
    }

    pub fn sup_norm(&self) -> u64 {
        self.values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Rank bound for condition changes on a vertex set: ‖ξ‖_∞ ≤ 4|Q_changed||S|.
pub fn shift_bound_check(changed_vertices: usize, s_len: usize, xi: &ShiftFunction) -> bool {
    xi.sup_norm() <= 4 * (changed_vertices as u64) * (s_len as u64)
}

/// Normalised counting functions along a Følner sequence with their exact
/// consecutive sup distances and the almost-additivity envelope
/// 4(|∂¹Q_l|/|Q_l| + |∂¹Q_{l+1}|/|Q_{l+1}|) + 2ε_disc.
#[derive(Clone, Debug)]
pub struct IdsEstimate {
    pub box_indices: Vec<u32>,
    pub edge_counts: Vec<usize>,
    pub functions: Vec<CountingFunction>,
    pub boundary_ratios: Vec<f64>,
    pub sup_distances: Vec<f64>,
    pub envelopes: Vec<f64>,
    pub eps_disc: f64,
    pub truncated: bool,
}

impl IdsEstimate {
    /// The largest computed volume serves as the IDS proxy.
    pub fn final_function(&self) -> &CountingFunction {
        self.functions.last().expect("at least one box was computed")
    }
}

pub fn ids_approx(
    field: &DisorderField,
    s: &GeneratorSet,
    model: &Model,
    boxes: &[FolnerBox],
    mesh: usize,
    lambda_max: f64,
    dim_cap: usize,
) -> Result<IdsEstimate> {
    let eps_disc = discretization_error(mesh, lambda_max);
    let mut est = IdsEstimate {
        box_indices: Vec::new(),
        edge_counts: Vec::new(),
        functions: Vec::new(),
        boundary_ratios: Vec::new(),
        sup_distances: Vec::new(),
        envelopes: Vec::new(),
        eps_disc,
        truncated: false,
    };
    for b in boxes {
        let sub = subgraph(&b.set, s);
        let bound = dimension_upper_bound(sub.edges.len(), sub.vertices.len(), mesh);
        if bound > dim_cap {
            est.truncated = true;
            log::warn!("ids_approx: box n={} would exceed dimension cap {dim_cap}", b.n);
            break;
        }
        let asg = Assignment::from_field(&sub, field);
        let ham = assemble(&sub, s, &asg, model, mesh)?;
        let edges = sub.edges.len();
        let cf = counting_function(&ham, lambda_max).with_norm(edges as f64);
        est.box_indices.push(b.n);
        est.edge_counts.push(edges);
        est.boundary_ratios.push(boundary_r(&b.set, 1, s).len() as f64 / b.set.len() as f64);
        est.functions.push(cf);
    }
    if est.functions.is_empty() {
        return Err(Error::DimensionCap {
            dim: boxes
                .first()
                .map(|b| dimension_upper_bound(b.set.len() * s.len(), b.set.len() * (1 + s.len()), mesh))
                .unwrap_or(0),
            cap: dim_cap,
        });
    }
    for l in 0..est.functions.len().saturating_sub(1) {
        est.sup_distances.push(est.functions[l].sup_distance(&est.functions[l + 1]));
        est.envelopes
            .push(4.0 * (est.boundary_ratios[l] + est.boundary_ratios[l + 1]) + 2.0 * eps_disc);
    }
    Ok(est)
}

/// D-weighted trace of the spectral projector 1_{(−∞,λ]} localised to the
/// window edges, computed from dense eigenpairs of the operator on the
/// buffered box (word-distance `buffer` around the window, Dirichlet outer
/// closure), normalised by |E_window|. One value per λ in `lambdas`.
pub fn localized_spectral_trace(
    window: &FiniteSet,
    s: &GeneratorSet,
    model: &Model,
    field: &DisorderField,
    buffer: u32,
    mesh: usize,
    lambdas: &[f64],
    dim_cap: usize,
) -> Result<Vec<f64>> {
    let buffered = thicken(window, buffer, s);
    let sub = subgraph(&buffered, s);
    let bound = dimension_upper_bound(sub.edges.len(), sub.vertices.len(), mesh);
    if bound > dim_cap {
        return Err(Error::DimensionCap { dim: bound, cap: dim_cap });
    }
    let asg = Assignment::from_field(&sub, field);
    let ham = assemble(&sub, s, &asg, model, mesh)?;

    let window_edges: Vec<EdgeKey> = window
        .iter()
        .flat_map(|v| (0..s.len()).map(|i| EdgeKey::new(*v, i)))
        .collect();
    let w = ham.window_mass(&window_edges);
    let dmass = ham.mass_diagonal().to_vec();
    let dim = ham.dim();

    let eig = ham.to_dense_scaled().symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..dim)
        .map(|j| {
            let mut loc = 0.0;
            for x in 0..dim {
                let phi = eig.eigenvectors[(x, j)];
                loc += w[x] * phi * phi / dmass[x];
            }
            (eig.eigenvalues[j], loc)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let e_window = window_edges.len() as f64;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let acc: f64 = pairs.iter().take_while(|(e, _)| *e <= lam).map(|(_, l)| l).sum();
        out.push(acc / e_window);
    }
    Ok(out)
}

/// Monte-Carlo estimate of the expected localised trace over `samples`
/// independent realizations (seeds drawn from a fixed stream off
/// `base_seed`, reduction order fixed, so results do not depend on the
/// worker count).
#[derive(Clone, Debug)]
pub struct PasturShubinEstimate {
    pub lambdas: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub per_seed: Vec<Vec<f64>>,
    pub window_edge_count: usize,
    pub buffered_size: usize,
    /// 4|∂¹Λ|/|Λ| for the buffered box Λ.
    pub boundary_envelope: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn pastur_shubin(
    window: &FiniteSet,
    s: &GeneratorSet,
    model: &Model,
    edge_weights: Vec<Vec<f64>>,
    vertex_weights: Vec<f64>,
    buffer: u32,
    samples: usize,
    base_seed: u64,
    mesh: usize,
    lambdas: &[f64],
    dim_cap: usize,
) -> Result<PasturShubinEstimate> {
    assert!(buffer >= 1 && samples >= 1);
    let group = s.group();
    let per_seed: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let seed = mixing::stream_seed(base_seed, i as u64);
            let field = DisorderField::with_per_generator_weights(
                seed,
                group,
                edge_weights.clone(),
                vertex_weights.clone(),
            )?;
            localized_spectral_trace(window, s, model, &field, buffer, mesh, lambdas, dim_cap)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = samples as f64;
    let mut mean = vec![0.0f64; lambdas.len()];
    for row in &per_seed {
        for (m, v) in mean.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut stderr = vec![0.0f64; lambdas.len()];
    if samples > 1 {
        for row in &per_seed {
            for (se, (v, m)) in stderr.iter_mut().zip(row.iter().zip(mean.iter())) {
                *se += (v - m) * (v - m);
            }
        }
        for se in stderr.iter_mut() {
            *se = (*se / (n - 1.0)).sqrt() / n.sqrt();
        }
    }

    let buffered = thicken(window, buffer, s);
    let boundary_envelope =
        4.0 * boundary_r(&buffered, 1, s).len() as f64 / buffered.len() as f64;
    Ok(PasturShubinEstimate {
        lambdas: lambdas.to_vec(),
        mean,
        stderr,
        per_seed,
        window_edge_count: window.len() * s.len(),
        buffered_size: buffered.len(),
        boundary_envelope,
    })
}

/// Two routes to the normalised spectral-shift average: the direct window
/// average ξ_ω^{Q_j}/(|Q_j||S|) against the frequency-weighted sum over the
/// patterns observed on translates of Q_n,
/// Σ_P ν̂_P · ξ(P)/(|Q_n||S|), with ξ(P) assembled from the deterministic
/// configuration P.
#[derive(Clone, Debug)]
pub struct ErgodicReport {
    pub lambdas: Vec<f64>,
    pub direct: Vec<f64>,
    pub reconstructed: Vec<f64>,
    pub sup_discrepancy: f64,
    pub observed_patterns: usize,
    /// Fraction of window sites whose Q_n-translate fits inside the window.
    pub translate_coverage: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn ergodic_reconstruction(
    field: &DisorderField,
    s: &GeneratorSet,
    model: &Model,
    pattern_box: &FolnerBox,
    window: &FolnerBox,
    lambdas: &[f64],
    mesh: usize,
    pattern_cap: usize,
    dim_cap: usize,
) -> Result<ErgodicReport> {
    let s_len = s.len();
    let n_d_single = single_edge_dirichlet_discrete(mesh);
    let n_d = |lam: f64| n_d_single.iter().filter(|&&e| e <= lam).count() as f64;

    // Direct side.
    let sub_w = subgraph(&window.set, s);
    let bound = dimension_upper_bound(sub_w.edges.len(), sub_w.vertices.len(), mesh);
    if bound > dim_cap {
        return Err(Error::DimensionCap { dim: bound, cap: dim_cap });
    }
    let ham_w = assemble(&sub_w, s, &Assignment::from_field(&sub_w, field), model, mesh)?;
    let w_edges = sub_w.edges.len() as f64;
    let w_norm = (window.set.len() * s_len) as f64;
    let direct: Vec<f64> = lambdas
        .iter()
        .map(|&lam| (count_leq(&ham_w, lam) as f64 - w_edges * n_d(lam)) / w_norm)
        .collect();

    // Patterns observed on translates Q_n·x inside the window.
    let mut counts: HashMap<Vec<Colour>, u64> = HashMap::new();
    let mut translates = 0u64;
    for x in window.set.iter() {
        let mut key = Vec::with_capacity(pattern_box.set.len());
        let mut inside = true;
        for q in pattern_box.set.iter() {
            let site = q.mul(x);
            if !window.set.contains(&site) {
                inside = false;
                break;
            }
            key.push(colour_at(field, &site, s));
        }
        if !inside {
            continue;
        }
        translates += 1;
        *counts.entry(key).or_insert(0) += 1;
        if counts.len() > pattern_cap {
            return Err(Error::PatternCap { observed: counts.len(), cap: pattern_cap });
        }
    }

    // Reconstruction side: assemble each observed pattern on Γ_{Q_n}.
    let sub_n = subgraph(&pattern_box.set, s);
    let n_edges = sub_n.edges.len() as f64;
    let n_norm = (pattern_box.set.len() * s_len) as f64;
    let mut ordered: Vec<(Vec<Colour>, u64)> = counts.into_iter().collect();
    ordered.sort_by(|a, b| a.0.cmp(&b.0));
    let mut reconstructed = vec![0.0f64; lambdas.len()];
    for (key, count) in &ordered {
        let entries: Vec<(GroupElement, Colour)> = pattern_box
            .set
            .iter()
            .copied()
            .zip(key.iter().cloned())
            .collect();
        let pattern = Pattern::new(entries)?;
        let asg = Assignment::from_pattern(&sub_n, &pattern)?;
        let ham_p = assemble(&sub_n, s, &asg, model, mesh)?;
        let weight = *count as f64 / window.set.len() as f64;
        for (slot, &lam) in reconstructed.iter_mut().zip(lambdas.iter()) {
            let xi_p = count_leq(&ham_p, lam) as f64 - n_edges * n_d(lam);
            *slot += weight * xi_p / n_norm;
        }
    }

    let sup_discrepancy = direct
        .iter()
        .zip(reconstructed.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(ErgodicReport {
        lambdas: lambdas.to_vec(),
        direct,
        reconstructed,
        sup_discrepancy,
        observed_patterns: ordered.len(),
        translate_coverage: translates as f64 / window.set.len() as f64,
    })
}

/// Breakpoints of a normalised counting function whose jump exceeds the
/// threshold (candidate atoms of the limiting measure, i.e. IDS
/// discontinuities).
pub fn jump_detect(cf: &CountingFunction, threshold: f64) -> Vec<(f64, f64)> {
    cf.breakpoints()
        .iter()
        .copied()
        .zip(cf.jumps())
        .filter(|&(_, j)| j > threshold)
        .collect()
}
