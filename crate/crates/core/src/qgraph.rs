//! Self-adjoint discretisations of H = −f″ + Vf on finite subgraphs Γ_Q.
//!
//! Each edge is the interval [0,1] with M interior mesh points and width
//! h = 1/(M+1). The operator is realised as a symmetric pencil (A, D): A
//! carries the quadratic form ∫|f′|² + ∫V|f|² + Σ_v α_v|f(v)|² and D is the
//! lumped mass matrix, so generalized eigenvalues of (A, D) approximate the
//! spectrum to O(h²).
//!
//! Vertex conditions:
//! - `Dirichlet` removes the vertex value (all incident endpoints pinned to 0);
//! - `NeumannDecoupled` gives every incident endpoint its own free-end
//!   unknown (one-sided mirror stencil);
//! - `Delta(α)` shares one vertex unknown across the star (continuity) and
//!   adds α|f(v)|² to the form; `Delta(0)` is the Kirchhoff condition.
//!
//! Boundary vertices of Γ_Q always carry Dirichlet conditions. Loops attach
//! both of their endpoints to the same vertex unknown, so a loop contributes
//! two to the vertex degree.
//!
//! Internally the matrix is kept as per-edge tridiagonal chains bordered by
//! the shared vertex unknowns. Eliminating the chains first reduces an
//! inertia query A − λD to per-edge sweeps plus a small banded factorisation
//! of the vertex Schur complement, which is what makes eigenvalue counting
//! by spectrum slicing cheap (see [`crate::spectral`]).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;

use crate::cayley::{EdgeKey, Subgraph};
use crate::error::{Error, Result};
use crate::field::{DisorderField, Pattern};
use crate::group::{GeneratorSet, GroupElement};

/// Minimum interior points per edge.
pub const MIN_MESH: usize = 3;

/// A piecewise-constant potential profile on [0,1] (uniform pieces).
#[derive(Clone, Debug)]
pub struct PotentialProfile {
    values: Vec<f64>,
}

impl PotentialProfile {
    pub fn new(values: Vec<f64>) -> Result<PotentialProfile> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("potential profile must be nonempty and finite".into()));
        }
        Ok(PotentialProfile { values })
    }

    pub fn constant(c: f64) -> PotentialProfile {
        PotentialProfile { values: vec![c] }
    }

    /// Value of the piece containing x (pieces are half-open, last closed).
    pub fn eval(&self, x: f64) -> f64 {
        let p = self.values.len();
        let idx = ((x * p as f64).floor() as usize).min(p - 1);
        self.values[idx]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A local vertex condition.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum VertexCondition {
    Dirichlet,
    NeumannDecoupled,
    /// δ-coupling of the given strength; Delta(0.0) is Kirchhoff.
    Delta(f64),
}

/// The finite label sets 𝓑 (potential profiles) and 𝓤 (vertex conditions)
/// of an experiment.
#[derive(Clone, Debug)]
pub struct Model {
    pub potentials: Vec<PotentialProfile>,
    pub conditions: Vec<VertexCondition>,
}

impl Model {
    pub fn new(potentials: Vec<PotentialProfile>, conditions: Vec<VertexCondition>) -> Result<Model> {
        if potentials.is_empty() {
            return Err(Error::InvalidModel("empty potential set".into()));
        }
        if conditions.is_empty() {
            return Err(Error::InvalidModel("empty condition set".into()));
        }
        for c in &conditions {
            if let VertexCondition::Delta(a) = c {
                if !a.is_finite() {
                    return Err(Error::InvalidModel("non-finite delta coupling".into()));
                }
            }
        }
        Ok(Model { potentials, conditions })
    }

    /// Free Laplacian with Dirichlet decoupling everywhere.
    pub fn dirichlet_laplacian() -> Model {
        Model {
            potentials: vec![PotentialProfile::constant(0.0)],
            conditions: vec![VertexCondition::Dirichlet],
        }
    }

    /// Kirchhoff vertices with the given constant potentials.
    pub fn kirchhoff(levels: &[f64]) -> Model {
        Model {
            potentials: levels.iter().map(|&c| PotentialProfile::constant(c)).collect(),
            conditions: vec![VertexCondition::Delta(0.0)],
        }
    }

    pub fn vmax(&self) -> f64 {
        self.potentials.iter().fold(0.0, |m, p| m.max(p.max_abs()))
    }

    pub fn alpha_min(&self) -> f64 {
        self.conditions.iter().fold(0.0, |m: f64, c| match c {
            VertexCondition::Delta(a) => m.min(*a),
            _ => m,
        })
    }
}

/// Resolved labels for one subgraph: a potential index per edge of E_Q
/// (aligned with `Subgraph::edges`) and a condition index per inner vertex.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub edge_potentials: Vec<usize>,
    pub vertex_conditions: HashMap<GroupElement, usize>,
}

impl Assignment {
    /// Sample the labels of a disorder realization on Γ_Q.
    pub fn from_field(sub: &Subgraph, field: &DisorderField) -> Assignment {
        Assignment {
            edge_potentials: sub.edges.iter().map(|e| field.potential_index(e)).collect(),
            vertex_conditions: sub
                .inner_vertices
                .iter()
                .map(|v| (*v, field.condition_index(v)))
                .collect(),
        }
    }

    /// Deterministic configuration given by a pattern whose domain covers Q.
    /// Edge (v,i) takes the i-th edge label of the colour at v; inner
    /// vertices take their colour's condition label.
    pub fn from_pattern(sub: &Subgraph, pattern: &Pattern) -> Result<Assignment> {
        let mut edge_potentials = Vec::with_capacity(sub.edges.len());
        for e in &sub.edges {
            let colour = pattern
                .colour_of(&e.base)
                .ok_or_else(|| Error::InvalidModel(format!("pattern misses vertex {}", e.base.key())))?;
            let lbl = *colour
                .edge_labels
                .get(e.gen)
                .ok_or_else(|| Error::InvalidModel("pattern colour arity mismatch".into()))?;
            edge_potentials.push(lbl);
        }
        let mut vertex_conditions = HashMap::new();
        for v in sub.inner_vertices.iter() {
            let colour = pattern
                .colour_of(v)
                .ok_or_else(|| Error::InvalidModel(format!("pattern misses vertex {}", v.key())))?;
            vertex_conditions.insert(*v, colour.vertex_label);
        }
        Ok(Assignment { edge_potentials, vertex_conditions })
    }
}

/// How an edge endpoint attaches to the rest of the system.
#[derive(Clone, Copy, Debug)]
enum EndKind {
    /// Value pinned to 0 (Dirichlet vertex or boundary closure).
    Fixed,
    /// Free end with its own unknown (Neumann-decoupled vertex).
    Free,
    /// Coupled to the shared unknown of border vertex `idx`.
    Border(usize),
}

#[derive(Clone, Debug)]
struct Chain {
    /// Diagonal of A over the chain nodes.
    a: Vec<f64>,
    /// Sub-diagonal of A (length one less).
    b: Vec<f64>,
    /// Diagonal of D (masses).
    m: Vec<f64>,
    left: EndKind,
    right: EndKind,
    offset: usize,
}

#[derive(Clone, Debug, Default)]
struct Border {
    a: Vec<f64>,
    m: Vec<f64>,
    vertices: Vec<GroupElement>,
    band: usize,
    offset: usize,
}

/// Row/column description of the assembled pencil.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dof {
    /// k-th interior mesh node (1-based) of edge `edge` (index into E_Q).
    Interior { edge: usize, node: usize },
    /// Free endpoint unknown of edge `edge`; `end` is 0 (start) or 1 (end).
    FreeEnd { edge: usize, end: u8 },
    /// Shared unknown of a δ-type vertex.
    Vertex(GroupElement),
}

/// The assembled symmetric pencil (A, D) for H_ω^Q, with its index map.
#[derive(Clone, Debug)]
pub struct DiscreteHamiltonian {
    mesh: usize,
    h: f64,
    chains: Vec<Chain>,
    border: Border,
    dofs: Vec<Dof>,
    edge_keys: Vec<EdgeKey>,
    dim: usize,
    /// Global diagonals (same data as chains+border, kept for dense export).
    diag_a: Vec<f64>,
    diag_d: Vec<f64>,
    /// Strict lower off-diagonal entries (i > j).
    off: Vec<(u32, u32, f64)>,
    breakdown_scale: f64,
}

/// Assemble the pencil for Γ_Q with the given labels. Inner vertices carry
/// their assigned conditions; boundary vertices are closed with Dirichlet
/// conditions.
pub fn assemble(
    sub: &Subgraph,
    s: &GeneratorSet,
    asg: &Assignment,
    model: &Model,
    mesh: usize,
) -> Result<DiscreteHamiltonian> {
    if mesh < MIN_MESH {
        return Err(Error::InvalidModel(format!("mesh {mesh} below minimum {MIN_MESH}")));
    }
    if asg.edge_potentials.len() != sub.edges.len() {
        return Err(Error::InvalidModel("assignment does not match subgraph edges".into()));
    }
    let h = 1.0 / (mesh as f64 + 1.0);

    // Effective condition per vertex.
    let condition_of = |v: &GroupElement| -> Result<VertexCondition> {
        if sub.inner_vertices.contains(v) {
            let idx = *asg
                .vertex_conditions
                .get(v)
                .ok_or_else(|| Error::InvalidModel(format!("no condition for inner vertex {}", v.key())))?;
            model
                .conditions
                .get(idx)
                .copied()
                .ok_or_else(|| Error::InvalidModel(format!("condition label {idx} out of range")))
        } else {
            Ok(VertexCondition::Dirichlet)
        }
    };

    // Border unknowns: inner δ-type vertices in canonical order.
    let mut border_vertices = Vec::new();
    for v in sub.inner_vertices.iter() {
        if let VertexCondition::Delta(_) = condition_of(v)? {
            border_vertices.push(*v);
        }
    }
    let border_index: HashMap<GroupElement, usize> =
        border_vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n_border = border_vertices.len();
    let mut border = Border {
        a: vec![0.0; n_border],
        m: vec![0.0; n_border],
        vertices: border_vertices,
        band: 0,
        offset: 0,
    };
    for (i, v) in border.vertices.iter().enumerate() {
        if let VertexCondition::Delta(alpha) = condition_of(v)? {
            border.a[i] += alpha;
        }
    }

    let end_kind = |v: &GroupElement| -> Result<EndKind> {
        Ok(match condition_of(v)? {
            VertexCondition::Dirichlet => EndKind::Fixed,
            VertexCondition::NeumannDecoupled => EndKind::Free,
            VertexCondition::Delta(_) => EndKind::Border(border_index[v]),
        })
    };

    let mut chains = Vec::with_capacity(sub.edges.len());
    let mut dofs = Vec::new();
    let mut offset = 0usize;
    for (k, e) in sub.edges.iter().enumerate() {
        let lbl = asg.edge_potentials[k];
        let profile = model
            .potentials
            .get(lbl)
            .ok_or_else(|| Error::InvalidModel(format!("potential label {lbl} out of range")))?;
        let (v0, v1) = e.endpoints(s);
        let left = end_kind(&v0)?;
        let right = end_kind(&v1)?;

        let mut a = Vec::with_capacity(mesh + 2);
        let mut m = Vec::with_capacity(mesh + 2);
        if let EndKind::Free = left {
            a.push(1.0 / h + 0.5 * h * profile.eval(0.0));
            m.push(0.5 * h);
            dofs.push(Dof::FreeEnd { edge: k, end: 0 });
        }
        for j in 1..=mesh {
            let x = j as f64 * h;
            a.push(2.0 / h + h * profile.eval(x));
            m.push(h);
            dofs.push(Dof::Interior { edge: k, node: j });
        }
        if let EndKind::Free = right {
            a.push(1.0 / h + 0.5 * h * profile.eval(1.0));
            m.push(0.5 * h);
            dofs.push(Dof::FreeEnd { edge: k, end: 1 });
        }
        let b = vec![-1.0 / h; a.len() - 1];

        // Accumulate the δ-vertex contributions of this edge's endpoints.
        if let EndKind::Border(bi) = left {
            border.a[bi] += 1.0 / h + 0.5 * h * profile.eval(0.0);
            border.m[bi] += 0.5 * h;
        }
        if let EndKind::Border(bi) = right {
            border.a[bi] += 1.0 / h + 0.5 * h * profile.eval(1.0);
            border.m[bi] += 0.5 * h;
        }
        if let (EndKind::Border(i), EndKind::Border(j)) = (left, right) {
            border.band = border.band.max(i.abs_diff(j));
        }

        chains.push(Chain { a, b, m, left, right, offset });
        offset += chains.last().unwrap().a.len();
    }
    border.offset = offset;
    for v in &border.vertices {
        dofs.push(Dof::Vertex(*v));
    }
    let dim = offset + n_border;

    // Global diagonals and strict-lower off-diagonals for dense export.
    let mut diag_a = vec![0.0; dim];
    let mut diag_d = vec![0.0; dim];
    let mut off: Vec<(u32, u32, f64)> = Vec::new();
    for c in &chains {
        for (j, (&av, &mv)) in c.a.iter().zip(c.m.iter()).enumerate() {
            diag_a[c.offset + j] = av;
            diag_d[c.offset + j] = mv;
        }
        for (j, &bv) in c.b.iter().enumerate() {
            off.push(((c.offset + j + 1) as u32, (c.offset + j) as u32, bv));
        }
        if let EndKind::Border(bi) = c.left {
            off.push(((border.offset + bi) as u32, c.offset as u32, -1.0 / h));
        }
        if let EndKind::Border(bi) = c.right {
            off.push(((border.offset + bi) as u32, (c.offset + c.a.len() - 1) as u32, -1.0 / h));
        }
    }
    for i in 0..n_border {
        diag_a[border.offset + i] = border.a[i];
        diag_d[border.offset + i] = border.m[i];
    }

    let breakdown_scale = 2.0 / h + h * model.vmax() + 1.0;

    Ok(DiscreteHamiltonian {
        mesh,
        h,
        chains,
        border,
        dofs,
        edge_keys: sub.edges.clone(),
        dim,
        diag_a,
        diag_d,
        off,
        breakdown_scale,
    })
}

/// Upper bound for the assembled dimension, usable before assembly.
pub fn dimension_upper_bound(edge_count: usize, vertex_count: usize, mesh: usize) -> usize {
    edge_count * (mesh + 2) + vertex_count
}

pub(crate) struct Breakdown;

impl DiscreteHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mesh(&self) -> usize {
        self.mesh
    }

    pub fn mesh_width(&self) -> f64 {
        self.h
    }

    pub fn dofs(&self) -> &[Dof] {
        &self.dofs
    }

    pub fn edge_keys(&self) -> &[EdgeKey] {
        &self.edge_keys
    }

    pub fn mass_diagonal(&self) -> &[f64] {
        &self.diag_d
    }

    pub(crate) fn breakdown_tolerance(&self, lambda: f64) -> f64 {
        1e-13 * (self.breakdown_scale + lambda.abs() * self.h)
    }

    /// Number of negative pivots of A − λD via chain elimination plus a
    /// banded factorisation of the vertex Schur complement (Haynsworth
    /// inertia additivity). Errors on a near-singular pivot.
    pub(crate) fn try_inertia(&self, lambda: f64) -> std::result::Result<usize, Breakdown> {
        let tol = self.breakdown_tolerance(lambda);
        let nb = self.border.vertices.len();
        let bw = self.border.band;
        let mut neg = 0usize;

        // Schur complement of the border block, banded lower storage.
        let mut band = vec![0.0f64; nb * (bw + 1)];
        for i in 0..nb {
            band[i * (bw + 1)] = self.border.a[i] - lambda * self.border.m[i];
        }

        // Two coupling slots suffice: a chain touches at most its two
        // endpoint vertices (possibly equal, for loops).
        for chain in &self.chains {
            let m = chain.a.len();
            let mut prev_d = 0.0f64;
            let mut prev_coup: [(usize, f64); 2] = [(usize::MAX, 0.0); 2];
            for k in 0..m {
                let mut d = chain.a[k] - lambda * chain.m[k];
                let mut coup: [(usize, f64); 2] = [(usize::MAX, 0.0); 2];
                if k == 0 {
                    if let EndKind::Border(bi) = chain.left {
                        coup_add(&mut coup, bi, -1.0 / self.h);
                    }
                }
                if k == m - 1 {
                    if let EndKind::Border(bi) = chain.right {
                        coup_add(&mut coup, bi, -1.0 / self.h);
                    }
                }
                if k > 0 {
                    let l = chain.b[k - 1] / prev_d;
                    d -= l * chain.b[k - 1];
                    for &(bi, v) in prev_coup.iter() {
                        if bi != usize::MAX {
                            coup_add(&mut coup, bi, -l * v);
                        }
                    }
                }
                if d.abs() < tol {
                    return Err(Breakdown);
                }
                if d < 0.0 {
                    neg += 1;
                }
                // Schur update C −= coup ⊗ coup / d (symmetric, lower part).
                for a_idx in 0..2 {
                    let (bi, vi) = coup[a_idx];
                    if bi == usize::MAX {
                        continue;
                    }
                    for b_idx in a_idx..2 {
                        let (bj, vj) = coup[b_idx];
                        if bj == usize::MAX {
                            continue;
                        }
                        let (hi, lo) = if bi >= bj { (bi, bj) } else { (bj, bi) };
                        debug_assert!(hi - lo <= bw);
                        band[lo * (bw + 1) + (hi - lo)] -= vi * vj / d;
                    }
                }
                prev_d = d;
                prev_coup = coup;
            }
        }

        // Banded LDLᵀ of the Schur complement.
        for j in 0..nb {
            let d = band[j * (bw + 1)];
            if d.abs() < tol {
                return Err(Breakdown);
            }
            if d < 0.0 {
                neg += 1;
            }
            let max_r = bw.min(nb - 1 - j);
            for r1 in 1..=max_r {
                let c1 = band[j * (bw + 1) + r1];
                if c1 == 0.0 {
                    continue;
                }
                for r2 in 1..=r1 {
                    let c2 = band[j * (bw + 1) + r2];
                    band[(j + r2) * (bw + 1) + (r1 - r2)] -= c1 * c2 / d;
                }
            }
        }
        Ok(neg)
    }

    /// Last-resort inertia with tiny pivots replaced by ±tol; only used if
    /// repeated shift nudges keep hitting near-singular factorisations.
    pub(crate) fn inertia_forced(&self, lambda: f64) -> usize {
        let tol = self.breakdown_tolerance(lambda);
        let guard = |d: f64| -> f64 {
            if d.abs() < tol {
                if d >= 0.0 {
                    tol
                } else {
                    -tol
                }
            } else {
                d
            }
        };
        let nb = self.border.vertices.len();
        let bw = self.border.band;
        let mut neg = 0usize;
        let mut band = vec![0.0f64; nb * (bw + 1)];
        for i in 0..nb {
            band[i * (bw + 1)] = self.border.a[i] - lambda * self.border.m[i];
        }
        for chain in &self.chains {
            let m = chain.a.len();
            let mut prev_d = 0.0f64;
            let mut prev_coup: [(usize, f64); 2] = [(usize::MAX, 0.0); 2];
            for k in 0..m {
                let mut d = chain.a[k] - lambda * chain.m[k];
                let mut coup: [(usize, f64); 2] = [(usize::MAX, 0.0); 2];
                if k == 0 {
                    if let EndKind::Border(bi) = chain.left {
                        coup_add(&mut coup, bi, -1.0 / self.h);
                    }
                }
                if k == m - 1 {
                    if let EndKind::Border(bi) = chain.right {
                        coup_add(&mut coup, bi, -1.0 / self.h);
                    }
                }
                if k > 0 {
                    let l = chain.b[k - 1] / prev_d;
                    d -= l * chain.b[k - 1];
                    for &(bi, v) in prev_coup.iter() {
                        if bi != usize::MAX {
                            coup_add(&mut coup, bi, -l * v);
                        }
                    }
                }
                d = guard(d);
                if d < 0.0 {
                    neg += 1;
                }
                for a_idx in 0..2 {
                    let (bi, vi) = coup[a_idx];
                    if bi == usize::MAX {
                        continue;
                    }
                    for b_idx in a_idx..2 {
                        let (bj, vj) = coup[b_idx];
                        if bj == usize::MAX {
                            continue;
                        }
                        let (hi, lo) = if bi >= bj { (bi, bj) } else { (bj, bi) };
                        band[lo * (bw + 1) + (hi - lo)] -= vi * vj / d;
                    }
                }
                prev_d = d;
                prev_coup = coup;
            }
        }
        for j in 0..nb {
            let d = guard(band[j * (bw + 1)]);
            if d < 0.0 {
                neg += 1;
            }
            let max_r = bw.min(nb - 1 - j);
            for r1 in 1..=max_r {
                let c1 = band[j * (bw + 1) + r1];
                for r2 in 1..=r1 {
                    let c2 = band[j * (bw + 1) + r2];
                    band[(j + r2) * (bw + 1) + (r1 - r2)] -= c1 * c2 / d;
                }
            }
        }
        neg
    }

    /// Gershgorin lower bound for the pencil spectrum (on D^{-1/2}AD^{-1/2}).
    pub fn lambda_lower_bound(&self) -> f64 {
        let mut radius = vec![0.0f64; self.dim];
        for &(i, j, v) in &self.off {
            let w = v.abs() / (self.diag_d[i as usize] * self.diag_d[j as usize]).sqrt();
            radius[i as usize] += w;
            radius[j as usize] += w;
        }
        let mut lo = f64::INFINITY;
        for i in 0..self.dim {
            lo = lo.min(self.diag_a[i] / self.diag_d[i] - radius[i]);
        }
        lo
    }

    /// Dense A and D (for oracles and small-instance eigendecompositions).
    pub fn to_dense(&self) -> (DMatrix<f64>, Vec<f64>) {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            a[(i, i)] = self.diag_a[i];
        }
        for &(i, j, v) in &self.off {
            a[(i as usize, j as usize)] = v;
            a[(j as usize, i as usize)] = v;
        }
        (a, self.diag_d.clone())
    }

    /// The congruent standard problem D^{-1/2} A D^{-1/2}.
    pub fn to_dense_scaled(&self) -> DMatrix<f64> {
        let (mut a, d) = self.to_dense();
        let inv_sqrt: Vec<f64> = d.iter().map(|&x| 1.0 / x.sqrt()).collect();
        for i in 0..self.dim {
            for j in 0..self.dim {
                a[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
            }
        }
        a
    }

    /// D-mass localised to the given window edges: the share of every dof's
    /// mass that is attributable to those edges (vertex unknowns receive h/2
    /// per incident window endpoint). Used for localised spectral traces.
    pub fn window_mass(&self, window_edges: &[EdgeKey]) -> Vec<f64> {
        let index: HashMap<EdgeKey, usize> =
            self.edge_keys.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut w = vec![0.0f64; self.dim];
        for e in window_edges {
            let Some(&k) = index.get(e) else { continue };
            let chain = &self.chains[k];
            for (j, &mass) in chain.m.iter().enumerate() {
                w[chain.offset + j] = mass;
            }
            if let EndKind::Border(bi) = chain.left {
                w[self.border.offset + bi] += 0.5 * self.h;
            }
            if let EndKind::Border(bi) = chain.right {
                w[self.border.offset + bi] += 0.5 * self.h;
            }
        }
        w
    }

    /// Coordinate-format export: `row col value` per line (symmetric entries
    /// written once, lower triangle), preceded by no header. See
    /// [`DiscreteHamiltonian::export_header_json`] for the companion header.
    pub fn export_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.dim {
            writeln!(w, "{} {} {:.17e}", i, i, self.diag_a[i])?;
        }
        for &(i, j, v) in &self.off {
            writeln!(w, "{} {} {:.17e}", i, j, v)?;
        }
        Ok(())
    }

    /// JSON header describing the export: dimension, nonzeros, mesh, and a
    /// summary of the index map.
    pub fn export_header_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let interior = self.dofs.iter().filter(|d| matches!(d, Dof::Interior { .. })).count();
        let free = self.dofs.iter().filter(|d| matches!(d, Dof::FreeEnd { .. })).count();
        let vertex = self.dofs.iter().filter(|d| matches!(d, Dof::Vertex(_))).count();
        writeln!(
            w,
            "{{\"dimension\": {}, \"nonzeros\": {}, \"mesh\": {}, \"edges\": {}, \
             \"interior_dofs\": {}, \"free_end_dofs\": {}, \"vertex_dofs\": {}}}",
            self.dim,
            self.dim + self.off.len(),
            self.mesh,
            self.edge_keys.len(),
            interior,
            free,
            vertex
        )
    }
}

/// Test-only: wrap an arbitrary symmetric tridiagonal pencil as a single
/// fixed-end chain, so the inertia path can be driven directly.
#[cfg(test)]
pub(crate) fn test_tridiag(diag: Vec<f64>, off: Vec<f64>, mass: Vec<f64>) -> DiscreteHamiltonian {
    assert_eq!(off.len() + 1, diag.len());
    assert_eq!(mass.len(), diag.len());
    let dim = diag.len();
    let mut off_triplets = Vec::new();
    for (j, &v) in off.iter().enumerate() {
        if v != 0.0 {
            off_triplets.push(((j + 1) as u32, j as u32, v));
        }
    }
    let scale = diag.iter().chain(off.iter()).fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    DiscreteHamiltonian {
        mesh: dim,
        h: 1.0,
        chains: vec![Chain {
            a: diag.clone(),
            b: off,
            m: mass.clone(),
            left: EndKind::Fixed,
            right: EndKind::Fixed,
            offset: 0,
        }],
        border: Border::default(),
        dofs: (0..dim).map(|k| Dof::Interior { edge: 0, node: k + 1 }).collect(),
        edge_keys: Vec::new(),
        dim,
        diag_a: diag,
        diag_d: mass,
        off: off_triplets,
        breakdown_scale: scale,
    }
}

fn coup_add(coup: &mut [(usize, f64); 2], idx: usize, val: f64) {
    for slot in coup.iter_mut() {
        if slot.0 == idx {
            slot.1 += val;
            return;
        }
        if slot.0 == usize::MAX {
            *slot = (idx, val);
            return;
        }
    }
    unreachable!("a chain couples to at most two vertex unknowns");
}

/// Exact eigenvalues of −f″ + c on a single edge of length 1 with Dirichlet
/// or Neumann ends: D–D gives n²π² + c (n ≥ 1), N–N gives (n−1)²π² + c
/// (n ≥ 1), and mixed ends give (n−½)²π² + c. δ-couplings are not defined
/// on an isolated edge end.
pub fn single_edge_spectrum(
    left: VertexCondition,
    right: VertexCondition,
    c: f64,
    n_max: usize,
) -> Result<Vec<f64>> {
    use VertexCondition::*;
    let evs: Vec<f64> = match (left, right) {
        (Dirichlet, Dirichlet) => (1..=n_max).map(|n| (n as f64 * PI).powi(2) + c).collect(),
        (NeumannDecoupled, NeumannDecoupled) => {
            (1..=n_max).map(|n| ((n - 1) as f64 * PI).powi(2) + c).collect()
        }
        (Dirichlet, NeumannDecoupled) | (NeumannDecoupled, Dirichlet) => (1..=n_max)
            .map(|n| ((n as f64 - 0.5) * PI).powi(2) + c)
            .collect(),
        _ => {
            return Err(Error::InvalidModel(
                "delta coupling at an isolated edge end has no closed form here".into(),
            ))
        }
    };
    Ok(evs)
}

/// Exact eigenvalues of the discrete single-edge Dirichlet problem at mesh M:
/// the pencil reduces to (1/h²)·tridiag(−1,2,−1), whose eigenvalues are
/// (4/h²)·sin²(kπ/(2(M+1))), k = 1..M.
pub fn single_edge_dirichlet_discrete(mesh: usize) -> Vec<f64> {
    let h = 1.0 / (mesh as f64 + 1.0);
    (1..=mesh)
        .map(|k| {
            let s = (k as f64 * PI / (2.0 * (mesh as f64 + 1.0))).sin();
            4.0 / (h * h) * s * s
        })
        .collect()
}
