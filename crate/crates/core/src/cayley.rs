//! The directed metric Cayley graph Γ(G,S) and its finite subgraphs.
//!
//! Vertices are group elements; for every vertex v and generator s ∈ S there
//! is one directed edge from v to s·v, identified with the interval [0,1].
//! Edges are keyed by (base vertex, generator index), which disambiguates
//! parallel edges and loops and makes the group action on edges a pure base
//! shift: e∘g has base γ₀(e)·g⁻¹ and the same generator index, so that
//! γ(e∘g) = (γ₀(e)g⁻¹, γ₁(e)g⁻¹).

use std::io::Write;

use crate::group::{FiniteSet, GeneratorSet, GroupElement};

/// An edge of Γ(G,S): the directed edge from `base` to `s·base` where `s`
/// is the generator with index `gen`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeKey {
    pub base: GroupElement,
    pub gen: usize,
}

impl EdgeKey {
    pub fn new(base: GroupElement, gen: usize) -> EdgeKey {
        EdgeKey { base, gen }
    }

    /// (γ₀(e), γ₁(e)) = (base, s·base).
    pub fn endpoints(&self, s: &GeneratorSet) -> (GroupElement, GroupElement) {
        (self.base, s.gens()[self.gen].mul(&self.base))
    }

    /// Whether γ₀(e) = γ₁(e), i.e. the generator is the identity.
    pub fn is_loop(&self, s: &GeneratorSet) -> bool {
        s.gens()[self.gen].is_identity()
    }

    /// The action e∘g. Note the composition rule (e∘g)∘h = e∘(hg), which
    /// follows from base·g⁻¹·h⁻¹ = base·(hg)⁻¹.
    pub fn translate(&self, g: &GroupElement) -> EdgeKey {
        EdgeKey { base: self.base.mul(&g.inv()), gen: self.gen }
    }

    /// Canonical key, e.g. `"Z2:1:2#0"`.
    pub fn key(&self) -> String {
        format!("{}#{}", self.base.key(), self.gen)
    }
}

/// The incidence list 𝓔_v of a vertex: pairs (e, j) with γ_j(e) = v.
/// Loops contribute two entries, once with j = 0 and once with j = 1,
/// so |𝓔_v| = 2|S| for every vertex of the full Cayley graph.
#[derive(Clone, Debug)]
pub struct VertexStar {
    pub vertex: GroupElement,
    pub entries: Vec<(EdgeKey, u8)>,
}

/// Incidence list of `v` in the full graph: outgoing edges (v, i) with j = 0
/// and incoming edges (s_i⁻¹·v, i) with j = 1.
pub fn vertex_star(v: &GroupElement, s: &GeneratorSet) -> VertexStar {
    let mut entries = Vec::with_capacity(2 * s.len());
    for i in 0..s.len() {
        entries.push((EdgeKey::new(*v, i), 0));
    }
    for (i, gen) in s.gens().iter().enumerate() {
        entries.push((EdgeKey::new(gen.inv().mul(v), i), 1));
    }
    VertexStar { vertex: *v, entries }
}

/// The finite subgraph Γ_Q spanned by a finite vertex set Q:
/// E_Q = all outgoing edges of Q, V_Q = Q ∪ SQ, with the inner/boundary
/// classification of vertices and edges.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub q: FiniteSet,
    /// E_Q, ordered by (base in canonical order, generator index); |E_Q| = |S||Q|.
    pub edges: Vec<EdgeKey>,
    /// V_Q = Q ∪ SQ.
    pub vertices: FiniteSet,
    /// V_Q^i: vertices all of whose incident edges lie in E_Q.
    pub inner_vertices: FiniteSet,
    /// V_Q^∂ = V_Q ∖ V_Q^i.
    pub boundary_vertices: FiniteSet,
    /// Indices into `edges` of E_Q^i (both endpoints inner).
    pub inner_edges: Vec<usize>,
    /// Indices into `edges` of E_Q^∂ = E_Q ∖ E_Q^i.
    pub boundary_edges: Vec<usize>,
}

/// Build Γ_Q. A vertex v is inner iff v ∈ Q and s⁻¹v ∈ Q for every s ∈ S
/// (its outgoing edges need v ∈ Q, its incoming edges need the predecessors).
pub fn subgraph(q: &FiniteSet, s: &GeneratorSet) -> Subgraph {
    assert!(!q.is_empty(), "subgraph of an empty set");
    let mut edges = Vec::with_capacity(q.len() * s.len());
    for v in q.iter() {
        for i in 0..s.len() {
            edges.push(EdgeKey::new(*v, i));
        }
    }
    let mut vertices: Vec<GroupElement> = q.iter().copied().collect();
    for gen in s.gens() {
        for v in q.iter() {
            vertices.push(gen.mul(v));
        }
    }
    let vertices = FiniteSet::from_iter(vertices);
    let inner_vertices = FiniteSet::from_iter(vertices.iter().copied().filter(|v| {
        q.contains(v) && s.gens().iter().all(|gen| q.contains(&gen.inv().mul(v)))
    }));
    let boundary_vertices = FiniteSet::from_iter(
        vertices.iter().copied().filter(|v| !inner_vertices.contains(v)),
    );
    let mut inner_edges = Vec::new();
    let mut boundary_edges = Vec::new();
    for (idx, e) in edges.iter().enumerate() {
        let (v0, v1) = e.endpoints(s);
        if inner_vertices.contains(&v0) && inner_vertices.contains(&v1) {
            inner_edges.push(idx);
        } else {
            boundary_edges.push(idx);
        }
    }
    Subgraph {
        q: q.clone(),
        edges,
        vertices,
        inner_vertices,
        boundary_vertices,
        inner_edges,
        boundary_edges,
    }
}

impl Subgraph {
    /// Dump format for debugging and golden tests:
    /// `edge_key,v0_key,v1_key,inner_flag` per edge.
    pub fn write_csv<W: Write>(&self, s: &GeneratorSet, mut w: W) -> std::io::Result<()> {
        writeln!(w, "edge_key,v0_key,v1_key,inner_flag")?;
        let inner: std::collections::HashSet<usize> = self.inner_edges.iter().copied().collect();
        for (idx, e) in self.edges.iter().enumerate() {
            let (v0, v1) = e.endpoints(s);
            writeln!(
                w,
                "{},{},{},{}",
                e.key(),
                v0.key(),
                v1.key(),
                u8::from(inner.contains(&idx))
            )?;
        }
        Ok(())
    }
}
