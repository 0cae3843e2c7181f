//! Equivariant random disorder: potential labels on edges, condition labels
//! on vertices, colourings, patterns and their frequencies.
//!
//! A realization is a pure function of a 64-bit seed and the canonical key
//! of the edge or vertex, via the fixed mixing documented in [`crate::mixing`].
//! No arrays are stored, so overlapping and shifted windows agree by
//! construction. The shift action re-keys lookups through the group action:
//!
//! ```text
//! potential(shift(ω,g), e∘g) = potential(ω, e)
//! condition(shift(ω,g), v)   = condition(ω, v·g)
//! ```
//!
//! Both identities hold exactly (not just in distribution). The underlying
//! probability space is the i.i.d. product measure over edge and vertex
//! labels, with the right-translation shift; this is ergodic and measure
//! preserving.

use num::rational::Ratio;

use crate::cayley::EdgeKey;
use crate::error::{Error, Result};
use crate::group::{FiniteSet, FolnerBox, GeneratorSet, GroupElement, GroupId};
use crate::mixing;

fn validate_weights(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidModel(format!("{what}: empty weight vector")));
    }
    if w.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::InvalidModel(format!("{what}: weights must lie in [0,1]")));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidModel(format!("{what}: weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// A seeded disorder realization ω: assigns a potential label (index into 𝓑)
/// to every edge and a condition label (index into 𝓤) to every vertex,
/// i.i.d. with the configured weights.
#[derive(Clone, Debug)]
pub struct DisorderField {
    seed: u64,
    /// One weight vector over 𝓑 per generator index.
    edge_weights: Vec<Vec<f64>>,
    vertex_weights: Vec<f64>,
    /// Accumulated shift: lookups are keyed by x·t. Identity initially.
    translation: GroupElement,
}

impl DisorderField {
    /// i.i.d. field with one shared weight vector over 𝓑 for every
    /// generator index.
    pub fn new(
        seed: u64,
        group: GroupId,
        gen_count: usize,
        edge_weights: Vec<f64>,
        vertex_weights: Vec<f64>,
    ) -> Result<DisorderField> {
        Self::with_per_generator_weights(
            seed,
            group,
            vec![edge_weights; gen_count],
            vertex_weights,
        )
    }

    /// i.i.d. field with one weight vector over 𝓑 per generator index.
    pub fn with_per_generator_weights(
        seed: u64,
        group: GroupId,
        edge_weights: Vec<Vec<f64>>,
        vertex_weights: Vec<f64>,
    ) -> Result<DisorderField> {
        if edge_weights.is_empty() {
            return Err(Error::InvalidModel("no edge weight vectors".into()));
        }
        for (i, w) in edge_weights.iter().enumerate() {
            validate_weights(w, &format!("edge weights for generator {i}"))?;
        }
        validate_weights(&vertex_weights, "vertex weights")?;
        Ok(DisorderField {
            seed,
            edge_weights,
            vertex_weights,
            translation: group.identity(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edge_weights(&self) -> &[Vec<f64>] {
        &self.edge_weights
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    /// The shifted realization α_g(ω). Shifts compose: t ↦ g·t.
    pub fn shifted(&self, g: &GroupElement) -> DisorderField {
        let mut out = self.clone();
        out.translation = g.mul(&self.translation);
        out
    }

    /// Potential label of an edge (index into 𝓑).
    pub fn potential_index(&self, e: &EdgeKey) -> usize {
        let keyed = EdgeKey::new(e.base.mul(&self.translation), e.gen);
        let h = mixing::key_hash(self.seed, mixing::DOMAIN_EDGE, &keyed.key());
        let w = &self.edge_weights[e.gen.min(self.edge_weights.len() - 1)];
        mixing::pick_label(w, mixing::unit_f64(h))
    }

    /// Condition label of a vertex (index into 𝓤).
    pub fn condition_index(&self, v: &GroupElement) -> usize {
        let keyed = v.mul(&self.translation);
        let h = mixing::key_hash(self.seed, mixing::DOMAIN_VERTEX, &keyed.key());
        mixing::pick_label(&self.vertex_weights, mixing::unit_f64(h))
    }
}

/// Verify the two shift identities on the given samples; true iff both hold
/// on every sample.
pub fn equivariance_check(
    field: &DisorderField,
    g: &GroupElement,
    edges: &[EdgeKey],
    vertices: &[GroupElement],
) -> bool {
    let shifted = field.shifted(g);
    edges
        .iter()
        .all(|e| shifted.potential_index(&e.translate(g)) == field.potential_index(e))
        && vertices
            .iter()
            .all(|v| shifted.condition_index(v) == field.condition_index(&v.mul(g)))
}

/// A letter of the colouring alphabet 𝓐 = 𝓑^{|S|} × 𝓤: the potential labels
/// of the outgoing edges of a vertex (ordered by generator index) together
/// with its condition label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Colour {
    pub edge_labels: Vec<usize>,
    pub vertex_label: usize,
}

/// The colouring 𝓒_ω evaluated at v.
pub fn colour_at(field: &DisorderField, v: &GroupElement, s: &GeneratorSet) -> Colour {
    Colour {
        edge_labels: (0..s.len())
            .map(|i| field.potential_index(&EdgeKey::new(*v, i)))
            .collect(),
        vertex_label: field.condition_index(v),
    }
}

/// A pattern: a colour assignment on a finite domain, stored in canonical
/// domain order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pattern {
    domain: Vec<GroupElement>,
    labels: Vec<Colour>,
}

impl Pattern {
    pub fn new(mut entries: Vec<(GroupElement, Colour)>) -> Result<Pattern> {
        if entries.is_empty() {
            return Err(Error::InvalidModel("pattern with empty domain".into()));
        }
        entries.sort_by_key(|(g, _)| *g);
        entries.dedup_by_key(|(g, _)| *g);
        let (domain, labels) = entries.into_iter().unzip();
        Ok(Pattern { domain, labels })
    }

    pub fn singleton(v: GroupElement, colour: Colour) -> Pattern {
        Pattern { domain: vec![v], labels: vec![colour] }
    }

    /// Read the pattern off a realization on the given domain.
    pub fn from_field(
        field: &DisorderField,
        domain: &FiniteSet,
        s: &GeneratorSet,
    ) -> Result<Pattern> {
        Pattern::new(domain.iter().map(|v| (*v, colour_at(field, v, s))).collect())
    }

    pub fn domain(&self) -> &[GroupElement] {
        &self.domain
    }

    pub fn labels(&self) -> &[Colour] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn colour_of(&self, v: &GroupElement) -> Option<&Colour> {
        self.domain.binary_search(v).ok().map(|i| &self.labels[i])
    }
}

/// Number of occurrences of `p` in the colouring restricted to `window`:
/// the number of right translates x with D(P)·x ⊆ window matching the
/// colouring pointwise, i.e. colour(d·x) = P(d) for every d ∈ D(P).
/// (In the torsion-free groups built in here, distinct translates give
/// distinct patterns, so counting translates counts patterns.)
pub fn pattern_count<C>(p: &Pattern, window: &FiniteSet, colour: C) -> u64
where
    C: Fn(&GroupElement) -> Colour,
{
    let d0_inv = p.domain[0].inv();
    let mut count = 0u64;
    'outer: for q in window.iter() {
        let x = d0_inv.mul(q);
        for (d, lbl) in p.domain.iter().zip(p.labels.iter()) {
            let site = d.mul(&x);
            if !window.contains(&site) || colour(&site) != *lbl {
                continue 'outer;
            }
        }
        count += 1;
    }
    count
}

/// Occurrence count of `p` in 𝓒_ω restricted to `window`.
pub fn pattern_count_in_field(
    p: &Pattern,
    field: &DisorderField,
    window: &FiniteSet,
    s: &GeneratorSet,
) -> u64 {
    pattern_count(p, window, |v| colour_at(field, v, s))
}

/// The sequence ♯_P(𝓒_ω|_{Q_j}) / |Q_j| along the given boxes, as exact
/// rationals. For i.i.d. fields this approaches the product probability of
/// the pattern's labels.
pub fn pattern_frequency(
    p: &Pattern,
    field: &DisorderField,
    s: &GeneratorSet,
    boxes: &[FolnerBox],
) -> Vec<Ratio<i64>> {
    boxes
        .iter()
        .map(|b| {
            let c = pattern_count_in_field(p, field, &b.set, s);
            Ratio::new(c as i64, b.set.len() as i64)
        })
        .collect()
}

/// Closed-form i.i.d. frequency: the product over the pattern domain of the
/// probability of each colour under the given weights. Used as the oracle
/// for the frequency limit.
pub fn exact_frequency_iid(
    p: &Pattern,
    edge_weights: &[Vec<f64>],
    vertex_weights: &[f64],
) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidModel("pattern with empty domain".into()));
    }
    let mut prob = 1.0;
    for colour in p.labels() {
        for (i, &lbl) in colour.edge_labels.iter().enumerate() {
            let w = &edge_weights[i.min(edge_weights.len() - 1)];
            let p_lbl = *w
                .get(lbl)
                .ok_or_else(|| Error::InvalidModel(format!("label {lbl} outside alphabet")))?;
            prob *= p_lbl;
        }
        let p_v = *vertex_weights
            .get(colour.vertex_label)
            .ok_or_else(|| Error::InvalidModel("condition label outside alphabet".into()))?;
        prob *= p_v;
    }
    Ok(prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_elem(rng: &mut ChaCha8Rng, group: GroupId, span: i32) -> GroupElement {
        let mut c = [0i32; 3];
        for ci in c.iter_mut().take(group.coord_count()) {
            *ci = rng.gen_range(-span..=span);
        }
        GroupElement::new(group, c)
    }

    #[test]
    fn determinism_and_degenerate_weights() {
        let f = DisorderField::new(42, GroupId::Z2, 2, vec![0.5, 0.5], vec![1.0]).unwrap();
        let e = EdgeKey::new(GroupElement::z(&[3, -1]), 1);
        assert_eq!(f.potential_index(&e), f.potential_index(&e));

        let forced = DisorderField::new(7, GroupId::Z2, 2, vec![1.0, 0.0], vec![1.0]).unwrap();
        for x in -20..20 {
            let e = EdgeKey::new(GroupElement::z(&[x, 0]), 0);
            assert_eq!(forced.potential_index(&e), 0);
        }
    }

    #[test]
    fn weight_validation() {
        assert!(DisorderField::new(0, GroupId::Z1, 1, vec![0.5, 0.6], vec![1.0]).is_err());
        assert!(DisorderField::new(0, GroupId::Z1, 1, vec![], vec![1.0]).is_err());
        assert!(DisorderField::new(0, GroupId::Z1, 1, vec![1.0], vec![-0.2, 1.2]).is_err());
    }

    #[test]
    fn marginal_distribution_monte_carlo() {
        // 10⁴ edges, fair weights: empirical fraction within 3 binomial σ ≈ 0.015.
        let f = DisorderField::new(2024, GroupId::Z2, 2, vec![0.5, 0.5], vec![1.0]).unwrap();
        let mut zero = 0usize;
        let mut total = 0usize;
        for x in 0..100 {
            for y in 0..50 {
                for gen in 0..2 {
                    let e = EdgeKey::new(GroupElement::z(&[x, y]), gen);
                    if f.potential_index(&e) == 0 {
                        zero += 1;
                    }
                    total += 1;
                }
            }
        }
        assert_eq!(total, 10_000);
        let frac = zero as f64 / total as f64;
        assert!((frac - 0.5).abs() < 0.02, "empirical fraction {frac}");
    }

    #[test]
    fn equivariance_identity_shift() {
        let f = DisorderField::new(5, GroupId::Z2, 2, vec![0.3, 0.7], vec![0.5, 0.5]).unwrap();
        let edges = vec![EdgeKey::new(GroupElement::z(&[1, 2]), 0)];
        let verts = vec![GroupElement::z(&[-1, 4])];
        assert!(equivariance_check(&f, &GroupId::Z2.identity(), &edges, &verts));
    }

    #[test]
    fn equivariance_random_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for group in [GroupId::Z2, GroupId::H3] {
            let f = DisorderField::new(17, group, 2, vec![0.25, 0.75], vec![0.5, 0.5]).unwrap();
            for _ in 0..100 {
                let g = rand_elem(&mut rng, group, 10);
                let edges: Vec<EdgeKey> = (0..10)
                    .map(|_| EdgeKey::new(rand_elem(&mut rng, group, 10), rng.gen_range(0..2)))
                    .collect();
                let verts: Vec<GroupElement> =
                    (0..10).map(|_| rand_elem(&mut rng, group, 10)).collect();
                assert!(equivariance_check(&f, &g, &edges, &verts));
            }
        }
    }

    #[test]
    fn equivariance_composes() {
        // shift(shift(ω,g),h) behaves like shift(ω, h·g) on lookups.
        let f = DisorderField::new(3, GroupId::H3, 2, vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let g = GroupElement::h3(1, 2, -1);
        let h = GroupElement::h3(0, -1, 3);
        let twice = f.shifted(&g).shifted(&h);
        let once = f.shifted(&h.mul(&g));
        for x in [GroupElement::h3(0, 0, 0), GroupElement::h3(2, 1, 5)] {
            assert_eq!(twice.condition_index(&x), once.condition_index(&x));
            let e = EdgeKey::new(x, 1);
            assert_eq!(twice.potential_index(&e), once.potential_index(&e));
        }
    }

    #[test]
    fn pattern_count_constant_colouring() {
        let q = GroupId::Z2.folner_box(5);
        let a = Colour { edge_labels: vec![0, 0], vertex_label: 0 };
        let p = Pattern::singleton(GroupId::Z2.identity(), a.clone());
        let count = pattern_count(&p, &q.set, |_| a.clone());
        assert_eq!(count, q.set.len() as u64);

        let other = Colour { edge_labels: vec![1, 0], vertex_label: 0 };
        let p_absent = Pattern::singleton(GroupId::Z2.identity(), other);
        assert_eq!(pattern_count(&p_absent, &q.set, |_| a.clone()), 0);
    }

    #[test]
    fn pattern_count_matches_naive_scan() {
        // Independent oracle: scan all translates by brute force without the
        // domain-anchored candidate trick.
        let s = GeneratorSet::standard(GroupId::Z2);
        let f = DisorderField::new(600, GroupId::Z2, 2, vec![0.5, 0.5], vec![1.0]).unwrap();
        let q = GroupId::Z2.folner_box(8);
        let colour = |v: &GroupElement| colour_at(&f, v, &s);

        // singleton pattern
        let p1 = Pattern::singleton(GroupId::Z2.identity(), colour(&GroupElement::z(&[3, 3])));
        // two-site pattern
        let p2 = Pattern::new(vec![
            (GroupElement::z(&[0, 0]), colour(&GroupElement::z(&[2, 2]))),
            (GroupElement::z(&[1, 0]), colour(&GroupElement::z(&[3, 2]))),
        ])
        .unwrap();

        for p in [&p1, &p2] {
            let mut naive = 0u64;
            for x in -10..20 {
                for y in -10..20 {
                    let t = GroupElement::z(&[x, y]);
                    let ok = p.domain().iter().zip(p.labels().iter()).all(|(d, lbl)| {
                        let site = d.mul(&t);
                        q.set.contains(&site) && colour(&site) == *lbl
                    });
                    if ok {
                        naive += 1;
                    }
                }
            }
            assert_eq!(pattern_count(p, &q.set, colour), naive);
        }
    }

    #[test]
    fn pattern_count_monotone_and_bounded() {
        let s = GeneratorSet::standard(GroupId::Z2);
        let f = DisorderField::new(601, GroupId::Z2, 2, vec![0.5, 0.5], vec![1.0]).unwrap();
        let p = Pattern::singleton(
            GroupId::Z2.identity(),
            colour_at(&f, &GroupElement::z(&[1, 1]), &s),
        );
        let mut prev = 0u64;
        for n in [2u32, 4, 6, 8] {
            let q = GroupId::Z2.folner_box(n);
            let c = pattern_count_in_field(&p, &f, &q.set, &s);
            assert!(c <= q.set.len() as u64);
            assert!(c >= prev, "count must grow with the window");
            prev = c;
        }
    }

    #[test]
    fn frequency_degenerate() {
        let s = GeneratorSet::standard(GroupId::Z1);
        let f = DisorderField::new(8, GroupId::Z1, 1, vec![1.0], vec![1.0]).unwrap();
        let p = Pattern::singleton(
            GroupId::Z1.identity(),
            Colour { edge_labels: vec![0], vertex_label: 0 },
        );
        let boxes: Vec<FolnerBox> = [4u32, 16, 64].iter().map(|&n| GroupId::Z1.folner_box(n)).collect();
        let freqs = pattern_frequency(&p, &f, &s, &boxes);
        for fr in freqs {
            assert_eq!(fr, Ratio::new(1, 1));
        }
    }

    #[test]
    fn frequency_uniform_alphabet_of_four() {
        // |𝓐| = 4 via |𝓑| = 2, |S| = 1, |𝓤| = 2; singleton pattern has
        // limit 1/4, checked at |Q| = 10⁴ within 3 binomial standard errors.
        let s = GeneratorSet::standard(GroupId::Z1);
        let f =
            DisorderField::new(424242, GroupId::Z1, 1, vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let p = Pattern::singleton(
            GroupId::Z1.identity(),
            Colour { edge_labels: vec![0], vertex_label: 1 },
        );
        let q = GroupId::Z1.folner_box(10_000);
        let freq = pattern_frequency(&p, &f, &s, &[q])[0];
        let freq_f = *freq.numer() as f64 / *freq.denom() as f64;
        let sigma = (0.25 * 0.75 / 10_000.0).sqrt();
        assert!((freq_f - 0.25).abs() <= 3.0 * sigma, "freq {freq_f}");
    }

    #[test]
    fn frequency_two_site_product() {
        let s = GeneratorSet::standard(GroupId::Z2);
        let f = DisorderField::new(77, GroupId::Z2, 2, vec![0.5, 0.5], vec![1.0]).unwrap();
        let c0 = Colour { edge_labels: vec![0, 0], vertex_label: 0 };
        let c1 = Colour { edge_labels: vec![1, 1], vertex_label: 0 };
        let p = Pattern::new(vec![
            (GroupElement::z(&[0, 0]), c0),
            (GroupElement::z(&[1, 0]), c1),
        ])
        .unwrap();
        let exact = exact_frequency_iid(&p, f.edge_weights(), f.vertex_weights()).unwrap();
        assert_eq!(exact, 0.0625); // (1/2)² · (1/2)²
        let q = GroupId::Z2.folner_box(100);
        let freq = pattern_frequency(&p, &f, &s, &[q])[0];
        let freq_f = *freq.numer() as f64 / *freq.denom() as f64;
        let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt();
        assert!((freq_f - exact).abs() <= 3.0 * sigma, "freq {freq_f} vs {exact}");
    }

    #[test]
    fn exact_frequency_cases() {
        let p = Pattern::singleton(
            GroupId::Z1.identity(),
            Colour { edge_labels: vec![0], vertex_label: 0 },
        );
        // uniform over 4 letters = 1/4
        assert_eq!(
            exact_frequency_iid(&p, &[vec![0.5, 0.5]], &[0.5, 0.5]).unwrap(),
            0.25
        );
        // two independent sites with weights (1/2,1/2) each
        let p2 = Pattern::new(vec![
            (GroupElement::z(&[0]), Colour { edge_labels: vec![0], vertex_label: 0 }),
            (GroupElement::z(&[1]), Colour { edge_labels: vec![1], vertex_label: 0 }),
        ])
        .unwrap();
        assert_eq!(exact_frequency_iid(&p2, &[vec![0.5, 0.5]], &[1.0]).unwrap(), 0.25);
        // empty domain is rejected at construction
        assert!(Pattern::new(vec![]).is_err());
    }
}
