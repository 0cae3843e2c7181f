//! Finitely generated amenable groups with word metric and box tilings.
//!
//! Two families are built in: the free abelian groups ℤ^d (d ≤ 3) and the
//! discrete Heisenberg group H₃ of lower-triangular integer matrices
//!
//! ```text
//!            ⎛ 1  0  0 ⎞
//! (a,b,c) =  ⎜ a  1  0 ⎟ ,   (a,b,c)·(a',b',c') = (a+a', b+b', c+c'+b·a').
//!            ⎝ c  b  1 ⎠
//! ```
//!
//! Everything here is exact integer arithmetic. Coordinates are `i32` with
//! checked overflow (the c-coordinate of Heisenberg boxes grows like n²).
//! The operations are pure functions of immutable inputs and safe to call
//! concurrently.

use std::collections::{HashMap, HashSet, VecDeque};

use num::rational::Ratio;

use crate::error::{Error, Result};

/// Identifies one of the built-in groups. Adding a group means extending
/// this enum together with `GroupElement::{mul, inv}`, `folner_box` and
/// `tile_of`; all higher layers are generic over the element type.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GroupId {
    Z1,
    Z2,
    Z3,
    H3,
}

impl GroupId {
    pub fn z(dim: usize) -> GroupId {
        match dim {
            1 => GroupId::Z1,
            2 => GroupId::Z2,
            3 => GroupId::Z3,
            _ => panic!("unsupported free abelian dimension {dim} (1..=3)"),
        }
    }

    /// Number of active coordinates.
    pub fn coord_count(&self) -> usize {
        match self {
            GroupId::Z1 => 1,
            GroupId::Z2 => 2,
            GroupId::Z3 | GroupId::H3 => 3,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GroupId::Z1 => "Z1",
            GroupId::Z2 => "Z2",
            GroupId::Z3 => "Z3",
            GroupId::H3 => "H3",
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { group: *self, c: [0; 3] }
    }

    /// The box Q_n: the cube {0,…,n−1}^d for ℤ^d, and
    /// {(a,b,c) | 0 ≤ a,b < n, 0 ≤ c < n²} for H₃. Each Q_n symmetrically
    /// tiles its group with the grid returned by [`tiling_grid`].
    pub fn folner_box(&self, n: u32) -> FolnerBox {
        assert!(n >= 1, "box index must be >= 1");
        let ni = n as i32;
        let mut elems = Vec::new();
        match self {
            GroupId::Z1 => {
                for x in 0..ni {
                    elems.push(GroupElement::new(*self, [x, 0, 0]));
                }
            }
            GroupId::Z2 => {
                for x in 0..ni {
                    for y in 0..ni {
                        elems.push(GroupElement::new(*self, [x, y, 0]));
                    }
                }
            }
            GroupId::Z3 => {
                for x in 0..ni {
                    for y in 0..ni {
                        for z in 0..ni {
                            elems.push(GroupElement::new(*self, [x, y, z]));
                        }
                    }
                }
            }
            GroupId::H3 => {
                let n2 = ni.checked_mul(ni).expect("coordinate overflow");
                for a in 0..ni {
                    for b in 0..ni {
                        for c in 0..n2 {
                            elems.push(GroupElement::new(*self, [a, b, c]));
                        }
                    }
                }
            }
        }
        let grid_description = match self {
            GroupId::Z1 => format!("{n}Z"),
            GroupId::Z2 => format!("({n}Z)^2"),
            GroupId::Z3 => format!("({n}Z)^3"),
            GroupId::H3 => format!("a,b in {n}Z, c in {}Z", (n as i64) * (n as i64)),
        };
        FolnerBox { group: *self, n, set: FiniteSet::from_iter(elems), grid_description }
    }

    /// The unique grid element g with `x ∈ Q_n·g`, in closed form.
    pub fn tile_of(&self, x: &GroupElement, n: u32) -> GroupElement {
        assert_eq!(*self, x.group, "group mismatch");
        let ni = n as i64;
        let c = x.c;
        match self {
            GroupId::Z1 | GroupId::Z2 | GroupId::Z3 => {
                let mut g = [0i32; 3];
                for (i, gi) in g.iter_mut().enumerate().take(self.coord_count()) {
                    *gi = chk((c[i] as i64).div_euclid(ni) * ni);
                }
                GroupElement::new(*self, g)
            }
            GroupId::H3 => {
                // x = q·g with q = (a,b,c) ∈ Q_n, g = (A,B,C) ∈ T_n:
                // coordinates satisfy (a+A, b+B, c+C+bA), so A,B reduce
                // componentwise and C absorbs the twist term bA.
                let n2 = ni * ni;
                let a_big = (c[0] as i64).div_euclid(ni) * ni;
                let b_small = (c[1] as i64).rem_euclid(ni);
                let b_big = (c[1] as i64).div_euclid(ni) * ni;
                let z = c[2] as i64 - b_small * a_big;
                let c_big = z.div_euclid(n2) * n2;
                GroupElement::new(*self, [chk(a_big), chk(b_big), chk(c_big)])
            }
        }
    }
}

fn chk(x: i64) -> i32 {
    i32::try_from(x).expect("coordinate overflow (i32 exceeded)")
}

/// An element of ℤ^d or H₃ in canonical coordinates. Unused coordinate
/// slots are kept at zero so that derived ordering and hashing are canonical.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement {
    group: GroupId,
    c: [i32; 3],
}

impl GroupElement {
    pub fn new(group: GroupId, c: [i32; 3]) -> GroupElement {
        debug_assert!(c.iter().skip(group.coord_count()).all(|&x| x == 0));
        GroupElement { group, c }
    }

    pub fn z(coords: &[i32]) -> GroupElement {
        let group = GroupId::z(coords.len());
        let mut c = [0; 3];
        c[..coords.len()].copy_from_slice(coords);
        GroupElement { group, c }
    }

    pub fn h3(a: i32, b: i32, c: i32) -> GroupElement {
        GroupElement { group: GroupId::H3, c: [a, b, c] }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn coords(&self) -> &[i32] {
        &self.c[..self.group.coord_count()]
    }

    pub fn is_identity(&self) -> bool {
        self.c == [0; 3]
    }

    /// Group product. For ℤ^d this is componentwise addition; for H₃ it is
    /// the matrix product (a,b,c)·(a',b',c') = (a+a', b+b', c+c'+b·a').
    pub fn mul(&self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.group, rhs.group, "group mismatch: {:?} vs {:?}", self.group, rhs.group);
        let (x, y) = (self.c, rhs.c);
        match self.group {
            GroupId::Z1 | GroupId::Z2 | GroupId::Z3 => {
                let mut c = [0i32; 3];
                for i in 0..self.group.coord_count() {
                    c[i] = chk(x[i] as i64 + y[i] as i64);
                }
                GroupElement { group: self.group, c }
            }
            GroupId::H3 => {
                let a = x[0] as i64 + y[0] as i64;
                let b = x[1] as i64 + y[1] as i64;
                let c = x[2] as i64 + y[2] as i64 + (x[1] as i64) * (y[0] as i64);
                GroupElement { group: self.group, c: [chk(a), chk(b), chk(c)] }
            }
        }
    }

    /// Group inverse; for H₃, (a,b,c)⁻¹ = (−a, −b, ab−c).
    pub fn inv(&self) -> GroupElement {
        match self.group {
            GroupId::Z1 | GroupId::Z2 | GroupId::Z3 => {
                let mut c = [0i32; 3];
                for i in 0..self.group.coord_count() {
                    c[i] = chk(-(self.c[i] as i64));
                }
                GroupElement { group: self.group, c }
            }
            GroupId::H3 => {
                let a = -(self.c[0] as i64);
                let b = -(self.c[1] as i64);
                let c = (self.c[0] as i64) * (self.c[1] as i64) - self.c[2] as i64;
                GroupElement { group: self.group, c: [chk(a), chk(b), chk(c)] }
            }
        }
    }

    /// Canonical key: decimal coordinates joined by ':' prefixed by the
    /// group tag, e.g. `"H3:1:0:-2"`. Used for field hashing and file output.
    pub fn key(&self) -> String {
        let mut s = String::from(self.group.tag());
        for x in self.coords() {
            s.push(':');
            s.push_str(&x.to_string());
        }
        s
    }
}

/// A finite, ordered, non-symmetric set of generators. The order is fixed:
/// it indexes edge labels in the Cayley graph. The set may contain the
/// identity and mutually inverse pairs.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    group: GroupId,
    gens: Vec<GroupElement>,
    sym: Vec<GroupElement>,
}

impl GeneratorSet {
    pub fn new(group: GroupId, gens: Vec<GroupElement>) -> Result<GeneratorSet> {
        if gens.is_empty() {
            return Err(Error::InvalidModel("generator set must be nonempty".into()));
        }
        if gens.iter().any(|g| g.group() != group) {
            return Err(Error::InvalidModel("generator from a different group".into()));
        }
        let mut sym: Vec<GroupElement> = Vec::new();
        for g in gens.iter().chain(gens.iter().map(|g| g.inv()).collect::<Vec<_>>().iter()) {
            if !sym.contains(g) {
                sym.push(*g);
            }
        }
        Ok(GeneratorSet { group, gens, sym })
    }

    /// Standard generators: unit vectors for ℤ^d, {(1,0,0),(0,1,0)} for H₃.
    pub fn standard(group: GroupId) -> GeneratorSet {
        let gens = match group {
            GroupId::Z1 => vec![GroupElement::z(&[1])],
            GroupId::Z2 => vec![GroupElement::z(&[1, 0]), GroupElement::z(&[0, 1])],
            GroupId::Z3 => vec![
                GroupElement::z(&[1, 0, 0]),
                GroupElement::z(&[0, 1, 0]),
                GroupElement::z(&[0, 0, 1]),
            ],
            GroupId::H3 => vec![GroupElement::h3(1, 0, 0), GroupElement::h3(0, 1, 0)],
        };
        GeneratorSet::new(group, gens).unwrap()
    }

    /// The ℤ² generating system {(0,0),(1,1),(1,0),(−1,0)} whose Cayley
    /// graph contains loops and multiple edges.
    pub fn z2_with_loops() -> GeneratorSet {
        GeneratorSet::new(
            GroupId::Z2,
            vec![
                GroupElement::z(&[0, 0]),
                GroupElement::z(&[1, 1]),
                GroupElement::z(&[1, 0]),
                GroupElement::z(&[-1, 0]),
            ],
        )
        .unwrap()
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// |S|, the number of (ordered) generators.
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[GroupElement] {
        &self.gens
    }

    /// The symmetric closure S ∪ S⁻¹, deduplicated.
    pub fn symmetric(&self) -> &[GroupElement] {
        &self.sym
    }
}

/// A finite subset of the group, deduplicated and canonically ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSet {
    elems: Vec<GroupElement>,
}

impl FiniteSet {
    pub fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> FiniteSet {
        let mut elems: Vec<GroupElement> = iter.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        FiniteSet { elems }
    }

    pub fn singleton(g: GroupElement) -> FiniteSet {
        FiniteSet { elems: vec![g] }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elems.binary_search(g).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elems.iter()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elems
    }

    /// Right translate Qg = {q·g | q ∈ Q}.
    pub fn right_translate(&self, g: &GroupElement) -> FiniteSet {
        FiniteSet::from_iter(self.elems.iter().map(|q| q.mul(g)))
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        FiniteSet::from_iter(self.elems.iter().chain(other.elems.iter()).copied())
    }
}

/// A Følner box Q_n together with its index and grid description.
#[derive(Clone, Debug)]
pub struct FolnerBox {
    pub group: GroupId,
    pub n: u32,
    pub set: FiniteSet,
    pub grid_description: String,
}

/// Word distance d(g,h): the least k with s₁⋯s_k·h = g, s_i ∈ S ∪ S⁻¹,
/// and 0 for g = h. Computed by bidirectional breadth-first search; returns
/// `None` when the distance exceeds `cap`. Right-invariant: d(gx,hx) = d(g,h).
pub fn word_distance(
    g: &GroupElement,
    h: &GroupElement,
    s: &GeneratorSet,
    cap: u32,
) -> Option<u32> {
    assert_eq!(g.group(), h.group(), "group mismatch");
    if g == h {
        return Some(0);
    }
    if cap == 0 {
        return None;
    }
    let mut dist_a: HashMap<GroupElement, u32> = HashMap::from([(*g, 0)]);
    let mut dist_b: HashMap<GroupElement, u32> = HashMap::from([(*h, 0)]);
    let mut frontier_a = vec![*g];
    let mut frontier_b = vec![*h];
    let mut depth_a = 0u32;
    let mut depth_b = 0u32;
    let mut best: Option<u32> = None;

    loop {
        let reachable = depth_a + depth_b + 1;
        if reachable > cap {
            break;
        }
        if let Some(b) = best {
            if reachable >= b {
                break;
            }
        }
        // expand the smaller frontier by one level
        let expand_a = frontier_a.len() <= frontier_b.len();
        let (frontier, dist, other, depth) = if expand_a {
            (&mut frontier_a, &mut dist_a, &dist_b, &mut depth_a)
        } else {
            (&mut frontier_b, &mut dist_b, &dist_a, &mut depth_b)
        };
        let mut next = Vec::new();
        let d_new = *depth + 1;
        for x in frontier.iter() {
            for s_gen in s.symmetric() {
                let y = s_gen.mul(x);
                if dist.contains_key(&y) {
                    continue;
                }
                dist.insert(y, d_new);
                if let Some(&db) = other.get(&y) {
                    let total = d_new + db;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                next.push(y);
            }
        }
        *frontier = next;
        *depth = d_new;
        if frontier_a.is_empty() && frontier_b.is_empty() {
            break;
        }
    }
    best.filter(|&d| d <= cap)
}

/// The word-metric ball of given radius around `center`.
pub fn ball(center: &GroupElement, radius: u32, s: &GeneratorSet) -> FiniteSet {
    thicken(&FiniteSet::singleton(*center), radius, s)
}

/// All elements within word distance `r` of Q (including Q itself).
pub fn thicken(q: &FiniteSet, r: u32, s: &GeneratorSet) -> FiniteSet {
    let mut seen: HashSet<GroupElement> = q.iter().copied().collect();
    let mut frontier: VecDeque<(GroupElement, u32)> =
        q.iter().map(|g| (*g, 0)).collect();
    while let Some((x, d)) = frontier.pop_front() {
        if d == r {
            continue;
        }
        for s_gen in s.symmetric() {
            let y = s_gen.mul(&x);
            if seen.insert(y) {
                frontier.push_back((y, d + 1));
            }
        }
    }
    FiniteSet::from_iter(seen)
}

/// The two-sided R-boundary
/// ∂^R Q = {g ∈ Q | d(g, G∖Q) ≤ R} ∪ {g ∉ Q | d(g, Q) ≤ R}.
pub fn boundary_r(q: &FiniteSet, r: u32, s: &GeneratorSet) -> FiniteSet {
    assert!(r >= 1, "boundary radius must be >= 1");
    // Exterior part: multi-source BFS out of Q.
    let near = thicken(q, r, s);
    let exterior: Vec<GroupElement> =
        near.iter().filter(|g| !q.contains(g)).copied().collect();

    // Interior part: distance from the complement. Every complement element
    // within distance R of some g ∈ Q lies in `exterior`, and shortest paths
    // stay inside `near`, so BFS from `exterior` restricted to `near` is exact.
    let mut out: Vec<GroupElement> = exterior.clone();
    let mut dist: HashMap<GroupElement, u32> =
        exterior.iter().map(|g| (*g, 0)).collect();
    let mut frontier: VecDeque<(GroupElement, u32)> =
        exterior.iter().map(|g| (*g, 0)).collect();
    while let Some((x, d)) = frontier.pop_front() {
        if d == r {
            continue;
        }
        for s_gen in s.symmetric() {
            let y = s_gen.mul(&x);
            if !near.contains(&y) || dist.contains_key(&y) {
                continue;
            }
            dist.insert(y, d + 1);
            if q.contains(&y) {
                out.push(y);
            }
            frontier.push_back((y, d + 1));
        }
    }
    FiniteSet::from_iter(out)
}

/// The Følner ratio |SQ ∖ Q| / |Q| as an exact rational.
pub fn folner_ratio(q: &FiniteSet, s: &GeneratorSet) -> Ratio<i64> {
    assert!(!q.is_empty());
    let mut outside: HashSet<GroupElement> = HashSet::new();
    for gen in s.gens() {
        for x in q.iter() {
            let y = gen.mul(x);
            if !q.contains(&y) {
                outside.insert(y);
            }
        }
    }
    Ratio::new(outside.len() as i64, q.len() as i64)
}

/// The grid patch of the symmetric tiling: elements g of the grid T_n whose
/// translate Q_n·g meets the word ball of the given radius around the
/// identity. The returned patch is closed under inverses.
pub fn tiling_grid(s: &GeneratorSet, n: u32, radius: u32) -> Vec<GroupElement> {
    let group = s.group();
    let b = ball(&group.identity(), radius, s);
    let mut patch: HashSet<GroupElement> = HashSet::new();
    for x in b.iter() {
        let g = group.tile_of(x, n);
        patch.insert(g);
        patch.insert(g.inv());
    }
    let mut out: Vec<GroupElement> = patch.into_iter().collect();
    out.sort_unstable();
    out
}

/// Temperedness ratio |⋃_{k<n} Q_k⁻¹ Q_n| / |Q_n| by direct enumeration.
/// `boxes` holds Q_1,…,Q_m in order; `n` is 1-based with n ≥ 2.
pub fn tempered_ratio(boxes: &[FolnerBox], n: usize) -> Result<Ratio<i64>> {
    assert!(n >= 2 && n <= boxes.len(), "need 2 <= n <= number of boxes");
    let qn = &boxes[n - 1].set;
    let work: usize = boxes[..n - 1].iter().map(|b| b.set.len() * qn.len()).sum();
    const WORK_LIMIT: usize = 50_000_000;
    if work > WORK_LIMIT {
        return Err(Error::SizeLimit(format!(
            "tempered_ratio enumeration of {work} products exceeds limit {WORK_LIMIT}"
        )));
    }
    let mut union: HashSet<GroupElement> = HashSet::new();
    for b in &boxes[..n - 1] {
        for q in b.set.iter() {
            let qi = q.inv();
            for r in qn.iter() {
                union.insert(qi.mul(r));
            }
        }
    }
    Ok(Ratio::new(union.len() as i64, qn.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn multiply_examples() {
        let a = GroupElement::z(&[1, 2]).mul(&GroupElement::z(&[3, -1]));
        assert_eq!(a, GroupElement::z(&[4, 1]));
        // non-commutativity of H3: the twist term c + c' + b·a'
        assert_eq!(GroupElement::h3(0, 1, 0).mul(&GroupElement::h3(1, 0, 0)), GroupElement::h3(1, 1, 1));
        assert_eq!(GroupElement::h3(1, 0, 0).mul(&GroupElement::h3(0, 1, 0)), GroupElement::h3(1, 1, 0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(GroupElement::z(&[2, 3]).inv(), GroupElement::z(&[-2, -3]));
        let g = GroupElement::h3(1, 1, 0);
        assert_eq!(g.inv(), GroupElement::h3(-1, -1, 1));
        assert!(g.mul(&g.inv()).is_identity());
        assert!(GroupId::H3.identity().inv().is_identity());
    }

    #[test]
    fn group_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for group in [GroupId::Z1, GroupId::Z2, GroupId::Z3, GroupId::H3] {
            let id = group.identity();
            for _ in 0..1000 {
                let (a, b, c) = (
                    rand_elem(&mut rng, group, 50),
                    rand_elem(&mut rng, group, 50),
                    rand_elem(&mut rng, group, 50),
                );
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                assert_eq!(a.mul(&id), a);
                assert_eq!(id.mul(&a), a);
                assert!(a.mul(&a.inv()).is_identity());
                assert!(a.inv().mul(&a).is_identity());
            }
        }
    }

    /// Plain single-sided BFS, kept independent of `word_distance`.
    fn bfs_distance(g: &GroupElement, h: &GroupElement, s: &GeneratorSet, cap: u32) -> Option<u32> {
        if g == h {
            return Some(0);
        }
        let mut seen: HashSet<GroupElement> = HashSet::from([*h]);
        let mut frontier = vec![*h];
        for d in 1..=cap {
            let mut next = Vec::new();
            for x in &frontier {
                for sg in s.symmetric() {
                    let y = sg.mul(x);
                    if y == *g {
                        return Some(d);
                    }
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        None
    }

    #[test]
    fn word_distance_examples() {
        let s1 = GeneratorSet::standard(GroupId::Z2);
        let origin = GroupId::Z2.identity();
        assert_eq!(word_distance(&origin, &GroupElement::z(&[2, 3]), &s1, 10), Some(5));
        assert_eq!(word_distance(&origin, &origin, &s1, 10), Some(0));
        // Example with loops: (1,1) is a generator, so (2,2) is two steps away.
        let s2 = GeneratorSet::z2_with_loops();
        assert_eq!(word_distance(&origin, &GroupElement::z(&[2, 2]), &s2, 10), Some(2));
        // cap sentinel
        assert_eq!(word_distance(&origin, &GroupElement::z(&[9, 9]), &s1, 4), None);
    }

    #[test]
    fn word_distance_matches_plain_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in [
            GeneratorSet::standard(GroupId::Z2),
            GeneratorSet::z2_with_loops(),
            GeneratorSet::standard(GroupId::H3),
        ] {
            for _ in 0..50 {
                let g = rand_elem(&mut rng, s.group(), 3);
                let h = rand_elem(&mut rng, s.group(), 3);
                assert_eq!(
                    word_distance(&g, &h, &s, 8),
                    bfs_distance(&g, &h, &s, 8),
                    "mismatch for {g:?},{h:?}"
                );
            }
        }
    }

    #[test]
    fn word_distance_right_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for s in [GeneratorSet::standard(GroupId::Z2), GeneratorSet::standard(GroupId::H3)] {
            for _ in 0..200 {
                let g = rand_elem(&mut rng, s.group(), 4);
                let h = rand_elem(&mut rng, s.group(), 4);
                let x = rand_elem(&mut rng, s.group(), 4);
                assert_eq!(
                    word_distance(&g.mul(&x), &h.mul(&x), &s, 8),
                    word_distance(&g, &h, &s, 8)
                );
            }
        }
    }

    #[test]
    fn boundary_z1_interval() {
        let s = GeneratorSet::standard(GroupId::Z1);
        let q = FiniteSet::from_iter((0..10).map(|x| GroupElement::z(&[x])));
        let b = boundary_r(&q, 1, &s);
        let expect =
            FiniteSet::from_iter([-1, 0, 9, 10].iter().map(|&x| GroupElement::z(&[x])));
        assert_eq!(b, expect);
    }

    #[test]
    fn boundary_z2_box_against_brute_force() {
        // For S1 the word metric is the l1 metric: use that as an oracle.
        let s = GeneratorSet::standard(GroupId::Z2);
        let mut q_elems = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                q_elems.push(GroupElement::z(&[x, y]));
            }
        }
        let q = FiniteSet::from_iter(q_elems);
        let l1 = |a: &GroupElement, b: &GroupElement| -> i32 {
            (a.coords()[0] - b.coords()[0]).abs() + (a.coords()[1] - b.coords()[1]).abs()
        };
        let mut expect = Vec::new();
        for x in -2..5 {
            for y in -2..5 {
                let g = GroupElement::z(&[x, y]);
                let in_q = q.contains(&g);
                let qualifies = if in_q {
                    // distance to the complement: scan the 5x5 superbox ring
                    let mut dmin = i32::MAX;
                    for xx in -3..6 {
                        for yy in -3..6 {
                            let h = GroupElement::z(&[xx, yy]);
                            if !q.contains(&h) {
                                dmin = dmin.min(l1(&g, &h));
                            }
                        }
                    }
                    dmin <= 1
                } else {
                    q.iter().map(|h| l1(&g, h)).min().unwrap() <= 1
                };
                if qualifies {
                    expect.push(g);
                }
            }
        }
        let b = boundary_r(&q, 1, &s);
        assert_eq!(b, FiniteSet::from_iter(expect));
        assert_eq!(b.len(), 20); // 8 border cells + 12 adjacent outside cells
    }

    #[test]
    fn boundary_singleton() {
        for s in [GeneratorSet::standard(GroupId::H3), GeneratorSet::standard(GroupId::Z2)] {
            let g = s.group().identity();
            let q = FiniteSet::singleton(g);
            let b = boundary_r(&q, 1, &s);
            let mut expect = vec![g];
            for sg in s.symmetric() {
                expect.push(sg.mul(&g));
            }
            assert_eq!(b, FiniteSet::from_iter(expect));
        }
    }

    #[test]
    fn folner_ratio_z2() {
        let s = GeneratorSet::standard(GroupId::Z2);
        let q = GroupId::Z2.folner_box(10);
        assert_eq!(q.set.len(), 100);
        assert_eq!(folner_ratio(&q.set, &s), Ratio::new(20, 100));
    }

    #[test]
    fn folner_h3_box_sizes_and_decay() {
        let s = GeneratorSet::standard(GroupId::H3);
        let q2 = GroupId::H3.folner_box(2);
        assert_eq!(q2.set.len(), 16);
        // |SQ_2 \ Q_2| = 17, enumerated
        assert_eq!(folner_ratio(&q2.set, &s), Ratio::new(17, 16));
        let mut prev = Ratio::new(i64::MAX, 1);
        let mut first = Ratio::new(0, 1);
        let mut last = Ratio::new(0, 1);
        for n in 2..=8 {
            let q = GroupId::H3.folner_box(n);
            let r = folner_ratio(&q.set, &s);
            assert!(r <= prev, "ratio increased at n={n}");
            prev = r;
            if n == 2 {
                first = r;
            }
            last = r;
        }
        assert!(last < first / 2);
    }

    #[test]
    fn folner_boundary_ratio_decay() {
        // |∂^R Q_n|/|Q_n| falls below half its n=2 value: by n=8 for Z², by n=6 for H₃.
        for radius in [1u32, 2] {
            for (group, n_final) in [(GroupId::Z2, 8u32), (GroupId::H3, 6u32)] {
                let s = GeneratorSet::standard(group);
                let ratio = |n: u32| {
                    let q = group.folner_box(n);
                    boundary_r(&q.set, radius, &s).len() as f64 / q.set.len() as f64
                };
                assert!(ratio(n_final) < ratio(2) / 2.0, "{group:?} R={radius}");
            }
        }
    }

    #[test]
    fn tiling_grid_z1() {
        let s = GeneratorSet::standard(GroupId::Z1);
        let grid = tiling_grid(&s, 3, 4);
        let expect: Vec<GroupElement> =
            [-6, -3, 0, 3, 6].iter().map(|&x| GroupElement::z(&[x])).collect();
        assert_eq!(grid, expect);
    }

    #[test]
    fn tiling_grid_h3_members() {
        let s = GeneratorSet::standard(GroupId::H3);
        let grid = tiling_grid(&s, 2, 3);
        for g in [GroupElement::h3(2, 0, 0), GroupElement::h3(-2, 0, 0), GroupElement::h3(0, 0, 4)] {
            assert!(grid.contains(&g), "missing {g:?}");
        }
    }

    #[test]
    fn tiling_disjoint_cover() {
        // Every ball element lies in exactly one translate Q_n·g, and the
        // patch is inverse-closed.
        for (s, radius) in [
            (GeneratorSet::standard(GroupId::H3), 6u32),
            (GeneratorSet::standard(GroupId::Z2), 6u32),
        ] {
            for n in [2u32, 3] {
                let group = s.group();
                let q = group.folner_box(n);
                let b = ball(&group.identity(), radius, &s);
                let grid = tiling_grid(&s, n, radius);
                for g in &grid {
                    assert!(grid.contains(&g.inv()), "patch not inverse-closed");
                }
                let mut covered: HashMap<GroupElement, usize> = HashMap::new();
                for g in &grid {
                    for q_el in q.set.iter() {
                        *covered.entry(q_el.mul(g)).or_insert(0) += 1;
                    }
                }
                for x in b.iter() {
                    assert_eq!(covered.get(x), Some(&1), "element {x:?} not covered exactly once");
                }
            }
        }
    }

    #[test]
    fn tile_of_consistency_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for group in [GroupId::Z2, GroupId::H3] {
            for n in [2u32, 3, 5] {
                let q = group.folner_box(n);
                for _ in 0..200 {
                    let x = rand_elem(&mut rng, group, 40);
                    let g = group.tile_of(&x, n);
                    // x ∈ Q_n·g, i.e. x·g⁻¹ ∈ Q_n
                    assert!(q.set.contains(&x.mul(&g.inv())), "{x:?} not in tile {g:?}");
                }
            }
        }
    }

    #[test]
    fn tempered_ratios() {
        // Z¹: Q_1⁻¹Q_2 = {0,1}, ratio 1.
        let z1: Vec<FolnerBox> = (1..=2).map(|n| GroupId::Z1.folner_box(n)).collect();
        assert_eq!(tempered_ratio(&z1, 2).unwrap(), Ratio::new(1, 1));

        // Z²: the union telescopes to the cube [-(n-2), n-1]², ratio (2n-2)²/n².
        let z2: Vec<FolnerBox> = (1..=5).map(|n| GroupId::Z2.folner_box(n)).collect();
        for n in 2..=5usize {
            let r = tempered_ratio(&z2, n).unwrap();
            let expect = Ratio::new((2 * n as i64 - 2).pow(2), (n as i64).pow(2));
            assert_eq!(r, expect);
            assert!(r <= Ratio::new(4, 1));
        }

        // H₃: finite and uniformly bounded at small n.
        let h3: Vec<FolnerBox> = (1..=4).map(|n| GroupId::H3.folner_box(n)).collect();
        for n in 2..=4usize {
            let r = tempered_ratio(&h3, n).unwrap();
            assert!(r > Ratio::new(0, 1) && r <= Ratio::new(8, 1), "n={n} ratio {r}");
        }
    }

    #[test]
    fn keys_are_canonical() {
        assert_eq!(GroupElement::h3(1, 0, -2).key(), "H3:1:0:-2");
        assert_eq!(GroupElement::z(&[3, -4]).key(), "Z2:3:-4");
        assert_eq!(GroupId::Z1.identity().key(), "Z1:0");
    }
}
