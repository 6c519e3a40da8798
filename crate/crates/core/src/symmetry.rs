//! Joint vertex × coin permutation symmetries of the walk.
//!
//! A joint permutation `P = P_v ⊗ P_c` is a shift automorphism when
//! `P S P^dagger = S`. It is a walk symmetry when it also fixes the coin,
//! `P_c C P_c^dagger = C`. Candidates come from the Cayley structure: right
//! translations `v ↦ v · g`, and group automorphisms that permute the
//! generating set (conjugations in general, plus coordinate permutations on
//! `Z_2^d`). The set is then closed under composition. The result is a
//! certified subgroup of the shift automorphisms. It is not claimed to be
//! the whole group.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::cayley::CayleyGraph;
use crate::coins::CoinOperator;
use crate::group::GroupKind;
use crate::perm::Perm;
use crate::scalar::Real;

pub const MAX_CANDIDATE_ORDER: usize = 120;
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("group order {0} exceeds the candidate-generation limit {MAX_CANDIDATE_ORDER}")]
    GroupTooLarge(usize),
    #[error("closure exceeded {0} elements")]
    ClosureCapExceeded(usize),
    #[error("joint permutation acts on {vertices} vertices and {coins} coin states, graph has {n_vertices} and {degree}")]
    SizeMismatch { vertices: usize, coins: usize, n_vertices: usize, degree: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryLabel {
    /// `v ↦ v · g` for the vertex `g`.
    RightTranslation(usize),
    /// Group automorphism: conjugation by the vertex `σ`, or a coordinate permutation of `Z_2^d`.
    Conjugation(usize),
    CoordinatePermutation(Perm),
    /// Product of other symmetries found during closure.
    Composite,
    Explicit,
}

#[derive(Clone, Debug)]
pub struct JointPermutation {
    pub vertex_perm: Perm,
    pub coin_perm: Perm,
    pub label: SymmetryLabel,
}

impl PartialEq for JointPermutation {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_perm == other.vertex_perm && self.coin_perm == other.coin_perm
    }
}

impl Eq for JointPermutation {}

impl fmt::Display for JointPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertices {:?} coins {:?}", self.vertex_perm.images(), self.coin_perm.images())
    }
}

impl JointPermutation {
    pub fn new(vertex_perm: Perm, coin_perm: Perm) -> Self {
        JointPermutation { vertex_perm, coin_perm, label: SymmetryLabel::Explicit }
    }

    pub fn identity(n_vertices: usize, degree: usize) -> Self {
        JointPermutation::new(Perm::identity(n_vertices), Perm::identity(degree))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &JointPermutation) -> JointPermutation {
        JointPermutation {
            vertex_perm: self.vertex_perm.compose(&other.vertex_perm),
            coin_perm: self.coin_perm.compose(&other.coin_perm),
            label: SymmetryLabel::Composite,
        }
    }

    pub fn inverse(&self) -> JointPermutation {
        JointPermutation {
            vertex_perm: self.vertex_perm.inverse(),
            coin_perm: self.coin_perm.inverse(),
            label: SymmetryLabel::Composite,
        }
    }

    /// Image of the composite index `v * d + j`.
    pub fn apply_index(&self, idx: usize) -> usize {
        let d = self.coin_perm.len();
        self.vertex_perm.apply(idx / d) * d + self.coin_perm.apply(idx % d)
    }

    fn key(&self) -> (Perm, Perm) {
        (self.vertex_perm.clone(), self.coin_perm.clone())
    }
}

fn sizes_match(p: &JointPermutation, graph: &CayleyGraph) -> bool {
    p.vertex_perm.len() == graph.n_vertices() && p.coin_perm.len() == graph.degree()
}

/// `π(h_j · v) = h_{σ(j)} · π(v)` for all `v, j`, i.e. `P S P^dagger = S`.
pub fn is_shift_automorphism(p: &JointPermutation, graph: &CayleyGraph) -> bool {
    if !sizes_match(p, graph) {
        return false;
    }
    (0..graph.n_vertices()).all(|v| {
        (0..graph.degree()).all(|j| {
            p.vertex_perm.apply(graph.neighbor(v, j)) == graph.neighbor(p.vertex_perm.apply(v), p.coin_perm.apply(j))
        })
    })
}

pub fn is_walk_symmetry<R: Real>(p: &JointPermutation, graph: &CayleyGraph, coin: &CoinOperator<R>, tol: f64) -> bool {
    coin.dim() == p.coin_perm.len() && is_shift_automorphism(p, graph) && coin.is_fixed_by(&p.coin_perm, tol)
}

fn right_translations(graph: &CayleyGraph) -> Vec<JointPermutation> {
    let group = graph.group();
    let els = graph.elements();
    els.iter()
        .map(|g| {
            let images = els.iter().map(|v| group.compose(v, g).expect("same group").index()).collect();
            JointPermutation {
                vertex_perm: Perm::from_images(images).expect("translation is a bijection"),
                coin_perm: Perm::identity(graph.degree()),
                label: SymmetryLabel::RightTranslation(g.index()),
            }
        })
        .collect()
}

/// Conjugations `x ↦ σ x σ^{-1}` that map the generating set onto itself.
fn generator_preserving_conjugations(graph: &CayleyGraph) -> Vec<JointPermutation> {
    let group = graph.group();
    let els = graph.elements();
    let gens = graph.generating_set().generators();
    let mut out = Vec::new();
    for sigma in els {
        let inv = group.inverse(sigma).expect("same group");
        let conj = |x| group.compose(&group.compose(sigma, x).expect("same group"), &inv).expect("same group");
        let coin_images: Option<Vec<usize>> =
            gens.iter().map(|h| { let c = conj(h); gens.iter().position(|x| *x == c) }).collect();
        let Some(coin_images) = coin_images else { continue };
        let vertex_images = els.iter().map(|v| conj(v).index()).collect();
        out.push(JointPermutation {
            vertex_perm: Perm::from_images(vertex_images).expect("conjugation is a bijection"),
            coin_perm: Perm::from_images(coin_images).expect("generators map bijectively"),
            label: SymmetryLabel::Conjugation(sigma.index()),
        });
    }
    out
}

/// Bit permutations of `Z_2^d`; generator `e_j` maps to `e_{τ(j)}`.
fn coordinate_permutations(graph: &CayleyGraph, d: u32) -> Vec<JointPermutation> {
    let d = d as usize;
    // generators are e_0 .. e_{d-1} only when the graph is the standard hypercube
    let gens = graph.generating_set().generators();
    let standard = gens.len() == d && gens.iter().enumerate().all(|(j, h)| h.bits() == Some(1 << j));
    if !standard {
        return Vec::new();
    }
    Perm::all(d)
        .into_iter()
        .map(|tau| {
            let images = (0..graph.n_vertices())
                .map(|x| (0..d).filter(|&j| x >> j & 1 == 1).map(|j| 1usize << tau.apply(j)).sum())
                .collect();
            JointPermutation {
                vertex_perm: Perm::from_images(images).expect("bit permutation is a bijection"),
                coin_perm: tau.clone(),
                label: SymmetryLabel::CoordinatePermutation(tau),
            }
        })
        .collect()
}

/// Structured shift-automorphism candidates, each verified with [`is_shift_automorphism`].
pub fn generate_candidates(graph: &CayleyGraph) -> Result<Vec<JointPermutation>, SymmetryError> {
    let order = graph.n_vertices();
    if order > MAX_CANDIDATE_ORDER {
        return Err(SymmetryError::GroupTooLarge(order));
    }
    let mut out = right_translations(graph);
    out.extend(generator_preserving_conjugations(graph));
    if let GroupKind::Z2Pow(d) = graph.group().kind() {
        out.extend(coordinate_permutations(graph, *d));
    }
    let mut seen = HashSet::new();
    out.retain(|p| {
        let ok = is_shift_automorphism(p, graph);
        if !ok {
            log::warn!("discarding candidate {p}: not a shift automorphism");
        }
        ok && seen.insert(p.key())
    });
    Ok(out)
}

/// Smallest set containing `generators` and closed under composition.
pub fn close_under_composition(
    generators: &[JointPermutation],
    n_vertices: usize,
    degree: usize,
    cap: usize,
) -> Result<Vec<JointPermutation>, SymmetryError> {
    let identity = JointPermutation::identity(n_vertices, degree);
    let mut seen: HashSet<(Perm, Perm)> = HashSet::from([identity.key()]);
    let mut elements = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    for g in generators {
        if seen.insert(g.key()) {
            elements.push(g.clone());
            queue.push_back(g.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.compose(&x);
            if seen.insert(y.key()) {
                if elements.len() >= cap {
                    return Err(SymmetryError::ClosureCapExceeded(cap));
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(elements)
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    /// Direction-preserving automorphisms (identity coin permutation).
    pub a1: Vec<JointPermutation>,
    /// Joint automorphisms with a nontrivial coin permutation.
    pub a2_extra: Vec<JointPermutation>,
    /// Joint automorphisms whose coin permutation also fixes the coin; contains `a1`.
    pub w2: Vec<JointPermutation>,
}

impl SymmetryReport {
    pub fn a1_count(&self) -> usize {
        self.a1.len()
    }

    pub fn a2_count(&self) -> usize {
        self.a1.len() + self.a2_extra.len()
    }

    pub fn w2_count(&self) -> usize {
        self.w2.len()
    }

    /// All joint automorphisms found (`a1` followed by `a2_extra`).
    pub fn a2(&self) -> impl Iterator<Item = &JointPermutation> {
        self.a1.iter().chain(self.a2_extra.iter())
    }
}

pub fn classify<R: Real>(graph: &CayleyGraph, coin: &CoinOperator<R>, cps_tol: f64) -> Result<SymmetryReport, SymmetryError> {
    classify_with_cap(graph, coin, cps_tol, DEFAULT_CLOSURE_CAP)
}

pub fn classify_with_cap<R: Real>(
    graph: &CayleyGraph,
    coin: &CoinOperator<R>,
    cps_tol: f64,
    cap: usize,
) -> Result<SymmetryReport, SymmetryError> {
    if coin.dim() != graph.degree() {
        return Err(SymmetryError::SizeMismatch {
            vertices: graph.n_vertices(),
            coins: coin.dim(),
            n_vertices: graph.n_vertices(),
            degree: graph.degree(),
        });
    }
    let candidates = generate_candidates(graph)?;
    let mut all = close_under_composition(&candidates, graph.n_vertices(), graph.degree(), cap)?;
    // keep the provenance label when the element is itself a candidate
    for p in &mut all {
        if let Some(c) = candidates.iter().find(|c| *c == p) {
            p.label = c.label.clone();
        }
    }
    all.sort_by(|a, b| a.coin_perm.cmp(&b.coin_perm).then_with(|| a.vertex_perm.cmp(&b.vertex_perm)));
    let w2 = all.iter().filter(|p| coin.is_fixed_by(&p.coin_perm, cps_tol)).cloned().collect();
    let (a1, a2_extra) = all.into_iter().partition(|p| p.coin_perm.is_identity());
    Ok(SymmetryReport { a1, a2_extra, w2 })
}
