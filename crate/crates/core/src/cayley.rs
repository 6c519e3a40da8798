//! Cayley graphs and the walk's shift operator.
//!
//! Edge `j` leaves vertex `g` towards `h_j · g` (left multiplication). Composite
//! walk indices are vertex-major: `idx(v, j) = v * d + j`.

use std::collections::VecDeque;

use crate::group::{FiniteGroup, GroupElement, GroupError, DEFAULT_ENUMERATION_CAP};

pub const MAX_HYPERCUBE_DIM: u32 = 12;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("generating set is empty")]
    Empty,
    #[error("generator {0} is the identity")]
    IdentityGenerator(usize),
    #[error("generators {0} and {1} are equal")]
    DuplicateGenerator(usize, usize),
    #[error("graph is disconnected: vertex {vertex} ({label}) is unreachable from the identity")]
    Disconnected { vertex: usize, label: String },
    #[error("hypercube dimension must be in 1..={MAX_HYPERCUBE_DIM}, got {0}")]
    DimensionOutOfRange(u32),
}

/// Ordered generators `h_0 .. h_{d-1}`; the position is the edge label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    generators: Vec<GroupElement>,
}

impl GeneratingSet {
    pub fn new(group: &FiniteGroup, generators: Vec<GroupElement>) -> Result<Self, CayleyError> {
        if generators.is_empty() {
            return Err(CayleyError::Empty);
        }
        let e = group.identity();
        for (j, h) in generators.iter().enumerate() {
            if !group.contains(h) {
                return Err(GroupError::Mismatch { element: h.to_string(), group: group.to_string() }.into());
            }
            if *h == e {
                return Err(CayleyError::IdentityGenerator(j));
            }
            if let Some(i) = generators[..j].iter().position(|x| x == h) {
                return Err(CayleyError::DuplicateGenerator(i, j));
            }
        }
        Ok(GeneratingSet { generators })
    }

    pub fn degree(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn get(&self, j: usize) -> &GroupElement {
        &self.generators[j]
    }
}

#[derive(Clone, Debug)]
pub struct CayleyGraph {
    group: FiniteGroup,
    gens: GeneratingSet,
    elements: Vec<GroupElement>,
    /// `neighbors[v * d + j]` is the vertex reached from `v` along edge `j`.
    neighbors: Vec<usize>,
}

/// The `d`-dimensional hypercube: `Z_2^d` with generators `e_j = 2^j` in ascending order.
pub fn build_hypercube(d: u32) -> Result<CayleyGraph, CayleyError> {
    if d == 0 || d > MAX_HYPERCUBE_DIM {
        return Err(CayleyError::DimensionOutOfRange(d));
    }
    let group = FiniteGroup::z2_pow(d)?;
    let gens = (0..d).map(|j| group.from_bits(1 << j)).collect::<Result<Vec<_>, _>>()?;
    let gens = GeneratingSet::new(&group, gens)?;
    build_cayley(group, gens)
}

pub fn build_cayley(group: FiniteGroup, gens: GeneratingSet) -> Result<CayleyGraph, CayleyError> {
    let elements = group.enumerate_with_cap(DEFAULT_ENUMERATION_CAP)?;
    let d = gens.degree();
    let mut neighbors = Vec::with_capacity(elements.len() * d);
    for g in &elements {
        for h in gens.generators() {
            neighbors.push(group.compose(h, g)?.index());
        }
    }
    let graph = CayleyGraph { group, gens, elements, neighbors };

    let dist = graph.bfs(graph.identity_vertex());
    if let Some(v) = dist.iter().position(|x| x.is_none()) {
        return Err(CayleyError::Disconnected { vertex: v, label: graph.elements[v].to_string() });
    }
    if !graph.is_inverse_closed() {
        log::warn!("generating set of {} is not inverse-closed; the Cayley graph is directed", graph.group);
    }
    Ok(graph)
}

impl CayleyGraph {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn generating_set(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn n_vertices(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.gens.degree()
    }

    /// Dimension `|G| · d` of the walk's Hilbert space.
    pub fn dim(&self) -> usize {
        self.n_vertices() * self.degree()
    }

    #[inline]
    pub fn neighbor(&self, v: usize, j: usize) -> usize {
        self.neighbors[v * self.degree() + j]
    }

    pub fn element(&self, v: usize) -> &GroupElement {
        &self.elements[v]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn identity_vertex(&self) -> usize {
        self.group.identity().index()
    }

    /// Vertex where absorbing measurements happen by default: `2^d - 1` on
    /// hypercubes, the identity element otherwise.
    pub fn default_final_vertex(&self) -> usize {
        match self.group.kind() {
            crate::group::GroupKind::Z2Pow(_) => self.n_vertices() - 1,
            _ => self.identity_vertex(),
        }
    }

    pub fn is_inverse_closed(&self) -> bool {
        self.gens.generators().iter().all(|h| {
            let inv = self.group.inverse(h).expect("generator belongs to group");
            self.gens.generators().contains(&inv)
        })
    }

    fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_vertices()];
        let mut queue = VecDeque::from([source]);
        dist[source] = Some(0);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for j in 0..self.degree() {
                let w = self.neighbor(v, j);
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Maximum BFS eccentricity over all vertices.
    pub fn diameter(&self) -> usize {
        (0..self.n_vertices())
            .map(|v| self.bfs(v).into_iter().map(|d| d.expect("connected graph")).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn shift_map(&self) -> ShiftMap {
        let d = self.degree();
        let mapping = (0..self.dim()).map(|idx| self.neighbors[idx] * d + idx % d).collect();
        ShiftMap { mapping, degree: d }
    }
}

/// The shift operator as a permutation of composite indices: `(v, j) ↦ (h_j · g_v, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftMap {
    mapping: Vec<usize>,
    degree: usize,
}

impl ShiftMap {
    #[inline]
    pub fn apply(&self, idx: usize) -> usize {
        self.mapping[idx]
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> ShiftMap {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &p) in self.mapping.iter().enumerate() {
            inv[p] = i;
        }
        ShiftMap { mapping: inv, degree: self.degree }
    }

    pub fn is_permutation(&self) -> bool {
        let mut sorted = self.mapping.clone();
        sorted.sort_unstable();
        sorted.iter().enumerate().all(|(i, &x)| i == x)
    }
}
