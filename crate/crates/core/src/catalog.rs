//! The eight reference graphs: hypercubes of dimension 3–5 and Cayley graphs
//! of `S_3` and `S_4` with transposition generating sets.

use std::fmt;
use std::str::FromStr;

use crate::cayley::{build_cayley, build_hypercube, CayleyError, CayleyGraph, GeneratingSet};
use crate::group::FiniteGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogGraph {
    Cube3,
    Cube4,
    Cube5,
    /// `S_3` with `{(2,1,3), (3,2,1)}`: a hexagon.
    S3Two,
    /// `S_3` with all three transpositions.
    S3Three,
    /// `S_4` with `{(2,1,3,4), (3,2,1,4), (1,4,3,2)}`.
    S4H1,
    /// `S_4` with `{(2,1,3,4), (3,2,1,4), (4,2,3,1)}`.
    S4H2,
    /// `S_4` with `{(2,1,3,4), (3,2,1,4), (1,2,4,3), (1,3,2,4)}`.
    S4Four,
}

impl CatalogGraph {
    pub const ALL: [CatalogGraph; 8] = [
        CatalogGraph::Cube3,
        CatalogGraph::Cube4,
        CatalogGraph::Cube5,
        CatalogGraph::S3Two,
        CatalogGraph::S3Three,
        CatalogGraph::S4H1,
        CatalogGraph::S4H2,
        CatalogGraph::S4Four,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CatalogGraph::Cube3 => "cube3",
            CatalogGraph::Cube4 => "cube4",
            CatalogGraph::Cube5 => "cube5",
            CatalogGraph::S3Two => "s3-2",
            CatalogGraph::S3Three => "s3-3",
            CatalogGraph::S4H1 => "s4-h1",
            CatalogGraph::S4H2 => "s4-h2",
            CatalogGraph::S4Four => "s4-4",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            CatalogGraph::Cube3 => "3D cube",
            CatalogGraph::Cube4 => "4D hypercube",
            CatalogGraph::Cube5 => "5D hypercube",
            CatalogGraph::S3Two => "S3, H = {(1,2), (1,3)}",
            CatalogGraph::S3Three => "S3, H = {(1,2), (1,3), (2,3)}",
            CatalogGraph::S4H1 => "S4, H1 = {(1,2), (1,3), (2,4)}",
            CatalogGraph::S4H2 => "S4, H2 = {(1,2), (1,3), (1,4)}",
            CatalogGraph::S4Four => "S4, H = {(1,2), (1,3), (3,4), (2,3)}",
        }
    }

    /// Generators in one-line notation (empty for hypercubes).
    pub fn one_line_generators(self) -> &'static [&'static [usize]] {
        match self {
            CatalogGraph::Cube3 | CatalogGraph::Cube4 | CatalogGraph::Cube5 => &[],
            CatalogGraph::S3Two => &[&[2, 1, 3], &[3, 2, 1]],
            CatalogGraph::S3Three => &[&[2, 1, 3], &[3, 2, 1], &[1, 3, 2]],
            CatalogGraph::S4H1 => &[&[2, 1, 3, 4], &[3, 2, 1, 4], &[1, 4, 3, 2]],
            CatalogGraph::S4H2 => &[&[2, 1, 3, 4], &[3, 2, 1, 4], &[4, 2, 3, 1]],
            CatalogGraph::S4Four => &[&[2, 1, 3, 4], &[3, 2, 1, 4], &[1, 2, 4, 3], &[1, 3, 2, 4]],
        }
    }

    pub fn build(self) -> Result<CayleyGraph, CayleyError> {
        match self {
            CatalogGraph::Cube3 => build_hypercube(3),
            CatalogGraph::Cube4 => build_hypercube(4),
            CatalogGraph::Cube5 => build_hypercube(5),
            _ => {
                let gens = self.one_line_generators();
                let group = FiniteGroup::symmetric(gens[0].len())?;
                let elements = gens.iter().map(|g| group.from_one_line(g)).collect::<Result<Vec<_>, _>>()?;
                let set = GeneratingSet::new(&group, elements)?;
                build_cayley(group, set)
            }
        }
    }
}

impl fmt::Display for CatalogGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogGraph {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CatalogGraph::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown graph '{s}'"))
    }
}
