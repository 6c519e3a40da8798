//! Finite groups used as Cayley-graph vertex sets.
//!
//! Two concrete families are built in: `Z_2^d` (bitstrings under XOR) and the
//! symmetric group `S_n` (permutations in one-line notation). Arbitrary small
//! groups can be supplied as an explicit composition table.
//!
//! Permutation composition follows `(g ∘ h)(i) = g(h(i))`: apply `h` first.
//! Every group enumerates its elements in a fixed canonical order and an
//! element's `index` is its position in that order.

use std::fmt;
use std::sync::Arc;

use crate::perm::next_lexicographic;

/// Default bound on `|G|` for [`FiniteGroup::enumerate`].
pub const DEFAULT_ENUMERATION_CAP: usize = 10_080;

const MAX_Z2_DIM: u32 = 40;
const MAX_SYMMETRIC_N: usize = 20;
const EXHAUSTIVE_AXIOM_CHECK: usize = 120;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {element} does not belong to {group}")]
    Mismatch { element: String, group: String },
    #[error("group order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid composition table: {0}")]
    InvalidTable(String),
}

/// Multiplication table of an explicitly given group; `mul[a * order + b]` is `a · b`.
#[derive(Clone, PartialEq, Eq)]
pub struct CompositionTable {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
}

impl CompositionTable {
    /// Validates the group axioms. Associativity is checked on every triple for
    /// orders up to 120 and on a deterministic sample of triples above that.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        let mut mul = Vec::with_capacity(order * order);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::InvalidTable(format!(
                    "row {a} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= order) {
                return Err(GroupError::InvalidTable(format!("entry {bad} out of range in row {a}")));
            }
            mul.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| mul[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| GroupError::InvalidTable(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if order <= EXHAUSTIVE_AXIOM_CHECK {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(GroupError::InvalidTable(format!(
                                "associativity fails on ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut state = 0x9e37_79b9_7f4a_7c15_u64;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % order as u64) as usize
            };
            for _ in 0..100_000 {
                let (a, b, c) = (next(), next(), next());
                if !assoc(a, b, c) {
                    return Err(GroupError::InvalidTable(format!(
                        "associativity fails on ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(CompositionTable { order, mul, identity, inverses })
    }

    fn compose(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }
}

impl fmt::Debug for CompositionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositionTable").field("order", &self.order).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// `Z_2^d`: bitstrings of length `d` under XOR.
    Z2Pow(u32),
    /// `S_n` acting on `{1..n}`.
    Symmetric(usize),
    Table(Arc<CompositionTable>),
}

/// Storage form of a group element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Canonical {
    /// Bit `j` set means generator `e_j = 2^j` is present.
    Bits { value: u64, width: u32 },
    /// One-line notation over `{1..n}`.
    OneLine(Vec<usize>),
    Table { index: usize, order: usize },
}

impl fmt::Debug for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Canonical::Bits { value, width } => {
                for j in (0..*width).rev() {
                    write!(f, "{}", (value >> j) & 1)?;
                }
                Ok(())
            }
            Canonical::OneLine(p) => {
                write!(f, "(")?;
                for (i, x) in p.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Canonical::Table { index, .. } => write!(f, "g{index}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    canonical: Canonical,
    index: usize,
}

impl GroupElement {
    pub fn canonical(&self) -> &Canonical {
        &self.canonical
    }

    /// Rank in the owning group's canonical enumeration.
    pub fn index(&self) -> usize {
        self.index
    }

    /// One-line tuple for `S_n` elements.
    pub fn one_line(&self) -> Option<&[usize]> {
        match &self.canonical {
            Canonical::OneLine(p) => Some(p),
            _ => None,
        }
    }

    pub fn bits(&self) -> Option<u64> {
        match self.canonical {
            Canonical::Bits { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.canonical, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    kind: GroupKind,
    order: usize,
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Z2Pow(d) => write!(f, "Z2^{d}"),
            GroupKind::Symmetric(n) => write!(f, "S{n}"),
            GroupKind::Table(t) => write!(f, "table group of order {}", t.order),
        }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl FiniteGroup {
    pub fn z2_pow(d: u32) -> Result<Self, GroupError> {
        if d == 0 || d > MAX_Z2_DIM {
            return Err(GroupError::InvalidParameter(format!("Z2^d needs 1 <= d <= {MAX_Z2_DIM}, got {d}")));
        }
        Ok(FiniteGroup { kind: GroupKind::Z2Pow(d), order: 1usize << d })
    }

    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > MAX_SYMMETRIC_N {
            return Err(GroupError::InvalidParameter(format!(
                "S_n needs 1 <= n <= {MAX_SYMMETRIC_N}, got {n}"
            )));
        }
        Ok(FiniteGroup { kind: GroupKind::Symmetric(n), order: factorial(n) })
    }

    pub fn from_table(table: CompositionTable) -> Self {
        let order = table.order;
        FiniteGroup { kind: GroupKind::Table(Arc::new(table)), order }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::Z2Pow(d) => self.bits_element(0, *d),
            GroupKind::Symmetric(n) => GroupElement { canonical: Canonical::OneLine((1..=*n).collect()), index: 0 },
            GroupKind::Table(t) => self.table_element(t.identity),
        }
    }

    fn bits_element(&self, value: u64, width: u32) -> GroupElement {
        GroupElement { canonical: Canonical::Bits { value, width }, index: value as usize }
    }

    fn table_element(&self, index: usize) -> GroupElement {
        GroupElement { canonical: Canonical::Table { index, order: self.order }, index }
    }

    fn perm_element(&self, one_line: Vec<usize>) -> GroupElement {
        let index = lehmer_rank(&one_line);
        GroupElement { canonical: Canonical::OneLine(one_line), index }
    }

    /// True if `g` is an element of this group (kind and size agree, index consistent).
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.kind, &g.canonical) {
            (GroupKind::Z2Pow(d), Canonical::Bits { value, width }) => {
                width == d && *value < (1u64 << d) && g.index == *value as usize
            }
            (GroupKind::Symmetric(n), Canonical::OneLine(p)) => {
                p.len() == *n && is_one_line_perm(p) && lehmer_rank(p) == g.index
            }
            (GroupKind::Table(t), Canonical::Table { index, order }) => {
                *order == t.order && *index < t.order && g.index == *index
            }
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::Mismatch { element: g.to_string(), group: self.to_string() })
        }
    }

    /// `g ∘ h` under the group law.
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (&self.kind, &g.canonical, &h.canonical) {
            (GroupKind::Z2Pow(d), Canonical::Bits { value: a, .. }, Canonical::Bits { value: b, .. }) => {
                self.bits_element(a ^ b, *d)
            }
            (GroupKind::Symmetric(_), Canonical::OneLine(a), Canonical::OneLine(b)) => {
                self.perm_element(b.iter().map(|&i| a[i - 1]).collect())
            }
            (GroupKind::Table(t), _, _) => self.table_element(t.compose(g.index, h.index)),
            _ => unreachable!("membership checked above"),
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(match (&self.kind, &g.canonical) {
            (GroupKind::Z2Pow(_), _) => g.clone(),
            (GroupKind::Symmetric(n), Canonical::OneLine(p)) => {
                let mut inv = vec![0; *n];
                for (i, &x) in p.iter().enumerate() {
                    inv[x - 1] = i + 1;
                }
                self.perm_element(inv)
            }
            (GroupKind::Table(t), _) => self.table_element(t.inverses[g.index]),
            _ => unreachable!("membership checked above"),
        })
    }

    /// Element at position `index` of the canonical enumeration.
    pub fn element(&self, index: usize) -> Result<GroupElement, GroupError> {
        if index >= self.order {
            return Err(GroupError::InvalidElement(format!("index {index} out of range for {self}")));
        }
        Ok(match &self.kind {
            GroupKind::Z2Pow(d) => self.bits_element(index as u64, *d),
            GroupKind::Symmetric(n) => self.perm_element(lehmer_unrank(index, *n)),
            GroupKind::Table(_) => self.table_element(index),
        })
    }

    pub fn from_bits(&self, value: u64) -> Result<GroupElement, GroupError> {
        match self.kind {
            GroupKind::Z2Pow(d) if value < (1u64 << d) => Ok(self.bits_element(value, d)),
            _ => Err(GroupError::InvalidElement(format!("bitstring {value} not in {self}"))),
        }
    }

    /// Parses a one-line tuple over `{1..n}`.
    pub fn from_one_line(&self, one_line: &[usize]) -> Result<GroupElement, GroupError> {
        match self.kind {
            GroupKind::Symmetric(n) if one_line.len() == n && is_one_line_perm(one_line) => {
                Ok(self.perm_element(one_line.to_vec()))
            }
            _ => Err(GroupError::InvalidElement(format!("{one_line:?} is not an element of {self}"))),
        }
    }

    pub fn enumerate(&self) -> Result<Vec<GroupElement>, GroupError> {
        self.enumerate_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    /// All elements in canonical order: ascending integer value for `Z_2^d`,
    /// lexicographic one-line order for `S_n`, table order otherwise.
    pub fn enumerate_with_cap(&self, cap: usize) -> Result<Vec<GroupElement>, GroupError> {
        if self.order > cap {
            return Err(GroupError::CapExceeded { order: self.order, cap });
        }
        Ok(match &self.kind {
            GroupKind::Z2Pow(d) => (0..self.order as u64).map(|v| self.bits_element(v, *d)).collect(),
            GroupKind::Symmetric(n) => {
                let mut cur: Vec<usize> = (1..=*n).collect();
                let mut out = Vec::with_capacity(self.order);
                loop {
                    out.push(GroupElement { canonical: Canonical::OneLine(cur.clone()), index: out.len() });
                    if !next_lexicographic(&mut cur) {
                        break;
                    }
                }
                out
            }
            GroupKind::Table(_) => (0..self.order).map(|i| self.table_element(i)).collect(),
        })
    }
}

fn is_one_line_perm(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| {
        if x == 0 || x > p.len() || seen[x - 1] {
            false
        } else {
            seen[x - 1] = true;
            true
        }
    })
}

/// Lexicographic rank of a one-line permutation over `{1..n}`.
fn lehmer_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

fn lehmer_unrank(mut rank: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<usize> = (1..=n).collect();
    digits.into_iter().map(|k| pool.remove(k)).collect()
}
