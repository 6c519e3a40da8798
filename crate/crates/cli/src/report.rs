//! Output artifacts and their human / CSV / JSON renderings.
//!
//! Every rendering is a pure function of the artifact, so identical inputs
//! give byte-identical files. Reals are printed with 12 significant digits.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Human => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" => Ok(Format::Human),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// 12 significant digits; plain notation for moderate exponents, scientific otherwise.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if (-5..12).contains(&exp) {
        let out = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        out.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        let m = format!("{}.{}", &digits[..1], &digits[1..]);
        format!("{}e{exp}", m.trim_end_matches('0').trim_end_matches('.'))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Real rounded to 12 significant digits, for JSON numbers.
pub fn round_real(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("round trip")
    } else {
        x
    }
}

/// Provenance recorded at the top of every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub command: String,
    pub graph: String,
    pub coin: String,
    pub seed: u64,
    pub cluster_tol: f64,
    pub rank_tol: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub final_set: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
}

impl Meta {
    fn header_line(&self) -> String {
        let mut s = format!(
            "# qwalk {} graph={} coin={} seed={} cluster_tol={} rank_tol={}",
            self.command,
            self.graph,
            self.coin,
            self.seed,
            fmt_real(self.cluster_tol),
            fmt_real(self.rank_tol)
        );
        if !self.final_set.is_empty() {
            let _ = write!(s, " final_set={{{}}}", self.final_set.join(" "));
        }
        if !self.generators.is_empty() {
            let _ = write!(s, " generators=[{}]", self.generators.join("; "));
        }
        s
    }

    fn json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        v["cluster_tol"] = json!(round_real(self.cluster_tol));
        v["rank_tol"] = json!(round_real(self.rank_tol));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub m_k: usize,
    pub k: usize,
    pub v_k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AccountingError {
    #[error("sum of m_k * k is {got}, expected |H| = {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("sum of m_k * |V_k| is {got}, expected |V| = {expected}")]
    Iht { got: usize, expected: usize },
}

/// One decomposition table: eigenspace rows `(m_k, k, |V_k|)` with totals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableArtifact {
    pub graph: String,
    pub graph_title: String,
    pub coin: String,
    pub rows: Vec<Row>,
    pub hilbert_dim: usize,
    pub iht_dim: usize,
    pub final_set: Vec<String>,
    /// Dimension found by the dark-subspace cross-check, when it was run.
    pub oracle_dim: Option<usize>,
}

impl TableArtifact {
    pub fn new(
        graph: String,
        graph_title: String,
        coin: String,
        rows: Vec<Row>,
        hilbert_dim: usize,
        iht_dim: usize,
        final_set: Vec<String>,
    ) -> Result<Self, AccountingError> {
        let t = TableArtifact { graph, graph_title, coin, rows, hilbert_dim, iht_dim, final_set, oracle_dim: None };
        t.check_accounting()?;
        Ok(t)
    }

    pub fn check_accounting(&self) -> Result<(), AccountingError> {
        let dim: usize = self.rows.iter().map(|r| r.m_k * r.k).sum();
        if dim != self.hilbert_dim {
            return Err(AccountingError::Dimension { got: dim, expected: self.hilbert_dim });
        }
        let iht: usize = self.rows.iter().map(|r| r.m_k * r.v_k).sum();
        if iht != self.iht_dim {
            return Err(AccountingError::Iht { got: iht, expected: self.iht_dim });
        }
        Ok(())
    }

    pub fn verdict(&self) -> &'static str {
        if self.iht_dim > 0 {
            "infinite hitting time exists"
        } else {
            "infinite hitting time does not exist"
        }
    }

    fn human(&self, out: &mut String) {
        let _ = writeln!(out, "{} | {} coin", self.graph_title, self.coin);
        if !self.final_set.is_empty() {
            let _ = writeln!(out, "final set: {{{}}}", self.final_set.join(", "));
        }
        let _ = writeln!(out, "{:>6} {:>6} {:>6}", "m_k", "k", "|V_k|");
        for r in &self.rows {
            let _ = writeln!(out, "{:>6} {:>6} {:>6}", r.m_k, r.k, r.v_k);
        }
        let _ = writeln!(out, "|H| = {}   |V| = {}", self.hilbert_dim, self.iht_dim);
        if let Some(o) = self.oracle_dim {
            let _ = writeln!(out, "dark-subspace cross-check: {o}");
        }
        let _ = writeln!(out, "verdict: {}", self.verdict());
    }

    fn json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        v["verdict"] = json!(self.verdict());
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterLine {
    pub phase: f64,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionArtifact {
    pub graph: String,
    pub coin: String,
    pub hilbert_dim: usize,
    pub clusters: Vec<ClusterLine>,
    pub max_residual: f64,
    pub unitarity_residual: f64,
}

impl DecompositionArtifact {
    /// `(k, m_k)` sorted by `k` descending.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut m = std::collections::BTreeMap::new();
        for c in &self.clusters {
            *m.entry(c.k).or_insert(0usize) += 1;
        }
        m.into_iter().rev().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CpsArtifact {
    pub coin: String,
    pub dim: usize,
    /// One-line, 1-based.
    pub permutations: Vec<Vec<usize>>,
    pub is_group: bool,
    /// Whether the index reversal `c ↦ -c mod d` is in the set.
    pub contains_reversal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryArtifact {
    pub graph: String,
    pub coin: String,
    pub candidates: usize,
    pub a1: usize,
    pub a2: usize,
    pub w2: usize,
    /// Distinct coin permutations realized by joint automorphisms (1-based one-line).
    pub a2_coin_perms: Vec<Vec<usize>>,
    pub w2_coin_perms: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepLine {
    pub size: usize,
    pub iht_dim: usize,
    pub final_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepArtifact {
    pub graph: String,
    pub coin: String,
    pub strategy: String,
    pub points: Vec<SweepLine>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationArtifact {
    pub graph: String,
    pub coin: String,
    pub initial: String,
    pub horizon: usize,
    pub measure_at_start: bool,
    pub arrived: f64,
    pub survival: f64,
    pub hitting_time_truncated: f64,
    pub overlap: Option<f64>,
    pub conservation_error: f64,
    pub verdict: String,
    pub checkpoints: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryArtifact {
    /// `(name, title, |H|)` per column.
    pub graphs: Vec<(String, String, usize)>,
    /// `(coin label, |V| per graph)`.
    pub rows: Vec<(String, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Decomposition(DecompositionArtifact),
    Tables(Vec<TableArtifact>),
    Cps(CpsArtifact),
    Symmetries(SymmetryArtifact),
    Sweep(Vec<SweepArtifact>),
    Simulation(SimulationArtifact),
    Summary(SummaryArtifact),
}

/// A rendered unit of output: one file when `--out-dir` is given.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub stem: String,
    pub meta: Meta,
    pub body: Body,
}

fn perm_str(p: &[usize]) -> String {
    crate::config::one_line_string(p)
}

impl Artifact {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.human(),
            Format::Csv => self.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    pub fn human(&self) -> String {
        let mut out = self.meta.header_line();
        out.push('\n');
        match &self.body {
            Body::Decomposition(d) => {
                let _ = writeln!(out, "{} | {} coin | |H| = {}", d.graph, d.coin, d.hilbert_dim);
                let _ = writeln!(out, "{:>6} {:>6}", "m_k", "k");
                for (k, m) in d.multiplicities() {
                    let _ = writeln!(out, "{m:>6} {k:>6}");
                }
                let _ = writeln!(out, "eigenphases (radians, multiplicity):");
                for c in &d.clusters {
                    let _ = writeln!(out, "  {:>16} {:>4}", fmt_real(c.phase), c.k);
                }
                let _ = writeln!(out, "max eigen-residual: {}", fmt_real(d.max_residual));
                let _ = writeln!(out, "unitarity residual: {}", fmt_real(d.unitarity_residual));
            }
            Body::Tables(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    t.human(&mut out);
                }
            }
            Body::Cps(c) => {
                let _ = writeln!(out, "coin-permutation symmetries of the {} coin (d = {})", c.coin, c.dim);
                let _ = writeln!(out, "|CPS| = {}   closed under composition: {}", c.permutations.len(), c.is_group);
                for p in &c.permutations {
                    let _ = writeln!(out, "  {}", perm_str(p));
                }
                let _ = writeln!(out, "contains index reversal: {}", c.contains_reversal);
            }
            Body::Symmetries(s) => {
                let _ = writeln!(out, "{} | {} coin", s.graph, s.coin);
                let _ = writeln!(out, "structured candidates:                  {}", s.candidates);
                let _ = writeln!(out, "direction-preserving automorphisms A1:  {}", s.a1);
                let _ = writeln!(out, "joint automorphisms A2 (found):         {}", s.a2);
                let _ = writeln!(out, "coin-permutation symmetries W2:         {}", s.w2);
                let join = |ps: &[Vec<usize>]| ps.iter().map(|p| perm_str(p)).collect::<Vec<_>>().join(" ");
                let _ = writeln!(out, "coin permutations in A2: {}", join(&s.a2_coin_perms));
                let _ = writeln!(out, "coin permutations in W2: {}", join(&s.w2_coin_perms));
            }
            Body::Sweep(sweeps) => {
                for (i, s) in sweeps.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "{} | {} coin | strategy {}", s.graph, s.coin, s.strategy);
                    let _ = writeln!(out, "{:>6} {:>6}", "|F|", "|V|");
                    for p in &s.points {
                        let _ = writeln!(out, "{:>6} {:>6}", p.size, p.iht_dim);
                    }
                }
            }
            Body::Simulation(s) => {
                let _ = writeln!(out, "{} | {} coin | initial state {}", s.graph, s.coin, s.initial);
                let _ = writeln!(out, "horizon T = {} (measure at t = 0: {})", s.horizon, s.measure_at_start);
                let _ = writeln!(out, "arrived by T:            {}", fmt_real(s.arrived));
                let _ = writeln!(out, "survival at T:           {}", fmt_real(s.survival));
                let _ = writeln!(out, "truncated hitting time:  {}", fmt_real(s.hitting_time_truncated));
                if let Some(o) = s.overlap {
                    let _ = writeln!(out, "IHT overlap:             {}", fmt_real(o));
                }
                let _ = writeln!(out, "conservation error:      {}", fmt_real(s.conservation_error));
                let _ = writeln!(out, "verdict: {}", s.verdict);
                let _ = writeln!(out, "{:>8} {:>18}", "t", "survival");
                for (t, p) in &s.checkpoints {
                    let _ = writeln!(out, "{t:>8} {:>18}", fmt_real(*p));
                }
            }
            Body::Summary(s) => {
                let width = 12;
                let _ = write!(out, "{:<30}", "");
                for (name, _, _) in &s.graphs {
                    let _ = write!(out, "{name:>width$}");
                }
                out.push('\n');
                for (coin, vs) in &s.rows {
                    let _ = write!(out, "{:<30}", format!("|V| for {coin} coin"));
                    for v in vs {
                        let _ = write!(out, "{v:>width$}");
                    }
                    out.push('\n');
                }
                let _ = write!(out, "{:<30}", "|H|");
                for (_, _, h) in &s.graphs {
                    let _ = write!(out, "{h:>width$}");
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = self.meta.header_line();
        out.push('\n');
        match &self.body {
            Body::Decomposition(d) => {
                out.push_str("graph,coin,cluster,phase,k\n");
                for (i, c) in d.clusters.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{},{},{}", d.graph, csv_field(&d.coin), i, fmt_real(c.phase), c.k);
                }
            }
            Body::Tables(ts) => {
                out.push_str("graph,coin,k,m_k,V_k\n");
                for t in ts {
                    for r in &t.rows {
                        let _ = writeln!(out, "{},{},{},{},{}", t.graph, csv_field(&t.coin), r.k, r.m_k, r.v_k);
                    }
                }
            }
            Body::Cps(c) => {
                out.push_str("coin,d,permutation\n");
                for p in &c.permutations {
                    let _ = writeln!(out, "{},{},{}", csv_field(&c.coin), c.dim, csv_field(&perm_str(p)));
                }
            }
            Body::Symmetries(s) => {
                out.push_str("graph,coin,candidates,A1,A2,W2\n");
                let _ = writeln!(out, "{},{},{},{},{},{}", s.graph, csv_field(&s.coin), s.candidates, s.a1, s.a2, s.w2);
            }
            Body::Sweep(sweeps) => {
                out.push_str("graph,coin,strategy,size,V\n");
                for s in sweeps {
                    for p in &s.points {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{}",
                            s.graph,
                            csv_field(&s.coin),
                            csv_field(&s.strategy),
                            p.size,
                            p.iht_dim
                        );
                    }
                }
            }
            Body::Simulation(s) => {
                out.push_str("graph,coin,initial,t,survival\n");
                for (t, p) in &s.checkpoints {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        s.graph,
                        csv_field(&s.coin),
                        csv_field(&s.initial),
                        t,
                        fmt_real(*p)
                    );
                }
            }
            Body::Summary(s) => {
                out.push_str("graph,coin,V,H\n");
                for (coin, vs) in &s.rows {
                    for ((name, _, h), v) in s.graphs.iter().zip(vs) {
                        let _ = writeln!(out, "{name},{},{v},{h}", csv_field(coin));
                    }
                }
            }
        }
        out
    }

    pub fn json(&self) -> Value {
        let body = match &self.body {
            Body::Decomposition(d) => {
                let mut v = serde_json::to_value(d).expect("plain data");
                v["clusters"] = d.clusters.iter().map(|c| json!({"phase": round_real(c.phase), "k": c.k})).collect();
                v["max_residual"] = json!(round_real(d.max_residual));
                v["unitarity_residual"] = json!(round_real(d.unitarity_residual));
                v
            }
            Body::Tables(ts) => Value::Array(ts.iter().map(TableArtifact::json).collect()),
            Body::Cps(c) => serde_json::to_value(c).expect("plain data"),
            Body::Symmetries(s) => serde_json::to_value(s).expect("plain data"),
            Body::Sweep(s) => serde_json::to_value(s).expect("plain data"),
            Body::Simulation(s) => {
                let mut v = serde_json::to_value(s).expect("plain data");
                for key in ["arrived", "survival", "hitting_time_truncated", "conservation_error"] {
                    v[key] = json!(round_real(v[key].as_f64().expect("number")));
                }
                v["overlap"] = json!(s.overlap.map(round_real));
                v["checkpoints"] = s.checkpoints.iter().map(|(t, p)| json!([t, round_real(*p)])).collect();
                v
            }
            Body::Summary(s) => serde_json::to_value(s).expect("plain data"),
        };
        json!({ "meta": self.meta.json(), "result": body })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(0.1 + 0.2), "0.3");
        assert_eq!(fmt_real(-2.5), "-2.5");
        assert_eq!(fmt_real(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_real(1e-8), "1e-8");
        assert_eq!(fmt_real(1.5e-5), "0.000015");
        assert_eq!(fmt_real(123456789012345.0), "1.23456789012e14");
        assert_eq!(round_real(1.0 / 3.0), 0.333333333333);
    }

    #[test]
    fn accounting_identities_checked() {
        let rows = vec![Row { m_k: 2, k: 6, v_k: 3 }, Row { m_k: 4, k: 3, v_k: 0 }];
        let t = TableArtifact::new("cube3".into(), "3D cube".into(), "grover".into(), rows.clone(), 24, 6, vec![]).unwrap();
        assert_eq!(t.verdict(), "infinite hitting time exists");
        assert_eq!(
            TableArtifact::new("x".into(), "x".into(), "g".into(), rows.clone(), 25, 6, vec![]).unwrap_err(),
            AccountingError::Dimension { got: 24, expected: 25 }
        );
        assert_eq!(
            TableArtifact::new("x".into(), "x".into(), "g".into(), rows, 24, 5, vec![]).unwrap_err(),
            AccountingError::Iht { got: 6, expected: 5 }
        );
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("random(seed=1)"), "random(seed=1)");
        assert_eq!(csv_field("(1,2)"), "\"(1,2)\"");
    }
}
