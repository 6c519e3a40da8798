//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion NN PASS|FAIL` line (visible with `--nocapture`, and in the
//! failure report otherwise) followed by the failing checks, if any.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use qwalk::catalog::CatalogGraph;
use qwalk::coins::{cps_enumerate, dft, dft_reversal, grover, random_unitary, DEFAULT_CPS_TOL};
use qwalk::linalg::{max_principal_angle, orthonormalize};
use qwalk::measured::simulate;
use qwalk::scalar::{max_abs_diff, unitarity_residual, Cx};
use qwalk::spectral::{
    dark_subspace_oracle, decompose, iht_subspace, overlap, sweep_final_sets, SweepStrategy,
};
use qwalk::symmetry::{classify, generate_candidates};
use qwalk::walk::{build_unitary, final_projector};
use qwalk::{CoinOperator, EigenspaceDecomposition, IhtReport, WalkState, WalkUnitary};
use qwalk_cli::config::{CoinChoice, Tolerances};
use qwalk_cli::report::{Body, Format, Row, TableArtifact};
use qwalk_cli::reproduce::{catalog_config, summary};
use qwalk_cli::run::Experiment;

const CLUSTER_TOL: f64 = 1e-7;
const RANK_TOL: f64 = 1e-8;
const RANDOM_SEEDS: [u64; 3] = [1, 2, 3];

struct Criterion {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    start: Instant,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion { id, name, failures: Vec::new(), start: Instant::now() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn within(&mut self, limit: Duration, what: &str, elapsed: Duration) {
        self.check(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"));
    }

    fn finish(self) {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {:02} {status} {} ({:.2?})", self.id, self.name, self.start.elapsed());
        for f in &self.failures {
            println!("    - {f}");
        }
        assert!(self.failures.is_empty(), "criterion {:02} failed:\n    {}", self.id, self.failures.join("\n    "));
    }
}

struct Analysis {
    unitary: WalkUnitary,
    decomposition: EigenspaceDecomposition,
    report: IhtReport,
    final_vertex: usize,
}

fn coin_for(kind: &str, d: usize, seed: u64) -> CoinOperator {
    match kind {
        "grover" => grover(d).unwrap(),
        "dft" => dft(d).unwrap(),
        "random" => random_unitary(d, seed).unwrap(),
        other => panic!("unknown coin {other}"),
    }
}

fn analyse(graph: CatalogGraph, coin: &str, seed: u64) -> Analysis {
    let g = graph.build().unwrap();
    let unitary = build_unitary(&g, coin_for(coin, g.degree(), seed)).unwrap();
    let decomposition = decompose(&unitary, CLUSTER_TOL).unwrap();
    let final_vertex = g.default_final_vertex();
    let proj = final_projector(&g, &[final_vertex]).unwrap();
    let report = iht_subspace(&decomposition, &proj, RANK_TOL).unwrap();
    Analysis { unitary, decomposition, report, final_vertex }
}

/// `(m_k, k, |V_k|)` rows, sorted.
fn rows(report: &IhtReport) -> Vec<(usize, usize, usize)> {
    let mut r: Vec<_> = report.table_rows().into_iter().map(|r| (r.count, r.dim, r.iht_dim)).collect();
    r.sort_unstable();
    r
}

fn sorted(mut v: Vec<(usize, usize, usize)>) -> Vec<(usize, usize, usize)> {
    v.sort_unstable();
    v
}

/// `k -> m_k`.
fn multiplicities(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().map(|&(m, k)| (k, m)).collect()
}

/// Checks one graph's Grover / DFT / random rows and |V|.
fn check_table(
    c: &mut Criterion,
    graph: CatalogGraph,
    grover_rows: Vec<(usize, usize, usize)>,
    grover_v: usize,
    dft_rows: Vec<(usize, usize, usize)>,
    dft_v: usize,
    random_clusters: Option<BTreeMap<usize, usize>>,
) {
    for (coin, want_rows, want_v) in [("grover", grover_rows, grover_v), ("dft", dft_rows, dft_v)] {
        let a = analyse(graph, coin, 0);
        c.check(a.report.total == want_v, || format!("{graph} {coin}: |V| = {}, expected {want_v}", a.report.total));
        if !want_rows.is_empty() {
            let got = rows(&a.report);
            let want = sorted(want_rows);
            c.check(got == want, || format!("{graph} {coin}: rows {got:?}, expected {want:?}"));
        }
    }
    for seed in RANDOM_SEEDS {
        let a = analyse(graph, "random", seed);
        c.check(a.report.total == 0, || format!("{graph} random({seed}): |V| = {}, expected 0", a.report.total));
        if let Some(want) = &random_clusters {
            let got = a.decomposition.multiplicities();
            c.check(&got == want, || format!("{graph} random({seed}): clusters {got:?}, expected {want:?}"));
        }
    }
}

#[test]
fn criterion_01_three_cube_tables() {
    let mut c = Criterion::new(1, "3-cube decompositions (Grover 6, DFT 2, random 0)");
    let t = Instant::now();
    check_table(
        &mut c,
        CatalogGraph::Cube3,
        vec![(2, 6, 3), (4, 3, 0)],
        6,
        vec![(2, 2, 1), (8, 2, 0), (4, 1, 0)],
        2,
        Some(multiplicities(&[(24, 1)])),
    );
    c.within(Duration::from_secs(1), "3-cube table", t.elapsed());
    c.finish();
}

#[test]
fn criterion_02_four_cube_tables() {
    let mut c = Criterion::new(2, "4-cube decompositions (Grover 32, DFT 24, random 0)");
    let t = Instant::now();
    check_table(
        &mut c,
        CatalogGraph::Cube4,
        vec![(2, 18, 14), (2, 6, 2), (4, 4, 0)],
        32,
        vec![(4, 8, 5), (4, 4, 1), (8, 2, 0)],
        24,
        None,
    );
    c.within(Duration::from_secs(2), "4-cube table", t.elapsed());
    c.finish();
}

#[test]
fn criterion_03_five_cube_tables() {
    let mut c = Criterion::new(3, "5-cube decompositions (Grover 110, DFT 22, random 0)");
    let t = Instant::now();
    check_table(
        &mut c,
        CatalogGraph::Cube5,
        vec![(2, 50, 45), (4, 10, 5), (4, 5, 0)],
        110,
        vec![(2, 10, 7), (2, 4, 2), (4, 2, 1), (60, 2, 0), (4, 1, 0)],
        22,
        None,
    );
    c.within(Duration::from_secs(10), "5-cube table", t.elapsed());
    c.finish();
}

#[test]
fn criterion_04_s3_three_generators() {
    let mut c = Criterion::new(4, "S3 with three generators (Grover 6, DFT 2, random 0)");
    check_table(
        &mut c,
        CatalogGraph::S3Three,
        vec![(2, 5, 2), (2, 4, 1)],
        6,
        vec![(2, 4, 1), (4, 2, 0), (2, 1, 0)],
        2,
        Some(multiplicities(&[(6, 2), (6, 1)])),
    );
    c.finish();
}

#[test]
fn criterion_05_s4_tables() {
    let mut c = Criterion::new(5, "S4 graphs: H1 26/15, H2 36/14, four generators 56/35, random 0");
    let three = multiplicities(&[(18, 3), (6, 2), (6, 1)]);
    let four = multiplicities(&[(24, 3), (8, 2), (8, 1)]);
    for (graph, gv, dv, clusters) in [
        (CatalogGraph::S4H1, 26, 15, three.clone()),
        (CatalogGraph::S4H2, 36, 14, three),
        (CatalogGraph::S4Four, 56, 35, four),
    ] {
        let t = Instant::now();
        check_table(&mut c, graph, vec![], gv, vec![], dv, Some(clusters));
        c.within(Duration::from_secs(10), graph.name(), t.elapsed());
    }
    c.finish();
}

#[test]
fn criterion_06_summary_grid() {
    let mut c = Criterion::new(6, "summary grid, all 24 (graph, coin) cells and |H|");
    let art = summary(1, Tolerances::default()).unwrap();
    let Body::Summary(s) = &art.body else { panic!("summary body") };
    let names: Vec<&str> = s.graphs.iter().map(|g| g.0.as_str()).collect();
    assert_eq!(names, ["cube3", "cube4", "cube5", "s3-2", "s3-3", "s4-h1", "s4-h2", "s4-4"]);
    let want_h = [24, 64, 160, 12, 18, 72, 72, 96];
    let want = [
        ("grover", [6, 32, 110, 0, 6, 26, 36, 56]),
        ("dft", [2, 24, 22, 0, 2, 15, 14, 35]),
        ("random", [0, 0, 0, 0, 0, 0, 0, 0]),
    ];
    for (i, (name, _, h)) in s.graphs.iter().enumerate() {
        c.check(*h == want_h[i], || format!("{name}: |H| = {h}, expected {}", want_h[i]));
    }
    for ((coin, got), (want_coin, want_row)) in s.rows.iter().zip(want) {
        assert!(coin.starts_with(want_coin));
        for (i, (&g, &w)) in got.iter().zip(want_row.iter()).enumerate() {
            c.check(g == w, || format!("{} {coin}: |V| = {g}, expected {w}", names[i]));
        }
    }
    c.finish();
}

#[test]
fn criterion_07_cps_counts() {
    let mut c = Criterion::new(7, "coin-permutation symmetry counts");
    for d in 2..=5usize {
        let n = cps_enumerate(&grover::<f64>(d).unwrap(), DEFAULT_CPS_TOL).unwrap().size();
        let fact: usize = (1..=d).product();
        c.check(n == fact, || format!("grover({d}): |CPS| = {n}, expected {fact}"));
    }
    for d in 3..=5usize {
        let set = cps_enumerate(&dft::<f64>(d).unwrap(), DEFAULT_CPS_TOL).unwrap();
        c.check(set.size() == 2, || format!("dft({d}): |CPS| = {}, expected 2", set.size()));
        c.check(set.contains(&dft_reversal(d)), || format!("dft({d}): reversal permutation missing"));
    }
    for d in 3..=5usize {
        for seed in 1..=5u64 {
            let n = cps_enumerate(&random_unitary::<f64>(d, seed).unwrap(), DEFAULT_CPS_TOL).unwrap().size();
            c.check(n == 1, || format!("random({d}, seed {seed}): |CPS| = {n}, expected 1"));
        }
    }
    c.finish();
}

#[test]
fn criterion_08_oracle_equivalence() {
    let mut c = Criterion::new(8, "dark-subspace oracle matches the spectral IHT subspace");
    let graphs = [
        CatalogGraph::Cube3,
        CatalogGraph::Cube4,
        CatalogGraph::Cube5,
        CatalogGraph::S3Three,
        CatalogGraph::S4H1,
        CatalogGraph::S4H2,
        CatalogGraph::S4Four,
    ];
    let mut configs: Vec<(&str, u64)> = vec![("grover", 0), ("dft", 0)];
    configs.extend(RANDOM_SEEDS.iter().map(|&s| ("random", s)));
    for graph in graphs {
        for &(coin, seed) in &configs {
            let a = analyse(graph, coin, seed);
            let g = graph.build().unwrap();
            let proj = final_projector(&g, &[a.final_vertex]).unwrap();
            let oracle = dark_subspace_oracle(&a.unitary, &proj, RANK_TOL).unwrap();
            c.check(oracle.ncols() == a.report.total, || {
                format!("{graph} {coin}({seed}): oracle {} vs spectral {}", oracle.ncols(), a.report.total)
            });
            if oracle.ncols() == a.report.total {
                let angle = max_principal_angle(&orthonormalize(&a.report.iht_basis), &oracle).unwrap();
                c.check(angle < 1e-6, || format!("{graph} {coin}({seed}): principal angle {angle:e}"));
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_09_measured_walk_validation() {
    let mut c = Criterion::new(9, "measured walk agrees with the IHT overlap (3-cube, Grover, F = {7})");
    let a = analyse(CatalogGraph::Cube3, "grover", 0);
    let g = CatalogGraph::Cube3.build().unwrap();
    let proj = final_projector(&g, &[7]).unwrap();
    for seed in 0..20u64 {
        let psi = WalkState::random(a.unitary.dim(), seed);
        let ov = overlap(&psi, &a.report).unwrap();
        let r = simulate(&a.unitary, &proj, &psi, 5000).unwrap();
        let min = r.survival_trace.iter().cloned().fold(f64::INFINITY, f64::min);
        c.check(min >= ov - 1e-9, || format!("seed {seed}: survival dipped to {min} below overlap {ov}"));
        c.check((r.survival - ov).abs() < 1e-2, || {
            format!("seed {seed}: survival(5000) = {} vs overlap {ov}", r.survival)
        });
    }
    for col in 0..a.report.total {
        let psi = WalkState::new(a.report.iht_basis.column(col).into_owned());
        let r = simulate(&a.unitary, &proj, &psi, 5000).unwrap();
        let max_q = r.q.iter().cloned().fold(0.0, f64::max);
        c.check(max_q < 1e-18, || format!("IHT vector {col}: max q_t = {max_q:e}"));
        c.check((r.survival - 1.0).abs() < 1e-12, || format!("IHT vector {col}: survival {}", r.survival));
    }
    c.finish();
}

#[test]
fn criterion_10_final_set_sweeps() {
    let mut c = Criterion::new(10, "final-set sweeps: nested monotone to 0; random 25-vertex set on the 5-cube");
    let t = Instant::now();
    for graph in CatalogGraph::ALL {
        let g = graph.build().unwrap();
        let u = build_unitary(&g, grover::<f64>(g.degree()).unwrap()).unwrap();
        let dec = decompose(&u, CLUSTER_TOL).unwrap();
        let sizes: Vec<usize> = (1..=g.n_vertices()).collect();
        let pts = sweep_final_sets(&dec, &g, &SweepStrategy::NestedDescending, &sizes, RANK_TOL).unwrap();
        let dims: Vec<usize> = pts.iter().map(|p| p.iht_dim).collect();
        c.check(dims.windows(2).all(|w| w[1] <= w[0]), || format!("{graph}: nested sweep not monotone: {dims:?}"));
        c.check(dims.last() == Some(&0), || format!("{graph}: nested sweep ends at {:?}", dims.last()));
    }
    let g = CatalogGraph::Cube5.build().unwrap();
    let u = build_unitary(&g, grover::<f64>(5).unwrap()).unwrap();
    let dec = decompose(&u, CLUSTER_TOL).unwrap();
    let best = sweep_final_sets(&dec, &g, &SweepStrategy::Random { seed: 1, trials: 200 }, &[25], RANK_TOL).unwrap();
    c.check(best[0].iht_dim > 0, || "no 25-vertex final set with |V| > 0 in 200 random trials".to_string());
    println!("    5-cube, |F| = 25: best |V| = {} with F = {:?}", best[0].iht_dim, best[0].final_set);
    c.within(Duration::from_secs(300), "sweeps", t.elapsed());
    c.finish();
}

#[test]
fn criterion_11_k_greater_than_d_not_necessary() {
    let mut c = Criterion::new(11, "3-cube DFT: every eigenspace has dimension < d, yet |V| = 2");
    let a = analyse(CatalogGraph::Cube3, "dft", 0);
    let max_k = a.decomposition.clusters().iter().map(|c| c.multiplicity()).max().unwrap();
    c.check(max_k == 2, || format!("largest eigenspace dimension {max_k}, expected 2"));
    c.check(max_k < 3, || "largest eigenspace is not smaller than d = 3".to_string());
    c.check(a.report.total == 2, || format!("|V| = {}, expected 2", a.report.total));
    c.finish();
}

fn permutation_apply(p: &qwalk::symmetry::JointPermutation, m: &nalgebra::DMatrix<Cx<f64>>) -> nalgebra::DMatrix<Cx<f64>> {
    let mut out = nalgebra::DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        out.set_row(p.apply_index(i), &m.row(i));
    }
    out
}

#[test]
fn criterion_12_property_suites() {
    let mut c = Criterion::new(12, "unitarity, conservation, reconstruction, symmetry, accounting, determinism");
    for graph in CatalogGraph::ALL {
        for (coin, seed) in [("grover", 0), ("dft", 0), ("random", 1)] {
            let tag = format!("{graph} {coin}");
            let g = graph.build().unwrap();
            let op = coin_for(coin, g.degree(), seed);
            let a = analyse(graph, coin, seed);
            let dense = a.unitary.dense();
            let ur = unitarity_residual(&dense);
            c.check(ur < 1e-12, || format!("{tag}: unitarity residual {ur:e}"));
            let rec = max_abs_diff(&a.decomposition.reconstruct(), &dense);
            c.check(rec < 1e-9, || format!("{tag}: reconstruction error {rec:e}"));

            let proj = final_projector(&g, &[a.final_vertex]).unwrap();
            let r = simulate(&a.unitary, &proj, &WalkState::random(a.unitary.dim(), 7), 2000).unwrap();
            c.check(r.conservation_error() < 1e-9, || format!("{tag}: conservation {:e}", r.conservation_error()));

            let rows: Vec<Row> =
                a.report.table_rows().into_iter().map(|r| Row { m_k: r.count, k: r.dim, v_k: r.iht_dim }).collect();
            let acct = TableArtifact::new(
                graph.name().into(),
                graph.title().into(),
                coin.into(),
                rows,
                a.unitary.dim(),
                a.report.total,
                vec![],
            );
            c.check(acct.is_ok(), || format!("{tag}: accounting {:?}", acct.as_ref().err()));

            let sym = classify(&g, &op, DEFAULT_CPS_TOL).unwrap();
            let cands = generate_candidates(&g).unwrap();
            for p in cands.iter().filter(|p| sym.w2.contains(p)) {
                for cl in a.decomposition.clusters() {
                    let moved = permutation_apply(p, &cl.basis);
                    let resid = &moved - &cl.basis * (cl.basis.adjoint() * &moved);
                    let worst = resid.iter().map(|x| x.norm()).fold(0.0, f64::max);
                    c.check(worst < 1e-8, || format!("{tag}: symmetry {p} moves an eigenspace by {worst:e}"));
                }
            }
        }
    }

    let tol = Tolerances::default();
    let render = || {
        let s = summary(1, tol).unwrap();
        let mut e = Experiment::new(catalog_config(CatalogGraph::S4H1, CoinChoice::Random, 5, tol).unwrap()).unwrap();
        let d = e.run(qwalk_cli::config::Analysis::Decompose).unwrap();
        [s.render(Format::Csv), s.render(Format::Json), d.render(Format::Csv), d.render(Format::Json)]
    };
    c.check(render() == render(), || "library renderings differ between runs".to_string());

    let bin = env!("CARGO_BIN_EXE_qwalk");
    let run = |fmt: &str| {
        std::process::Command::new(bin).args(["reproduce", "--table", "1", "--format", fmt]).output().unwrap()
    };
    for fmt in ["csv", "json"] {
        let (x, y) = (run(fmt), run(fmt));
        c.check(x.status.success() && x.stdout == y.stdout && !x.stdout.is_empty(), || {
            format!("binary {fmt} output is not byte-identical across runs")
        });
    }
    c.finish();
}
