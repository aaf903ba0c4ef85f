use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use treedom::domination::random::random_box_union;
use treedom::domination::{
    conjecture_scan, counterexample_d, dominates_height2, dominates_spherical, height2_reversal, phi_tree_exact,
    psi_exact, psi_real, random_graded_graph, rat, some_path_prob, sphere_dominates_tree, AxisBox, BoxUnion, ExactProb,
};
use treedom::growth::{
    checkpoints, classify, default_horizon, equal_product_indices, limit_constant, tilde_f_hull, tilde_f_recursive, Regime,
    RegularizedGrowth,
};
use treedom::sim::{ratio_statistics, replica_rng, run_replicas, Mode, SimConfig, TransitDist};
use treedom::tree::{children_partition, GrowthFunction, RootedTree};

use crate::inputs::{self, Loaded};
use crate::manifest::sha256_hex;
use crate::{
    ClassifyArgs, CliError, Command, DominatesArgs, EvalArgs, Format, RunOutput, ScanArgs, SimMode, SimulateArgs,
    TildeArgs, TildeMethod,
};

fn ratio_to_string(p: &ExactProb) -> (String, String) {
    (p.to_string(), p.decimal(12))
}

pub fn execute(cmd: &Command) -> Result<RunOutput, CliError> {
    match cmd {
        Command::Eval(a) => eval(a),
        Command::Dominates(a) => dominates(a),
        Command::Tilde(a) => tilde(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::ScanConjecture(a) => scan(a),
        Command::Replay(_) => unreachable!("replay is handled by the caller"),
    }
}

#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn add<T>(&mut self, name: &str, loaded: &Loaded<T>) {
        self.0.insert(name.to_string(), sha256_hex(&loaded.source));
    }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn csv_bytes<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn csv_string<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, CliError> {
    Ok(String::from_utf8(csv_bytes(rows)?).expect("csv output is UTF-8"))
}

type Files = Vec<(String, Vec<u8>)>;

/// `(report.json | report.csv, stdout)` for a command with a single report.
fn single_report(
    format: Option<Format>,
    text: Option<String>,
    json_value: &Value,
    csv: impl FnOnce() -> Result<String, CliError>,
) -> Result<(String, Files), CliError> {
    let (stdout, name) = match (format, text) {
        (Some(Format::Csv), _) => (csv()?, "report.csv"),
        (None, Some(t)) => (t, "report.txt"),
        _ => (pretty(json_value), "report.json"),
    };
    let files = vec![(name.to_string(), stdout.clone().into_bytes())];
    Ok((stdout, files))
}

fn eval(a: &EvalArgs) -> Result<RunOutput, CliError> {
    let mut inputs = Inputs::default();
    let set = inputs::set(&a.set)?;
    inputs.add("set", &set);
    let (quantity, exact, decimal, extra) = match (&a.tree, &a.sizes) {
        (Some(spec), _) => {
            let tree = inputs::tree(spec)?;
            inputs.add("tree", &tree);
            let (q, p) = if a.some_path {
                ("some-path", some_path_prob(&tree.value, &set.value)?)
            } else {
                ("all-paths", phi_tree_exact(&tree.value, &set.value)?)
            };
            let (e, d) = ratio_to_string(&p);
            (q, Some(e), d, json!({ "generation_sizes": tree.value.generation_sizes() }))
        }
        (None, Some(sizes)) => {
            let b: Vec<u64> = sizes
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("`{t}` is not a size"))))
                .collect::<Result<_, _>>()?;
            let loaded = Loaded {
                value: (),
                source: sizes.as_bytes().to_vec(),
            };
            inputs.add("sizes", &loaded);
            if b.first() == Some(&0) || b.windows(2).any(|w| w[0] == 0 || w[1] % w[0] != 0) {
                let bf: Vec<f64> = b.iter().map(|&x| x as f64).collect();
                let v = psi_real(&bf, &set.value)?;
                ("psi", None, format!("{v:.12}"), json!({ "sizes": b }))
            } else {
                let (e, d) = ratio_to_string(&psi_exact(&b, &set.value)?);
                ("psi", Some(e), d, json!({ "sizes": b }))
            }
        }
        (None, None) => return Err(CliError::Usage("eval needs --tree or --sizes".into())),
    };
    let report = json!({
        "quantity": quantity,
        "exact": exact,
        "decimal": decimal,
        "set_measure": set.value.measure()?.to_string(),
        "input": extra,
    });
    let text = match &exact {
        Some(e) => format!("{e}\n{decimal}\n"),
        None => format!("{decimal}\n"),
    };
    #[derive(Serialize)]
    struct Row<'a> {
        quantity: &'a str,
        exact: Option<&'a str>,
        decimal: &'a str,
    }
    let (stdout, files) = single_report(a.output.format, Some(text), &report, || {
        csv_string([Row {
            quantity,
            exact: exact.as_deref(),
            decimal: &decimal,
        }])
    })?;
    Ok(RunOutput {
        stdout,
        files,
        exit: 0,
        inputs: inputs.0,
        seed: None,
    })
}

/// Children count per generation when every vertex of a generation has the
/// same number of children.
fn spherical_growth(t: &RootedTree) -> Option<Vec<u64>> {
    (0..t.height())
        .map(|d| {
            let mut counts = t.generation(d).map(|v| t.children(v).len() as u64);
            let first = counts.next()?;
            counts.all(|c| c == first).then_some(first)
        })
        .collect()
}

#[derive(Serialize)]
struct DominanceReport {
    verdict: &'static str,
    criterion: &'static str,
    detail: String,
    tree_generation_sizes: Vec<usize>,
    other_generation_sizes: Vec<usize>,
    /// A set `D` with the all-paths probabilities of both trees, when found.
    witness: Option<Value>,
}

fn witness_json(set: &BoxUnion, phi_tree: &ExactProb, phi_other: &ExactProb) -> Value {
    json!({
        "set": serde_json::from_str::<Value>(&set.to_json()).expect("valid json"),
        "all_paths_tree": phi_tree.to_string(),
        "all_paths_other": phi_other.to_string(),
    })
}

fn decide(a: &RootedTree, b: &RootedTree) -> Result<(u8, DominanceReport), CliError> {
    let (sa, sb) = (a.generation_sizes(), b.generation_sizes());
    if a.height() != b.height() || a.height() == 0 {
        return Err(CliError::Usage(format!(
            "trees must have the same positive height, got {} and {}",
            a.height(),
            b.height()
        )));
    }
    let report = |verdict, criterion, detail: String, witness| DominanceReport {
        verdict,
        criterion,
        detail,
        tree_generation_sizes: sa.clone(),
        other_generation_sizes: sb.clone(),
        witness,
    };
    let h = a.height();

    if let Some(n) = (0..h).find(|&i| sa[i] < sb[i]) {
        // Only level n+1 matters: x_{n+1} ≤ 1/2, every other coordinate free.
        let lo = vec![rat(0, 1); h];
        let mut hi = vec![rat(1, 1); h];
        hi[n] = rat(1, 2);
        let set = BoxUnion::single(AxisBox::new(lo, hi)?).complement()?;
        let witness = match (phi_tree_exact(a, &set), phi_tree_exact(b, &set)) {
            (Ok(pa), Ok(pb)) => Some(witness_json(&set, &pa, &pb)),
            _ => None,
        };
        return Ok((
            1,
            report(
                "does-not-dominate",
                "generation sizes",
                format!(
                    "generation {} has {} vertices against {}; some vertex there has label at most 1/2 with probability 1 - 2^-{} < 1 - 2^-{}",
                    n + 1,
                    sa[n],
                    sb[n],
                    sa[n],
                    sb[n]
                ),
                witness,
            ),
        ));
    }

    if let Some(fa) = spherical_growth(a) {
        let f = GrowthFunction::table(fa)?;
        let (holds, criterion) = match spherical_growth(b) {
            Some(fb) => (dominates_spherical(&f, &GrowthFunction::table(fb)?, h)?, "spherical generation sizes"),
            None => (sphere_dominates_tree(&f, b)?, "spherically symmetric lower bound"),
        };
        debug_assert!(holds, "generation sizes were checked above");
        return Ok((
            0,
            report(
                "dominates",
                criterion,
                "the tree is spherically symmetric and its generations are at least as large".into(),
                None,
            ),
        ));
    }

    if h == 2 {
        let (p, q) = (children_partition(a)?, children_partition(b)?);
        if dominates_height2(&p, &q) {
            return Ok((
                0,
                report("dominates", "height-2 tail sums", format!("every tail sum of {p} is at least that of {q}"), None),
            ));
        }
        let witness = height2_reversal(&p, &q, 10)?;
        let detail = match &witness {
            Some(w) => format!("tail sums fail at k={}; D_ε with r={}, ε=2^-{} reverses the order", w.k, w.r, w.j),
            None => "tail sums fail; no witness found for ε down to 2^-10".into(),
        };
        return Ok((
            1,
            report(
                "does-not-dominate",
                "height-2 tail sums",
                detail,
                witness.map(|w| witness_json(&w.set, &w.phi_p, &w.phi_q)),
            ),
        ));
    }

    let mut witness = None;
    let mut detail = "no implemented criterion applies".to_string();
    if h == 3 {
        let d = counterexample_d();
        if let (Ok(pa), Ok(pb)) = (phi_tree_exact(a, &d), phi_tree_exact(b, &d)) {
            if pa > pb {
                detail = format!(
                    "undecidable by implemented criteria; the counterexample set reverses the order suggested by generation sizes: all-paths probabilities {pa} against {pb}"
                );
            } else {
                detail = format!(
                    "undecidable by implemented criteria; all-paths probabilities on the counterexample set are {pa} and {pb}"
                );
            }
            witness = Some(witness_json(&d, &pa, &pb));
        }
    }
    Ok((2, report("undecidable", "none", detail, witness)))
}

fn dominates(a: &DominatesArgs) -> Result<RunOutput, CliError> {
    let mut inputs = Inputs::default();
    let t = inputs::tree(&a.tree)?;
    let o = inputs::tree(&a.other)?;
    inputs.add("tree", &t);
    inputs.add("other", &o);
    let (exit, report) = decide(&t.value, &o.value)?;
    let mut text = format!("{} ({})\n{}\n", report.verdict, report.criterion, report.detail);
    if let Some(w) = &report.witness {
        text.push_str(&format!(
            "all-paths probabilities: {} and {}\n",
            w["all_paths_tree"].as_str().unwrap_or(""),
            w["all_paths_other"].as_str().unwrap_or("")
        ));
    }
    #[derive(Serialize)]
    struct Row<'a> {
        verdict: &'a str,
        criterion: &'a str,
        exit_code: u8,
    }
    let value = serde_json::to_value(&report).expect("report serializes");
    let (stdout, files) = single_report(a.output.format, Some(text), &value, || {
        csv_string([Row {
            verdict: report.verdict,
            criterion: report.criterion,
            exit_code: exit,
        }])
    })?;
    Ok(RunOutput {
        stdout,
        files,
        exit,
        inputs: inputs.0,
        seed: None,
    })
}

#[derive(Serialize)]
struct TildeRow {
    n: usize,
    f: f64,
    tilde_f: f64,
    ln_tilde_f: f64,
    stable: bool,
    contact: bool,
}

fn tilde_rows(f: &GrowthFunction, reg: &RegularizedGrowth, contacts: &[usize]) -> Result<Vec<TildeRow>, CliError> {
    reg.ln_values
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            Ok(TildeRow {
                n: i + 1,
                f: f.value_f64(i as u64 + 1)?,
                tilde_f: l.exp(),
                ln_tilde_f: l,
                stable: reg.stable[i],
                contact: contacts.binary_search(&(i + 1)).is_ok(),
            })
        })
        .collect()
}

fn regularize(f: &GrowthFunction, window: usize, horizon: Option<usize>, method: TildeMethod) -> Result<RegularizedGrowth, CliError> {
    if window == 0 {
        return Err(CliError::Usage("the window N must be at least 1".into()));
    }
    let h = match horizon {
        Some(h) => h,
        None => default_horizon(f, window)?,
    };
    Ok(match method {
        TildeMethod::Hull => tilde_f_hull(f, window, h)?,
        TildeMethod::Recursive => tilde_f_recursive(f, window, h)?,
    })
}

/// The requested window, or `default` clipped to the length of a table.
fn window(f: &GrowthFunction, requested: Option<usize>, default: usize) -> usize {
    requested.unwrap_or_else(|| f.defined_len().map_or(default, |len| len.min(default)))
}

fn tilde(a: &TildeArgs) -> Result<RunOutput, CliError> {
    let mut inputs = Inputs::default();
    let g = inputs::growth(&a.growth)?;
    inputs.add("growth", &g);
    let f = &g.value;
    let n = window(f, a.depth, 20);
    let reg = regularize(f, n, a.horizon, a.method)?;
    let contacts = equal_product_indices(f, n).unwrap_or_default();
    let rows = tilde_rows(f, &reg, &contacts)?;
    let report = json!({
        "growth": f,
        "window": reg.window,
        "horizon": reg.horizon,
        "method": a.method,
        "all_stable": reg.all_stable(),
        "contact_points": contacts,
        "values": rows,
    });
    let (stdout, files) = single_report(a.output.format.or(Some(Format::Json)), None, &report, || csv_string(&rows))?;
    Ok(RunOutput {
        stdout,
        files,
        exit: 0,
        inputs: inputs.0,
        seed: None,
    })
}

fn classify_cmd(a: &ClassifyArgs) -> Result<RunOutput, CliError> {
    let mut inputs = Inputs::default();
    let g = inputs::growth(&a.growth)?;
    inputs.add("growth", &g);
    let n = window(&g.value, a.depth, 1000);
    if !(a.alpha > 0.0 && a.alpha.is_finite()) || n == 0 {
        return Err(CliError::Usage("need α > 0 and N ≥ 1".into()));
    }
    let verdict = classify(&g.value, a.alpha, n)?;
    let reg = regularize(&g.value, n, None, TildeMethod::Hull)?;
    let report = json!({
        "growth": g.value,
        "verdict": verdict,
        "tilde_f": reg.ln_values.iter().map(|l| l.exp()).collect::<Vec<_>>(),
        "stable": reg.stable,
    });
    #[derive(Serialize)]
    struct Row {
        n: usize,
        partial_sum: f64,
    }
    let (stdout, files) = single_report(a.output.format.or(Some(Format::Json)), None, &report, || {
        csv_string(verdict.partial_sums.iter().map(|&(n, s)| Row { n, partial_sum: s }))
    })?;
    Ok(RunOutput {
        stdout,
        files,
        exit: 0,
        inputs: inputs.0,
        seed: None,
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
    level: usize,
    m_hat: f64,
    normalizer: f64,
    ratio: f64,
    mode: &'static str,
    seed: u64,
    replica: u64,
}

fn simulate(a: &SimulateArgs) -> Result<RunOutput, CliError> {
    let mut inputs = Inputs::default();
    let g = inputs::growth(&a.growth)?;
    inputs.add("growth", &g);
    let dist = if a.alpha.is_some() || a.c.is_some() {
        TransitDist::power_law(a.alpha.unwrap_or(1.0), a.c.unwrap_or(1.0))?
    } else {
        TransitDist::Exponential
    };
    if a.tolerance.is_nan() || a.tolerance <= 0.0 {
        return Err(CliError::Usage("--tolerance must be positive".into()));
    }
    let mode = match a.mode {
        SimMode::Greedy => Mode::Greedy,
        SimMode::Beam => Mode::Beam,
        SimMode::BeamWeighted => Mode::BeamWeighted,
        SimMode::Exact => Mode::Exact,
    };
    let cfg = SimConfig {
        seed: a.seed,
        replicas: a.replicas,
        beam_width: a.beam,
        prune_k: a.prune_k,
        depth: a.depth,
        dist,
        ..SimConfig::default()
    };
    cfg.validate()?;
    let verdict = classify(&g.value, cfg.dist.alpha(), cfg.depth)?;
    let target = limit_constant(cfg.dist.alpha(), cfg.dist.c())?;
    let runs = run_replicas(&cfg, &g.value, mode)?;

    let mut notes = Vec::new();
    let ratios = if verdict.regime == Regime::Explosion {
        notes.push("the growth function explodes; passage times stay bounded and ratios are not compared with the limit constant".to_string());
        None
    } else {
        Some(ratio_statistics(&runs, &verdict, target, a.tolerance)?)
    };
    let rows: Vec<TrajectoryRow> = runs
        .iter()
        .flat_map(|t| {
            t.levels.iter().map(move |l| TrajectoryRow {
                level: l.level,
                m_hat: l.m_hat,
                normalizer: l.normalizer,
                ratio: l.ratio,
                mode: t.mode.as_str(),
                seed: t.seed,
                replica: t.replica,
            })
        })
        .collect();
    let summary = json!({
        "growth": g.value,
        "config": cfg,
        "mode": mode,
        "target": target,
        "classification": verdict,
        "final_m_hat": runs.iter().map(|t| t.levels.last().map(|l| l.m_hat)).collect::<Vec<_>>(),
        "final_ratio": runs.iter().map(|t| t.final_ratio()).collect::<Vec<_>>(),
        "ratio_statistics": ratios,
        "notes": notes,
    });
    let summary_text = pretty(&summary);
    let csv = csv_bytes(&rows)?;
    let stdout = match a.output.format {
        Some(Format::Csv) => String::from_utf8(csv.clone()).expect("csv output is UTF-8"),
        _ => pretty(&checkpoint_bands_only(summary, cfg.depth)),
    };
    Ok(RunOutput {
        stdout,
        files: vec![
            ("trajectories.csv".to_string(), csv),
            ("summary.json".to_string(), summary_text.into_bytes()),
        ],
        exit: 0,
        inputs: inputs.0,
        seed: Some(a.seed),
    })
}

/// The summary with per-level bands kept only at levels 1, 10, 100, … and N.
fn checkpoint_bands_only(mut summary: Value, depth: usize) -> Value {
    let keep = checkpoints(depth);
    if let Some(bands) = summary.pointer_mut("/ratio_statistics/bands").and_then(Value::as_array_mut) {
        bands.retain(|b| {
            b["level"]
                .as_u64()
                .is_some_and(|l| l == 1 || keep.contains(&(l as usize)))
        });
    }
    summary
}

fn scan(a: &ScanArgs) -> Result<RunOutput, CliError> {
    if a.max_levels == 0 || a.max_vertices < a.max_levels || !(0.0..=1.0).contains(&a.edge_p) || a.max_boxes == 0 {
        return Err(CliError::Usage(
            "need 1 ≤ max-levels ≤ max-vertices, max-boxes ≥ 1 and edge-p in [0, 1]".into(),
        ));
    }
    let mut rng = replica_rng(a.seed, 0);
    let mut violations = Vec::new();
    let mut equalities = 0usize;
    #[derive(Serialize)]
    struct Row {
        index: usize,
        levels: usize,
        full_paths: u128,
        lhs: String,
        rhs: String,
        holds: bool,
    }
    let mut rows = Vec::with_capacity(a.samples);
    for index in 0..a.samples {
        let levels = rng.random_range(1..=a.max_levels);
        let g = random_graded_graph(&mut rng, levels, a.max_vertices, a.edge_p);
        let d = random_box_union(&mut rng, levels, a.max_boxes);
        let rep = conjecture_scan(&g, &d)?;
        if !rep.holds {
            let edges: Vec<(usize, usize)> = (0..g.vertex_count())
                .flat_map(|v| g.successors(v).iter().map(move |&w| (v, w)))
                .collect();
            violations.push(json!({
                "index": index,
                "level_sizes": g.level_sizes(),
                "edges": edges,
                "set": serde_json::from_str::<Value>(&d.to_json()).expect("valid json"),
                "lhs": rep.lhs,
                "rhs": rep.rhs,
            }));
        } else if rep.lhs == rep.rhs {
            equalities += 1;
        }
        rows.push(Row {
            index,
            levels,
            full_paths: rep.full_paths,
            lhs: rep.lhs.to_string(),
            rhs: rep.rhs.to_string(),
            holds: rep.holds,
        });
    }
    let report = json!({
        "samples": a.samples,
        "seed": a.seed,
        "equalities": equalities,
        "violation_count": violations.len(),
        "violations": violations,
    });
    let exit = if violations.is_empty() { 0 } else { 1 };
    let (stdout, files) = single_report(a.output.format.or(Some(Format::Json)), None, &report, || csv_string(&rows))?;
    Ok(RunOutput {
        stdout,
        files,
        exit,
        inputs: BTreeMap::new(),
        seed: Some(a.seed),
    })
}
