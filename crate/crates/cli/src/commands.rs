//! Command handlers. Each returns the process exit status on success.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use leafpower::dp::{recognize_labeled_with, recognize_with, Limits, Options, RecognitionResult};
use leafpower::formats::{parse_graph_file, parse_witness, to_newick, write_graph_file, write_td, write_witness, GraphFile};
use leafpower::leafroot::{verify_labeled_leaf_root, verify_leaf_root, Verdict};
use leafpower::mso::{
    emit_labeled_formula, emit_predicate, emit_recognition_formula, labeled_signature, recognition_signature, render, write_formula_file,
    Predicate, Style,
};
use leafpower::reference::{
    brute_force_recognize, brute_force_recognize_labeled, caterpillar_instance, random_leaf_power_instance, recognize_k2, recognize_k3,
    OracleVerdict,
};
use leafpower::treedecomp::{decompose, lift_to_mixed, make_extra_nice, make_nice};
use leafpower::{Graph, LeafRootTree};

use crate::args::{Cli, Command, DecompositionKind, Family, OracleMethod, RunArgs, StyleArg};
use crate::error::{CliError, CliResult};

pub const YES: i32 = 0;
pub const NO: i32 = 1;
pub const RESOURCE: i32 = 3;

pub fn dispatch(cli: Cli) -> CliResult<i32> {
    let threads = cli.threads as usize;
    match cli.command {
        Command::Recognize { k, input, run } => recognize(k, &input, &run, threads, false),
        Command::RecognizeLabeled { cap, input, run } => recognize(cap, &input, &run, threads, true),
        Command::Verify { k, graph, witness } => verify(k, &graph, &witness),
        Command::Oracle { k, input, method, budget, labeled, witness } => oracle(k, &input, method, budget, labeled, witness.as_deref()),
        Command::Generate { k, family, n, labeled, output, witness } => generate(k, family, n, labeled, cli.seed, output, witness),
        Command::Product { k, input, output } => product(k, &input, output),
        Command::Decompose { input, strategy, kind, k, output } => decompose_cmd(&input, strategy.into(), kind, k, output),
        Command::EmitMso { k, labeled, style, predicate, k2, output } => emit_mso(k, labeled, style, predicate.as_deref(), k2, output),
        Command::Bench { k, sizes, run } => bench(k, &sizes, &run, threads, cli.seed),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit(output: Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => write(&p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> CliResult<GraphFile> {
    parse_graph_file(&read(path)?).map_err(|e| CliError::Input(path.to_path_buf(), e))
}

fn options(run: &RunArgs, threads: usize) -> CliResult<Options> {
    let time_limit = match run.time_limit {
        None => None,
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(CliError::Usage(format!("--time-limit must be a positive number of seconds, got {s}"))),
    };
    Ok(Options { limits: Limits { max_pictures_per_bag: run.max_pictures, time_limit }, strategy: run.strategy.into(), threads })
}

fn report_verdict(v: &Verdict) -> i32 {
    if v.ok {
        println!("ok");
        YES
    } else {
        println!("invalid");
        for x in &v.violations {
            eprintln!("{}: {} {:?}", x.code, x.detail, x.ids);
        }
        NO
    }
}

fn write_tree_outputs(t: &LeafRootTree, g: &Graph, witness: Option<&Path>, newick: Option<&Path>) -> CliResult<()> {
    if let Some(p) = witness {
        write(p, &write_witness(t, g))?;
    }
    if let Some(p) = newick {
        write(p, &format!("{}\n", to_newick(t, g)))?;
    }
    Ok(())
}

fn recognize(k: usize, input: &Path, run: &RunArgs, threads: usize, labeled: bool) -> CliResult<i32> {
    let file = load_graph(input)?;
    let opts = options(run, threads)?;
    let result: RecognitionResult = if labeled {
        let lg = file.labeled(k).map_err(|e| CliError::Input(input.to_path_buf(), e))?;
        recognize_labeled_with(&lg, k, &opts)?
    } else {
        if file.ranges.is_some() {
            return Err(CliError::Usage("labeled input; use recognize-labeled".into()));
        }
        recognize_with(&file.graph, k, &opts)?
    };
    if let Some(p) = &run.trace {
        write(p, &result.stats.trace_tsv())?;
    }
    eprintln!("width {} pictures_max {} millis {}", result.stats.width, result.stats.max_pictures(), result.stats.elapsed.as_millis());
    match &result.witness {
        Some(t) => {
            println!("yes");
            write_tree_outputs(t, &file.graph, run.witness.as_deref(), run.newick.as_deref())?;
            Ok(YES)
        }
        None => {
            println!("no");
            Ok(NO)
        }
    }
}

fn verify(k: usize, graph: &Path, witness: &Path) -> CliResult<i32> {
    let file = load_graph(graph)?;
    let tree = parse_witness(&read(witness)?, &file.graph).map_err(|e| CliError::Input(witness.to_path_buf(), e))?;
    let verdict = if file.ranges.is_some() {
        let lg = file.labeled(k).map_err(|e| CliError::Input(graph.to_path_buf(), e))?;
        verify_labeled_leaf_root(&lg, &tree, k)
    } else {
        verify_leaf_root(&file.graph, &tree, k)
    };
    Ok(report_verdict(&verdict))
}

fn oracle(k: usize, input: &Path, method: OracleMethod, budget: usize, labeled: bool, witness: Option<&Path>) -> CliResult<i32> {
    let file = load_graph(input)?;
    let labeled = labeled || file.ranges.is_some();
    let closed = match method {
        OracleMethod::ClosedForm => {
            if labeled || !(2..=3).contains(&k) {
                return Err(CliError::Usage("closed forms exist only for unlabeled k = 2 and k = 3".into()));
            }
            true
        }
        OracleMethod::Auto => !labeled && k <= 3,
        OracleMethod::Brute => false,
    };
    if closed {
        let yes = if k == 2 { recognize_k2(&file.graph) } else { recognize_k3(&file.graph) };
        if witness.is_some() {
            eprintln!("closed forms give no witness; none written");
        }
        println!("{}", if yes { "yes" } else { "no" });
        return Ok(if yes { YES } else { NO });
    }
    let verdict = if labeled {
        let lg = file.labeled(k).map_err(|e| CliError::Input(input.to_path_buf(), e))?;
        brute_force_recognize_labeled(&lg, k, budget)?
    } else {
        brute_force_recognize(&file.graph, k, budget)?
    };
    match verdict {
        OracleVerdict::Yes(t) => {
            println!("yes");
            write_tree_outputs(&t, &file.graph, witness, None)?;
            Ok(YES)
        }
        OracleVerdict::No => {
            println!("no");
            Ok(NO)
        }
        OracleVerdict::NoWithinBudget => {
            println!("unknown");
            eprintln!("no leaf root with at most {budget} nodes; the budget may be too small");
            Ok(RESOURCE)
        }
    }
}

fn generate(
    k: usize,
    family: Family,
    n: usize,
    labeled: bool,
    seed: u64,
    output: Option<PathBuf>,
    witness: Option<PathBuf>,
) -> CliResult<i32> {
    let bundle = match family {
        Family::Random => random_leaf_power_instance(n, k, seed, labeled)?,
        Family::Caterpillar => {
            if labeled {
                return Err(CliError::Usage("the caterpillar family is unlabeled".into()));
            }
            caterpillar_instance(n, k, seed)?
        }
    };
    let text = format!("c {k}-leaf power, seed {seed}\n{}", write_graph_file(&bundle.graph, bundle.labeled.as_ref().map(|l| l.ranges())));
    emit(output, &text)?;
    if let Some(p) = witness {
        write(&p, &write_witness(&bundle.witness, &bundle.graph))?;
    }
    Ok(YES)
}

fn product(k: usize, input: &Path, output: Option<PathBuf>) -> CliResult<i32> {
    let file = load_graph(input)?;
    let p = match &file.ranges {
        Some(_) => leafpower::ProductGraph::labeled(&file.labeled(k).map_err(|e| CliError::Input(input.to_path_buf(), e))?, k)?,
        None => leafpower::ProductGraph::new(&file.graph, k)?,
    };
    use leafpower::graph::EdgeColor;
    eprintln!(
        "vertices {} horizontal {} vertical {} diagonal {}",
        p.vertex_count(),
        p.count_by_color(EdgeColor::Horizontal),
        p.count_by_color(EdgeColor::Vertical),
        p.count_by_color(EdgeColor::Diagonal)
    );
    let mut text = format!("c strong product with C_{k}; vertex (v, r) has id v*{k}+r+1\n");
    text.push_str(&write_graph_file(&p.to_graph(), None));
    emit(output, &text)?;
    Ok(YES)
}

fn decompose_cmd(
    input: &Path,
    strategy: leafpower::treedecomp::Strategy,
    kind: DecompositionKind,
    k: Option<usize>,
    output: Option<PathBuf>,
) -> CliResult<i32> {
    let file = load_graph(input)?;
    let g = &file.graph;
    let base = decompose(g, strategy)?;
    let (td, n) = match kind {
        DecompositionKind::Plain => (base, g.vertex_count()),
        DecompositionKind::Nice => (make_nice(&base)?.to_tree_decomposition(), g.vertex_count()),
        DecompositionKind::ExtraNice => (make_extra_nice(&make_nice(&base)?, g).nice.to_tree_decomposition(), g.vertex_count()),
        DecompositionKind::Mixed => {
            let k = k.ok_or_else(|| CliError::Usage("--kind mixed needs -k".into()))?;
            let mixed = lift_to_mixed(&make_extra_nice(&make_nice(&base)?, g), k)?;
            (mixed.to_tree_decomposition(), g.vertex_count() * k)
        }
    };
    eprintln!("width {}", td.width());
    emit(output, &write_td(&td, n))?;
    Ok(YES)
}

fn emit_mso(
    k: usize,
    labeled: bool,
    style: StyleArg,
    predicate: Option<&str>,
    k2: Option<usize>,
    output: Option<PathBuf>,
) -> CliResult<i32> {
    let (f, sig) = if let Some(name) = predicate {
        let p = Predicate::from_name(name, k, k2.unwrap_or(k)).ok_or_else(|| CliError::Usage(format!("unknown predicate {name}")))?;
        emit_predicate(p)?
    } else if labeled {
        (emit_labeled_formula(k)?, labeled_signature(k))
    } else {
        (emit_recognition_formula(k)?, recognition_signature())
    };
    let text = match style {
        StyleArg::Sexpr => write_formula_file(&f, &sig),
        StyleArg::Pretty => format!("{}\n", render(&f, Style::Pretty)),
    };
    emit(output, &text)?;
    Ok(YES)
}

/// One bench row per size: `n m w k pictures_max millis`.
fn bench(k: usize, sizes: &[usize], run: &RunArgs, threads: usize, seed: u64) -> CliResult<i32> {
    let opts = options(run, threads)?;
    let mut out = String::from("n\tm\tw\tk\tpictures_max\tmillis\n");
    print!("{out}");
    for &n in sizes {
        let bundle = caterpillar_instance(n, k, seed)?;
        let started = Instant::now();
        let result = recognize_with(&bundle.graph, k, &opts)?;
        let millis = started.elapsed().as_secs_f64() * 1000.0;
        if !result.is_yes() {
            return Err(CliError::Internal(format!("caterpillar instance n = {n} was rejected")));
        }
        let row =
            format!("{n}\t{}\t{}\t{k}\t{}\t{millis:.1}\n", bundle.graph.edge_count(), result.stats.width, result.stats.max_pictures());
        print!("{row}");
        out.push_str(&row);
    }
    if let Some(p) = &run.trace {
        write(p, &out)?;
    }
    Ok(YES)
}
