//! Command-line front end: verification, classification, enumeration,
//! brute-force comparison, canonical forms, extraction, and DOT export.
//! Exit codes: 0 success, 1 mathematical failure, 2 input error, 3 budget.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use twistlab::absred::{
    extract_cycle_datum, normalize, normalize2, omegas_from_cycle_grid, FiberPartition,
};
use twistlab::classify::{
    classified_grid_set, enumerate_cycle_data, enumerate_cycle_families, enumerate_rank1_data,
    grid_from_cycle_datum, rep_from_rank1_datum, AEntry, ClassifyError,
};
use twistlab::field::FieldSpec;
use twistlab::jsonio;
use twistlab::oracle::{brute_force_with, compare_sets, GridSet, OracleError, SearchSpace};
use twistlab::quiver::Quiver;
use twistlab::twist::{build_twisted_algebra, check_axioms, grid_from_pair, EGrid};

const EXIT_MATH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "twistlab", version, about = "twisting maps K^n (x) K^m")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the four twisting-map axioms on a grid file.
    Verify { grid: PathBuf },
    /// Build the twisted algebra of a verified grid.
    Build {
        grid: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Emit the classified grid set for a shape.
    Classify(ClassifyArgs),
    /// List classification data without generating grids.
    Enumerate(EnumerateArgs),
    /// Brute-force all twisting maps, optionally comparing against a file.
    Oracle(OracleArgs),
    /// Canonicalize an invertible matrix within its block-group orbit.
    Normalize(NormalizeArgs),
    /// Recover the (u, a) datum from a 2-cycle grid.
    Extract {
        grid: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Export the quiver of a grid.
    Export {
        grid: PathBuf,
        /// write GraphViz DOT instead of JSON
        #[arg(long)]
        dot: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ClassifyArgs {
    /// "2cycle", "full", or a path to a quiver JSON file
    #[arg(long)]
    shape: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// "q" for the rationals or "p:K" for a prime field
    #[arg(long, default_value = "q")]
    field: String,
    /// seed for sampled rational parameters
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// "rank1", "cycle", or "families"
    #[arg(long)]
    kind: String,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "q")]
    field: String,
    /// quiver JSON file (rank1 only)
    #[arg(long)]
    shape: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    no_prune: bool,
    /// node-visit cap (also via TWISTLAB_BUDGET)
    #[arg(long)]
    budget: Option<u64>,
    /// grid-set file to compare against; exit 0 iff the sets agree
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormalizeArgs {
    /// endomorphism JSON file
    matrix: PathBuf,
    /// fiber function as comma-separated 1-based values, e.g. "2,2,1"
    #[arg(long)]
    u: String,
    /// use the 2-dimensional canonical form X1/X2
    #[arg(long)]
    two: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    fail(EXIT_INPUT, e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { grid } => cmd_verify(&grid),
        Command::Build { grid, out } => cmd_build(&grid, out.as_deref()),
        Command::Classify(a) => cmd_classify(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Extract { grid, out } => cmd_extract(&grid, out.as_deref()),
        Command::Export { grid, dot, out } => cmd_export(&grid, dot, out.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// shared I/O

fn read_json(path: &std::path::Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(input_err)?;
    serde_json::from_str(&text).map_err(input_err)
}

fn read_grid(path: &std::path::Path) -> Result<EGrid, Failure> {
    let v = read_json(path)?;
    let payload = jsonio::open_document(&v, Some("grid")).unwrap_or(&v);
    jsonio::grid_from_json(payload).map_err(input_err)
}

fn read_grid_set(path: &std::path::Path) -> Result<GridSet, Failure> {
    let v = read_json(path)?;
    let payload = jsonio::open_document(&v, Some("gridset")).unwrap_or(&v);
    jsonio::grid_set_from_json(payload).map_err(input_err)
}

fn write_output(out: Option<&std::path::Path>, doc: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).expect("serializable");
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(input_err),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_field(s: &str) -> Result<FieldSpec, Failure> {
    FieldSpec::parse(s).map_err(input_err)
}

/// The quiver with an arrow i -> j for every non-zero grid entry.
fn quiver_of_grid(g: &EGrid) -> Quiver {
    let arrows = (0..g.n)
        .flat_map(|i| (0..g.n).map(move |j| (i, j)))
        .filter(|&(i, j)| !g.get(i, j).is_zero())
        .collect();
    Quiver::new(g.n, arrows).expect("in-range arrows")
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_verify(path: &std::path::Path) -> Result<(), Failure> {
    let g = read_grid(path)?;
    let report = check_axioms(&g);
    let status = |name: &str, witness: Option<String>| match witness {
        None => println!("{name}: ok"),
        Some(w) => println!("{name}: FAIL at {w}"),
    };
    status(
        "tau1 (orthogonality)",
        report.tau1.map(|w| format!("{w:?}")),
    );
    status(
        "tau2 (factorization)",
        report.tau2.map(|w| format!("{w:?}")),
    );
    status(
        "tau3 (column sums)",
        report.tau3.map(|j| format!("column {}", j + 1)),
    );
    status("tau4 (unitality)", report.tau4.map(|w| format!("{w:?}")));

    let q = quiver_of_grid(&g);
    println!(
        "quiver: n={}, arrows (1-based): {:?}",
        q.n,
        one_based_arrows(&q)
    );
    for i in 0..q.n {
        println!(
            "  vertex {}: rank {}, rrank {}",
            i + 1,
            q.rank(i).map_err(input_err)?,
            q.rrank(i).map_err(input_err)?
        );
    }
    if report.passed() {
        println!("all axioms pass");
        Ok(())
    } else {
        Err(fail(EXIT_MATH, "axiom check failed"))
    }
}

fn cmd_build(path: &std::path::Path, out: Option<&std::path::Path>) -> Result<(), Failure> {
    let g = read_grid(path)?;
    let t = build_twisted_algebra(&g).map_err(|e| fail(EXIT_MATH, e.to_string()))?;
    let doc = jsonio::document("twisted_algebra", jsonio::twisted_algebra_to_json(&t), None);
    write_output(out, &doc)
}

fn cmd_classify(a: ClassifyArgs) -> Result<(), Failure> {
    let field = parse_field(&a.field)?;
    let (grids, seed) = match a.shape.as_str() {
        "2cycle" => match field {
            FieldSpec::Prime(_) => {
                let data = enumerate_cycle_data(a.m, field).map_err(input_err)?;
                let grids = data.iter().map(grid_from_cycle_datum).collect();
                (grids, None)
            }
            FieldSpec::Rationals => {
                // infinite family: emit one seeded sample per symbolic family
                let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                let grids = enumerate_cycle_families(a.m)
                    .iter()
                    .map(|f| grid_from_cycle_datum(&f.sample(&mut rng)))
                    .collect();
                (grids, Some(a.seed))
            }
        },
        "full" => {
            if field == FieldSpec::Rationals {
                return Err(fail(
                    EXIT_INPUT,
                    "--shape full needs a finite field; use --field p:K",
                ));
            }
            (classified_grid_set(a.n, a.m, field), None)
        }
        path => {
            let shape = jsonio::shape_from_json(&read_json(path.as_ref())?).map_err(input_err)?;
            let mut grids = Vec::new();
            for d in enumerate_rank1_data(&shape, a.m).map_err(input_err)? {
                match rep_from_rank1_datum(&d, field) {
                    Ok(pair) => grids.push(grid_from_pair(&pair)),
                    Err(ClassifyError::SplitForced(_)) => continue,
                    Err(e) => return Err(fail(EXIT_MATH, e.to_string())),
                }
            }
            (grids, None)
        }
    };
    let set = GridSet::from_grids(grids);
    println!("classified {} grids", set.len());
    let doc = jsonio::document("gridset", jsonio::grid_set_to_json(&set), seed);
    write_output(a.out.as_deref(), &doc)
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<(), Failure> {
    let field = parse_field(&a.field)?;
    let payload = match a.kind.as_str() {
        "cycle" => {
            let data = enumerate_cycle_data(a.m, field).map_err(input_err)?;
            Value::Array(data.iter().map(jsonio::cycle_datum_to_json).collect())
        }
        "families" => Value::Array(
            enumerate_cycle_families(a.m)
                .iter()
                .map(|f| {
                    json!({
                        "u": f.u.iter().map(|&x| x + 1).collect::<Vec<_>>(),
                        "a": f.entries.iter().map(|e| match e {
                            AEntry::Const(c) => c.to_string(),
                            AEntry::Param(k) => format!("t{k}"),
                            AEntry::OneMinusParam(k) => format!("1-t{k}"),
                        }).collect::<Vec<_>>(),
                        "params": f.params,
                    })
                })
                .collect(),
        ),
        "rank1" => {
            let path = a
                .shape
                .as_deref()
                .ok_or_else(|| fail(EXIT_INPUT, "--kind rank1 needs --shape <quiver.json>"))?;
            let shape = jsonio::shape_from_json(&read_json(path)?).map_err(input_err)?;
            let data = enumerate_rank1_data(&shape, a.m).map_err(input_err)?;
            Value::Array(data.iter().map(jsonio::rank1_datum_to_json).collect())
        }
        other => return Err(fail(EXIT_INPUT, format!("unknown kind {other:?}"))),
    };
    println!("{} data", payload.as_array().map_or(0, Vec::len));
    let doc = jsonio::document(&format!("{}_data", a.kind), payload, None);
    write_output(a.out.as_deref(), &doc)
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Failure> {
    let field = parse_field(&format!("p:{}", a.p))?;
    let mut space = SearchSpace::new(a.n, a.m, field);
    space.prune = !a.no_prune;
    if let Some(b) = a.budget {
        space.budget = b;
    }
    let set = brute_force_with(&space).map_err(|e| match e {
        OracleError::BudgetExceeded { .. } => fail(EXIT_BUDGET, e.to_string()),
        _ => input_err(e),
    })?;
    println!(
        "brute force (n={}, m={}, p={}): {} twisting maps",
        a.n,
        a.m,
        a.p,
        set.len()
    );
    if let Some(out) = a.out.as_deref() {
        let doc = jsonio::document("gridset", jsonio::grid_set_to_json(&set), None);
        write_output(Some(out), &doc)?;
    }
    if let Some(other) = a.compare.as_deref() {
        let classified = read_grid_set(other)?;
        let diff = compare_sets(&set, &classified);
        if diff.is_empty() {
            println!("compare: sets agree");
        } else {
            println!(
                "compare: {} grids only in brute force, {} only in {}",
                diff.only_left.len(),
                diff.only_right.len(),
                other.display()
            );
            for g in diff.only_left.iter().chain(&diff.only_right).take(3) {
                println!("{}", jsonio::grid_to_json(g));
            }
            return Err(fail(EXIT_MATH, "oracle and classification disagree"));
        }
    }
    Ok(())
}

fn cmd_normalize(a: NormalizeArgs) -> Result<(), Failure> {
    let v = read_json(&a.matrix)?;
    let payload = jsonio::open_document(&v, Some("endomap")).unwrap_or(&v);
    let x = jsonio::endomap_from_json(payload).map_err(input_err)?;
    let u: Vec<usize> =
        a.u.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1 && i <= x.rows)
                    .map(|i| i - 1)
                    .ok_or_else(|| fail(EXIT_INPUT, "--u must list 1-based in-range values"))
            })
            .collect::<Result<_, _>>()?;
    if u.len() != x.rows {
        return Err(fail(EXIT_INPUT, "--u length must match the matrix size"));
    }
    let f = FiberPartition::new(u);
    let payload = if a.two {
        let n2 = normalize2(&x, &f).map_err(|e| fail(EXIT_MATH, e.to_string()))?;
        json!({
            "form": match n2.form {
                twistlab::absred::TwoForm::X1 => "X1",
                twistlab::absred::TwoForm::X2 => "X2",
            },
            "x": jsonio::scalar_to_json(&n2.x),
            "y": jsonio::scalar_to_json(&n2.y),
            "matrix": jsonio::matrix_rows_to_json(&n2.matrix(x.field)),
        })
    } else {
        let nm = normalize(&x, &f).map_err(|e| fail(EXIT_MATH, e.to_string()))?;
        jsonio::normalized_matrix_to_json(&nm)
    };
    write_output(
        a.out.as_deref(),
        &jsonio::document("normalized", payload, None),
    )
}

fn cmd_extract(path: &std::path::Path, out: Option<&std::path::Path>) -> Result<(), Failure> {
    let g = read_grid(path)?;
    if g.n != 2 {
        return Err(fail(EXIT_INPUT, "extraction needs a 2-vertex grid"));
    }
    let ws = omegas_from_cycle_grid(&g);
    let d = extract_cycle_datum(&ws).map_err(|e| fail(EXIT_MATH, e.to_string()))?;
    println!(
        "u (1-based): {:?}",
        d.u.iter().map(|&x| x + 1).collect::<Vec<_>>()
    );
    write_output(
        out,
        &jsonio::document("cycle_datum", jsonio::cycle_datum_to_json(&d), None),
    )
}

fn cmd_export(
    path: &std::path::Path,
    dot: bool,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let g = read_grid(path)?;
    let q = quiver_of_grid(&g);
    if dot {
        let text = q.export_dot();
        match out {
            Some(p) => fs::write(p, text).map_err(input_err)?,
            None => print!("{text}"),
        }
        Ok(())
    } else {
        write_output(
            out,
            &jsonio::document("quiver", jsonio::quiver_to_json(&q), None),
        )
    }
}

fn one_based_arrows(q: &Quiver) -> Vec<(usize, usize)> {
    q.arrows().iter().map(|&(s, t)| (s + 1, t + 1)).collect()
}
