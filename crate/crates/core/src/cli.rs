//! The `nebulae` command line.
//!
//! Every command builds a [`ReportDocument`] whose validation section
//! re-derives the headline claims with the checkers in [`crate::audit`].
//! Exit codes:
//!
//! | code | meaning                                         |
//! |------|-------------------------------------------------|
//! | 0    | verdict computed (whatever it is)               |
//! | 1    | a check of `verify-paper-examples` failed       |
//! | 2    | unreadable input or invalid arguments           |
//! | 3    | a size budget was exceeded                      |
//! | 4    | a validation check failed                       |
//! | 5    | `run-algorithm` found no usable structure       |

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algorithm::{self, AlgorithmConfig, Case, Color, Outcome};
use crate::audit;
use crate::budget;
use crate::canon::enumerate_tournaments;
use crate::containment::{
    brute_force_contains, contains, empirical_eh_exponent, random_free_tournament, sample_seed,
};
use crate::error::Error;
use crate::examples;
use crate::io::{self, Format, TournamentFile};
use crate::modules::is_prime;
use crate::product::{extend_to_product_form, PlacementNebula, StarShape};
use crate::report::{Check, ReportDocument, Timing};
use crate::stars::{
    classify_components, find_ordering, find_ordering_with_limit, satisfies, OrderingKind, StarKind,
};
use crate::structures::{effective_lambda, Rational};
use crate::tournament::{Tournament, VertexOrdering};
use crate::transitive::{largest_transitive, stearns_bound, stearns_transitive};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_NO_STRUCTURE: i32 = 5;

/// Number of isomorphism classes of tournaments on `n` vertices, `n <= 8`.
pub const CLASS_COUNTS: [usize; 9] = [1, 1, 1, 2, 4, 12, 56, 456, 6880];

#[derive(Parser, Debug)]
#[command(
    name = "nebulae",
    version,
    about = "Nebulae, product tournaments and transitive subtournaments"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Add elapsed time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OrderingMode {
    /// Use the file's ordering, or the identity for matrix files.
    Identity,
    /// Search for an ordering of the requested kind.
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Filter {
    All,
    Prime,
    Nebula,
    Left,
    Right,
    Central,
    Galaxy,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Star components and nebula verdict of a tournament.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "identity")]
        ordering: OrderingMode,
        #[arg(long, default_value = "nebula")]
        kind: OrderingKind,
    },
    /// Check the two twelve-vertex example nebulae.
    VerifyPaperExamples {
        /// Flip the edge between two vertices of the left example first.
        #[arg(long, value_name = "U,V")]
        corrupt_edge: Option<String>,
    },
    /// Is the host free of every pattern?
    Free {
        host: PathBuf,
        #[arg(required = true)]
        patterns: Vec<PathBuf>,
    },
    /// Largest transitive subtournament.
    Tr { file: PathBuf },
    /// Product-form nebula from star placements.
    Product {
        #[arg(long)]
        kind: StarShape,
        /// Slots of each star, e.g. "1,2,3;4,5,6".
        #[arg(long)]
        stars: String,
        /// Number of slots; defaults to the largest slot used.
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reverse every edge, keeping the file's format and ordering.
    Complement {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the colouring algorithm against a pair of nebulae.
    RunAlgorithm(RunArgs),
    /// Fit the growth exponent of the largest transitive subtournament.
    Exponent {
        /// Forbidden tournaments; none means unrestricted random tournaments.
        #[arg(long, num_args = 1..)]
        family: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "8,10,12,14")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        max_tries: usize,
    },
    /// Isomorphism classes of tournaments on `n` vertices.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        filter: Filter,
        /// Write one matrix file per matching class here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    file: PathBuf,
    #[arg(long)]
    case: Case,
    /// Slot width of both nebulae.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Star slots of the white nebula.
    #[arg(long, default_value = "1,2,3")]
    first: String,
    /// Star slots of the black nebula.
    #[arg(long, default_value = "1,2,3")]
    second: String,
    /// Number of parts.
    #[arg(long, default_value_t = 7)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `auto`, or a file listing one part per line.
    #[arg(long, default_value = "auto")]
    structure: String,
    /// Shuffled orders tried by the automatic block search.
    #[arg(long, default_value_t = 16)]
    tries: usize,
    /// Largest backward share accepted for the structure.
    #[arg(long, default_value = "1/2")]
    max_lambda: Rational,
    /// Write the audit trace here, one JSON record per line.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Rerun the configuration stored in a trace and compare.
    #[arg(long)]
    replay: Option<PathBuf>,
}

/// What a command printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Output {
    doc: ReportDocument,
    /// Printed instead of the text summary when set.
    raw: Option<String>,
}

impl Output {
    fn report(doc: ReportDocument) -> Self {
        Output { doc, raw: None }
    }
}

enum Failure {
    Lib(Error),
    NoStructure(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::InvalidInput(msg.into()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Execution {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let start = Instant::now();
    let name = command_name(&cli.command);
    match dispatch(&cli.command) {
        Ok(mut out) => {
            if cli.timing {
                out.doc.timing = Some(Timing {
                    elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
                });
            }
            let stdout = if cli.json {
                out.doc.to_json()
            } else {
                out.raw.clone().unwrap_or_else(|| out.doc.to_text())
            };
            let failed = out.doc.failed_checks();
            if failed.is_empty() && !out.doc.validation.is_empty() {
                Execution {
                    code: EXIT_OK,
                    stdout,
                    stderr: String::new(),
                }
            } else {
                let code = if name == "verify-paper-examples" {
                    EXIT_CHECK_FAILED
                } else {
                    EXIT_INVARIANT
                };
                let stderr = if failed.is_empty() {
                    "error: no validation checks were produced\n".to_string()
                } else {
                    format!("error: failed checks: {}\n", failed.join(", "))
                };
                Execution {
                    code,
                    stdout,
                    stderr,
                }
            }
        }
        Err(Failure::Lib(e)) => {
            let code = match e {
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                Error::Invariant(_) => EXIT_INVARIANT,
                _ => EXIT_INPUT,
            };
            Execution {
                code,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
        Err(Failure::NoStructure(msg)) => Execution {
            code: EXIT_NO_STRUCTURE,
            stdout: String::new(),
            stderr: format!("error: no structure found: {msg}\n"),
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::VerifyPaperExamples { .. } => "verify-paper-examples",
        Command::Free { .. } => "free",
        Command::Tr { .. } => "tr",
        Command::Product { .. } => "product",
        Command::Complement { .. } => "complement",
        Command::RunAlgorithm(_) => "run-algorithm",
        Command::Exponent { .. } => "exponent",
        Command::Enumerate { .. } => "enumerate",
    }
}

fn dispatch(c: &Command) -> CmdResult<Output> {
    match c {
        Command::Classify {
            file,
            ordering,
            kind,
        } => classify(file, *ordering, *kind),
        Command::VerifyPaperExamples { corrupt_edge } => {
            verify_paper_examples(corrupt_edge.as_deref())
        }
        Command::Free { host, patterns } => free(host, patterns),
        Command::Tr { file } => tr(file),
        Command::Product {
            kind,
            stars,
            width,
            out,
        } => product(*kind, stars, *width, out.as_deref()),
        Command::Complement { file, out } => complement(file, out.as_deref()),
        Command::RunAlgorithm(args) => run_algorithm(args),
        Command::Exponent {
            family,
            sizes,
            samples,
            seed,
            max_tries,
        } => exponent(family, sizes, *samples, *seed, *max_tries),
        Command::Enumerate { n, filter, out } => enumerate(*n, *filter, out.as_deref()),
    }
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

fn kind_name(k: StarKind) -> &'static str {
    match k {
        StarKind::Singleton => "singleton",
        StarKind::LeftStar => "left",
        StarKind::RightStar => "right",
        StarKind::CentralStar => "central",
        StarKind::GeneralStar => "two-vertex",
        StarKind::NonStar => "non-star",
    }
}

fn shape_name(s: audit::Shape) -> &'static str {
    match s {
        audit::Shape::Single => "singleton",
        audit::Shape::Pair => "two-vertex",
        audit::Shape::Left => "left",
        audit::Shape::Right => "right",
        audit::Shape::Central => "central",
        audit::Shape::Other => "non-star",
    }
}

type ComponentTable = Vec<(Vec<usize>, &'static str)>;

/// Components of `t` under `order` as `(sorted vertices, kind name)`, once
/// from the library and once from the plain checker.
fn component_tables(t: &Tournament, order: &VertexOrdering) -> (ComponentTable, ComponentTable) {
    let mut lib: ComponentTable = classify_components(&t.backward_edges(order), order)
        .into_iter()
        .map(|c| {
            let mut vs = c.vertices.clone();
            vs.sort_unstable();
            (vs, kind_name(c.kind))
        })
        .collect();
    lib.sort();
    let mut pos = vec![0; t.order()];
    for (p, &v) in order.as_slice().iter().enumerate() {
        pos[v] = p;
    }
    let edges = audit::backward_pairs(t, order.as_slice());
    let plain = audit::components(t.order(), &edges)
        .into_iter()
        .map(|c| {
            let s = shape_name(audit::shape(&c, &edges, &pos).0);
            (c, s)
        })
        .collect();
    (lib, plain)
}

fn components_json(t: &Tournament, order: &VertexOrdering) -> Value {
    let comps = classify_components(&t.backward_edges(order), order);
    Value::Array(
        comps
            .iter()
            .map(|c| json!({"kind": kind_name(c.kind), "center": c.center, "vertices": c.vertices}))
            .collect(),
    )
}

fn classify(file: &Path, mode: OrderingMode, kind: OrderingKind) -> CmdResult<Output> {
    let f = io::read(file)?;
    let t = &f.tournament;
    let n = t.order();
    let (ordering, verdict) = match mode {
        OrderingMode::Identity => {
            let o = f.ordering_or_identity();
            let v = satisfies(t, &o, kind);
            (Some(o), v)
        }
        OrderingMode::Search => {
            let o = find_ordering(t, kind)?;
            let v = o.is_some();
            (o, v)
        }
    };
    let mut checks = Vec::new();
    let mut results = json!({
        "n": n,
        "kind": kind.name(),
        "mode": if mode == OrderingMode::Identity { "identity" } else { "search" },
        "verdict": verdict,
    });
    if let Some(o) = &ordering {
        let (lib, plain) = component_tables(t, o);
        checks.push(Check::new(
            "components",
            lib == plain,
            format!(
                "{} components re-derived by union-find over backward pairs",
                plain.len()
            ),
        ));
        let plain_verdict = audit::ordering_ok(t, o.as_slice(), kind);
        checks.push(Check::new(
            "verdict",
            plain_verdict == verdict,
            format!("ordering re-checked from backward pairs: {plain_verdict}"),
        ));
        results["ordering"] = json!(o.as_slice());
        results["components"] = components_json(t, o);
    } else {
        results["ordering"] = Value::Null;
        if n <= 8 {
            let exists = audit::ordering_exists(t, kind);
            checks.push(Check::new(
                "no-ordering",
                !exists,
                format!("all {n}! orderings rejected by the plain checker"),
            ));
        } else {
            checks.push(Check::new(
                "no-ordering",
                true,
                format!("not re-derived: {n} vertices is beyond the permutation scan"),
            ));
        }
    }
    let doc = ReportDocument::new(
        "classify",
        json!({"file": show(file), "ordering": results["mode"], "kind": kind.name()}),
        None,
        results,
        checks,
    );
    Ok(Output::report(doc))
}

fn parse_pair(s: &str) -> CmdResult<(usize, usize)> {
    let bad = || input(format!("expected U,V, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

/// Checklist for the two worked examples. Vertices are numbered from 0.
fn verify_paper_examples(corrupt: Option<&str>) -> CmdResult<Output> {
    let mut left = examples::left_example();
    if let Some(s) = corrupt {
        let (u, v) = parse_pair(s)?;
        if u >= 12 || v >= 12 || u == v {
            return Err(input(
                "corrupted edge must join two distinct vertices below 12",
            ));
        }
        left = Tournament::from_fn(12, |a, b| {
            let flip = (a, b) == (u.min(v), u.max(v));
            left.beats(a, b) != flip
        });
    }
    let central = examples::central_example();
    let id = VertexOrdering::identity(12);
    let mut checks = Vec::new();

    let expected: Vec<(Vec<usize>, &str)> = vec![
        (vec![0, 4, 8], "left"),
        (vec![1, 3], "two-vertex"),
        (vec![2, 9], "two-vertex"),
        (vec![5, 7, 10], "left"),
        (vec![6, 11], "two-vertex"),
    ];
    let (lib, plain) = component_tables(&left, &id);
    let nontrivial = |v: &[(Vec<usize>, &'static str)]| -> Vec<(Vec<usize>, String)> {
        v.iter()
            .filter(|c| c.0.len() > 1)
            .map(|(c, k)| (c.clone(), k.to_string()))
            .collect()
    };
    let want: Vec<(Vec<usize>, String)> = expected
        .iter()
        .map(|(c, k)| (c.clone(), k.to_string()))
        .collect();
    checks.push(Check::new(
        "left-example-components",
        nontrivial(&lib) == want && nontrivial(&plain) == want,
        "left stars {0,4,8}, {5,7,10}; two-vertex stars {1,3}, {2,9}, {6,11}; one singleton",
    ));
    let module = audit::nontrivial_module(&left);
    checks.push(Check::new(
        "left-example-prime",
        is_prime(&left) && module.is_none(),
        match &module {
            None => "no homogeneous set among all 4096 subsets".to_string(),
            Some(m) => format!("homogeneous set {m:?}"),
        },
    ));
    let galaxy = find_ordering_with_limit(&left, OrderingKind::Galaxy, 12)?;
    checks.push(Check::new(
        "left-example-not-galaxy",
        galaxy.is_none(),
        match &galaxy {
            None => "exhaustive ordering search finds no galaxy ordering".to_string(),
            Some(o) => format!("galaxy ordering {:?}", o.as_slice()),
        },
    ));
    let product_check = match extend_to_product_form(&left, &id, StarShape::Left) {
        Ok((nebula, emb)) => {
            let host = nebula.tournament();
            let order: Vec<usize> = (0..host.order()).collect();
            let ok = audit::embeds(&left, &host, &emb.map)
                && audit::ordering_ok(&host, &order, OrderingKind::Left);
            Check::new(
                "left-example-product-form",
                ok,
                format!(
                    "embeds into a left nebula with {} stars on {} vertices",
                    nebula.stars.len(),
                    host.order()
                ),
            )
        }
        Err(e) => Check::new("left-example-product-form", false, e.to_string()),
    };
    checks.push(product_check);

    let (lib, plain) = component_tables(&central, &id);
    let stars = |v: &[(Vec<usize>, &'static str)]| {
        v.iter()
            .filter(|c| c.1 == "central" && c.0.len() == 3)
            .count()
    };
    checks.push(Check::new(
        "central-example-components",
        lib == plain && stars(&plain) == 4 && plain.len() == 4,
        "four central stars on three vertices each",
    ));
    checks.push(Check::new(
        "central-example-ordering",
        satisfies(&central, &id, OrderingKind::Central)
            && audit::ordering_ok(&central, id.as_slice(), OrderingKind::Central),
        "the identity is a central nebula ordering",
    ));
    let module = audit::nontrivial_module(&central);
    checks.push(Check::new(
        "central-example-prime",
        is_prime(&central) && module.is_none(),
        match &module {
            None => "no homogeneous set among all 4096 subsets".to_string(),
            Some(m) => format!("homogeneous set {m:?}"),
        },
    ));

    let results = json!({
        "checks": checks.len(),
        "passed": checks.iter().filter(|c| c.passed).count(),
        "left_example": components_json(&left, &id),
        "central_example": components_json(&central, &id),
    });
    let doc = ReportDocument::new(
        "verify-paper-examples",
        json!({"corrupt_edge": corrupt}),
        None,
        results,
        checks,
    );
    Ok(Output::report(doc))
}

fn free(host: &Path, patterns: &[PathBuf]) -> CmdResult<Output> {
    let t = io::read(host)?.tournament;
    let mut found = Vec::new();
    let mut checks = Vec::new();
    for p in patterns {
        let h = io::read(p)?.tournament;
        let hit = contains(&t, &h);
        let name = format!("pattern {}", show(p));
        match &hit {
            Some(e) => checks.push(Check::new(
                name,
                audit::embeds(&h, &t, &e.map),
                format!("copy at {:?} re-checked edge by edge", e.map),
            )),
            None => match brute_force_contains(&t, &h) {
                Ok(b) => checks.push(Check::new(
                    name,
                    b.is_none(),
                    "no copy among all injective maps",
                )),
                Err(Error::BudgetExceeded { .. }) => checks.push(Check::new(
                    name,
                    true,
                    "not re-derived: brute force is over budget",
                )),
                Err(e) => return Err(e.into()),
            },
        }
        found.push(json!({"file": show(p), "order": h.order(), "copy": hit.map(|e| e.map)}));
    }
    let is_free = found.iter().all(|f| f["copy"].is_null());
    let doc = ReportDocument::new(
        "free",
        json!({"host": show(host), "patterns": patterns.iter().map(|p| show(p)).collect::<Vec<_>>()}),
        None,
        json!({"free": is_free, "n": t.order(), "patterns": found}),
        checks,
    );
    Ok(Output::report(doc))
}

/// Largest size for which `tr` re-derives optimality by scanning subsets.
const TR_AUDIT_MAX: usize = 14;

fn tr(file: &Path) -> CmdResult<Output> {
    let t = io::read(file)?.tournament;
    let n = t.order();
    let (set, exact) = if n <= budget::limits().tr_max_n {
        (largest_transitive(&t)?, true)
    } else {
        (stearns_transitive(&t), false)
    };
    let ordered = t.transitive_order(&set).unwrap_or_else(|| set.clone());
    let mut checks = vec![
        Check::new(
            "transitive",
            audit::is_transitive(&t, &set),
            "inner scores are 0, 1, ..., size - 1",
        ),
        Check::new(
            "majority-bound",
            set.len() >= stearns_bound(n),
            format!(
                "size {} against floor(log2 n) + 1 = {}",
                set.len(),
                stearns_bound(n)
            ),
        ),
    ];
    if exact && n <= TR_AUDIT_MAX {
        let best = audit::max_transitive(&t);
        checks.push(Check::new(
            "optimal",
            best == set.len(),
            format!("subset scan finds {best}"),
        ));
    }
    let doc = ReportDocument::new(
        "tr",
        json!({"file": show(file)}),
        None,
        json!({
            "n": n,
            "size": set.len(),
            "exact": exact,
            "method": if exact { "exact" } else { "majority construction (lower bound only)" },
            "vertices": ordered,
        }),
        checks,
    );
    Ok(Output::report(doc))
}

fn parse_stars(s: &str) -> CmdResult<Vec<[usize; 3]>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let v: Vec<usize> = p
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| input(format!("bad slot {x:?} in {s:?}")))
                })
                .collect::<CmdResult<_>>()?;
            <[usize; 3]>::try_from(v)
                .map_err(|_| input(format!("each star needs three slots: {p:?}")))
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> CmdResult<()> {
    std::fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", show(path))))
}

fn product(
    kind: StarShape,
    stars: &str,
    width: Option<usize>,
    out: Option<&Path>,
) -> CmdResult<Output> {
    let placed = parse_stars(stars)?;
    let width = width.unwrap_or_else(|| placed.iter().flatten().copied().max().unwrap_or(0));
    let nebula = PlacementNebula::new(kind, placed, width)?;
    let p = nebula.product();
    let t = &p.tournament;
    let id = p.ordering();
    let text = io::write_backward(t, &id);
    let backward = audit::backward_pairs(t, id.as_slice());
    let ordering_kind = match kind {
        StarShape::Left => OrderingKind::Left,
        StarShape::Right => OrderingKind::Right,
        StarShape::Central => OrderingKind::Central,
    };
    let checks = vec![
        Check::new(
            "order",
            t.order() == 3 * nebula.stars.len(),
            format!("{} vertices from {} stars", t.order(), nebula.stars.len()),
        ),
        Check::new(
            "backward-edges",
            backward.len() == 2 * nebula.stars.len(),
            format!("{} backward edges, two per star", backward.len()),
        ),
        Check::new(
            "ordering",
            audit::ordering_ok(t, id.as_slice(), ordering_kind),
            format!("slot order is a {} nebula ordering", kind.name()),
        ),
    ];
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    let doc = ReportDocument::new(
        "product",
        json!({"kind": kind.name(), "stars": stars, "width": width}),
        None,
        json!({"n": t.order(), "stars": nebula.stars, "file": text}),
        checks,
    );
    Ok(Output {
        raw: out.is_none().then_some(text),
        ..Output::report(doc)
    })
}

fn complement(file: &Path, out: Option<&Path>) -> CmdResult<Output> {
    let f = io::read(file)?;
    let t = &f.tournament;
    let c = TournamentFile {
        format: f.format,
        tournament: t.complement(),
        ordering: f.ordering.clone(),
    };
    let text = io::write(&c);
    let n = t.order();
    let flipped =
        (0..n).all(|u| (0..n).all(|v| u == v || t.beats(u, v) != c.tournament.beats(u, v)));
    let reparsed = io::parse(&text)
        .map(|g| g.tournament == c.tournament)
        .unwrap_or(false);
    let checks = vec![
        Check::new("reversed", flipped, "every pair points the other way"),
        Check::new(
            "round-trip",
            reparsed,
            "written file parses back to the complement",
        ),
    ];
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    let doc = ReportDocument::new(
        "complement",
        json!({"file": show(file)}),
        None,
        json!({"n": n, "format": if f.format == Format::Matrix { "matrix" } else { "backward" }, "file": text}),
        checks,
    );
    Ok(Output {
        raw: out.is_none().then_some(text),
        ..Output::report(doc)
    })
}

/// First line of an audit trace.
#[derive(Serialize, Deserialize)]
struct TraceHeader {
    record: String,
    config: AlgorithmConfig,
    parts: Vec<Vec<usize>>,
}

fn read_parts(path: &Path) -> CmdResult<Vec<Vec<usize>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read {}: {e}", show(path))))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|x| {
                    x.parse()
                        .map_err(|_| input(format!("part {i}: bad vertex {x:?}")))
                })
                .collect()
        })
        .collect()
}

fn trace_text(header: &TraceHeader, report: &algorithm::RunReport) -> String {
    let mut lines = vec![serde_json::to_string(header).expect("header serializes")];
    lines.extend(
        report
            .trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes")),
    );
    lines.push(json!({"record": "outcome", "outcome": report.outcome}).to_string());
    lines.join("\n") + "\n"
}

fn outcome_checks(
    t: &Tournament,
    config: &AlgorithmConfig,
    parts: &[Vec<usize>],
    report: &algorithm::RunReport,
) -> Vec<Check> {
    let mut checks = vec![Check::new(
        "phase-bound",
        report.phases <= report.phase_bound,
        format!(
            "{} phases against the bound {}",
            report.phases, report.phase_bound
        ),
    )];
    match &report.outcome {
        Outcome::CompletePair { pair, .. } => {
            let inside = |set: &[usize], part: usize| {
                part < parts.len() && set.iter().all(|v| parts[part].contains(v))
            };
            let ok = audit::complete(t, &pair.from, &pair.to)
                && inside(&pair.from, pair.from_part)
                && inside(&pair.to, pair.to_part);
            checks.push(Check::new(
                "complete-pair",
                ok,
                format!(
                    "{} x {} edges all point forward",
                    pair.from.len(),
                    pair.to.len()
                ),
            ));
        }
        Outcome::ForbiddenCopy {
            color, embedding, ..
        } => {
            let nebula = if *color == Color::White {
                &config.first
            } else {
                &config.second
            };
            let h = nebula.tournament();
            checks.push(Check::new(
                "forbidden-copy",
                audit::embeds(&h, t, &embedding.map),
                format!(
                    "copy of the {} nebula on {} vertices re-checked",
                    nebula.kind.name(),
                    h.order()
                ),
            ));
        }
        _ => {}
    }
    checks
}

fn run_algorithm(a: &RunArgs) -> CmdResult<Output> {
    let t = io::read(&a.file)?.tournament;
    let (first_kind, second_kind) = a.case.shapes();
    let first = PlacementNebula::new(first_kind, parse_stars(&a.first)?, a.k)?;
    let second = PlacementNebula::new(second_kind, parse_stars(&a.second)?, a.k)?;
    let n = t.order();

    let (config, parts) = if let Some(replay) = &a.replay {
        let text = std::fs::read_to_string(replay)
            .map_err(|e| input(format!("cannot read {}: {e}", show(replay))))?;
        let first_line = text.lines().next().ok_or_else(|| input("empty trace"))?;
        let header: TraceHeader = serde_json::from_str(first_line)
            .map_err(|e| input(format!("bad trace header: {e}")))?;
        (header.config, header.parts)
    } else {
        if a.t == 0 || n < a.t {
            return Err(Failure::NoStructure(format!(
                "{n} vertices cannot hold {} parts",
                a.t
            )));
        }
        let parts = if a.structure == "auto" {
            match algorithm::find_block_structure(&t, a.t, a.tries, a.seed)? {
                Some((parts, _)) => parts,
                None => return Err(Failure::NoStructure("block search found nothing".into())),
            }
        } else {
            read_parts(Path::new(&a.structure))?
        };
        let lambda = effective_lambda(&t, &parts, true)?;
        if lambda > a.max_lambda {
            return Err(Failure::NoStructure(format!(
                "best structure has lambda {lambda}, above the limit {}",
                a.max_lambda
            )));
        }
        let w = parts.first().map_or(0, |p| p.len());
        let c = Rational::new(w as i64, n as i64);
        let config = AlgorithmConfig::new(a.case, first, second, a.t, w, lambda, c)?;
        (config, parts)
    };

    let report = algorithm::run(&t, &parts, &config)?;
    let header = TraceHeader {
        record: "config".into(),
        config: config.clone(),
        parts: parts.clone(),
    };
    let trace = trace_text(&header, &report);
    if let Some(path) = &a.trace {
        write_file(path, &trace)?;
    }

    let mut checks = vec![Check::new(
        "structure",
        audit::strong_lambda(&t, &parts) <= config.lambda
            && parts.iter().all(|p| p.len() == config.w),
        format!(
            "{} parts of {} vertices, backward share at most {}",
            parts.len(),
            config.w,
            config.lambda
        ),
    )];
    checks.extend(outcome_checks(&t, &config, &parts, &report));
    if let Some(replay) = &a.replay {
        let saved = std::fs::read_to_string(replay).unwrap_or_default();
        checks.push(Check::new(
            "replay",
            saved == trace,
            format!("{} trace records compared", trace.lines().count()),
        ));
    }
    let outcome = serde_json::to_value(&report.outcome).expect("outcome serializes");
    let results = json!({
        "verdict": outcome["outcome"],
        "outcome": outcome,
        "phases": report.phases,
        "phase_bound": report.phase_bound,
        "capacity": report.capacity,
        "stored": report.stored,
        "lambda": config.lambda.to_string(),
        "c": config.c.to_string(),
        "parts": config.t,
        "part_size": config.w,
        "trace_records": report.trace.len(),
        "warnings": report.warnings,
    });
    let doc = ReportDocument::new(
        "run-algorithm",
        json!({
            "file": show(&a.file),
            "case": a.case.name(),
            "k": config.k,
            "t": config.t,
            "first": config.first.stars,
            "second": config.second.stars,
            "structure": if a.replay.is_some() { "replay".to_string() } else { a.structure.clone() },
            "max_lambda": a.max_lambda.to_string(),
        }),
        Some(a.seed),
        results,
        checks,
    );
    Ok(Output::report(doc))
}

/// Largest size at which samples are re-checked by brute force.
const EXPONENT_AUDIT_MAX: usize = 14;

fn exponent(
    family: &[PathBuf],
    sizes: &[usize],
    samples: usize,
    seed: u64,
    max_tries: usize,
) -> CmdResult<Output> {
    let forbidden: Vec<Tournament> = family
        .iter()
        .map(|p| io::read(p).map(|f| f.tournament))
        .collect::<Result<_, _>>()?;
    let report = empirical_eh_exponent(&forbidden, sizes, samples, seed, max_tries)?;
    let mut checks = Vec::new();
    let mut audited = 0;
    let mut bad = Vec::new();
    for s in report.samples.iter().filter(|s| s.n <= EXPONENT_AUDIT_MAX) {
        let Some(t) =
            random_free_tournament(s.n, &forbidden, sample_seed(seed, s.n, s.index), max_tries)
        else {
            bad.push(s.index);
            continue;
        };
        let free = forbidden
            .iter()
            .all(|h| matches!(brute_force_contains(&t, h), Ok(None)));
        if !free || audit::max_transitive(&t) != s.tr || sample_seed(seed, s.n, s.index) != s.seed {
            bad.push(s.index);
        }
        audited += 1;
    }
    checks.push(Check::new(
        "samples",
        bad.is_empty(),
        format!("{audited} samples regenerated; freeness and tr re-derived by brute force"),
    ));
    let points: Vec<(f64, f64)> = report
        .samples
        .iter()
        .map(|s| ((s.n as f64).ln(), (s.tr as f64).ln()))
        .collect();
    let refit = audit::least_squares(&points);
    let agrees = match (refit, report.slope, report.intercept) {
        (Some((s, i)), Some(rs), Some(ri)) => (s - rs).abs() < 1e-9 && (i - ri).abs() < 1e-9,
        (None, None, _) => true,
        _ => false,
    };
    checks.push(Check::new(
        "fit",
        agrees,
        "slope and intercept refitted from the raw samples",
    ));
    let flagged: Vec<usize> = report
        .failures
        .iter()
        .filter(|f| f.flagged)
        .map(|f| f.n)
        .collect();
    let doc = ReportDocument::new(
        "exponent",
        json!({
            "family": family.iter().map(|p| show(p)).collect::<Vec<_>>(),
            "sizes": sizes,
            "samples": samples,
            "max_tries": max_tries,
        }),
        Some(seed),
        json!({
            "slope": report.slope,
            "intercept": report.intercept,
            "std_error": report.std_error,
            "band": report.band,
            "flagged_sizes": flagged,
            "failures": report.failures,
            "raw": report.samples,
        }),
        checks,
    );
    Ok(Output::report(doc))
}

fn filter_name(f: Filter) -> &'static str {
    match f {
        Filter::All => "all",
        Filter::Prime => "prime",
        Filter::Nebula => "nebula",
        Filter::Left => "left",
        Filter::Right => "right",
        Filter::Central => "central",
        Filter::Galaxy => "galaxy",
    }
}

fn filter_kind(f: Filter) -> Option<OrderingKind> {
    match f {
        Filter::Nebula => Some(OrderingKind::Nebula),
        Filter::Left => Some(OrderingKind::Left),
        Filter::Right => Some(OrderingKind::Right),
        Filter::Central => Some(OrderingKind::Central),
        Filter::Galaxy => Some(OrderingKind::Galaxy),
        Filter::All | Filter::Prime => None,
    }
}

/// Largest `n` at which an ordering filter is re-derived over all `n!`
/// orderings.
const ORDERING_AUDIT_MAX: usize = 6;

fn enumerate(n: usize, filter: Filter, out: Option<&Path>) -> CmdResult<Output> {
    let classes = enumerate_tournaments(n)?;
    let mut keep = Vec::new();
    for t in &classes {
        let hit = match filter {
            Filter::All => true,
            Filter::Prime => is_prime(t),
            _ => find_ordering(t, filter_kind(filter).expect("ordering filter"))?.is_some(),
        };
        keep.push(hit);
    }
    let mut checks = Vec::new();
    if let Some(&want) = CLASS_COUNTS.get(n) {
        checks.push(Check::new(
            "class-count",
            classes.len() == want,
            format!("{} classes, known count {want}", classes.len()),
        ));
    }
    if n <= 5 {
        checks.push(Check::new(
            "distinct",
            pairwise_distinct(&classes),
            "no two classes are isomorphic under any of the n! relabelings",
        ));
    }
    match filter {
        Filter::All => {}
        Filter::Prime => {
            let agree = classes
                .iter()
                .zip(&keep)
                .all(|(t, &k)| k == (n <= 2 || audit::nontrivial_module(t).is_none()));
            checks.push(Check::new(
                "filter",
                agree,
                "primality re-derived by scanning all subsets",
            ));
        }
        f if n <= ORDERING_AUDIT_MAX => {
            let kind = filter_kind(f).expect("ordering filter");
            let agree = classes
                .iter()
                .zip(&keep)
                .all(|(t, &k)| k == audit::ordering_exists(t, kind));
            checks.push(Check::new(
                "filter",
                agree,
                "orderings re-derived over all n! permutations",
            ));
        }
        _ => checks.push(Check::new(
            "filter",
            true,
            format!("not re-derived above {ORDERING_AUDIT_MAX} vertices"),
        )),
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| input(format!("cannot create {}: {e}", show(dir))))?;
        for (i, t) in classes
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(t, _)| t)
            .enumerate()
        {
            write_file(&dir.join(format!("class-{i:05}.txt")), &io::write_matrix(t))?;
        }
    }
    let matched = keep.iter().filter(|&&k| k).count();
    let doc = ReportDocument::new(
        "enumerate",
        json!({"n": n, "filter": filter_name(filter), "out": out.map(show)}),
        None,
        json!({"n": n, "classes": classes.len(), "matched": matched}),
        checks,
    );
    Ok(Output::report(doc))
}

fn pairwise_distinct(classes: &[Tournament]) -> bool {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    let Some(n) = classes.first().map(|t| t.order()) else {
        return true;
    };
    let all = perms(n);
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            let iso = all.iter().any(|p| {
                (0..n).all(|u| (0..n).all(|v| u == v || a.beats(u, v) == b.beats(p[u], p[v])))
            });
            if iso {
                return false;
            }
        }
    }
    true
}
