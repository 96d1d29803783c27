//! The `sps` command line. Reports go to stdout as JSON; diagrams and DOT
//! go to files (or stdout when no output path is given).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::congruence::{
    check_p2, congruence_lattice, ji_poset_has_at_most_two_covers, prime_ideal_congruence, principal_ideal, P2Status,
};
use crate::diagram::PlanarDiagram;
use crate::exec::Execution;
use crate::io::{self, DotOptions, IoError};
use crate::lattice::DualAtoms;
use crate::rect::{grid, insert_fork, rectangular_profile, resolve_selector, run_script, GridSpec};
use crate::search::{
    enumerate_family, search_representation, verify_claims, CampaignOptions, EnumSpec, ExpansionOrder,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Violation = 1,
    InvalidInput = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sps",
    version,
    about = "Slim rectangular lattice construction and congruence checks"
)]
struct Cli {
    /// Run campaign work on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Bounds {
    #[arg(long, default_value_t = 4)]
    pmax: usize,
    #[arg(long, default_value_t = 4)]
    qmax: usize,
    #[arg(long = "max-forks", default_value_t = 3)]
    max_forks: usize,
    #[arg(long = "max-elements", default_value_t = 40)]
    max_elements: usize,
    #[arg(long = "max-classes", default_value_t = 100_000)]
    max_classes: usize,
}

impl Bounds {
    fn spec(&self) -> EnumSpec {
        EnumSpec {
            p_max: self.pmax,
            q_max: self.qmax,
            max_forks: self.max_forks,
            min_forks: 0,
            max_elements: self.max_elements,
            max_classes: self.max_classes,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Prop {
    Slim,
    Sm,
    Graded,
    Rect,
    P1,
    P2,
    PrimeIdeals,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the grid C_P x C_Q.
    Grid {
        p: usize,
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Insert a fork at the cell whose bottom element is O_ID.
    Fork {
        input: PathBuf,
        #[arg(long)]
        cell: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a fork script.
    Script {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving every intermediate diagram.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check structural properties and claims.
    Check {
        input: PathBuf,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "slim,sm,graded,rect,p1,p2,prime-ideals"
        )]
        props: Vec<Prop>,
    },
    /// Print the congruence lattice.
    Con {
        input: PathBuf,
        #[arg(long, conflicts_with = "dual_atoms")]
        ji: bool,
        #[arg(long = "dual-atoms")]
        dual_atoms: bool,
    },
    /// Enumerate the grid + fork family and verify the claims over it.
    Enumerate {
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hand out expansion work in a shuffled order.
        #[arg(long)]
        shuffle: Option<u64>,
    },
    /// Look for family members whose congruence lattice matches TARGET.
    Search {
        target: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Export a diagram as Graphviz DOT.
    Render {
        input: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        #[arg(long)]
        labels: bool,
    },
}

enum Failure {
    Invalid(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

/// Runs the command line and returns the process status. Everything meant
/// for the user goes to `stdout`; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    ExitStatus::Success
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    ExitStatus::InvalidInput
                }
            };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match dispatch(cli.command, exec, stdout) {
        Ok(status) => status,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            ExitStatus::InvalidInput
        }
    }
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => io::write_text(path, text)?,
        None => stdout.write_all(text.as_bytes()).map_err(invalid)?,
    }
    Ok(())
}

fn dispatch(cmd: Command, exec: Execution, stdout: &mut dyn Write) -> Result<ExitStatus, Failure> {
    match cmd {
        Command::Grid { p, q, out } => {
            let g = grid(GridSpec::new(p, q)).map_err(invalid)?;
            emit(
                stdout,
                out.as_deref(),
                &io::diagram_to_json(&g, &format!("grid-{p}x{q}")),
            )?;
            Ok(ExitStatus::Success)
        }
        Command::Fork { input, cell, out } => {
            let (d, name) = io::load(&input)?;
            let c = resolve_selector(&d, 1, cell).map_err(invalid)?;
            let r = insert_fork(&d, &c).map_err(invalid)?;
            emit(
                stdout,
                out.as_deref(),
                &io::diagram_to_json(&r.diagram, &format!("{name}-fork{cell}")),
            )?;
            Ok(ExitStatus::Success)
        }
        Command::Script { input, out, trace } => {
            let script = io::load_script(&input)?;
            let (d, steps) = run_script(&script).map_err(invalid)?;
            let [p, q] = script.grid;
            let name = format!("script-{p}x{q}-{}", script.steps.len());
            if let Some(dir) = trace {
                for (i, s) in steps.iter().enumerate() {
                    io::save(s, &format!("{name}-step{i}"), &dir.join(format!("step-{i:02}.json")))?;
                }
            }
            emit(stdout, out.as_deref(), &io::diagram_to_json(&d, &name))?;
            Ok(ExitStatus::Success)
        }
        Command::Check { input, props } => {
            let (d, _) = io::load(&input)?;
            let (report, ok) = check_props(&d, &props);
            emit(stdout, None, &io::json(&report))?;
            Ok(if ok { ExitStatus::Success } else { ExitStatus::Violation })
        }
        Command::Con { input, ji, dual_atoms } => {
            let (d, _) = io::load(&input)?;
            let con = congruence_lattice(&d);
            let value = if ji {
                let poset = con.ji_poset();
                let covers: Vec<[usize; 2]> = (0..poset.len())
                    .flat_map(|i| poset.upper_covers(i).iter().map(move |&j| [i, j]))
                    .collect();
                json!({ "join_irreducibles": poset.members(), "covers": covers })
            } else if dual_atoms {
                json!({ "dual_atoms": con.dual_atoms(), "count": con.dual_atom_count() })
            } else {
                json!({ "congruences": con.members(), "size": con.len() })
            };
            emit(stdout, None, &io::json(&value))?;
            Ok(ExitStatus::Success)
        }
        Command::Enumerate { bounds, out, shuffle } => {
            let spec = bounds.spec();
            let opts = CampaignOptions {
                exec,
                order: shuffle.map_or(ExpansionOrder::Sorted, ExpansionOrder::Shuffled),
            };
            let family = enumerate_family(&spec, opts).map_err(invalid)?;
            let report = verify_claims(&family, Some(&spec), exec);
            if let Some(dir) = out {
                let mut index = Vec::new();
                for (i, (key, e)) in family.entries().enumerate() {
                    let file = format!("member-{i:05}.json");
                    io::save(&e.diagram, &format!("member-{i:05}"), &dir.join(&file))?;
                    index.push(json!({
                        "file": file,
                        "key": hex(key),
                        "script": e.script,
                        "stats": e.stats,
                    }));
                }
                io::write_text(&dir.join("index.json"), &io::json(&index))?;
                io::write_text(&dir.join("report.json"), &report.to_json(true))?;
            }
            emit(stdout, None, &report.to_json(true))?;
            Ok(if report.all_pass() {
                ExitStatus::Success
            } else {
                ExitStatus::Violation
            })
        }
        Command::Search { target, bounds } => {
            let (t, _) = io::load(&target)?;
            let spec = bounds.spec();
            let opts = CampaignOptions {
                exec,
                order: ExpansionOrder::Sorted,
            };
            let outcome = search_representation(&t, &spec, opts).map_err(invalid)?;
            let value = json!({
                "spec": spec,
                "tool_version": crate::VERSION,
                "witnesses": outcome.witnesses,
                "note": outcome.note,
                "filter": outcome.filter,
                "scanned": outcome.scanned,
                "family_size": outcome.family_size,
            });
            emit(stdout, None, &io::json(&value))?;
            Ok(ExitStatus::Success)
        }
        Command::Render { input, dot, labels } => {
            let (d, name) = io::load(&input)?;
            let text = io::render_dot(
                &d,
                &DotOptions {
                    name: Some(name),
                    show_labels: labels,
                },
            );
            io::write_text(&dot, &text)?;
            Ok(ExitStatus::Success)
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Evaluates the requested properties; the flag is false when any of them
/// fails.
fn check_props(d: &PlanarDiagram, props: &[Prop]) -> (BTreeMap<&'static str, Value>, bool) {
    let mut props = props.to_vec();
    props.sort();
    props.dedup();
    let mut out = BTreeMap::new();
    let mut ok = true;
    let mut con = None;
    for prop in props {
        match prop {
            Prop::Slim => {
                let v = d.is_slim();
                ok &= v;
                out.insert("slim", json!(v));
            }
            Prop::Sm => {
                let v = d.is_semimodular();
                ok &= v;
                out.insert("sm", json!(v));
            }
            Prop::Graded => {
                let v = d.is_graded();
                ok &= v;
                out.insert("graded", json!(v));
            }
            Prop::Rect => match rectangular_profile(d) {
                Ok(p) => {
                    out.insert("rect", json!(true));
                    out.insert("corners", json!(p));
                }
                Err(e) => {
                    ok = false;
                    out.insert("rect", json!(false));
                    out.insert("rect_reason", json!(e.to_string()));
                }
            },
            Prop::P1 => {
                let c = con.get_or_insert_with(|| congruence_lattice(d));
                let v = ji_poset_has_at_most_two_covers(&c.ji_poset());
                ok &= v;
                out.insert("p1", json!(v));
            }
            Prop::P2 => {
                let (status, count) = check_p2(d);
                ok &= status != P2Status::Fails;
                out.insert("p2", json!(status));
                out.insert("dual_atoms", json!(count));
            }
            Prop::PrimeIdeals => {
                let c = con.get_or_insert_with(|| congruence_lattice(d));
                let verdict = match rectangular_profile(d) {
                    Err(_) => "exempt",
                    Ok(p) if !p.corners_below_top(d) => "exempt",
                    Ok(p) => {
                        let thetas: Vec<_> = [p.c_l, p.c_r]
                            .iter()
                            .map(|&c| prime_ideal_congruence(d, &principal_ideal(d, c).members).ok())
                            .collect();
                        let holds = match (&thetas[0], &thetas[1]) {
                            (Some(a), Some(b)) => a != b && c.is_dual_atom(a) && c.is_dual_atom(b),
                            _ => false,
                        };
                        if holds {
                            "holds"
                        } else {
                            "fails"
                        }
                    }
                };
                ok &= verdict != "fails";
                out.insert("prime_ideals", json!(verdict));
            }
        }
    }
    (out, ok)
}
