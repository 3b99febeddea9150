use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use reltab::error::{Error, Verdict};
use reltab::io::{
    read_document, relation_to_json, table_to_csv, table_to_json, DiagramDoc, LoadError, MorphismDoc, Ref, Workspace,
};
use reltab::laws::run_all;
use reltab::queries::{limit_diagram, natural_join, union_same_signature, JoinOptions};
use reltab::relations::{image_of_table, include_relation, Relation};
use reltab::sets::ClassNaming;
use reltab::tables::{sigma_table, substitute_table, Table};
use reltab::tuples::{SignedDomain, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "reltab", version, about = "Relational tables over typed signatures")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized law checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest tuple set any command may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    max_tuples: u128,
    /// Rename result keys to r1, r2, … in key order.
    #[arg(long, global = true)]
    fresh_keys: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check every table of a workspace against its signed domain.
    Validate { workspace: PathBuf },
    /// List all legal tuples of a signature over a domain.
    Enumerate {
        workspace: PathBuf,
        #[arg(long)]
        signature: String,
        #[arg(long)]
        domain: String,
    },
    /// Natural join of two tables on their shared attribute names.
    Join {
        workspace: PathBuf,
        left: String,
        right: String,
        /// Name every result attribute `table.attribute`.
        #[arg(long)]
        qualified: bool,
    },
    /// Tagged disjoint union of two tables over one signed domain.
    Union {
        workspace: PathBuf,
        left: String,
        right: String,
    },
    /// Pull a table over the morphism's source back to its target.
    Substitute {
        workspace: PathBuf,
        table: String,
        morphism: PathBuf,
    },
    /// Push a table over the morphism's target forward to its source.
    Sigma {
        workspace: PathBuf,
        table: String,
        morphism: PathBuf,
    },
    /// The relation of distinct rows of a table.
    Image { workspace: PathBuf, table: String },
    /// A relation as a table keyed by its tuples.
    Include { workspace: PathBuf, relation: String },
    /// Run the randomized law suites.
    CheckLaws {
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
    /// Limit of a diagram of tables and fiber morphisms.
    Limit { workspace: PathBuf, diagram: PathBuf },
}

enum Failure {
    Semantic(String),
    Resolution(String),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        if e.is_resolution() {
            Failure::Resolution(e.to_string())
        } else {
            Failure::Semantic(e.to_string())
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Semantic(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn emit(cli: &Cli, text: &str) -> Outcome {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Resolution(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(cli: &Cli, t: &Table) -> Outcome {
    let t = if cli.fresh_keys { t.renumbered() } else { t.clone() };
    match cli.format {
        Format::Json => emit(cli, &table_to_json(&t)),
        Format::Csv => emit(cli, &table_to_csv(&t)),
    }
}

fn emit_relation(cli: &Cli, r: &Relation) -> Outcome {
    match cli.format {
        Format::Json => emit(cli, &relation_to_json(r)),
        Format::Csv => emit_table(cli, &include_relation(r)),
    }
}

fn load(path: &Path) -> std::result::Result<Workspace, Failure> {
    Ok(Workspace::load(path)?)
}

fn run(cli: &Cli) -> Outcome {
    let cap = cli.max_tuples;
    match &cli.command {
        Command::Validate { workspace } => {
            let ws = load(workspace)?;
            let lines = ws.validate();
            if lines.is_empty() {
                eprintln!("ok: {} tables valid", ws.tables.len());
                Ok(())
            } else {
                for l in &lines {
                    eprintln!("{l}");
                }
                Err(Failure::Semantic(format!("{} invalid tables", lines.len())))
            }
        }
        Command::Enumerate {
            workspace,
            signature,
            domain,
        } => {
            let ws = load(workspace)?;
            let s = ws.signature(&Ref::Name(signature.clone()))?;
            let a = ws.domain(&Ref::Name(domain.clone()))?;
            let d = SignedDomain::new(s, a)?;
            let all = Relation::full(d, cap)?;
            emit_relation(cli, &all)
        }
        Command::Join {
            workspace,
            left,
            right,
            qualified,
        } => {
            let ws = load(workspace)?;
            let (t1, t2) = (ws.valid_table(left)?, ws.valid_table(right)?);
            let opts = JoinOptions {
                labels: (left.clone(), right.clone()),
                naming: if *qualified {
                    ClassNaming::Qualified
                } else {
                    ClassNaming::Representative
                },
                cap,
            };
            let join = natural_join(t1, t2, &opts)?;
            for joined in join.table.signature().arity().iter() {
                let sources: Vec<String> = [(left, &join.left), (right, &join.right)]
                    .into_iter()
                    .flat_map(|(name, leg)| {
                        leg.arity_map()
                            .preimage(joined)
                            .into_iter()
                            .map(move |a| format!("{name}.{a}"))
                    })
                    .collect();
                let note = if sources.len() > 1 { "identified" } else { "kept" };
                eprintln!("{note}: {joined} = {}", sources.join(" = "));
            }
            emit_table(cli, &join.table)
        }
        Command::Union { workspace, left, right } => {
            let ws = load(workspace)?;
            let u = union_same_signature(ws.valid_table(left)?, ws.valid_table(right)?)?;
            emit_table(cli, &u.table)
        }
        Command::Substitute {
            workspace,
            table,
            morphism,
        } => {
            let ws = load(workspace)?;
            let m = ws.morphism(&read_document::<MorphismDoc>(morphism)?)?;
            let (pulled, _) = substitute_table(&m, ws.valid_table(table)?, cap)?;
            emit_table(cli, &pulled)
        }
        Command::Sigma {
            workspace,
            table,
            morphism,
        } => {
            let ws = load(workspace)?;
            let m = ws.morphism(&read_document::<MorphismDoc>(morphism)?)?;
            emit_table(cli, &sigma_table(&m, ws.valid_table(table)?)?)
        }
        Command::Image { workspace, table } => {
            let ws = load(workspace)?;
            emit_relation(cli, &image_of_table(ws.valid_table(table)?))
        }
        Command::Include { workspace, relation } => {
            let ws = load(workspace)?;
            emit_table(cli, &include_relation(ws.relation(relation)?))
        }
        Command::CheckLaws { instances } => {
            let reports = run_all(cli.seed, *instances)?;
            let mut failed = 0;
            let mut lines = String::new();
            for r in &reports {
                match &r.verdict {
                    Verdict::Accept if r.controls > 0 => lines.push_str(&format!(
                        "pass {} ({} instances, {} broken inputs rejected)\n",
                        r.name, r.instances, r.controls
                    )),
                    Verdict::Accept => lines.push_str(&format!("pass {} ({} instances)\n", r.name, r.instances)),
                    Verdict::Reject(w) => {
                        failed += 1;
                        lines.push_str(&format!("FAIL {}: {w}\n", r.name));
                    }
                }
            }
            emit(cli, &lines)?;
            if failed > 0 {
                return Err(Failure::Semantic(format!("{failed} laws failed")));
            }
            Ok(())
        }
        Command::Limit { workspace, diagram } => {
            let ws = load(workspace)?;
            let d = ws.diagram(&read_document::<DiagramDoc>(diagram)?)?;
            let limit = limit_diagram(&d, ClassNaming::Representative, cap)?;
            emit_table(cli, &limit.table)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Resolution(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
