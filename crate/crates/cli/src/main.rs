use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use flatleaf::codec::{
    factors_to_json, foliation_report_to_json, intersection_report_to_json, matrix_group_to_json,
    parse_rat_list, sublattice_to_json, validate_report, GroupDocument, MatricesDocument,
    SubspaceDocument, TableDocument,
};
use flatleaf::corpus::{klein_bottle, regular_rep, FiniteGroupTable};
use flatleaf::foliation::FoliationContext;
use flatleaf::intersect::ComplementaryPair;
use flatleaf::invariant::{
    find_proper_invariant_subspace, invariant_complement, minimal_decomposition, MatrixGroup,
    DEFAULT_GROUP_BOUND, DEFAULT_NORM_BOUND,
};
use flatleaf::lattice::Sublattice;

const EXIT_INVALID: u8 = 2;
const EXIT_ORACLE_MISMATCH: u8 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] flatleaf::Error),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

impl CliError {
    fn kind(&self) -> String {
        match self {
            CliError::Lib(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("Error")
                    .to_string()
            }
            CliError::Io { .. } => "Io".into(),
            CliError::OracleMismatch(_) => "OracleMismatch".into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::OracleMismatch(_) => EXIT_ORACLE_MISMATCH,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "flatleaf",
    version,
    about = "Exact computations with Bieberbach groups and their foliations"
)]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Largest holonomy group accepted when closing generators.
    #[arg(long, default_value_t = DEFAULT_GROUP_BOUND, global = true)]
    group_bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and validate a group document.
    Validate { group: PathBuf },
    /// Search for a proper invariant subspace of the holonomy group.
    Reduce {
        group: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NORM_BOUND)]
        bound: usize,
        /// Read a bare matrices document instead of a group document.
        #[arg(long)]
        matrices_only: bool,
    },
    /// Foliation report for an invariant subspace.
    Foliate {
        group: PathBuf,
        subspace: PathBuf,
        /// Rational coset representative, e.g. `1/2,0,1/3`; may be repeated.
        #[arg(long, allow_hyphen_values = true)]
        coset: Vec<String>,
    },
    /// Intersection numbers of generic leaves of two complementary subspaces.
    Intersect {
        group: PathBuf,
        v1: PathBuf,
        v2: PathBuf,
        /// Also run both brute-force counts and require agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Generalized Klein bottle with its constant and zero-average subspaces.
    Klein {
        #[arg(long)]
        n: usize,
        /// Write group.json, v_const.json and v_zeroavg.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Regular-representation matrices and coset subspaces of a finite group.
    RegularRep {
        /// Multiplication-table document; omit when using --named.
        table: Option<PathBuf>,
        /// Built-in group: cN, dN (order 2N), sN, aN, q8.
        #[arg(long)]
        named: Option<String>,
        /// Comma-separated subgroup element indices.
        #[arg(long)]
        subgroup: String,
        /// Write matrices.json, v1.json and v2.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Split a subspace (default: everything) into invariant summands.
    Decompose {
        group: PathBuf,
        #[arg(long)]
        subspace: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NORM_BOUND)]
        bound: usize,
        #[arg(long)]
        matrices_only: bool,
    },
    /// Invariant complement of an invariant subspace.
    Complement {
        group: PathBuf,
        subspace: PathBuf,
        #[arg(long)]
        matrices_only: bool,
    },
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_subspace(path: &Path) -> CliResult<Sublattice> {
    Ok(SubspaceDocument::from_json(&read(path)?)?.to_sublattice()?)
}

fn load_holonomy(path: &Path, matrices_only: bool, bound: usize) -> CliResult<MatrixGroup> {
    let text = read(path)?;
    if matrices_only {
        Ok(MatricesDocument::from_json(&text)?.to_group(bound)?)
    } else {
        Ok(GroupDocument::from_json(&text)?
            .to_bieberbach(bound)?
            .holonomy()
            .clone())
    }
}

fn named_group(name: &str) -> CliResult<FiniteGroupTable> {
    let bad = || {
        CliError::Lib(flatleaf::Error::Invalid(format!(
            "unknown group name {name:?}"
        )))
    };
    if name == "q8" {
        return Ok(FiniteGroupTable::quaternion());
    }
    let (kind, num) = name.split_at(1);
    let k: usize = num.parse().map_err(|_| bad())?;
    match kind {
        "c" if k >= 1 => Ok(FiniteGroupTable::cyclic(k)),
        "d" if k >= 3 => Ok(FiniteGroupTable::dihedral(k)),
        "s" if k >= 1 => Ok(FiniteGroupTable::symmetric(k)),
        "a" if k >= 1 => Ok(FiniteGroupTable::alternating(k)),
        _ => Err(bad()),
    }
}

fn parse_indices(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim().parse().map_err(|_| {
                CliError::Lib(flatleaf::Error::Invalid(format!(
                    "bad subgroup index {t:?}"
                )))
            })
        })
        .collect()
}

fn run(cli: &Cli) -> CliResult<Value> {
    let bound = cli.group_bound;
    match &cli.command {
        Command::Validate { group } => {
            let g = GroupDocument::from_json(&read(group)?)?.to_bieberbach(bound)?;
            Ok(validate_report(g.space_group()))
        }
        Command::Reduce {
            group,
            bound: norm,
            matrices_only,
        } => {
            let h = load_holonomy(group, *matrices_only, bound)?;
            Ok(match find_proper_invariant_subspace(&h, *norm) {
                Some(s) => json!({ "found": true, "subspace": sublattice_to_json(&s) }),
                None => json!({ "found": false, "status": "not-found", "bound": norm }),
            })
        }
        Command::Foliate {
            group,
            subspace,
            coset,
        } => {
            let g = GroupDocument::from_json(&read(group)?)?.to_bieberbach(bound)?;
            let ctx = FoliationContext::new(g, load_subspace(subspace)?)?;
            let cosets = coset
                .iter()
                .map(|c| parse_rat_list(c))
                .collect::<flatleaf::Result<Vec<_>>>()?;
            Ok(foliation_report_to_json(&ctx.report(&cosets)?))
        }
        Command::Intersect {
            group,
            v1,
            v2,
            oracle,
        } => {
            let g = GroupDocument::from_json(&read(group)?)?.to_bieberbach(bound)?;
            let pair = ComplementaryPair::new(&g, &load_subspace(v1)?, &load_subspace(v2)?)?;
            if !*oracle {
                return Ok(intersection_report_to_json(&pair.intersection_numbers()?));
            }
            let r = pair.with_oracles()?;
            let mut out = intersection_report_to_json(&r);
            let injective = pair.injectivity_violation().is_none();
            out["injective"] = json!(injective);
            if r.oracles_agree() != Some(true) || !injective {
                return Err(CliError::OracleMismatch(out.to_string()));
            }
            Ok(out)
        }
        Command::Klein { n, out_dir } => {
            let (g, vc, vz) = klein_bottle(*n)?;
            let gd = GroupDocument::from_group(g.space_group(), Some(vec![format!("klein-{n}")]));
            let cd = SubspaceDocument::from_sublattice(&vc, Some("constants".into()));
            let zd = SubspaceDocument::from_sublattice(&vz, Some("zero-average".into()));
            if let Some(dir) = out_dir {
                create_dir(dir)?;
                write(&dir.join("group.json"), &gd.to_json())?;
                write(&dir.join("v_const.json"), &cd.to_json())?;
                write(&dir.join("v_zeroavg.json"), &zd.to_json())?;
            }
            Ok(json!({
                "group": serde_json::to_value(&gd).expect("serializable"),
                "v_const": serde_json::to_value(&cd).expect("serializable"),
                "v_zeroavg": serde_json::to_value(&zd).expect("serializable"),
            }))
        }
        Command::RegularRep {
            table,
            named,
            subgroup,
            out_dir,
        } => {
            let h = match (table, named) {
                (Some(path), None) => {
                    let doc: TableDocument = serde_json::from_str(&read(path)?)
                        .map_err(|e| flatleaf::Error::InvalidTable(e.to_string()))?;
                    FiniteGroupTable::new(doc.table)?
                }
                (None, Some(name)) => named_group(name)?,
                _ => {
                    return Err(CliError::Lib(flatleaf::Error::Invalid(
                        "give exactly one of a table file or --named".into(),
                    )))
                }
            };
            let rep = regular_rep(&h, &parse_indices(subgroup)?)?;
            let md = MatricesDocument::from_group(&rep.holonomy, None);
            let d1 = SubspaceDocument::from_sublattice(
                &rep.coset_constant,
                Some("coset-constant".into()),
            );
            let d2 = SubspaceDocument::from_sublattice(
                &rep.coset_zero_sum,
                Some("coset-zero-sum".into()),
            );
            if let Some(dir) = out_dir {
                create_dir(dir)?;
                write(&dir.join("matrices.json"), &md.to_json())?;
                write(&dir.join("v1.json"), &d1.to_json())?;
                write(&dir.join("v2.json"), &d2.to_json())?;
            }
            Ok(json!({
                "matrices": serde_json::to_value(&md).expect("serializable"),
                "v1": serde_json::to_value(&d1).expect("serializable"),
                "v2": serde_json::to_value(&d2).expect("serializable"),
            }))
        }
        Command::Decompose {
            group,
            subspace,
            bound: norm,
            matrices_only,
        } => {
            let h = load_holonomy(group, *matrices_only, bound)?;
            let s = match subspace {
                Some(p) => load_subspace(p)?,
                None => Sublattice::full(h.dim()),
            };
            Ok(json!({
                "holonomy": matrix_group_to_json(&h),
                "factors": factors_to_json(&minimal_decomposition(&s, &h, *norm)?),
            }))
        }
        Command::Complement {
            group,
            subspace,
            matrices_only,
        } => {
            let h = load_holonomy(group, *matrices_only, bound)?;
            let s = load_subspace(subspace)?;
            Ok(json!({ "complement": sublattice_to_json(&invariant_complement(&s, &h)?) }))
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 1, out);
                    }
                    Value::Array(items) if items.iter().any(Value::is_object) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in items {
                            out.push_str(&format!("{pad}  -\n"));
                            render_text(item, indent + 2, out);
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", inline(val))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other))),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(inline).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}

fn emit(format: Format, v: &Value) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(v, 0, &mut s);
            s
        }
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            emit(cli.format, &v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            emit(cli.format, &v);
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
