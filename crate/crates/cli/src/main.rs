mod report;
mod values;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nlgame::game::{self, feige, find_isomorphism, guessing_components, or_game, parallel_repeat, Game};
use nlgame::lp::{self, ns_value, Backend};
use nlgame::ncpoly::{self, SosCertificate};
use nlgame::npa;
use nlgame::quantum::{self, NuMatrix};
use nlgame::rational;
use nlgame::strategies::{CMatrix, DeterministicStrategy};
use nlgame::{classical, Error};
use serde_json::{json, Value};

use report::{exact, float, Report};
use values::{SearchFlags, Which};

#[derive(Parser)]
#[command(name = "nlgame", version, about = "Values and certificates for two-player nonlocal games")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One entry of the parallel-repetition table.
    Values {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        #[arg(long, value_enum)]
        which: Which,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// The full table for n = 1..4.
    Table {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Upper bound on the quantum value from a moment relaxation.
    Npa {
        /// `feige`, `feige-sync`, `chsh`, or a game JSON file.
        #[arg(long, default_value = "feige")]
        game: String,
        #[arg(long, default_value = "1+AB")]
        level: String,
        /// Impose synchronicity constraints.
        #[arg(long)]
        sync: bool,
        #[arg(long, default_value_t = npa::DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Sum-of-squares certificates for Feige's game.
    Sos {
        #[command(subcommand)]
        action: SosAction,
    },
    /// Non-signalling value of the n-fold repetition.
    NsValue {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        #[arg(long, value_enum, default_value = "exact")]
        backend: BackendArg,
        /// Solve the full LP instead of the symmetry-reduced one.
        #[arg(long)]
        no_symmetry: bool,
        /// Write the LP in text form to this path.
        #[arg(long)]
        export_lp: Option<PathBuf>,
    },
    /// Classical value of the n-fold repetition or of a game file.
    Classical {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), conflicts_with = "game")]
        n: Option<u8>,
        #[arg(long)]
        game: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Residual diagnostics for the explicit strategy family.
    Selftest {
        #[arg(long, default_value_t = 0.75)]
        p: f64,
    },
    /// Hadamard-like unitary and biased representation for an overlap matrix.
    Nubias {
        /// JSON rows of numbers or rational strings; defaults to the Feige overlaps.
        #[arg(long)]
        nu: Option<PathBuf>,
    },
    /// Checks Feige's game against the OR of the two guessing games.
    Orgame,
}

#[derive(clap::Args, Clone)]
struct SearchArgs {
    /// Remove the node budget from long searches.
    #[arg(long)]
    extended: bool,
    /// Node budget for branch and bound.
    #[arg(long)]
    budget: Option<u64>,
    /// Deterministic strategy JSON seeding the incumbent.
    #[arg(long)]
    seed_strategy: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SosAction {
    /// Solve the Gram feasibility problem at λ and round to an exact certificate.
    Derive {
        #[arg(long, default_value = "9/16")]
        lambda: String,
        /// Required smallest eigenvalue of the floating Gram matrix.
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long, default_value_t = npa::CERTIFICATE_DENOMINATOR)]
        denominator: u64,
        #[arg(long, default_value = "certificate.json")]
        out: PathBuf,
    },
    /// Exact verification of a certificate file.
    Verify {
        #[arg(long, default_value = "certificate.json")]
        cert: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

fn read(report: &mut Report, path: &Path) -> nlgame::Result<String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    report.input(text.as_bytes());
    Ok(text)
}

fn search_flags(report: &mut Report, args: &SearchArgs) -> nlgame::Result<SearchFlags> {
    let seed = match &args.seed_strategy {
        Some(p) => Some(DeterministicStrategy::from_json(&read(report, p)?)?),
        None => None,
    };
    Ok(SearchFlags {
        extended: args.extended,
        budget: args.budget,
        seed,
    })
}

fn named_game(report: &mut Report, name: &str) -> nlgame::Result<Game> {
    match name {
        "feige" => Ok(feige()),
        "feige-sync" => Ok(game::feige_sync()),
        "chsh" => Ok(game::chsh()),
        path => Game::from_json(&read(report, Path::new(path))?),
    }
}

fn complex_matrix(m: &CMatrix) -> Value {
    json!((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn run(cmd: &Command, report: &mut Report) -> nlgame::Result<()> {
    match cmd {
        Command::Values { n, which, search } => {
            let flags = search_flags(report, search)?;
            let v = report.timed("values", || values::entry(*n as usize, *which, &flags))?;
            report.set("n", json!(n));
            report.set("which", json!(format!("{which:?}").to_lowercase()));
            report.set("result", v);
        }
        Command::Table { search } => {
            let flags = search_flags(report, search)?;
            for which in [Which::Classical, Which::Quantum, Which::Ns] {
                let name = format!("{which:?}").to_lowercase();
                let mut row = serde_json::Map::new();
                for n in 1..=4 {
                    let v = report.timed(&format!("{name}_{n}"), || values::entry(n, which, &flags))?;
                    row.insert(format!("n={n}"), v);
                }
                report.set(&name, Value::Object(row));
            }
        }
        Command::Npa { game, level, sync, max_dim } => {
            let g = named_game(report, game)?;
            let level = npa::parse_level(level)?;
            let p = npa::build_moment_sdp_with_limit(&g, &level, *sync, *max_dim)?;
            let sol = report.timed("solve", || npa::sdp_solve(&p))?;
            report.set("level", json!(level.to_string()));
            report.set("sync", json!(sync));
            report.set("dimension", json!(p.dim()));
            report.set("variables", json!(p.variables.len()));
            report.set("value", float(sol.value, 1e-6));
            report.set("primal_value", float(sol.primal_value, 1e-6));
            report.set("gap", json!(sol.gap()));
            report.set("iterations", json!(sol.iterations));
        }
        Command::Sos { action } => match action {
            SosAction::Derive {
                lambda,
                epsilon,
                denominator,
                out,
            } => {
                let lambda = rational::parse(lambda)?;
                report.set("lambda", exact(&lambda));
                let g = feige();
                let basis = ncpoly::certificate_basis();
                let fg = report.timed("feasibility", || npa::feasibility_sdp(&basis, &lambda, *epsilon, &g));
                let fg = match fg {
                    Ok(fg) => fg,
                    Err(Error::Infeasible) => {
                        report.set("status", json!("infeasible"));
                        report.fail();
                        return Ok(());
                    }
                    Err(e) => return Err(e),
                };
                report.set("min_eigenvalue", float(fg.min_eigenvalue, 1e-8));
                let cert = report.timed("rounding", || npa::round_certificate(&fg.system, &fg.y, *denominator))?;
                std::fs::write(out, cert.to_json())
                    .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", out.display())))?;
                report.set("status", json!("derived"));
                report.set("certificate", json!(out.display().to_string()));
                report.set("basis_size", json!(cert.basis.len()));
            }
            SosAction::Verify { cert } => {
                let cert = SosCertificate::from_json(&read(report, cert)?)?;
                let g = feige();
                let identity = report.timed("identity", || ncpoly::sos_verify(&cert, &g))?;
                let pd = report.timed("definiteness", || ncpoly::rational_pd_check(&cert.y))?;
                report.set("lambda", exact(&cert.lambda));
                report.set("identity", json!(identity));
                report.set("positive_definite", json!(pd));
                if !(identity && pd) {
                    report.fail();
                }
            }
        },
        Command::NsValue {
            n,
            backend,
            no_symmetry,
            export_lp,
        } => {
            let n = *n as usize;
            let g = parallel_repeat(&feige(), n)?;
            if let Some(path) = export_lp {
                std::fs::write(path, lp::to_text(&lp::ns_lp(&g)))
                    .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
                report.set("exported", json!(path.display().to_string()));
            }
            let backend = match backend {
                BackendArg::Exact => Backend::Exact,
                BackendArg::Float => Backend::Float,
            };
            let opts = values::ns_options(n, backend, !no_symmetry)?;
            let r = report.timed("solve", || ns_value(&g, &opts))?;
            let value = match &r.value {
                nlgame::strategies::Value::Exact(v) => exact(v),
                nlgame::strategies::Value::Float(f) => float(*f, 1e-7),
            };
            report.set("n", json!(n));
            report.set("value", value);
            report.set("promoted", json!(r.promoted));
            report.set("certified", json!(r.certified));
            report.set("rows", json!(r.rows));
            report.set("variables", json!(r.vars));
        }
        Command::Classical { n, game, search } => {
            let flags = search_flags(report, search)?;
            match (n, game) {
                (_, Some(path)) => {
                    let g = Game::from_json(&read(report, path)?)?;
                    let opts = classical::BnbOptions {
                        budget: if flags.extended { None } else { flags.budget },
                        incumbent: flags.seed.clone(),
                        ..Default::default()
                    };
                    let r = report.timed("search", || classical::classical_value_bnb(&g, &opts))?;
                    report.set("value", exact(&r.optimum));
                    report.set("complete", json!(r.complete));
                    report.set("nodes", json!(r.nodes_explored));
                    report.set("witness", json!(r.witness));
                }
                (Some(n), None) => {
                    let v = report.timed("search", || values::classical_entry(*n as usize, &flags))?;
                    report.set("result", v);
                }
                (None, None) => return Err(Error::Invalid("either --n or --game is required".into())),
            }
        }
        Command::Selftest { p } => {
            let s = quantum::feige_optimal_strategy(*p)?;
            let r = report.timed("residuals", || quantum::determining_residuals(&s))?;
            report.set("p", json!(p));
            report.set("formula", float(quantum::winning_formula(*p)?, 1e-12));
            report.set("report", serde_json::to_value(&r)?);
            if let Ok(nu) = quantum::nu_of_strategy(&s) {
                report.set("nu", json!(nu));
            }
        }
        Command::Nubias { nu } => {
            let nu = match nu {
                Some(path) => NuMatrix::from_json(&read(report, path)?)?,
                None => NuMatrix::feige(),
            };
            let degeneracy = quantum::check_degeneracy_condition(&nu);
            report.set("nu", json!(nu.entries));
            report.set("degeneracy", serde_json::to_value(&degeneracy)?);
            match quantum::nu_biased_rep(&nu) {
                Ok(rep) => {
                    report.set("h", complex_matrix(&rep.h));
                    report.set("e", json!(rep.e.iter().map(complex_matrix).collect::<Vec<_>>()));
                    report.set("f", json!(rep.f.iter().map(complex_matrix).collect::<Vec<_>>()));
                    report.set("residual", json!(rep.residual(&nu)));
                }
                Err(e) => {
                    report.set("error", json!(e.to_string()));
                    report.fail();
                }
            }
        }
        Command::Orgame => {
            let (g1, g2) = guessing_components();
            let combined = or_game(&g1, &g2)?;
            let iso = find_isomorphism(&combined, &feige());
            report.set("isomorphism", json!(iso));
            if iso.is_none() {
                report.fail();
            }
            for (name, g) in [("first", &g1), ("second", &g2)] {
                let c = classical::classical_value_exhaustive(g)?.optimum;
                let ns = ns_value(g, &Default::default())?;
                let ns_v = ns.value.exact().cloned();
                let half = rational::ratio(1, 2);
                if c != half || ns_v.as_ref() != Some(&half) {
                    report.fail();
                }
                report.set(
                    name,
                    json!({
                        "classical": exact(&c),
                        "ns": ns_v.as_ref().map(exact),
                        "quantum": exact(&half),
                    }),
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let mut report = Report::new(std::env::args().skip(1).collect());
    if let Err(e) = run(&cli.command, &mut report) {
        report.set("error", json!(e.to_string()));
        report.fail();
    }
    let (v, pass) = report.finish();
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
    } else {
        report::print_human(&v);
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
