//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a scenario claim failed, 2 usage or input
//! error, 3 undecided where a decision was asked for.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::catalog;
use crate::checker::{
    attainability_verdict, check_zero_attainable, decide_zero, default_delta_schedule, value_direction,
    CheckParams, Status, Verdict,
};
use crate::discrete::{parse_discrete_player1, parse_discrete_player2, run_discrete};
use crate::engine::{distance_to_target, run_match_with, MatchConfig, Target, DEFAULT_BLOCK_CAP};
use crate::error::{Error, Result};
use crate::format::{parse_game, parse_vector, print_game};
use crate::game::{Direction, Game};
use crate::scenarios::{self, RunOptions};
use crate::strategies::{build_strategy, parse_strategy, Side};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "attain", version, about = "Attainability checks and continuous-time simulations for vector-payoff games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a game in the text format.
    Show {
        /// Game file or bundled game name.
        game: String,
    },
    /// Value of the scalar game ⟨λ, G⟩.
    Value {
        /// Game file or bundled game name.
        game: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Decide whether the zero vector is attainable.
    CheckZero {
        game: String,
        /// Require every direction to be strictly positive.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether the vector x is attainable.
    CheckPoint {
        game: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Decreasing list of translations to try, e.g. `1,0.5,0.25`.
        #[arg(long)]
        delta_schedule: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
        #[arg(long)]
        json: bool,
    },
    /// Whether zero is attainable and whether every vector is.
    CheckAll {
        game: String,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
        #[arg(long)]
        json: bool,
    },
    /// Play two strategies against each other in continuous time.
    Simulate {
        game: String,
        #[arg(long)]
        p1: String,
        #[arg(long)]
        p2: String,
        #[arg(long)]
        horizon: f64,
        /// Write the trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BLOCK_CAP)]
        block_cap: u64,
        /// Report the largest distance to this point.
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        /// Start of the distance window.
        #[arg(long, default_value_t = 0.0)]
        from: f64,
    },
    /// Play in discrete stages.
    Discrete {
        game: String,
        #[arg(long)]
        stages: usize,
        /// `pure_u()`, `pure_b()`, `uniform()`, `alternating()`, `sign()`,
        /// `pure(i=..)` or `stationary(p=[..])`.
        #[arg(long, default_value = "sign()")]
        p1: String,
        /// `sign_counter()`, `pure(i=..)` or `stationary(q=[..])`.
        #[arg(long, default_value = "sign_counter()")]
        p2: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Bundled scenarios and their claims.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Debug, Subcommand)]
enum ScenarioAction {
    /// List scenarios and their claims.
    List,
    /// Run every claim of a scenario (`all` runs every scenario).
    Run {
        name: String,
        /// Run only this claim.
        #[arg(long)]
        claim: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

/// Reads a game from a file, falling back to the bundled names.
pub fn load_game(arg: &str) -> Result<Game> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Precondition(format!("cannot read {arg}: {e}")))?;
        return parse_game(&text);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    catalog::by_name(stem).ok_or_else(|| {
        Error::Precondition(format!(
            "no file `{arg}` and no bundled game of that name (bundled: {})",
            catalog::NAMES.join(", ")
        ))
    })
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Undecided => EXIT_UNDECIDED,
        _ => EXIT_OK,
    }
}

fn report(out: &mut dyn Write, v: &Verdict, json: bool) -> std::io::Result<()> {
    if json {
        return writeln!(out, "{}", v.to_json());
    }
    writeln!(out, "{:?} ({})", v.status, v.route)?;
    writeln!(out, "margin: {}", v.margin)?;
    if v.evidence_only {
        writeln!(out, "evidence only: sampled, not proven")?;
    }
    if let Some(c) = &v.certificate {
        writeln!(
            out,
            "certificate: {:?}, {} evaluations, min {} at {:?}, lower bound {}",
            c.kind,
            c.evaluations,
            c.min_value,
            c.argmin,
            c.lower_bound()
        )?;
    }
    if let Some(w) = &v.witness {
        writeln!(out, "witness: {}", serde_json::to_string(w).expect("witness serializes"))?;
    }
    for n in &v.notes {
        writeln!(out, "note: {n}")?;
    }
    for e in &v.evidence {
        writeln!(out, "evidence: {:?} ({}), margin {}", e.status, e.route, e.margin)?;
    }
    Ok(())
}

fn io(e: std::io::Error) -> Error {
    Error::Precondition(format!("output failed: {e}"))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Show { game } => {
            write!(out, "{}", print_game(&load_game(&game)?)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Value { game, lambda } => {
            let g = load_game(&game)?;
            let l = parse_vector(&lambda)?;
            let v = value_direction(&g, &Direction::raw(l))?;
            writeln!(out, "{v}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::CheckZero {
            game,
            strict,
            resolution,
            json,
        } => {
            let g = load_game(&game)?;
            let v = if strict {
                check_zero_attainable(&g, resolution, true)?
            } else {
                decide_zero(&g, resolution)?
            };
            report(out, &v, json).map_err(io)?;
            Ok(status_code(v.status))
        }
        Command::CheckPoint {
            game,
            x,
            delta_schedule,
            resolution,
            json,
        } => {
            let g = load_game(&game)?;
            let x = parse_vector(&x)?;
            let params = CheckParams {
                resolution,
                delta_schedule: match delta_schedule {
                    Some(s) => parse_vector(&s)?,
                    None => default_delta_schedule(),
                },
                ..CheckParams::default()
            };
            let v = attainability_verdict(&g, &x, &params)?;
            report(out, &v, json).map_err(io)?;
            Ok(status_code(v.status))
        }
        Command::CheckAll {
            game,
            resolution,
            json,
        } => {
            let g = load_game(&game)?;
            let zero = decide_zero(&g, resolution)?;
            let every = check_zero_attainable(&g, resolution, true)?;
            if json {
                let both = serde_json::json!({ "zero": zero, "every_vector": every });
                writeln!(out, "{}", serde_json::to_string_pretty(&both).expect("serializes")).map_err(io)?;
            } else {
                write!(out, "zero attainable: ").map_err(io)?;
                report(out, &zero, false).map_err(io)?;
                write!(out, "every vector attainable: ").map_err(io)?;
                report(out, &every, false).map_err(io)?;
            }
            Ok(if zero.status == Status::Undecided {
                EXIT_UNDECIDED
            } else {
                EXIT_OK
            })
        }
        Command::Simulate {
            game,
            p1,
            p2,
            horizon,
            csv,
            block_cap,
            target,
            from,
        } => {
            let g = load_game(&game)?;
            let mut s1 = build_strategy(&parse_strategy(&p1)?, &g, Side::P1)?;
            let mut s2 = build_strategy(&parse_strategy(&p2)?, &g, Side::P2)?;
            let cfg = MatchConfig::new(horizon).with_block_cap(block_cap);
            let tr = run_match_with(&g, s1.as_mut(), s2.as_mut(), &cfg)?;
            if let Some(path) = csv {
                std::fs::write(&path, tr.to_csv())
                    .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?;
            }
            let mut summary = serde_json::json!({
                "player1": s1.name(),
                "player2": s2.name(),
                "horizon": horizon,
                "final_gamma": tr.final_gamma(),
                "blocks": tr.blocks,
                "breakpoints": tr.times.len(),
            });
            if let Some(t) = target {
                let y = parse_vector(&t)?;
                let d = distance_to_target(&tr, &Target::Point(y.clone()), from)?;
                summary["target"] = serde_json::json!(y);
                summary["from"] = serde_json::json!(from);
                summary["sup_distance"] = serde_json::json!(d);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("serializes")).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Discrete {
            game,
            stages,
            p1,
            p2,
            csv,
        } => {
            let g = load_game(&game)?;
            let mut s1 = parse_discrete_player1(&p1, &g)?;
            let mut s2 = parse_discrete_player2(&p2, &g)?;
            let tr = run_discrete(&g, s1.as_mut(), s2.as_mut(), stages)?;
            if let Some(path) = csv {
                let mut text = String::from("stage");
                for c in 1..=g.m() {
                    text.push_str(&format!(",sum_{c}"));
                }
                text.push('\n');
                for (l, s) in tr.sums.iter().enumerate() {
                    text.push_str(&l.to_string());
                    for v in s {
                        text.push_str(&format!(",{v:?}"));
                    }
                    text.push('\n');
                }
                std::fs::write(&path, text)
                    .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?;
            }
            let far = tr.sums[1..].iter().filter(|s| s[0].abs() > 0.5).count();
            let summary = serde_json::json!({
                "player1": s1.name(),
                "player2": s2.name(),
                "stages": stages,
                "final_sum": tr.sums[stages],
                "stages_with_first_coordinate_beyond_half": far,
                "adversary_saw_current_action": tr.adversary_saw_current,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("serializes")).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Scenario { action } => match action {
            ScenarioAction::List => {
                for s in scenarios::scenarios() {
                    writeln!(out, "{}: {}", s.name, s.summary).map_err(io)?;
                    for c in &s.claims {
                        writeln!(out, "  [{}] criterion {}: {}", c.id, c.criterion, c.description)
                            .map_err(io)?;
                    }
                }
                Ok(EXIT_OK)
            }
            ScenarioAction::Run { name, claim, json } => {
                let opts = RunOptions::from_env()?;
                let all = scenarios::scenarios();
                let chosen: Vec<_> = if name == "all" {
                    all
                } else {
                    let s = all
                        .into_iter()
                        .find(|s| s.name == name)
                        .ok_or_else(|| Error::Precondition(format!("unknown scenario `{name}`")))?;
                    vec![s]
                };
                let mut results = Vec::new();
                for s in &chosen {
                    match &claim {
                        Some(id) => results.push(scenarios::run_claim(s, id, &opts).ok_or_else(|| {
                            Error::Precondition(format!("scenario `{}` has no claim `{id}`", s.name))
                        })?),
                        None => results.extend(scenarios::run_scenario(s, &opts)),
                    }
                }
                if json {
                    writeln!(out, "{}", serde_json::to_string_pretty(&results).expect("serializes"))
                        .map_err(io)?;
                } else {
                    for r in &results {
                        writeln!(
                            out,
                            "{} {}/{} (criterion {}): {}\n    {}",
                            if r.pass { "PASS" } else { "FAIL" },
                            r.scenario,
                            r.id,
                            r.criterion,
                            r.description,
                            r.detail
                        )
                        .map_err(io)?;
                    }
                }
                Ok(if results.iter().all(|r| r.pass) {
                    EXIT_OK
                } else {
                    EXIT_CLAIM_FAILED
                })
            }
        },
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
