//! Command-line front end: build presets or load JSON descriptions, evaluate
//! tree actions, run relation suites, and export diagrams and tables.
//!
//! Exit codes: 0 on an expected outcome, 1 when an expectation is not met
//! (a failed `verify` suite or a missed `--expect`), 2 on usage or input
//! errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tva::analysis::{
    ball_profile, ball_profile_stabilized, commutes_to_depth, is_trivial_to_depth,
    order_on_truncation, selfsim_falsify, RelationReport, TrivialityVerdict,
    DEFAULT_STABILIZE_CAP,
};
use tva::automaton::DotOptions;
use tva::jsonspec;
use tva::presets::{build_preset, PresetBundle, PresetParams, PRESET_NAMES};
use tva::{Error, GroupElement, TVAutomaton, TreeWord};

/// Inspect automata whose transition and output tables vary with tree depth:
/// act on words, probe relations up to a depth, measure growth, and export
/// diagrams.
#[derive(Parser)]
#[command(name = "tva", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a summary: states, level sizes, invertibility to a horizon.
    Build {
        #[command(flatten)]
        source: Source,
        /// Write the summary to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an element to a word and print the image word.
    Act {
        #[command(flatten)]
        source: Source,
        /// Element text, e.g. `b a^-1`.
        #[arg(long)]
        element: String,
        /// Word text with its start level, e.g. `0: 0 0 1`.
        #[arg(long)]
        word: String,
    },
    /// Print the first-letter permutation of an element in cycle notation.
    Perm {
        #[command(flatten)]
        source: Source,
        /// Element text, e.g. `b a^-1`.
        #[arg(long)]
        element: String,
        /// Level the element is read from.
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Decide triviality on all words up to a depth; print a witness if not.
    Trivial {
        #[command(flatten)]
        source: Source,
        /// Element text, e.g. `b a^-1`.
        #[arg(long)]
        element: String,
        /// Level the element is read from.
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Largest word length inspected.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Exit 1 unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<ExpectVerdict>,
    },
    /// Order of the action induced on the depth-truncated tree.
    Order {
        #[command(flatten)]
        source: Source,
        /// Element text, e.g. `b a^-1`.
        #[arg(long)]
        element: String,
        /// Level the element is read from.
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Truncation depth the order is measured on.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Largest power tried before reporting ExceedsBound.
        #[arg(long, default_value_t = 16)]
        bound: u64,
    },
    /// Whether two elements commute on all words up to a depth.
    Commute {
        #[command(flatten)]
        source: Source,
        /// Element text, e.g. `b a^-1`.
        #[arg(long)]
        element: String,
        /// The other element.
        #[arg(long = "with")]
        with_element: String,
        /// Level both elements are read from.
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Largest word length inspected.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Count distinct automorphisms in balls of the generated group.
    Ball {
        #[command(flatten)]
        source: Source,
        /// Comma-separated generator texts; defaults to all states.
        #[arg(long, value_delimiter = ',')]
        gens: Option<Vec<String>>,
        /// Largest product length counted.
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Fixed comparison depth; without it the depth doubles until the
        /// profile stabilizes.
        #[arg(long)]
        depth: Option<usize>,
        /// Depth cap for the stabilizing search.
        #[arg(long, default_value_t = DEFAULT_STABILIZE_CAP)]
        cap: usize,
    },
    /// Search relators for one whose triviality differs between two shifts.
    Falsify {
        #[command(flatten)]
        source: Source,
        /// Semicolon-separated relator texts.
        #[arg(long, value_delimiter = ';')]
        relators: Vec<String>,
        /// Comma-separated shifts to compare.
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3])]
        shifts: Vec<usize>,
        /// Largest word length inspected at each shift.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Exit 1 unless the outcome matches.
        #[arg(long, value_enum)]
        expect: Option<ExpectFalsify>,
    },
    /// Run a preset's relation suite; exit 0 iff every verdict matches.
    Verify {
        /// Preset name.
        preset: String,
        #[command(flatten)]
        flags: PresetFlags,
        /// Largest word length inspected per relation.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Write a state diagram (dot) or the level tables (json-tables).
    Export {
        #[command(flatten)]
        source: Source,
        /// Output format.
        #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
        format: ExportFormat,
        /// Number of levels to materialize.
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Omit edge labels implied by the remaining edges (dot only).
        #[arg(long)]
        elide_implied_labels: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpectVerdict {
    Trivial,
    Nontrivial,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpectFalsify {
    None,
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    #[value(name = "json-tables")]
    JsonTables,
}

/// Family parameters shared by `--preset` sources and the `verify` command.
#[derive(Args)]
struct PresetFlags {
    /// Size sequence: `i+2`, `3*i+5`, `4`, or `list:2,3,4` (optionally
    /// `list:5,5;i+2` to continue affinely).
    #[arg(long)]
    seq: Option<String>,
    /// Free-component count of Zn_wr_Z.
    #[arg(long)]
    n: Option<usize>,
    /// Torsion order of Cr_wr_Z.
    #[arg(long)]
    r: Option<u32>,
    /// Free rank of the generic lamplighter machines.
    #[arg(long = "free-rank")]
    free_rank: Option<usize>,
    /// Comma-separated torsion orders of the generic lamplighter machines.
    #[arg(long, value_delimiter = ',')]
    torsion: Option<Vec<u32>>,
    /// Seed of the shuffled letter layout of the generic lamplighter
    /// machines; omitting it selects the canonical block layout.
    #[arg(long)]
    seed: Option<u64>,
}

impl PresetFlags {
    fn params(&self) -> Result<PresetParams, Error> {
        Ok(PresetParams {
            seq: self.seq.as_deref().map(str::parse).transpose()?,
            n: self.n,
            r: self.r,
            free_rank: self.free_rank,
            torsion: self.torsion.clone(),
            seed: self.seed,
        })
    }

    fn any_set(&self) -> bool {
        self.seq.is_some()
            || self.n.is_some()
            || self.r.is_some()
            || self.free_rank.is_some()
            || self.torsion.is_some()
            || self.seed.is_some()
    }
}

/// Where the automaton comes from: a named preset or a JSON description.
#[derive(Args)]
struct Source {
    /// Preset name; see `tva verify --help` for the family parameters.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// JSON automaton description file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    flags: PresetFlags,
}

impl Source {
    fn bundle(&self) -> Result<PresetBundle, Error> {
        match (&self.preset, &self.spec) {
            (Some(name), None) => build_preset(name, &self.flags.params()?),
            (None, Some(path)) => {
                if self.flags.any_set() {
                    return Err(Error::BadParameters(
                        "family parameters apply to --preset, not --spec".to_string(),
                    ));
                }
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::Parse(format!("cannot read {}: {e}", path.display()))
                })?;
                jsonspec::parse_spec(&text)
            }
            _ => Err(Error::BadParameters(format!(
                "exactly one of --preset or --spec is required (presets: {})",
                PRESET_NAMES.join(", ")
            ))),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Build { source, out } => {
            let bundle = source.bundle()?;
            let text = build_summary(&bundle.automaton)?;
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Act {
            source,
            element,
            word,
        } => {
            let bundle = source.bundle()?;
            let offset = bundle.automaton.display_offset();
            let word = TreeWord::parse(&word, offset)?;
            let element = GroupElement::parse(&bundle.automaton, word.start_level(), &element)?;
            println!("{}", element.apply(&word)?.display_with(offset));
            Ok(ExitCode::SUCCESS)
        }
        Command::Perm {
            source,
            element,
            level,
        } => {
            let bundle = source.bundle()?;
            let element = GroupElement::parse(&bundle.automaton, level, &element)?;
            let offset = bundle.automaton.display_offset();
            println!("{}", element.root_permutation()?.cycle_string(offset));
            Ok(ExitCode::SUCCESS)
        }
        Command::Trivial {
            source,
            element,
            level,
            depth,
            expect,
        } => {
            let bundle = source.bundle()?;
            let offset = bundle.automaton.display_offset();
            let element = GroupElement::parse(&bundle.automaton, level, &element)?;
            let verdict = is_trivial_to_depth(&element, depth)?;
            match &verdict {
                TrivialityVerdict::Trivial { depth } => println!("Trivial({depth})"),
                TrivialityVerdict::Nontrivial { witness } => {
                    println!("Nontrivial witness=[{}]", witness.display_with(offset))
                }
            }
            let ok = match expect {
                None => true,
                Some(ExpectVerdict::Trivial) => verdict.is_trivial(),
                Some(ExpectVerdict::Nontrivial) => !verdict.is_trivial(),
            };
            Ok(exit_expect(ok))
        }
        Command::Order {
            source,
            element,
            level,
            depth,
            bound,
        } => {
            let bundle = source.bundle()?;
            let element = GroupElement::parse(&bundle.automaton, level, &element)?;
            println!("{}", order_on_truncation(&element, depth, bound)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Commute {
            source,
            element,
            with_element,
            level,
            depth,
        } => {
            let bundle = source.bundle()?;
            let offset = bundle.automaton.display_offset();
            let lhs = GroupElement::parse(&bundle.automaton, level, &element)?;
            let rhs = GroupElement::parse(&bundle.automaton, level, &with_element)?;
            match commutes_to_depth(&lhs, &rhs, depth)? {
                TrivialityVerdict::Trivial { depth } => {
                    println!("commute to depth {depth}: yes")
                }
                TrivialityVerdict::Nontrivial { witness } => println!(
                    "commute to depth {depth}: no, commutator moves [{}]",
                    witness.display_with(offset)
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ball {
            source,
            gens,
            radius,
            depth,
            cap,
        } => {
            let bundle = source.bundle()?;
            let texts = gens.unwrap_or_else(|| {
                bundle
                    .automaton
                    .states()
                    .iter()
                    .map(String::from)
                    .collect()
            });
            let generators = texts
                .iter()
                .map(|t| GroupElement::parse(&bundle.automaton, 0, t))
                .collect::<Result<Vec<_>, _>>()?;
            match depth {
                Some(depth) => {
                    let profile = ball_profile(&generators, radius, depth)?;
                    println!("depth {depth}: {}", profile_text(&profile));
                }
                None => {
                    let result = ball_profile_stabilized(&generators, radius, cap)?;
                    let note = if result.stabilized {
                        format!("stabilized at depth {}", result.depth)
                    } else {
                        format!("not stabilized by depth {}", result.depth)
                    };
                    println!("{} ({note})", profile_text(&result.profile));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Falsify {
            source,
            relators,
            shifts,
            depth,
            expect,
        } => {
            let bundle = source.bundle()?;
            let offset = bundle.automaton.display_offset();
            let elements = relators
                .iter()
                .map(|t| GroupElement::parse(&bundle.automaton, 0, t))
                .collect::<Result<Vec<_>, _>>()?;
            let outcome = selfsim_falsify(&elements, &shifts, depth)?;
            match &outcome {
                Some(c) => println!(
                    "counterexample: relator `{}` is Trivial({depth}) at shift {} \
                     and Nontrivial at shift {} witness=[{}]",
                    c.relator,
                    c.shift_trivial,
                    c.shift_nontrivial,
                    c.witness.display_with(offset)
                ),
                None => println!(
                    "no counterexample to depth {depth} across shifts {}",
                    shifts
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            }
            let ok = match expect {
                None => true,
                Some(ExpectFalsify::None) => outcome.is_none(),
                Some(ExpectFalsify::Counterexample) => outcome.is_some(),
            };
            Ok(exit_expect(ok))
        }
        Command::Verify {
            preset,
            flags,
            depth,
            json,
        } => {
            let bundle = build_preset(&preset, &flags.params()?)?;
            let report = RelationReport::run(&bundle.suite, depth)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(exit_expect(report.all_ok()))
        }
        Command::Export {
            source,
            format,
            levels,
            out,
            elide_implied_labels,
        } => {
            let bundle = source.bundle()?;
            let text = match format {
                ExportFormat::Dot => bundle.automaton.to_dot(
                    levels,
                    &DotOptions {
                        elide_implied_labels,
                    },
                )?,
                ExportFormat::JsonTables => jsonspec::export_tables(&bundle.automaton, levels)?,
            };
            emit(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_expect(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<(), Error> {
    let text = if text.ends_with('\n') {
        text.to_string()
    } else {
        format!("{text}\n")
    };
    match out {
        Some(path) => fs::write(&path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn profile_text(profile: &[u64]) -> String {
    profile
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// States, the first eight level sizes, and invertibility to a horizon
/// (clamped to the alphabet's own horizon when it has one).
fn build_summary(automaton: &TVAutomaton) -> Result<String, Error> {
    let horizon = automaton
        .alphabet()
        .horizon()
        .map(|h| h.min(16))
        .unwrap_or(16);
    let invertible = if automaton.is_invertible_up_to(horizon)? {
        format!("invertible (h={horizon})")
    } else {
        format!("not invertible within {horizon} levels")
    };
    let mut sizes = Vec::new();
    for level in 0..8 {
        match automaton.alphabet().size_at(level) {
            Ok(size) => sizes.push(size.to_string()),
            Err(_) => break,
        }
    }
    Ok(format!(
        "{} states, alphabet {}, {}\nlevel sizes {}",
        automaton.states().len(),
        automaton.alphabet().describe(),
        invertible,
        sizes.join(" ")
    ))
}
