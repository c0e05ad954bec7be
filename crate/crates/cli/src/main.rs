//! `cct`: tables, codon distances, mutation matrices, predictions and fits.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use codon_crystal::aggregate::{aggregate, parse_usage_tsv, CodonUsage};
use codon_crystal::crystal::decompose;
use codon_crystal::dataset::DatasetBundle;
use codon_crystal::distance::{distance, r_value, ModelParams};
use codon_crystal::fit::{search, FitConfig, ObjectiveMode};
use codon_crystal::genetic::{
    charge_mismatches, codon_record, codon_table_tsv, derived_codon_records, dimer_record,
    dimer_table_tsv,
};
use codon_crystal::io;
use codon_crystal::predict::{evaluate_claims, PredictConfig, DEFAULT_APPROX_SLACK};
use codon_crystal::rate::{build_generator, discrete_step, evolve, CodonMatrix, Strength};
use codon_crystal::{ChargeSource, Codon, Dimer, Error, Result};

#[derive(Parser)]
#[command(name = "cct", version, about = "Crystal-basis codon mutation model")]
struct Cli {
    /// Round numeric text output to N decimals.
    #[arg(long, global = true, value_name = "N")]
    round: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Data bundle directory (default: $CCT_DATA_DIR, then the built-in copy).
    #[arg(long, global = true, value_name = "DIR")]
    data: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    /// Root charge source: table or formula.
    #[arg(long, default_value = "table")]
    charges: String,
}

impl ParamArgs {
    fn params(&self) -> Result<ModelParams> {
        let charges: ChargeSource = self.charges.parse()?;
        Ok(ModelParams::new(self.alpha, self.beta, self.gamma, self.eta)?.with_charges(charges))
    }
}

#[derive(Args, Clone)]
struct StrengthArg {
    /// exp:lambda=L, power:p=P,scale=S or const:c=C.
    #[arg(long, default_value = "exp:lambda=0.01")]
    strength: String,
}

impl StrengthArg {
    fn strength(&self) -> Result<Strength> {
        self.strength.parse()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the codon or dinucleotide table.
    Tables {
        #[command(subcommand)]
        which: TableKind,
    },
    /// Irrep label and weight of a codon.
    Irrep { codon: String },
    /// Root charge of a dinucleotide.
    Charge {
        dimer: String,
        #[arg(long, default_value = "table")]
        charges: String,
    },
    /// Codon eigenvalue r.
    R {
        codon: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Distance between two codons.
    Dist {
        a: String,
        b: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Build the 61×61 codon generator.
    Matrix {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        strength: StrengthArg,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Evolve a saved generator: exp(tQ), or I + τQ with --step.
    Expm {
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, conflicts_with = "step")]
        time: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Aggregate a saved codon matrix to amino acids.
    Aggregate {
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        /// Codon usage TSV (default: uniform).
        #[arg(long, value_name = "FILE")]
        usage: Option<PathBuf>,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Score the model against the experimental inequalities.
    Predict {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        strength: StrengthArg,
        #[arg(long, value_name = "FILE")]
        usage: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_APPROX_SLACK)]
        slack: f64,
    },
    /// Search (α, β, γ, η) for best agreement.
    Fit {
        #[arg(long, default_value_t = 8)]
        seeds: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value = "margin")]
        objective: String,
        #[arg(long, default_value_t = 1.0)]
        eta_min: f64,
        #[arg(long)]
        require_eq15: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_evals: Option<usize>,
        #[command(flatten)]
        strength: StrengthArg,
        #[arg(long, default_value = "table")]
        charges: String,
        #[arg(long, value_name = "FILE")]
        usage: Option<PathBuf>,
        /// Also write the full result as JSON.
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TableKind {
    Codons,
    Dimers {
        /// Compare tabulated charges with the formula.
        #[arg(long)]
        check: bool,
    },
}

struct Ctx {
    round: Option<usize>,
    json: bool,
    data: Option<PathBuf>,
}

impl Ctx {
    fn num(&self, x: f64) -> String {
        match self.round {
            Some(n) => format!("{x:.n$}"),
            None => x.to_string(),
        }
    }

    fn bundle(&self) -> Result<DatasetBundle> {
        DatasetBundle::load(self.data.as_deref())
    }
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn load_usage(path: Option<&Path>) -> Result<CodonUsage> {
    match path {
        Some(p) => parse_usage_tsv(&std::fs::read_to_string(p)?),
        None => Ok(CodonUsage::uniform()),
    }
}

fn emit(text: String, output: Option<&Path>) -> Result<String> {
    match output {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn codon_out(m: &CodonMatrix, format: Format, output: Option<&Path>) -> Result<String> {
    let text = match format {
        Format::Csv => io::codon_matrix_csv(m),
        Format::Json => io::codon_matrix_json(m) + "\n",
    };
    emit(text, output)
}

fn read_codon_matrix(path: &Path) -> Result<CodonMatrix> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        io::parse_codon_matrix_json(&text)
    } else {
        io::parse_codon_matrix_csv(&text)
    }
}

fn run(cli: Cli) -> Result<String> {
    let ctx = Ctx {
        round: cli.round,
        json: cli.json,
        data: cli.data,
    };
    match cli.command {
        Command::Tables { which } => {
            let bundle = ctx.bundle()?;
            match which {
                TableKind::Codons => {
                    let derived = derived_codon_records();
                    if derived != bundle.codon_records()? {
                        return Err(Error::Malformed(
                            "codon table disagrees with the crystal decomposition".into(),
                        ));
                    }
                    Ok(if ctx.json { to_json(&derived) } else { codon_table_tsv(&derived) })
                }
                TableKind::Dimers { check } => {
                    if check {
                        let mism = charge_mismatches();
                        if ctx.json {
                            return Ok(to_json(&mism));
                        }
                        let mut s = String::new();
                        for m in &mism {
                            s.push_str(&format!("{}\ttable={}\tformula={}\n", m.dimer, m.table, m.formula));
                        }
                        s.push_str(&format!("{} mismatch(es)\n", mism.len()));
                        Ok(s)
                    } else {
                        let recs = bundle.dimer_records()?;
                        Ok(if ctx.json { to_json(&recs) } else { dimer_table_tsv(&recs) })
                    }
                }
            }
        }
        Command::Irrep { codon } => {
            let c: Codon = codon.parse()?;
            let rec = codon_record(c);
            if ctx.json {
                return Ok(to_json(rec));
            }
            let l = rec.irrep;
            let mult = decompose(3).multiplicity(l.j_h, l.j_v);
            let copy = if mult > 1 { format!("^{}", l.copy) } else { String::new() };
            Ok(format!(
                "({},{}){} J3H={} J3V={} {}\n",
                l.j_h, l.j_v, copy, rec.weight.j3_h, rec.weight.j3_v, rec.translation
            ))
        }
        Command::Charge { dimer, charges } => {
            let d: Dimer = dimer.parse()?;
            let q = dimer_record(d).charge(charges.parse()?);
            Ok(if ctx.json {
                to_json(&serde_json::json!({ "dimer": d.to_string(), "charge": q }))
            } else {
                format!("{q}\n")
            })
        }
        Command::R { codon, params } => {
            let c: Codon = codon.parse()?;
            if c.is_stop() {
                return Err(Error::StopCodon(codon));
            }
            let r = r_value(c, &params.params()?);
            Ok(if ctx.json {
                to_json(&serde_json::json!({ "codon": c.to_string(), "r": r }))
            } else {
                format!("{}\n", ctx.num(r))
            })
        }
        Command::Dist { a, b, params } => {
            let (ca, cb): (Codon, Codon) = (a.parse()?, b.parse()?);
            for (c, s) in [(ca, &a), (cb, &b)] {
                if c.is_stop() {
                    return Err(Error::StopCodon(s.clone()));
                }
            }
            let d = distance(ca, cb, &params.params()?);
            Ok(if ctx.json {
                to_json(&serde_json::json!({ "a": ca.to_string(), "b": cb.to_string(), "distance": d }))
            } else {
                format!("{}\n", ctx.num(d))
            })
        }
        Command::Matrix { params, strength, output, format } => {
            let q = build_generator(&params.params()?, &strength.strength()?);
            let format = if ctx.json { Format::Json } else { format };
            codon_out(&q, format, output.as_deref())
        }
        Command::Expm { input, time, step, output, format } => {
            let q = read_codon_matrix(&input)?;
            let m = match (time, step) {
                (_, Some(tau)) => discrete_step(&q, tau)?,
                (Some(t), None) => evolve(&q, t)?,
                (None, None) => {
                    return Err(Error::InvalidParams("give --time or --step".into()));
                }
            };
            let format = if ctx.json { Format::Json } else { format };
            codon_out(&m, format, output.as_deref())
        }
        Command::Aggregate { input, usage, output, format } => {
            let cm = read_codon_matrix(&input)?;
            let am = aggregate(&cm, &load_usage(usage.as_deref())?)?;
            let text = match (ctx.json, format) {
                (true, _) | (_, Format::Json) => io::amino_matrix_json(&am) + "\n",
                _ => io::amino_matrix_csv(&am),
            };
            emit(text, output.as_deref())
        }
        Command::Predict { params, strength, usage, slack } => {
            let data = ctx.bundle()?.experimental()?;
            let report = evaluate_claims(
                &params.params()?,
                &strength.strength()?,
                &load_usage(usage.as_deref())?,
                &data,
                &PredictConfig { approx_slack: slack },
            )?;
            if ctx.json {
                return Ok(report.to_json() + "\n");
            }
            let mut s = String::new();
            for c in &report.claims {
                s.push_str(&format!(
                    "{}\t{}\tmodel {} | {}\texp {} | {}\t{}\n",
                    c.id,
                    c.claim,
                    ctx.num(c.model_lhs),
                    ctx.num(c.model_rhs),
                    c.exp_lhs,
                    c.exp_rhs,
                    if c.satisfied { "ok" } else { "violated" }
                ));
            }
            let sm = &report.summary;
            s.push_str(&format!(
                "satisfied {}/{} (strict {}/{}, approximate {}/{})\n",
                sm.satisfied, sm.total, sm.strict_satisfied, sm.strict_total, sm.approx_satisfied, sm.approx_total
            ));
            s.push_str(&format!(
                "parameter chain {}\n",
                if report.eq15.ok { "holds" } else { "violated" }
            ));
            s.push_str(&format!(
                "hierarchy links: model {}/{}, pet91 {}/{}\n",
                report.hierarchy.model_agreements,
                report.hierarchy.links.len(),
                report.hierarchy.pet91_agreements,
                report.hierarchy.links.len()
            ));
            Ok(s)
        }
        Command::Fit {
            seeds,
            iters,
            objective,
            eta_min,
            require_eq15,
            seed,
            max_evals,
            strength,
            charges,
            usage,
            output,
        } => {
            let data = ctx.bundle()?.experimental()?;
            let objective: ObjectiveMode = objective.parse()?;
            let cfg = FitConfig {
                seeds,
                iterations: iters,
                objective,
                eta_min,
                require_eq15,
                rng_seed: seed,
                max_evaluations: max_evals,
                strength: strength.strength()?,
                charges: charges.parse()?,
                ..FitConfig::default()
            };
            let result = search(&cfg, &data, &load_usage(usage.as_deref())?)?;
            if let Some(path) = output {
                std::fs::write(path, result.to_json() + "\n")?;
            }
            if ctx.json {
                return Ok(result.to_json() + "\n");
            }
            let p = result.params;
            Ok(format!(
                "alpha={} beta={} gamma={} eta={}\nsatisfied {}/{} strict claims, soft margin {}\nparameter chain {}\nevaluations {}\n",
                ctx.num(p.alpha),
                ctx.num(p.beta),
                ctx.num(p.gamma),
                ctx.num(p.eta),
                result.satisfied,
                result.total,
                ctx.num(result.soft_margin),
                if result.eq15.ok { "holds" } else { "violated" },
                result.evaluations
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.category());
            ExitCode::from(1)
        }
    }
}
