use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use boxwire::algebra::{Algebra, Valuation};
use boxwire::io::{self, Bindings, IoError, Model};
use boxwire::laws::{check_functor_laws, check_structure_laws, LawReport};
use boxwire::structure::{compose, from_mat, tensor_arrow, MatArrow, MultiArrow, PortId};
use boxwire::Registry;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "boxwire",
    version,
    about = "Validate, compose and interpret box-and-wire models"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Matrices,
    Model,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgebraName {
    Mass,
    Dataflow,
    Instance,
}

impl AlgebraName {
    fn as_str(self) -> &'static str {
        match self {
            AlgebraName::Mass => "mass",
            AlgebraName::Dataflow => "dataflow",
            AlgebraName::Instance => "instance",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load a model and run every structural check.
    Validate { file: PathBuf },
    /// Compose two arrows, `outer ∘ inner`.
    Compose {
        file: PathBuf,
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
        #[arg(long, value_enum, default_value_t = Emit::Matrices)]
        emit: Emit,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Tensor two arrows.
    Tensor {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value_t = Emit::Model)]
        emit: Emit,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Render one arrow as DOT.
    Render {
        file: PathBuf,
        #[arg(long)]
        arrow: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Evaluate an arrow under the algebra bound in the model.
    Interpret {
        file: PathBuf,
        #[arg(long, value_enum)]
        algebra: AlgebraName,
        /// Arrow to evaluate; may be omitted when the model has one.
        #[arg(long)]
        arrow: Option<String>,
        /// `port=value` pairs (dataflow) or `box=usage` pairs (instance).
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
    },
    /// Check the structure laws and the functor laws of the bound algebra.
    CheckLaws {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, env = "FA_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// Bad invocation: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// A check that ran and said no: exit code 1, report already printed.
#[derive(Debug)]
struct Rejected;

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("rejected")
    }
}

impl std::error::Error for Rejected {}

struct Ctx {
    format: Format,
}

impl Ctx {
    fn report(&self, text: &str, value: Value) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => print!("{}", io::canonical_json(&value)),
        }
    }

    fn load(&self, path: &Path) -> Result<Model> {
        match io::load(path) {
            Ok(m) => Ok(m),
            Err(e @ IoError::Read { .. }) => Err(usage(e.to_string())),
            Err(e) => {
                let file = path.display().to_string();
                self.report(
                    &format!("{file}: invalid: {e}\n"),
                    json!({"status": "invalid", "file": file, "error": e.to_string()}),
                );
                Err(Rejected.into())
            }
        }
    }
}

fn write_out(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn multi(reg: &Registry, id: &str) -> Result<MultiArrow> {
    reg.multi(id).map_err(|e| usage(e.to_string()))
}

/// A registry with the boxes of `reg` and the single arrow `arrow`.
fn result_model(reg: &Registry, id: &str, arrow: &MatArrow) -> Result<String> {
    let mut out = Registry::new();
    for b in reg.boxes() {
        out.insert_box(b.clone())?;
    }
    out.insert_arrow(id, from_mat(arrow)?)?;
    Ok(io::save(&out, None))
}

fn emit(
    ctx: &Ctx,
    name: &str,
    domains: &[boxwire::BoxShape],
    body: MatArrow,
    reg: &Registry,
    how: Emit,
    output: Option<&Path>,
) -> Result<()> {
    let text = match how {
        Emit::Matrices => match ctx.format {
            Format::Text => format!("O^in =\n{}\nO^out =\n{}", body.m_in(), body.m_out()),
            Format::Json => io::canonical_json(&json!({
                "in": io::MatrixRecord::from_matrix(body.m_in()),
                "out": io::MatrixRecord::from_matrix(body.m_out()),
            })),
        },
        Emit::Model => result_model(reg, name, &body)?,
        Emit::Dot => io::render_dot(&MultiArrow::from_body(name, domains.to_vec(), body)?),
    };
    write_out(output, &text)
}

fn parse_pairs(inputs: &[String]) -> Result<BTreeMap<String, String>> {
    inputs
        .iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, got {kv:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn pick_arrow(reg: &Registry, arrow: Option<&str>) -> Result<MultiArrow> {
    if let Some(id) = arrow {
        return multi(reg, id);
    }
    let all = reg.all_multi()?;
    match all.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(usage(format!(
            "the model has {} arrows; choose one with --arrow",
            all.len()
        ))),
    }
}

fn bindings(model: &Model, want: AlgebraName) -> Result<&Bindings> {
    match &model.bindings {
        Some(b) if b.name() == want.as_str() => Ok(b),
        Some(b) => Err(usage(format!(
            "the model binds the {} algebra, not {}",
            b.name(),
            want.as_str()
        ))),
        None => Err(usage("the model has no algebra bindings")),
    }
}

fn interpret(ctx: &Ctx, model: &Model, algebra: AlgebraName, arrow: Option<&str>, inputs: &[String]) -> Result<()> {
    let reg = &model.registry;
    let b = bindings(model, algebra)?;
    let pairs = parse_pairs(inputs)?;
    match algebra {
        AlgebraName::Mass => {
            let alg = b.mass()?;
            let targets = match arrow {
                Some(id) => vec![multi(reg, id)?],
                None => reg.all_multi()?,
            };
            let mut text = String::new();
            let mut out = BTreeMap::new();
            for a in targets {
                let m = alg.mass_of(&a)?;
                let _ = writeln!(text, "{} ({}) = {m}", a.codomain().id(), a.name());
                out.insert(a.name().to_string(), json!({"box": a.codomain().id(), "mass": m}));
            }
            ctx.report(&text, json!({"algebra": "mass", "masses": out}));
        }
        AlgebraName::Dataflow => {
            let alg = b.dataflow(reg)?;
            let a = pick_arrow(reg, arrow)?;
            let mut v = Valuation::new();
            for (k, x) in pairs {
                let port = k.split_once('.').map_or(k.as_str(), |(_, p)| p);
                let port = PortId::new(port).map_err(|e| usage(e.to_string()))?;
                if !a.codomain().in_ports().contains(&port) {
                    return Err(usage(format!("{port} is not an input of {}", a.codomain().id())));
                }
                let x: i64 = x.parse().map_err(|_| usage(format!("{k}: {x:?} is not an integer")))?;
                v.insert(port, x);
            }
            let out = alg.evaluate(&a, &v)?;
            let text: String = out.iter().rev().map(|(p, x)| format!("{p}={x}\n")).collect();
            let values: BTreeMap<String, i64> = out.iter().map(|(p, x)| (p.to_string(), *x)).collect();
            ctx.report(
                &text,
                json!({"algebra": "dataflow", "arrow": a.name(), "outputs": values}),
            );
        }
        AlgebraName::Instance => {
            let inst = b.instance(reg)?;
            let a = pick_arrow(reg, arrow)?;
            let args = a
                .domains()
                .iter()
                .map(|d| {
                    pairs
                        .get(d.id())
                        .cloned()
                        .ok_or_else(|| usage(format!("missing --inputs {}=<usage>", d.id())))
                })
                .collect::<Result<Vec<_>>>()?;
            let value = inst.act(&a, &args)?;
            ctx.report(
                &format!("{}={value}\n", a.codomain().id()),
                json!({"algebra": "instance", "arrow": a.name(), "value": value}),
            );
        }
    }
    Ok(())
}

fn check_laws(ctx: &Ctx, model: &Model, samples: usize, seed: u64) -> Result<()> {
    let reg = &model.registry;
    let mut report = check_structure_laws(reg)?;
    match &model.bindings {
        Some(b @ Bindings::Mass { .. }) => {
            let alg = b.mass()?;
            let xs = boxwire::algebra::MassAlgebra::random_samples(reg, samples, seed);
            report.extend(check_functor_laws(&alg, reg, &xs)?);
        }
        Some(b @ Bindings::Dataflow { .. }) => {
            let alg = b.dataflow(reg)?;
            let xs = reg
                .boxes()
                .filter_map(|bx| alg.behavior(bx.id()).map(|f| (bx.id().to_string(), vec![f.clone()])))
                .collect();
            report.extend(check_functor_laws(&alg, reg, &xs)?);
        }
        Some(b @ Bindings::Instance { .. }) => {
            let inst = b.instance(reg)?;
            report.extend(check_functor_laws(&inst, reg, &inst.samples())?);
        }
        None => {}
    }
    print_laws(ctx, &report, seed);
    if report.passed() {
        Ok(())
    } else {
        Err(Rejected.into())
    }
}

fn print_laws(ctx: &Ctx, report: &LawReport, seed: u64) {
    let mut text = String::new();
    for o in &report.outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{mark} {} {}", o.law, o.subject);
        if let Some(d) = &o.detail {
            let _ = writeln!(text, "    {d}");
        }
    }
    let failed = report.failures().count();
    let _ = writeln!(text, "{} checks, {failed} failed (seed {seed})", report.outcomes.len());
    ctx.report(
        &text,
        json!({"passed": report.passed(), "seed": seed, "outcomes": report.outcomes}),
    );
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx { format: cli.format };
    match cli.command {
        Command::Validate { file } => {
            let m = ctx.load(&file)?;
            let (boxes, arrows) = (m.registry.boxes().count(), m.registry.arrows().count());
            ctx.report(
                &format!("{}: ok ({boxes} boxes, {arrows} arrows)\n", file.display()),
                json!({"status": "ok", "file": file.display().to_string(), "boxes": boxes, "arrows": arrows}),
            );
        }
        Command::Compose {
            file,
            outer,
            inner,
            emit: how,
            output,
        } => {
            let m = ctx.load(&file)?;
            let (o, i) = (multi(&m.registry, &outer)?, multi(&m.registry, &inner)?);
            let body = compose(o.body(), i.body()).map_err(|e| usage(e.to_string()))?;
            emit(
                &ctx,
                &format!("{outer}_{inner}"),
                i.domains(),
                body,
                &m.registry,
                how,
                output.as_deref(),
            )?;
        }
        Command::Tensor {
            file,
            left,
            right,
            emit: how,
            output,
        } => {
            let m = ctx.load(&file)?;
            let reg = &m.registry;
            let (l, r) = (
                reg.get_arrow(&left).map_err(|e| usage(e.to_string()))?,
                reg.get_arrow(&right).map_err(|e| usage(e.to_string()))?,
            );
            let t = tensor_arrow(l, r)?;
            let domains = [multi(reg, &left)?.domains(), multi(reg, &right)?.domains()].concat();
            let mut seen = std::collections::BTreeSet::new();
            let domains: Vec<_> = domains
                .into_iter()
                .filter(|d| seen.insert(d.id().to_string()))
                .collect();
            let body = boxwire::structure::to_mat(&t);
            emit(
                &ctx,
                &format!("{left}_x_{right}"),
                &domains,
                body,
                reg,
                how,
                output.as_deref(),
            )?;
        }
        Command::Render { file, arrow, output } => {
            let m = ctx.load(&file)?;
            write_out(output.as_deref(), &io::render_dot(&multi(&m.registry, &arrow)?))?;
        }
        Command::Interpret {
            file,
            algebra,
            arrow,
            inputs,
        } => {
            let m = ctx.load(&file)?;
            interpret(&ctx, &m, algebra, arrow.as_deref(), &inputs)?;
        }
        Command::CheckLaws { file, samples, seed } => {
            if samples == 0 {
                bail!(usage("--samples must be positive"));
            }
            let m = ctx.load(&file)?;
            check_laws(&ctx, &m, samples, seed)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Rejected>() => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", anyhow!(e));
            ExitCode::from(1)
        }
    }
}
