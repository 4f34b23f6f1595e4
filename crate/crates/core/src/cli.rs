//! Command-line front end.
//!
//! JSON arguments are given inline (`--pacf '{...}'`), read from `--input`, or
//! read from stdin, in that order of preference. Results go to `--output` or
//! stdout. Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage.

use std::ffi::OsString;
use std::fmt::Debug;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::fit::{fit, FitError, FitOptions, FitTemplate, SlotLayout};
use crate::model::{expand, validate, ModelError, SarumaSpec};
use crate::pacf::{coeffs_to_pacf, factor_pacf, pacf_to_coeffs, PacfError, PacfSeq};
use crate::poly::{FilterPoly, PolyError};
use crate::rootloc::{count_inside, count_inside_poly, RootLocError};
use crate::series::{
    format_csv, parse_csv, residuals, simulate_with_innovations, SeriesError, TimeSeries,
};

#[derive(Debug, Parser)]
#[command(
    name = "saruma",
    version,
    about = "PACF parameterisation of unit-root filters and SARUMA models"
)]
struct Cli {
    /// Numerical tolerance for the optimiser.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, global = true, default_value_t = 5)]
    multistarts: usize,
    /// Read the main JSON argument from this file instead of stdin.
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PACF sequence to filter coefficients.
    Pacf2ar(PacfArg),
    /// Filter coefficients to PACF sequence.
    Ar2pacf(PolyArg),
    /// Split a pinned PACF sequence into unit and stationary factors.
    Factor(PacfArg),
    /// Count roots inside the unit circle from a PACF sequence or polynomial.
    CountRoots(CountArgs),
    /// Multiply out a model specification.
    Expand(SpecArg),
    /// List violations in a model specification.
    Validate(SpecArg),
    /// Simulate a series as CSV.
    Simulate(SimulateArgs),
    /// Conditional-sum-of-squares residuals of a CSV series.
    Residuals(ResidualArgs),
    /// Estimate free PACF slots of a template.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
struct PacfArg {
    /// PACF as `{"values": [...], "unit_pins": [...]}` or a bare array.
    #[arg(long)]
    pacf: Option<String>,
}

#[derive(Debug, Args)]
struct PolyArg {
    /// Coefficients `[1, c1, ..., cn]`.
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long, conflicts_with = "poly")]
    pacf: Option<String>,
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Debug, Args)]
struct SpecArg {
    #[arg(long)]
    spec: Option<String>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
    /// Also write the innovations used, as CSV.
    #[arg(long)]
    innovations: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ResidualArgs {
    #[arg(long)]
    spec: Option<String>,
    /// CSV series; stdin when absent.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Template with embedded `data`, or only the slot layout when `--data` is given.
    #[arg(long)]
    template: Option<String>,
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PacfInput {
    Seq(PacfSeq),
    Bare(Vec<f64>),
}

impl PacfInput {
    fn into_seq(self) -> Result<PacfSeq, PacfError> {
        match self {
            PacfInput::Seq(s) => Ok(s),
            PacfInput::Bare(v) => PacfSeq::new(v, []),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Value),
}

fn domain<E: Debug + std::fmt::Display>(err: E, detail: Option<Value>) -> Failure {
    let debug = format!("{err:?}");
    let kind: String = debug
        .chars()
        .take_while(|c| c.is_alphanumeric() || *c == '_')
        .collect();
    let mut v = json!({ "error": kind, "message": err.to_string() });
    if let (Some(Value::Object(extra)), Value::Object(map)) = (detail, &mut v) {
        map.extend(extra);
    }
    Failure::Domain(v)
}

fn input_error(message: String) -> Failure {
    Failure::Domain(json!({ "error": "InvalidInput", "message": message }))
}

impl From<PacfError> for Failure {
    fn from(e: PacfError) -> Self {
        match e {
            PacfError::Poly(p) => p.into(),
            PacfError::UnitPacfEncountered { index, ref partial } => {
                let detail = json!({ "index": index, "partial": partial });
                domain(&e, Some(detail))
            }
            other => domain(other, None),
        }
    }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        domain(e, None)
    }
}

impl From<RootLocError> for Failure {
    fn from(e: RootLocError) -> Self {
        match e {
            RootLocError::Pacf(p) => p.into(),
            other => domain(other, None),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Pacf(p) => p.into(),
            ModelError::Poly(p) => p.into(),
            ModelError::Invalid(ref v) => {
                let detail = json!({ "violations": v });
                domain(&e, Some(detail))
            }
            other => domain(other, None),
        }
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        domain(e, None)
    }
}

impl From<FitError> for Failure {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Model(m) => m.into(),
            FitError::Pacf(p) => p.into(),
            FitError::Series(s) => s.into(),
            other => domain(other, None),
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    input: Option<PathBuf>,
}

impl Io<'_> {
    fn read_stdin(&mut self, what: &str) -> Result<String, Failure> {
        if self.stdin_used {
            return Err(Failure::Usage(format!(
                "{what} has no source; stdin is already taken"
            )));
        }
        self.stdin_used = true;
        let mut s = String::new();
        self.stdin
            .read_to_string(&mut s)
            .map_err(|e| input_error(format!("reading stdin: {e}")))?;
        Ok(s)
    }

    /// Inline text, else the `--input` file (claimed once), else stdin.
    fn json_text(&mut self, inline: Option<String>, what: &str) -> Result<String, Failure> {
        if let Some(text) = inline {
            return Ok(text);
        }
        if let Some(path) = self.input.take() {
            return fs::read_to_string(&path)
                .map_err(|e| input_error(format!("{}: {e}", path.display())));
        }
        self.read_stdin(what)
    }

    fn json<T: DeserializeOwned>(
        &mut self,
        inline: Option<String>,
        what: &str,
    ) -> Result<T, Failure> {
        let text = self.json_text(inline, what)?;
        serde_json::from_str(&text).map_err(|e| input_error(format!("{what}: {e}")))
    }

    fn csv(&mut self, path: Option<PathBuf>) -> Result<TimeSeries, Failure> {
        let text = match path {
            Some(p) => {
                fs::read_to_string(&p).map_err(|e| input_error(format!("{}: {e}", p.display())))?
            }
            None => self.read_stdin("data")?,
        };
        Ok(parse_csv(&text)?)
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn to_json<T: Serialize>(v: &T) -> Output {
    Output::Json(serde_json::to_value(v).expect("serialisable output"))
}

fn dispatch(cli: Cli, io: &mut Io) -> Result<Output, Failure> {
    match cli.command {
        Command::Pacf2ar(a) => {
            let b = io.json::<PacfInput>(a.pacf, "pacf")?.into_seq()?;
            Ok(to_json(&pacf_to_coeffs(&b)))
        }
        Command::Ar2pacf(a) => {
            let p: FilterPoly = io.json(a.poly, "poly")?;
            Ok(to_json(&coeffs_to_pacf(&p)?))
        }
        Command::Factor(a) => {
            let b = io.json::<PacfInput>(a.pacf, "pacf")?.into_seq()?;
            Ok(to_json(&factor_pacf(&b)?))
        }
        Command::CountRoots(a) => {
            let report = if a.poly.is_some() {
                let p: FilterPoly = io.json(a.poly, "poly")?;
                count_inside_poly(&p)?
            } else {
                // Values above one are legal here, so no PacfSeq validation.
                let v: Value = io.json(a.pacf, "pacf")?;
                let values = v.get("values").cloned().unwrap_or(v);
                let betas: Vec<f64> = serde_json::from_value(values)
                    .map_err(|e| input_error(format!("pacf: {e}")))?;
                count_inside(&betas)?
            };
            Ok(to_json(&report))
        }
        Command::Expand(a) => {
            let spec: SarumaSpec = io.json(a.spec, "spec")?;
            Ok(to_json(&expand(&spec)?))
        }
        Command::Validate(a) => {
            let spec: SarumaSpec = io.json(a.spec, "spec")?;
            Ok(to_json(&validate(&spec)))
        }
        Command::Simulate(a) => {
            let spec: SarumaSpec = io.json(a.spec, "spec")?;
            let model = expand(&spec)?;
            let sim =
                simulate_with_innovations(&model, a.len, spec.sigma2.sqrt(), cli.seed, a.burn_in)?;
            if let Some(path) = a.innovations {
                let e = TimeSeries::new(sim.innovations)?;
                fs::write(&path, format_csv(&e))
                    .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            }
            Ok(Output::Text(format_csv(&sim.series)))
        }
        Command::Residuals(a) => {
            if a.spec.is_none() && io.input.is_none() && a.data.is_none() {
                return Err(Failure::Usage(
                    "give --spec, --input or --data so spec and data do not both need stdin".into(),
                ));
            }
            let spec: SarumaSpec = io.json(a.spec, "spec")?;
            let y = io.csv(a.data)?;
            let model = expand(&spec)?;
            Ok(to_json(&residuals(&model, &y)?))
        }
        Command::Fit(a) => {
            let template = match a.data {
                Some(path) => {
                    let layout: SlotLayout = io.json(a.template, "template")?;
                    let y = io.csv(Some(path))?;
                    FitTemplate::new(layout, y)?
                }
                None => io.json(a.template, "template")?,
            };
            let opts = FitOptions {
                max_iter: cli.max_iter,
                tol: cli.tol,
                multistarts: cli.multistarts,
                seed: cli.seed,
            };
            Ok(to_json(&fit(&template, &opts)?))
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(
    argv: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().ansi().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let output_path = cli.output.clone();
    let mut io = Io {
        stdin,
        stdin_used: false,
        input: cli.input.clone(),
    };
    let result = dispatch(cli, &mut io).and_then(|out| {
        let text = match out {
            Output::Json(v) => serde_json::to_string_pretty(&v).expect("json value") + "\n",
            Output::Text(t) => t,
        };
        match &output_path {
            Some(p) => fs::write(p, text).map_err(|e| input_error(format!("{}: {e}", p.display()))),
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| input_error(format!("writing stdout: {e}"))),
        }
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Domain(v)) => {
            let _ = writeln!(stderr, "{v}");
            1
        }
    }
}
