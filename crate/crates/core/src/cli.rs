//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check failed (witness written to
//! stderr), 2 usage or parse error, 3 a size guard tripped.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::family::{translate_family, SetFamily};
use crate::group::{GroupSpec, DEFAULT_MAX_ORDER};
use crate::subset::{parse_set, GSubset};
use crate::verify::{
    element_frequencies, majority_element, reimer_unchecked, sweep_with, verify_theorem, SweepConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable overriding the group order ceiling.
pub const MAX_ORDER_ENV: &str = "UCC_MAX_ORDER";

#[derive(Parser, Debug)]
#[command(name = "ucc", version, about = "Union-closed families of translates in finite Abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the order and factors of a group
    GroupInfo {
        #[command(flatten)]
        common: Common,
    },
    /// Write the family {A + R : A ⊆ G} in family file format
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// R as a set literal, e.g. 0,1
        #[arg(long)]
        set: String,
    },
    /// Check every step of the averaging argument for one R
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: String,
    },
    /// Verify every nonempty R in a group
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One R per translation/negation orbit
        #[arg(long)]
        canonical: bool,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        /// Include per-instance reports
        #[arg(long)]
        per_instance: bool,
    },
    /// Analyse a family file
    Check {
        #[command(flatten)]
        output: OutputArgs,
        /// Family file to read
        #[arg(long = "file", value_name = "PATH")]
        family_file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Group spec, e.g. Z12 or Z2xZ4
    #[arg(long)]
    group: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_resource_guard() { EXIT_RESOURCE } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

struct Outcome {
    body: String,
    code: i32,
    /// Witness dumps for failed checks.
    diagnostics: String,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome {
            body,
            code: EXIT_OK,
            diagnostics: String::new(),
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn max_order() -> Result<usize, Failure> {
    match std::env::var(MAX_ORDER_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| usage(format!("{MAX_ORDER_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn parse_group(s: &str) -> Result<GroupSpec, Failure> {
    Ok(GroupSpec::parse_with_ceiling(s, max_order()?)?)
}

fn parse_r(spec: &GroupSpec, s: &str) -> Result<GSubset, Failure> {
    if s.is_empty() || s == "-" {
        return Err(usage("R must be nonempty (--set names no elements)"));
    }
    let r = parse_set(spec, s)?;
    Ok(r)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let target = match &cli.command {
        Command::GroupInfo { common }
        | Command::Enumerate { common, .. }
        | Command::Verify { common, .. }
        | Command::Sweep { common, .. } => common.output.output.clone(),
        Command::Check { output, .. } => output.output.clone(),
    };
    match execute(cli.command) {
        Ok(outcome) => {
            if !outcome.diagnostics.is_empty() {
                let _ = err.write_all(outcome.diagnostics.as_bytes());
            }
            let written = match target {
                Some(path) => fs::write(&path, &outcome.body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(outcome.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::GroupInfo { common } => group_info(&common),
        Command::Enumerate { common, set } => enumerate(&common, &set),
        Command::Verify { common, set } => verify(&common, &set),
        Command::Sweep {
            common,
            canonical,
            jobs,
            per_instance,
        } => sweep(&common, canonical, jobs as usize, per_instance),
        Command::Check { output, family_file } => check(&output, &family_file),
    }
}

fn group_info(common: &Common) -> Result<Outcome, Failure> {
    let spec = parse_group(&common.group)?;
    let table: Vec<Vec<usize>> = spec
        .elements()
        .map(|e| spec.decode(e).expect("in range"))
        .collect();
    let body = match common.output.format {
        Format::Json => pretty(&json!({
            "group": spec.to_string(),
            "order": spec.order(),
            "factors": spec.moduli(),
            "element_table_size": table.len(),
            "elements": table,
        })),
        Format::Text => {
            let factors: Vec<String> = spec.moduli().iter().map(usize::to_string).collect();
            let mut s = format!(
                "group    {spec}\norder    {}\nfactors  {}\nelements {}\n",
                spec.order(),
                factors.join(","),
                table.len()
            );
            for (i, coords) in table.iter().enumerate() {
                let c: Vec<String> = coords.iter().map(usize::to_string).collect();
                s.push_str(&format!("{i}\t({})\n", c.join(",")));
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

fn enumerate(common: &Common, set: &str) -> Result<Outcome, Failure> {
    let spec = parse_group(&common.group)?;
    let r = parse_r(&spec, set)?;
    let family = translate_family(&r)?;
    let body = match common.output.format {
        Format::Text => family.to_file_string(),
        Format::Json => pretty(&json!({
            "group": spec.to_string(),
            "r_set": r.indices(),
            "family_size": family.len(),
            "members": family.iter().map(GSubset::indices).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome::ok(body))
}

fn verify(common: &Common, set: &str) -> Result<Outcome, Failure> {
    let spec = parse_group(&common.group)?;
    let r = parse_r(&spec, set)?;
    let report = verify_theorem(&spec, &r)?;
    let body = match common.output.format {
        Format::Json => pretty(&report.to_json()),
        Format::Text => format!("{report}\n"),
    };
    let mut outcome = Outcome::ok(body);
    if !report.theorem_ok {
        outcome.code = EXIT_VIOLATION;
        outcome.diagnostics = violation_dump(&report);
    }
    Ok(outcome)
}

fn violation_dump(report: &crate::VerificationReport) -> String {
    let mut s = format!(
        "THEOREM CHECK FAILED for {} with R = {}\n",
        report.group, report.r_set
    );
    if let Some(w) = &report.witness {
        s.push_str(&w.to_file_string(&report.group, &report.r_set));
    }
    s
}

fn sweep(common: &Common, canonical: bool, jobs: usize, per_instance: bool) -> Result<Outcome, Failure> {
    let spec = parse_group(&common.group)?;
    let config = SweepConfig {
        canonicalize: canonical,
        jobs,
        keep_reports: per_instance,
        ..SweepConfig::default()
    };
    let summary = sweep_with(&spec, &config)?;
    let body = match common.output.format {
        Format::Json => pretty(&summary.to_json()),
        Format::Text => {
            let mut s = format!("{summary}\n");
            if let Some(reports) = &summary.reports {
                for r in reports {
                    s.push_str(&format!(
                        "R={}\tsize={}\taverage={}\tmin_slack={}\tok={}\n",
                        r.r_set, r.family_size, r.average_size, r.min_slack, r.theorem_ok
                    ));
                }
            }
            s
        }
    };
    let mut outcome = Outcome::ok(body);
    if !summary.all_ok {
        outcome.code = EXIT_VIOLATION;
        outcome.diagnostics = summary.failures.iter().map(violation_dump).collect();
    }
    Ok(outcome)
}

fn check(output: &OutputArgs, path: &PathBuf) -> Result<Outcome, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let family = SetFamily::parse_file_with_ceiling(&text, max_order()?)?;
    if family.is_empty() {
        return Err(usage(format!("{} contains no sets", path.display())));
    }
    let closed = family.is_union_closed();
    let generators = if closed {
        Some(family.join_irreducibles().len())
    } else {
        None
    };
    let frequencies = element_frequencies(&family);
    let majority = majority_element(&family)?;
    let reimer = closed.then(|| reimer_unchecked(&family));
    // {∅} is the one union-closed family the conjecture exempts
    let exempt = family.len() == 1 && family.members()[0].is_empty();
    let violation = closed && ((majority.is_none() && !exempt) || reimer == Some(false));

    let body = match output.format {
        Format::Json => pretty(&json!({
            "group": family.spec().to_string(),
            "family_size": family.len(),
            "is_union_closed": closed,
            "minimal_generators": generators,
            "element_frequencies": frequencies,
            "majority": majority,
            "reimer_ok": reimer,
        })),
        Format::Text => {
            let opt = |v: Option<String>| v.unwrap_or_else(|| "n/a".into());
            let freqs: Vec<String> = frequencies.iter().map(u64::to_string).collect();
            format!(
                "group               {}\nfamily size         {}\nunion-closed        {}\nminimal generators  {}\nfrequencies         {}\nmajority            {}\nreimer bound        {}\n",
                family.spec(),
                family.len(),
                closed,
                opt(generators.map(|g| g.to_string())),
                freqs.join(","),
                opt(majority.map(|m| format!("{} in {} of {}", m.element, m.count, family.len()))),
                opt(reimer.map(|b| if b { "ok".to_string() } else { "FAILED".to_string() })),
            )
        }
    };
    let mut outcome = Outcome::ok(body);
    if violation {
        outcome.code = EXIT_VIOLATION;
        outcome.diagnostics = format!("CHECK FAILED for union-closed family in {}\n", path.display());
    }
    Ok(outcome)
}
