//! The `mtt-lab` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::checks::{bridge_verdict, ChannelReport};
use crate::cxcore::Degree;
use crate::mtt::{DatumError, Diagnostic, DiagnosticKind, InheritedPackage, MTTDatum};
use crate::models::{demo, DemoParams, DEMO_NAMES};
use crate::suite::{verify_datum, verify_random, Suite};

/// Exit status when a requested check fails.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for unreadable or invalid input and bad usage.
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mtt-lab", version, about = "Exact interaction invariants of mediated transport data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and fully validate a datum file.
    Validate { file: PathBuf },
    /// Compute one channel polynomial or the whole inherited package.
    Compute {
        file: PathBuf,
        /// 1-based source and target node positions.
        #[arg(long, num_args = 2, value_names = ["I", "J"], conflicts_with = "all", allow_negative_numbers = true)]
        channel: Option<Vec<i64>>,
        /// All channels (the default).
        #[arg(long)]
        all: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run verification suites on a datum or on seeded random data.
    Verify {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        random: bool,
        /// les, visibility, bridge, euler, oracle or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write a generated datum. The obstruction demo writes a second file
    /// next to the first, with `.alt` before the extension.
    Demo {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        m0: Degree,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        m: Degree,
    },
    /// Render the inherited package and bridge verdicts, optionally compared
    /// with a second datum.
    Report {
        file: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
}

/// A failed invocation: exit status plus a machine-readable summary.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        Failure {
            status: EXIT_INVALID,
            diagnostics: vec![Diagnostic {
                kind: DiagnosticKind::Validation,
                field: field.to_string(),
                message: message.into(),
            }],
        }
    }

    pub fn summary(&self) -> String {
        let kind = if self.status == EXIT_CHECK_FAILED { "check_failed" } else { "invalid" };
        let v = json!({ "status": kind, "diagnostics": self.diagnostics });
        serde_json::to_string_pretty(&v).expect("summary serializes")
    }
}

impl From<DatumError> for Failure {
    fn from(e: DatumError) -> Self {
        Failure {
            status: EXIT_INVALID,
            diagnostics: e.diagnostics(),
        }
    }
}

/// Parses arguments, runs, and returns the exit status. Failure summaries go
/// to `err`; regular output goes to `out` or to the `-o` file.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_INVALID } else { 0 };
            if status == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return status;
        }
    };
    match run(&cli.command, out) {
        Ok(status) => status,
        Err(f) => {
            let _ = writeln!(err, "{}", f.summary());
            f.status
        }
    }
}

pub fn parse_datum(path: &Path) -> Result<MTTDatum, Failure> {
    Ok(MTTDatum::load(path)?)
}

fn emit(output: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::invalid(&p.display().to_string(), e.to_string())),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::invalid("stdout", e.to_string())),
    }
}

pub fn run(cmd: &Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Validate { file } => {
            let d = parse_datum(file)?;
            let text = format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({
                    "status": "ok",
                    "file": file.display().to_string(),
                    "nodes": d.nodes,
                }))
                .expect("json")
            );
            emit(&None, &text, out)?;
            Ok(0)
        }
        Command::Compute {
            file,
            channel,
            all: _,
            output,
            format,
        } => {
            let d = parse_datum(file)?;
            let text = match channel {
                Some(ij) => {
                    let (i, j) = channel_indices(&d, ij)?;
                    render_channel(&d, i, j, *format)
                }
                None => render_package(&d.inherited_package(), &d.nodes, *format),
            };
            emit(output, &text, out)?;
            Ok(0)
        }
        Command::Verify {
            file,
            random,
            suite,
            seed,
            trials,
            output,
            format,
        } => {
            let suites = Suite::parse_selector(suite).ok_or_else(|| {
                Failure::invalid(
                    "--suite",
                    format!("unknown suite {suite:?}; expected les, visibility, bridge, euler, oracle or all"),
                )
            })?;
            let report = match (file, random) {
                (Some(f), false) => {
                    let d = parse_datum(f)?;
                    verify_datum(&d, &f.display().to_string(), &suites, *seed, *trials)
                }
                (None, true) => verify_random(&suites, *seed, *trials),
                _ => return Err(Failure::invalid("verify", "give a datum file or --random")),
            };
            let text = match format {
                Format::Md => report.to_markdown(),
                Format::Json => report.to_json(),
                Format::Csv => {
                    let mut s = String::from("suite,trials,passed,failed\n");
                    for o in &report.suites {
                        s.push_str(&format!("{},{},{},{}\n", o.suite.name(), o.trials, o.passed, o.failed));
                    }
                    s
                }
            };
            emit(output, &text, out)?;
            Ok(if report.all_passed { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Demo {
            name,
            output,
            d,
            m0,
            a,
            b,
            m,
        } => {
            let params = DemoParams {
                d: *d,
                m0: *m0,
                a: *a,
                b: *b,
                m: *m,
            };
            if !DEMO_NAMES.contains(&name.as_str()) {
                return Err(Failure::invalid(
                    "name",
                    format!("unknown demo {name:?}; expected one of {}", DEMO_NAMES.join(", ")),
                ));
            }
            let data = demo(name, &params).map_err(|e| Failure::invalid("demo", e.to_string()))?;
            match (data.as_slice(), output) {
                ([one], _) => emit(output, &one.to_json(), out)?,
                ([first, second], Some(path)) => {
                    emit(output, &first.to_json(), out)?;
                    emit(&Some(alt_path(path)), &second.to_json(), out)?;
                }
                _ => return Err(Failure::invalid("-o", "this demo writes two files and needs -o")),
            }
            Ok(0)
        }
        Command::Report {
            file,
            against,
            output,
            format,
        } => {
            let d = parse_datum(file)?;
            let other = match against {
                Some(p) => Some((p, parse_datum(p)?)),
                None => None,
            };
            let report = build_report(&d, other.as_ref().map(|(_, o)| o));
            let text = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Md => report_markdown(&report, file, other.as_ref().map(|(p, _)| p.as_path())),
                Format::Csv => report_csv(&report),
            };
            emit(output, &text, out)?;
            Ok(0)
        }
    }
}

/// `x.json` becomes `x.alt.json`.
pub fn alt_path(p: &Path) -> PathBuf {
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match p.extension() {
        Some(ext) => format!("{stem}.alt.{}", ext.to_string_lossy()),
        None => format!("{stem}.alt"),
    };
    p.with_file_name(name)
}

fn channel_indices(d: &MTTDatum, ij: &[i64]) -> Result<(usize, usize), Failure> {
    let r = d.node_count() as i64;
    let (i, j) = (ij[0], ij[1]);
    if !(1..=r).contains(&i) || !(1..=r).contains(&j) {
        return Err(Failure::invalid(
            "--channel",
            format!("channel ({i}, {j}) out of range; nodes are numbered 1..={r}"),
        ));
    }
    Ok((i as usize - 1, j as usize - 1))
}

fn render_channel(d: &MTTDatum, i: usize, j: usize, format: Format) -> String {
    let p = d.interaction_polynomial(i, j).expect("indices checked");
    match format {
        Format::Json => {
            let v = json!({
                "i": i + 1,
                "j": j + 1,
                "P": p,
                "P_text": p.to_string(),
                "w_tot": p.w_tot(),
                "w_chi": p.w_chi(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        Format::Md => format!(
            "| i | j | P_ij | w^tot | w^χ |\n|---|---|---|---|---|\n| {} | {} | {} | {} | {} |\n",
            i + 1,
            j + 1,
            p,
            p.w_tot(),
            p.w_chi()
        ),
        Format::Csv => format!(
            "i,j,P,w_tot,w_chi\n{},{},{},{},{}\n",
            i + 1,
            j + 1,
            csv_field(&p.to_string()),
            p.w_tot(),
            p.w_chi()
        ),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', ' ']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_package(pkg: &InheritedPackage, nodes: &[String], format: Format) -> String {
    let r = pkg.graded.size();
    match format {
        Format::Json => pkg.to_json(),
        Format::Md => {
            let mut s = String::from("| P_ij |");
            for n in nodes {
                s.push_str(&format!(" {n} |"));
            }
            s.push_str("\n|---|");
            s.push_str(&"---|".repeat(r));
            s.push('\n');
            for (i, n) in nodes.iter().enumerate() {
                s.push_str(&format!("| {n} |"));
                for j in 0..r {
                    s.push_str(&format!(" {} |", pkg.graded.get(i, j)));
                }
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("i,j,supported,nonvanishing,P,w_tot,w_chi\n");
            for i in 0..r {
                for j in 0..r {
                    let [wt, wc] = pkg.specializations[i][j];
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        i + 1,
                        j + 1,
                        pkg.support[i][j],
                        pkg.nonvanishing[i][j],
                        csv_field(&pkg.graded.get(i, j).to_string()),
                        wt,
                        wc
                    ));
                }
            }
            s
        }
    }
}

/// One field on which two data disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub item: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub package: InheritedPackage,
    pub channels: Vec<ChannelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Vec<Discrepancy>>,
}

fn build_report(d: &MTTDatum, other: Option<&MTTDatum>) -> Report {
    let channels = bridge_verdict(d);
    let comparison = other.map(|o| compare(d, &channels, o, &bridge_verdict(o)));
    Report {
        package: d.inherited_package(),
        channels,
        comparison,
    }
}

/// Nodewise data first, then every channel field that differs.
fn compare(a: &MTTDatum, ca: &[ChannelReport], b: &MTTDatum, cb: &[ChannelReport]) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let mut diff = |item: String, l: String, r: String| {
        if l != r {
            out.push(Discrepancy { item, left: l, right: r });
        }
    };
    let js = |v: &dyn erased::Json| v.json();
    diff("nodes".into(), js(&a.nodes), js(&b.nodes));
    diff("state".into(), js(&a.state), js(&b.state));
    diff("support".into(), js(&a.support_bits()), js(&b.support_bits()));
    let r = a.node_count().min(b.node_count());
    for k in 0..r {
        diff(format!("probe {}", k + 1), js(&a.probes[k]), js(&b.probes[k]));
        diff(format!("shadow kernel {}", k + 1), js(&a.shadow_kernels[k]), js(&b.shadow_kernels[k]));
        diff(format!("shadow object {}", k + 1), js(&a.shadow_objects[k]), js(&b.shadow_objects[k]));
    }
    if a.node_count() == b.node_count() {
        for (x, y) in ca.iter().zip(cb) {
            let tag = format!("channel ({}, {})", x.i, x.j);
            diff(format!("{tag} P"), x.p.to_string(), y.p.to_string());
            diff(format!("{tag} content"), content_text(x), content_text(y));
            diff(format!("{tag} detector"), bit(x.detector_holds_at_probe).into(), bit(y.detector_holds_at_probe).into());
            diff(format!("{tag} consistent"), bit(x.bridge_consistent).into(), bit(y.bridge_consistent).into());
        }
    }
    out
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }

    impl<T: serde::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string(self).expect("serializable")
        }
    }
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn content_text(c: &ChannelReport) -> String {
    format!("{}{}", bit(c.content_left_nonzero), bit(c.content_right_nonzero))
}

fn report_markdown(r: &Report, file: &Path, against: Option<&Path>) -> String {
    let pkg = &r.package;
    let mut s = format!("# mtt-lab report: {}\n\n## State\n\n| vertex | basis | c |\n|---|---|---|\n", file.display());
    for k in 0..pkg.state.vertices.len() {
        s.push_str(&format!(
            "| {} | {} | {} |\n",
            pkg.state.vertices[k], pkg.state.basis_labels[k], pkg.state.c_sigma[k]
        ));
    }
    s.push_str("\n## Channels\n\n| i | j | supported | content | detector | P_ij | w^tot | w^χ | consistent |\n|---|---|---|---|---|---|---|---|---|\n");
    for c in &r.channels {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
            c.i,
            c.j,
            bit(c.supported),
            bit(c.content_holds()),
            bit(c.detector_holds_at_probe),
            c.p,
            c.w_tot,
            c.w_chi,
            bit(c.bridge_consistent)
        ));
    }
    s.push_str("\n## Support and nonvanishing\n\n| i | support | nonvanishing |\n|---|---|---|\n");
    for (k, (sr, nr)) in pkg.support.iter().zip(&pkg.nonvanishing).enumerate() {
        let row = |v: &Vec<u8>| v.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
        s.push_str(&format!("| {} | {} | {} |\n", k + 1, row(sr), row(nr)));
    }
    if let (Some(cmp), Some(other)) = (&r.comparison, against) {
        s.push_str(&format!("\n## Differences against {}\n\n", other.display()));
        if cmp.is_empty() {
            s.push_str("none\n");
        } else {
            s.push_str("| item | this | other |\n|---|---|---|\n");
            for d in cmp {
                s.push_str(&format!("| {} | {} | {} |\n", d.item, d.left, d.right));
            }
        }
    }
    s
}

fn report_csv(r: &Report) -> String {
    let mut s = String::from("i,j,supported,content,detector,P,w_tot,w_chi,consistent\n");
    for c in &r.channels {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.i,
            c.j,
            bit(c.supported),
            bit(c.content_holds()),
            bit(c.detector_holds_at_probe),
            csv_field(&c.p.to_string()),
            c.w_tot,
            c.w_chi,
            bit(c.bridge_consistent)
        ));
    }
    s
}
