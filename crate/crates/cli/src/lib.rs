//! The `icap` command: exact inner and outer bounds on index coding capacity
//! regions from the command line.
//!
//! Every flag can also be set through an `ICAP_`-prefixed environment
//! variable (`ICAP_FORMAT`, `ICAP_MAX_N`, ...). Exit codes: 0 success,
//! 1 computation error, 2 usage error, 3 bounds not matched (or undecided)
//! by `verify` or `sweep`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use icap::geometry::remove_redundant;
use icap::inner_bounds::{composite_member_with_budget, symmetric_inner, symmetric_outer};
use icap::outer_bound::DEFAULT_OUTER_LIMIT;
use icap::problem::enumerate_problems_with_limit;
use icap::verify::verify_capacity_with;
use icap::{
    canonical_key, composite_region_fixed, dual_region, flat_region, flat_timeshare_region,
    interfering_sets, mais_region, outer_region, parse_problem, sweep, CompositeRates,
    DecodingConfig, LinearSystem, Membership, MsgSet, Problem, ProblemRecord, Rational, Region,
    SearchBudget, SweepOptions, VerificationRecord, VerifyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNMATCHED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Aligned text for reading.
    Human,
    /// One JSON object per line.
    #[value(name = "json-lines", alias = "structured")]
    JsonLines,
}

#[derive(Parser, Debug)]
#[command(name = "icap", version, about = "Exact capacity bounds for index coding problems")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human, env = "ICAP_FORMAT")]
    format: Format,
    /// Largest number of messages accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_OUTER_LIMIT, env = "ICAP_MAX_N")]
    max_n: usize,
    /// Time budget in milliseconds for the achievability search of one problem.
    #[arg(long, global = true, env = "ICAP_LP_BUDGET_MS")]
    lp_budget_ms: Option<u64>,
    /// Worker threads for `sweep` and `member` (0 = one per core).
    #[arg(long, global = true, default_value_t = 0, env = "ICAP_WORKERS")]
    workers: usize,
    /// Seed for randomized consistency checks (`verify` relabels the problem).
    #[arg(long, global = true, env = "ICAP_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

/// Exactly one way of naming the problem.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Problem text, e.g. "(1|2),(2|1,3),(3|1)".
    problem: Option<String>,
    /// File holding problem text.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Structured problem, e.g. '{"n":3,"side_info":[[2],[1,3],[1]]}'.
    #[arg(long, value_name = "JSON")]
    json: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Echo the normalized problem, its canonical key and side-information edges.
    Parse(Source),
    /// Polymatroidal outer bound.
    Outer(Source),
    /// Acyclic-subset outer bound.
    Mais(Source),
    /// Flat-coding inner bound.
    Flat(Source),
    /// Time sharing of flat coding over subsets of messages.
    Timeshare(Source),
    /// Capacity region of a dual index coding problem.
    Dual {
        /// Messages to decode, e.g. "{1,2,3}".
        #[arg(long)]
        messages: MsgSet,
        /// Side information at the receiver.
        #[arg(long, default_value = "{}")]
        side_info: MsgSet,
        /// Sender rate, e.g. "{1,3}=2"; repeat for each sender.
        #[arg(long = "rate", value_name = "SET=RATE")]
        rates: Vec<String>,
        /// Keep redundant rows.
        #[arg(long)]
        all_rows: bool,
    },
    /// Test a rate point against the composite-coding inner bound.
    Member {
        #[command(flatten)]
        source: Source,
        /// Comma-separated rates, e.g. "2/5,2/5,2/5,2/5,2/5".
        #[arg(long, value_delimiter = ',', required = true)]
        point: Vec<Rational>,
    },
    /// Composite-coding region for a fixed decoding configuration and support.
    Fixed {
        #[command(flatten)]
        source: Source,
        /// Decoding sets separated by ';', e.g. "{1};{1,2};{3,4};{1,4}".
        /// Defaults to every receiver decoding only its own message.
        #[arg(long)]
        config: Option<String>,
        /// Composite index allowed a nonzero rate, e.g. "{1,4}"; repeat.
        #[arg(long = "index", required = true)]
        support: Vec<MsgSet>,
    },
    /// Largest symmetric rate under each bound.
    Symcap(Source),
    /// Decide whether the inner and outer bounds coincide.
    Verify(Source),
    /// List one problem per isomorphism class.
    Enumerate {
        /// Number of messages.
        n: usize,
    },
    /// Verify every isomorphism class with `n` messages.
    Sweep {
        /// Number of messages.
        n: usize,
        /// Result file (one JSON record per line).
        #[arg(long, env = "ICAP_OUT")]
        out: PathBuf,
        /// Keep records already in the result file.
        #[arg(long, env = "ICAP_RESUME")]
        resume: bool,
        /// Record per-problem wall time (makes the file non-reproducible).
        #[arg(long)]
        wall_time: bool,
    },
}

/// An error attributable to the invocation rather than the computation.
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

enum Outcome {
    Done,
    Unmatched,
}

/// Parses `args` (including the program name) and runs the command, writing
/// to standard output and standard error. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Unmatched) => EXIT_UNMATCHED,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                EXIT_USAGE
            } else {
                EXIT_COMPUTATION
            }
        }
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    format: Format,
}

impl Printer<'_> {
    fn json(&mut self, value: &impl Serialize) -> anyhow::Result<()> {
        writeln!(self.out, "{}", serde_json::to_string(value)?)?;
        Ok(())
    }

    /// Emits `value` as one JSON line, or runs `human` for text output.
    fn emit(
        &mut self,
        value: &impl Serialize,
        human: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> anyhow::Result<()> {
        match self.format {
            Format::JsonLines => self.json(value),
            Format::Human => Ok(human(self.out)?),
        }
    }

    fn region(&mut self, region: &Region) -> anyhow::Result<()> {
        self.emit(&region.to_record(), |w| {
            writeln!(w, "variables  {}", region.facets().vars().join(" "))?;
            writeln!(w, "facets     {}", region.facets().len())?;
            for row in region.facets().render_rows() {
                writeln!(w, "  {row}")?;
            }
            writeln!(w, "vertices   {}", region.vertices().len())?;
            for v in region.vertices() {
                writeln!(w, "  {}", point_text(v))?;
            }
            Ok(())
        })
    }
}

fn point_text(v: &[Rational]) -> String {
    let items: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", items.join(", "))
}

fn load_problem(src: &Source, max_n: usize) -> anyhow::Result<Problem> {
    let p = if let Some(text) = &src.problem {
        parse_problem(text).map_err(|e| usage(format!("problem: {e}")))?
    } else if let Some(path) = &src.file {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        parse_problem(&text).map_err(|e| usage(format!("--file {}: {e}", path.display())))?
    } else if let Some(text) = &src.json {
        let rec: ProblemRecord =
            serde_json::from_str(text).map_err(|e| usage(format!("--json: {e}")))?;
        Problem::from_record(&rec).map_err(|e| usage(format!("--json: {e}")))?
    } else {
        return Err(usage("a problem is required"));
    };
    if p.n() > max_n {
        bail!("problem has {} messages; --max-n is {max_n}", p.n());
    }
    Ok(p)
}

fn budget(cli: &Cli, parallel: bool) -> SearchBudget {
    SearchBudget {
        deadline: cli
            .lp_budget_ms
            .map(|ms| Instant::now() + Duration::from_millis(ms)),
        parallel,
    }
}

fn parse_rates(items: &[String]) -> anyhow::Result<CompositeRates> {
    let mut rates = CompositeRates::new();
    for item in items {
        let (set, rate) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("--rate {item}: expected SET=RATE")))?;
        let set: MsgSet = set
            .parse()
            .map_err(|e| usage(format!("--rate {item}: {e}")))?;
        if set.is_empty() {
            return Err(usage(format!("--rate {item}: empty index set")));
        }
        let rate: Rational = rate
            .trim()
            .parse()
            .map_err(|e| usage(format!("--rate {item}: {e}")))?;
        if rate.is_negative() {
            return Err(usage(format!("--rate {item}: rates are nonnegative")));
        }
        rates.set(set, &rates.get(set) + &rate);
    }
    Ok(rates)
}

fn parse_config(text: Option<&str>, n: usize) -> anyhow::Result<DecodingConfig> {
    let Some(text) = text else {
        return Ok(DecodingConfig::own_only(n));
    };
    let sets: Vec<MsgSet> = text
        .split(';')
        .map(|s| s.parse::<MsgSet>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--config: {e}")))?;
    if sets.len() != n {
        return Err(usage(format!("--config: {} decoding sets for {n} receivers", sets.len())));
    }
    DecodingConfig::new(sets).map_err(|e| usage(format!("--config: {e}")))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    if cli.workers > 0 {
        // Ignore failure: the global pool may already be configured when
        // running several commands in one process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    let mut pr = Printer {
        out,
        format: cli.format,
    };
    let max_n = cli.max_n;
    match &cli.command {
        Command::Parse(src) => {
            let p = load_problem(src, max_n)?;
            let key = canonical_key(&p)?;
            let edges = p.edges();
            let interfering = interfering_sets(&p);
            let value = json!({
                "problem": p.render(),
                "record": p.to_record(),
                "key": key,
                "edges": edges,
                "interfering": interfering.iter().map(|s| s.iter().collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            pr.emit(&value, |w| {
                writeln!(w, "problem   {}", p.render())?;
                writeln!(w, "messages  {}", p.n())?;
                writeln!(w, "key       {key}")?;
                let e: Vec<String> = edges.iter().map(|(i, k)| format!("{i}->{k}")).collect();
                writeln!(w, "edges     {} (i->k: message i is side information at receiver k)", e.join(" "))?;
                for j in 1..=p.n() {
                    writeln!(
                        w,
                        "receiver {j}: side information {}, interfering {}",
                        p.side_info(j),
                        interfering[j - 1]
                    )?;
                }
                Ok(())
            })?;
        }
        Command::Outer(src) => pr.region(&outer_region(&load_problem(src, max_n)?)?)?,
        Command::Mais(src) => pr.region(&mais_region(&load_problem(src, max_n)?)?)?,
        Command::Flat(src) => pr.region(&flat_region(&load_problem(src, max_n)?)?)?,
        Command::Timeshare(src) => pr.region(&flat_timeshare_region(&load_problem(src, max_n)?)?)?,
        Command::Dual {
            messages,
            side_info,
            rates,
            all_rows,
        } => {
            if messages.minus(*side_info).is_empty() {
                return Err(usage("--messages: nothing to decode outside --side-info"));
            }
            let rates = parse_rates(rates)?;
            let full = dual_region(*messages, *side_info, &rates);
            let mut sys: LinearSystem = if *all_rows { full } else { remove_redundant(&full) };
            sys.sort_rows();
            let value = json!({ "vars": sys.vars(), "rows": sys.render_rows() });
            pr.emit(&value, |w| {
                writeln!(w, "variables  {}", sys.vars().join(" "))?;
                for row in sys.render_rows() {
                    writeln!(w, "  {row}")?;
                }
                Ok(())
            })?;
        }
        Command::Member { source, point } => {
            let p = load_problem(source, max_n)?;
            let status = composite_member_with_budget(&p, point, budget(cli, cli.workers != 1))?;
            let (label, cert) = match &status {
                Membership::Member(c) => ("member", Some(c.as_ref())),
                Membership::NotMember => ("not-member", None),
                Membership::Undecided => ("undecided", None),
            };
            let value = json!({ "status": label, "certificate": cert });
            pr.emit(&value, |w| {
                writeln!(w, "point   {}", point_text(point))?;
                writeln!(w, "status  {label}")?;
                if let Some(c) = cert {
                    for (j, k) in c.config.sets().iter().enumerate() {
                        writeln!(w, "  K_{} = {k}", j + 1)?;
                    }
                    for (set, rate) in c.rates.iter() {
                        writeln!(w, "  S_{set} = {rate}")?;
                    }
                }
                Ok(())
            })?;
        }
        Command::Fixed {
            source,
            config,
            support,
        } => {
            let p = load_problem(source, max_n)?;
            let config = parse_config(config.as_deref(), p.n())?;
            pr.region(&composite_region_fixed(&p, &config, support)?)?;
        }
        Command::Symcap(src) => {
            let p = load_problem(src, max_n)?;
            let outer = symmetric_outer(&p)?;
            let inner = symmetric_inner(&p, &outer, budget(cli, false))?;
            let value = json!({ "inner": inner, "outer": outer });
            pr.emit(&value, |w| {
                match &inner {
                    Some(t) => writeln!(w, "inner  {t}")?,
                    None => writeln!(w, "inner  undecided")?,
                }
                writeln!(w, "outer  {outer}")
            })?;
        }
        Command::Verify(src) => {
            let p = load_problem(src, max_n)?;
            let options = VerifyOptions {
                lp_budget: cli.lp_budget_ms.map(Duration::from_millis),
                record_wall_time: false,
                parallel_search: cli.workers != 1,
            };
            let rec = verify_capacity_with(&p, options)?;
            print_record(&mut pr, &rec)?;
            if let Some(seed) = cli.seed {
                let mut perm: Vec<usize> = (0..p.n()).collect();
                perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let other = verify_capacity_with(&p.permuted(&perm), options)?;
                let consistent = other.verdict == rec.verdict && other.key == rec.key;
                let value = json!({
                    "relabeled": other.problem,
                    "verdict": other.verdict,
                    "consistent": consistent,
                });
                pr.emit(&value, |w| {
                    writeln!(w, "relabeled  {} -> {} (consistent: {consistent})", other.problem, other.verdict)
                })?;
                if !consistent {
                    bail!("verdict changed under relabeling {perm:?}");
                }
            }
            if !rec.matched {
                return Ok(Outcome::Unmatched);
            }
        }
        Command::Enumerate { n } => {
            let mut count = 0usize;
            for p in enumerate_problems_with_limit(*n, max_n.min(DEFAULT_OUTER_LIMIT))? {
                let key = canonical_key(&p)?;
                let value = json!({ "key": key, "problem": p.render() });
                pr.emit(&value, |w| writeln!(w, "{key}  {}", p.render()))?;
                count += 1;
            }
            if cli.format == Format::Human {
                writeln!(pr.out, "{count} problems")?;
            }
        }
        Command::Sweep {
            n,
            out: path,
            resume,
            wall_time,
        } => {
            let options = SweepOptions {
                verify: VerifyOptions {
                    lp_budget: cli.lp_budget_ms.map(Duration::from_millis),
                    record_wall_time: *wall_time,
                    parallel_search: false,
                },
                workers: cli.workers,
                resume: *resume,
                max_n: max_n.min(DEFAULT_OUTER_LIMIT),
            };
            let summary = sweep(*n, path, options)?;
            pr.emit(&summary, |w| writeln!(w, "{summary}"))?;
            if !summary.all_matched() {
                return Ok(Outcome::Unmatched);
            }
        }
    }
    Ok(Outcome::Done)
}

fn print_record(pr: &mut Printer<'_>, rec: &VerificationRecord) -> anyhow::Result<()> {
    pr.emit(rec, |w| {
        writeln!(w, "problem          {}", rec.problem)?;
        writeln!(w, "key              {}", rec.key)?;
        writeln!(w, "outer facets     {}", rec.outer_facets)?;
        writeln!(w, "outer vertices   {}", rec.outer_vertices)?;
        writeln!(w, "verdict          {}", rec.verdict)?;
        writeln!(w, "flat time share  {}", if rec.flat_timeshare_matched { "matches" } else { "falls short" })?;
        let inner = rec
            .symmetric
            .inner
            .as_ref()
            .map_or("undecided".to_string(), ToString::to_string);
        writeln!(w, "symmetric rate   inner {inner}, outer {}", rec.symmetric.outer)?;
        if let Some(v) = &rec.failing_vertex {
            writeln!(w, "first failure    {}", point_text(v))?;
        }
        Ok(())
    })
}
