//! The `patternlab` command line: subcommands, emitters and the batch runner.
//!
//! Every subcommand produces an [`Output`]: a JSON value plus, where the data
//! is tabular, a CSV rendering. Exact quantities are `"p/q"` strings. CSV
//! floats carry 17 significant digits.
//!
//! Batch configs are TOML. Each `[[jobs]]` table names a job, picks a `kind`
//! (a subcommand, with `verify-wdg`, `verify-total-cumulance` and
//! `verify-params` for the verify family) and lists the subcommand's flags as
//! keys. Optional `[[jobs.checks]]` tables compare a JSON pointer into the
//! job output against `equals`, `min` or `max`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combi::{ArcPattern, Multiset, PermPattern, SetPartition, Word};
use crate::cond::{cond_exp_table, var_cond_expectation, DIRECT_SUM_CAP};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::mc::{run_mc, variance_scaling_slope, McSummary};
use crate::moments::{
    joint_cumulant, parse_list, total_cumulance_check, ArcIndicator, ConditionalArcs, Family, MPermClosedForm,
    MPermIndicator, Memoized, MomentOracle, PartitionEnumeration, WordEnumeration,
};
use crate::patterns::{count_arc_pattern, count_perm_pattern, occurrences_arc_pattern, occurrences_perm_pattern};
use crate::rational::to_pq;
use crate::samplers::{replica_seed, sample_multiset_perm, sample_stam, MUrnLaw};
use crate::wdg::{estimate_Cr, param_report, FamilySpec};

#[derive(Debug, Parser)]
#[command(name = "patternlab", version, about = "Pattern statistics in multiset permutations and set partitions")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw uniform multiset permutations or set partitions.
    Sample(SampleArgs),
    /// Count occurrences of a permutation pattern in a word.
    Count(CountArgs),
    /// Count occurrences of an arc pattern in a set partition.
    CountArcs(CountArcsArgs),
    /// Exact joint cumulant of a bag of indicators.
    Cumulant(CumulantArgs),
    /// Exact checks of dependency-graph bounds and cumulance identities.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Conditional expectation of an arc-pattern count given the urn count.
    CondExp(CondExpArgs),
    /// Monte Carlo normality and scaling diagnostics.
    Mc(McArgs),
    /// Run a TOML experiment config.
    Batch(BatchArgs),
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Scan all bags of one size for the largest cumulant bound ratio.
    Wdg(WdgArgs),
    /// Law of total cumulance over the urn count.
    TotalCumulance(TotalCumulanceArgs),
    /// R, T_1, T_2, C_2 and the variance bound for a pattern family.
    Params(ParamsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Mperm,
    Setpart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Enum,
}

fn default_one() -> usize {
    1
}
fn default_two() -> usize {
    2
}
fn default_tail_tol() -> f64 {
    1e-12
}
fn default_tight_tail_tol() -> f64 {
    1e-15
}
fn default_auto() -> String {
    "auto".into()
}
fn default_reps() -> usize {
    10_000
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    #[serde(default)]
    pub multiset: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    /// Number of draws.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_one")]
    pub count: usize,
    #[arg(long, default_value_t = default_tail_tol())]
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CountArgs {
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub pattern: String,
    /// Also list the occurrence positions.
    #[arg(long)]
    #[serde(default)]
    pub list: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CountArcsArgs {
    #[arg(long)]
    pub partition: String,
    /// Arc pattern such as `1-3,2-4`, optionally `:len`.
    #[arg(long)]
    pub arcs: String,
    #[arg(long)]
    #[serde(default)]
    pub list: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CumulantArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    #[serde(default)]
    pub multiset: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    /// `pos:value` list for words, `i-j` list for arcs.
    #[arg(long)]
    pub indicators: String,
    /// `auto` keeps the default order cap; a number raises it.
    #[arg(long, default_value = "auto")]
    #[serde(default = "default_auto")]
    pub order: String,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub method: Option<Method>,
    /// Condition on the urn count `M = m` (set partitions only).
    #[arg(long)]
    #[serde(default)]
    pub given_m: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WdgArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    #[serde(default)]
    pub multiset: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    /// Bag size r.
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_two")]
    pub order: usize,
    /// Report path; same as `--out`.
    #[arg(long)]
    #[serde(default)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TotalCumulanceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub arcs: String,
    #[arg(long, default_value_t = default_tight_tail_tol())]
    #[serde(default = "default_tight_tail_tol")]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ParamsArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    #[serde(default)]
    pub multiset: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    /// Permutation pattern for words, arc pattern for set partitions.
    #[arg(long)]
    pub pattern: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CondExpArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub arcs: String,
    #[arg(long, default_value_t = default_tail_tol())]
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    /// Permutation pattern (words).
    #[arg(long)]
    #[serde(default)]
    pub pattern: Option<String>,
    /// Arc pattern (set partitions).
    #[arg(long)]
    #[serde(default)]
    pub arcs: Option<String>,
    /// Sizes n; words use the balanced multiset on `--letters` letters.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_two")]
    pub letters: usize,
    /// A fixed multiset instead of `--sizes`.
    #[arg(long)]
    #[serde(default)]
    pub multiset: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    #[serde(default = "default_reps")]
    pub reps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Keep running after a job fails.
    #[arg(long)]
    pub keep_going: bool,
}

/// A job of an experiment config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Job {
    Sample(SampleArgs),
    Count(CountArgs),
    CountArcs(CountArcsArgs),
    Cumulant(CumulantArgs),
    VerifyWdg(WdgArgs),
    VerifyTotalCumulance(TotalCumulanceArgs),
    VerifyParams(ParamsArgs),
    CondExp(CondExpArgs),
    Mc(McArgs),
}

impl Job {
    pub fn kind(&self) -> &'static str {
        match self {
            Job::Sample(_) => "sample",
            Job::Count(_) => "count",
            Job::CountArcs(_) => "count-arcs",
            Job::Cumulant(_) => "cumulant",
            Job::VerifyWdg(_) => "verify-wdg",
            Job::VerifyTotalCumulance(_) => "verify-total-cumulance",
            Job::VerifyParams(_) => "verify-params",
            Job::CondExp(_) => "cond-exp",
            Job::Mc(_) => "mc",
        }
    }

    /// Parses every pattern, multiset and list the job refers to.
    pub fn validate(&self) -> Result<()> {
        match self {
            Job::Sample(a) => family_of(a.family, &a.multiset, a.n).map(drop),
            Job::Count(a) => {
                a.word.parse::<Word>()?;
                a.pattern.parse::<PermPattern>().map(drop)
            }
            Job::CountArcs(a) => {
                a.partition.parse::<SetPartition>()?;
                a.arcs.parse::<ArcPattern>().map(drop)
            }
            Job::Cumulant(a) => {
                family_of(a.family, &a.multiset, a.n)?;
                parse_order(&a.order)?;
                match a.family {
                    FamilyKind::Mperm => parse_list::<MPermIndicator>(&a.indicators).map(drop),
                    FamilyKind::Setpart => parse_list::<ArcIndicator>(&a.indicators).map(drop),
                }
            }
            Job::VerifyWdg(a) => family_of(a.family, &a.multiset, a.n).map(drop),
            Job::VerifyTotalCumulance(a) => parse_list::<ArcIndicator>(&a.arcs).map(drop),
            Job::VerifyParams(a) => family_spec(a.family, &a.multiset, a.n, &a.pattern).map(drop),
            Job::CondExp(a) => a.arcs.parse::<ArcPattern>().map(drop),
            Job::Mc(a) => mc_families(a).map(drop),
        }
    }
}

/// A job's JSON result and, for tabular results, its CSV form.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    /// Set when the job ran to completion but its result is a failed check.
    pub failure: Option<Error>,
}

impl Output {
    fn json(json: Value) -> Self {
        Output {
            json,
            csv: None,
            failure: None,
        }
    }

    /// Renders in the requested format.
    pub fn render(&self, emit: Emit) -> Result<String> {
        match emit {
            Emit::Json => Ok(format!("{}\n", self.json)),
            Emit::Csv => match &self.csv {
                Some(c) => Ok(c.clone()),
                None => flat_csv(&self.json),
            },
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_cell(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => fmt_f64(f),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.clone()
        }),
        _ => None,
    }
}

fn flat_csv(v: &Value) -> Result<String> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::domain("this result has no CSV form; use --emit json"))?;
    let mut head = Vec::new();
    let mut row = Vec::new();
    for (k, v) in obj {
        head.push(k.clone());
        row.push(csv_cell(v).ok_or_else(|| Error::domain("this result has no CSV form; use --emit json"))?);
    }
    Ok(format!("{}\n{}\n", head.join(","), row.join(",")))
}

fn big_json(v: &BigUint) -> Value {
    match v.to_u64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

fn family_of(kind: FamilyKind, multiset: &Option<String>, n: Option<usize>) -> Result<Family> {
    match kind {
        FamilyKind::Mperm => {
            let m = multiset
                .as_deref()
                .ok_or_else(|| Error::parse("--multiset is required for the mperm family"))?;
            Ok(Family::MPerm(m.parse()?))
        }
        FamilyKind::Setpart => Ok(Family::SetPart(
            n.ok_or_else(|| Error::parse("--n is required for the setpart family"))?,
        )),
    }
}

fn family_spec(kind: FamilyKind, multiset: &Option<String>, n: Option<usize>, pattern: &str) -> Result<FamilySpec> {
    Ok(match family_of(kind, multiset, n)? {
        Family::MPerm(m) => FamilySpec::MPerm {
            m,
            tau: pattern.parse()?,
        },
        Family::SetPart(n) => FamilySpec::SetPart {
            n,
            pattern: pattern.parse()?,
        },
    })
}

fn parse_order(s: &str) -> Result<Option<usize>> {
    if s == "auto" {
        Ok(None)
    } else {
        s.parse()
            .map(Some)
            .map_err(|_| Error::parse(format!("--order takes `auto` or an integer, got `{s}`")))
    }
}

fn mc_families(a: &McArgs) -> Result<Vec<FamilySpec>> {
    match a.family {
        FamilyKind::Mperm => {
            let tau: PermPattern = a
                .pattern
                .as_deref()
                .ok_or_else(|| Error::parse("--pattern is required for the mperm family"))?
                .parse()?;
            if let Some(m) = &a.multiset {
                return Ok(vec![FamilySpec::MPerm { m: m.parse()?, tau }]);
            }
            if a.sizes.is_empty() {
                return Err(Error::parse("--sizes or --multiset is required"));
            }
            a.sizes
                .iter()
                .map(|&n| {
                    Ok(FamilySpec::MPerm {
                        m: Multiset::balanced(n, a.letters)?,
                        tau: tau.clone(),
                    })
                })
                .collect()
        }
        FamilyKind::Setpart => {
            let pattern: ArcPattern = a
                .arcs
                .as_deref()
                .ok_or_else(|| Error::parse("--arcs is required for the setpart family"))?
                .parse()?;
            if a.sizes.is_empty() {
                return Err(Error::parse("--sizes is required for the setpart family"));
            }
            Ok(a.sizes
                .iter()
                .map(|&n| FamilySpec::SetPart {
                    n,
                    pattern: pattern.clone(),
                })
                .collect())
        }
    }
}

/// Runs one job.
pub fn execute(job: &Job, seed: u64, limits: &Limits) -> Result<Output> {
    match job {
        Job::Sample(a) => cmd_sample(a, seed),
        Job::Count(a) => {
            let w: Word = a.word.parse()?;
            let tau: PermPattern = a.pattern.parse()?;
            let mut out = json!({ "count": big_json(&count_perm_pattern(&w, &tau)) });
            if a.list {
                out["occurrences"] = json!(occurrences_perm_pattern(&w, &tau));
            }
            Ok(Output::json(out))
        }
        Job::CountArcs(a) => {
            let p: SetPartition = a.partition.parse()?;
            let pat: ArcPattern = a.arcs.parse()?;
            let mut out = json!({ "count": big_json(&count_arc_pattern(&p, &pat)) });
            if a.list {
                out["occurrences"] = json!(occurrences_arc_pattern(&p, &pat));
            }
            Ok(Output::json(out))
        }
        Job::Cumulant(a) => cmd_cumulant(a, limits),
        Job::VerifyWdg(a) => {
            let rep = estimate_Cr(&family_of(a.family, &a.multiset, a.n)?, a.order, limits)?;
            let failure = (!rep.violations.is_empty()).then(|| {
                Error::BoundViolation(format!("{} bags with MWST = 0 and nonzero cumulant", rep.violations.len()))
            });
            Ok(Output {
                json: serde_json::to_value(&rep).expect("report serializes"),
                csv: None,
                failure,
            })
        }
        Job::VerifyTotalCumulance(a) => {
            let bag: Vec<ArcIndicator> = parse_list(&a.arcs)?;
            let rep = total_cumulance_check(a.n, &bag, a.tail_tol, limits)?;
            let failure = (!rep.pass).then(|| {
                Error::BoundViolation(format!("total cumulance discrepancy {:e}", rep.discrepancy))
            });
            Ok(Output {
                json: serde_json::to_value(&rep).expect("report serializes"),
                csv: None,
                failure,
            })
        }
        Job::VerifyParams(a) => {
            let rep = param_report(&family_spec(a.family, &a.multiset, a.n, &a.pattern)?, limits)?;
            let failure = (!rep.bound_holds).then(|| Error::BoundViolation("variance bound fails".into()));
            Ok(Output {
                json: serde_json::to_value(&rep).expect("report serializes"),
                csv: None,
                failure,
            })
        }
        Job::CondExp(a) => cmd_cond_exp(a),
        Job::Mc(a) => cmd_mc(a, seed),
    }
}

fn cmd_sample(a: &SampleArgs, seed: u64) -> Result<Output> {
    let mut csv = String::new();
    let draws: Vec<Value> = match family_of(a.family, &a.multiset, a.n)? {
        Family::MPerm(m) => {
            csv.push_str("index,word\n");
            (0..a.count as u64)
                .map(|k| {
                    let w = sample_multiset_perm(&m, replica_seed(seed, k));
                    let _ = writeln!(csv, "{k},{w}");
                    json!({ "word": w.to_string() })
                })
                .collect()
        }
        Family::SetPart(n) => {
            let law = MUrnLaw::new(n, a.tail_tol)?;
            csv.push_str("index,partition,urn_count,empty_urns\n");
            (0..a.count as u64)
                .map(|k| {
                    let d = sample_stam(n, &law, replica_seed(seed, k))?;
                    let _ = writeln!(csv, "{k},{},{},{}", d.partition, d.urn_count, d.empty_urns);
                    Ok(json!({
                        "partition": d.partition.to_string(),
                        "urn_count": d.urn_count,
                        "empty_urns": d.empty_urns,
                    }))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Output {
        json: json!({ "seed": seed, "draws": draws }),
        csv: Some(csv),
        failure: None,
    })
}

fn sorted_dedup<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v.dedup();
    v
}

fn cumulant_json<O: MomentOracle>(o: &O, bag: &[O::Ind], limits: &Limits) -> Result<Value> {
    let k = joint_cumulant(o, bag, limits)?;
    let m = o.moment(&sorted_dedup(bag))?;
    Ok(json!({ "order": bag.len(), "cumulant": to_pq(&k), "moment": to_pq(&m) }))
}

fn cmd_cumulant(a: &CumulantArgs, limits: &Limits) -> Result<Output> {
    let mut limits = *limits;
    if let Some(r) = parse_order(&a.order)? {
        limits.cumulant_order = r;
    }
    let json = match family_of(a.family, &a.multiset, a.n)? {
        Family::MPerm(m) => {
            if a.given_m.is_some() {
                return Err(Error::domain("--given-m applies to set partitions only"));
            }
            let bag: Vec<MPermIndicator> = parse_list(&a.indicators)?;
            if let Some(x) = bag.iter().find(|x| x.pos == 0 || x.pos > m.n() || x.value == 0 || x.value > m.k()) {
                return Err(Error::domain(format!("indicator {x} does not fit the multiset {m}")));
            }
            match a.method.unwrap_or(Method::Closed) {
                Method::Closed => cumulant_json(&Memoized::new(MPermClosedForm::new(m)), &bag, &limits)?,
                Method::Enum => cumulant_json(&Memoized::new(WordEnumeration::new(&m, &limits)?), &bag, &limits)?,
            }
        }
        Family::SetPart(n) => {
            let bag: Vec<ArcIndicator> = parse_list(&a.indicators)?;
            match a.given_m {
                Some(m) => cumulant_json(&ConditionalArcs { n, m }, &bag, &limits)?,
                None => cumulant_json(&Memoized::new(PartitionEnumeration::new(n, &limits)?), &bag, &limits)?,
            }
        }
    };
    Ok(Output::json(json))
}

fn cmd_cond_exp(a: &CondExpArgs) -> Result<Output> {
    let pattern: ArcPattern = a.arcs.parse()?;
    let rows = cond_exp_table(a.n, &pattern, a.tail_tol)?;
    let law = MUrnLaw::new(a.n, a.tail_tol)?;
    let mean = rows.iter().map(|r| r.prob * r.expectation).sum::<f64>() / law.total_mass();
    let var = var_cond_expectation(a.n, &pattern, a.tail_tol)?;
    let mut csv = String::from("m,P(M=m),E[Occ|m]\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{}", r.m, fmt_f64(r.prob), fmt_f64(r.expectation));
    }
    Ok(Output {
        json: json!({
            "n": a.n,
            "arcs": pattern.to_string(),
            "tail_tol": a.tail_tol,
            "tail_bound": law.tail_bound(),
            "both_paths_checked": a.n <= DIRECT_SUM_CAP,
            "mean": mean,
            "var_cond_expectation": var,
            "rows": rows,
        }),
        csv: Some(csv),
        failure: None,
    })
}

fn cmd_mc(a: &McArgs, seed: u64) -> Result<Output> {
    let fams = mc_families(a)?;
    let mut rows: Vec<McSummary> = Vec::new();
    for f in &fams {
        rows.push(run_mc(f, a.reps, seed)?.summary()?);
    }
    let sizes: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
    let vars: Vec<f64> = rows.iter().map(|r| r.variance).collect();
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let slope = |ys: &[f64]| {
        if ys.len() >= 3 && ys.iter().all(|&y| y > 0.0) {
            variance_scaling_slope(&sizes, ys).ok()
        } else {
            None
        }
    };
    let mut csv = String::from("size,mean,variance,ks,k3,k4\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.size,
            fmt_f64(r.mean),
            fmt_f64(r.variance),
            fmt_f64(r.ks),
            fmt_f64(r.k3),
            fmt_f64(r.k4)
        );
    }
    Ok(Output {
        json: json!({
            "family": a.family,
            "pattern": a.pattern.as_ref().or(a.arcs.as_ref()),
            "reps": a.reps,
            "seed": seed,
            "rows": rows,
            "variance_slope": slope(&vars),
            "mean_slope": slope(&means),
        }),
        csv: Some(csv),
        failure: None,
    })
}

/// A named job with optional seed override and checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobSpec {
    pub name: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub job: Job,
    #[serde(default)]
    pub checks: Vec<Check>,
}

/// A test on the value found at a JSON pointer of the job output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    #[serde(default)]
    pub name: Option<String>,
    /// JSON pointer such as `/count` or `/rows/3/ks`.
    pub path: String,
    #[serde(default)]
    pub equals: Option<Value>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl Check {
    fn evaluate(&self, out: &Value) -> CheckResult {
        let found = out.pointer(&self.path).cloned();
        let pass = match &found {
            None => false,
            Some(v) => {
                let num = v.as_f64().or_else(|| v.as_str().and_then(|s| s.parse().ok()));
                let eq = self.equals.as_ref().is_none_or(|e| match (e.as_f64(), v.as_f64()) {
                    (Some(a), Some(b)) => a == b,
                    _ => e == v,
                });
                let lo = self.min.is_none_or(|m| num.is_some_and(|x| x >= m));
                let hi = self.max.is_none_or(|m| num.is_some_and(|x| x <= m));
                eq && lo && hi
            }
        };
        CheckResult {
            name: self.name.clone().unwrap_or_else(|| self.path.clone()),
            path: self.path.clone(),
            value: found.unwrap_or(Value::Null),
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub path: String,
    pub value: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    /// Artifact directory, relative to the config file.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub limits: Option<Limits>,
    #[serde(default)]
    pub jobs: Vec<JobSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Job names are unique and every job's inputs parse.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for j in &self.jobs {
            if !seen.insert(j.name.as_str()) {
                return Err(Error::parse(format!("duplicate job name `{}`", j.name)));
            }
            if j.name.is_empty() || j.name.contains(['/', '\\']) {
                return Err(Error::parse(format!("job name `{}` is not a plain file name", j.name)));
            }
            j.job
                .validate()
                .map_err(|e| Error::parse(format!("job `{}`: {e}", j.name)))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JobReport {
    pub name: String,
    pub kind: &'static str,
    /// `ok`, `failed` or `skipped`.
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<PathBuf>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub jobs: Vec<JobReport>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
    /// Exit code of the first failure, 0 when everything passed.
    #[serde(skip)]
    pub exit_code: i32,
}

/// Runs the jobs in order, writing `<name>.json` (and `<name>.csv` when
/// tabular) under `out_dir`. Stops at the first failure unless `keep_going`.
pub fn run_batch(cfg: &ExperimentConfig, out_dir: &Path, keep_going: bool) -> Result<BatchSummary> {
    std::fs::create_dir_all(out_dir)?;
    let limits = cfg.limits.unwrap_or_default();
    let mut jobs = Vec::new();
    let mut exit_code = 0;
    let mut stop = false;
    for spec in &cfg.jobs {
        if stop {
            jobs.push(JobReport {
                name: spec.name.clone(),
                kind: spec.job.kind(),
                status: "skipped",
                error: None,
                artifact: None,
                checks: vec![],
                pass: false,
            });
            continue;
        }
        let seed = spec.seed.unwrap_or(cfg.seed);
        let rep = match execute(&spec.job, seed, &limits) {
            Ok(out) => {
                let path = out_dir.join(format!("{}.json", spec.name));
                std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&out.json).expect("json")))?;
                if let Some(csv) = &out.csv {
                    std::fs::write(out_dir.join(format!("{}.csv", spec.name)), csv)?;
                }
                let checks: Vec<CheckResult> = spec.checks.iter().map(|c| c.evaluate(&out.json)).collect();
                let pass = out.failure.is_none() && checks.iter().all(|c| c.pass);
                if !pass && exit_code == 0 {
                    exit_code = out.failure.as_ref().map_or(3, Error::exit_code);
                }
                JobReport {
                    name: spec.name.clone(),
                    kind: spec.job.kind(),
                    status: if pass { "ok" } else { "failed" },
                    error: out.failure.map(|e| e.to_string()),
                    artifact: Some(path),
                    checks,
                    pass,
                }
            }
            Err(e) => {
                if exit_code == 0 {
                    exit_code = e.exit_code();
                }
                JobReport {
                    name: spec.name.clone(),
                    kind: spec.job.kind(),
                    status: "failed",
                    error: Some(e.to_string()),
                    artifact: None,
                    checks: vec![],
                    pass: false,
                }
            }
        };
        if !rep.pass && !keep_going {
            stop = true;
        }
        jobs.push(rep);
    }
    let passed = jobs.iter().filter(|j| j.pass).count();
    let summary = BatchSummary {
        failed: jobs.len() - passed,
        passed,
        all_pass: passed == jobs.len(),
        jobs,
        exit_code,
    };
    std::fs::write(
        out_dir.join("summary.json"),
        format!("{}\n", serde_json::to_string_pretty(&summary).expect("json")),
    )?;
    Ok(summary)
}

fn run(cli: Cli) -> Result<i32> {
    let limits = Limits::default();
    let (job, out_path) = match cli.command {
        Command::Batch(b) => {
            let cfg = ExperimentConfig::load(&b.config)?;
            let base = b.config.parent().unwrap_or(Path::new("."));
            let dir = base.join(cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("patternlab-out")));
            let summary = run_batch(&cfg, &dir, b.keep_going)?;
            let text = format!("{}\n", serde_json::to_string(&summary).expect("json"));
            emit_text(&text, cli.out.as_deref())?;
            return Ok(summary.exit_code);
        }
        Command::Sample(a) => (Job::Sample(a), cli.out),
        Command::Count(a) => (Job::Count(a), cli.out),
        Command::CountArcs(a) => (Job::CountArcs(a), cli.out),
        Command::Cumulant(a) => (Job::Cumulant(a), cli.out),
        Command::Verify { what } => match what {
            VerifyCommand::Wdg(a) => {
                let out = cli.out.or_else(|| a.report.clone());
                (Job::VerifyWdg(a), out)
            }
            VerifyCommand::TotalCumulance(a) => (Job::VerifyTotalCumulance(a), cli.out),
            VerifyCommand::Params(a) => (Job::VerifyParams(a), cli.out),
        },
        Command::CondExp(a) => (Job::CondExp(a), cli.out),
        Command::Mc(a) => (Job::Mc(a), cli.out),
    };
    let out = execute(&job, cli.seed, &limits)?;
    emit_text(&out.render(cli.emit)?, out_path.as_deref())?;
    match out.failure {
        Some(e) => {
            eprintln!("patternlab: {e}");
            Ok(e.exit_code())
        }
        None => Ok(0),
    }
}

fn emit_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command, returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads;
    let go = move || match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("patternlab: {e}");
            e.exit_code()
        }
    };
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(go),
            Err(e) => {
                eprintln!("patternlab: cannot start {t} threads: {e}");
                1
            }
        },
        None => go(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            seed = 7
            [[jobs]]
            name = "five"
            kind = "count"
            word = "23112"
            pattern = "21"
            [[jobs.checks]]
            path = "/count"
            equals = 5

            [[jobs]]
            name = "mc"
            kind = "mc"
            family = "setpart"
            arcs = "1-2"
            sizes = [10, 20, 40]
            reps = 200
            "#,
        )
        .unwrap();
        assert_eq!(cfg.jobs.len(), 2);
        assert!(matches!(cfg.jobs[1].job, Job::Mc(ref a) if a.sizes == vec![10, 20, 40] && a.letters == 2));
        let dup = "[[jobs]]\nname='a'\nkind='count'\nword='12'\npattern='12'\n[[jobs]]\nname='a'\nkind='count'\nword='12'\npattern='12'\n";
        assert!(matches!(ExperimentConfig::from_toml(dup), Err(Error::Parse(_))));
        let bad = "[[jobs]]\nname='a'\nkind='count'\nword='12'\npattern='11'\n";
        assert!(matches!(ExperimentConfig::from_toml(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn count_output() {
        let job = Job::Count(CountArgs {
            word: "23112".into(),
            pattern: "21".into(),
            list: false,
        });
        let out = execute(&job, 0, &Limits::default()).unwrap();
        assert_eq!(out.render(Emit::Json).unwrap(), "{\"count\":5}\n");
        assert_eq!(out.render(Emit::Csv).unwrap(), "count\n5\n");
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
