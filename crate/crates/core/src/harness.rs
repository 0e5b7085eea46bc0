//! Experiment orchestration behind the `jordanlab` binary: configuration,
//! sampling campaigns, tables from every evaluation route, and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::chain::{exact_column_distribution, simulate_columns, GeometricRows};
use crate::error::{invalid, Error, Result};
use crate::gfq::{column_lengths, jordan_type, jordan_type_incremental, prime_power, sample_strict_upper, FiniteField};
use crate::limit::{limit_pmf_contour, limit_pmf_k1, limit_pmf_series, signatures_in_window, ContourSpec, LimitQuery};
use crate::partition::{Partition, Signature};
use crate::pmf::{dinf, Pmf};
use crate::prelimit::{poissonized_pmf_integral, prelimit_pmf_integral, TorusQuad};
use crate::quadrature::Estimate;
use crate::rng::stream;
use crate::scalar::{exact_to_f64, inverse_of, ExactScalar};

/// Samples drawn from one random stream; streams are numbered in order so
/// the result does not depend on the thread count.
pub const SAMPLES_PER_STREAM: usize = 1000;

/// Largest `n` for which `compare` samples matrices instead of the chain.
pub const MATRIX_SAMPLER_MAX_N: u64 = 256;

/// Largest `n` accepted by the exact column dynamic program.
pub const EXACT_COLUMN_MAX_N: u64 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Compare,
    Tables,
    SampleFigure,
    Simulate,
    ExactDp,
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "compare" => Command::Compare,
            "tables" => Command::Tables,
            "sample-figure" => Command::SampleFigure,
            "simulate" => Command::Simulate,
            "exact-dp" => Command::ExactDp,
            other => return invalid(format!("unknown command `{other}`")),
        })
    }
}

/// Evaluation routes available to `tables`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dp,
    PrelimitIntegral,
    Poissonized,
    Series,
    Contour,
    K1Explicit,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dp => "dp",
            Method::PrelimitIntegral => "prelimit-integral",
            Method::Poissonized => "poissonized",
            Method::Series => "series",
            Method::Contour => "contour",
            Method::K1Explicit => "k1-explicit",
        }
    }

    /// Methods in the same group share a key space and are cross-checked.
    fn group(self) -> u8 {
        match self {
            Method::Dp | Method::PrelimitIntegral => 0,
            Method::Poissonized => 1,
            Method::Series | Method::Contour | Method::K1Explicit => 2,
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "dp" => Method::Dp,
            "prelimit-integral" => Method::PrelimitIntegral,
            "poissonized" => Method::Poissonized,
            "series" => Method::Series,
            "contour" => Method::Contour,
            "k1-explicit" => Method::K1Explicit,
            other => return invalid(format!("unknown method `{other}`")),
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => invalid(format!("unknown format `{other}`")),
        }
    }
}

/// Which sampler `compare` uses for the empirical side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Auto,
    Matrix,
    Chain,
}

impl FromStr for Sampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Sampler::Auto),
            "matrix" => Ok(Sampler::Matrix),
            "chain" => Ok(Sampler::Chain),
            other => invalid(format!("unknown sampler `{other}`")),
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: u64,
    pub q: u64,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub methods: Vec<Method>,
    pub chi: Option<f64>,
    pub tau: Option<f64>,
    pub radius: f64,
    pub torus_nodes: usize,
    pub contour_nodes: usize,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
    pub sampler: Sampler,
    pub exact: bool,
    pub timing: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Parses a flat `key = value` file; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return invalid(format!("config line {}: expected key = value", lineno + 1));
        };
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.parse::<T>().map(Some).map_err(|_| Error::InvalidInput(format!("bad value for {key}: `{v}`"))),
    }
}

fn get_bool(map: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    match map.get(key).map(String::as_str) {
        None | Some("false") | Some("0") | Some("no") => Ok(false),
        Some("true") | Some("1") | Some("yes") | Some("") => Ok(true),
        Some(v) => invalid(format!("bad boolean for {key}: `{v}`")),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "command", "n", "q", "k", "samples", "seed", "tol", "method", "chi", "tau", "radius", "torus-nodes",
    "contour-nodes", "lo", "hi", "sampler", "exact", "timing", "out", "format",
];

impl ExperimentConfig {
    /// Builds and validates a config from merged key-value settings.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(bad) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return invalid(format!("unknown config key `{bad}`"));
        }
        let command: Command = get(map, "command")?.ok_or_else(|| Error::InvalidInput("missing command".into()))?;
        let methods = match map.get("method") {
            Some(list) => list.split(',').filter(|s| !s.trim().is_empty()).map(Method::from_str).collect::<Result<Vec<_>>>()?,
            None => vec![Method::Series],
        };
        let cfg = ExperimentConfig {
            command,
            n: get(map, "n")?.unwrap_or(64),
            q: get(map, "q")?.unwrap_or(2),
            k: get(map, "k")?.unwrap_or(1),
            samples: get(map, "samples")?.unwrap_or(10_000),
            seed: get(map, "seed")?.unwrap_or(0),
            tol: get(map, "tol")?.unwrap_or(1e-8),
            methods,
            chi: get(map, "chi")?,
            tau: get(map, "tau")?,
            radius: get(map, "radius")?.unwrap_or(1.5),
            torus_nodes: get(map, "torus-nodes")?.unwrap_or(64),
            contour_nodes: get(map, "contour-nodes")?.unwrap_or(16),
            lo: get(map, "lo")?,
            hi: get(map, "hi")?,
            sampler: get(map, "sampler")?.unwrap_or(Sampler::Auto),
            exact: get_bool(map, "exact")?,
            timing: get_bool(map, "timing")?,
            out: map.get("out").map(PathBuf::from),
            format: get(map, "format")?.unwrap_or(Format::Json),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let q = usize::try_from(self.q).unwrap_or(usize::MAX);
        if prime_power(q).is_none() {
            return invalid(format!("q = {} is not a prime power", self.q));
        }
        if self.k == 0 {
            return invalid("k must be at least 1");
        }
        if self.samples == 0 {
            return invalid("samples must be at least 1");
        }
        if !(self.tol > 0.0) {
            return invalid("tol must be positive");
        }
        if let Some(chi) = self.chi {
            if !(chi > 0.0) {
                return invalid("chi must be positive");
            }
        }
        Ok(())
    }

    /// `1/q` as an exact rational.
    pub fn t_exact(&self) -> ExactScalar {
        inverse_of(self.q)
    }

    pub fn t(&self) -> f64 {
        1.0 / self.q as f64
    }

    /// Canonical `key=value` view used for hashing and report metadata.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let value = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(obj) = value {
            for (k, v) in obj {
                if k == "timing" || k == "out" || v.is_null() {
                    continue;
                }
                let s = match v {
                    Value::String(s) => s,
                    other => other.to_string(),
                };
                m.insert(k, s);
            }
        }
        m
    }

    pub fn hash(&self) -> String {
        let text: String = self.canonical().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub key: Vec<i64>,
    /// A float, or an exact rational written `"num/den"`.
    pub p: Value,
    pub err: f64,
    pub method: String,
}

impl Record {
    fn float(key: &[i64], p: f64, err: f64, method: &str) -> Self {
        Record { key: key.to_vec(), p: json!(p), err, method: method.to_string() }
    }

    fn exact(key: &[i64], p: &ExactScalar, method: &str) -> Self {
        Record { key: key.to_vec(), p: Value::String(format!("{}/{}", p.numer(), p.denom())), err: 0.0, method: method.to_string() }
    }

    /// Numeric value of `p`, parsing rationals.
    pub fn p_f64(&self) -> f64 {
        match &self.p {
            Value::String(s) => {
                let (a, b) = s.split_once('/').unwrap_or((s, "1"));
                a.parse::<f64>().unwrap_or(f64::NAN) / b.parse::<f64>().unwrap_or(f64::NAN)
            }
            v => v.as_f64().unwrap_or(f64::NAN),
        }
    }
}

/// Largest disagreement between two methods over their common keys.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Delta {
    pub a: String,
    pub b: String,
    pub max_delta: f64,
    pub at: Vec<i64>,
    pub keys: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub config_hash: String,
    pub version: String,
    pub runtime_ms: Option<u64>,
    pub info: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub results: Vec<Record>,
    pub dinf: Option<f64>,
    pub deltas: Vec<Delta>,
    pub failures: Vec<String>,
}

impl Report {
    fn new(cfg: &ExperimentConfig) -> Self {
        Report {
            meta: Meta {
                seed: cfg.seed,
                config: cfg.canonical(),
                config_hash: cfg.hash(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                runtime_ms: None,
                info: BTreeMap::new(),
            },
            results: Vec::new(),
            dinf: None,
            deltas: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per record: `key,p,err,method`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,p,err,method\n");
        for r in &self.results {
            let key = serde_json::to_string(&r.key).expect("key serializes");
            let p = match &r.p {
                Value::String(s) => s.clone(),
                v => format!("{:.17e}", v.as_f64().unwrap_or(f64::NAN)),
            };
            out.push_str(&format!("\"{key}\",{p},{:.3e},{}\n", r.err, r.method));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Records of one method as a pmf keyed by signature.
    pub fn pmf_of(&self, method: &str) -> Pmf<Signature, f64> {
        let mut p = Pmf::new();
        for r in self.results.iter().filter(|r| r.method == method) {
            p.add_mass(Signature::new(r.key.clone()).expect("records carry signatures"), r.p_f64());
        }
        p
    }
}

/// Checks the report shape: `meta{seed,config,version,runtime_ms}`,
/// `results[{key:[int], p:number|"a/b", err:number, method:string}]`, `dinf`.
pub fn validate_report_json(v: &Value) -> Result<()> {
    let bad = |what: &str| Error::InvalidInput(format!("report schema: {what}"));
    let meta = v.get("meta").and_then(Value::as_object).ok_or_else(|| bad("meta object"))?;
    if !meta.get("seed").is_some_and(Value::is_u64) {
        return Err(bad("meta.seed"));
    }
    if !meta.get("config").is_some_and(Value::is_object) {
        return Err(bad("meta.config"));
    }
    if !meta.get("version").is_some_and(Value::is_string) {
        return Err(bad("meta.version"));
    }
    if !meta.get("runtime_ms").is_some_and(|r| r.is_null() || r.is_u64()) {
        return Err(bad("meta.runtime_ms"));
    }
    let results = v.get("results").and_then(Value::as_array).ok_or_else(|| bad("results array"))?;
    for r in results {
        let key_ok = r.get("key").and_then(Value::as_array).is_some_and(|a| a.iter().all(Value::is_i64));
        let p_ok = r.get("p").is_some_and(|p| {
            p.is_number() || p.as_str().is_some_and(|s| s.split_once('/').is_some_and(|(a, b)| a.parse::<i128>().is_ok() || (!a.is_empty() && !b.is_empty())))
        });
        let err_ok = r.get("err").is_some_and(Value::is_number);
        let method_ok = r.get("method").is_some_and(Value::is_string);
        if !(key_ok && p_ok && err_ok && method_ok) {
            return Err(bad(&format!("result row {r}")));
        }
    }
    if !v.get("dinf").is_some_and(|d| d.is_null() || d.is_number()) {
        return Err(bad("dinf"));
    }
    Ok(())
}

fn to_key(cols: &[usize], shift: i64) -> Vec<i64> {
    cols.iter().map(|&c| c as i64 - shift).collect()
}

fn field_for(q: u64) -> Result<Arc<FiniteField>> {
    Ok(Arc::new(FiniteField::new(q as usize)?))
}

/// Counts of `(λ'_1, …, λ'_k) − shift` over `samples` draws, split into
/// numbered streams of [`SAMPLES_PER_STREAM`].
fn sample_counts<F>(samples: usize, seed: u64, draw: F) -> BTreeMap<Vec<i64>, u64>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<i64> + Sync,
{
    let streams = samples.div_ceil(SAMPLES_PER_STREAM);
    let partial: Vec<BTreeMap<Vec<i64>, u64>> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream(seed, s as u64);
            let count = SAMPLES_PER_STREAM.min(samples - s * SAMPLES_PER_STREAM);
            let mut m = BTreeMap::new();
            for _ in 0..count {
                *m.entry(draw(&mut rng)).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let mut total = BTreeMap::new();
    for m in partial {
        for (k, c) in m {
            *total.entry(k).or_insert(0) += c;
        }
    }
    total
}

/// Empirical column pmf from matrices over `F_q`.
pub fn sample_matrix_columns(n: u64, q: u64, k: usize, samples: usize, seed: u64, shift: i64) -> Result<Pmf<Signature, f64>> {
    let field = field_for(q)?;
    let counts = sample_counts(samples, seed, |rng| {
        let a = sample_strict_upper(n as usize, &field, rng);
        to_key(&column_lengths(&a, k).expect("strict matrices are nilpotent"), shift)
    });
    Ok(counts_to_pmf(counts, samples))
}

/// Empirical column pmf from the growth chain.
pub fn sample_chain_columns(n: u64, q: u64, k: usize, samples: usize, seed: u64, shift: i64) -> Result<Pmf<Signature, f64>> {
    let rows = GeometricRows::from_q(q)?;
    let counts = sample_counts(samples, seed, |rng| to_key(&simulate_columns(n as usize, k, &rows, rng), shift));
    Ok(counts_to_pmf(counts, samples))
}

fn counts_to_pmf(counts: BTreeMap<Vec<i64>, u64>, samples: usize) -> Pmf<Signature, f64> {
    let mut p = Pmf::new();
    for (k, c) in counts {
        p.add_mass(Signature::new(k).expect("columns decrease"), c as f64 / samples as f64);
    }
    p
}

/// `(⌊log_q n⌋, q^{{log_q n}})`, computed exactly as `(s, n / q^s)`.
pub fn shift_and_chi(n: u64, q: u64) -> (i64, f64) {
    let mut s = 0i64;
    let mut p: u128 = 1;
    while p * q as u128 <= n as u128 {
        p *= q as u128;
        s += 1;
    }
    (s, n as f64 / p as f64)
}

/// Series values of the limit law on a window, grown until the newest
/// shell carries less than `tol/10` mass. Returns the pmf (mass deficit
/// set from the total) and the largest per-key error estimate.
pub fn limit_series_window(k: usize, t: f64, chi: f64, tol: f64, lo: i64, hi: i64) -> Result<(Pmf<Signature, f64>, f64)> {
    const MAX_GROWTH: i64 = 64;
    let eval = |keys: Vec<Signature>| -> Result<Vec<(Signature, Estimate)>> {
        keys.into_par_iter()
            .map(|l| {
                let q = LimitQuery::new(t, chi, l.clone(), tol)?;
                Ok((l, limit_pmf_series(&q)?))
            })
            .collect()
    };
    let mut pmf = Pmf::new();
    let mut max_err: f64 = 0.0;
    let mut absorb = |vals: Vec<(Signature, Estimate)>, pmf: &mut Pmf<Signature, f64>| -> f64 {
        let mut mass = 0.0;
        for (l, e) in vals {
            max_err = max_err.max(e.error);
            mass += e.value.abs();
            pmf.add_mass(l, e.value);
        }
        mass
    };
    absorb(eval(signatures_in_window(k, lo, hi))?, &mut pmf);
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_GROWTH {
        let top: Vec<Signature> =
            signatures_in_window(k, lo, hi + 1).into_iter().filter(|s| s.entries()[0] == hi + 1).collect();
        let m = absorb(eval(top)?, &mut pmf);
        hi += 1;
        if m < tol / 10.0 {
            break;
        }
    }
    for _ in 0..MAX_GROWTH {
        let bottom: Vec<Signature> =
            signatures_in_window(k, lo - 1, hi).into_iter().filter(|s| s.entries()[k - 1] == lo - 1).collect();
        let m = absorb(eval(bottom)?, &mut pmf);
        lo -= 1;
        if m < tol / 10.0 {
            break;
        }
    }
    let total: f64 = pmf.iter().map(|(_, p)| *p).sum();
    pmf.set_mass_deficit((1.0 - total).max(0.0));
    Ok((pmf, max_err))
}

/// Empirical (or exact) shifted column law at size `n` against the limit law.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(cfg);
    if cfg.n == 0 {
        return invalid("compare needs n ≥ 1");
    }
    let (shift, chi_of_n) = shift_and_chi(cfg.n, cfg.q);
    let chi = cfg.chi.unwrap_or(chi_of_n);
    let t = cfg.t();
    let (side, empirical): (&str, Pmf<Signature, f64>) = if cfg.exact {
        if cfg.n > EXACT_COLUMN_MAX_N {
            return Err(Error::CapExceeded { requested: cfg.n as usize, cap: EXACT_COLUMN_MAX_N as usize });
        }
        let d = exact_column_distribution(cfg.n as usize, cfg.k, &cfg.t_exact())?;
        let shifted = d.map_keys(|s| s.shift(-shift)).to_f64();
        ("dp", shifted)
    } else {
        let use_matrix = match cfg.sampler {
            Sampler::Matrix => true,
            Sampler::Chain => false,
            Sampler::Auto => cfg.n <= MATRIX_SAMPLER_MAX_N,
        };
        if use_matrix {
            ("matrix", sample_matrix_columns(cfg.n, cfg.q, cfg.k, cfg.samples, cfg.seed, shift)?)
        } else {
            ("chain", sample_chain_columns(cfg.n, cfg.q, cfg.k, cfg.samples, cfg.seed, shift)?)
        }
    };
    let lo = cfg.lo.unwrap_or(-8);
    let hi = cfg.hi.unwrap_or(8);
    let (reference, max_err) = limit_series_window(cfg.k, t, chi, cfg.tol, lo, hi)?;
    let mut reference = reference;
    // keys seen empirically but outside the window
    for key in empirical.entries().keys() {
        if reference.get(key).is_none() {
            let e = limit_pmf_series(&LimitQuery::new(t, chi, key.clone(), cfg.tol)?)?;
            reference.add_mass(key.clone(), e.value);
        }
    }
    let d = dinf(&empirical, &reference);
    for (key, p) in empirical.iter() {
        report.results.push(Record::float(key.entries(), *p, 0.0, side));
    }
    let mut per_key = Vec::new();
    for (key, p) in reference.iter() {
        report.results.push(Record::float(key.entries(), *p, max_err, "series"));
        per_key.push(json!({"key": key.entries(), "delta": (empirical.prob(key) - p).abs()}));
    }
    report.dinf = Some(d);
    let info = &mut report.meta.info;
    info.insert("shift".into(), json!(shift));
    info.insert("chi".into(), json!(chi));
    info.insert("empirical_method".into(), json!(side));
    info.insert("reference_mass_deficit".into(), json!(reference.mass_deficit()));
    info.insert("per_key_deltas".into(), Value::Array(per_key));
    if max_err > cfg.tol {
        report.failures.push(format!("series error {max_err:e} exceeds tol {:e}", cfg.tol));
    }
    finish(&mut report, cfg, start);
    Ok(report)
}

/// Keys `η` with `k` decreasing entries in `[0, n]` and `|η| ≤ n`.
fn column_keys(n: u64, k: usize, bounded_size: bool) -> Vec<Signature> {
    signatures_in_window(k, 0, n as i64)
        .into_iter()
        .filter(|s| !bounded_size || s.size() <= n as i64)
        .collect()
}

fn sig_to_partition(s: &Signature) -> Partition {
    Partition::from_unsorted(s.entries().iter().map(|&x| x as usize).collect())
}

/// Probability tables from each requested method, with cross-method deltas.
pub fn cmd_tables(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(cfg);
    let t = cfg.t();
    let quad = TorusQuad { radius: cfg.radius, nodes: cfg.torus_nodes, ..TorusQuad::default() };
    let chi = cfg.chi.unwrap_or(1.0);
    let (lo, hi) = (cfg.lo.unwrap_or(-4), cfg.hi.unwrap_or(8));
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let mut tables: BTreeMap<Method, BTreeMap<Vec<i64>, (f64, f64)>> = BTreeMap::new();
    for &m in &methods {
        let rows: Vec<(Vec<i64>, f64, f64)> = match m {
            Method::Dp => {
                if cfg.n > EXACT_COLUMN_MAX_N {
                    return Err(Error::CapExceeded { requested: cfg.n as usize, cap: EXACT_COLUMN_MAX_N as usize });
                }
                let d = exact_column_distribution(cfg.n as usize, cfg.k, &cfg.t_exact())?;
                d.iter().map(|(s, p)| (s.entries().to_vec(), exact_to_f64(p), 0.0)).collect()
            }
            Method::PrelimitIntegral => column_keys(cfg.n, cfg.k, true)
                .into_par_iter()
                .map(|s| {
                    let e = prelimit_pmf_integral(cfg.n, cfg.k, t, &sig_to_partition(&s), &quad, cfg.tol)?;
                    Ok((s.entries().to_vec(), e.value, e.error))
                })
                .collect::<Result<_>>()?,
            Method::Poissonized => {
                let tau = cfg.tau.ok_or_else(|| Error::InvalidInput("poissonized needs --tau".into()))?;
                column_keys(cfg.n, cfg.k, false)
                    .into_par_iter()
                    .map(|s| {
                        let e = poissonized_pmf_integral(tau, cfg.k, t, &sig_to_partition(&s), &quad, cfg.tol)?;
                        Ok((s.entries().to_vec(), e.value, e.error))
                    })
                    .collect::<Result<_>>()?
            }
            Method::Series | Method::Contour | Method::K1Explicit => {
                if m == Method::K1Explicit && cfg.k != 1 {
                    return invalid("k1-explicit needs k = 1");
                }
                let spec = ContourSpec { nodes: cfg.contour_nodes, ..ContourSpec::default() };
                signatures_in_window(cfg.k, lo, hi)
                    .into_par_iter()
                    .map(|s| {
                        let e = match m {
                            Method::Series => limit_pmf_series(&LimitQuery::new(t, chi, s.clone(), cfg.tol)?)?,
                            Method::Contour => limit_pmf_contour(&LimitQuery::new(t, chi, s.clone(), cfg.tol)?, &spec)?,
                            _ => limit_pmf_k1(t, chi, s.entries()[0], cfg.tol)?,
                        };
                        Ok((s.entries().to_vec(), e.value, e.error))
                    })
                    .collect::<Result<_>>()?
            }
        };
        for (key, p, err) in &rows {
            report.results.push(Record::float(key, *p, *err, m.name()));
            if *err > cfg.tol {
                report.failures.push(format!("{m} at {key:?}: error {err:e} exceeds tol {:e}", cfg.tol));
            }
        }
        tables.insert(m, rows.into_iter().map(|(k, p, e)| (k, (p, e))).collect());
    }
    for (i, &a) in methods.iter().enumerate() {
        for &b in &methods[i + 1..] {
            if a.group() != b.group() {
                continue;
            }
            let (ta, tb) = (&tables[&a], &tables[&b]);
            let mut delta = Delta { a: a.name().into(), b: b.name().into(), max_delta: 0.0, at: Vec::new(), keys: 0 };
            let mut worst_allow = 0.0;
            for (key, (pa, ea)) in ta {
                let Some((pb, eb)) = tb.get(key) else { continue };
                delta.keys += 1;
                let d = (pa - pb).abs();
                if d >= delta.max_delta {
                    delta.max_delta = d;
                    delta.at = key.clone();
                    worst_allow = cfg.tol + ea + eb;
                }
            }
            if delta.max_delta > worst_allow {
                report.failures.push(format!("{a} vs {b}: max delta {:e} at {:?}", delta.max_delta, delta.at));
            }
            report.deltas.push(delta);
        }
    }
    report.meta.info.insert("t".into(), json!(t));
    if methods.iter().any(|m| m.group() == 2) {
        report.meta.info.insert("chi".into(), json!(chi));
    }
    finish(&mut report, cfg, start);
    Ok(report)
}

/// One matrix, its Jordan type and row/column profiles.
pub fn cmd_sample_figure(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(cfg);
    if cfg.n == 0 {
        return invalid("sample-figure needs n ≥ 1");
    }
    let field = field_for(cfg.q)?;
    let mut rng = stream(cfg.seed, 0);
    let a = sample_strict_upper(cfg.n as usize, &field, &mut rng);
    let lambda = if cfg.n <= MATRIX_SAMPLER_MAX_N { jordan_type(&a)? } else { jordan_type_incremental(&a)? };
    let rows: Vec<i64> = lambda.parts().iter().map(|&x| x as i64).collect();
    let cols: Vec<usize> = lambda.conjugate().into_parts();
    report.results.push(Record::float(&rows, 1.0, 0.0, "matrix"));
    let info = &mut report.meta.info;
    info.insert("rows".into(), json!(rows));
    info.insert("columns".into(), json!(cols));
    info.insert("first_row_fraction".into(), json!(lambda.part(1) as f64 / cfg.n as f64));
    info.insert("expected_first_row".into(), json!((1.0 - cfg.t()) * cfg.n as f64));
    finish(&mut report, cfg, start);
    Ok(report)
}

/// Unshifted empirical column pmf from the growth chain.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(cfg);
    let pmf = sample_chain_columns(cfg.n, cfg.q, cfg.k, cfg.samples, cfg.seed, 0)?;
    for (key, p) in pmf.iter() {
        report.results.push(Record::float(key.entries(), *p, 0.0, "chain"));
    }
    finish(&mut report, cfg, start);
    Ok(report)
}

/// Exact column pmf with rational probabilities.
pub fn cmd_exact_dp(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(cfg);
    if cfg.n > EXACT_COLUMN_MAX_N {
        return Err(Error::CapExceeded { requested: cfg.n as usize, cap: EXACT_COLUMN_MAX_N as usize });
    }
    let d = exact_column_distribution(cfg.n as usize, cfg.k, &cfg.t_exact())?;
    for (key, p) in d.iter() {
        report.results.push(Record::exact(key.entries(), p, "dp"));
    }
    if !d.is_exact_probability() {
        report.failures.push("exact pmf does not sum to one".into());
    }
    finish(&mut report, cfg, start);
    Ok(report)
}

fn finish(report: &mut Report, cfg: &ExperimentConfig, start: Instant) {
    if cfg.timing {
        report.meta.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
}

/// Dispatches on `cfg.command`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.command {
        Command::Compare => cmd_compare(cfg),
        Command::Tables => cmd_tables(cfg),
        Command::SampleFigure => cmd_sample_figure(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::ExactDp => cmd_exact_dp(cfg),
    }
}
