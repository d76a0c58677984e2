//! Manifest-driven experiments.
//!
//! A manifest is a [`Record`]:
//!
//! ```text
//! experiment = kw-demo          # kw-demo | prop1-demo | prop2-demo | rates
//! n = 1000000
//! checkpoints = 1024,4096,...   # optional, default powers of two from 2^10, then n
//! ks = 1,2,3                    # optional block lengths
//! x.kind = champernowne         # generator descriptors
//! y.kind = fibonacci
//! measure.family = bernoulli    # measure descriptor (coding experiments)
//! measure.p = 1/3
//! ```
//!
//! Running one yields CSV files and a list of checks; [`Report::write`]
//! stores them with a `summary.txt` holding one
//! `CHECK <name> PASS|FAIL <value> <bound>` line per check.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::bitseq::BitString;
use crate::coder::{code_length_curve_of, decode, CODE_LENGTH_SLACK};
use crate::descriptor::Record;
use crate::error::{Error, Result};
use crate::generators::{binary_entropy, source_from_record};
use crate::measures::{ceil_neg_log2, min_conditional, MeasureFamily};
use crate::selection::select;
use crate::stats::{
    curves_to_csv, density, discrepancy_witness, empirical_entropy, factor_complexity, lz78_ratio,
    StatCurve,
};

/// Slack allowed on top of `⌈−log₂ min P(y_{n+1} | y_1^n)⌉` for one step's
/// growth of emitted-plus-pending bits.
pub const STEP_SLACK: u64 = 2;
/// Allowed distance between the code rate and the source entropy.
pub const RATE_TOLERANCE: f64 = 0.02;
/// Minimum first-order empirical entropy of a near-optimal code.
pub const CODE_ENTROPY_FLOOR: f64 = 0.99;
/// `discrepancy(x/y, k) ≤ KW_FACTOR · discrepancy(x', k)`.
pub const KW_FACTOR: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    KwDemo,
    Prop1Demo,
    Prop2Demo,
    Rates,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::KwDemo => "kw-demo",
            ExperimentKind::Prop1Demo => "prop1-demo",
            ExperimentKind::Prop2Demo => "prop2-demo",
            ExperimentKind::Rates => "rates",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "kw-demo" => ExperimentKind::KwDemo,
            "prop1-demo" => ExperimentKind::Prop1Demo,
            "prop2-demo" => ExperimentKind::Prop2Demo,
            "rates" => ExperimentKind::Rates,
            other => return Err(Error::descriptor(format!("unknown experiment '{other}'"))),
        })
    }
}

/// A validated manifest with defaults filled in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    pub n: usize,
    pub checkpoints: Vec<usize>,
    pub ks: Vec<usize>,
    pub x: Record,
    pub y: Record,
    pub measure: Record,
}

/// Powers of two from 2^10 below `n`, then `n`.
pub fn default_checkpoints(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (10..usize::BITS)
        .map(|e| 1usize << e)
        .take_while(|&c| c < n)
        .collect();
    if n > 0 {
        out.push(n);
    }
    out
}

fn parse_usize_list(raw: &str, key: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|e| Error::descriptor(format!("key '{key}': {e}")))
        })
        .collect()
}

impl ExperimentManifest {
    pub fn from_record(rec: &Record) -> Result<Self> {
        let kind = ExperimentKind::parse(rec.require("experiment")?)?;
        let default_n = match kind {
            ExperimentKind::KwDemo | ExperimentKind::Rates => 1_000_000,
            ExperimentKind::Prop1Demo | ExperimentKind::Prop2Demo => 100_000,
        };
        let n: usize = rec.parse_or("n", default_n)?;
        if n == 0 {
            return Err(Error::descriptor("n must be positive"));
        }
        let checkpoints = match rec.get("checkpoints") {
            Some(raw) => parse_usize_list(raw, "checkpoints")?,
            None => default_checkpoints(n),
        };
        if checkpoints.is_empty()
            || checkpoints.windows(2).any(|w| w[0] >= w[1])
            || checkpoints[0] == 0
            || *checkpoints.last().expect("nonempty") > n
        {
            return Err(Error::descriptor(
                "checkpoints must be strictly increasing, positive and at most n",
            ));
        }
        let ks = match rec.get("ks") {
            Some(raw) => parse_usize_list(raw, "ks")?,
            None => match kind {
                ExperimentKind::KwDemo => vec![1, 2, 3],
                ExperimentKind::Rates => vec![1, 2, 4, 8],
                _ => vec![1],
            },
        };
        if ks.is_empty() || ks.iter().any(|&k| k == 0 || k > 63) {
            return Err(Error::descriptor("ks must be block lengths in 1..=63"));
        }
        let or_default = |name: &str, default: Record| {
            let sec = rec.section(name);
            if sec.is_empty() {
                default
            } else {
                sec
            }
        };
        let fib = Record::new().with("kind", "fibonacci");
        let (x_default, y_default) = match kind {
            ExperimentKind::Prop2Demo => (
                Record::new().with("kind", "champernowne"),
                Record::new()
                    .with("kind", "bernoulli")
                    .with("p", "1/3")
                    .with("seed", 1),
            ),
            _ => (Record::new().with("kind", "champernowne"), fib),
        };
        let x = or_default("x", x_default);
        let y = or_default("y", y_default);
        let measure_default = match kind {
            ExperimentKind::Prop2Demo => Record::new().with("family", "bernoulli").with("p", "1/3"),
            _ => Record::new().with("family", "pointmass").nest("source", &y),
        };
        let measure = or_default("measure", measure_default);
        let manifest = ExperimentManifest {
            kind,
            n,
            checkpoints,
            ks,
            x,
            y,
            measure,
        };
        // all descriptors must resolve
        source_from_record(&manifest.x)?;
        source_from_record(&manifest.y)?;
        MeasureFamily::from_record(&manifest.measure)?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_record(&Record::load(path)?)
    }

    /// The resolved manifest as a record.
    pub fn to_record(&self) -> Record {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        Record::new()
            .with("experiment", self.kind.name())
            .with("n", self.n)
            .with("checkpoints", join(&self.checkpoints))
            .with("ks", join(&self.ks))
            .nest("x", &self.x)
            .nest("y", &self.y)
            .nest("measure", &self.measure)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: String,
    pub bound: String,
}

impl Check {
    fn new(
        name: impl Into<String>,
        pass: bool,
        value: impl fmt::Display,
        bound: impl fmt::Display,
    ) -> Self {
        Check {
            name: name.into(),
            pass,
            value: value.to_string(),
            bound: bound.to_string(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} {} {}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.value,
            self.bound
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
    /// `(file name, contents)`, in write order.
    pub files: Vec<(String, String)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        self.checks.iter().map(|c| format!("{c}\n")).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join("summary.txt");
        std::fs::write(&path, self.summary()).map_err(|e| Error::io(&path, e))
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn sequence(rec: &Record, n: usize) -> Result<BitString> {
    source_from_record(rec)?.prefix(n)
}

pub fn run(manifest: &ExperimentManifest) -> Result<Report> {
    let mut report = match manifest.kind {
        ExperimentKind::KwDemo => kw_demo(manifest)?,
        ExperimentKind::Prop1Demo => coding_demo(manifest, false)?,
        ExperimentKind::Prop2Demo => coding_demo(manifest, true)?,
        ExperimentKind::Rates => rates(manifest)?,
    };
    report
        .files
        .insert(0, ("manifest.txt".into(), manifest.to_record().to_string()));
    Ok(report)
}

/// Discrepancies of `x`, `x/y`, the matched-length prefix `x'` and `x/x`.
fn kw_demo(m: &ExperimentManifest) -> Result<Report> {
    let x = sequence(&m.x, m.n)?;
    let y = sequence(&m.y, m.n)?;
    let mut curves = Vec::new();
    let labels = [
        "discrepancy_x",
        "discrepancy_x_matched",
        "discrepancy_x_over_y",
        "discrepancy_x_over_x",
    ];
    let mut finals: Vec<Vec<Option<BigRational>>> = Vec::new();
    for &k in &m.ks {
        let mut pts: Vec<Vec<(usize, f64)>> = vec![Vec::new(); labels.len()];
        let mut last = vec![None; labels.len()];
        for &n in &m.checkpoints {
            let (xn, yn) = (x.prefix(n), y.prefix(n));
            let selected = select(&xn, &yn)?.selected;
            let matched = xn.prefix(selected.len());
            let self_selected = select(&xn, &xn)?.selected;
            for (j, s) in [&xn, &matched, &selected, &self_selected]
                .into_iter()
                .enumerate()
            {
                if s.len() >= k {
                    let d = discrepancy_witness(s, k)?.value;
                    pts[j].push((n, to_f64(&d)));
                    last[j] = Some(d);
                } else {
                    last[j] = None;
                }
            }
        }
        for (label, points) in labels.iter().zip(pts) {
            curves.push(StatCurve {
                label: label.to_string(),
                k: Some(k),
                points,
            });
        }
        finals.push(last);
    }
    let mut checks = Vec::new();
    let yn = y.prefix(m.n);
    let dens = density(&yn)?;
    checks.push(Check::new(
        "density_y_positive",
        !dens.is_zero(),
        to_f64(&dens),
        "0",
    ));
    for (&k, last) in m.ks.iter().zip(&finals) {
        match (&last[2], &last[1]) {
            (Some(sel), Some(matched)) => {
                let bound = matched * BigRational::from_integer(BigInt::from(KW_FACTOR));
                checks.push(Check::new(
                    format!("kw_selection_k{k}"),
                    *sel <= bound,
                    to_f64(sel),
                    to_f64(&bound),
                ));
            }
            _ => checks.push(Check::new(
                format!("kw_selection_k{k}"),
                false,
                "undefined",
                "-",
            )),
        }
        if k == 1 {
            let half = BigRational::new(1.into(), 2.into());
            let pass = last[3].as_ref() == Some(&half);
            let value = last[3].as_ref().map(to_f64).unwrap_or(f64::NAN);
            checks.push(Check::new("self_selection_k1", pass, value, 0.5));
        }
    }
    Ok(Report {
        checks,
        files: vec![("discrepancy.csv".into(), curves_to_csv(&curves))],
    })
}

/// Arithmetic coding of `y` under the manifest's measure.
fn coding_demo(m: &ExperimentManifest, random_y: bool) -> Result<Report> {
    let measure = MeasureFamily::from_record(&m.measure)?;
    let y = sequence(&m.y, m.n)?;
    let curve = code_length_curve_of(&measure, &y, &m.checkpoints)?;
    let mut checks = Vec::new();

    let contract = curve
        .points
        .iter()
        .map(|p| p.code.len() as i64 - p.bound as i64)
        .max()
        .unwrap_or(0);
    let committed_ok = curve
        .points
        .iter()
        .all(|p| p.length() <= p.bound + CODE_LENGTH_SLACK);
    checks.push(Check::new(
        "length_contract",
        committed_ok && contract <= CODE_LENGTH_SLACK as i64,
        contract,
        CODE_LENGTH_SLACK,
    ));

    let gap = curve
        .points
        .iter()
        .map(|p| p.length().abs_diff(p.bound))
        .max()
        .unwrap_or(0);
    checks.push(Check::new(
        "length_gap",
        gap <= CODE_LENGTH_SLACK,
        gap,
        CODE_LENGTH_SLACK,
    ));

    let lossless = curve
        .points
        .iter()
        .map(|p| decode(&measure, &p.code, p.n).map(|d| d == y.prefix(p.n)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|ok| ok);
    checks.push(Check::new("lossless", lossless, lossless, true));

    let last = curve.points.last().expect("checkpoints are nonempty");
    if random_y {
        let rate = last.length() as f64 / last.n as f64;
        let reference = match &measure {
            MeasureFamily::Bernoulli(p) => binary_entropy(to_f64(p)),
            MeasureFamily::Uniform => 1.0,
            _ => last.bound as f64 / last.n as f64,
        };
        checks.push(Check::new(
            "code_rate",
            (rate - reference).abs() <= RATE_TOLERANCE,
            rate,
            format!("{reference}±{RATE_TOLERANCE}"),
        ));
        let min_c = min_conditional(&measure, &y.prefix(last.n))?;
        let gap_bound = ceil_neg_log2(&min_c)? + STEP_SLACK;
        checks.push(Check::new(
            "bounded_gaps",
            curve.max_step <= gap_bound,
            curve.max_step,
            gap_bound,
        ));
        let hz = empirical_entropy(&last.code, 1)?;
        checks.push(Check::new(
            "code_entropy_k1",
            hz >= CODE_ENTROPY_FLOOR,
            hz,
            CODE_ENTROPY_FLOOR,
        ));
        let hy = empirical_entropy(&y, 1)?;
        checks.push(Check::new(
            "source_entropy_k1",
            (hy - reference).abs() <= RATE_TOLERANCE,
            hy,
            format!("{reference}±{RATE_TOLERANCE}"),
        ));
    } else {
        let longest = curve.points.iter().map(|p| p.code.len()).max().unwrap_or(0);
        checks.push(Check::new(
            "code_length_constant",
            longest as u64 <= CODE_LENGTH_SLACK,
            longest,
            CODE_LENGTH_SLACK,
        ));
    }

    let mut files = vec![("code_length.csv".into(), curve.to_csv())];
    if random_y {
        let code_curve = StatCurve::sample(
            "code_entropy",
            Some(1),
            &last.code,
            &default_checkpoints(last.code.len()),
            |z| empirical_entropy(z, 1),
        )?;
        files.push(("code_entropy.csv".into(), curves_to_csv(&[code_curve])));
    }
    Ok(Report { checks, files })
}

/// Rate statistics for `x` and `y`.
fn rates(m: &ExperimentManifest) -> Result<Report> {
    let mut curves = Vec::new();
    let mut checks = Vec::new();
    for (name, rec) in [("x", &m.x), ("y", &m.y)] {
        let s = sequence(rec, m.n)?;
        for &k in &m.ks {
            let cps: Vec<usize> = m.checkpoints.iter().copied().filter(|&n| n >= k).collect();
            let h = StatCurve::sample(format!("entropy_{name}"), Some(k), &s, &cps, |p| {
                empirical_entropy(p, k)
            })?;
            let fc = StatCurve::sample(
                format!("factor_complexity_{name}"),
                Some(k),
                &s,
                &cps,
                |p| Ok(factor_complexity(p, k)? as f64),
            )?;
            if let (Some(hv), Some(c)) = (h.last(), fc.last()) {
                let bound = c.log2() / k as f64;
                checks.push(Check::new(
                    format!("support_bound_{name}_k{k}"),
                    hv <= bound + 1e-12,
                    hv,
                    bound,
                ));
            }
            curves.push(h);
            curves.push(fc);
        }
        curves.push(StatCurve::sample(
            format!("lz78_ratio_{name}"),
            None,
            &s,
            &m.checkpoints,
            |p| Ok(lz78_ratio(p)?.ratio),
        )?);
        curves.push(StatCurve::sample(
            format!("lz78_phrases_{name}"),
            None,
            &s,
            &m.checkpoints,
            |p| Ok(lz78_ratio(p)?.phrases as f64),
        )?);
        curves.push(StatCurve::sample(
            format!("density_{name}"),
            None,
            &s,
            &m.checkpoints,
            |p| Ok(to_f64(&density(p)?)),
        )?);
    }
    Ok(Report {
        checks,
        files: vec![("rates.csv".into(), curves_to_csv(&curves))],
    })
}
