//! File-level operations behind the `kwlab` binary.
//!
//! Each function reads its inputs, does one job and writes its outputs, so
//! the binary only parses arguments. Sequences are stored in the text or
//! packed format of [`BitString`]; descriptors and manifests are
//! [`Record`] files.

use std::path::Path;
use std::str::FromStr;

use crate::bitseq::BitString;
use crate::coder::{code_length_curve_of, decode, encode};
use crate::descriptor::Record;
use crate::error::{Error, Result};
use crate::experiment::{default_checkpoints, run, ExperimentManifest, Report};
use crate::generators::source_from_record;
use crate::measures::{ceil_neg_log2_prob, MeasureFamily};
use crate::selection::select;
use crate::stats::{
    block_freqs, curves_to_csv, density, discrepancy, empirical_entropy, factor_complexity,
    lz78_ratio, StatCurve,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Packed,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "packed" => Ok(Format::Packed),
            other => Err(Error::descriptor(format!("unknown format '{other}'"))),
        }
    }
}

pub fn read_bits(path: &Path, format: Format) -> Result<BitString> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Packed => BitString::from_packed(&data),
        Format::Text => {
            let text = String::from_utf8(data)
                .map_err(|_| Error::descriptor(format!("{}: not UTF-8 text", path.display())))?;
            BitString::from_text(&text)
        }
    }
}

pub fn write_bits(path: &Path, bits: &BitString, format: Format) -> Result<()> {
    let data = match format {
        Format::Packed => bits.to_packed(),
        Format::Text => {
            let mut t = bits.to_text();
            t.push('\n');
            t.into_bytes()
        }
    };
    std::fs::write(path, data).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Adds `key=value` pairs to `base`.
pub fn record_from_pairs(base: Record, pairs: &[String]) -> Result<Record> {
    let mut rec = base;
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::descriptor(format!("expected key=value, got '{pair}'")))?;
        rec.set(k.trim(), v.trim());
    }
    Ok(rec)
}

/// Writes `x_1^n` of the described source. Returns a one-line summary.
pub fn generate(desc: &Record, n: usize, out: &Path, format: Format) -> Result<String> {
    let src = source_from_record(desc)?;
    let x = src.prefix(n)?;
    write_bits(out, &x, format)?;
    Ok(format!("wrote {} bits, {} ones", x.len(), x.count_ones()))
}

/// Writes `x/y` and, optionally, the selected positions one per line.
pub fn select_files(
    x_path: &Path,
    y_path: &Path,
    out: &Path,
    positions: Option<&Path>,
    format: Format,
) -> Result<String> {
    let x = read_bits(x_path, format)?;
    let y = read_bits(y_path, format)?;
    let r = select(&x, &y)?;
    write_bits(out, &r.selected, format)?;
    if let Some(p) = positions {
        let body: String = r.positions.iter().map(|i| format!("{i}\n")).collect();
        write_text(p, &body)?;
    }
    Ok(format!("selected {} of {} bits", r.selected.len(), x.len()))
}

/// Statistics of the whole input as `statistic,k,n,value` rows.
pub fn stats_table(x: &BitString, ks: &[usize]) -> Result<String> {
    let n = x.len();
    let one = |label: &str, k: Option<usize>, v: f64| StatCurve {
        label: label.into(),
        k,
        points: vec![(n, v)],
    };
    let mut curves = Vec::new();
    for &k in ks {
        curves.push(one("discrepancy", Some(k), discrepancy(x, k)?));
        curves.push(one("entropy", Some(k), empirical_entropy(x, k)?));
        curves.push(one(
            "factor_complexity",
            Some(k),
            factor_complexity(x, k)? as f64,
        ));
    }
    let lz = lz78_ratio(x)?;
    curves.push(one("lz78_ratio", None, lz.ratio));
    curves.push(one("lz78_phrases", None, lz.phrases as f64));
    curves.push(one(
        "density",
        None,
        num_traits::ToPrimitive::to_f64(&density(x)?).unwrap_or(f64::NAN),
    ));
    Ok(curves_to_csv(&curves))
}

/// Writes the statistics table and, when `blocks` is given, the block
/// counts for the single requested `k`.
pub fn stats_file(
    input: &Path,
    ks: &[usize],
    out: Option<&Path>,
    blocks: Option<&Path>,
    format: Format,
) -> Result<String> {
    let x = read_bits(input, format)?;
    let table = stats_table(&x, ks)?;
    if let Some(b) = blocks {
        let [k] = ks else {
            return Err(Error::descriptor("block dump needs exactly one k"));
        };
        write_text(b, &block_freqs(&x, *k)?.to_csv())?;
    }
    match out {
        Some(o) => {
            write_text(o, &table)?;
            Ok(format!("wrote statistics for {} bits", x.len()))
        }
        None => Ok(table.trim_end().to_string()),
    }
}

/// Encodes `y` under `measure`; optionally writes the code-length curve.
pub fn encode_file(
    input: &Path,
    measure: &Record,
    out: &Path,
    curve: Option<&Path>,
    format: Format,
) -> Result<String> {
    let p = MeasureFamily::from_record(measure)?;
    let y = read_bits(input, format)?;
    let stream = encode(&p, &y)?;
    let code = stream.finished();
    write_bits(out, &code, format)?;
    if let Some(c) = curve {
        let cps = default_checkpoints(y.len());
        write_text(c, &code_length_curve_of(&p, &y, &cps)?.to_csv())?;
    }
    let bound = ceil_neg_log2_prob(&p, &y)?;
    Ok(format!(
        "n={} L_n={} l_n={} code={}",
        y.len(),
        stream.committed(),
        bound,
        code.len()
    ))
}

/// Decodes at most `n` bits from the code in `input`.
pub fn decode_file(
    input: &Path,
    measure: &Record,
    n: usize,
    out: &Path,
    format: Format,
) -> Result<String> {
    let p = MeasureFamily::from_record(measure)?;
    let z = read_bits(input, format)?;
    let y = decode(&p, &z, n)?;
    write_bits(out, &y, format)?;
    Ok(format!("decoded {} bits from {}", y.len(), z.len()))
}

/// Runs a manifest and writes its report into `out`.
pub fn experiment_file(manifest: &Path, out: &Path) -> Result<Report> {
    let m = ExperimentManifest::load(manifest)?;
    let report = run(&m)?;
    report.write(out)?;
    Ok(report)
}
