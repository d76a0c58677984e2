//! The twelve acceptance criteria. Runs without the libtest harness so each
//! criterion prints exactly one `CRITERION <n> PASS|FAIL` line; the process
//! fails if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use kwlab::coder::{code_length_curve_of, decode, encode, CODE_LENGTH_SLACK};
use kwlab::experiment::{run, ExperimentManifest};
use kwlab::generators::{
    bernoulli_pseudo, champernowne, fibonacci_word, sturmian, Champernowne, SturmianParams,
    XorShift64Star,
};
use kwlab::measures::{ceil_neg_log2, prob, MeasureFamily};
use kwlab::selection::{merge, select, split};
use kwlab::stats::{discrepancy_witness, empirical_entropy, factor_complexity, lz78_ratio};
use kwlab::{BitString, Record};

type Outcome = (bool, String);

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn bits(t: &str) -> BitString {
    t.parse().unwrap()
}

/// The `n` low bits of `v`, most significant first.
fn from_u64(v: u64, n: usize) -> BitString {
    (0..n).rev().map(|i| v >> i & 1 == 1).collect()
}

fn c1_selection_ground_truth() -> Outcome {
    let (x, y) = (bits("0011"), bits("0101"));
    select(&x, &y).unwrap(); // warm up
    let start = Instant::now();
    let r = select(&x, &y).unwrap();
    let elapsed = start.elapsed();
    let pass =
        r.selected == bits("01") && r.positions == [2, 4] && elapsed < Duration::from_millis(1);
    (
        pass,
        format!("x/y={} tau={:?} in {:?}", r.selected, r.positions, elapsed),
    )
}

fn c2_split_merge_inverse() -> Outcome {
    let mut checked = 0u64;
    let mut failures = 0u64;
    let mut rng = XorShift64Star::new(12);
    for n in 0..=12usize {
        let total = 1u64 << n;
        for yv in 0..total {
            let y = from_u64(yv, n);
            for xv in 0..total {
                // every pair up to length 10, a deterministic 10% sample above
                if n > 10 && !rng.next_u64().is_multiple_of(10) {
                    continue;
                }
                let x = from_u64(xv, n);
                let (a, b) = split(&x, &y).unwrap();
                checked += 1;
                if merge(&a, &b, &y).unwrap() != x {
                    failures += 1;
                }
            }
        }
    }
    for seed in 0..1000u64 {
        let half = q(1, 2);
        let x = bernoulli_pseudo(&half, 2 * seed + 1, 100_000).unwrap();
        let y = bernoulli_pseudo(&half, 2 * seed + 2, 100_000).unwrap();
        let (a, b) = split(&x, &y).unwrap();
        checked += 1;
        if merge(&a, &b, &y).unwrap() != x {
            failures += 1;
        }
    }
    (
        failures == 0,
        format!("{checked} pairs, {failures} failures"),
    )
}

fn c3_preimage_measure() -> Outcome {
    let mut cases = 0u64;
    let mut bad = 0u64;
    for n in 0..=12usize {
        for yv in 0..1u64 << n {
            let y = from_u64(yv, n);
            let m = y.count_ones();
            // hist[v] = #{x : x/y = v}, v read most significant first
            let mut hist = vec![0u64; 1 << m];
            for xv in 0..1u64 << n {
                let s = select(&from_u64(xv, n), &y).unwrap().selected;
                let v = s.iter().fold(0usize, |acc, b| acc << 1 | b as usize);
                hist[v] += 1;
            }
            // fold to prefixes of length j = m, m-1, ..., 0
            let mut level = hist;
            for j in (0..=m).rev() {
                for &count in &level {
                    cases += 1;
                    // count / 2^n == 2^-j
                    if count << j != 1u64 << n {
                        bad += 1;
                    }
                }
                if j > 0 {
                    level = level.chunks(2).map(|c| c[0] + c[1]).collect();
                }
            }
        }
    }
    (bad == 0, format!("{cases} (y, s) cases, {bad} mismatches"))
}

fn families() -> Vec<(&'static str, MeasureFamily, BitString)> {
    let n = 100_000;
    vec![
        (
            "uniform",
            MeasureFamily::uniform(),
            bernoulli_pseudo(&q(1, 2), 7, n).unwrap(),
        ),
        (
            "bernoulli(1/3)",
            MeasureFamily::bernoulli(q(1, 3)).unwrap(),
            bernoulli_pseudo(&q(1, 3), 1, n).unwrap(),
        ),
        (
            "bernoulli(1/10)",
            MeasureFamily::bernoulli(q(1, 10)).unwrap(),
            bernoulli_pseudo(&q(1, 10), 2, n).unwrap(),
        ),
        (
            "markov1",
            MeasureFamily::markov1(q(1, 5), q(3, 7), q(1, 2)).unwrap(),
            bernoulli_pseudo(&q(1, 3), 3, n).unwrap(),
        ),
        (
            "pointmass",
            MeasureFamily::point_mass(Arc::new(Champernowne)),
            champernowne(n),
        ),
    ]
}

fn c4_measure_consistency() -> Outcome {
    let fams: Vec<(&str, MeasureFamily)> = vec![
        ("bernoulli(1/3)", MeasureFamily::bernoulli(q(1, 3)).unwrap()),
        (
            "markov1",
            MeasureFamily::markov1(q(1, 5), q(3, 7), q(1, 2)).unwrap(),
        ),
        ("uniform", MeasureFamily::uniform()),
        (
            "pointmass",
            MeasureFamily::point_mass(Arc::new(Champernowne)),
        ),
    ];
    let mut bad = Vec::new();
    for (name, p) in &fams {
        for n in 0..=16usize {
            let total = (0..1u64 << n).fold(BigRational::zero(), |acc, v| {
                acc + prob(p, &from_u64(v, n)).unwrap()
            });
            if !total.is_one() {
                bad.push(format!("{name} n={n} sum={total}"));
            }
        }
    }
    (
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} families, n = 0..=16, every sum exactly 1", fams.len())
        } else {
            bad.join("; ")
        },
    )
}

fn checkpoints_to(n: usize) -> Vec<usize> {
    let mut cps: Vec<usize> = (0..usize::BITS)
        .map(|e| 1usize << e)
        .take_while(|&c| c < n)
        .collect();
    cps.push(n);
    cps
}

fn c5_length_contract() -> Outcome {
    let start = Instant::now();
    let cps = checkpoints_to(100_000);
    let mut worst = i64::MIN;
    let mut problems = Vec::new();
    for (name, p, y) in families() {
        let curve = code_length_curve_of(&p, &y, &cps).unwrap();
        for pt in &curve.points {
            let prefix = y.prefix(pt.n);
            let ceil = ceil_neg_log2(&prob(&p, &prefix).unwrap()).unwrap() as i64;
            let over = (pt.length() as i64 - ceil).max(pt.code.len() as i64 - ceil);
            worst = worst.max(over);
            if over > CODE_LENGTH_SLACK as i64 {
                problems.push(format!("{name} n={} over by {over}", pt.n));
            }
            if decode(&p, &pt.code, pt.n).unwrap() != prefix {
                problems.push(format!("{name} n={} not lossless", pt.n));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        problems.push(format!("took {elapsed:?}"));
    }
    (
        problems.is_empty(),
        format!(
            "C={CODE_LENGTH_SLACK}, max(L - ceil(-log2 P))={worst}, 5 families x {} checkpoints, {:.1?}{}",
            cps.len(),
            elapsed,
            if problems.is_empty() { String::new() } else { format!(": {}", problems.join("; ")) }
        ),
    )
}

/// Pinned code length of the seed-1 Bernoulli(1/3) stream at n = 10^5.
const PINNED_L: u64 = 91799;

fn bernoulli_run() -> kwlab::coder::CodeLengthCurve {
    let n = 100_000;
    let p = MeasureFamily::bernoulli(q(1, 3)).unwrap();
    let y = bernoulli_pseudo(&q(1, 3), 1, n).unwrap();
    code_length_curve_of(&p, &y, &[n]).unwrap()
}

fn c6_rate() -> Outcome {
    let curve = bernoulli_run();
    let pt = &curve.points[0];
    let l = pt.length();
    let rate = l as f64 / pt.n as f64;
    (
        (0.898..=0.938).contains(&rate) && l == PINNED_L,
        format!("L_n={l} (pinned {PINNED_L}), L_n/n={rate:.5}"),
    )
}

fn c7_bounded_gaps() -> Outcome {
    let curve = bernoulli_run();
    (
        curve.max_step <= 4,
        format!("max step {} <= 4", curve.max_step),
    )
}

fn c8_sturmian_structure() -> Outcome {
    let fib = fibonacci_word(100_000);
    let mut bad = Vec::new();
    for k in 1..=24 {
        let fc = factor_complexity(&fib, k).unwrap();
        let h = empirical_entropy(&fib, k).unwrap();
        let bound = ((k + 1) as f64).log2() / k as f64;
        if fc != k + 1 {
            bad.push(format!("k={k} complexity {fc}"));
        }
        if h > bound + 1e-12 {
            bad.push(format!("k={k} entropy {h} > {bound}"));
        }
    }
    let rotation = sturmian(&SturmianParams::golden(), 1_000_000).unwrap();
    let substitution = fibonacci_word(1_000_000);
    if rotation != substitution {
        bad.push("rotation word differs from substitution word".into());
    }
    (
        bad.is_empty(),
        if bad.is_empty() {
            "complexity k+1 and entropy bound for k = 1..=24; rotation = substitution on 10^6 bits"
                .into()
        } else {
            bad.join("; ")
        },
    )
}

fn c9_separation() -> Outcome {
    let n = 1_000_000;
    let champ = champernowne(n);
    let fib = fibonacci_word(n);
    let h8 = empirical_entropy(&champ, 8).unwrap();
    let lz_c = lz78_ratio(&champ).unwrap().ratio;
    let lz_f = lz78_ratio(&fib).unwrap().ratio;
    let p = MeasureFamily::point_mass(Arc::new(Champernowne));
    let curve = code_length_curve_of(&p, &champ, &checkpoints_to(n)).unwrap();
    let longest = curve
        .points
        .iter()
        .map(|pt| pt.length().max(pt.code.len() as u64))
        .max()
        .unwrap();
    let pass = h8 >= 0.95 && lz_c >= 2.0 * lz_f && longest <= CODE_LENGTH_SLACK;
    (
        pass,
        format!("h8={h8:.5}, lz78 {lz_c:.5} vs {lz_f:.5}, point-mass code <= {longest} bits"),
    )
}

fn c10_kw_demo() -> Outcome {
    let n = 1_000_000;
    let x = champernowne(n);
    let y = fibonacci_word(n);
    let sel = select(&x, &y).unwrap().selected;
    let matched = x.prefix(sel.len());
    let mut detail = Vec::new();
    let mut pass = true;
    for k in 1..=3 {
        let d_sel = discrepancy_witness(&sel, k).unwrap().value;
        let d_x = discrepancy_witness(&matched, k).unwrap().value;
        let ok = d_sel <= &d_x * BigRational::from_integer(2.into());
        pass &= ok;
        let ratio = num_traits::ToPrimitive::to_f64(&(&d_sel / &d_x)).unwrap_or(f64::INFINITY);
        detail.push(format!("k={k} ratio {ratio:.4}"));
    }
    let self_sel = select(&x, &x).unwrap().selected;
    let d_self = discrepancy_witness(&self_sel, 1).unwrap().value;
    pass &= d_self == q(1, 2);
    detail.push(format!("disc(x/x,1)={d_self}"));
    (pass, detail.join(", "))
}

fn c11_code_looks_random() -> Outcome {
    let n = 100_000;
    let p = MeasureFamily::bernoulli(q(1, 3)).unwrap();
    let y = bernoulli_pseudo(&q(1, 3), 1, n).unwrap();
    let z = encode(&p, &y).unwrap().finished();
    let h1 = empirical_entropy(&z, 1).unwrap();
    let back = decode(&p, &z, n).unwrap();
    (
        h1 >= 0.99 && back == y,
        format!(
            "|z|={}, h1(z)={h1:.6}, decode recovers y: {}",
            z.len(),
            back == y
        ),
    )
}

fn c12_determinism() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    names.sort();
    let mut bad = Vec::new();
    for path in &names {
        let m = ExperimentManifest::from_record(&Record::load(path).unwrap()).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(&m).unwrap().write(a.path()).unwrap();
        run(&m).unwrap().write(b.path()).unwrap();
        let mut files: Vec<_> = std::fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        files.sort();
        for f in files {
            let (fa, fb) = (
                std::fs::read(a.path().join(&f)).unwrap(),
                std::fs::read(b.path().join(&f)).unwrap(),
            );
            if fa != fb {
                bad.push(format!("{}: {}", path.display(), f.to_string_lossy()));
            }
        }
    }
    (
        bad.is_empty() && !names.is_empty(),
        format!(
            "{} manifests run twice, differing files: {:?}",
            names.len(),
            bad
        ),
    )
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let mut results: Vec<(u32, Outcome, Duration)> = Vec::new();
    let mut timed = |id: u32, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        println!(
            "CRITERION {id} {} {} [{elapsed:.2?}]",
            if out.0 { "PASS" } else { "FAIL" },
            out.1
        );
        results.push((id, out, elapsed));
    };
    timed(1, &c1_selection_ground_truth);
    timed(2, &c2_split_merge_inverse);
    timed(3, &c3_preimage_measure);
    timed(4, &c4_measure_consistency);
    timed(5, &c5_length_contract);
    timed(6, &c6_rate);
    timed(7, &c7_bounded_gaps);
    timed(8, &c8_sturmian_structure);
    timed(9, &c9_separation);
    timed(10, &c10_kw_demo);
    timed(11, &c11_code_looks_random);
    timed(12, &c12_determinism);
    let failed: Vec<u32> = results.iter().filter(|r| !r.1 .0).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
