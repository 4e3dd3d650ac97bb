//! End-to-end acceptance battery. Every reproduce suite runs through the
//! binary twice, on one and on two worker threads. Each criterion is judged
//! from the suite verdict and by recomputing its claim from the emitted CSV
//! with oracles written here, independently of the library. Prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_pivotal-lab");
const SUITES: [&str; 6] = ["pivotal-abundance", "sandwich", "bribable", "marginals", "stability", "volatility"];

struct SuiteRun {
    dir: PathBuf,
    status: Option<i32>,
    /// Seconds per criterion, summed over checks.
    seconds: BTreeMap<u8, f64>,
    verdict: Value,
}

fn run_suite(suite: &str, root: &Path, threads: usize) -> SuiteRun {
    let dir = root.join(format!("t{threads}")).join(suite);
    let out = Command::new(BIN)
        .args(["reproduce", suite, "--threads", &threads.to_string(), "--out"])
        .arg(&dir)
        .env_remove("PIVOTAL_LAB_THREADS")
        .output()
        .expect("binary runs");
    let stderr = String::from_utf8_lossy(&out.stderr);
    let mut seconds = BTreeMap::new();
    for line in stderr.lines().filter(|l| l.starts_with("timing ")) {
        let fields: BTreeMap<&str, &str> = line.split_whitespace().skip(1).filter_map(|kv| kv.split_once('=')).collect();
        let c: u8 = fields["criterion"].parse().expect("criterion");
        let s: f64 = fields["seconds"].parse().expect("seconds");
        *seconds.entry(c).or_insert(0.0) += s;
    }
    let verdict = fs::read_to_string(dir.join("verdict.json"))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or(Value::Null);
    SuiteRun { dir, status: out.status.code(), seconds, verdict }
}

type Row = BTreeMap<String, String>;

fn read_csv(path: &Path) -> Result<Vec<Row>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let first = text.lines().next().unwrap_or("");
    if !first.starts_with("# pivotal-lab ") || !first.contains(" seed=") || !first.contains(" config=") {
        return Err(format!("{}: missing provenance comment", path.display()));
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            Ok(headers.iter().zip(r.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        })
        .collect()
}

fn f(row: &Row, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?} is not a number", row[key]))
}

fn u(row: &Row, key: &str) -> u128 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?} is not an integer", row[key]))
}

fn b(row: &Row, key: &str) -> bool {
    row[key] == "true"
}

/// Checks of the given criterion in the verdict, all passed.
fn verdict_passes(run: &SuiteRun, criterion: u8) -> Result<(), String> {
    let checks = run.verdict["checks"].as_array().ok_or("no verdict.json")?;
    let mine: Vec<&Value> = checks.iter().filter(|c| c["criterion"] == criterion).collect();
    if mine.is_empty() {
        return Err(format!("verdict has no checks for criterion {criterion}"));
    }
    let failed: Vec<String> = mine
        .iter()
        .filter(|c| c["passed"] != true)
        .map(|c| format!("{} ({})", c["name"].as_str().unwrap_or("?"), c["detail"].as_str().unwrap_or("")))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(format!("verdict check failed: {}", failed.join("; ")))
    }
}

fn within_time(run: &SuiteRun, criterion: u8, limit: f64) -> Result<f64, String> {
    let s = run.seconds.get(&criterion).copied().unwrap_or(0.0);
    if s < limit {
        Ok(s)
    } else {
        Err(format!("took {s:.1} s, limit {limit} s"))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- oracles

/// Bit `i` of `x` set means coordinate `i` is +1.
fn spin(x: usize, i: usize) -> i32 {
    if x >> i & 1 == 1 {
        1
    } else {
        -1
    }
}

fn any_full_tribe(x: usize, l: usize, k: usize, plus: bool) -> bool {
    (0..k).any(|t| (0..l).all(|j| (spin(x, t * l + j) == 1) == plus))
}

fn majority(x: usize, n: usize) -> i32 {
    let s: i32 = (0..n).map(|i| spin(x, i)).sum();
    if s >= 0 {
        1
    } else {
        -1
    }
}

/// The marginals battery as ±1 functions of `n` bits.
fn battery(name: &str) -> (usize, Box<dyn Fn(usize) -> i32>) {
    match name {
        "dictator-3" => (3, Box::new(|x| spin(x, 0))),
        "parity-4" => (4, Box::new(|x| (0..4).map(|i| spin(x, i)).product())),
        "majority-3" => (3, Box::new(|x| majority(x, 3))),
        "majority-5" => (5, Box::new(|x| majority(x, 5))),
        "tribes-2-2" => (4, Box::new(|x| if any_full_tribe(x, 2, 2, true) { 1 } else { -1 })),
        "tribes-2-3" => (6, Box::new(|x| if any_full_tribe(x, 2, 3, true) { 1 } else { -1 })),
        "bribed-2-2" => (
            4,
            Box::new(|x| {
                let bribe = any_full_tribe(x, 2, 2, true) as i32 - any_full_tribe(x, 2, 2, false) as i32;
                if bribe == 0 {
                    majority(x, 4)
                } else {
                    bribe
                }
            }),
        ),
        other => panic!("unknown battery member {other}"),
    }
}

/// `(spectral, pivotal)` marginals for coordinates `required`, by direct sums.
fn naive_marginals(n: usize, g: &dyn Fn(usize) -> i32, required: usize) -> (f64, f64) {
    let size = 1usize << n;
    let mut spectral = 0.0;
    for s in 0..size {
        if s & required != required {
            continue;
        }
        let c: i64 = (0..size).map(|x| (g(x) * if (x & s).count_ones() % 2 == 0 { 1 } else { -1 }) as i64).sum();
        // χ_S(x) = Π x_i; with x_i = −1 on clear bits, the sign is (−1)^{|S \ x|}.
        let c = c * if s.count_ones() % 2 == 0 { 1 } else { -1 };
        let coef = c as f64 / size as f64;
        spectral += coef * coef;
    }
    let pivotal = (0..size)
        .filter(|&x| (0..n).filter(|i| required >> i & 1 == 1).all(|i| g(x) != g(x ^ (1 << i))))
        .count() as f64
        / size as f64;
    (spectral, pivotal)
}

/// `P[h(ω) ≠ h(ω')]` where each coordinate of `ω'` differs with probability `ε/2`.
fn naive_disagreement(n: usize, h: &dyn Fn(usize) -> i32, eps: f64) -> f64 {
    let size = 1usize << n;
    let d = eps / 2.0;
    let mut total = 0.0;
    for x in 0..size {
        for y in 0..size {
            if h(x) != h(y) {
                let m = (x ^ y).count_ones() as i32;
                total += d.powi(m) * (1.0 - d).powi(n as i32 - m);
            }
        }
    }
    total / size as f64
}

fn bribable(x: usize, l: usize, k: usize) -> i32 {
    any_full_tribe(x, l, k, true) as i32 - any_full_tribe(x, l, k, false) as i32
}

fn schedule_l(k: u64) -> u64 {
    let lk = (k as f64).log2();
    (lk + 0.5 * lk.log2()).ceil() as u64
}

/// `last − first > 4σ` and no adjacent step falls by more than `4σ`.
fn increases(points: &[(f64, f64)]) -> bool {
    let se = |a: (f64, f64), c: (f64, f64)| (a.1 * a.1 + c.1 * c.1).sqrt();
    let (first, last) = (points[0], points[points.len() - 1]);
    (last.0 - first.0) > 4.0 * se(first, last) && points.windows(2).all(|w| w[0].0 - w[1].0 <= 4.0 * se(w[0], w[1]))
}

// ------------------------------------------------------------- criteria

fn c1(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 1)?;
    let rows = read_csv(&run.dir.join("census.csv"))?;
    let want: BTreeSet<(u32, u32)> = (1..=4).flat_map(|l| (1..=5).map(move |k| (l, k))).filter(|(l, k)| l * k <= 20).collect();
    let got: BTreeSet<(u32, u32)> = rows.iter().map(|r| (u(r, "l") as u32, u(r, "k") as u32)).collect();
    ensure(want == got, || format!("grid mismatch: {got:?}"))?;
    for r in &rows {
        let (l, k) = (u(r, "l") as u32, u(r, "k") as u32);
        ensure(u(r, "total") == 1u128 << (l * k), || format!("total at ({l},{k})"))?;
        ensure(u(r, "zero") == ((1u128 << l) - 1).pow(k), || format!("P[T=0] count at ({l},{k}) is {}", r["zero"]))?;
    }
    let s = within_time(run, 1, 10.0)?;
    Ok(format!("{} layouts exact, {s:.2} s", rows.len()))
}

fn c2(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 2)?;
    let rows = read_csv(&run.dir.join("census.csv"))?;
    ensure(rows.len() == 20, || format!("{} layouts", rows.len()))?;
    for r in &rows {
        let (l, k) = (u(r, "l"), u(r, "k"));
        ensure(u(r, "x_sum") == k * l * (1u128 << (l * k - l)), || format!("sum X at ({l},{k}) is {}", r["x_sum"]))?;
    }
    let s = within_time(run, 1, 10.0)? + within_time(run, 2, 10.0)?;
    Ok(format!("E[X] = k*l*2^-l on all {} layouts, {s:.2} s", rows.len()))
}

fn c3(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 3)?;
    let rows = read_csv(&run.dir.join("census.csv"))?;
    let want = (1..=18u32).map(|l| 18 / l).sum::<u32>() as usize;
    ensure(rows.len() == want, || format!("{} layouts, want {want}", rows.len()))?;
    for r in &rows {
        let (total, zero, one) = (u(r, "total"), u(r, "zero"), u(r, "one"));
        ensure(zero + one == total && zero > 0 && one > 0, || format!("events at ({},{})", r["l"], r["k"]))?;
        let (x, x0, x1) = (u(r, "x_sum"), u(r, "x_sum_zero"), u(r, "x_sum_one"));
        ensure(x0 + x1 == x, || "split sums".into())?;
        ensure(x1 * total <= x * one && x * zero <= x0 * total, || format!("sandwich fails at ({},{})", r["l"], r["k"]))?;
    }
    Ok(format!("{want} layouts with lk <= 18, exact integers"))
}

fn c4(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 4)?;
    let rows = read_csv(&run.dir.join("structure.csv"))?;
    let want = (1..=16u32).map(|l| 16 / l).sum::<u32>() as usize;
    ensure(rows.len() == want, || format!("{} layouts, want {want}", rows.len()))?;
    for r in &rows {
        let ok = ["f_monotone", "g_monotone", "f_invariant", "g_invariant"].iter().all(|k| b(r, k));
        ensure(ok && u(r, "orbit_size") == u(r, "l") * u(r, "k"), || format!("structure at ({},{})", r["l"], r["k"]))?;
    }
    let s = within_time(run, 4, 60.0)?;
    Ok(format!("{want} layouts monotone, invariant and transitive, {s:.2} s"))
}

fn c5(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 5)?;
    let rows = read_csv(&run.dir.join("marginals.csv"))?;
    let mut names = BTreeSet::new();
    let mut worst: f64 = 0.0;
    for r in &rows {
        let name = r["function"].as_str();
        names.insert(name.to_string());
        let (n, g) = battery(name);
        let i = u(r, "i") as usize;
        let required = match r["j"].as_str() {
            "" => 1 << i,
            j => 1 << i | 1 << j.parse::<usize>().unwrap(),
        };
        let (spec, piv) = naive_marginals(n, g.as_ref(), required);
        for d in [f(r, "spectral") - spec, f(r, "pivotal") - piv, f(r, "spectral") - f(r, "pivotal")] {
            worst = worst.max(d.abs());
        }
    }
    ensure(names.len() == 7, || format!("battery has {} functions", names.len()))?;
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    let s = within_time(run, 5, 30.0)?;
    Ok(format!("{} marginals over 7 functions, max deviation {worst:.1e}, {s:.2} s", rows.len()))
}

fn c6(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 6)?;
    let rows = read_csv(&run.dir.join("mc-vs-exact.csv"))?;
    let mut oracle_checked = 0;
    for r in &rows {
        let (exact, est, se) = (f(r, "exact"), f(r, "estimate"), f(r, "stderr"));
        ensure((est - exact).abs() <= 4.0 * se, || format!("{} {} eps {}: {est} vs {exact}", r["function"], r["quantity"], r["epsilon"]))?;
        let independent = match (r["function"].as_str(), r["quantity"].as_str()) {
            ("majority-5", "disagreement") => Some(naive_disagreement(5, &|x| majority(x, 5), f(r, "epsilon"))),
            ("bribable-2-3", "disagreement") => Some(naive_disagreement(6, &|x| bribable(x, 2, 3), f(r, "epsilon"))),
            ("bribable-4-4", q) => {
                // Both-empty probability a = (1 − 2^{1−l})^k and q0 = (1 − 2^{−l})^k.
                let (q0, a) = ((1.0 - 1.0 / 16.0f64).powi(4), (1.0 - 2.0 / 16.0f64).powi(4));
                match q {
                    "p-f-0" => Some(1.0 - 2.0 * q0 + 2.0 * a),
                    "p-f-1" | "p-f--1" => Some(q0 - a),
                    "mean-up" => Some(1.0),
                    _ => None,
                }
            }
            _ => None,
        };
        if let Some(v) = independent {
            ensure((v - exact).abs() < 1e-12, || format!("{} {}: engine exact {exact} vs oracle {v}", r["function"], r["quantity"]))?;
            oracle_checked += 1;
        }
    }
    let cov = read_csv(&run.dir.join("coverage.csv"))?;
    ensure(cov.len() == 2 && cov.iter().all(|r| u(r, "runs") == 100 && u(r, "covered") >= 90), || "coverage below 90/100".into())?;
    let s = within_time(run, 6, 300.0)?;
    Ok(format!("{} estimates within 4 stderr ({oracle_checked} exact values re-derived), coverage ok, {s:.1} s", rows.len()))
}

fn c7(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 7)?;
    let rows = read_csv(&run.dir.join("trend.csv"))?;
    let js: Vec<u128> = rows.iter().map(|r| u(r, "j")).collect();
    ensure(js == [10, 12, 14, 16, 18], || format!("j = {js:?}"))?;
    for r in &rows {
        let (k, l) = (u(r, "k") as u64, u(r, "l") as u64);
        ensure(k == 1 << u(r, "j") && l == schedule_l(k), || format!("schedule at k = {k}"))?;
        ensure(u(r, "n_samples") >= 100_000, || "samples".into())?;
        let mu = k as f64 * l as f64 * (-(l as f64)).exp2();
        ensure((f(r, "mean_up") - mu).abs() <= 4.0 * f(r, "mean_up_stderr"), || format!("mean U at k = {k}: {} vs {mu}", r["mean_up"]))?;
    }
    let zero: Vec<_> = rows.iter().map(|r| (f(r, "p_f_zero"), f(r, "p_f_zero_stderr"))).collect();
    let wit: Vec<_> = rows.iter().map(|r| (f(r, "p_witness"), f(r, "p_witness_stderr"))).collect();
    ensure(increases(&zero), || format!("P[f=0] trend {zero:?}"))?;
    ensure(increases(&wit), || format!("witness trend {wit:?}"))?;
    let s = within_time(run, 7, 600.0)?;
    Ok(format!("P[f=0] {:.4} -> {:.4}, witness {:.4} -> {:.4}, {s:.1} s", zero[0].0, zero[4].0, wit[0].0, wit[4].0))
}

fn c8(run: &SuiteRun) -> Result<String, String> {
    verdict_passes(run, 8)?;
    let rows = read_csv(&run.dir.join("sandwich.csv"))?;
    let eps: Vec<f64> = rows.iter().map(|r| f(r, "epsilon")).collect();
    ensure(eps == [0.01, 0.05, 0.1], || format!("epsilons {eps:?}"))?;
    for r in &rows {
        ensure(u(r, "j") == 14 && u(r, "k") == 1 << 14 && u(r, "l") as u64 == schedule_l(1 << 14), || "layout".into())?;
        let se = (f(r, "g_stderr").powi(2) + f(r, "maj_stderr").powi(2) + f(r, "f_active_stderr").powi(2)).sqrt();
        ensure(f(r, "g") <= f(r, "maj") + f(r, "f_active") + 4.0 * se, || format!("sandwich at eps {}", r["epsilon"]))?;
        ensure(u(r, "pathwise_violations") == 0, || "pathwise violation".into())?;
    }
    let s = within_time(run, 8, 300.0)?;
    Ok(format!("3 noise levels at j = 14, {s:.1} s"))
}

fn c9(run: &SuiteRun) -> Result<String, String> {
    let rows = read_csv(&run.dir.join("volatility.csv"))?;
    let find = |fam: &str| rows.iter().filter(|r| r["family"] == fam).collect::<Vec<_>>();
    let dict = find("dictator");
    let dict = dict.first().ok_or("no dictator row")?;
    ensure(u(dict, "trials") == 100_000 && u(dict, "n") == 1, || "dictator setup".into())?;
    let e1 = (-1.0f64).exp();
    ensure((f(dict, "p_c0") - e1).abs() <= 4.0 * f(dict, "stderr"), || format!("dictator P[C=0] = {}", dict["p_c0"]))?;
    let par = find("parity");
    let par = par.first().ok_or("no parity row")?;
    let n = f(par, "n");
    ensure((f(par, "mean_C") - n).abs() <= 4.0 * f(par, "mean_C_stderr"), || format!("parity mean C = {}", par["mean_C"]))?;
    let sweep = find("bribed");
    let ks: Vec<u128> = sweep.iter().map(|r| u(r, "k")).collect();
    ensure(ks == (10..=14).map(|j| 1u128 << j).collect::<Vec<_>>(), || format!("sweep k = {ks:?}"))?;
    ensure(sweep.iter().all(|r| u(r, "trials") == 10_000), || "sweep trials".into())?;
    let pts: Vec<(f64, f64)> = sweep.iter().map(|r| (f(r, "p_c0"), f(r, "stderr"))).collect();
    let strictly = pts.windows(2).all(|w| w[1].0 < w[0].0);
    let (a, z) = (pts[0], pts[pts.len() - 1]);
    let sep = (a.0 - z.0) / (a.1 * a.1 + z.1 * z.1).sqrt();
    let bound = read_csv(&run.dir.join("bound.csv"))?;
    let v = bound.first().ok_or("no bound row")?;
    let (pi, se_pi, thr) = (f(v, "p_few_pivotal"), f(v, "p_few_pivotal_stderr"), f(v, "threshold"));
    let rhs = |p: f64| {
        let e = p.clamp(0.0, 1.0).sqrt();
        e + (-(1.0 - e) * thr).exp()
    };
    let holds = rhs(pi + 4.0 * se_pi) >= f(v, "p_c0") - 4.0 * f(v, "p_c0_stderr");
    ensure(f(v, "p_c0") == z.0, || "bound uses the j = 14 trajectories".into())?;
    let pretty: Vec<String> = pts.iter().map(|p| format!("{:.4}", p.0)).collect();
    ensure(strictly, || format!("P[C=0] not strictly decreasing: {}", pretty.join(", ")))?;
    ensure(sep > 4.0, || format!("endpoint separation {sep:.2} sigma"))?;
    ensure(holds, || "pivotal bound violated".into())?;
    verdict_passes(run, 9)?;
    let s = within_time(run, 9, 900.0)?;
    Ok(format!("P[C=0] {}, separation {sep:.1} sigma, bound holds, {s:.1} s", pretty.join(", ")))
}

fn c10(pairs: &[(&SuiteRun, &SuiteRun)]) -> Result<String, String> {
    let mut files = 0;
    for (a, b) in pairs {
        let list = |d: &Path| -> Result<BTreeSet<String>, String> {
            Ok(fs::read_dir(d)
                .map_err(|e| format!("{}: {e}", d.display()))?
                .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
                .collect())
        };
        let (la, lb) = (list(&a.dir)?, list(&b.dir)?);
        ensure(la == lb && !la.is_empty(), || format!("file sets differ in {}", a.dir.display()))?;
        for name in &la {
            let (x, y) = (fs::read(a.dir.join(name)).unwrap(), fs::read(b.dir.join(name)).unwrap());
            ensure(x == y, || format!("{} differs between 1 and 2 threads", b.dir.join(name).display()))?;
            ensure(!x.contains(&b'\r'), || format!("{name} has CR line endings"))?;
            files += 1;
        }
        ensure(a.status == b.status, || "exit codes differ".into())?;
    }
    Ok(format!("{files} files byte-identical across thread counts"))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut runs: BTreeMap<&str, (SuiteRun, SuiteRun)> = BTreeMap::new();
    for suite in SUITES {
        let one = run_suite(suite, tmp.path(), 1);
        let two = run_suite(suite, tmp.path(), 2);
        eprintln!("suite {suite}: exit {:?} / {:?}", one.status, two.status);
        runs.insert(suite, (one, two));
    }
    let r = |s: &str| &runs[s].0;
    let results: Vec<(u8, &str, Result<String, String>)> = vec![
        (1, "exact tribes law", c1(r("pivotal-abundance"))),
        (2, "pivotal-tribe mean", c2(r("pivotal-abundance"))),
        (3, "conditional sandwich", c3(r("sandwich"))),
        (4, "structure", c4(r("bribable"))),
        (5, "marginal coincidence", c5(r("marginals"))),
        (6, "MC vs exact", c6(r("stability"))),
        (7, "bribability trend", c7(r("bribable"))),
        (8, "stability sandwich", c8(r("stability"))),
        (9, "volatility", c9(r("volatility"))),
        (10, "reproducibility", c10(&runs.values().map(|(a, b)| (a, b)).collect::<Vec<_>>())),
    ];
    let mut failed = 0;
    for (c, title, res) in &results {
        match res {
            Ok(detail) => println!("criterion {c:>2} PASS {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {c:>2} FAIL {title}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
