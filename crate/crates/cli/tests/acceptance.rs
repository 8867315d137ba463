//! Acceptance gate: prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use itertools::Itertools;
use listpac::dims::*;
use listpac::hclass::*;
use listpac::learn::*;
use listpac::oig::{degree_stats, DegreeStats, OneInclusionGraph, DEFAULT_AVD_CAP};
use listpac::orient::*;
use listpac::shift::*;
use listpac::xp::*;
use listpac::Rational;
use num_bigint::BigUint;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

struct CurveSetup {
    name: &'static str,
    class: HypothesisClass,
    target: Vec<Label>,
    weights: Vec<u64>,
    k: usize,
    t: usize,
    n: Option<usize>,
    l: Option<usize>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() <= limit, || format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn fixtures() -> Vec<(String, HypothesisClass)> {
    let mut out = Vec::new();
    for (d, p) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3), (2, 4)] {
        out.push((format!("grid {p}^{d}"), generate_grid(d, p).unwrap()));
    }
    for (m, b) in [(4, 1), (5, 1), (4, 2), (6, 2)] {
        out.push((format!("example1({m},{b})"), generate_example1(m, b).unwrap()));
    }
    out
}

/// Random class for seed `s` with `m <= 6`, `p <= 6`, `|H| <= 60`.
fn random_small(s: u64) -> HypothesisClass {
    let m = 1 + (s % 6) as usize;
    let p = 2 + ((s / 6) % 5) as Label;
    let size = 1 + ((s * 7919) % 60) as usize;
    random_class(m, p, size, s).unwrap()
}

fn grid_points(d: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..d.pow(len as u32)).map(move |code| (0..len).map(|j| code / d.pow(j as u32) % d).collect())
}

fn c1_dimension_chain() -> Check {
    let start = Instant::now();
    let mut classes: Vec<(String, HypothesisClass)> = (0..200).map(|s| (format!("random #{s}"), random_small(s))).collect();
    classes.extend(fixtures());
    for (name, h) in &classes {
        for k in 1..=3 {
            let kds = kds_dimension(h, k, u64::MAX).map_err(|e| e.to_string())?;
            let knat = knat_dimension(h, k, u64::MAX).map_err(|e| e.to_string())?;
            ensure(kds.exhaustive && knat.exhaustive, || format!("{name}: search not exhaustive"))?;
            ensure(knat.value <= kds.value, || format!("{name}, k={k}: knat {} > kds {}", knat.value, kds.value))?;
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{} classes, k=1..3, {:.1?}", classes.len(), start.elapsed()))
}

fn c2_example_class() -> Check {
    let start = Instant::now();
    let h8 = generate_example1(8, 2).unwrap();
    let two = kds_dimension(&h8, 2, u64::MAX).map_err(|e| e.to_string())?;
    ensure(two.value == 3 && two.exhaustive, || format!("2-DS dimension {} (exhaustive {})", two.value, two.exhaustive))?;
    let one = kds_dimension(&h8, 1, u64::MAX).map_err(|e| e.to_string())?;
    ensure(one.value >= 5, || format!("DS dimension {}", one.value))?;
    let h6 = generate_example1(6, 2).unwrap();
    let head = CoordSequence::new(vec![0, 1, 2]).unwrap();
    ensure(kds_shatters(&h6, &head, 2).unwrap(), || "(1,2,3) not 2-DS shattered".into())?;
    for c in (0..6).combinations(4) {
        let seq = CoordSequence::new(c.clone()).unwrap();
        ensure(!kds_shatters(&h6, &seq, 2).unwrap(), || format!("{c:?} is 2-DS shattered"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("2-DS dim 3, DS dim {}, 15 size-4 sequences rejected, {:.1?}", one.value, start.elapsed()))
}

fn binom(n: u64, r: u64) -> BigUint {
    (0..r).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

fn c3_sauer() -> Check {
    let mut checked = 0;
    for k in 2..=3usize {
        for s in 0..100u64 {
            let m = 1 + (s % 5) as usize;
            let p = (k + 2 + (s % 3) as usize) as Label;
            let h = random_class(m, p, 1 + (s * 31 % 80) as usize, s).unwrap();
            let r = sauer_check(&h, k).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("k={k} seed {s}: |H|={} > {}", r.size, r.bound))?;
            checked += 1;
        }
    }
    for k in 2..=3u64 {
        for counts in [vec![4u64], vec![5, 6], vec![6, 4, 7], vec![9, 5, 5, 8]] {
            let kk = k + 2;
            let counts: Vec<u64> = counts.iter().map(|&n| n.max(kk)).collect();
            let m = counts.len();
            let zero = sauer_bound(0, k, &counts).unwrap();
            ensure(zero == BigUint::from(k).pow(m as u32), || format!("d=0 gives {zero}"))?;
            let full = sauer_bound(m, k, &counts).unwrap();
            let expected: BigUint = counts.iter().map(|&n| BigUint::from(1u32) + binom(n, k + 1)).product();
            ensure(full == expected, || format!("d=m gives {full}, expected {expected}"))?;
        }
    }
    Ok(format!("{checked} random classes, base cases for k=2,3"))
}

fn savd(h: &HypothesisClass, k: usize) -> Rational {
    let s: DegreeStats<Rational> = degree_stats(&OneInclusionGraph::build(h), k);
    s.savd
}

fn c4_shifting() -> Check {
    let mut shifts = 0;
    for s in 0..500u64 {
        let m = 1 + (s % 6) as usize;
        let p = 2 + ((s / 6) % 4) as Label;
        let h = random_class(m, p, 1 + (s * 13 % 40) as usize, 1_000 + s).unwrap();
        let subsets: Vec<Vec<usize>> = (1..=m).flat_map(|d| (0..m).combinations(d)).collect();
        let mut current = h.clone();
        loop {
            let mut changed = false;
            for i in 0..m {
                let next = shift_one(&current, i).unwrap();
                shifts += 1;
                ensure(next.len() == current.len(), || format!("seed {s}: size changed"))?;
                for c in &subsets {
                    let (a, b) = (next.project(c).unwrap().len(), current.project(c).unwrap().len());
                    ensure(a <= b, || format!("seed {s}: projection to {c:?} grew {b} -> {a}"))?;
                }
                for k in 1..=2 {
                    ensure(savd(&next, k) >= savd(&current, k), || format!("seed {s}: savd dropped (k={k})"))?;
                }
                changed |= next != current;
                current = next;
            }
            if !changed {
                break;
            }
        }
        let t = shift_fixed_point(&h);
        ensure(t.final_class == current, || format!("seed {s}: fixed point differs from manual round robin"))?;
        ensure(is_downward_closed(&current), || format!("seed {s}: not downward closed"))?;
        ensure(is_downward_closed_literal(&current, 1 << 22) == Some(true), || format!("seed {s}: literal check"))?;
        for k in 1..=2 {
            let (a, b) = (kexp_dimension(&current, k, u64::MAX).unwrap(), kexp_dimension(&h, k, u64::MAX).unwrap());
            ensure(a.value <= b.value, || format!("seed {s}: k-exp dimension grew"))?;
        }
    }
    let rows = |r: &[[Label; 2]]| HypothesisClass::new(2, 4, r.iter().map(|x| x.to_vec())).unwrap();
    let left = rows(&[[1, 2], [1, 4], [2, 1], [2, 3], [2, 4], [3, 1], [3, 3], [3, 4], [4, 1], [4, 4]]);
    let right = rows(&[[1, 1], [1, 2], [1, 3], [1, 4], [2, 1], [2, 3], [2, 4], [3, 1], [3, 4], [4, 4]]);
    ensure(shift_one(&left, 0).unwrap() == right, || "4x4 example shifted to a different matrix".into())?;
    Ok(format!("500 classes, {shifts} single shifts, 4x4 example reproduced"))
}

fn c5_orientation() -> Check {
    let mut classes: Vec<(String, HypothesisClass)> = (0..200).map(|s| (format!("random #{s}"), random_small(s))).collect();
    classes.extend(fixtures());
    let (mut a, mut d) = (0, 0);
    for (name, h) in &classes {
        let g = OneInclusionGraph::build(h);
        for k in 1..=2usize {
            let greedy = greedy_orientation(&g, k, DegreeBound::None).map_err(|e| e.to_string())?;
            let out = validate(&g, &greedy.orientation).map_err(|e| e.to_string())?.max_outdegree;
            ensure(out == greedy.max_outdegree, || format!("{name}: reported outdegree mismatch"))?;
            let kds = kds_dimension(h, k, u64::MAX).unwrap();
            if kds.exhaustive && kds.value < h.num_coords() {
                let dd = h.num_coords() - 1;
                ensure(out <= dd, || format!("{name}, k={k}: greedy {out} > d = {dd}"))?;
                a += 1;
            }
            let de = kexp_dimension(h, k, u64::MAX).unwrap();
            ensure(de.exhaustive && out <= 4 * k * k * de.value, || format!("{name}, k={k}: greedy {out} > 4k^2 dE"))?;
            let dn = knat_dimension(h, k, u64::MAX).unwrap().value as f64;
            let bound = 240.0 * (k as f64).powi(4) * dn * (h.label_bound() as f64).ln();
            ensure(out as f64 <= bound, || format!("{name}, k={k}: greedy {out} > {bound}"))?;
            if g.num_vertices() <= 10 {
                let (_, best) = exact_min_max_outdegree(&g, k, DEFAULT_EXACT_CAP).map_err(|e| e.to_string())?;
                ensure(best <= out, || format!("{name}: exact {best} > greedy {out}"))?;
                d += 1;
            }
        }
    }
    Ok(format!("{} classes x k=1,2; (a) {a} cases, (d) {d} tiny graphs", classes.len()))
}

fn c6_leave_one_out() -> Check {
    let mut samples = 0;
    for k in 1..=2usize {
        for d in 1..=3usize {
            let g = generate_grid(d, k as Label + 1).unwrap();
            let dim = kds_dimension(&g, k, u64::MAX).unwrap().value;
            let mut learner = OneInclusionLearner::new(&g, k).unwrap();
            for target in g.rows() {
                for pts in grid_points(d, dim + 1) {
                    let s = LabeledSample::labeled_by(target, &pts);
                    let mut misses = 0;
                    for i in 0..s.len() {
                        let (x, y) = s.pairs()[i];
                        if !learner.predict(&s.without(i), x).unwrap().contains(&y) {
                            misses += 1;
                        }
                    }
                    ensure(misses <= dim, || format!("grid {}^{d}: {misses} misses on {pts:?}", k + 1))?;
                    samples += 1;
                }
            }
        }
    }
    Ok(format!("{samples} samples"))
}

fn c7_weak_learner() -> Check {
    let mut cases = 0;
    let mut worst = 1.0f64;
    for k in 1..=2usize {
        for d in 1..=3usize {
            let g = generate_grid(d, k as Label + 1).unwrap();
            let dim = kds_dimension(&g, k, u64::MAX).unwrap().value;
            for t in 0..=2usize {
                let mut learner = OneInclusionLearner::new(&g, k).unwrap();
                for target in g.rows() {
                    let (mut success, mut total) = (0u64, 0u64);
                    for pts in grid_points(d, dim + t + 1) {
                        let s = LabeledSample::labeled_by(target, &pts);
                        for i in 0..s.len() {
                            let (x, y) = s.pairs()[i];
                            let mu = weak_list_learn_with(&mut learner, &s.without(i), t, dim).unwrap();
                            success += mu.contains(x, y) as u64;
                            total += 1;
                        }
                    }
                    let need = (t + 1) as u64 * total;
                    ensure(success * (dim + t + 1) as u64 >= need, || {
                        format!("grid {}^{d}, t={t}: success {success}/{total} below {}/{}", k + 1, t + 1, dim + t + 1)
                    })?;
                    worst = worst.min(success as f64 / total as f64 * (dim + t + 1) as f64 / (t + 1) as f64);
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (grid, t, target) cases; min success/alpha = {worst:.3}"))
}

fn c8_compression() -> Check {
    let start = Instant::now();
    let cases: Vec<(&str, HypothesisClass, usize)> = vec![
        ("grid 2^2", generate_grid(2, 2).unwrap(), 1),
        ("grid 3^2", generate_grid(2, 3).unwrap(), 2),
        ("example1(4,1)", generate_example1(4, 1).unwrap(), 2),
        ("example1(6,2)", generate_example1(6, 2).unwrap(), 2),
    ];
    let mut runs = 0;
    let mut max_r = 0;
    for (name, h, k) in &cases {
        let dims = SchemeDims::compute(h, *k, u64::MAX).unwrap();
        for m in [20usize, 60] {
            for small in [false, true] {
                let sample = {
                    use rand::{Rng, SeedableRng};
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(m as u64 * 31 + *k as u64);
                    let target = h.row(rng.random_range(0..h.len())).to_vec();
                    let pts: Vec<usize> = (0..m).map(|_| rng.random_range(0..h.num_coords())).collect();
                    LabeledSample::labeled_by(&target, &pts)
                };
                let mut config = CompressConfig::new(*k, 1, m as u64);
                if small {
                    config.n = Some(3);
                    config.l = Some(5);
                }
                let r = compress(h, &sample, &config, Some(dims)).map_err(|e| format!("{name}, m={m}: {e}"))?;
                let label = format!("{name}, m={m}, small={small}");
                ensure(r.certified, || format!("{label}: not certified"))?;
                let covered = sample.pairs().iter().all(|&(x, y)| r.hypothesis.get(x).contains(&y));
                let drawn = r.selected.pairs().iter().all(|p| sample.pairs().contains(p));
                ensure(covered && drawn, || format!("{label}: independent re-verification failed"))?;
                ensure(r.hypothesis.max_list_len() <= *k, || format!("{label}: list longer than k"))?;
                let bound = compression_size_bound(dims.kds, dims.knat, *k, 1, m);
                ensure(dims.exhaustive && (r.size() as f64) <= bound, || format!("{label}: r={} > {bound}", r.size()))?;
                let again = reconstruct(h, &r.selected, &r.params).map_err(|e| e.to_string())?;
                ensure(again == r.hypothesis, || format!("{label}: reconstruction differs"))?;
                let replay = compress(h, &sample, &config, Some(dims)).map_err(|e| e.to_string())?;
                ensure(replay == r, || format!("{label}: re-run differs"))?;
                max_r = max_r.max(r.size());
                runs += 1;
            }
        }
    }
    within(start, Duration::from_secs(600))?;
    Ok(format!("{runs} runs certified, max r = {max_r}, {:.1?}", start.elapsed()))
}

fn c9_lower_bound() -> Check {
    let start = Instant::now();
    let mut cases = Vec::new();
    for k in 1..=2usize {
        for m in 1..=3usize {
            let g = generate_grid(m, k as Label + 1).unwrap();
            let r: HardInstanceReport<Rational> =
                hard_instance_error(&g, k, m, 0, 0, DEFAULT_AVD_CAP, DEFAULT_ENUMERATION_BUDGET).map_err(|e| e.to_string())?;
            let mu = Rational::from_integer((m as i64).into());
            ensure(r.density.value == mu, || format!("grid {}^{m}: mu = {}", k + 1, r.density.value))?;
            let exact = r.exact.clone().ok_or_else(|| format!("grid {}^{m}: enumeration skipped", k + 1))?;
            ensure(exact >= r.bound, || format!("grid {}^{m}: exact {exact} < bound {}", k + 1, r.bound))?;
            cases.push(format!("{}^{m}:{}", k + 1, exact));
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("exact errors {}", cases.join(" ")))
}

fn c10_learning_curve() -> Check {
    let start = Instant::now();
    let threshold = 0.1 + 3.0 * (0.1f64 * 0.9 / 200.0).sqrt();
    let setups = vec![
        CurveSetup {
            name: "example1(6,2) k=2 n=3 l=5",
            class: generate_example1(6, 2).unwrap(),
            target: vec![4, 5, 6, 3, 4, 4],
            weights: vec![5, 1, 1, 3, 2, 1],
            k: 2,
            t: 1,
            n: Some(3),
            l: Some(5),
        },
        CurveSetup {
            name: "grid 2^2 k=1 default n,l",
            class: generate_grid(2, 2).unwrap(),
            target: vec![2, 1],
            weights: vec![3, 1],
            k: 1,
            t: 0,
            n: None,
            l: None,
        },
    ];
    let mut notes = Vec::new();
    for CurveSetup { name, class: h, target, weights, k, t, n, l } in setups {
        let dist = FiniteDistribution::labeled_by(&target, &weights).map_err(|e| e.to_string())?;
        let config = ExperimentConfig { seed: 2024, trials: 200, m_grid: vec![32, 64, 128, 256], k, t, delta: 0.1, epsilon: 0.1, n, l };
        let dims = SchemeDims::compute(&h, k, u64::MAX).unwrap();
        let curve = learning_curve(&h, &dist, &config, dims).map_err(|e| format!("{name}: {e}"))?;
        for row in &curve.rows {
            ensure(row.train_misses() == 0, || format!("{name}, m={}: training misses", row.m))?;
            ensure(row.exceed_fraction() <= threshold, || {
                format!("{name}, m={}: exceed fraction {} > {threshold:.4}", row.m, row.exceed_fraction())
            })?;
        }
        let summary: Vec<String> = curve
            .rows
            .iter()
            .map(|r| {
                let b = r.mean_bound().map(|b| format!("{b:.3}")).unwrap_or_else(|| "NA".into());
                format!("m={} err={:.4} r={:.1} bound={b} exceed={:.3}", r.m, r.mean_error(), r.mean_r(), r.exceed_fraction())
            })
            .collect();
        notes.push(format!("[{name}: {}]", summary.join("; ")));
    }
    within(start, Duration::from_secs(900))?;
    Ok(format!("threshold {threshold:.4} {} {:.1?}", notes.join(" "), start.elapsed()))
}

fn c11_agnostic() -> Check {
    use rand::{Rng, SeedableRng};
    let mut done = 0;
    let mut seed = 0u64;
    let mut worst_gap = 0i64;
    while done < 50 {
        seed += 1;
        let m = 3 + (seed % 3) as usize;
        let h = random_class(m, 3, 4 + (seed % 10) as usize, 77 + seed).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let len = 6 + (seed % 10) as usize;
        let s: LabeledSample = (0..len).map(|_| (rng.random_range(0..m), rng.random_range(1..=3))).collect();
        if h.realizes(&s) {
            continue;
        }
        let min = h.rows().iter().map(|row| s.pairs().iter().filter(|&&(x, y)| row[x] != y).count()).min().unwrap();
        let k = 1 + (seed % 2) as usize;
        let out = agnostic_learn(&h, &s, &CompressConfig::new(k, 1, seed), None).map_err(|e| format!("seed {seed}: {e}"))?;
        let misses = s.pairs().iter().filter(|&&(x, y)| !out.hypothesis.get(x).contains(&y)).count();
        ensure(misses <= min, || format!("seed {seed}: {misses} misses > ERM {min}"))?;
        worst_gap = worst_gap.max(misses as i64 - min as i64);
        done += 1;
    }
    Ok(format!("50 non-realizable samples, max (misses - ERM) = {worst_gap}"))
}

fn c12_determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("listpac-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = |n: &str| dir.join(n).to_str().unwrap().to_string();
    std::fs::write(path("class.hcf"), generate_example1(4, 1).unwrap().to_hcf()).unwrap();
    std::fs::write(path("sample.txt"), LabeledSample::labeled_by(&[1, 2, 3, 1], &[0, 1, 3, 3, 2, 0, 1]).to_text()).unwrap();
    let class = path("class.hcf");
    let sample = path("sample.txt");
    let compressed = path("compressed.txt");
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_listpac")).args(args).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
        Ok(out.stdout)
    };
    run(&["compress", "--class", &class, "--sample", &sample, "--k", "2", "--seed", "5", "--out", &compressed])?;
    let invocations: Vec<Vec<&str>> = vec![
        vec!["--version"],
        vec!["dims", "--class", &class, "--kind", "kds", "--k", "2"],
        vec!["dims", "--class", "random:5:4:40:9", "--kind", "knat", "--k", "1"],
        vec!["oig", "--class", &class, "--k", "2"],
        vec!["shift", "--class", "random:4:4:20:3"],
        vec!["orient", "--class", &class, "--k", "2"],
        vec!["orient", "--class", "grid:2:3", "--k", "1", "--exact"],
        vec!["predict", "--class", &class, "--sample", &sample, "--point", "3", "--k", "2"],
        vec!["compress", "--class", &class, "--sample", &sample, "--k", "2", "--seed", "5"],
        vec!["compress", "--class", &class, "--sample", &sample, "--k", "2", "--seed", "6", "--n", "3", "--l", "4"],
        vec!["reconstruct", "--class", &class, "--input", &compressed],
        vec![
            "simulate", "--class", "grid:2:3", "--k", "2", "--m-grid", "16,32", "--trials", "20", "--seed", "3", "--n",
            "3", "--l", "3", "--weights", "2,1",
        ],
        vec!["simulate", "--class", "grid:2:3", "--k", "2", "--m-grid", "16", "--trials", "8", "--seed", "3", "--n", "3", "--l", "3", "--threads", "1"],
        vec!["lowerbound", "--class", "grid:2:3", "--k", "2", "--m", "2", "--trials", "500", "--seed", "4"],
        vec!["sauer", "--class", "random:4:5:50:1", "--k", "2"],
    ];
    for args in &invocations {
        let (a, b) = (run(args)?, run(args)?);
        ensure(a == b, || format!("{args:?}: outputs differ between runs"))?;
    }
    let trace = [path("t1.csv"), path("t2.csv")];
    for t in &trace {
        run(&["shift", "--class", &class, "--trace", t])?;
    }
    ensure(std::fs::read(&trace[0]).unwrap() == std::fs::read(&trace[1]).unwrap(), || "shift traces differ".into())?;
    Ok(format!("{} invocations plus trace file reproduced byte for byte", invocations.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("dimension chain knat <= kds", c1_dimension_chain),
        ("example class dimensions", c2_example_class),
        ("list Sauer bound", c3_sauer),
        ("shifting suite", c4_shifting),
        ("orientation bounds", c5_orientation),
        ("leave-one-out misses <= kds", c6_leave_one_out),
        ("weak learner success >= (t+1)/(d+t+1)", c7_weak_learner),
        ("compression certified within size bound", c8_compression),
        ("transductive lower bound", c9_lower_bound),
        ("learning curve vs compression bound", c10_learning_curve),
        ("agnostic <= ERM", c11_agnostic),
        ("CLI determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
