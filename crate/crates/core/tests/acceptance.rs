//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use biatsp::exact::{dp_pareto, enumerate_pareto, DEFAULT_ENUMERATION_LIMIT};
use biatsp::instance::{generate_contradicting, generate_random, rng_from_seed};
use biatsp::metrics::{gd, igd};
use biatsp::moga::{run, CrossoverKind, MogaConfig};
use biatsp::reduction::{
    default_grid, guaranteed_exclusion, predict_line_reduction, reduce_double, reduce_single, theta_sweep,
    LineModel, LinePrediction, Preference, Quantum, QuantumPair, SweepCase,
};
use biatsp::{Criterion, Front, ObjectiveVector, Tour};
use num_rational::Rational64;
use rand::seq::index::sample;
use rand::Rng;

type Outcome = Result<String, String>;

fn contradicting_instances() -> Vec<biatsp::Instance> {
    // the instances `gen --count 5` writes with its default seed
    (1..=5).map(|s| generate_contradicting(12, s).unwrap()).collect()
}

fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1(fronts: &mut Vec<Front>) -> Outcome {
    let mut slowest_enum = Duration::ZERO;
    let mut slowest_dp = Duration::ZERO;
    for inst in contradicting_instances() {
        let t = Instant::now();
        let e = enumerate_pareto(&inst, DEFAULT_ENUMERATION_LIMIT).map_err(|e| e.to_string())?;
        slowest_enum = slowest_enum.max(t.elapsed());
        let t = Instant::now();
        let d = dp_pareto(&inst).map_err(|e| e.to_string())?;
        slowest_dp = slowest_dp.max(t.elapsed());
        let v = e.vectors();
        check(v.len() == 13, format!("{} points instead of 13", v.len()))?;
        check(v == d.vectors(), "enumeration and DP disagree")?;
        let expected: Vec<ObjectiveVector> = (12..=24).map(|d1| ObjectiveVector::new(d1, 36 - d1)).collect();
        check(v == expected, format!("unexpected vectors {v:?}"))?;
        fronts.push(e);
    }
    check(slowest_enum <= Duration::from_secs(300), format!("enumeration took {slowest_enum:?}"))?;
    check(slowest_dp <= Duration::from_secs(1), format!("DP took {slowest_dp:?}"))?;
    Ok(format!(
        "5/5 instances with the 13 points d1 + d2 = 36; slowest enumeration {:.1} s, slowest DP {:.3} s",
        slowest_enum.as_secs_f64(),
        slowest_dp.as_secs_f64()
    ))
}

fn criterion_2(fronts: &[Front]) -> Outcome {
    let mut summary = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut all_hits = Vec::new();
    for (inst, reference) in contradicting_instances().iter().zip(fronts) {
        let mut found = 0;
        for seed in 1..=30 {
            let cfg = MogaConfig {
                population_size: 50,
                iterations: 200,
                crossover: CrossoverKind::Dec,
                seed,
                ..MogaConfig::default()
            };
            let t = Instant::now();
            let report = run(inst, &cfg, Some(reference)).map_err(|e| e.to_string())?;
            slowest = slowest.max(t.elapsed());
            if let Some(it) = report.igd_trace.iter().position(|&x| x == 0.0) {
                found += 1;
                all_hits.push(it);
            }
        }
        summary.push(found);
        check(found >= 28, format!("only {found}/30 runs recovered the front on {}", inst.name()))?;
    }
    check(slowest <= Duration::from_secs(30), format!("a run took {slowest:?}"))?;
    all_hits.sort_unstable();
    Ok(format!(
        "runs recovering all 13 points per instance {summary:?} of 30; iterations needed: median {}, max {}",
        all_hits[all_hits.len() / 2],
        all_hits[all_hits.len() - 1]
    ))
}

fn criterion_3(fronts: &[Front]) -> Outcome {
    let half = r(1, 2);
    let full = 100.0 * 12.0 / 13.0;
    let mut cells = 0;
    for f in fronts {
        for row in theta_sweep(f, &default_grid()).map_err(|e| e.to_string())? {
            let collapse = match row.case {
                SweepCase::FirstOverSecond => row.theta12.unwrap() >= half,
                SweepCase::SecondOverFirst => row.theta21.unwrap() >= half,
                SweepCase::Pair => row.theta12.unwrap().max(row.theta21.unwrap()) >= half,
            };
            let (n_after, pct) = if collapse { (1, full) } else { (13, 0.0) };
            check(
                row.n_before == 13 && row.n_after == n_after && (row.excluded_pct - pct).abs() < 1e-9,
                format!("unexpected sweep row {row:?}"),
            )?;
            cells += 1;
        }
    }
    Ok(format!("{cells} sweep cells: 0% below 0.5, {full:.1}% from 0.5 on, pairs collapse iff max >= 0.5"))
}

fn random_front<R: Rng>(rng: &mut R, size: usize) -> Front {
    let mut xs = sample(rng, 2000, size).into_vec();
    let mut ys = sample(rng, 2000, size).into_vec();
    xs.sort_unstable();
    ys.sort_unstable_by(|a, b| b.cmp(a));
    let f = Front::from_vectors(xs.iter().zip(&ys).map(|(&a, &b)| ObjectiveVector::new(a as i64, b as i64)));
    assert_eq!(f.len(), size);
    f
}

fn random_theta<R: Rng>(rng: &mut R) -> Rational64 {
    let q = rng.gen_range(2..=60);
    r(rng.gen_range(1..q), q)
}

/// Cone spanned by two generators: `d = λ g1 + μ g2` with `λ, μ >= 0`.
fn in_cone(d: (Rational64, Rational64), g1: (Rational64, Rational64), g2: (Rational64, Rational64)) -> bool {
    let det = g1.0 * g2.1 - g1.1 * g2.0;
    let lambda = (d.0 * g2.1 - d.1 * g2.0) / det;
    let mu = (g1.0 * d.1 - g1.1 * d.0) / det;
    lambda >= r(0, 1) && mu >= r(0, 1)
}

/// Survivors of `front` when `y` is removed as soon as `y - y'` lies in the
/// (non-trivial) cone for some other `y'`.
fn cone_oracle(front: &Front, g1: (Rational64, Rational64), g2: (Rational64, Rational64)) -> Vec<ObjectiveVector> {
    let v = front.vectors();
    v.iter()
        .filter(|y| {
            !v.iter().any(|z| {
                z != *y && in_cone((r(y.d1 - z.d1, 1), r(y.d2 - z.d2, 1)), g1, g2)
            })
        })
        .copied()
        .collect()
}

fn single_generators(c: Criterion, t: Rational64) -> ((Rational64, Rational64), (Rational64, Rational64)) {
    let one = r(1, 1);
    match c {
        Criterion::First => ((r(0, 1), one), (one - t, -t)),
        Criterion::Second => ((one, r(0, 1)), (-t, one - t)),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = rng_from_seed(41);
    let one = r(1, 1);
    let trials = 1200;
    for _ in 0..trials {
        let size = rng.gen_range(2..=100);
        let f = random_front(&mut rng, size);
        for c in Criterion::BOTH {
            let t = random_theta(&mut rng);
            let red = reduce_single(&f, &Quantum::new(c, t).unwrap());
            check(red.is_subset_of(&f), "single reduction is not a subset")?;
            let (g1, g2) = single_generators(c, t);
            check(red.vectors() == cone_oracle(&f, g1, g2), format!("cone oracle disagrees for {c:?} θ = {t}"))?;
        }
        let (t12, t21) = loop {
            let (a, b) = (random_theta(&mut rng), random_theta(&mut rng));
            if a + b < one {
                break (a, b);
            }
        };
        let both = reduce_double(&f, &QuantumPair::new(t12, t21).unwrap());
        let r12 = reduce_single(&f, &Quantum::new(Criterion::First, t12).unwrap());
        let r21 = reduce_single(&f, &Quantum::new(Criterion::Second, t21).unwrap());
        check(
            both.is_subset_of(&f) && both.is_subset_of(&r12) && both.is_subset_of(&r21),
            format!("pair ({t12}, {t21}) is not nested in its singles"),
        )?;
        let oracle = cone_oracle(&f, (one - t12, -t12), (-t21, one - t21));
        check(both.vectors() == oracle, format!("cone oracle disagrees for pair ({t12}, {t21})"))?;
    }
    Ok(format!("{trials} random fronts of size 2..100: inclusions hold, singles and pairs match the cone oracle"))
}

fn criterion_5() -> Outcome {
    let grid: Vec<Rational64> = (1..24).map(|i| r(i, 24)).collect();
    let mut checked = 0;
    for k in [r(1, 3), r(1, 2), r(1, 1), r(2, 1), r(3, 1)] {
        let (p, q) = (*k.numer(), *k.denom());
        let a = p * 24 + 1;
        let front = Front::from_vectors((0..25).map(|i| ObjectiveVector::new(q * i, a - p * i)));
        check(front.len() == 25, "line front lost points")?;
        let line = LineModel::new(r(a, 1), k, 1).unwrap();
        let mut prefs = Vec::new();
        for &t in &grid {
            prefs.push(Preference::Single(Quantum::new(Criterion::First, t).unwrap()));
            prefs.push(Preference::Single(Quantum::new(Criterion::Second, t).unwrap()));
            for &u in &grid {
                if let Ok(qp) = QuantumPair::new(t, u) {
                    prefs.push(Preference::Pair(qp));
                }
            }
        }
        for pref in prefs {
            let size = pref.reduce(&front).len();
            let ok = match predict_line_reduction(&line, &pref) {
                LinePrediction::Singleton => size == 1,
                LinePrediction::Unchanged => size == 25,
                other => return Err(format!("single line predicted {other:?}")),
            };
            check(ok, format!("k = {k}, {pref:?}: prediction wrong, {size} points kept"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (k, θ) cases on 25-point lines, boundaries k/(k+1) and 1/(k+1) included"))
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(61);
    let trials = 1500;
    let mut triggered = 0;
    for _ in 0..trials {
        let size = rng.gen_range(2..=100);
        let f = random_front(&mut rng, size);
        let c = if rng.gen_bool(0.5) { Criterion::First } else { Criterion::Second };
        let q = Quantum::new(c, random_theta(&mut rng)).unwrap();
        if guaranteed_exclusion(&f, &q) {
            triggered += 1;
            let kept = reduce_single(&f, &q).len();
            check(kept < f.len(), format!("guarantee held but {kept} of {} kept", f.len()))?;
        }
    }
    check(triggered > 100, format!("guarantee fired only {triggered} times"))?;
    Ok(format!("{triggered} of {trials} random cases met the condition; each lost at least one point"))
}

fn criterion_7() -> Outcome {
    let pts = |v: &[(i64, i64)]| v.iter().map(|&(a, b)| ObjectiveVector::new(a, b)).collect::<Vec<_>>();
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    let p = pts(&[(3, 4)]);
    check(close(gd(&p, &p).unwrap(), 0.0), "gd(P, P) != 0")?;
    check(close(gd(&pts(&[(0, 0)]), &p).unwrap(), 5.0), "gd({(0,0)}) != 5")?;
    check(close(gd(&pts(&[(0, 0), (3, 4)]), &p).unwrap(), 2.5), "gd({(0,0),(3,4)}) != 2.5")?;
    check(close(igd(&pts(&[(0, 0)]), &p).unwrap(), 5.0), "igd({(0,0)}) != 5")?;

    let inst = generate_random(9, 1..=20, 1..=20, 77).unwrap();
    let star = dp_pareto(&inst).unwrap().vectors();
    let mut rng = rng_from_seed(5);
    let mut a: Vec<ObjectiveVector> = (0..5)
        .map(|_| inst.evaluate(&Tour::random(9, &mut rng)).unwrap())
        .filter(|v| !star.contains(v))
        .collect();
    let mut last = gd(&a, &star).unwrap();
    for s in &star {
        a.push(*s);
        let now = gd(&a, &star).unwrap();
        check(now < last, format!("gd rose from {last} to {now}"))?;
        last = now;
    }
    Ok(format!("unit examples exact; gd fell monotonically over {} augmentations", star.len()))
}

fn criterion_8() -> Outcome {
    let started = Instant::now();
    let (mut runs, mut better) = (0, 0);
    let (mut initial_size, mut final_size) = (0usize, 0usize);
    let (mut gd_ratio, mut size_ratio) = (0.0, 0.0);
    let mut flat_start = 0;
    for s in 1..=5 {
        let inst = generate_random(12, 1..=10, 1..=10, s).unwrap();
        let reference = dp_pareto(&inst).unwrap();
        for seed in 1..=30 {
            let cfg = MogaConfig { seed, ..MogaConfig::default() };
            let rep = run(&inst, &cfg, Some(&reference)).map_err(|e| e.to_string())?;
            runs += 1;
            let (g0, i0) = (rep.gd_trace[0], rep.igd_trace[0]);
            let (g1, i1) = (rep.final_gd.unwrap(), rep.final_igd.unwrap());
            if g1 < g0 && i1 < i0 {
                better += 1;
            }
            if g0 == 0.0 {
                flat_start += 1;
            }
            initial_size += rep.initial_front.len();
            final_size += rep.front.len();
            if g1 > 0.0 {
                gd_ratio += g0 / g1;
            }
            size_ratio += rep.front.len() as f64 / rep.initial_front.len() as f64;
        }
    }
    let elapsed = started.elapsed();
    let share = better as f64 / runs as f64;
    let growth = final_size as f64 / initial_size as f64;
    check(share >= 0.9, format!("GD and IGD both improved in only {better}/{runs} runs"))?;
    check(growth >= 2.0, format!("mean front size grew only {growth:.2}x"))?;
    check(elapsed <= Duration::from_secs(1800), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{better}/{runs} runs improved GD and IGD ({flat_start} started at GD = 0); mean front size {:.2} -> {:.2} ({growth:.2}x); \
         mean per-run GD ratio over runs with GD > 0: {:.2}; mean size ratio {:.2}; {:.0} s",
        initial_size as f64 / runs as f64,
        final_size as f64 / runs as f64,
        gd_ratio / runs as f64,
        size_ratio / runs as f64,
        elapsed.as_secs_f64()
    ))
}

fn criterion_9() -> Outcome {
    for seed in 0..20u64 {
        let n = 5 + (seed % 6) as usize;
        let inst = generate_random(n, 1..=30, 1..=30, 900 + seed).unwrap();
        let e = enumerate_pareto(&inst, DEFAULT_ENUMERATION_LIMIT).unwrap();
        let d = dp_pareto(&inst).unwrap();
        check(e.vectors() == d.vectors(), format!("n = {n}, seed {seed}: enumeration and DP differ"))?;
    }
    Ok("20 instances with n in 5..=10: identical vector sets".into())
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_biatsp"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)),
    )
}

fn criterion_10() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for rep in 0..2 {
        let d = root.path().join(format!("rep{rep}"));
        fs::create_dir_all(&d).map_err(|e| e.to_string())?;
        let steps: Vec<Vec<&str>> = vec![
            vec!["gen", "--series", "random", "--n", "9", "--count", "2", "--seed", "3", "--out", "."],
            vec!["gen", "--series", "contr", "--n", "8", "--count", "1", "--seed", "3", "--out", "."],
            vec!["exact", "--instance", "random9_0.json", "--method", "enum", "--out", "enum.csv"],
            vec!["exact", "--instance", "random9_0.json", "--method", "dp", "--out", "dp.csv"],
            vec![
                "solve", "--instance", "random9_1.json", "--pop", "20", "--iters", "50", "--seed-range", "1..3",
                "--out", "dec",
            ],
            vec![
                "solve", "--instance", "random9_1.json", "--crossover", "dpx", "--pop", "20", "--iters", "50",
                "--seed", "2", "--reference", "dp.csv", "--out", "dpx",
            ],
            vec!["reduce", "--front", "dp.csv", "--theta12", "0.3", "--theta21", "1/3", "--out", "red.csv"],
            vec!["reduce", "--front", "dp.csv", "--sweep", "--out", "sweep.csv"],
        ];
        for s in &steps {
            cli(&d, s)?;
        }
        let files = [
            "random9_0.json", "random9_1.json", "contr8_0.json", "enum.csv", "dp.csv", "dec/front_s1.csv",
            "dec/front_s2.csv", "dec/front_s3.csv", "dpx/front_s2.csv", "red.csv", "sweep.csv",
        ];
        outputs.push(
            files
                .iter()
                .map(|f| Ok((f.to_string(), fs::read(d.join(f)).map_err(|e| format!("{f}: {e}"))?)))
                .collect::<Result<_, String>>()?,
        );
    }
    for ((name, a), (_, b)) in outputs[0].iter().zip(&outputs[1]) {
        check(a == b, format!("{name} differs between repetitions"))?;
    }
    Ok(format!("{} output files byte-identical across two repetitions", outputs[0].len()))
}

fn main() -> ExitCode {
    let mut fronts = Vec::new();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id, title, outcome: Outcome| {
        let (tag, text) = match &outcome {
            Ok(t) => ("PASS", t),
            Err(t) => ("FAIL", t),
        };
        println!("criterion {id:>2} [{tag}] {title}: {text}");
        results.push((id, title, outcome));
    };
    report(1, "contradicting ground truth", criterion_1(&mut fronts));
    let c2 = if fronts.len() == 5 {
        criterion_2(&fronts)
    } else {
        Err("needs the exact fronts of criterion 1".into())
    };
    report(2, "MOGA recovers the line front", c2);
    let c3 = if fronts.len() == 5 {
        criterion_3(&fronts)
    } else {
        Err("needs the exact fronts of criterion 1".into())
    };
    report(3, "sharp reduction thresholds", c3);
    report(4, "reduction inclusions and cone oracle", criterion_4());
    report(5, "line threshold predicate", criterion_5());
    report(6, "guaranteed exclusion", criterion_6());
    report(7, "metric oracles", criterion_7());
    report(8, "stochastic convergence", criterion_8());
    report(9, "enumeration and DP agree", criterion_9());
    report(10, "CLI determinism", criterion_10());
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
