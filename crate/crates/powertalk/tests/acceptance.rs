//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero when any criterion fails. Tolerances are fixed here and are not
//! tuned to the results.

use std::collections::BTreeMap;
use std::time::Instant;

use powertalk::config::UtilityName;
use powertalk::report::Row;
use powertalk::{Config, Experiment};
use powertalk_core::exchange::decode_slot;
use powertalk_core::feedback::{build_nearest_neighbor_dmc, build_uniform_db_quantizer};
use powertalk_core::model::sample_channel;
use powertalk_core::optimize::{exhaustive_oracle, iwfa, team_brd, user_rate};
use powertalk_core::phase1::{
    diagonal_training, likelihood, lspd_estimate, ml_set_contains, mmsepd_estimate_enumerate, mmsepd_estimate_mc,
    Integration,
};
use powertalk_core::quantizer::{design_alma, design_lma, design_meq, end_to_end_distortion, LloydOptions};
use powertalk_core::{
    BrdMode, ChannelState, DistributedCsi, GainStatistics, PowerAlphabet, PowerGrid, Prior, RepTransitionMatrix,
    UtilitySpec,
};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// `[sweep value][method][metric] -> value`
type Table = BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>;

fn table(rows: &[Row]) -> Table {
    let mut t = Table::new();
    for r in rows {
        t.entry(format!("{}", r.sweep_value))
            .or_default()
            .entry(r.method.clone())
            .or_default()
            .insert(r.metric.clone(), r.value);
    }
    t
}

fn run(e: Experiment, edit: impl FnOnce(&mut Config)) -> Table {
    let mut cfg = e.defaults();
    edit(&mut cfg);
    table(&e.run(&cfg).expect("experiment runs"))
}

fn ml_set_property() -> Outcome {
    let q = build_uniform_db_quantizer(8, 30.0).unwrap();
    let mut rng = SmallRng::seed_from_u64(1);
    let mut failures = 0;
    let axis: Vec<f64> = (0..50).map(|i| 10.0 * i as f64 / 49.0).collect();
    for k in [1usize, 2] {
        for eps in [0.01, 0.1] {
            let dmc = build_nearest_neighbor_dmc(q.size(), eps).unwrap();
            let train = diagonal_training(k, 1000.0, 1000.0).unwrap();
            for _ in 0..100 {
                let g: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().ln()).collect();
                let obs: Vec<usize> =
                    g.iter().map(|x| dmc.sample(q.quantize_saturating(1000.0 * x + 1.0), &mut rng)).collect();
                let rssi: Vec<f64> = obs.iter().map(|&m| q.level_linear(m)).collect();
                let est = lspd_estimate(&train, &rssi, 1.0).unwrap();
                let grid = vec![axis.clone(); k];
                if !ml_set_contains(&train, &obs, &est, &q, &dmc, 1.0, &grid).unwrap() {
                    failures += 1;
                }
            }
        }
    }
    outcome(failures == 0, format!("{failures}/400 trials outside the ML set"))
}

fn mmsepd_equivalence() -> Outcome {
    let q = build_uniform_db_quantizer(2, 30.0).unwrap();
    let dmc = build_nearest_neighbor_dmc(4, 0.1).unwrap();
    let train = diagonal_training(1, 1000.0, 1000.0).unwrap();
    let priors = [Prior::exponential(1.0).unwrap()];
    let mut rng = SmallRng::seed_from_u64(1);
    let mut worst_mc = 0.0f64;
    for obs in 0..4 {
        let exact = mmsepd_estimate_enumerate(&train, &[obs], &q, &dmc, &priors, 1.0, &Integration::default()).unwrap();
        let mc = mmsepd_estimate_mc(&train, &[obs], &q, &dmc, &priors, 1.0, 1_000_000, &mut rng).unwrap();
        worst_mc = worst_mc.max((exact.g[0] - mc.g[0]).abs());
    }
    // four-atom discrete prior against a direct Bayes sum
    let atoms = vec![0.004, 0.03, 0.4, 6.0];
    let probs = vec![0.25, 0.25, 0.3, 0.2];
    let prior = [Prior::discrete(atoms.clone(), probs.clone()).unwrap()];
    let mut worst_bayes = 0.0f64;
    for obs in 0..4 {
        let est = mmsepd_estimate_enumerate(&train, &[obs], &q, &dmc, &prior, 1.0, &Integration::default()).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (a, p) in atoms.iter().zip(&probs) {
            let w = p * likelihood(&train, &[obs], &[*a], &q, &dmc, 1.0);
            num += w * a;
            den += w;
        }
        worst_bayes = worst_bayes.max((est.g[0] - num / den).abs());
    }
    outcome(
        worst_mc <= 1e-3 && worst_bayes <= 1e-12,
        format!("max |enum - mc| = {worst_mc:.2e} (tol 1e-3), max |enum - bayes| = {worst_bayes:.2e} (tol 1e-12)"),
    )
}

fn alma_reduces_to_lma() -> Outcome {
    let mut worst = 0.0f64;
    for mean in [0.1, 1.0, 4.0] {
        let prior = Prior::exponential(mean).unwrap();
        for bits in 1..=3u32 {
            let pi = RepTransitionMatrix::identity(1 << bits);
            let a = design_alma(&prior, bits, &pi, &LloydOptions::default()).unwrap().quantizer;
            let l = design_lma(&prior, bits, &LloydOptions::default()).unwrap().quantizer;
            let d = end_to_end_distortion(&a, &prior, &pi).unwrap() - end_to_end_distortion(&l, &prior, &pi).unwrap();
            worst = worst.max(d.abs());
        }
    }
    outcome(worst <= 1e-9, format!("max distortion gap {worst:.2e} over R in {{2,4,8}} (tol 1e-9)"))
}

fn meq_closed_form() -> Outcome {
    let q = design_meq(&Prior::exponential(1.0).unwrap(), 1).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let err = (q.bounds()[1] - ln2)
        .abs()
        .max((q.reps()[0] - (1.0 - ln2)).abs())
        .max((q.reps()[1] - (1.0 + ln2)).abs());
    outcome(err <= 1e-9, format!("bound {:.9}, reps {:?}, max error {err:.2e}", q.bounds()[1], q.reps()))
}

fn decoder_oracle() -> Outcome {
    let mut rng = SmallRng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let k = rng.gen_range(2..=3);
        let l = [2usize, 3, 4][rng.gen_range(0..3)];
        let alphabet = PowerAlphabet::uniform(l, 1000.0).unwrap();
        let observer = rng.gen_range(0..k);
        let column: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().ln()).collect();
        let others: Vec<usize> = (0..k).filter(|&j| j != observer).collect();
        let own = alphabet.level(rng.gen_range(0..l));
        let rssi = 1.0 + 3000.0 * rng.gen::<f64>();
        let got = decode_slot(observer, &column, own, rssi, &others, &alphabet, 1.0).unwrap();
        let mut best = (Vec::new(), f64::INFINITY);
        for n in 0..l.pow(others.len() as u32) {
            let digits: Vec<usize> = (0..others.len()).rev().map(|p| n / l.pow(p as u32) % l).collect();
            let pred = 1.0 + own * column[observer]
                + others.iter().zip(&digits).map(|(&j, &d)| column[j] * alphabet.level(d)).sum::<f64>();
            if (rssi - pred).abs() < best.1 {
                best = (digits, (rssi - pred).abs());
            }
        }
        if got != best.0 {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches}/1000 instances differ from enumeration"))
}

fn iwfa_nash() -> Outcome {
    let mut rng = SmallRng::seed_from_u64(1);
    let (k, s, p_max) = (3usize, 2usize, 1000.0);
    let mut worst = f64::NEG_INFINITY;
    let mut unconverged = 0;
    for _ in 0..100 {
        let mean: Vec<f64> = (0..k * k * s)
            .map(|l| if l / s / k == l / s % k { 1.0 } else { 0.05 + 0.5 * rng.gen::<f64>() })
            .collect();
        let state = sample_channel(&GainStatistics::new(k, s, mean).unwrap(), &mut rng);
        let direct: Vec<Vec<f64>> = (0..k).map(|i| (0..s).map(|b| state.g(i, i, b)).collect()).collect();
        let out = iwfa(&state, &direct, 1.0, p_max, 10_000, 1e-12).unwrap();
        if !out.converged {
            unconverged += 1;
        }
        for i in 0..k {
            let own = user_rate(&out.profile, &state, i, 1.0);
            let mut trial = out.profile.clone();
            for step in 0..=2000 {
                let x = p_max * step as f64 / 2000.0;
                trial.set_user(i, &[x, p_max - x]);
                worst = worst.max(user_rate(&trial, &state, i, 1.0) - own);
            }
        }
    }
    outcome(
        worst <= 1e-6 && unconverged == 0,
        format!("largest unilateral gain {worst:.2e} bit (eps 1e-6), {unconverged} runs unconverged"),
    )
}

fn oracle_dominance() -> Outcome {
    let mut rng = SmallRng::seed_from_u64(1);
    let stats = GainStatistics::sir_controlled(0.0, 2, 1).unwrap();
    let grid = PowerGrid::new(100, 1000.0, 1).unwrap();
    let mut violations = 0;
    let mut n = 0;
    for spec in [UtilitySpec::sum_rate(), UtilitySpec::sum_ee(1.0).unwrap()] {
        for _ in 0..500 {
            let state: ChannelState = sample_channel(&stats, &mut rng);
            let (_, best) = exhaustive_oracle(&state, &spec, &grid, 1.0).unwrap();
            let p = team_brd(&DistributedCsi::perfect(&state), &spec, &grid, 1.0, BrdMode::Centralized, 50).unwrap();
            if spec.evaluate(&p, &state, 1.0) > best {
                violations += 1;
            }
            n += 1;
        }
    }
    outcome(violations == 0, format!("{violations}/{n} draws where team BRD beat the oracle"))
}

fn phase1_esnr(t: &Table) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (x, methods) in t {
        for (m, metrics) in methods {
            let v = metrics["esnr_db"];
            ok &= (v - 40.0).abs() <= 3.0;
            lines.push(format!("{m}@{x}={v:.1}"));
        }
    }
    outcome(ok, format!("target 40 +/- 3 dB: {}", lines.join(" ")))
}

fn phase1_flat(t: &Table) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in ["lspd", "mmsepd"] {
        let v: Vec<f64> = t.values().map(|ms| ms[m]["esnr_db"]).collect();
        let spread = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= spread <= 1.5;
        parts.push(format!("{m} spread {spread:.2} dB"));
    }
    outcome(ok, format!("{} (tol 1.5 dB)", parts.join(", ")))
}

fn phase2_esnr(one_bit: &Table, bits: &Table) -> Outcome {
    let a = one_bit["0"]["meq"]["esnr_db"];
    let b = bits["4"]["meq"]["esnr_db"];
    outcome(
        (a - 9.0).abs() <= 2.0 && (b - 13.0).abs() <= 2.0,
        format!("1-bit MEQ {a:.2} dB (9 +/- 2), 4-bit MEQ {b:.2} dB (13 +/- 2)"),
    )
}

fn interior_maximum(bits: &Table) -> Outcome {
    let curve: Vec<(f64, f64)> =
        bits.iter().map(|(x, ms)| (x.parse::<f64>().unwrap(), ms["meq"]["esnr_db"])).collect();
    let mut sorted = curve.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (arg, _) = sorted.iter().cloned().fold((0.0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let interior = arg > sorted[0].0 && arg < sorted[sorted.len() - 1].0;
    let shown: Vec<String> = sorted.iter().map(|(x, v)| format!("{x}:{v:.2}")).collect();
    outcome(interior, format!("argmax at {arg} bits; {}", shown.join(" ")))
}

fn utility_loss(t: &Table) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (x, ms) in t {
        let rl = ms["lspd"]["delta_u_sum_rate"];
        let rm = ms["mmsepd"]["delta_u_sum_rate"];
        let el = ms["lspd"]["delta_u_sum_ee"];
        let em = ms["mmsepd"]["delta_u_sum_ee"];
        let rate_ok = rl <= 6.0 && rm <= 6.0 && (rl - rm).abs() <= 2.0;
        let ee_ok = (10.0..=25.0).contains(&el) && (10.0..=25.0).contains(&em) && el - em >= 2.0;
        ok &= rate_ok && ee_ok;
        parts.push(format!(
            "sir {x}: rate lspd {rl:.2} mmsepd {rm:.2} [{}], ee lspd {el:.2} mmsepd {em:.2} [{}]",
            if rate_ok { "ok" } else { "out" },
            if ee_ok { "ok" } else { "out" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn global_ordering(s1: &Table, s2: &Table) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (bands, t, need) in [(1, s1, 0.50), (2, s2, 0.35)] {
        let mut ordered = true;
        let (mut i_sum, mut e_sum, mut p_sum) = (0.0, 0.0, 0.0);
        for ms in t.values() {
            let (i, e, p) = (ms["iwfa"]["sum_rate"], ms["brd_estimated"]["sum_rate"], ms["brd_perfect"]["sum_rate"]);
            ordered &= p > e && e > i;
            i_sum += i;
            e_sum += e;
            p_sum += p;
        }
        let fraction = (e_sum - i_sum) / (p_sum - i_sum);
        ok &= ordered && fraction >= need;
        parts.push(format!("S={bands}: ordered at every ISD {ordered}, gap recovered {:.1} % (need {:.0} %)", 100.0 * fraction, 100.0 * need));
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let mut timed = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((name, o, start.elapsed().as_secs_f64()));
    };

    timed("ml-set membership of LSPD", &mut ml_set_property);
    timed("MMSEPD enumeration vs Monte-Carlo and discrete Bayes", &mut mmsepd_equivalence);
    timed("ALMA with identity label channel equals LMA", &mut alma_reduces_to_lma);
    timed("MEQ closed form, exponential mean 1, R=2", &mut meq_closed_form);
    timed("power decoder equals enumeration oracle", &mut decoder_oracle);
    timed("IWFA fixed point is an eps-Nash point", &mut iwfa_nash);
    timed("oracle dominates team BRD per draw", &mut oracle_dominance);

    let start = Instant::now();
    let p1 = run(Experiment::Phase1Esnr, |_| {});
    let p1_time = start.elapsed().as_secs_f64();
    timed("phase I ESNR near 40 dB", &mut || phase1_esnr(&p1));
    timed("phase I ESNR flat in SIR", &mut || phase1_flat(&p1));

    let one_bit = run(Experiment::Phase2Esnr, |c| c.sweep = vec![0.0]);
    let bits = run(Experiment::Phase2SweepBits, |c| c.sweep = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    timed("phase II ESNR for 1-bit and 4-bit MEQ", &mut || phase2_esnr(&one_bit, &bits));
    timed("phase II ESNR has an interior maximum in bits", &mut || interior_maximum(&bits));

    let start = Instant::now();
    let loss = run(Experiment::Phase1Loss, |c| c.utilities = vec![UtilityName::SumRate, UtilityName::SumEe]);
    let loss_time = start.elapsed().as_secs_f64();
    timed("phase I utility loss, sum-rate and sum-EE", &mut || utility_loss(&loss));

    let start = Instant::now();
    let s2 = run(Experiment::GlobalSumrate, |c| c.bands = 2);
    let s1 = run(Experiment::GlobalSumrate, |c| c.bands = 1);
    let global_time = start.elapsed().as_secs_f64();
    timed("global ordering and gap recovery on the 9-cell grid", &mut || global_ordering(&s1, &s2));

    let mut failed = 0;
    for (name, o, secs) in &results {
        println!("{} {name}: {} ({secs:.1} s)", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("runtimes: phase I sweep {p1_time:.1} s, utility loss {loss_time:.1} s, global sweeps {global_time:.1} s");
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
