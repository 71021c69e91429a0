//! Built-in example checks run by `powertalk selftest`.

use powertalk_core::feedback::{build_nearest_neighbor_dmc, build_uniform_db_quantizer};
use powertalk_core::metrics::{esnr_db, relative_utility_loss};
use powertalk_core::model::{received_power, sinr};
use powertalk_core::optimize::{exhaustive_oracle, sum_ee, sum_rate, water_fill};
use powertalk_core::phase1::{diagonal_training, lspd_estimate};
use powertalk_core::quantizer::{design_alma, design_lma, design_meq, end_to_end_distortion, LloydOptions};
use powertalk_core::{
    ChannelState, GainStatistics, PowerGrid, PowerProfile, Prior, RepTransitionMatrix, UtilitySpec,
};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

type CheckFn = fn() -> Result<(bool, String), powertalk_core::Error>;

fn received_power_hand_example() -> Result<(bool, String), powertalk_core::Error> {
    let g = ChannelState::from_rows(&[&[2.0, 0.0], &[0.5, 1.0]])?;
    let p = PowerProfile::single_band(&[3.0, 4.0])?;
    let w = received_power(&g, &p, 0, 0, 1.0)?;
    let s = sinr(&g, &p, 0, 0, 1.0)?;
    Ok((close(w, 9.0, 1e-12) && close(s, 2.0, 1e-12), format!("omega {w}, sinr {s}")))
}

fn rssi_one_bit_levels() -> Result<(bool, String), powertalk_core::Error> {
    let q = build_uniform_db_quantizer(1, 30.0)?;
    let l = q.levels_db();
    let sat = q.quantize_saturating(1e-10);
    Ok((close(l[0], 17.5, 1e-12) && close(l[1], 32.5, 1e-12) && sat == 0, format!("levels {l:?}")))
}

fn dmc_rows() -> Result<(bool, String), powertalk_core::Error> {
    let d = build_nearest_neighbor_dmc(4, 0.1)?;
    let ok = d.row(0).iter().zip([0.9, 0.1, 0.0, 0.0]).all(|(a, b)| close(*a, b, 1e-12))
        && d.row(1).iter().zip([0.1, 0.8, 0.1, 0.0]).all(|(a, b)| close(*a, b, 1e-12));
    Ok((ok, format!("rows {:?} {:?}", d.row(0), d.row(1))))
}

fn lspd_hand_example() -> Result<(bool, String), powertalk_core::Error> {
    let train = diagonal_training(2, 2.0, 2.0)?;
    let est = lspd_estimate(&train, &[3.0, 5.0], 1.0)?;
    Ok((close(est.g[0], 1.0, 1e-12) && close(est.g[1], 2.0, 1e-12), format!("g {:?}", est.g)))
}

fn meq_exponential_two_cells() -> Result<(bool, String), powertalk_core::Error> {
    let q = design_meq(&Prior::exponential(1.0)?, 1)?;
    let ln2 = core::f64::consts::LN_2;
    let ok = close(q.bounds()[1], ln2, 1e-9) && close(q.reps()[0], 1.0 - ln2, 1e-9) && close(q.reps()[1], 1.0 + ln2, 1e-9);
    Ok((ok, format!("bound {}, reps {:?}", q.bounds()[1], q.reps())))
}

fn alma_identity_matches_lma() -> Result<(bool, String), powertalk_core::Error> {
    let prior = Prior::exponential(1.0)?;
    let opts = LloydOptions::default();
    let pi = RepTransitionMatrix::identity(4);
    let a = design_alma(&prior, 2, &pi, &opts)?.quantizer;
    let l = design_lma(&prior, 2, &opts)?.quantizer;
    let da = end_to_end_distortion(&a, &prior, &pi)?;
    let dl = end_to_end_distortion(&l, &prior, &pi)?;
    Ok((close(da, dl, 1e-9), format!("alma {da}, lma {dl}")))
}

fn alma_uninformative_channel() -> Result<(bool, String), powertalk_core::Error> {
    let prior = Prior::exponential(1.0)?;
    let pi = RepTransitionMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]])?;
    let q = design_alma(&prior, 1, &pi, &LloydOptions::default())?.quantizer;
    Ok((q.reps().iter().all(|v| close(*v, 1.0, 1e-9)), format!("reps {:?}", q.reps())))
}

fn rate_and_ee_hand_examples() -> Result<(bool, String), powertalk_core::Error> {
    let g = ChannelState::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]])?;
    let p = PowerProfile::single_band(&[1.0, 1.0])?;
    let r = sum_rate(&p, &g, 1.0);
    let one = ChannelState::from_rows(&[&[1.0]])?;
    let e = sum_ee(&PowerProfile::single_band(&[1.0])?, &one, 1.0, 1.0);
    let ok = close(r, 2.0 * 1.5f64.log2(), 1e-12) && close(e, (-1.0f64).exp(), 1e-12);
    Ok((ok, format!("rate {r}, ee {e}")))
}

fn water_fill_symmetric() -> Result<(bool, String), powertalk_core::Error> {
    let (p, _) = water_fill(&[1.0, 1.0], 10.0);
    Ok((close(p[0], 5.0, 1e-9) && close(p[1], 5.0, 1e-9), format!("p {p:?}")))
}

fn oracle_single_user_full_power() -> Result<(bool, String), powertalk_core::Error> {
    let g = ChannelState::from_rows(&[&[1.0]])?;
    let grid = PowerGrid::new(10, 100.0, 1)?;
    let (p, _) = exhaustive_oracle(&g, &UtilitySpec::sum_rate(), &grid, 1.0)?;
    Ok((close(p.p(0, 0), 100.0, 1e-9), format!("p {}", p.p(0, 0))))
}

fn metric_hand_examples() -> Result<(bool, String), powertalk_core::Error> {
    let e = esnr_db(10.0, 1.0);
    let l = relative_utility_loss(&[(10.0, 9.0)]).percent;
    Ok((close(e, 10.0, 1e-12) && close(l, 10.0, 1e-12), format!("esnr {e}, loss {l}")))
}

fn sir_statistics() -> Result<(bool, String), powertalk_core::Error> {
    let s = GainStatistics::sir_controlled(10.0, 2, 1)?;
    let ok = close(s.mean(0, 0, 0), 1.0, 1e-12) && close(s.mean(1, 0, 0), 0.1, 1e-12) && close(s.mean(0, 1, 0), 0.1, 1e-12);
    Ok((ok, format!("cross mean {}", s.mean(1, 0, 0))))
}

const CHECKS: &[(&str, CheckFn)] = &[
    ("received power and sinr, two users", received_power_hand_example),
    ("rssi quantizer, one bit", rssi_one_bit_levels),
    ("nearest-neighbour dmc rows", dmc_rows),
    ("lspd, diagonal training", lspd_hand_example),
    ("meq, exponential prior, two cells", meq_exponential_two_cells),
    ("alma on a clean channel equals lma", alma_identity_matches_lma),
    ("alma on an uninformative channel", alma_uninformative_channel),
    ("sum-rate and sum-ee", rate_and_ee_hand_examples),
    ("water-filling, equal bands", water_fill_symmetric),
    ("oracle, single user", oracle_single_user_full_power),
    ("esnr and utility loss", metric_hand_examples),
    ("sir-controlled statistics", sir_statistics),
];

pub fn run() -> Vec<Check> {
    CHECKS
        .iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}
