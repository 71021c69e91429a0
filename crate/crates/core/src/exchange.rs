//! Exchange of local channel estimates by power modulation.
//!
//! Transmitter `j` quantizes the `K` gains it estimated (column `j` of `G`)
//! with per-link codebooks, concatenates the labels and sends them as a
//! sequence of power levels. Every other transmitter observes the resulting
//! interference through its own RSSI feedback and recovers the levels by a
//! nearest-point search over the finite alphabet.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};
use crate::feedback::{Dmc, RsQuantizer};
use crate::math;
use crate::model::{ChannelState, GainStatistics};
use crate::quantizer::{RepTransitionMatrix, ScalarGainQuantizer};

/// Largest candidate set the slot decoder searches.
pub const DECODE_BUDGET: f64 = 1e6;

/// Discrete transmit powers used to carry symbols, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAlphabet {
    levels: Vec<f64>,
}

impl PowerAlphabet {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::invalid("power alphabet needs at least two levels"));
        }
        if levels[0] < 0.0 || levels.iter().any(|x| !x.is_finite()) || levels.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("power levels must be finite, non-negative and strictly ascending"));
        }
        Ok(PowerAlphabet { levels })
    }

    /// `{0, p_max/(L-1), …, p_max}`.
    pub fn uniform(l: usize, p_max: f64) -> Result<Self> {
        if l < 2 {
            return Err(Error::invalid("power alphabet needs at least two levels"));
        }
        Self::new((0..l).map(|m| p_max * m as f64 / (l - 1) as f64).collect())
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    #[inline]
    pub fn level(&self, symbol: usize) -> f64 {
        self.levels[symbol]
    }

    /// Every level multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.levels.iter().map(|x| x * factor).collect())
    }

    /// Fit the alphabet to a per-slot budget shared by `bands` parallel bands.
    pub fn for_bands(&self, bands: usize, p_max: f64) -> Result<Self> {
        let top = self.levels[self.size() - 1];
        if top * bands as f64 <= p_max {
            Ok(self.clone())
        } else {
            self.scaled(p_max / (top * bands as f64))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeMode {
    /// All transmitters modulate in every slot.
    Simultaneous,
    /// One transmitter at a time; the others stay silent.
    Solo,
}

/// Who sends which symbol in each exchange slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeSchedule {
    mode: ExchangeMode,
    k: usize,
    n_bits: u32,
    bits_per_symbol: u32,
    symbols_per_tx: usize,
}

impl ExchangeSchedule {
    /// `alphabet_size` must be a power of two; labels carry `n_bits` each.
    pub fn new(mode: ExchangeMode, k: usize, n_bits: u32, alphabet_size: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if alphabet_size < 2 || !alphabet_size.is_power_of_two() {
            return Err(Error::Schedule(alloc::format!("alphabet size {alphabet_size} is not a power of two")));
        }
        if n_bits > 16 {
            return Err(Error::Schedule(alloc::format!("{n_bits}-bit labels are not supported")));
        }
        let bits_per_symbol = alphabet_size.trailing_zeros();
        let total_bits = k * n_bits as usize;
        let symbols_per_tx = total_bits.div_ceil(bits_per_symbol as usize);
        Ok(ExchangeSchedule { mode, k, n_bits, bits_per_symbol, symbols_per_tx })
    }

    pub fn mode(&self) -> ExchangeMode {
        self.mode
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn symbols_per_tx(&self) -> usize {
        self.symbols_per_tx
    }

    /// Number of exchange slots.
    pub fn t_ii(&self) -> usize {
        match self.mode {
            ExchangeMode::Simultaneous => self.symbols_per_tx,
            ExchangeMode::Solo => self.k * self.symbols_per_tx,
        }
    }

    /// `(transmitter, symbol index)` pairs active in `slot`.
    pub fn active(&self, slot: usize) -> Vec<(usize, usize)> {
        match self.mode {
            ExchangeMode::Simultaneous => (0..self.k).map(|j| (j, slot)).collect(),
            ExchangeMode::Solo => vec![(slot / self.symbols_per_tx, slot % self.symbols_per_tx)],
        }
    }

    /// Slot in which `tx` sends symbol `index`.
    pub fn slot_of(&self, tx: usize, index: usize) -> usize {
        match self.mode {
            ExchangeMode::Simultaneous => index,
            ExchangeMode::Solo => tx * self.symbols_per_tx + index,
        }
    }
}

/// Concatenate `n_bits`-bit labels most significant bit first and cut the
/// bit string into symbols of `bits_per_symbol` bits, zero padded at the end.
pub fn labels_to_symbols(labels: &[usize], n_bits: u32, bits_per_symbol: u32) -> Vec<usize> {
    let bits: Vec<u8> = labels
        .iter()
        .flat_map(|&label| (0..n_bits).rev().map(move |b| ((label >> b) & 1) as u8))
        .collect();
    bits.chunks(bits_per_symbol as usize)
        .map(|chunk| {
            let mut s = 0usize;
            for b in 0..bits_per_symbol as usize {
                s = (s << 1) | chunk.get(b).copied().unwrap_or(0) as usize;
            }
            s
        })
        .collect()
}

/// Inverse of [`labels_to_symbols`]; padding bits are ignored.
pub fn symbols_to_labels(symbols: &[usize], count: usize, n_bits: u32, bits_per_symbol: u32) -> Result<Vec<usize>> {
    let needed = (count * n_bits as usize).div_ceil(bits_per_symbol as usize);
    if symbols.len() < needed {
        return Err(Error::DimensionMismatch { what: "symbol sequence", expected: needed, found: symbols.len() });
    }
    let bits: Vec<usize> = symbols
        .iter()
        .flat_map(|&s| (0..bits_per_symbol).rev().map(move |b| (s >> b) & 1))
        .collect();
    Ok(bits
        .chunks(n_bits.max(1) as usize)
        .take(count)
        .map(|chunk| if n_bits == 0 { 0 } else { chunk.iter().fold(0, |acc, &b| (acc << 1) | b) })
        .collect())
}

/// Codebook for every link, `get(tx, rx)` quantizes `g_{tx,rx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCodebooks {
    k: usize,
    books: Vec<ScalarGainQuantizer>,
}

impl LinkCodebooks {
    pub fn new(k: usize, books: Vec<ScalarGainQuantizer>) -> Result<Self> {
        if books.len() != k * k {
            return Err(Error::DimensionMismatch { what: "link codebooks", expected: k * k, found: books.len() });
        }
        let bits = books[0].n_bits();
        if books.iter().any(|b| b.n_bits() != bits) {
            return Err(Error::invalid("all link codebooks must use the same number of bits"));
        }
        Ok(LinkCodebooks { k, books })
    }

    pub fn shared(k: usize, book: ScalarGainQuantizer) -> Self {
        LinkCodebooks { k, books: vec![book; k * k] }
    }

    /// One codebook per link designed by `design` on that link's statistics (band 0).
    pub fn from_statistics(
        stats: &GainStatistics,
        mut design: impl FnMut(f64) -> Result<ScalarGainQuantizer>,
    ) -> Result<Self> {
        let k = stats.k();
        let mut books = Vec::with_capacity(k * k);
        for tx in 0..k {
            for rx in 0..k {
                books.push(design(stats.mean(tx, rx, 0))?);
            }
        }
        Self::new(k, books)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_bits(&self) -> u32 {
        self.books[0].n_bits()
    }

    pub fn get(&self, tx: usize, rx: usize) -> &ScalarGainQuantizer {
        &self.books[tx * self.k + rx]
    }
}

/// Labels of the `K` gains into receiver `rx` (one per transmitter).
pub fn quantize_column(column: &[f64], codebooks: &LinkCodebooks, rx: usize) -> Vec<usize> {
    column.iter().enumerate().map(|(tx, &g)| codebooks.get(tx, rx).index_of(g)).collect()
}

/// Per-slot transmit power of `tx` carrying `labels`.
pub fn modulate(labels: &[usize], alphabet: &PowerAlphabet, schedule: &ExchangeSchedule, tx: usize) -> Result<Vec<f64>> {
    if labels.len() != schedule.k {
        return Err(Error::DimensionMismatch { what: "labels", expected: schedule.k, found: labels.len() });
    }
    if alphabet.size() != 1 << schedule.bits_per_symbol {
        return Err(Error::Schedule(alloc::format!("alphabet has {} levels, schedule expects {}", alphabet.size(), 1usize << schedule.bits_per_symbol)));
    }
    let symbols = labels_to_symbols(labels, schedule.n_bits, schedule.bits_per_symbol);
    let mut powers = vec![0.0; schedule.t_ii()];
    for (index, &s) in symbols.iter().enumerate() {
        powers[schedule.slot_of(tx, index)] = alphabet.level(s);
    }
    Ok(powers)
}

/// Quantize the local column of `tx` and modulate it.
pub fn encode_powers(
    local: &[f64],
    codebooks: &LinkCodebooks,
    alphabet: &PowerAlphabet,
    schedule: &ExchangeSchedule,
    tx: usize,
) -> Result<Vec<f64>> {
    if local.len() != codebooks.k() {
        return Err(Error::DimensionMismatch { what: "local estimate", expected: codebooks.k(), found: local.len() });
    }
    modulate(&quantize_column(local, codebooks, tx), alphabet, schedule, tx)
}

/// Most likely symbols of the transmitters in `others` for one slot.
///
/// `column` is the observer's estimate of the gains into its receiver
/// (indexed by transmitter), `own_power` its own transmit power in the slot
/// and `rssi` the dequantized feedback. Candidates are scanned in
/// lexicographic order and only strict improvements replace the incumbent,
/// so ties resolve to the lowest candidate.
pub fn decode_slot(
    observer: usize,
    column: &[f64],
    own_power: f64,
    rssi: f64,
    others: &[usize],
    alphabet: &PowerAlphabet,
    sigma2: f64,
) -> Result<Vec<usize>> {
    let l = alphabet.size();
    let a = others.len();
    let space = math::pow(l as f64, a as f64);
    if space > DECODE_BUDGET {
        return Err(Error::BudgetExceeded { what: "power decoding", required: space, limit: DECODE_BUDGET });
    }
    let target = rssi - own_power * column[observer] - sigma2;
    let gains: Vec<f64> = others.iter().map(|&j| column[j]).collect();
    let mut digits = vec![0usize; a];
    let mut best = digits.clone();
    let mut best_err = f64::INFINITY;
    loop {
        let predicted: f64 = digits.iter().zip(&gains).map(|(&d, g)| alphabet.level(d) * g).sum();
        let err = (predicted - target).abs();
        if err < best_err {
            best_err = err;
            best.copy_from_slice(&digits);
        }
        // last digit fastest gives lexicographic order
        let mut pos = a;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < l {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Decoded symbol streams of every other transmitter, `[tx][symbol index]`;
/// the observer's own entry is empty.
pub fn decode_powers(
    observer: usize,
    column: &[f64],
    own_powers: &[f64],
    rssi: &[f64],
    alphabet: &PowerAlphabet,
    schedule: &ExchangeSchedule,
    sigma2: f64,
) -> Result<Vec<Vec<usize>>> {
    let t_ii = schedule.t_ii();
    if own_powers.len() != t_ii || rssi.len() != t_ii {
        return Err(Error::DimensionMismatch { what: "exchange slots", expected: t_ii, found: rssi.len().min(own_powers.len()) });
    }
    let k = schedule.k;
    let mut out: Vec<Vec<usize>> =
        (0..k).map(|j| if j == observer { Vec::new() } else { vec![0; schedule.symbols_per_tx] }).collect();
    for slot in 0..t_ii {
        let active: Vec<(usize, usize)> = schedule.active(slot).into_iter().filter(|&(j, _)| j != observer).collect();
        if active.is_empty() {
            continue;
        }
        let others: Vec<usize> = active.iter().map(|&(j, _)| j).collect();
        let symbols = decode_slot(observer, column, own_powers[slot], rssi[slot], &others, alphabet, sigma2)?;
        for (&(j, index), s) in active.iter().zip(symbols) {
            out[j][index] = s;
        }
    }
    Ok(out)
}

/// Every transmitter's estimate of the full gain matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedCsi {
    views: Vec<ChannelState>,
}

impl DistributedCsi {
    pub fn new(views: Vec<ChannelState>) -> Result<Self> {
        let k = views.len();
        if k == 0 || views.iter().any(|v| v.k() != k || v.bands() != views[0].bands()) {
            return Err(Error::invalid("distributed CSI needs one K×K view per transmitter"));
        }
        Ok(DistributedCsi { views })
    }

    /// Every transmitter knows `state` exactly.
    pub fn perfect(state: &ChannelState) -> Self {
        DistributedCsi { views: vec![state.clone(); state.k()] }
    }

    pub fn k(&self) -> usize {
        self.views.len()
    }

    pub fn view(&self, tx: usize) -> &ChannelState {
        &self.views[tx]
    }

    pub fn views(&self) -> &[ChannelState] {
        &self.views
    }
}

/// Build one band of `G̃^j` for every observer `j`.
///
/// `local[j]` is transmitter `j`'s own column (kept exactly) and
/// `decoded[j][i]` the labels observer `j` recovered from transmitter `i`.
pub fn assemble_band(
    views: &mut [ChannelState],
    band: usize,
    local: &[Vec<f64>],
    decoded: &[Vec<Vec<usize>>],
    codebooks: &LinkCodebooks,
) -> Result<()> {
    let k = codebooks.k();
    for (j, view) in views.iter_mut().enumerate() {
        for rx in 0..k {
            for tx in 0..k {
                let value = if rx == j {
                    local[j][tx]
                } else {
                    let labels = &decoded[j][rx];
                    if labels.len() != k {
                        return Err(Error::DimensionMismatch { what: "decoded labels", expected: k, found: labels.len() });
                    }
                    codebooks.get(tx, rx).representative(labels[tx])
                };
                view.set(tx, rx, band, value);
            }
        }
    }
    Ok(())
}

/// Single-band convenience wrapper over [`assemble_band`].
pub fn assemble_distributed_csi(
    local: &[Vec<f64>],
    decoded: &[Vec<Vec<usize>>],
    codebooks: &LinkCodebooks,
) -> Result<DistributedCsi> {
    let k = codebooks.k();
    if local.len() != k || decoded.len() != k {
        return Err(Error::DimensionMismatch { what: "transmitters", expected: k, found: local.len() });
    }
    let mut views = vec![ChannelState::zeros(k, 1); k];
    assemble_band(&mut views, 0, local, decoded, codebooks)?;
    DistributedCsi::new(views)
}

/// The parts of an exchange shared by all transmitters.
#[derive(Debug, Clone, PartialEq)]
pub struct Exchange {
    pub alphabet: PowerAlphabet,
    pub schedule: ExchangeSchedule,
    pub codebooks: LinkCodebooks,
}

impl Exchange {
    pub fn new(alphabet: PowerAlphabet, schedule: ExchangeSchedule, codebooks: LinkCodebooks) -> Result<Self> {
        if alphabet.size() != 1 << schedule.bits_per_symbol() {
            return Err(Error::Schedule(alloc::format!(
                "alphabet has {} levels but the schedule sends {}-bit symbols",
                alphabet.size(),
                schedule.bits_per_symbol()
            )));
        }
        if codebooks.k() != schedule.k() || codebooks.n_bits() != schedule.n_bits() {
            return Err(Error::Schedule("codebooks do not match the schedule".into()));
        }
        Ok(Exchange { alphabet, schedule, codebooks })
    }
}

/// Feedback path seen by every receiver during the exchange.
#[derive(Debug, Clone, Copy)]
pub struct FeedbackLink<'a> {
    pub q: &'a RsQuantizer,
    pub dmc: &'a Dmc,
    pub sigma2: f64,
}

/// Send `labels[j]` from every transmitter over one band and let every
/// observer decode the others. Returns `[observer][sender]` labels (own
/// entry empty) and the number of wrongly decoded symbols.
#[allow(clippy::too_many_arguments)]
pub fn transmit_labels<R: Rng + ?Sized>(
    state: &ChannelState,
    band: usize,
    labels: &[Vec<usize>],
    columns: &[Vec<f64>],
    exchange: &Exchange,
    fb: &FeedbackLink<'_>,
    rng: &mut R,
) -> Result<(Vec<Vec<Vec<usize>>>, usize)> {
    let k = exchange.schedule.k();
    let t_ii = exchange.schedule.t_ii();
    let powers: Vec<Vec<f64>> = (0..k)
        .map(|j| modulate(&labels[j], &exchange.alphabet, &exchange.schedule, j))
        .collect::<Result<_>>()?;
    // rssi[i][t]
    let mut rssi = vec![vec![0.0; t_ii]; k];
    for t in 0..t_ii {
        for (i, r) in rssi.iter_mut().enumerate() {
            let omega: f64 = (0..k).map(|j| state.g(j, i, band) * powers[j][t]).sum::<f64>() + fb.sigma2;
            let sent = fb.q.quantize_saturating(omega);
            r[t] = fb.q.level_linear(fb.dmc.sample(sent, rng));
        }
    }
    let b = exchange.schedule.bits_per_symbol();
    let n_bits = exchange.schedule.n_bits();
    let sent_symbols: Vec<Vec<usize>> = labels.iter().map(|l| labels_to_symbols(l, n_bits, b)).collect();
    let mut errors = 0;
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let symbols =
            decode_powers(i, &columns[i], &powers[i], &rssi[i], &exchange.alphabet, &exchange.schedule, fb.sigma2)?;
        let mut per_sender = Vec::with_capacity(k);
        for (j, s) in symbols.iter().enumerate() {
            if j == i {
                per_sender.push(Vec::new());
                continue;
            }
            errors += s.iter().zip(&sent_symbols[j]).filter(|(a, b)| a != b).count();
            per_sender.push(symbols_to_labels(s, k, n_bits, b)?);
        }
        out.push(per_sender);
    }
    Ok((out, errors))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeOutcome {
    pub csi: DistributedCsi,
    pub symbol_errors: usize,
    pub symbols_sent: usize,
}

/// Run the exchange on every band of `state`.
///
/// `local[j][band]` is transmitter `j`'s (clamped) estimate of the gains into
/// its receiver. With `perfect` set, labels arrive without decoding errors
/// and only the codebook quantization remains.
pub fn simulate_exchange<R: Rng + ?Sized>(
    state: &ChannelState,
    local: &[Vec<Vec<f64>>],
    exchange: &Exchange,
    fb: &FeedbackLink<'_>,
    perfect: bool,
    rng: &mut R,
) -> Result<ExchangeOutcome> {
    let k = state.k();
    if local.len() != k || exchange.schedule.k() != k {
        return Err(Error::DimensionMismatch { what: "transmitters", expected: k, found: local.len() });
    }
    let mut views = vec![ChannelState::zeros(k, state.bands()); k];
    let mut symbol_errors = 0;
    let symbols_sent = state.bands() * k * (k - 1) * exchange.schedule.symbols_per_tx();
    for band in 0..state.bands() {
        let columns: Vec<Vec<f64>> = local.iter().map(|l| l[band].clone()).collect();
        let labels: Vec<Vec<usize>> =
            columns.iter().enumerate().map(|(j, c)| quantize_column(c, &exchange.codebooks, j)).collect();
        let decoded = if perfect || k == 1 {
            (0..k)
                .map(|i| (0..k).map(|j| if i == j { Vec::new() } else { labels[j].clone() }).collect())
                .collect()
        } else {
            let (decoded, errors) = transmit_labels(state, band, &labels, &columns, exchange, fb, rng)?;
            symbol_errors += errors;
            decoded
        };
        assemble_band(&mut views, band, &columns, &decoded, &exchange.codebooks)?;
    }
    Ok(ExchangeOutcome { csi: DistributedCsi::new(views)?, symbol_errors, symbols_sent })
}

/// Label transition frequencies of the whole exchange chain, by simulation.
///
/// In each run a random sender transmits label `n` at a random position of
/// its label block while every other label in the network is drawn
/// uniformly; channels are drawn from `stats` and the next transmitter
/// decodes with perfect local knowledge.
pub fn estimate_pi_empirical<R: Rng + ?Sized>(
    exchange: &Exchange,
    stats: &GainStatistics,
    fb: &FeedbackLink<'_>,
    n_trials: usize,
    rng: &mut R,
) -> Result<RepTransitionMatrix> {
    if n_trials < 1 {
        return Err(Error::invalid("at least one trial per label is required"));
    }
    let k = exchange.schedule.k();
    let r = 1usize << exchange.schedule.n_bits();
    if k < 2 {
        return Ok(RepTransitionMatrix::identity(r));
    }
    let mut counts = vec![vec![0u64; r]; r];
    for (n, row) in counts.iter_mut().enumerate() {
        for _ in 0..n_trials {
            let state = crate::model::sample_channel(stats, rng);
            let mut labels: Vec<Vec<usize>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..r)).collect()).collect();
            let sender = rng.gen_range(0..k);
            let position = rng.gen_range(0..k);
            labels[sender][position] = n;
            let columns: Vec<Vec<f64>> = (0..k).map(|i| state.column(i, 0)).collect();
            let (decoded, _) = transmit_labels(&state, 0, &labels, &columns, exchange, fb, rng)?;
            let observer = (sender + 1) % k;
            row[decoded[observer][sender][position]] += 1;
        }
    }
    RepTransitionMatrix::from_counts(&counts)
}
