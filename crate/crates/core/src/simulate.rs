//! Direct simulation of substitution systems.
//!
//! Realisations draw from a ChaCha8 stream keyed by the ensemble seed, with one
//! independent stream per run index. A run's draws therefore depend only on
//! `(seed, run)`, so ensembles give identical histograms however the runs are
//! scheduled.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::dist::CountDistribution;
use crate::entropy::sequence_entropy;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::params::RuleParams;

/// Two-symbol substitution rule. Position `t` of the word for symbol `s`
/// becomes a 1 with probability `word_s[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionRule {
    word0: Vec<f64>,
    word1: Vec<f64>,
}

impl SubstitutionRule {
    pub fn new(word0: Vec<f64>, word1: Vec<f64>) -> Result<Self> {
        if word0.is_empty() || word1.is_empty() {
            return Err(Error::invalid("replacement words must be non-empty"));
        }
        if word0.iter().chain(&word1).any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::invalid("fill probabilities must lie in [0, 1]"));
        }
        Ok(SubstitutionRule { word0, word1 })
    }

    /// `0 -> k zeros`, `1 -> k independent Bernoulli(p) symbols`.
    pub fn mandelbrot(params: RuleParams) -> Self {
        let k = params.k() as usize;
        SubstitutionRule {
            word0: vec![0.0; k],
            word1: vec![params.p(); k],
        }
    }

    /// A deterministic rule from two binary words.
    pub fn deterministic(word0: &[u8], word1: &[u8]) -> Result<Self> {
        let lift = |w: &[u8]| w.iter().map(|&b| if b != 0 { 1.0 } else { 0.0 }).collect();
        SubstitutionRule::new(lift(word0), lift(word1))
    }

    pub fn word(&self, symbol: u8) -> &[f64] {
        if symbol == 0 {
            &self.word0
        } else {
            &self.word1
        }
    }

    /// `Some(k)` when both words have length `k`.
    pub fn constant_length(&self) -> Option<usize> {
        (self.word0.len() == self.word1.len()).then_some(self.word0.len())
    }

    pub fn is_deterministic(&self) -> bool {
        self.word0
            .iter()
            .chain(&self.word1)
            .all(|&w| w == 0.0 || w == 1.0)
    }
}

/// Named rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `1 -> 101`, `0 -> 000`.
    Cantor,
    /// `0 -> 01`, `1 -> 10`.
    MorseThue,
    /// `0 -> 1`, `1 -> 10`.
    Fibonacci,
    /// The random rule with parameters `(k, p)`.
    Mandelbrot(RuleParams),
}

impl Preset {
    pub fn rule(&self) -> SubstitutionRule {
        match self {
            Preset::Cantor => SubstitutionRule::deterministic(&[0, 0, 0], &[1, 0, 1]),
            Preset::MorseThue => SubstitutionRule::deterministic(&[0, 1], &[1, 0]),
            Preset::Fibonacci => SubstitutionRule::deterministic(&[1], &[1, 0]),
            Preset::Mandelbrot(params) => Ok(SubstitutionRule::mandelbrot(*params)),
        }
        .expect("preset words are valid")
    }

    /// The seed symbol each sequence is conventionally grown from.
    pub fn seed_symbol(&self) -> u8 {
        match self {
            Preset::Cantor | Preset::Mandelbrot(_) => 1,
            Preset::MorseThue | Preset::Fibonacci => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Cantor => "cantor",
            Preset::MorseThue => "morse_thue",
            Preset::Fibonacci => "fibonacci",
            Preset::Mandelbrot(_) => "mandelbrot",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Mandelbrot(params) => write!(f, "mandelbrot:{}:{}", params.k(), params.p()),
            other => f.write_str(other.name()),
        }
    }
}

/// Accepts `cantor`, `morse_thue` (or `morse-thue`, `thue_morse`), `fibonacci`
/// and `mandelbrot:K:P`.
impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "cantor" => return Ok(Preset::Cantor),
            "morse_thue" | "morse-thue" | "thue_morse" | "thue-morse" => {
                return Ok(Preset::MorseThue)
            }
            "fibonacci" => return Ok(Preset::Fibonacci),
            _ => {}
        }
        let mut parts = lower.split(':');
        if parts.next() == Some("mandelbrot") {
            let k = parts.next().and_then(|v| v.parse::<u32>().ok());
            let p = parts.next().and_then(|v| v.parse::<f64>().ok());
            if let (Some(k), Some(p), None) = (k, p, parts.next()) {
                return Ok(Preset::Mandelbrot(RuleParams::new(k, p)?));
            }
            return Err(Error::invalid(
                "mandelbrot preset is written mandelbrot:K:P",
            ));
        }
        Err(Error::invalid(alloc::format!("unknown preset {s:?}")))
    }
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Result<SubstitutionRule> {
    Ok(name.parse::<Preset>()?.rule())
}

/// Default cap on the length of a materialised sequence.
pub const DEFAULT_LENGTH_CAP: usize = 1 << 24;

/// RNG for run `run` of the ensemble seeded with `rng_seed`.
pub fn run_rng(rng_seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(run);
    rng
}

/// Applies `rule` `i` times to the one-symbol sequence `(seed_symbol)`.
pub fn iterate_sequence(
    rule: &SubstitutionRule,
    seed_symbol: u8,
    i: u32,
    rng_seed: u64,
) -> Result<Vec<u8>> {
    iterate_sequence_with(
        rule,
        seed_symbol,
        i,
        &mut run_rng(rng_seed, 0),
        DEFAULT_LENGTH_CAP,
    )
}

pub fn iterate_sequence_with<R: Rng + ?Sized>(
    rule: &SubstitutionRule,
    seed_symbol: u8,
    i: u32,
    rng: &mut R,
    length_cap: usize,
) -> Result<Vec<u8>> {
    if seed_symbol > 1 {
        return Err(Error::invalid("seed symbol must be 0 or 1"));
    }
    let mut seq = vec![seed_symbol];
    for _ in 0..i {
        let ones = seq.iter().filter(|&&s| s == 1).count() as u128;
        let zeros = seq.len() as u128 - ones;
        let next_len = ones * rule.word1.len() as u128 + zeros * rule.word0.len() as u128;
        if next_len > length_cap as u128 {
            return Err(Error::ResourceLimit {
                required: next_len,
                cap: length_cap as u128,
            });
        }
        let mut next = Vec::with_capacity(next_len as usize);
        for &s in &seq {
            for &w in rule.word(s) {
                let bit = if w == 0.0 {
                    false
                } else if w == 1.0 {
                    true
                } else {
                    rng.random_bool(w)
                };
                next.push(bit as u8);
            }
        }
        seq = next;
    }
    Ok(seq)
}

/// Kronecker product of `v` with the generator `g`: `(v_1 g, v_2 g, …, v_m g)`.
pub fn kronecker_expand(generator: &[u8], v: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(generator.len() * v.len());
    for &x in v {
        out.extend(generator.iter().map(|&g| g * x));
    }
    out
}

/// How a realisation is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimulationMode {
    /// Track only the number of ones: `ones <- Bin(k · ones, p)` each iteration.
    #[default]
    CountOnly,
    /// Materialise the sequence and count its ones.
    FullSequence,
}

/// Number of ones after `i` iterations in run `run` of the ensemble.
pub fn realization_ones(
    params: RuleParams,
    i: u32,
    rng_seed: u64,
    run: u64,
    mode: SimulationMode,
) -> Result<u64> {
    let mut rng = run_rng(rng_seed, run);
    match mode {
        SimulationMode::CountOnly => {
            sequence_len(params.k(), i)?;
            let k = params.k() as u64;
            let mut ones = 1u64;
            for _ in 0..i {
                if ones == 0 {
                    break;
                }
                let draw = Binomial::new(k * ones, params.p())
                    .map_err(|_| Error::invalid("binomial parameters"))?;
                ones = draw.sample(&mut rng);
            }
            Ok(ones)
        }
        SimulationMode::FullSequence => {
            let rule = SubstitutionRule::mandelbrot(params);
            let seq = iterate_sequence_with(&rule, 1, i, &mut rng, DEFAULT_LENGTH_CAP)?;
            Ok(seq.iter().filter(|&&s| s == 1).count() as u64)
        }
    }
}

fn sequence_len(k: u32, i: u32) -> Result<u64> {
    (k as u64).checked_pow(i).ok_or(Error::ResourceLimit {
        required: u128::MAX,
        cap: u64::MAX as u128,
    })
}

/// Counts of the number of ones over an ensemble of realisations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleHistogram {
    pub iteration: u32,
    pub params: RuleParams,
    pub runs: u64,
    pub seed: u64,
    /// Number of ones -> number of realisations.
    pub counts: BTreeMap<u64, u64>,
}

impl EnsembleHistogram {
    pub fn empty(params: RuleParams, iteration: u32, seed: u64) -> Self {
        EnsembleHistogram {
            iteration,
            params,
            runs: 0,
            seed,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, ones: u64) {
        *self.counts.entry(ones).or_insert(0) += 1;
        self.runs += 1;
    }

    /// Adds another histogram of the same ensemble. Order does not matter.
    pub fn merge(&mut self, other: &EnsembleHistogram) -> Result<()> {
        if other.iteration != self.iteration
            || other.params != self.params
            || other.seed != self.seed
        {
            return Err(Error::invalid("histograms come from different ensembles"));
        }
        for (&x, &c) in &other.counts {
            *self.counts.entry(x).or_insert(0) += c;
        }
        self.runs += other.runs;
        Ok(())
    }

    /// Sequence length `k^i`.
    pub fn sequence_len(&self) -> Result<u64> {
        sequence_len(self.params.k(), self.iteration)
    }

    /// Empirical probabilities over `0..=k^i`.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let n = self.sequence_len()?;
        if n >= crate::params::SupportCap::DEFAULT.0 as u64 {
            return Err(Error::ResourceLimit {
                required: n as u128 + 1,
                cap: crate::params::SupportCap::DEFAULT.0 as u128,
            });
        }
        let mut probs = vec![0.0; n as usize + 1];
        for (&x, &c) in &self.counts {
            probs[x as usize] = c as f64 / self.runs as f64;
        }
        Ok(probs)
    }

    /// Total-variation distance to an exact distribution.
    pub fn tv_distance(&self, exact: &CountDistribution) -> Result<f64> {
        Ok(exact.tv_distance(&self.probabilities()?))
    }
}

/// `runs` realisations of the random rule in count-only mode.
pub fn ensemble_counts(
    params: RuleParams,
    i: u32,
    runs: u64,
    rng_seed: u64,
) -> Result<EnsembleHistogram> {
    ensemble_counts_with(params, i, runs, rng_seed, SimulationMode::CountOnly)
}

pub fn ensemble_counts_with(
    params: RuleParams,
    i: u32,
    runs: u64,
    rng_seed: u64,
    mode: SimulationMode,
) -> Result<EnsembleHistogram> {
    ensemble_range(params, i, 0..runs, rng_seed, mode)
}

/// Histogram over the runs `range` only; merging the histograms of a partition
/// of `0..runs` reproduces [`ensemble_counts_with`].
pub fn ensemble_range(
    params: RuleParams,
    i: u32,
    range: core::ops::Range<u64>,
    rng_seed: u64,
    mode: SimulationMode,
) -> Result<EnsembleHistogram> {
    if range.is_empty() && range.start == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    let mut hist = EnsembleHistogram::empty(params, i, rng_seed);
    for run in range {
        hist.record(realization_ones(params, i, rng_seed, run, mode)?);
    }
    Ok(hist)
}

/// Sample statistics of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalStats {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Average frequency entropy of the realisations.
    pub mean_entropy: f64,
}

pub fn empirical_stats(hist: &EnsembleHistogram) -> Result<EmpiricalStats> {
    if hist.runs < 2 {
        return Err(Error::invalid("need at least 2 runs for sample statistics"));
    }
    let n = hist.sequence_len()?;
    let runs = hist.runs as f64;
    let mut s1 = CompensatedSum::new();
    let mut s_h = CompensatedSum::new();
    for (&x, &c) in &hist.counts {
        s1.add(x as f64 * c as f64);
        s_h.add(sequence_entropy(x, n)? * c as f64);
    }
    let mean = s1.value() / runs;
    let mut ss = CompensatedSum::new();
    for (&x, &c) in &hist.counts {
        let d = x as f64 - mean;
        ss.add(d * d * c as f64);
    }
    Ok(EmpiricalStats {
        mean,
        variance: ss.value() / (runs - 1.0),
        mean_entropy: s_h.value() / runs,
    })
}

/// Renders a binary sequence as `(1,0,1)`.
pub fn format_sequence(seq: &[u8]) -> String {
    let mut s = String::with_capacity(2 * seq.len() + 2);
    s.push('(');
    for (idx, b) in seq.iter().enumerate() {
        if idx > 0 {
            s.push(',');
        }
        s.push(if *b == 0 { '0' } else { '1' });
    }
    s.push(')');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, p: f64) -> RuleParams {
        RuleParams::new(k, p).unwrap()
    }

    const CANTOR3: [u8; 27] = [
        1, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 1,
    ];

    #[test]
    fn cantor_steps() {
        let rule = preset("cantor").unwrap();
        assert_eq!(iterate_sequence(&rule, 1, 1, 0).unwrap(), vec![1, 0, 1]);
        assert_eq!(
            iterate_sequence(&rule, 1, 2, 0).unwrap(),
            vec![1, 0, 1, 0, 0, 0, 1, 0, 1]
        );
        assert_eq!(iterate_sequence(&rule, 1, 3, 0).unwrap(), CANTOR3.to_vec());
    }

    #[test]
    fn fibonacci_from_zero() {
        let rule = preset("fibonacci").unwrap();
        // Five applications of the map give the eight-symbol word; the sixth
        // gives thirteen.
        let seq = iterate_sequence(&rule, 0, 5, 0).unwrap();
        assert_eq!(seq, vec![1, 0, 1, 1, 0, 1, 0, 1]);
        assert_eq!(iterate_sequence(&rule, 0, 6, 0).unwrap().len(), 13);
        assert_eq!(format_sequence(&seq), "(1,0,1,1,0,1,0,1)");
        assert_eq!(seq.iter().filter(|&&b| b == 1).count(), 5);
        assert_eq!(rule.constant_length(), None);
    }

    #[test]
    fn morse_thue() {
        let rule = preset("morse_thue").unwrap();
        assert_eq!(
            iterate_sequence(&rule, 0, 3, 0).unwrap(),
            vec![0, 1, 1, 0, 1, 0, 0, 1]
        );
        for i in 0..10 {
            let a = iterate_sequence(&rule, 0, i, 0).unwrap();
            let b = iterate_sequence(&rule, 0, i + 1, 0).unwrap();
            let mut expect = a.clone();
            expect.extend(a.iter().map(|&x| 1 - x));
            assert_eq!(b, expect);
        }
    }

    #[test]
    fn kronecker() {
        let g = [1, 0, 1];
        assert_eq!(kronecker_expand(&g, &[1]), vec![1, 0, 1]);
        assert_eq!(
            kronecker_expand(&g, &[1, 0, 1]),
            vec![1, 0, 1, 0, 0, 0, 1, 0, 1]
        );
        assert_eq!(kronecker_expand(&[1, 1, 0, 1], &[0, 0]), vec![0; 8]);
        // Matches one deterministic step.
        let rule = preset("cantor").unwrap();
        let v2 = iterate_sequence(&rule, 1, 2, 0).unwrap();
        assert_eq!(kronecker_expand(&g, &v2), CANTOR3.to_vec());
    }

    #[test]
    fn mandelbrot_presets() {
        let all = iterate_sequence(&preset("mandelbrot:3:1").unwrap(), 1, 4, 9).unwrap();
        assert_eq!(all, vec![1; 81]);
        let dead = SubstitutionRule::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(iterate_sequence(&dead, 1, 5, 3).unwrap(), vec![0; 32]);
        let r = SubstitutionRule::mandelbrot(params(4, 0.3));
        for i in 0..6 {
            assert_eq!(iterate_sequence(&r, 1, i, 1).unwrap().len(), 4usize.pow(i));
        }
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("Cantor".parse::<Preset>().unwrap(), Preset::Cantor);
        assert_eq!("morse-thue".parse::<Preset>().unwrap(), Preset::MorseThue);
        assert!(matches!(
            "mandelbrot:2:0.9".parse::<Preset>().unwrap(),
            Preset::Mandelbrot(p) if p.k() == 2 && p.p() == 0.9
        ));
        assert!("mandelbrot:2".parse::<Preset>().is_err());
        assert!("mandelbrot:2:1.5".parse::<Preset>().is_err());
        assert!("koch".parse::<Preset>().is_err());
        let p = Preset::Mandelbrot(params(3, 0.25));
        assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
    }

    #[test]
    fn rule_validation() {
        assert!(SubstitutionRule::new(vec![], vec![1.0]).is_err());
        assert!(SubstitutionRule::new(vec![0.0], vec![1.2]).is_err());
        assert!(iterate_sequence(&preset("cantor").unwrap(), 2, 1, 0).is_err());
    }

    #[test]
    fn length_cap() {
        let rule = SubstitutionRule::mandelbrot(params(2, 1.0));
        let mut rng = run_rng(0, 0);
        assert!(matches!(
            iterate_sequence_with(&rule, 1, 5, &mut rng, 16),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn deterministic_ensembles() {
        let h = ensemble_counts(params(2, 1.0), 5, 100, 7).unwrap();
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.counts[&32], 100);
        let st = empirical_stats(&h).unwrap();
        assert_eq!(st.variance, 0.0);
        assert_eq!(st.mean, 32.0);
        assert!(ensemble_counts(params(2, 1.0), 5, 0, 7).is_err());
    }

    #[test]
    fn partition_merge_is_exact() {
        let pr = params(2, 0.8);
        let whole = ensemble_counts(pr, 6, 300, 11).unwrap();
        let mut a = ensemble_range(pr, 6, 200..300, 11, SimulationMode::CountOnly).unwrap();
        let b = ensemble_range(pr, 6, 0..77, 11, SimulationMode::CountOnly).unwrap();
        let c = ensemble_range(pr, 6, 77..200, 11, SimulationMode::CountOnly).unwrap();
        a.merge(&c).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a, whole);
        let other = ensemble_counts(pr, 6, 10, 12).unwrap();
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn same_seed_same_histogram() {
        let pr = params(3, 0.6);
        for mode in [SimulationMode::CountOnly, SimulationMode::FullSequence] {
            let a = ensemble_counts_with(pr, 4, 200, 5, mode).unwrap();
            let b = ensemble_counts_with(pr, 4, 200, 5, mode).unwrap();
            assert_eq!(a, b);
        }
    }
}
