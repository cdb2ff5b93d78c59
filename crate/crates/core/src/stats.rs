//! Rank correlation and bootstrap significance testing.
//!
//! Kendall τ-b uses the merge-sort formulation (O(n log n)); the O(n²) pair
//! counter lives in the test suite as its oracle. The paired bootstrap draws
//! resample index lists from a ChaCha12 stream seeded with a user seed
//! (`index = next_u64() mod n`), so results are reproducible across platforms
//! and runs.

use rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bleu::{bleu_from_stats, BleuStats, MAX_ORDER};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Kendall τ-b between two equal-length vectors.
///
/// Returns `None` when every value on either side is tied (zero variance,
/// the coefficient is undefined). Formula: `(C − D) / √((C+D+Tx)(C+D+Ty))`
/// with `Tx`/`Ty` counting pairs tied only on x / only on y.
pub fn kendall_tau_b<F: Scalar>(xs: &[F], ys: &[F]) -> Result<Option<F>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewItems { need: 2, got: n });
    }
    for (i, v) in xs.iter().chain(ys.iter()).enumerate() {
        if v.is_nan() {
            return Err(Error::NonFinite(i % n));
        }
    }

    let mut pairs: Vec<(F, F)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });

    // Tied pairs within x-runs, and within (x, y)-runs.
    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    let mut run_x = 1u64;
    let mut run_xy = 1u64;
    for i in 1..n {
        if pairs[i].0 == pairs[i - 1].0 {
            run_x += 1;
            if pairs[i].1 == pairs[i - 1].1 {
                run_xy += 1;
            } else {
                tied_xy += run_xy * (run_xy - 1) / 2;
                run_xy = 1;
            }
        } else {
            tied_x += run_x * (run_x - 1) / 2;
            run_x = 1;
            tied_xy += run_xy * (run_xy - 1) / 2;
            run_xy = 1;
        }
    }
    tied_x += run_x * (run_x - 1) / 2;
    tied_xy += run_xy * (run_xy - 1) / 2;

    // Discordant pairs = swaps performed while merge-sorting y.
    let swaps = merge_sort_count_swaps(&mut pairs);

    let mut tied_y = 0u64;
    let mut run_y = 1u64;
    for i in 1..n {
        if pairs[i].1 == pairs[i - 1].1 {
            run_y += 1;
        } else {
            tied_y += run_y * (run_y - 1) / 2;
            run_y = 1;
        }
    }
    tied_y += run_y * (run_y - 1) / 2;

    let total = (n as u64) * (n as u64 - 1) / 2;
    if tied_x == total || tied_y == total {
        return Ok(None);
    }
    let discordant = swaps as i128;
    let concordant =
        total as i128 - tied_x as i128 - tied_y as i128 + tied_xy as i128 - discordant;
    let numerator = F::from_f64((concordant - discordant) as f64);
    let denom_x = F::from_f64((total - tied_x) as f64);
    let denom_y = F::from_f64((total - tied_y) as f64);
    Ok(Some(numerator / (denom_x * denom_y).sqrt()))
}

/// Sorts `pairs` by y (stable) and returns the number of adjacent
/// transpositions an insertion sort would have performed.
fn merge_sort_count_swaps<F: Scalar>(pairs: &mut [(F, F)]) -> u64 {
    let n = pairs.len();
    let mut buf = pairs.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid || j < end {
                if i < mid && (j >= end || pairs[i].1 <= pairs[j].1) {
                    buf[k] = pairs[i];
                    i += 1;
                } else {
                    swaps += (mid - i) as u64;
                    buf[k] = pairs[j];
                    j += 1;
                }
                k += 1;
            }
            start = end;
        }
        pairs.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// Corpus-aggregation rule applied per bootstrap resample. Each item is a
/// fixed-arity vector of per-utterance sufficient statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregator {
    /// Arity 1: mean of the value.
    Mean,
    /// Arity 2: Σ numerator / Σ denominator.
    RatioOfSums,
    /// Arity 2: 1 − Σ numerator / Σ denominator.
    OneMinusRatioOfSums,
    /// Arity 4: ½(Σa/Σb + Σc/Σd), the bidirectional corpus rule of the
    /// lexical consistency metric.
    BidirectionalRatio,
    /// Arity 10: corpus BLEU from per-segment n-gram statistics
    /// (matches 1..4, totals 1..4, hyp_len, ref_len).
    Bleu,
}

impl Aggregator {
    pub fn parse(tag: &str) -> Result<Aggregator> {
        match tag {
            "mean" => Ok(Aggregator::Mean),
            "ratio" => Ok(Aggregator::RatioOfSums),
            "one_minus_ratio" => Ok(Aggregator::OneMinusRatioOfSums),
            "bidirectional_ratio" => Ok(Aggregator::BidirectionalRatio),
            "bleu" => Ok(Aggregator::Bleu),
            other => Err(Error::UnknownAggregator(other.to_owned())),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::RatioOfSums => "ratio",
            Aggregator::OneMinusRatioOfSums => "one_minus_ratio",
            Aggregator::BidirectionalRatio => "bidirectional_ratio",
            Aggregator::Bleu => "bleu",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Aggregator::Mean => 1,
            Aggregator::RatioOfSums | Aggregator::OneMinusRatioOfSums => 2,
            Aggregator::BidirectionalRatio => 4,
            Aggregator::Bleu => 2 * MAX_ORDER + 2,
        }
    }

    /// Aggregates the items selected by `indices` (with multiplicity).
    pub fn apply<F: Scalar>(&self, items: &[Vec<F>], indices: &[u32]) -> F {
        let mut sums = vec![F::zero(); self.arity()];
        for &idx in indices {
            for (s, v) in sums.iter_mut().zip(&items[idx as usize]) {
                *s += *v;
            }
        }
        let count = F::from_count(indices.len());
        match self {
            Aggregator::Mean => sums[0] / count,
            Aggregator::RatioOfSums => sums[0] / sums[1],
            Aggregator::OneMinusRatioOfSums => F::one() - sums[0] / sums[1],
            Aggregator::BidirectionalRatio => {
                F::from_f64(0.5) * (sums[0] / sums[1] + sums[2] / sums[3])
            }
            Aggregator::Bleu => {
                let mut stats = BleuStats::default();
                for k in 0..MAX_ORDER {
                    stats.matches[k] = sums[k].to_f64().unwrap().round() as usize;
                    stats.totals[k] = sums[MAX_ORDER + k].to_f64().unwrap().round() as usize;
                }
                stats.hyp_len = sums[2 * MAX_ORDER].to_f64().unwrap().round() as usize;
                stats.ref_len = sums[2 * MAX_ORDER + 1].to_f64().unwrap().round() as usize;
                bleu_from_stats(&stats)
            }
        }
    }
}

/// Whether smaller or larger aggregate values are better for a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricDirection {
    LowerIsBetter,
    HigherIsBetter,
}

/// Outcome of a paired bootstrap comparison of two systems.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceResult<F> {
    pub metric_name: String,
    /// Full-corpus aggregate difference, A − B.
    pub delta: F,
    /// Two-sided empirical p-value: 2·min(wins_a, wins_b)/samples, clamped
    /// to [0, 1].
    pub p_value: F,
    /// Identifies the p-value convention above.
    pub p_convention: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
}

/// Deterministic resample index lists: `samples` lists of `n` draws with
/// replacement from `0..n`, taken sequentially from a ChaCha12 stream.
pub fn bootstrap_indices(seed: u64, samples: usize, n: usize) -> Vec<Vec<u32>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            (0..n)
                .map(|_| (rng.next_u64() % n as u64) as u32)
                .collect()
        })
        .collect()
}

/// Paired bootstrap resampling: both systems are evaluated on the same
/// resampled utterance multiset, and wins are tallied per resample.
pub fn paired_bootstrap<F: Scalar>(
    metric_name: &str,
    per_utt_a: &[Vec<F>],
    per_utt_b: &[Vec<F>],
    aggregator: Aggregator,
    direction: MetricDirection,
    samples: usize,
    seed: u64,
) -> Result<SignificanceResult<F>> {
    if per_utt_a.len() != per_utt_b.len() {
        return Err(Error::LengthMismatch {
            left: per_utt_a.len(),
            right: per_utt_b.len(),
        });
    }
    let n = per_utt_a.len();
    if n < 2 {
        return Err(Error::TooFewItems { need: 2, got: n });
    }
    if samples < 100 {
        return Err(Error::TooFewResamples {
            need: 100,
            got: samples,
        });
    }
    for row in per_utt_a.iter().chain(per_utt_b) {
        if row.len() != aggregator.arity() {
            return Err(Error::BadStatArity {
                tag: aggregator.tag(),
                expected: aggregator.arity(),
                got: row.len(),
            });
        }
    }
    let indices = bootstrap_indices(seed, samples, n);
    paired_bootstrap_with_indices(
        metric_name,
        per_utt_a,
        per_utt_b,
        aggregator,
        direction,
        &indices,
        seed,
    )
}

/// Bootstrap evaluation over caller-provided index lists. Exposed for
/// permutation-invariance checks and custom resampling schemes.
pub fn paired_bootstrap_with_indices<F: Scalar>(
    metric_name: &str,
    per_utt_a: &[Vec<F>],
    per_utt_b: &[Vec<F>],
    aggregator: Aggregator,
    direction: MetricDirection,
    indices: &[Vec<u32>],
    seed: u64,
) -> Result<SignificanceResult<F>> {
    let n = per_utt_a.len();
    let full: Vec<u32> = (0..n as u32).collect();
    let delta = aggregator.apply(per_utt_a, &full) - aggregator.apply(per_utt_b, &full);

    let mut wins_a = 0;
    let mut wins_b = 0;
    let mut ties = 0;
    for resample in indices {
        let agg_a = aggregator.apply(per_utt_a, resample);
        let agg_b = aggregator.apply(per_utt_b, resample);
        let ordering = match direction {
            MetricDirection::HigherIsBetter => agg_a.partial_cmp(&agg_b),
            MetricDirection::LowerIsBetter => agg_b.partial_cmp(&agg_a),
        };
        match ordering {
            Some(std::cmp::Ordering::Greater) => wins_a += 1,
            Some(std::cmp::Ordering::Less) => wins_b += 1,
            _ => ties += 1,
        }
    }
    let samples = indices.len();
    let p = 2.0 * wins_a.min(wins_b) as f64 / samples as f64;
    Ok(SignificanceResult {
        metric_name: metric_name.to_owned(),
        delta,
        p_value: F::from_f64(p.min(1.0)),
        p_convention: "two_sided_2min_over_samples",
        samples,
        seed,
        wins_a,
        wins_b,
        ties,
    })
}
