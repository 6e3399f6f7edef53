//! Per-stage accounting and kept-rate computation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Document, token and byte counts entering and leaving one stage.
///
/// Token counts are only known once the deduplication tokenizer has run, so
/// earlier stages leave them empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageStats {
    pub stage: String,
    pub docs_in: u64,
    pub docs_out: u64,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub tokens_in: Option<u64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub tokens_out: Option<u64>,
    pub bytes_in: u64,
    pub bytes_out: u64,
}

impl StageStats {
    pub fn new(stage: impl Into<String>) -> Self {
        Self {
            stage: stage.into(),
            ..Self::default()
        }
    }

    pub fn rejected(&self) -> u64 {
        self.docs_in - self.docs_out
    }

    /// Sums counts from another worker's view of the same stage. Token counts
    /// stay `None` only if neither side has them.
    pub fn merge(&mut self, other: &StageStats) {
        debug_assert_eq!(self.stage, other.stage);
        self.docs_in += other.docs_in;
        self.docs_out += other.docs_out;
        self.tokens_in = add_opt(self.tokens_in, other.tokens_in);
        self.tokens_out = add_opt(self.tokens_out, other.tokens_out);
        self.bytes_in += other.bytes_in;
        self.bytes_out += other.bytes_out;
    }
}

fn add_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (None, None) => None,
        (a, b) => Some(a.unwrap_or(0) + b.unwrap_or(0)),
    }
}

/// An exact non-negative ratio. A zero denominator reads as rate 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeptRate {
    pub stage: String,
    pub step: Ratio,
    pub cumulative: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatsError {
    Empty,
    ChainBroken {
        stage: String,
        expected_in: u64,
        found_in: u64,
    },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::Empty => f.write_str("no stage statistics"),
            StatsError::ChainBroken {
                stage,
                expected_in,
                found_in,
            } => write!(
                f,
                "stage {stage} takes {found_in} documents but the previous stage emitted {expected_in}"
            ),
        }
    }
}

impl core::error::Error for StatsError {}

/// Step and cumulative document kept rates for a chain of stages.
///
/// The cumulative rate at stage `i` is `docs_out[i] / docs_in[0]`, which is
/// the telescoped product of the step rates when the stages chain.
pub fn kept_rates(stats: &[StageStats]) -> Result<Vec<KeptRate>, StatsError> {
    let first = stats.first().ok_or(StatsError::Empty)?;
    check_chain(stats)?;
    Ok(stats
        .iter()
        .map(|s| KeptRate {
            stage: s.stage.clone(),
            step: Ratio::new(s.docs_out, s.docs_in),
            cumulative: Ratio::new(s.docs_out, first.docs_in),
        })
        .collect())
}

pub fn check_chain(stats: &[StageStats]) -> Result<(), StatsError> {
    for pair in stats.windows(2) {
        if pair[1].docs_in != pair[0].docs_out {
            return Err(StatsError::ChainBroken {
                stage: pair[1].stage.clone(),
                expected_in: pair[0].docs_out,
                found_in: pair[1].docs_in,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stage(name: &str, docs_in: u64, docs_out: u64) -> StageStats {
        StageStats {
            stage: name.into(),
            docs_in,
            docs_out,
            ..StageStats::default()
        }
    }

    #[test]
    fn two_stage_rates() {
        let rates = kept_rates(&[stage("a", 100, 48), stage("b", 48, 23)]).unwrap();
        assert_eq!(rates[0].step.value(), 0.48);
        assert!((rates[1].step.value() - 23.0 / 48.0).abs() < 1e-15);
        assert_eq!(rates[0].cumulative.value(), 0.48);
        assert_eq!(rates[1].cumulative.value(), 0.23);
    }

    #[test]
    fn identity_stage() {
        let rates = kept_rates(&[stage("a", 10, 10)]).unwrap();
        assert_eq!(rates[0].step.value(), 1.0);
        assert_eq!(rates[0].cumulative.value(), 1.0);
    }

    #[test]
    fn halving_chain() {
        let rates = kept_rates(&[stage("a", 1000, 500), stage("b", 500, 250), stage("c", 250, 125)])
            .unwrap();
        let cum: Vec<f64> = rates.iter().map(|r| r.cumulative.value()).collect();
        assert_eq!(cum, [0.5, 0.25, 0.125]);
    }

    #[test]
    fn broken_chain_and_empty() {
        assert_eq!(kept_rates(&[]), Err(StatsError::Empty));
        let err = kept_rates(&[stage("a", 10, 5), stage("b", 6, 1)]).unwrap_err();
        assert!(matches!(err, StatsError::ChainBroken { expected_in: 5, found_in: 6, .. }));
    }

    #[test]
    fn zero_over_zero_is_zero() {
        let rates = kept_rates(&[stage("a", 3, 0), stage("b", 0, 0)]).unwrap();
        assert_eq!(rates[1].step.value(), 0.0);
        assert_eq!(rates[1].cumulative.value(), 0.0);
    }

    #[test]
    fn merge_sums_counts() {
        let mut a = StageStats { tokens_in: Some(5), ..stage("x", 4, 3) };
        a.merge(&stage("x", 2, 2));
        assert_eq!((a.docs_in, a.docs_out, a.tokens_in), (6, 5, Some(5)));
    }

    proptest! {
        #[test]
        fn cumulative_is_product_of_steps(first in 1u64..1_000_000, cuts in prop::collection::vec(0.0f64..1.0, 1..12)) {
            let mut stats = Vec::new();
            let mut n = first;
            for (i, c) in cuts.iter().enumerate() {
                let out = (n as f64 * c) as u64;
                stats.push(stage(&alloc::format!("s{i}"), n, out));
                n = out;
            }
            let rates = kept_rates(&stats).unwrap();
            let product: f64 = rates.iter().map(|r| r.step.value()).product();
            let last = rates.last().unwrap().cumulative.value();
            prop_assert!((product - last).abs() <= 1e-12);
            prop_assert_eq!(last, n as f64 / first as f64);
        }
    }
}
