use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

/// What to do with the duplicated spans of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Strategy {
    /// Remove the spans; drop the document if too little text remains.
    #[default]
    Cut,
    /// Keep the text and report the spans as a loss mask; drop the document
    /// if too little text stays unmasked.
    Mask,
    /// Drop the document when the duplicated share exceeds a threshold.
    DropPartial,
    /// Drop the document when it has any duplicated span.
    DropAny,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Cut, Strategy::Mask, Strategy::DropPartial, Strategy::DropAny];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Cut => "cut",
            Strategy::Mask => "mask",
            Strategy::DropPartial => "drop-partial",
            Strategy::DropAny => "drop-any",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStrategy(pub String);

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown strategy {:?} (expected cut, mask, drop-partial or drop-any)", self.0)
    }
}

impl core::error::Error for UnknownStrategy {}

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| UnknownStrategy(String::from(s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategyConfig {
    pub strategy: Strategy,
    /// Characters that must survive `Cut` or stay unmasked under `Mask`.
    pub min_remaining_chars: usize,
    /// Largest duplicated share of characters `DropPartial` tolerates.
    pub drop_partial_threshold: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self { strategy: Strategy::Cut, min_remaining_chars: 20, drop_partial_threshold: 0.20 }
    }
}

impl StrategyConfig {
    pub fn new(strategy: Strategy) -> Self {
        Self { strategy, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyOutcome {
    /// `loss_mask` holds byte spans of `content` and is only filled by
    /// `Mask`.
    Kept { content: String, loss_mask: Vec<Range<usize>> },
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanError {
    /// Spans must be non-empty, sorted, non-overlapping, on character
    /// boundaries and inside the document.
    InvalidSpans { index: usize },
}

impl fmt::Display for SpanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpanError::InvalidSpans { index } => write!(f, "span {index} is empty, out of order or out of bounds"),
        }
    }
}

impl core::error::Error for SpanError {}

fn validate(content: &str, spans: &[Range<usize>]) -> Result<(), SpanError> {
    let mut prev_end = 0;
    for (index, s) in spans.iter().enumerate() {
        let ok = s.start < s.end
            && s.start >= prev_end
            && s.end <= content.len()
            && content.is_char_boundary(s.start)
            && content.is_char_boundary(s.end);
        if !ok {
            return Err(SpanError::InvalidSpans { index });
        }
        prev_end = s.end;
    }
    Ok(())
}

/// Applies the configured strategy to one document given its duplicated
/// byte spans. Character thresholds count Unicode scalar values.
pub fn apply_strategy(
    content: &str,
    spans: &[Range<usize>],
    config: &StrategyConfig,
) -> Result<StrategyOutcome, SpanError> {
    validate(content, spans)?;
    if spans.is_empty() {
        return Ok(StrategyOutcome::Kept { content: String::from(content), loss_mask: Vec::new() });
    }
    let total = content.chars().count();
    let dup: usize = spans.iter().map(|s| content[s.clone()].chars().count()).sum();
    let remaining = total - dup;
    let outcome = match config.strategy {
        Strategy::Cut => {
            if remaining < config.min_remaining_chars {
                StrategyOutcome::Dropped
            } else {
                let mut out = String::with_capacity(content.len());
                let mut at = 0;
                for s in spans {
                    out.push_str(&content[at..s.start]);
                    at = s.end;
                }
                out.push_str(&content[at..]);
                StrategyOutcome::Kept { content: out, loss_mask: Vec::new() }
            }
        }
        Strategy::Mask => {
            if remaining < config.min_remaining_chars {
                StrategyOutcome::Dropped
            } else {
                StrategyOutcome::Kept { content: String::from(content), loss_mask: spans.to_vec() }
            }
        }
        Strategy::DropPartial => {
            if dup as f64 / total as f64 > config.drop_partial_threshold {
                StrategyOutcome::Dropped
            } else {
                StrategyOutcome::Kept { content: String::from(content), loss_mask: Vec::new() }
            }
        }
        Strategy::DropAny => StrategyOutcome::Dropped,
    };
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn doc(n: usize) -> String {
        "abcdefghij".chars().cycle().take(n).collect()
    }

    fn run(strategy: Strategy, content: &str, spans: &[Range<usize>]) -> StrategyOutcome {
        apply_strategy(content, spans, &StrategyConfig::new(strategy)).unwrap()
    }

    #[test]
    fn threshold_edges() {
        let d = doc(100);
        assert_eq!(run(Strategy::Cut, &d, &[5..95]), StrategyOutcome::Dropped);
        assert_eq!(run(Strategy::DropPartial, &d, &[0..25]), StrategyOutcome::Dropped);
        assert!(matches!(run(Strategy::DropPartial, &d, &[0..20]), StrategyOutcome::Kept { .. }));
        assert!(matches!(run(Strategy::Cut, &d, &[0..80]), StrategyOutcome::Kept { .. }));
        assert_eq!(run(Strategy::Cut, &d, &[0..81]), StrategyOutcome::Dropped);
    }

    #[test]
    fn no_spans_is_identity() {
        for s in Strategy::ALL {
            for d in ["", "short", &doc(100)] {
                assert_eq!(run(s, d, &[]), StrategyOutcome::Kept { content: d.into(), loss_mask: vec![] });
            }
        }
    }

    #[test]
    fn cut_and_mask_shapes() {
        let d = doc(100);
        let spans = [10..20, 50..60];
        match run(Strategy::Cut, &d, &spans) {
            StrategyOutcome::Kept { content, .. } => {
                assert_eq!(content.len(), 80);
                assert_eq!(content, alloc::format!("{}{}{}", &d[..10], &d[20..50], &d[60..]));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            run(Strategy::Mask, &d, &spans),
            StrategyOutcome::Kept { content: d.clone(), loss_mask: spans.to_vec() }
        );
    }

    #[test]
    fn invalid_spans() {
        let d = doc(10);
        let cfg = StrategyConfig::default();
        assert_eq!(apply_strategy(&d, &[3..5, 4..6], &cfg), Err(SpanError::InvalidSpans { index: 1 }));
        assert_eq!(apply_strategy(&d, &[5..6, 1..2], &cfg), Err(SpanError::InvalidSpans { index: 1 }));
        assert_eq!(apply_strategy(&d, &[5..11], &cfg), Err(SpanError::InvalidSpans { index: 0 }));
        assert_eq!(apply_strategy(&d, &[5..5], &cfg), Err(SpanError::InvalidSpans { index: 0 }));
        assert_eq!(apply_strategy("é", &[0..1], &cfg), Err(SpanError::InvalidSpans { index: 0 }));
        assert!(apply_strategy(&d, &[3..5, 5..6], &cfg).is_ok());
    }

    #[test]
    fn parse_names() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("cutt".parse::<Strategy>().is_err());
    }
}
