//! Character-trigram language identification and the target-language gate.
//!
//! The bundled [`TrigramClassifier`] is a small multinomial model trained on
//! a handful of sentences per language. It is meant for tests and offline
//! runs; larger models plug in through [`LanguageClassifier`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::document::{RejectReason, Verdict};

/// Minimum top-language score for a document to be kept.
pub const DEFAULT_THRESHOLD: f64 = 0.65;

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageScore {
    pub language: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LangError {
    EmptyText,
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangError::EmptyText => f.write_str("cannot classify empty text"),
        }
    }
}

impl core::error::Error for LangError {}

/// Ranked language scores, best first, summing to at most one.
pub trait LanguageClassifier {
    fn classify(&self, text: &str) -> Result<Vec<LanguageScore>, LangError>;
}

/// Keeps a document iff its top language is `target` with a score of at
/// least `threshold`. Low-confidence text is rejected on score before the
/// language is compared, since such pages usually hold no natural text.
pub fn language_gate(top: &LanguageScore, target: &str, threshold: f64) -> Verdict {
    if top.score < threshold {
        Verdict::Reject(RejectReason::LanguageScore)
    } else if top.language != target {
        Verdict::Reject(RejectReason::LanguageMismatch)
    } else {
        Verdict::Keep
    }
}

/// Classifies `text` and applies [`language_gate`] to the top score.
pub fn classify_and_gate<C: LanguageClassifier + ?Sized>(
    classifier: &C,
    text: &str,
    target: &str,
    threshold: f64,
) -> Result<(Verdict, LanguageScore), LangError> {
    let scores = classifier.classify(text)?;
    let top = scores.into_iter().next().ok_or(LangError::EmptyText)?;
    Ok((language_gate(&top, target, threshold), top))
}

const TRAINING: [(&str, &str); 4] = [
    ("en", include_str!("../data/lang/en.train.txt")),
    ("fr", include_str!("../data/lang/fr.train.txt")),
    ("de", include_str!("../data/lang/de.train.txt")),
    ("es", include_str!("../data/lang/es.train.txt")),
];

const HELDOUT: [(&str, &str); 4] = [
    ("en", include_str!("../data/lang/en.heldout.txt")),
    ("fr", include_str!("../data/lang/fr.heldout.txt")),
    ("de", include_str!("../data/lang/de.heldout.txt")),
    ("es", include_str!("../data/lang/es.heldout.txt")),
];

/// Held-out `(language, sentence)` pairs matching the bundled model.
pub fn builtin_heldout() -> Vec<(&'static str, &'static str)> {
    HELDOUT
        .iter()
        .flat_map(|(lang, text)| text.lines().filter(|l| !l.trim().is_empty()).map(move |l| (*lang, l)))
        .collect()
}

type Trigram = u64;

fn pack(a: char, b: char, c: char) -> Trigram {
    ((a as u64) << 42) | ((b as u64) << 21) | c as u64
}

/// Trigrams over lowercased letters, each word padded with spaces.
/// Non-letters act as word breaks.
fn trigrams(text: &str, mut f: impl FnMut(Trigram)) {
    let mut window = [' ', ' '];
    let mut in_word = false;
    for c in text.chars() {
        if c.is_alphabetic() {
            for lc in c.to_lowercase() {
                f(pack(window[0], window[1], lc));
                window = [window[1], lc];
            }
            in_word = true;
        } else if in_word {
            f(pack(window[0], window[1], ' '));
            window = [' ', ' '];
            in_word = false;
        }
    }
    if in_word {
        f(pack(window[0], window[1], ' '));
    }
}

#[derive(Debug, Clone)]
struct LangModel {
    code: String,
    counts: HashMap<Trigram, u32>,
    total: u64,
}

#[derive(Debug, Clone)]
pub struct TrigramClassifier {
    models: Vec<LangModel>,
    smoothing: f64,
    vocabulary: f64,
    background_log_prob: f64,
    max_sharpness: f64,
}

impl TrigramClassifier {
    /// Trains one model per `(language, text)` sample; repeated languages
    /// accumulate.
    pub fn train<'a>(samples: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut models: Vec<LangModel> = Vec::new();
        for (code, text) in samples {
            let idx = match models.iter().position(|m| m.code == code) {
                Some(i) => i,
                None => {
                    models.push(LangModel {
                        code: code.to_string(),
                        counts: HashMap::new(),
                        total: 0,
                    });
                    models.len() - 1
                }
            };
            let model = &mut models[idx];
            trigrams(text, |t| {
                *model.counts.entry(t).or_insert(0) += 1;
                model.total += 1;
            });
        }
        Self {
            models,
            smoothing: 0.5,
            vocabulary: 65_536.0,
            background_log_prob: -9.5,
            max_sharpness: 30.0,
        }
    }

    /// The model trained on the bundled English, French, German and Spanish
    /// sentences.
    pub fn builtin() -> Self {
        Self::train(TRAINING)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.models.iter().map(|m| m.code.as_str())
    }
}

impl LanguageClassifier for TrigramClassifier {
    /// Scores are a softmax over per-trigram mean log-likelihoods plus an
    /// implicit "no language" background model. Text with few known trigrams
    /// loses its mass to the background and so scores low for every language.
    fn classify(&self, text: &str) -> Result<Vec<LanguageScore>, LangError> {
        if text.trim().is_empty() {
            return Err(LangError::EmptyText);
        }
        let mut loglik = alloc::vec![0.0f64; self.models.len()];
        let mut n = 0usize;
        trigrams(text, |t| {
            n += 1;
            for (ll, m) in loglik.iter_mut().zip(&self.models) {
                let c = m.counts.get(&t).copied().unwrap_or(0) as f64;
                let p = (c + self.smoothing) / (m.total as f64 + self.smoothing * self.vocabulary);
                *ll += libm::log(p);
            }
        });
        let sharp = (n as f64).min(self.max_sharpness);
        let logits: Vec<f64> = if n == 0 {
            alloc::vec![0.0; self.models.len()]
        } else {
            loglik.iter().map(|ll| sharp * (ll / n as f64)).collect()
        };
        let bg = if n == 0 { 0.0 } else { sharp * self.background_log_prob };
        let max = logits.iter().copied().fold(bg, f64::max);
        let denom: f64 = logits.iter().map(|l| libm::exp(l - max)).sum::<f64>() + libm::exp(bg - max);
        let mut scores: Vec<LanguageScore> = self
            .models
            .iter()
            .zip(&logits)
            .map(|(m, l)| LanguageScore {
                language: m.code.clone(),
                score: libm::exp(l - max) / denom,
            })
            .collect();
        scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.language.cmp(&b.language)));
        Ok(scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn top(text: &str) -> LanguageScore {
        TrigramClassifier::builtin().classify(text).unwrap().remove(0)
    }

    #[test]
    fn pangrams() {
        assert_eq!(top("the quick brown fox jumps over the lazy dog").language, "en");
        assert_eq!(top("le renard brun saute par-dessus le chien paresseux").language, "fr");
    }

    #[test]
    fn empty_text_is_an_error() {
        let c = TrigramClassifier::builtin();
        assert_eq!(c.classify(""), Err(LangError::EmptyText));
        assert_eq!(c.classify("  \n"), Err(LangError::EmptyText));
    }

    #[test]
    fn scores_are_ranked_and_bounded() {
        let scores = TrigramClassifier::builtin()
            .classify("Die meisten Geschäfte schließen am Samstag.")
            .unwrap();
        let sum: f64 = scores.iter().map(|s| s.score).sum();
        assert!(sum <= 1.0 + 1e-6);
        assert!(scores.windows(2).all(|w| w[0].score >= w[1].score));
        assert_eq!(scores[0].language, "de");
    }

    #[test]
    fn non_text_scores_low() {
        for junk in ["1234 5678 ### !!!", "zxq vvk qqz xkcd jjw", "fgh jkl qwx zvb pmn"] {
            let t = top(junk);
            assert!(t.score < DEFAULT_THRESHOLD, "{junk}: {t:?}");
        }
    }

    #[test]
    fn gate_boundaries() {
        let s = |l: &str, v: f64| LanguageScore { language: l.into(), score: v };
        assert_eq!(language_gate(&s("en", 0.64), "en", 0.65), Verdict::Reject(RejectReason::LanguageScore));
        assert_eq!(language_gate(&s("en", 0.65), "en", 0.65), Verdict::Keep);
        assert_eq!(language_gate(&s("fr", 0.99), "en", 0.65), Verdict::Reject(RejectReason::LanguageMismatch));
    }

    #[test]
    fn gate_is_monotone_in_score() {
        let mut kept = false;
        for i in 0..=100 {
            let v = language_gate(&LanguageScore { language: "en".into(), score: i as f64 / 100.0 }, "en", 0.65);
            if kept {
                assert!(v.is_keep());
            }
            kept |= v.is_keep();
        }
        assert!(kept);
    }

    #[test]
    fn heldout_accuracy() {
        let c = TrigramClassifier::builtin();
        let held = builtin_heldout();
        let correct = held
            .iter()
            .filter(|(lang, s)| c.classify(s).unwrap()[0].language == *lang)
            .count();
        assert!(correct as f64 / held.len() as f64 >= 0.95, "{correct}/{}", held.len());
    }
}
