//! Language classification backends: the bundled trigram model, or an
//! external program speaking a line protocol.
//!
//! The external program reads one document per line on stdin, with line
//! breaks and tabs replaced by spaces, and writes one `lang<TAB>score` line
//! per document. A `__label__` prefix on the language is ignored.

use rayon::prelude::*;
use webrefine_core::lang::{LangError, LanguageClassifier, LanguageScore, TrigramClassifier};

use crate::extract::run_filter;

#[derive(Debug, thiserror::Error)]
pub enum LanguageError {
    #[error("unknown classifier {0:?}; use \"builtin\" or \"external:<command>\"")]
    UnknownClassifier(String),
    #[error("external classifier failed: {0}")]
    External(String),
    #[error("external classifier line {line}: {message}")]
    Protocol { line: usize, message: String },
}

#[derive(Debug, Clone)]
pub enum LanguageBackend {
    Builtin(TrigramClassifier),
    External { command: String },
}

impl LanguageBackend {
    pub fn from_spec(spec: &str) -> Result<Self, LanguageError> {
        match spec.trim() {
            "builtin" => Ok(Self::Builtin(TrigramClassifier::builtin())),
            s => match s.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(Self::External { command: cmd.trim().to_owned() }),
                _ => Err(LanguageError::UnknownClassifier(s.to_owned())),
            },
        }
    }

    /// Top language of each text. The outer error means the backend itself
    /// failed; inner errors are per text.
    pub fn top_scores(&self, texts: &[&str]) -> Result<Vec<Result<LanguageScore, LangError>>, LanguageError> {
        match self {
            Self::Builtin(model) => Ok(texts
                .par_iter()
                .map(|t| model.classify(t).and_then(|s| s.into_iter().next().ok_or(LangError::EmptyText)))
                .collect()),
            Self::External { command } => external_scores(command, texts),
        }
    }
}

fn external_scores(command: &str, texts: &[&str]) -> Result<Vec<Result<LanguageScore, LangError>>, LanguageError> {
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let mut input = String::new();
    for t in texts {
        input.extend(t.chars().map(|c| if c == '\n' || c == '\r' || c == '\t' { ' ' } else { c }));
        input.push('\n');
    }
    let out = run_filter(command, input.as_bytes()).map_err(LanguageError::External)?;
    let out = String::from_utf8_lossy(&out);
    let lines: Vec<&str> = out.lines().collect();
    if lines.len() != texts.len() {
        return Err(LanguageError::Protocol {
            line: lines.len(),
            message: format!("expected {} lines, got {}", texts.len(), lines.len()),
        });
    }
    lines
        .iter()
        .zip(texts)
        .enumerate()
        .map(|(i, (line, text))| {
            if text.trim().is_empty() {
                return Ok(Err(LangError::EmptyText));
            }
            let protocol = |message: String| LanguageError::Protocol { line: i + 1, message };
            let (lang, score) = line.split_once('\t').ok_or_else(|| protocol(format!("no tab in {line:?}")))?;
            let score: f64 = score.trim().parse().map_err(|_| protocol(format!("bad score in {line:?}")))?;
            if !(0.0..=1.0).contains(&score) {
                return Err(protocol(format!("score {score} outside [0, 1]")));
            }
            let lang = lang.trim();
            let lang = lang.strip_prefix("__label__").unwrap_or(lang);
            Ok(Ok(LanguageScore { language: lang.to_owned(), score }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_backend() {
        let b = LanguageBackend::from_spec("builtin").unwrap();
        let out = b.top_scores(&["the cat sat on the mat with the dog", ""]).unwrap();
        assert_eq!(out[0].as_ref().unwrap().language, "en");
        assert_eq!(out[1], Err(LangError::EmptyText));
    }

    #[test]
    fn external_protocol() {
        let b = LanguageBackend::from_spec("external:awk '{ print \"__label__fr\\t0.9\" }'").unwrap();
        let out = b.top_scores(&["a\nb", "c"]).unwrap();
        assert_eq!(out, [Ok(LanguageScore { language: "fr".into(), score: 0.9 }), Ok(LanguageScore { language: "fr".into(), score: 0.9 })]);
        let short = LanguageBackend::from_spec("external:head -n 1 | sed 's/.*/en\t0.5/'").unwrap();
        assert!(matches!(short.top_scores(&["a", "b"]), Err(LanguageError::Protocol { .. })));
        assert!(LanguageBackend::from_spec("fasttext").is_err());
    }
}
