use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use hashbrown::HashMap;

use crate::fuzzy::normalize_tokens_with_offsets;

/// Token id placed between consecutive documents. Vocabulary ids start at 1.
pub const SEPARATOR: u32 = 0;

/// Where a token came from: its document index and byte range in that
/// document's text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenOrigin {
    pub doc: u32,
    pub start: u32,
    pub end: u32,
}

impl TokenOrigin {
    pub fn span(&self) -> Range<usize> {
        self.start as usize..self.end as usize
    }
}

/// Concatenated token ids of several documents with enough bookkeeping to
/// map any token back to its source text.
#[derive(Debug, Clone, Default)]
pub struct TokenizedCorpus {
    token_ids: Vec<u32>,
    origins: Vec<Option<TokenOrigin>>,
    doc_spans: Vec<Range<usize>>,
    vocabulary: Vec<String>,
}

impl TokenizedCorpus {
    pub fn token_ids(&self) -> &[u32] {
        &self.token_ids
    }

    /// Token range of each document in [`Self::token_ids`].
    pub fn doc_spans(&self) -> &[Range<usize>] {
        &self.doc_spans
    }

    pub fn num_docs(&self) -> usize {
        self.doc_spans.len()
    }

    /// Source of the token at `pos`; `None` for separators.
    pub fn origin(&self, pos: usize) -> Option<TokenOrigin> {
        self.origins[pos]
    }

    /// The normalized text of token id `id`; `None` for the separator.
    pub fn token_text(&self, id: u32) -> Option<&str> {
        id.checked_sub(1).map(|i| self.vocabulary[i as usize].as_str())
    }

    /// Number of non-separator tokens of document `doc`.
    pub fn doc_token_count(&self, doc: usize) -> usize {
        self.doc_spans[doc].len()
    }
}

/// Normalizes and interns every document's tokens, recording their source
/// byte ranges. Offsets are stored as `u32`, so each document must be under
/// 4 GiB.
pub fn tokenize_reversible<S: AsRef<str>>(docs: &[S]) -> TokenizedCorpus {
    let mut interned: HashMap<String, u32> = HashMap::new();
    let mut corpus = TokenizedCorpus::default();
    for (d, doc) in docs.iter().enumerate() {
        if d > 0 {
            corpus.token_ids.push(SEPARATOR);
            corpus.origins.push(None);
        }
        let start = corpus.token_ids.len();
        for tok in normalize_tokens_with_offsets(doc.as_ref()) {
            let id = match interned.get(&tok.text) {
                Some(&id) => id,
                None => {
                    corpus.vocabulary.push(tok.text.clone());
                    let id = corpus.vocabulary.len() as u32;
                    interned.insert(tok.text, id);
                    id
                }
            };
            corpus.token_ids.push(id);
            corpus.origins.push(Some(TokenOrigin {
                doc: d as u32,
                start: tok.span.start as u32,
                end: tok.span.end as u32,
            }));
        }
        corpus.doc_spans.push(start..corpus.token_ids.len());
    }
    corpus
}
