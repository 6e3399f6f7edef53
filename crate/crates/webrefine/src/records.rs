//! Line-delimited JSON records, one document per line.
//!
//! Each line is an object with `id`, `url`, `dump_id`, `part_id`, `content`
//! and `annotations`, plus `token_count` when known and `loss_mask` (pairs
//! of character offsets into `content`) when a masking strategy produced
//! one.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use webrefine_core::Document;

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("writing records: {0}")]
    Sink(#[source] io::Error),
    #[error("reading records: {0}")]
    Source(#[source] io::Error),
    #[error("malformed record on line {line_number}: {message}")]
    MalformedRecord { line_number: usize, message: String },
    #[error("record file ends without a newline after line {line_number}")]
    Truncated { line_number: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    id: String,
    url: String,
    dump_id: String,
    part_id: u32,
    content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    token_count: Option<u64>,
    #[serde(default)]
    annotations: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    loss_mask: Vec<[usize; 2]>,
}

/// A document plus the character ranges of its content excluded from
/// training loss.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub document: Document,
    pub loss_mask: Vec<Range<usize>>,
}

impl From<Document> for Record {
    fn from(document: Document) -> Self {
        Self { document, loss_mask: Vec::new() }
    }
}

fn to_line(r: &Record) -> Line {
    let d = &r.document;
    Line {
        id: d.id().to_owned(),
        url: d.url().to_owned(),
        dump_id: d.dump_id().to_owned(),
        part_id: d.part_id(),
        content: d.content().to_owned(),
        token_count: d.token_count(),
        annotations: d.annotations().clone(),
        loss_mask: r.loss_mask.iter().map(|m| [m.start, m.end]).collect(),
    }
}

fn from_line(l: Line) -> Record {
    let mut doc = Document::new(l.id, l.url, l.content).with_provenance(l.dump_id, l.part_id);
    if let Some(t) = l.token_count {
        doc = doc.with_token_count(t);
    }
    for (stage, summary) in l.annotations {
        doc.annotate(stage, summary);
    }
    Record { document: doc, loss_mask: l.loss_mask.into_iter().map(|[a, b]| a..b).collect() }
}

/// Writes one line per record and returns how many were written.
pub fn write_records<'a, W: Write>(
    sink: &mut W,
    records: impl IntoIterator<Item = &'a Record>,
) -> Result<usize, RecordError> {
    let mut n = 0;
    for r in records {
        serde_json::to_writer(&mut *sink, &to_line(r)).map_err(|e| RecordError::Sink(e.into()))?;
        sink.write_all(b"\n").map_err(RecordError::Sink)?;
        n += 1;
    }
    sink.flush().map_err(RecordError::Sink)?;
    Ok(n)
}

pub fn write_documents<'a, W: Write>(
    sink: &mut W,
    docs: impl IntoIterator<Item = &'a Document>,
) -> Result<usize, RecordError> {
    let records: Vec<Record> = docs.into_iter().cloned().map(Record::from).collect();
    write_records(sink, &records)
}

/// Streams records in file order. Blank lines are malformed, as is a final
/// line without its terminating newline.
pub struct RecordReader<R> {
    source: R,
    line_number: usize,
    buf: String,
    done: bool,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(source: R) -> Self {
        Self { source, line_number: 0, buf: String::new(), done: false }
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<Record, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        self.buf.clear();
        let read = match self.source.read_line(&mut self.buf) {
            Ok(n) => n,
            Err(e) => {
                self.done = true;
                return Some(Err(RecordError::Source(e)));
            }
        };
        if read == 0 {
            self.done = true;
            return None;
        }
        self.line_number += 1;
        if !self.buf.ends_with('\n') {
            self.done = true;
            return Some(Err(RecordError::Truncated { line_number: self.line_number }));
        }
        let line = self.buf.trim_end_matches('\n');
        Some(
            serde_json::from_str::<Line>(line)
                .map(from_line)
                .map_err(|e| RecordError::MalformedRecord { line_number: self.line_number, message: e.to_string() }),
        )
    }
}

/// Reads every record; the first malformed line aborts with its line number.
pub fn read_records<R: BufRead>(source: R) -> Result<Vec<Record>, RecordError> {
    RecordReader::new(source).collect()
}

pub fn read_documents<R: BufRead>(source: R) -> Result<Vec<Document>, RecordError> {
    Ok(read_records(source)?.into_iter().map(|r| r.document).collect())
}

/// Converts a byte range of `text` to the matching range of character
/// offsets.
pub fn byte_to_char_range(text: &str, bytes: &Range<usize>) -> Range<usize> {
    let start = text[..bytes.start].chars().count();
    start..start + text[bytes.clone()].chars().count()
}
