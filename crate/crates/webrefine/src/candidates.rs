//! Selecting HTML pages from archive records and decoding them to text.

use encoding_rs::Encoding;

use crate::warc::WarcRecord;

/// An HTML page ready for extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub url: String,
    pub html: String,
    pub http_status: u16,
}

/// Why a record was not turned into a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkipReason {
    NotResponse,
    NoTargetUri,
    NotHttp,
    Status,
    NotHtml,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SkipCounts {
    pub not_response: u64,
    pub no_target_uri: u64,
    pub not_http: u64,
    pub status: u64,
    pub not_html: u64,
}

impl SkipCounts {
    pub fn add(&mut self, reason: SkipReason) {
        match reason {
            SkipReason::NotResponse => self.not_response += 1,
            SkipReason::NoTargetUri => self.no_target_uri += 1,
            SkipReason::NotHttp => self.not_http += 1,
            SkipReason::Status => self.status += 1,
            SkipReason::NotHtml => self.not_html += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.not_response + self.no_target_uri + self.not_http + self.status + self.not_html
    }
}

fn is_html(content_type: &str) -> bool {
    let mime = content_type.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    mime == "text/html" || mime == "application/xhtml+xml"
}

/// Checks a record without decoding its payload.
pub fn qualifies(rec: &WarcRecord) -> Result<(), SkipReason> {
    if rec.record_type != "response" {
        return Err(SkipReason::NotResponse);
    }
    if rec.target_uri.is_none() {
        return Err(SkipReason::NoTargetUri);
    }
    let status = rec.http_status.ok_or(SkipReason::NotHttp)?;
    if !(200..300).contains(&status) {
        return Err(SkipReason::Status);
    }
    if !rec.content_type.as_deref().is_some_and(is_html) {
        return Err(SkipReason::NotHtml);
    }
    Ok(())
}

pub fn to_candidate(rec: &WarcRecord) -> Result<Candidate, SkipReason> {
    qualifies(rec)?;
    Ok(Candidate {
        url: rec.target_uri.clone().unwrap_or_default(),
        html: decode_html(&rec.payload, rec.content_type.as_deref()),
        http_status: rec.http_status.unwrap_or_default(),
    })
}

/// Keeps HTML responses with a 2xx status, counting what was skipped.
pub fn to_candidates<'a>(
    records: impl IntoIterator<Item = &'a WarcRecord>,
    skipped: &mut SkipCounts,
) -> Vec<Candidate> {
    records
        .into_iter()
        .filter_map(|r| to_candidate(r).map_err(|e| skipped.add(e)).ok())
        .collect()
}

fn charset_param(content_type: &str) -> Option<&str> {
    content_type.split(';').skip(1).find_map(|p| {
        let (k, v) = p.split_once('=')?;
        k.trim().eq_ignore_ascii_case("charset").then(|| v.trim().trim_matches(['"', '\'']))
    })
}

/// Looks for a charset declaration in the first `<meta>` tags of the page.
fn meta_charset(bytes: &[u8]) -> Option<&'static Encoding> {
    let head = &bytes[..bytes.len().min(4096)];
    let lower = head.to_ascii_lowercase();
    let mut from = 0;
    while let Some(i) = find(&lower[from..], b"<meta") {
        let tag_start = from + i;
        let tag_end = find(&lower[tag_start..], b">").map_or(lower.len(), |e| tag_start + e);
        let tag = &lower[tag_start..tag_end];
        if let Some(c) = find(tag, b"charset=") {
            let rest = &tag[c + 8..];
            let rest = rest.strip_prefix(b"\"").or_else(|| rest.strip_prefix(b"'")).unwrap_or(rest);
            let end = rest
                .iter()
                .position(|b| matches!(b, b'"' | b'\'' | b';' | b' ' | b'/' | b'>'))
                .unwrap_or(rest.len());
            if let Some(enc) = Encoding::for_label(&rest[..end]) {
                return Some(enc);
            }
        }
        from = tag_end;
    }
    None
}

fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

/// Decodes with the HTTP charset, then a `<meta>` charset, then UTF-8 with
/// replacement characters.
pub fn decode_html(bytes: &[u8], content_type: Option<&str>) -> String {
    let declared = content_type
        .and_then(charset_param)
        .and_then(|c| Encoding::for_label(c.as_bytes()))
        .or_else(|| meta_charset(bytes));
    match declared {
        Some(enc) => enc.decode_with_bom_removal(bytes).0.into_owned(),
        None => String::from_utf8_lossy(bytes).into_owned(),
    }
}
