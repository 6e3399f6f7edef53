//! Streaming WARC/1.0 and WARC/1.1 reader, with optional per-record gzip
//! members, plus a small writer used for fixtures.

use std::io::{self, BufRead, BufReader, Read, Write};

use flate2::bufread::{DeflateDecoder, GzDecoder, MultiGzDecoder, ZlibDecoder};
use flate2::write::GzEncoder;
use flate2::Compression;

#[derive(Debug, thiserror::Error)]
pub enum WarcError {
    #[error("no WARC version line at byte {offset}")]
    BadMagic { offset: u64 },
    #[error("malformed header in record at byte {offset}: {message}")]
    BadHeader { offset: u64, message: String },
    #[error("record at byte {offset} ends before its declared length")]
    TruncatedRecord { offset: u64 },
    #[error("corrupt gzip member at byte {offset}: {source}")]
    GzipError {
        offset: u64,
        #[source]
        source: io::Error,
    },
    #[error("reading archive: {0}")]
    Io(#[from] io::Error),
}

impl WarcError {
    pub fn offset(&self) -> Option<u64> {
        match self {
            WarcError::BadMagic { offset }
            | WarcError::BadHeader { offset, .. }
            | WarcError::TruncatedRecord { offset }
            | WarcError::GzipError { offset, .. } => Some(*offset),
            WarcError::Io(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarcRecord {
    /// Byte offset of the record (or of its gzip member) in the archive.
    pub offset: u64,
    pub record_type: String,
    /// WARC headers in file order, names as written.
    pub headers: Vec<(String, String)>,
    pub target_uri: Option<String>,
    /// Raw record block; its length equals the declared Content-Length.
    pub block: Vec<u8>,
    /// HTTP status, for records whose block is an HTTP response.
    pub http_status: Option<u16>,
    /// The HTTP Content-Type for HTTP responses, otherwise the WARC one.
    pub content_type: Option<String>,
    pub http_headers: Vec<(String, String)>,
    /// HTTP entity body after transfer and content decoding, or the block
    /// itself for non-HTTP records.
    pub payload: Vec<u8>,
}

impl WarcRecord {
    /// First WARC header named `name`, compared case-insensitively.
    pub fn header(&self, name: &str) -> Option<&str> {
        find_header(&self.headers, name)
    }

    pub fn http_header(&self, name: &str) -> Option<&str> {
        find_header(&self.http_headers, name)
    }
}

fn find_header<'a>(headers: &'a [(String, String)], name: &str) -> Option<&'a str> {
    headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
}

struct Counting<R> {
    inner: R,
    pos: u64,
}

impl<R: Read> Read for Counting<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.pos += n as u64;
        Ok(n)
    }
}

impl<R: BufRead> BufRead for Counting<R> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.pos += amt as u64;
        self.inner.consume(amt);
    }
}

/// Reads one line including its terminator. Returns `false` at end of
/// input.
fn read_line<R: BufRead>(r: &mut R, buf: &mut Vec<u8>) -> io::Result<bool> {
    buf.clear();
    Ok(r.read_until(b'\n', buf)? > 0)
}

fn trim_eol(line: &[u8]) -> &[u8] {
    let line = line.strip_suffix(b"\n").unwrap_or(line);
    line.strip_suffix(b"\r").unwrap_or(line)
}

/// Parses records from an uncompressed stream. `base` is added to reported
/// offsets; when `fixed_offset` is set every record reports it instead.
fn next_plain<R: BufRead>(
    r: &mut Counting<R>,
    base: u64,
    fixed_offset: Option<u64>,
) -> Result<Option<WarcRecord>, WarcError> {
    let mut line = Vec::new();
    // skip blank lines between records
    let start = loop {
        let at = r.pos;
        if !read_line(r, &mut line)? {
            return Ok(None);
        }
        if !trim_eol(&line).is_empty() {
            break at;
        }
    };
    let offset = fixed_offset.unwrap_or(base + start);
    if !trim_eol(&line).starts_with(b"WARC/") {
        return Err(WarcError::BadMagic { offset });
    }
    let mut headers = Vec::new();
    loop {
        if !read_line(r, &mut line)? {
            return Err(WarcError::TruncatedRecord { offset });
        }
        let l = trim_eol(&line);
        if l.is_empty() {
            break;
        }
        let text = String::from_utf8_lossy(l);
        let (k, v) = text
            .split_once(':')
            .ok_or_else(|| WarcError::BadHeader { offset, message: format!("no colon in {text:?}") })?;
        headers.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    let len: u64 = find_header(&headers, "Content-Length")
        .ok_or_else(|| WarcError::BadHeader { offset, message: "missing Content-Length".into() })?
        .parse()
        .map_err(|_| WarcError::BadHeader { offset, message: "bad Content-Length".into() })?;
    let mut block = Vec::with_capacity(len.min(1 << 24) as usize);
    let got = r.by_ref().take(len).read_to_end(&mut block)?;
    if (got as u64) < len {
        return Err(WarcError::TruncatedRecord { offset });
    }
    Ok(Some(build_record(offset, headers, block)))
}

fn build_record(offset: u64, headers: Vec<(String, String)>, block: Vec<u8>) -> WarcRecord {
    let record_type = find_header(&headers, "WARC-Type").unwrap_or("").to_ascii_lowercase();
    let target_uri = find_header(&headers, "WARC-Target-URI")
        .map(|u| u.trim_start_matches('<').trim_end_matches('>').to_owned());
    let warc_ct = find_header(&headers, "Content-Type").map(str::to_owned);
    let is_http = warc_ct.as_deref().is_some_and(|c| c.to_ascii_lowercase().starts_with("application/http"))
        || (record_type == "response" && block.starts_with(b"HTTP/"));
    let mut rec = WarcRecord {
        offset,
        record_type,
        headers,
        target_uri,
        http_status: None,
        content_type: warc_ct,
        http_headers: Vec::new(),
        payload: Vec::new(),
        block,
    };
    match (is_http && rec.record_type == "response").then(|| parse_http_response(&rec.block)).flatten() {
        Some(http) => {
            rec.http_status = Some(http.status);
            rec.content_type = find_header(&http.headers, "Content-Type").map(str::to_owned);
            rec.http_headers = http.headers;
            rec.payload = http.body;
        }
        None => rec.payload = rec.block.clone(),
    }
    rec
}

struct HttpResponse {
    status: u16,
    headers: Vec<(String, String)>,
    body: Vec<u8>,
}

fn parse_http_response(block: &[u8]) -> Option<HttpResponse> {
    let mut r = block;
    let mut line = Vec::new();
    read_line(&mut r, &mut line).ok()?;
    let status_line = String::from_utf8_lossy(trim_eol(&line)).into_owned();
    let mut parts = status_line.split_whitespace();
    if !parts.next()?.starts_with("HTTP/") {
        return None;
    }
    let status = parts.next()?.parse().ok()?;
    let mut headers = Vec::new();
    loop {
        if !read_line(&mut r, &mut line).ok()? {
            break;
        }
        let l = trim_eol(&line);
        if l.is_empty() {
            break;
        }
        let text = String::from_utf8_lossy(l);
        if let Some((k, v)) = text.split_once(':') {
            headers.push((k.trim().to_owned(), v.trim().to_owned()));
        }
    }
    let mut body = r.to_vec();
    let chunked = find_header(&headers, "Transfer-Encoding").is_some_and(|v| v.to_ascii_lowercase().contains("chunked"));
    if chunked {
        if let Some(b) = dechunk(&body) {
            body = b;
        }
    }
    if let Some(enc) = find_header(&headers, "Content-Encoding") {
        if let Some(b) = decode_content(&enc.to_ascii_lowercase(), &body) {
            body = b;
        }
    }
    Some(HttpResponse { status, headers, body })
}

fn dechunk(mut data: &[u8]) -> Option<Vec<u8>> {
    let mut out = Vec::with_capacity(data.len());
    let mut line = Vec::new();
    loop {
        if !read_line(&mut data, &mut line).ok()? {
            return Some(out);
        }
        let size_text = String::from_utf8_lossy(trim_eol(&line));
        let size_text = size_text.split(';').next()?.trim();
        if size_text.is_empty() {
            continue;
        }
        let size = usize::from_str_radix(size_text, 16).ok()?;
        if size == 0 {
            return Some(out);
        }
        if data.len() < size {
            return None;
        }
        out.extend_from_slice(&data[..size]);
        data = &data[size..];
    }
}

fn decode_content(encoding: &str, body: &[u8]) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    let ok = match encoding.trim() {
        "gzip" | "x-gzip" => MultiGzDecoder::new(body).read_to_end(&mut out).is_ok(),
        "deflate" => {
            ZlibDecoder::new(body).read_to_end(&mut out).is_ok() || {
                out.clear();
                DeflateDecoder::new(body).read_to_end(&mut out).is_ok()
            }
        }
        _ => false,
    };
    ok.then_some(out)
}

/// Iterator over the records of one archive. Stops after the first error.
pub struct WarcReader<R> {
    input: Counting<BufReader<R>>,
    gzip: Option<bool>,
    pending: std::vec::IntoIter<WarcRecord>,
    failed: bool,
}

impl<R: Read> WarcReader<R> {
    pub fn new(source: R) -> Self {
        Self {
            input: Counting { inner: BufReader::with_capacity(1 << 16, source), pos: 0 },
            gzip: None,
            pending: Vec::new().into_iter(),
            failed: false,
        }
    }

    fn next_gzip_member(&mut self) -> Result<bool, WarcError> {
        if self.input.fill_buf()?.is_empty() {
            return Ok(false);
        }
        let offset = self.input.pos;
        let mut data = Vec::new();
        GzDecoder::new(&mut self.input)
            .read_to_end(&mut data)
            .map_err(|source| WarcError::GzipError { offset, source })?;
        let mut inner = Counting { inner: &data[..], pos: 0 };
        let mut records = Vec::new();
        while let Some(rec) = next_plain(&mut inner, 0, Some(offset))? {
            records.push(rec);
        }
        self.pending = records.into_iter();
        Ok(true)
    }

    fn advance(&mut self) -> Result<Option<WarcRecord>, WarcError> {
        let gzip = match self.gzip {
            Some(g) => g,
            None => {
                let head = self.input.fill_buf()?;
                let g = head.starts_with(&[0x1f, 0x8b]);
                self.gzip = Some(g);
                g
            }
        };
        if !gzip {
            return next_plain(&mut self.input, 0, None);
        }
        loop {
            if let Some(rec) = self.pending.next() {
                return Ok(Some(rec));
            }
            if !self.next_gzip_member()? {
                return Ok(None);
            }
        }
    }
}

impl<R: Read> Iterator for WarcReader<R> {
    type Item = Result<WarcRecord, WarcError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.advance() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => None,
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

pub fn iter_warc<R: Read>(source: R) -> WarcReader<R> {
    WarcReader::new(source)
}

/// Writes WARC/1.1 records, each optionally in its own gzip member.
pub struct WarcWriter<W: Write> {
    out: W,
    gzip: bool,
    counter: u64,
}

impl<W: Write> WarcWriter<W> {
    pub fn new(out: W, gzip: bool) -> Self {
        Self { out, gzip, counter: 0 }
    }

    pub fn write_record(
        &mut self,
        record_type: &str,
        target_uri: Option<&str>,
        content_type: &str,
        block: &[u8],
    ) -> io::Result<()> {
        self.counter += 1;
        let mut head = format!(
            "WARC/1.1\r\nWARC-Type: {record_type}\r\nWARC-Record-ID: <urn:uuid:00000000-0000-0000-0000-{:012}>\r\n\
             WARC-Date: 2023-01-01T00:00:00Z\r\n",
            self.counter
        );
        if let Some(uri) = target_uri {
            head.push_str(&format!("WARC-Target-URI: {uri}\r\n"));
        }
        head.push_str(&format!("Content-Type: {content_type}\r\nContent-Length: {}\r\n\r\n", block.len()));
        let mut bytes = head.into_bytes();
        bytes.extend_from_slice(block);
        bytes.extend_from_slice(b"\r\n\r\n");
        if self.gzip {
            let mut enc = GzEncoder::new(&mut self.out, Compression::fast());
            enc.write_all(&bytes)?;
            enc.finish()?;
            Ok(())
        } else {
            self.out.write_all(&bytes)
        }
    }

    pub fn write_warcinfo(&mut self, fields: &str) -> io::Result<()> {
        self.write_record("warcinfo", None, "application/warc-fields", fields.as_bytes())
    }

    /// A response record wrapping an HTTP/1.1 message with the given status,
    /// content type and body.
    pub fn write_response(&mut self, uri: &str, status: u16, content_type: &str, body: &[u8]) -> io::Result<()> {
        let mut block =
            format!("HTTP/1.1 {status} X\r\nContent-Type: {content_type}\r\nContent-Length: {}\r\n\r\n", body.len())
                .into_bytes();
        block.extend_from_slice(body);
        self.write_record("response", Some(uri), "application/http; msgtype=response", &block)
    }

    pub fn write_request(&mut self, uri: &str) -> io::Result<()> {
        let block = format!("GET / HTTP/1.1\r\nHost: {uri}\r\n\r\n");
        self.write_record("request", Some(uri), "application/http; msgtype=request", block.as_bytes())
    }

    pub fn get_ref(&self) -> &W {
        &self.out
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(gzip: bool) -> Vec<u8> {
        let mut w = WarcWriter::new(Vec::new(), gzip);
        w.write_warcinfo("software: test\r\n").unwrap();
        w.write_response("http://a.example/", 200, "text/html", b"<p>one</p>").unwrap();
        w.write_response("http://b.example/", 404, "text/html", b"<p>two</p>").unwrap();
        w.into_inner()
    }

    #[test]
    fn reads_records_in_order() {
        for gzip in [false, true] {
            let recs: Vec<WarcRecord> = iter_warc(&sample(gzip)[..]).collect::<Result<_, _>>().unwrap();
            let types: Vec<&str> = recs.iter().map(|r| r.record_type.as_str()).collect();
            assert_eq!(types, ["warcinfo", "response", "response"]);
            assert_eq!(recs[1].target_uri.as_deref(), Some("http://a.example/"));
            assert_eq!(recs[1].http_status, Some(200));
            assert_eq!(recs[1].content_type.as_deref(), Some("text/html"));
            assert_eq!(recs[1].payload, b"<p>one</p>");
            assert_eq!(recs[2].http_status, Some(404));
            assert_eq!(recs[1].header("warc-target-uri"), Some("http://a.example/"));
            for r in &recs {
                assert_eq!(r.block.len().to_string(), r.header("content-length").unwrap());
            }
        }
    }

    #[test]
    fn empty_stream() {
        assert_eq!(iter_warc(&b""[..]).count(), 0);
    }

    #[test]
    fn truncated_payload_reports_record_offset() {
        let data = sample(false);
        let second = {
            let first_len = data.windows(8).skip(1).position(|w| w == b"WARC/1.1").unwrap() + 1;
            first_len as u64
        };
        let third = data.windows(8).enumerate().filter(|(_, w)| *w == b"WARC/1.1").nth(2).unwrap().0;
        let cut = &data[..third - 10];
        let results: Vec<_> = iter_warc(cut).collect();
        assert_eq!(results.len(), 2);
        match &results[1] {
            Err(WarcError::TruncatedRecord { offset }) => assert_eq!(*offset, second),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_magic() {
        let results: Vec<_> = iter_warc(&b"HELLO\r\n\r\n"[..]).collect();
        assert!(matches!(results[..], [Err(WarcError::BadMagic { offset: 0 })]));
    }

    #[test]
    fn corrupt_gzip_member() {
        let mut data = sample(true);
        let n = data.len();
        data.truncate(n - 8);
        let results: Vec<_> = iter_warc(&data[..]).collect();
        assert!(results[..2].iter().all(Result::is_ok));
        assert!(matches!(results[2], Err(WarcError::GzipError { .. })));
    }

    #[test]
    fn chunked_and_gzipped_bodies() {
        let mut gz = GzEncoder::new(Vec::new(), Compression::fast());
        gz.write_all(b"hello body").unwrap();
        let body = gz.finish().unwrap();
        let mut block = b"HTTP/1.1 200 OK\r\nTransfer-Encoding: chunked\r\nContent-Encoding: gzip\r\n\r\n".to_vec();
        block.extend_from_slice(format!("{:x}\r\n", body.len()).as_bytes());
        block.extend_from_slice(&body);
        block.extend_from_slice(b"\r\n0\r\n\r\n");
        let mut w = WarcWriter::new(Vec::new(), false);
        w.write_record("response", Some("http://c.example/"), "application/http", &block).unwrap();
        let rec = iter_warc(&w.into_inner()[..]).next().unwrap().unwrap();
        assert_eq!(rec.payload, b"hello body");
    }
}
