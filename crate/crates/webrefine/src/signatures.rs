//! Binary MinHash signature cache, so signing and clustering can run as
//! separate steps.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   "WRMINSIG" (8 bytes)
//! header  ngram u32 | hashes_per_bucket u32 | buckets u32 | seed u64 | count u64
//! entry   id_len u32 | id bytes | tokens u64 | present u8 | values [u64; k] if present
//! ```
//!
//! `present` is 0 for documents without any token, which have no signature.

use std::io::{self, Read, Write};

use webrefine_core::fuzzy::{MinHashParams, MinHashSignature};

const MAGIC: &[u8; 8] = b"WRMINSIG";

#[derive(Debug, thiserror::Error)]
pub enum SignatureError {
    #[error("signature cache I/O: {0}")]
    Io(#[from] io::Error),
    #[error("not a signature cache (bad magic)")]
    BadMagic,
    #[error("signature cache entry {index}: {message}")]
    Corrupt { index: u64, message: String },
    #[error("signature cache was built with different MinHash parameters")]
    ParamMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureEntry {
    pub id: String,
    pub tokens: u64,
    pub signature: Option<MinHashSignature>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureFile {
    pub params: MinHashParams,
    pub entries: Vec<SignatureEntry>,
}

fn u32_of(len: usize) -> io::Result<u32> {
    u32::try_from(len).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "field too large"))
}

pub fn write_signatures<W: Write>(out: &mut W, file: &SignatureFile) -> Result<(), SignatureError> {
    let p = &file.params;
    out.write_all(MAGIC)?;
    out.write_all(&u32_of(p.ngram)?.to_le_bytes())?;
    out.write_all(&u32_of(p.hashes_per_bucket)?.to_le_bytes())?;
    out.write_all(&u32_of(p.buckets)?.to_le_bytes())?;
    out.write_all(&p.seed.to_le_bytes())?;
    out.write_all(&(file.entries.len() as u64).to_le_bytes())?;
    for (index, e) in file.entries.iter().enumerate() {
        out.write_all(&u32_of(e.id.len())?.to_le_bytes())?;
        out.write_all(e.id.as_bytes())?;
        out.write_all(&e.tokens.to_le_bytes())?;
        match &e.signature {
            None => out.write_all(&[0])?,
            Some(sig) => {
                if sig.params() != p {
                    return Err(SignatureError::Corrupt {
                        index: index as u64,
                        message: "signature parameters differ from the header".into(),
                    });
                }
                out.write_all(&[1])?;
                let mut buf = Vec::with_capacity(sig.values().len() * 8);
                for v in sig.values() {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
                out.write_all(&buf)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn array<const N: usize, R: Read>(r: &mut R) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_signatures<R: Read>(input: &mut R) -> Result<SignatureFile, SignatureError> {
    let magic: [u8; 8] = array(input).map_err(|_| SignatureError::BadMagic)?;
    if &magic != MAGIC {
        return Err(SignatureError::BadMagic);
    }
    let params = MinHashParams {
        ngram: u32::from_le_bytes(array(input)?) as usize,
        hashes_per_bucket: u32::from_le_bytes(array(input)?) as usize,
        buckets: u32::from_le_bytes(array(input)?) as usize,
        seed: u64::from_le_bytes(array(input)?),
    };
    let count = u64::from_le_bytes(array(input)?);
    let k = params.num_hashes();
    let mut entries = Vec::new();
    for index in 0..count {
        let corrupt = |message: String| SignatureError::Corrupt { index, message };
        let mut read_entry = || -> io::Result<Result<SignatureEntry, SignatureError>> {
            let id_len = u32::from_le_bytes(array(input)?) as usize;
            let mut id = vec![0u8; id_len];
            input.read_exact(&mut id)?;
            let Ok(id) = String::from_utf8(id) else {
                return Ok(Err(corrupt("id is not UTF-8".into())));
            };
            let tokens = u64::from_le_bytes(array(input)?);
            let [present] = array(input)?;
            let signature = match present {
                0 => None,
                1 => {
                    let mut raw = vec![0u8; k * 8];
                    input.read_exact(&mut raw)?;
                    let values = raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
                    match MinHashSignature::from_parts(params, values) {
                        Ok(s) => Some(s),
                        Err(e) => return Ok(Err(corrupt(e.to_string()))),
                    }
                }
                other => return Ok(Err(corrupt(format!("bad presence flag {other}")))),
            };
            Ok(Ok(SignatureEntry { id, tokens, signature }))
        };
        match read_entry() {
            Ok(entry) => entries.push(entry?),
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Err(corrupt("truncated".into())),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(SignatureFile { params, entries })
}
