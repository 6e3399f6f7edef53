//! URLs kept by earlier parts, used to drop revisits in later parts.
//!
//! The file holds one canonical URL per line. New URLs are only added when
//! a part completes, by rewriting the file through a temporary sibling and
//! renaming it into place.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use webrefine_core::url::{normalize_url, UrlError};
use webrefine_core::{RejectReason, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("registry {path} is unavailable: {source}")]
    RegistryUnavailable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Default)]
pub struct KeptUrlRegistry {
    path: Option<PathBuf>,
    urls: BTreeSet<String>,
}

/// The registry key of a URL: its lowercased form without scheme, query
/// string included.
pub fn canonical_url(url: &str) -> Result<String, UrlError> {
    Ok(normalize_url(url)?.full_lower)
}

impl KeptUrlRegistry {
    /// An empty registry that is never persisted.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path`; a missing file is an empty registry.
    pub fn load(path: impl Into<PathBuf>) -> Result<Self, RegistryError> {
        let path = path.into();
        let urls = match fs::read_to_string(&path) {
            Ok(text) => text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeSet::new(),
            Err(source) => return Err(RegistryError::RegistryUnavailable { path, source }),
        };
        Ok(Self { path: Some(path), urls })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.urls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.urls.is_empty()
    }

    /// Exact membership of an already canonical URL.
    pub fn contains(&self, canonical: &str) -> bool {
        self.urls.contains(canonical)
    }

    /// Adds canonical URLs and, for a file-backed registry, atomically
    /// rewrites the file. Returns how many were new.
    pub fn commit<I, S>(&mut self, canonical: I) -> Result<usize, RegistryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let before = self.urls.len();
        self.urls.extend(canonical.into_iter().map(Into::into));
        let added = self.urls.len() - before;
        if let Some(path) = &self.path {
            write_atomically(path, &self.urls)
                .map_err(|source| RegistryError::RegistryUnavailable { path: path.clone(), source })?;
        }
        Ok(added)
    }
}

fn write_atomically(path: &Path, urls: &BTreeSet<String>) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        for u in urls {
            writeln!(f, "{u}")?;
        }
        f.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Rejects URLs kept by an earlier part.
pub fn url_dedup_gate(url: &str, registry: &KeptUrlRegistry) -> Result<Verdict, UrlError> {
    Ok(if registry.contains(&canonical_url(url)?) {
        Verdict::Reject(RejectReason::UrlRevisit)
    } else {
        Verdict::Keep
    })
}
