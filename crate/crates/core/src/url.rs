//! URL-only gating: domain blocklist, tiered word scoring and exclusion of
//! curated high-quality sources.
//!
//! All matching runs on a normalized form of the URL: lowercased, scheme
//! stripped. Domain lists match a host if the host or any parent domain
//! (label-aligned suffix) is listed.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

use crate::document::{RejectReason, Verdict};

/// Default curated-source exclusions, one domain per line.
pub const DEFAULT_HQ_EXCLUSIONS: &str = include_str!("../data/hq_exclusions.txt");
pub const DEFAULT_STRICT_WORDS: &str = include_str!("../data/strict_subword.txt");
pub const DEFAULT_HARD_WORDS: &str = include_str!("../data/hard_whole_word.txt");
pub const DEFAULT_SOFT_WORDS: &str = include_str!("../data/soft_words.txt");

/// Blocklist categories selected by default.
pub const DEFAULT_BLOCK_CATEGORIES: [&str; 10] = [
    "adult",
    "phishing",
    "dating",
    "gambling",
    "filehosting",
    "ddos",
    "agressif",
    "chat",
    "mixed_adult",
    "arjel",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UrlError {
    Unparsable(String),
}

impl fmt::Display for UrlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UrlError::Unparsable(u) => write!(f, "unparsable URL: {u:?}"),
        }
    }
}

impl core::error::Error for UrlError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedUrl {
    pub host: String,
    pub registrable_domain: String,
    /// Whole URL, lowercased, without scheme.
    pub full_lower: String,
}

fn is_scheme(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn strip_scheme(s: &str) -> Option<&str> {
    let idx = s.find("://")?;
    is_scheme(&s[..idx]).then(|| &s[idx + 3..])
}

pub fn normalize_url(url: &str) -> Result<NormalizedUrl, UrlError> {
    let bad = || UrlError::Unparsable(url.to_owned());
    let trimmed = url.trim();
    if trimmed.is_empty() || trimmed.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(bad());
    }
    let lower = trimmed.to_lowercase();
    let rest = strip_scheme(&lower).unwrap_or(&lower).trim_start_matches('/');
    // A second scheme after stripping the first would make normalization
    // non-idempotent.
    if strip_scheme(rest).is_some() {
        return Err(bad());
    }
    let authority_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let authority = &rest[..authority_end];
    let host_port = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
    let host = if host_port.starts_with('[') {
        let close = host_port.find(']').ok_or_else(bad)?;
        &host_port[..=close]
    } else {
        match host_port.rsplit_once(':') {
            Some((h, port)) if port.chars().all(|c| c.is_ascii_digit()) => h,
            Some(_) => return Err(bad()),
            None => host_port,
        }
    };
    let host = host.trim_end_matches('.');
    if !valid_host(host) {
        return Err(bad());
    }
    Ok(NormalizedUrl {
        host: host.to_owned(),
        registrable_domain: registrable_domain(host).to_owned(),
        full_lower: rest.to_owned(),
    })
}

fn valid_host(host: &str) -> bool {
    if host.is_empty() {
        return false;
    }
    if host.starts_with('[') {
        return host.len() > 2
            && host[1..host.len() - 1]
                .chars()
                .all(|c| c.is_ascii_hexdigit() || c == ':' || c == '.');
    }
    host.split('.').all(|label| {
        !label.is_empty() && label.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_')
    })
}

const SECOND_LEVEL: [&str; 16] = [
    "ac", "co", "com", "edu", "gob", "go", "gov", "ltd", "mil", "ne", "net", "nic", "or", "org",
    "plc", "sch",
];

/// Approximates the registrable domain without a public-suffix table: the
/// last two labels, or three under a two-letter country code with a common
/// second-level label (`example.co.uk`).
pub fn registrable_domain(host: &str) -> &str {
    if host.starts_with('[') || host.split('.').all(|l| l.chars().all(|c| c.is_ascii_digit())) {
        return host;
    }
    let labels: Vec<&str> = host.split('.').collect();
    let n = labels.len();
    let keep = if n >= 3 && labels[n - 1].len() == 2 && SECOND_LEVEL.contains(&labels[n - 2]) {
        3
    } else {
        2
    };
    if n <= keep {
        return host;
    }
    let skip: usize = labels[..n - keep].iter().map(|l| l.len() + 1).sum();
    &host[skip..]
}

/// The host itself followed by each parent domain, shortest last.
pub fn host_suffixes(host: &str) -> impl Iterator<Item = &str> {
    let mut next = Some(host);
    core::iter::from_fn(move || {
        let cur = next?;
        next = cur.split_once('.').map(|(_, rest)| rest).filter(|r| !r.is_empty());
        Some(cur)
    })
}

/// Parses a one-entry-per-line list, dropping blank lines and `#` comments.
pub fn parse_list(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split_once('#').map_or(l, |(before, _)| before).trim())
        .filter(|l| !l.is_empty())
}

/// A set of domains matched against hosts by label-aligned suffix.
#[derive(Debug, Clone, Default)]
pub struct DomainSet {
    domains: HashSet<String>,
}

impl DomainSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_list(text: &str) -> Self {
        let mut set = Self::new();
        for d in parse_list(text) {
            set.insert(d);
        }
        set
    }

    pub fn default_hq() -> Self {
        Self::from_list(DEFAULT_HQ_EXCLUSIONS)
    }

    /// Adds a domain. Entries given as URLs are reduced to their host.
    pub fn insert(&mut self, domain: &str) -> bool {
        let host = normalize_url(domain)
            .map(|n| n.host)
            .unwrap_or_else(|_| domain.trim().to_lowercase());
        self.domains.insert(host)
    }

    pub fn remove(&mut self, domain: &str) -> bool {
        self.domains.remove(domain.trim().to_lowercase().trim_end_matches('.'))
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn contains(&self, domain: &str) -> bool {
        self.domains.contains(domain)
    }

    /// The listed domain that covers `host`, if any.
    pub fn matching<'a>(&self, host: &'a str) -> Option<&'a str> {
        host_suffixes(host).find(|s| self.domains.contains(*s))
    }
}

/// Domain blocklist with the category each entry came from.
#[derive(Debug, Clone, Default)]
pub struct DomainBlocklist {
    entries: DomainSet,
    categories: HashMap<String, String>,
}

impl DomainBlocklist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, domain: &str, category: &str) {
        if self.entries.insert(domain) {
            let host = normalize_url(domain)
                .map(|n| n.host)
                .unwrap_or_else(|_| domain.trim().to_lowercase());
            self.categories.insert(host, category.to_owned());
        }
    }

    /// Drops an entry, e.g. a known false positive.
    pub fn remove(&mut self, domain: &str) {
        let key = domain.trim().to_lowercase();
        self.entries.remove(&key);
        self.categories.remove(&key);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn category_of(&self, domain: &str) -> Option<&str> {
        self.categories.get(domain).map(String::as_str)
    }

    pub fn matching<'a>(&self, host: &'a str) -> Option<&'a str> {
        self.entries.matching(host)
    }
}

pub fn domain_blocked(url: &str, blocklist: &DomainBlocklist) -> Result<bool, UrlError> {
    let n = normalize_url(url)?;
    Ok(blocklist.matching(&n.host).is_some())
}

pub fn hq_excluded(url: &str, hq_domains: &DomainSet) -> Result<bool, UrlError> {
    let n = normalize_url(url)?;
    Ok(hq_domains.matching(&n.host).is_some())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoringWordLists {
    pub strict_subword: Vec<String>,
    pub hard_whole_word: Vec<String>,
    pub soft_words: Vec<String>,
    pub soft_threshold: usize,
}

impl Default for ScoringWordLists {
    /// The minimal bundled lists. These hold only the words named as examples
    /// for each tier; production lists are loaded from files.
    fn default() -> Self {
        Self::from_lists(DEFAULT_STRICT_WORDS, DEFAULT_HARD_WORDS, DEFAULT_SOFT_WORDS)
    }
}

impl ScoringWordLists {
    pub fn from_lists(strict: &str, hard: &str, soft: &str) -> Self {
        let words = |text: &str| parse_list(text).map(str::to_lowercase).collect::<Vec<_>>();
        Self {
            strict_subword: words(strict),
            hard_whole_word: words(hard),
            soft_words: words(soft),
            soft_threshold: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum UrlTier {
    Strict,
    Hard,
    Soft,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlMatch {
    pub tier: UrlTier,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlVerdict {
    pub verdict: Verdict,
    pub matches: Vec<UrlMatch>,
}

impl UrlVerdict {
    fn keep() -> Self {
        Self {
            verdict: Verdict::Keep,
            matches: Vec::new(),
        }
    }
}

fn alnum_words(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty())
}

fn compact(s: &str) -> String {
    s.chars().filter(|c| c.is_alphanumeric()).collect()
}

/// Word-list scoring. Strict words match anywhere in the URL once all
/// separators are removed; hard words must equal a whole alphanumeric run;
/// soft words count whole-word hits and reject at `soft_threshold`.
pub fn score_url(url: &str, lists: &ScoringWordLists) -> Result<UrlVerdict, UrlError> {
    let n = normalize_url(url)?;
    Ok(score_normalized(&n, lists))
}

fn score_normalized(n: &NormalizedUrl, lists: &ScoringWordLists) -> UrlVerdict {
    let mut matches = Vec::new();

    let squashed = compact(&n.full_lower);
    for w in &lists.strict_subword {
        let w = compact(w);
        if !w.is_empty() && squashed.contains(w.as_str()) {
            matches.push(UrlMatch {
                tier: UrlTier::Strict,
                word: w,
            });
        }
    }

    let words: Vec<&str> = alnum_words(&n.full_lower).collect();
    for w in &lists.hard_whole_word {
        if words.iter().any(|u| u == w) {
            matches.push(UrlMatch {
                tier: UrlTier::Hard,
                word: w.clone(),
            });
        }
    }

    let mut soft_hits = 0;
    for u in &words {
        if lists.soft_words.iter().any(|w| w == u) {
            soft_hits += 1;
            matches.push(UrlMatch {
                tier: UrlTier::Soft,
                word: (*u).to_owned(),
            });
        }
    }

    let reject = matches.iter().any(|m| m.tier != UrlTier::Soft)
        || (lists.soft_threshold > 0 && soft_hits >= lists.soft_threshold);
    UrlVerdict {
        verdict: if reject {
            Verdict::Reject(RejectReason::UrlWordScore)
        } else {
            Verdict::Keep
        },
        matches,
    }
}

/// All URL rules in fixed order: blocklist, then word score, then curated
/// source exclusion. The first rule that fires decides the reason.
pub fn url_gate(
    url: &str,
    blocklist: &DomainBlocklist,
    lists: &ScoringWordLists,
    hq_domains: &DomainSet,
) -> Result<UrlVerdict, UrlError> {
    let n = normalize_url(url)?;
    if blocklist.matching(&n.host).is_some() {
        return Ok(UrlVerdict {
            verdict: Verdict::Reject(RejectReason::UrlBlocklisted),
            matches: Vec::new(),
        });
    }
    let scored = score_normalized(&n, lists);
    if !scored.verdict.is_keep() {
        return Ok(scored);
    }
    if hq_domains.matching(&n.host).is_some() {
        return Ok(UrlVerdict {
            verdict: Verdict::Reject(RejectReason::UrlHqExcluded),
            matches: scored.matches,
        });
    }
    Ok(UrlVerdict {
        matches: scored.matches,
        ..UrlVerdict::keep()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    #[test]
    fn normalizes_case_and_scheme() {
        let n = normalize_url("HTTP://Foo.Example.com/A?x=1").unwrap();
        assert_eq!(n.host, "foo.example.com");
        assert_eq!(n.full_lower, "foo.example.com/a?x=1");
        assert_eq!(n.registrable_domain, "example.com");
        assert_eq!(normalize_url("example.com").unwrap().host, "example.com");
    }

    #[test]
    fn strips_userinfo_port_and_slashes() {
        let n = normalize_url("https://user:pw@Shop.Example.co.uk:8443/x").unwrap();
        assert_eq!(n.host, "shop.example.co.uk");
        assert_eq!(n.registrable_domain, "example.co.uk");
        assert_eq!(normalize_url("//cdn.example.org/a").unwrap().host, "cdn.example.org");
        assert_eq!(normalize_url("http://10.0.0.1/").unwrap().registrable_domain, "10.0.0.1");
    }

    #[test]
    fn rejects_garbage() {
        for u in ["", "   ", "http://", "http://exa mple.com", "http://a..b/", "http://x:abc/", "http://a://b"] {
            assert!(normalize_url(u).is_err(), "{u:?}");
        }
    }

    #[test]
    fn blocklist_walks_parents() {
        let mut bl = DomainBlocklist::new();
        bl.insert("bad.example", "adult");
        assert!(domain_blocked("http://bad.example/x", &bl).unwrap());
        assert!(domain_blocked("sub.bad.example", &bl).unwrap());
        assert!(!domain_blocked("notbad.example", &bl).unwrap());
        assert!(!domain_blocked("good.example", &DomainBlocklist::new()).unwrap());
        assert_eq!(bl.category_of("bad.example"), Some("adult"));
        bl.remove("bad.example");
        assert!(!domain_blocked("bad.example", &bl).unwrap());
    }

    #[test]
    fn strict_matches_split_words() {
        let lists = ScoringWordLists::default();
        let v = score_url("http://example.com/groupsexvideos", &lists).unwrap();
        assert_eq!(v.verdict, Verdict::Reject(RejectReason::UrlWordScore));
        assert_eq!(v.matches[0].tier, UrlTier::Strict);
        let lists = ScoringWordLists::from_lists("bannedsubword", "", "");
        let v = score_url("http://foobann.edsub-wo.rdbar.com/any/bar", &lists).unwrap();
        assert!(!v.verdict.is_keep());
    }

    #[test]
    fn hard_needs_whole_word() {
        let lists = ScoringWordLists::default();
        let v = score_url("http://www.foo.porn-bar.com", &lists).unwrap();
        assert_eq!(v.matches, [UrlMatch { tier: UrlTier::Hard, word: "porn".into() }]);
        assert!(!v.verdict.is_keep());
        assert!(score_url("http://www.pornography-history.example", &lists).unwrap().verdict.is_keep());
        let with_ass = ScoringWordLists::from_lists("", "ass", "sex");
        let v = score_url("http://massachusetts.example.com/sex-ed", &with_ass).unwrap();
        assert!(v.verdict.is_keep());
        assert_eq!(v.matches.len(), 1);
    }

    #[test]
    fn soft_needs_two_hits() {
        let lists = ScoringWordLists::default();
        assert!(score_url("http://example.com/sex-education", &lists).unwrap().verdict.is_keep());
        let v = score_url("http://www.foo.sex-bar-webcam.com", &lists).unwrap();
        assert_eq!(v.verdict, Verdict::Reject(RejectReason::UrlWordScore));
        assert_eq!(v.matches.len(), 2);
    }

    #[test]
    fn hq_table_is_excluded() {
        let hq = DomainSet::default_hq();
        assert_eq!(hq.len(), 16);
        assert!(hq_excluded("en.wikipedia.org/wiki/X", &hq).unwrap());
        assert!(hq_excluded("arxiv.org/abs/1234", &hq).unwrap());
        assert!(!hq_excluded("example.org", &hq).unwrap());
        assert!(!hq_excluded("nih.gov", &hq).unwrap());
    }

    #[test]
    fn gate_order_is_fixed() {
        let mut bl = DomainBlocklist::new();
        bl.insert("wikipedia.org", "adult");
        let hq = DomainSet::default_hq();
        let lists = ScoringWordLists::default();
        let v = url_gate("https://en.wikipedia.org/wiki/porn", &bl, &lists, &hq).unwrap();
        assert_eq!(v.verdict, Verdict::Reject(RejectReason::UrlBlocklisted));
        let v = url_gate("https://en.wikipedia.org/wiki/porn", &DomainBlocklist::new(), &lists, &hq)
            .unwrap();
        assert_eq!(v.verdict, Verdict::Reject(RejectReason::UrlWordScore));
        let v = url_gate("https://en.wikipedia.org/wiki/x", &DomainBlocklist::new(), &lists, &hq).unwrap();
        assert_eq!(v.verdict, Verdict::Reject(RejectReason::UrlHqExcluded));
        let v = url_gate("https://blog.example.net/post", &bl, &lists, &hq).unwrap();
        assert_eq!(v.verdict, Verdict::Keep);
        let v = url_gate("http://www.foo.sex-webcam.com", &bl, &lists, &hq).unwrap();
        assert_eq!(v.verdict, Verdict::Reject(RejectReason::UrlWordScore));
    }

    fn label() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["a", "b", "ab", "ex", "co", "uk", "com", "x-y"]).prop_map(String::from)
    }

    fn host() -> impl Strategy<Value = String> {
        prop::collection::vec(label(), 1..5).prop_map(|l| l.join("."))
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(scheme in prop::sample::select(vec!["", "http://", "HTTPS://", "//"]),
                                   h in host(), path in "[A-Za-z0-9/?=&._-]{0,20}") {
            let url = format!("{scheme}{h}/{path}");
            let once = normalize_url(&url).unwrap();
            let twice = normalize_url(&once.full_lower).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn suffix_walk_matches_brute_force(h in host(), listed in prop::collection::vec(host(), 0..6)) {
            let mut set = DomainSet::new();
            for d in &listed { set.insert(d); }
            let brute = listed.iter().any(|d| h == *d || h.ends_with(&format!(".{d}")));
            prop_assert_eq!(set.matching(&h).is_some(), brute);
        }

        #[test]
        fn adding_words_never_unrejects(path in "[a-z-]{0,30}", extra in "[a-z]{1,6}", tier in 0usize..3) {
            let url = format!("http://site.example/{path}");
            let base = ScoringWordLists::from_lists("xvideos", "porn", "sex\nwebcam");
            let mut more = base.clone();
            match tier {
                0 => more.strict_subword.push(extra),
                1 => more.hard_whole_word.push(extra),
                _ => more.soft_words.push(extra),
            }
            let before = score_url(&url, &base).unwrap().verdict;
            let after = score_url(&url, &more).unwrap().verdict;
            prop_assert!(before.is_keep() || !after.is_keep());
        }
    }
}
