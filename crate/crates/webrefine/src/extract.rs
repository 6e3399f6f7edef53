//! Main-content extraction from HTML.
//!
//! The built-in extractor drops non-content elements, then walks down from
//! `<body>` into whichever child holds nearly all of the remaining text
//! weight, where weight is text length minus link text. Link-dominated
//! blocks inside the chosen region are dropped when rendering.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};

use ego_tree::iter::Edge;
use ego_tree::{NodeId, NodeRef};
use scraper::{Html, Node};
use webrefine_core::text::format_text;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionResult {
    pub text: String,
    pub extractor_id: String,
    /// Set when nothing but whitespace remains after formatting.
    pub discarded: bool,
}

impl ExtractionResult {
    fn new(raw: &str, extractor_id: &str) -> Self {
        let text = format_text(raw);
        let discarded = text.trim().is_empty();
        Self { text, extractor_id: extractor_id.to_owned(), discarded }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("unknown extractor {0:?}; use \"baseline\" or \"external:<command>\"")]
    UnknownExtractor(String),
    #[error("external extractor failed: {0}")]
    External(String),
}

pub trait Extractor: Send + Sync {
    fn id(&self) -> &str;
    fn extract(&self, html: &str) -> Result<ExtractionResult, ExtractError>;
}

/// Parses `baseline` or `external:<shell command>`.
pub fn extractor_from_spec(spec: &str) -> Result<Box<dyn Extractor>, ExtractError> {
    match spec.trim() {
        "baseline" => Ok(Box::new(BaselineExtractor)),
        s => match s.strip_prefix("external:") {
            Some(cmd) if !cmd.trim().is_empty() => Ok(Box::new(ExternalExtractor::new(cmd.trim()))),
            _ => Err(ExtractError::UnknownExtractor(s.to_owned())),
        },
    }
}

const DROPPED: &[&str] = &[
    "script", "style", "noscript", "template", "head", "nav", "header", "footer", "aside", "form", "iframe", "svg",
    "object", "canvas", "select", "button",
];

const BLOCKS: &[&str] = &[
    "address", "article", "blockquote", "body", "dd", "div", "dl", "dt", "figcaption", "figure", "h1", "h2", "h3",
    "h4", "h5", "h6", "hr", "html", "li", "main", "ol", "p", "pre", "section", "table", "td", "th", "tr", "ul",
];

/// Share of a node's weight a child must hold for the walk to descend.
const DESCEND_SHARE: f64 = 0.85;

#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineExtractor;

#[derive(Clone, Copy, Default)]
struct Weight {
    text: usize,
    link: usize,
}

impl Weight {
    fn score(self) -> usize {
        self.text - self.link
    }

    fn link_dense(self) -> bool {
        self.text > 0 && self.link * 2 > self.text
    }
}

fn element_name(node: NodeRef<'_, Node>) -> Option<&str> {
    node.value().as_element().map(|e| e.name())
}

fn weights(doc: &Html) -> HashMap<NodeId, Weight> {
    let mut w: HashMap<NodeId, Weight> = HashMap::new();
    for edge in doc.tree.root().traverse() {
        let Edge::Close(node) = edge else { continue };
        let Some(name) = element_name(node) else { continue };
        let mut total = Weight::default();
        if !DROPPED.contains(&name) {
            for child in node.children() {
                match child.value() {
                    Node::Text(t) => total.text += t.chars().filter(|c| !c.is_whitespace()).count(),
                    Node::Element(_) => {
                        let c = w.get(&child.id()).copied().unwrap_or_default();
                        total.text += c.text;
                        total.link += c.link;
                    }
                    _ => {}
                }
            }
            if name == "a" {
                total.link = total.text;
            }
        }
        w.insert(node.id(), total);
    }
    w
}

fn render(region: NodeRef<'_, Node>, weights: &HashMap<NodeId, Weight>) -> String {
    enum Step<'a> {
        Visit(NodeRef<'a, Node>),
        Break,
    }
    let mut out = String::new();
    let mut stack = vec![Step::Visit(region)];
    while let Some(step) = stack.pop() {
        let node = match step {
            Step::Break => {
                out.push('\n');
                continue;
            }
            Step::Visit(n) => n,
        };
        match node.value() {
            Node::Text(t) => {
                let mut prev_space = out.ends_with([' ', '\n']) || out.is_empty();
                for c in t.chars() {
                    if c.is_whitespace() {
                        if !prev_space {
                            out.push(' ');
                        }
                        prev_space = true;
                    } else {
                        out.push(c);
                        prev_space = false;
                    }
                }
            }
            Node::Element(e) => {
                let name = e.name();
                if DROPPED.contains(&name) {
                    continue;
                }
                if name == "br" {
                    out.push('\n');
                    continue;
                }
                let block = BLOCKS.contains(&name);
                let weight = weights.get(&node.id()).copied().unwrap_or_default();
                if block && node.id() != region.id() && weight.link_dense() {
                    continue;
                }
                if block {
                    out.push('\n');
                    stack.push(Step::Break);
                }
                for child in node.children().rev() {
                    stack.push(Step::Visit(child));
                }
            }
            _ => {}
        }
    }
    out.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join("\n")
}

/// Extracts the main text of a page with the built-in density heuristic.
pub fn extract_main_content(html: &str) -> ExtractionResult {
    let doc = Html::parse_document(html);
    let weights = weights(&doc);
    let root = doc.root_element();
    let start = root
        .descendants()
        .find(|n| element_name(*n) == Some("body"))
        .unwrap_or(*root);
    let mut region = start;
    loop {
        let here = weights.get(&region.id()).copied().unwrap_or_default().score();
        let best = region
            .children()
            .filter(|c| c.value().is_element())
            .map(|c| (weights.get(&c.id()).copied().unwrap_or_default().score(), c))
            .max_by_key(|(s, _)| *s);
        match best {
            Some((s, child)) if here > 0 && s as f64 >= DESCEND_SHARE * here as f64 => region = child,
            _ => break,
        }
    }
    ExtractionResult::new(&render(region, &weights), "baseline")
}

impl Extractor for BaselineExtractor {
    fn id(&self) -> &str {
        "baseline"
    }

    fn extract(&self, html: &str) -> Result<ExtractionResult, ExtractError> {
        Ok(extract_main_content(html))
    }
}

/// Runs a shell command per page with the HTML on stdin and reads plain
/// text from stdout.
#[derive(Debug, Clone)]
pub struct ExternalExtractor {
    command: String,
    id: String,
}

impl ExternalExtractor {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_owned(), id: format!("external:{command}") }
    }
}

/// Runs `sh -c command`, feeding `input` on stdin, and returns stdout.
pub(crate) fn run_filter(command: &str, input: &[u8]) -> Result<Vec<u8>, String> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("spawning {command:?}: {e}"))?;
    let mut stdin = child.stdin.take().expect("stdin is piped");
    let output = std::thread::scope(|s| {
        s.spawn(move || {
            // a command that exits early closes the pipe; its status reports that
            let _ = stdin.write_all(input);
        });
        child.wait_with_output()
    })
    .map_err(|e| format!("waiting for {command:?}: {e}"))?;
    if !output.status.success() {
        let err = String::from_utf8_lossy(&output.stderr);
        return Err(format!("{command:?} exited with {}: {}", output.status, err.trim()));
    }
    Ok(output.stdout)
}

impl Extractor for ExternalExtractor {
    fn id(&self) -> &str {
        &self.id
    }

    fn extract(&self, html: &str) -> Result<ExtractionResult, ExtractError> {
        let out = run_filter(&self.command, html.as_bytes()).map_err(ExtractError::External)?;
        Ok(ExtractionResult::new(&String::from_utf8_lossy(&out), &self.id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_paragraph() {
        let r = extract_main_content("<html><body><p>hello world</p></body></html>");
        assert_eq!(r.text, "hello world");
        assert!(!r.discarded);
        assert_eq!(r.extractor_id, "baseline");
    }

    #[test]
    fn empty_body_is_discarded() {
        assert!(extract_main_content("<html><body></body></html>").discarded);
        assert!(extract_main_content("").discarded);
        assert!(extract_main_content("<body><script>var x = 1;</script><nav>Home About</nav></body>").discarded);
    }

    #[test]
    fn article_between_wrappers() {
        let html = r#"<html><head><title>T</title><style>p{}</style></head><body>
            <script>track()</script>
            <nav><a href="/">Home</a> <a href="/x">Section</a></nav>
            <div class="menu"><ul><li><a href="/a">Alpha</a></li><li><a href="/b">Beta</a></li></ul></div>
            <article><h1>Title here</h1><p>First paragraph of the story.</p>
            <p>Second one, with a <a href="/l">link</a> inside.</p></article>
            <!-- comment text -->
            <footer>Copyright notice</footer></body></html>"#;
        let r = extract_main_content(html);
        assert_eq!(r.text, "Title here\nFirst paragraph of the story.\nSecond one, with a link inside.");
    }

    #[test]
    fn blocks_become_lines_and_urls_go() {
        let html = "<body><div><p>one   two</p><p>see https://x.example/a now</p>three<br>four</div></body>";
        assert_eq!(extract_main_content(html).text, "one two\nsee  now\nthree\nfour");
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(extractor_from_spec("baseline").unwrap().id(), "baseline");
        assert_eq!(extractor_from_spec("external:cat").unwrap().id(), "external:cat");
        assert!(extractor_from_spec("trafilatura").is_err());
        assert!(extractor_from_spec("external:").is_err());
    }

    #[test]
    fn external_command() {
        let ex = extractor_from_spec("external:tr a-z A-Z").unwrap();
        assert_eq!(ex.extract("abc\n\n\n\ndef").unwrap().text, "ABC\n\nDEF");
        assert!(extractor_from_spec("external:exit 3").unwrap().extract("x").is_err());
    }
}
