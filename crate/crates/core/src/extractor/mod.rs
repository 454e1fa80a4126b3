//! Boilerplate removal. Pages are segmented into flat, document-order
//! blocks at block-level elements, then a deterministic cascade keeps main
//! content and drops navigation, chrome and link farms.
//!
//! The cascade, in order: a block is boilerplate when any element on its
//! ancestor chain carries a chrome token (nav, footer, sidebar and
//! friends), or when more than a third of its characters are anchor text.
//! Short blocks (fewer than 10 words) survive only when both immediate
//! neighbors are strong keeps, which preserves headings inside body text
//! while shedding isolated link stubs.

pub mod html;

use std::collections::BTreeSet;

use crate::stopwords::Stopwords;
use crate::{Error, Result};

use html::{decode_entities, tokenize, Event, VOID_ELEMENTS};

/// Tokens on an ancestor chain that mark a block as page chrome.
pub const CHROME_TOKENS: [&str; 12] = [
    "nav", "navbar", "menu", "footer", "header", "banner", "sidebar", "cookie", "breadcrumb", "ad",
    "ads", "advert",
];

/// Elements that open a new block.
pub const BLOCK_ELEMENTS: [&str; 14] = [
    "p", "div", "li", "td", "h1", "h2", "h3", "h4", "h5", "h6", "section", "article", "blockquote",
    "pre",
];

/// Elements whose text content never reaches the output.
const SUPPRESSED_ELEMENTS: [&str; 3] = ["head", "noscript", "template"];

/// Maximum anchor-character share for a content block.
pub const LINK_FRACTION_LIMIT: f64 = 0.33;
/// Minimum words for a block to stand on its own.
pub const MIN_STANDALONE_WORDS: usize = 10;

/// One flat text region of a page, with the features the cascade looks at.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// Whitespace-normalized text (single spaces, no leading/trailing).
    pub text: String,
    /// Anchor-text characters over all characters, spaces included.
    pub link_char_fraction: f64,
    pub word_count: usize,
    pub stopword_fraction: f64,
    /// Lowercased tokens from tag names and id/class values of the block's
    /// ancestor chain, sorted.
    pub semantic_tokens: Vec<String>,
}

struct BlockBuilder {
    text: String,
    anchor_chars: usize,
    pending_space: Option<bool>,
    tokens: BTreeSet<String>,
}

impl BlockBuilder {
    fn new() -> Self {
        BlockBuilder {
            text: String::new(),
            anchor_chars: 0,
            pending_space: None,
            tokens: BTreeSet::new(),
        }
    }

    fn push_text(&mut self, decoded: &str, in_anchor: bool) {
        for c in decoded.chars() {
            if c.is_whitespace() {
                if !self.text.is_empty() {
                    self.pending_space.get_or_insert(in_anchor);
                }
                continue;
            }
            if let Some(space_in_anchor) = self.pending_space.take() {
                self.text.push(' ');
                if space_in_anchor {
                    self.anchor_chars += 1;
                }
            }
            self.text.push(c);
            if in_anchor {
                self.anchor_chars += 1;
            }
        }
    }

    fn note_break(&mut self, in_anchor: bool) {
        if !self.text.is_empty() {
            self.pending_space.get_or_insert(in_anchor);
        }
    }

    fn finish(&mut self, stopwords: &Stopwords) -> Option<Block> {
        if self.text.is_empty() {
            self.tokens.clear();
            self.pending_space = None;
            return None;
        }
        let text = std::mem::take(&mut self.text);
        let total_chars = text.chars().count();
        let words: Vec<&str> = text.split_whitespace().collect();
        let stop_count = words
            .iter()
            .filter(|w| {
                let cleaned: String = w.chars().filter(|c| c.is_alphanumeric()).flat_map(|c| c.to_lowercase()).collect();
                !cleaned.is_empty() && stopwords.contains(&cleaned)
            })
            .count();
        let block = Block {
            link_char_fraction: if total_chars == 0 {
                0.0
            } else {
                self.anchor_chars as f64 / total_chars as f64
            },
            word_count: words.len(),
            stopword_fraction: if words.is_empty() {
                0.0
            } else {
                stop_count as f64 / words.len() as f64
            },
            semantic_tokens: std::mem::take(&mut self.tokens).into_iter().collect(),
            text,
        };
        self.anchor_chars = 0;
        self.pending_space = None;
        Some(block)
    }
}

struct StackEntry {
    name: String,
    tokens: Vec<String>,
    is_anchor: bool,
    suppressed: bool,
    is_block: bool,
}

struct Segmenter<'s> {
    blocks: Vec<Block>,
    builder: BlockBuilder,
    stack: Vec<StackEntry>,
    anchor_depth: usize,
    suppress_depth: usize,
    stopwords: &'s Stopwords,
}

fn attr_tokens(name: &str, attrs: &[(String, String)]) -> Vec<String> {
    let mut tokens = vec![name.to_string()];
    for (attr, value) in attrs {
        if attr == "id" || attr == "class" {
            tokens.extend(
                value
                    .split(|c: char| !c.is_alphanumeric())
                    .filter(|t| !t.is_empty())
                    .map(str::to_lowercase),
            );
        }
    }
    tokens
}

impl<'s> Segmenter<'s> {
    fn new(stopwords: &'s Stopwords) -> Self {
        Segmenter {
            blocks: Vec::new(),
            builder: BlockBuilder::new(),
            stack: Vec::new(),
            anchor_depth: 0,
            suppress_depth: 0,
            stopwords,
        }
    }

    fn flush(&mut self) {
        if let Some(block) = self.builder.finish(self.stopwords) {
            self.blocks.push(block);
        }
    }

    fn pop_from(&mut self, index: usize) {
        if self.stack[index..].iter().any(|e| e.is_block) {
            self.flush();
        }
        for entry in self.stack.drain(index..) {
            if entry.is_anchor {
                self.anchor_depth -= 1;
            }
            if entry.suppressed {
                self.suppress_depth -= 1;
            }
        }
    }

    /// Closes elements HTML leaves implicitly open: a block start closes a
    /// top-of-stack p; li closes a previous li up to its list; table cells
    /// and rows close their predecessors up to the table.
    fn auto_close(&mut self, name: &str) {
        if BLOCK_ELEMENTS.contains(&name) && self.stack.last().is_some_and(|top| top.name == "p") {
            self.pop_from(self.stack.len() - 1);
        }
        let barrier: &[&str] = match name {
            "li" => &["ul", "ol", "menu"],
            "td" | "th" => &["tr", "table"],
            "tr" => &["table"],
            _ => return,
        };
        let closes: &[&str] = match name {
            "li" => &["li"],
            "td" | "th" => &["td", "th"],
            "tr" => &["tr", "td", "th"],
            _ => return,
        };
        for i in (0..self.stack.len()).rev() {
            let entry_name = self.stack[i].name.as_str();
            if barrier.contains(&entry_name) {
                break;
            }
            if closes.contains(&entry_name) {
                self.pop_from(i);
                break;
            }
        }
    }

    fn open(&mut self, name: String, attrs: Vec<(String, String)>, self_closing: bool) {
        if VOID_ELEMENTS.contains(&name.as_str()) {
            if name == "br" || name == "hr" {
                self.builder.note_break(self.anchor_depth > 0);
            }
            return;
        }
        self.auto_close(&name);
        let is_block = BLOCK_ELEMENTS.contains(&name.as_str());
        if is_block {
            self.flush();
        }
        let entry = StackEntry {
            tokens: attr_tokens(&name, &attrs),
            is_anchor: name == "a",
            suppressed: SUPPRESSED_ELEMENTS.contains(&name.as_str()),
            is_block,
            name,
        };
        if entry.is_anchor {
            self.anchor_depth += 1;
        }
        if entry.suppressed {
            self.suppress_depth += 1;
        }
        self.stack.push(entry);
        if self_closing {
            self.pop_from(self.stack.len() - 1);
        }
    }

    fn close(&mut self, name: &str) {
        if let Some(index) = self.stack.iter().rposition(|e| e.name == name) {
            self.pop_from(index);
        }
    }

    fn text(&mut self, raw: &str) {
        if self.suppress_depth > 0 {
            return;
        }
        let decoded = decode_entities(raw);
        if decoded.chars().any(|c| !c.is_whitespace()) {
            for entry in &self.stack {
                self.builder.tokens.extend(entry.tokens.iter().cloned());
            }
        }
        self.builder.push_text(&decoded, self.anchor_depth > 0);
    }
}

fn decode_page(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::ExtractionFailed(format!("page is not valid UTF-8: {e}")))
}

/// Segments a page into flat blocks in document order.
pub fn segment(bytes: &[u8]) -> Result<Vec<Block>> {
    let page = decode_page(bytes)?;
    let mut seg = Segmenter::new(Stopwords::bundled());
    tokenize(page, |event| match event {
        Event::Open {
            name,
            attrs,
            self_closing,
        } => seg.open(name, attrs, self_closing),
        Event::Close { name } => seg.close(&name),
        Event::Text(raw) => seg.text(raw),
    });
    seg.flush();
    Ok(seg.blocks)
}

fn is_chrome(block: &Block) -> bool {
    block.semantic_tokens.iter().any(|t| CHROME_TOKENS.contains(&t.as_str()))
}

/// Labels each block content or boilerplate via the cascade. Pass one
/// marks strong keeps (no chrome token, link fraction within bounds, at
/// least 10 words); pass two rescues short blocks sandwiched between two
/// strong keeps.
pub fn classify_blocks(blocks: Vec<Block>) -> Vec<(Block, bool)> {
    let strong: Vec<bool> = blocks
        .iter()
        .map(|b| !is_chrome(b) && b.link_char_fraction <= LINK_FRACTION_LIMIT && b.word_count >= MIN_STANDALONE_WORDS)
        .collect();
    let n = blocks.len();
    blocks
        .into_iter()
        .enumerate()
        .map(|(i, block)| {
            let keep = strong[i]
                || (!is_chrome(&block)
                    && block.link_char_fraction <= LINK_FRACTION_LIMIT
                    && i > 0
                    && i + 1 < n
                    && strong[i - 1]
                    && strong[i + 1]);
            (block, keep)
        })
        .collect()
}

/// Extracts main content: newline-joined content blocks in document order.
pub fn extract_main_text(bytes: &[u8]) -> Result<String> {
    let labeled = classify_blocks(segment(bytes)?);
    let kept: Vec<&str> = labeled
        .iter()
        .filter(|(_, keep)| *keep)
        .map(|(b, _)| b.text.as_str())
        .collect();
    if kept.is_empty() {
        return Err(Error::ExtractionEmpty);
    }
    Ok(kept.join("\n"))
}

/// Collects the href of every anchor on the page, entity-decoded, in
/// document order. Used for link cross-verification.
pub fn anchor_hrefs(bytes: &[u8]) -> Result<Vec<String>> {
    let page = decode_page(bytes)?;
    let mut hrefs = Vec::new();
    tokenize(page, |event| {
        if let Event::Open { name, attrs, .. } = event {
            if name == "a" {
                if let Some((_, value)) = attrs.iter().find(|(a, _)| a == "href") {
                    hrefs.push(value.clone());
                }
            }
        }
    });
    Ok(hrefs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(blocks: &[Block]) -> Vec<&str> {
        blocks.iter().map(|b| b.text.as_str()).collect()
    }

    #[test]
    fn two_paragraphs_two_blocks() {
        let blocks = segment(b"<p>hello</p><p>world</p>").unwrap();
        assert_eq!(texts(&blocks), vec!["hello", "world"]);
    }

    #[test]
    fn link_fraction_counts_spaces() {
        let blocks = segment(b"<div><a href=x>link</a> text</div>").unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].text, "link text");
        assert!((blocks[0].link_char_fraction - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn script_only_page_has_no_blocks() {
        let blocks = segment(b"<html><head><script>var x;</script></head></html>").unwrap();
        assert!(blocks.is_empty());
    }

    #[test]
    fn nested_blocks_split_flat() {
        let blocks = segment(b"<div>a<p>b</p>c</div>").unwrap();
        assert_eq!(texts(&blocks), vec!["a", "b", "c"]);
    }

    #[test]
    fn head_and_comment_content_suppressed() {
        let html = b"<html><head><title>Site</title></head><!-- x --><body><p>body text</p></body></html>";
        let blocks = segment(html).unwrap();
        assert_eq!(texts(&blocks), vec!["body text"]);
    }

    #[test]
    fn semantic_tokens_cover_ancestors() {
        let blocks = segment(br#"<div id="main-area" class="wide">  <p class="intro">x</p></div>"#).unwrap();
        assert_eq!(blocks.len(), 1);
        let t = &blocks[0].semantic_tokens;
        for expected in ["div", "main", "area", "wide", "p", "intro"] {
            assert!(t.contains(&expected.to_string()), "missing {expected} in {t:?}");
        }
    }

    #[test]
    fn entity_and_whitespace_normalization() {
        let blocks = segment(b"<p>a&nbsp;&nbsp;b\n\n  c &amp; d</p>").unwrap();
        assert_eq!(blocks[0].text, "a b c & d");
    }

    #[test]
    fn invalid_utf8_fails() {
        let err = segment(&[0x3c, 0x70, 0x3e, 0xff, 0xfe]).unwrap_err();
        assert!(matches!(err, Error::ExtractionFailed(_)));
    }

    fn long_sentence(n: usize) -> String {
        (0..n).map(|i| format!("word{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn cascade_traces() {
        let long = long_sentence(200);
        let html = format!(
            "<div class=\"content\"><p>{long}</p></div>\
             <div><a href=a>one</a> <a href=b>two</a> <a href=c>three four</a></div>\
             <div class=\"footer\"><p>{}</p></div>",
            long_sentence(50)
        );
        let labeled = classify_blocks(segment(html.as_bytes()).unwrap());
        let decisions: Vec<bool> = labeled.iter().map(|(_, k)| *k).collect();
        assert_eq!(decisions, vec![true, false, false]);
    }

    #[test]
    fn short_block_needs_both_strong_neighbors() {
        let a = long_sentence(20);
        let b = long_sentence(25);
        let html = format!("<p>{a}</p><h2>Section Two</h2><p>{b}</p><h2>Trailing Heading</h2>");
        let labeled = classify_blocks(segment(html.as_bytes()).unwrap());
        let keeps: Vec<bool> = labeled.iter().map(|(_, k)| *k).collect();
        assert_eq!(keeps, vec![true, true, true, false]);
    }

    #[test]
    fn extract_plain_paragraph() {
        let text = "This paragraph is the entire body of the page and easily stands alone.";
        let html = format!("<html><body><p>{text}</p></body></html>");
        assert_eq!(extract_main_text(html.as_bytes()).unwrap(), text);
    }

    #[test]
    fn link_only_page_is_empty() {
        let html = b"<ul><li><a href=a>one</a></li><li><a href=b>two</a></li></ul>";
        assert!(matches!(extract_main_text(html).unwrap_err(), Error::ExtractionEmpty));
    }

    fn chrome_wrapped(body: &str) -> String {
        format!(
            "<html><head><title>x</title></head><body>\
             <nav><ul><li><a href=\"/\">Home</a></li><li><a href=\"/about\">About</a></li></ul></nav>\
             <div class=\"breadcrumb\"><a href=\"/\">Home</a> / Privacy</div>\
             {body}\
             <div class=\"sidebar\"><p>{}</p></div>\
             <footer><p>Copyright 2020 Example Inc. All rights reserved worldwide by us.</p></footer>\
             </body></html>",
            long_sentence(30)
        )
    }

    #[test]
    fn chrome_robustness() {
        let body: String = (0..5).map(|i| format!("<p>{} tail{i}</p>", long_sentence(40))).collect();
        let bare = extract_main_text(format!("<body>{body}</body>").as_bytes()).unwrap();
        let wrapped = extract_main_text(chrome_wrapped(&body).as_bytes()).unwrap();
        let more_footers = extract_main_text(
            format!(
                "{}<div class=\"footer\"><a href=a>Terms</a> <a href=b>Imprint</a></div>",
                chrome_wrapped(&body)
            )
            .as_bytes(),
        )
        .unwrap();
        assert_eq!(bare, wrapped);
        assert_eq!(wrapped, more_footers);
    }

    #[test]
    fn output_is_subsequence_of_visible_text() {
        let html = chrome_wrapped("<p>Kept paragraph with more than ten words inside it for the rule.</p>");
        let all: String = segment(html.as_bytes()).unwrap().iter().map(|b| b.text.clone()).collect::<Vec<_>>().join("\n");
        let kept = extract_main_text(html.as_bytes()).unwrap();
        for line in kept.lines() {
            assert!(all.contains(line));
        }
    }

    #[test]
    fn paragraph_round_trip_lossless() {
        let paragraphs = [
            "First paragraph with enough words to stand entirely on its own here.",
            "Second paragraph also has plenty of words to stand on its own.",
            "Third paragraph closes the little document with yet more filler words here.",
        ];
        let html: String = paragraphs.iter().map(|p| format!("<p>{p}</p>")).collect();
        let blocks = segment(html.as_bytes()).unwrap();
        assert_eq!(texts(&blocks), paragraphs);
        assert_eq!(extract_main_text(html.as_bytes()).unwrap(), paragraphs.join("\n"));
    }

    #[test]
    fn broken_markup_tolerated() {
        let blocks = segment(b"<div><p>first paragraph never closed<p>second one follows here").unwrap();
        assert_eq!(texts(&blocks), vec!["first paragraph never closed", "second one follows here"]);
    }

    #[test]
    fn list_inside_menu_class_is_chrome() {
        let html = br#"<ul class="menu"><li>Products</li><li>Support</li></ul>"#;
        let labeled = classify_blocks(segment(html).unwrap());
        assert!(labeled.iter().all(|(_, keep)| !keep));
    }

    #[test]
    fn table_cells_are_blocks() {
        let blocks = segment(b"<table><tr><td>cell one</td><td>cell two</td></tr></table>").unwrap();
        assert_eq!(texts(&blocks), vec!["cell one", "cell two"]);
    }

    #[test]
    fn anchor_hrefs_in_order() {
        let html = br#"<a href="/one">1</a><p><a href='/two?a=1&amp;b=2'>2</a></p><a name=only>3</a>"#;
        let hrefs = anchor_hrefs(html).unwrap();
        assert_eq!(hrefs, vec!["/one".to_string(), "/two?a=1&b=2".to_string()]);
    }

    #[test]
    fn golden_fixture_token_f1() {
        // Twenty synthetic policy pages: known body text wrapped in chrome.
        // Token-level F1 of extracted vs. reference must be high.
        let mut total_f1 = 0.0;
        for page in 0..20 {
            let paragraphs: Vec<String> = (0..6)
                .map(|i| {
                    format!(
                        "Section {i} of page {page} explains how information is collected, stored, \
                         shared with partners and eventually deleted after the retention period ends."
                    )
                })
                .collect();
            let mut body = String::new();
            for (i, p) in paragraphs.iter().enumerate() {
                if i == 3 {
                    body.push_str("<h2>Data Retention</h2>");
                }
                body.push_str(&format!("<p>{p}</p>"));
            }
            let mut reference: Vec<&str> = paragraphs.iter().map(String::as_str).collect();
            reference.insert(3, "Data Retention");
            let reference = reference.join("\n");

            let extracted = extract_main_text(chrome_wrapped(&body).as_bytes()).unwrap();
            let ref_tokens: Vec<&str> = reference.split_whitespace().collect();
            let got_tokens: Vec<&str> = extracted.split_whitespace().collect();
            let mut ref_counts = std::collections::HashMap::new();
            for t in &ref_tokens {
                *ref_counts.entry(*t).or_insert(0usize) += 1;
            }
            let mut overlap = 0usize;
            for t in &got_tokens {
                if let Some(c) = ref_counts.get_mut(t) {
                    if *c > 0 {
                        *c -= 1;
                        overlap += 1;
                    }
                }
            }
            let precision = overlap as f64 / got_tokens.len() as f64;
            let recall = overlap as f64 / ref_tokens.len() as f64;
            total_f1 += 2.0 * precision * recall / (precision + recall);
        }
        assert!(total_f1 / 20.0 >= 0.95, "mean F1 {}", total_f1 / 20.0);
    }
}
