//! A small, lenient HTML tokenizer. It does not build a tree; it streams
//! open/close/text events in document order and tolerates broken markup
//! (unclosed tags, stray closers, bare ampersands). Script and style
//! content is consumed silently, comments and declarations are skipped,
//! attribute values are entity-decoded.

/// Elements that never have content or a close tag.
pub const VOID_ELEMENTS: [&str; 14] = [
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

/// Elements whose raw content is consumed without tokenizing.
const RAW_TEXT_ELEMENTS: [&str; 2] = ["script", "style"];

#[derive(Debug, Clone, PartialEq)]
pub enum Event<'a> {
    Open {
        name: String,
        attrs: Vec<(String, String)>,
        self_closing: bool,
    },
    Close {
        name: String,
    },
    /// Raw text between tags; entities are NOT yet decoded.
    Text(&'a str),
}

/// Decodes a small set of named entities plus numeric references. Unknown
/// entities pass through untouched. Non-breaking spaces become ordinary
/// spaces so downstream whitespace normalization treats them uniformly.
pub fn decode_entities(input: &str) -> String {
    if !input.contains('&') {
        return input.to_string();
    }
    let mut out = String::with_capacity(input.len());
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'&' {
            let start = i;
            while i < bytes.len() && bytes[i] != b'&' {
                i += 1;
            }
            out.push_str(&input[start..i]);
            continue;
        }
        let rest = &input[i..];
        let semi = match rest.char_indices().take(12).find(|&(_, c)| c == ';') {
            Some((pos, _)) => pos,
            None => {
                out.push('&');
                i += 1;
                continue;
            }
        };
        let body = &rest[1..semi];
        let decoded: Option<String> = if let Some(num) = body.strip_prefix('#') {
            let code = if let Some(hex) = num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
                u32::from_str_radix(hex, 16).ok()
            } else {
                num.parse::<u32>().ok()
            };
            code.and_then(char::from_u32).map(String::from)
        } else {
            match body {
                "amp" => Some("&".into()),
                "lt" => Some("<".into()),
                "gt" => Some(">".into()),
                "quot" => Some("\"".into()),
                "apos" => Some("'".into()),
                "nbsp" => Some(" ".into()),
                "copy" => Some("\u{a9}".into()),
                "reg" => Some("\u{ae}".into()),
                "trade" => Some("\u{2122}".into()),
                "ndash" => Some("\u{2013}".into()),
                "mdash" => Some("\u{2014}".into()),
                "hellip" => Some("\u{2026}".into()),
                "lsquo" => Some("\u{2018}".into()),
                "rsquo" => Some("\u{2019}".into()),
                "ldquo" => Some("\u{201c}".into()),
                "rdquo" => Some("\u{201d}".into()),
                _ => None,
            }
        };
        match decoded {
            Some(s) => {
                out.push_str(&s);
                i += semi + 1;
            }
            None => {
                out.push('&');
                i += 1;
            }
        }
    }
    out
}

fn is_name_start(b: u8) -> bool {
    b.is_ascii_alphabetic()
}

fn is_name_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'-' || b == b':'
}

/// Finds `</name` case-insensitively at or after `from`; returns the byte
/// index of its `<`.
fn find_raw_close(bytes: &[u8], from: usize, name: &str) -> Option<usize> {
    let needle = name.as_bytes();
    let mut i = from;
    while i + 2 + needle.len() <= bytes.len() {
        if bytes[i] == b'<' && bytes[i + 1] == b'/' && bytes[i + 2..i + 2 + needle.len()].eq_ignore_ascii_case(needle)
        {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn skip_past(bytes: &[u8], mut i: usize, target: u8) -> usize {
    while i < bytes.len() && bytes[i] != target {
        i += 1;
    }
    (i + 1).min(bytes.len())
}

/// Parses an open tag starting at the byte after `<`. Returns (name,
/// attrs, self_closing, index after `>`).
fn parse_open_tag(html: &str, start: usize) -> (String, Vec<(String, String)>, bool, usize) {
    let bytes = html.as_bytes();
    let mut i = start;
    while i < bytes.len() && is_name_char(bytes[i]) {
        i += 1;
    }
    let name = html[start..i].to_ascii_lowercase();
    let mut attrs = Vec::new();
    let mut self_closing = false;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return (name, attrs, self_closing, i);
        }
        match bytes[i] {
            b'>' => return (name, attrs, self_closing, i + 1),
            b'/' => {
                self_closing = true;
                i += 1;
            }
            _ => {
                let attr_start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !matches!(bytes[i], b'=' | b'>' | b'/') {
                    i += 1;
                }
                let attr_name = html[attr_start..i].to_ascii_lowercase();
                while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                let mut value = String::new();
                if i < bytes.len() && bytes[i] == b'=' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    if i < bytes.len() && (bytes[i] == b'"' || bytes[i] == b'\'') {
                        let quote = bytes[i];
                        i += 1;
                        let value_start = i;
                        while i < bytes.len() && bytes[i] != quote {
                            i += 1;
                        }
                        value = decode_entities(&html[value_start..i]);
                        i = (i + 1).min(bytes.len());
                    } else {
                        let value_start = i;
                        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' {
                            i += 1;
                        }
                        value = decode_entities(&html[value_start..i]);
                    }
                }
                if !attr_name.is_empty() {
                    attrs.push((attr_name, value));
                }
            }
        }
    }
}

/// Streams tokens to `sink`. Never fails: anything unrecognized degrades
/// to text.
pub fn tokenize<'a, F: FnMut(Event<'a>)>(html: &'a str, mut sink: F) {
    let bytes = html.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            let start = i;
            while i < bytes.len() && bytes[i] != b'<' {
                i += 1;
            }
            sink(Event::Text(&html[start..i]));
            continue;
        }
        // At '<'. Decide what kind of markup, if any.
        if bytes[i..].starts_with(b"<!--") {
            match html[i + 4..].find("-->") {
                Some(end) => i += 4 + end + 3,
                None => i = bytes.len(),
            }
            continue;
        }
        if i + 1 < bytes.len() && (bytes[i + 1] == b'!' || bytes[i + 1] == b'?') {
            i = skip_past(bytes, i, b'>');
            continue;
        }
        if i + 1 < bytes.len() && bytes[i + 1] == b'/' {
            let name_start = i + 2;
            let mut j = name_start;
            while j < bytes.len() && is_name_char(bytes[j]) {
                j += 1;
            }
            let name = html[name_start..j].to_ascii_lowercase();
            i = skip_past(bytes, j, b'>');
            if !name.is_empty() {
                sink(Event::Close { name });
            }
            continue;
        }
        if i + 1 < bytes.len() && is_name_start(bytes[i + 1]) {
            let (name, attrs, self_closing, next) = parse_open_tag(html, i + 1);
            i = next;
            let raw = RAW_TEXT_ELEMENTS.contains(&name.as_str()) && !self_closing;
            sink(Event::Open {
                name: name.clone(),
                attrs,
                self_closing,
            });
            if raw {
                // Swallow everything up to the matching close tag.
                match find_raw_close(bytes, i, &name) {
                    Some(close_at) => {
                        i = skip_past(bytes, close_at, b'>');
                        sink(Event::Close { name });
                    }
                    None => i = bytes.len(),
                }
            }
            continue;
        }
        // A bare '<' that opens nothing: literal text.
        let start = i;
        i += 1;
        while i < bytes.len() && bytes[i] != b'<' {
            i += 1;
        }
        sink(Event::Text(&html[start..i]));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn events(html: &str) -> Vec<Event<'_>> {
        let mut out = Vec::new();
        tokenize(html, |e| out.push(e));
        out
    }

    #[test]
    fn basic_open_text_close() {
        let ev = events("<p>hi</p>");
        assert_eq!(ev.len(), 3);
        assert!(matches!(&ev[0], Event::Open { name, .. } if name == "p"));
        assert!(matches!(&ev[1], Event::Text("hi")));
        assert!(matches!(&ev[2], Event::Close { name } if name == "p"));
    }

    #[test]
    fn attributes_parsed_and_decoded() {
        let ev = events(r#"<a href="x?a=1&amp;b=2" CLASS='nav item' data-x=plain>t</a>"#);
        match &ev[0] {
            Event::Open { name, attrs, .. } => {
                assert_eq!(name, "a");
                assert_eq!(attrs[0], ("href".into(), "x?a=1&b=2".into()));
                assert_eq!(attrs[1], ("class".into(), "nav item".into()));
                assert_eq!(attrs[2], ("data-x".into(), "plain".into()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn comments_and_doctype_skipped() {
        let ev = events("<!DOCTYPE html><!-- note --><p>a</p>");
        assert!(matches!(&ev[0], Event::Open { name, .. } if name == "p"));
    }

    #[test]
    fn script_content_swallowed() {
        let ev = events("<script>if (a < b) { x(\"<p>\"); }</script><p>ok</p>");
        let texts: Vec<&str> = ev
            .iter()
            .filter_map(|e| match e {
                Event::Text(t) => Some(*t),
                _ => None,
            })
            .collect();
        assert_eq!(texts, vec!["ok"]);
    }

    #[test]
    fn unclosed_script_swallows_rest() {
        let ev = events("<script>var x = 1;<p>gone</p>");
        assert_eq!(ev.len(), 1);
    }

    #[test]
    fn bare_angle_bracket_is_text() {
        let ev = events("a < b and <p>x</p>");
        assert!(matches!(&ev[0], Event::Text("a ")));
        assert!(matches!(&ev[1], Event::Text("< b and ")));
        assert!(matches!(&ev[2], Event::Open { name, .. } if name == "p"));
    }

    #[test]
    fn self_closing_flag() {
        let ev = events("<br/><img src=x />");
        assert!(matches!(&ev[0], Event::Open { self_closing: true, .. }));
        assert!(matches!(&ev[1], Event::Open { self_closing: true, .. }));
    }

    #[test]
    fn entity_decoding() {
        assert_eq!(decode_entities("a &amp; b"), "a & b");
        assert_eq!(decode_entities("&lt;tag&gt;"), "<tag>");
        assert_eq!(decode_entities("x&nbsp;y"), "x y");
        assert_eq!(decode_entities("&#65;&#x42;"), "AB");
        assert_eq!(decode_entities("5 &unknown; & 6"), "5 &unknown; & 6");
        assert_eq!(decode_entities("no entities"), "no entities");
    }

    #[test]
    fn case_insensitive_close_for_raw_text() {
        let ev = events("<STYLE>p{}</StYlE><p>v</p>");
        let texts: Vec<&str> = ev
            .iter()
            .filter_map(|e| match e {
                Event::Text(t) => Some(*t),
                _ => None,
            })
            .collect();
        assert_eq!(texts, vec!["v"]);
    }
}
