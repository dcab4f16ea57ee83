//! Reuters-21578 SGML extraction.
//!
//! Each `<REUTERS ...>` element becomes one article. The title and body are
//! taken from its `<TEXT>` element; markup is stripped and character
//! entities are decoded. Byte offsets in errors refer to the raw file.

use std::path::Path;

use crate::{Error, Result};

const OPEN: &[u8] = b"<REUTERS";
const CLOSE: &[u8] = b"</REUTERS>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReutersArticle {
    /// The `NEWID` attribute, or `<file>:<ordinal>` when absent.
    pub id: String,
    pub text: String,
}

pub fn parse_reuters(bytes: &[u8], path: &Path) -> Result<Vec<ReutersArticle>> {
    let fail = |offset: usize, message: &str| Error::Sgml {
        path: path.to_path_buf(),
        offset,
        message: message.to_string(),
    };
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();

    let mut articles = Vec::new();
    let mut pos = 0;
    loop {
        let Some(start) = find_open_tag(bytes, pos, OPEN) else {
            if let Some(stray) = find(bytes, pos, CLOSE) {
                return Err(fail(stray, "</REUTERS> without matching <REUTERS>"));
            }
            break;
        };
        if let Some(stray) = find(&bytes[..start], pos, CLOSE) {
            return Err(fail(stray, "</REUTERS> without matching <REUTERS>"));
        }
        let tag_end = find(bytes, start, b">").ok_or_else(|| fail(start, "unterminated <REUTERS> tag"))?;
        let close = find(bytes, tag_end, CLOSE).ok_or_else(|| fail(start, "<REUTERS> element is never closed"))?;
        if let Some(nested) = find_open_tag(&bytes[..close], tag_end, OPEN) {
            return Err(fail(nested, "nested <REUTERS> element"));
        }

        let attrs = &bytes[start + OPEN.len()..tag_end];
        let id = attribute(attrs, b"NEWID").unwrap_or_else(|| format!("{file_name}:{}", articles.len() + 1));
        let text = article_text(bytes, tag_end + 1, close).map_err(|(off, msg)| fail(off, msg))?;
        articles.push(ReutersArticle { id, text });
        pos = close + CLOSE.len();
    }
    Ok(articles)
}

type Located<T> = std::result::Result<T, (usize, &'static str)>;

fn article_text(bytes: &[u8], from: usize, to: usize) -> Located<String> {
    let Some((text_start, text_end)) = element(bytes, from, to, b"TEXT")? else {
        return Ok(String::new());
    };
    let title = element(bytes, text_start, text_end, b"TITLE")?;
    let body = element(bytes, text_start, text_end, b"BODY")?;
    if title.is_none() && body.is_none() {
        return strip_markup(bytes, text_start, text_end);
    }
    let mut out = String::new();
    for (s, e) in [title, body].into_iter().flatten() {
        out.push_str(&strip_markup(bytes, s, e)?);
        out.push('\n');
    }
    Ok(out)
}

/// Content range of the first `<NAME ...>...</NAME>` in `bytes[from..to]`.
fn element(bytes: &[u8], from: usize, to: usize, name: &[u8]) -> Located<Option<(usize, usize)>> {
    let mut open = Vec::with_capacity(name.len() + 1);
    open.push(b'<');
    open.extend_from_slice(name);
    let mut close = b"</".to_vec();
    close.extend_from_slice(name);
    close.push(b'>');

    let window = &bytes[..to];
    let Some(start) = find_open_tag(window, from, &open) else {
        return Ok(None);
    };
    let tag_end = find(window, start, b">").ok_or((start, "unterminated tag"))?;
    let end = find(window, tag_end, &close).ok_or((start, "element is never closed"))?;
    Ok(Some((tag_end + 1, end)))
}

fn strip_markup(bytes: &[u8], from: usize, to: usize) -> Located<String> {
    let mut plain = Vec::with_capacity(to - from);
    let mut i = from;
    while i < to {
        if bytes[i] == b'<' {
            let close = find(&bytes[..to], i, b">").ok_or((i, "unterminated tag"))?;
            plain.push(b' ');
            i = close + 1;
        } else {
            plain.push(bytes[i]);
            i += 1;
        }
    }
    Ok(decode_entities(&String::from_utf8_lossy(&plain)))
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 8).and_then(|semi| {
            let ch = match &rest[1..semi] {
                "lt" => Some('<'),
                "gt" => Some('>'),
                "amp" => Some('&'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                ent => ent
                    .strip_prefix('#')
                    .and_then(|n| n.parse::<u32>().ok())
                    .and_then(char::from_u32),
            };
            ch.map(|c| (c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn find(haystack: &[u8], from: usize, needle: &[u8]) -> Option<usize> {
    if from >= haystack.len() {
        return None;
    }
    haystack[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

/// Finds `<NAME` followed by whitespace or `>`, so `<TEXT` does not match `<TEXTS`.
fn find_open_tag(haystack: &[u8], mut from: usize, open: &[u8]) -> Option<usize> {
    while let Some(p) = find(haystack, from, open) {
        match haystack.get(p + open.len()) {
            Some(b) if b.is_ascii_whitespace() || *b == b'>' => return Some(p),
            None => return Some(p),
            _ => from = p + 1,
        }
    }
    None
}

fn attribute(attrs: &[u8], name: &[u8]) -> Option<String> {
    let mut key = name.to_vec();
    key.extend_from_slice(b"=\"");
    let mut from = 0;
    while let Some(p) = find(attrs, from, &key) {
        if p == 0 || attrs[p - 1].is_ascii_whitespace() {
            let start = p + key.len();
            let end = find(attrs, start, b"\"")?;
            return Some(String::from_utf8_lossy(&attrs[start..end]).into_owned());
        }
        from = p + 1;
    }
    None
}
