//! Turns raw model replies into candidate sentences.
//!
//! Replies are free text, so extraction is heuristic:
//!
//! - Variant lists (paraphrase, multi-target): numbered or bulleted lines win
//!   when present; otherwise every non-empty line is a candidate.
//! - Stories: either interleaved (source line, translation line, ...) or two
//!   blocks (all source lines, separator, all translation lines). Interleaving
//!   is recognised by the dominant script of each line alternating.
//!
//! Parsing never invents text: every returned sentence is a substring of the
//! reply with list markers and wrapping quotes removed.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

static LIST_MARKER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:\d{1,3}[.)]|[-*•])\s+").unwrap());

const QUOTE_PAIRS: [(char, char); 8] = [
    ('"', '"'),
    ('\'', '\''),
    ('“', '”'),
    ('„', '“'),
    ('‘', '’'),
    ('«', '»'),
    ('「', '」'),
    ('『', '』'),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unparseable reply: {reason}")]
pub struct UnparseableReply {
    pub reason: String,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedVariants {
    pub items: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedStory {
    /// `(story sentence, translation)` in story order.
    pub pairs: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

fn is_list_line(line: &str) -> bool {
    LIST_MARKER.is_match(line)
}

/// Strips list markers and wrapping quotes until neither is left.
pub fn clean_item(line: &str) -> &str {
    let mut s = line.trim();
    loop {
        let before = s.len();
        if let Some(m) = LIST_MARKER.find(s) {
            s = s[m.end()..].trim();
        }
        for (open, close) in QUOTE_PAIRS {
            if s.chars().count() >= 2 && s.starts_with(open) && s.ends_with(close) {
                s = s[open.len_utf8()..s.len() - close.len_utf8()].trim();
                break;
            }
        }
        if s.len() == before {
            return s;
        }
    }
}

fn count_warning(expected: usize, found: usize, noun: &str) -> Option<String> {
    (expected != found).then(|| format!("expected {expected} {noun}, found {found}"))
}

pub fn parse_variants(raw: &str, expected_n: usize) -> Result<ParsedVariants, UnparseableReply> {
    let lines: Vec<&str> = raw.lines().filter(|l| !l.trim().is_empty()).collect();
    let listed = lines.iter().any(|l| is_list_line(l));
    let mut items: Vec<String> = lines
        .into_iter()
        .filter(|l| !listed || is_list_line(l))
        .map(clean_item)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    if items.is_empty() {
        return Err(UnparseableReply {
            reason: "no sentences found".into(),
            raw: raw.to_string(),
        });
    }
    let warnings = count_warning(expected_n, items.len(), "items").into_iter().collect();
    items.truncate(expected_n);
    Ok(ParsedVariants { items, warnings })
}

/// Coarse writing-system class used to tell source lines from translations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Script {
    Hangul,
    Latin,
    Han,
    Kana,
    Cyrillic,
    Greek,
    Arabic,
    Other,
}

fn char_script(c: char) -> Option<Script> {
    let cp = c as u32;
    let script = match cp {
        0x1100..=0x11FF | 0x3130..=0x318F | 0xA960..=0xA97F | 0xAC00..=0xD7AF | 0xD7B0..=0xD7FF => {
            Script::Hangul
        }
        0x3040..=0x30FF | 0x31F0..=0x31FF => Script::Kana,
        0x4E00..=0x9FFF | 0x3400..=0x4DBF | 0xF900..=0xFAFF => Script::Han,
        0x0400..=0x052F => Script::Cyrillic,
        0x0370..=0x03FF => Script::Greek,
        0x0600..=0x06FF => Script::Arabic,
        _ if c.is_ascii_alphabetic() => Script::Latin,
        0x00C0..=0x024F | 0x1E00..=0x1EFF if c.is_alphabetic() => Script::Latin,
        _ if c.is_alphabetic() => Script::Other,
        _ => return None,
    };
    Some(script)
}

/// Majority script over the alphabetic characters of a line.
pub fn dominant_script(line: &str) -> Option<Script> {
    let mut counts: Vec<(Script, usize)> = Vec::new();
    for s in line.chars().filter_map(char_script) {
        match counts.iter_mut().find(|(k, _)| *k == s) {
            Some((_, n)) => *n += 1,
            None => counts.push((s, 1)),
        }
    }
    // first-seen wins ties
    let mut best: Option<(Script, usize)> = None;
    for (s, n) in counts {
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((s, n));
        }
    }
    best.map(|(s, _)| s)
}

fn is_separator(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.chars().all(|c| matches!(c, '-' | '=' | '*' | '_' | '#' | '~' | '—'))
}

/// Section labels such as `Story:` or `German translation:`.
fn is_label(line: &str) -> bool {
    let t = line.trim();
    (t.ends_with(':') || t.ends_with('：')) && t.split_whitespace().count() <= 4
}

fn alternates(classes: &[Option<Script>]) -> bool {
    if classes.len() < 2 {
        return false;
    }
    let (a, b) = (classes[0], classes[1]);
    match (a, b) {
        (Some(a), Some(b)) if a != b => classes
            .iter()
            .enumerate()
            .all(|(i, c)| *c == Some(if i % 2 == 0 { a } else { b })),
        _ => false,
    }
}

/// Splits content lines into a source block and a translation block.
fn split_blocks<'a>(groups: &[Vec<&'a str>]) -> (Vec<&'a str>, Vec<&'a str>) {
    if groups.len() == 2 {
        return (groups[0].clone(), groups[1].clone());
    }
    if groups.len() > 2 {
        // merge neighbouring groups written in the same script
        let mut merged: Vec<(Option<Script>, Vec<&str>)> = Vec::new();
        for g in groups {
            let script = dominant_script(&g.join(" "));
            match merged.last_mut() {
                Some((s, lines)) if *s == script => lines.extend(g.iter().copied()),
                _ => merged.push((script, g.clone())),
            }
        }
        if merged.len() == 2 {
            return (merged[0].1.clone(), merged[1].1.clone());
        }
    }
    let lines: Vec<&str> = groups.iter().flatten().copied().collect();
    let classes: Vec<Option<Script>> = lines.iter().map(|l| dominant_script(l)).collect();
    let changes: Vec<usize> = (1..classes.len()).filter(|&i| classes[i] != classes[i - 1]).collect();
    let cut = match changes.as_slice() {
        [single] => *single,
        _ => lines.len().div_ceil(2),
    };
    (lines[..cut].to_vec(), lines[cut..].to_vec())
}

pub fn parse_story(raw: &str, expected_k: usize) -> Result<ParsedStory, UnparseableReply> {
    let mut groups: Vec<Vec<&str>> = vec![Vec::new()];
    for line in raw.lines() {
        if is_separator(line) {
            if !groups.last().is_some_and(Vec::is_empty) {
                groups.push(Vec::new());
            }
            continue;
        }
        if is_label(line) {
            continue;
        }
        let item = clean_item(line);
        if !item.is_empty() {
            groups.last_mut().expect("at least one group").push(item);
        }
    }
    groups.retain(|g| !g.is_empty());

    let lines: Vec<&str> = groups.iter().flatten().copied().collect();
    let classes: Vec<Option<Script>> = lines.iter().map(|l| dominant_script(l)).collect();
    let (sources, targets): (Vec<&str>, Vec<&str>) = if alternates(&classes) {
        let src = lines.iter().step_by(2).copied().collect();
        let tgt = lines.iter().skip(1).step_by(2).copied().collect();
        (src, tgt)
    } else if groups.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        split_blocks(&groups)
    };

    let mut pairs: Vec<(String, String)> = sources
        .iter()
        .zip(&targets)
        .map(|(s, t)| (s.to_string(), t.to_string()))
        .collect();
    if pairs.is_empty() {
        return Err(UnparseableReply {
            reason: "no story/translation pairs found".into(),
            raw: raw.to_string(),
        });
    }
    let mut warnings = Vec::new();
    if sources.len() != targets.len() {
        warnings.push(format!(
            "found {} story sentences but {} translations",
            sources.len(),
            targets.len()
        ));
    }
    if pairs.len() != expected_k {
        warnings.push(format!("expected {expected_k} pairs, matched {}", pairs.len()));
    }
    pairs.truncate(expected_k);
    Ok(ParsedStory { pairs, warnings })
}
