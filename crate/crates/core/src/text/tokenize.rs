//! Whitespace tokenizer for short, informal journal text.
//!
//! Text is split on Unicode whitespace, leading and trailing punctuation is
//! stripped from each chunk, and chunks that were pure punctuation are
//! dropped. Emoji are split off into their own tokens so that `"great😀"`
//! yields `great` and `😀`. Internal punctuation (`don't`, `e-mail`, `10:30`)
//! stays inside the token.

use super::lemma::lemmatize;

/// One token of a moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    /// Slice of the source text.
    pub surface: &'a str,
    /// Lowercase canonical form; never empty, never contains whitespace.
    pub lemma: String,
    /// 0-based index in the token sequence.
    pub position: usize,
    /// Byte offset of `surface` in the source text.
    pub offset: usize,
}

impl Token<'_> {
    /// True when this token opens a sentence: it is the first token or the
    /// text before it (ignoring whitespace) ends in `.`, `!` or `?`.
    pub fn starts_sentence(&self, source: &str) -> bool {
        let before = source[..self.offset].trim_end();
        before.is_empty() || before.ends_with(['.', '!', '?', '…'])
    }
}

const EXTRA_PUNCT: &[char] = &[
    '“', '”', '‘', '’', '«', '»', '—', '–', '…', '¡', '¿', '·', '•', '„', '‚', '‹', '›',
];

pub(crate) fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCT.contains(&c)
}

/// Emoji code points plus the joiners and modifiers that glue emoji
/// sequences together.
pub(crate) fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF
        | 0x2600..=0x27BF
        | 0x2B00..=0x2BFF
        | 0x200D
        | 0xFE0F
        | 0x20E3)
}

fn strip_punct(chunk: &str, offset: usize) -> Option<(&str, usize)> {
    let start = chunk.find(|c: char| !is_punct(c))?;
    let end = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_punct(c))
        .map(|(i, c)| i + c.len_utf8())?;
    Some((&chunk[start..end], offset + start))
}

/// Splits a whitespace-free chunk into alternating word and emoji runs.
fn split_emoji(chunk: &str, offset: usize, out: &mut Vec<(usize, usize)>) {
    let mut run_start = 0;
    let mut run_is_emoji = None;
    for (i, c) in chunk.char_indices() {
        let e = is_emoji(c);
        match run_is_emoji {
            Some(prev) if prev != e => {
                out.push((offset + run_start, offset + i));
                run_start = i;
            }
            _ => {}
        }
        run_is_emoji = Some(e);
    }
    if run_is_emoji.is_some() {
        out.push((offset + run_start, offset + chunk.len()));
    }
}

/// Tokenizes `text`. Empty or punctuation-only text yields no tokens.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut spans = Vec::new();
    for chunk in text.split_whitespace() {
        let offset = chunk.as_ptr() as usize - text.as_ptr() as usize;
        let mut pieces = Vec::new();
        split_emoji(chunk, offset, &mut pieces);
        for (s, e) in pieces {
            if let Some((piece, at)) = strip_punct(&text[s..e], s) {
                spans.push((at, at + piece.len()));
            }
        }
    }
    spans
        .into_iter()
        .enumerate()
        .map(|(position, (s, e))| {
            let surface = &text[s..e];
            Token {
                surface,
                lemma: lemmatize(surface),
                position,
                offset: s,
            }
        })
        .collect()
}

/// Lemma sequence of `text`, the form every matcher and featurizer works on.
pub fn lemmas(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.lemma).collect()
}
