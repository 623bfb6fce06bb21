//! Tokenizing and label escaping shared by the line-oriented text formats.

use std::borrow::Cow;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    /// A name; `escaped` is set when it was written with a leading backslash
    /// and must be read as a literal label rather than a reference.
    Ident { text: String, escaped: bool },
    Punct(char),
}

fn is_punct(c: char) -> bool {
    matches!(c, '(' | ')' | ',' | ':')
}

fn is_reserved(s: &str) -> bool {
    if s == "_" || s == "->" || s.starts_with('$') || s == "start" {
        return true;
    }
    let mut chars = s.chars();
    let Some(first) = chars.next() else { return true };
    if !matches!(first, 'A' | 'H' | 'R' | 'V' | 'X' | 'y') {
        return false;
    }
    let rest = chars.as_str();
    let rest = rest
        .strip_suffix("_h")
        .or_else(|| rest.strip_suffix("_p"))
        .unwrap_or(rest);
    !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
}

/// Renders a label so that it reads back as that label.
pub fn escape(label: &str) -> Cow<'_, str> {
    let needs_char = |c: char| c == '\\' || c == '>' || c.is_whitespace() || is_punct(c);
    if !is_reserved(label) && !label.chars().any(needs_char) {
        return Cow::Borrowed(label);
    }
    let mut out = String::with_capacity(label.len() + 2);
    let mut first = true;
    for c in label.chars() {
        if (first && is_reserved(label)) || needs_char(c) {
            out.push('\\');
        }
        out.push(c);
        first = false;
    }
    Cow::Owned(out)
}

pub fn tokenize(line: &str, offset: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut it = line.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if is_punct(c) {
            it.next();
            out.push(Token::Punct(c));
            continue;
        }
        let mut text = String::new();
        let escaped = c == '\\';
        while let Some(&(_, c)) = it.peek() {
            if c.is_whitespace() || is_punct(c) {
                break;
            }
            it.next();
            if c == '\\' {
                match it.next() {
                    Some((_, e)) => text.push(e),
                    None => {
                        return Err(Error::Syntax {
                            offset: offset + i,
                            message: "dangling escape".into(),
                        })
                    }
                }
            } else {
                text.push(c);
            }
        }
        out.push(Token::Ident { text, escaped });
    }
    Ok(out)
}

/// Cursor over the tokens of one line.
pub struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    offset: usize,
}

impl Cursor {
    pub fn new(line: &str, offset: usize) -> Result<Cursor> {
        Ok(Cursor {
            tokens: tokenize(line, offset)?,
            pos: 0,
            offset,
        })
    }

    pub fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset,
            message: format!("{} (token {})", message.into(), self.pos + 1),
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    pub fn ident(&mut self) -> Result<(String, bool)> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Ident { text, escaped }) => {
                self.pos += 1;
                Ok((text, escaped))
            }
            _ => self.err("expected a name"),
        }
    }

    pub fn expect_arrow(&mut self) -> Result<()> {
        match self.ident()? {
            (t, false) if t == "->" => Ok(()),
            _ => self.err("expected '->'"),
        }
    }

    pub fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("trailing tokens")
        }
    }
}

/// Parses an unescaped reference `<prefix><k>` and returns `k`.
pub fn reference(text: &str, escaped: bool, prefix: &str) -> Option<u32> {
    if escaped {
        return None;
    }
    let digits = text.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Iterates non-blank, non-comment lines with their byte offsets.
pub fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split_inclusive('\n').filter_map(move |raw| {
        let at = offset;
        offset += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((at, line))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escape_roundtrip() {
        for s in ["a", "A1", "_", "x:y", "a b", "R3_h", "$1", "\\", "A", "Ax1", "->"] {
            let e = escape(s);
            let toks = tokenize(&e, 0).unwrap();
            assert_eq!(toks.len(), 1, "{s} -> {e}");
            match &toks[0] {
                Token::Ident { text, escaped } => {
                    assert_eq!(text, s);
                    if is_reserved(s) {
                        assert!(*escaped);
                    }
                }
                t => panic!("{t:?}"),
            }
        }
        assert_eq!(escape("A"), "A");
        assert_eq!(escape("A12"), "\\A12");
    }

    #[test]
    fn references() {
        assert_eq!(reference("A12", false, "A"), Some(12));
        assert_eq!(reference("A12", true, "A"), None);
        assert_eq!(reference("Ab", false, "A"), None);
    }
}
