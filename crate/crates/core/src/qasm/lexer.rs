use super::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Numeric literal; `integral` is false if it had a fraction or exponent.
    Number { value: f64, integral: bool },
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

pub(crate) fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number { value, .. } => format!("number {value}"),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Splits `src` into tokens. Unknown characters produce diagnostics and are skipped.
pub(crate) fn lex(src: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let single = match b {
            b';' => Some(Tok::Semi),
            b',' => Some(Tok::Comma),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'+' => Some(Tok::Plus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Token { tok, start, end: i + 1 });
            i += 1;
            continue;
        }
        if b == b'-' {
            if bytes.get(i + 1) == Some(&b'>') {
                tokens.push(Token { tok: Tok::Arrow, start, end: i + 2 });
                i += 2;
            } else {
                tokens.push(Token { tok: Tok::Minus, start, end: i + 1 });
                i += 1;
            }
            continue;
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token { tok: Tok::Ident(src[start..i].to_string()), start, end: i });
            continue;
        }
        if b.is_ascii_digit() || (b == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut integral = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                integral = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            match text.parse::<f64>() {
                Ok(value) => tokens.push(Token { tok: Tok::Number { value, integral }, start, end: i }),
                Err(_) => diags.push(ParseDiagnostic::error(
                    format!("malformed number `{text}`"),
                    SourceSpan::from_offsets(src, start, i),
                )),
            }
            continue;
        }
        // skip one whole UTF-8 character
        let ch_len = src[i..].chars().next().map_or(1, char::len_utf8);
        i += ch_len;
        diags.push(ParseDiagnostic::error(
            format!("unexpected character `{}`", &src[start..i]),
            SourceSpan::from_offsets(src, start, i),
        ));
    }
    tokens.push(Token { tok: Tok::Eof, start: src.len(), end: src.len() });
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_numbers_and_arrow() {
        let (toks, diags) = lex("rxy (0, 2.5e-1) q[0] -> m[1]; // c");
        assert!(diags.is_empty());
        let kinds: Vec<Tok> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(kinds[2], Tok::Number { value: 0.0, integral: true });
        assert_eq!(kinds[4], Tok::Number { value: 0.25, integral: false });
        assert!(kinds.contains(&Tok::Arrow));
        assert_eq!(kinds.last(), Some(&Tok::Eof));
    }

    #[test]
    fn unknown_character_is_diagnosed() {
        let (_, diags) = lex("x q[0] $;");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].span.column, 8);
    }
}
