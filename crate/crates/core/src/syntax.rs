//! Tokenizer and small parsing helpers shared by the textual wiring form
//! and the workspace language.

use std::fmt;

use crate::context::{Context, TypeSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub msg: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.msg)
    }
}

const PUNCTS: [&str; 14] = ["->", "(", ")", "{", "}", "[", "]", ",", ";", ":", ".", "|", "+", "="];

/// Splits `src` into tokens. `#` and `//` start comments running to the
/// end of the line. The result always ends with [`Tok::Eof`].
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Int(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(LexError {
                            pos,
                            msg: "unterminated string literal".into(),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token { tok: Tok::Punct(p), pos });
            }
            None => {
                return Err(LexError {
                    pos,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

/// A cursor over a token list with the usual expect/accept helpers.
pub struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, at: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    pub fn peek_at(&self, k: usize) -> &Token {
        &self.toks[(self.at + k).min(self.toks.len() - 1)]
    }

    pub fn pos(&self) -> Pos {
        self.peek().pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub fn accept(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, p: &str) -> Result<Pos, LexError> {
        if self.is_punct(p) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Pos, LexError> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn ident(&mut self) -> Result<(String, Pos), LexError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn int(&mut self) -> Result<(usize, Pos), LexError> {
        match &self.peek().tok {
            Tok::Int(s) => {
                let pos = self.pos();
                let v = s.parse::<usize>().map_err(|_| LexError {
                    pos,
                    msg: format!("integer `{s}` is too large"),
                })?;
                self.bump();
                Ok((v, pos))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub fn unexpected(&self, wanted: &str) -> LexError {
        LexError {
            pos: self.pos(),
            msg: format!("expected {wanted}, found {}", self.peek().tok),
        }
    }
}

/// Parses a context literal `(x, y | supp z, w)`.
pub fn context_literal(cur: &mut Cursor) -> Result<Context, LexError> {
    cur.expect("(")?;
    let mut typing = Vec::new();
    let mut extra = Vec::new();
    if !cur.is_punct(")") && !cur.is_punct("|") {
        loop {
            typing.push(TypeSymbol::new(&cur.ident()?.0));
            if !cur.accept(",") {
                break;
            }
        }
    }
    if cur.accept("|") {
        cur.expect_keyword("supp")?;
        loop {
            extra.push(TypeSymbol::new(&cur.ident()?.0));
            if !cur.accept(",") {
                break;
            }
        }
    }
    cur.expect(")")?;
    Ok(Context::new(typing, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_kinds() {
        let toks = tokenize("wire G1.2 -> d1; # c\n  \"a\\\"b\"").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("wire".into()),
                Tok::Ident("G1".into()),
                Tok::Punct("."),
                Tok::Int("2".into()),
                Tok::Punct("->"),
                Tok::Ident("d1".into()),
                Tok::Punct(";"),
                Tok::Str("a\"b".into()),
                Tok::Eof,
            ]
        );
        assert_eq!(toks[4].pos, Pos { line: 1, col: 11 });
        assert_eq!(toks[7].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn context_literals_round_trip_display() {
        for src in ["()", "(x)", "(x, y, x)", "(| supp w)", "(x | supp w, z)"] {
            let mut cur = Cursor::new(tokenize(src).unwrap());
            let ctx = context_literal(&mut cur).unwrap();
            assert!(cur.at_eof());
            assert_eq!(ctx.to_string(), src);
        }
    }

    #[test]
    fn bad_character() {
        let e = tokenize("x\n  @").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 3 });
    }
}
