use std::fmt;

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Underscore,
    Component,
    Variables,
    Actions,
    Events,
    Bool,
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Comma,
    Colon,
    LParen,
    RParen,
    BodyOpen,
    BodyClose,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Underscore => f.write_str("`_`"),
            Tok::Component => f.write_str("`component`"),
            Tok::Variables => f.write_str("`variables`"),
            Tok::Actions => f.write_str("`actions`"),
            Tok::Events => f.write_str("`events`"),
            Tok::Bool => f.write_str("`bool`"),
            Tok::True => f.write_str("`True`"),
            Tok::False => f.write_str("`False`"),
            Tok::Not => f.write_str("`\\not`"),
            Tok::And => f.write_str("`\\and`"),
            Tok::Or => f.write_str("`\\or`"),
            Tok::Implies => f.write_str("`\\implies`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::BodyOpen => f.write_str("`*[`"),
            Tok::BodyClose => f.write_str("`]`"),
            Tok::Arrow => f.write_str("`-->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        let mut it = self.chars.clone();
        s.chars().all(|c| it.next() == Some(c))
    }

    fn skip(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. `¬ ∧ ∨ ⊃` and `!` are accepted as operator aliases.
pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        if cur.starts_with("--") && !cur.starts_with("-->") {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                line,
                col,
            });
            return Ok(out);
        };
        let tok = if cur.starts_with("-->") {
            cur.skip(3);
            Tok::Arrow
        } else if cur.starts_with("->") {
            cur.skip(2);
            Tok::Arrow
        } else if cur.starts_with("*[") {
            cur.skip(2);
            Tok::BodyOpen
        } else if c == '\\' {
            cur.bump();
            let mut word = String::new();
            while let Some(c) = cur.peek().filter(char::is_ascii_alphabetic) {
                word.push(c);
                cur.bump();
            }
            match word.as_str() {
                "not" => Tok::Not,
                "and" => Tok::And,
                "or" => Tok::Or,
                "implies" => Tok::Implies,
                _ => {
                    return Err(SyntaxError {
                        line,
                        col,
                        found: format!("operator `\\{word}`"),
                        expected: vec!["`\\not`, `\\and`, `\\or` or `\\implies`".into()],
                    })
                }
            }
        } else if is_ident_start(c) {
            let mut word = String::new();
            while let Some(c) = cur.peek().filter(|c| is_ident_continue(*c)) {
                word.push(c);
                cur.bump();
            }
            match word.as_str() {
                "_" => Tok::Underscore,
                "component" => Tok::Component,
                "variables" => Tok::Variables,
                "actions" => Tok::Actions,
                "events" => Tok::Events,
                "bool" => Tok::Bool,
                "True" => Tok::True,
                "False" => Tok::False,
                _ => Tok::Ident(word),
            }
        } else {
            cur.bump();
            match c {
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ']' => Tok::BodyClose,
                '!' | '¬' => Tok::Not,
                '∧' => Tok::And,
                '∨' => Tok::Or,
                '⊃' => Tok::Implies,
                other => {
                    return Err(SyntaxError {
                        line,
                        col,
                        found: format!("character `{other}`"),
                        expected: vec![],
                    })
                }
            }
        };
        out.push(Token { tok, line, col });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_comments() {
        assert_eq!(
            kinds("a --> b -- trailing comment\n c -> d"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::Ident("c".into()),
                Tok::Arrow,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("component X\n  *[ ]").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        assert_eq!((toks[2].line, toks[2].col), (2, 3));
        assert_eq!((toks[3].line, toks[3].col), (2, 6));
    }

    #[test]
    fn bad_operator() {
        let err = tokenize("x \\xor y").unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }

    #[test]
    fn aliases() {
        assert_eq!(
            kinds("!h ¬l")[..4],
            [
                Tok::Not,
                Tok::Ident("h".into()),
                Tok::Not,
                Tok::Ident("l".into())
            ]
        );
    }
}
