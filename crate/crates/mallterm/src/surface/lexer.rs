use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(String),
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Lt,
    Gt,
    Colon,
    Comma,
    Bar,
    Semi,
    Dot,
    Star,
    Percent,
    Eq,
    EqEq,
    FatArrow,
    Arrow,
    Turnstile,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Bar => "|",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Star => "*",
            Tok::Percent => "%",
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::FatArrow => "=>",
            Tok::Arrow => "->",
            Tok::Turnstile => "|-",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
    /// True when nothing but whitespace precedes the token on its line.
    pub line_start: bool,
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut line_start = true;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            line_start = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = (i, line, col);
        let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
        let (tok, len) = if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'') {
                j += 1;
            }
            (Tok::Ident(src[i..j].to_string()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            (Tok::Num(src[i..j].to_string()), j - i)
        } else {
            match two {
                "==" => (Tok::EqEq, 2),
                "=>" => (Tok::FatArrow, 2),
                "->" => (Tok::Arrow, 2),
                "|-" => (Tok::Turnstile, 2),
                _ => {
                    let t = match c {
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '[' => Tok::LBrack,
                        ']' => Tok::RBrack,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '<' => Tok::Lt,
                        '>' => Tok::Gt,
                        ':' => Tok::Colon,
                        ',' => Tok::Comma,
                        '|' => Tok::Bar,
                        ';' => Tok::Semi,
                        '.' => Tok::Dot,
                        '*' => Tok::Star,
                        '%' => Tok::Percent,
                        '=' => Tok::Eq,
                        _ => {
                            let ch_len = src[i..].chars().next().map_or(1, |ch| ch.len_utf8());
                            return Err(ParseError::new(
                                SourceSpan::new(i, i + ch_len, line, col, line, col + 1),
                                format!("unexpected character {:?}", &src[i..i + ch_len]),
                            ));
                        }
                    };
                    (t, 1)
                }
            }
        };
        i += len;
        col += len;
        out.push(Token {
            tok,
            span: SourceSpan::new(start.0, i, start.1, start.2, line, col),
            line_start,
        });
        line_start = false;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(src.len(), src.len(), line, col, line, col),
        line_start: false,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_char_tokens_win() {
        let toks: Vec<Tok> = lex("a == b => |- -> | =").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("a".into()),
                Tok::EqEq,
                Tok::Ident("b".into()),
                Tok::FatArrow,
                Tok::Turnstile,
                Tok::Arrow,
                Tok::Bar,
                Tok::Eq,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_primes() {
        let toks = lex("x' # note % not a par\n%").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("x'".into()));
        assert_eq!(toks[1].tok, Tok::Percent);
        assert!(toks[1].line_start);
        assert_eq!(toks[1].span.start_line, 2);
    }

    #[test]
    fn bad_character_has_span() {
        let e = lex("a $ b").unwrap_err();
        assert_eq!((e.span.start, e.span.end), (2, 3));
    }
}
