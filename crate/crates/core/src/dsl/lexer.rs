use super::DslError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u32),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Arrow,
    Define,
    Dot,
    Caret,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Define => f.write_str("`:=`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Caret => f.write_str("`^`"),
        }
    }
}

/// Line and column, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let mut adv = 1;
        match c {
            '\n' => {
                line += 1;
                col = 0;
            }
            c if c.is_whitespace() => {}
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i + adv < chars.len() && chars[i + adv] != '\n' {
                    adv += 1;
                }
            }
            '{' => out.push((Tok::LBrace, pos)),
            '}' => out.push((Tok::RBrace, pos)),
            '(' => out.push((Tok::LParen, pos)),
            ')' => out.push((Tok::RParen, pos)),
            ';' => out.push((Tok::Semi, pos)),
            ',' => out.push((Tok::Comma, pos)),
            '.' | '•' | '∙' => out.push((Tok::Dot, pos)),
            '^' => out.push((Tok::Caret, pos)),
            ':' if chars.get(i + 1) == Some(&'=') => {
                out.push((Tok::Define, pos));
                adv = 2;
            }
            ':' => out.push((Tok::Colon, pos)),
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, pos));
                adv = 2;
            }
            c if c.is_ascii_digit() => {
                while i + adv < chars.len() && chars[i + adv].is_ascii_digit() {
                    adv += 1;
                }
                let s: String = chars[i..i + adv].iter().collect();
                let n = s.parse().map_err(|_| DslError::Syntax {
                    line,
                    col,
                    msg: format!("integer out of range: {s}"),
                })?;
                out.push((Tok::Int(n), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                while i + adv < chars.len()
                    && (chars[i + adv].is_alphanumeric() || chars[i + adv] == '_')
                {
                    adv += 1;
                }
                out.push((Tok::Ident(chars[i..i + adv].iter().collect()), pos));
            }
            other => {
                return Err(DslError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += adv;
        col += adv;
    }
    Ok(out)
}
