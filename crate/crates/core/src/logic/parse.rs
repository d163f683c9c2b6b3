//! Text syntax for formulas.
//!
//! ```text
//! φ ::= true | false | name(x, …) | x = y | !φ | φ & φ | φ | φ | φ -> φ
//!     | E x. φ | A x. φ | (φ)
//! ```
//!
//! Precedence is `!` > `&` > `|` > `->`; `&` and `|` associate to the left,
//! `->` to the right, and a quantifier's body extends as far right as
//! possible.

use super::formula::{and, exists, forall, implies, not, or, Formula};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Bang,
    Amp,
    Bar,
    Arrow,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let tok = if is_ident_char(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|&&c| is_ident_char(c)) {
                s.push(c);
                bump(&mut chars);
            }
            Tok::Ident(s)
        } else {
            bump(&mut chars);
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '=' => Tok::Eq,
                '!' | '¬' => Tok::Bang,
                '&' | '∧' => Tok::Amp,
                '|' | '∨' => Tok::Bar,
                '→' => Tok::Arrow,
                '-' if chars.peek() == Some(&'>') => {
                    bump(&mut chars);
                    Tok::Arrow
                }
                _ => {
                    return Err(Error::Syntax { line: l, column: col, message: format!("unexpected character {c:?}") })
                }
            }
        };
        out.push(Token { tok, line: l, column: col });
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("{s:?}"),
            Tok::End => "end of input".into(),
            t => format!("{t:?}").to_lowercase(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        if let Tok::Ident(s) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            Ok(s)
        } else {
            self.error(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.pos += 1;
            let right = self.formula()?;
            return Ok(implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.pos += 1;
            f = or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.pos += 1;
            f = and(f, self.unary()?);
        }
        Ok(f)
    }

    /// Whether the current token starts a quantifier: `E`/`A` followed by a
    /// variable (a relation named `E` is followed by a parenthesis).
    fn quantifier(&self) -> Option<bool> {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(q), Tok::Ident(_)) if q == "E" || q == "∃" => Some(true),
            (Tok::Ident(q), Tok::Ident(_)) if q == "A" || q == "∀" => Some(false),
            _ => None,
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        if let Some(is_exists) = self.quantifier() {
            self.pos += 1;
            let var = self.ident("a variable")?;
            self.expect(Tok::Dot, "'.' after the quantified variable")?;
            let body = self.formula()?;
            return Ok(if is_exists { exists(&var, body) } else { forall(&var, body) });
        }
        match self.peek().clone() {
            Tok::Bang => {
                self.pos += 1;
                Ok(not(self.unary()?))
            }
            Tok::LParen => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match (name.as_str(), self.peek()) {
                    ("true", t) if *t != Tok::LParen && *t != Tok::Eq => return Ok(Formula::True),
                    ("false", t) if *t != Tok::LParen && *t != Tok::Eq => return Ok(Formula::False),
                    _ => {}
                }
                match self.peek() {
                    Tok::LParen => {
                        self.pos += 1;
                        let mut args = vec![self.ident("a variable")?];
                        while *self.peek() == Tok::Comma {
                            self.pos += 1;
                            args.push(self.ident("a variable")?);
                        }
                        self.expect(Tok::RParen, "',' or ')' to close the argument list")?;
                        Ok(Formula::Rel { name, args })
                    }
                    Tok::Eq => {
                        self.pos += 1;
                        let right = self.ident("a variable after '='")?;
                        Ok(Formula::Eq { left: name, right })
                    }
                    _ => self.error(format!("expected '(' or '=' after {name:?}, found {}", self.describe())),
                }
            }
            _ => self.error(format!("expected a formula, found {}", self.describe())),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {} after the formula", p.describe()));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::{eq, rel};

    #[test]
    fn parses_quantifier_prefixes() {
        let f = parse_formula("E x. A y. !succ(y,x)").unwrap();
        assert_eq!(f, exists("x", forall("y", not(rel("succ", ["y", "x"])))));
        assert_eq!(parse_formula("E x. x = x").unwrap(), exists("x", eq("x", "x")));
    }

    #[test]
    fn relation_named_e() {
        let f = parse_formula("E x. E y. (E(x,y) & !(x = y))").unwrap();
        assert_eq!(f, exists("x", exists("y", and(rel("E", ["x", "y"]), not(eq("x", "y"))))));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("p(x) | q(x) & r(x) -> s(x) -> t(x)").unwrap();
        let want = implies(
            or(rel("p", ["x"]), and(rel("q", ["x"]), rel("r", ["x"]))),
            implies(rel("s", ["x"]), rel("t", ["x"])),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn reports_unclosed_argument_list() {
        match parse_formula("E x. succ(x") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 12)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("E x.\n  p(x) &") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 9)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
