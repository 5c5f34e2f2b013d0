use thiserror::Error;

use super::{ConstantFamily, Formula, Rel, Signature, Term};
use crate::catalog::point::{Point, Sort};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown symbol `{symbol}` at byte {pos}")]
    UnknownSymbol { pos: usize, symbol: String },
    #[error("`{symbol}` at byte {pos} takes {expected} argument(s), got {found}")]
    Arity { pos: usize, symbol: String, expected: usize, found: usize },
    #[error("bad parameter literal `{text}` at byte {pos}")]
    BadLiteral { pos: usize, text: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Literal(String),
    LParen,
    RParen,
    Comma,
    Lt,
    Eq,
    End,
}

const KEYWORDS: [&str; 6] = ["not", "and", "or", "implies", "exists", "forall"];

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            '<' => {
                out.push((Tok::Lt, i));
                i += 1;
            }
            '=' => {
                out.push((Tok::Eq, i));
                i += 1;
            }
            '@' => {
                if bytes.get(i + 1) != Some(&b'{') {
                    return Err(ParseError::Syntax { pos: i, message: "expected `{` after `@`".into() });
                }
                let close = text[i..]
                    .find('}')
                    .ok_or_else(|| ParseError::Syntax { pos: i, message: "unterminated parameter literal".into() })?;
                out.push((Tok::Literal(text[i + 2..i + close].to_string()), i));
                i += close + 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::Syntax { pos: i, message: format!("unexpected character {c:?}") });
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'s Signature,
}

/// Parses the concrete syntax against `sig`.
///
/// Precedence from loosest: `implies` (right associative), `or`, `and`
/// (both left associative), then `not` and the quantifiers, whose bodies
/// extend over a single unary formula, usually parenthesized.
pub fn parse_formula<Q: Scalar>(text: &str, sig: &Signature) -> Result<Formula<Q>, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, at: 0, sig };
    let phi = p.implication()?;
    match p.peek() {
        Tok::End => Ok(phi),
        other => Err(p.syntax(format!("unexpected {other:?} after formula"))),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax(&self, message: String) -> ParseError {
        ParseError::Syntax { pos: self.pos(), message }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {tok:?}, found {:?}", self.peek())))
        }
    }

    fn implication<Q: Scalar>(&mut self) -> Result<Formula<Q>, ParseError> {
        let lhs = self.disjunction()?;
        if self.keyword("implies") {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction<Q: Scalar>(&mut self) -> Result<Formula<Q>, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.keyword("or") {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction<Q: Scalar>(&mut self) -> Result<Formula<Q>, ParseError> {
        let mut lhs = self.unary()?;
        while self.keyword("and") {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary<Q: Scalar>(&mut self) -> Result<Formula<Q>, ParseError> {
        if self.keyword("not") {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.keyword("exists") || self.keyword("forall") {
            let (kw, _) = self.bump();
            let var = self.variable()?;
            let body = self.unary()?;
            return Ok(match kw {
                Tok::Ident(k) if k == "exists" => Formula::exists(&var, body),
                _ => Formula::forall(&var, body),
            });
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.implication()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        self.atom()
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        let pos = self.pos();
        match self.bump() {
            (Tok::Ident(name), _) if is_variable_name(&name) => Ok(name),
            (tok, _) => Err(ParseError::Syntax { pos, message: format!("expected a variable, found {tok:?}") }),
        }
    }

    fn atom<Q: Scalar>(&mut self) -> Result<Formula<Q>, ParseError> {
        if let Tok::Ident(name) = self.peek().clone() {
            if name == "P1" || name == "P2" {
                let pos = self.pos();
                if self.sig.relation_arity(&name) != Some(1) {
                    return Err(ParseError::UnknownSymbol { pos, symbol: name });
                }
                self.bump();
                let args = self.arguments()?;
                if args.len() != 1 {
                    return Err(ParseError::Arity { pos, symbol: name, expected: 1, found: args.len() });
                }
                let sort = if name == "P1" { Sort::P1 } else { Sort::P2 };
                return Ok(Formula::Pred(sort, args.into_iter().next().unwrap()));
            }
        }
        let lhs = self.term()?;
        let rel = match self.peek() {
            Tok::Lt => Rel::Lt,
            Tok::Eq => Rel::Eq,
            other => return Err(self.syntax(format!("expected `<` or `=`, found {other:?}"))),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Formula::Atom(rel, lhs, rhs))
    }

    fn arguments<Q: Scalar>(&mut self) -> Result<Vec<Term<Q>>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term<Q: Scalar>(&mut self) -> Result<Term<Q>, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Literal(text) => {
                self.bump();
                let point = Point::parse_payload(&text)
                    .filter(|p| self.sig.admits(p))
                    .ok_or(ParseError::BadLiteral { pos, text })?;
                Ok(Term::Param(point))
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let expected = self
                        .sig
                        .function_arity(&name)
                        .ok_or_else(|| ParseError::UnknownSymbol { pos, symbol: name.clone() })?;
                    let args = self.arguments()?;
                    if args.len() != expected {
                        return Err(ParseError::Arity { pos, symbol: name, expected, found: args.len() });
                    }
                    return Ok(Term::Apply(name, args));
                }
                if let Some(index) = constant_index(&name) {
                    return match &self.sig.constants {
                        ConstantFamily::Indexed { .. } => Ok(Term::Const(index)),
                        ConstantFamily::None => Err(ParseError::UnknownSymbol { pos, symbol: name }),
                    };
                }
                if self.sig.function_arity(&name).is_some() {
                    return Err(ParseError::Arity { pos, symbol: name, expected: 1, found: 0 });
                }
                if !is_variable_name(&name) {
                    return Err(ParseError::Syntax { pos, message: format!("`{name}` cannot be used as a term") });
                }
                Ok(Term::Var(name))
            }
            other => Err(ParseError::Syntax { pos, message: format!("expected a term, found {other:?}") }),
        }
    }
}

fn constant_index(name: &str) -> Option<u64> {
    let digits = name.strip_prefix('c')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Identifiers usable as variables: not a keyword, not a constant name,
/// not a predicate name.
pub(crate) fn is_variable_name(name: &str) -> bool {
    !KEYWORDS.contains(&name) && constant_index(name).is_none() && name != "P1" && name != "P2"
}
