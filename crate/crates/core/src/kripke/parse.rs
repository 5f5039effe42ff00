//! Surface syntax for formulas and types.
//!
//! ```text
//! formula ::= "forall" ident ":" type "." formula
//!           | "exists" ident ":" type "." formula
//!           | or-formula ("=>" formula)?              right-associative
//! or-formula  ::= and-formula ("\/" and-formula)*     left-associative
//! and-formula ::= atom-formula ("/\" atom-formula)*   left-associative
//! atom-formula ::= "top" | "bot"
//!                | term "=" term
//!                | name "(" term ("," term)* ")"      subobject membership
//!                | "(" formula ")"
//! term ::= aterm ("(" term ("," term)* ")")*          application, postfix
//! aterm ::= ident
//!         | "fst" "(" term ")" | "snd" "(" term ")"
//!         | "(" term ("," term)+ ")"                  pair (left-nested)
//!         | "(" term ")"
//! type ::= factor ("*" factor)*                       left-associative
//! factor ::= tatom ("^" tatom)*                       left-associative
//! tatom ::= ident | "(" type ")"
//! ```
//!
//! Multi-argument applications `f(a, b, c)` abbreviate a single left-nested
//! pair argument. `forall`, `exists`, `top`, `bot`, `fst`, and `snd` are
//! reserved. Printing produces exactly this grammar back, and parsing a
//! printed formula returns the original tree.

use crate::error::{Error, Result};
use crate::kripke::ast::{Formula, Term, TypeExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LPar,
    RPar,
    Comma,
    Dot,
    Colon,
    Eq,
    Caret,
    Star,
    And,
    Or,
    Implies,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((i, Tok::LPar));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RPar));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            ':' => {
                toks.push((i, Tok::Colon));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Implies));
                    i += 2;
                } else {
                    toks.push((i, Tok::Eq));
                    i += 1;
                }
            }
            '/' => {
                if bytes.get(i + 1) == Some(&b'\\') {
                    toks.push((i, Tok::And));
                    i += 2;
                } else {
                    return Err(Error::ParseError {
                        offset: i,
                        details: "expected `/\\`".into(),
                    });
                }
            }
            '\\' => {
                if bytes.get(i + 1) == Some(&b'/') {
                    toks.push((i, Tok::Or));
                    i += 2;
                } else {
                    return Err(Error::ParseError {
                        offset: i,
                        details: "expected `\\/`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((start, Tok::Ident(input[start..i].to_string())));
            }
            _ => {
                return Err(Error::ParseError {
                    offset: i,
                    details: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(toks)
}

pub(crate) const KEYWORDS: [&str; 6] = ["forall", "exists", "top", "bot", "fst", "snd"];

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|&(o, _)| o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, details: impl Into<String>) -> Result<T> {
        Err(Error::ParseError {
            offset: self.offset(),
            details: details.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.bump() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err(format!("expected {what}"))
            }
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    // ---- types ----

    fn type_atom(&mut self) -> Result<TypeExpr> {
        match self.peek() {
            Some(Tok::LPar) => {
                self.pos += 1;
                let t = self.type_expr()?;
                self.expect(Tok::RPar, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(_)) => Ok(TypeExpr::Named(self.ident("type name")?)),
            _ => self.err("expected a type"),
        }
    }

    fn type_factor(&mut self) -> Result<TypeExpr> {
        let mut t = self.type_atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.type_atom()?;
            t = TypeExpr::exp(t, e);
        }
        Ok(t)
    }

    fn type_expr(&mut self) -> Result<TypeExpr> {
        let mut t = self.type_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let r = self.type_factor()?;
            t = TypeExpr::prod(t, r);
        }
        Ok(t)
    }

    // ---- terms ----

    fn call_args(&mut self) -> Result<Term> {
        // caller consumed `(`; parse a comma list and fold into pairs
        let mut arg = self.term()?;
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            let next = self.term()?;
            arg = Term::Pair(Box::new(arg), Box::new(next));
        }
        self.expect(Tok::RPar, "`)`")?;
        Ok(arg)
    }

    fn term_atom(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::LPar) => {
                self.pos += 1;
                let t = self.call_args()?; // pair or grouped term
                Ok(t)
            }
            Some(Tok::Ident(s)) if s == "fst" || s == "snd" => {
                self.pos += 1;
                self.expect(Tok::LPar, "`(`")?;
                // comma lists pair up, so fst(a, b) projects from (a, b)
                let arg = self.call_args()?;
                Ok(if s == "fst" {
                    Term::Fst(Box::new(arg))
                } else {
                    Term::Snd(Box::new(arg))
                })
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident("term")?;
                if self.peek() == Some(&Tok::LPar) {
                    self.pos += 1;
                    let arg = self.call_args()?;
                    Ok(Term::App(name, Box::new(arg)))
                } else {
                    Ok(Term::Ident(name))
                }
            }
            _ => self.err("expected a term"),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.term_atom()?;
        loop {
            // postfix application on compound heads
            let applies = self.peek() == Some(&Tok::LPar);
            if !applies {
                return Ok(t);
            }
            self.pos += 1;
            let arg = self.call_args()?;
            t = Term::EvApp(Box::new(t), Box::new(arg));
        }
    }

    // ---- formulas ----

    fn atom_formula(&mut self) -> Result<Formula> {
        if self.at_keyword("top") {
            self.pos += 1;
            return Ok(Formula::Top);
        }
        if self.at_keyword("bot") {
            self.pos += 1;
            return Ok(Formula::Bot);
        }
        if self.at_keyword("forall") || self.at_keyword("exists") {
            return self.err("quantifier must be parenthesized in operand position");
        }
        if self.peek() == Some(&Tok::LPar) {
            // Could be a parenthesized formula or a term in parentheses; try
            // the formula reading first and fall back on failure or when the
            // group is immediately used as a term.
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.peek() == Some(&Tok::RPar) {
                    self.pos += 1;
                    let used_as_term =
                        self.peek() == Some(&Tok::Eq) || self.peek() == Some(&Tok::LPar);
                    if !used_as_term {
                        return Ok(f);
                    }
                }
            }
            self.pos = save;
        }
        let t = self.term()?;
        if self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            let s = self.term()?;
            return Ok(Formula::Eq(t, s));
        }
        match t {
            Term::App(name, arg) => Ok(Formula::Pred(name, *arg)),
            _ => self.err("expected `=` or a predicate application"),
        }
    }

    fn and_formula(&mut self) -> Result<Formula> {
        let mut f = self.atom_formula()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let r = self.atom_formula()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn or_formula(&mut self) -> Result<Formula> {
        let mut f = self.and_formula()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let r = self.and_formula()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.at_keyword("forall") || self.at_keyword("exists") {
            let is_forall = self.at_keyword("forall");
            self.pos += 1;
            let x = self.ident("bound variable")?;
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.type_expr()?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.formula()?;
            return Ok(if is_forall {
                Formula::ForAll(x, ty, Box::new(body))
            } else {
                Formula::Exists(x, ty, Box::new(body))
            });
        }
        let f = self.or_formula()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.formula()?;
            // implication is right-associative but weaker than a quantifier
            // body, which the recursive call already handles
            return Ok(Formula::implies(f, rhs));
        }
        Ok(f)
    }
}

/// Parses a formula; the entire input must be consumed.
pub fn parse_formula(input: &str) -> Result<Formula> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: input.len(),
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

/// Parses a type expression; the entire input must be consumed.
pub fn parse_type(input: &str) -> Result<TypeExpr> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: input.len(),
    };
    let t = p.type_expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input after type");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::ast::{Formula as F, Term as T, TypeExpr as Ty};

    fn roundtrip_f(input: &str) -> Formula {
        let f = parse_formula(input).unwrap();
        let printed = f.to_string();
        let again = parse_formula(&printed).unwrap();
        assert_eq!(f, again, "print/parse mismatch for `{input}` -> `{printed}`");
        f
    }

    #[test]
    fn parses_connective_precedence() {
        let f = roundtrip_f("a = b /\\ c = d \\/ e = g => top");
        // => weakest, \/ next, /\ tightest
        match f {
            F::Implies(l, r) => {
                assert_eq!(*r, F::Top);
                match *l {
                    F::Or(a, _) => match *a {
                        F::And(..) => {}
                        other => panic!("expected /\\ under \\/, got {other:?}"),
                    },
                    other => panic!("expected \\/, got {other:?}"),
                }
            }
            other => panic!("expected =>, got {other:?}"),
        }
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = roundtrip_f("forall i:J. i = zero => i = one");
        match f {
            F::ForAll(_, _, body) => assert!(matches!(*body, F::Implies(..))),
            other => panic!("expected forall, got {other:?}"),
        }
    }

    #[test]
    fn multi_argument_calls_are_nested_pairs() {
        let f = parse_formula("meet(i, j, k) = i").unwrap();
        match f {
            F::Eq(T::App(name, arg), _) => {
                assert_eq!(name, "meet");
                assert_eq!(
                    *arg,
                    T::Pair(
                        Box::new(T::Pair(
                            Box::new(T::ident("i")),
                            Box::new(T::ident("j"))
                        )),
                        Box::new(T::ident("k"))
                    )
                );
            }
            other => panic!("unexpected parse {other:?}"),
        }
        roundtrip_f("meet(i, j, k) = i");
    }

    #[test]
    fn pairs_versus_grouping() {
        roundtrip_f("(i, j) = p");
        roundtrip_f("fst(p) = i /\\ snd(p) = j");
        // a comma list under fst/snd is the pair it projects from
        assert_eq!(
            parse_formula("fst(i, j) = i").unwrap(),
            F::eq(
                T::Fst(Box::new(T::Pair(
                    Box::new(T::ident("i")),
                    Box::new(T::ident("j"))
                ))),
                T::ident("i")
            )
        );
        roundtrip_f("fst(i, j) = i");
        let f = parse_formula("(i = j)").unwrap();
        assert!(matches!(f, F::Eq(..)));
        // A parenthesized formula used as an operand
        roundtrip_f("(i = j => top) => bot");
    }

    #[test]
    fn evaluation_application_on_variables() {
        let f = parse_formula("a(i) = join(a(zero), meet(i, a(one)))").unwrap();
        match &f {
            F::Eq(T::App(head, _), _) => assert_eq!(head, "a"),
            other => panic!("unexpected parse {other:?}"),
        }
        roundtrip_f("a(i) = join(a(zero), meet(i, a(one)))");
        // compound head
        roundtrip_f("fst(p)(x) = y");
    }

    #[test]
    fn type_syntax_roundtrips() {
        for s in ["J", "J^J", "J^J^J", "J^(J^J)", "J * J", "(J * J)^J", "J^(I * J) * K"] {
            let t = parse_type(s).unwrap();
            let printed = t.to_string();
            let again = parse_type(&printed).unwrap();
            assert_eq!(t, again, "`{s}` printed as `{printed}`");
        }
        assert_eq!(
            parse_type("J^J^J").unwrap(),
            Ty::exp(Ty::exp(Ty::named("J"), Ty::named("J")), Ty::named("J"))
        );
        assert_eq!(
            parse_type("J * K^L").unwrap(),
            Ty::prod(Ty::named("J"), Ty::exp(Ty::named("K"), Ty::named("L")))
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_formula("forall x J. top").is_err());
        assert!(parse_formula("x =").is_err());
        assert!(parse_formula("top top").is_err());
        assert!(parse_formula("x").is_err());
        assert!(parse_formula("(x, y)").is_err());
        assert!(parse_formula("forall top:J. top").is_err());
    }

    #[test]
    fn quantifiers_in_operand_position_need_parens() {
        assert!(parse_formula("forall i:J. top /\\ bot").is_ok()); // body is the conjunction
        assert!(parse_formula("(forall i:J. top) /\\ bot").is_ok());
        assert!(parse_formula("top /\\ forall i:J. top").is_err());
    }
}
