use std::fmt;

/// Syntactic types: named presheaves, binary products, and exponentials.
/// `A^B` is the object of maps from `B` to `A`; `^` is left-associative and
/// binds tighter than `*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Named(String),
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    Exp(Box<TypeExpr>, Box<TypeExpr>), // Exp(body, exponent) = body^exponent
}

impl TypeExpr {
    pub fn named(s: &str) -> TypeExpr {
        TypeExpr::Named(s.to_string())
    }

    pub fn prod(l: TypeExpr, r: TypeExpr) -> TypeExpr {
        TypeExpr::Prod(Box::new(l), Box::new(r))
    }

    pub fn exp(body: TypeExpr, exponent: TypeExpr) -> TypeExpr {
        TypeExpr::Exp(Box::new(body), Box::new(exponent))
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &TypeExpr, f: &mut fmt::Formatter<'_>, in_exp: bool, atom: bool) -> fmt::Result {
            match t {
                TypeExpr::Named(n) => write!(f, "{n}"),
                TypeExpr::Exp(b, e) => {
                    if atom {
                        write!(f, "(")?;
                    }
                    // left operand may chain, right operand must be an atom
                    go(b, f, true, false)?;
                    write!(f, "^")?;
                    go(e, f, true, true)?;
                    if atom {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                TypeExpr::Prod(l, r) => {
                    if in_exp || atom {
                        write!(f, "(")?;
                    }
                    go(l, f, false, false)?;
                    write!(f, " * ")?;
                    // right operand parenthesized when it is itself a product
                    go(r, f, matches!(**r, TypeExpr::Prod(..)), false)?;
                    if in_exp || atom {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, f, false, false)
    }
}

/// Surface terms. Bare identifiers are resolved against the context, then
/// against declared constants; applied identifiers resolve to declared maps
/// or to evaluation of a function-typed variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Ident(String),
    /// `name(arg)`; multi-argument calls desugar to a left-nested pair.
    App(String, Box<Term>),
    /// `head(arg)` where the head is itself a compound term.
    EvApp(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
}

impl Term {
    pub fn ident(s: &str) -> Term {
        Term::Ident(s.to_string())
    }

    pub fn app(name: &str, arg: Term) -> Term {
        Term::App(name.to_string(), Box::new(arg))
    }

    pub fn app2(name: &str, a: Term, b: Term) -> Term {
        Term::App(name.to_string(), Box::new(Term::Pair(Box::new(a), Box::new(b))))
    }

    pub fn evapp(head: Term, arg: Term) -> Term {
        Term::EvApp(Box::new(head), Box::new(arg))
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, arg: &Term) -> fmt::Result {
    // flatten left-nested pairs into an argument list
    fn collect<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
        match t {
            Term::Pair(l, r) => {
                collect(l, out);
                out.push(r);
            }
            other => out.push(other),
        }
    }
    let mut args = Vec::new();
    collect(arg, &mut args);
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Ident(n) => write!(f, "{n}"),
            Term::App(n, arg) => {
                write!(f, "{n}")?;
                write_args(f, arg)
            }
            Term::EvApp(head, arg) => {
                write!(f, "{head}")?;
                write_args(f, arg)
            }
            Term::Pair(..) => write_args(f, self),
            Term::Fst(t) => {
                write!(f, "fst")?;
                write_args(f, t)
            }
            Term::Snd(t) => {
                write!(f, "snd")?;
                write_args(f, t)
            }
        }
    }
}

/// Surface formulas. `Pred` is membership of a term in a named subobject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Eq(Term, Term),
    Pred(String, Term),
    ForAll(String, TypeExpr, Box<Formula>),
    Exists(String, TypeExpr, Box<Formula>),
}

impl Formula {
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn pred(name: &str, t: Term) -> Formula {
        Formula::Pred(name.to_string(), t)
    }

    pub fn forall(x: &str, ty: TypeExpr, body: Formula) -> Formula {
        Formula::ForAll(x.to_string(), ty, Box::new(body))
    }

    pub fn exists(x: &str, ty: TypeExpr, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), ty, Box::new(body))
    }
}

// Precedence levels for printing: 0 quantifier, 1 implication, 2 disjunction,
// 3 conjunction, 4 atom. A node prints parenthesized when its level is below
// the level its position requires.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::ForAll(..) | Formula::Exists(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn write_at(f: &Formula, out: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    let parens = prec(f) < min;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Top => write!(out, "top")?,
        Formula::Bot => write!(out, "bot")?,
        Formula::And(l, r) => {
            write_at(l, out, 3)?;
            write!(out, " /\\ ")?;
            write_at(r, out, 4)?;
        }
        Formula::Or(l, r) => {
            write_at(l, out, 2)?;
            write!(out, " \\/ ")?;
            write_at(r, out, 3)?;
        }
        Formula::Implies(l, r) => {
            write_at(l, out, 2)?;
            write!(out, " => ")?;
            write_at(r, out, 1)?;
        }
        Formula::Eq(l, r) => write!(out, "{l} = {r}")?,
        Formula::Pred(n, t) => {
            write!(out, "{n}")?;
            write_args(out, t)?;
        }
        Formula::ForAll(x, ty, body) => {
            write!(out, "forall {x}:{ty}. ")?;
            write_at(body, out, 0)?;
        }
        Formula::Exists(x, ty, body) => {
            write!(out, "exists {x}:{ty}. ")?;
            write_at(body, out, 0)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, f, 0)
    }
}
