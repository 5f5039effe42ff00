use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{product, FinCategory, MorId, NatTrans, ObjId, Presheaf, Subobject};
use crate::kripke::ast::{Formula, Term, TypeExpr};
use crate::kripke::sig::{ResolvedType, Signature, TypeShape};

/// Result of forcing a formula in a typed context.
#[derive(Debug, Clone)]
pub struct Verdict {
    /// Truth table of the formula, as a subobject of the context presheaf
    /// (the left-nested product of the context types, terminal when empty).
    pub truth: Subobject,
    /// The resolved context the formula was evaluated in.
    pub context: Vec<(String, Arc<ResolvedType>)>,
    pub is_global: bool,
    /// Least (stage, environment) where the formula fails, in canonical
    /// order: stages ascending, environments lexicographic.
    pub counterexample: Option<(ObjId, Vec<usize>)>,
}

/// Result of evaluating a closed formula, with counterexample witnesses
/// named after the formula's outer universal prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalVerdict {
    pub holds: bool,
    /// Failing stage plus values for the outer universally quantified
    /// variables (empty when the formula has no universal prefix).
    pub counterexample: Option<(ObjId, Vec<(String, usize)>)>,
}

// ---- typed syntax ----

#[derive(Debug)]
struct TTerm {
    ty: Arc<ResolvedType>,
    node: TNode,
}

#[derive(Debug)]
enum TNode {
    /// Context variable, by position (outermost first).
    Var(usize),
    /// A declared constant's global element.
    Const(NatTrans),
    /// A declared map applied to an argument.
    Map(NatTrans, Box<TTerm>),
    /// Evaluation of a function-typed term.
    EvApp(Box<TTerm>, Box<TTerm>),
    Pair(Box<TTerm>, Box<TTerm>),
    Fst(Box<TTerm>),
    Snd(Box<TTerm>),
}

#[derive(Debug)]
struct TFormula {
    /// Node id for memoization; unique within one typechecked formula.
    id: usize,
    node: TFNode,
}

#[derive(Debug)]
enum TFNode {
    Top,
    Bot,
    And(Box<TFormula>, Box<TFormula>),
    Or(Box<TFormula>, Box<TFormula>),
    Implies(Box<TFormula>, Box<TFormula>),
    Eq(TTerm, TTerm),
    InSub(Subobject, TTerm),
    ForAll(Presheaf, Box<TFormula>),
    Exists(Presheaf, Box<TFormula>),
}

// ---- typechecking ----

struct Checker<'a> {
    sig: &'a Signature,
    ctx: Vec<(String, Arc<ResolvedType>)>,
    next_id: usize,
}

impl Checker<'_> {
    fn fresh(&mut self, node: TFNode) -> TFormula {
        let id = self.next_id;
        self.next_id += 1;
        TFormula { id, node }
    }

    fn var(&self, name: &str) -> Option<usize> {
        self.ctx.iter().rposition(|(n, _)| n == name)
    }

    fn evapp(&mut self, head: TTerm, arg: &Term) -> Result<TTerm> {
        let arg_t = self.term(arg)?;
        match &head.ty.shape {
            TypeShape::Exp { exponent, body, .. } => {
                if !arg_t.ty.same(exponent) {
                    return Err(Error::IllTyped {
                        details: format!(
                            "function of type {} applied to an argument of type {}",
                            head.ty.expr, arg_t.ty.expr
                        ),
                    });
                }
                Ok(TTerm {
                    ty: Arc::clone(body),
                    node: TNode::EvApp(Box::new(head), Box::new(arg_t)),
                })
            }
            _ => Err(Error::IllTyped {
                details: format!("value of type {} is not a function", head.ty.expr),
            }),
        }
    }

    fn term(&mut self, t: &Term) -> Result<TTerm> {
        match t {
            Term::Ident(n) => {
                if let Some(i) = self.var(n) {
                    return Ok(TTerm {
                        ty: Arc::clone(&self.ctx[i].1),
                        node: TNode::Var(i),
                    });
                }
                if let Some(c) = self.sig.const_decl(n) {
                    return Ok(TTerm {
                        ty: self.sig.resolve(&c.ty)?,
                        node: TNode::Const(c.point.clone()),
                    });
                }
                if self.sig.map_decl(n).is_some() {
                    return Err(Error::IllTyped {
                        details: format!("map `{n}` must be applied to an argument"),
                    });
                }
                if self.sig.sub_decl(n).is_some() {
                    return Err(Error::IllTyped {
                        details: format!("subobject `{n}` cannot appear in a term"),
                    });
                }
                Err(Error::UnknownSymbol { name: n.clone() })
            }
            Term::App(n, arg) => {
                if self.var(n).is_some() || self.sig.const_decl(n).is_some() {
                    let head = self.term(&Term::Ident(n.clone()))?;
                    return self.evapp(head, arg);
                }
                if let Some(decl) = self.sig.map_decl(n) {
                    let (source, target, map) =
                        (decl.source.clone(), decl.target.clone(), decl.map.clone());
                    let arg_t = self.term(arg)?;
                    let src = self.sig.resolve(&source)?;
                    if !arg_t.ty.same(&src) {
                        return Err(Error::IllTyped {
                            details: format!(
                                "map `{n}` expects {source}, got {}",
                                arg_t.ty.expr
                            ),
                        });
                    }
                    return Ok(TTerm {
                        ty: self.sig.resolve(&target)?,
                        node: TNode::Map(map, Box::new(arg_t)),
                    });
                }
                if self.sig.sub_decl(n).is_some() {
                    return Err(Error::IllTyped {
                        details: format!(
                            "subobject `{n}` applied inside a term; membership is a formula"
                        ),
                    });
                }
                Err(Error::UnknownSymbol { name: n.clone() })
            }
            Term::EvApp(head, arg) => {
                let head_t = self.term(head)?;
                self.evapp(head_t, arg)
            }
            Term::Pair(a, b) => {
                let at = self.term(a)?;
                let bt = self.term(b)?;
                let ty = self
                    .sig
                    .resolve(&TypeExpr::prod(at.ty.expr.clone(), bt.ty.expr.clone()))?;
                Ok(TTerm {
                    ty,
                    node: TNode::Pair(Box::new(at), Box::new(bt)),
                })
            }
            Term::Fst(p) => {
                let pt = self.term(p)?;
                match &pt.ty.shape {
                    TypeShape::Prod { left, .. } => Ok(TTerm {
                        ty: Arc::clone(left),
                        node: TNode::Fst(Box::new(pt)),
                    }),
                    _ => Err(Error::IllTyped {
                        details: format!("fst of a value of non-pair type {}", pt.ty.expr),
                    }),
                }
            }
            Term::Snd(p) => {
                let pt = self.term(p)?;
                match &pt.ty.shape {
                    TypeShape::Prod { right, .. } => Ok(TTerm {
                        ty: Arc::clone(right),
                        node: TNode::Snd(Box::new(pt)),
                    }),
                    _ => Err(Error::IllTyped {
                        details: format!("snd of a value of non-pair type {}", pt.ty.expr),
                    }),
                }
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<TFormula> {
        let node = match f {
            Formula::Top => TFNode::Top,
            Formula::Bot => TFNode::Bot,
            Formula::And(l, r) => {
                TFNode::And(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Or(l, r) => {
                TFNode::Or(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Implies(l, r) => {
                TFNode::Implies(Box::new(self.formula(l)?), Box::new(self.formula(r)?))
            }
            Formula::Eq(l, r) => {
                let lt = self.term(l)?;
                let rt = self.term(r)?;
                if !lt.ty.same(&rt.ty) {
                    return Err(Error::IllTyped {
                        details: format!(
                            "equality between different types {} and {}",
                            lt.ty.expr, rt.ty.expr
                        ),
                    });
                }
                TFNode::Eq(lt, rt)
            }
            Formula::Pred(n, arg) => {
                if let Some(decl) = self.sig.sub_decl(n) {
                    let (ambient, sub) = (decl.ambient.clone(), decl.sub.clone());
                    let arg_t = self.term(arg)?;
                    let amb = self.sig.resolve(&ambient)?;
                    if !arg_t.ty.same(&amb) {
                        return Err(Error::IllTyped {
                            details: format!(
                                "subobject `{n}` lives in {ambient}, got {}",
                                arg_t.ty.expr
                            ),
                        });
                    }
                    TFNode::InSub(sub, arg_t)
                } else if self.sig.map_decl(n).is_some()
                    || self.var(n).is_some()
                    || self.sig.const_decl(n).is_some()
                {
                    return Err(Error::IllTyped {
                        details: format!("`{n}` is not a subobject, so `{f}` is not a formula"),
                    });
                } else {
                    return Err(Error::UnknownSymbol { name: n.clone() });
                }
            }
            Formula::ForAll(x, ty, body) => {
                let rt = self.sig.resolve(ty)?;
                let p = rt.presheaf.clone();
                self.ctx.push((x.clone(), rt));
                let b = self.formula(body)?;
                self.ctx.pop();
                TFNode::ForAll(p, Box::new(b))
            }
            Formula::Exists(x, ty, body) => {
                let rt = self.sig.resolve(ty)?;
                let p = rt.presheaf.clone();
                self.ctx.push((x.clone(), rt));
                let b = self.formula(body)?;
                self.ctx.pop();
                TFNode::Exists(p, Box::new(b))
            }
        };
        Ok(self.fresh(node))
    }
}

fn typecheck(
    sig: &Signature,
    ctx: &[(String, TypeExpr)],
    phi: &Formula,
) -> Result<(TFormula, Vec<(String, Arc<ResolvedType>)>)> {
    let mut resolved = Vec::with_capacity(ctx.len());
    for (name, te) in ctx {
        resolved.push((name.clone(), sig.resolve(te)?));
    }
    let mut checker = Checker {
        sig,
        ctx: resolved,
        next_id: 0,
    };
    let tf = checker.formula(phi)?;
    Ok((tf, checker.ctx))
}

// ---- evaluation and forcing ----

fn eval_term(t: &TTerm, c: ObjId, env: &[usize]) -> usize {
    match &t.node {
        TNode::Var(i) => env[*i],
        TNode::Const(p) => p.apply(c, 0),
        TNode::Map(m, a) => m.apply(c, eval_term(a, c, env)),
        TNode::EvApp(h, a) => match &h.ty.shape {
            TypeShape::Exp { data, .. } => {
                data.eval(c, eval_term(h, c, env), eval_term(a, c, env))
            }
            _ => unreachable!("typechecked"),
        },
        TNode::Pair(a, b) => match &t.ty.shape {
            TypeShape::Prod { data, .. } => {
                data.pair_index(c, eval_term(a, c, env), eval_term(b, c, env))
            }
            _ => unreachable!("typechecked"),
        },
        TNode::Fst(p) => match &p.ty.shape {
            TypeShape::Prod { data, .. } => data.unpair(c, eval_term(p, c, env)).0,
            _ => unreachable!("typechecked"),
        },
        TNode::Snd(p) => match &p.ty.shape {
            TypeShape::Prod { data, .. } => data.unpair(c, eval_term(p, c, env)).1,
            _ => unreachable!("typechecked"),
        },
    }
}

struct Forcer {
    base: Arc<FinCategory>,
    /// Presheaves of the variables currently in scope, parallel to the
    /// environment (outer context first, then quantifier extensions).
    var_presheaves: Vec<Presheaf>,
    memo: HashMap<(usize, ObjId, Vec<usize>), bool>,
    steps: usize,
    max_steps: usize,
}

impl Forcer {
    fn restrict(&self, m: MorId, env: &[usize]) -> Vec<usize> {
        env.iter()
            .zip(&self.var_presheaves)
            .map(|(&v, p)| p.act(m, v))
            .collect()
    }

    fn force_at(&mut self, f: &TFormula, c: ObjId, env: &Vec<usize>) -> Result<bool> {
        let key = (f.id, c, env.clone());
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::budget("forcing", self.max_steps));
        }
        let value = match &f.node {
            TFNode::Top => true,
            TFNode::Bot => false,
            TFNode::And(l, r) => self.force_at(l, c, env)? && self.force_at(r, c, env)?,
            TFNode::Or(l, r) => self.force_at(l, c, env)? || self.force_at(r, c, env)?,
            TFNode::Eq(s, t) => eval_term(s, c, env) == eval_term(t, c, env),
            TFNode::InSub(sub, t) => sub.contains(c, eval_term(t, c, env)),
            TFNode::Implies(l, r) => {
                // Holds at (c, env) iff along every arrow into c the
                // restricted antecedent entails the restricted consequent.
                let arrows = self.base.arrows_into(c).to_vec();
                let mut ok = true;
                for m in arrows {
                    let d = self.base.src(m);
                    let env_d = self.restrict(m, env);
                    if self.force_at(l, d, &env_d)? && !self.force_at(r, d, &env_d)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            TFNode::ForAll(p, body) => {
                let arrows = self.base.arrows_into(c).to_vec();
                self.var_presheaves.push(p.clone());
                let mut ok = true;
                'all: for m in arrows {
                    let d = self.base.src(m);
                    let env_d = self.restrict(m, env);
                    for a in 0..p.stage(d) {
                        let mut extended = env_d.clone();
                        extended.push(a);
                        if !self.force_at(body, d, &extended)? {
                            ok = false;
                            break 'all;
                        }
                    }
                }
                self.var_presheaves.pop();
                ok
            }
            TFNode::Exists(p, body) => {
                self.var_presheaves.push(p.clone());
                let mut ok = false;
                for a in 0..p.stage(c) {
                    let mut extended = env.clone();
                    extended.push(a);
                    if self.force_at(body, c, &extended)? {
                        ok = true;
                        break;
                    }
                }
                self.var_presheaves.pop();
                ok
            }
        };
        self.memo.insert(key, value);
        Ok(value)
    }
}

/// Decode the environment of context variable values from a canonical index
/// into the context presheaf's stage (first variable most significant).
fn decode_env(ctx: &[(String, Arc<ResolvedType>)], c: ObjId, index: usize) -> Vec<usize> {
    let mut env = vec![0; ctx.len()];
    let mut rest = index;
    for (i, (_, rt)) in ctx.iter().enumerate().rev() {
        let s = rt.presheaf.stage(c);
        env[i] = rest % s;
        rest /= s;
    }
    env
}

/// Force a formula in a typed context and tabulate where it holds.
///
/// The truth table is restriction-stable by the semantics of the clauses;
/// the subobject validator re-checks this on every result.
pub fn force(sig: &Signature, ctx: &[(String, TypeExpr)], phi: &Formula) -> Result<Verdict> {
    let (tf, rctx) = typecheck(sig, ctx, phi)?;
    let base = Arc::clone(sig.base());
    let mut ctx_presheaf = Presheaf::terminal(Arc::clone(&base));
    for (_, rt) in &rctx {
        ctx_presheaf = product(&ctx_presheaf, &rt.presheaf, sig.budget())?.object;
    }
    let mut forcer = Forcer {
        base: Arc::clone(&base),
        var_presheaves: rctx.iter().map(|(_, rt)| rt.presheaf.clone()).collect(),
        memo: HashMap::new(),
        steps: 0,
        max_steps: sig.budget().max_elements,
    };
    let mut members = Vec::with_capacity(base.object_count());
    let mut counterexample = None;
    for c in base.objects() {
        let mut col = Vec::with_capacity(ctx_presheaf.stage(c));
        for index in 0..ctx_presheaf.stage(c) {
            let env = decode_env(&rctx, c, index);
            let holds = forcer.force_at(&tf, c, &env)?;
            if !holds && counterexample.is_none() {
                counterexample = Some((c, env));
            }
            col.push(holds);
        }
        members.push(col);
    }
    let truth = Subobject::new(ctx_presheaf, members)?;
    Ok(Verdict {
        truth,
        context: rctx,
        is_global: counterexample.is_none(),
        counterexample,
    })
}

/// Evaluate a closed formula globally. The outer universal prefix is peeled
/// into the context first, which is sound (a universal holds globally iff its
/// body holds globally in the extended context, because every stage carries
/// its identity arrow) and makes counterexamples name the failing witnesses.
pub fn holds_globally(sig: &Signature, phi: &Formula) -> Result<GlobalVerdict> {
    let mut ctx: Vec<(String, TypeExpr)> = Vec::new();
    let mut body = phi;
    while let Formula::ForAll(x, ty, inner) = body {
        ctx.push((x.clone(), ty.clone()));
        body = inner;
    }
    let verdict = force(sig, &ctx, body)?;
    Ok(GlobalVerdict {
        holds: verdict.is_global,
        counterexample: verdict.counterexample.map(|(c, env)| {
            (
                c,
                ctx.iter().map(|(n, _)| n.clone()).zip(env).collect(),
            )
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::fincat::{arrow_category, terminal_category};
    use crate::kripke::parse::{parse_formula, parse_type};
    use crate::latdual::FinDistLattice;

    /// Signature over the one-object base: type J from a lattice, maps
    /// meet/join, constants zero/one, and the subobject IsBot = {0}.
    fn set_signature(j: &FinDistLattice) -> Signature {
        let base = terminal_category();
        let mut sig = Signature::new(Arc::clone(&base), Budget::default());
        sig.add_type("J", Presheaf::constant(Arc::clone(&base), j.size()))
            .unwrap();
        let jj = sig.resolve(&parse_type("J * J").unwrap()).unwrap();
        let jp = sig.resolve(&parse_type("J").unwrap()).unwrap();
        let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            let TypeShape::Prod { data, .. } = &jj.shape else {
                unreachable!()
            };
            vec![(0..jj.presheaf.stage(0))
                .map(|p| {
                    let (a, b) = data.unpair(0, p);
                    op(a, b)
                })
                .collect()]
        };
        let meet = NatTrans::new(
            jj.presheaf.clone(),
            jp.presheaf.clone(),
            table(&|a, b| j.meet_of(a, b)),
        )
        .unwrap();
        let join = NatTrans::new(
            jj.presheaf.clone(),
            jp.presheaf.clone(),
            table(&|a, b| j.join_of(a, b)),
        )
        .unwrap();
        let two = parse_type("J * J").unwrap();
        let one_t = parse_type("J").unwrap();
        sig.add_map("meet", two.clone(), one_t.clone(), meet).unwrap();
        sig.add_map("join", two, one_t.clone(), join).unwrap();
        sig.add_const_elem("zero", one_t.clone(), &[j.bottom]).unwrap();
        sig.add_const_elem("one", one_t.clone(), &[j.top]).unwrap();
        let members = vec![(0..j.size()).map(|e| e == j.bottom).collect()];
        let sub = Subobject::new(jp.presheaf.clone(), members).unwrap();
        sig.add_sub("IsBot", one_t, sub).unwrap();
        sig
    }

    fn check_global(sig: &Signature, text: &str) -> GlobalVerdict {
        holds_globally(sig, &parse_formula(text).unwrap()).unwrap()
    }

    #[test]
    fn truth_in_the_empty_context_is_global() {
        let sig = set_signature(&FinDistLattice::chain(2));
        let v = force(&sig, &[], &Formula::Top).unwrap();
        assert!(v.is_global);
        assert_eq!(v.counterexample, None);
        assert_eq!(v.truth.count(), 1);
    }

    #[test]
    fn two_chain_satisfies_the_dichotomy() {
        let sig = set_signature(&FinDistLattice::chain(2));
        let v = check_global(&sig, "forall i:J. i = zero \\/ i = one");
        assert!(v.holds);
        assert_eq!(v.counterexample, None);
    }

    #[test]
    fn three_chain_dichotomy_fails_at_the_middle_element() {
        let sig = set_signature(&FinDistLattice::chain(3));
        let v = check_global(&sig, "forall i:J. i = zero \\/ i = one");
        assert!(!v.holds);
        assert_eq!(v.counterexample, Some((0, vec![("i".to_string(), 1)])));
    }

    #[test]
    fn zero_equals_one_fails_with_empty_witness() {
        let sig = set_signature(&FinDistLattice::chain(2));
        let v = check_global(&sig, "zero = one");
        assert!(!v.holds);
        assert_eq!(v.counterexample, Some((0, vec![])));
    }

    #[test]
    fn meet_commutativity_holds_for_all_sample_lattices() {
        for j in [
            FinDistLattice::chain(2),
            FinDistLattice::chain(3),
            FinDistLattice::diamond(),
        ] {
            let sig = set_signature(&j);
            let v = check_global(&sig, "forall i:J. forall j:J. meet(i, j) = meet(j, i)");
            assert!(v.holds);
        }
    }

    #[test]
    fn function_extensionality_style_statement_forces() {
        // Every function from J to J agrees with itself pointwise: sanity
        // check for higher-order quantification and evaluation.
        let sig = set_signature(&FinDistLattice::chain(2));
        let v = check_global(&sig, "forall a:J^J. forall i:J. a(i) = a(i)");
        assert!(v.holds);
    }

    #[test]
    fn linear_interpolation_counterexample_is_the_negation_function() {
        // Over the 2-chain in single-set models, the statement
        // "every a: J -> J satisfies a(i) = a(0) v (i & a(1))" fails first
        // on the order-reversing function (family index 2) at i = 1.
        let sig = set_signature(&FinDistLattice::chain(2));
        let v = check_global(
            &sig,
            "forall a:J^J. forall i:J. a(i) = join(a(zero), meet(i, a(one)))",
        );
        assert!(!v.holds);
        assert_eq!(
            v.counterexample,
            Some((0, vec![("a".to_string(), 2), ("i".to_string(), 1)]))
        );
    }

    #[test]
    fn membership_atoms_follow_the_declared_subobject() {
        let sig = set_signature(&FinDistLattice::chain(3));
        assert!(check_global(&sig, "IsBot(zero)").holds);
        assert!(!check_global(&sig, "IsBot(one)").holds);
        assert!(check_global(&sig, "forall i:J. IsBot(meet(i, zero))").holds);
    }

    /// J over the arrow base: 3-chain at the target stage, 2-chain at the
    /// source stage, restriction collapsing the middle element upward.
    fn arrow_signature() -> Signature {
        let base = arrow_category();
        let mut sig = Signature::new(Arc::clone(&base), Budget::default());
        let carrier = Presheaf::new(
            Arc::clone(&base),
            vec![2, 3],
            vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 1]],
        )
        .unwrap();
        sig.add_type("J", carrier.clone()).unwrap();
        let one_t = parse_type("J").unwrap();
        sig.add_const_elem("zero", one_t.clone(), &[0, 0]).unwrap();
        sig.add_const_elem("one", one_t, &[1, 2]).unwrap();
        sig
    }

    #[test]
    fn implication_quantifies_over_arrows_not_points() {
        // At the target stage the middle element m is not 1, but it becomes
        // 1 after restriction to the source stage, so (i = one) => bot fails
        // at m even though the antecedent is false there pointwise.
        let sig = arrow_signature();
        let phi = parse_formula("(i = one) => bot").unwrap();
        let ctx = [("i".to_string(), parse_type("J").unwrap())];
        let v = force(&sig, &ctx, &phi).unwrap();
        assert_eq!(
            v.truth.members(),
            &[vec![true, false], vec![true, false, false]]
        );
        assert!(!v.is_global);
        assert_eq!(v.counterexample, Some((0, vec![1])));
        v.truth.validate().unwrap();
    }

    #[test]
    fn dichotomy_fails_on_the_arrow_base_at_the_middle_element() {
        let sig = arrow_signature();
        let v = check_global(&sig, "forall i:J. i = zero \\/ i = one");
        assert!(!v.holds);
        // Stage 0 is two-valued and fine; the first failure is the middle
        // element at stage 1.
        assert_eq!(v.counterexample, Some((1, vec![("i".to_string(), 1)])));
    }

    #[test]
    fn ill_typed_formulas_are_rejected() {
        let sig = set_signature(&FinDistLattice::chain(2));
        let cases = [
            "meet(i) = i",
            "zero(one) = one",
            "fst(zero) = zero",
            "zero = (one, one)",
            "meet(zero, one)",
            "IsBot(zero) = one",
        ];
        for text in cases {
            let phi = parse_formula(text).unwrap();
            let ctx = [("i".to_string(), parse_type("J").unwrap())];
            match force(&sig, &ctx, &phi) {
                Err(Error::IllTyped { .. }) => {}
                other => panic!("`{text}` should be ill-typed, got {other:?}"),
            }
        }
        match force(&sig, &[], &parse_formula("q = zero").unwrap()) {
            Err(Error::UnknownSymbol { name }) => assert_eq!(name, "q"),
            other => panic!("expected UnknownSymbol, got {other:?}"),
        }
    }

    #[test]
    fn projections_and_pairs_evaluate_canonically() {
        let sig = set_signature(&FinDistLattice::chain(3));
        assert!(check_global(&sig, "fst((zero, one)) = zero").holds);
        assert!(check_global(&sig, "snd((zero, one)) = one").holds);
        assert!(check_global(&sig, "forall p:J * J. (fst(p), snd(p)) = p").holds);
        assert!(check_global(&sig, "forall p:J * J. meet(p) = meet(snd(p), fst(p))").holds);
    }

    #[test]
    fn existentials_are_stagewise() {
        let sig = set_signature(&FinDistLattice::chain(3));
        assert!(check_global(&sig, "exists i:J. IsBot(i)").holds);
        assert!(
            check_global(&sig, "forall i:J. exists k:J. join(i, k) = one").holds
        );
        assert!(
            !check_global(&sig, "exists i:J. i = zero /\\ i = one").holds
        );
    }

    // ---- randomized agreement with classical evaluation ----

    struct Rng(u64);

    impl Rng {
        fn next(&mut self) -> u64 {
            // xorshift64: deterministic, no external dependency.
            let mut x = self.0;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            self.0 = x;
            x
        }

        fn pick(&mut self, n: usize) -> usize {
            (self.next() % n as u64) as usize
        }
    }

    /// Type tags used by the generator: J, J * J, J^J.
    const TY_J: u8 = 0;
    const TY_JJ: u8 = 1;
    const TY_FUN: u8 = 2;

    fn tag_expr(tag: u8) -> TypeExpr {
        let j = TypeExpr::named("J");
        match tag {
            TY_J => j,
            TY_JJ => TypeExpr::prod(j.clone(), j),
            _ => TypeExpr::exp(j.clone(), j),
        }
    }

    fn vars_of<'a>(vars: &'a [(String, u8)], tag: u8) -> Vec<&'a String> {
        vars.iter()
            .filter(|(_, t)| *t == tag)
            .map(|(n, _)| n)
            .collect()
    }

    /// Function values have no closed syntax: variables only, so this can
    /// come up empty.
    fn gen_fun_term(rng: &mut Rng, vars: &[(String, u8)]) -> Option<Term> {
        let of_type = vars_of(vars, TY_FUN);
        if of_type.is_empty() {
            None
        } else {
            Some(Term::ident(of_type[rng.pick(of_type.len())]))
        }
    }

    fn gen_j_term(rng: &mut Rng, depth: usize, vars: &[(String, u8)]) -> Term {
        let of_type = vars_of(vars, TY_J);
        let choice = if depth == 0 { rng.pick(3) } else { rng.pick(7) };
        match choice {
            0 => Term::ident("zero"),
            1 => Term::ident("one"),
            2 => {
                if of_type.is_empty() {
                    Term::ident("zero")
                } else {
                    Term::ident(of_type[rng.pick(of_type.len())])
                }
            }
            3 | 4 => {
                let name = if choice == 3 { "meet" } else { "join" };
                let a = gen_j_term(rng, depth - 1, vars);
                let b = gen_j_term(rng, depth - 1, vars);
                Term::app2(name, a, b)
            }
            5 => {
                let p = gen_jj_term(rng, depth - 1, vars);
                if rng.pick(2) == 0 {
                    Term::Fst(Box::new(p))
                } else {
                    Term::Snd(Box::new(p))
                }
            }
            _ => match gen_fun_term(rng, vars) {
                Some(f) => {
                    let a = gen_j_term(rng, depth - 1, vars);
                    match f {
                        Term::Ident(n) => Term::app(&n, a),
                        other => Term::evapp(other, a),
                    }
                }
                None => Term::ident("one"),
            },
        }
    }

    fn gen_jj_term(rng: &mut Rng, depth: usize, vars: &[(String, u8)]) -> Term {
        let of_type = vars_of(vars, TY_JJ);
        if depth > 0 && !of_type.is_empty() && rng.pick(3) == 0 {
            return Term::ident(of_type[rng.pick(of_type.len())]);
        }
        let d = depth.saturating_sub(1);
        let a = gen_j_term(rng, d, vars);
        let b = gen_j_term(rng, d, vars);
        Term::Pair(Box::new(a), Box::new(b))
    }

    fn gen_formula(rng: &mut Rng, depth: usize, vars: &mut Vec<(String, u8)>) -> Formula {
        let atom = |rng: &mut Rng, vars: &[(String, u8)]| -> Formula {
            let d = 2.min(depth);
            match rng.pick(4) {
                0 => Formula::Top,
                1 => Formula::Bot,
                2 => Formula::pred("IsBot", gen_j_term(rng, d, vars)),
                _ => match rng.pick(3) {
                    0 => Formula::Eq(gen_j_term(rng, d, vars), gen_j_term(rng, d, vars)),
                    1 => Formula::Eq(gen_jj_term(rng, d, vars), gen_jj_term(rng, d, vars)),
                    _ => match (gen_fun_term(rng, vars), gen_fun_term(rng, vars)) {
                        (Some(l), Some(r)) => Formula::Eq(l, r),
                        _ => Formula::Eq(gen_j_term(rng, d, vars), gen_j_term(rng, d, vars)),
                    },
                },
            }
        };
        if depth == 0 {
            return atom(rng, vars);
        }
        match rng.pick(8) {
            0 => atom(rng, vars),
            1 => Formula::and(
                gen_formula(rng, depth - 1, vars),
                gen_formula(rng, depth - 1, vars),
            ),
            2 => Formula::or(
                gen_formula(rng, depth - 1, vars),
                gen_formula(rng, depth - 1, vars),
            ),
            3 => Formula::implies(
                gen_formula(rng, depth - 1, vars),
                gen_formula(rng, depth - 1, vars),
            ),
            n => {
                let tag = match rng.pick(3) {
                    0 => TY_J,
                    1 => TY_JJ,
                    _ => TY_FUN,
                };
                let name = format!("v{}", vars.len());
                vars.push((name.clone(), tag));
                let body = gen_formula(rng, depth - 1, vars);
                vars.pop();
                if n % 2 == 0 {
                    Formula::forall(&name, tag_expr(tag), body)
                } else {
                    Formula::exists(&name, tag_expr(tag), body)
                }
            }
        }
    }

    /// Classical evaluation over the single stage of the one-object base:
    /// material implication and plain element quantification.
    fn classical(f: &TFormula, env: &mut Vec<usize>) -> bool {
        match &f.node {
            TFNode::Top => true,
            TFNode::Bot => false,
            TFNode::And(l, r) => classical(l, env) && classical(r, env),
            TFNode::Or(l, r) => classical(l, env) || classical(r, env),
            TFNode::Implies(l, r) => !classical(l, env) || classical(r, env),
            TFNode::Eq(s, t) => eval_term(s, 0, env) == eval_term(t, 0, env),
            TFNode::InSub(sub, t) => sub.contains(0, eval_term(t, 0, env)),
            TFNode::ForAll(p, body) => (0..p.stage(0)).all(|a| {
                env.push(a);
                let v = classical(body, env);
                env.pop();
                v
            }),
            TFNode::Exists(p, body) => (0..p.stage(0)).any(|a| {
                env.push(a);
                let v = classical(body, env);
                env.pop();
                v
            }),
        }
    }

    #[test]
    fn forcing_agrees_with_classical_evaluation_on_single_set_models() {
        let sig = set_signature(&FinDistLattice::chain(2));
        let ctx = [("w".to_string(), parse_type("J").unwrap())];
        let mut checked = 0usize;
        for seed in 0..1100u64 {
            let mut rng = Rng(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
            let mut vars = vec![("w".to_string(), TY_J)];
            let phi = gen_formula(&mut rng, 5, &mut vars);
            let verdict = force(&sig, &ctx, &phi).unwrap();
            let (tf, _) = typecheck(&sig, &ctx, &phi).unwrap();
            for w in 0..2usize {
                let mut env = vec![w];
                assert_eq!(
                    verdict.truth.contains(0, w),
                    classical(&tf, &mut env),
                    "disagreement on `{phi}` at w = {w} (seed {seed})"
                );
            }
            checked += 1;
        }
        assert!(checked >= 1000);
    }

    #[test]
    fn random_formulas_roundtrip_through_the_printer() {
        let sig = set_signature(&FinDistLattice::chain(2));
        let ctx = [("w".to_string(), parse_type("J").unwrap())];
        for seed in 0..400u64 {
            let mut rng = Rng(seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(7));
            let mut vars = vec![("w".to_string(), TY_J)];
            let phi = gen_formula(&mut rng, 4, &mut vars);
            let printed = phi.to_string();
            let reparsed = parse_formula(&printed)
                .unwrap_or_else(|e| panic!("`{printed}` does not reparse: {e}"));
            assert_eq!(phi, reparsed, "roundtrip mismatch for `{printed}`");
            // Both sides force identically (they are equal trees, so this
            // is a smoke test that printing lost nothing the checker needs).
            let a = force(&sig, &ctx, &phi).unwrap();
            let b = force(&sig, &ctx, &reparsed).unwrap();
            assert_eq!(a.truth, b.truth);
        }
    }

    // ---- isomorphism invariance ----

    /// Two isomorphic objects: 0 and 1 with mutually inverse arrows between
    /// them. Every presheaf on this base is a pair of isomorphic sets, so
    /// global verdicts must agree with the one-object model.
    fn doubled_point() -> Arc<FinCategory> {
        use crate::fincat::FinCategory;
        FinCategory::new(
            2,
            &[(0, 0), (1, 1), (0, 1), (1, 0)],
            &[0, 1],
            &[(2, 3, 0), (3, 2, 1)],
        )
        .unwrap()
    }

    fn doubled_signature(j: &FinDistLattice) -> Signature {
        let base = doubled_point();
        let n = j.size();
        let mut sig = Signature::new(Arc::clone(&base), Budget::default());
        sig.add_type("J", Presheaf::constant(Arc::clone(&base), n))
            .unwrap();
        let jj = sig.resolve(&parse_type("J * J").unwrap()).unwrap();
        let jp = sig.resolve(&parse_type("J").unwrap()).unwrap();
        let table = |op: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            let TypeShape::Prod { data, .. } = &jj.shape else {
                unreachable!()
            };
            base.objects()
                .map(|c| {
                    (0..jj.presheaf.stage(c))
                        .map(|p| {
                            let (a, b) = data.unpair(c, p);
                            op(a, b)
                        })
                        .collect()
                })
                .collect()
        };
        let meet = NatTrans::new(
            jj.presheaf.clone(),
            jp.presheaf.clone(),
            table(&|a, b| j.meet_of(a, b)),
        )
        .unwrap();
        let join = NatTrans::new(
            jj.presheaf.clone(),
            jp.presheaf.clone(),
            table(&|a, b| j.join_of(a, b)),
        )
        .unwrap();
        let two = parse_type("J * J").unwrap();
        let one_t = parse_type("J").unwrap();
        sig.add_map("meet", two.clone(), one_t.clone(), meet).unwrap();
        sig.add_map("join", two, one_t.clone(), join).unwrap();
        sig.add_const_elem("zero", one_t.clone(), &[j.bottom; 2]).unwrap();
        sig.add_const_elem("one", one_t.clone(), &[j.top; 2]).unwrap();
        let members = base
            .objects()
            .map(|_| (0..n).map(|e| e == j.bottom).collect())
            .collect();
        let sub = Subobject::new(jp.presheaf.clone(), members).unwrap();
        sig.add_sub("IsBot", one_t, sub).unwrap();
        sig
    }

    #[test]
    fn global_verdicts_are_invariant_under_doubling_the_base() {
        let texts = [
            "forall i:J. i = zero \\/ i = one",
            "forall a:J^J. forall i:J. a(i) = join(a(zero), meet(i, a(one)))",
            "forall i:J. forall j:J. meet(i, j) = meet(j, i)",
            "exists i:J. IsBot(i) /\\ (i = one => bot)",
            "forall i:J. (IsBot(i) => bot) => i = one",
        ];
        for j in [FinDistLattice::chain(2), FinDistLattice::chain(3)] {
            let single = set_signature(&j);
            let double = doubled_signature(&j);
            for text in texts {
                let a = check_global(&single, text);
                let b = check_global(&double, text);
                assert_eq!(a.holds, b.holds, "`{text}` differs after doubling");
            }
        }
    }
}
