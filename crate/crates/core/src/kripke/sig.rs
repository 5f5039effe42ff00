use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fincat::{
    exponential, product, ExpData, FinCategory, NatTrans, Presheaf, Product, Subobject,
};
use crate::kripke::ast::TypeExpr;
use crate::kripke::parse::KEYWORDS;

/// A type expression resolved against a signature: the presheaf denoting it
/// together with the structural tables needed to interpret pairing,
/// projections, and evaluation on its elements.
#[derive(Debug)]
pub struct ResolvedType {
    pub expr: TypeExpr,
    pub presheaf: Presheaf,
    pub shape: TypeShape,
}

#[derive(Debug)]
pub enum TypeShape {
    /// A named base type; elements are interpreted by the declared presheaf.
    Base,
    /// `data.object` is the presheaf; elements are canonical pair indices.
    Prod {
        data: Product,
        left: Arc<ResolvedType>,
        right: Arc<ResolvedType>,
    },
    /// `data.object` is the presheaf of `body^exponent`; elements are natural
    /// families with evaluation tables.
    Exp {
        data: ExpData,
        exponent: Arc<ResolvedType>,
        body: Arc<ResolvedType>,
    },
}

impl ResolvedType {
    /// Type equality. Resolution is deterministic, so syntactic equality of
    /// the expressions is semantic equality of the types.
    pub fn same(&self, other: &ResolvedType) -> bool {
        self.expr == other.expr
    }
}

/// A declared map symbol `name: source -> target`.
#[derive(Debug, Clone)]
pub struct MapDecl {
    pub source: TypeExpr,
    pub target: TypeExpr,
    pub map: NatTrans,
}

/// A declared predicate symbol: a subobject of its ambient type.
#[derive(Debug, Clone)]
pub struct SubDecl {
    pub ambient: TypeExpr,
    pub sub: Subobject,
}

/// A declared constant: a global element `1 -> ty`.
#[derive(Debug, Clone)]
pub struct ConstDecl {
    pub ty: TypeExpr,
    pub point: NatTrans,
}

/// The model a formula is evaluated against: a base category, named base
/// types (presheaves), and named maps, subobjects, and constants over type
/// expressions. Resolution of compound types is cached, so repeated use of
/// the same product or exponential shares one set of tables.
#[derive(Debug)]
pub struct Signature {
    base: Arc<FinCategory>,
    budget: Budget,
    types: BTreeMap<String, Presheaf>,
    maps: BTreeMap<String, MapDecl>,
    subs: BTreeMap<String, SubDecl>,
    consts: BTreeMap<String, ConstDecl>,
    cache: Mutex<HashMap<TypeExpr, Arc<ResolvedType>>>,
}

fn check_name(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let rest_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if !head_ok || !rest_ok {
        return Err(Error::InvalidModel {
            details: format!("`{name}` is not a valid identifier"),
        });
    }
    if KEYWORDS.contains(&name) {
        return Err(Error::InvalidModel {
            details: format!("`{name}` is a reserved word"),
        });
    }
    Ok(())
}

impl Clone for Signature {
    /// Clones the declarations; the resolution cache starts out empty.
    fn clone(&self) -> Signature {
        Signature {
            base: Arc::clone(&self.base),
            budget: self.budget,
            types: self.types.clone(),
            maps: self.maps.clone(),
            subs: self.subs.clone(),
            consts: self.consts.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl Signature {
    pub fn new(base: Arc<FinCategory>, budget: Budget) -> Signature {
        Signature {
            base,
            budget,
            types: BTreeMap::new(),
            maps: BTreeMap::new(),
            subs: BTreeMap::new(),
            consts: BTreeMap::new(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn check_term_symbol_free(&self, name: &str) -> Result<()> {
        if self.maps.contains_key(name) || self.subs.contains_key(name)
            || self.consts.contains_key(name)
        {
            return Err(Error::InvalidModel {
                details: format!("symbol `{name}` is already declared"),
            });
        }
        Ok(())
    }

    pub fn add_type(&mut self, name: &str, presheaf: Presheaf) -> Result<()> {
        check_name(name)?;
        if self.types.contains_key(name) {
            return Err(Error::InvalidModel {
                details: format!("type `{name}` is already declared"),
            });
        }
        if presheaf.base() != &self.base && !Arc::ptr_eq(presheaf.base(), &self.base) {
            return Err(Error::BaseMismatch);
        }
        presheaf.validate()?;
        self.types.insert(name.to_string(), presheaf);
        Ok(())
    }

    pub fn add_map(
        &mut self,
        name: &str,
        source: TypeExpr,
        target: TypeExpr,
        map: NatTrans,
    ) -> Result<()> {
        check_name(name)?;
        self.check_term_symbol_free(name)?;
        let src = self.resolve(&source)?;
        let tgt = self.resolve(&target)?;
        if map.source() != &src.presheaf {
            return Err(Error::SourceMismatch {
                details: format!("map `{name}` does not have source {source}"),
            });
        }
        if map.target() != &tgt.presheaf {
            return Err(Error::TargetMismatch {
                details: format!("map `{name}` does not have target {target}"),
            });
        }
        map.validate()?;
        self.maps.insert(
            name.to_string(),
            MapDecl {
                source,
                target,
                map,
            },
        );
        Ok(())
    }

    pub fn add_sub(&mut self, name: &str, ambient: TypeExpr, sub: Subobject) -> Result<()> {
        check_name(name)?;
        self.check_term_symbol_free(name)?;
        let amb = self.resolve(&ambient)?;
        if sub.ambient() != &amb.presheaf {
            return Err(Error::TargetMismatch {
                details: format!("subobject `{name}` does not live in {ambient}"),
            });
        }
        sub.validate()?;
        self.subs.insert(name.to_string(), SubDecl { ambient, sub });
        Ok(())
    }

    pub fn add_const(&mut self, name: &str, ty: TypeExpr, point: NatTrans) -> Result<()> {
        check_name(name)?;
        self.check_term_symbol_free(name)?;
        let rty = self.resolve(&ty)?;
        if point.source() != &Presheaf::terminal(Arc::clone(&self.base)) {
            return Err(Error::SourceMismatch {
                details: format!("constant `{name}` must be a global element"),
            });
        }
        if point.target() != &rty.presheaf {
            return Err(Error::TargetMismatch {
                details: format!("constant `{name}` does not land in {ty}"),
            });
        }
        point.validate()?;
        self.consts.insert(name.to_string(), ConstDecl { ty, point });
        Ok(())
    }

    /// Convenience: declare a constant from one chosen element per stage.
    pub fn add_const_elem(&mut self, name: &str, ty: TypeExpr, elems: &[usize]) -> Result<()> {
        let rty = self.resolve(&ty)?;
        let point = NatTrans::new(
            Presheaf::terminal(Arc::clone(&self.base)),
            rty.presheaf.clone(),
            elems.iter().map(|&e| vec![e]).collect(),
        )?;
        self.add_const(name, ty, point)
    }

    pub fn map_decl(&self, name: &str) -> Option<&MapDecl> {
        self.maps.get(name)
    }

    pub fn sub_decl(&self, name: &str) -> Option<&SubDecl> {
        self.subs.get(name)
    }

    pub fn const_decl(&self, name: &str) -> Option<&ConstDecl> {
        self.consts.get(name)
    }

    pub fn type_presheaf(&self, name: &str) -> Option<&Presheaf> {
        self.types.get(name)
    }

    /// Resolve a type expression to its presheaf and interpretation tables.
    /// Results are cached per signature; concurrent resolution of the same
    /// type is tolerated (both threads build the same tables).
    pub fn resolve(&self, t: &TypeExpr) -> Result<Arc<ResolvedType>> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(t) {
            return Ok(Arc::clone(hit));
        }
        // Build without holding the lock: resolution recurses.
        let resolved = match t {
            TypeExpr::Named(name) => {
                let p = self
                    .types
                    .get(name)
                    .ok_or_else(|| Error::UnknownSymbol { name: name.clone() })?;
                ResolvedType {
                    expr: t.clone(),
                    presheaf: p.clone(),
                    shape: TypeShape::Base,
                }
            }
            TypeExpr::Prod(l, r) => {
                let left = self.resolve(l)?;
                let right = self.resolve(r)?;
                let data = product(&left.presheaf, &right.presheaf, &self.budget)?;
                ResolvedType {
                    expr: t.clone(),
                    presheaf: data.object.clone(),
                    shape: TypeShape::Prod { data, left, right },
                }
            }
            TypeExpr::Exp(b, e) => {
                let body = self.resolve(b)?;
                let exponent = self.resolve(e)?;
                let data = exponential(&exponent.presheaf, &body.presheaf, &self.budget)?;
                ResolvedType {
                    expr: t.clone(),
                    presheaf: data.object.clone(),
                    shape: TypeShape::Exp {
                        data,
                        exponent,
                        body,
                    },
                }
            }
        };
        let arc = Arc::new(resolved);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(t.clone(), Arc::clone(&arc));
        Ok(arc)
    }
}
