//! Types, de Bruijn terms and the typechecker for System T with products
//! and sums.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Object-language types.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Nat,
    Arrow(Arc<Ty>, Arc<Ty>),
    Prod(Arc<Ty>, Arc<Ty>),
    Sum(Arc<Ty>, Arc<Ty>),
}

impl Ty {
    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn prod(l: Ty, r: Ty) -> Ty {
        Ty::Prod(Arc::new(l), Arc::new(r))
    }

    pub fn sum(l: Ty, r: Ty) -> Ty {
        Ty::Sum(Arc::new(l), Arc::new(r))
    }

    /// `dom_1 -> dom_2 -> ... -> cod`
    pub fn arrows<I>(doms: I, cod: Ty) -> Ty
    where
        I: IntoIterator<Item = Ty>,
        I::IntoIter: DoubleEndedIterator,
    {
        doms.into_iter().rev().fold(cod, |acc, d| Ty::arrow(d, acc))
    }

    /// The Baire space `N -> N`.
    pub fn seq() -> Ty {
        Ty::arrow(Ty::Nat, Ty::Nat)
    }

    /// `(N -> N) -> N`
    pub fn functional() -> Ty {
        Ty::arrow(Ty::seq(), Ty::Nat)
    }

    /// Finite sequences, encoded as an infinite sequence paired with a length.
    pub fn finseq() -> Ty {
        Ty::prod(Ty::seq(), Ty::Nat)
    }

    pub fn as_arrow(&self) -> Option<(&Ty, &Ty)> {
        match self {
            Ty::Arrow(d, c) => Some((d, c)),
            _ => None,
        }
    }

    pub fn contains_sum(&self) -> bool {
        match self {
            Ty::Nat => false,
            Ty::Sum(..) => true,
            Ty::Arrow(a, b) | Ty::Prod(a, b) => a.contains_sum() || b.contains_sum(),
        }
    }

    /// Number of type constructors; used to bound generators.
    pub fn size(&self) -> usize {
        match self {
            Ty::Nat => 1,
            Ty::Arrow(a, b) | Ty::Prod(a, b) | Ty::Sum(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: arrow, 1: sum, 2: product, 3: atom
        match self {
            Ty::Nat => write!(f, "N"),
            Ty::Arrow(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Ty::Sum(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Ty::Prod(a, b) => {
                if prec > 2 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 3)?;
                if prec > 2 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Terms with de Bruijn indices. Constants carry their type instances.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Tm {
    Var(usize),
    Lam(Ty, Arc<Tm>),
    App(Arc<Tm>, Arc<Tm>),
    Zero,
    Suc,
    /// `rec[s] : s -> (N -> s -> s) -> N -> s`
    Rec(Ty),
    Pair(Ty, Ty),
    Pr1(Ty, Ty),
    Pr2(Ty, Ty),
    Inl(Ty, Ty),
    Inr(Ty, Ty),
    /// `case[l, r, m] : (l -> m) -> (r -> m) -> l + r -> m`
    Case(Ty, Ty, Ty),
}

impl Tm {
    pub fn lam(dom: Ty, body: Tm) -> Tm {
        Tm::Lam(dom, Arc::new(body))
    }

    pub fn app(f: Tm, a: Tm) -> Tm {
        Tm::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Tm, args: impl IntoIterator<Item = Tm>) -> Tm {
        args.into_iter().fold(f, Tm::app)
    }

    /// `suc^n 0`
    pub fn numeral(n: u64) -> Tm {
        (0..n).fold(Tm::Zero, |acc, _| Tm::app(Tm::Suc, acc))
    }

    /// Inverse of [`Tm::numeral`].
    pub fn as_numeral(&self) -> Option<u64> {
        let mut t = self;
        let mut n = 0;
        loop {
            match t {
                Tm::Zero => return Some(n),
                Tm::App(f, a) if **f == Tm::Suc => {
                    n += 1;
                    t = a;
                }
                _ => return None,
            }
        }
    }

    /// Type of a constant, `None` for variables, abstractions and applications.
    pub fn constant_type(&self) -> Option<Ty> {
        use Ty as T;
        Some(match self {
            Tm::Zero => T::Nat,
            Tm::Suc => T::arrow(T::Nat, T::Nat),
            Tm::Rec(s) => T::arrows(
                [s.clone(), T::arrows([T::Nat, s.clone()], s.clone()), T::Nat],
                s.clone(),
            ),
            Tm::Pair(l, r) => T::arrows([l.clone(), r.clone()], T::prod(l.clone(), r.clone())),
            Tm::Pr1(l, r) => T::arrow(T::prod(l.clone(), r.clone()), l.clone()),
            Tm::Pr2(l, r) => T::arrow(T::prod(l.clone(), r.clone()), r.clone()),
            Tm::Inl(l, r) => T::arrow(l.clone(), T::sum(l.clone(), r.clone())),
            Tm::Inr(l, r) => T::arrow(r.clone(), T::sum(l.clone(), r.clone())),
            Tm::Case(l, r, m) => T::arrows(
                [
                    T::arrow(l.clone(), m.clone()),
                    T::arrow(r.clone(), m.clone()),
                    T::sum(l.clone(), r.clone()),
                ],
                m.clone(),
            ),
            Tm::Var(_) | Tm::Lam(..) | Tm::App(..) => return None,
        })
    }

    /// Whether a sum type occurs anywhere in an annotation of the term.
    pub fn mentions_sum(&self) -> bool {
        match self {
            Tm::Var(_) | Tm::Zero | Tm::Suc => false,
            Tm::Lam(ty, b) => ty.contains_sum() || b.mentions_sum(),
            Tm::App(f, a) => f.mentions_sum() || a.mentions_sum(),
            Tm::Inl(..) | Tm::Inr(..) | Tm::Case(..) => true,
            Tm::Rec(s) => s.contains_sum(),
            Tm::Pair(l, r) | Tm::Pr1(l, r) | Tm::Pr2(l, r) => l.contains_sum() || r.contains_sum(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.max_free_index(0).is_none()
    }

    /// The largest free index (relative to the term's outside), if any.
    fn max_free_index(&self, depth: usize) -> Option<usize> {
        match self {
            Tm::Var(i) if *i >= depth => Some(i - depth),
            Tm::Var(_) => None,
            Tm::Lam(_, b) => b.max_free_index(depth + 1),
            Tm::App(f, a) => match (f.max_free_index(depth), a.max_free_index(depth)) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            _ => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Tm::Lam(_, b) => 1 + b.size(),
            Tm::App(f, a) => 1 + f.size() + a.size(),
            _ => 1,
        }
    }
}

/// Typing context; the innermost binder is last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ctx(Vec<Ty>);

impl Ctx {
    pub fn new() -> Ctx {
        Ctx(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, ty: Ty) {
        self.0.push(ty);
    }

    pub fn pop(&mut self) -> Option<Ty> {
        self.0.pop()
    }

    pub fn extended(&self, ty: Ty) -> Ctx {
        let mut c = self.clone();
        c.push(ty);
        c
    }

    pub fn lookup(&self, index: usize) -> Option<&Ty> {
        self.0.len().checked_sub(index + 1).map(|k| &self.0[k])
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Ty> {
        self.0.iter()
    }
}

impl From<Vec<Ty>> for Ctx {
    fn from(v: Vec<Ty>) -> Ctx {
        Ctx(v)
    }
}

impl FromIterator<Ty> for Ctx {
    fn from_iter<I: IntoIterator<Item = Ty>>(iter: I) -> Ctx {
        Ctx(iter.into_iter().collect())
    }
}

/// A named closed definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub ty: Ty,
    pub body: Tm,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable with index {0}")]
    UnboundVariable(usize),
    #[error("type mismatch at {}: expected {expected}, found {found}", show_path(.path))]
    TypeMismatch {
        expected: Ty,
        found: Ty,
        path: Vec<PathStep>,
    },
    #[error("application of a non-function of type {found} at {}", show_path(.path))]
    NonFunctionApplication { found: Ty, path: Vec<PathStep> },
}

/// One step from a term to one of its immediate subterms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStep {
    Body,
    Fn,
    Arg,
}

fn show_path(path: &[PathStep]) -> String {
    if path.is_empty() {
        return "root".to_string();
    }
    path.iter()
        .map(|s| match s {
            PathStep::Body => "body",
            PathStep::Fn => "fn",
            PathStep::Arg => "arg",
        })
        .collect::<Vec<_>>()
        .join(".")
}

/// Infers the unique type of `t` under `ctx`.
pub fn typecheck(ctx: &Ctx, t: &Tm) -> Result<Ty, TypeError> {
    let mut ctx = ctx.clone();
    let mut path = Vec::new();
    infer(&mut ctx, t, &mut path)
}

fn infer(ctx: &mut Ctx, t: &Tm, path: &mut Vec<PathStep>) -> Result<Ty, TypeError> {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || match t {
        Tm::Var(i) => ctx
            .lookup(*i)
            .cloned()
            .ok_or(TypeError::UnboundVariable(*i)),
        Tm::Lam(dom, body) => {
            ctx.push(dom.clone());
            path.push(PathStep::Body);
            let cod = infer(ctx, body, path);
            path.pop();
            ctx.pop();
            Ok(Ty::arrow(dom.clone(), cod?))
        }
        Tm::App(f, a) => {
            path.push(PathStep::Fn);
            let fty = infer(ctx, f, path)?;
            path.pop();
            let (dom, cod) = match &fty {
                Ty::Arrow(d, c) => (d.clone(), c.clone()),
                other => {
                    return Err(TypeError::NonFunctionApplication {
                        found: other.clone(),
                        path: path.clone(),
                    })
                }
            };
            path.push(PathStep::Arg);
            let aty = infer(ctx, a, path)?;
            if aty != *dom {
                let err = TypeError::TypeMismatch {
                    expected: (*dom).clone(),
                    found: aty,
                    path: path.clone(),
                };
                path.pop();
                return Err(err);
            }
            path.pop();
            Ok((*cod).clone())
        }
        constant => Ok(constant.constant_type().expect("constant")),
    })
}

/// Adds `by` to every index of `t` that is free at or above `cutoff`.
pub fn shift(t: &Tm, by: usize, cutoff: usize) -> Tm {
    if by == 0 {
        return t.clone();
    }
    match t {
        Tm::Var(i) if *i >= cutoff => Tm::Var(i + by),
        Tm::Lam(ty, b) => Tm::Lam(ty.clone(), Arc::new(shift(b, by, cutoff + 1))),
        Tm::App(f, a) => Tm::App(
            Arc::new(shift(f, by, cutoff)),
            Arc::new(shift(a, by, cutoff)),
        ),
        other => other.clone(),
    }
}

/// Substitutes `arg` for index 0 in `body` and lowers the other free
/// indices by one, as in beta reduction.
pub fn instantiate(body: &Tm, arg: &Tm) -> Tm {
    subst(body, arg, 0)
}

fn subst(t: &Tm, arg: &Tm, depth: usize) -> Tm {
    match t {
        Tm::Var(i) if *i == depth => shift(arg, depth, 0),
        Tm::Var(i) if *i > depth => Tm::Var(i - 1),
        Tm::Lam(ty, b) => Tm::Lam(ty.clone(), Arc::new(subst(b, arg, depth + 1))),
        Tm::App(f, a) => Tm::App(
            Arc::new(subst(f, arg, depth)),
            Arc::new(subst(a, arg, depth)),
        ),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Ty {
        Ty::Nat
    }

    /// `rec[N->N] (\n. n) (\n f. rec[N] (suc n) (\m g. suc (f m)))`
    fn max_term() -> Tm {
        let n2n = Ty::arrow(nat(), nat());
        let inner = Tm::apps(
            Tm::Rec(nat()),
            [
                Tm::app(Tm::Suc, Tm::Var(1)),
                Tm::lam(
                    nat(),
                    Tm::lam(nat(), Tm::app(Tm::Suc, Tm::app(Tm::Var(2), Tm::Var(1)))),
                ),
            ],
        );
        Tm::apps(
            Tm::Rec(n2n.clone()),
            [
                Tm::lam(nat(), Tm::Var(0)),
                Tm::lam(nat(), Tm::lam(n2n, inner)),
            ],
        )
    }

    #[test]
    fn max_has_binary_type() {
        let ty = typecheck(&Ctx::new(), &max_term()).unwrap();
        assert_eq!(ty, Ty::arrows([nat(), nat()], nat()));
    }

    #[test]
    fn identity_type() {
        let ty = typecheck(&Ctx::new(), &Tm::lam(nat(), Tm::Var(0))).unwrap();
        assert_eq!(ty, Ty::arrow(nat(), nat()));
    }

    #[test]
    fn zero_is_not_a_function() {
        let err = typecheck(&Ctx::new(), &Tm::app(Tm::Zero, Tm::Zero)).unwrap_err();
        assert!(matches!(
            err,
            TypeError::NonFunctionApplication { found: Ty::Nat, .. }
        ));
    }

    #[test]
    fn unbound_and_mismatch() {
        assert_eq!(
            typecheck(&Ctx::new(), &Tm::Var(0)),
            Err(TypeError::UnboundVariable(0))
        );
        let err = typecheck(&Ctx::new(), &Tm::app(Tm::Suc, Tm::Suc)).unwrap_err();
        match err {
            TypeError::TypeMismatch {
                expected,
                found,
                path,
            } => {
                assert_eq!(expected, nat());
                assert_eq!(found, Ty::arrow(nat(), nat()));
                assert_eq!(path, vec![PathStep::Arg]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn context_lookup_is_innermost_last() {
        let ctx = Ctx::from(vec![nat(), Ty::seq()]);
        assert_eq!(typecheck(&ctx, &Tm::Var(0)).unwrap(), Ty::seq());
        assert_eq!(typecheck(&ctx, &Tm::Var(1)).unwrap(), nat());
        assert!(typecheck(&ctx, &Tm::Var(2)).is_err());
    }

    #[test]
    fn instantiate_examples() {
        assert_eq!(instantiate(&Tm::Var(0), &Tm::Zero), Tm::Zero);
        assert_eq!(instantiate(&Tm::Var(1), &Tm::Zero), Tm::Var(0));
        assert_eq!(
            instantiate(&Tm::app(Tm::Var(0), Tm::Var(0)), &Tm::Suc),
            Tm::app(Tm::Suc, Tm::Suc)
        );
    }

    #[test]
    fn instantiate_shifts_under_binders() {
        // (\y. x y)[x := z] with z free at index 0 outside
        let body = Tm::lam(nat(), Tm::app(Tm::Var(1), Tm::Var(0)));
        let arg = Tm::Var(3);
        assert_eq!(
            instantiate(&body, &arg),
            Tm::lam(nat(), Tm::app(Tm::Var(4), Tm::Var(0)))
        );
    }

    #[test]
    fn numerals_round_trip() {
        for n in 0..6 {
            assert_eq!(Tm::numeral(n).as_numeral(), Some(n));
        }
        assert_eq!(Tm::Suc.as_numeral(), None);
    }

    #[test]
    fn type_display_precedence() {
        let t = Ty::arrow(
            Ty::arrow(nat(), nat()),
            Ty::sum(Ty::prod(nat(), nat()), Ty::arrow(nat(), nat())),
        );
        assert_eq!(t.to_string(), "(N -> N) -> N * N + (N -> N)");
        let left = Ty::prod(Ty::prod(nat(), nat()), nat());
        let right = Ty::prod(nat(), Ty::prod(nat(), nat()));
        assert_eq!(left.to_string(), "N * N * N");
        assert_eq!(right.to_string(), "N * (N * N)");
    }

    #[test]
    fn closedness() {
        assert!(max_term().is_closed());
        assert!(!Tm::lam(nat(), Tm::Var(1)).is_closed());
    }
}
