//! Higher-order construction of de Bruijn terms.
//!
//! A [`B`] is a term waiting to learn how many binders surround it. Binders
//! hand out variables as de Bruijn levels, which are turned into indices
//! when the term is finally rendered, so library terms can be written with
//! ordinary Rust closures instead of hand-counted indices.

use std::rc::Rc;

use crate::syntax::{shift, Tm, Ty};

#[derive(Clone)]
pub struct B(Rc<dyn Fn(usize) -> Tm>);

impl B {
    /// Embeds a closed term.
    pub fn closed(t: Tm) -> B {
        B(Rc::new(move |_| t.clone()))
    }

    /// Embeds a term whose free variables refer to binders outside a
    /// construction site of depth `base`.
    pub fn open(t: Tm, base: usize) -> B {
        B(Rc::new(move |d| shift(&t, d - base, 0)))
    }

    fn level(l: usize) -> B {
        B(Rc::new(move |d| Tm::Var(d - l - 1)))
    }

    pub fn render(&self, depth: usize) -> Tm {
        (self.0)(depth)
    }

    /// Renders at depth zero.
    pub fn build(&self) -> Tm {
        self.render(0)
    }

    pub fn ap(&self, arg: &B) -> B {
        let (f, a) = (self.clone(), arg.clone());
        B(Rc::new(move |d| Tm::app(f.render(d), a.render(d))))
    }
}

impl From<Tm> for B {
    fn from(t: Tm) -> B {
        B::closed(t)
    }
}

/// `ap!(f, a, b)` is `f a b`.
#[macro_export]
macro_rules! ap {
    ($f:expr $(, $a:expr)+ $(,)?) => {{
        let head: $crate::build::B = ($f).clone();
        head$(.ap(&$a))+
    }};
}

pub fn lam(dom: Ty, body: impl Fn(B) -> B + 'static) -> B {
    B(Rc::new(move |d| {
        Tm::lam(dom.clone(), body(B::level(d)).render(d + 1))
    }))
}

pub fn lam2(a: Ty, b: Ty, body: impl Fn(B, B) -> B + 'static) -> B {
    let body = Rc::new(body);
    lam(a, move |x| {
        let body = body.clone();
        lam(b.clone(), move |y| body(x.clone(), y))
    })
}

pub fn lam3(a: Ty, b: Ty, c: Ty, body: impl Fn(B, B, B) -> B + 'static) -> B {
    let body = Rc::new(body);
    lam(a, move |x| {
        let body = body.clone();
        lam2(b.clone(), c.clone(), move |y, z| body(x.clone(), y, z))
    })
}

pub fn num(n: u64) -> B {
    B::closed(Tm::numeral(n))
}

pub fn zero() -> B {
    B::closed(Tm::Zero)
}

pub fn suc(n: &B) -> B {
    B::closed(Tm::Suc).ap(n)
}

/// `rec[motive] base step n`
pub fn rec(motive: &Ty, base: &B, step: &B, n: &B) -> B {
    ap!(B::closed(Tm::Rec(motive.clone())), base, step, n)
}

pub fn pair(l: &Ty, r: &Ty, a: &B, b: &B) -> B {
    ap!(B::closed(Tm::Pair(l.clone(), r.clone())), a, b)
}

pub fn pr1(l: &Ty, r: &Ty, p: &B) -> B {
    B::closed(Tm::Pr1(l.clone(), r.clone())).ap(p)
}

pub fn pr2(l: &Ty, r: &Ty, p: &B) -> B {
    B::closed(Tm::Pr2(l.clone(), r.clone())).ap(p)
}

pub fn inl(l: &Ty, r: &Ty, a: &B) -> B {
    B::closed(Tm::Inl(l.clone(), r.clone())).ap(a)
}

pub fn inr(l: &Ty, r: &Ty, a: &B) -> B {
    B::closed(Tm::Inr(l.clone(), r.clone())).ap(a)
}

/// `f . g = \x. f (g x)` with `x : dom`.
pub fn compose(dom: &Ty, f: &B, g: &B) -> B {
    let (f, g) = (f.clone(), g.clone());
    lam(dom.clone(), move |x| f.ap(&g.ap(&x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{typecheck, Ctx};

    #[test]
    fn levels_become_indices() {
        let k = lam2(Ty::Nat, Ty::Nat, |x, _y| x);
        assert_eq!(k.build(), Tm::lam(Ty::Nat, Tm::lam(Ty::Nat, Tm::Var(1))));
        let app = lam2(Ty::seq(), Ty::Nat, |f, x| ap!(f, x));
        assert_eq!(
            app.build(),
            Tm::lam(Ty::seq(), Tm::lam(Ty::Nat, Tm::app(Tm::Var(1), Tm::Var(0))))
        );
    }

    #[test]
    fn open_terms_are_shifted() {
        // an open `Var 0` built at depth 1, used under one more binder
        let outer = B::open(Tm::Var(0), 1);
        let t = lam(Ty::Nat, move |_| outer.clone()).render(1);
        assert_eq!(t, Tm::lam(Ty::Nat, Tm::Var(1)));
    }

    #[test]
    fn compose_typechecks() {
        let t = compose(&Ty::Nat, &B::closed(Tm::Suc), &B::closed(Tm::Suc)).build();
        assert_eq!(typecheck(&Ctx::new(), &t).unwrap(), Ty::seq());
    }
}
