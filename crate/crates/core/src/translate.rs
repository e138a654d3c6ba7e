//! Monadic translations of System T into itself, parametrised by a nucleus:
//! the Gentzen-style translation (with products and sums), and the
//! Kolmogorov- and Kuroda-style variants.

use std::fmt;
use std::rc::Rc;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::ap;
use crate::build::*;
use crate::syntax::{typecheck, Ctx, Tm, Ty, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(
        "nucleus `{nucleus}` cannot interpret J at {needed}; a generalized nucleus is required"
    )]
    NucleusTooWeak { nucleus: String, needed: String },
    #[error("a type with a hole must contain exactly one hole, found {0}")]
    InvalidHole(usize),
    #[error("the Gentzen-style translation has no monadic application")]
    NoMonadicApplication,
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Which translation to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Style {
    Gentzen,
    Kolmogorov,
    Kuroda,
}

impl Style {
    pub const ALL: [Style; 3] = [Style::Gentzen, Style::Kolmogorov, Style::Kuroda];
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Style::Gentzen => "gentzen",
            Style::Kolmogorov => "kolmogorov",
            Style::Kuroda => "kuroda",
        })
    }
}

impl FromStr for Style {
    type Err = String;

    fn from_str(s: &str) -> Result<Style, String> {
        match s {
            "gentzen" => Ok(Style::Gentzen),
            "kolmogorov" => Ok(Style::Kolmogorov),
            "kuroda" => Ok(Style::Kuroda),
            other => Err(format!(
                "unknown style `{other}` (expected gentzen, kolmogorov or kuroda)"
            )),
        }
    }
}

/// A nucleus `(Jℕ, η, κ)` acting on `ℕ` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleNucleus {
    pub name: String,
    pub jn: Ty,
    /// `η : ℕ -> Jℕ`
    pub eta: Tm,
    /// `κ : (ℕ -> Jℕ) -> Jℕ -> Jℕ`
    pub kappa: Tm,
    /// Generic element, of type `Jℕ -> Jℕ` when present.
    pub omega: Option<Tm>,
    pub monad_laws_expected: bool,
}

impl SimpleNucleus {
    /// Checks `eta`, `kappa` and `omega` against their expected types.
    pub fn validate(&self) -> Result<(), TypeError> {
        let jn = &self.jn;
        let expect = |t: &Tm, ty: Ty| -> Result<(), TypeError> {
            let found = typecheck(&Ctx::new(), t)?;
            if found == ty {
                Ok(())
            } else {
                Err(TypeError::TypeMismatch {
                    expected: ty,
                    found,
                    path: Vec::new(),
                })
            }
        };
        expect(&self.eta, Ty::arrow(Ty::Nat, jn.clone()))?;
        expect(
            &self.kappa,
            Ty::arrows([Ty::arrow(Ty::Nat, jn.clone()), jn.clone()], jn.clone()),
        )?;
        if let Some(om) = &self.omega {
            expect(om, Ty::arrow(jn.clone(), jn.clone()))?;
        }
        Ok(())
    }
}

/// A type with exactly one hole, standing for a type endofunction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TyWithHole {
    Hole,
    Nat,
    Arrow(Box<TyWithHole>, Box<TyWithHole>),
    Prod(Box<TyWithHole>, Box<TyWithHole>),
    Sum(Box<TyWithHole>, Box<TyWithHole>),
}

impl TyWithHole {
    /// Embeds a type without holes.
    pub fn from_ty(ty: &Ty) -> TyWithHole {
        match ty {
            Ty::Nat => TyWithHole::Nat,
            Ty::Arrow(a, b) => TyWithHole::arrow(Self::from_ty(a), Self::from_ty(b)),
            Ty::Prod(a, b) => TyWithHole::prod(Self::from_ty(a), Self::from_ty(b)),
            Ty::Sum(a, b) => {
                TyWithHole::Sum(Box::new(Self::from_ty(a)), Box::new(Self::from_ty(b)))
            }
        }
    }

    pub fn arrow(a: TyWithHole, b: TyWithHole) -> TyWithHole {
        TyWithHole::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: TyWithHole, b: TyWithHole) -> TyWithHole {
        TyWithHole::Prod(Box::new(a), Box::new(b))
    }

    pub fn holes(&self) -> usize {
        match self {
            TyWithHole::Hole => 1,
            TyWithHole::Nat => 0,
            TyWithHole::Arrow(a, b) | TyWithHole::Prod(a, b) | TyWithHole::Sum(a, b) => {
                a.holes() + b.holes()
            }
        }
    }

    pub fn fill(&self, s: &Ty) -> Ty {
        match self {
            TyWithHole::Hole => s.clone(),
            TyWithHole::Nat => Ty::Nat,
            TyWithHole::Arrow(a, b) => Ty::arrow(a.fill(s), b.fill(s)),
            TyWithHole::Prod(a, b) => Ty::prod(a.fill(s), b.fill(s)),
            TyWithHole::Sum(a, b) => Ty::sum(a.fill(s), b.fill(s)),
        }
    }
}

impl TyWithHole {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let (l, r, op, own, lp, rp) = match self {
            TyWithHole::Hole => return f.write_str("_"),
            TyWithHole::Nat => return f.write_str("N"),
            TyWithHole::Arrow(l, r) => (l, r, "->", 0, 1, 0),
            TyWithHole::Sum(l, r) => (l, r, "+", 1, 1, 2),
            TyWithHole::Prod(l, r) => (l, r, "*", 2, 2, 3),
        };
        if prec > own {
            f.write_str("(")?;
        }
        l.fmt_prec(f, lp)?;
        write!(f, " {op} ")?;
        r.fmt_prec(f, rp)?;
        if prec > own {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for TyWithHole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

type EtaAt = Arc<dyn Fn(&Ty) -> Tm + Send + Sync>;
type KappaAt = Arc<dyn Fn(&Ty, &Ty) -> Tm + Send + Sync>;

/// A nucleus whose `J` is an endofunction on all types.
#[derive(Clone)]
pub struct GenNucleus {
    pub name: String,
    j: TyWithHole,
    eta_at: EtaAt,
    kappa_at: KappaAt,
}

impl fmt::Debug for GenNucleus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenNucleus")
            .field("name", &self.name)
            .field("j", &self.j.to_string())
            .finish_non_exhaustive()
    }
}

impl GenNucleus {
    pub fn new(
        name: impl Into<String>,
        j: TyWithHole,
        eta_at: impl Fn(&Ty) -> Tm + Send + Sync + 'static,
        kappa_at: impl Fn(&Ty, &Ty) -> Tm + Send + Sync + 'static,
    ) -> Result<GenNucleus, TranslateError> {
        match j.holes() {
            1 => Ok(GenNucleus {
                name: name.into(),
                j,
                eta_at: Arc::new(eta_at),
                kappa_at: Arc::new(kappa_at),
            }),
            n => Err(TranslateError::InvalidHole(n)),
        }
    }

    pub fn j_shape(&self) -> &TyWithHole {
        &self.j
    }

    pub fn j(&self, s: &Ty) -> Ty {
        self.j.fill(s)
    }

    /// `η : σ -> Jσ`
    pub fn eta_at(&self, s: &Ty) -> Tm {
        (self.eta_at)(s)
    }

    /// `κ : (σ -> Jτ) -> Jσ -> Jτ`
    pub fn kappa_at(&self, s: &Ty, t: &Ty) -> Tm {
        (self.kappa_at)(s, t)
    }
}

/// Either tier of nucleus.
#[derive(Clone, Debug)]
pub enum Nucleus {
    Simple(SimpleNucleus),
    Gen(GenNucleus),
}

impl From<SimpleNucleus> for Nucleus {
    fn from(n: SimpleNucleus) -> Nucleus {
        Nucleus::Simple(n)
    }
}

impl From<GenNucleus> for Nucleus {
    fn from(n: GenNucleus) -> Nucleus {
        Nucleus::Gen(n)
    }
}

impl Nucleus {
    pub fn name(&self) -> &str {
        match self {
            Nucleus::Simple(n) => &n.name,
            Nucleus::Gen(n) => &n.name,
        }
    }

    fn too_weak(&self, needed: impl fmt::Display) -> TranslateError {
        TranslateError::NucleusTooWeak {
            nucleus: self.name().to_string(),
            needed: needed.to_string(),
        }
    }

    pub fn j(&self, s: &Ty) -> Result<Ty, TranslateError> {
        match self {
            Nucleus::Simple(n) if *s == Ty::Nat => Ok(n.jn.clone()),
            Nucleus::Simple(_) => Err(self.too_weak(s)),
            Nucleus::Gen(n) => Ok(n.j(s)),
        }
    }

    pub fn eta(&self, s: &Ty) -> Result<Tm, TranslateError> {
        match self {
            Nucleus::Simple(n) if *s == Ty::Nat => Ok(n.eta.clone()),
            Nucleus::Simple(_) => Err(self.too_weak(s)),
            Nucleus::Gen(n) => Ok(n.eta_at(s)),
        }
    }

    pub fn kappa(&self, s: &Ty, t: &Ty) -> Result<Tm, TranslateError> {
        match self {
            Nucleus::Simple(n) if *s == Ty::Nat && *t == Ty::Nat => Ok(n.kappa.clone()),
            Nucleus::Simple(_) if *s != Ty::Nat => Err(self.too_weak(s)),
            Nucleus::Simple(_) => Err(self.too_weak(t)),
            Nucleus::Gen(n) => Ok(n.kappa_at(s, t)),
        }
    }

    fn eta_b(&self, s: &Ty) -> Result<B, TranslateError> {
        self.eta(s).map(B::closed)
    }

    fn kappa_b(&self, s: &Ty, t: &Ty) -> Result<B, TranslateError> {
        self.kappa(s, t).map(B::closed)
    }
}

/// `ρ^J`, `J ko ρ` or `J ku ρ`.
pub fn ty_translate(style: Style, nucleus: &Nucleus, rho: &Ty) -> Result<Ty, TranslateError> {
    match style {
        Style::Gentzen => gentzen_ty(nucleus, rho),
        Style::Kolmogorov => nucleus.j(&ko_ty(nucleus, rho)?),
        Style::Kuroda => nucleus.j(&ku_ty(nucleus, rho)?),
    }
}

/// The translated type of a context entry: `σ^J`, `J ko σ` or `ku σ`.
pub fn binder_ty(style: Style, nucleus: &Nucleus, sigma: &Ty) -> Result<Ty, TranslateError> {
    match style {
        Style::Kuroda => ku_ty(nucleus, sigma),
        _ => ty_translate(style, nucleus, sigma),
    }
}

pub fn ctx_translate(style: Style, nucleus: &Nucleus, ctx: &Ctx) -> Result<Ctx, TranslateError> {
    ctx.iter().map(|s| binder_ty(style, nucleus, s)).collect()
}

fn gentzen_ty(nuc: &Nucleus, rho: &Ty) -> Result<Ty, TranslateError> {
    Ok(match rho {
        Ty::Nat => nuc.j(&Ty::Nat)?,
        Ty::Arrow(a, b) => Ty::arrow(gentzen_ty(nuc, a)?, gentzen_ty(nuc, b)?),
        Ty::Prod(a, b) => Ty::prod(gentzen_ty(nuc, a)?, gentzen_ty(nuc, b)?),
        Ty::Sum(a, b) => nuc.j(&Ty::sum(gentzen_ty(nuc, a)?, gentzen_ty(nuc, b)?))?,
    })
}

/// `ko ρ`, without the outer `J`.
pub fn ko_ty(nuc: &Nucleus, rho: &Ty) -> Result<Ty, TranslateError> {
    let jko = |s: &Ty| -> Result<Ty, TranslateError> { nuc.j(&ko_ty(nuc, s)?) };
    Ok(match rho {
        Ty::Nat => Ty::Nat,
        Ty::Arrow(a, b) => Ty::arrow(jko(a)?, jko(b)?),
        Ty::Prod(a, b) => Ty::prod(jko(a)?, jko(b)?),
        Ty::Sum(a, b) => Ty::sum(jko(a)?, jko(b)?),
    })
}

/// `ku ρ`, without the outer `J`.
pub fn ku_ty(nuc: &Nucleus, rho: &Ty) -> Result<Ty, TranslateError> {
    Ok(match rho {
        Ty::Nat => Ty::Nat,
        Ty::Arrow(a, b) => Ty::arrow(ku_ty(nuc, a)?, nuc.j(&ku_ty(nuc, b)?)?),
        Ty::Prod(a, b) => Ty::prod(ku_ty(nuc, a)?, ku_ty(nuc, b)?),
        Ty::Sum(a, b) => Ty::sum(ku_ty(nuc, a)?, ku_ty(nuc, b)?),
    })
}

/// `ke_σ : (ℕ -> σ^J) -> Jℕ -> σ^J`, closed.
pub fn ke(nucleus: &Nucleus, sigma: &Ty) -> Result<Tm, TranslateError> {
    Ok(ke_from(nucleus, &Ty::Nat, sigma)?.build())
}

/// `ke` over an arbitrary source `A`: `(A -> σ^J) -> J A -> σ^J`. With
/// `A = ℕ` this is the extension used for `rec`; `case` uses `A = l^J + r^J`.
fn ke_from(nuc: &Nucleus, a: &Ty, sigma: &Ty) -> Result<B, TranslateError> {
    let ja = nuc.j(a)?;
    Ok(match sigma {
        Ty::Nat => nuc.kappa_b(a, &Ty::Nat)?,
        Ty::Arrow(s, t) => {
            let (sj, tj) = (gentzen_ty(nuc, s)?, gentzen_ty(nuc, t)?);
            let inner = ke_from(nuc, a, t)?;
            let g_ty = Ty::arrows([a.clone(), sj.clone()], tj);
            let a_ty = a.clone();
            lam3(g_ty, ja, sj, move |g, w, x| {
                let g_at = lam(a_ty.clone(), move |n| ap!(g, n, x));
                ap!(inner, g_at, w)
            })
        }
        Ty::Prod(s, t) => {
            let (sj, tj) = (gentzen_ty(nuc, s)?, gentzen_ty(nuc, t)?);
            let (ke_s, ke_t) = (ke_from(nuc, a, s)?, ke_from(nuc, a, t)?);
            let g_ty = Ty::arrow(a.clone(), Ty::prod(sj.clone(), tj.clone()));
            let a_ty = a.clone();
            lam2(g_ty, ja, move |g, w| {
                let (g1, g2) = (g.clone(), g);
                let (sj1, tj1) = (sj.clone(), tj.clone());
                let (sj2, tj2) = (sj.clone(), tj.clone());
                let left = lam(a_ty.clone(), move |n| pr1(&sj1, &tj1, &g1.ap(&n)));
                let right = lam(a_ty.clone(), move |n| pr2(&sj2, &tj2, &g2.ap(&n)));
                pair(&sj, &tj, &ap!(ke_s, left, w), &ap!(ke_t, right, w))
            })
        }
        Ty::Sum(..) => nuc.kappa_b(a, &sum_inside(nuc, sigma)?)?,
    })
}

/// `σ^J + τ^J` for a sum type `σ + τ`.
fn sum_inside(nuc: &Nucleus, sigma: &Ty) -> Result<Ty, TranslateError> {
    match sigma {
        Ty::Sum(l, r) => Ok(Ty::sum(gentzen_ty(nuc, l)?, gentzen_ty(nuc, r)?)),
        _ => unreachable!("called on sums only"),
    }
}

/// Translates `t`, well typed under `ctx`, to a term well typed under the
/// translated context.
pub fn tm_translate(
    style: Style,
    nucleus: &Nucleus,
    ctx: &Ctx,
    t: &Tm,
) -> Result<Tm, TranslateError> {
    typecheck(ctx, t)?;
    let tr = Translator {
        style,
        nuc: nucleus,
    };
    let mut types: Vec<Ty> = ctx.iter().cloned().collect();
    Ok(tr.term(&mut types, t)?.0)
}

/// Translates a closed term together with its type.
pub fn translate_closed(
    style: Style,
    nucleus: &Nucleus,
    t: &Tm,
) -> Result<(Tm, Ty), TranslateError> {
    let rho = typecheck(&Ctx::new(), t)?;
    let tj = tm_translate(style, nucleus, &Ctx::new(), t)?;
    Ok((tj, ty_translate(style, nucleus, &rho)?))
}

/// `f ⋄ a` (Kolmogorov) or `f • a` (Kuroda), for `f : J(σ -> Jτ)`.
/// Both terms live in the same context; so does the result.
pub fn monadic_apply(
    style: Style,
    nucleus: &Nucleus,
    f: &Tm,
    a: &Tm,
    sigma: &Ty,
    tau: &Ty,
) -> Result<Tm, TranslateError> {
    let (fb, ab) = (B::open(f.clone(), 0), B::open(a.clone(), 0));
    let out = match style {
        Style::Gentzen => return Err(TranslateError::NoMonadicApplication),
        Style::Kolmogorov => diamond(nucleus, sigma, tau, &fb, &ab)?,
        Style::Kuroda => bullet(nucleus, sigma, tau, &fb, &ab)?,
    };
    Ok(out.render(0))
}

type MonadicApp = Rc<dyn Fn(&B, &B) -> B>;

/// `f ⋄ a = κ(λg. g a, f)` with `f : J(σ -> Jτ)`, `a : σ`.
fn diamond_at(nuc: &Nucleus, sigma: &Ty, tau: &Ty) -> Result<MonadicApp, TranslateError> {
    let fun = Ty::arrow(sigma.clone(), nuc.j(tau)?);
    let kappa = nuc.kappa_b(&fun, tau)?;
    Ok(Rc::new(move |f: &B, a: &B| {
        let a = a.clone();
        ap!(kappa, lam(fun.clone(), move |g| g.ap(&a)), f)
    }))
}

/// `f • a = κ(λg. κ(g, a), f)` with `f : J(σ -> Jτ)`, `a : Jσ`.
fn bullet_at(nuc: &Nucleus, sigma: &Ty, tau: &Ty) -> Result<MonadicApp, TranslateError> {
    let fun = Ty::arrow(sigma.clone(), nuc.j(tau)?);
    let outer = nuc.kappa_b(&fun, tau)?;
    let inner = nuc.kappa_b(sigma, tau)?;
    Ok(Rc::new(move |f: &B, a: &B| {
        let (a, inner) = (a.clone(), inner.clone());
        ap!(outer, lam(fun.clone(), move |g| ap!(inner, g, a)), f)
    }))
}

fn diamond(nuc: &Nucleus, sigma: &Ty, tau: &Ty, f: &B, a: &B) -> Result<B, TranslateError> {
    Ok(diamond_at(nuc, sigma, tau)?(f, a))
}

fn bullet(nuc: &Nucleus, sigma: &Ty, tau: &Ty, f: &B, a: &B) -> Result<B, TranslateError> {
    Ok(bullet_at(nuc, sigma, tau)?(f, a))
}

/// `rec^⋄ : s -> (Jℕ -> J(Js -> Js)) -> ℕ -> Js` where `s = ko σ`.
pub fn rec_diamond(nucleus: &Nucleus, s: &Ty) -> Result<Tm, TranslateError> {
    Ok(rec_diamond_b(nucleus, s)?.build())
}

fn rec_diamond_b(nuc: &Nucleus, s: &Ty) -> Result<B, TranslateError> {
    let js = nuc.j(s)?;
    let f_ty = Ty::arrow(nuc.j(&Ty::Nat)?, nuc.j(&Ty::arrow(js.clone(), js.clone()))?);
    let eta_s = nuc.eta_b(s)?;
    let eta_n = nuc.eta_b(&Ty::Nat)?;
    let apply = diamond_at(nuc, &js, s)?;
    Ok(lam3(s.clone(), f_ty, Ty::Nat, move |a, f, n| {
        let (eta_n, apply) = (eta_n.clone(), apply.clone());
        let step = lam2(Ty::Nat, js.clone(), move |k, r| {
            apply(&f.ap(&eta_n.ap(&k)), &r)
        });
        rec(&js, &eta_s.ap(&a), &step, &n)
    }))
}

/// `rec^• : s -> (ℕ -> J(s -> Js)) -> ℕ -> Js` where `s = ku σ`.
pub fn rec_bullet(nucleus: &Nucleus, s: &Ty) -> Result<Tm, TranslateError> {
    Ok(rec_bullet_b(nucleus, s)?.build())
}

fn rec_bullet_b(nuc: &Nucleus, s: &Ty) -> Result<B, TranslateError> {
    let js = nuc.j(s)?;
    let f_ty = Ty::arrow(Ty::Nat, nuc.j(&Ty::arrow(s.clone(), js.clone()))?);
    let eta_s = nuc.eta_b(s)?;
    let apply = bullet_at(nuc, s, s)?;
    Ok(lam3(s.clone(), f_ty, Ty::Nat, move |a, f, n| {
        let apply = apply.clone();
        let step = lam2(Ty::Nat, js.clone(), move |k, r| apply(&f.ap(&k), &r));
        rec(&js, &eta_s.ap(&a), &step, &n)
    }))
}

struct Translator<'a> {
    style: Style,
    nuc: &'a Nucleus,
}

impl Translator<'_> {
    /// Returns the translation of `t` together with its source type.
    fn term(&self, ctx: &mut Vec<Ty>, t: &Tm) -> Result<(Tm, Ty), TranslateError> {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.term_inner(ctx, t))
    }

    fn term_inner(&self, ctx: &mut Vec<Ty>, t: &Tm) -> Result<(Tm, Ty), TranslateError> {
        let nuc = self.nuc;
        let depth = ctx.len();
        match t {
            Tm::Var(i) => {
                let ty = ctx[depth - 1 - i].clone();
                let out = match self.style {
                    Style::Kuroda => Tm::app(nuc.eta(&ku_ty(nuc, &ty)?)?, Tm::Var(*i)),
                    _ => Tm::Var(*i),
                };
                Ok((out, ty))
            }
            Tm::Lam(dom, body) => {
                ctx.push(dom.clone());
                let inner = self.term(ctx, body);
                ctx.pop();
                let (body_t, cod) = inner?;
                let ty = Ty::arrow(dom.clone(), cod);
                let lam = Tm::lam(binder_ty(self.style, nuc, dom)?, body_t);
                let out = match self.style {
                    Style::Gentzen => lam,
                    Style::Kolmogorov => Tm::app(nuc.eta(&ko_ty(nuc, &ty)?)?, lam),
                    Style::Kuroda => Tm::app(nuc.eta(&ku_ty(nuc, &ty)?)?, lam),
                };
                Ok((out, ty))
            }
            Tm::App(f, a) => {
                let (ft, fty) = self.term(ctx, f)?;
                let (at, _) = self.term(ctx, a)?;
                let (s, r) = match &fty {
                    Ty::Arrow(s, r) => ((**s).clone(), (**r).clone()),
                    _ => unreachable!("typechecked"),
                };
                let (fb, ab) = (B::open(ft, depth), B::open(at, depth));
                let out = match self.style {
                    Style::Gentzen => Tm::app(fb.render(depth), ab.render(depth)),
                    Style::Kolmogorov => {
                        let js = nuc.j(&ko_ty(nuc, &s)?)?;
                        diamond(nuc, &js, &ko_ty(nuc, &r)?, &fb, &ab)?.render(depth)
                    }
                    Style::Kuroda => {
                        bullet(nuc, &ku_ty(nuc, &s)?, &ku_ty(nuc, &r)?, &fb, &ab)?.render(depth)
                    }
                };
                Ok((out, r))
            }
            c => {
                let ty = c.constant_type().expect("constants have types");
                let out = match self.style {
                    Style::Gentzen => self.gentzen_const(c)?,
                    Style::Kolmogorov => self.ko_const(c)?,
                    Style::Kuroda => self.ku_const(c)?,
                };
                Ok((out.build(), ty))
            }
        }
    }

    fn gentzen_const(&self, c: &Tm) -> Result<B, TranslateError> {
        let nuc = self.nuc;
        let g = |s: &Ty| gentzen_ty(nuc, s);
        let n = Ty::Nat;
        Ok(match c {
            Tm::Zero => nuc.eta_b(&n)?.ap(&zero()),
            Tm::Suc => {
                let eta = nuc.eta_b(&n)?;
                let after = lam(n.clone(), move |k| eta.ap(&suc(&k)));
                nuc.kappa_b(&n, &n)?.ap(&after)
            }
            Tm::Rec(s) => {
                let sj = g(s)?;
                let jn = nuc.j(&n)?;
                let ke_s = ke_from(nuc, &n, s)?;
                let eta = nuc.eta_b(&n)?;
                let f_ty = Ty::arrows([jn, sj.clone()], sj.clone());
                let sj2 = sj.clone();
                lam2(sj, f_ty, move |x, f| {
                    let eta = eta.clone();
                    let f_eta = lam(Ty::Nat, move |k| f.ap(&eta.ap(&k)));
                    let r = ap!(B::closed(Tm::Rec(sj2.clone())), x, f_eta);
                    ke_s.ap(&r)
                })
            }
            Tm::Pair(l, r) => B::closed(Tm::Pair(g(l)?, g(r)?)),
            Tm::Pr1(l, r) => B::closed(Tm::Pr1(g(l)?, g(r)?)),
            Tm::Pr2(l, r) => B::closed(Tm::Pr2(g(l)?, g(r)?)),
            Tm::Inl(l, r) | Tm::Inr(l, r) => {
                let (lj, rj) = (g(l)?, g(r)?);
                let inside = Ty::sum(lj.clone(), rj.clone());
                let eta = nuc.eta_b(&inside)?;
                let left = matches!(c, Tm::Inl(..));
                let dom = if left { lj.clone() } else { rj.clone() };
                lam(dom, move |x| {
                    let injected = if left {
                        inl(&lj, &rj, &x)
                    } else {
                        inr(&lj, &rj, &x)
                    };
                    eta.ap(&injected)
                })
            }
            Tm::Case(l, r, m) => {
                let (lj, rj, mj) = (g(l)?, g(r)?, g(m)?);
                let inside = Ty::sum(lj.clone(), rj.clone());
                let ke_m = ke_from(nuc, &inside, m)?;
                let case = Tm::Case(lj.clone(), rj.clone(), mj.clone());
                lam2(Ty::arrow(lj, mj.clone()), Ty::arrow(rj, mj), move |f, h| {
                    ke_m.ap(&ap!(B::closed(case.clone()), f, h))
                })
            }
            _ => unreachable!("not a constant"),
        })
    }

    fn ko_const(&self, c: &Tm) -> Result<B, TranslateError> {
        let nuc = self.nuc;
        let ko = |s: &Ty| ko_ty(nuc, s);
        let jko = |s: &Ty| nuc.j(&ko_ty(nuc, s)?);
        let n = Ty::Nat;
        let ty = c.constant_type().expect("constant");
        let wrap = |b: B| -> Result<B, TranslateError> { Ok(nuc.eta_b(&ko(&ty)?)?.ap(&b)) };
        match c {
            Tm::Zero => Ok(nuc.eta_b(&n)?.ap(&zero())),
            Tm::Suc => {
                let eta = nuc.eta_b(&n)?;
                let after = lam(n.clone(), move |k| eta.ap(&suc(&k)));
                wrap(nuc.kappa_b(&n, &n)?.ap(&after))
            }
            Tm::Rec(sigma) => {
                let s = ko(sigma)?;
                let js = nuc.j(&s)?;
                let jn = nuc.j(&n)?;
                // Y = ko(ℕ -> σ -> σ), Z = ko(ℕ -> σ), X = ko((ℕ -> σ -> σ) -> ℕ -> σ)
                let y = Ty::arrow(jn.clone(), nuc.j(&Ty::arrow(js.clone(), js.clone()))?);
                let z = Ty::arrow(jn, js);
                let x = Ty::arrow(nuc.j(&y)?, nuc.j(&z)?);
                let recd = rec_diamond_b(nuc, &s)?;
                let k_ns = nuc.kappa_b(&n, &s)?;
                let eta_z = nuc.eta_b(&z)?;
                let k_yz = nuc.kappa_b(&y, &z)?;
                let eta_x = nuc.eta_b(&x)?;
                let k_sx = nuc.kappa_b(&s, &x)?;
                let inner = lam(s, move |a| {
                    let (recd, k_ns, eta_z) = (recd.clone(), k_ns.clone(), eta_z.clone());
                    let by_f = lam(y.clone(), move |f| eta_z.ap(&k_ns.ap(&ap!(recd, a, f))));
                    eta_x.ap(&k_yz.ap(&by_f))
                });
                wrap(k_sx.ap(&inner))
            }
            Tm::Pair(l, r) => {
                let (jl, jr) = (jko(l)?, jko(r)?);
                let prod = Ty::prod(jl.clone(), jr.clone());
                let eta_p = nuc.eta_b(&prod)?;
                let eta_mid = nuc.eta_b(&Ty::arrow(jr.clone(), nuc.j(&prod)?))?;
                wrap(lam(jl.clone(), move |a| {
                    let (jl, jr, eta_p) = (jl.clone(), jr.clone(), eta_p.clone());
                    eta_mid.ap(&lam(jr.clone(), move |b| eta_p.ap(&pair(&jl, &jr, &a, &b))))
                }))
            }
            Tm::Pr1(l, r) | Tm::Pr2(l, r) => {
                let (jl, jr) = (jko(l)?, jko(r)?);
                let (proj, out) = if matches!(c, Tm::Pr1(..)) {
                    (Tm::Pr1(jl.clone(), jr.clone()), ko(l)?)
                } else {
                    (Tm::Pr2(jl.clone(), jr.clone()), ko(r)?)
                };
                let k = nuc.kappa_b(&Ty::prod(jl, jr), &out)?;
                wrap(k.ap(&B::closed(proj)))
            }
            Tm::Inl(l, r) | Tm::Inr(l, r) => {
                let (jl, jr) = (jko(l)?, jko(r)?);
                let eta = nuc.eta_b(&Ty::sum(jl.clone(), jr.clone()))?;
                let left = matches!(c, Tm::Inl(..));
                let dom = if left { jl.clone() } else { jr.clone() };
                wrap(lam(dom, move |x| {
                    eta.ap(&if left {
                        inl(&jl, &jr, &x)
                    } else {
                        inr(&jl, &jr, &x)
                    })
                }))
            }
            Tm::Case(l, r, m) => {
                let (jl, jr, jm) = (jko(l)?, jko(r)?, jko(m)?);
                let km = ko(m)?;
                let lf = Ty::arrow(jl.clone(), jm.clone());
                let rf = Ty::arrow(jr.clone(), jm.clone());
                let sum = Ty::sum(jl.clone(), jr.clone());
                let z = Ty::arrow(nuc.j(&sum)?, jm.clone());
                let y = Ty::arrow(nuc.j(&rf)?, nuc.j(&z)?);
                let case = Tm::Case(jl, jr, jm);
                let k_inner = nuc.kappa_b(&sum, &km)?;
                let (eta_z, k_rz) = (nuc.eta_b(&z)?, nuc.kappa_b(&rf, &z)?);
                let (eta_y, k_ly) = (nuc.eta_b(&y)?, nuc.kappa_b(&lf, &y)?);
                let by_f = lam(lf, move |f| {
                    let (case, k_inner, eta_z) = (case.clone(), k_inner.clone(), eta_z.clone());
                    let by_g = lam(rf.clone(), move |g| {
                        eta_z.ap(&k_inner.ap(&ap!(B::closed(case.clone()), f, g)))
                    });
                    eta_y.ap(&k_rz.ap(&by_g))
                });
                wrap(k_ly.ap(&by_f))
            }
            _ => unreachable!("not a constant"),
        }
    }

    fn ku_const(&self, c: &Tm) -> Result<B, TranslateError> {
        let nuc = self.nuc;
        let ku = |s: &Ty| ku_ty(nuc, s);
        let n = Ty::Nat;
        let ty = c.constant_type().expect("constant");
        let wrap = |b: B| -> Result<B, TranslateError> { Ok(nuc.eta_b(&ku(&ty)?)?.ap(&b)) };
        match c {
            Tm::Zero => Ok(nuc.eta_b(&n)?.ap(&zero())),
            Tm::Suc => {
                let eta = nuc.eta_b(&n)?;
                wrap(lam(n, move |k| eta.ap(&suc(&k))))
            }
            Tm::Rec(sigma) => {
                let s = ku(sigma)?;
                let js = nuc.j(&s)?;
                let f_ty = Ty::arrow(n.clone(), nuc.j(&Ty::arrow(s.clone(), js.clone()))?);
                let z = Ty::arrow(n, js);
                let x = Ty::arrow(f_ty.clone(), nuc.j(&z)?);
                let recb = rec_bullet_b(nuc, &s)?;
                let (eta_z, eta_x) = (nuc.eta_b(&z)?, nuc.eta_b(&x)?);
                wrap(lam(s, move |a| {
                    let (recb, eta_z) = (recb.clone(), eta_z.clone());
                    eta_x.ap(&lam(f_ty.clone(), move |f| eta_z.ap(&ap!(recb, a, f))))
                }))
            }
            Tm::Pair(l, r) => {
                let (kl, kr) = (ku(l)?, ku(r)?);
                let prod = Ty::prod(kl.clone(), kr.clone());
                let eta_p = nuc.eta_b(&prod)?;
                let eta_mid = nuc.eta_b(&Ty::arrow(kr.clone(), nuc.j(&prod)?))?;
                wrap(lam(kl.clone(), move |a| {
                    let (kl, kr, eta_p) = (kl.clone(), kr.clone(), eta_p.clone());
                    eta_mid.ap(&lam(kr.clone(), move |b| eta_p.ap(&pair(&kl, &kr, &a, &b))))
                }))
            }
            Tm::Pr1(l, r) | Tm::Pr2(l, r) => {
                let (kl, kr) = (ku(l)?, ku(r)?);
                let first = matches!(c, Tm::Pr1(..));
                let out = if first { kl.clone() } else { kr.clone() };
                let eta = nuc.eta_b(&out)?;
                wrap(lam(Ty::prod(kl.clone(), kr.clone()), move |p| {
                    eta.ap(&if first {
                        pr1(&kl, &kr, &p)
                    } else {
                        pr2(&kl, &kr, &p)
                    })
                }))
            }
            Tm::Inl(l, r) | Tm::Inr(l, r) => {
                let (kl, kr) = (ku(l)?, ku(r)?);
                let eta = nuc.eta_b(&Ty::sum(kl.clone(), kr.clone()))?;
                let left = matches!(c, Tm::Inl(..));
                let dom = if left { kl.clone() } else { kr.clone() };
                wrap(lam(dom, move |x| {
                    eta.ap(&if left {
                        inl(&kl, &kr, &x)
                    } else {
                        inr(&kl, &kr, &x)
                    })
                }))
            }
            Tm::Case(l, r, m) => {
                let (kl, kr, km) = (ku(l)?, ku(r)?, ku(m)?);
                let jm = nuc.j(&km)?;
                let lf = Ty::arrow(kl.clone(), jm.clone());
                let rf = Ty::arrow(kr.clone(), jm.clone());
                let z = Ty::arrow(Ty::sum(kl.clone(), kr.clone()), jm.clone());
                let y = Ty::arrow(rf.clone(), nuc.j(&z)?);
                let case = Tm::Case(kl, kr, jm);
                let (eta_z, eta_y) = (nuc.eta_b(&z)?, nuc.eta_b(&y)?);
                wrap(lam(lf, move |f| {
                    let (case, eta_z) = (case.clone(), eta_z.clone());
                    eta_y.ap(&lam(rf.clone(), move |g| {
                        eta_z.ap(&ap!(B::closed(case.clone()), f, g))
                    }))
                }))
            }
            _ => unreachable!("not a constant"),
        }
    }
}
