//! The concrete nuclei: identity, majorizability, lifting, continuity,
//! uniform continuity and general bar recursion, with their generic
//! elements, plus the generalized identity and continuity nuclei.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ap;
use crate::build::*;
use crate::prelude;
use crate::syntax::{Tm, Ty};
use crate::translate::{GenNucleus, Nucleus, SimpleNucleus, TyWithHole};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NucleiError {
    #[error("`{0}` is a generalized nucleus; use gen_nucleus")]
    WrongTier(String),
    #[error("`{0}` is a simple nucleus; use nucleus")]
    NotGeneralized(String),
    #[error("nucleus `{0}` has no generic element")]
    NoGenericElement(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NucleusKind {
    Identity,
    Majorizability,
    /// `Jℕ = X -> ℕ`
    Lifting(Ty),
    Continuity,
    UniformContinuity,
    /// General bar recursion with result type `σ`.
    BarRecursion(Ty),
    GenIdentity,
    GenContinuity,
}

impl NucleusKind {
    /// The names accepted on the command line.
    pub const CLI_NAMES: [&'static str; 8] = [
        "identity",
        "major",
        "lifting",
        "cont",
        "ucont",
        "bar",
        "gen-identity",
        "gen-cont",
    ];

    pub fn is_generalized(&self) -> bool {
        matches!(self, NucleusKind::GenIdentity | NucleusKind::GenContinuity)
    }

    pub fn cli_name(&self) -> &'static str {
        match self {
            NucleusKind::Identity => "identity",
            NucleusKind::Majorizability => "major",
            NucleusKind::Lifting(_) => "lifting",
            NucleusKind::Continuity => "cont",
            NucleusKind::UniformContinuity => "ucont",
            NucleusKind::BarRecursion(_) => "bar",
            NucleusKind::GenIdentity => "gen-identity",
            NucleusKind::GenContinuity => "gen-cont",
        }
    }
}

impl fmt::Display for NucleusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NucleusKind::Lifting(x) => write!(f, "lifting[{x}]"),
            NucleusKind::BarRecursion(s) => write!(f, "bar[{s}]"),
            other => f.write_str(other.cli_name()),
        }
    }
}

impl FromStr for NucleusKind {
    type Err = String;

    /// `lifting` is taken at `X = N -> N` and `bar` at `σ = N`.
    fn from_str(s: &str) -> Result<NucleusKind, String> {
        Ok(match s {
            "identity" => NucleusKind::Identity,
            "major" => NucleusKind::Majorizability,
            "lifting" => NucleusKind::Lifting(Ty::seq()),
            "cont" => NucleusKind::Continuity,
            "ucont" => NucleusKind::UniformContinuity,
            "bar" => NucleusKind::BarRecursion(Ty::Nat),
            "gen-identity" => NucleusKind::GenIdentity,
            "gen-cont" => NucleusKind::GenContinuity,
            other => {
                return Err(format!(
                    "unknown nucleus `{other}` (expected one of {})",
                    NucleusKind::CLI_NAMES.join(", ")
                ))
            }
        })
    }
}

fn n() -> Ty {
    Ty::Nat
}

fn f_ty() -> Ty {
    Ty::functional()
}

/// `Jℕ = (ℕ^ℕ -> ℕ) × (ℕ^ℕ -> ℕ)` for both continuity nuclei.
pub fn continuity_jn() -> Ty {
    Ty::prod(f_ty(), f_ty())
}

/// `ℕ* -> 2`
pub fn bar_predicate_ty() -> Ty {
    Ty::arrow(Ty::finseq(), n())
}

/// `Jℕ = (ℕ^ℕ -> ℕ) × ((ℕ* -> 2) × Bσ)`
pub fn bar_jn(sigma: &Ty) -> Ty {
    Ty::prod(
        f_ty(),
        Ty::prod(bar_predicate_ty(), prelude::bar_recursor_ty(sigma)),
    )
}

/// `V_w` for the continuity nuclei.
pub fn cont_value(w: &B) -> B {
    pr1(&f_ty(), &f_ty(), w)
}

/// `M_w` for the continuity nuclei.
pub fn cont_modulus(w: &B) -> B {
    pr2(&f_ty(), &f_ty(), w)
}

/// `V_w` for the bar recursion nucleus.
pub fn bar_value(sigma: &Ty, w: &B) -> B {
    let rest = Ty::prod(bar_predicate_ty(), prelude::bar_recursor_ty(sigma));
    pr1(&f_ty(), &rest, w)
}

/// `S_w` for the bar recursion nucleus.
pub fn bar_secure(sigma: &Ty, w: &B) -> B {
    let (p, b) = (bar_predicate_ty(), prelude::bar_recursor_ty(sigma));
    let rest = pr2(&f_ty(), &Ty::prod(p.clone(), b.clone()), w);
    pr1(&p, &b, &rest)
}

/// `B_w` for the bar recursion nucleus.
pub fn bar_recursor(sigma: &Ty, w: &B) -> B {
    let (p, b) = (bar_predicate_ty(), prelude::bar_recursor_ty(sigma));
    let rest = pr2(&f_ty(), &Ty::prod(p.clone(), b.clone()), w);
    pr2(&p, &b, &rest)
}

fn max(a: &B, b: &B) -> B {
    ap!(B::closed(prelude::max()), a, b)
}

fn identity() -> SimpleNucleus {
    SimpleNucleus {
        name: "identity".into(),
        jn: n(),
        eta: lam(n(), |x| x).build(),
        kappa: lam2(Ty::seq(), n(), |g, x| g.ap(&x)).build(),
        omega: None,
        monad_laws_expected: true,
    }
}

fn majorizability() -> SimpleNucleus {
    // κ(g, n) = rec(g 0, λk r. max(r, g(k+1)), n)
    let kappa = lam2(Ty::seq(), n(), |g, k| {
        let g2 = g.clone();
        let step = lam2(n(), n(), move |j, r| max(&r, &g2.ap(&suc(&j))));
        rec(&n(), &g.ap(&zero()), &step, &k)
    });
    SimpleNucleus {
        name: "major".into(),
        jn: n(),
        eta: lam(n(), |x| x).build(),
        kappa: kappa.build(),
        omega: None,
        monad_laws_expected: false,
    }
}

fn lifting(x: &Ty) -> SimpleNucleus {
    let jn = Ty::arrow(x.clone(), n());
    let x1 = x.clone();
    let eta = lam(n(), move |k| lam(x1.clone(), move |_| k.clone()));
    let x2 = x.clone();
    let kappa = lam2(Ty::arrow(n(), jn.clone()), jn.clone(), move |g, f| {
        lam(x2.clone(), move |p| ap!(g, f.ap(&p), p))
    });
    let omega =
        (*x == Ty::seq()).then(|| lam2(jn.clone(), Ty::seq(), |f, a| a.ap(&f.ap(&a))).build());
    SimpleNucleus {
        name: format!("lifting[{x}]"),
        jn,
        eta: eta.build(),
        kappa: kappa.build(),
        omega,
        monad_laws_expected: true,
    }
}

fn cont_eta() -> B {
    lam(n(), |k| {
        pair(
            &f_ty(),
            &f_ty(),
            &lam(Ty::seq(), move |_| k.clone()),
            &lam(Ty::seq(), |_| zero()),
        )
    })
}

/// `λn. ⟨λα. α n, λα. n + 1⟩`
pub fn cont_probe() -> B {
    lam(n(), |k| {
        let k2 = k.clone();
        pair(
            &f_ty(),
            &f_ty(),
            &lam(Ty::seq(), move |a| a.ap(&k)),
            &lam(Ty::seq(), move |_| suc(&k2)),
        )
    })
}

/// `V_{g(V_w α)} α`, the value component shared by continuity-like nuclei.
fn composed_value(g: &B, vw: &B, a: &B) -> B {
    cont_value(&g.ap(&vw.ap(a))).ap(a)
}

fn continuity() -> SimpleNucleus {
    let jn = continuity_jn();
    let kappa = lam2(Ty::arrow(n(), jn.clone()), jn.clone(), |g, w| {
        let vw = cont_value(&w);
        let mw = cont_modulus(&w);
        let (g1, vw1) = (g.clone(), vw.clone());
        let value = lam(Ty::seq(), move |a| composed_value(&g1, &vw1, &a));
        let modulus = lam(Ty::seq(), move |a| {
            max(&cont_modulus(&g.ap(&vw.ap(&a))).ap(&a), &mw.ap(&a))
        });
        pair(&f_ty(), &f_ty(), &value, &modulus)
    });
    let omega = kappa.ap(&cont_probe());
    SimpleNucleus {
        name: "cont".into(),
        jn,
        eta: cont_eta().build(),
        kappa: kappa.build(),
        omega: Some(omega.build()),
        monad_laws_expected: true,
    }
}

fn uniform_continuity() -> SimpleNucleus {
    let jn = continuity_jn();
    let kappa = lam2(Ty::arrow(n(), jn.clone()), jn.clone(), |g, w| {
        let vw = cont_value(&w);
        let mw = cont_modulus(&w);
        let (g1, vw1) = (g.clone(), vw.clone());
        let value = lam(Ty::seq(), move |a| composed_value(&g1, &vw1, &a));
        // λδ. max(Φ(λi. M_{g i} δ, Θ(M_w δ, V_w, δ)), M_w δ)
        let modulus = lam(Ty::seq(), move |d| {
            let (g, vw, d0) = (g.clone(), vw.clone(), d.clone());
            // bind M_w δ once so call-by-need shares it
            let body = lam(n(), move |m| {
                let (g, d1) = (g.clone(), d0.clone());
                let moduli = lam(n(), move |i| cont_modulus(&g.ap(&i)).ap(&d1));
                let bound = ap!(B::closed(prelude::theta()), m, vw, d0);
                max(&ap!(B::closed(prelude::phi()), moduli, bound), &m)
            });
            body.ap(&mw.ap(&d))
        });
        pair(&f_ty(), &f_ty(), &value, &modulus)
    });
    let omega = kappa.ap(&cont_probe());
    SimpleNucleus {
        name: "ucont".into(),
        jn,
        eta: cont_eta().build(),
        kappa: kappa.build(),
        omega: Some(omega.build()),
        monad_laws_expected: true,
    }
}

/// `⟨v, ⟨s, b⟩⟩` in the bar recursion encoding.
fn triple(sigma: &Ty, v: &B, s: &B, b: &B) -> B {
    let (p, bt) = (bar_predicate_ty(), prelude::bar_recursor_ty(sigma));
    let rest = pair(&p, &bt, s, b);
    pair(&f_ty(), &Ty::prod(p, bt), v, &rest)
}

/// `λn. ⟨λα. α n, λs. Le(n, |s|), Ψ n⟩`
pub fn bar_probe(sigma: &Ty) -> B {
    let sigma = sigma.clone();
    lam(n(), move |k| {
        let k1 = k.clone();
        let v = lam(Ty::seq(), move |a| a.ap(&k1));
        let k2 = k.clone();
        let s = lam(Ty::finseq(), move |s| {
            ap!(
                B::closed(prelude::le()),
                k2,
                B::closed(prelude::seq_len()).ap(&s)
            )
        });
        let b = B::closed(prelude::psi(&sigma)).ap(&k);
        triple(&sigma, &v, &s, &b)
    })
}

fn bar_recursion(sigma: &Ty) -> SimpleNucleus {
    let jn = bar_jn(sigma);
    let fs = Ty::finseq();
    let g_ty = Ty::arrow(fs.clone(), sigma.clone());
    let h_ty = Ty::arrows([fs.clone(), Ty::arrow(n(), sigma.clone())], sigma.clone());

    let s0 = sigma.clone();
    let (g0, h0) = (g_ty.clone(), h_ty.clone());
    let eta = lam(n(), move |k| {
        let v = lam(Ty::seq(), move |_| k.clone());
        let s = lam(Ty::finseq(), |_| num(1));
        let b = lam2(g0.clone(), h0.clone(), |gg, _| gg);
        triple(&s0, &v, &s, &b)
    });

    let s1 = sigma.clone();
    let kappa = lam2(Ty::arrow(n(), jn.clone()), jn.clone(), move |g, w| {
        let sigma = s1.clone();
        let vw = bar_value(&sigma, &w);
        let (g1, vw1, sg1) = (g.clone(), vw.clone(), sigma.clone());
        let value = lam(Ty::seq(), move |a| {
            bar_value(&sg1, &g1.ap(&vw1.ap(&a))).ap(&a)
        });
        // at `s`, the continuation is chosen at the zero-extension of `s`
        let at_hat = {
            let (g, vw) = (g.clone(), vw.clone());
            move |s: &B| g.ap(&vw.ap(&B::closed(prelude::seq_hat()).ap(s)))
        };
        let (sw_w, sg2, at_hat2) = (w.clone(), sigma.clone(), at_hat.clone());
        let secure = lam(Ty::finseq(), move |s| {
            ap!(
                B::closed(prelude::min()),
                bar_secure(&sg2, &sw_w).ap(&s),
                bar_secure(&sg2, &at_hat2(&s)).ap(&s)
            )
        });
        let (bw_w, sg3) = (w.clone(), sigma.clone());
        let (g_ty, h_ty) = (g_ty.clone(), h_ty.clone());
        let fs = fs.clone();
        let recursor = lam2(g_ty, h_ty, move |gg, hh| {
            let (sg4, at_hat, gg1, hh1) = (sg3.clone(), at_hat.clone(), gg.clone(), hh.clone());
            let inner = lam(fs.clone(), move |s| {
                ap!(bar_recursor(&sg4, &at_hat(&s)), gg1, hh1, s)
            });
            ap!(bar_recursor(&sg3, &bw_w), inner, hh)
        });
        triple(&sigma, &value, &secure, &recursor)
    });

    let omega = kappa.ap(&bar_probe(sigma));
    SimpleNucleus {
        name: format!("bar[{sigma}]"),
        jn,
        eta: eta.build(),
        kappa: kappa.build(),
        omega: Some(omega.build()),
        monad_laws_expected: true,
    }
}

fn gen_identity() -> GenNucleus {
    GenNucleus::new(
        "gen-identity",
        TyWithHole::Hole,
        |s| lam(s.clone(), |x| x).build(),
        |s, t| lam2(Ty::arrow(s.clone(), t.clone()), s.clone(), |g, x| g.ap(&x)).build(),
    )
    .expect("one hole")
}

/// `Jσ = (ℕ^ℕ -> σ) × (ℕ^ℕ -> ℕ)`
pub fn gen_continuity_j(s: &Ty) -> Ty {
    Ty::prod(Ty::arrow(Ty::seq(), s.clone()), f_ty())
}

fn gen_continuity() -> GenNucleus {
    let shape = TyWithHole::prod(
        TyWithHole::arrow(TyWithHole::from_ty(&Ty::seq()), TyWithHole::Hole),
        TyWithHole::from_ty(&f_ty()),
    );
    let eta_at = |s: &Ty| {
        let vs = Ty::arrow(Ty::seq(), s.clone());
        lam(s.clone(), move |x| {
            pair(
                &vs,
                &f_ty(),
                &lam(Ty::seq(), move |_| x.clone()),
                &lam(Ty::seq(), |_| zero()),
            )
        })
        .build()
    };
    let kappa_at = |s: &Ty, t: &Ty| {
        let (vs, vt) = (
            Ty::arrow(Ty::seq(), s.clone()),
            Ty::arrow(Ty::seq(), t.clone()),
        );
        let (js, jt) = (gen_continuity_j(s), gen_continuity_j(t));
        lam2(Ty::arrow(s.clone(), jt), js, move |g, w| {
            let (vs1, vt1) = (vs.clone(), vt.clone());
            let at = {
                let (g, w, vs) = (g.clone(), w.clone(), vs.clone());
                move |a: &B| g.ap(&pr1(&vs, &f_ty(), &w).ap(a))
            };
            let at1 = at.clone();
            let value = lam(Ty::seq(), move |a| pr1(&vt1, &f_ty(), &at1(&a)).ap(&a));
            let vt2 = vt.clone();
            let modulus = lam(Ty::seq(), move |a| {
                max(
                    &pr2(&vt2, &f_ty(), &at(&a)).ap(&a),
                    &pr2(&vs1, &f_ty(), &w).ap(&a),
                )
            });
            pair(&vt, &f_ty(), &value, &modulus)
        })
        .build()
    };
    GenNucleus::new("gen-cont", shape, eta_at, kappa_at).expect("one hole")
}

/// The simple nucleus of the given kind.
pub fn nucleus(kind: &NucleusKind) -> Result<SimpleNucleus, NucleiError> {
    Ok(match kind {
        NucleusKind::Identity => identity(),
        NucleusKind::Majorizability => majorizability(),
        NucleusKind::Lifting(x) => lifting(x),
        NucleusKind::Continuity => continuity(),
        NucleusKind::UniformContinuity => uniform_continuity(),
        NucleusKind::BarRecursion(s) => bar_recursion(s),
        NucleusKind::GenIdentity | NucleusKind::GenContinuity => {
            return Err(NucleiError::WrongTier(kind.to_string()))
        }
    })
}

/// The generalized nucleus of the given kind.
pub fn gen_nucleus(kind: &NucleusKind) -> Result<GenNucleus, NucleiError> {
    match kind {
        NucleusKind::GenIdentity => Ok(gen_identity()),
        NucleusKind::GenContinuity => Ok(gen_continuity()),
        _ => Err(NucleiError::NotGeneralized(kind.to_string())),
    }
}

/// Either tier, as accepted by the translations.
pub fn any_nucleus(kind: &NucleusKind) -> Nucleus {
    match kind {
        NucleusKind::GenIdentity | NucleusKind::GenContinuity => {
            Nucleus::Gen(gen_nucleus(kind).expect("generalized kind"))
        }
        _ => Nucleus::Simple(nucleus(kind).expect("simple kind")),
    }
}

/// `Ω : Jℕ^ℕ`, the generic element of the nucleus, where it has one.
pub fn generic_element(kind: &NucleusKind) -> Result<Tm, NucleiError> {
    let none = || NucleiError::NoGenericElement(kind.to_string());
    match kind {
        NucleusKind::GenIdentity | NucleusKind::GenContinuity => Err(none()),
        _ => nucleus(kind)?.omega.ok_or_else(none),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{Evaluator, Value};
    use crate::syntax::{typecheck, Ctx};

    /// Evaluates `f` and applies it to `args`, expecting a numeral.
    fn nat_at(f: &B, args: &[Value]) -> u64 {
        let ev = Evaluator::default();
        let fv = ev.eval_closed(&f.build()).unwrap();
        ev.apply_nat(&fv, args).unwrap()
    }

    fn nat(t: &B) -> u64 {
        nat_at(t, &[])
    }

    fn all_simple() -> Vec<NucleusKind> {
        vec![
            NucleusKind::Identity,
            NucleusKind::Majorizability,
            NucleusKind::Lifting(Ty::seq()),
            NucleusKind::Lifting(Ty::Nat),
            NucleusKind::Continuity,
            NucleusKind::UniformContinuity,
            NucleusKind::BarRecursion(Ty::Nat),
            NucleusKind::BarRecursion(Ty::seq()),
        ]
    }

    #[test]
    fn simple_nuclei_are_well_typed() {
        for kind in all_simple() {
            let nuc = nucleus(&kind).unwrap();
            nuc.validate().unwrap_or_else(|e| panic!("{kind}: {e}"));
        }
    }

    #[test]
    fn generic_elements_exist_where_expected() {
        for name in NucleusKind::CLI_NAMES {
            let kind: NucleusKind = name.parse().unwrap();
            let has = !matches!(
                kind,
                NucleusKind::Identity
                    | NucleusKind::Majorizability
                    | NucleusKind::GenIdentity
                    | NucleusKind::GenContinuity
            );
            assert_eq!(generic_element(&kind).is_ok(), has, "{name}");
        }
        assert!(generic_element(&NucleusKind::Lifting(Ty::Nat)).is_err());
    }

    #[test]
    fn tiers_are_checked() {
        assert_eq!(
            nucleus(&NucleusKind::GenContinuity).unwrap_err(),
            NucleiError::WrongTier("gen-cont".into())
        );
        assert!(gen_nucleus(&NucleusKind::Continuity).is_err());
        assert!("nope".parse::<NucleusKind>().is_err());
    }

    fn table(values: &'static [u64]) -> Value {
        Value::foreign(move |k| values.get(k as usize).copied().unwrap_or(0))
    }

    #[test]
    fn majorizability_kappa_is_running_max() {
        let kappa = B::closed(nucleus(&NucleusKind::Majorizability).unwrap().kappa);
        let got = nat_at(&kappa, &[table(&[3, 9, 1, 4, 2]), Value::Nat(3)]);
        assert_eq!(got, 9);
        assert_eq!(nat_at(&kappa, &[table(&[3, 9]), Value::Nat(0)]), 3);
    }

    #[test]
    fn majorizability_breaks_left_identity() {
        // g 5 = 0 but g is 7 below 5, so κ(g, η 5) = 7
        let nuc = nucleus(&NucleusKind::Majorizability).unwrap();
        let g = table(&[7, 7, 7, 7, 7, 0]);
        let lhs = lam(Ty::seq(), move |g| {
            ap!(
                B::closed(nuc.kappa.clone()),
                g,
                B::closed(nuc.eta.clone()).ap(&num(5))
            )
        });
        let rhs = lam(Ty::seq(), |g| g.ap(&num(5)));
        assert_eq!(
            (nat_at(&lhs, std::slice::from_ref(&g)), nat_at(&rhs, &[g])),
            (7, 0)
        );
    }

    fn alpha(f: fn(u64) -> u64) -> Value {
        Value::foreign(f)
    }

    #[test]
    fn continuity_eta_is_constant_with_zero_modulus() {
        let nuc = nucleus(&NucleusKind::Continuity).unwrap();
        let w = B::closed(nuc.eta).ap(&num(7));
        let a = alpha(|k| k * 10);
        assert_eq!(nat_at(&cont_value(&w), std::slice::from_ref(&a)), 7);
        assert_eq!(nat_at(&cont_modulus(&w), &[a]), 0);
    }

    #[test]
    fn continuity_omega_reads_the_sequence() {
        let nuc = nucleus(&NucleusKind::Continuity).unwrap();
        let omega = B::closed(generic_element(&NucleusKind::Continuity).unwrap());
        let w = omega.ap(&B::closed(nuc.eta).ap(&num(2)));
        let a = alpha(|k| k + 4);
        assert_eq!(nat_at(&cont_value(&w), std::slice::from_ref(&a)), 6);
        assert_eq!(nat_at(&cont_modulus(&w), &[a]), 3);
    }

    #[test]
    fn uniform_continuity_omega_bounds_over_the_cube() {
        // Ω applied to the identity functional's value: w = η 3, then
        // the modulus is 3 + 1 regardless of the sequence
        let nuc = nucleus(&NucleusKind::UniformContinuity).unwrap();
        let omega = B::closed(nuc.omega.clone().unwrap());
        let w = omega.ap(&B::closed(nuc.eta).ap(&num(3)));
        let d = alpha(|_| 1);
        assert_eq!(nat_at(&cont_value(&w), std::slice::from_ref(&d)), 1);
        assert_eq!(nat_at(&cont_modulus(&w), &[d]), 4);
    }

    #[test]
    fn lifting_omega_applies_the_point() {
        let kind = NucleusKind::Lifting(Ty::seq());
        let nuc = nucleus(&kind).unwrap();
        let omega = B::closed(generic_element(&kind).unwrap());
        // Ω (λα. α 0) α = α (α 0)
        let f = lam(Ty::seq(), |a| a.ap(&zero()));
        let a = alpha(|k| k + 3);
        assert_eq!(nat_at(&omega.ap(&f), std::slice::from_ref(&a)), 6);
        assert_eq!(nat_at(&B::closed(nuc.eta).ap(&num(8)), &[a]), 8);
    }

    #[test]
    fn bar_omega_of_eta_secures_long_sequences() {
        let kind = NucleusKind::BarRecursion(Ty::Nat);
        let nuc = nucleus(&kind).unwrap();
        let w = B::closed(generic_element(&kind).unwrap()).ap(&B::closed(nuc.eta).ap(&zero()));
        let secure = bar_secure(&Ty::Nat, &w);
        let nil = B::closed(prelude::seq_nil());
        let one = ap!(B::closed(prelude::seq_append()), nil, num(5));
        assert_eq!(nat(&secure.ap(&nil)), 0);
        assert_eq!(nat(&secure.ap(&one)), 1);
    }

    #[test]
    fn gen_continuity_agrees_with_continuity_at_nat() {
        let gen = gen_nucleus(&NucleusKind::GenContinuity).unwrap();
        let simple = nucleus(&NucleusKind::Continuity).unwrap();
        assert_eq!(gen.j(&Ty::Nat), simple.jn);
        let w = B::closed(simple.eta.clone()).ap(&num(1));
        let a = alpha(|k| 2 * k + 1);
        for kappa in [gen.kappa_at(&Ty::Nat, &Ty::Nat), simple.kappa.clone()] {
            let r = ap!(B::closed(kappa), cont_probe(), w);
            assert_eq!(nat_at(&cont_value(&r), std::slice::from_ref(&a)), 3);
            assert_eq!(nat_at(&cont_modulus(&r), std::slice::from_ref(&a)), 2);
        }
        let e = B::closed(gen.eta_at(&Ty::Nat)).ap(&num(9));
        assert_eq!(nat_at(&cont_value(&e), std::slice::from_ref(&a)), 9);
        assert_eq!(nat_at(&cont_modulus(&e), &[a]), 0);
    }

    #[test]
    fn gen_nuclei_are_well_typed_at_several_types() {
        let tys = [
            Ty::Nat,
            Ty::seq(),
            Ty::prod(Ty::Nat, Ty::seq()),
            Ty::sum(Ty::Nat, Ty::Nat),
        ];
        for kind in [NucleusKind::GenIdentity, NucleusKind::GenContinuity] {
            let gen = gen_nucleus(&kind).unwrap();
            for s in &tys {
                let eta = typecheck(&Ctx::new(), &gen.eta_at(s)).unwrap();
                assert_eq!(eta, Ty::arrow(s.clone(), gen.j(s)));
                for t in &tys {
                    let k = typecheck(&Ctx::new(), &gen.kappa_at(s, t)).unwrap();
                    let want = Ty::arrows([Ty::arrow(s.clone(), gen.j(t)), gen.j(s)], gen.j(t));
                    assert_eq!(k, want);
                }
            }
        }
    }

    #[test]
    fn gen_identity_eta_is_identity() {
        let gen = gen_nucleus(&NucleusKind::GenIdentity).unwrap();
        assert_eq!(gen.j(&Ty::seq()), Ty::seq());
        assert_eq!(nat(&B::closed(gen.eta_at(&Ty::Nat)).ap(&num(4))), 4);
    }
}
