//! Extraction pipelines: translate a closed term under a nucleus, apply it to
//! the generic element and project out the witness.

use thiserror::Error;

use crate::ap;
use crate::build::*;
use crate::nuclei::{self, any_nucleus, generic_element, NucleiError, NucleusKind};
use crate::prelude;
use crate::syntax::{typecheck, Ctx, Tm, Ty, TypeError};
use crate::translate::{monadic_apply, translate_closed, Nucleus, Style, TranslateError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("expected a closed term of type {expected}, found {found}")]
    WrongType { expected: Ty, found: Ty },
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Nuclei(#[from] NucleiError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Value and modulus components of a continuity witness, both closed
/// terms of type `(N -> N) -> N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityPair {
    pub value: Tm,
    pub modulus: Tm,
}

/// The three components of a bar recursion witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarTriple {
    pub sigma: Ty,
    /// `(N -> N) -> N`
    pub value: Tm,
    /// `N* -> N`, read as a predicate with `1` for true
    pub bar: Tm,
    /// General bar recursor at motive `sigma`
    pub recursor: Tm,
}

fn expect_type(t: &Tm, expected: &Ty) -> Result<(), ExtractError> {
    let found = typecheck(&Ctx::new(), t)?;
    if &found == expected {
        Ok(())
    } else {
        Err(ExtractError::WrongType {
            expected: expected.clone(),
            found,
        })
    }
}

/// `f^J Ω` for a functional `f` under the given nucleus.
fn apply_to_generic(nuc: &Nucleus, kind: &NucleusKind, f: &Tm) -> Result<B, ExtractError> {
    expect_type(f, &Ty::functional())?;
    let (fj, _) = translate_closed(Style::Gentzen, nuc, f)?;
    let omega = generic_element(kind)?;
    Ok(B::closed(fj).ap(&B::closed(omega)))
}

/// `t^J` under the majorizability nucleus, which is a majorant of `t`.
pub fn majorant(t: &Tm, rho: &Ty) -> Result<Tm, ExtractError> {
    expect_type(t, rho)?;
    let nuc = any_nucleus(&NucleusKind::Majorizability);
    let (tj, ty) = translate_closed(Style::Gentzen, &nuc, t)?;
    debug_assert_eq!(&ty, rho);
    Ok(tj)
}

fn continuity_pair(kind: NucleusKind, f: &Tm) -> Result<ContinuityPair, ExtractError> {
    // Terms with sums need J at sum types; at N the generalized continuity
    // nucleus coincides with the simple one, so Ω still applies.
    let nuc = if f.mentions_sum() && kind == NucleusKind::Continuity {
        any_nucleus(&NucleusKind::GenContinuity)
    } else {
        any_nucleus(&kind)
    };
    let w = apply_to_generic(&nuc, &kind, f)?;
    Ok(ContinuityPair {
        value: nuclei::cont_value(&w).build(),
        modulus: nuclei::cont_modulus(&w).build(),
    })
}

/// Value and modulus of pointwise continuity, `V` and `M` of `f^J Ω`.
pub fn continuity_modulus(f: &Tm) -> Result<ContinuityPair, ExtractError> {
    continuity_pair(NucleusKind::Continuity, f)
}

/// Value and modulus of uniform continuity.
pub fn uniform_continuity_modulus(f: &Tm) -> Result<ContinuityPair, ExtractError> {
    continuity_pair(NucleusKind::UniformContinuity, f)
}

/// Value, securing bar and bar recursor of `Y^J Ω`.
pub fn bar_triple(y: &Tm, sigma: &Ty) -> Result<BarTriple, ExtractError> {
    let kind = NucleusKind::BarRecursion(sigma.clone());
    let w = apply_to_generic(&any_nucleus(&kind), &kind, y)?;
    Ok(BarTriple {
        sigma: sigma.clone(),
        value: nuclei::bar_value(sigma, &w).build(),
        bar: nuclei::bar_secure(sigma, &w).build(),
        recursor: nuclei::bar_recursor(sigma, &w).build(),
    })
}

/// A modulus of uniform continuity built from the bar recursor:
/// `λδ. B(λs. 0, λs f. 1 + max{f n | n ≤ δ|s|}, nil)`.
pub fn uc_modulus_via_bar(y: &Tm) -> Result<Tm, ExtractError> {
    let triple = bar_triple(y, &Ty::Nat)?;
    let rec = B::closed(triple.recursor);
    let m = lam(Ty::seq(), move |d| {
        let g = lam(Ty::finseq(), |_| zero());
        let h = lam2(Ty::finseq(), Ty::seq(), move |s, f| {
            let len = B::closed(prelude::seq_len()).ap(&s);
            suc(&ap!(B::closed(prelude::phi()), f, d.ap(&len)))
        });
        ap!(rec, g, h, B::closed(prelude::seq_nil()))
    });
    Ok(m.build())
}

/// Modulus of continuity from the Kuroda-style translation under the
/// generalized continuity nucleus: `(ku f) • η(λn. ⟨λα. α n, λα. n + 1⟩)`,
/// projected to its modulus component.
pub fn kuroda_modulus(f: &Tm) -> Result<Tm, ExtractError> {
    expect_type(f, &Ty::functional())?;
    let nuc = any_nucleus(&NucleusKind::GenContinuity);
    let (fk, _) = translate_closed(Style::Kuroda, &nuc, f)?;
    let jn = nuc.j(&Ty::Nat)?;
    let probe_ty = Ty::arrow(Ty::Nat, jn);
    let probe = ap!(B::closed(nuc.eta(&probe_ty)?), nuclei::cont_probe()).build();
    let w = monadic_apply(Style::Kuroda, &nuc, &fk, &probe, &probe_ty, &Ty::Nat)?;
    Ok(nuclei::cont_modulus(&B::closed(w)).build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::eval::{Evaluator, Value};
    use crate::sample::{HostSeq, Sampler};

    fn run(t: &Tm, args: &[Value]) -> u64 {
        let ev = Evaluator::default();
        let v = ev.eval_closed(t).unwrap();
        ev.apply_nat(&v, args).unwrap()
    }

    fn seqs(seed: u64, n: usize) -> Vec<HostSeq> {
        let mut s = Sampler::new(seed);
        (0..n).map(|_| s.seq_bounded(5)).collect()
    }

    fn body(name: &str) -> Tm {
        corpus::get(name).body
    }

    #[test]
    fn majorant_of_successor_is_successor() {
        let m = majorant(&Tm::Suc, &Ty::seq()).unwrap();
        for k in 0..=10 {
            assert_eq!(run(&m, &[Value::Nat(k)]), k + 1);
        }
        let z = majorant(&Tm::Zero, &Ty::Nat).unwrap();
        assert_eq!(run(&z, &[]), 0);
    }

    #[test]
    fn majorant_of_max_dominates() {
        let d = corpus::get("maxT");
        let m = majorant(&d.body, &d.ty).unwrap();
        for a in 0..=6 {
            for b in 0..=6 {
                let args = [Value::Nat(a), Value::Nat(b)];
                assert!(run(&m, &args) >= run(&d.body, &args));
            }
        }
    }

    #[test]
    fn continuity_moduli_of_small_functionals() {
        let t43 = continuity_modulus(&body("t43")).unwrap();
        let c5 = continuity_modulus(&body("const5")).unwrap();
        let aa0 = continuity_modulus(&body("aa0")).unwrap();
        for a in seqs(1, 20) {
            let v = a.to_value();
            assert_eq!(run(&t43.modulus, std::slice::from_ref(&v)), 0);
            assert_eq!(run(&c5.modulus, std::slice::from_ref(&v)), 0);
            assert_eq!(
                run(&aa0.modulus, std::slice::from_ref(&v)),
                (a.at(0) + 1).max(1)
            );
            assert_eq!(run(&aa0.value, &[v]), a.at(a.at(0)));
        }
    }

    #[test]
    fn extracted_values_agree_with_sources() {
        for d in corpus::functionals() {
            let pair = continuity_modulus(&d.body).unwrap();
            for a in seqs(2, 10) {
                let v = a.to_value();
                assert_eq!(
                    run(&pair.value, std::slice::from_ref(&v)),
                    run(&d.body, &[v]),
                    "{}",
                    d.name
                );
            }
        }
    }

    #[test]
    fn uniform_moduli_of_small_functionals() {
        let c5 = uniform_continuity_modulus(&body("const5")).unwrap();
        let t43 = uniform_continuity_modulus(&body("t43")).unwrap();
        let a0 = uniform_continuity_modulus(&body("a0")).unwrap();
        for k in 1..=3 {
            let d = HostSeq::constant(k).to_value();
            assert_eq!(run(&c5.modulus, std::slice::from_ref(&d)), 0);
            // Φ ranges over every index up to the image bound, so the base
            // case `a 0` of the recursion is inspected
            assert_eq!(run(&t43.modulus, std::slice::from_ref(&d)), 1);
            assert!(run(&a0.modulus, &[d]) >= 1);
        }
    }

    #[test]
    fn bar_of_projection_secures_nonempty_sequences() {
        use crate::sample::HostFinSeq;
        let t = bar_triple(&body("a0"), &Ty::Nat).unwrap();
        let c = bar_triple(&body("const5"), &Ty::Nat).unwrap();
        for len in 0..=3 {
            let s = HostFinSeq(vec![2; len]).to_value();
            assert_eq!(run(&t.bar, std::slice::from_ref(&s)), u64::from(len >= 1));
            assert_eq!(run(&c.bar, &[s]), 1);
        }
    }

    #[test]
    fn uc_modulus_via_bar_of_constant_is_zero() {
        let m = uc_modulus_via_bar(&body("const5")).unwrap();
        assert_eq!(typecheck(&Ctx::new(), &m).unwrap(), Ty::functional());
        for k in 0..=3 {
            assert_eq!(run(&m, &[HostSeq::constant(k).to_value()]), 0);
        }
    }

    #[test]
    fn kuroda_moduli() {
        let t43 = kuroda_modulus(&body("t43")).unwrap();
        let c5 = kuroda_modulus(&body("const5")).unwrap();
        let a0 = kuroda_modulus(&body("a0")).unwrap();
        for m in [&t43, &c5, &a0] {
            assert_eq!(typecheck(&Ctx::new(), m).unwrap(), Ty::functional());
        }
        for a in seqs(3, 20) {
            let v = a.to_value();
            assert_eq!(run(&t43, std::slice::from_ref(&v)), 1);
            assert_eq!(run(&c5, std::slice::from_ref(&v)), 0);
            assert_eq!(run(&a0, &[v]), 1);
        }
    }

    #[test]
    fn wrong_types_are_rejected() {
        assert!(matches!(
            continuity_modulus(&Tm::Zero),
            Err(ExtractError::WrongType { .. })
        ));
        assert!(matches!(
            bar_triple(&body("sumT"), &Ty::Nat),
            Err(ExtractError::Translate(
                TranslateError::NucleusTooWeak { .. }
            ))
        ));
    }
}
