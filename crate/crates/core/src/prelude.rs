//! Closed System T terms the nuclei are built from: arithmetic, booleans as
//! `0`/`1`, finite sequences encoded as `(N -> N) * N`, the running
//! maximum `phi`, the maximum-image functional `theta` and the bar
//! recursor `psi` for constant functionals.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::ap;
use crate::build::*;
use crate::syntax::{typecheck, Ctx, Tm, Ty};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PreludeError {
    #[error("unknown prelude name `{0}`")]
    UnknownPreludeName(String),
    #[error("prelude name `{name}` expects {expected} type parameter(s), got {found}")]
    WrongParameterCount {
        name: String,
        expected: usize,
        found: usize,
    },
}

fn n() -> Ty {
    Ty::Nat
}

fn cached(cell: &'static OnceLock<Tm>, make: fn() -> B) -> Tm {
    cell.get_or_init(|| make().build()).clone()
}

macro_rules! cached_term {
    ($(#[$m:meta])* $name:ident, $builder:ident) => {
        $(#[$m])*
        pub fn $name() -> Tm {
            static CELL: OnceLock<Tm> = OnceLock::new();
            cached(&CELL, $builder)
        }
    };
}

fn add_b() -> B {
    lam2(n(), n(), |m, k| {
        rec(&n(), &m, &lam2(n(), n(), |_, r| suc(&r)), &k)
    })
}

fn pred_b() -> B {
    lam(n(), |k| rec(&n(), &zero(), &lam2(n(), n(), |j, _| j), &k))
}

fn monus_b() -> B {
    lam2(n(), n(), |m, k| {
        rec(
            &n(),
            &m,
            &lam2(n(), n(), |_, r| B::closed(pred()).ap(&r)),
            &k,
        )
    })
}

fn max_b() -> B {
    let n2n = Ty::seq();
    let step = lam2(n(), n2n.clone(), |k, f| {
        let inner_step = lam2(n(), n(), move |m, _| suc(&f.ap(&m)));
        B::closed(Tm::Rec(n())).ap(&suc(&k)).ap(&inner_step)
    });
    B::closed(Tm::Rec(n2n)).ap(&lam(n(), |k| k)).ap(&step)
}

fn min_b() -> B {
    let n2n = Ty::seq();
    let step = lam2(n(), n2n.clone(), |_, f| {
        let inner_step = lam2(n(), n(), move |m, _| suc(&f.ap(&m)));
        B::closed(Tm::Rec(n())).ap(&zero()).ap(&inner_step)
    });
    B::closed(Tm::Rec(n2n)).ap(&lam(n(), |_| zero())).ap(&step)
}

fn sg_b() -> B {
    lam(n(), |k| {
        rec(&n(), &zero(), &lam2(n(), n(), |_, _| num(1)), &k)
    })
}

fn le_b() -> B {
    let n2n = Ty::seq();
    let base = lam(n(), |k| B::closed(sg()).ap(&k));
    let step = lam2(n(), n2n.clone(), |_, f| {
        lam(n(), move |k| {
            let f = f.clone();
            rec(&n(), &zero(), &lam2(n(), n(), move |j, _| f.ap(&j)), &k)
        })
    });
    B::closed(Tm::Rec(n2n)).ap(&base).ap(&step)
}

fn phi_b() -> B {
    lam2(Ty::seq(), n(), |a, k| {
        let a2 = a.clone();
        let step = lam2(n(), n(), move |j, r| {
            ap!(B::closed(max()), r, a2.ap(&suc(&j)))
        });
        rec(&n(), &a.ap(&zero()), &step, &k)
    })
}

fn cons_b() -> B {
    lam3(n(), Ty::seq(), n(), |i, a, j| {
        rec(&n(), &i, &lam2(n(), n(), move |k, _| a.ap(&k)), &j)
    })
}

fn seq_len_b() -> B {
    lam(Ty::finseq(), |s| pr2(&Ty::seq(), &n(), &s))
}

fn seq_hat_b() -> B {
    lam2(Ty::finseq(), n(), |s, i| {
        let below = ap!(B::closed(le()), i, B::closed(seq_len()).ap(&s));
        let entry = pr1(&Ty::seq(), &n(), &s).ap(&i);
        ap!(B::closed(ifz(&n())), below, zero(), entry)
    })
}

fn seq_append_b() -> B {
    lam2(Ty::finseq(), n(), |s, x| {
        let len = B::closed(seq_len()).ap(&s);
        let s2 = s.clone();
        let len2 = len.clone();
        let table = lam(n(), move |i| {
            let below = ap!(B::closed(le()), i, len2);
            let entry = pr1(&Ty::seq(), &n(), &s2).ap(&i);
            ap!(B::closed(ifz(&n())), below, x, entry)
        });
        pair(&Ty::seq(), &n(), &table, &suc(&len))
    })
}

fn seq_concat_b() -> B {
    lam3(Ty::finseq(), Ty::seq(), n(), |s, a, i| {
        let len = B::closed(seq_len()).ap(&s);
        let below = ap!(B::closed(le()), i, len);
        let tail = a.ap(&ap!(B::closed(monus()), i, len));
        let entry = pr1(&Ty::seq(), &n(), &s).ap(&i);
        ap!(B::closed(ifz(&n())), below, tail, entry)
    })
}

fn seq_take_b() -> B {
    lam2(Ty::seq(), n(), |a, k| pair(&Ty::seq(), &n(), &a, &k))
}

fn seq_nil_b() -> B {
    pair(&Ty::seq(), &n(), &lam(n(), |_| zero()), &zero())
}

fn theta_b() -> B {
    let f_ty = Ty::functional();
    let motive = Ty::arrows([f_ty.clone(), Ty::seq()], n());
    let base = lam2(f_ty.clone(), Ty::seq(), |f, d| f.ap(&d));
    let step = {
        let f_ty = f_ty.clone();
        lam2(n(), motive.clone(), move |_, prev| {
            lam2(f_ty.clone(), Ty::seq(), move |f, d| {
                let (prev, f2) = (prev.clone(), f.clone());
                let d2 = d.clone();
                let branch = lam(n(), move |i| {
                    let f3 = f2.clone();
                    let shifted = lam(Ty::seq(), move |a| f3.ap(&ap!(B::closed(cons()), i, a)));
                    let tail = lam(n(), {
                        let d2 = d2.clone();
                        move |j| d2.ap(&suc(&j))
                    });
                    ap!(prev, shifted, tail)
                });
                ap!(B::closed(phi()), branch, d.ap(&zero()))
            })
        })
    };
    lam(n(), move |m| rec(&motive, &base, &step, &m))
}

cached_term!(
    /// `add : N -> N -> N`
    add, add_b
);
cached_term!(
    /// Predecessor, with `pred 0 = 0`.
    pred, pred_b
);
cached_term!(
    /// Truncated subtraction.
    monus, monus_b
);
cached_term!(
    /// `max := rec[N->N] (\n. n) (\n f. rec[N] (suc n) (\m g. suc (f m)))`
    max, max_b
);
cached_term!(min, min_b);
cached_term!(
    /// Signum: `0` at `0`, `1` elsewhere.
    sg, sg_b
);
cached_term!(
    /// `le m n` is `1` iff `m < n`.
    le, le_b
);
cached_term!(
    /// `phi a n` is the greatest of `a 0, .., a n`.
    phi, phi_b
);
cached_term!(
    /// `cons i a` is the sequence with head `i` and tail `a`.
    cons, cons_b
);
cached_term!(seq_len, seq_len_b);
cached_term!(
    /// Zero-extension of a finite sequence.
    seq_hat, seq_hat_b
);
cached_term!(seq_append, seq_append_b);
cached_term!(seq_concat, seq_concat_b);
cached_term!(
    /// The prefix of `a` of length `n`.
    seq_take, seq_take_b
);
cached_term!(seq_nil, seq_nil_b);
cached_term!(
    /// `theta m f d`: the maximum of `f` on sequences pointwise below `d`,
    /// given that `m` is a modulus of uniform continuity of `f` there.
    theta, theta_b
);

/// `ifz[s] n a b` is `a` if `n = 0` and `b` otherwise.
pub fn ifz(sigma: &Ty) -> Tm {
    let s = sigma.clone();
    lam3(n(), sigma.clone(), sigma.clone(), move |k, a, b| {
        rec(&s, &a, &lam2(n(), s.clone(), move |_, _| b.clone()), &k)
    })
    .build()
}

/// Type of a general bar recursor with result type `sigma`.
pub fn bar_recursor_ty(sigma: &Ty) -> Ty {
    let fs = Ty::finseq();
    Ty::arrows(
        [
            Ty::arrow(fs.clone(), sigma.clone()),
            Ty::arrows([fs.clone(), Ty::arrow(n(), sigma.clone())], sigma.clone()),
            fs,
        ],
        sigma.clone(),
    )
}

/// `psi[s] n` is a general bar recursor for the bar `\s. le n |s|`.
///
/// Recursion runs on the fuel `(n + 1) - |s|`, which drops by one each time
/// the step functional extends the sequence.
pub fn psi(sigma: &Ty) -> Tm {
    let fs = Ty::finseq();
    let g_ty = Ty::arrow(fs.clone(), sigma.clone());
    let h_ty = Ty::arrows([fs.clone(), Ty::arrow(n(), sigma.clone())], sigma.clone());
    let sigma = sigma.clone();
    lam(n(), move |bound| {
        let (fs, sigma, h_ty) = (fs.clone(), sigma.clone(), h_ty.clone());
        let bound = bound.clone();
        lam2(g_ty.clone(), h_ty.clone(), move |g, h| {
            let (fs, sigma, bound) = (fs.clone(), sigma.clone(), bound.clone());
            let g_outer = g.clone();
            let step = {
                let (fs, sigma, bound) = (fs.clone(), sigma.clone(), bound.clone());
                lam2(n(), Ty::arrow(fs.clone(), sigma.clone()), move |_, prev| {
                    let (sigma, bound, g, h) = (sigma.clone(), bound.clone(), g.clone(), h.clone());
                    lam(fs.clone(), move |t| {
                        let long = ap!(B::closed(le()), bound, B::closed(seq_len()).ap(&t));
                        let prev2 = prev.clone();
                        let t2 = t.clone();
                        let next =
                            lam(n(), move |m| prev2.ap(&ap!(B::closed(seq_append()), t2, m)));
                        ap!(B::closed(ifz(&sigma)), long, ap!(h, t, next), g.ap(&t))
                    })
                })
            };
            let motive = Ty::arrow(fs.clone(), sigma.clone());
            lam(fs.clone(), move |s| {
                let fuel = ap!(B::closed(monus()), suc(&bound), B::closed(seq_len()).ap(&s));
                rec(&motive, &g_outer, &step, &fuel).ap(&s)
            })
        })
    })
    .build()
}

/// Names that take one type parameter.
const PARAMETRIC: [&str; 2] = ["ifz", "psi"];

/// Every registered prelude name.
pub const NAMES: [&str; 19] = [
    "add",
    "pred",
    "monus",
    "max",
    "min",
    "sg",
    "le",
    "ifz",
    "phi",
    "cons",
    "theta",
    "psi",
    "seq-len",
    "seq-hat",
    "seq-append",
    "seq-concat",
    "seq-take",
    "seq-nil",
    "nil",
];

pub fn is_prelude_name(name: &str) -> bool {
    NAMES.contains(&name)
}

pub fn expects_type_param(name: &str) -> bool {
    PARAMETRIC.contains(&name)
}

/// Looks up a prelude term by name, instantiating type parameters.
pub fn prelude_term(name: &str, params: &[Ty]) -> Result<(Ty, Tm), PreludeError> {
    let expected = usize::from(expects_type_param(name));
    if is_prelude_name(name) && params.len() != expected {
        return Err(PreludeError::WrongParameterCount {
            name: name.to_string(),
            expected,
            found: params.len(),
        });
    }
    let tm = match name {
        "add" => add(),
        "pred" => pred(),
        "monus" => monus(),
        "max" => max(),
        "min" => min(),
        "sg" => sg(),
        "le" => le(),
        "ifz" => ifz(&params[0]),
        "phi" => phi(),
        "cons" => cons(),
        "theta" => theta(),
        "psi" => psi(&params[0]),
        "seq-len" | "seq-hat" | "seq-append" | "seq-concat" | "seq-take" | "seq-nil" | "nil" => {
            return seq_term(name.trim_start_matches("seq-"))
        }
        other => return Err(PreludeError::UnknownPreludeName(other.to_string())),
    };
    let ty = typecheck(&Ctx::new(), &tm).expect("prelude terms are well typed");
    Ok((ty, tm))
}

/// Sequence operations on the `(N -> N) * N` encoding.
pub fn seq_term(name: &str) -> Result<(Ty, Tm), PreludeError> {
    let tm = match name {
        "len" => seq_len(),
        "hat" => seq_hat(),
        "append" => seq_append(),
        "concat" => seq_concat(),
        "take" => seq_take(),
        "nil" => seq_nil(),
        other => return Err(PreludeError::UnknownPreludeName(other.to_string())),
    };
    let ty = typecheck(&Ctx::new(), &tm).expect("prelude terms are well typed");
    Ok((ty, tm))
}

pub fn theta_term() -> (Ty, Tm) {
    prelude_term("theta", &[]).expect("registered")
}

pub fn psi_term(sigma: &Ty) -> (Ty, Tm) {
    prelude_term("psi", std::slice::from_ref(sigma)).expect("registered")
}

/// The registry of non-parametric entries plus `ifz`/`psi` at `N`.
pub fn registry() -> BTreeMap<String, (Ty, Tm)> {
    NAMES
        .iter()
        .map(|&name| {
            let params: Vec<Ty> = if expects_type_param(name) {
                vec![Ty::Nat]
            } else {
                vec![]
            };
            let entry = prelude_term(name, &params).expect("registered");
            (name.to_string(), entry)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{readback_nat, Evaluator, Value};
    use crate::sample::{HostFinSeq, HostSeq};

    fn run(t: &Tm, args: &[Value]) -> u64 {
        let ev = Evaluator::default();
        let f = ev.eval_closed(t).unwrap();
        readback_nat(&ev.apply_values(&f, args).unwrap()).unwrap()
    }

    fn nums(xs: &[u64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::Nat(x)).collect()
    }

    #[test]
    fn declared_types() {
        let nn = Ty::arrows([n(), n()], n());
        assert_eq!(prelude_term("max", &[]).unwrap().0, nn);
        assert_eq!(prelude_term("le", &[]).unwrap().0, nn);
        assert_eq!(
            prelude_term("phi", &[]).unwrap().0,
            Ty::arrows([Ty::seq(), n()], n())
        );
        assert_eq!(
            theta_term().0,
            Ty::arrows([n(), Ty::functional(), Ty::seq()], n())
        );
        assert_eq!(psi_term(&n()).0, Ty::arrow(n(), bar_recursor_ty(&n())));
        assert_eq!(
            seq_term("concat").unwrap().0,
            Ty::arrows([Ty::finseq(), Ty::seq()], Ty::seq())
        );
    }

    #[test]
    fn unknown_names_and_arity() {
        assert_eq!(
            prelude_term("nope", &[]),
            Err(PreludeError::UnknownPreludeName("nope".into()))
        );
        assert!(matches!(
            prelude_term("ifz", &[]),
            Err(PreludeError::WrongParameterCount { .. })
        ));
        assert!(seq_term("reverse").is_err());
    }

    #[test]
    fn arithmetic_small_table() {
        for a in 0..=8 {
            for b in 0..=8 {
                let ab = nums(&[a, b]);
                assert_eq!(run(&add(), &ab), a + b);
                assert_eq!(run(&monus(), &ab), a.saturating_sub(b));
                assert_eq!(run(&max(), &ab), a.max(b));
                assert_eq!(run(&min(), &ab), a.min(b));
                assert_eq!(run(&le(), &ab), u64::from(a < b));
            }
        }
    }

    #[test]
    fn le_is_strict() {
        assert_eq!(run(&le(), &nums(&[3, 3])), 0);
        assert_eq!(run(&le(), &nums(&[2, 3])), 1);
    }

    #[test]
    fn ifz_branches() {
        let t = ifz(&n());
        assert_eq!(run(&t, &nums(&[0, 4, 9])), 4);
        assert_eq!(run(&t, &nums(&[3, 4, 9])), 9);
    }

    #[test]
    fn phi_at_zero_is_head() {
        let a = HostSeq {
            prefix: vec![6, 2, 7, 1],
            default: 0,
        };
        assert_eq!(run(&phi(), &[a.to_value(), Value::Nat(0)]), 6);
        assert_eq!(run(&phi(), &[a.to_value(), Value::Nat(1)]), 6);
        assert_eq!(run(&phi(), &[a.to_value(), Value::Nat(3)]), 7);
    }

    #[test]
    fn sequences() {
        let ev = Evaluator::default();
        let a = HostSeq {
            prefix: vec![4, 5, 6, 7, 8],
            default: 1,
        };
        // len (take a 4) = 4
        let take = ev.eval_closed(&seq_take()).unwrap();
        let s = ev
            .apply_values(&take, &[a.to_value(), Value::Nat(4)])
            .unwrap();
        assert_eq!(run(&seq_len(), &[s]), 4);
        // hat (take a 2) 5 = 0
        let s = ev
            .apply_values(&take, &[a.to_value(), Value::Nat(2)])
            .unwrap();
        assert_eq!(run(&seq_hat(), &[s.clone(), Value::Nat(5)]), 0);
        assert_eq!(run(&seq_hat(), &[s, Value::Nat(1)]), 5);
        // append
        let s = HostFinSeq(vec![3, 1]).to_value();
        let app = ev.eval_closed(&seq_append()).unwrap();
        let s3 = ev.apply_values(&app, &[s, Value::Nat(9)]).unwrap();
        assert_eq!(run(&seq_len(), std::slice::from_ref(&s3)), 3);
        let hats: Vec<u64> = (0..5)
            .map(|i| run(&seq_hat(), &[s3.clone(), Value::Nat(i)]))
            .collect();
        assert_eq!(hats, vec![3, 1, 9, 0, 0]);
    }

    #[test]
    fn theta_examples() {
        // theta 1 (\a. a 0) d with d 0 = 2 is max{0,1,2} = 2
        let ev = Evaluator::default();
        let head = ev
            .eval_closed(&lam(Ty::seq(), |a| a.ap(&zero())).build())
            .unwrap();
        let d = HostSeq {
            prefix: vec![2],
            default: 0,
        };
        assert_eq!(
            run(&theta(), &[Value::Nat(1), head.clone(), d.to_value()]),
            2
        );
        // theta 0 f d = f d
        assert_eq!(run(&theta(), &[Value::Nat(0), head, d.to_value()]), 2);
        let five = ev.eval_closed(&lam(Ty::seq(), |_| num(5)).build()).unwrap();
        for m in 0..4 {
            assert_eq!(
                run(
                    &theta(),
                    &[Value::Nat(m), five.clone(), HostSeq::constant(2).to_value()]
                ),
                5
            );
        }
    }

    #[test]
    fn psi_unfolds_twice() {
        // G = len, H = \s f. f 0: psi 1 G H nil = G [0, 0] = 2
        let ev = Evaluator::default();
        let g = ev.eval_closed(&seq_len()).unwrap();
        let h = ev
            .eval_closed(&lam2(Ty::finseq(), Ty::seq(), |_, f| f.ap(&zero())).build())
            .unwrap();
        let nil = ev.eval_closed(&seq_nil()).unwrap();
        assert_eq!(run(&psi(&n()), &[Value::Nat(1), g, h, nil]), 2);
    }

    #[test]
    fn registry_is_well_typed() {
        let reg = registry();
        assert_eq!(reg.len(), NAMES.len());
        for (name, (ty, tm)) in &reg {
            assert!(tm.is_closed(), "{name}");
            assert_eq!(&typecheck(&Ctx::new(), tm).unwrap(), ty, "{name}");
        }
    }
}
