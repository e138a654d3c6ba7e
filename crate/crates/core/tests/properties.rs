use proptest::prelude::*;

use gst_core::eval::EvalError;
use gst_core::gen::TermGen;
use gst_core::nuclei::{self, NucleusKind};
use gst_core::oracle::Oracle;
use gst_core::surface::{parse_term, pretty, SourceFile};
use gst_core::syntax::{instantiate, shift};
use gst_core::translate::{translate_closed, Style};
use gst_core::{typecheck, Ctx, Evaluator, Sampler, Tm, Ty};

const BUDGET: u64 = 2_000_000;

fn random_ty(seed: u64, sums: bool) -> Ty {
    let mut s = Sampler::new(seed);
    TermGen::new(s.rng(), sums).ty(2)
}

fn random_closed(seed: u64, ty: &Ty, sums: bool) -> Tm {
    let mut s = Sampler::new(seed);
    TermGen::new(s.rng(), sums).closed(ty, 3)
}

fn random_open(seed: u64, ctx: &[Ty], ty: &Ty) -> Tm {
    let mut s = Sampler::new(seed);
    TermGen::new(s.rng(), false).open(ctx.to_vec(), ty, 3)
}

/// The numeral `t` evaluates to, or `None` when it runs out of budget.
fn run_nat(t: &Tm) -> Option<u64> {
    let ev = Evaluator::new(BUDGET);
    match ev
        .eval_closed(t)
        .and_then(|v| gst_core::eval::readback_nat(&v))
    {
        Ok(n) => Some(n),
        Err(EvalError::BudgetExhausted(_)) => None,
        Err(e) => panic!("evaluation failed: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_terms_are_well_typed(seed: u64, sums: bool) {
        let ty = random_ty(seed, sums);
        let t = random_closed(seed ^ 1, &ty, sums);
        prop_assert_eq!(typecheck(&Ctx::new(), &t).unwrap(), ty);
    }

    #[test]
    fn weakening(seed: u64) {
        let ctx = vec![random_ty(seed, false), Ty::Nat];
        let ty = random_ty(seed ^ 2, false);
        let t = random_open(seed ^ 3, &ctx, &ty);
        let extra = random_ty(seed ^ 4, false);
        let mut wider = ctx.clone();
        wider.push(extra);
        prop_assert_eq!(typecheck(&Ctx::from(wider), &shift(&t, 1, 0)).unwrap(), ty);
    }

    #[test]
    fn substitution_preserves_type(seed: u64) {
        let x = random_ty(seed, false);
        let ty = random_ty(seed ^ 5, false);
        let body = random_open(seed ^ 6, &[Ty::Nat, x.clone()], &ty);
        let arg = random_open(seed ^ 7, &[Ty::Nat], &x);
        let out = instantiate(&body, &arg);
        prop_assert_eq!(typecheck(&Ctx::from(vec![Ty::Nat]), &out).unwrap(), ty);
    }

    #[test]
    fn substitution_agrees_with_beta(seed: u64) {
        let x = random_ty(seed, false);
        let body = random_open(seed ^ 8, std::slice::from_ref(&x), &Ty::Nat);
        let arg = random_closed(seed ^ 9, &x, false);
        let redex = Tm::app(Tm::lam(x, body.clone()), arg.clone());
        if let (Some(a), Some(b)) = (run_nat(&redex), run_nat(&instantiate(&body, &arg))) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn evaluation_is_deterministic(seed: u64) {
        let t = random_closed(seed, &Ty::Nat, true);
        prop_assert_eq!(run_nat(&t), run_nat(&t));
    }

    #[test]
    fn pretty_parse_round_trip(seed: u64, sums: bool) {
        let ty = random_ty(seed, sums);
        let t = random_closed(seed ^ 10, &ty, sums);
        let text = pretty(&t);
        let back = parse_term(&text, &SourceFile::default()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn translations_preserve_types(seed: u64, sums: bool) {
        let ty = random_ty(seed, sums);
        let t = random_closed(seed ^ 11, &ty, sums);
        let mut kinds = vec![NucleusKind::GenIdentity, NucleusKind::GenContinuity];
        if !sums {
            kinds.extend([
                NucleusKind::Majorizability,
                NucleusKind::Continuity,
                NucleusKind::UniformContinuity,
                NucleusKind::BarRecursion(Ty::Nat),
            ]);
        }
        for kind in &kinds {
            let nuc = nuclei::any_nucleus(kind);
            let styles: &[Style] = if kind.is_generalized() { &Style::ALL } else { &[Style::Gentzen] };
            for &style in styles {
                let (tj, expected) = translate_closed(style, &nuc, &t).unwrap();
                prop_assert_eq!(typecheck(&Ctx::new(), &tj).unwrap(), expected);
            }
        }
    }

    #[test]
    fn identity_translation_keeps_values(seed: u64) {
        let t = random_closed(seed, &Ty::Nat, false);
        let nuc = nuclei::any_nucleus(&NucleusKind::Identity);
        let (tj, _) = translate_closed(Style::Gentzen, &nuc, &t).unwrap();
        if let (Some(a), Some(b)) = (run_nat(&t), run_nat(&tj)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn continuity_reports_replay(seed: u64) {
        let f = random_closed(seed, &Ty::functional(), false);
        let m = random_closed(seed ^ 12, &Ty::functional(), false);
        let o = Oracle { budget: BUDGET, ..Oracle::default() };
        let params = gst_core::SampleParams { samples: 10, ..Default::default() };
        let run = || o.check_continuity(&f, &m, &mut Sampler::with_params(seed, params));
        if let (Ok(a), Ok(b)) = (run(), run()) {
            prop_assert_eq!(a.to_json(), b.to_json());
        }
    }
}
