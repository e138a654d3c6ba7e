//! Independent checks of extracted witnesses, and sampled evidence for the
//! hypotheses and conclusion of the fundamental theorem of logical relations.
//!
//! Higher-type quantifiers are sampled, never proved: a pass means no
//! counterexample was found, a fail comes with replayable inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::ap;
use crate::build::*;
use crate::eval::{readback_nat, EvalError, Evaluator, Value, DEFAULT_BUDGET};
use crate::gen::TermGen;
use crate::nuclei::{self, NucleusKind};
use crate::prelude;
use crate::sample::{HostFinSeq, HostSeq, Sampler};
use crate::surface::pretty;
use crate::syntax::{Tm, Ty};
use crate::translate::{translate_closed, Nucleus, SimpleNucleus, Style, TranslateError};

/// Reports stop collecting after this many counterexamples.
const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("exhaustive check needs {needed} prefixes, above the cap of {cap}")]
    EnumerationTooLarge { needed: u128, cap: u64 },
    #[error("no generator for related arguments at type {0}")]
    UnsynthesizableArguments(Ty),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: Json,
    pub observed: Json,
    pub expected: Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: String,
    /// `None` for exhaustive checks.
    pub seed: Option<u64>,
    pub samples: u64,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subreports: Vec<VerificationReport>,
}

impl VerificationReport {
    pub fn new(property: impl Into<String>, seed: Option<u64>) -> VerificationReport {
        VerificationReport {
            property: property.into(),
            seed,
            samples: 0,
            verdict: Verdict::Pass,
            counterexamples: Vec::new(),
            notes: Vec::new(),
            subreports: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn full(&self) -> bool {
        self.counterexamples.len() >= MAX_COUNTEREXAMPLES
    }

    fn fail(&mut self, inputs: Json, observed: Json, expected: Json) {
        if !self.full() {
            self.counterexamples.push(Counterexample {
                inputs,
                observed,
                expected,
            });
        }
        self.verdict = Verdict::Fail;
    }

    /// Combines sub-checks; counterexamples are copied up, tagged by check.
    pub fn merged(
        property: impl Into<String>,
        seed: Option<u64>,
        parts: Vec<VerificationReport>,
    ) -> VerificationReport {
        let mut out = VerificationReport::new(property, seed);
        for p in &parts {
            out.samples += p.samples;
            for c in &p.counterexamples {
                let inputs = json!({ "check": p.property, "inputs": c.inputs });
                out.fail(inputs, c.observed.clone(), c.expected.clone());
            }
        }
        out.subreports = parts;
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Base relation at `N` of a logical relation, relating a natural to an
/// element of `Jℕ`. Each is parametrized by a host point (`α` or `δ`)
/// except majorizability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseRelation {
    /// `n ≤ m`
    Maj,
    /// `n = w α`
    Lifting,
    /// `n = V_w α` and `M_w α` is a modulus of `V_w` at `α`.
    Continuity,
    /// `n = V_w δ` and `M_w δ` is a modulus of uniform continuity of `V_w`
    /// below `δ`.
    UniformContinuity,
    /// `n = V_w α`, `S_w` is monotone and secures `V_w`, and `B_w` is a
    /// general bar recursor for `S_w` (motive `N`).
    BarRecursion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub base: BaseRelation,
    /// Check only the predicate on the translated side, ignoring the source.
    pub unary: bool,
}

impl RelationSpec {
    pub fn binary(base: BaseRelation) -> RelationSpec {
        RelationSpec { base, unary: false }
    }

    pub fn unary(base: BaseRelation) -> RelationSpec {
        RelationSpec { base, unary: true }
    }

    /// The relation used for the given nucleus.
    pub fn for_kind(kind: &NucleusKind) -> Option<RelationSpec> {
        let base = match kind {
            NucleusKind::Majorizability => BaseRelation::Maj,
            NucleusKind::Lifting(x) if *x == Ty::seq() => BaseRelation::Lifting,
            NucleusKind::Continuity => BaseRelation::Continuity,
            NucleusKind::UniformContinuity => BaseRelation::UniformContinuity,
            NucleusKind::BarRecursion(s) if *s == Ty::Nat => BaseRelation::BarRecursion,
            _ => return None,
        };
        Some(RelationSpec::binary(base))
    }
}

/// The continuity nucleus with the `M_w` term dropped from `κ`: its
/// moduli ignore the argument's own modulus.
pub fn mutated_continuity() -> SimpleNucleus {
    let mut nuc = nuclei::nucleus(&NucleusKind::Continuity).expect("simple kind");
    let jn = nuc.jn.clone();
    let kappa = lam2(Ty::arrow(Ty::Nat, jn.clone()), jn, |g, w| {
        let vw = nuclei::cont_value(&w);
        let (g1, vw1) = (g.clone(), vw.clone());
        let value = lam(Ty::seq(), move |a| {
            nuclei::cont_value(&g1.ap(&vw1.ap(&a))).ap(&a)
        });
        let modulus = lam(Ty::seq(), move |a| {
            nuclei::cont_modulus(&g.ap(&vw.ap(&a))).ap(&a)
        });
        pair(&Ty::functional(), &Ty::functional(), &value, &modulus)
    });
    nuc.name = "cont-mutated".into();
    nuc.kappa = kappa.build();
    nuc.omega = Some(Tm::app(nuc.kappa.clone(), nuclei::cont_probe().build()));
    nuc
}

/// Configuration shared by all checks.
#[derive(Clone, Debug)]
pub struct Oracle {
    /// Evaluation step budget per sample.
    pub budget: u64,
    /// Largest number of prefixes an exhaustive check may enumerate.
    pub enumeration_cap: u64,
    /// Extra prefix length enumerated beyond the claimed modulus.
    pub prefix_bound: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            budget: DEFAULT_BUDGET,
            enumeration_cap: 1_000_000,
            prefix_bound: 2,
        }
    }
}

fn nat_of(ev: &Evaluator, f: &Value, args: &[Value]) -> Result<u64, OracleError> {
    Ok(ev.apply_nat(f, args)?)
}

/// Evaluates a closed term and applies it to host values.
fn instantiate(ev: &Evaluator, t: &Tm, args: &[Value]) -> Result<Value, OracleError> {
    let v = ev.eval_closed(t)?;
    Ok(ev.apply_values(&v, args)?)
}

/// A seeded host function, replayable from its salt.
fn mix(salt: u64, x: u64) -> u64 {
    let mut z = salt ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn salted(salt: u64, modulo: u64) -> Value {
    Value::foreign(move |x| mix(salt, x) % modulo)
}

/// `α` with its first `keep` entries unchanged and at least one entry in
/// `[keep, keep + 8]` changed.
fn perturb(sampler: &mut Sampler, alpha: &HostSeq, keep: usize) -> HostSeq {
    let bound = sampler.params.seq_bound.max(1);
    let mut beta = alpha.clone();
    beta.materialize(keep + 9);
    let change = |s: &mut Sampler, old: u64| (old + 1 + s.below(bound - 1)) % (bound + 1);
    let forced = keep + sampler.below(8) as usize;
    for i in keep..keep + 9 {
        if i == forced || sampler.coin(0.3) {
            beta.prefix[i] = change(sampler, alpha.at(i as u64));
        }
    }
    beta
}

/// `s * α` as a host sequence.
fn concat(s: &HostFinSeq, alpha: &HostSeq) -> HostSeq {
    let mut prefix = s.0.clone();
    prefix.extend(alpha.prefix.iter().copied());
    HostSeq {
        prefix,
        default: alpha.default,
    }
}

/// A finite sequence whose first sample is always `nil`.
fn finseq_sample(sampler: &mut Sampler, i: usize) -> HostFinSeq {
    if i == 0 {
        HostFinSeq(Vec::new())
    } else {
        sampler.finseq(4, 3)
    }
}

/// Code of a finite sequence as a natural, base 5 on `entry + 1`.
fn code_term() -> B {
    lam(Ty::finseq(), |s| {
        let entries = pr1(&Ty::seq(), &Ty::Nat, &s);
        let step = lam2(Ty::Nat, Ty::Nat, move |i, c| {
            let add = |a: &B, b: &B| ap!(B::closed(prelude::add()), a, b);
            let c2 = add(&c, &c);
            let c5 = add(&c, &add(&c2, &c2));
            add(&c5, &suc(&entries.ap(&i)))
        });
        rec(
            &Ty::Nat,
            &zero(),
            &step,
            &B::closed(prelude::seq_len()).ap(&s),
        )
    })
}

/// `λtab s. tab(code s)`
fn g_maker() -> Tm {
    let code = code_term();
    lam2(Ty::seq(), Ty::finseq(), move |tab, s| tab.ap(&code.ap(&s))).build()
}

/// `λtab pick s f. tab(code s + f(pick(code s)))`
fn h_maker() -> Tm {
    let code = code_term();
    let body = move |tab: B, pick: B, s: B, f: B| {
        let c = code.ap(&s);
        tab.ap(&ap!(B::closed(prelude::add()), c, f.ap(&pick.ap(&c))))
    };
    let body = std::rc::Rc::new(body);
    lam2(Ty::seq(), Ty::seq(), move |tab, pick| {
        let body = body.clone();
        lam2(Ty::finseq(), Ty::seq(), move |s, f| {
            body(tab.clone(), pick.clone(), s, f)
        })
    })
    .build()
}

/// `λb g h s. h s (λn. b g h (s * n))` at motive `N`.
fn gbr_step_term() -> Tm {
    let fs = Ty::finseq();
    let g_ty = Ty::arrow(fs.clone(), Ty::Nat);
    let h_ty = Ty::arrows([fs.clone(), Ty::seq()], Ty::Nat);
    let b_ty = prelude::bar_recursor_ty(&Ty::Nat);
    lam2(b_ty, g_ty, move |b, g| {
        let fs = fs.clone();
        lam2(h_ty.clone(), fs.clone(), move |h, s| {
            let (b, g, h1, s1) = (b.clone(), g.clone(), h.clone(), s.clone());
            let next = lam(Ty::Nat, move |n| {
                ap!(b, g, h1, ap!(B::closed(prelude::seq_append()), s1, n))
            });
            ap!(h, s, next)
        })
    })
    .build()
}

/// Terms and host functions for one sampled pair `(G, H)`.
struct GbrFixture {
    salts: [u64; 3],
    g: Value,
    h: Value,
}

impl GbrFixture {
    fn new(ev: &Evaluator, sampler: &mut Sampler) -> Result<GbrFixture, OracleError> {
        let salts = [
            sampler.below(u64::MAX),
            sampler.below(u64::MAX),
            sampler.below(u64::MAX),
        ];
        let g = instantiate(ev, &g_maker(), &[salted(salts[0], 10)])?;
        let h = instantiate(ev, &h_maker(), &[salted(salts[1], 10), salted(salts[2], 4)])?;
        Ok(GbrFixture { salts, g, h })
    }
}

fn seq_json(s: &HostSeq) -> Json {
    json!({ "prefix": s.prefix, "default": s.default })
}

fn finseq_json(s: &HostFinSeq) -> Json {
    json!(s.0)
}

impl Oracle {
    fn evaluator(&self) -> Evaluator {
        Evaluator::new(self.budget)
    }

    /// `M` is a modulus of pointwise continuity of `f`: for sampled `α`,
    /// a `β` agreeing with `α` below `M α` gives the same value.
    pub fn check_continuity(
        &self,
        f: &Tm,
        m: &Tm,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let ev = self.evaluator();
        let (fv, mv) = (ev.eval_closed(f)?, ev.eval_closed(m)?);
        let mut rep = VerificationReport::new("continuity", Some(sampler.seed()));
        for _ in 0..sampler.samples() {
            ev.reset_steps();
            rep.samples += 1;
            let alpha = sampler.seq();
            let k = nat_of(&ev, &mv, &[alpha.to_value()])?;
            let beta = perturb(sampler, &alpha, k as usize);
            let fa = nat_of(&ev, &fv, &[alpha.to_value()])?;
            let fb = nat_of(&ev, &fv, &[beta.to_value()])?;
            if fa != fb {
                let inputs =
                    json!({ "alpha": seq_json(&alpha), "beta": seq_json(&beta), "modulus": k });
                rep.fail(inputs, json!(fb), json!(fa));
                if rep.full() {
                    break;
                }
            }
        }
        Ok(rep)
    }

    /// Exhaustive uniform continuity check below `delta`: every prefix of
    /// length `M δ + prefix_bound` bounded by `delta` is zero-extended, and
    /// `f` must be constant on prefixes agreeing below `M δ`.
    pub fn check_uniform_continuity(
        &self,
        f: &Tm,
        m: &Tm,
        delta: &HostSeq,
    ) -> Result<VerificationReport, OracleError> {
        let ev = self.evaluator();
        let (fv, mv) = (ev.eval_closed(f)?, ev.eval_closed(m)?);
        let md = nat_of(&ev, &mv, &[delta.to_value()])? as usize;
        let len = md + self.prefix_bound;
        let bounds: Vec<u64> = (0..len as u64).map(|i| delta.at(i)).collect();
        let needed = bounds
            .iter()
            .try_fold(1u128, |acc, &b| acc.checked_mul(u128::from(b) + 1))
            .unwrap_or(u128::MAX);
        if needed > u128::from(self.enumeration_cap) {
            return Err(OracleError::EnumerationTooLarge {
                needed,
                cap: self.enumeration_cap,
            });
        }
        let mut rep = VerificationReport::new("uniform-continuity", None);
        rep.notes.push(format!(
            "delta {:?} then {}, modulus {md}, prefixes of length {len}",
            delta.prefix, delta.default
        ));
        let mut seen: BTreeMap<Vec<u64>, (Vec<u64>, u64)> = BTreeMap::new();
        let mut p = vec![0u64; len];
        loop {
            rep.samples += 1;
            let v = nat_of(&ev, &fv, &[HostSeq::zero_extended(p.clone()).to_value()])?;
            let key = p[..md].to_vec();
            match seen.get(&key) {
                Some((first, w)) if *w != v => {
                    let inputs = json!({
                        "delta": seq_json(delta), "modulus": md, "alpha": first, "beta": p
                    });
                    rep.fail(inputs, json!(v), json!(w));
                    if rep.full() {
                        break;
                    }
                }
                Some(_) => {}
                None => {
                    seen.insert(key, (p.clone(), v));
                }
            }
            // odometer over the box `p ≤ bounds`
            let mut i = len;
            loop {
                if i == 0 {
                    return Ok(rep);
                }
                i -= 1;
                if p[i] < bounds[i] {
                    p[i] += 1;
                    break;
                }
                p[i] = 0;
            }
        }
        Ok(rep)
    }

    /// `t` is hereditarily majorized by `u` at `rho` (`t ≤ u` at `N`).
    /// Natural-number arguments run exhaustively up to 6; sequence
    /// arguments are sampled with a running-max dominator; other arguments
    /// are random terms paired with their majorants.
    pub fn check_majorizes(
        &self,
        t: &Tm,
        u: &Tm,
        rho: &Ty,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let ev = self.evaluator();
        let (tv, uv) = (ev.eval_closed(t)?, ev.eval_closed(u)?);
        let mut rep = VerificationReport::new("majorizes", Some(sampler.seed()));
        let mut trail = Vec::new();
        self.maj_rel(&ev, &tv, &uv, rho, sampler, 0, &mut trail, &mut rep)?;
        Ok(rep)
    }

    #[allow(clippy::too_many_arguments)]
    fn maj_rel(
        &self,
        ev: &Evaluator,
        x: &Value,
        y: &Value,
        ty: &Ty,
        sampler: &mut Sampler,
        depth: usize,
        trail: &mut Vec<Json>,
        rep: &mut VerificationReport,
    ) -> Result<(), OracleError> {
        if rep.full() {
            return Ok(());
        }
        match ty {
            Ty::Nat => {
                rep.samples += 1;
                let (a, b) = (readback_nat(x)?, readback_nat(y)?);
                if a > b {
                    rep.fail(json!(trail), json!(b), json!(format!(">= {a}")));
                }
            }
            Ty::Prod(l, r) => {
                trail.push(json!("pr1"));
                self.maj_rel(ev, &ev.fst(x)?, &ev.fst(y)?, l, sampler, depth, trail, rep)?;
                trail.pop();
                trail.push(json!("pr2"));
                self.maj_rel(ev, &ev.snd(x)?, &ev.snd(y)?, r, sampler, depth, trail, rep)?;
                trail.pop();
            }
            Ty::Arrow(dom, cod) => {
                for (a, b, desc) in self.maj_pairs(ev, dom, sampler, depth)? {
                    let xa = ev.apply_values(x, std::slice::from_ref(&a))?;
                    let yb = ev.apply_values(y, std::slice::from_ref(&b))?;
                    trail.push(desc);
                    self.maj_rel(ev, &xa, &yb, cod, sampler, depth + 1, trail, rep)?;
                    trail.pop();
                    if rep.full() {
                        break;
                    }
                }
            }
            Ty::Sum(..) => return Err(OracleError::UnsynthesizableArguments(ty.clone())),
        }
        Ok(())
    }

    /// Pairs `(a, b)` with `a` majorized by `b`.
    fn maj_pairs(
        &self,
        ev: &Evaluator,
        ty: &Ty,
        sampler: &mut Sampler,
        depth: usize,
    ) -> Result<Vec<(Value, Value, Json)>, OracleError> {
        let count = if depth == 0 {
            sampler.samples()
        } else {
            sampler.samples().min(10)
        };
        Ok(match ty {
            Ty::Nat => {
                let mut out = Vec::new();
                for a in 0..=6u64 {
                    for b in a..=6 {
                        out.push((Value::Nat(a), Value::Nat(b), json!([a, b])));
                    }
                }
                out
            }
            Ty::Arrow(d, c) if **d == Ty::Nat && **c == Ty::Nat => (0..count)
                .map(|_| {
                    let x = sampler.seq();
                    let y = dominator(&x, sampler.below(2));
                    let desc = json!({ "x": seq_json(&x), "y": seq_json(&y) });
                    (x.to_value(), y.to_value(), desc)
                })
                .collect(),
            Ty::Prod(l, r) => {
                let ls = self.maj_pairs(ev, l, sampler, depth)?;
                let rs = self.maj_pairs(ev, r, sampler, depth)?;
                ls.into_iter()
                    .zip(rs.into_iter().cycle())
                    .map(|((a, b, d1), (c, e, d2))| {
                        (Value::pair(a, c), Value::pair(b, e), json!([d1, d2]))
                    })
                    .collect()
            }
            _ if ty.contains_sum() => {
                return Err(OracleError::UnsynthesizableArguments(ty.clone()))
            }
            _ => {
                let nuc =
                    Nucleus::Simple(nuclei::nucleus(&NucleusKind::Majorizability).expect("simple"));
                let mut out = Vec::new();
                for _ in 0..count {
                    let depth = sampler.params.term_depth;
                    let t = TermGen::new(sampler.rng(), false).closed(ty, depth);
                    let (tj, _) = translate_closed(Style::Gentzen, &nuc, &t)?;
                    out.push((ev.eval_closed(&t)?, ev.eval_closed(&tj)?, json!(pretty(&t))));
                }
                out
            }
        })
    }

    /// `g m ≤ κ(g, n)` for all `m ≤ n ≤ 8` and sampled `g`, for the
    /// majorizability `κ`.
    pub fn check_kappa_dominates(
        &self,
        kappa: &Tm,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let ev = self.evaluator();
        let kv = ev.eval_closed(kappa)?;
        let mut rep = VerificationReport::new("kappa-dominates", Some(sampler.seed()));
        for _ in 0..sampler.samples() {
            let g = sampler.seq();
            for n in 0..=8u64 {
                let k = nat_of(&ev, &kv, &[g.to_value(), Value::Nat(n)])?;
                for m in 0..=n {
                    rep.samples += 1;
                    if g.at(m) > k {
                        let inputs = json!({ "g": seq_json(&g), "n": n, "m": m });
                        rep.fail(inputs, json!(k), json!(format!(">= {}", g.at(m))));
                    }
                }
            }
        }
        Ok(rep)
    }

    /// Both equations of general bar recursion for `bar` and `recursor` at
    /// motive `N`, on sampled sequences and seeded host `G`, `H`.
    pub fn check_gbr(
        &self,
        bar: &Tm,
        recursor: &Tm,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let ev = self.evaluator();
        let (sv, bv) = (ev.eval_closed(bar)?, ev.eval_closed(recursor)?);
        let mut rep = VerificationReport::new("gbr", Some(sampler.seed()));
        for i in 0..sampler.samples() {
            ev.reset_steps();
            rep.samples += 1;
            let fx = GbrFixture::new(&ev, sampler)?;
            let s = finseq_sample(sampler, i);
            if let Some((obs, exp)) = self.gbr_at(&ev, &sv, &bv, &fx, &s)? {
                let inputs = json!({ "s": finseq_json(&s), "salts": fx.salts });
                rep.fail(inputs, json!(obs), json!(exp));
                if rep.full() {
                    break;
                }
            }
        }
        Ok(rep)
    }

    /// `Some((observed, expected))` when an equation fails at `s`.
    fn gbr_at(
        &self,
        ev: &Evaluator,
        sv: &Value,
        bv: &Value,
        fx: &GbrFixture,
        s: &HostFinSeq,
    ) -> Result<Option<(u64, u64)>, OracleError> {
        let secure = nat_of(ev, sv, &[s.to_value()])? != 0;
        let lhs = nat_of(ev, bv, &[fx.g.clone(), fx.h.clone(), s.to_value()])?;
        let rhs = if secure {
            nat_of(ev, &fx.g, &[s.to_value()])?
        } else {
            let step = ev.eval_closed(&gbr_step_term())?;
            nat_of(
                ev,
                &step,
                &[bv.clone(), fx.g.clone(), fx.h.clone(), s.to_value()],
            )?
        };
        Ok((lhs != rhs).then_some((lhs, rhs)))
    }

    /// `S` is monotone and secures `Y`: whenever `S s`, also `S (s * n)`
    /// and `Y (s * α) = Y ŝ` for sampled `n`, `α`.
    pub fn check_secures_monotone(
        &self,
        bar: &Tm,
        y: &Tm,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let ev = self.evaluator();
        let (sv, yv) = (ev.eval_closed(bar)?, ev.eval_closed(y)?);
        let mut rep = VerificationReport::new("secures", Some(sampler.seed()));
        for i in 0..sampler.samples() {
            ev.reset_steps();
            rep.samples += 1;
            let s = finseq_sample(sampler, i);
            if let Some((inputs, obs, exp)) = self.secures_at(&ev, &sv, &yv, &s, sampler, 3, 5)? {
                rep.fail(inputs, obs, exp);
                if rep.full() {
                    break;
                }
            }
        }
        Ok(rep)
    }

    #[allow(clippy::too_many_arguments)]
    fn secures_at(
        &self,
        ev: &Evaluator,
        sv: &Value,
        yv: &Value,
        s: &HostFinSeq,
        sampler: &mut Sampler,
        extensions: usize,
        points: usize,
    ) -> Result<Option<(Json, Json, Json)>, OracleError> {
        if nat_of(ev, sv, &[s.to_value()])? == 0 {
            return Ok(None);
        }
        for _ in 0..extensions {
            let n = sampler.below(3);
            let mut longer = s.clone();
            longer.0.push(n);
            if nat_of(ev, sv, &[longer.to_value()])? == 0 {
                let inputs = json!({ "s": finseq_json(s), "n": n, "clause": "monotone" });
                return Ok(Some((inputs, json!(0), json!(1))));
            }
        }
        let hat = nat_of(ev, yv, &[HostSeq::zero_extended(s.0.clone()).to_value()])?;
        for _ in 0..points {
            let alpha = sampler.seq();
            let v = nat_of(ev, yv, &[concat(s, &alpha).to_value()])?;
            if v != hat {
                let inputs =
                    json!({ "s": finseq_json(s), "alpha": seq_json(&alpha), "clause": "secures" });
                return Ok(Some((inputs, json!(v), json!(hat))));
            }
        }
        Ok(None)
    }

    /// Sampled evidence for the fundamental theorem: the `η` and `κ`
    /// conditions on the nucleus, and `t R_ρ tJ`.
    pub fn check_logical_relation(
        &self,
        nucleus: &SimpleNucleus,
        spec: &RelationSpec,
        t: &Tm,
        tj: &Tm,
        rho: &Ty,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let eta = self.check_eta_condition(nucleus, spec, sampler)?;
        let kappa = self.check_kappa_condition(nucleus, spec, sampler)?;
        let conclusion = self.check_conclusion(nucleus, spec, t, tj, rho, sampler)?;
        let mut rep = VerificationReport::merged(
            "logical-relation",
            Some(sampler.seed()),
            vec![eta, kappa, conclusion],
        );
        rep.notes.push(
            "higher-type quantifiers are sampled; arguments beyond first order are \
             random terms paired with their translations"
                .into(),
        );
        Ok(rep)
    }

    /// `n R η n` for sampled `n` and points.
    pub fn check_eta_condition(
        &self,
        nucleus: &SimpleNucleus,
        spec: &RelationSpec,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let rel = Relation::new(self, nucleus, *spec)?;
        let mut rep = VerificationReport::new("eta-condition", Some(sampler.seed()));
        for _ in 0..sampler.samples() {
            rel.ev.reset_steps();
            rep.samples += 1;
            let point = rel.point(sampler);
            let n = sampler.numeral();
            let w = rel.ev.apply_values(&rel.eta, &[Value::Nat(n)])?;
            if let Some((obs, exp)) = rel.base(&point, n, &w, sampler)? {
                rep.fail(json!({ "point": point.json(), "n": n }), obs, exp);
                if rep.full() {
                    break;
                }
            }
        }
        Ok(rep)
    }

    /// `f R κ g` whenever `f n R g n` for all `n`, with related pairs
    /// synthesized from the base relation.
    pub fn check_kappa_condition(
        &self,
        nucleus: &SimpleNucleus,
        spec: &RelationSpec,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let rel = Relation::new(self, nucleus, *spec)?;
        let kv = rel.ev.eval_closed(&nucleus.kappa)?;
        let mut rep = VerificationReport::new("kappa-condition", Some(sampler.seed()));
        for _ in 0..sampler.samples() {
            rel.ev.reset_steps();
            rep.samples += 1;
            let point = rel.point(sampler);
            let (f, g, fdesc) = rel.family(&point, sampler)?;
            let (x, w, xdesc) = rel.nat_pair(&point, sampler)?;
            let fx = nat_of(&rel.ev, &f, &[Value::Nat(x)])?;
            let kgw = rel.ev.apply_values(&kv, &[g, w])?;
            if let Some((obs, exp)) = rel.base(&point, fx, &kgw, sampler)? {
                let inputs = json!({ "point": point.json(), "family": fdesc, "argument": xdesc });
                rep.fail(inputs, obs, exp);
                if rep.full() {
                    break;
                }
            }
        }
        Ok(rep)
    }

    /// `t R_ρ tJ` by the relation's clauses, sampling related arguments.
    pub fn check_conclusion(
        &self,
        nucleus: &SimpleNucleus,
        spec: &RelationSpec,
        t: &Tm,
        tj: &Tm,
        rho: &Ty,
        sampler: &mut Sampler,
    ) -> Result<VerificationReport, OracleError> {
        let rel = Relation::new(self, nucleus, *spec)?;
        let (tv, tjv) = (rel.ev.eval_closed(t)?, rel.ev.eval_closed(tj)?);
        let mut rep = VerificationReport::new("conclusion", Some(sampler.seed()));
        for _ in 0..sampler.samples() {
            rel.ev.reset_steps();
            let point = rel.point(sampler);
            let mut trail = vec![json!({ "point": point.json() })];
            rel.related(&point, &tv, &tjv, rho, sampler, &mut trail, &mut rep)?;
            if rep.full() {
                break;
            }
        }
        Ok(rep)
    }
}

/// The running maximum of `x` plus `bump`, which majorizes `x`.
fn dominator(x: &HostSeq, bump: u64) -> HostSeq {
    let mut best = 0;
    let prefix: Vec<u64> = x
        .prefix
        .iter()
        .map(|&v| {
            best = best.max(v);
            best + bump
        })
        .collect();
    HostSeq {
        prefix,
        default: best.max(x.default) + bump,
    }
}

/// Host point parametrizing a relation.
#[derive(Clone, Debug)]
enum Point {
    None,
    Seq(HostSeq),
}

impl Point {
    fn json(&self) -> Json {
        match self {
            Point::None => Json::Null,
            Point::Seq(s) => seq_json(s),
        }
    }

    fn seq(&self) -> &HostSeq {
        match self {
            Point::Seq(s) => s,
            Point::None => unreachable!("relation without a point"),
        }
    }
}

/// A relation instantiated for one nucleus, with its own evaluator.
struct Relation<'a> {
    oracle: &'a Oracle,
    spec: RelationSpec,
    nucleus: Nucleus,
    ev: Evaluator,
    eta: Value,
    /// `k ↦` a canonical element related to `point(k)`, when the relation
    /// has a point.
    probe: Option<Value>,
}

impl<'a> Relation<'a> {
    fn new(
        oracle: &'a Oracle,
        nucleus: &SimpleNucleus,
        spec: RelationSpec,
    ) -> Result<Self, OracleError> {
        let ev = oracle.evaluator();
        let eta = ev.eval_closed(&nucleus.eta)?;
        let probe = match spec.base {
            BaseRelation::Maj => None,
            BaseRelation::Lifting => Some(lam2(Ty::Nat, Ty::seq(), |k, a| a.ap(&k))),
            BaseRelation::Continuity | BaseRelation::UniformContinuity => {
                Some(nuclei::cont_probe())
            }
            BaseRelation::BarRecursion => Some(nuclei::bar_probe(&Ty::Nat)),
        };
        let probe = probe.map(|p| ev.eval_closed(&p.build())).transpose()?;
        Ok(Relation {
            oracle,
            spec,
            nucleus: Nucleus::Simple(nucleus.clone()),
            ev,
            eta,
            probe,
        })
    }

    fn point(&self, sampler: &mut Sampler) -> Point {
        match self.spec.base {
            BaseRelation::Maj => Point::None,
            // small bounds keep the exhaustive inner check cheap
            BaseRelation::UniformContinuity => Point::Seq(HostSeq::constant(1)),
            _ => Point::Seq(sampler.seq()),
        }
    }

    /// `n R w` at the point; `Some((observed, expected))` on failure.
    fn base(
        &self,
        point: &Point,
        n: u64,
        w: &Value,
        sampler: &mut Sampler,
    ) -> Result<Option<(Json, Json)>, OracleError> {
        let ev = &self.ev;
        let unary = self.spec.unary;
        let value_at = |v: &Value, p: &HostSeq| nat_of(ev, v, &[p.to_value()]);
        match self.spec.base {
            BaseRelation::Maj => {
                let m = readback_nat(w)?;
                Ok((!unary && n > m).then(|| (json!(m), json!(format!(">= {n}")))))
            }
            BaseRelation::Lifting => {
                let v = value_at(w, point.seq())?;
                Ok((!unary && v != n).then(|| (json!(v), json!(n))))
            }
            BaseRelation::Continuity => {
                let alpha = point.seq();
                let (vw, mw) = (ev.fst(w)?, ev.snd(w)?);
                let v = value_at(&vw, alpha)?;
                if !unary && v != n {
                    return Ok(Some((json!({ "value": v }), json!({ "value": n }))));
                }
                let m = value_at(&mw, alpha)?;
                for _ in 0..4 {
                    let beta = perturb(sampler, alpha, m as usize);
                    let vb = value_at(&vw, &beta)?;
                    if vb != v {
                        let obs = json!({ "modulus": m, "beta": seq_json(&beta), "value": vb });
                        return Ok(Some((obs, json!({ "value": v }))));
                    }
                }
                Ok(None)
            }
            BaseRelation::UniformContinuity => {
                let delta = point.seq();
                let (vw, mw) = (ev.fst(w)?, ev.snd(w)?);
                let v = value_at(&vw, delta)?;
                if !unary && v != n {
                    return Ok(Some((json!({ "value": v }), json!({ "value": n }))));
                }
                // reuse the exhaustive check on the components as closures
                let sub = self.uc_components(&vw, &mw, delta)?;
                Ok(sub.map(|c| {
                    (
                        c.observed,
                        json!({ "uniform": c.expected, "inputs": c.inputs }),
                    )
                }))
            }
            BaseRelation::BarRecursion => {
                let alpha = point.seq();
                let vw = ev.fst(w)?;
                let rest = ev.snd(w)?;
                let (sw, bw) = (ev.fst(&rest)?, ev.snd(&rest)?);
                let v = value_at(&vw, alpha)?;
                if !unary && v != n {
                    return Ok(Some((json!({ "value": v }), json!({ "value": n }))));
                }
                for i in 0..3 {
                    let s = finseq_sample(sampler, i);
                    if let Some((inputs, obs, exp)) =
                        self.oracle.secures_at(ev, &sw, &vw, &s, sampler, 2, 2)?
                    {
                        return Ok(Some((json!({ "at": inputs, "observed": obs }), exp)));
                    }
                    let fx = GbrFixture::new(ev, sampler)?;
                    if let Some((obs, exp)) = self.oracle.gbr_at(ev, &sw, &bw, &fx, &s)? {
                        let at =
                            json!({ "s": finseq_json(&s), "salts": fx.salts, "clause": "gbr" });
                        return Ok(Some((json!({ "at": at, "observed": obs }), json!(exp))));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Uniform continuity of `vw` below `delta` with modulus `mw δ`,
    /// enumerated exhaustively.
    fn uc_components(
        &self,
        vw: &Value,
        mw: &Value,
        delta: &HostSeq,
    ) -> Result<Option<Counterexample>, OracleError> {
        let ev = &self.ev;
        let md = nat_of(ev, mw, &[delta.to_value()])? as usize;
        let len = md + self.oracle.prefix_bound;
        let bounds: Vec<u64> = (0..len as u64).map(|i| delta.at(i)).collect();
        let needed = bounds.iter().map(|&b| u128::from(b) + 1).product::<u128>();
        if needed > u128::from(self.oracle.enumeration_cap) {
            return Err(OracleError::EnumerationTooLarge {
                needed,
                cap: self.oracle.enumeration_cap,
            });
        }
        let mut seen: BTreeMap<Vec<u64>, (Vec<u64>, u64)> = BTreeMap::new();
        let mut p = vec![0u64; len];
        loop {
            let v = nat_of(ev, vw, &[HostSeq::zero_extended(p.clone()).to_value()])?;
            match seen.get(&p[..md]) {
                Some((first, w)) if *w != v => {
                    return Ok(Some(Counterexample {
                        inputs: json!({ "modulus": md, "alpha": first, "beta": p }),
                        observed: json!(v),
                        expected: json!(w),
                    }))
                }
                Some(_) => {}
                None => {
                    seen.insert(p[..md].to_vec(), (p.clone(), v));
                }
            }
            let mut i = len;
            loop {
                if i == 0 {
                    return Ok(None);
                }
                i -= 1;
                if p[i] < bounds[i] {
                    p[i] += 1;
                    break;
                }
                p[i] = 0;
            }
        }
    }

    /// A related pair at `N`: either `(n, η n)` or `(point k, probe k)`.
    fn nat_pair(
        &self,
        point: &Point,
        sampler: &mut Sampler,
    ) -> Result<(u64, Value, Json), OracleError> {
        match (&self.probe, point) {
            (Some(probe), Point::Seq(p)) if sampler.coin(0.5) => {
                let k = sampler.below(3);
                let w = self.ev.apply_values(probe, &[Value::Nat(k)])?;
                Ok((p.at(k), w, json!({ "probe": k })))
            }
            (None, _) if sampler.coin(0.5) => {
                let n = sampler.numeral();
                let m = n + sampler.below(2);
                Ok((n, Value::Nat(m), json!({ "n": n, "m": m })))
            }
            _ => {
                let n = sampler.numeral();
                let w = self.ev.apply_values(&self.eta, &[Value::Nat(n)])?;
                Ok((n, w, json!({ "eta": n })))
            }
        }
    }

    /// `(f, g)` with `f : N -> N`, `g : N -> Jℕ` and `f n R g n` for all `n`.
    fn family(
        &self,
        point: &Point,
        sampler: &mut Sampler,
    ) -> Result<(Value, Value, Json), OracleError> {
        let h = sampler.seq_bounded(3);
        let hv = h.to_value();
        match (&self.probe, point) {
            (None, _) => {
                let bump = sampler.below(2);
                let h2 = h.clone();
                let g = Value::foreign(move |n| h2.at(n) + bump);
                Ok((hv, g, json!({ "f": seq_json(&h), "bump": bump })))
            }
            (Some(probe), Point::Seq(p)) if sampler.coin(0.5) => {
                // f = point ∘ h, g = probe ∘ h
                let (p, h2) = (p.clone(), h.clone());
                let f = Value::foreign(move |n| p.at(h2.at(n)));
                let g = instantiate(
                    &self.ev,
                    &compose_probe(&self.nucleus),
                    &[probe.clone(), hv],
                )?;
                Ok((f, g, json!({ "probe-of": seq_json(&h) })))
            }
            _ => {
                let g = instantiate(
                    &self.ev,
                    &compose_eta(&self.nucleus),
                    std::slice::from_ref(&hv),
                )?;
                Ok((hv, g, json!({ "eta-of": seq_json(&h) })))
            }
        }
    }

    /// `x R_ty y` by the relation clauses, recording failures in `rep`.
    #[allow(clippy::too_many_arguments)]
    fn related(
        &self,
        point: &Point,
        x: &Value,
        y: &Value,
        ty: &Ty,
        sampler: &mut Sampler,
        trail: &mut Vec<Json>,
        rep: &mut VerificationReport,
    ) -> Result<(), OracleError> {
        if rep.full() {
            return Ok(());
        }
        match ty {
            Ty::Nat => {
                rep.samples += 1;
                let n = if self.spec.unary { 0 } else { readback_nat(x)? };
                if let Some((obs, exp)) = self.base(point, n, y, sampler)? {
                    rep.fail(json!(trail), obs, exp);
                }
            }
            Ty::Prod(l, r) => {
                trail.push(json!("pr1"));
                self.related(
                    point,
                    &self.ev.fst(x)?,
                    &self.ev.fst(y)?,
                    l,
                    sampler,
                    trail,
                    rep,
                )?;
                trail.pop();
                trail.push(json!("pr2"));
                self.related(
                    point,
                    &self.ev.snd(x)?,
                    &self.ev.snd(y)?,
                    r,
                    sampler,
                    trail,
                    rep,
                )?;
                trail.pop();
            }
            Ty::Arrow(dom, cod) => {
                for _ in 0..2 {
                    let (a, b, desc) = self.arg_pair(point, dom, sampler)?;
                    let xa = if self.spec.unary {
                        x.clone()
                    } else {
                        self.ev.apply_values(x, &[a])?
                    };
                    let yb = self.ev.apply_values(y, &[b])?;
                    trail.push(desc);
                    self.related(point, &xa, &yb, cod, sampler, trail, rep)?;
                    trail.pop();
                }
            }
            Ty::Sum(..) => return Err(OracleError::UnsynthesizableArguments(ty.clone())),
        }
        Ok(())
    }

    /// A related argument pair at `ty`.
    fn arg_pair(
        &self,
        point: &Point,
        ty: &Ty,
        sampler: &mut Sampler,
    ) -> Result<(Value, Value, Json), OracleError> {
        match ty {
            Ty::Nat => {
                let (n, w, d) = self.nat_pair(point, sampler)?;
                Ok((Value::Nat(n), w, d))
            }
            Ty::Prod(l, r) => {
                let (a, b, d1) = self.arg_pair(point, l, sampler)?;
                let (c, e, d2) = self.arg_pair(point, r, sampler)?;
                Ok((Value::pair(a, c), Value::pair(b, e), json!([d1, d2])))
            }
            Ty::Arrow(d, c) if **d == Ty::Nat && **c == Ty::Nat && sampler.coin(0.5) => {
                // f R κ g by the κ condition
                let (f, g, desc) = self.family(point, sampler)?;
                let Nucleus::Simple(nuc) = &self.nucleus else {
                    unreachable!("simple")
                };
                let kg = instantiate(&self.ev, &nuc.kappa, &[g])?;
                Ok((f, kg, json!({ "kappa": desc })))
            }
            _ if ty.contains_sum() => Err(OracleError::UnsynthesizableArguments(ty.clone())),
            _ => {
                let depth = sampler.params.term_depth;
                let t = TermGen::new(sampler.rng(), false).closed(ty, depth);
                let (tj, _) = translate_closed(Style::Gentzen, &self.nucleus, &t)?;
                Ok((
                    self.ev.eval_closed(&t)?,
                    self.ev.eval_closed(&tj)?,
                    json!(pretty(&t)),
                ))
            }
        }
    }
}

/// `λp h n. p (h n)` with `p : N -> Jℕ`.
fn compose_probe(nucleus: &Nucleus) -> Tm {
    let jn = nucleus.j(&Ty::Nat).expect("J at N");
    lam3(Ty::arrow(Ty::Nat, jn), Ty::seq(), Ty::Nat, |p, h, n| {
        p.ap(&h.ap(&n))
    })
    .build()
}

/// `λh n. η (h n)`
fn compose_eta(nucleus: &Nucleus) -> Tm {
    let eta = B::closed(nucleus.eta(&Ty::Nat).expect("η at N"));
    lam2(Ty::seq(), Ty::Nat, move |h, n| eta.ap(&h.ap(&n))).build()
}
