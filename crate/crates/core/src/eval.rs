//! Call-by-name big-step evaluation with shared (memoized) thunks.
//!
//! Arguments are suspended and forced on demand. A forced thunk remembers
//! its value, which changes nothing observable for System T terms but keeps
//! the extracted moduli and bar recursors from re-evaluating shared
//! subterms exponentially often.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::sample::Sampler;
use crate::syntax::{Tm, Ty};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation budget of {0} steps exhausted")]
    BudgetExhausted(u64),
    #[error("ill-typed runtime state: {0}")]
    IllTypedRuntime(String),
    #[error("value is not a numeral")]
    NotANumeral,
}

/// A host function `N -> N` injected into the object language.
#[derive(Clone)]
pub struct Foreign {
    f: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
}

impl Foreign {
    pub fn new(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Foreign {
        Foreign { f: Arc::new(f) }
    }

    pub fn call(&self, n: u64) -> u64 {
        (self.f)(n)
    }
}

#[derive(Clone)]
pub enum Value {
    Nat(u64),
    Closure {
        env: Env,
        dom: Ty,
        body: Arc<Tm>,
    },
    Pair(Thunk, Thunk),
    Inl(Thunk),
    Inr(Thunk),
    /// A constant applied to fewer arguments than its arity.
    Partial {
        constant: Tm,
        args: Vec<Thunk>,
    },
    Foreign(Foreign),
}

impl Value {
    pub fn foreign(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Value {
        Value::Foreign(Foreign::new(f))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Thunk::ready(a), Thunk::ready(b))
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "Nat({n})"),
            Value::Closure { dom, .. } => write!(f, "Closure(\\_:{dom}. ..)"),
            Value::Pair(..) => write!(f, "Pair(..)"),
            Value::Inl(_) => write!(f, "Inl(..)"),
            Value::Inr(_) => write!(f, "Inr(..)"),
            Value::Partial { constant, args } => {
                write!(f, "Partial({constant:?}, {} args)", args.len())
            }
            Value::Foreign(_) => write!(f, "Foreign"),
        }
    }
}

/// Extracts `k` from `Nat(k)`.
pub fn readback_nat(v: &Value) -> Result<u64, EvalError> {
    match v {
        Value::Nat(k) => Ok(*k),
        _ => Err(EvalError::NotANumeral),
    }
}

#[derive(Clone)]
pub struct Thunk(Rc<RefCell<ThunkState>>);

enum ThunkState {
    Term(Env, Arc<Tm>),
    Apply(Thunk, Vec<Thunk>),
    Busy,
    Done(Value),
}

impl Thunk {
    pub fn ready(v: Value) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Done(v))))
    }

    pub fn delay(env: Env, t: Arc<Tm>) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Term(env, t))))
    }

    fn apply(f: Thunk, args: Vec<Thunk>) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Apply(f, args))))
    }
}

/// Runtime environment; index 0 is the innermost binder.
#[derive(Clone, Default)]
pub struct Env(Option<Rc<EnvNode>>);

struct EnvNode {
    head: Thunk,
    tail: Env,
    len: usize,
}

impl Env {
    pub fn new() -> Env {
        Env(None)
    }

    /// Builds an environment whose last element is bound innermost.
    pub fn from_values(values: impl IntoIterator<Item = Value>) -> Env {
        values
            .into_iter()
            .fold(Env::new(), |env, v| env.push(Thunk::ready(v)))
    }

    pub fn push(&self, th: Thunk) -> Env {
        Env(Some(Rc::new(EnvNode {
            head: th,
            tail: self.clone(),
            len: self.len() + 1,
        })))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    fn lookup(&self, mut index: usize) -> Option<&Thunk> {
        let mut node = self.0.as_ref()?;
        while index > 0 {
            node = node.tail.0.as_ref()?;
            index -= 1;
        }
        Some(&node.head)
    }
}

fn arity(constant: &Tm) -> usize {
    match constant {
        Tm::Suc | Tm::Pr1(..) | Tm::Pr2(..) | Tm::Inl(..) | Tm::Inr(..) => 1,
        Tm::Pair(..) => 2,
        Tm::Rec(_) | Tm::Case(..) => 3,
        _ => unreachable!("not a constant with arguments"),
    }
}

/// Evaluator state: a step budget shared by every call made through it.
pub struct Evaluator {
    budget: u64,
    steps: Cell<u64>,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new(DEFAULT_BUDGET)
    }
}

impl Evaluator {
    pub fn new(budget: u64) -> Evaluator {
        Evaluator {
            budget,
            steps: Cell::new(0),
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps.get()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Starts a fresh budget; cached thunks are kept.
    pub fn reset_steps(&self) {
        self.steps.set(0);
    }

    fn tick(&self) -> Result<(), EvalError> {
        let s = self.steps.get() + 1;
        if s > self.budget {
            return Err(EvalError::BudgetExhausted(self.budget));
        }
        self.steps.set(s);
        Ok(())
    }

    pub fn eval(&self, env: &Env, t: &Tm) -> Result<Value, EvalError> {
        self.tick()?;
        stacker::maybe_grow(128 * 1024, 8 * 1024 * 1024, || match t {
            Tm::Var(i) => {
                let th = env
                    .lookup(*i)
                    .ok_or_else(|| EvalError::IllTypedRuntime(format!("unbound index {i}")))?;
                self.force(th)
            }
            Tm::Lam(dom, body) => Ok(Value::Closure {
                env: env.clone(),
                dom: dom.clone(),
                body: body.clone(),
            }),
            Tm::App(f, a) => {
                let fv = self.eval(env, f)?;
                self.apply(fv, Thunk::delay(env.clone(), a.clone()))
            }
            Tm::Zero => Ok(Value::Nat(0)),
            constant => Ok(Value::Partial {
                constant: constant.clone(),
                args: Vec::new(),
            }),
        })
    }

    pub fn eval_closed(&self, t: &Tm) -> Result<Value, EvalError> {
        self.eval(&Env::new(), t)
    }

    pub fn force(&self, th: &Thunk) -> Result<Value, EvalError> {
        if let ThunkState::Done(v) = &*th.0.borrow() {
            return Ok(v.clone());
        }
        let state = std::mem::replace(&mut *th.0.borrow_mut(), ThunkState::Busy);
        let v = match state {
            ThunkState::Done(v) => v,
            ThunkState::Term(env, t) => self.eval(&env, &t)?,
            ThunkState::Apply(f, args) => {
                let mut fv = self.force(&f)?;
                for a in args {
                    fv = self.apply(fv, a)?;
                }
                fv
            }
            ThunkState::Busy => {
                return Err(EvalError::IllTypedRuntime(
                    "thunk forced re-entrantly".into(),
                ))
            }
        };
        *th.0.borrow_mut() = ThunkState::Done(v.clone());
        Ok(v)
    }

    pub fn force_nat(&self, th: &Thunk) -> Result<u64, EvalError> {
        match self.force(th)? {
            Value::Nat(k) => Ok(k),
            other => Err(EvalError::IllTypedRuntime(format!(
                "expected a numeral, found {other:?}"
            ))),
        }
    }

    pub fn apply(&self, f: Value, arg: Thunk) -> Result<Value, EvalError> {
        self.tick()?;
        match f {
            Value::Closure { env, body, .. } => self.eval(&env.push(arg), &body),
            Value::Partial { constant, mut args } => {
                args.push(arg);
                if args.len() < arity(&constant) {
                    Ok(Value::Partial { constant, args })
                } else {
                    self.run_constant(&constant, args)
                }
            }
            Value::Foreign(h) => Ok(Value::Nat(h.call(self.force_nat(&arg)?))),
            other => Err(EvalError::IllTypedRuntime(format!(
                "applied a non-function {other:?}"
            ))),
        }
    }

    /// Applies a value to already computed arguments.
    pub fn apply_values(&self, f: &Value, args: &[Value]) -> Result<Value, EvalError> {
        args.iter()
            .try_fold(f.clone(), |acc, a| self.apply(acc, Thunk::ready(a.clone())))
    }

    /// Applies and reads back a numeral.
    pub fn apply_nat(&self, f: &Value, args: &[Value]) -> Result<u64, EvalError> {
        match self.apply_values(f, args)? {
            Value::Nat(k) => Ok(k),
            other => Err(EvalError::IllTypedRuntime(format!(
                "expected a numeral, found {other:?}"
            ))),
        }
    }

    pub fn fst(&self, v: &Value) -> Result<Value, EvalError> {
        match v {
            Value::Pair(a, _) => self.force(a),
            other => Err(EvalError::IllTypedRuntime(format!(
                "projection from {other:?}"
            ))),
        }
    }

    pub fn snd(&self, v: &Value) -> Result<Value, EvalError> {
        match v {
            Value::Pair(_, b) => self.force(b),
            other => Err(EvalError::IllTypedRuntime(format!(
                "projection from {other:?}"
            ))),
        }
    }

    fn run_constant(&self, constant: &Tm, args: Vec<Thunk>) -> Result<Value, EvalError> {
        let mut args = args.into_iter();
        let mut next = || args.next().expect("arity checked");
        match constant {
            Tm::Suc => {
                let n = self.force_nat(&next())?;
                n.checked_add(1)
                    .map(Value::Nat)
                    .ok_or_else(|| EvalError::IllTypedRuntime("numeral overflow".into()))
            }
            Tm::Rec(_) => {
                let (base, step, n) = (next(), next(), next());
                let n = self.force_nat(&n)?;
                let mut acc = base;
                for k in 0..n {
                    self.tick()?;
                    acc = Thunk::apply(step.clone(), vec![Thunk::ready(Value::Nat(k)), acc]);
                }
                self.force(&acc)
            }
            Tm::Pair(..) => Ok(Value::Pair(next(), next())),
            Tm::Pr1(..) => {
                let p = self.force(&next())?;
                self.fst(&p)
            }
            Tm::Pr2(..) => {
                let p = self.force(&next())?;
                self.snd(&p)
            }
            Tm::Inl(..) => Ok(Value::Inl(next())),
            Tm::Inr(..) => Ok(Value::Inr(next())),
            Tm::Case(..) => {
                let (f, g, s) = (next(), next(), next());
                match self.force(&s)? {
                    Value::Inl(x) => {
                        let fv = self.force(&f)?;
                        self.apply(fv, x)
                    }
                    Value::Inr(y) => {
                        let gv = self.force(&g)?;
                        self.apply(gv, y)
                    }
                    other => Err(EvalError::IllTypedRuntime(format!("case on {other:?}"))),
                }
            }
            other => Err(EvalError::IllTypedRuntime(format!(
                "{other:?} takes no arguments"
            ))),
        }
    }

    /// Sampled extensional equality at type `ty`: `true` means no
    /// counterexample was found among `n` sampled arguments per arrow.
    pub fn ext_eq_sampled(
        &self,
        f: &Value,
        g: &Value,
        ty: &Ty,
        sampler: &mut Sampler,
        n: usize,
    ) -> Result<bool, EvalError> {
        match ty {
            Ty::Nat => Ok(readback_nat(f)? == readback_nat(g)?),
            Ty::Arrow(dom, cod) => {
                for _ in 0..n {
                    let x = sampler.value(self, dom)?;
                    let fx = self.apply_values(f, std::slice::from_ref(&x))?;
                    let gx = self.apply_values(g, &[x])?;
                    if !self.ext_eq_sampled(&fx, &gx, cod, sampler, n)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Ty::Prod(l, r) => {
                Ok(
                    self.ext_eq_sampled(&self.fst(f)?, &self.fst(g)?, l, sampler, n)?
                        && self.ext_eq_sampled(&self.snd(f)?, &self.snd(g)?, r, sampler, n)?,
                )
            }
            Ty::Sum(l, r) => match (f, g) {
                (Value::Inl(a), Value::Inl(b)) => {
                    let (a, b) = (self.force(a)?, self.force(b)?);
                    self.ext_eq_sampled(&a, &b, l, sampler, n)
                }
                (Value::Inr(a), Value::Inr(b)) => {
                    let (a, b) = (self.force(a)?, self.force(b)?);
                    self.ext_eq_sampled(&a, &b, r, sampler, n)
                }
                (Value::Inl(_) | Value::Inr(_), Value::Inl(_) | Value::Inr(_)) => Ok(false),
                _ => Err(EvalError::IllTypedRuntime("sum value expected".into())),
            },
        }
    }

    /// Shallow value typing: checks the head of `v` against `ty` and
    /// recurses through data constructors (pairs, injections).
    pub fn value_has_type(&self, v: &Value, ty: &Ty) -> Result<bool, EvalError> {
        Ok(match (v, ty) {
            (Value::Nat(_), Ty::Nat) => true,
            (Value::Closure { dom, .. }, Ty::Arrow(d, _)) => dom == &**d,
            (Value::Foreign(_), Ty::Arrow(d, c)) => **d == Ty::Nat && **c == Ty::Nat,
            (Value::Partial { constant, args }, ty) => {
                let mut cty = constant.constant_type().expect("constant");
                for _ in args {
                    cty = match cty {
                        Ty::Arrow(_, c) => (*c).clone(),
                        _ => return Ok(false),
                    };
                }
                &cty == ty
            }
            (Value::Pair(a, b), Ty::Prod(l, r)) => {
                self.value_has_type(&self.force(a)?, l)?
                    && self.value_has_type(&self.force(b)?, r)?
            }
            (Value::Inl(a), Ty::Sum(l, _)) => self.value_has_type(&self.force(a)?, l)?,
            (Value::Inr(b), Ty::Sum(_, r)) => self.value_has_type(&self.force(b)?, r)?,
            _ => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap;
    use crate::build::*;
    use crate::prelude;

    fn nat(v: Value) -> u64 {
        readback_nat(&v).unwrap()
    }

    #[test]
    fn suc_of_numeral() {
        let ev = Evaluator::default();
        let t = Tm::app(Tm::Suc, Tm::numeral(4));
        assert_eq!(nat(ev.eval_closed(&t).unwrap()), 5);
    }

    #[test]
    fn rec_base_case_is_the_base() {
        let ev = Evaluator::default();
        let step = lam2(Ty::Nat, Ty::Nat, |_, m| suc(&m));
        let t = rec(&Ty::Nat, &num(7), &step, &zero()).build();
        assert_eq!(nat(ev.eval_closed(&t).unwrap()), 7);
        let t = rec(&Ty::Nat, &num(7), &step, &num(3)).build();
        assert_eq!(nat(ev.eval_closed(&t).unwrap()), 10);
    }

    #[test]
    fn max_of_three_and_five() {
        // max(3,5) = suc(max(2,4)) = .. = suc^3(max(0,2)) = 5
        let ev = Evaluator::default();
        let t = ap!(B::closed(prelude::max()), num(3), num(5)).build();
        assert_eq!(nat(ev.eval_closed(&t).unwrap()), 5);
    }

    #[test]
    fn call_by_name_ignores_unused_arguments() {
        // (\x. 0) (rec[N] 0 (\n m. suc m) huge) with a tiny budget
        let ev = Evaluator::new(200);
        let step = lam2(Ty::Nat, Ty::Nat, |_, m| suc(&m));
        let heavy = rec(&Ty::Nat, &zero(), &step, &num(1000));
        let t = lam(Ty::Nat, |_| zero()).ap(&heavy).build();
        assert_eq!(nat(ev.eval_closed(&t).unwrap()), 0);
    }

    #[test]
    fn budget_is_enforced() {
        let ev = Evaluator::new(50);
        let step = lam2(Ty::Nat, Ty::Nat, |_, m| suc(&m));
        let t = rec(&Ty::Nat, &zero(), &step, &num(1000)).build();
        assert_eq!(
            ev.eval_closed(&t).unwrap_err(),
            EvalError::BudgetExhausted(50)
        );
    }

    #[test]
    fn readback() {
        assert_eq!(readback_nat(&Value::Nat(0)), Ok(0));
        assert_eq!(readback_nat(&Value::Nat(7)), Ok(7));
        let ev = Evaluator::default();
        let clo = ev.eval_closed(&Tm::lam(Ty::Nat, Tm::Var(0))).unwrap();
        assert_eq!(readback_nat(&clo), Err(EvalError::NotANumeral));
    }

    #[test]
    fn foreign_transparency() {
        let ev = Evaluator::default();
        let h = |k: u64| k * k + 1;
        let env = Env::from_values([Value::foreign(h)]);
        for k in 0..10 {
            let t = Tm::app(Tm::Var(0), Tm::numeral(k));
            assert_eq!(nat(ev.eval(&env, &t).unwrap()), h(k));
        }
    }

    #[test]
    fn pairs_and_cases() {
        let ev = Evaluator::default();
        let (n, s) = (Ty::Nat, Ty::seq());
        let p = pair(&n, &n, &num(2), &num(9));
        assert_eq!(nat(ev.eval_closed(&pr2(&n, &n, &p).build()).unwrap()), 9);
        let c = ap!(
            B::closed(Tm::Case(n.clone(), s.clone(), n.clone())),
            lam(n.clone(), |x| suc(&x)),
            lam(s.clone(), |f| f.ap(&num(3))),
            inr(&n, &s, &B::closed(Tm::Suc))
        );
        assert_eq!(nat(ev.eval_closed(&c.build()).unwrap()), 4);
    }

    #[test]
    fn ext_eq_examples() {
        let ev = Evaluator::default();
        let mut sampler = Sampler::new(7);
        assert!(ev
            .ext_eq_sampled(&Value::Nat(3), &Value::Nat(3), &Ty::Nat, &mut sampler, 10)
            .unwrap());
        assert!(!ev
            .ext_eq_sampled(&Value::Nat(3), &Value::Nat(4), &Ty::Nat, &mut sampler, 10)
            .unwrap());
        let t = lam(Ty::seq(), |a| a.ap(&zero())).build();
        let (f, g) = (ev.eval_closed(&t).unwrap(), ev.eval_closed(&t).unwrap());
        assert!(ev
            .ext_eq_sampled(&f, &g, &Ty::functional(), &mut sampler, 50)
            .unwrap());
        let h = ev
            .eval_closed(&lam(Ty::seq(), |a| a.ap(&num(1))).build())
            .unwrap();
        assert!(!ev
            .ext_eq_sampled(&f, &h, &Ty::functional(), &mut sampler, 50)
            .unwrap());
    }
}
