//! Random well-typed terms, used as higher-type samples and in property tests.

use rand::{Rng, RngExt};

use crate::syntax::{Tm, Ty};

/// Generator of random well-typed terms.
pub struct TermGen<'a, R: Rng> {
    rng: &'a mut R,
    allow_sums: bool,
    ctx: Vec<Ty>,
}

impl<'a, R: Rng> TermGen<'a, R> {
    pub fn new(rng: &'a mut R, allow_sums: bool) -> Self {
        TermGen {
            rng,
            allow_sums,
            ctx: Vec::new(),
        }
    }

    /// A closed term of type `ty`.
    pub fn closed(&mut self, ty: &Ty, depth: usize) -> Tm {
        self.ctx.clear();
        self.term(ty, depth)
    }

    /// A term of type `ty` under the given context (innermost last).
    pub fn open(&mut self, ctx: Vec<Ty>, ty: &Ty, depth: usize) -> Tm {
        self.ctx = ctx;
        self.term(ty, depth)
    }

    /// A random type built from `N`, arrows, products and (optionally) sums.
    pub fn ty(&mut self, depth: usize) -> Ty {
        if depth == 0 || self.rng.random_bool(0.4) {
            return Ty::Nat;
        }
        let pick = self
            .rng
            .random_range(0..if self.allow_sums { 4 } else { 3 });
        let (a, b) = (self.ty(depth - 1), self.ty(depth - 1));
        match pick {
            0 | 1 => Ty::arrow(a, b),
            2 => Ty::prod(a, b),
            _ => Ty::sum(a, b),
        }
    }

    fn term(&mut self, ty: &Ty, depth: usize) -> Tm {
        match ty {
            Ty::Arrow(d, c) => {
                self.ctx.push((**d).clone());
                let body = self.term(c, depth);
                self.ctx.pop();
                Tm::lam((**d).clone(), body)
            }
            Ty::Prod(l, r) => {
                let a = self.term(l, depth.saturating_sub(1));
                let b = self.term(r, depth.saturating_sub(1));
                Tm::apps(Tm::Pair((**l).clone(), (**r).clone()), [a, b])
            }
            Ty::Sum(l, r) => {
                if self.rng.random_bool(0.5) {
                    let a = self.term(l, depth.saturating_sub(1));
                    Tm::app(Tm::Inl((**l).clone(), (**r).clone()), a)
                } else {
                    let b = self.term(r, depth.saturating_sub(1));
                    Tm::app(Tm::Inr((**l).clone(), (**r).clone()), b)
                }
            }
            Ty::Nat => self.nat(depth),
        }
    }

    fn nat(&mut self, depth: usize) -> Tm {
        let heads: Vec<usize> = (0..self.ctx.len())
            .filter(|&i| reaches_nat(&self.ctx[self.ctx.len() - 1 - i]))
            .collect();
        if depth == 0 {
            let atoms: Vec<usize> = (0..self.ctx.len())
                .filter(|&i| self.ctx[self.ctx.len() - 1 - i] == Ty::Nat)
                .collect();
            if !atoms.is_empty() && self.rng.random_bool(0.6) {
                return Tm::Var(atoms[self.rng.random_range(0..atoms.len())]);
            }
            return Tm::numeral(self.rng.random_range(0..=3));
        }
        let choice = self.rng.random_range(0..10);
        match choice {
            0 | 1 => Tm::numeral(self.rng.random_range(0..=3)),
            2..=5 if !heads.is_empty() => {
                let i = heads[self.rng.random_range(0..heads.len())];
                self.spine(i, depth - 1)
            }
            6 => Tm::app(Tm::Suc, self.nat(depth - 1)),
            7 => {
                // rec[N] base (\n m. step) count
                let base = self.nat(depth - 1);
                self.ctx.push(Ty::Nat);
                self.ctx.push(Ty::Nat);
                let step = self.nat(depth - 1);
                self.ctx.pop();
                self.ctx.pop();
                let count = if self.rng.random_bool(0.5) {
                    Tm::numeral(self.rng.random_range(0..=3))
                } else {
                    self.nat(0)
                };
                Tm::apps(
                    Tm::Rec(Ty::Nat),
                    [base, Tm::lam(Ty::Nat, Tm::lam(Ty::Nat, step)), count],
                )
            }
            8 if self.allow_sums => {
                let l = self.nat(depth - 1);
                let scrut = if self.rng.random_bool(0.5) {
                    Tm::app(Tm::Inl(Ty::Nat, Ty::Nat), l)
                } else {
                    Tm::app(Tm::Inr(Ty::Nat, Ty::Nat), l)
                };
                self.ctx.push(Ty::Nat);
                let f = self.nat(depth - 1);
                let g = self.nat(depth - 1);
                self.ctx.pop();
                Tm::apps(
                    Tm::Case(Ty::Nat, Ty::Nat, Ty::Nat),
                    [Tm::lam(Ty::Nat, f), Tm::lam(Ty::Nat, g), scrut],
                )
            }
            _ => {
                if heads.is_empty() {
                    Tm::app(Tm::Suc, self.nat(depth - 1))
                } else {
                    let i = heads[self.rng.random_range(0..heads.len())];
                    self.spine(i, depth - 1)
                }
            }
        }
    }

    /// Eliminates variable `index` down to a numeral.
    fn spine(&mut self, index: usize, depth: usize) -> Tm {
        let mut ty = self.ctx[self.ctx.len() - 1 - index].clone();
        let mut t = Tm::Var(index);
        loop {
            match ty {
                Ty::Nat => return t,
                Ty::Arrow(d, c) => {
                    let arg = self.term(&d, depth);
                    t = Tm::app(t, arg);
                    ty = (*c).clone();
                }
                Ty::Prod(l, r) => {
                    let left = reaches_nat(&l) && (!reaches_nat(&r) || self.rng.random_bool(0.5));
                    if left {
                        t = Tm::app(Tm::Pr1((*l).clone(), (*r).clone()), t);
                        ty = (*l).clone();
                    } else {
                        t = Tm::app(Tm::Pr2((*l).clone(), (*r).clone()), t);
                        ty = (*r).clone();
                    }
                }
                Ty::Sum(..) => unreachable!("filtered by reaches_nat"),
            }
        }
    }
}

fn reaches_nat(ty: &Ty) -> bool {
    match ty {
        Ty::Nat => true,
        Ty::Arrow(_, c) => reaches_nat(c),
        Ty::Prod(l, r) => reaches_nat(l) || reaches_nat(r),
        Ty::Sum(..) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{typecheck, Ctx};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_terms_typecheck() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..300 {
            let allow_sums = k % 2 == 0;
            let mut g = TermGen::new(&mut rng, allow_sums);
            let ty = g.ty(3);
            let t = g.closed(&ty, 3);
            assert_eq!(typecheck(&Ctx::new(), &t).unwrap(), ty, "{t:?}");
            if !allow_sums {
                assert!(!t.mentions_sum());
            }
        }
    }
}
