//! Seeded sampling of numerals, host sequences and object-level values.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eval::{EvalError, Evaluator, Value};
use crate::gen::TermGen;
use crate::syntax::Ty;

/// An infinite sequence given by a finite table and a constant tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HostSeq {
    pub prefix: Vec<u64>,
    pub default: u64,
}

impl HostSeq {
    pub fn constant(c: u64) -> HostSeq {
        HostSeq {
            prefix: Vec::new(),
            default: c,
        }
    }

    /// The zero-extension of a finite prefix.
    pub fn zero_extended(prefix: Vec<u64>) -> HostSeq {
        HostSeq { prefix, default: 0 }
    }

    pub fn at(&self, i: u64) -> u64 {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.prefix.get(i).copied())
            .unwrap_or(self.default)
    }

    /// Makes the first `len` entries explicit.
    pub fn materialize(&mut self, len: usize) {
        while self.prefix.len() < len {
            self.prefix.push(self.default);
        }
    }

    pub fn to_value(&self) -> Value {
        let s = self.clone();
        Value::foreign(move |i| s.at(i))
    }
}

/// A finite sequence of naturals as a host object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HostFinSeq(pub Vec<u64>);

impl HostFinSeq {
    /// The `(N -> N) * N` encoding: the zero-extension paired with the length.
    pub fn to_value(&self) -> Value {
        Value::pair(
            HostSeq::zero_extended(self.0.clone()).to_value(),
            Value::Nat(self.0.len() as u64),
        )
    }

    /// Every sequence of length at most `max_len` with entries at most `max_entry`,
    /// shortest first.
    pub fn all_up_to(max_len: usize, max_entry: u64) -> Vec<HostFinSeq> {
        let mut out = vec![HostFinSeq(Vec::new())];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &layer {
                for e in 0..=max_entry {
                    let mut t: Vec<u64> = s.clone();
                    t.push(e);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned().map(HostFinSeq));
            layer = next;
        }
        out
    }
}

/// Distribution parameters shared by every check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleParams {
    pub max_numeral: u64,
    pub seq_bound: u64,
    pub samples: usize,
    /// Length of the explicit table of a sampled sequence.
    pub seq_table_len: usize,
    /// Depth bound for randomly generated terms.
    pub term_depth: usize,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            max_numeral: 8,
            seq_bound: 5,
            samples: 100,
            seq_table_len: 24,
            term_depth: 3,
        }
    }
}

/// Deterministic sample stream: equal seed and parameters, equal samples.
pub struct Sampler {
    seed: u64,
    pub params: SampleParams,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler::with_params(seed, SampleParams::default())
    }

    pub fn with_params(seed: u64, params: SampleParams) -> Sampler {
        Sampler {
            seed,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> usize {
        self.params.samples
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Uniform in `0..=max`.
    pub fn below(&mut self, max: u64) -> u64 {
        self.rng.random_range(0..=max)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn numeral(&mut self) -> u64 {
        self.below(self.params.max_numeral)
    }

    pub fn seq(&mut self) -> HostSeq {
        self.seq_bounded(self.params.seq_bound)
    }

    pub fn seq_bounded(&mut self, bound: u64) -> HostSeq {
        let prefix = (0..self.params.seq_table_len)
            .map(|_| self.below(bound))
            .collect();
        HostSeq {
            prefix,
            default: self.below(bound),
        }
    }

    /// A sequence pointwise bounded by `delta` (and zero beyond its table).
    pub fn seq_under(&mut self, delta: &HostSeq) -> HostSeq {
        let prefix = (0..self.params.seq_table_len as u64)
            .map(|i| self.below(delta.at(i)))
            .collect();
        HostSeq { prefix, default: 0 }
    }

    pub fn finseq(&mut self, max_len: usize, max_entry: u64) -> HostFinSeq {
        let len = self.below(max_len as u64) as usize;
        HostFinSeq((0..len).map(|_| self.below(max_entry)).collect())
    }

    /// A random value of type `ty`. Sequences are sampled directly; other
    /// higher-type values come from randomly generated closed terms.
    pub fn value(&mut self, ev: &Evaluator, ty: &Ty) -> Result<Value, EvalError> {
        match ty {
            Ty::Nat => Ok(Value::Nat(self.numeral())),
            Ty::Arrow(d, c) if **d == Ty::Nat && **c == Ty::Nat && self.coin(0.75) => {
                Ok(self.seq().to_value())
            }
            Ty::Prod(l, r) => {
                let a = self.value(ev, l)?;
                let b = self.value(ev, r)?;
                Ok(Value::pair(a, b))
            }
            _ => {
                let depth = self.params.term_depth;
                let t = TermGen::new(self.rng(), true).closed(ty, depth);
                ev.eval_closed(&t)
            }
        }
    }
}
