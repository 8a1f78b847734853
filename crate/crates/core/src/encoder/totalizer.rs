//! Unary counter over a set of literals.

use crate::sat::{ClauseSink, Lit};

/// Balanced merge tree whose outputs encode the number of true inputs in
/// unary: `outputs[i]` holds iff at least `i + 1` inputs are true. Clauses
/// are emitted in both directions, so the count is exact, not just an upper
/// bound.
#[derive(Debug, Clone)]
pub struct Totalizer {
    outputs: Vec<Lit>,
}

impl Totalizer {
    pub fn build<S: ClauseSink + ?Sized>(sink: &mut S, inputs: &[Lit]) -> Self {
        Self { outputs: Self::count(sink, inputs) }
    }

    fn count<S: ClauseSink + ?Sized>(sink: &mut S, inputs: &[Lit]) -> Vec<Lit> {
        match inputs.len() {
            0 => Vec::new(),
            1 => vec![inputs[0]],
            n => {
                let (l, r) = inputs.split_at(n / 2);
                let left = Self::count(sink, l);
                let right = Self::count(sink, r);
                Self::merge(sink, &left, &right)
            }
        }
    }

    fn merge<S: ClauseSink + ?Sized>(sink: &mut S, a: &[Lit], b: &[Lit]) -> Vec<Lit> {
        let out: Vec<Lit> = (0..a.len() + b.len()).map(|_| sink.new_lit()).collect();
        // i, j range over partial counts; index 0 means "at least 0" (true).
        for i in 0..=a.len() {
            for j in 0..=b.len() {
                if i + j > 0 {
                    let mut c = vec![out[i + j - 1]];
                    if i > 0 {
                        c.push(!a[i - 1]);
                    }
                    if j > 0 {
                        c.push(!b[j - 1]);
                    }
                    sink.add_clause(&c);
                }
                if i + j < out.len() {
                    let mut c = vec![!out[i + j]];
                    if i < a.len() {
                        c.push(a[i]);
                    }
                    if j < b.len() {
                        c.push(b[j]);
                    }
                    sink.add_clause(&c);
                }
            }
        }
        out
    }

    /// Number of counted inputs.
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// `outputs()[i]` is true iff the sum is at least `i + 1`.
    pub fn outputs(&self) -> &[Lit] {
        &self.outputs
    }

    /// Literal asserting "sum ≤ n", or `None` when the bound is vacuous.
    pub fn at_most(&self, n: usize) -> Option<Lit> {
        self.outputs.get(n).map(|&l| !l)
    }
}
