//! Tableau translation of NNF formulas into generalized Büchi automata with
//! acceptance on edges.
//!
//! A state is the set of obligations still to be met from the current step
//! on. Expanding it yields edges labelled with the literals that must hold
//! now and leading to the obligations for the next step. Each until
//! subformula owns one acceptance set: an edge is in it unless that until
//! was postponed on the edge.

use std::collections::{BTreeMap, BTreeSet};

use super::formula::Nnf;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge<A> {
    /// Conjunction of literals; empty means "true".
    pub label: Vec<(A, bool)>,
    pub target: usize,
    /// `accepting[i]`: the edge belongs to acceptance set `i`.
    pub accepting: Vec<bool>,
}

impl<A> Edge<A> {
    pub fn enabled(&self, holds: impl Fn(&A) -> bool) -> bool {
        self.label.iter().all(|(a, positive)| holds(a) == *positive)
    }
}

#[derive(Debug, Clone)]
pub struct Buchi<A> {
    /// Obligation set of each state, for display and debugging.
    pub obligations: Vec<BTreeSet<Nnf<A>>>,
    pub edges: Vec<Vec<Edge<A>>>,
    pub initial: usize,
    /// Number of acceptance sets; with zero sets every infinite run accepts.
    pub acceptance_sets: usize,
}

struct Cover<A> {
    literals: BTreeSet<(A, bool)>,
    next: BTreeSet<Nnf<A>>,
    postponed: BTreeSet<Nnf<A>>,
}

impl<A: Clone + Ord> Buchi<A> {
    pub fn from_nnf(formula: &Nnf<A>) -> Self {
        let mut untils = BTreeSet::new();
        collect_untils(formula, &mut untils);
        let untils: Vec<Nnf<A>> = untils.into_iter().collect();

        let start: BTreeSet<Nnf<A>> = [formula.clone()].into();
        let mut ids: BTreeMap<BTreeSet<Nnf<A>>, usize> = BTreeMap::new();
        let mut obligations = vec![start.clone()];
        ids.insert(start, 0);
        let mut edges = Vec::new();
        let mut i = 0;
        while i < obligations.len() {
            let todo: Vec<Nnf<A>> = obligations[i].iter().cloned().collect();
            let mut out: Vec<Edge<A>> = Vec::new();
            for cover in expand(todo) {
                let target = *ids.entry(cover.next.clone()).or_insert_with(|| {
                    obligations.push(cover.next.clone());
                    obligations.len() - 1
                });
                let edge = Edge {
                    label: cover.literals.into_iter().collect(),
                    target,
                    accepting: untils.iter().map(|u| !cover.postponed.contains(u)).collect(),
                };
                if !out.contains(&edge) {
                    out.push(edge);
                }
            }
            edges.push(out);
            i += 1;
        }
        Self { obligations, edges, initial: 0, acceptance_sets: untils.len() }
    }
}

impl<A> Buchi<A> {
    pub fn num_states(&self) -> usize {
        self.edges.len()
    }
}

fn collect_untils<A: Clone + Ord>(f: &Nnf<A>, out: &mut BTreeSet<Nnf<A>>) {
    match f {
        Nnf::True | Nnf::False | Nnf::Lit(..) => {}
        Nnf::Next(a) => collect_untils(a, out),
        Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Nnf::Until(a, b) => {
            out.insert(f.clone());
            collect_untils(a, out);
            collect_untils(b, out);
        }
    }
}

/// All consistent ways of meeting `todo` in one step.
fn expand<A: Clone + Ord>(todo: Vec<Nnf<A>>) -> Vec<Cover<A>> {
    let mut results = Vec::new();
    let start = Cover { literals: BTreeSet::new(), next: BTreeSet::new(), postponed: BTreeSet::new() };
    let mut stack = vec![(todo, BTreeSet::new(), start)];
    while let Some((mut todo, mut done, mut cover)) = stack.pop() {
        let Some(f) = todo.pop() else {
            results.push(cover);
            continue;
        };
        if !done.insert(f.clone()) {
            stack.push((todo, done, cover));
            continue;
        }
        match f {
            Nnf::True => stack.push((todo, done, cover)),
            Nnf::False => {}
            Nnf::Lit(a, p) => {
                if !cover.literals.contains(&(a.clone(), !p)) {
                    cover.literals.insert((a, p));
                    stack.push((todo, done, cover));
                }
            }
            Nnf::And(a, b) => {
                todo.push(*a);
                todo.push(*b);
                stack.push((todo, done, cover));
            }
            Nnf::Next(a) => {
                cover.next.insert(*a);
                stack.push((todo, done, cover));
            }
            Nnf::Or(a, b) => {
                let mut other = todo.clone();
                other.push(*b);
                stack.push((other, done.clone(), cover.clone()));
                todo.push(*a);
                stack.push((todo, done, cover));
            }
            Nnf::Until(ref a, ref b) => {
                let mut later = todo.clone();
                let mut postponed = cover.clone();
                later.push((**a).clone());
                postponed.next.insert(f.clone());
                postponed.postponed.insert(f.clone());
                stack.push((later, done.clone(), postponed));
                todo.push((**b).clone());
                stack.push((todo, done, cover));
            }
            Nnf::Release(ref a, ref b) => {
                let mut later = todo.clone();
                let mut deferred = cover.clone();
                later.push((**b).clone());
                deferred.next.insert(f.clone());
                stack.push((later, done.clone(), deferred));
                todo.push((**a).clone());
                todo.push((**b).clone());
                stack.push((todo, done, cover));
            }
        }
    }
    results
}

impl<A: Clone> Clone for Cover<A> {
    fn clone(&self) -> Self {
        Self { literals: self.literals.clone(), next: self.next.clone(), postponed: self.postponed.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::formula::{Formula, RawAtom};

    fn buchi(s: &str) -> Buchi<RawAtom> {
        Buchi::from_nnf(&Formula::parse(s).unwrap().nnf())
    }

    #[test]
    fn globally_has_one_state() {
        let b = buchi("G p");
        assert_eq!(b.num_states(), 1);
        assert_eq!(b.acceptance_sets, 0);
        assert_eq!(b.edges[0].len(), 1);
        assert_eq!(b.edges[0][0].label, vec![(RawAtom::Var("p".into()), true)]);
        assert_eq!(b.edges[0][0].target, 0);
    }

    #[test]
    fn finally_has_two_states() {
        let b = buchi("F p");
        assert_eq!(b.num_states(), 2);
        assert_eq!(b.acceptance_sets, 1);
        let waiting = b.edges[0].iter().find(|e| e.target == 0).unwrap();
        assert_eq!(waiting.accepting, vec![false]);
        assert!(waiting.label.is_empty());
        let done = b.edges[0].iter().find(|e| e.target == 1).unwrap();
        assert_eq!(done.accepting, vec![true]);
    }

    #[test]
    fn contradictions_have_no_edges() {
        let b = buchi("p & !p");
        assert!(b.edges[0].is_empty());
        assert!(buchi("false").edges[0].is_empty());
    }
}
