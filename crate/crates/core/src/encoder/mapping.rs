//! Tree-to-state mappings: positive nodes must be reproduced, negative
//! nodes are tracked exactly so that looping and bad-ending behavior can be
//! forbidden.

use super::Encoder;
use crate::sat::Lit;
use crate::scenario::{NegativeUpdate, ScenarioTree};

impl Encoder {
    pub(super) fn encode_positive(&mut self, tree: &ScenarioTree) {
        let c = self.params.states;
        self.positive = tree.clone();
        for v in 0..tree.len() {
            let node = tree.node(v);
            let map = self.cnf.domain(c, |q| format!("map[{v},{q}]"));
            let Some(parent) = node.parent else {
                self.cnf.clause(&[map[0]]);
                self.positive_map.push(map);
                continue;
            };
            let action = node.input.as_ref().expect("non-root node");
            let e = action.event;
            let u = self.input(&action.input);
            let from = self.positive_map[parent].clone();
            match node.output.event {
                None => {
                    for q in 0..c {
                        self.cnf.imply(&[from[q]], map[q]);
                        self.cnf.imply(&[from[q]], self.reaction[q][e][u][0]);
                    }
                }
                Some(o) => {
                    let before = &tree.node(parent).output.output;
                    for to in 0..c {
                        self.cnf.imply(&[map[to]], self.output_event[to][o + 1]);
                        for (z, (&b, &after)) in before.iter().zip(&node.output.output).enumerate() {
                            self.cnf.imply(&[map[to]], self.algorithm[to][z][b as usize].with_sign(after));
                        }
                        for q in 0..c {
                            let delta = self.reaction[q][e][u][to + 1];
                            self.cnf.imply(&[from[q], map[to]], delta);
                            self.cnf.imply(&[from[q], delta], map[to]);
                        }
                    }
                }
            }
            self.positive_map.push(map);
        }
    }

    pub(super) fn encode_negative_root(&mut self) {
        let map = self.cnf.domain(self.params.states + 1, |q| format!("neg_map[0,{q}]"));
        self.cnf.clause(&[map[1]]);
        self.negative_map.push(map);
    }

    pub(super) fn encode_negative_update(&mut self, update: &NegativeUpdate) {
        let c = self.params.states;
        for &v in &update.new_nodes {
            debug_assert_eq!(v, self.negative_map.len());
            let node = self.negative.tree().node(v).clone();
            let parent = node.parent.expect("non-root node");
            let parent_out = self.negative.tree().node(parent).output.output.clone();
            let action = node.input.as_ref().expect("non-root node");
            let e = action.event;
            let u = self.input(&action.input);
            let map = self.cnf.domain(c + 1, |q| format!("neg_map[{v},{q}]"));
            let from = self.negative_map[parent].clone();
            self.cnf.imply(&[from[0]], map[0]);
            match node.output.event {
                None => {
                    for q in 1..=c {
                        let ignore = self.reaction[q - 1][e][u][0];
                        self.cnf.imply_any(&[from[q]], &[map[q], map[0]]);
                        self.cnf.imply(&[map[q]], ignore);
                        self.cnf.imply(&[from[q], ignore], map[q]);
                    }
                }
                Some(o) => {
                    let pattern: Vec<(bool, bool)> =
                        parent_out.iter().copied().zip(node.output.output.iter().copied()).collect();
                    for to in 1..=c {
                        let ok = self.output_match(to - 1, o, &pattern);
                        self.cnf.imply(&[map[to]], ok);
                        for q in 1..=c {
                            let delta = self.reaction[q - 1][e][u][to];
                            self.cnf.imply(&[from[q], map[to]], delta);
                            self.cnf.imply(&[from[q], delta, ok], map[to]);
                        }
                    }
                }
            }
            self.negative_map.push(map);
        }
        for &(end, start) in &update.new_back_edges {
            let tree = self.negative.tree();
            if tree.node(end).output.output != tree.node(start).output.output {
                // outputs differ, so the lasso can never close
                continue;
            }
            for q in 1..=c {
                let (a, b) = (self.negative_map[end][q], self.negative_map[start][q]);
                self.cnf.clause(&[!a, !b]);
            }
        }
        if self.params.unmap_loopless_ends {
            for &end in &update.new_ends {
                let unmapped = self.negative_map[end][0];
                self.cnf.clause(&[unmapped]);
            }
        }
    }

    /// Literal for "state q emits event o and its algorithm turns each old
    /// output bit into the new one as listed in `pattern`".
    fn output_match(&mut self, q: usize, o: usize, pattern: &[(bool, bool)]) -> Lit {
        let key = (q, o, pattern.to_vec());
        if let Some(&l) = self.output_match.get(&key) {
            return l;
        }
        let mut lits = vec![self.output_event[q][o + 1]];
        for (z, &(before, after)) in pattern.iter().enumerate() {
            lits.push(self.algorithm[q][z][before as usize].with_sign(after));
        }
        let l = self.cnf.and_gate(&lits, || format!("out_match[{q},{o}]"));
        self.output_match.insert(key, l);
        l
    }
}
