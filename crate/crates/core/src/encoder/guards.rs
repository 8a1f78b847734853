use super::{Encoder, GuardTree, AND, NONE, NOT, OR, TERMINAL};
use crate::sat::Lit;

impl Encoder {
    pub(super) fn encode_guard_structure(&mut self) {
        let nodes = self.params.guard_nodes.expect("parse trees enabled");
        let n_vars = self.alphabet.num_inputs();
        for q in 0..self.params.states {
            let mut row = Vec::with_capacity(self.k);
            for t in 0..self.k {
                let mut g = GuardTree {
                    kind: Vec::with_capacity(nodes),
                    var: Vec::with_capacity(nodes),
                    parent: Vec::with_capacity(nodes),
                    child: Vec::with_capacity(nodes),
                    value: vec![Vec::new(); nodes],
                };
                for p in 1..=nodes {
                    let kind = self.cnf.domain(5, |i| format!("node_kind[{q},{t},{p},{i}]"));
                    g.kind.push([kind[0], kind[1], kind[2], kind[3], kind[4]]);
                    g.var.push(self.cnf.domain(n_vars + 1, |x| format!("node_var[{q},{t},{p},{x}]")));
                    g.parent.push(if p == 1 {
                        Vec::new()
                    } else {
                        self.cnf.domain(p, |i| format!("node_parent[{q},{t},{p},{i}]"))
                    });
                    g.child.push(self.cnf.domain(nodes - p + 1, |i| {
                        let c = if i == 0 { 0 } else { p + i };
                        format!("node_child[{q},{t},{p},{c}]")
                    }));
                }
                self.constrain_tree(&g, self.dest[q][t][0]);
                row.push(g);
            }
            self.guards.push(row);
        }
    }

    fn constrain_tree(&mut self, g: &GuardTree, null: Lit) {
        let nodes = g.nodes();
        for p in 1..=nodes {
            let kind = g.kind[p - 1];
            let var = &g.var[p - 1];
            // terminal ⇔ has a variable
            self.cnf.clause(&[!kind[TERMINAL], !var[0]]);
            self.cnf.clause(&[var[0], kind[TERMINAL]]);

            let no_child = g.child_is(p, 0);
            self.cnf.imply(&[kind[TERMINAL]], no_child);
            self.cnf.imply(&[kind[NONE]], no_child);
            for op in [AND, OR, NOT] {
                self.cnf.clause(&[!kind[op], !no_child]);
            }
            for c in p + 1..=nodes {
                let ch = g.child_is(p, c);
                self.cnf.imply(&[ch], g.parent_is(c, p));
                if c < nodes {
                    for op in [AND, OR] {
                        self.cnf.imply(&[kind[op], ch], g.parent_is(c + 1, p));
                    }
                } else {
                    self.cnf.clause(&[!kind[AND], !ch]);
                    self.cnf.clause(&[!kind[OR], !ch]);
                }
            }
            // a node claimed as a child is the left or the right one
            for c in p + 1..=nodes {
                let is_parent = g.parent_is(c, p);
                let left = g.child_is(p, c);
                if c - 1 > p {
                    let right_of = g.child_is(p, c - 1);
                    self.cnf.imply_any(&[is_parent], &[left, right_of]);
                    self.cnf.imply_any(&[is_parent, right_of], &[kind[AND], kind[OR]]);
                } else {
                    self.cnf.imply(&[is_parent], left);
                }
            }
            if p == 1 {
                self.cnf.clause(&[!kind[NONE], null]);
                self.cnf.clause(&[!null, kind[NONE]]);
            } else {
                let orphan = g.parent_is(p, 0);
                self.cnf.clause(&[!orphan, kind[NONE]]);
                self.cnf.clause(&[!kind[NONE], orphan]);
                self.cnf.imply(&[null], kind[NONE]);
            }
            if p == nodes {
                for op in [AND, OR, NOT] {
                    self.cnf.clause(&[!kind[op]]);
                }
            } else if p + 1 == nodes {
                self.cnf.clause(&[!kind[AND]]);
                self.cnf.clause(&[!kind[OR]]);
            }
        }
    }

    /// Node values on the input with index `u`, for every guard.
    pub(super) fn encode_guard_values(&mut self, u: usize) {
        let nodes = self.params.guard_nodes.expect("parse trees enabled");
        let input = self.inputs[u].clone();
        for q in 0..self.params.states {
            for t in 0..self.k {
                let values: Vec<Lit> =
                    (1..=nodes).map(|p| self.cnf.var(|| format!("node_value[{q},{t},{p},{u}]"))).collect();
                let g = &self.guards[q][t];
                let mut clauses: Vec<Vec<Lit>> = Vec::new();
                for p in 1..=nodes {
                    let kind = g.kind[p - 1];
                    let v = values[p - 1];
                    for (x, &bit) in input.iter().enumerate() {
                        clauses.push(vec![!g.var[p - 1][x + 1], v.with_sign(bit)]);
                    }
                    clauses.push(vec![!kind[NONE], !v]);
                    for c in p + 1..=nodes {
                        let ch = g.child_is(p, c);
                        let a = values[c - 1];
                        clauses.push(vec![!kind[NOT], !ch, !v, !a]);
                        clauses.push(vec![!kind[NOT], !ch, v, a]);
                        if c < nodes {
                            let b = values[c];
                            clauses.push(vec![!kind[AND], !ch, !v, a]);
                            clauses.push(vec![!kind[AND], !ch, !v, b]);
                            clauses.push(vec![!kind[AND], !ch, v, !a, !b]);
                            clauses.push(vec![!kind[OR], !ch, v, !a]);
                            clauses.push(vec![!kind[OR], !ch, v, !b]);
                            clauses.push(vec![!kind[OR], !ch, !v, a, b]);
                        }
                    }
                }
                for c in &clauses {
                    self.cnf.clause(c);
                }
                for (p, v) in values.into_iter().enumerate() {
                    self.guards[q][t].value[p].push(v);
                }
            }
        }
    }
}
