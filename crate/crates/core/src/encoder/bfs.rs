//! Symmetry breaking: states and parse-tree nodes are numbered in BFS order.

use super::{Encoder, NONE};
use crate::sat::Lit;

impl Encoder {
    pub(super) fn encode_state_bfs(&mut self) {
        let c = self.params.states;
        if c < 2 {
            return;
        }
        // edge[i][j] for i < j: some transition of state i leads to state j
        let mut edge = vec![Vec::new(); c];
        for i in 0..c {
            for j in 0..c {
                if i >= j {
                    edge[i].push(None);
                    continue;
                }
                let t = self.cnf.var(|| format!("bfs_edge[{i},{j}]"));
                let dests: Vec<Lit> = (0..self.k).map(|k| self.dest[i][k][j + 1]).collect();
                for &d in &dests {
                    self.cnf.imply(&[d], t);
                }
                self.cnf.imply_any(&[t], &dests);
                edge[i].push(Some(t));
            }
        }
        let edge = |i: usize, j: usize| edge[i][j].expect("i < j");
        // parent[j][i]: i is the lowest-numbered predecessor of j. States with
        // no lower-numbered predecessor have no parent, which keeps the
        // constraint sound when some states are unreachable.
        let mut parent: Vec<Vec<Lit>> = vec![Vec::new(); c];
        for j in 1..c {
            let row: Vec<Lit> = (0..j).map(|i| self.cnf.var(|| format!("bfs_parent[{j},{i}]"))).collect();
            self.cnf.at_most_one(&row);
            for i in 0..j {
                self.cnf.imply(&[row[i]], edge(i, j));
                for r in 0..i {
                    self.cnf.clause(&[!row[i], !edge(r, j)]);
                }
                let mut cl = vec![!edge(i, j), row[i]];
                cl.extend((0..i).map(|r| edge(r, j)));
                self.cnf.clause(&cl);
            }
            parent[j] = row;
        }
        for j in 1..c - 1 {
            for i in 0..j {
                for r in 0..i {
                    self.cnf.clause(&[!parent[j][i], !parent[j + 1][r]]);
                }
            }
        }
    }

    pub(super) fn encode_tree_bfs(&mut self) {
        let nodes = self.params.guard_nodes.expect("parse trees enabled");
        for q in 0..self.params.states {
            for t in 0..self.k {
                let mut clauses = Vec::new();
                let g = &self.guards[q][t];
                for j in 2..nodes {
                    clauses.push(vec![!g.kind[j - 1][NONE], g.kind[j][NONE]]);
                    for i in 1..j {
                        for r in 1..i {
                            clauses.push(vec![!g.parent_is(j, i), !g.parent_is(j + 1, r)]);
                        }
                    }
                }
                if nodes >= 2 {
                    clauses.push(vec![!g.kind[0][NONE], g.kind[1][NONE]]);
                }
                for c in &clauses {
                    self.cnf.clause(c);
                }
            }
        }
    }
}
