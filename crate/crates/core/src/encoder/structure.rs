use super::Encoder;
use crate::sat::Lit;

impl Encoder {
    pub(super) fn encode_structure(&mut self) {
        let c = self.params.states;
        let k = self.k;
        let n_out = self.alphabet.output_events.len();
        let n_in = self.alphabet.input_events.len();
        for q in 0..c {
            let ose = self.cnf.domain(n_out + 1, |o| format!("ose[{q},{o}]"));
            self.output_event.push(ose);
            let alg = (0..self.alphabet.num_outputs())
                .map(|z| [false, true].map(|b| self.cnf.var(|| format!("alg[{q},{z},{}]", b as u8))))
                .collect();
            self.algorithm.push(alg);

            let mut dests = Vec::with_capacity(k);
            let mut events = Vec::with_capacity(k);
            for t in 0..k {
                dests.push(self.cnf.domain(c + 1, |d| format!("dest[{q},{t},{d}]")));
                events.push(self.cnf.domain(n_in + 1, |e| format!("tie[{q},{t},{e}]")));
            }
            for t in 0..k {
                // null transitions come last and carry no event
                if t + 1 < k {
                    self.cnf.imply(&[dests[t][0]], dests[t + 1][0]);
                }
                self.cnf.clause(&[!dests[t][0], events[t][0]]);
                self.cnf.clause(&[dests[t][0], !events[t][0]]);
            }
            self.dest.push(dests);
            self.event.push(events);
            self.fires.push(vec![Vec::new(); k]);
            self.fires_on.push(vec![vec![Vec::new(); n_in]; k]);
            self.first_fired.push(vec![Vec::new(); n_in]);
            self.reaction.push(vec![Vec::new(); n_in]);
        }
        // A taken transition always emits an event, so every ε output in a
        // trace means the input was ignored.
        for q in 0..c {
            for t in 0..k {
                for to in 1..=c {
                    let silent = self.output_event[to - 1][0];
                    self.cnf.clause(&[!self.dest[q][t][to], !silent]);
                }
            }
        }
    }

    /// Index of `input` among tree inputs, declaring every per-input family
    /// the first time it is seen.
    pub(super) fn input(&mut self, input: &[bool]) -> usize {
        if let Some(&u) = self.input_index.get(input) {
            return u;
        }
        let u = self.inputs.len();
        self.inputs.push(input.to_vec());
        self.input_index.insert(input.to_vec(), u);
        self.encode_input(u);
        u
    }

    fn encode_input(&mut self, u: usize) {
        let c = self.params.states;
        let k = self.k;
        let n_in = self.alphabet.input_events.len();
        if self.params.guard_nodes.is_some() {
            self.encode_guard_values(u);
        }
        for q in 0..c {
            for t in 0..k {
                let fires = if self.params.guard_nodes.is_some() {
                    self.guards[q][t].value[0][u]
                } else {
                    self.cnf.var(|| format!("fires[{q},{t},{u}]"))
                };
                self.cnf.clause(&[!self.dest[q][t][0], !fires]);
                self.fires[q][t].push(fires);
                for e in 0..n_in {
                    // With a single event every non-null transition carries it.
                    let on = if n_in == 1 {
                        fires
                    } else {
                        let tie = self.event[q][t][e + 1];
                        self.cnf.and_gate(&[tie, fires], || format!("fires_on[{q},{t},{e},{u}]"))
                    };
                    self.fires_on[q][t][e].push(on);
                }
            }
            for e in 0..n_in {
                let on: Vec<Lit> = (0..k).map(|t| self.fires_on[q][t][e][u]).collect();
                let ff = self.cnf.domain(k + 1, |i| format!("first_fired[{q},{e},{u},{i}]"));
                for i in 0..k {
                    self.cnf.clause(&[!ff[0], !on[i]]);
                    self.cnf.imply(&[ff[i + 1]], on[i]);
                    for &earlier in &on[..i] {
                        self.cnf.clause(&[!ff[i + 1], !earlier]);
                    }
                    let mut c: Vec<Lit> = vec![!on[i], ff[i + 1]];
                    c.extend_from_slice(&on[..i]);
                    self.cnf.clause(&c);
                }
                let mut none_fired = on.clone();
                none_fired.push(ff[0]);
                self.cnf.clause(&none_fired);

                let delta = self.cnf.domain(c + 1, |d| format!("reaction[{q},{e},{u},{d}]"));
                self.cnf.imply(&[ff[0]], delta[0]);
                for i in 0..k {
                    for to in 1..=c {
                        self.cnf.imply(&[ff[i + 1], self.dest[q][i][to]], delta[to]);
                    }
                }
                self.first_fired[q][e].push(ff);
                self.reaction[q][e].push(delta);
            }
        }
    }
}
