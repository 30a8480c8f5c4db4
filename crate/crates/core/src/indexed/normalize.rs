//! Normal form: push, pop, output, split and terminal productions.

use std::collections::BTreeSet;

use super::{IndexedGrammar, Production, Rule, Sym};

impl IndexedGrammar {
    /// Equivalent grammar in normal form.  Existing nonterminals keep their
    /// ids; helpers are appended.
    pub fn normalize(&self) -> IndexedGrammar {
        let mut out = self.clone();
        out.productions.clear();
        let mut taken = BTreeSet::new();
        let mut fresh = |out: &mut IndexedGrammar| {
            let name = self.fresh_name("_N", &taken);
            taken.insert(name.clone());
            out.nonterminal(&name)
        };
        for p in &self.productions {
            if p.shape().is_some() {
                out.productions.push(p.clone());
                continue;
            }
            let (lhs, w) = match &p.rule {
                Rule::Pop(f, w) => {
                    let z = fresh(&mut out);
                    out.add_production(p.lhs, Rule::Pop(*f, vec![Sym::N(z)]));
                    let q = Production {
                        lhs: z,
                        rule: Rule::Plain(w.clone()),
                    };
                    if q.shape().is_some() {
                        out.productions.push(q);
                        continue;
                    }
                    (z, w)
                }
                Rule::Plain(w) => (p.lhs, w),
                Rule::Push(..) => unreachable!(),
            };
            // w = u₀ B₁ u₁ ⋯ B_k u_k with k ≥ 2: glue u₀ and u_i to B_i.
            let mut segments: Vec<Vec<Sym>> = Vec::new();
            let mut pending: Vec<Sym> = Vec::new();
            for s in w {
                match s {
                    Sym::T(_) if segments.is_empty() => pending.push(*s),
                    Sym::T(_) => segments.last_mut().unwrap().push(*s),
                    Sym::N(_) => {
                        pending.push(*s);
                        segments.push(std::mem::take(&mut pending));
                    }
                }
            }
            let mut parts: Vec<Sym> = Vec::new();
            for seg in segments {
                if seg.len() == 1 {
                    parts.push(seg[0]);
                } else {
                    let z = fresh(&mut out);
                    out.add_production(z, Rule::Plain(seg));
                    parts.push(Sym::N(z));
                }
            }
            let mut cur = lhs;
            while parts.len() > 2 {
                let head = parts.remove(0);
                let z = fresh(&mut out);
                out.add_production(cur, Rule::Plain(vec![head, Sym::N(z)]));
                cur = z;
            }
            out.add_production(cur, Rule::Plain(parts));
        }
        out
    }
}
