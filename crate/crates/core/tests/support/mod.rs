//! Random terms and random stratified programs with brute-force reference
//! semantics, shared by the property tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taxlog_core::{parse_query, Bindings, KnowledgeBase, SolveLimits, Solver, Term, Var};

pub const CONSTS: [&str; 3] = ["a", "b", "c"];
pub const VARS: [&str; 3] = ["X", "Y", "Z"];

#[derive(Clone, Debug)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn text(&self) -> String {
        if self.args.is_empty() {
            self.pred.clone()
        } else {
            format!("{}({})", self.pred, self.args.join(", "))
        }
    }
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub head: Atom,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

#[derive(Clone, Debug)]
pub struct Program {
    /// (name, arity) per layer; layer 0 holds the facts.
    pub layers: Vec<Vec<(String, usize)>>,
    pub facts: Vec<Atom>,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for f in &self.facts {
            s += &format!("{}.\n", f.text());
        }
        for r in &self.rules {
            let mut body: Vec<String> = r.pos.iter().map(Atom::text).collect();
            body.extend(r.neg.iter().map(|a| format!("\\+ {}", a.text())));
            s += &if body.is_empty() { format!("{}.\n", r.head.text()) } else { format!("{} :- {}.\n", r.head.text(), body.join(", ")) };
        }
        for layer in &self.layers {
            for (p, n) in layer {
                s += &format!(":- dynamic {p}/{n}.\n");
            }
        }
        s
    }

    pub fn preds(&self) -> impl Iterator<Item = &(String, usize)> {
        self.layers.iter().flatten()
    }
}

pub fn gen_program(seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_layers = rng.random_range(2..=4);
    let mut layers = Vec::new();
    let mut id = 0;
    for _ in 0..n_layers {
        let n = rng.random_range(1..=3);
        layers.push(
            (0..n)
                .map(|_| {
                    id += 1;
                    (format!("p{id}"), rng.random_range(0..=2))
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut facts = Vec::new();
    for (p, n) in &layers[0] {
        for _ in 0..rng.random_range(0..=5) {
            let args = (0..*n).map(|_| CONSTS[rng.random_range(0..3)].to_string()).collect();
            if !facts.iter().any(|f: &Atom| f.pred == *p && f.args == args) {
                facts.push(Atom { pred: p.clone(), args });
            }
        }
    }
    let term = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.7) {
            VARS[rng.random_range(0..3)].to_string()
        } else {
            CONSTS[rng.random_range(0..3)].to_string()
        }
    };
    let mut rules = Vec::new();
    for k in 1..layers.len() {
        let lower: Vec<(String, usize)> = layers[..k].iter().flatten().cloned().collect();
        for (p, n) in layers[k].clone() {
            for _ in 0..rng.random_range(1..=2) {
                let mut pos = Vec::new();
                for _ in 0..rng.random_range(1..=2) {
                    let (q, m) = lower.choose(&mut rng).unwrap().clone();
                    pos.push(Atom { pred: q, args: (0..m).map(|_| term(&mut rng)).collect() });
                }
                let bound: Vec<String> = pos.iter().flat_map(|a| a.args.clone()).filter(|a| VARS.contains(&a.as_str())).collect();
                let safe = |rng: &mut ChaCha8Rng| {
                    if !bound.is_empty() && rng.random_bool(0.7) {
                        bound.choose(rng).unwrap().clone()
                    } else {
                        CONSTS[rng.random_range(0..3)].to_string()
                    }
                };
                let mut neg = Vec::new();
                for _ in 0..rng.random_range(0..=2) {
                    let (q, m) = lower.choose(&mut rng).unwrap().clone();
                    neg.push(Atom { pred: q, args: (0..m).map(|_| safe(&mut rng)).collect() });
                }
                let head = Atom { pred: p.clone(), args: (0..n).map(|_| safe(&mut rng)).collect() };
                rules.push(Rule { head, pos, neg });
            }
        }
    }
    Program { layers, facts, rules }
}

pub type Model = BTreeSet<(String, Vec<String>)>;

pub fn ground(a: &Atom, env: &HashMap<&str, &str>) -> (String, Vec<String>) {
    (a.pred.clone(), a.args.iter().map(|x| env.get(x.as_str()).map_or(x.clone(), |c| c.to_string())).collect())
}

/// Layer-by-layer evaluation, trying every assignment of constants to the
/// three variables.
pub fn bottom_up(p: &Program) -> Model {
    let mut model: Model = p.facts.iter().map(|f| (f.pred.clone(), f.args.clone())).collect();
    for layer in &p.layers[1..] {
        let names: BTreeSet<&String> = layer.iter().map(|(n, _)| n).collect();
        let mut derived = Vec::new();
        for r in p.rules.iter().filter(|r| names.contains(&r.head.pred)) {
            for i in 0..27 {
                let env: HashMap<&str, &str> = VARS.iter().enumerate().map(|(k, v)| (*v, CONSTS[(i / 3usize.pow(k as u32)) % 3])).collect();
                if r.pos.iter().all(|a| model.contains(&ground(a, &env))) && r.neg.iter().all(|a| !model.contains(&ground(a, &env))) {
                    derived.push(ground(&r.head, &env));
                }
            }
        }
        model.extend(derived);
    }
    model
}

pub fn kb_of(p: &Program) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    kb.consult_str(&p.text(), "gen.pl").expect("generated program loads");
    kb
}

pub fn open_query(pred: &str, arity: usize) -> String {
    if arity == 0 {
        pred.to_string()
    } else {
        format!("{pred}({})", (0..arity).map(|i| format!("A{i}")).collect::<Vec<_>>().join(", "))
    }
}

pub fn sld_answers(kb: &KnowledgeBase, pred: &str, arity: usize) -> BTreeSet<Vec<String>> {
    let q = parse_query(&open_query(pred, arity)).unwrap();
    Solver::new(kb, &q, SolveLimits::default())
        .map(|s| {
            let s = s.expect("no solver error on safe programs");
            (0..arity).map(|i| s.bindings.value(&format!("A{i}")).expect("answers are ground").to_string()).collect()
        })
        .collect()
}

/// A random term over `X`, `Y`, `Z`, `a`, `b`, `0..3`, `f/1` and `g/2`.
pub fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    let leaf = depth == 0 || rng.random_bool(0.4);
    if leaf {
        return match rng.random_range(0..3) {
            0 => Term::var(VARS[rng.random_range(0..3)]),
            1 => Term::atom(["a", "b"][rng.random_range(0..2)]),
            _ => Term::int(rng.random_range(0..3)),
        };
    }
    if rng.random_bool(0.5) {
        Term::app("f", vec![random_term(rng, depth - 1)])
    } else {
        Term::app("g", vec![random_term(rng, depth - 1), random_term(rng, depth - 1)])
    }
}

/// Small ground universe for brute-force substitutions.
pub fn universe() -> Vec<Term> {
    let mut u = vec![Term::atom("a"), Term::atom("b"), Term::int(0), Term::int(1)];
    let base = u.clone();
    for x in &base {
        u.push(Term::app("f", vec![x.clone()]));
    }
    for x in &base[..2] {
        for y in &base[..2] {
            u.push(Term::app("g", vec![x.clone(), y.clone()]));
        }
    }
    u
}

/// Every map from the three term variables into `universe()`.
pub fn ground_substitutions() -> impl Iterator<Item = Bindings> {
    let u = universe();
    let n = u.len();
    (0..n * n * n).map(move |i| {
        let mut b = Bindings::new();
        for (k, v) in VARS.iter().enumerate() {
            let idx = (i / n.pow(k as u32)) % n;
            b.insert(Var::new(*v), u[idx].clone());
        }
        b
    })
}
