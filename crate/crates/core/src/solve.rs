//! Depth-first SLD resolution with negation as failure.
//!
//! Goals are selected left to right and clauses tried in source order.
//! Answers come out lazily; asking for the next one backtracks into the
//! most recent choice point.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::ArithError;
use crate::builtins::{self, Ctx, Outcome};
use crate::clause::{Clause, ClauseId, Literal, LiteralKind};
use crate::kb::KnowledgeBase;
use crate::subst::{rename_apart, undo, unify_in_place, Bindings, VarGen};
use crate::term::{PredKey, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resource {
    Depth,
    Steps,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::Depth => "depth",
            Resource::Steps => "step",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{resource} limit of {limit} exceeded at `{goal}`")]
    ResourceExhausted { resource: Resource, limit: u64, goal: String },
    #[error("negated goal `{0}` is not ground when selected")]
    NonGroundNegation(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(PredKey),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("instantiation error in `{0}`")]
    Instantiation(String),
    #[error("type error: {0}")]
    Type(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveLimits {
    /// Longest chain of nested clause resolutions.
    pub max_depth: usize,
    /// Total inference steps, counted across negation and aggregate sub-proofs.
    pub max_steps: u64,
    pub max_solutions: Option<usize>,
    pub occurs_check: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_depth: 10_000, max_steps: 5_000_000, max_solutions: None, occurs_check: false }
    }
}

/// One answer: bindings of the query's named variables and the clauses
/// used to derive it, in the order they were resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub bindings: Bindings,
    pub proof: Vec<ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Via {
    Clause(Option<ClauseId>),
    Builtin,
    /// Negated goal whose sub-proof failed, so the negation holds.
    NegationHolds,
}

impl fmt::Display for Via {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Via::Clause(Some(id)) => write!(f, "{id}"),
            Via::Clause(None) => write!(f, "<anonymous>"),
            Via::Builtin => write!(f, "builtin"),
            Via::NegationHolds => write!(f, "negation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub depth: usize,
    pub goal: Term,
    pub via: Via,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}{}\t{}", self.depth, "  ".repeat(self.depth.min(40)), self.goal, self.via)
    }
}

pub(crate) struct Shared {
    pub(crate) limits: SolveLimits,
    steps: Cell<u64>,
    pub(crate) vars: VarGen,
    trace: Option<RefCell<Vec<TraceStep>>>,
}

#[derive(Clone)]
struct Goal {
    lit: Literal,
    depth: usize,
}

struct Node {
    goal: Goal,
    next: GoalList,
}

type GoalList = Option<Rc<Node>>;

struct ProofNode {
    id: Option<ClauseId>,
    prev: ProofList,
}

type ProofList = Option<Rc<ProofNode>>;

enum Alternatives {
    Clauses { clauses: Arc<Vec<Arc<Clause>>>, next: usize },
    Unifiers { options: Vec<Vec<(Term, Term)>>, next: usize },
}

struct ChoicePoint {
    alt: Alternatives,
    goal: Goal,
    rest: GoalList,
    proof: ProofList,
    trail_len: usize,
}

#[derive(PartialEq, Eq)]
enum State {
    Fresh,
    Yielded,
    Done,
}

/// Lazy iterator over the answers to a query.
pub struct Solver<'kb> {
    kb: &'kb KnowledgeBase,
    shared: Rc<Shared>,
    bindings: Bindings,
    trail: Vec<Var>,
    goals: GoalList,
    proof: ProofList,
    choices: Vec<ChoicePoint>,
    answer_vars: Vec<Var>,
    state: State,
    found: usize,
    max_solutions: Option<usize>,
}

fn push_all(lits: &[Literal], depth: usize, tail: GoalList) -> GoalList {
    lits.iter().rev().fold(tail, |next, lit| Some(Rc::new(Node { goal: Goal { lit: lit.clone(), depth }, next })))
}

impl<'kb> Solver<'kb> {
    pub fn new(kb: &'kb KnowledgeBase, query: &[Literal], limits: SolveLimits) -> Self {
        Solver::start(kb, query, limits, false)
    }

    /// As [`Solver::new`], also recording every resolution step.
    pub fn traced(kb: &'kb KnowledgeBase, query: &[Literal], limits: SolveLimits) -> Self {
        Solver::start(kb, query, limits, true)
    }

    fn start(kb: &'kb KnowledgeBase, query: &[Literal], limits: SolveLimits, trace: bool) -> Self {
        let shared = Rc::new(Shared {
            limits,
            steps: Cell::new(0),
            vars: VarGen::avoiding(query.iter().map(|l| &l.goal)),
            trace: trace.then(|| RefCell::new(Vec::new())),
        });
        let mut answer_vars = Vec::new();
        for lit in query {
            lit.goal.collect_vars(&mut answer_vars);
        }
        answer_vars.retain(|v| !v.is_hidden());
        Solver::with_shared(kb, shared, query, answer_vars, 0, limits.max_solutions)
    }

    fn with_shared(
        kb: &'kb KnowledgeBase,
        shared: Rc<Shared>,
        query: &[Literal],
        answer_vars: Vec<Var>,
        depth: usize,
        max_solutions: Option<usize>,
    ) -> Self {
        Solver {
            kb,
            shared,
            bindings: Bindings::new(),
            trail: Vec::new(),
            goals: push_all(query, depth, None),
            proof: None,
            choices: Vec::new(),
            answer_vars,
            state: State::Fresh,
            found: 0,
            max_solutions,
        }
    }

    /// Steps recorded so far; empty unless built with [`Solver::traced`].
    pub fn trace(&self) -> Vec<TraceStep> {
        self.shared.trace.as_ref().map(|t| t.borrow().clone()).unwrap_or_default()
    }

    /// Inference steps taken so far, sub-proofs included.
    pub fn steps(&self) -> u64 {
        self.shared.steps.get()
    }

    fn record(&self, depth: usize, goal: &Term, via: Via) {
        if let Some(t) = &self.shared.trace {
            t.borrow_mut().push(TraceStep { depth, goal: self.bindings.apply(goal), via });
        }
    }

    fn tick(&self, goal: &Goal) -> Result<(), SolveError> {
        let limits = &self.shared.limits;
        let n = self.shared.steps.get() + 1;
        self.shared.steps.set(n);
        let exhausted = |resource, limit| SolveError::ResourceExhausted {
            resource,
            limit,
            goal: self.bindings.apply(&goal.lit.goal).to_string(),
        };
        if n > limits.max_steps {
            return Err(exhausted(Resource::Steps, limits.max_steps));
        }
        if goal.depth > limits.max_depth {
            return Err(exhausted(Resource::Depth, limits.max_depth as u64));
        }
        Ok(())
    }

    fn run(&mut self) -> Result<bool, SolveError> {
        loop {
            let Some(node) = self.goals.clone() else { return Ok(true) };
            if !self.step(node.goal.clone(), node.next.clone())? && !self.backtrack()? {
                return Ok(false);
            }
        }
    }

    fn backtrack(&mut self) -> Result<bool, SolveError> {
        while !self.choices.is_empty() {
            if self.retry()? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn step(&mut self, goal: Goal, rest: GoalList) -> Result<bool, SolveError> {
        self.tick(&goal)?;
        let term = self.bindings.walk(&goal.lit.goal).clone();
        if let Term::Var(_) = term {
            return Err(SolveError::Instantiation(term.to_string()));
        }
        let Some(key) = term.pred_key() else {
            return Err(SolveError::Type(format!("`{term}` is not callable")));
        };

        if goal.lit.negated {
            let g = self.bindings.apply(&term);
            if g.vars().iter().any(|v| !goal.lit.locals().contains(v)) {
                return Err(SolveError::NonGroundNegation(g.to_string()));
            }
            let sub = Literal::positive(g.clone());
            let provable = Solver::with_shared(
                self.kb,
                self.shared.clone(),
                std::slice::from_ref(&sub),
                Vec::new(),
                goal.depth + 1,
                Some(1),
            )
            .next()
            .transpose()?
            .is_some();
            if provable {
                return Ok(false);
            }
            self.record(goal.depth, &term, Via::NegationHolds);
            self.goals = rest;
            return Ok(true);
        }

        if goal.lit.kind == LiteralKind::Builtin {
            let mark = self.trail.len();
            let selected = self.shared.trace.is_some().then(|| self.bindings.apply(&term));
            let outcome = builtins::call(
                &mut Ctx {
                    kb: self.kb,
                    shared: &self.shared,
                    bindings: &mut self.bindings,
                    trail: &mut self.trail,
                    depth: goal.depth,
                },
                &term,
            )?;
            return Ok(match outcome {
                Outcome::Fail => {
                    undo(&mut self.bindings, &mut self.trail, mark);
                    false
                }
                Outcome::True => {
                    if let (Some(t), Some(g)) = (&self.shared.trace, selected) {
                        t.borrow_mut().push(TraceStep { depth: goal.depth, goal: g, via: Via::Builtin });
                    }
                    self.goals = rest;
                    true
                }
                Outcome::Choices(options) => {
                    self.choices.push(ChoicePoint {
                        alt: Alternatives::Unifiers { options, next: 0 },
                        goal,
                        rest,
                        proof: self.proof.clone(),
                        trail_len: mark,
                    });
                    self.retry()?
                }
            });
        }

        let clauses = match self.kb.clauses(&key) {
            Some(c) => c.clone(),
            None if self.kb.is_dynamic(&key) => return Ok(false),
            None => return Err(SolveError::UnknownPredicate(key)),
        };
        self.choices.push(ChoicePoint {
            alt: Alternatives::Clauses { clauses, next: 0 },
            goal,
            rest,
            proof: self.proof.clone(),
            trail_len: self.trail.len(),
        });
        self.retry()
    }

    /// Try the remaining alternatives of the newest choice point, popping it
    /// once they run out.
    fn retry(&mut self) -> Result<bool, SolveError> {
        let occurs = self.shared.limits.occurs_check;
        loop {
            let cp = self.choices.last_mut().expect("retry needs a choice point");
            undo(&mut self.bindings, &mut self.trail, cp.trail_len);
            match &mut cp.alt {
                Alternatives::Clauses { clauses, next } => {
                    let Some(clause) = clauses.get(*next).cloned() else {
                        self.choices.pop();
                        return Ok(false);
                    };
                    *next += 1;
                    let last = *next == clauses.len();
                    if !may_match(&clause.head, &cp.goal.lit.goal, &self.bindings) {
                        continue;
                    }
                    let selected = self.shared.trace.is_some().then(|| self.bindings.apply(&cp.goal.lit.goal));
                    let renamed = rename_apart(&clause, &self.shared.vars);
                    if !unify_in_place(&mut self.bindings, &mut self.trail, &renamed.head, &cp.goal.lit.goal, occurs) {
                        continue;
                    }
                    let depth = cp.goal.depth;
                    self.goals = push_all(&renamed.body, depth + 1, cp.rest.clone());
                    self.proof = Some(Rc::new(ProofNode { id: clause.id.clone(), prev: cp.proof.clone() }));
                    if let (Some(t), Some(goal)) = (&self.shared.trace, selected) {
                        t.borrow_mut().push(TraceStep { depth, goal, via: Via::Clause(clause.id.clone()) });
                    }
                    if last {
                        self.choices.pop();
                    }
                    return Ok(true);
                }
                Alternatives::Unifiers { options, next } => {
                    let Some(pairs) = options.get(*next).cloned() else {
                        self.choices.pop();
                        return Ok(false);
                    };
                    *next += 1;
                    let last = *next == options.len();
                    if !pairs.iter().all(|(a, b)| unify_in_place(&mut self.bindings, &mut self.trail, a, b, occurs)) {
                        continue;
                    }
                    let (depth, goal) = (cp.goal.depth, cp.goal.lit.goal.clone());
                    self.goals = cp.rest.clone();
                    self.proof = cp.proof.clone();
                    if last {
                        self.choices.pop();
                    }
                    self.record(depth, &goal, Via::Builtin);
                    return Ok(true);
                }
            }
        }
    }

    fn answer(&self) -> Solution {
        let mut proof = Vec::new();
        let mut cur = &self.proof;
        while let Some(node) = cur {
            if let Some(id) = &node.id {
                proof.push(id.clone());
            }
            cur = &node.prev;
        }
        proof.reverse();
        Solution { bindings: self.bindings.restrict(&self.answer_vars), proof }
    }
}

impl Iterator for Solver<'_> {
    type Item = Result<Solution, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        let outcome = match self.state {
            State::Done => return None,
            State::Fresh => self.run(),
            State::Yielded => {
                if self.max_solutions.is_some_and(|m| self.found >= m) {
                    self.state = State::Done;
                    return None;
                }
                self.backtrack().and_then(|more| if more { self.run() } else { Ok(false) })
            }
        };
        match outcome {
            Ok(true) => {
                self.found += 1;
                self.state = State::Yielded;
                Some(Ok(self.answer()))
            }
            Ok(false) => {
                self.state = State::Done;
                None
            }
            Err(e) => {
                self.state = State::Done;
                Some(Err(e))
            }
        }
    }
}

/// Cheap pre-unification test: two distinct constants in the same argument
/// position can never unify.
fn may_match(head: &Term, goal: &Term, b: &Bindings) -> bool {
    let (Term::Compound(h), Term::Compound(g)) = (head, b.walk(goal)) else { return true };
    h.args().iter().zip(g.args()).all(|(x, y)| match (x, b.walk(y)) {
        (Term::Var(_), _) | (_, Term::Var(_)) => true,
        (Term::Compound(p), Term::Compound(q)) => p.functor() == q.functor() && p.arity() == q.arity(),
        (Term::Compound(_), _) | (_, Term::Compound(_)) => false,
        (x, y) => x == y,
    })
}

/// Every answer of a nested goal, with each variable of `goal` resolved.
/// Used by the aggregate builtins; shares the step budget and variable
/// supply with the enclosing proof.
pub(crate) fn sub_solutions(
    kb: &KnowledgeBase,
    shared: &Rc<Shared>,
    goal: &Term,
    depth: usize,
) -> Result<Vec<Bindings>, SolveError> {
    let vars = goal.vars();
    let lit = Literal::positive(goal.clone());
    Solver::with_shared(kb, shared.clone(), std::slice::from_ref(&lit), vars, depth, None).map(|r| r.map(|s| s.bindings)).collect()
}

/// All answers to `query`, failing on the first error.
pub fn solve_all(kb: &KnowledgeBase, query: &[Literal], limits: SolveLimits) -> Result<Vec<Solution>, SolveError> {
    Solver::new(kb, query, limits).collect()
}

/// First answer to a single goal, if any.
pub fn prove(kb: &KnowledgeBase, goal: &Term, limits: SolveLimits) -> Result<Option<Solution>, SolveError> {
    let lit = Literal::positive(goal.clone());
    Solver::new(kb, std::slice::from_ref(&lit), SolveLimits { max_solutions: Some(1), ..limits }).next().transpose()
}
