use std::collections::{BTreeMap, BTreeSet};

use crate::term_graph::{Bindings, Graph, PatternTerm, Term, Triple, TriplePattern};

use super::builtins::{evaluate, GeomCache};
use super::{BuiltinCall, Rule, RuleError, RuleSet};

/// The first derivation found for a derived triple.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub rule: String,
    pub bindings: Bindings,
    /// Instantiated body patterns.
    pub premises: Vec<Triple>,
    /// Semi-naive round in which the triple first appeared (1-based).
    pub round: usize,
}

/// A fixpoint graph plus one derivation per derived triple.
#[derive(Debug, Clone, PartialEq)]
pub struct Materialized {
    pub graph: Graph,
    derivations: BTreeMap<Triple, Derivation>,
}

/// One node of a flattened derivation tree, in pre-order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub depth: usize,
    pub conclusion: Triple,
    pub rule: String,
    pub bindings: Bindings,
    pub premises: Vec<Triple>,
}

impl std::fmt::Display for TraceStep {
    /// `conclusion <= rule {bindings}`, indented two spaces per level.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:indent$}{} <= {} {}", "", self.conclusion, self.rule, fmt_bindings(&self.bindings), indent = 2 * self.depth)
    }
}

impl Materialized {
    pub fn derivation(&self, t: &Triple) -> Option<&Derivation> {
        self.derivations.get(t)
    }

    /// Triples added by the rules, excluding the input facts.
    pub fn derived(&self) -> Graph {
        self.derivations.keys().cloned().collect()
    }

    pub fn explain(&self, t: &Triple) -> Result<Vec<TraceStep>, RuleError> {
        if !self.graph.contains(t) {
            return Err(RuleError::NotInGraph(t.to_string()));
        }
        let mut out = Vec::new();
        self.trace(t, 0, &mut out);
        Ok(out)
    }

    fn trace(&self, t: &Triple, depth: usize, out: &mut Vec<TraceStep>) {
        let Some(d) = self.derivations.get(t) else { return };
        out.push(TraceStep {
            depth,
            conclusion: t.clone(),
            rule: d.rule.clone(),
            bindings: d.bindings.clone(),
            premises: d.premises.clone(),
        });
        for p in &d.premises {
            self.trace(p, depth + 1, out);
        }
    }
}

/// Derivation trace of `t`; empty for input facts.
pub fn explain(m: &Materialized, t: &Triple) -> Result<Vec<TraceStep>, RuleError> {
    m.explain(t)
}

/// Least fixpoint of `graph` under `rules`.
pub fn reason(graph: &Graph, rules: &RuleSet) -> Result<Graph, RuleError> {
    reason_with_provenance(graph, rules).map(|m| m.graph)
}

/// Semi-naive forward chaining that also records the first derivation of each new triple
/// (earliest round, then rule order).
pub fn reason_with_provenance(graph: &Graph, rules: &RuleSet) -> Result<Materialized, RuleError> {
    let plans: Vec<Vec<JoinPlan>> = rules.rules().iter().map(JoinPlan::all_for).collect();
    let mut all = graph.clone();
    let mut delta = graph.clone();
    let mut derivations = BTreeMap::new();
    let mut cache = GeomCache::default();
    let mut round = 0;
    while !delta.is_empty() {
        round += 1;
        let mut fresh = Graph::new();
        for (rule, rule_plans) in rules.rules().iter().zip(&plans) {
            let mut matches = BTreeSet::new();
            for plan in rule_plans {
                plan.run(rule, &all, &delta, &mut cache, &mut matches)?;
            }
            for b in matches {
                for h in rule.head() {
                    let Some(t) = h.instantiate(&b) else { continue };
                    if all.contains(&t) || fresh.contains(&t) {
                        continue;
                    }
                    let premises = rule.patterns().filter_map(|p| p.instantiate(&b)).collect();
                    derivations.insert(
                        t.clone(),
                        Derivation { rule: rule.name().to_string(), bindings: b.clone(), premises, round },
                    );
                    fresh.insert(t);
                }
            }
        }
        all.extend(fresh.iter().cloned());
        delta = fresh;
    }
    Ok(Materialized { graph: all, derivations })
}

/// Evaluation order for one rule with pattern `seed` matched against the delta.
struct JoinPlan {
    order: Vec<usize>,
    /// Built-ins to check after each step, by index into `Rule::builtins`.
    checks: Vec<Vec<usize>>,
}

impl JoinPlan {
    fn all_for(rule: &Rule) -> Vec<JoinPlan> {
        let patterns: Vec<&TriplePattern> = rule.patterns().collect();
        let builtins: Vec<&BuiltinCall> = rule.builtins().collect();
        (0..patterns.len())
            .map(|seed| {
                let order: Vec<usize> = std::iter::once(seed).chain((0..patterns.len()).filter(|&j| j != seed)).collect();
                let mut bound: BTreeSet<&str> = BTreeSet::new();
                let mut placed = vec![false; builtins.len()];
                let mut checks = Vec::new();
                for &j in &order {
                    bound.extend(patterns[j].variables());
                    let mut now = Vec::new();
                    for (k, b) in builtins.iter().enumerate() {
                        if !placed[k] && b.args.iter().filter_map(PatternTerm::var_name).all(|v| bound.contains(v)) {
                            placed[k] = true;
                            now.push(k);
                        }
                    }
                    checks.push(now);
                }
                JoinPlan { order, checks }
            })
            .collect()
    }

    fn run(
        &self,
        rule: &Rule,
        all: &Graph,
        delta: &Graph,
        cache: &mut GeomCache,
        out: &mut BTreeSet<Bindings>,
    ) -> Result<(), RuleError> {
        let patterns: Vec<&TriplePattern> = rule.patterns().collect();
        let builtins: Vec<&BuiltinCall> = rule.builtins().collect();
        let mut frontier = vec![Bindings::new()];
        for (step, &j) in self.order.iter().enumerate() {
            let source = if step == 0 { delta } else { all };
            let mut next = Vec::new();
            for b in &frontier {
                for ext in source.match_with(patterns[j], b) {
                    if check_all(rule, &builtins, &self.checks[step], &ext, cache)? {
                        next.push(ext);
                    }
                }
            }
            if next.is_empty() {
                return Ok(());
            }
            frontier = next;
        }
        out.extend(frontier);
        Ok(())
    }
}

fn check_all(
    rule: &Rule,
    builtins: &[&BuiltinCall],
    which: &[usize],
    b: &Bindings,
    cache: &mut GeomCache,
) -> Result<bool, RuleError> {
    for &k in which {
        let call = builtins[k];
        let args: Vec<Term> = call.args.iter().map(|a| a.resolve(b).cloned().expect("range-restricted")).collect();
        let ok = evaluate(call.builtin, &args, cache).map_err(|message| RuleError::Builtin {
            rule: rule.name().to_string(),
            bindings: fmt_bindings(b),
            message,
        })?;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn fmt_bindings(b: &Bindings) -> String {
    let parts: Vec<String> = b.iter().map(|(k, v)| format!("?{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}
