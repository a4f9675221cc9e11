//! On-the-fly emptiness check of the tableau graph under the generalized
//! Büchi condition (one fairness set per eventuality), in the style of
//! Couvreur's SCC algorithm: states are expanded while the depth-first
//! search runs, and the search stops as soon as a strongly connected part
//! of the graph meets every fairness set.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::tableau::{Expander, Tableau, Targets};
use super::{EngineConfig, EngineStats, Limit};
use crate::ltl::{LassoTrace, State};

/// Successors shared by every state with the same obligations.
struct Successors {
    states: Vec<usize>,
    expander: Option<Expander>,
}

struct Node {
    now: FixedBitSet,
    successors: usize,
    fair: FixedBitSet,
    /// Successors handed out to the search so far.
    explored: usize,
}

const UNVISITED: usize = 0;
const DEAD: usize = usize::MAX;

pub(crate) enum Outcome {
    Empty,
    Lasso(LassoTrace),
    Limit(Limit),
}

pub(crate) struct Search<'a> {
    tableau: &'a Tableau,
    config: &'a EngineConfig,
    started: Instant,
    nodes: Vec<Node>,
    by_now: HashMap<FixedBitSet, usize>,
    successors: Vec<Successors>,
    by_obligations: HashMap<FixedBitSet, usize>,
    targets: Targets,
    /// Depth-first number, [`UNVISITED`] or [`DEAD`].
    number: Vec<usize>,
    pub(crate) stats: EngineStats,
}

impl<'a> Search<'a> {
    pub(crate) fn new(tableau: &'a Tableau, config: &'a EngineConfig) -> Self {
        Search {
            tableau,
            config,
            started: Instant::now(),
            nodes: Vec::new(),
            by_now: HashMap::new(),
            successors: Vec::new(),
            by_obligations: HashMap::new(),
            targets: Targets::default(),
            number: Vec::new(),
            stats: EngineStats::default(),
        }
    }

    fn successor_set(&mut self, obligations: FixedBitSet) -> usize {
        if let Some(&id) = self.by_obligations.get(&obligations) {
            return id;
        }
        let expander = Expander::new(self.tableau, &obligations);
        self.successors.push(Successors { states: Vec::new(), expander: Some(expander) });
        self.by_obligations.insert(obligations, self.successors.len() - 1);
        self.successors.len() - 1
    }

    fn node(&mut self, now: FixedBitSet) -> Result<usize, Limit> {
        if let Some(&id) = self.by_now.get(&now) {
            return Ok(id);
        }
        if self.nodes.len() >= self.config.max_states {
            return Err(Limit::States);
        }
        let successors = self.successor_set(self.tableau.obligations(&now));
        let fair = self.tableau.fulfilled(&now);
        self.nodes.push(Node { now: now.clone(), successors, fair, explored: 0 });
        self.number.push(UNVISITED);
        self.by_now.insert(now, self.nodes.len() - 1);
        self.stats.states += 1;
        Ok(self.nodes.len() - 1)
    }

    /// The `k`-th successor of a successor set, expanding lazily.
    fn successor(&mut self, set: usize, k: usize) -> Result<Option<usize>, Limit> {
        while self.successors[set].states.len() <= k {
            let Some(expander) = self.successors[set].expander.as_mut() else {
                return Ok(None);
            };
            let deadline = self.started + self.config.timeout;
            match expander.next_state(self.tableau, Some(&mut self.targets), Some(deadline))? {
                Some(now) => {
                    let id = self.node(now)?;
                    self.successors[set].states.push(id);
                }
                None => self.successors[set].expander = None,
            }
        }
        Ok(Some(self.successors[set].states[k]))
    }

    fn next_successor(&mut self, node: usize) -> Result<Option<usize>, Limit> {
        let k = self.nodes[node].explored;
        let next = self.successor(self.nodes[node].successors, k)?;
        if next.is_some() {
            self.nodes[node].explored += 1;
            self.stats.edges += 1;
        }
        Ok(next)
    }

    fn check_time(&self) -> Result<(), Limit> {
        if self.started.elapsed() > self.config.timeout {
            Err(Limit::Time)
        } else {
            Ok(())
        }
    }

    pub(crate) fn run(&mut self) -> Outcome {
        match self.run_inner() {
            Ok(outcome) => outcome,
            Err(limit) => Outcome::Limit(limit),
        }
    }

    fn run_inner(&mut self) -> Result<Outcome, Limit> {
        let all = self.tableau.eventualities.len();
        let initial = self.successor_set(self.tableau.seed(&[self.tableau.root]));
        let mut count = 0usize;
        // Roots of the partial SCCs on the depth-first path, with the
        // fairness sets met inside each.
        let mut roots: Vec<(usize, FixedBitSet)> = Vec::new();
        let mut live: Vec<usize> = Vec::new();
        let mut path: Vec<usize> = Vec::new();
        let mut steps = 0u32;

        let mut k = 0;
        while let Some(start) = self.successor(initial, k)? {
            k += 1;
            if self.number[start] != UNVISITED {
                continue;
            }
            count += 1;
            self.number[start] = count;
            roots.push((count, self.nodes[start].fair.clone()));
            live.push(start);
            path.push(start);

            while let Some(&top) = path.last() {
                steps = steps.wrapping_add(1);
                if steps.is_multiple_of(256) {
                    self.check_time()?;
                }
                match self.next_successor(top)? {
                    Some(succ) if self.number[succ] == UNVISITED => {
                        count += 1;
                        self.number[succ] = count;
                        roots.push((count, self.nodes[succ].fair.clone()));
                        live.push(succ);
                        path.push(succ);
                    }
                    Some(succ) if self.number[succ] != DEAD => {
                        // Closes a cycle: merge every partial SCC above `succ`.
                        let target = self.number[succ];
                        let mut merged = FixedBitSet::with_capacity(all);
                        while roots.last().is_some_and(|(n, _)| *n > target) {
                            merged.union_with(&roots.pop().unwrap().1);
                        }
                        let (root_number, fair) = roots.last_mut().expect("live state without root");
                        fair.union_with(&merged);
                        if fair.count_ones(..) == all {
                            let root_number = *root_number;
                            return Ok(Outcome::Lasso(self.witness(&path, &live, root_number)));
                        }
                    }
                    Some(_) => {}
                    None => {
                        path.pop();
                        if roots.last().is_some_and(|(n, _)| *n == self.number[top]) {
                            roots.pop();
                            self.stats.sccs += 1;
                            while let Some(n) = live.pop() {
                                self.number[n] = DEAD;
                                if n == top {
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(Outcome::Empty)
    }

    /// Prefix along the depth-first path to the SCC root, then a cycle
    /// through the SCC that meets the fairness sets in index order.
    fn witness(&self, path: &[usize], live: &[usize], root_number: usize) -> LassoTrace {
        let member: HashSet<usize> =
            live.iter().copied().filter(|&n| self.number[n] >= root_number).collect();
        let root_pos = path.iter().position(|&n| self.number[n] == root_number).expect("root on path");
        let root = path[root_pos];

        let mut cycle = vec![root];
        let mut met = self.nodes[root].fair.clone();
        let mut at = root;
        for j in 0..self.tableau.eventualities.len() {
            if met.contains(j) {
                continue;
            }
            let leg = self.shortest_path(&member, at, |n| self.nodes[n].fair.contains(j), false);
            for &n in &leg {
                met.union_with(&self.nodes[n].fair);
            }
            at = *leg.last().unwrap_or(&at);
            cycle.extend(leg);
        }
        let mut back = self.shortest_path(&member, at, |n| n == root, true);
        back.pop();
        cycle.extend(back);

        let state = |n: usize| -> State {
            self.tableau.valuation(&self.nodes[n].now).map(|(p, v)| (p.to_string(), v)).collect()
        };
        LassoTrace {
            prefix: path[..root_pos].iter().map(|&n| state(n)).collect(),
            cycle: cycle.into_iter().map(state).collect(),
        }
    }

    /// Breadth-first path over explored edges inside `member`, excluding
    /// `from`. With `nonempty` at least one edge is taken.
    fn shortest_path(
        &self,
        member: &HashSet<usize>,
        from: usize,
        goal: impl Fn(usize) -> bool,
        nonempty: bool,
    ) -> Vec<usize> {
        if !nonempty && goal(from) {
            return Vec::new();
        }
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let node = &self.nodes[n];
            for &s in &self.successors[node.successors].states[..node.explored] {
                if !member.contains(&s) || parent.contains_key(&s) {
                    continue;
                }
                parent.insert(s, n);
                if goal(s) {
                    let mut out = vec![s];
                    let mut cur = s;
                    loop {
                        let p = parent[&cur];
                        if p == from {
                            break;
                        }
                        out.push(p);
                        cur = p;
                    }
                    out.reverse();
                    return out;
                }
                queue.push_back(s);
            }
        }
        unreachable!("SCC members are strongly connected over explored edges")
    }
}
