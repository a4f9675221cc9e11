//! Requirements that share no proposition or variable with the rest of the
//! set often point at a misspelled name.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::psp::RequirementSet;

/// One vertex per requirement; an edge wherever two requirements mention a
/// common proposition or numerical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub ids: Vec<String>,
    /// `(i, j)` with `i < j`, indices into `ids`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    pub fn new(requirements: &RequirementSet) -> Self {
        let symbols: Vec<BTreeSet<String>> = requirements.iter().map(|r| r.symbols()).collect();
        let mut edges = BTreeSet::new();
        for i in 0..symbols.len() {
            for j in i + 1..symbols.len() {
                if !symbols[i].is_disjoint(&symbols[j]) {
                    edges.insert((i, j));
                }
            }
        }
        DependencyGraph { ids: requirements.ids().into_iter().map(str::to_string).collect(), edges }
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(i, j)| {
            if i == v {
                Some(j)
            } else if j == v {
                Some(i)
            } else {
                None
            }
        })
    }

    /// Connected components as sorted vertex lists, in order of their
    /// first vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.ids.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut component = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        component.push(w);
                        queue.push_back(w);
                    }
                }
            }
            component.sort_unstable();
            out.push(component);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Requirement ids in file order.
    pub ids: Vec<String>,
    /// Among the smallest components of a disconnected set.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    /// Sorted by size, then by smallest member id.
    pub components: Vec<Component>,
}

impl Connectivity {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    pub fn flagged(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.flagged)
    }
}

pub fn check_connectivity(requirements: &RequirementSet) -> Connectivity {
    let graph = DependencyGraph::new(requirements);
    let mut components: Vec<Vec<String>> = graph
        .components()
        .into_iter()
        .map(|c| c.into_iter().map(|v| graph.ids[v].clone()).collect())
        .collect();
    components.sort_by(|a, b| {
        let smallest = |c: &Vec<String>| c.iter().min().cloned();
        a.len().cmp(&b.len()).then_with(|| smallest(a).cmp(&smallest(b)))
    });
    let min_size = components.first().map_or(0, Vec::len);
    let disconnected = components.len() > 1;
    Connectivity {
        components: components
            .into_iter()
            .map(|ids| Component { flagged: disconnected && ids.len() == min_size, ids })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psp::parse_requirements;

    #[test]
    fn misspelled_proposition_splits_the_set() {
        let set = parse_requirements(
            "R1: Globally, it is always the case that if proximity_sensor < 20 holds, then arm_idle eventually holds.\n\
             R2: Globally, it is always the case that if armidle holds, then gripper_open eventually holds.",
        )
        .unwrap();
        let c = check_connectivity(&set);
        assert_eq!(c.components.len(), 2);
        assert!(c.components.iter().all(|c| c.flagged && c.ids.len() == 1));
    }

    #[test]
    fn single_requirement_is_connected() {
        let set = parse_requirements("A: Globally, p eventually holds.").unwrap();
        let c = check_connectivity(&set);
        assert!(c.is_connected());
        assert_eq!(c.flagged().count(), 0);
    }

    #[test]
    fn connectivity_is_transitive() {
        let set = parse_requirements(
            "r1: Globally, it is always the case that x < 1 holds.\n\
             r2: Globally, it is always the case that if x = 3 holds, then y eventually holds.\n\
             r3: Globally, it is never the case that y holds.\n\
             r4: Globally, z eventually holds.\n\
             r5: After z, w eventually holds.\n\
             r6: Globally, lonely eventually holds.",
        )
        .unwrap();
        let c = check_connectivity(&set);
        let ids: Vec<Vec<&str>> = c.components.iter().map(|c| c.ids.iter().map(String::as_str).collect()).collect();
        assert_eq!(ids, vec![vec!["r6"], vec!["r4", "r5"], vec!["r1", "r2", "r3"]]);
        let flagged: Vec<bool> = c.components.iter().map(|c| c.flagged).collect();
        assert_eq!(flagged, [true, false, false]);
    }

    #[test]
    fn scope_delimiters_count_as_shared_symbols() {
        let set = parse_requirements("a: After door_open, alarm eventually holds.\nb: Globally, door_open eventually holds.")
            .unwrap();
        assert!(check_connectivity(&set).is_connected());
    }
}
