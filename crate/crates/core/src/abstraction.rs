//! Boolean abstraction of numerical constraints.
//!
//! Every numerical variable `x` compared against constants `c_1 < … < c_k`
//! gets `2k + 1` region propositions `__x__r0 … __x__r{2k}`: even indices
//! are the open intervals below, between and above the constants, odd
//! indices the constants themselves. Constraint atoms are replaced by
//! disjunctions of regions and `q_m` forces exactly one region per variable
//! at every step.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::constant::Constant;
use crate::ltl::{Atom, Formula, LassoTrace, Rel, ValuedLasso, ValuedState};

/// Prefix reserved for generated region propositions.
pub const RESERVED_PREFIX: &str = "__";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error("`{0}` is used both as a proposition and as a numerical variable")]
    MixedUse(String),
    #[error("identifier `{0}` uses the reserved `__` prefix")]
    ReservedIdentifier(String),
    #[error("state {position} has {active} active regions for `{var}` (expected exactly one)")]
    NoActiveRegion { var: String, position: usize, active: usize },
}

/// Numerical variables and the sorted, distinct constants each is compared with.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub constants: BTreeMap<String, Vec<Constant>>,
}

impl Signature {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.constants.keys().map(String::as_str)
    }
}

pub fn extract_signature(formula: &Formula) -> Result<Signature, AbstractionError> {
    let mut props = BTreeSet::new();
    let mut constants: BTreeMap<String, BTreeSet<Constant>> = BTreeMap::new();
    for atom in formula.atoms() {
        if atom.name().starts_with(RESERVED_PREFIX) {
            return Err(AbstractionError::ReservedIdentifier(atom.name().to_string()));
        }
        match atom {
            Atom::Prop(name) => {
                props.insert(name.as_str());
            }
            Atom::Constraint { var, constant, .. } => {
                constants.entry(var.clone()).or_default().insert(constant.clone());
            }
        }
    }
    if let Some(name) = constants.keys().find(|v| props.contains(v.as_str())) {
        return Err(AbstractionError::MixedUse(name.clone()));
    }
    Ok(Signature {
        constants: constants.into_iter().map(|(v, cs)| (v, cs.into_iter().collect())).collect(),
    })
}

/// Region partition of one variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableRegions {
    pub var: String,
    pub constants: Vec<Constant>,
    pub regions: Vec<String>,
}

impl VariableRegions {
    pub fn new(var: &str, constants: Vec<Constant>) -> Self {
        assert!(!constants.is_empty(), "a variable needs at least one constant");
        let regions = (0..=2 * constants.len()).map(|j| region_name(var, j)).collect();
        VariableRegions { var: var.to_string(), constants, regions }
    }

    /// Index of the region containing `value`.
    pub fn region_of(&self, value: &Constant) -> usize {
        for (i, c) in self.constants.iter().enumerate() {
            if value < c {
                return 2 * i;
            }
            if value == c {
                return 2 * i + 1;
            }
        }
        2 * self.constants.len()
    }

    /// A value inside region `j`.
    pub fn representative(&self, j: usize) -> Constant {
        let k = self.constants.len();
        match j {
            0 => self.constants[0].minus_one(),
            j if j == 2 * k => self.constants[k - 1].plus_one(),
            j if j % 2 == 1 => self.constants[j / 2].clone(),
            j => self.constants[j / 2 - 1].midpoint(&self.constants[j / 2]),
        }
    }

    /// Region indices on which `x rel c` holds. `c` must be one of the constants.
    pub fn regions_for(&self, rel: Rel, c: &Constant) -> Vec<usize> {
        let i = self
            .constants
            .binary_search(c)
            .unwrap_or_else(|_| panic!("{c} is not a constant of `{}`", self.var));
        match rel {
            Rel::Lt => (0..=2 * i).collect(),
            Rel::Eq => vec![2 * i + 1],
        }
    }

    fn exactly_one(&self) -> Formula {
        let props: Vec<Formula> = self.regions.iter().map(|r| Formula::prop(r.as_str())).collect();
        let mut parts = vec![Formula::disjunction(props.iter().cloned())];
        for i in 0..props.len() {
            for j in i + 1..props.len() {
                parts.push(props[i].clone().and(props[j].clone()).not());
            }
        }
        Formula::conjunction(parts)
    }
}

pub fn region_name(var: &str, j: usize) -> String {
    format!("{RESERVED_PREFIX}{var}__r{j}")
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AbstractionMap {
    pub variables: BTreeMap<String, VariableRegions>,
}

impl AbstractionMap {
    pub fn from_signature(signature: &Signature) -> Self {
        let variables = signature
            .constants
            .iter()
            .map(|(v, cs)| (v.clone(), VariableRegions::new(v, cs.clone())))
            .collect();
        AbstractionMap { variables }
    }

    pub fn get(&self, var: &str) -> Option<&VariableRegions> {
        self.variables.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn region_props(&self) -> impl Iterator<Item = &str> {
        self.variables.values().flat_map(|v| v.regions.iter().map(String::as_str))
    }

    /// The boolean replacement of an atom; propositions map to themselves.
    pub fn substitute(&self, atom: &Atom) -> Formula {
        match atom {
            Atom::Prop(_) => Formula::atom(atom.clone()),
            Atom::Constraint { var, rel, constant } => {
                let regions = &self.variables[var];
                Formula::disjunction(
                    regions
                        .regions_for(*rel, constant)
                        .into_iter()
                        .map(|j| Formula::prop(regions.regions[j].as_str())),
                )
            }
        }
    }

    /// `G(⋀_x ExactlyOne(M_x))`, or `G(true)` without variables.
    pub fn exactly_one_constraint(&self) -> Formula {
        Formula::conjunction(self.variables.values().map(VariableRegions::exactly_one)).globally()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionResult {
    pub phi_prime: Formula,
    pub q_m: Formula,
    pub map: AbstractionMap,
}

impl AbstractionResult {
    /// The formula handed to the satisfiability engine: `q_m & phi_prime`.
    pub fn query(&self) -> Formula {
        self.q_m.clone().and(self.phi_prime.clone())
    }

    /// Abstracts another formula over the same signature, e.g. a trigger.
    pub fn abstract_formula(&self, formula: &Formula) -> Formula {
        formula.map_atoms(&mut |a| self.map.substitute(a))
    }
}

pub fn build_abstraction(formula: &Formula) -> Result<AbstractionResult, AbstractionError> {
    let signature = extract_signature(formula)?;
    let map = AbstractionMap::from_signature(&signature);
    let phi_prime = formula.map_atoms(&mut |a| map.substitute(a));
    let q_m = map.exactly_one_constraint();
    Ok(AbstractionResult { phi_prime, q_m, map })
}

/// Replaces region propositions by a representative value of the active
/// region. User propositions are kept as they are.
pub fn concretize_witness(trace: &LassoTrace, map: &AbstractionMap) -> Result<ValuedLasso, AbstractionError> {
    let concretize = |state: &BTreeMap<String, bool>, position: usize| -> Result<ValuedState, AbstractionError> {
        let mut valued = ValuedState::default();
        for (name, value) in state {
            if !name.starts_with(RESERVED_PREFIX) {
                valued.props.insert(name.clone(), *value);
            }
        }
        for (var, regions) in &map.variables {
            let active: Vec<usize> = (0..regions.regions.len())
                .filter(|&j| state.get(&regions.regions[j]).copied().unwrap_or(false))
                .collect();
            if active.len() != 1 {
                return Err(AbstractionError::NoActiveRegion {
                    var: var.clone(),
                    position,
                    active: active.len(),
                });
            }
            valued.values.insert(var.clone(), regions.representative(active[0]));
        }
        Ok(valued)
    };
    let offset = trace.prefix.len();
    Ok(ValuedLasso {
        prefix: trace.prefix.iter().enumerate().map(|(i, s)| concretize(s, i)).collect::<Result<_, _>>()?,
        cycle: trace
            .cycle
            .iter()
            .enumerate()
            .map(|(i, s)| concretize(s, offset + i))
            .collect::<Result<_, _>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{eval_on_lasso, State};

    fn c(n: i64) -> Constant {
        Constant::from_integer(n)
    }

    fn lt(var: &str, n: i64) -> Formula {
        Formula::constraint(var, Rel::Lt, c(n))
    }

    fn eq(var: &str, n: i64) -> Formula {
        Formula::constraint(var, Rel::Eq, c(n))
    }

    fn one_state(pairs: &[(&str, bool)]) -> LassoTrace {
        let s: State = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        LassoTrace::new(vec![], vec![s]).unwrap()
    }

    #[test]
    fn signature_of_example_response() {
        let f = lt("proximity_sensor", 20).implies(Formula::prop("arm_idle").eventually()).globally();
        let sig = extract_signature(&f).unwrap();
        assert_eq!(sig.variables().collect::<Vec<_>>(), ["proximity_sensor"]);
        assert_eq!(sig.constants["proximity_sensor"], [c(20)]);
        assert!(extract_signature(&Formula::prop("p").globally()).unwrap().constants.is_empty());
    }

    #[test]
    fn constants_are_deduplicated_and_sorted() {
        let f = lt("x", 7).and(eq("x", 7)).or(lt("x", 3));
        assert_eq!(extract_signature(&f).unwrap().constants["x"], [c(3), c(7)]);
        let tenth: Constant = "0.1".parse().unwrap();
        let also_tenth: Constant = "0.10".parse().unwrap();
        let g = Formula::constraint("y", Rel::Lt, tenth).and(Formula::constraint("y", Rel::Eq, also_tenth));
        assert_eq!(extract_signature(&g).unwrap().constants["y"].len(), 1);
    }

    #[test]
    fn mixed_and_reserved_names_are_rejected() {
        let f = lt("x", 1).and(Formula::prop("x"));
        assert_eq!(extract_signature(&f), Err(AbstractionError::MixedUse("x".into())));
        let g = Formula::prop("__x__r0");
        assert_eq!(extract_signature(&g), Err(AbstractionError::ReservedIdentifier("__x__r0".into())));
    }

    #[test]
    fn single_constant_gives_three_regions() {
        let f = lt("proximity_sensor", 20).implies(Formula::prop("arm_idle").eventually()).globally();
        let result = build_abstraction(&f).unwrap();
        let regions = &result.map.variables["proximity_sensor"];
        assert_eq!(regions.regions, ["__proximity_sensor__r0", "__proximity_sensor__r1", "__proximity_sensor__r2"]);
        let expected = Formula::prop("__proximity_sensor__r0")
            .implies(Formula::prop("arm_idle").eventually())
            .globally();
        assert_eq!(result.phi_prime, expected);
        assert!(!result.phi_prime.has_constraints());
        assert_eq!(
            result.q_m.to_string(),
            "G((__proximity_sensor__r0 | __proximity_sensor__r1 | __proximity_sensor__r2) \
             & !(__proximity_sensor__r0 & __proximity_sensor__r1) \
             & !(__proximity_sensor__r0 & __proximity_sensor__r2) \
             & !(__proximity_sensor__r1 & __proximity_sensor__r2))"
        );
    }

    #[test]
    fn boolean_formulas_are_untouched() {
        let f = Formula::prop("q").eventually();
        let result = build_abstraction(&f).unwrap();
        assert_eq!(result.phi_prime, f);
        assert_eq!(result.q_m, Formula::tt().globally());
        assert_eq!(result.query(), Formula::tt().globally().and(f));
    }

    #[test]
    fn substitution_covers_regions_below_and_at_constants() {
        let f = lt("x", 3).or(eq("x", 7)).or(lt("x", 7));
        let result = build_abstraction(&f).unwrap();
        let r = |j: usize| Formula::prop(region_name("x", j));
        let expected = r(0).or(r(3)).or(Formula::disjunction([r(0), r(1), r(2)]));
        assert_eq!(result.phi_prime, expected);
    }

    #[test]
    fn exclusive_regions_make_contradictions_visible() {
        let result = build_abstraction(&lt("x", 5).and(eq("x", 5))).unwrap();
        let r = |j: usize| region_name("x", j);
        // Every single-state lasso satisfying q_m has one region active, so
        // `__x__r0 & __x__r1` fails on all of them.
        for active in 0..3 {
            let pairs: Vec<(String, bool)> = (0..3).map(|j| (r(j), j == active)).collect();
            let names: Vec<(&str, bool)> = pairs.iter().map(|(n, v)| (n.as_str(), *v)).collect();
            let t = one_state(&names);
            assert!(eval_on_lasso(&result.q_m, &t).unwrap());
            assert!(!eval_on_lasso(&result.query(), &t).unwrap());
        }
    }

    #[test]
    fn representatives_sit_inside_their_regions() {
        let regions = VariableRegions::new("x", vec![c(3), c(7)]);
        assert_eq!(regions.representative(0), c(2));
        assert_eq!(regions.representative(1), c(3));
        assert_eq!(regions.representative(2), c(5));
        assert_eq!(regions.representative(3), c(7));
        assert_eq!(regions.representative(4), c(8));
        for j in 0..5 {
            assert_eq!(regions.region_of(&regions.representative(j)), j);
        }
    }

    #[test]
    fn concretized_states_carry_values() {
        let f = lt("x", 20).and(Formula::prop("p"));
        let result = build_abstraction(&f).unwrap();
        let t = one_state(&[("__x__r0", true), ("__x__r1", false), ("__x__r2", false), ("p", true)]);
        let valued = concretize_witness(&t, &result.map).unwrap();
        assert_eq!(valued.cycle[0].values["x"], c(19));
        assert_eq!(valued.cycle[0].props.keys().collect::<Vec<_>>(), ["p"]);
        assert!(crate::ltl::eval_on_valued_lasso(&f, &valued).unwrap());

        let at = one_state(&[("__x__r0", false), ("__x__r1", true), ("__x__r2", false)]);
        assert_eq!(concretize_witness(&at, &result.map).unwrap().cycle[0].values["x"], c(20));

        let none = one_state(&[("__x__r0", false), ("__x__r1", false), ("__x__r2", false)]);
        assert_eq!(
            concretize_witness(&none, &result.map),
            Err(AbstractionError::NoActiveRegion { var: "x".into(), position: 0, active: 0 })
        );
    }
}
