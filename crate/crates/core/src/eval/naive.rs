//! Naive fixpoint over hash sets, used as a test oracle.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::{EvalError, Facts, ResultSet};
use crate::frontend::{Program, RelKind, Rule, Term};

type Db = BTreeMap<String, HashSet<Vec<u64>>>;

fn derive(rule: &Rule, db: &Db) -> Vec<Vec<u64>> {
    let mut bindings: Vec<HashMap<&str, u64>> = vec![HashMap::new()];
    for atom in &rule.body {
        let rel = &db[&atom.relation];
        let bound_vars: Vec<(usize, &str)> = match bindings.first() {
            Some(b) => atom
                .args
                .iter()
                .enumerate()
                .filter_map(|(i, t)| t.var().filter(|v| b.contains_key(v)).map(|v| (i, v)))
                .collect(),
            None => return Vec::new(),
        };
        let mut index: HashMap<Vec<u64>, Vec<&Vec<u64>>> = HashMap::new();
        for t in rel {
            index.entry(bound_vars.iter().map(|&(i, _)| t[i]).collect()).or_default().push(t);
        }
        let mut next = Vec::new();
        for b in &bindings {
            let k: Vec<u64> = bound_vars.iter().map(|&(_, v)| b[v]).collect();
            let Some(cands) = index.get(&k) else { continue };
            'tuple: for t in cands {
                let mut nb = b.clone();
                for (i, term) in atom.args.iter().enumerate() {
                    match term {
                        Term::Const(c) => {
                            if t[i] != *c {
                                continue 'tuple;
                            }
                        }
                        Term::Var(v) => match nb.get(v.as_str()) {
                            Some(&x) if x != t[i] => continue 'tuple,
                            Some(_) => {}
                            None => {
                                nb.insert(v, t[i]);
                            }
                        },
                    }
                }
                next.push(nb);
            }
        }
        bindings = next;
    }
    bindings
        .iter()
        .map(|b| {
            rule.head
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => *c,
                    Term::Var(v) => b[v.as_str()],
                })
                .collect()
        })
        .collect()
}

/// Re-evaluates every rule over the full relations until nothing changes.
pub fn naive_eval(p: &Program, facts: &Facts) -> Result<ResultSet, EvalError> {
    let mut db: Db = BTreeMap::new();
    for (name, decl) in &p.decls {
        let set = match facts.get(name) {
            Some(f) => {
                if f.arity != decl.arity {
                    return Err(EvalError::ArityMismatch { relation: name.clone(), expected: decl.arity, got: f.arity });
                }
                f.tuples().map(|t| t.to_vec()).collect()
            }
            None if decl.kind == RelKind::Edb => return Err(EvalError::MissingFacts(name.clone())),
            None => HashSet::new(),
        };
        db.insert(name.clone(), set);
    }
    loop {
        let mut changed = false;
        for rule in &p.rules {
            let out = derive(rule, &db);
            let head = db.get_mut(&rule.head.relation).expect("declared");
            for t in out {
                changed |= head.insert(t);
            }
        }
        if !changed {
            break;
        }
    }
    let mut rs = ResultSet::default();
    for name in p.idbs() {
        ResultSet::from_flat(name, db[name].iter().cloned().collect(), &mut rs);
    }
    Ok(rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    #[test]
    fn andersen_seed() {
        let p = parse_program("points_to(y,x) :- address_of(y,x)").unwrap();
        let mut f = Facts::new();
        f.insert_tuples("address_of", 2, &[[7, 3]]);
        assert_eq!(naive_eval(&p, &f).unwrap().get("points_to").unwrap(), &[vec![7, 3]]);
    }

    #[test]
    fn repeated_var_and_const() {
        let p = parse_program("o(x) :- e(x,x)\nq(y) :- e(1,y)").unwrap();
        let mut f = Facts::new();
        f.insert_tuples("e", 2, &[[1, 1], [1, 2], [3, 3], [2, 4]]);
        let r = naive_eval(&p, &f).unwrap();
        assert_eq!(r.get("o").unwrap(), &[vec![1], vec![3]]);
        assert_eq!(r.get("q").unwrap(), &[vec![1], vec![2]]);
    }
}
