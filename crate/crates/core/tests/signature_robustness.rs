use proptest::prelude::*;
use reprlog::bench::Workload;
use reprlog::profiler::{compute_signature, WorkloadSignature};
use reprlog::selector::{select_configuration, SelectOptions};
use serde_json::Value;

fn signatures() -> Vec<Value> {
    Workload::ALL
        .iter()
        .map(|w| {
            let sig = compute_signature(&w.program(), &w.bundled_facts()).unwrap();
            serde_json::from_str(&sig.to_json()).unwrap()
        })
        .collect()
}

fn leaves(v: &Value, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                path.push(k.clone());
                leaves(x, path, out);
                path.pop();
            }
        }
        Value::Array(a) => {
            out.push(path.clone());
            for (i, x) in a.iter().enumerate() {
                path.push(i.to_string());
                leaves(x, path, out);
                path.pop();
            }
        }
        _ => out.push(path.clone()),
    }
}

fn at<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
    path.iter().fold(v, |v, k| match v {
        Value::Array(a) => &mut a[k.parse::<usize>().unwrap()],
        Value::Object(m) => m.get_mut(k).unwrap(),
        _ => unreachable!(),
    })
}

/// One edit at a pseudo-randomly chosen node: replace a number, swap in a
/// string or key seen elsewhere, or drop an array element.
fn mutate(v: &mut Value, pick: usize, kind: u8, n: u64, strings: &[String]) {
    let mut paths = Vec::new();
    leaves(v, &mut Vec::new(), &mut paths);
    let node = at(v, &paths[pick % paths.len()]);
    *node = match (kind, &*node) {
        (_, Value::Array(a)) if !a.is_empty() => {
            let mut a = a.clone();
            a.remove(n as usize % a.len());
            Value::Array(a)
        }
        (0, Value::Number(_)) => Value::from(n % 8),
        (1, Value::Number(_)) => Value::from(n),
        (_, Value::String(_)) => Value::from(strings[n as usize % strings.len()].clone()),
        (_, Value::Bool(b)) => Value::Bool(!b),
        _ => Value::from(n % 4),
    };
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn accepted_signatures_never_panic(which in 0usize..4, edits in prop::collection::vec((any::<usize>(), 0u8..3, any::<u64>()), 1..4)) {
        thread_local!(static SIGS: Vec<Value> = signatures());
        let mut v = SIGS.with(|s| s[which].clone());
        let strings: Vec<String> = ["0", "1", "0_1", "1_0", "2", "x", "y", "z", "path", "edge", "Probe", "Never", "Base", "Delta"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for (pick, kind, n) in edits {
            mutate(&mut v, pick, kind, n, &strings);
        }
        let text = v.to_string();
        if let Ok(sig) = WorkloadSignature::from_json(&text) {
            let _ = select_configuration(&sig, &SelectOptions::default());
            let _ = select_configuration(&sig, &SelectOptions { space_budget: Some(1), ..Default::default() });
        }
    }
}

#[test]
fn inconsistent_signatures_are_rejected() {
    let sig = compute_signature(&Workload::Tc.program(), &Workload::Tc.bundled_facts()).unwrap();
    let good = sig.to_json();
    assert!(WorkloadSignature::from_json(&good).is_ok());
    let mut v: Value = serde_json::from_str(&good).unwrap();
    v["graphs"][0]["rule"] = Value::from(9);
    assert!(WorkloadSignature::from_json(&v.to_string()).is_err());
    let mut v: Value = serde_json::from_str(&good).unwrap();
    v["relations"].as_object_mut().unwrap().remove("edge");
    assert!(WorkloadSignature::from_json(&v.to_string()).is_err());
    let mut v: Value = serde_json::from_str(&good).unwrap();
    v["relations"]["path"]["keys"] = serde_json::json!(["0_2"]);
    assert!(WorkloadSignature::from_json(&v.to_string()).is_err());
    let mut v: Value = serde_json::from_str(&good).unwrap();
    v["relations"]["path"]["cardinality"] = Value::from(u64::MAX);
    assert!(WorkloadSignature::from_json(&v.to_string()).is_err());
    let mut v: Value = serde_json::from_str(&good).unwrap();
    v["relations"]["path"]["distinct_keys"] = Value::from(7);
    assert!(WorkloadSignature::from_json(&v.to_string()).is_err());
}
