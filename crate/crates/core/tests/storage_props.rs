mod common;

use common::props::{append_seq, check_hash_load, check_probe, check_sapp, dataset, hash_ops};
use proptest::prelude::*;
use reprlog::storage::{AccessType, DataStructure, IndexKey, RepConfig, Relation, RowStore};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn probe_matches_scan_oracle(d in dataset()) {
        check_probe(d)?;
    }

    #[test]
    fn sapp_sorted_and_unique_after_append(s in append_seq()) {
        check_sapp(s)?;
    }

    #[test]
    fn hash_load_factor_bounded(ops in hash_ops()) {
        check_hash_load(ops)?;
    }
}

#[test]
fn tuple_ref_stable_under_appends() {
    let mut store = RowStore::new(2);
    let first = store.push(&[7, 9]);
    let addr = store.get(first).as_ptr();
    let mut refs = Vec::new();
    for i in 0..200_000u64 {
        let r = store.push(&[i, i ^ 0xdead]);
        if i % 9_973 == 0 {
            refs.push((r, i));
        }
    }
    assert_eq!(store.get(first), &[7, 9]);
    assert_eq!(store.get(first).as_ptr(), addr);
    for (r, i) in refs {
        assert_eq!(store.get(r), &[i, i ^ 0xdead]);
    }
}

#[test]
fn shared_store_serves_every_representation() {
    let configs = [
        RepConfig::indexed(AccessType::UPI, DataStructure::BP, IndexKey::new(vec![1]).unwrap()),
        RepConfig::indexed(AccessType::UKI, DataStructure::HT, IndexKey::new(vec![0]).unwrap()),
        RepConfig::full_scan(),
    ];
    let mut rel = Relation::new(2, &configs).unwrap();
    rel.bulk_load(&[1, 10, 2, 20, 3, 10]).unwrap();
    rel.append(&[4, 20]).unwrap();
    rel.finished_append();
    let mut by1: Vec<_> = rel.probe(0, &[20]).unwrap().map(|t| t.to_vec()).collect();
    by1.sort();
    assert_eq!(by1, vec![vec![2, 20], vec![4, 20]]);
    assert_eq!(rel.probe(1, &[3]).unwrap().map(|t| t.to_vec()).collect::<Vec<_>>(), vec![vec![3, 10]]);
    assert_eq!(rel.store().unwrap().len(), 4);
    assert!(rel.remove(&[2, 20]));
    assert_eq!(rel.probe(0, &[20]).unwrap().count(), 1);
    assert_eq!(rel.scan_filter(&[1], &[20]).count(), 1);
}
