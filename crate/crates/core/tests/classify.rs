//! End-to-end classification in dimensions 4 and 6, determinism, caching
//! and checkpoint/resume.

use std::collections::BTreeSet;

use isoweights::classify::{
    classify, classify_cached, classify_with, equal_filter, gcd_filter, lemma_filter, load_checkpoint, modulo_filter,
    render_table, ClassifyOptions, Checkpoint, RunControl, CODE_HASH,
};
use isoweights::fixtures;
use isoweights::graphs::integral_multigraphs;
use isoweights::magnitudes::{Mode, SearchOptions};
use isoweights::{Error, Profile, WeightSystem};

fn instance_set(report: &isoweights::classify::ClassifyReport, family: usize) -> BTreeSet<Vec<Vec<i64>>> {
    report.families[family].instances.iter().cloned().collect()
}

fn sorted_weights(ws: &WeightSystem) -> Vec<Vec<i64>> {
    ws.weights().to_vec()
}

#[test]
fn dimension_four_has_one_family() {
    let r = classify(&Profile::minimal(2), &ClassifyOptions::default()).unwrap();
    assert_eq!(r.graph_classes, 2);
    assert_eq!(r.families.len(), 1);
    let f = &r.families[0];
    assert_eq!(f.edges, vec![(0, 1), (0, 2), (1, 2)]);
    assert_eq!(f.magnitudes, vec![3, 3, 3]);
    assert_eq!(f.dimension, 2);
    assert_eq!(f.relations, vec!["w(e12) = w(e02)-w(e01)".to_string()]);
    for inst in &f.instances {
        // w(e02) = w(e01) + w(e12) at the index-0 point and the index-1 point.
        assert_eq!(inst[0][1], inst[0][0] + inst[1][1]);
    }
    assert!(f.instances.contains(&sorted_weights(&fixtures::cp(&[2, 1, 0]).unwrap())));
}

#[test]
fn dimension_six_has_four_families() {
    let r = classify(&Profile::minimal(3), &ClassifyOptions::default()).unwrap();
    assert_eq!(r.graph_classes, 7);
    assert_eq!(r.audit.len(), 7);
    assert_eq!(r.families.len(), 4);
    let dims: Vec<usize> = r.families.iter().map(|f| f.dimension).collect();
    assert_eq!(dims, vec![3, 2, 2, 1]);
    assert!(instance_set(&r, 0).contains(&sorted_weights(&fixtures::cp(&[3, 2, 1, 0]).unwrap())));
    assert!(instance_set(&r, 1).contains(&sorted_weights(&fixtures::grassmannian(&[2, 1]).unwrap())));
    assert_eq!(instance_set(&r, 2), BTreeSet::from([sorted_weights(&fixtures::v5())]));
    assert_eq!(instance_set(&r, 3), BTreeSet::from([sorted_weights(&fixtures::v22())]));
    assert_eq!(r.families[2].edges.iter().filter(|&&e| e == (0, 3)).count(), 2);
}

#[test]
fn every_surviving_instance_is_a_valid_weight_system() {
    let r = classify(&Profile::minimal(3), &ClassifyOptions::default()).unwrap();
    for f in &r.families {
        for inst in &f.instances {
            let ws = WeightSystem::from_weights(3, inst.clone()).unwrap();
            assert!(isoweights::verify::verify(&ws).unwrap().passed, "{ws}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let opts = ClassifyOptions::default();
    let a = serde_json::to_string_pretty(&classify(&Profile::minimal(3), &opts).unwrap()).unwrap();
    let b = serde_json::to_string_pretty(&classify(&Profile::minimal(3), &opts).unwrap()).unwrap();
    assert_eq!(a, b);
    let t1 = render_table(&classify(&Profile::minimal(3), &opts).unwrap());
    let t2 = render_table(&classify(&Profile::minimal(3), &opts).unwrap());
    assert_eq!(t1, t2);
}

#[test]
fn resume_reuses_finished_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("checkpoint.json");
    let opts = ClassifyOptions::default();
    let profile = Profile::minimal(3);
    let full = classify_with(&profile, &opts, &RunControl { checkpoint: Some(&ck), resume: false }).unwrap();
    let key = isoweights::classify::cache_key(&profile, &opts);
    let blocks = load_checkpoint(&ck, &key).unwrap();
    assert!(!blocks.is_empty());

    // Drop half of the blocks, as if the run had been interrupted.
    let kept: Vec<_> = blocks.iter().take(blocks.len() / 2).cloned().collect();
    std::fs::write(&ck, serde_json::to_vec(&Checkpoint { key: key.clone(), blocks: kept }).unwrap()).unwrap();
    let resumed = classify_with(&profile, &opts, &RunControl { checkpoint: Some(&ck), resume: true }).unwrap();
    assert_eq!(serde_json::to_string(&resumed).unwrap(), serde_json::to_string(&full).unwrap());
    assert_eq!(load_checkpoint(&ck, &key).unwrap().len(), blocks.len());

    // A checkpoint written under other options is ignored: the run starts
    // afresh and overwrites it.
    let other = ClassifyOptions { weight_bound: 7, ..ClassifyOptions::default() };
    assert!(load_checkpoint(&ck, &isoweights::classify::cache_key(&profile, &other)).unwrap().is_empty());
    let fresh = classify_with(&profile, &other, &RunControl { checkpoint: Some(&ck), resume: true }).unwrap();
    assert_eq!(fresh, classify(&profile, &other).unwrap());
    assert!(load_checkpoint(&ck, &key).unwrap().is_empty());
}

#[test]
fn cache_keys_depend_on_profile_options_and_version() {
    let p3 = Profile::minimal(3);
    let base = ClassifyOptions::default();
    let k = isoweights::classify::cache_key(&p3, &base);
    assert_eq!(k, isoweights::classify::cache_key(&p3, &base));
    assert_ne!(k, isoweights::classify::cache_key(&Profile::minimal(2), &base));
    assert_ne!(k, isoweights::classify::cache_key(&p3, &ClassifyOptions { hattori: true, ..base.clone() }));
    assert_eq!(CODE_HASH.len(), 16);

    let dir = tempfile::tempdir().unwrap();
    let first = classify_cached(&p3, &base, dir.path(), &RunControl::default()).unwrap();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = classify_cached(&p3, &base, dir.path(), &RunControl::default()).unwrap();
    assert_eq!(first, second);
}

#[test]
fn laurent_stage_keeps_the_same_families() {
    let opts = ClassifyOptions { hattori: true, ..ClassifyOptions::default() };
    let r = classify(&Profile::minimal(3), &opts).unwrap();
    assert_eq!(r.families.len(), 4);
}

#[test]
fn nonnegative_mode_is_refused_for_negative_targets() {
    let p = Profile::new(4, vec![2, 2]).unwrap();
    assert_eq!(classify(&p, &ClassifyOptions::default()).unwrap_err(), Error::ModeRefused);
    // Bounded mode is accepted.
    let bounded = ClassifyOptions {
        search: SearchOptions { mode: Mode::Bounded(2), ..SearchOptions::default() },
        ..ClassifyOptions::default()
    };
    assert!(!matches!(classify(&p, &bounded), Err(Error::ModeRefused)));
}

#[test]
fn instance_filters_on_fixtures() {
    for (name, ws) in fixtures::standard_fixtures() {
        assert!(gcd_filter(&ws), "{name}");
        for wg in integral_multigraphs(&ws).unwrap() {
            assert!(modulo_filter(&wg, &ws), "{name}");
        }
    }
    assert_eq!(equal_filter(&fixtures::cp(&[3, 2, 1, 0]).unwrap()), Some(4));
    // The double edge 0 → 3 of the quintic-del-Pezzo graph.
    let v5 = fixtures::v5();
    let graphs = integral_multigraphs(&v5).unwrap();
    assert!(graphs.iter().any(lemma_filter));
}
