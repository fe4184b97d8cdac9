use proptest::prelude::*;
use syncpred_core::dataset::{build_balanced_dataset, draw_sample, label_sample};
use syncpred_core::learn::{cross_validate, train, ClassifierConfig};
use syncpred_core::predict::{baseline_evaluate, ensemble_evaluate, ensemble_train};
use syncpred_core::{Dataset, DatasetSpec, EnsembleParams, Model, TrainedModel};

fn small(model: Model, seed: u64) -> DatasetSpec {
    let mut spec = DatasetSpec::nws(model, 20, 20, seed);
    spec.training_iter = 8;
    spec
}

#[test]
fn generate_save_load_train_predict() {
    let spec = small(Model::Fca { kappa: 5 }, 4);
    let ds = build_balanced_dataset(&spec).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    ds.save(tmp.path(), Some("pipeline test")).unwrap();
    let back = Dataset::load(tmp.path()).unwrap();
    assert_eq!(back.labels(), ds.labels());

    let idx: Vec<usize> = (0..ds.len()).collect();
    let x = back.design_matrix(&idx, 8, true).unwrap();
    assert_eq!(x.ncols(), 20 * 9 + 3 + 5);
    for name in ["forest", "boost", "net"] {
        let cfg = ClassifierConfig::by_name(name).unwrap();
        let model = train(&cfg, x.view(), &ds.labels(), 1).unwrap();
        let path = tmp.path().join(format!("{name}.model"));
        model.save(&path).unwrap();
        let loaded = TrainedModel::load(&path).unwrap();
        assert_eq!(loaded.predict_proba_rows(x.view()).unwrap(), model.predict_proba_rows(x.view()).unwrap());
        let m = cross_validate(&cfg, x.view(), &ds.labels(), 4, 1).unwrap();
        assert!((0.0..=1.0).contains(&m.accuracy));
    }
    let base = baseline_evaluate(&ds, &idx, 8, 1).unwrap();
    assert_eq!(base.confusion.total(), ds.len() as u64);
}

#[test]
fn whole_graph_ensemble_matches_plain_training() {
    let ds = build_balanced_dataset(&small(Model::Ghm { kappa: 5 }, 2)).unwrap();
    let idx: Vec<usize> = (0..ds.len()).collect();
    let params = EnsembleParams { n0: 20, k_train: 1, k_test: 1, theta: 0.5 };
    let cfg = ClassifierConfig::by_name("boost").unwrap();
    let model = ensemble_train(&ds, &idx, 5, false, &params, &cfg, 3).unwrap();
    let (ens, _) = ensemble_evaluate(&model, &ds, &idx, 5, false, &params, 3).unwrap();
    // a whole-graph restriction is a relabeling, so training accuracy stays high
    assert!(ens.accuracy > 0.9, "{}", ens.accuracy);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // re-simulating a stored sample from its seed reproduces its label
    #[test]
    fn labels_are_reproducible(seed in any::<u64>(), which in 0usize..3) {
        let model = [Model::km(), Model::Fca { kappa: 5 }, Model::Ghm { kappa: 5 }][which];
        let mut spec = small(model, seed);
        spec.prediction_iter = 60;
        let s = draw_sample(&spec, seed, true).unwrap();
        let again = label_sample(&model, &s.graph, &s.trajectory[0], spec.prediction_iter).unwrap();
        prop_assert_eq!(s.label, again);
        prop_assert_eq!(s.trajectory.len(), spec.training_iter + 1);
    }
}
