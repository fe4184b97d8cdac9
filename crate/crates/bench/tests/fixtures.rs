use syncpred_bench::nws30;
use syncpred_core::Model;

#[test]
fn fixtures_are_deterministic_and_sized() {
    let model = Model::Fca { kappa: 5 };
    let (g, x0) = nws30(&model, 5);
    assert_eq!(g.n(), 30);
    assert!(g.is_connected());
    assert_eq!(nws30(&model, 5).1, x0);
}
