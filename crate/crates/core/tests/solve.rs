use modelxp::explain::{oracle_min, DEFAULT_GUARD};
use modelxp::random::{random_dl, random_ds, random_dt, random_example, random_obdd_with_order};
use modelxp::solve::{auto_route, explain, explain_with_timeout, verify, Options, Route};
use modelxp::{Ensemble, Kind, Minimality, Model, Query};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Duration;

fn models(rng: &mut StdRng, n: usize) -> Vec<Model> {
    let order: Vec<usize> = (0..n).collect();
    vec![
        Model::Dt(random_dt(rng, n, 12)),
        Model::Ds(random_ds(rng, n, 4, 3)),
        Model::Dl(random_dl(rng, n, 4, 3)),
        Model::Obdd(random_obdd_with_order(rng, order.clone(), 3)),
        Model::Ensemble(Ensemble::new((0..3).map(|_| Model::Dt(random_dt(rng, n, 6))).collect(), None).unwrap()),
        Model::Ensemble(Ensemble::new((0..3).map(|_| Model::Dl(random_dl(rng, n, 3, 2))).collect(), None).unwrap()),
        Model::Ensemble(
            Ensemble::new(
                (0..3).map(|_| Model::Obdd(random_obdd_with_order(rng, order.clone(), 2))).collect(),
                Some(order.clone()),
            )
            .unwrap(),
        ),
        Model::Ensemble(
            Ensemble::new(
                (0..3).map(|_| Model::Obdd(random_obdd_with_order(rng, order.clone(), 2))).collect(),
                None,
            )
            .unwrap(),
        ),
    ]
}

#[test]
fn routes_follow_the_model() {
    let mut rng = StdRng::seed_from_u64(5);
    let ms = models(&mut rng, 4);
    let e = random_example(&mut rng, 4);
    let lcxp = Query::local(Kind::LocalContrastive, e.clone(), Minimality::Cardinality, None);
    let laxp = Query::local(Kind::LocalAbductive, e, Minimality::Cardinality, None);
    let got: Vec<Route> = ms.iter().map(|m| auto_route(m, &lcxp)).collect();
    use Route::*;
    assert_eq!(got, [Dt, Branching, Branching, Obdd, Product, Branching, Product, Compile]);
    let got: Vec<Route> = ms.iter().map(|m| auto_route(m, &laxp)).collect();
    assert_eq!(got, [Dt, BruteForce, BruteForce, Obdd, Product, Compile, Product, Compile]);
}

#[test]
fn mismatched_routes_are_errors() {
    let mut rng = StdRng::seed_from_u64(6);
    let ms = models(&mut rng, 3);
    let q = Query::global(Kind::GlobalAbductive, true, Minimality::Cardinality, None);
    let opts = |r| Options { route: Some(r), ..Options::default() };
    assert!(explain(&ms[1], &q, &opts(Route::Dt)).is_err());
    assert!(explain(&ms[0], &q, &opts(Route::Obdd)).is_err());
    assert!(explain(&ms[1], &q, &opts(Route::Branching)).is_err());
    assert!(explain(&ms[7], &q, &opts(Route::Product)).is_err());
}

#[test]
fn timeouts_are_reported() {
    let mut rng = StdRng::seed_from_u64(8);
    let m = Model::Dt(random_dt(&mut rng, 4, 8));
    let q = Query::global(Kind::GlobalAbductive, true, Minimality::Cardinality, None);
    let opts = Options { timeout: Some(Duration::from_secs(30)), ..Options::default() };
    assert!(explain_with_timeout(&m, &q, &opts).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_route_matches_the_oracle(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = StdRng::seed_from_u64(seed);
        for m in models(&mut rng, n) {
            let e = random_example(&mut rng, n);
            let c: bool = rng.gen();
            let k = rng.gen_range(0..=n);
            for min in [Minimality::Subset, Minimality::Cardinality] {
                for budget in [None, Some(k)] {
                    let qs = [
                        Query::local(Kind::LocalAbductive, e.clone(), min, budget),
                        Query::local(Kind::LocalContrastive, e.clone(), min, budget),
                        Query::global(Kind::GlobalAbductive, c, min, budget),
                        Query::global(Kind::GlobalContrastive, c, min, budget),
                    ];
                    for q in qs {
                        let oracle = oracle_min(&m, &q, DEFAULT_GUARD).unwrap();
                        let sol = explain(&m, &q, &Options::default()).unwrap();
                        prop_assert_eq!(sol.witness.is_some(), oracle.is_some());
                        if let Some(w) = sol.witness {
                            prop_assert!(verify(&m, &q, &w, true, DEFAULT_GUARD).unwrap());
                            prop_assert!(q.budget.is_none_or(|k| w.size() <= k));
                            if min == Minimality::Cardinality {
                                prop_assert_eq!(w.size(), oracle.as_ref().unwrap().size());
                            }
                        }
                        let forced = Options { route: Some(Route::BruteForce), ..Options::default() };
                        prop_assert_eq!(explain(&m, &q, &forced).unwrap().witness, oracle);
                    }
                }
            }
        }
    }
}
