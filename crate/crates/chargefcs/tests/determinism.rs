//! Stochastic engines must not depend on the worker count.

use chargefcs::acceptance::determinism_specs;
use chargefcs::engines::execute;
use chargefcs::Pool;

#[test]
fn csv_bytes_independent_of_thread_count() {
    let one = Pool::new(1).unwrap();
    let three = Pool::new(3).unwrap();
    for spec in determinism_specs().unwrap() {
        let a = execute(&spec, &one).unwrap().to_csv_bytes().unwrap();
        let b = execute(&spec, &three).unwrap().to_csv_bytes().unwrap();
        assert_eq!(a, b, "{}", spec.engine);
        assert!(a.len() > 100);
    }
}
