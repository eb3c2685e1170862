use crysred::engine::{run_pass, vanishing_start, Pass};
use crysred::linalg::{FpEchelon, SparseVector};
use crysred::padic::{ApExpression, LocalRing, Zpn};
use crysred::tree::{CoordinateSpace, HeckeTables, TreeVertex};
use crysred::{compute_reduction, Error, GaloisRep, Limits, Mode, Rational, StepOutcome};

fn echelon(p: u64, rows: &[SparseVector<u64>]) -> FpEchelon {
    let mut e = FpEchelon::new(p);
    for r in rows {
        e.insert(r);
    }
    e
}

fn contains_all(e: &FpEchelon, rows: &[SparseVector<u64>]) -> bool {
    rows.iter().all(|r| e.residual(r, 0).is_empty())
}

fn pass(p: u64, k: u64, ap: &str, n: u32, d: u32, mode: Mode) -> Pass {
    let expr: ApExpression = ap.parse().unwrap();
    run_pass(p, k, &expr, n, d, &Limits { mode, ..Limits::default() }).unwrap()
}

#[test]
fn modes_give_the_same_span() {
    for (p, k, ap, n, d) in [
        (5, 24, "2*5", 2, 6),
        (3, 23, "3*sqrt(30)*19 + 3^2", 3, 8),
        (5, 24, "5*sqrt(11*21) + 5^2", 3, 8),
        (5, 25, "5*sqrt(5)*21*sqrt(11) + 5^2", 2, 6),
    ] {
        let a = pass(p, k, ap, n, d, Mode::Baseline);
        let b = pass(p, k, ap, n, d, Mode::Subtree);
        assert!(!a.span.saw_zero && !b.span.saw_zero);
        assert_eq!(a.span.delta_units, b.span.delta_units, "{ap}");
        let (ea, eb) = (echelon(p, &a.span.rows), echelon(p, &b.span.rows));
        assert_eq!(ea.rank(), eb.rank(), "{ap}");
        assert_eq!(ea.pivot_columns(), eb.pivot_columns(), "{ap}");
        assert!(contains_all(&ea, &b.span.rows) && contains_all(&eb, &a.span.rows), "{ap}");
        assert_eq!(a.outcomes, b.outcomes, "{ap}");
    }
}

#[test]
fn x_to_the_r_is_a_relation_at_radius_one() {
    for (p, k) in [(5u64, 24u64), (3, 11), (7, 20)] {
        let r = (k - 2) as usize;
        let ring = Zpn::new(p, 8);
        let tab = HeckeTables::new(p, r, 8).unwrap();
        let span = crysred::engine::build_relations(&ring, &tab, ring.from_i128(2 * p as i128), 1, Mode::Subtree).unwrap();
        let space = CoordinateSpace::new(p, 2, r);
        let e = echelon(p, &span.rows);
        let zero = crysred::engine::build_relations(&ring, &tab, ring.from_i128(2 * p as i128), 0, Mode::Subtree).unwrap();
        let e0 = echelon(p, &zero.rows);
        let origin = SparseVector { entries: vec![(CoordinateSpace::new(p, 1, r).id(TreeVertex::ORIGIN, 0), 1)] };
        assert!(!e0.residual(&origin, 0).is_empty());
        let xr = SparseVector { entries: vec![(space.id(TreeVertex::ORIGIN, 0), 1)] };
        assert!(e.residual(&xr, 0).is_empty(), "p={p} k={k}");
        // [w, X^r] = [1, Y^r]
        let yr = SparseVector { entries: vec![(space.id(TreeVertex::ORIGIN, r), 1)] };
        assert!(e.residual(&yr, 0).is_empty(), "p={p} k={k}");
    }
}

#[test]
fn reductions() {
    let l = Limits::default();
    let red = compute_reduction(5, 24, "2*5", &l).unwrap();
    assert_eq!(red.galois, Some(GaloisRep::Induced { m: 3 }));
    assert_eq!((red.delta, red.n_used), (Rational::from_integer(2), 2));
    assert!(red.constancy.as_ref().unwrap().weight.is_none());

    let far = compute_reduction(5, 24, "2*5 + 5^4", &l).unwrap();
    assert_eq!(far.galois, red.galois);

    let red = compute_reduction(7, 31, "7^2*sqrt(7)", &l).unwrap();
    assert_eq!(red.galois, Some(GaloisRep::parse(7, "ind w2^30").unwrap()));
    assert_eq!((red.delta, red.n_used), (Rational::from_integer(3), 2));

    let red = compute_reduction(5, 17, "5*sqrt(5)*13*sqrt(7)", &l).unwrap();
    assert_eq!(red.galois, Some(GaloisRep::Split { n: 2, c: 0 }));
    assert_eq!((red.delta, red.n_used), (Rational::new(5, 2), 3));
    let f2 = red.outcomes.iter().find(|s| s.i == 2).unwrap();
    assert_eq!((f2.a, f2.b, f2.outcome), (3, 2, StepOutcome::Quadratic(0)));
}

#[test]
fn weight_two_completes() {
    let red = compute_reduction(5, 2, "5", &Limits::default()).unwrap();
    assert!(red.is_determined());
    assert_eq!(red.outcomes.len(), 1);
}

#[test]
fn rejected_inputs() {
    let l = Limits::default();
    let invalid = |r: Result<_, Error>| matches!(r, Err(Error::InvalidInput(_)));
    assert!(invalid(compute_reduction(5, 24, "0", &l)));
    assert!(invalid(compute_reduction(5, 24, "3", &l)));
    assert!(invalid(compute_reduction(5, 1, "5", &l)));
    assert!(invalid(compute_reduction(2, 10, "2", &l)));
    assert!(matches!(compute_reduction(5, 24, "sqrt(", &l), Err(Error::Parse(_))));
}

#[test]
fn fixed_precision_too_small() {
    let l = Limits { d_override: Some(1), ..Limits::default() };
    assert!(matches!(compute_reduction(5, 24, "2*5", &l), Err(Error::PrecisionExhausted(_))));
}

#[test]
fn skipped_steps_vanish_when_computed() {
    for (p, k, ap) in [(5, 24, "2*5"), (5, 27, "5^2*sqrt(10)")] {
        let plain = compute_reduction(p, k, ap, &Limits::default()).unwrap();
        let l = Limits { compute_skipped: true, ..Limits::default() };
        let red = compute_reduction(p, k, ap, &l).unwrap();
        let v = red.v_ap.floor().to_integer();
        let from = vanishing_start(p, (k - 2) as usize, v).unwrap();
        let mut seen = 0;
        for s in &red.outcomes {
            if s.i == 1 || s.i >= from {
                assert_eq!(s.outcome, StepOutcome::Zero, "{ap} step {}", s.i);
                seen += 1;
            }
        }
        assert!(seen >= 2);
        assert_eq!(red.galois, plain.galois);
    }
}
