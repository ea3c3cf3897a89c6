mod common;

use climbrank::io::{parse_competition_csv, read_competition, write_competition_csv};
use climbrank::pca::{correlation_matrix, pca, PerformanceMatrix};
use climbrank::{AggregationMethod, Discipline, RoundKind, RoundResult};
use common::fixture;

const FILES: [&str; 4] = [
    "tokyo2020_women_qual.csv",
    "tokyo2020_women_final.csv",
    "yog2018_women_qual.csv",
    "yog2018_women_final.csv",
];

#[test]
fn fixtures_load_with_expected_shapes() {
    let sizes = [
        (20, RoundKind::Qualification),
        (8, RoundKind::Final),
        (21, RoundKind::Qualification),
        (6, RoundKind::Final),
    ];
    for (name, (n, kind)) in FILES.iter().zip(sizes) {
        let r = parse_competition_csv(fixture(name)).unwrap();
        assert_eq!(r.len(), n, "{name}");
        assert_eq!(r.kind(), kind, "{name}");
        for (e, &p) in r.entries().iter().zip(r.placements()) {
            let official = e.official.unwrap();
            assert_eq!(official.total, Some(e.ranks.product()));
            assert_eq!(official.place, Some(p));
        }
    }
}

#[test]
fn raw_performances_reproduce_discipline_ranks() {
    let r = parse_competition_csv(fixture("tokyo2020_women_qual.csv")).unwrap();
    let rebuilt = RoundResult::from_performances(
        RoundKind::Qualification,
        r.entries().iter().map(|e| e.climber.clone()).collect(),
        r.entries().iter().map(|e| e.raw.clone()).collect(),
        AggregationMethod::Product,
    )
    .unwrap();
    for (a, b) in r.entries().iter().zip(rebuilt.entries()) {
        for d in Discipline::ALL {
            assert_eq!(a.ranks.get(d), b.ranks.get(d), "{} {d}", a.climber.id);
        }
    }
    assert_eq!(r.placements(), rebuilt.placements());
}

#[test]
fn csv_round_trip_is_lossless() {
    for name in FILES {
        let r = parse_competition_csv(fixture(name)).unwrap();
        let mut buf = Vec::new();
        write_competition_csv(&r, &mut buf).unwrap();
        let back = read_competition(buf.as_slice(), Some(r.kind()), r.method()).unwrap();
        assert_eq!(back, r, "{name}");
        let mut again = Vec::new();
        write_competition_csv(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }
}

#[test]
fn pca_separates_speed_from_boulder_and_lead() {
    let r = parse_competition_csv(fixture("tokyo2020_women_qual.csv")).unwrap();
    let (m, kept) = PerformanceMatrix::from_round(&r).unwrap();
    assert_eq!(kept.len(), 20);
    let p = pca(&m).unwrap();
    // Variables: 0 speed time, 1 boulder tops, 2 lead hold.
    assert_eq!(p.loading(1, 0).signum(), p.loading(2, 0).signum());
    assert!(p.loading(0, 1).abs() > p.loading(1, 1).abs());
    assert!(p.loading(0, 1).abs() > p.loading(2, 1).abs());
}

#[test]
fn loadings_and_eigenvalues_recompose_the_correlation_matrix() {
    let r = parse_competition_csv(fixture("tokyo2020_women_qual.csv")).unwrap();
    let (m, _) = PerformanceMatrix::from_round(&r).unwrap();
    let p = pca(&m).unwrap();
    let (corr, _, _) = correlation_matrix(&m).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let v: f64 = (0..3)
                .map(|k| p.loadings[a][k] * p.eigenvalues[k] * p.loadings[b][k])
                .sum();
            assert!((v - corr[a][b]).abs() < 1e-10);
        }
    }
}
