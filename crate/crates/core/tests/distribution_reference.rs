//! Distribution functions against 50-digit reference values.

use sharpe_core::special::{f_cdf, normal_cdf, normal_inv, t_cdf, t_inv};

const REFERENCE: &str = include_str!("fixtures/distribution_reference.csv");

struct Point {
    function: String,
    args: Vec<f64>,
    expected: f64,
}

fn points() -> Vec<Point> {
    let mut reader = csv::Reader::from_reader(REFERENCE.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            Point {
                function: r[0].to_string(),
                args: (1..4).filter(|&i| !r[i].is_empty()).map(|i| r[i].parse().unwrap()).collect(),
                expected: r[4].parse().unwrap(),
            }
        })
        .collect()
}

fn eval(p: &Point) -> f64 {
    let a = &p.args;
    match p.function.as_str() {
        "normal_cdf" => normal_cdf(a[0]),
        "normal_inv" => normal_inv(a[0]).unwrap(),
        "t_cdf" => t_cdf(a[0], a[1]).unwrap(),
        "t_inv" => t_inv(a[0], a[1]).unwrap(),
        "f_cdf" => f_cdf(a[0], a[1], a[2]).unwrap(),
        other => panic!("unknown function {other}"),
    }
}

/// Worst absolute error per function over the reference set.
fn worst_errors() -> Vec<(String, f64, usize)> {
    let mut worst: Vec<(String, f64, usize)> = Vec::new();
    for p in points() {
        let err = (eval(&p) - p.expected).abs();
        match worst.iter_mut().find(|w| w.0 == p.function) {
            Some(w) => {
                w.1 = w.1.max(err);
                w.2 += 1;
            }
            None => worst.push((p.function.clone(), err, 1)),
        }
    }
    worst
}

#[test]
fn two_hundred_points() {
    assert_eq!(points().len(), 200);
}

#[test]
fn every_point_within_1e_10() {
    for p in points() {
        let got = eval(&p);
        let err = (got - p.expected).abs();
        assert!(err <= 1e-10, "{}({:?}) = {got}, expected {}, error {err:e}", p.function, p.args, p.expected);
    }
}

#[test]
fn error_summary() {
    for (f, err, count) in worst_errors() {
        eprintln!("{f:<12} {count:>3} points, worst abs error {err:.2e}");
    }
}
