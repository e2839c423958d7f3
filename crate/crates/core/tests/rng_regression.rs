use exchmat::rng::{rng_stream, sample_permutation, Permutation};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const FIXTURE: &str = include_str!("fixtures/rng_vectors.txt");

#[test]
fn streams_match_frozen_vectors() {
    let mut checked = 0;
    for line in FIXTURE.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let master: u64 = fields[0].parse().unwrap();
        let stream: u64 = fields[1].parse().unwrap();
        let mut rng = rng_stream(master, stream);
        for hex in &fields[2..] {
            assert_eq!(rng.next_u64(), u64::from_str_radix(hex, 16).unwrap(), "stream ({master}, {stream})");
        }
        checked += 1;
    }
    assert_eq!(checked, 5);
}

#[test]
fn neighbouring_streams_diverge() {
    let mut a = rng_stream(42, 0);
    let mut b = rng_stream(42, 1);
    let differ = (0..100).filter(|_| a.next_u64() != b.next_u64()).count();
    assert!(differ >= 90, "{differ}");
}

/// Lexicographic rank of a permutation of `0..m`.
fn rank(p: &[usize]) -> usize {
    let m = p.len();
    let mut r = 0;
    for i in 0..m {
        let smaller = p[i + 1..].iter().filter(|&&v| v < p[i]).count();
        r = r * (m - i) + smaller;
    }
    r
}

fn factorial(m: usize) -> usize {
    (1..=m).product()
}

fn chi_square_p(counts: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = counts.iter().zip(expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = (counts.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

/// Two-sample homogeneity test on a `2 x k` table.
fn homogeneity_p(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let total = na + nb;
    let mut stat = 0.0;
    for (x, y) in a.iter().zip(b) {
        let col = x + y;
        let (ea, eb) = (na * col / total, nb * col / total);
        stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    1.0 - ChiSquared::new((a.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn rank_enumerates_all_permutations() {
    let mut seen = [false; 24];
    Permutation::for_each_of(4, |p| seen[rank(p)] = true);
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn three_cell_permutations_are_uniform() {
    let mut rng = rng_stream(2024, 3);
    let draws = 60_000;
    let mut counts = vec![0.0; 6];
    for _ in 0..draws {
        counts[rank(sample_permutation(&mut rng, 3).unwrap().as_slice())] += 1.0;
    }
    for c in &counts {
        assert!((c / draws as f64 - 1.0 / 6.0).abs() < 0.01, "{counts:?}");
    }
    let p = chi_square_p(&counts, &[draws as f64 / 6.0; 6]);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn composition_preserves_the_law() {
    let sigma = Permutation::from_map(vec![2, 0, 3, 1]).unwrap();
    let draws = 100_000;
    let mut plain = vec![0.0; factorial(4)];
    let mut composed = vec![0.0; factorial(4)];
    let mut r1 = rng_stream(77, 0);
    let mut r2 = rng_stream(77, 1);
    for _ in 0..draws {
        plain[rank(sample_permutation(&mut r1, 4).unwrap().as_slice())] += 1.0;
        let p = sample_permutation(&mut r2, 4).unwrap();
        composed[rank(p.compose(&sigma).as_slice())] += 1.0;
    }
    let p = homogeneity_p(&plain, &composed);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn single_cell_and_empty_domain() {
    let mut rng = rng_stream(1, 1);
    assert_eq!(sample_permutation(&mut rng, 1).unwrap(), Permutation::identity(1));
    assert!(sample_permutation(&mut rng, 0).is_err());
}
