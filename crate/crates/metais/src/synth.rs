//! Synthetic benchmark dataset generators. All of them are deterministic in
//! the seed and produce two- or three-class numeric datasets with known
//! structure: curved class boundaries, heavy overlap, or clean blobs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::Result;

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn finish(
    name: &str,
    features: Vec<f64>,
    m: usize,
    labels: Vec<usize>,
    class_names: Vec<String>,
) -> Result<Dataset> {
    let n = labels.len();
    let feature_names = (1..=m).map(|i| format!("At{i}")).collect();
    Dataset::new(name, features, n, m, labels, feature_names, class_names)
}

/// Two banana-shaped interleaved clusters in the plane: points along two
/// offset circular arcs of radius 5 with unit Gaussian noise.
pub fn banana(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = 5.0;
    let n0 = n / 2;
    let mut features = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let first = i < n0;
        let (x, y) = if first {
            let a = 0.125 * std::f64::consts::PI + rng.random::<f64>() * 1.25 * std::f64::consts::PI;
            (r * a.sin(), r * a.cos())
        } else {
            let a = 0.375 * std::f64::consts::PI - rng.random::<f64>() * 1.25 * std::f64::consts::PI;
            (r * a.sin() - 0.75 * r, r * a.cos() - 0.75 * r)
        };
        features.push(x + normal(&mut rng));
        features.push(y + normal(&mut rng));
        labels.push(usize::from(!first));
    }
    finish(
        "banana",
        features,
        2,
        labels,
        vec!["-1.0".into(), "1.0".into()],
    )
}

/// Two overlapping 20-dimensional Gaussians on opposite shifted means.
pub fn twonorm(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 20;
    let a = 2.0 / (m as f64).sqrt();
    let mut features = Vec::with_capacity(n * m);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let first = i < n / 2;
        let mu = if first { a } else { -a };
        for _ in 0..m {
            features.push(mu + normal(&mut rng));
        }
        labels.push(usize::from(!first));
    }
    finish("twonorm", features, m, labels, vec!["1".into(), "2".into()])
}

/// One wide and one narrow shifted Gaussian in 20 dimensions; the optimal
/// boundary is a ring.
pub fn ringnorm(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 20;
    let a = 1.0 / (m as f64).sqrt();
    let mut features = Vec::with_capacity(n * m);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let first = i < n / 2;
        for _ in 0..m {
            if first {
                features.push(2.0 * normal(&mut rng));
            } else {
                features.push(a + normal(&mut rng));
            }
        }
        labels.push(usize::from(!first));
    }
    finish("ringnorm", features, m, labels, vec!["1".into(), "2".into()])
}

/// Two interleaving half-circles with Gaussian jitter.
pub fn moons(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n0 = n / 2;
    let mut features = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let first = i < n0;
        let t = rng.random::<f64>() * std::f64::consts::PI;
        let (x, y) = if first {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.5 - t.sin())
        };
        features.push(x + noise * normal(&mut rng));
        features.push(y + noise * normal(&mut rng));
        labels.push(usize::from(!first));
    }
    finish("moons", features, 2, labels, vec!["0".into(), "1".into()])
}

/// `c` spherical Gaussian clusters spread on a circle in the first two of
/// `m` dimensions.
pub fn blobs(n: usize, c: usize, m: usize, spread: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n * m);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % c;
        let angle = 2.0 * std::f64::consts::PI * class as f64 / c as f64;
        for d in 0..m {
            let center = match d {
                0 => 4.0 * angle.cos(),
                1 => 4.0 * angle.sin(),
                _ => 0.0,
            };
            features.push(center + spread * normal(&mut rng));
        }
        labels.push(class);
    }
    let class_names = (0..c).map(|i| format!("c{i}")).collect();
    finish("blobs", features, m, labels, class_names)
}

/// Two interleaved Archimedean spirals with jitter.
pub fn spirals(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n0 = n / 2;
    let mut features = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let first = i < n0;
        let t = 0.5 + 3.0 * rng.random::<f64>(); // radius grows with angle
        let angle = 2.5 * t + if first { 0.0 } else { std::f64::consts::PI };
        features.push(t * angle.cos() + noise * normal(&mut rng));
        features.push(t * angle.sin() + noise * normal(&mut rng));
        labels.push(usize::from(!first));
    }
    finish("spirals", features, 2, labels, vec!["a".into(), "b".into()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banana_shape_and_determinism() {
        let d = banana(5300, 17).unwrap();
        assert_eq!(d.n_rows(), 5300);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.n_classes(), 2);
        let again = banana(5300, 17).unwrap();
        assert_eq!(d, again);
        let other = banana(5300, 18).unwrap();
        assert_ne!(d, other);
        // Both classes populated roughly evenly.
        let counts = d.class_counts();
        assert_eq!(counts[0], 2650);
        assert_eq!(counts[1], 2650);
    }

    #[test]
    fn generators_have_declared_shapes() {
        let d = twonorm(400, 1).unwrap();
        assert_eq!((d.n_rows(), d.n_features(), d.n_classes()), (400, 20, 2));
        let d = ringnorm(400, 1).unwrap();
        assert_eq!((d.n_rows(), d.n_features(), d.n_classes()), (400, 20, 2));
        let d = moons(300, 0.1, 1).unwrap();
        assert_eq!((d.n_rows(), d.n_features(), d.n_classes()), (300, 2, 2));
        let d = blobs(300, 3, 3, 0.8, 1).unwrap();
        assert_eq!((d.n_rows(), d.n_features(), d.n_classes()), (300, 3, 3));
        assert_eq!(d.class_counts(), vec![100, 100, 100]);
        let d = spirals(200, 0.05, 1).unwrap();
        assert_eq!((d.n_rows(), d.n_features(), d.n_classes()), (200, 2, 2));
    }

    #[test]
    fn blob_classes_are_separable_enough_for_1nn() {
        let d = blobs(240, 3, 2, 0.5, 5).unwrap();
        let acc = crate::isalgos::run(crate::isalgos::Algorithm::Enn, &d, 3)
            .unwrap()
            .reduction_rate();
        // Tight blobs: the noise filter finds almost nothing to remove.
        assert!(acc < 0.1, "reduction {acc}");
    }
}
