//! Synthetic 2D datasets for the boundary-complexity experiments.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use rand::SeedableRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetRole {
    Train,
    Test,
}

/// Labeled 2D points, labels in {−1, +1}.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub points: Vec<([f64; 2], i8)>,
    pub role: DatasetRole,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Two interleaved spirals: the curve
/// `(ρ sin θ + 0.04, ρ cos θ)` with `ρ = (θ/4π)^(4/5) + ε`,
/// `θ` uniform on `(0, 4π]` and `ε` uniform on `[−0.03, 0.03]`, plus its
/// mirror image through the origin. Points from the mirrored curve are the
/// positive class.
pub fn gen_spiral(n_per_class: usize, seed: u64, role: DatasetRole) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = Uniform::new_inclusive(-0.03, 0.03);
    let mut points = Vec::with_capacity(2 * n_per_class);
    for &(sign, label) in &[(1.0f64, -1i8), (-1.0, 1)] {
        for _ in 0..n_per_class {
            let theta = 4.0 * std::f64::consts::PI * (1.0 - rng.gen::<f64>());
            let rho = (theta / (4.0 * std::f64::consts::PI)).powf(0.8) + eps.sample(&mut rng);
            let p = [rho * theta.sin() + 0.04, rho * theta.cos()];
            points.push(([sign * p[0], sign * p[1]], label));
        }
    }
    Dataset { points, role }
}

/// Index of the mixture component of the positive (even-parity) class, or
/// of the negative class, for the 3×3 grid of means {−1, 0, 1}².
fn grid_components(positive: bool) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..3usize {
        for j in 0..3usize {
            if ((i + j) % 2 == 0) == positive {
                out.push((i as f64 - 1.0, j as f64 - 1.0));
            }
        }
    }
    out
}

/// The 3×3 Gaussian mixture: isotropic components with σ = 0.1 centered on
/// the grid {−1, 0, 1}², equal mixing weights, labeled by checkerboard
/// parity of the grid position.
pub fn gen_gaussian_mixture(n_per_class: usize, seed: u64, role: DatasetRole) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut points = Vec::with_capacity(2 * n_per_class);
    for &(positive, label) in &[(true, 1i8), (false, -1)] {
        let comps = grid_components(positive);
        for _ in 0..n_per_class {
            let (cx, cy) = comps[rng.gen_range(0..comps.len())];
            points.push((
                [cx + noise.sample(&mut rng), cy + noise.sample(&mut rng)],
                label,
            ));
        }
    }
    Dataset { points, role }
}
