//! Reproduction of the 2D boundary-complexity experiments: small MLPs
//! trained under plain cross-entropy, Gaussian noise injection, or FGSM
//! adversarial training, with exact piece counts tracked per checkpoint.
//!
//! Training itself is ordinary f64 SGD; every checkpoint snapshot is
//! converted exactly to rationals and counted with the dual-space engine,
//! never with the oracle.

pub mod data;
pub mod mlp;

pub use data::{gen_gaussian_mixture, gen_spiral, Dataset, DatasetRole};
pub use mlp::{fgsm_perturb, FloatNet, SgdMomentum};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use num_traits::Zero;

use crate::counts::{count_affine_pieces, count_boundary_pieces};
use crate::error::{Error, Result};
use crate::geometry::scalar::{scalar_to_f64, Scalar};
use crate::tropical::{dcpa_extract, NetworkSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Ce,
    Noisy,
    Adv,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Ce => "ce",
            Regime::Noisy => "noisy",
            Regime::Adv => "adv",
        }
    }

    pub fn parse(s: &str) -> Result<Regime> {
        match s {
            "ce" => Ok(Regime::Ce),
            "noisy" => Ok(Regime::Noisy),
            "adv" => Ok(Regime::Adv),
            other => Err(Error::Parse(format!("unknown regime {other:?}"))),
        }
    }
}

/// Everything that determines a training run.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    /// Layer widths including input and output, e.g. `[2, 30, 30, 1]`.
    pub widths: Vec<usize>,
    pub regime: Regime,
    /// Noise standard deviation (Noisy) or FGSM ε (Adv); unused for CE.
    pub strength: f64,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub iterations: u64,
    /// Checkpoints (with exact counts) every this many iterations; the
    /// initial and final nets are always included.
    pub checkpoint_stride: u64,
    pub seed: u64,
    /// When set, each checkpoint also measures R(σ) at this σ.
    pub robustness_sigma: Option<f64>,
    /// Number of noisy draws for R(σ).
    pub robustness_draws: usize,
}

impl TrainConfig {
    /// Spiral preset: widths 2-30-30-1, strengths 0.01, R(0.02).
    pub fn spiral(regime: Regime, seed: u64) -> TrainConfig {
        TrainConfig {
            widths: vec![2, 30, 30, 1],
            regime,
            strength: 0.01,
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.001,
            batch_size: 64,
            iterations: 15000,
            checkpoint_stride: 250,
            seed,
            robustness_sigma: Some(0.02),
            robustness_draws: 2000,
        }
    }

    /// Gaussian-mixture preset: widths 2-10-10-1, strengths 0.1, R(0.2).
    pub fn gaussian(regime: Regime, seed: u64) -> TrainConfig {
        TrainConfig {
            widths: vec![2, 10, 10, 1],
            regime,
            strength: 0.1,
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.001,
            batch_size: 64,
            iterations: 15000,
            checkpoint_stride: 250,
            seed,
            robustness_sigma: Some(0.2),
            robustness_draws: 2000,
        }
    }
}

/// Per-checkpoint metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendRecord {
    pub iteration: u64,
    pub boundary: u64,
    pub total: u64,
    pub fnorm: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub robustness: Option<f64>,
}

/// A completed (or diverged) training trajectory.
#[derive(Clone, Debug)]
pub struct TrainRun {
    pub checkpoints: Vec<(NetworkSpec, TrendRecord)>,
    /// Iteration at which the loss became non-finite, if it did; the
    /// checkpoints gathered so far are kept.
    pub diverged_at: Option<u64>,
}

impl TrainRun {
    pub fn final_record(&self) -> &TrendRecord {
        &self.checkpoints.last().expect("at least the initial checkpoint").1
    }
}

/// Sum of squared weight-matrix entries, biases excluded, exact.
pub fn f_norm(net: &NetworkSpec) -> Scalar {
    let mut acc = Scalar::zero();
    for layer in &net.layers {
        for i in 0..layer.weights.rows() {
            for w in layer.weights.row(i) {
                if !w.is_zero() {
                    acc += w * w;
                }
            }
        }
    }
    acc
}

fn accuracy(net: &FloatNet, data: &Dataset) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let correct = data
        .points
        .iter()
        .filter(|(x, label)| net.predict(x) == *label)
        .count();
    100.0 * correct as f64 / data.len() as f64
}

/// Percentage of noisy test points classified correctly: draws cycle
/// through the test set so that σ = 0 reproduces the clean accuracy.
pub fn robustness(net: &FloatNet, test: &Dataset, sigma: f64, draws: usize, seed: u64) -> f64 {
    assert!(draws >= 1 && !test.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma.max(0.0)).unwrap();
    let mut correct = 0usize;
    for k in 0..draws {
        let (x, label) = test.points[k % test.len()];
        let noisy = [x[0] + noise.sample(&mut rng), x[1] + noise.sample(&mut rng)];
        if net.predict(&noisy) == label {
            correct += 1;
        }
    }
    100.0 * correct as f64 / draws as f64
}

/// Centered moving average with shrinking windows at the ends.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1);
    let n = series.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub((window - 1) / 2);
            let hi = (i + window / 2).min(n.saturating_sub(1));
            let slice = &series[lo..=hi];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

fn checkpoint_metrics(
    net: &FloatNet,
    iteration: u64,
    train_data: &Dataset,
    test_data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(NetworkSpec, TrendRecord)> {
    let spec = net.to_network_spec()?;
    let f = dcpa_extract(&spec)?;
    let boundary = count_boundary_pieces(&f)?;
    let total = count_affine_pieces(&f)?;
    let record = TrendRecord {
        iteration,
        boundary: boundary.boundary_piece_count as u64,
        total: total as u64,
        fnorm: scalar_to_f64(&f_norm(&spec)),
        train_acc: accuracy(net, train_data),
        test_acc: accuracy(net, test_data),
        robustness: cfg.robustness_sigma.map(|sigma| {
            robustness(
                net,
                test_data,
                sigma,
                cfg.robustness_draws,
                cfg.seed ^ 0x6f0b_5ca1 ^ iteration,
            )
        }),
    };
    Ok((spec, record))
}

/// Runs SGD with momentum under the configured regime, taking an exact
/// snapshot with counts at every checkpoint.
pub fn train(train_data: &Dataset, test_data: &Dataset, cfg: &TrainConfig) -> Result<TrainRun> {
    if train_data.is_empty() {
        return Err(Error::Parse("empty training set".into()));
    }
    if cfg.batch_size == 0 || cfg.widths.len() < 2 || *cfg.widths.last().unwrap() != 1 {
        return Err(Error::Parse("invalid training configuration".into()));
    }
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = FloatNet::init(&cfg.widths, &mut init_rng);
    let mut opt = SgdMomentum::new(&net, cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    let mut batch_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xb47c_4e55);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4015_e000);

    let mut checkpoints = Vec::new();
    let mut diverged_at = None;
    for t in 0..=cfg.iterations {
        if t % cfg.checkpoint_stride.max(1) == 0 || t == cfg.iterations {
            checkpoints.push(checkpoint_metrics(&net, t, train_data, test_data, cfg)?);
        }
        if t == cfg.iterations {
            break;
        }
        // assemble the (possibly transformed) batch
        let mut batch: Vec<([f64; 2], i8)> = (0..cfg.batch_size)
            .map(|_| train_data.points[batch_rng.gen_range(0..train_data.len())])
            .collect();
        match cfg.regime {
            Regime::Ce => {}
            Regime::Noisy => {
                let noise = Normal::new(0.0, cfg.strength).unwrap();
                for (x, _) in batch.iter_mut() {
                    x[0] += noise.sample(&mut noise_rng);
                    x[1] += noise.sample(&mut noise_rng);
                }
            }
            Regime::Adv => {
                for (x, label) in batch.iter_mut() {
                    *x = fgsm_perturb(&net, *x, *label, cfg.strength);
                }
            }
        }
        let mut grads = net.zero_grads();
        let (loss, _) = net.backward_batch(&batch, &mut grads);
        if !loss.is_finite() {
            diverged_at = Some(t);
            break;
        }
        opt.step(&mut net, &grads);
    }
    Ok(TrainRun {
        checkpoints,
        diverged_at,
    })
}

// --- trend CSV -------------------------------------------------------------

pub const TREND_CSV_HEADER: &str = "iteration,boundary,total,fnorm,train_acc,test_acc,robustness";

pub fn write_trend_csv(records: &[TrendRecord]) -> String {
    let mut out = String::from(TREND_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.iteration,
            r.boundary,
            r.total,
            r.fnorm,
            r.train_acc,
            r.test_acc,
            r.robustness.map_or(String::new(), |v| v.to_string()),
        ));
    }
    out
}

pub fn parse_trend_csv(text: &str) -> Result<Vec<TrendRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    if header.trim() != TREND_CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut out = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse(format!("CSV line {}: {} fields", ln + 2, fields.len())));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("CSV line {}: bad {what} {s:?}", ln + 2)))
        };
        out.push(TrendRecord {
            iteration: num(fields[0], "iteration")? as u64,
            boundary: num(fields[1], "boundary")? as u64,
            total: num(fields[2], "total")? as u64,
            fnorm: num(fields[3], "fnorm")?,
            train_acc: num(fields[4], "train_acc")?,
            test_acc: num(fields[5], "test_acc")?,
            robustness: if fields[6].trim().is_empty() {
                None
            } else {
                Some(num(fields[6], "robustness")?)
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&[1.0, 2.0, 3.0], 1), vec![1.0, 2.0, 3.0]);
        assert_eq!(moving_average(&[5.0; 4], 3), vec![5.0; 4]);
        assert_eq!(
            moving_average(&[1.0, 2.0, 3.0, 4.0, 5.0], 3),
            vec![1.5, 2.0, 3.0, 4.0, 4.5]
        );
    }

    #[test]
    fn f_norm_examples() {
        let net = crate::tropical::NetworkSpec::new(
            2,
            vec![crate::tropical::Layer {
                weights: crate::geometry::dual::Matrix::zeros(3, 2),
                bias: vec![crate::geometry::scalar::scalar_int(7); 3],
                activation: crate::tropical::Activation::Linear,
            }],
        )
        .unwrap();
        // biases excluded
        assert!(f_norm(&net).is_zero());

        // fresh inits: E[w²] = 1/(3·fan_in) per weight; over 10 seeds the
        // 2-10-10-1 mean is near 7.0 and 2-30-30-1 near 20.3
        for (widths, expect, tol) in [
            (vec![2usize, 10, 10, 1], 7.0, 1.2),
            (vec![2, 30, 30, 1], 20.3, 1.5),
        ] {
            let mut total = 0.0;
            for seed in 0..10u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let net = FloatNet::init(&widths, &mut rng);
                total += scalar_to_f64(&f_norm(&net.to_network_spec().unwrap()));
            }
            let mean = total / 10.0;
            assert!(
                (mean - expect).abs() < tol,
                "widths {widths:?}: mean init F-norm {mean}"
            );
        }
    }

    #[test]
    fn robustness_at_zero_sigma_is_clean_accuracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = FloatNet::init(&[2, 6, 1], &mut rng);
        let test = gen_gaussian_mixture(100, 5, DatasetRole::Test);
        let clean = accuracy(&net, &test);
        let r0 = robustness(&net, &test, 0.0, test.len(), 17);
        assert_eq!(clean, r0);
    }

    #[test]
    fn training_is_deterministic_and_learns_the_mixture() {
        let train_data = gen_gaussian_mixture(150, 40, DatasetRole::Train);
        let test_data = gen_gaussian_mixture(150, 41, DatasetRole::Test);
        let cfg = TrainConfig {
            widths: vec![2, 8, 8, 1],
            regime: Regime::Ce,
            strength: 0.0,
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.001,
            batch_size: 32,
            iterations: 600,
            checkpoint_stride: 300,
            seed: 7,
            robustness_sigma: Some(0.2),
            robustness_draws: 300,
        };
        let a = train(&train_data, &test_data, &cfg).unwrap();
        let b = train(&train_data, &test_data, &cfg).unwrap();
        assert!(a.diverged_at.is_none());
        assert_eq!(a.checkpoints.len(), 3); // iterations 0, 300, 600
        for ((na, ra), (nb, rb)) in a.checkpoints.iter().zip(&b.checkpoints) {
            assert_eq!(ra, rb);
            assert_eq!(na.layers[0].weights, nb.layers[0].weights);
        }
        let last = a.final_record();
        assert!(last.train_acc > 85.0, "final train accuracy {}", last.train_acc);
        assert!(last.boundary > 0 && last.total > 0);
        assert!(last.robustness.is_some());
        // counts at checkpoints come from the exact snapshot
        let (spec, rec) = &a.checkpoints[2];
        let f = dcpa_extract(spec).unwrap();
        assert_eq!(
            count_affine_pieces(&f).unwrap() as u64,
            rec.total,
            "trend totals re-derivable from the snapshot"
        );
    }

    #[test]
    fn noisy_and_adv_regimes_differ_from_ce() {
        let train_data = gen_spiral(60, 1, DatasetRole::Train);
        let test_data = gen_spiral(60, 2, DatasetRole::Test);
        let mut cfg = TrainConfig {
            widths: vec![2, 6, 1],
            regime: Regime::Ce,
            strength: 0.01,
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.001,
            batch_size: 16,
            iterations: 50,
            checkpoint_stride: 50,
            seed: 3,
            robustness_sigma: None,
            robustness_draws: 1,
        };
        let ce = train(&train_data, &test_data, &cfg).unwrap();
        cfg.regime = Regime::Noisy;
        let noisy = train(&train_data, &test_data, &cfg).unwrap();
        cfg.regime = Regime::Adv;
        let adv = train(&train_data, &test_data, &cfg).unwrap();
        let w = |r: &TrainRun| r.checkpoints.last().unwrap().0.layers[0].weights.clone();
        assert_ne!(w(&ce), w(&noisy));
        assert_ne!(w(&ce), w(&adv));
        assert_ne!(w(&noisy), w(&adv));
    }

    #[test]
    fn csv_round_trip() {
        let records = vec![
            TrendRecord {
                iteration: 0,
                boundary: 12,
                total: 200,
                fnorm: 6.5,
                train_acc: 50.0,
                test_acc: 49.5,
                robustness: None,
            },
            TrendRecord {
                iteration: 250,
                boundary: 40,
                total: 180,
                fnorm: 21.25,
                train_acc: 99.0,
                test_acc: 98.5,
                robustness: Some(97.25),
            },
        ];
        let text = write_trend_csv(&records);
        assert!(text.starts_with(TREND_CSV_HEADER));
        let back = parse_trend_csv(&text).unwrap();
        assert_eq!(back, records);
        assert!(parse_trend_csv("nonsense\n1,2\n").is_err());
    }
}
