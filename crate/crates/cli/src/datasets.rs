//! Seeded synthetic samples bundled with the CLI, used whenever no input file
//! is given. Every generator is deterministic in `(name, n, seed)`.

use std::fmt;
use std::str::FromStr;

use fastkde::SampleMatrix;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dataset {
    /// Two elongated, oppositely tilted clusters in 2-d.
    Bimodal,
    /// A single Gaussian with correlation 0.9 in 2-d.
    Correlated,
    /// Curved "banana" density in 2-d.
    Banana,
    /// Three Gaussian clusters in 3-d.
    Trimodal3d,
    /// Skewed univariate mixture.
    Skewed1d,
}

impl Dataset {
    pub const ALL: [Dataset; 5] = [
        Dataset::Bimodal,
        Dataset::Correlated,
        Dataset::Banana,
        Dataset::Trimodal3d,
        Dataset::Skewed1d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Bimodal => "bimodal",
            Dataset::Correlated => "correlated",
            Dataset::Banana => "banana",
            Dataset::Trimodal3d => "trimodal3d",
            Dataset::Skewed1d => "skewed1d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Dataset::Skewed1d => 1,
            Dataset::Trimodal3d => 3,
            _ => 2,
        }
    }

    pub fn generate(self, n: usize, seed: u64) -> SampleMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
        let d = self.dim();
        let mut out = Array2::zeros((n, d));
        for (i, mut row) in out.rows_mut().into_iter().enumerate() {
            match self {
                Dataset::Bimodal => {
                    let (mx, my, rho) = if i % 2 == 0 { (-1.5, 1.0, -0.8) } else { (1.5, -1.0, 0.6) };
                    let (a, b) = (z(), z());
                    row[0] = mx + 0.6 * a;
                    row[1] = my + 0.6 * (rho * a + (1.0f64 - rho * rho).sqrt() * b);
                }
                Dataset::Correlated => {
                    let (a, b) = (z(), z());
                    row[0] = a;
                    row[1] = 0.9 * a + 0.19f64.sqrt() * b;
                }
                Dataset::Banana => {
                    let (a, b) = (z(), z());
                    row[0] = 2.0 * a;
                    row[1] = 0.5 * b + 0.25 * row[0] * row[0] - 1.0;
                }
                Dataset::Trimodal3d => {
                    let centers = [[0.0, 0.0, 0.0], [3.0, 1.0, -1.0], [-1.0, 3.0, 2.0]];
                    let c = centers[i % 3];
                    let (a, b, e) = (z(), z(), z());
                    row[0] = c[0] + a;
                    row[1] = c[1] + 0.7 * a + 0.5 * b;
                    row[2] = c[2] - 0.4 * b + 0.6 * e;
                }
                Dataset::Skewed1d => {
                    row[0] = if i % 4 == 0 { 4.0 + 0.5 * z() } else { z().abs() };
                }
            }
        }
        SampleMatrix::new(out).expect("generators emit finite values")
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dataset::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Dataset::ALL.iter().map(|d| d.name()).collect();
                format!("unknown dataset {s:?} (expected one of {})", names.join(", "))
            })
    }
}
