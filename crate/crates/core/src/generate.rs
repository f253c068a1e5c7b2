//! Seeded factories for test instances: prescribed spectra, Haar-random
//! bases, norm-controlled additive perturbations and column sketches.
//!
//! Every generator takes a 64-bit seed and derives its own stream from
//! `(seed, call tag)`, so generators hold no shared state. The stream is
//! xoshiro256++ seeded through SplitMix64; Gaussians come from Box–Muller.
//! Identical seeds give bitwise-identical output on a given platform.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::dense::{householder_qr, singular_values, svd, DenseMatrix, OrthonormalBasis};
use crate::error::{Error, Result};

const TAG_GAUSSIAN: u64 = 0x6761_7573_7331;
const TAG_LEFT: u64 = 0x6c65_6674;
const TAG_RIGHT: u64 = 0x7269_6768_74;
const TAG_HAAR: u64 = 0x6861_6172;
const TAG_BASIS_NOISE: u64 = 0x6261_7369_73;
const TAG_MATRIX_NOISE: u64 = 0x6d61_7472_6978;
const TAG_SAMPLE: u64 = 0x7361_6d70;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive combination of seed components into one seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9e37_79b9_7f4a_7c15, |acc, &p| {
        mix64(acc ^ p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(acc << 6))
    })
}

/// FNV-1a, used to turn string keys into seed components.
pub fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn stream(seed: u64, tag: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(derive_seed(&[seed, tag]))
}

/// Standard normal draws by the Box–Muller transform.
pub struct GaussianStream {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64, tag: u64) -> Self {
        Self {
            rng: stream(seed, tag),
            spare: None,
        }
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 ∈ (0, 1] keeps the logarithm finite
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// m×n matrix of independent standard normals.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
    gaussian_matrix_tagged(m, n, seed, TAG_GAUSSIAN)
}

fn gaussian_matrix_tagged(m: usize, n: usize, seed: u64, tag: u64) -> DenseMatrix {
    let mut g = GaussianStream::new(seed, tag);
    let data = (0..m * n).map(|_| g.next_gaussian()).collect();
    DenseMatrix::from_raw(m, n, data)
}

/// Requested singular values for a generated matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub m: usize,
    pub n: usize,
    pub sigmas: Vec<f64>,
    pub seed: u64,
    /// `k` with `σ_k > σ_{k+1}`, when the instance needs a gap.
    #[serde(default)]
    pub gap_at: Option<usize>,
}

impl SpectrumSpec {
    pub fn new(m: usize, n: usize, sigmas: Vec<f64>, seed: u64) -> Result<Self> {
        let spec = Self {
            m,
            n,
            sigmas,
            seed,
            gap_at: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Records and checks a strict gap after the k-th value.
    pub fn with_gap(mut self, k: usize) -> Result<Self> {
        self.gap_at = Some(k);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.m.min(self.n);
        if self.sigmas.len() != r {
            return Err(Error::InvalidArgument(format!(
                "{} singular values given for a {}x{} matrix",
                self.sigmas.len(),
                self.m,
                self.n
            )));
        }
        if self.sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidArgument("singular values must be finite and >= 0".into()));
        }
        if self.sigmas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("singular values must be non-ascending".into()));
        }
        if let Some(k) = self.gap_at {
            let below = self.sigmas.get(k).copied().unwrap_or(0.0);
            if k == 0 || k > r || !(self.sigmas[k - 1] > below) {
                return Err(Error::InvalidArgument(format!("no strict gap after sigma_{k}")));
            }
        }
        Ok(())
    }
}

/// `A = U diag(σ) Vᵀ` with Haar-random orthogonal `U`, `V`.
pub fn matrix_with_spectrum(spec: &SpectrumSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let r = m.min(n);
    let u = haar_basis_tagged(m, r, spec.seed, TAG_LEFT)?;
    let v = haar_basis_tagged(n, r, spec.seed, TAG_RIGHT)?;
    let mut us = u.into_matrix().into_raw();
    for (j, s) in spec.sigmas.iter().enumerate() {
        us[j * m..(j + 1) * m].iter_mut().for_each(|x| *x *= s);
    }
    DenseMatrix::from_raw(m, r, us).matmul(&v.matrix().transpose())
}

/// Haar-distributed m×k orthonormal basis: QR of a Gaussian matrix with
/// the diagonal of `R` made positive.
pub fn haar_basis(m: usize, k: usize, seed: u64) -> Result<OrthonormalBasis> {
    haar_basis_tagged(m, k, seed, TAG_HAAR)
}

fn haar_basis_tagged(m: usize, k: usize, seed: u64, tag: u64) -> Result<OrthonormalBasis> {
    if k > m {
        return Err(Error::InvalidArgument(format!("cannot draw {k} orthonormal vectors in R^{m}")));
    }
    let g = gaussian_matrix_tagged(m, k, seed, tag);
    let (q, _) = householder_qr(&g)?;
    OrthonormalBasis::new(q)
}

/// Which ingredient a perturbation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// `Ẑ = Z + F` with `‖F‖₂` = magnitude.
    BasisAdditive,
    /// `A + E` with `‖E‖₂` = magnitude.
    MatrixAdditive,
    /// Column sketch with `c` = magnitude columns.
    ColumnSample,
}

impl PerturbationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BasisAdditive => "basis_additive",
            Self::MatrixAdditive => "matrix_additive",
            Self::ColumnSample => "column_sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub magnitude: f64,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.magnitude.is_finite() || self.magnitude < 0.0 {
            return Err(Error::InvalidArgument(format!("magnitude must be >= 0, got {}", self.magnitude)));
        }
        if self.kind == PerturbationKind::ColumnSample
            && (self.magnitude < 1.0 || self.magnitude.fract() != 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "column count must be a positive integer, got {}",
                self.magnitude
            )));
        }
        Ok(())
    }
}

/// `Ẑ = Z + F` and the quantities describing it.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedBasis {
    pub z_hat: DenseMatrix,
    /// `‖F‖₂ = ‖Ẑ − Z‖₂` as realized.
    pub f_norm: f64,
    /// `ε_Z = ‖Ẑ†‖₂ ‖Z − Ẑ‖₂`; uses the pseudoinverse when `Ẑ` is rank deficient.
    pub eps_z: f64,
    pub rank: usize,
    /// `rank(Ẑ) = rank(Z)`.
    pub rank_preserved: bool,
}

/// Seeded Gaussian matrix rescaled to two-norm exactly `magnitude`.
pub fn norm_controlled_noise(m: usize, n: usize, magnitude: f64, seed: u64) -> Result<DenseMatrix> {
    norm_controlled_noise_tagged(m, n, magnitude, seed, TAG_MATRIX_NOISE)
}

fn norm_controlled_noise_tagged(m: usize, n: usize, magnitude: f64, seed: u64, tag: u64) -> Result<DenseMatrix> {
    if !magnitude.is_finite() || magnitude < 0.0 {
        return Err(Error::InvalidArgument(format!("magnitude must be >= 0, got {magnitude}")));
    }
    if magnitude == 0.0 || m == 0 || n == 0 {
        return Ok(DenseMatrix::zeros(m, n));
    }
    let raw = gaussian_matrix_tagged(m, n, seed, tag);
    let top = singular_values(&raw)?[0];
    Ok(raw.scale(magnitude / top))
}

/// `Z + F` with `‖F‖₂ = magnitude`. Rank loss is flagged, not an error;
/// it cannot happen for `magnitude ≤ 1/2`.
pub fn perturb_basis(z: &OrthonormalBasis, magnitude: f64, seed: u64) -> Result<PerturbedBasis> {
    let (m, k) = z.matrix().shape();
    let f = norm_controlled_noise_tagged(m, k, magnitude, seed, TAG_BASIS_NOISE)?;
    let z_hat = z.matrix().try_add(&f)?;
    let diff = z.matrix().try_sub(&z_hat)?;
    let f_norm = singular_values(&diff)?.first().copied().unwrap_or(0.0);
    let fz = svd(&z_hat)?;
    let rank = fz.rank();
    let smallest = fz.singular_values()[..rank].last().copied();
    let eps_z = match smallest {
        Some(s) => f_norm / s,
        None => 0.0,
    };
    Ok(PerturbedBasis {
        z_hat,
        f_norm,
        eps_z,
        rank,
        rank_preserved: rank == k,
    })
}

/// `A + E` with `‖E‖₂ = magnitude`.
pub fn perturb_matrix(a: &DenseMatrix, magnitude: f64, seed: u64) -> Result<DenseMatrix> {
    let e = norm_controlled_noise(a.rows(), a.cols(), magnitude, seed)?;
    a.try_add(&e)
}

/// Result of sampling `c` columns with replacement, `p_j ∝ ‖a_j‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSketch {
    /// m×c, column `t` is `a_{i_t} / √(c p_{i_t})`.
    pub matrix: DenseMatrix,
    pub indices: Vec<usize>,
    pub probabilities: Vec<f64>,
}

impl ColumnSketch {
    /// Folds repeated draws of the same column into one column scaled by
    /// `√count`. The Gram matrix `ÃÃᵀ` is unchanged; the column count drops to
    /// the number of distinct columns drawn (in order of first draw).
    pub fn merge_duplicates(&self) -> DenseMatrix {
        let m = self.matrix.rows();
        let mut order: Vec<usize> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut first_pos: Vec<usize> = Vec::new();
        for (t, &i) in self.indices.iter().enumerate() {
            match order.iter().position(|&o| o == i) {
                Some(pos) => counts[pos] += 1,
                None => {
                    order.push(i);
                    counts.push(1);
                    first_pos.push(t);
                }
            }
        }
        let mut data = Vec::with_capacity(m * order.len());
        for (pos, &t) in first_pos.iter().enumerate() {
            let w = (counts[pos] as f64).sqrt();
            data.extend(self.matrix.col(t).iter().map(|x| x * w));
        }
        DenseMatrix::from_raw(m, order.len(), data)
    }
}

/// Column sampling with replacement and rescaling, `E[ÃÃᵀ] = AAᵀ`.
pub fn column_sample(a: &DenseMatrix, c: usize, seed: u64) -> Result<ColumnSketch> {
    if c == 0 {
        return Err(Error::InvalidArgument("column count must be >= 1".into()));
    }
    let m = a.rows();
    let weights: Vec<f64> = (0..a.cols())
        .map(|j| a.col(j).iter().map(|x| x * x).sum())
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("cannot sample columns of a zero matrix".into()));
    }
    let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidArgument(format!("column weights: {e}")))?;
    let mut rng = stream(seed, TAG_SAMPLE);
    let indices: Vec<usize> = (0..c).map(|_| dist.sample(&mut rng)).collect();
    let mut data = Vec::with_capacity(m * c);
    for &i in &indices {
        let s = 1.0 / (c as f64 * probabilities[i]).sqrt();
        data.extend(a.col(i).iter().map(|x| x * s));
    }
    Ok(ColumnSketch {
        matrix: DenseMatrix::from_col_major(m, c, data)?,
        indices,
        probabilities,
    })
}

/// The sketched matrix alone.
pub fn column_sample_rescale(a: &DenseMatrix, c: usize, seed: u64) -> Result<DenseMatrix> {
    column_sample(a, c, seed).map(|s| s.matrix)
}
