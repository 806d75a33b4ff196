//! Moment providers: discrete measures on Omega_m^k, the zero-mean complex
//! Gaussian, and seeded Monte Carlo estimation.
//!
//! A moment provider answers integrals of monomials z^alpha against a fixed
//! measure, either exactly (as cyclotomic numbers) or approximately. The
//! cubature layer never looks inside a measure; everything it needs flows
//! through the [`MomentProvider`] trait.

// The Cholesky kernels touch two rows at the same column index; index loops
// keep that symmetry visible.
#![allow(clippy::needless_range_loop)]

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cyclo::{parse_rational, CycNum};
use crate::design::{Monomial, Node};
use crate::{Error, Result};

/// A moment value: exact in Q(w_m), or a floating approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum Moment {
    Exact(CycNum),
    Approx(Complex64),
}

impl Moment {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Moment::Exact(v) => v.to_complex(),
            Moment::Approx(v) => *v,
        }
    }
}

/// Source of integrals of holomorphic monomials against a fixed measure.
///
/// The modulus argument of [`MomentProvider::moment`] names the cyclotomic
/// field the caller works in; exact providers embed their answers there.
/// Moments are asked for literal exponent vectors, not residue classes, so
/// lifts of the same class may have different moments (they do for the
/// Gaussian).
pub trait MomentProvider {
    /// Number of variables.
    fn k(&self) -> usize;

    /// Whether every moment comes back as [`Moment::Exact`].
    fn is_exact(&self) -> bool;

    /// Whether the measure has total mass one.
    fn is_probability(&self) -> bool;

    /// The integral of z^alpha.
    fn moment(&self, alpha: &Monomial, m: u32) -> Result<Moment>;

    /// Whether every lift of the given reduced class has the same moment as
    /// the class representative itself. `None` when the provider cannot
    /// decide.
    fn lifts_share_moment(&self, _class: &Monomial, _m: u32) -> Option<bool> {
        None
    }

    /// Whether the mixed monomial z^{alpha+gamma} * conj(z)^{gamma} has the
    /// same integral as z^alpha. `None` when the provider cannot decide.
    fn mixed_vs_holomorphic(&self, _alpha: &Monomial, _gamma: &Monomial, _m: u32) -> Option<bool> {
        None
    }
}

/// A finitely supported measure on Omega_m^k with rational masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteMeasureDoc", into = "DiscreteMeasureDoc")]
pub struct DiscreteMeasure {
    m: u32,
    k: usize,
    atoms: Vec<(Node, BigRational)>,
}

impl DiscreteMeasure {
    pub fn new(m: u32, k: usize, atoms: Vec<(Node, BigRational)>) -> Result<Self> {
        if m < 1 || k < 1 {
            return Err(Error::Invalid("m and k must be at least 1".into()));
        }
        if atoms.is_empty() {
            return Err(Error::Invalid("measure needs at least one atom".into()));
        }
        let mut seen = HashSet::new();
        for (node, _) in &atoms {
            if node.k() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: node.k(),
                });
            }
            for &r in node.residues() {
                if r >= m {
                    return Err(Error::ResidueOutOfRange { residue: r, m });
                }
            }
            if !seen.insert(node.residues().to_vec()) {
                return Err(Error::DuplicateNode(node.to_string()));
            }
        }
        Ok(DiscreteMeasure { m, k, atoms })
    }

    /// The uniform probability measure on the nodes of a design.
    pub fn uniform_on(design: &crate::design::Design) -> Self {
        let mass = BigRational::new(BigInt::one(), BigInt::from(design.n()));
        DiscreteMeasure {
            m: design.m(),
            k: design.k(),
            atoms: design
                .nodes()
                .iter()
                .map(|node| (node.clone(), mass.clone()))
                .collect(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn atoms(&self) -> &[(Node, BigRational)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms
            .iter()
            .fold(BigRational::zero(), |acc, (_, mass)| acc + mass)
    }

    fn check_modulus(&self, m: u32) -> Result<()> {
        if self.m == m {
            Ok(())
        } else {
            Err(Error::MeasureModulusMismatch {
                measure_m: self.m,
                rule_m: m,
            })
        }
    }

    /// Exact integral of the mixed monomial prod_j z_j^{n_j} conj(z_j)^{m_j}.
    /// On Omega_m^k conjugation inverts residues, so this is still a sum of
    /// roots of unity.
    pub fn mixed_moment(&self, e: &MixedExponent) -> Result<CycNum> {
        if e.pairs().len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: e.pairs().len(),
            });
        }
        let m64 = self.m as u64;
        let mut acc = CycNum::zero(self.m);
        for (node, mass) in &self.atoms {
            let mut residue = 0u64;
            for ((n, mm), &j) in e.pairs().iter().zip(node.residues()) {
                let diff = (n % m64 + m64 - mm % m64) % m64;
                residue = (residue + diff * j as u64) % m64;
            }
            acc += CycNum::root_power(self.m, residue as u32).scaled(mass);
        }
        Ok(acc)
    }
}

/// Exact integral of z^alpha against a discrete measure on Omega_m^k.
pub fn discrete_moment(measure: &DiscreteMeasure, alpha: &Monomial) -> Result<CycNum> {
    if alpha.k() != measure.k {
        return Err(Error::DimensionMismatch {
            expected: measure.k,
            got: alpha.k(),
        });
    }
    let mut acc = CycNum::zero(measure.m);
    for (node, mass) in &measure.atoms {
        let e = crate::design::eval_residue(alpha, node, measure.m)?;
        acc += CycNum::root_power(measure.m, e).scaled(mass);
    }
    Ok(acc)
}

impl MomentProvider for DiscreteMeasure {
    fn k(&self) -> usize {
        self.k
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn is_probability(&self) -> bool {
        self.total_mass().is_one()
    }

    fn moment(&self, alpha: &Monomial, m: u32) -> Result<Moment> {
        self.check_modulus(m)?;
        Ok(Moment::Exact(discrete_moment(self, alpha)?))
    }

    fn lifts_share_moment(&self, _class: &Monomial, m: u32) -> Option<bool> {
        // z^alpha on Omega_m^k depends on alpha only through its reduction.
        (self.m == m).then_some(true)
    }

    fn mixed_vs_holomorphic(&self, alpha: &Monomial, gamma: &Monomial, m: u32) -> Option<bool> {
        if self.m != m || alpha.k() != self.k || gamma.k() != self.k {
            return None;
        }
        let e = MixedExponent::from_shift(alpha, gamma);
        let mixed = self.mixed_moment(&e).ok()?;
        let plain = discrete_moment(self, alpha).ok()?;
        Some(mixed == plain)
    }
}

/// On-disk form of a discrete measure; masses are exact rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteMeasureDoc {
    pub m: u32,
    pub k: usize,
    pub atoms: Vec<AtomDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomDoc {
    pub node: Vec<u32>,
    pub mass: String,
}

impl TryFrom<DiscreteMeasureDoc> for DiscreteMeasure {
    type Error = Error;

    fn try_from(doc: DiscreteMeasureDoc) -> Result<DiscreteMeasure> {
        let atoms = doc
            .atoms
            .into_iter()
            .map(|a| {
                let mass = parse_rational(&a.mass)
                    .ok_or_else(|| Error::Parse(format!("bad mass {:?}", a.mass)))?;
                Ok((Node::new(a.node), mass))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteMeasure::new(doc.m, doc.k, atoms)
    }
}

impl From<DiscreteMeasure> for DiscreteMeasureDoc {
    fn from(measure: DiscreteMeasure) -> DiscreteMeasureDoc {
        DiscreteMeasureDoc {
            m: measure.m,
            k: measure.k,
            atoms: measure
                .atoms
                .iter()
                .map(|(node, mass)| AtomDoc {
                    node: node.residues().to_vec(),
                    mass: if mass.denom().is_one() {
                        mass.numer().to_string()
                    } else {
                        format!("{}/{}", mass.numer(), mass.denom())
                    },
                })
                .collect(),
        }
    }
}

/// Exponent pairs (n_j, m_j) of a mixed monomial
/// prod_j z_j^{n_j} conj(z_j)^{m_j}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedExponent {
    pairs: Vec<(u64, u64)>,
}

impl MixedExponent {
    pub fn new(pairs: Vec<(u64, u64)>) -> Self {
        MixedExponent { pairs }
    }

    /// The mixed monomial z^{alpha+gamma} * conj(z)^{gamma}.
    pub fn from_shift(alpha: &Monomial, gamma: &Monomial) -> Self {
        MixedExponent {
            pairs: alpha
                .exponents()
                .iter()
                .zip(gamma.exponents())
                .map(|(&a, &g)| (a + g, g))
                .collect(),
        }
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn p(&self) -> usize {
        self.pairs.len()
    }
}

impl fmt::Display for MixedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, m)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{n},{m}")?;
        }
        Ok(())
    }
}

/// A zero-mean complex Gaussian on C^p with Hermitian covariance
/// Sigma_{jk} = E(Z_j conj(Z_k)) and a partition of the variables into
/// mutually independent blocks.
///
/// Off-diagonal covariance entries are Sigma_{jk} = alpha_{jk} + i beta_{jk}
/// with alpha symmetric and beta antisymmetric; entries across different
/// blocks must vanish. Construction validates shape, symmetry, the partition
/// and positive definiteness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GaussianSpecDoc", into = "GaussianSpecDoc")]
pub struct GaussianSpec {
    p: usize,
    sigma2: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    /// Zero-based variable indices, one vector per independent block.
    blocks: Vec<Vec<usize>>,
}

impl GaussianSpec {
    pub fn new(
        sigma2: Vec<f64>,
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
        blocks_one_indexed: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = sigma2.len();
        if p == 0 {
            return Err(Error::Invalid("need at least one variable".into()));
        }
        let shape_ok = |mat: &Vec<Vec<f64>>| mat.len() == p && mat.iter().all(|r| r.len() == p);
        if !shape_ok(&alpha) || !shape_ok(&beta) {
            return Err(Error::Invalid("alpha and beta must be p x p".into()));
        }
        for j in 0..p {
            if alpha[j][j] != 0.0 || beta[j][j] != 0.0 {
                return Err(Error::Invalid(
                    "diagonal covariance belongs in sigma2; alpha/beta diagonals must be zero"
                        .into(),
                ));
            }
            for t in 0..p {
                if alpha[j][t] != alpha[t][j] {
                    return Err(Error::Invalid("alpha must be symmetric".into()));
                }
                if beta[j][t] != -beta[t][j] {
                    return Err(Error::Invalid("beta must be antisymmetric".into()));
                }
            }
        }
        let mut seen = vec![false; p];
        let blocks: Vec<Vec<usize>> = blocks_one_indexed
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|&idx| {
                        if idx == 0 || idx > p {
                            return Err(Error::MalformedPartition {
                                p,
                                reason: format!("index {idx} out of range"),
                            });
                        }
                        if seen[idx - 1] {
                            return Err(Error::MalformedPartition {
                                p,
                                reason: format!("index {idx} repeated"),
                            });
                        }
                        seen[idx - 1] = true;
                        Ok(idx - 1)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::MalformedPartition {
                p,
                reason: format!("index {} not covered", missing + 1),
            });
        }
        let mut block_of = vec![0usize; p];
        for (h, block) in blocks.iter().enumerate() {
            for &j in block {
                block_of[j] = h;
            }
        }
        for j in 0..p {
            for t in 0..p {
                if block_of[j] != block_of[t] && (alpha[j][t] != 0.0 || beta[j][t] != 0.0) {
                    return Err(Error::Invalid(format!(
                        "variables {} and {} lie in different blocks but have nonzero covariance",
                        j + 1,
                        t + 1
                    )));
                }
            }
        }
        let spec = GaussianSpec {
            p,
            sigma2,
            alpha,
            beta,
            blocks,
        };
        spec.check_positive_definite()?;
        Ok(spec)
    }

    /// Independent standard variables: unit variances, singleton blocks.
    pub fn standard(p: usize) -> Result<Self> {
        GaussianSpec::new(
            vec![1.0; p],
            vec![vec![0.0; p]; p],
            vec![vec![0.0; p]; p],
            (1..=p).map(|j| vec![j]).collect(),
        )
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }

    /// Blocks as zero-based index sets.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Sigma as a dense complex matrix.
    pub fn covariance(&self) -> Vec<Vec<Complex64>> {
        (0..self.p)
            .map(|j| {
                (0..self.p)
                    .map(|t| {
                        if j == t {
                            Complex64::new(self.sigma2[j], 0.0)
                        } else {
                            Complex64::new(self.alpha[j][t], self.beta[j][t])
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Hermitian Cholesky; fails unless Sigma is positive definite.
    fn check_positive_definite(&self) -> Result<()> {
        let sigma = self.covariance();
        let p = self.p;
        let mut l = vec![vec![Complex64::new(0.0, 0.0); p]; p];
        for j in 0..p {
            let mut d = sigma[j][j].re;
            for t in 0..j {
                d -= l[j][t].norm_sqr();
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!(
                    "pivot {} is {d:.6e}",
                    j + 1
                )));
            }
            let diag = d.sqrt();
            l[j][j] = Complex64::new(diag, 0.0);
            for i in j + 1..p {
                let mut s = sigma[i][j];
                for t in 0..j {
                    s -= l[i][t] * l[j][t].conj();
                }
                l[i][j] = s / diag;
            }
        }
        Ok(())
    }

    /// The covariance of the real vector (X_1, Y_1, ..., X_p, Y_p) under
    /// Z_j = X_j + i Y_j:
    ///
    ///   E(X_j X_j) = E(Y_j Y_j) = sigma_j^2 / 2,  E(X_j Y_j) = 0,
    ///   E(X_j X_t) = E(Y_j Y_t) = alpha_{jt} / 2   (j != t),
    ///   E(X_j Y_t) = -beta_{jt} / 2.
    ///
    /// These relations make the pseudo-covariance E(Z Z^T) vanish, so the
    /// sampled vector is circularly symmetric with E(Z conj(Z)^T) = Sigma.
    fn real_covariance(&self) -> Vec<Vec<f64>> {
        let p = self.p;
        let mut c = vec![vec![0.0; 2 * p]; 2 * p];
        for j in 0..p {
            c[2 * j][2 * j] = self.sigma2[j] / 2.0;
            c[2 * j + 1][2 * j + 1] = self.sigma2[j] / 2.0;
            for t in 0..p {
                if t == j {
                    continue;
                }
                c[2 * j][2 * t] = self.alpha[j][t] / 2.0;
                c[2 * j + 1][2 * t + 1] = self.alpha[j][t] / 2.0;
                c[2 * j][2 * t + 1] = -self.beta[j][t] / 2.0;
                c[2 * j + 1][2 * t] = self.beta[j][t] / 2.0;
            }
        }
        c
    }
}

/// The integral of z^alpha against any zero-mean complex Gaussian: 1 when
/// alpha is the zero exponent, 0 otherwise. Holomorphic monomials see none
/// of the covariance structure.
pub fn gaussian_holomorphic_moment(alpha: &Monomial, m: u32) -> CycNum {
    if alpha.is_constant() {
        CycNum::one(m)
    } else {
        CycNum::zero(m)
    }
}

/// Decision of the sufficient null-moment criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nullity {
    /// Some independent block has unbalanced holomorphic and conjugate
    /// degrees, so the mixed moment is exactly zero.
    ProvablyZero,
    /// The criterion does not apply; the moment may or may not vanish.
    Unknown,
}

/// Sufficient test for E(prod_j Z_j^{n_j} conj(Z_j)^{m_j}) = 0: the moment
/// vanishes whenever some block R_h has sum_{j in R_h} n_j different from
/// sum_{j in R_h} m_j. The converse does not hold in general, hence
/// [`Nullity::Unknown`] rather than "nonzero".
pub fn gaussian_null_moment_predicate(e: &MixedExponent, spec: &GaussianSpec) -> Result<Nullity> {
    if e.p() != spec.p() {
        return Err(Error::DimensionMismatch {
            expected: spec.p(),
            got: e.p(),
        });
    }
    for block in spec.blocks() {
        let n_sum: u64 = block.iter().map(|&j| e.pairs()[j].0).sum();
        let m_sum: u64 = block.iter().map(|&j| e.pairs()[j].1).sum();
        if n_sum != m_sum {
            return Ok(Nullity::ProvablyZero);
        }
    }
    Ok(Nullity::Unknown)
}

impl MomentProvider for GaussianSpec {
    fn k(&self) -> usize {
        self.p
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn is_probability(&self) -> bool {
        true
    }

    fn moment(&self, alpha: &Monomial, m: u32) -> Result<Moment> {
        if alpha.k() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: alpha.k(),
            });
        }
        Ok(Moment::Exact(gaussian_holomorphic_moment(alpha, m)))
    }

    fn lifts_share_moment(&self, class: &Monomial, m: u32) -> Option<bool> {
        // A nonzero class has only nonzero lifts, all with moment zero. The
        // zero class contains the constant (moment one) and nonconstant
        // lifts (moment zero).
        Some(!class.reduce(m).is_constant())
    }

    fn mixed_vs_holomorphic(&self, alpha: &Monomial, gamma: &Monomial, _m: u32) -> Option<bool> {
        if gamma.is_constant() {
            return Some(true);
        }
        if !alpha.is_constant() {
            // Each block containing a positive alpha exponent is unbalanced
            // in z^{alpha+gamma} conj(z)^gamma, so both integrals vanish.
            return Some(true);
        }
        // alpha = 0, gamma != 0: the mixed moment is E|z^gamma|^2, which the
        // sufficient criterion cannot compare to 1.
        None
    }
}

/// On-disk form of a Gaussian spec; `blocks` uses 1-based variable indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianSpecDoc {
    pub p: usize,
    pub sigma2: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub blocks: Vec<Vec<usize>>,
}

impl TryFrom<GaussianSpecDoc> for GaussianSpec {
    type Error = Error;

    fn try_from(doc: GaussianSpecDoc) -> Result<GaussianSpec> {
        if doc.sigma2.len() != doc.p {
            return Err(Error::Invalid(format!(
                "sigma2 has {} entries but p = {}",
                doc.sigma2.len(),
                doc.p
            )));
        }
        GaussianSpec::new(doc.sigma2, doc.alpha, doc.beta, doc.blocks)
    }
}

impl From<GaussianSpec> for GaussianSpecDoc {
    fn from(spec: GaussianSpec) -> GaussianSpecDoc {
        GaussianSpecDoc {
            p: spec.p,
            sigma2: spec.sigma2.clone(),
            alpha: spec.alpha.clone(),
            beta: spec.beta.clone(),
            blocks: spec
                .blocks
                .iter()
                .map(|b| b.iter().map(|&j| j + 1).collect())
                .collect(),
        }
    }
}

/// Seeded sampler for a [`GaussianSpec`]. Samples are drawn by factoring the
/// real 2p-dimensional covariance; every stream is deterministic in the
/// seed. For parallel use, create one sampler per thread with distinct
/// seeds.
pub struct GaussianSampler {
    p: usize,
    chol: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

/// Construct a sampler for the spec with a fixed RNG seed.
pub fn gaussian_sampler(spec: &GaussianSpec, seed: u64) -> Result<GaussianSampler> {
    let c = spec.real_covariance();
    let dim = 2 * spec.p();
    let mut l = vec![vec![0.0; dim]; dim];
    for j in 0..dim {
        let mut d = c[j][j];
        for t in 0..j {
            d -= l[j][t] * l[j][t];
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "real pivot {} is {d:.6e}",
                j + 1
            )));
        }
        l[j][j] = d.sqrt();
        for i in j + 1..dim {
            let mut s = c[i][j];
            for t in 0..j {
                s -= l[i][t] * l[j][t];
            }
            l[i][j] = s / l[j][j];
        }
    }
    use rand::SeedableRng;
    Ok(GaussianSampler {
        p: spec.p(),
        chol: l,
        rng: ChaCha8Rng::seed_from_u64(seed),
    })
}

impl GaussianSampler {
    pub fn p(&self) -> usize {
        self.p
    }

    /// Draw one sample of (Z_1, ..., Z_p).
    pub fn sample(&mut self) -> Vec<Complex64> {
        let dim = 2 * self.p;
        let g: Vec<f64> = (0..dim)
            .map(|_| StandardNormal.sample(&mut self.rng))
            .collect();
        (0..self.p)
            .map(|j| {
                let x: f64 = self.chol[2 * j][..=2 * j]
                    .iter()
                    .zip(&g)
                    .map(|(a, b)| a * b)
                    .sum();
                let y: f64 = self.chol[2 * j + 1][..=2 * j + 1]
                    .iter()
                    .zip(&g)
                    .map(|(a, b)| a * b)
                    .sum();
                Complex64::new(x, y)
            })
            .collect()
    }

    /// Access to the underlying RNG, used by tests that need auxiliary
    /// deterministic draws.
    pub fn rng_mut(&mut self) -> &mut impl Rng {
        &mut self.rng
    }
}

/// A Monte Carlo estimate with componentwise standard errors.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: u64,
}

impl McEstimate {
    /// Combined standard error of the complex mean.
    pub fn se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }
}

/// Estimate E(prod_j Z_j^{n_j} conj(Z_j)^{m_j}) from `n` fresh draws of the
/// sampler. Standard errors use the sample variance of each component; with
/// `n = 1` they are reported as infinite.
pub fn mc_estimate_moment(
    sampler: &mut GaussianSampler,
    e: &MixedExponent,
    n: u64,
) -> Result<McEstimate> {
    if e.p() != sampler.p() {
        return Err(Error::DimensionMismatch {
            expected: sampler.p(),
            got: e.p(),
        });
    }
    if n == 0 {
        return Err(Error::Invalid("sample count must be positive".into()));
    }
    let mut sum_re = 0.0f64;
    let mut sum_im = 0.0f64;
    let mut sumsq_re = 0.0f64;
    let mut sumsq_im = 0.0f64;
    for _ in 0..n {
        let z = sampler.sample();
        let mut prod = Complex64::new(1.0, 0.0);
        for ((np, mp), zj) in e.pairs().iter().zip(&z) {
            if *np > 0 {
                prod *= zj.powu(*np as u32);
            }
            if *mp > 0 {
                prod *= zj.conj().powu(*mp as u32);
            }
        }
        sum_re += prod.re;
        sum_im += prod.im;
        sumsq_re += prod.re * prod.re;
        sumsq_im += prod.im * prod.im;
    }
    let nf = n as f64;
    let mean = Complex64::new(sum_re / nf, sum_im / nf);
    let (se_re, se_im) = if n >= 2 {
        let var = |sum: f64, sumsq: f64| ((sumsq - sum * sum / nf) / (nf - 1.0)).max(0.0);
        (
            (var(sum_re, sumsq_re) / nf).sqrt(),
            (var(sum_im, sumsq_im) / nf).sqrt(),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(McEstimate {
        mean,
        se_re,
        se_im,
        n,
    })
}

/// Moments known only numerically, keyed by literal exponent vectors.
/// Intended for measures without exact structure; lookups for exponents
/// outside the table are errors.
#[derive(Debug, Clone)]
pub struct FloatMomentTable {
    k: usize,
    probability: bool,
    moments: HashMap<Vec<u64>, Complex64>,
}

impl FloatMomentTable {
    pub fn new(k: usize, probability: bool, moments: HashMap<Vec<u64>, Complex64>) -> Self {
        FloatMomentTable {
            k,
            probability,
            moments,
        }
    }
}

impl MomentProvider for FloatMomentTable {
    fn k(&self) -> usize {
        self.k
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn is_probability(&self) -> bool {
        self.probability
    }

    fn moment(&self, alpha: &Monomial, _m: u32) -> Result<Moment> {
        if alpha.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: alpha.k(),
            });
        }
        self.moments
            .get(alpha.exponents())
            .map(|&v| Moment::Approx(v))
            .ok_or_else(|| Error::MissingMoment(alpha.to_string()))
    }
}
