//! Shared fixtures and seeded corpus generators for the integration suites.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclocube::design::{Design, Monomial, Node};
use cyclocube::measures::{DiscreteMeasure, GaussianSpec, MixedExponent};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn mono(exps: &[u64]) -> Monomial {
    Monomial::new(exps.to_vec())
}

pub fn design(m: u32, k: usize, nodes: &[&[u32]]) -> Design {
    Design::new(
        m,
        k,
        nodes.iter().map(|r| Node::new(r.to_vec())).collect(),
    )
    .unwrap()
}

/// Eight of the sixteen two-level points in four factors.
pub fn half_fraction_2_4() -> Design {
    design(
        2,
        4,
        &[
            &[0, 0, 0, 0],
            &[0, 0, 1, 0],
            &[0, 1, 0, 1],
            &[0, 1, 1, 1],
            &[1, 0, 0, 0],
            &[1, 1, 1, 0],
            &[1, 1, 1, 1],
            &[1, 0, 0, 1],
        ],
    )
}

/// Four of the sixteen four-level points in two factors.
pub fn quarter_fraction_4_2() -> Design {
    design(4, 2, &[&[0, 0], &[1, 3], &[2, 1], &[3, 2]])
}

/// Two points of the nine-point three-level grid.
pub fn two_nodes_3_2() -> Design {
    design(3, 2, &[&[0, 2], &[2, 1]])
}

fn residues_from_rank(mut rank: u64, m: u32, k: usize) -> Vec<u32> {
    let mut out = vec![0u32; k];
    for slot in out.iter_mut().rev() {
        *slot = (rank % m as u64) as u32;
        rank /= m as u64;
    }
    out
}

/// A design with distinct random nodes: m in 2..=max_m, k in 1..=max_k, and
/// n in 1..=min(max_n, m^k).
pub fn random_design(rng: &mut ChaCha8Rng, max_m: u32, max_k: usize, max_n: usize) -> Design {
    let m = rng.gen_range(2..=max_m);
    let k = rng.gen_range(1..=max_k);
    let total = (m as u64).pow(k as u32);
    let n = rng.gen_range(1..=max_n.min(total as usize));
    let mut ranks: Vec<u64> = (0..total).collect();
    ranks.shuffle(rng);
    let nodes = ranks[..n]
        .iter()
        .map(|&r| Node::new(residues_from_rank(r, m, k)))
        .collect();
    Design::new(m, k, nodes).unwrap()
}

/// `count` distinct reduced monomials in k variables mod m.
pub fn random_reduced_monomials(
    rng: &mut ChaCha8Rng,
    m: u32,
    k: usize,
    count: usize,
) -> Vec<Monomial> {
    let total = (m as u64).pow(k as u32);
    assert!(count as u64 <= total);
    let mut ranks: Vec<u64> = (0..total).collect();
    ranks.shuffle(rng);
    ranks[..count]
        .iter()
        .map(|&r| {
            Monomial::new(
                residues_from_rank(r, m, k)
                    .into_iter()
                    .map(u64::from)
                    .collect(),
            )
        })
        .collect()
}

/// A random integer matrix of determinant +-1, built from elementary row
/// operations on the identity.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n == 1 {
        if rng.gen() {
            m[0][0] = -1;
        }
        return m;
    }
    for _ in 0..5 * n {
        match rng.gen_range(0..3) {
            0 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                while j == i {
                    j = rng.gen_range(0..n);
                }
                let c = *[-2i64, -1, 1, 2].choose(rng).unwrap();
                for t in 0..n {
                    m[j][t] += c * m[i][t];
                }
            }
            1 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                while j == i {
                    j = rng.gen_range(0..n);
                }
                m.swap(i, j);
            }
            _ => {
                let i = rng.gen_range(0..n);
                for t in 0..n {
                    m[i][t] = -m[i][t];
                }
            }
        }
    }
    m
}

/// A random discrete measure on Omega_m^k with m^k <= 256 and positive
/// rational masses.
pub fn random_discrete_measure(rng: &mut ChaCha8Rng) -> DiscreteMeasure {
    let shapes: &[(u32, usize)] = &[
        (2, 1),
        (2, 2),
        (2, 3),
        (2, 4),
        (3, 1),
        (3, 2),
        (3, 3),
        (4, 1),
        (4, 2),
        (4, 3),
        (5, 1),
        (5, 2),
        (6, 1),
        (6, 2),
        (8, 1),
        (12, 1),
    ];
    let &(m, k) = shapes.choose(rng).unwrap();
    let total = (m as u64).pow(k as u32);
    let n = rng.gen_range(1..=total.min(8) as usize);
    let mut ranks: Vec<u64> = (0..total).collect();
    ranks.shuffle(rng);
    let atoms = ranks[..n]
        .iter()
        .map(|&r| {
            let node = Node::new(residues_from_rank(r, m, k));
            let mass = rat(rng.gen_range(1..=4), rng.gen_range(1..=6));
            (node, mass)
        })
        .collect();
    DiscreteMeasure::new(m, k, atoms).unwrap()
}

/// A Gaussian spec with random variances, random independence blocks, and
/// small within-block correlations, plus a mixed exponent violating block
/// balance.
pub fn random_unbalanced_gaussian_case(rng: &mut ChaCha8Rng) -> (GaussianSpec, MixedExponent) {
    let p = rng.gen_range(1..=3usize);
    let sigma2: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5..=2.0)).collect();

    // Random partition: assign each variable to one of a few groups, then
    // drop empty groups.
    let group_count = rng.gen_range(1..=p);
    let mut assignment: Vec<usize> = (0..p).map(|_| rng.gen_range(0..group_count)).collect();
    // Every group label used at least once keeps the partition surjective.
    for g in 0..group_count {
        if !assignment.contains(&g) {
            let idx = rng.gen_range(0..p);
            assignment[idx] = g;
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); group_count];
    for (var, &g) in assignment.iter().enumerate() {
        blocks[g].push(var + 1);
    }
    blocks.retain(|b| !b.is_empty());

    // Small within-block couplings keep the covariance diagonally dominant.
    let mut alpha = vec![vec![0.0; p]; p];
    let mut beta = vec![vec![0.0; p]; p];
    for j in 0..p {
        for t in j + 1..p {
            if assignment[j] == assignment[t] {
                let a = rng.gen_range(-0.1..=0.1);
                let b = rng.gen_range(-0.1..=0.1);
                alpha[j][t] = a;
                alpha[t][j] = a;
                beta[j][t] = b;
                beta[t][j] = -b;
            }
        }
    }
    let spec = GaussianSpec::new(sigma2, alpha, beta, blocks).unwrap();

    let mut pairs: Vec<(u64, u64)> = (0..p)
        .map(|_| (rng.gen_range(0..=2u64), rng.gen_range(0..=2u64)))
        .collect();
    let balanced = |pairs: &[(u64, u64)], blocks: &[Vec<usize>]| {
        blocks.iter().all(|b| {
            let ns: u64 = b.iter().map(|&j| pairs[j - 1].0).sum();
            let ms: u64 = b.iter().map(|&j| pairs[j - 1].1).sum();
            ns == ms
        })
    };
    if balanced(&pairs, spec_blocks_one_indexed(&spec).as_slice()) {
        // Force an imbalance in the first block.
        let j = spec.blocks()[0][0];
        pairs[j].0 += 1;
    }
    (spec, MixedExponent::new(pairs))
}

fn spec_blocks_one_indexed(spec: &GaussianSpec) -> Vec<Vec<usize>> {
    spec.blocks()
        .iter()
        .map(|b| b.iter().map(|&j| j + 1).collect())
        .collect()
}
