//! Shared fixtures for the crate's unit tests.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::design::{Design, Monomial, Node};

pub fn design(m: u32, k: usize, nodes: &[&[u32]]) -> Design {
    Design::new(m, k, nodes.iter().map(|r| Node::new(r.to_vec())).collect()).unwrap()
}

pub fn mono(exps: &[u64]) -> Monomial {
    Monomial::new(exps.to_vec())
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Half fraction of Omega_2^4 with eight nodes; residue 1 encodes the node
/// value -1.
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

/// Four-node design in Omega_4^2 whose quarter of the full factorial admits
/// an equal-weight rule.
pub fn quarter_fraction_4_2() -> Design {
    design(4, 2, &[&[0, 0], &[1, 3], &[2, 1], &[3, 2]])
}

/// Two-node design in Omega_3^2 whose indicator has full support.
pub fn two_nodes_3_2() -> Design {
    design(3, 2, &[&[0, 2], &[2, 1]])
}
