//! Designs with nodes at roots of unity and their indicator functions.
//!
//! A design is a set of n distinct nodes in Omega_m^k, stored as residue
//! tuples: the node (w^{j_1}, ..., w^{j_k}) is kept as (j_1, ..., j_k) with
//! each j_i in Z_m. Monomial evaluation then happens purely on exponents,
//! z^alpha(d) = w^{[sum_i alpha_i j_i] mod m}, which keeps every later
//! computation in exact arithmetic.
//!
//! The indicator function of a design is the unique polynomial with reduced
//! support that is 1 on the design and 0 on the rest of Omega_m^k. Its
//! coefficients are b_alpha = m^{-k} sum_d z^{abar}(d), with abar the
//! componentwise negation [m - alpha_i] mod m.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycNum;
use crate::{Error, Result};

/// Largest m^k for which full class enumeration (indicator coefficients,
/// regularity scans, precision reports) is supported.
pub const MAX_CLASSES: u64 = 1 << 22;

/// A monomial exponent vector. Entries may exceed m; [`Monomial::reduce`]
/// maps into Z_m^k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    exponents: Vec<u64>,
}

impl Monomial {
    pub fn new(exponents: Vec<u64>) -> Self {
        Monomial { exponents }
    }

    /// The constant monomial 1 in k variables.
    pub fn constant(k: usize) -> Self {
        Monomial {
            exponents: vec![0; k],
        }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Componentwise reduction modulo m.
    pub fn reduce(&self, m: u32) -> Monomial {
        Monomial {
            exponents: self.exponents.iter().map(|e| e % m as u64).collect(),
        }
    }

    /// True when every exponent already lies in [0, m).
    pub fn is_reduced(&self, m: u32) -> bool {
        self.exponents.iter().all(|&e| e < m as u64)
    }

    /// The conjugate class abar = ([m - alpha_1] mod m, ..., [m - alpha_k]
    /// mod m) of the reduction of this monomial.
    pub fn conjugate_class(&self, m: u32) -> Monomial {
        let m64 = m as u64;
        Monomial {
            exponents: self
                .exponents
                .iter()
                .map(|e| (m64 - e % m64) % m64)
                .collect(),
        }
    }
}

impl fmt::Display for Monomial {
    /// `1`, `z2`, `z1*z2^3`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            write!(f, "z{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Degree-lexicographic comparison with z1 > z2 > ... > zk: lower total
/// degree first, ties broken by ascending lexicographic comparison of the
/// exponent tuples (so within a degree, powers of zk come first and powers
/// of z1 last).
pub fn deglex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    debug_assert_eq!(a.k(), b.k());
    a.degree()
        .cmp(&b.degree())
        .then_with(|| a.exponents.cmp(&b.exponents))
}

/// A design node, stored as its residue tuple in Z_m^k.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Node {
    residues: Vec<u32>,
}

impl Node {
    pub fn new(residues: Vec<u32>) -> Self {
        Node { residues }
    }

    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn k(&self) -> usize {
        self.residues.len()
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// The residue [sum_i alpha_i j_i] mod m of z^alpha evaluated at a node.
pub fn eval_residue(alpha: &Monomial, node: &Node, m: u32) -> Result<u32> {
    if alpha.k() != node.k() {
        return Err(Error::DimensionMismatch {
            expected: node.k(),
            got: alpha.k(),
        });
    }
    let m64 = m as u64;
    let mut acc = 0u64;
    for (e, &j) in alpha.exponents().iter().zip(node.residues()) {
        acc = (acc + (e % m64) * j as u64) % m64;
    }
    Ok(acc as u32)
}

/// A set of n distinct nodes in Omega_m^k. Node order is fixed at input
/// order and defines the row order of evaluation matrices and weight
/// vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DesignDoc", into = "DesignDoc")]
pub struct Design {
    m: u32,
    k: usize,
    nodes: Vec<Node>,
}

impl Design {
    pub fn new(m: u32, k: usize, nodes: Vec<Node>) -> Result<Self> {
        if m < 1 {
            return Err(Error::Invalid("modulus m must be at least 1".into()));
        }
        if k < 1 {
            return Err(Error::Invalid("dimension k must be at least 1".into()));
        }
        if nodes.is_empty() {
            return Err(Error::EmptyDesign);
        }
        let mut seen = HashSet::new();
        for node in &nodes {
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
        Ok(Design { m, k, nodes })
    }

    /// The full factorial Omega_m^k.
    pub fn full_factorial(m: u32, k: usize) -> Result<Self> {
        if m < 1 || k < 1 {
            return Err(Error::Invalid("m and k must be at least 1".into()));
        }
        let count = checked_class_count(m, k)?;
        let nodes = (0..count)
            .map(|rank| Node::new(residues_from_rank(rank, m, k)))
            .collect();
        Design::new(m, k, nodes)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Evaluate z^alpha at a node of this design.
    pub fn evaluate_monomial(&self, alpha: &Monomial, node: &Node) -> Result<CycNum> {
        let e = eval_residue(alpha, node, self.m)?;
        Ok(CycNum::root_power(self.m, e))
    }

    /// m^k, guarded by the enumeration bound.
    pub fn class_count(&self) -> Result<u64> {
        checked_class_count(self.m, self.k)
    }

    /// All reduced classes of Z_m^k in degree-lexicographic order.
    pub fn reduced_classes_deglex(&self) -> Result<Vec<Monomial>> {
        let count = self.class_count()?;
        let mut classes: Vec<Monomial> = (0..count)
            .map(|rank| Monomial::new(exponents_from_rank(rank, self.m, self.k)))
            .collect();
        classes.sort_by(deglex_cmp);
        Ok(classes)
    }

    /// Histogram of `eval_residue(alpha, d)` over the design's nodes;
    /// entry r counts the nodes where z^alpha evaluates to w^r.
    fn residue_counts(&self, alpha: &Monomial) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.m as usize];
        for node in &self.nodes {
            counts[eval_residue(alpha, node, self.m)? as usize] += 1;
        }
        Ok(counts)
    }

    /// sum_d z^alpha(d) as an exact cyclotomic number.
    pub fn monomial_node_sum(&self, alpha: &Monomial) -> Result<CycNum> {
        let counts = self.residue_counts(alpha)?;
        let mut acc = CycNum::zero(self.m);
        for (r, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let scale = BigRational::from(BigInt::from(c));
            acc += CycNum::root_power(self.m, r as u32).scaled(&scale);
        }
        Ok(acc)
    }
}

fn checked_class_count(m: u32, k: usize) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = match acc.checked_mul(m as u64) {
            Some(v) if v <= MAX_CLASSES => v,
            _ => {
                let approx = (m as u128)
                    .checked_pow(k as u32)
                    .map_or(u64::MAX, |v| v.min(u64::MAX as u128) as u64);
                return Err(Error::TooManyClasses(approx, MAX_CLASSES));
            }
        };
    }
    Ok(acc)
}

/// Mixed-radix rank with the first coordinate most significant.
pub(crate) fn rank_of_exponents(exps: &[u64], m: u32) -> usize {
    let mut rank = 0usize;
    for &e in exps {
        rank = rank * m as usize + e as usize;
    }
    rank
}

fn exponents_from_rank(rank: u64, m: u32, k: usize) -> Vec<u64> {
    let mut out = vec![0u64; k];
    let mut r = rank;
    for i in (0..k).rev() {
        out[i] = r % m as u64;
        r /= m as u64;
    }
    out
}

fn residues_from_rank(rank: u64, m: u32, k: usize) -> Vec<u32> {
    exponents_from_rank(rank, m, k)
        .into_iter()
        .map(|e| e as u32)
        .collect()
}

/// The indicator function of a design: coefficients b_alpha for every
/// reduced class alpha, stored densely by mixed-radix rank.
#[derive(Debug, Clone)]
pub struct IndicatorFn {
    design: Design,
    coeffs: Vec<CycNum>,
}

/// Compute the indicator coefficients b_alpha = m^{-k} sum_d z^{abar}(d)
/// of a design, for all m^k reduced classes.
pub fn indicator_coefficients(design: &Design) -> Result<IndicatorFn> {
    let count = design.class_count()?;
    let m = design.m();
    let k = design.k();
    let total = BigRational::new(BigInt::from(1), BigInt::from(count));
    let mut coeffs = Vec::with_capacity(count as usize);
    for rank in 0..count {
        let alpha = Monomial::new(exponents_from_rank(rank, m, k));
        let abar = alpha.conjugate_class(m);
        let sum = design.monomial_node_sum(&abar)?;
        coeffs.push(sum.scaled(&total));
    }
    Ok(IndicatorFn {
        design: design.clone(),
        coeffs,
    })
}

impl IndicatorFn {
    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn m(&self) -> u32 {
        self.design.m()
    }

    pub fn k(&self) -> usize {
        self.design.k()
    }

    /// The coefficient b_alpha; alpha is reduced first.
    pub fn coeff(&self, alpha: &Monomial) -> Result<&CycNum> {
        if alpha.k() != self.design.k() {
            return Err(Error::DimensionMismatch {
                expected: self.design.k(),
                got: alpha.k(),
            });
        }
        let reduced = alpha.reduce(self.design.m());
        Ok(&self.coeffs[rank_of_exponents(reduced.exponents(), self.design.m())])
    }

    /// Reduced classes with nonzero coefficient, in degree-lexicographic
    /// order.
    pub fn support(&self) -> Vec<Monomial> {
        let m = self.design.m();
        let k = self.design.k();
        let mut out: Vec<Monomial> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(rank, _)| Monomial::new(exponents_from_rank(rank as u64, m, k)))
            .collect();
        out.sort_by(deglex_cmp);
        out
    }

    /// Evaluate the indicator polynomial at an arbitrary point of
    /// Omega_m^k. Equals 1 on design nodes and 0 elsewhere.
    pub fn evaluate_at(&self, node: &Node) -> Result<CycNum> {
        let m = self.design.m();
        let k = self.design.k();
        let mut acc = CycNum::zero(m);
        for (rank, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let alpha = Monomial::new(exponents_from_rank(rank as u64, m, k));
            let e = eval_residue(&alpha, node, m)?;
            acc += CycNum::root_power(m, e).try_mul(c)?;
        }
        Ok(acc)
    }
}

/// Outcome of a regularity scan.
///
/// A design counts as regular when, for every reduced class alpha, the
/// evaluation vector [z^alpha(d)]_d is either constant or sums to zero
/// exactly. `witnesses` lists every failing class in degree-lexicographic
/// order, so any one of them certifies non-regularity.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub is_regular: bool,
    pub witnesses: Vec<Monomial>,
}

impl RegularityReport {
    /// The degree-lexicographically first failing class, if any.
    pub fn witness(&self) -> Option<&Monomial> {
        self.witnesses.first()
    }
}

/// Scan all reduced classes for the parallel-or-orthogonal property of the
/// evaluation vectors.
pub fn is_regular_fraction(design: &Design) -> Result<RegularityReport> {
    let mut witnesses = vec![];
    for alpha in design.reduced_classes_deglex()? {
        let counts = design.residue_counts(&alpha)?;
        let constant = counts.iter().filter(|&&c| c > 0).count() == 1;
        if constant {
            continue;
        }
        let mut sum = CycNum::zero(design.m());
        for (r, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let scale = BigRational::from(BigInt::from(c));
            sum += CycNum::root_power(design.m(), r as u32).scaled(&scale);
        }
        if !sum.is_zero() {
            witnesses.push(alpha);
        }
    }
    Ok(RegularityReport {
        is_regular: witnesses.is_empty(),
        witnesses,
    })
}

/// On-disk form of a design: `{"m": 4, "k": 2, "nodes": [[0,0],[1,3]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignDoc {
    pub m: u32,
    pub k: usize,
    pub nodes: Vec<Vec<u32>>,
}

impl TryFrom<DesignDoc> for Design {
    type Error = Error;

    fn try_from(doc: DesignDoc) -> Result<Design> {
        Design::new(doc.m, doc.k, doc.nodes.into_iter().map(Node::new).collect())
    }
}

impl From<Design> for DesignDoc {
    fn from(design: Design) -> DesignDoc {
        DesignDoc {
            m: design.m,
            k: design.k,
            nodes: design
                .nodes
                .iter()
                .map(|n| n.residues().to_vec())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{design, half_fraction_2_4, mono, rat};

    #[test]
    fn evaluate_monomial_examples() {
        let d = design(4, 2, &[[2u32, 1u32].as_slice()]);
        let node = &d.nodes()[0];
        // alpha = (1, 2) at node (2, 1): exponent 2 + 2 = 4 = 0 mod 4.
        assert!(d
            .evaluate_monomial(&mono(&[1, 2]), node)
            .unwrap()
            .is_one());
        // Unreduced exponents wrap: alpha = (5, 0) acts like (1, 0).
        assert_eq!(
            d.evaluate_monomial(&mono(&[5, 0]), node).unwrap(),
            CycNum::root_power(4, 2)
        );
        let d2 = design(2, 3, &[[1u32, 1u32, 0u32].as_slice()]);
        assert_eq!(
            d2.evaluate_monomial(&mono(&[1, 1, 1]), &d2.nodes()[0]).unwrap(),
            CycNum::one(2)
        );
        assert!(matches!(
            d.evaluate_monomial(&mono(&[1]), node),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(
            Design::new(4, 2, vec![Node::new(vec![0, 0]), Node::new(vec![0, 0])]),
            Err(Error::DuplicateNode(_))
        ));
        assert!(matches!(
            Design::new(4, 2, vec![Node::new(vec![0, 4])]),
            Err(Error::ResidueOutOfRange { residue: 4, m: 4 })
        ));
        assert!(matches!(Design::new(4, 2, vec![]), Err(Error::EmptyDesign)));
        assert!(matches!(
            Design::new(4, 2, vec![Node::new(vec![0])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn deglex_enumeration_order() {
        let d = design(2, 2, &[[0u32, 0u32].as_slice()]);
        let classes = d.reduced_classes_deglex().unwrap();
        let expect: Vec<Monomial> = [
            [0u64, 0u64],
            [0, 1],
            [1, 0],
            [1, 1],
        ]
        .iter()
        .map(|e| mono(e))
        .collect();
        assert_eq!(classes, expect);
    }

    #[test]
    fn full_factorial_indicator_is_delta_at_zero() {
        let d = Design::full_factorial(3, 2).unwrap();
        let f = indicator_coefficients(&d).unwrap();
        assert!(f.coeff(&mono(&[0, 0])).unwrap().is_one());
        for alpha in d.reduced_classes_deglex().unwrap() {
            if !alpha.is_constant() {
                assert!(f.coeff(&alpha).unwrap().is_zero(), "alpha = {alpha}");
            }
        }
        assert_eq!(f.support(), vec![mono(&[0, 0])]);
    }

    #[test]
    fn half_fraction_indicator_coefficients() {
        let d = half_fraction_2_4();
        let f = indicator_coefficients(&d).unwrap();
        assert!(f.coeff(&mono(&[0, 0, 0, 0])).unwrap().eq_rational(&rat(1, 2)));
        assert!(f.coeff(&mono(&[0, 1, 1, 0])).unwrap().eq_rational(&rat(1, 4)));
        assert!(f.coeff(&mono(&[0, 1, 0, 1])).unwrap().eq_rational(&rat(1, 4)));
        assert!(f.coeff(&mono(&[1, 1, 1, 0])).unwrap().eq_rational(&rat(-1, 4)));
        assert!(f.coeff(&mono(&[1, 1, 0, 1])).unwrap().eq_rational(&rat(1, 4)));
        assert_eq!(f.support().len(), 5);
    }

    #[test]
    fn indicator_separates_design_from_complement() {
        let d = half_fraction_2_4();
        let f = indicator_coefficients(&d).unwrap();
        let node_set: HashSet<Vec<u32>> = d
            .nodes()
            .iter()
            .map(|n| n.residues().to_vec())
            .collect();
        let full = Design::full_factorial(2, 4).unwrap();
        for node in full.nodes() {
            let v = f.evaluate_at(node).unwrap();
            if node_set.contains(node.residues()) {
                assert!(v.is_one(), "node {node}");
            } else {
                assert!(v.is_zero(), "node {node}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry_of_coefficients() {
        let d = design(4, 2, &[&[0, 0], &[1, 3], &[2, 1], &[3, 2]]);
        let f = indicator_coefficients(&d).unwrap();
        for alpha in d.reduced_classes_deglex().unwrap() {
            let b = f.coeff(&alpha).unwrap().clone();
            let b_conj_class = f.coeff(&alpha.conjugate_class(4)).unwrap().clone();
            assert_eq!(b_conj_class, b.conj(), "alpha = {alpha}");
        }
    }

    #[test]
    fn node_sums_match_indicator_coefficients() {
        let d = half_fraction_2_4();
        let f = indicator_coefficients(&d).unwrap();
        let total = rat(16, 1);
        for alpha in d.reduced_classes_deglex().unwrap() {
            let sum = d.monomial_node_sum(&alpha).unwrap();
            let b = f.coeff(&alpha.conjugate_class(2)).unwrap();
            assert_eq!(sum, b.scaled(&total), "alpha = {alpha}");
        }
    }

    #[test]
    fn regularity_of_half_fraction_fails_with_witnesses() {
        let d = half_fraction_2_4();
        let report = is_regular_fraction(&d).unwrap();
        assert!(!report.is_regular);
        assert!(report.witnesses.contains(&mono(&[1, 1, 0, 1])));
        // Every witness genuinely fails the parallel-or-orthogonal test.
        for w in &report.witnesses {
            let counts = d.residue_counts(w).unwrap();
            assert!(counts.iter().filter(|&&c| c > 0).count() > 1);
            assert!(!d.monomial_node_sum(w).unwrap().is_zero());
        }
    }

    #[test]
    fn regular_designs_pass() {
        let half = design(2, 2, &[&[0, 0], &[1, 1]]);
        assert!(is_regular_fraction(&half).unwrap().is_regular);
        let full = Design::full_factorial(3, 2).unwrap();
        assert!(is_regular_fraction(&full).unwrap().is_regular);
    }

    #[test]
    fn design_json_round_trip() {
        let d = design(4, 2, &[&[0, 0], &[1, 3], &[2, 1], &[3, 2]]);
        let json = serde_json::to_string(&d).unwrap();
        let back: Design = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        let err = serde_json::from_str::<Design>(r#"{"m":4,"k":2,"nodes":[[0,0],[0,0]]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn monomial_display() {
        assert_eq!(mono(&[0, 0]).to_string(), "1");
        assert_eq!(mono(&[1, 0, 2]).to_string(), "z1*z3^2");
        assert_eq!(mono(&[0, 1]).to_string(), "z2");
    }

    #[test]
    fn class_count_guard() {
        assert!(matches!(
            Design::full_factorial(64, 5),
            Err(Error::TooManyClasses(..))
        ));
    }
}
