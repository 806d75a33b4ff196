//! Monomial bases, evaluation matrices and quotient-basis extraction.
//!
//! A pair (design, basis) is "correct" when the evaluation matrix
//! X = [s(d)]_{d in D, s in S} is square and nonsingular; interpolation on
//! the design is then unique within the span of the basis. Correctness is
//! decided by exact rank over Q(w_m).

use crate::cyclo::CycNum;
use crate::design::{deglex_cmp, Design, Monomial};
use crate::linalg::{CycMatrix, Echelon};
use crate::{Error, Result};

/// Candidate enumeration order for [`quotient_basis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermOrder {
    /// All reduced monomials by total degree, ties by ascending
    /// lexicographic exponent comparison (z1 > z2 > ... > zk).
    DegLex,
    /// An explicit candidate list, scanned in the given order.
    Explicit(Vec<Monomial>),
}

/// An ordered list of distinct reduced monomials. When the constant monomial
/// is present it is kept in first position; construction reorders it there
/// if needed (column order does not affect computed weights, which are
/// indexed by nodes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    monomials: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn new(m: u32, monomials: Vec<Monomial>) -> Result<Self> {
        if monomials.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let k = monomials[0].k();
        let mut seen = std::collections::HashSet::new();
        for mono in &monomials {
            if mono.k() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: mono.k(),
                });
            }
            if !mono.is_reduced(m) {
                return Err(Error::NotReduced(mono.to_string(), m));
            }
            if !seen.insert(mono.exponents().to_vec()) {
                return Err(Error::DuplicateMonomial(mono.to_string()));
            }
        }
        let mut monomials = monomials;
        if let Some(pos) = monomials.iter().position(|s| s.is_constant()) {
            if pos != 0 {
                let constant = monomials.remove(pos);
                monomials.insert(0, constant);
            }
        }
        Ok(MonomialBasis { monomials })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn k(&self) -> usize {
        self.monomials[0].k()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn contains(&self, mono: &Monomial) -> bool {
        self.monomials.iter().any(|s| s == mono)
    }
}

/// The evaluation matrix [s(d)] with one row per design node (in design
/// order) and one column per basis monomial (in basis order). Every entry is
/// a root of unity.
pub type EvalMatrix = CycMatrix;

pub fn evaluation_matrix(design: &Design, basis: &MonomialBasis) -> Result<EvalMatrix> {
    if basis.k() != design.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: basis.k(),
        });
    }
    let nodes = design.nodes();
    let monos = basis.monomials();
    let mut entries = Vec::with_capacity(nodes.len() * monos.len());
    for node in nodes {
        for mono in monos {
            entries.push(design.evaluate_monomial(mono, node)?);
        }
    }
    let mut it = entries.into_iter();
    Ok(CycMatrix::from_fn(
        design.m(),
        nodes.len(),
        monos.len(),
        |_, _| it.next().expect("sized iterator"),
    ))
}

/// Whether (design, basis) interpolates uniquely: the evaluation matrix must
/// be square with full exact rank.
pub fn is_correct_pair(design: &Design, basis: &MonomialBasis) -> Result<bool> {
    if basis.len() != design.n() {
        return Ok(false);
    }
    let x = evaluation_matrix(design, basis)?;
    Ok(x.rank() == design.n())
}

/// Greedily extract a basis of the function space on the design: scan
/// candidates in the given order and keep each monomial whose evaluation
/// vector is independent of those kept so far, stopping at n monomials.
///
/// With [`TermOrder::DegLex`] the scan covers all m^k reduced monomials,
/// whose evaluation vectors span the full function space on the design, so
/// the result always reaches n monomials and forms a correct pair. An
/// explicit candidate list may exhaust early, which is an error.
pub fn quotient_basis(design: &Design, order: &TermOrder) -> Result<MonomialBasis> {
    let candidates: Vec<Monomial> = match order {
        TermOrder::DegLex => design.reduced_classes_deglex()?,
        TermOrder::Explicit(list) => list.clone(),
    };
    let n = design.n();
    let mut ech = Echelon::new(n);
    let mut kept = Vec::with_capacity(n);
    for alpha in candidates {
        if alpha.k() != design.k() {
            return Err(Error::DimensionMismatch {
                expected: design.k(),
                got: alpha.k(),
            });
        }
        let reduced = alpha.reduce(design.m());
        if kept.contains(&reduced) {
            continue;
        }
        let column: Vec<CycNum> = design
            .nodes()
            .iter()
            .map(|node| design.evaluate_monomial(&reduced, node))
            .collect::<Result<_>>()?;
        if ech.try_insert(&column) {
            kept.push(reduced);
            if kept.len() == n {
                return MonomialBasis::new(design.m(), kept);
            }
        }
    }
    Err(Error::CandidatesExhausted {
        accepted: kept.len(),
        needed: n,
    })
}

/// Convenience: reduced monomials of Z_m^k sorted degree-lexicographically.
pub fn deglex_classes(design: &Design) -> Result<Vec<Monomial>> {
    design.reduced_classes_deglex()
}

/// Sort a monomial list in place by the degree-lexicographic order used
/// throughout the crate.
pub fn sort_deglex(monomials: &mut [Monomial]) {
    monomials.sort_by(deglex_cmp);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycNum;
    use crate::testutil::{design, mono, quarter_fraction_4_2, two_nodes_3_2};

    fn basis(m: u32, monos: &[&[u64]]) -> MonomialBasis {
        MonomialBasis::new(m, monos.iter().map(|e| mono(e)).collect()).unwrap()
    }

    #[test]
    fn constant_basis_gives_ones_column() {
        let d = quarter_fraction_4_2();
        let b = basis(4, &[&[0, 0]]);
        let x = evaluation_matrix(&d, &b).unwrap();
        assert_eq!(x.rows(), 4);
        assert_eq!(x.cols(), 1);
        for r in 0..4 {
            assert!(x.get(r, 0).is_one());
        }
    }

    #[test]
    fn quarter_fraction_matrix_row() {
        // Row for node (1, 3) with basis {1, z2, z1, z2^3}.
        let d = quarter_fraction_4_2();
        let b = basis(4, &[&[0, 0], &[0, 1], &[1, 0], &[0, 3]]);
        let x = evaluation_matrix(&d, &b).unwrap();
        let expect = [
            CycNum::one(4),
            CycNum::root_power(4, 3),
            CycNum::root_power(4, 1),
            CycNum::root_power(4, 1),
        ];
        assert_eq!(x.row(1), expect.as_slice());
    }

    #[test]
    fn correct_pair_decisions() {
        let d = quarter_fraction_4_2();
        assert!(is_correct_pair(&d, &basis(4, &[&[0, 0], &[0, 1], &[1, 0], &[0, 3]])).unwrap());
        // Wrong size.
        assert!(!is_correct_pair(&d, &basis(4, &[&[0, 0]])).unwrap());
        // Nodes sharing the first coordinate make {1, z1} collapse.
        let shared = design(4, 2, &[&[1, 0], &[1, 2]]);
        assert!(!is_correct_pair(&shared, &basis(4, &[&[0, 0], &[1, 0]])).unwrap());
        assert!(is_correct_pair(&shared, &basis(4, &[&[0, 0], &[0, 1]])).unwrap());
    }

    #[test]
    fn quotient_basis_on_full_factorial_is_everything() {
        let d = crate::design::Design::full_factorial(2, 2).unwrap();
        let b = quotient_basis(&d, &TermOrder::DegLex).unwrap();
        assert_eq!(b.len(), 4);
        assert!(is_correct_pair(&d, &b).unwrap());
        // On the full factorial every reduced monomial is kept.
        let mut classes = d.reduced_classes_deglex().unwrap();
        sort_deglex(&mut classes);
        let mut got = b.monomials().to_vec();
        sort_deglex(&mut got);
        assert_eq!(got, classes);
    }

    #[test]
    fn quotient_basis_two_nodes() {
        let d = two_nodes_3_2();
        let b = quotient_basis(&d, &TermOrder::DegLex).unwrap();
        assert_eq!(b.monomials(), &[mono(&[0, 0]), mono(&[0, 1])]);
    }

    #[test]
    fn quotient_basis_single_node() {
        let d = design(4, 2, &[&[2, 3]]);
        let b = quotient_basis(&d, &TermOrder::DegLex).unwrap();
        assert_eq!(b.monomials(), &[mono(&[0, 0])]);
    }

    #[test]
    fn explicit_order_is_respected_and_can_exhaust() {
        let d = two_nodes_3_2();
        let order = TermOrder::Explicit(vec![mono(&[0, 0]), mono(&[1, 0]), mono(&[0, 1])]);
        let b = quotient_basis(&d, &order).unwrap();
        // z1 separates the nodes (residues 0 and 2), so it is kept first.
        assert_eq!(b.monomials(), &[mono(&[0, 0]), mono(&[1, 0])]);

        let too_short = TermOrder::Explicit(vec![mono(&[0, 0])]);
        assert!(matches!(
            quotient_basis(&d, &too_short),
            Err(Error::CandidatesExhausted {
                accepted: 1,
                needed: 2
            })
        ));
    }

    #[test]
    fn basis_constructor_normalizes_and_validates() {
        let b = MonomialBasis::new(4, vec![mono(&[0, 1]), mono(&[0, 0]), mono(&[1, 0])]).unwrap();
        assert_eq!(b.monomials()[0], mono(&[0, 0]));
        assert!(matches!(
            MonomialBasis::new(4, vec![mono(&[0, 4])]),
            Err(Error::NotReduced(..))
        ));
        assert!(matches!(
            MonomialBasis::new(4, vec![mono(&[0, 1]), mono(&[0, 1])]),
            Err(Error::DuplicateMonomial(_))
        ));
        assert!(matches!(
            MonomialBasis::new(4, vec![]),
            Err(Error::EmptyBasis)
        ));
    }
}
