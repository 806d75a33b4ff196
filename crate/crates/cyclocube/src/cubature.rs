//! Cubature rules on roots-of-unity node sets: weight computation, equal
//! weight characterization and search, precision reports, and exactness
//! checks for holomorphic and mixed monomials.
//!
//! A rule is a node set paired with one weight per node. Given a correct
//! basis (one whose evaluation matrix on the nodes is square and
//! nonsingular), the weights that integrate every basis element exactly are
//! unique; everything here is built on that solve.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycNum;
use crate::design::{eval_residue, indicator_coefficients, Design, IndicatorFn, Monomial};
use crate::interp::{evaluation_matrix, quotient_basis, MonomialBasis, TermOrder};
use crate::linalg;
use crate::measures::{MixedExponent, Moment, MomentProvider};
use crate::{Error, Result};

/// Weight vector of a rule, indexed like the design's nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(Vec<CycNum>),
    Approx(Vec<Complex64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Exact(w) => w.len(),
            Weights::Approx(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Weights::Exact(_))
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Weights::Exact(w) => w.iter().map(CycNum::to_complex).collect(),
            Weights::Approx(w) => w.clone(),
        }
    }
}

/// How a rule's basis was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ExplicitBasis,
    QuotientBasis,
    EqualWeightSearch,
}

/// An interpolatory rule: design, correct basis, and the unique weights
/// integrating that basis exactly.
#[derive(Debug, Clone)]
pub struct CubatureRule {
    design: Design,
    basis: MonomialBasis,
    weights: Weights,
    equal_weights: bool,
    provenance: Provenance,
    /// Largest componentwise defect of the float solve; `None` for exact
    /// weights, which are verified by resubstitution instead.
    residual: Option<f64>,
}

impl CubatureRule {
    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn equal_weights(&self) -> bool {
        self.equal_weights
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    /// Rebuild a rule from its serialized form. Shapes are validated (node
    /// order, basis reduction, weight count); weights with exact strings
    /// everywhere come back exact, otherwise as floats. The equal weight
    /// flag is recomputed rather than trusted.
    pub fn from_doc(doc: RuleDoc) -> Result<CubatureRule> {
        let design = Design::new(
            doc.m,
            doc.k,
            doc.nodes
                .iter()
                .map(|r| crate::design::Node::new(r.clone()))
                .collect(),
        )?;
        let basis = MonomialBasis::new(
            doc.m,
            doc.basis.iter().map(|e| Monomial::new(e.clone())).collect(),
        )?;
        if doc.weights.len() != design.n() {
            return Err(Error::DimensionMismatch {
                expected: design.n(),
                got: doc.weights.len(),
            });
        }
        for (node, w) in design.nodes().iter().zip(&doc.weights) {
            if node.residues() != w.node.as_slice() {
                return Err(Error::Invalid(format!(
                    "weight listed for node ({:?}) does not match design node {node}",
                    w.node
                )));
            }
        }
        let all_exact = doc.weights.iter().all(|w| w.exact.is_some());
        let (weights, equal) = if all_exact {
            let w: Vec<CycNum> = doc
                .weights
                .iter()
                .map(|wd| CycNum::parse(wd.exact.as_deref().unwrap(), doc.m))
                .collect::<Result<_>>()?;
            let equal = w.iter().skip(1).all(|v| *v == w[0]);
            (Weights::Exact(w), equal)
        } else {
            let w: Vec<Complex64> = doc
                .weights
                .iter()
                .map(|wd| Complex64::new(wd.re, wd.im))
                .collect();
            let equal = w.iter().skip(1).all(|v| (*v - w[0]).norm() <= 1e-12);
            (Weights::Approx(w), equal)
        };
        Ok(CubatureRule {
            design,
            basis,
            weights,
            equal_weights: equal,
            provenance: doc.provenance,
            residual: doc.residual,
        })
    }

    pub fn to_doc(&self) -> RuleDoc {
        let weights = match &self.weights {
            Weights::Exact(w) => self
                .design
                .nodes()
                .iter()
                .zip(w)
                .map(|(node, v)| {
                    let c = v.to_complex();
                    WeightDoc {
                        node: node.residues().to_vec(),
                        exact: Some(v.to_string()),
                        re: c.re,
                        im: c.im,
                    }
                })
                .collect(),
            Weights::Approx(w) => self
                .design
                .nodes()
                .iter()
                .zip(w)
                .map(|(node, v)| WeightDoc {
                    node: node.residues().to_vec(),
                    exact: None,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        };
        RuleDoc {
            m: self.design.m(),
            k: self.design.k(),
            nodes: self
                .design
                .nodes()
                .iter()
                .map(|n| n.residues().to_vec())
                .collect(),
            basis: self
                .basis
                .monomials()
                .iter()
                .map(|s| s.exponents().to_vec())
                .collect(),
            weights,
            equal_weights: self.equal_weights,
            provenance: self.provenance,
            residual: self.residual,
        }
    }
}

/// Serializable form of a rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleDoc {
    pub m: u32,
    pub k: usize,
    pub nodes: Vec<Vec<u32>>,
    pub basis: Vec<Vec<u64>>,
    pub weights: Vec<WeightDoc>,
    pub equal_weights: bool,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDoc {
    pub node: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<String>,
    pub re: f64,
    pub im: f64,
}

fn check_compatibility(
    design: &Design,
    basis: &MonomialBasis,
    provider: &dyn MomentProvider,
) -> Result<()> {
    if basis.k() != design.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: basis.k(),
        });
    }
    if provider.k() != design.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: provider.k(),
        });
    }
    Ok(())
}

/// Solve for the unique weights making the rule exact on the basis span.
///
/// Requires a correct pair: as many basis elements as nodes and a
/// nonsingular evaluation matrix (checked exactly, independent of the
/// measure). Exact measure moments give exact weights, verified by
/// resubstitution; float moments give float weights with the solve residual
/// recorded. `tol` only affects float-side comparisons such as the equal
/// weight flag.
pub fn compute_weights(
    design: &Design,
    basis: &MonomialBasis,
    provider: &dyn MomentProvider,
    tol: f64,
) -> Result<CubatureRule> {
    compute_weights_inner(design, basis, provider, tol, Provenance::ExplicitBasis)
}

/// Build the quotient basis for the given order, then solve for weights.
pub fn quotient_rule(
    design: &Design,
    order: &TermOrder,
    provider: &dyn MomentProvider,
    tol: f64,
) -> Result<CubatureRule> {
    let basis = quotient_basis(design, order)?;
    compute_weights_inner(design, &basis, provider, tol, Provenance::QuotientBasis)
}

fn compute_weights_inner(
    design: &Design,
    basis: &MonomialBasis,
    provider: &dyn MomentProvider,
    tol: f64,
    provenance: Provenance,
) -> Result<CubatureRule> {
    check_compatibility(design, basis, provider)?;
    let n = design.n();
    let x = evaluation_matrix(design, basis)?;
    let rank = x.rank();
    if basis.len() != n || rank < n {
        let defect = n.min(basis.len()) - rank;
        return Err(Error::IncorrectPair {
            rows: n,
            cols: basis.len(),
            rank,
            defect,
        });
    }

    let m = design.m();
    let moments: Vec<Moment> = basis
        .monomials()
        .iter()
        .map(|s| provider.moment(s, m))
        .collect::<Result<_>>()?;
    let all_exact = moments.iter().all(|v| matches!(v, Moment::Exact(_)));

    if all_exact {
        let rhs: Vec<CycNum> = moments
            .iter()
            .map(|v| match v {
                Moment::Exact(c) => c.clone(),
                Moment::Approx(_) => unreachable!(),
            })
            .collect();
        let w = x.solve_transposed(&rhs)?;
        for (c, want) in rhs.iter().enumerate() {
            let mut acc = CycNum::zero(m);
            for (d, wd) in w.iter().enumerate() {
                acc += x.get(d, c) * wd;
            }
            if acc != *want {
                return Err(Error::Internal(format!(
                    "exact solve failed resubstitution at column {c}"
                )));
            }
        }
        let equal = w.iter().skip(1).all(|v| *v == w[0]);
        Ok(CubatureRule {
            design: design.clone(),
            basis: basis.clone(),
            weights: Weights::Exact(w),
            equal_weights: equal,
            provenance,
            residual: None,
        })
    } else {
        let xc = x.to_complex();
        let a: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| xc[j][i]).collect()).collect();
        let rhs: Vec<Complex64> = moments.iter().map(Moment::to_complex).collect();
        let w = linalg::float::solve(&a, &rhs).ok_or_else(|| {
            Error::Internal("float elimination hit a zero pivot on an exactly nonsingular matrix".into())
        })?;
        let mut residual = 0.0f64;
        for (c, want) in rhs.iter().enumerate() {
            let got: Complex64 = (0..n).map(|d| xc[d][c] * w[d]).sum();
            residual = residual.max((got - want).norm());
        }
        let equal = w.iter().skip(1).all(|v| (*v - w[0]).norm() <= tol);
        Ok(CubatureRule {
            design: design.clone(),
            basis: basis.clone(),
            weights: Weights::Approx(w),
            equal_weights: equal,
            provenance,
            residual: Some(residual),
        })
    }
}

/// The rule's value for the holomorphic monomial z^alpha, exact when the
/// weights are.
pub fn quadrature_holomorphic(rule: &CubatureRule, alpha: &Monomial) -> Result<Moment> {
    let design = &rule.design;
    let m = design.m();
    match &rule.weights {
        Weights::Exact(w) => {
            let mut acc = CycNum::zero(m);
            for (node, wd) in design.nodes().iter().zip(w) {
                let e = eval_residue(alpha, node, m)?;
                acc += &CycNum::root_power(m, e) * wd;
            }
            Ok(Moment::Exact(acc))
        }
        Weights::Approx(w) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (node, wd) in design.nodes().iter().zip(w) {
                let e = eval_residue(alpha, node, m)?;
                acc += CycNum::root_power(m, e).to_complex() * wd;
            }
            Ok(Moment::Approx(acc))
        }
    }
}

/// The rule's value for the mixed monomial with the given exponent pairs.
/// On the nodes, conj(z_j) = z_j^{-1}, so the integrand is again a root of
/// unity at every node.
pub fn quadrature_mixed(rule: &CubatureRule, e: &MixedExponent) -> Result<Moment> {
    let design = &rule.design;
    let k = design.k();
    if e.p() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: e.p(),
        });
    }
    let m = design.m();
    let m64 = m as u64;
    let node_residue = |node: &crate::design::Node| -> u32 {
        let mut acc = 0u64;
        for ((n, mm), &j) in e.pairs().iter().zip(node.residues()) {
            let diff = (n % m64 + m64 - mm % m64) % m64;
            acc = (acc + diff * j as u64) % m64;
        }
        acc as u32
    };
    match &rule.weights {
        Weights::Exact(w) => {
            let mut acc = CycNum::zero(m);
            for (node, wd) in design.nodes().iter().zip(w) {
                acc += &CycNum::root_power(m, node_residue(node)) * wd;
            }
            Ok(Moment::Exact(acc))
        }
        Weights::Approx(w) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (node, wd) in design.nodes().iter().zip(w) {
                acc += CycNum::root_power(m, node_residue(node)).to_complex() * wd;
            }
            Ok(Moment::Approx(acc))
        }
    }
}

fn moments_agree(a: &Moment, b: &Moment, tol: f64) -> bool {
    match (a, b) {
        (Moment::Exact(x), Moment::Exact(y)) => x == y,
        _ => (a.to_complex() - b.to_complex()).norm() <= tol,
    }
}

/// Whether the rule integrates z^alpha exactly against the measure. Exact
/// weights and exact moments compare exactly; any float ingredient compares
/// within `tol`.
pub fn verify_exactness(
    rule: &CubatureRule,
    provider: &dyn MomentProvider,
    alpha: &Monomial,
    tol: f64,
) -> Result<bool> {
    if provider.k() != rule.design.k() {
        return Err(Error::DimensionMismatch {
            expected: rule.design.k(),
            got: provider.k(),
        });
    }
    let quad = quadrature_holomorphic(rule, alpha)?;
    let want = provider.moment(alpha, rule.design.m())?;
    Ok(moments_agree(&quad, &want, tol))
}

/// Membership test for the equal weight characterization: z^alpha belongs
/// exactly when its integral equals (m^k / n) times the indicator
/// coefficient of the conjugate class, which is what the uniform weight
/// vector (1/n, ..., 1/n) produces. A basis drawn entirely from this set
/// yields equal weights, and conversely.
pub fn equal_weight_membership(
    design: &Design,
    indicator: &IndicatorFn,
    provider: &dyn MomentProvider,
    alpha: &Monomial,
    tol: f64,
) -> Result<bool> {
    if provider.k() != design.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: provider.k(),
        });
    }
    let m = design.m();
    let scale = BigRational::new(
        BigInt::from(design.class_count()?),
        BigInt::from(design.n()),
    );
    let target = indicator
        .coeff(&alpha.conjugate_class(m))?
        .clone()
        .scaled(&scale);
    let moment = provider.moment(alpha, m)?;
    Ok(moments_agree(&moment, &Moment::Exact(target), tol))
}

/// Result of [`equal_weight_basis_search`].
#[derive(Debug)]
pub enum SearchOutcome {
    Found(CubatureRule),
    /// No correct basis exists inside the membership set; `members` is the
    /// number of residue classes that passed the membership test.
    NotFound { members: usize },
}

/// Search for a correct basis drawn from the equal weight membership set,
/// scanning residue classes in degree-then-lexicographic order and keeping
/// each class whose evaluation vector is independent of those kept so far.
///
/// The kept vectors always span the same space as all member vectors seen so
/// far, so the greedy scan finds a correct basis exactly when one exists
/// inside the membership set. On success the weights are computed and
/// checked to be uniform.
pub fn equal_weight_basis_search(
    design: &Design,
    provider: &dyn MomentProvider,
    tol: f64,
) -> Result<SearchOutcome> {
    if provider.k() != design.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: provider.k(),
        });
    }
    let indicator = indicator_coefficients(design)?;
    let n = design.n();
    let mut members = 0usize;
    let mut kept: Vec<Monomial> = Vec::new();
    let mut echelon = linalg::Echelon::new(n);
    for class in design.reduced_classes_deglex()? {
        if !equal_weight_membership(design, &indicator, provider, &class, tol)? {
            continue;
        }
        members += 1;
        let col: Vec<CycNum> = design
            .nodes()
            .iter()
            .map(|node| design.evaluate_monomial(&class, node))
            .collect::<Result<_>>()?;
        if echelon.try_insert(&col) {
            kept.push(class);
            if kept.len() == n {
                break;
            }
        }
    }
    if kept.len() < n {
        return Ok(SearchOutcome::NotFound { members });
    }
    let basis = MonomialBasis::new(design.m(), kept)?;
    let rule = compute_weights_inner(
        design,
        &basis,
        provider,
        tol,
        Provenance::EqualWeightSearch,
    )?;
    let uniform_ok = match &rule.weights {
        Weights::Exact(w) => {
            let uniform = CycNum::from_rational(
                design.m(),
                BigRational::new(BigInt::one(), BigInt::from(n)),
            );
            w.iter().all(|v| *v == uniform)
        }
        Weights::Approx(w) => {
            let uniform = 1.0 / n as f64;
            w.iter().all(|v| (v - uniform).norm() <= tol)
        }
    };
    if !uniform_ok {
        return Err(Error::Internal(
            "search produced a basis inside the membership set with nonuniform weights".into(),
        ));
    }
    Ok(SearchOutcome::Found(rule))
}

/// One residue class integrated exactly by an equal weight rule.
#[derive(Debug, Clone, Serialize)]
pub struct PrecisionClass {
    pub monomial: Monomial,
    pub degree: u64,
    /// Whether every lift of the class shares the representative's moment,
    /// making all of them exact; `None` when the measure cannot decide.
    pub unbounded: Option<bool>,
}

/// The residue classes an equal weight rule integrates exactly.
#[derive(Debug, Clone, Serialize)]
pub struct PrecisionReport {
    pub classes: Vec<PrecisionClass>,
    /// Largest total degree among the class representatives.
    pub precision_degree: u64,
    /// True when some exact class is exact in every lift, so exact monomials
    /// of arbitrarily large degree exist.
    pub degree_unbounded: bool,
}

/// Enumerate the residue classes whose holomorphic monomials an equal
/// weight rule integrates exactly. The classes depend only on the design
/// and the measure; the rule is required to have equal weights because only
/// then does exactness depend on alpha through its residue class alone.
pub fn precision_basis_report(
    rule: &CubatureRule,
    provider: &dyn MomentProvider,
    tol: f64,
) -> Result<PrecisionReport> {
    if !rule.equal_weights() {
        return Err(Error::UnequalWeights);
    }
    let design = rule.design();
    if provider.k() != design.k() {
        return Err(Error::DimensionMismatch {
            expected: design.k(),
            got: provider.k(),
        });
    }
    let indicator = indicator_coefficients(design)?;
    let m = design.m();
    let mut classes = Vec::new();
    let mut precision_degree = 0u64;
    let mut degree_unbounded = false;
    for class in design.reduced_classes_deglex()? {
        if !equal_weight_membership(design, &indicator, provider, &class, tol)? {
            continue;
        }
        let degree = class.degree();
        let unbounded = provider.lifts_share_moment(&class, m);
        precision_degree = precision_degree.max(degree);
        if unbounded == Some(true) {
            degree_unbounded = true;
        }
        classes.push(PrecisionClass {
            monomial: class,
            degree,
            unbounded,
        });
    }
    Ok(PrecisionReport {
        classes,
        precision_degree,
        degree_unbounded,
    })
}

/// Outcome of [`mixed_exactness_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedCheck {
    /// Whether the measure gives z^{alpha+gamma} conj(z)^gamma the same
    /// integral as z^alpha.
    pub moments_match: bool,
    /// Whether the rule integrates z^alpha exactly.
    pub holomorphic_exact: bool,
    /// Whether the rule integrates the mixed monomial exactly; `None` when
    /// the mixed integral is unavailable (moments do not match and the
    /// measure exposes no mixed moments).
    pub mixed_exact: Option<bool>,
}

/// For an equal weight rule, check exactness transfer from z^alpha to the
/// mixed monomial z^{alpha+gamma} conj(z)^gamma.
///
/// On the nodes the two integrands coincide up to residue arithmetic, and
/// under equal weights the rule values match; so whenever the measure gives
/// both the same integral, the rule is exact for one iff it is exact for
/// the other. The measure is consulted through
/// [`MomentProvider::mixed_vs_holomorphic`]; if it cannot decide, the check
/// fails with [`Error::MixedHypothesisUnknown`].
pub fn mixed_exactness_check(
    rule: &CubatureRule,
    alpha: &Monomial,
    gamma: &Monomial,
    provider: &dyn MomentProvider,
    tol: f64,
) -> Result<MixedCheck> {
    if !rule.equal_weights() {
        return Err(Error::UnequalWeights);
    }
    let design = rule.design();
    let k = design.k();
    if alpha.k() != k || gamma.k() != k || provider.k() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: if alpha.k() != k {
                alpha.k()
            } else if gamma.k() != k {
                gamma.k()
            } else {
                provider.k()
            },
        });
    }
    let m = design.m();
    let moments_match = provider
        .mixed_vs_holomorphic(alpha, gamma, m)
        .ok_or(Error::MixedHypothesisUnknown)?;
    let holomorphic_exact = verify_exactness(rule, provider, alpha, tol)?;
    if !moments_match {
        return Ok(MixedCheck {
            moments_match,
            holomorphic_exact,
            mixed_exact: None,
        });
    }
    let e = MixedExponent::from_shift(alpha, gamma);
    let quad = quadrature_mixed(rule, &e)?;
    let want = provider.moment(alpha, m)?;
    let mixed_exact = moments_agree(&quad, &want, tol);
    if mixed_exact != holomorphic_exact {
        return Err(Error::Internal(
            "exactness transfer failed for an equal weight rule with matching moments".into(),
        ));
    }
    Ok(MixedCheck {
        moments_match,
        holomorphic_exact,
        mixed_exact: Some(mixed_exact),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{DiscreteMeasure, FloatMomentTable, GaussianSpec};
    use crate::testutil::{design, half_fraction_2_4, mono, quarter_fraction_4_2, rat};
    use std::collections::HashMap;

    fn basis(m: u32, exps: &[&[u64]]) -> MonomialBasis {
        MonomialBasis::new(m, exps.iter().map(|e| mono(e)).collect()).unwrap()
    }

    fn exact_weights(rule: &CubatureRule) -> &[CycNum] {
        match rule.weights() {
            Weights::Exact(w) => w,
            _ => panic!("expected exact weights"),
        }
    }

    #[test]
    fn half_fraction_rule_has_uniform_weights() {
        let d = half_fraction_2_4();
        let s = basis(
            2,
            &[
                &[0, 0, 0, 0],
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
                &[1, 1, 0, 0],
                &[0, 0, 1, 1],
                &[1, 0, 1, 1],
            ],
        );
        let gauss = GaussianSpec::standard(4).unwrap();
        let rule = compute_weights(&d, &s, &gauss, 1e-12).unwrap();
        assert!(rule.equal_weights());
        assert_eq!(rule.residual(), None);
        for w in exact_weights(&rule) {
            assert!(w.eq_rational(&rat(1, 8)));
        }
    }

    #[test]
    fn quarter_fraction_rule_has_uniform_weights() {
        let d = quarter_fraction_4_2();
        let s = basis(4, &[&[0, 0], &[0, 1], &[1, 0], &[0, 3]]);
        let gauss = GaussianSpec::standard(2).unwrap();
        let rule = compute_weights(&d, &s, &gauss, 1e-12).unwrap();
        assert!(rule.equal_weights());
        for w in exact_weights(&rule) {
            assert!(w.eq_rational(&rat(1, 4)));
        }
    }

    #[test]
    fn discrete_measure_weights() {
        let d = design(2, 1, &[&[0], &[1]]);
        let s = basis(2, &[&[0], &[1]]);
        let biased = DiscreteMeasure::new(
            2,
            1,
            vec![
                (crate::design::Node::new(vec![0]), rat(1, 3)),
                (crate::design::Node::new(vec![1]), rat(2, 3)),
            ],
        )
        .unwrap();
        let rule = compute_weights(&d, &s, &biased, 1e-12).unwrap();
        // Interpolatory weights at the atoms reproduce the masses.
        let w = exact_weights(&rule);
        assert!(w[0].eq_rational(&rat(1, 3)));
        assert!(w[1].eq_rational(&rat(2, 3)));
        assert!(!rule.equal_weights());

        let uniform = DiscreteMeasure::uniform_on(&d);
        let rule = compute_weights(&d, &s, &uniform, 1e-12).unwrap();
        let w = exact_weights(&rule);
        assert!(w[0].eq_rational(&rat(1, 2)));
        assert!(w[1].eq_rational(&rat(1, 2)));
        assert!(rule.equal_weights());
    }

    #[test]
    fn incorrect_pair_is_reported_with_rank() {
        let d = design(2, 2, &[&[0, 0], &[0, 1]]);
        // Second coordinate is z2 on both nodes: z1 never separates them.
        let s = basis(2, &[&[0, 0], &[1, 0]]);
        let gauss = GaussianSpec::standard(2).unwrap();
        match compute_weights(&d, &s, &gauss, 1e-12) {
            Err(Error::IncorrectPair {
                rows,
                cols,
                rank,
                defect,
            }) => {
                assert_eq!((rows, cols, rank, defect), (2, 2, 1, 1));
            }
            other => panic!("expected IncorrectPair, got {other:?}"),
        }
    }

    #[test]
    fn verify_exactness_examples() {
        let d = quarter_fraction_4_2();
        let s = basis(4, &[&[0, 0], &[0, 1], &[1, 0], &[0, 3]]);
        let gauss = GaussianSpec::standard(2).unwrap();
        let rule = compute_weights(&d, &s, &gauss, 1e-12).unwrap();

        // The node average of z1 z2 is 1/2 but the integral is 0.
        assert!(!verify_exactness(&rule, &gauss, &mono(&[1, 1]), 1e-12).unwrap());
        match quadrature_holomorphic(&rule, &mono(&[1, 1])).unwrap() {
            Moment::Exact(v) => assert!(v.eq_rational(&rat(1, 2))),
            _ => panic!("expected exact"),
        }
        // z2^5 reduces to z2, whose node sum vanishes; the integral of any
        // nonconstant holomorphic monomial is 0 as well.
        assert!(verify_exactness(&rule, &gauss, &mono(&[0, 5]), 1e-12).unwrap());
        assert!(verify_exactness(&rule, &gauss, &mono(&[0, 0]), 1e-12).unwrap());
    }

    #[test]
    fn equal_weight_search_finds_quarter_fraction_basis() {
        let d = quarter_fraction_4_2();
        let gauss = GaussianSpec::standard(2).unwrap();
        match equal_weight_basis_search(&d, &gauss, 1e-12).unwrap() {
            SearchOutcome::Found(rule) => {
                let got: Vec<Vec<u64>> = rule
                    .basis()
                    .monomials()
                    .iter()
                    .map(|s| s.exponents().to_vec())
                    .collect();
                assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2]]);
                assert!(rule.equal_weights());
                assert_eq!(rule.provenance(), Provenance::EqualWeightSearch);
                for w in exact_weights(&rule) {
                    assert!(w.eq_rational(&rat(1, 4)));
                }
            }
            SearchOutcome::NotFound { members } => {
                panic!("expected a basis, got NotFound with {members} members")
            }
        }
    }

    #[test]
    fn equal_weight_search_can_fail() {
        // Two nodes of Omega_3^2: no pair of cube roots of unity sums to
        // zero, so the only membership class is the constant and no second
        // independent member exists.
        let d = design(3, 2, &[&[0, 2], &[2, 1]]);
        let gauss = GaussianSpec::standard(2).unwrap();
        match equal_weight_basis_search(&d, &gauss, 1e-12).unwrap() {
            SearchOutcome::NotFound { members } => assert_eq!(members, 1),
            SearchOutcome::Found(_) => panic!("expected NotFound"),
        }
    }

    #[test]
    fn precision_report_quarter_fraction() {
        let d = quarter_fraction_4_2();
        let gauss = GaussianSpec::standard(2).unwrap();
        let rule = match equal_weight_basis_search(&d, &gauss, 1e-12).unwrap() {
            SearchOutcome::Found(rule) => rule,
            _ => panic!("search should succeed"),
        };
        let report = precision_basis_report(&rule, &gauss, 1e-12).unwrap();
        let got: Vec<Vec<u64>> = report
            .classes
            .iter()
            .map(|c| c.monomial.exponents().to_vec())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![2, 0],
                vec![0, 3],
                vec![3, 0],
                vec![2, 2],
            ]
        );
        assert_eq!(report.precision_degree, 4);
        assert!(report.degree_unbounded);
        // Every nonzero class keeps its moment across lifts; the zero class
        // does not (the constant integrates to 1, its lifts to 0).
        for class in &report.classes {
            let expect = Some(!class.monomial.is_constant());
            assert_eq!(class.unbounded, expect, "class {}", class.monomial);
        }
    }

    #[test]
    fn precision_report_half_fraction() {
        let d = half_fraction_2_4();
        let gauss = GaussianSpec::standard(4).unwrap();
        let s = basis(
            2,
            &[
                &[0, 0, 0, 0],
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
                &[1, 1, 0, 0],
                &[0, 0, 1, 1],
                &[1, 0, 1, 1],
            ],
        );
        let rule = compute_weights(&d, &s, &gauss, 1e-12).unwrap();
        let report = precision_basis_report(&rule, &gauss, 1e-12).unwrap();
        // 16 classes minus the 4 nonzero classes where the indicator
        // coefficient is nonzero.
        assert_eq!(report.classes.len(), 12);
        assert!(report.degree_unbounded);
        for absent in [
            mono(&[0, 1, 0, 1]),
            mono(&[0, 1, 1, 0]),
            mono(&[1, 1, 0, 1]),
            mono(&[1, 1, 1, 0]),
        ] {
            assert!(
                report.classes.iter().all(|c| c.monomial != absent),
                "class {absent} should not be exact"
            );
        }
    }

    #[test]
    fn precision_report_requires_equal_weights() {
        let d = design(2, 1, &[&[0], &[1]]);
        let s = basis(2, &[&[0], &[1]]);
        let biased = DiscreteMeasure::new(
            2,
            1,
            vec![
                (crate::design::Node::new(vec![0]), rat(1, 3)),
                (crate::design::Node::new(vec![1]), rat(2, 3)),
            ],
        )
        .unwrap();
        let rule = compute_weights(&d, &s, &biased, 1e-12).unwrap();
        assert!(matches!(
            precision_basis_report(&rule, &biased, 1e-12),
            Err(Error::UnequalWeights)
        ));
    }

    #[test]
    fn mixed_checks_on_quarter_fraction() {
        let d = quarter_fraction_4_2();
        let gauss = GaussianSpec::standard(2).unwrap();
        let rule = match equal_weight_basis_search(&d, &gauss, 1e-12).unwrap() {
            SearchOutcome::Found(rule) => rule,
            _ => panic!("search should succeed"),
        };

        let alpha = mono(&[0, 1]);
        for gamma in [
            mono(&[0, 0]),
            mono(&[1, 0]),
            mono(&[0, 1]),
            mono(&[1, 1]),
        ] {
            let check = mixed_exactness_check(&rule, &alpha, &gamma, &gauss, 1e-12).unwrap();
            assert!(check.moments_match, "gamma {gamma}");
            assert!(check.holomorphic_exact, "gamma {gamma}");
            assert_eq!(check.mixed_exact, Some(true), "gamma {gamma}");
        }

        // z1 z2 is not integrated exactly, and neither is |z1|^2 z1 z2.
        let check =
            mixed_exactness_check(&rule, &mono(&[1, 1]), &mono(&[1, 0]), &gauss, 1e-12).unwrap();
        assert!(check.moments_match);
        assert!(!check.holomorphic_exact);
        assert_eq!(check.mixed_exact, Some(false));

        // alpha = 0 with nonzero gamma: E|z^gamma|^2 is outside the reach of
        // the block criterion.
        assert!(matches!(
            mixed_exactness_check(&rule, &mono(&[0, 0]), &mono(&[0, 1]), &gauss, 1e-12),
            Err(Error::MixedHypothesisUnknown)
        ));
    }

    #[test]
    fn mixed_check_with_discrete_measure_decides_everything() {
        let d = design(2, 1, &[&[0], &[1]]);
        let uniform = DiscreteMeasure::uniform_on(&d);
        let s = basis(2, &[&[0], &[1]]);
        let rule = compute_weights(&d, &s, &uniform, 1e-12).unwrap();
        assert!(rule.equal_weights());
        // alpha = 0, gamma = 1: |z|^2 = 1 on the circle, matching the
        // constant; a discrete measure can verify that exactly.
        let check =
            mixed_exactness_check(&rule, &mono(&[0]), &mono(&[1]), &uniform, 1e-12).unwrap();
        assert!(check.moments_match);
        assert!(check.holomorphic_exact);
        assert_eq!(check.mixed_exact, Some(true));
    }

    #[test]
    fn float_provider_gives_float_weights_with_residual() {
        let d = design(2, 1, &[&[0], &[1]]);
        let s = basis(2, &[&[0], &[1]]);
        let mut map = HashMap::new();
        map.insert(vec![0u64], Complex64::new(1.0, 0.0));
        map.insert(vec![1u64], Complex64::new(0.0, 0.0));
        let table = FloatMomentTable::new(1, true, map);
        let rule = compute_weights(&d, &s, &table, 1e-9).unwrap();
        let w = rule.weights().to_complex();
        assert!((w[0] - 0.5).norm() < 1e-12);
        assert!((w[1] - 0.5).norm() < 1e-12);
        assert!(rule.equal_weights());
        assert!(rule.residual().unwrap() < 1e-12);
        assert!(!rule.weights().is_exact());
        assert!(verify_exactness(&rule, &table, &mono(&[1]), 1e-9).unwrap());
    }

    #[test]
    fn quotient_rule_provenance() {
        let d = design(2, 2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let gauss = GaussianSpec::standard(2).unwrap();
        let rule = quotient_rule(&d, &TermOrder::DegLex, &gauss, 1e-12).unwrap();
        assert_eq!(rule.provenance(), Provenance::QuotientBasis);
        assert!(rule.equal_weights());
        for w in exact_weights(&rule) {
            assert!(w.eq_rational(&rat(1, 4)));
        }
    }

    #[test]
    fn rule_doc_round_trips() {
        let d = quarter_fraction_4_2();
        let s = basis(4, &[&[0, 0], &[0, 1], &[1, 0], &[0, 3]]);
        let gauss = GaussianSpec::standard(2).unwrap();
        let rule = compute_weights(&d, &s, &gauss, 1e-12).unwrap();
        let json = serde_json::to_string(&rule.to_doc()).unwrap();
        let back = CubatureRule::from_doc(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.design().nodes(), d.nodes());
        assert_eq!(back.basis().monomials(), rule.basis().monomials());
        assert_eq!(back.weights(), rule.weights());
        assert!(back.equal_weights());

        // A tampered doc whose weights are listed against the wrong node
        // order is rejected.
        let mut doc = rule.to_doc();
        doc.weights.swap(0, 1);
        assert!(matches!(
            CubatureRule::from_doc(doc),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn rule_doc_serializes() {
        let d = design(2, 1, &[&[0], &[1]]);
        let s = basis(2, &[&[0], &[1]]);
        let uniform = DiscreteMeasure::uniform_on(&d);
        let rule = compute_weights(&d, &s, &uniform, 1e-12).unwrap();
        let json = serde_json::to_value(rule.to_doc()).unwrap();
        assert_eq!(json["m"], 2);
        assert_eq!(json["equal_weights"], true);
        assert_eq!(json["weights"][0]["exact"], "(1/2)");
        assert_eq!(json["provenance"], "explicit_basis");
        assert!(json.get("residual").is_none());
    }
}
