//! Construction of the optimal measurement and its certification.
//!
//! For a valid symmetric family the minimum-error measurement has a closed
//! form. In the phase-fixed eigenbasis the first element is the rank-one
//! matrix with every entry equal to `1/N`; the remaining elements are its
//! conjugates under powers of `R`. Equivalently one may pick any seed vector
//! `φ0` with real nonzero eigenbasis overlaps, form `Φ2 = Σ_λ
//! N^{-1/2}⟨λ|φ0⟩^{-1} |λ⟩⟨λ|`, and take `π_0 = Φ2|φ0⟩⟨φ0|Φ2` — the result
//! is the same measurement for every valid `φ0`, which is exactly what makes
//! the canonical form canonical. Both routes are implemented; their equality
//! is part of the test surface.
//!
//! Optimality is certified by two operator conditions evaluated on raw
//! matrices: the pairwise products `π_k(p_kρ_k − p_jρ_j)π_j` must vanish,
//! and `Σ_k p_kπ_kρ_k − p_jρ_j` must be positive semidefinite for every `j`.
//! Reducible problems are handled block by block and the conditions are then
//! evaluated on the assembled block-diagonal operators, so the reported
//! residuals are those of the full Hilbert space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cxmat::{inner, vec_norm, ComplexMatrix};
use crate::symstates::{generate_states, DirectSumProblem, SymmetricFamily};
use crate::{tol, Error, Result};

/// Seed-vector choice for the measurement construction.
#[derive(Clone, Debug)]
pub enum Phi0 {
    /// Direct construction of the all-entries-1/N element in the eigenbasis.
    /// Equals the seeded construction for every valid seed; default.
    Canonical,
    /// Uniform superposition of the phase-fixed eigenvectors. The default
    /// seed when the seeded path is requested without an explicit vector;
    /// its overlaps are all `1/√d`, so it is always valid.
    Uniform,
    /// Explicit unit vector in the standard basis.
    Vector(Vec<Complex64>),
}

/// A probability operator measure: one PSD element per outcome, summing to
/// the identity.
#[derive(Clone, Debug)]
pub struct Pom {
    elements: Vec<ComplexMatrix>,
}

/// Raw structural numbers for a measurement.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PomChecks {
    /// ‖Σ_k π_k − 1‖_F.
    pub completeness_residual: f64,
    /// Smallest eigenvalue over all elements.
    pub positivity_min: f64,
    /// Largest ‖π_k − π_k†‖_F over all elements.
    pub hermiticity_max: f64,
}

impl Pom {
    /// Validate and build: every element Hermitian and PSD, all elements
    /// summing to the identity.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Pom> {
        let pom = Pom { elements };
        let checks = pom.checks()?;
        if checks.hermiticity_max > tol::STRUCTURAL {
            return Err(Error::Validation {
                invariant: "hermiticity",
                detail: format!(
                    "measurement element deviates from Hermitian by {:.3e}",
                    checks.hermiticity_max
                ),
            });
        }
        if checks.positivity_min < -tol::PSD_FLOOR {
            return Err(Error::Validation {
                invariant: "positivity",
                detail: format!(
                    "measurement element has eigenvalue {:.3e}",
                    checks.positivity_min
                ),
            });
        }
        if checks.completeness_residual > tol::STRUCTURAL {
            return Err(Error::Validation {
                invariant: "completeness",
                detail: format!(
                    "measurement elements sum to the identity only within {:.3e}",
                    checks.completeness_residual
                ),
            });
        }
        Ok(pom)
    }

    /// Build without validation. Exists so negative controls can inject
    /// deliberately broken measurements; everything downstream still reports
    /// raw residuals.
    pub fn unchecked(elements: Vec<ComplexMatrix>) -> Pom {
        Pom { elements }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, ComplexMatrix::rows)
    }

    pub fn checks(&self) -> Result<PomChecks> {
        let Some(first) = self.elements.first() else {
            return Err(Error::Validation {
                invariant: "completeness",
                detail: "measurement has no elements".into(),
            });
        };
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d)?;
        let mut positivity_min = f64::INFINITY;
        let mut hermiticity_max = 0.0f64;
        for el in &self.elements {
            if !el.is_square() || el.rows() != d {
                return Err(Error::DimensionMismatch(
                    "measurement elements must share one square dimension".into(),
                ));
            }
            sum = sum.add(el);
            hermiticity_max = hermiticity_max.max(el.hermiticity_residual());
            let min_eig = el.hermitize().min_eigenvalue(tol::STRUCTURAL)?;
            positivity_min = positivity_min.min(min_eig);
        }
        let completeness_residual = sum.sub(&ComplexMatrix::identity(d)?).frobenius_norm();
        Ok(PomChecks {
            completeness_residual,
            positivity_min,
            hermiticity_max,
        })
    }
}

/// The operator `Φ2` of the seeded construction, diagonal in the eigenbasis
/// with coefficients `N^{-1/2}/⟨λ|φ0⟩`. Its square is the inverse of the
/// invariant operator `Φ`; it equals `Φ^{-1/2}` itself exactly when all
/// overlaps are positive.
#[derive(Clone, Debug)]
pub struct Phi2Operator {
    pub matrix: ComplexMatrix,
    pub coefficients: Vec<f64>,
}

/// Residuals of the two optimality conditions plus the structural numbers of
/// the measurement they were evaluated with.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConditionResiduals {
    /// max over (j, k) of ‖π_k(p_kρ_k − p_jρ_j)π_j‖_F.
    pub pairwise_residual: f64,
    /// min over j of the smallest eigenvalue of Σ_k p_kπ_kρ_k − p_jρ_j.
    pub global_min_eigenvalue: f64,
    /// ‖Σ_k π_k − 1‖_F.
    pub completeness_residual: f64,
    /// Smallest eigenvalue over all measurement elements.
    pub pom_positivity_min: f64,
}

impl ConditionResiduals {
    /// The certification predicate at a tolerance scale (1 = the published
    /// thresholds).
    pub fn optimal_at_scale(&self, scale: f64) -> bool {
        self.pairwise_residual <= tol::CONDITION * scale
            && self.global_min_eigenvalue >= -tol::CONDITION * scale
            && self.completeness_residual <= tol::STRUCTURAL * scale
            && self.pom_positivity_min >= -tol::PSD_FLOOR * scale
    }
}

/// Outcome of solving a problem: the error probability, the condition
/// residuals on the full Hilbert space, and the certification verdict at the
/// published tolerances.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub p_error: f64,
    pub pairwise_residual: f64,
    pub global_min_eigenvalue: f64,
    pub pom_positivity_min: f64,
    pub completeness_residual: f64,
    /// False when some block's nonzero-entry graph was disconnected; the
    /// construction still goes through, but the eigenbasis phases are then
    /// fixed per component rather than globally.
    pub phase_graph_connected: bool,
    pub optimal: bool,
}

impl OptimalityReport {
    pub fn residuals(&self) -> ConditionResiduals {
        ConditionResiduals {
            pairwise_residual: self.pairwise_residual,
            global_min_eigenvalue: self.global_min_eigenvalue,
            completeness_residual: self.completeness_residual,
            pom_positivity_min: self.pom_positivity_min,
        }
    }
}

/// A solved problem: one measurement per block plus aggregate reporting.
#[derive(Clone, Debug)]
pub struct Solution {
    pub block_poms: Vec<Pom>,
    pub block_residuals: Vec<ConditionResiduals>,
    pub report: OptimalityReport,
}

/// Eigenbasis overlaps `⟨λ|φ0⟩`, verified real and bounded away from zero.
fn overlaps(family: &SymmetricFamily, phi0: &[Complex64]) -> Result<Vec<f64>> {
    let d = family.dim();
    if phi0.len() != d {
        return Err(Error::InvalidSeedVector(format!(
            "seed vector has length {}, expected {d}",
            phi0.len()
        )));
    }
    let norm = vec_norm(phi0);
    if (norm - 1.0).abs() > tol::STRUCTURAL {
        return Err(Error::InvalidSeedVector(format!(
            "seed vector norm is {norm:.12}, expected 1"
        )));
    }
    let basis = family.sym().eigenbasis();
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let ov = inner(&basis.column(j), phi0);
        if ov.norm() <= tol::OVERLAP_MIN {
            return Err(Error::InvalidSeedVector(format!(
                "seed vector is orthogonal to eigenvector {j} (overlap {:.3e})",
                ov.norm()
            )));
        }
        if ov.im.abs() > tol::PHASE_IM {
            return Err(Error::InvalidSeedVector(format!(
                "overlap with eigenvector {j} has imaginary part {:.3e}",
                ov.im
            )));
        }
        out.push(ov.re);
    }
    Ok(out)
}

/// The uniform superposition of the phase-fixed eigenvectors, the default
/// seed for the seeded construction path.
pub fn uniform_phi0(family: &SymmetricFamily) -> Vec<Complex64> {
    let basis = family.sym().eigenbasis();
    let d = family.dim();
    let mut v = vec![Complex64::default(); d];
    for j in 0..d {
        for (vi, bi) in v.iter_mut().zip(basis.column(j)) {
            *vi += bi;
        }
    }
    let norm = vec_norm(&v);
    v.iter().map(|z| z / norm).collect()
}

/// The invariant operator `Φ = Σ_k R^k |φ0⟩⟨φ0| R^{†k}`, diagonal in the
/// eigenbasis with entries `N·|⟨λ|φ0⟩|²`.
pub fn build_phi(family: &SymmetricFamily, phi0: &[Complex64]) -> Result<ComplexMatrix> {
    overlaps(family, phi0)?;
    let r = family.sym().matrix();
    let r_adj = r.adjoint();
    let gamma0 = ComplexMatrix::outer(phi0, phi0)?;
    let mut term = gamma0;
    let mut phi = ComplexMatrix::zeros(family.dim(), family.dim())?;
    for _ in 0..family.n() {
        phi = phi.add(&term);
        term = r.matmul(&term)?.matmul(&r_adj)?;
    }
    Ok(phi)
}

/// The signed inverse-root operator `Φ2 = Σ_λ N^{-1/2}⟨λ|φ0⟩^{-1}|λ⟩⟨λ|`.
pub fn build_phi2(family: &SymmetricFamily, phi0: &[Complex64]) -> Result<Phi2Operator> {
    let ovs = overlaps(family, phi0)?;
    let n = family.n() as f64;
    let basis = family.sym().eigenbasis();
    let d = family.dim();
    let coefficients: Vec<f64> = ovs.iter().map(|ov| 1.0 / (n.sqrt() * ov)).collect();
    let mut matrix = ComplexMatrix::zeros(d, d)?;
    for (j, &c) in coefficients.iter().enumerate() {
        let col = basis.column(j);
        matrix = matrix.add(&ComplexMatrix::outer(&col, &col)?.scale(c));
    }
    Ok(Phi2Operator {
        matrix,
        coefficients,
    })
}

/// Construct the optimal measurement.
///
/// The canonical route sums the phase-fixed eigenvectors into `s = Σ_λ |λ⟩`
/// and takes `π_0 = (1/N)|s⟩⟨s|`; the seeded route goes through `Φ2`. Both
/// produce the same elements for every valid seed, and the remaining
/// elements are conjugates `π_k = R^k π_0 R^{†k}`.
pub fn build_pom(family: &SymmetricFamily, phi0: &Phi0) -> Result<Pom> {
    let d = family.dim();
    let n = family.n();
    let pi0 = match phi0 {
        Phi0::Canonical => {
            let basis = family.sym().eigenbasis();
            let mut s = vec![Complex64::default(); d];
            for j in 0..d {
                for (si, bi) in s.iter_mut().zip(basis.column(j)) {
                    *si += bi;
                }
            }
            ComplexMatrix::outer(&s, &s)?.scale(1.0 / n as f64)
        }
        Phi0::Uniform => {
            let v = uniform_phi0(family);
            seeded_pi0(family, &v)?
        }
        Phi0::Vector(v) => seeded_pi0(family, v)?,
    };

    let r = family.sym().matrix();
    let r_adj = r.adjoint();
    let mut elements = Vec::with_capacity(n);
    let mut el = pi0;
    for _ in 0..n {
        elements.push(el.clone());
        el = r.matmul(&el)?.matmul(&r_adj)?;
    }
    Pom::new(elements)
}

fn seeded_pi0(family: &SymmetricFamily, phi0: &[Complex64]) -> Result<ComplexMatrix> {
    let phi2 = build_phi2(family, phi0)?;
    let gamma0 = ComplexMatrix::outer(phi0, phi0)?;
    phi2.matrix.matmul(&gamma0)?.matmul(&phi2.matrix)
}

/// Probability of decoding error for the given ensemble and measurement.
pub fn error_probability(family: &SymmetricFamily, pom: &Pom) -> Result<f64> {
    let states = generate_states(family);
    error_probability_states(&states, pom.elements(), family.prior())
}

/// max over (j, k) of ‖π_k(p_kρ_k − p_jρ_j)π_j‖_F; zero for the optimal
/// measurement.
pub fn check_pairwise_condition(family: &SymmetricFamily, pom: &Pom) -> Result<f64> {
    let states = generate_states(family);
    pairwise_residual_states(&states, pom.elements(), family.prior())
}

/// min over j of the smallest eigenvalue of `Σ_k p_kπ_kρ_k − p_jρ_j`;
/// nonnegative for the optimal measurement. Errors if `Σ_k π_kρ_k` is not
/// Hermitian within tolerance, which signals a broken measurement.
pub fn check_global_condition(family: &SymmetricFamily, pom: &Pom) -> Result<f64> {
    let states = generate_states(family);
    let g = global_condition_states(&states, pom.elements(), family.prior())?;
    if g.hermiticity_residual > tol::STRUCTURAL * g.scale.max(1.0) {
        return Err(Error::NotHermitian {
            residual: g.hermiticity_residual,
        });
    }
    Ok(g.min_eigenvalue)
}

/// True when `Φ2` coincides with the principal inverse square root of `Φ`,
/// which happens exactly when every overlap is positive — so positivity of
/// the overlaps is a precondition here, not just nonvanishing.
pub fn sqrt_measurement_equivalence(family: &SymmetricFamily, phi0: &[Complex64]) -> Result<bool> {
    let ovs = overlaps(family, phi0)?;
    if let Some(bad) = ovs.iter().find(|&&ov| ov <= 0.0) {
        return Err(Error::InvalidSeedVector(format!(
            "inverse-root comparison requires strictly positive overlaps, found {bad:.3e}"
        )));
    }
    let phi = build_phi(family, phi0)?;
    let inv_sqrt = phi.hermitian_eig(tol::STRUCTURAL)?.inverse_sqrt(1e-15)?;
    let phi2 = build_phi2(family, phi0)?;
    Ok(phi2.matrix.sub(&inv_sqrt).frobenius_norm() <= tol::CONDITION)
}

/// Solve a problem: construct the per-block measurements, then evaluate the
/// error probability and both optimality conditions on the assembled
/// block-diagonal operators.
pub fn solve(problem: &DirectSumProblem) -> Result<Solution> {
    let n = problem.n();
    let prior = 1.0 / n as f64;

    let mut block_poms = Vec::with_capacity(problem.blocks().len());
    let mut block_states = Vec::with_capacity(problem.blocks().len());
    let mut block_residuals = Vec::with_capacity(problem.blocks().len());
    for family in problem.blocks() {
        let pom = build_pom(family, &Phi0::Canonical)?;
        let states = generate_states(family);
        block_residuals.push(residuals_for(&states, pom.elements(), prior)?);
        block_states.push(states);
        block_poms.push(pom);
    }

    // Assemble the full-space states and measurement elements.
    let full_states: Vec<ComplexMatrix> = (0..n)
        .map(|k| {
            let blocks: Vec<ComplexMatrix> =
                block_states.iter().map(|s| s[k].clone()).collect();
            ComplexMatrix::direct_sum(&blocks)
        })
        .collect::<Result<_>>()?;
    let full_pom: Vec<ComplexMatrix> = (0..n)
        .map(|k| {
            let blocks: Vec<ComplexMatrix> =
                block_poms.iter().map(|p| p.elements()[k].clone()).collect();
            ComplexMatrix::direct_sum(&blocks)
        })
        .collect::<Result<_>>()?;

    let residuals = residuals_for(&full_states, &full_pom, prior)?;
    let p_error = error_probability_states(&full_states, &full_pom, prior)?;
    let report = OptimalityReport {
        p_error,
        pairwise_residual: residuals.pairwise_residual,
        global_min_eigenvalue: residuals.global_min_eigenvalue,
        pom_positivity_min: residuals.pom_positivity_min,
        completeness_residual: residuals.completeness_residual,
        phase_graph_connected: problem.phase_graph_connected(),
        optimal: residuals.optimal_at_scale(1.0),
    };
    Ok(Solution {
        block_poms,
        block_residuals,
        report,
    })
}

/// Negative-control hook: add `eps·diag(1, −1, 0, …)` to the first element
/// and renormalize all elements by the inverse square root of their sum, so
/// completeness is restored while optimality (and possibly positivity) is
/// deliberately broken. The result is intentionally not re-validated.
pub fn perturbed_pom(pom: &Pom, eps: f64) -> Result<Pom> {
    let d = pom.dim();
    if d < 2 {
        return Err(Error::Construction(
            "perturbation needs dimension at least 2".into(),
        ));
    }
    let mut delta = vec![0.0; d];
    delta[0] = eps;
    delta[1] = -eps;
    let delta = ComplexMatrix::diag_real(&delta)?;

    let mut elements: Vec<ComplexMatrix> = pom.elements().to_vec();
    elements[0] = elements[0].add(&delta);
    let mut sum = ComplexMatrix::zeros(d, d)?;
    for el in &elements {
        sum = sum.add(el);
    }
    let renorm = sum.hermitian_eig(tol::STRUCTURAL)?.inverse_sqrt(1e-12)?;
    let elements = elements
        .into_iter()
        .map(|el| renorm.matmul(&el).and_then(|m| m.matmul(&renorm)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Pom::unchecked(elements))
}

/// Outcome probability matrix `P(k|j) = tr(π_k ρ_j)` for states and
/// measurement sharing one space.
pub(crate) fn outcome_matrix(
    states: &[ComplexMatrix],
    pom: &[ComplexMatrix],
) -> Result<Vec<Vec<f64>>> {
    states
        .iter()
        .map(|rho| {
            pom.iter()
                .map(|pi| Ok(pi.matmul(rho)?.trace()?.re))
                .collect()
        })
        .collect()
}

pub(crate) fn error_probability_states(
    states: &[ComplexMatrix],
    pom: &[ComplexMatrix],
    prior: f64,
) -> Result<f64> {
    if states.len() != pom.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states but {} measurement elements",
            states.len(),
            pom.len()
        )));
    }
    let mut correct = 0.0;
    for (rho, pi) in states.iter().zip(pom) {
        correct += prior * pi.matmul(rho)?.trace()?.re;
    }
    Ok(1.0 - correct)
}

fn pairwise_residual_states(
    states: &[ComplexMatrix],
    pom: &[ComplexMatrix],
    prior: f64,
) -> Result<f64> {
    let n = states.len();
    let mut max = 0.0f64;
    for k in 0..n {
        for j in 0..n {
            let diff = states[k].sub(&states[j]).scale(prior);
            let op = pom[k].matmul(&diff)?.matmul(&pom[j])?;
            max = max.max(op.frobenius_norm());
        }
    }
    Ok(max)
}

struct GlobalCondition {
    min_eigenvalue: f64,
    hermiticity_residual: f64,
    scale: f64,
}

fn global_condition_states(
    states: &[ComplexMatrix],
    pom: &[ComplexMatrix],
    prior: f64,
) -> Result<GlobalCondition> {
    let d = states[0].rows();
    let mut lagrangian = ComplexMatrix::zeros(d, d)?;
    for (rho, pi) in states.iter().zip(pom) {
        lagrangian = lagrangian.add(&pi.matmul(rho)?.scale(prior));
    }
    let hermiticity_residual = lagrangian.hermiticity_residual();
    let scale = lagrangian.frobenius_norm();
    let herm = lagrangian.hermitize();
    let mut min_eigenvalue = f64::INFINITY;
    for rho in states {
        let op = herm.sub(&rho.scale(prior));
        min_eigenvalue = min_eigenvalue.min(op.min_eigenvalue(tol::STRUCTURAL)?);
    }
    Ok(GlobalCondition {
        min_eigenvalue,
        hermiticity_residual,
        scale,
    })
}

fn residuals_for(
    states: &[ComplexMatrix],
    pom_elements: &[ComplexMatrix],
    prior: f64,
) -> Result<ConditionResiduals> {
    let pom = Pom {
        elements: pom_elements.to_vec(),
    };
    let checks = pom.checks()?;
    let pairwise = pairwise_residual_states(states, pom_elements, prior)?;
    let global = global_condition_states(states, pom_elements, prior)?;
    Ok(ConditionResiduals {
        pairwise_residual: pairwise,
        global_min_eigenvalue: global.min_eigenvalue,
        completeness_residual: checks.completeness_residual,
        pom_positivity_min: checks.positivity_min,
    })
}
