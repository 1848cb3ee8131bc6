//! Symmetric state ensembles and their phase-fixed eigenbases.
//!
//! An ensemble is generated from one density matrix `ρ_0` by a unitary
//! symmetry operator `R` with `R^N = ±1` and nondegenerate spectrum:
//! `ρ_k = R^k ρ_0 R^{†k}`, each transmitted with prior `1/N`. Because the
//! eigenvalues of `R` are N-th roots of ±1, its spectral projectors come out
//! of a discrete character sum over powers of `R` — no general eigensolver is
//! ever applied to a non-Hermitian matrix here.
//!
//! The closed-form measurement construction additionally needs an eigenbasis
//! of `R` in which every matrix element of `ρ_0` is real and nonnegative.
//! Such a basis is unique per connected component of the nonzero-entry graph
//! up to one overall phase, so it can be found constructively: anchor one
//! eigenvector per component, then propagate phases breadth-first along
//! nonzero entries and verify the result. Failure to verify means the
//! ensemble is not representable in the required form, which is reported as
//! an error rather than silently worked around.

use num_complex::Complex64;

use crate::cxmat::{inner, vec_norm, ComplexMatrix, C_ONE};
use crate::rng::Xorshift64;
use crate::{tol, Error, Result};

/// Sign of `R^N = ±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::Validation {
                invariant: "sign",
                detail: format!("sign must be +1 or -1, got {other}"),
            }),
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Spectral projectors of a unitary `r` with `r^n = sign·1`.
///
/// Candidate eigenvalues are the n-th roots of the sign,
/// `b_m = exp(iπ(2m+s)/n)` with `s = 0` for `+1` and `s = 1` for `−1`.
/// For each candidate the character sum `P_m = (1/n)·Σ_k b_m^{−k}·r^k`
/// either vanishes or is the orthogonal projector onto the eigenspace.
/// Projectors with Frobenius norm above 1e-8 are returned in candidate
/// order; each must have unit trace (rank one), since a degenerate
/// eigenvalue makes the closed-form construction inapplicable.
pub fn spectral_projectors(
    r: &ComplexMatrix,
    n: usize,
    sign: Sign,
) -> Result<Vec<(Complex64, ComplexMatrix)>> {
    if !r.is_square() {
        return Err(Error::Validation {
            invariant: "dimension",
            detail: format!("symmetry operator must be square, got {}x{}", r.rows(), r.cols()),
        });
    }
    if n == 0 {
        return Err(Error::Validation {
            invariant: "symmetry order",
            detail: "symmetry order must be positive".into(),
        });
    }
    let d = r.rows();
    let id = ComplexMatrix::identity(d)?;

    let unitarity = r.matmul(&r.adjoint())?.sub(&id).frobenius_norm();
    if unitarity > tol::STRUCTURAL {
        return Err(Error::Validation {
            invariant: "unitarity",
            detail: format!("‖R·R† − 1‖ = {unitarity:.3e} exceeds {:.0e}", tol::STRUCTURAL),
        });
    }
    let order_res = r.pow(n)?.sub(&id.scale(sign.value())).frobenius_norm();
    if order_res > tol::STRUCTURAL {
        return Err(Error::Validation {
            invariant: "symmetry order",
            detail: format!(
                "‖R^{n} − ({:+})·1‖ = {order_res:.3e} exceeds {:.0e}",
                sign.as_i64(),
                tol::STRUCTURAL
            ),
        });
    }

    // Powers of R, reused across all candidates.
    let mut powers = Vec::with_capacity(n);
    let mut acc = id;
    for _ in 0..n {
        powers.push(acc.clone());
        acc = acc.matmul(r)?;
    }

    let shift = match sign {
        Sign::Plus => 0.0,
        Sign::Minus => 1.0,
    };
    let mut out = Vec::new();
    for m in 0..n {
        let angle = std::f64::consts::PI * (2.0 * m as f64 + shift) / n as f64;
        let b = Complex64::from_polar(1.0, angle);
        let mut p = ComplexMatrix::zeros(d, d)?;
        for (k, rk) in powers.iter().enumerate() {
            let coeff = Complex64::from_polar(1.0 / n as f64, -angle * k as f64);
            p = p.add(&rk.scale_c(coeff));
        }
        if p.frobenius_norm() <= tol::PROJECTOR_KEEP {
            continue;
        }
        let trace = p.trace()?;
        if (trace - C_ONE).norm() > tol::PROJECTOR_TRACE {
            return Err(Error::Validation {
                invariant: "degeneracy",
                detail: format!(
                    "projector for eigenvalue {b:.6} has trace {trace:.6}; \
                     eigenvalues of R must be nondegenerate"
                ),
            });
        }
        out.push((b, p));
    }
    Ok(out)
}

/// Outcome of the phase-fixing search: the eigenbasis columns, the ensemble
/// seed expressed in that basis (real entries, dust clamped to zero), and
/// whether the nonzero-entry graph was connected.
#[derive(Clone, Debug)]
pub struct PhaseFix {
    pub eigenbasis: ComplexMatrix,
    pub rho0_lambda: ComplexMatrix,
    pub connected: bool,
}

/// Find eigenvector phases that make every matrix element of `rho0` real and
/// nonnegative.
///
/// One unit eigenvector is extracted per rank-one projector (largest-norm
/// column, normalized, with its dominant component rotated to the positive
/// real axis so ties in floating point cannot flip conventions). Eigenvectors
/// are nodes of a graph with edges wherever `|⟨λ|ρ0|λ′⟩| > 1e-10`; phases
/// propagate breadth-first from the lowest-index node of each component,
/// turning each tree edge real positive. Every remaining entry is then
/// verified: imaginary parts above 1e-9 mean some cycle cannot be made real
/// ([`Error::PhaseInconsistency`]); entries real but below −1e-10 mean the
/// ensemble violates nonnegativity ([`Error::NegativeEntry`]). Surviving
/// negative dust is clamped to zero.
pub fn fix_phases(projectors: &[ComplexMatrix], rho0: &ComplexMatrix) -> Result<PhaseFix> {
    let d = projectors.len();
    if d == 0 {
        return Err(Error::Validation {
            invariant: "dimension",
            detail: "no spectral projectors supplied".into(),
        });
    }

    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for p in projectors {
        let mut best = 0;
        let mut best_norm = -1.0;
        for j in 0..p.cols() {
            let nj = vec_norm(&p.column(j));
            if nj > best_norm {
                best_norm = nj;
                best = j;
            }
        }
        let col = p.column(best);
        let norm = vec_norm(&col);
        if norm <= tol::PROJECTOR_KEEP {
            return Err(Error::Validation {
                invariant: "degeneracy",
                detail: "projector has no usable column".into(),
            });
        }
        let mut v: Vec<Complex64> = col.iter().map(|z| z / norm).collect();
        // Deterministic phase: rotate the first near-maximal component to
        // the positive real axis.
        let max_mag = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = v
            .iter()
            .position(|z| z.norm() >= max_mag - 1e-8)
            .expect("unit vector has a maximal component");
        let phase = v[pivot] / v[pivot].norm();
        for z in &mut v {
            *z /= phase;
        }
        vectors.push(v);
    }

    // ρ0 in the extracted basis.
    let mut entries = vec![vec![Complex64::default(); d]; d];
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            let rv = rho0.matvec(vj)?;
            entries[i][j] = inner(vi, &rv);
        }
    }

    // Breadth-first phase propagation over the nonzero-entry graph.
    let mut phase = vec![Complex64::default(); d];
    let mut visited = vec![false; d];
    let mut components = 0usize;
    for start in 0..d {
        if visited[start] {
            continue;
        }
        components += 1;
        visited[start] = true;
        phase[start] = C_ONE;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..d {
                if visited[j] || entries[i][j].norm() <= tol::ENTRY_FLOOR {
                    continue;
                }
                // Entry after rephasing is conj(phase_i)·entries[i][j]·phase_j;
                // pick phase_j to land it on the positive real axis.
                let current = phase[i].conj() * entries[i][j];
                phase[j] = current.conj() / current.norm();
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    let connected = components == 1;

    // Verify and clamp.
    let mut real_entries = vec![vec![0.0f64; d]; d];
    for i in 0..d {
        for j in 0..d {
            let z = phase[i].conj() * entries[i][j] * phase[j];
            if z.im.abs() > tol::PHASE_IM {
                return Err(Error::PhaseInconsistency(format!(
                    "entry ({i}, {j}) keeps imaginary part {:.3e} after rephasing; \
                     no eigenbasis makes the ensemble real",
                    z.im
                )));
            }
            if z.re < -tol::ENTRY_FLOOR {
                return Err(Error::NegativeEntry(format!(
                    "entry ({i}, {j}) is {:.6e} in the eigenbasis; \
                     the ensemble violates nonnegativity",
                    z.re
                )));
            }
            real_entries[i][j] = z.re.max(0.0);
        }
    }

    let eigenbasis = ComplexMatrix::from_columns(
        &vectors
            .iter()
            .zip(&phase)
            .map(|(v, ph)| v.iter().map(|z| z * ph).collect())
            .collect::<Vec<_>>(),
    )?;
    let rho0_lambda = ComplexMatrix::from_real_rows(&real_entries)?;
    Ok(PhaseFix {
        eigenbasis,
        rho0_lambda,
        connected,
    })
}

/// Unitary symmetry operator together with its spectral data in the
/// phase-fixed convention.
#[derive(Clone, Debug)]
pub struct SymmetryOperator {
    matrix: ComplexMatrix,
    n: usize,
    sign: Sign,
    eigenvalues: Vec<Complex64>,
    eigenbasis: ComplexMatrix,
}

impl SymmetryOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Columns are the phase-fixed eigenvectors, ordered like
    /// [`Self::eigenvalues`].
    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// A validated symmetric ensemble: the symmetry operator, the seed state,
/// and everything derived from them during validation.
#[derive(Clone, Debug)]
pub struct SymmetricFamily {
    sym: SymmetryOperator,
    rho0: ComplexMatrix,
    prior: f64,
    weight: f64,
    rho0_lambda: ComplexMatrix,
    phase_graph_connected: bool,
}

impl SymmetricFamily {
    /// Validate and build a standalone ensemble (seed trace 1).
    pub fn new(r: ComplexMatrix, n: usize, sign: Sign, rho0: ComplexMatrix) -> Result<Self> {
        Self::with_weight(r, n, sign, rho0, 1.0)
    }

    /// Validate and build an ensemble whose seed carries the given trace
    /// weight — the form a block of a reducible problem takes.
    pub fn with_weight(
        r: ComplexMatrix,
        n: usize,
        sign: Sign,
        rho0: ComplexMatrix,
        weight: f64,
    ) -> Result<Self> {
        let d = r.rows();
        if !r.is_square() || rho0.rows() != d || rho0.cols() != d {
            return Err(Error::Validation {
                invariant: "dimension",
                detail: format!(
                    "R is {}x{} but the seed state is {}x{}",
                    r.rows(),
                    r.cols(),
                    rho0.rows(),
                    rho0.cols()
                ),
            });
        }
        if d > n {
            return Err(Error::Validation {
                invariant: "dimension",
                detail: format!(
                    "dimension {d} exceeds the number of states {n}; \
                     a nondegenerate R cannot be larger than N"
                ),
            });
        }

        let herm = rho0.hermiticity_residual();
        if herm > tol::STRUCTURAL * rho0.frobenius_norm().max(1.0) {
            return Err(Error::Validation {
                invariant: "hermiticity",
                detail: format!("seed state is not Hermitian (residual {herm:.3e})"),
            });
        }
        if !rho0.is_psd_default()? {
            return Err(Error::Validation {
                invariant: "positivity",
                detail: "seed state has a negative eigenvalue".into(),
            });
        }
        let trace = rho0.trace()?.re;
        if (trace - weight).abs() > tol::STRUCTURAL {
            return Err(Error::Validation {
                invariant: "trace",
                detail: format!("seed trace {trace:.12} differs from declared weight {weight}"),
            });
        }

        let projectors = spectral_projectors(&r, n, sign)?;
        if projectors.len() != d {
            return Err(Error::Validation {
                invariant: "degeneracy",
                detail: format!(
                    "found {} spectral projectors for a {d}-dimensional operator",
                    projectors.len()
                ),
            });
        }
        let eigenvalues: Vec<Complex64> = projectors.iter().map(|(b, _)| *b).collect();
        for (i, a) in eigenvalues.iter().enumerate() {
            for b in &eigenvalues[i + 1..] {
                if (a - b).norm() < 1e-12 {
                    return Err(Error::Validation {
                        invariant: "degeneracy",
                        detail: format!("repeated eigenvalue {a:.6}"),
                    });
                }
            }
        }

        let proj_matrices: Vec<ComplexMatrix> =
            projectors.iter().map(|(_, p)| p.clone()).collect();
        let fix = fix_phases(&proj_matrices, &rho0)?;

        // Each phase-fixed column must still be an eigenvector of R.
        for (j, b) in eigenvalues.iter().enumerate() {
            let col = fix.eigenbasis.column(j);
            let rv = r.matvec(&col)?;
            let res: f64 = rv
                .iter()
                .zip(&col)
                .map(|(x, y)| (x - y * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if res > tol::STRUCTURAL {
                return Err(Error::Validation {
                    invariant: "eigenbasis",
                    detail: format!("column {j} fails R·v = b·v (residual {res:.3e})"),
                });
            }
        }

        let sym = SymmetryOperator {
            matrix: r,
            n,
            sign,
            eigenvalues,
            eigenbasis: fix.eigenbasis,
        };
        Ok(SymmetricFamily {
            sym,
            rho0,
            prior: 1.0 / n as f64,
            weight,
            rho0_lambda: fix.rho0_lambda,
            phase_graph_connected: fix.connected,
        })
    }

    pub fn sym(&self) -> &SymmetryOperator {
        &self.sym
    }

    pub fn rho0(&self) -> &ComplexMatrix {
        &self.rho0
    }

    pub fn n(&self) -> usize {
        self.sym.n
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    /// Trace of the seed state: 1 for standalone ensembles, the block trace
    /// for blocks of a reducible problem.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Seed state in the phase-fixed eigenbasis; real nonnegative entries.
    pub fn rho0_lambda(&self) -> &ComplexMatrix {
        &self.rho0_lambda
    }

    pub fn phase_graph_connected(&self) -> bool {
        self.phase_graph_connected
    }
}

/// All `N` signal states `[ρ_0, Rρ_0R†, …]` of the family.
pub fn generate_states(family: &SymmetricFamily) -> Vec<ComplexMatrix> {
    let r = family.sym.matrix();
    let r_adj = r.adjoint();
    let mut out = Vec::with_capacity(family.n());
    let mut state = family.rho0.clone();
    for _ in 0..family.n() {
        out.push(state.clone());
        state = r
            .matmul(&state)
            .and_then(|m| m.matmul(&r_adj))
            .expect("conjugation preserves dimensions");
    }
    out
}

/// A reducible problem presented as pre-split irreducible blocks. Block
/// seed traces must sum to one and all blocks share the same number of
/// signal states.
#[derive(Clone, Debug)]
pub struct DirectSumProblem {
    blocks: Vec<SymmetricFamily>,
}

impl DirectSumProblem {
    pub fn new(blocks: Vec<SymmetricFamily>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Validation {
                invariant: "blocks",
                detail: "a problem needs at least one block".into(),
            });
        };
        let n = first.n();
        if blocks.iter().any(|b| b.n() != n) {
            return Err(Error::Validation {
                invariant: "blocks",
                detail: "all blocks must share the same number of states".into(),
            });
        }
        let total: f64 = blocks.iter().map(SymmetricFamily::weight).sum();
        if (total - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::Validation {
                invariant: "total trace",
                detail: format!("block traces sum to {total:.12}, expected 1"),
            });
        }
        Ok(DirectSumProblem { blocks })
    }

    pub fn blocks(&self) -> &[SymmetricFamily] {
        &self.blocks
    }

    pub fn block_traces(&self) -> Vec<f64> {
        self.blocks.iter().map(SymmetricFamily::weight).collect()
    }

    pub fn n(&self) -> usize {
        self.blocks[0].n()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(SymmetricFamily::dim).sum()
    }

    pub fn phase_graph_connected(&self) -> bool {
        self.blocks.iter().all(SymmetricFamily::phase_graph_connected)
    }
}

impl From<SymmetricFamily> for DirectSumProblem {
    fn from(family: SymmetricFamily) -> Self {
        DirectSumProblem {
            blocks: vec![family],
        }
    }
}

/// Deterministic random test ensemble.
///
/// In a scratch basis, `R` is a diagonal of `dim` distinct n-th roots of the
/// sign and the seed state is `A·Aᵀ` (A uniform in [0,1)) normalized to unit
/// trace — automatically PSD with nonnegative entries. Both are then
/// conjugated by a Haar-like random unitary (Gram-Schmidt of a complex
/// Gaussian matrix) so that consumers must re-derive the eigenbasis and its
/// phases from scratch.
pub fn random_family(dim: usize, n: usize, sign: Sign, seed: u64) -> Result<SymmetricFamily> {
    if dim == 0 || dim > n {
        return Err(Error::Validation {
            invariant: "dimension",
            detail: format!("need 1 ≤ dim ≤ n, got dim={dim}, n={n}"),
        });
    }
    let mut rng = Xorshift64::new(seed);

    // Random subset of the n candidate roots via partial Fisher-Yates.
    let shift = match sign {
        Sign::Plus => 0.0,
        Sign::Minus => 1.0,
    };
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..dim {
        let j = i + rng.below((n - i) as u64) as usize;
        indices.swap(i, j);
    }
    let roots: Vec<Complex64> = indices[..dim]
        .iter()
        .map(|&m| {
            Complex64::from_polar(1.0, std::f64::consts::PI * (2.0 * m as f64 + shift) / n as f64)
        })
        .collect();

    let a = ComplexMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.uniform(), 0.0))?;
    let m = a.matmul(&a.adjoint())?;
    let rho_scratch = m.scale(1.0 / m.trace()?.re);
    let r_scratch = ComplexMatrix::diag(&roots)?;

    let q = random_unitary(dim, &mut rng)?;
    let q_adj = q.adjoint();
    let r = q.matmul(&r_scratch)?.matmul(&q_adj)?;
    let rho0 = q.matmul(&rho_scratch)?.matmul(&q_adj)?;
    // Remove conjugation roundoff so validation sees an exactly Hermitian seed.
    let rho0 = rho0.hermitize();
    SymmetricFamily::new(r, n, sign, rho0)
}

/// Unitary from modified Gram-Schmidt on a complex Gaussian matrix, with one
/// reorthogonalization pass.
fn random_unitary(dim: usize, rng: &mut Xorshift64) -> Result<ComplexMatrix> {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.gaussian(), rng.gaussian()))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for i in 0..j {
                let proj = inner(&cols[i], &cols[j]);
                let prev = cols[i].clone();
                for (cj, pi) in cols[j].iter_mut().zip(prev) {
                    *cj -= proj * pi;
                }
            }
        }
        let norm = vec_norm(&cols[j]);
        if norm < 1e-8 {
            // Degenerate draw; replace with a coordinate vector and redo.
            cols[j] = (0..dim)
                .map(|i| if i == j { C_ONE } else { Complex64::default() })
                .collect();
            continue;
        }
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn planar_rotation(theta: f64) -> ComplexMatrix {
        let (s, c) = (theta / 2.0).sin_cos();
        ComplexMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]).unwrap()
    }

    fn spin1_rotation(theta: f64) -> ComplexMatrix {
        let (s, c) = theta.sin_cos();
        let h = theta / 2.0;
        ComplexMatrix::from_real_rows(&[
            vec![h.cos().powi(2), s / 2f64.sqrt(), h.sin().powi(2)],
            vec![-s / 2f64.sqrt(), c, s / 2f64.sqrt()],
            vec![h.sin().powi(2), -s / 2f64.sqrt(), h.cos().powi(2)],
        ])
        .unwrap()
    }

    #[test]
    fn projectors_of_planar_rotation() {
        let r = planar_rotation(2.0 * PI / 3.0);
        let pairs = spectral_projectors(&r, 3, Sign::Minus).unwrap();
        assert_eq!(pairs.len(), 2);
        let expect = [
            Complex64::from_polar(1.0, PI / 3.0),
            Complex64::from_polar(1.0, -PI / 3.0),
        ];
        for (b, p) in &pairs {
            assert!(
                expect.iter().any(|e| (b - e).norm() < 1e-12),
                "unexpected eigenvalue {b}"
            );
            assert!((p.trace().unwrap() - C_ONE).norm() < 1e-12);
            // Idempotent.
            assert!(p.matmul(p).unwrap().sub(p).frobenius_norm() < 1e-12);
        }
        // Complete.
        let sum = pairs[0].1.add(&pairs[1].1);
        let id = ComplexMatrix::identity(2).unwrap();
        assert!(sum.sub(&id).frobenius_norm() < 1e-12);
    }

    #[test]
    fn projectors_of_trivial_operator() {
        let r = ComplexMatrix::identity(1).unwrap();
        let pairs = spectral_projectors(&r, 1, Sign::Plus).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].0 - C_ONE).norm() < 1e-15);
        assert!((pairs[0].1.get(0, 0) - C_ONE).norm() < 1e-15);
    }

    #[test]
    fn projectors_of_spin1_rotation() {
        let r = spin1_rotation(2.0 * PI / 3.0);
        let pairs = spectral_projectors(&r, 3, Sign::Plus).unwrap();
        assert_eq!(pairs.len(), 3);
        let expect = [
            C_ONE,
            Complex64::from_polar(1.0, -2.0 * PI / 3.0),
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
        ];
        for e in &expect {
            assert!(
                pairs.iter().any(|(b, _)| (b - e).norm() < 1e-12),
                "missing eigenvalue {e}"
            );
        }
        for (_, p) in &pairs {
            assert!((p.trace().unwrap() - C_ONE).norm() < 1e-10);
        }
    }

    #[test]
    fn projector_completeness_and_idempotence_random() {
        for seed in 0..25u64 {
            let dim = 1 + (seed as usize % 4);
            let n = dim + (seed as usize % 3);
            let sign = if seed % 2 == 0 { Sign::Plus } else { Sign::Minus };
            let fam = random_family(dim, n, sign, 1000 + seed).unwrap();
            let pairs = spectral_projectors(fam.sym().matrix(), n, sign).unwrap();
            let id = ComplexMatrix::identity(dim).unwrap();
            let mut sum = ComplexMatrix::zeros(dim, dim).unwrap();
            for (_, p) in &pairs {
                sum = sum.add(p);
                assert!(p.matmul(p).unwrap().sub(p).frobenius_norm() <= 1e-9);
            }
            assert!(sum.sub(&id).frobenius_norm() <= 1e-9);
        }
    }

    #[test]
    fn degenerate_operator_rejected() {
        let r = ComplexMatrix::identity(2).unwrap();
        let err = spectral_projectors(&r, 2, Sign::Plus).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "degeneracy", .. }));
    }

    #[test]
    fn non_unitary_rejected() {
        let r = ComplexMatrix::diag_real(&[1.0, 2.0]).unwrap();
        let err = spectral_projectors(&r, 2, Sign::Plus).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "unitarity", .. }));
    }

    #[test]
    fn phase_fix_recovers_real_ensemble_for_diagonal_seed() {
        // Planar rotation by 2π/3 with a diagonal mixed seed: the eigenbasis
        // must come out as (1/√2)(−i, 1) and (1/√2)(i, 1) up to global
        // phases and order, with seed entries [[1/2, 1/6], [1/6, 1/2]].
        let r = planar_rotation(2.0 * PI / 3.0);
        let rho0 = ComplexMatrix::diag_real(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let pairs = spectral_projectors(&r, 3, Sign::Minus).unwrap();
        let projs: Vec<ComplexMatrix> = pairs.iter().map(|(_, p)| p.clone()).collect();
        let fix = fix_phases(&projs, &rho0).unwrap();

        let expect = ComplexMatrix::from_real_rows(&[
            vec![0.5, 1.0 / 6.0],
            vec![1.0 / 6.0, 0.5],
        ])
        .unwrap();
        assert!(fix.rho0_lambda.max_abs_diff(&expect) < 1e-12);
        assert!(fix.connected);

        // Columns match the reference basis up to a global phase each.
        let refs = [
            vec![Complex64::new(0.0, -1.0), C_ONE],
            vec![Complex64::new(0.0, 1.0), C_ONE],
        ];
        for j in 0..2 {
            let col = fix.eigenbasis.column(j);
            let matched = refs.iter().any(|r| {
                let r: Vec<Complex64> = r.iter().map(|z| z / 2f64.sqrt()).collect();
                let ov = inner(&r, &col);
                (ov.norm() - 1.0).abs() < 1e-10
            });
            assert!(matched, "column {j} matches no reference eigenvector");
        }
    }

    #[test]
    fn phase_fix_is_identity_for_real_nonneg_seed() {
        let roots = [
            C_ONE,
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
            Complex64::from_polar(1.0, -2.0 * PI / 3.0),
        ];
        let r = ComplexMatrix::diag(&roots).unwrap();
        let rho0 = ComplexMatrix::from_real_rows(&[
            vec![0.5, 0.1, 0.05],
            vec![0.1, 0.25, 0.02],
            vec![0.05, 0.02, 0.25],
        ])
        .unwrap();
        let pairs = spectral_projectors(&r, 3, Sign::Plus).unwrap();
        let projs: Vec<ComplexMatrix> = pairs.iter().map(|(_, p)| p.clone()).collect();
        let fix = fix_phases(&projs, &rho0).unwrap();
        assert!(fix.rho0_lambda.max_abs_diff(&rho0) < 1e-12);
        assert!(fix.connected);
    }

    #[test]
    fn phase_fix_accepts_uniform_seed() {
        let d = 3usize;
        let roots = [
            C_ONE,
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
            Complex64::from_polar(1.0, -2.0 * PI / 3.0),
        ];
        let r = ComplexMatrix::diag(&roots).unwrap();
        let uniform =
            ComplexMatrix::from_fn(d, d, |_, _| Complex64::new(1.0 / d as f64, 0.0)).unwrap();
        let pairs = spectral_projectors(&r, 3, Sign::Plus).unwrap();
        let projs: Vec<ComplexMatrix> = pairs.iter().map(|(_, p)| p.clone()).collect();
        let fix = fix_phases(&projs, &uniform).unwrap();
        for i in 0..d {
            for j in 0..d {
                assert!((fix.rho0_lambda.get(i, j).re - 1.0 / d as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_fix_reports_negative_entry() {
        // Odd number of sign flips around a triangle: real but unfixable.
        let roots = [
            C_ONE,
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
            Complex64::from_polar(1.0, -2.0 * PI / 3.0),
        ];
        let r = ComplexMatrix::diag(&roots).unwrap();
        let rho0 = ComplexMatrix::from_real_rows(&[
            vec![0.5, -0.05, 0.05],
            vec![-0.05, 0.25, 0.05],
            vec![0.05, 0.05, 0.25],
        ])
        .unwrap();
        let pairs = spectral_projectors(&r, 3, Sign::Plus).unwrap();
        let projs: Vec<ComplexMatrix> = pairs.iter().map(|(_, p)| p.clone()).collect();
        let err = fix_phases(&projs, &rho0).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry(_)), "got {err:?}");
    }

    #[test]
    fn phase_fix_reports_inconsistent_cycle() {
        let roots = [
            C_ONE,
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
            Complex64::from_polar(1.0, -2.0 * PI / 3.0),
        ];
        let r = ComplexMatrix::diag(&roots).unwrap();
        let z = Complex64::from_polar(0.05, PI / 4.0);
        let rho0 = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.05, 0.0), Complex64::new(0.05, 0.0)],
            vec![Complex64::new(0.05, 0.0), Complex64::new(0.25, 0.0), z],
            vec![Complex64::new(0.05, 0.0), z.conj(), Complex64::new(0.25, 0.0)],
        ])
        .unwrap();
        let pairs = spectral_projectors(&r, 3, Sign::Plus).unwrap();
        let projs: Vec<ComplexMatrix> = pairs.iter().map(|(_, p)| p.clone()).collect();
        let err = fix_phases(&projs, &rho0).unwrap_err();
        assert!(matches!(err, Error::PhaseInconsistency(_)), "got {err:?}");
    }

    #[test]
    fn generate_states_matches_direct_conjugation() {
        let r = planar_rotation(2.0 * PI / 3.0);
        let rho0 = ComplexMatrix::diag_real(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let family = SymmetricFamily::new(r, 3, Sign::Minus, rho0.clone()).unwrap();
        let states = generate_states(&family);
        assert_eq!(states.len(), 3);
        assert!(states[0].max_abs_diff(&rho0) == 0.0);

        // Frozen hand arithmetic for the k = 1 state.
        let s3 = 3f64.sqrt();
        let expect = ComplexMatrix::from_real_rows(&[
            vec![7.0 / 12.0, -s3 / 12.0],
            vec![-s3 / 12.0, 5.0 / 12.0],
        ])
        .unwrap();
        assert!(states[1].max_abs_diff(&expect) < 1e-14);

        for s in &states {
            assert!((s.trace().unwrap().re - 1.0).abs() < 1e-12);
            assert!(s.hermiticity_residual() < 1e-12);
            assert!(s.is_psd_default().unwrap());
        }
    }

    #[test]
    fn state_symmetry_and_closure() {
        for seed in [3u64, 17, 99] {
            let fam = random_family(3, 5, Sign::Minus, seed).unwrap();
            let states = generate_states(&fam);
            let r = fam.sym().matrix();
            let r_adj = r.adjoint();
            for k in 0..states.len() - 1 {
                let next = r.matmul(&states[k]).unwrap().matmul(&r_adj).unwrap();
                assert!(next.max_abs_diff(&states[k + 1]) <= 1e-10);
            }
            // One more conjugation closes the cycle: the ±1 cancels.
            let wrap = r
                .matmul(states.last().unwrap())
                .unwrap()
                .matmul(&r_adj)
                .unwrap();
            assert!(wrap.max_abs_diff(&states[0]) <= 1e-10);
        }
    }

    #[test]
    fn random_family_smallest_cases() {
        let f1 = random_family(1, 1, Sign::Plus, 0).unwrap();
        assert_eq!(f1.dim(), 1);
        assert!((f1.rho0().get(0, 0).re - 1.0).abs() < 1e-12);

        let f = random_family(2, 3, Sign::Minus, 42).unwrap();
        assert_eq!(f.dim(), 2);
        assert!(f.phase_graph_connected());

        // Square case uses all n roots.
        let sq = random_family(4, 4, Sign::Plus, 7).unwrap();
        assert_eq!(sq.sym().eigenvalues().len(), 4);
    }

    #[test]
    fn random_family_rejects_dim_above_n() {
        assert!(random_family(3, 2, Sign::Plus, 1).is_err());
    }

    #[test]
    fn phase_recovery_roundtrip_many_random_families() {
        let mut count = 0;
        for seed in 0..100u64 {
            let dim = 1 + (seed as usize % 4);
            let n = dim + ((seed / 4) as usize % 3);
            let sign = if seed % 2 == 0 { Sign::Plus } else { Sign::Minus };
            let fam = random_family(dim, n, sign, 5000 + seed).unwrap();
            // Entries real and nonnegative by construction of rho0_lambda;
            // verify against an independent basis-change computation.
            let b = fam.sym().eigenbasis();
            let m = b.adjoint().matmul(fam.rho0()).unwrap().matmul(b).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    let z = m.get(i, j);
                    assert!(z.im.abs() <= 1e-9, "seed {seed}: im {z}");
                    assert!(z.re >= -1e-10, "seed {seed}: re {z}");
                }
            }
            count += 1;
        }
        assert_eq!(count, 100);
    }

    #[test]
    fn direct_sum_problem_validation() {
        let spin1 = {
            let r = spin1_rotation(2.0 * PI / 3.0);
            let rho = ComplexMatrix::from_real_rows(&[
                vec![1.0 / 16.0, 0.0, -3.0 / 16.0],
                vec![0.0, 0.0, 0.0],
                vec![-3.0 / 16.0, 0.0, 9.0 / 16.0],
            ])
            .unwrap();
            SymmetricFamily::with_weight(r, 3, Sign::Plus, rho, 5.0 / 8.0).unwrap()
        };
        let spin0 = SymmetricFamily::with_weight(
            ComplexMatrix::identity(1).unwrap(),
            3,
            Sign::Plus,
            ComplexMatrix::from_real_rows(&[vec![3.0 / 8.0]]).unwrap(),
            3.0 / 8.0,
        )
        .unwrap();

        let problem = DirectSumProblem::new(vec![spin1.clone(), spin0.clone()]).unwrap();
        assert_eq!(problem.n(), 3);
        assert_eq!(problem.total_dim(), 4);
        let traces = problem.block_traces();
        assert!((traces[0] - 5.0 / 8.0).abs() < 1e-12);
        assert!((traces[1] - 3.0 / 8.0).abs() < 1e-12);

        // Traces not summing to one are rejected.
        assert!(DirectSumProblem::new(vec![spin1.clone(), spin1]).is_err());
        // A lone underweight block is rejected too.
        assert!(DirectSumProblem::new(vec![spin0]).is_err());
    }

    #[test]
    fn family_named_invariant_failures() {
        let r = planar_rotation(2.0 * PI / 3.0);
        let rho0 = ComplexMatrix::diag_real(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();

        let scaled = r.scale(1.1);
        let err = SymmetricFamily::new(scaled, 3, Sign::Minus, rho0.clone()).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "unitarity", .. }));

        let err = SymmetricFamily::new(r.clone(), 3, Sign::Plus, rho0.clone()).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "symmetry order", .. }));

        let bad_trace = ComplexMatrix::diag_real(&[0.5, 0.2]).unwrap();
        let err = SymmetricFamily::new(r.clone(), 3, Sign::Minus, bad_trace).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "trace", .. }));

        let indefinite = ComplexMatrix::diag_real(&[1.5, -0.5]).unwrap();
        let err = SymmetricFamily::new(r, 3, Sign::Minus, indefinite).unwrap_err();
        assert!(matches!(err, Error::Validation { invariant: "positivity", .. }));
    }
}
