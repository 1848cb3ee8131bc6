//! Built-in example ensembles, used as regression fixtures and CLI demos.
//!
//! Three constructions are provided: `ex1`, a ring of N pure qubit states
//! related by planar rotations; `ex2`, three mixed qubit states with a
//! diagonal seed; and `ex3`, three two-qubit states built from pairs of
//! trine states, which reduce to a spin-1 block plus a one-dimensional
//! spin-0 block and so exercise the direct-sum machinery.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::cxmat::ComplexMatrix;
use crate::symstates::{DirectSumProblem, Sign, SymmetricFamily};
use crate::{Error, Result};

/// Identifier of a built-in example.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GalleryId {
    /// N pure states on a planar ring; requires n ≥ 2.
    Ex1 { n: usize },
    /// Three mixed qubit states, seed diag(1/3, 2/3).
    Ex2,
    /// Three two-qubit trine-pair states, spin-1 ⊕ spin-0.
    Ex3,
}

impl GalleryId {
    /// Parse a CLI-style id. `n` is required by `ex1` and rejected elsewhere.
    pub fn parse(id: &str, n: Option<usize>) -> Result<GalleryId> {
        match (id, n) {
            ("ex1", Some(n)) => Ok(GalleryId::Ex1 { n }),
            ("ex1", None) => Err(Error::Validation {
                invariant: "gallery id",
                detail: "ex1 requires --n".into(),
            }),
            ("ex2", None) => Ok(GalleryId::Ex2),
            ("ex3", None) => Ok(GalleryId::Ex3),
            ("ex2" | "ex3", Some(_)) => Err(Error::Validation {
                invariant: "gallery id",
                detail: format!("{id} does not take --n"),
            }),
            _ => Err(Error::Validation {
                invariant: "gallery id",
                detail: format!("unknown gallery id {id:?} (expected ex1, ex2, or ex3)"),
            }),
        }
    }
}

/// Planar rotation by `theta` in the half-angle convention, so the n-th
/// power of the 2π/n rotation is −1.
fn planar_rotation(theta: f64) -> Result<ComplexMatrix> {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[vec![c, -s], vec![s, c]])
}

/// Sign read off numerically from R^n, then revalidated by the family
/// constructor.
fn sign_of_power(r: &ComplexMatrix, n: usize) -> Result<Sign> {
    let rn = r.pow(n)?;
    let id = ComplexMatrix::identity(r.rows())?;
    let plus = rn.sub(&id).frobenius_norm();
    let minus = rn.add(&id).frobenius_norm();
    Ok(if plus <= minus { Sign::Plus } else { Sign::Minus })
}

/// `n` pure states `R^k|Ψ0⟩⟨Ψ0|R^{†k}` with `Ψ0 = (1, 0)` and R the planar
/// rotation by 2π/n.
pub fn build_ex1(n: usize) -> Result<SymmetricFamily> {
    if n < 2 {
        return Err(Error::Validation {
            invariant: "gallery id",
            detail: format!("ex1 requires n ≥ 2, got {n}"),
        });
    }
    let r = planar_rotation(2.0 * PI / n as f64)?;
    let rho0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]])?;
    let sign = sign_of_power(&r, n)?;
    SymmetricFamily::new(r, n, sign, rho0)
}

/// Three mixed qubit states with seed diag(1/3, 2/3) and the 2π/3 planar
/// rotation.
pub fn build_ex2() -> Result<SymmetricFamily> {
    let r = planar_rotation(2.0 * PI / 3.0)?;
    let rho0 = ComplexMatrix::diag_real(&[1.0 / 3.0, 2.0 / 3.0])?;
    SymmetricFamily::new(r, 3, Sign::Minus, rho0)
}

/// Three two-qubit states built from ordered pairs of distinct trine states,
/// reduced to spin-1 ⊕ spin-0 blocks.
///
/// The seed is `ρ_0 = ½(|t1 t2⟩⟨t1 t2| + |t2 t1⟩⟨t2 t1|)` with `t_k` the
/// trine states `R^k(1,0)`, and the full symmetry operator is `R ⊗ R`. The
/// construction changes into the spin-coupled basis `|1,1⟩ = |00⟩`,
/// `|1,0⟩ = (|01⟩+|10⟩)/√2`, `|1,−1⟩ = |11⟩`, `|0,0⟩ = (|01⟩−|10⟩)/√2`,
/// verifies that everything is block diagonal with the expected block
/// matrices, and returns the two blocks with traces 5/8 and 3/8. Any
/// mismatch is an internal error: it would mean the coupling conventions
/// disagree.
pub fn build_ex3() -> Result<DirectSumProblem> {
    let theta = 2.0 * PI / 3.0;
    let r = planar_rotation(theta)?;

    // Trine column vectors t0, t1 = R·t0, t2 = R²·t0.
    let t0 = ComplexMatrix::from_real_rows(&[vec![1.0], vec![0.0]])?;
    let t1 = r.matmul(&t0)?;
    let t2 = r.matmul(&t1)?;

    let pair = |a: &ComplexMatrix, b: &ComplexMatrix| -> Result<ComplexMatrix> {
        let v = a.tensor(b)?;
        v.matmul(&v.adjoint())
    };
    let rho0 = pair(&t1, &t2)?.add(&pair(&t2, &t1)?).scale(0.5);
    let sym = r.tensor(&r)?;

    // Spin-coupled basis columns in product coordinates.
    let h = 1.0 / 2f64.sqrt();
    let basis = ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, h, 0.0, h],
        vec![0.0, h, 0.0, -h],
        vec![0.0, 0.0, 1.0, 0.0],
    ])?;
    let rho_spin = basis.adjoint().matmul(&rho0)?.matmul(&basis)?;
    let sym_spin = basis.adjoint().matmul(&sym)?.matmul(&basis)?;

    // Both operators must be block diagonal: 3×3 spin-1 plus 1×1 spin-0.
    for m in [&rho_spin, &sym_spin] {
        for i in 0..3 {
            if m.get(i, 3).norm() > 1e-10 || m.get(3, i).norm() > 1e-10 {
                return Err(Error::Construction(
                    "spin decomposition is not block diagonal; \
                     coupling conventions disagree"
                        .into(),
                ));
            }
        }
    }
    let take_block = |m: &ComplexMatrix| {
        ComplexMatrix::from_fn(3, 3, |i, j| m.get(i, j))
    };
    let rho1 = take_block(&rho_spin)?;
    let r3 = take_block(&sym_spin)?;
    let spin0_weight = rho_spin.get(3, 3);
    let spin0_sym = sym_spin.get(3, 3);

    // Frozen reference blocks.
    let rho1_expect = ComplexMatrix::from_real_rows(&[
        vec![1.0 / 16.0, 0.0, -3.0 / 16.0],
        vec![0.0, 0.0, 0.0],
        vec![-3.0 / 16.0, 0.0, 9.0 / 16.0],
    ])?;
    let (s, c) = theta.sin_cos();
    let half = theta / 2.0;
    let r3_expect = ComplexMatrix::from_real_rows(&[
        vec![half.cos().powi(2), s / 2f64.sqrt(), half.sin().powi(2)],
        vec![-s / 2f64.sqrt(), c, s / 2f64.sqrt()],
        vec![half.sin().powi(2), -s / 2f64.sqrt(), half.cos().powi(2)],
    ])?;
    if rho1.max_abs_diff(&rho1_expect) > 1e-10
        || r3.max_abs_diff(&r3_expect) > 1e-10
        || (spin0_weight - Complex64::new(3.0 / 8.0, 0.0)).norm() > 1e-10
        || (spin0_sym - Complex64::new(1.0, 0.0)).norm() > 1e-10
    {
        return Err(Error::Construction(
            "spin blocks deviate from their reference matrices".into(),
        ));
    }

    let spin1 = SymmetricFamily::with_weight(r3, 3, Sign::Plus, rho1, 5.0 / 8.0)?;
    let spin0 = SymmetricFamily::with_weight(
        ComplexMatrix::identity(1)?,
        3,
        Sign::Plus,
        ComplexMatrix::from_fn(1, 1, |_, _| spin0_weight)?,
        3.0 / 8.0,
    )?;
    DirectSumProblem::new(vec![spin1, spin0])
}

/// The problem behind a gallery id, as a (possibly single-block) direct sum.
pub fn build(id: GalleryId) -> Result<DirectSumProblem> {
    match id {
        GalleryId::Ex1 { n } => Ok(build_ex1(n)?.into()),
        GalleryId::Ex2 => Ok(build_ex2()?.into()),
        GalleryId::Ex3 => build_ex3(),
    }
}
