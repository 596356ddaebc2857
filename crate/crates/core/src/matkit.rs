//! Dense complex linear-algebra kernel.
//!
//! Everything downstream (channels, capacity, the manifold optimizer) works on
//! [`CMat`], a dense column-stored complex double-precision matrix. The four
//! decompositions exposed here are the only ones the rest of the crate needs:
//! SVD, Hermitian eigendecomposition, the matrix exponential of a
//! skew-Hermitian matrix, and the Takagi factorization of a complex symmetric
//! matrix. All tolerances are relative to the Frobenius norm of the input, so
//! behavior is scale-free.
//!
//! All functions are pure; none touches shared state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix, the universal numeric carrier of this crate.
pub type CMat = DMatrix<Complex64>;

/// Frobenius norm.
pub fn frob(a: &CMat) -> f64 {
    a.norm()
}

/// `‖QᴴQ − I‖_F`, the deviation of `q` from having orthonormal columns.
pub fn unitary_residual(q: &CMat) -> f64 {
    let qhq = q.adjoint() * q;
    let eye = CMat::identity(qhq.nrows(), qhq.ncols());
    (qhq - eye).norm()
}

/// True if every entry is finite.
pub fn all_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_finite(a: &CMat, op: &'static str) -> Result<()> {
    if all_finite(a) {
        Ok(())
    } else {
        Err(Error::numeric(format!("{op}: input contains NaN/Inf")))
    }
}

/// Matrix of i.i.d. standard complex Gaussian entries (unit variance per
/// complex entry). Entries are drawn row by row so a seeded generator
/// reproduces the same matrix on every platform.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let mut a = CMat::zeros(rows, cols);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            a[(i, j)] = Complex64::new(re * s, im * s);
        }
    }
    a
}

/// Haar-distributed random unitary: QR of a Ginibre sample with the phases of
/// the R diagonal folded into Q.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CMat {
    let g = ginibre(rng, m, m);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Thin SVD `A = U diag(s) Vᴴ` with `s` sorted descending and `U`, `V`
/// having orthonormal columns.
pub fn svd(a: &CMat) -> Result<(CMat, Vec<f64>, CMat)> {
    check_finite(a, "svd")?;
    let (rows, cols) = (a.nrows(), a.ncols());
    let dec = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(Error::DecompositionFailed {
            op: "svd",
            rows,
            cols,
        })?;
    let u = dec.u.ok_or(Error::DecompositionFailed {
        op: "svd",
        rows,
        cols,
    })?;
    let v = dec
        .v_t
        .ok_or(Error::DecompositionFailed {
            op: "svd",
            rows,
            cols,
        })?
        .adjoint();
    let s: Vec<f64> = dec.singular_values.iter().copied().collect();

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));

    let mut u_sorted = CMat::zeros(u.nrows(), u.ncols());
    let mut v_sorted = CMat::zeros(v.nrows(), v.ncols());
    let mut s_sorted = Vec::with_capacity(s.len());
    for (k, &idx) in order.iter().enumerate() {
        u_sorted.set_column(k, &u.column(idx));
        v_sorted.set_column(k, &v.column(idx));
        s_sorted.push(s[idx]);
    }
    Ok((u_sorted, s_sorted, v_sorted))
}

/// Eigendecomposition `A = W diag(λ) Wᴴ` of a Hermitian matrix, eigenvalues
/// ascending. Errors if `‖A − Aᴴ‖_F > 1e-10·‖A‖_F`.
pub fn eigh(a: &CMat) -> Result<(CMat, Vec<f64>)> {
    check_finite(a, "eigh")?;
    if a.nrows() != a.ncols() {
        return Err(Error::contract(format!(
            "eigh: matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let scale = frob(a);
    let herm_dev = (a - a.adjoint()).norm();
    if herm_dev > 1e-10 * scale {
        return Err(Error::contract(format!(
            "eigh: input not Hermitian (‖A−Aᴴ‖/‖A‖ = {:.3e})",
            herm_dev / scale
        )));
    }
    if scale == 0.0 {
        return Ok((CMat::identity(n, n), vec![0.0; n]));
    }
    // Symmetrize so the solver sees an exactly Hermitian matrix.
    let h = (a + a.adjoint()).scale(0.5);
    let dec = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 0).ok_or(
        Error::DecompositionFailed {
            op: "eigh",
            rows: n,
            cols: n,
        },
    )?;
    let lam: Vec<f64> = dec.eigenvalues.iter().copied().collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lam[i].total_cmp(&lam[j]));

    let mut w = CMat::zeros(n, n);
    let mut lam_sorted = Vec::with_capacity(n);
    for (k, &idx) in order.iter().enumerate() {
        w.set_column(k, &dec.eigenvectors.column(idx));
        lam_sorted.push(lam[idx]);
    }
    Ok((w, lam_sorted))
}

/// Matrix exponential of a skew-Hermitian matrix, computed spectrally via
/// `eigh(−iS)` so the result is unitary to machine precision. `exp(0) = I`
/// exactly.
pub fn expm_skew(s: &CMat) -> Result<CMat> {
    check_finite(s, "expm_skew")?;
    if s.nrows() != s.ncols() {
        return Err(Error::contract(format!(
            "expm_skew: matrix is {}x{}, not square",
            s.nrows(),
            s.ncols()
        )));
    }
    let n = s.nrows();
    let scale = frob(s);
    if scale == 0.0 {
        return Ok(CMat::identity(n, n));
    }
    let skew_dev = (s + s.adjoint()).norm();
    if skew_dev > 1e-10 * scale {
        return Err(Error::contract(format!(
            "expm_skew: input not skew-Hermitian (‖S+Sᴴ‖/‖S‖ = {:.3e})",
            skew_dev / scale
        )));
    }
    // K = −iS is Hermitian and exp(S) = exp(iK) = W diag(e^{iλ}) Wᴴ.
    let k = s.map(|z| Complex64::new(0.0, -1.0) * z);
    let (w, lam) = eigh(&k)?;
    let mut phases = CMat::zeros(n, n);
    for (i, &l) in lam.iter().enumerate() {
        phases[(i, i)] = Complex64::from_polar(1.0, l);
    }
    Ok(&w * phases * w.adjoint())
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// The embedding used by [`takagi`] has heavily degenerate spectra (every
/// singular value appears as a ±σ pair, and unitary inputs collapse to ±1),
/// where the tridiagonalization-based solver loses eigenvector subspace
/// accuracy. Jacobi rotations keep the accumulated basis orthonormal to
/// machine precision regardless of clustering.
fn jacobi_eigh_real(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if (2.0 * off).sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let lam = (0..n).map(|i| a[(i, i)]).collect();
    (v, lam)
}

/// Takagi factorization `A = Q diag(σ) Qᵀ` of a complex symmetric matrix,
/// with `Q` unitary and `σ ≥ 0` sorted descending. For a unitary symmetric
/// input all σ equal 1, so `A = QQᵀ`.
///
/// Works through the eigendecomposition of the real symmetric embedding
/// `B = [[Re A, Im A], [Im A, −Re A]]`: an eigenpair `(σ, (u; v))` of `B`
/// with `σ ≥ 0` yields a Takagi vector `q = u + iv` satisfying `A q̄ = σ q`.
/// The near-null subspace (singular values within `1e-8·σ_max` of zero)
/// comes in degenerate ±σ pairs and is resolved by a Gram–Schmidt pass that
/// keeps the chosen vectors orthogonal to their own images under the
/// complex-structure map `(u; v) ↦ (v; −u)`.
pub fn takagi(a: &CMat) -> Result<(CMat, Vec<f64>)> {
    check_finite(a, "takagi")?;
    if a.nrows() != a.ncols() {
        return Err(Error::contract(format!(
            "takagi: matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let m = a.nrows();
    let scale = frob(a);
    if scale == 0.0 {
        return Ok((CMat::identity(m, m), vec![0.0; m]));
    }
    let sym_dev = (a - a.transpose()).norm();
    if sym_dev > 1e-8 * scale {
        return Err(Error::contract(format!(
            "takagi: input not symmetric (‖A−Aᵀ‖/‖A‖ = {:.3e})",
            sym_dev / scale
        )));
    }
    let a_sym = (a + a.transpose()).scale(0.5);

    let mut b = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let x = a_sym[(i, j)].re;
            let y = a_sym[(i, j)].im;
            b[(i, j)] = x;
            b[(i, j + m)] = y;
            b[(i + m, j)] = y;
            b[(i + m, j + m)] = -x;
        }
    }
    let (vecs, lam) = jacobi_eigh_real(&b);
    let vecs = &vecs;

    let sig_max = lam.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    let cutoff = 1e-8 * sig_max;

    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&i, &j| lam[j].total_cmp(&lam[i]));
    let positive: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| lam[i] > cutoff)
        .take(m)
        .collect();

    let mut q = CMat::zeros(m, m);
    let mut sigma = Vec::with_capacity(m);
    for (k, &idx) in positive.iter().enumerate() {
        for i in 0..m {
            q[(i, k)] = Complex64::new(vecs[(i, idx)], vecs[(i + m, idx)]);
        }
        sigma.push(lam[idx]);
    }

    // Near-null subspace: pick the remaining columns so that each stays
    // orthogonal to the previously accepted vectors and to their images under
    // J(u; v) = (v; −u); this is exactly complex orthonormality of q = u + iv.
    let needed = m - positive.len();
    if needed > 0 {
        let mut pool: Vec<usize> = (0..2 * m).filter(|i| !positive.contains(i)).collect();
        pool.sort_by(|&i, &j| lam[i].abs().total_cmp(&lam[j].abs()));

        let apply_j = |x: &nalgebra::DVector<f64>| {
            let mut y = nalgebra::DVector::<f64>::zeros(2 * m);
            for i in 0..m {
                y[i] = x[i + m];
                y[i + m] = -x[i];
            }
            y
        };

        let mut accepted: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(needed);
        for &idx in &pool {
            if accepted.len() == needed {
                break;
            }
            let mut cand: nalgebra::DVector<f64> = vecs.column(idx).into_owned();
            for acc in &accepted {
                let jac = apply_j(acc);
                let c1 = acc.dot(&cand);
                let c2 = jac.dot(&cand);
                cand -= acc * c1;
                cand -= jac * c2;
            }
            let norm = cand.norm();
            if norm > 1e-6 {
                accepted.push(cand / norm);
            }
        }
        if accepted.len() < needed {
            return Err(Error::DecompositionFailed {
                op: "takagi",
                rows: m,
                cols: m,
            });
        }
        for (k, acc) in accepted.iter().enumerate() {
            let col = positive.len() + k;
            let mut qcol = nalgebra::DVector::<Complex64>::zeros(m);
            for i in 0..m {
                qcol[i] = Complex64::new(acc[i], acc[i + m]);
            }
            // Residual singular value of this direction.
            let aqbar = &a_sym * qcol.map(|z| z.conj());
            sigma.push(aqbar.norm());
            for i in 0..m {
                q[(i, col)] = qcol[i];
            }
        }
    }

    let mut sig_mat = CMat::zeros(m, m);
    for (i, &s) in sigma.iter().enumerate() {
        sig_mat[(i, i)] = Complex64::new(s, 0.0);
    }
    let recon = &q * sig_mat * q.transpose();
    let resid = (&recon - a).norm();
    if resid > 1e-8 * scale || unitary_residual(&q) > 1e-8 {
        return Err(Error::numeric(format!(
            "takagi: residual {:.3e} (rel {:.3e}), unitarity {:.3e}",
            resid,
            resid / scale,
            unitary_residual(&q)
        )));
    }
    Ok((q, sigma))
}

/// Frobenius-nearest unitary matrix: the polar factor `UVᴴ` from the SVD.
/// Errors on rank-deficient input.
pub fn nearest_unitary(a: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(Error::contract(format!(
            "nearest_unitary: matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let (u, s, v) = svd(a)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(Error::DecompositionFailed {
            op: "nearest_unitary (rank-deficient)",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(u * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn svd_reconstruct(u: &CMat, s: &[f64], v: &CMat) -> CMat {
        let mut sm = CMat::zeros(u.ncols(), v.ncols());
        for (i, &si) in s.iter().enumerate() {
            sm[(i, i)] = cx(si, 0.0);
        }
        u * sm * v.adjoint()
    }

    #[test]
    fn svd_identity() {
        let a = CMat::identity(2, 2);
        let (_, s, _) = svd(&a).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_diagonal_with_zero() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = cx(3.0, 0.0);
        let (u, s, v) = svd(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14);
        assert!(s[1].abs() < 1e-14);
        // Dominant singular vectors match e1 up to phase.
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((v[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((svd_reconstruct(&u, &s, &v) - &a).norm() < 1e-12);
    }

    #[test]
    fn svd_roundtrip_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = ginibre(&mut rng, 4, 3);
        let (u, s, v) = svd(&a).unwrap();
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert!(unitary_residual(&u) < 1e-12);
        assert!(unitary_residual(&v) < 1e-12);
        let resid = (svd_reconstruct(&u, &s, &v) - &a).norm();
        assert!(resid < 1e-12 * frob(&a), "resid {resid:.3e}");
    }

    #[test]
    fn eigh_identity() {
        let (_, lam) = eigh(&CMat::identity(3, 3)).unwrap();
        assert!(lam.iter().all(|&l| (l - 1.0).abs() < 1e-14));
    }

    #[test]
    fn eigh_pauli_x() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = cx(1.0, 0.0);
        a[(1, 0)] = cx(1.0, 0.0);
        let (w, lam) = eigh(&a).unwrap();
        assert!((lam[0] + 1.0).abs() < 1e-12 && (lam[1] - 1.0).abs() < 1e-12);
        assert!(unitary_residual(&w) < 1e-12);
    }

    #[test]
    fn eigh_roundtrip_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = ginibre(&mut rng, 5, 5);
        let h = (&g + g.adjoint()).scale(0.5);
        let (w, lam) = eigh(&h).unwrap();
        assert!(lam.windows(2).all(|p| p[0] <= p[1]));
        let mut lm = CMat::zeros(5, 5);
        for (i, &l) in lam.iter().enumerate() {
            lm[(i, i)] = cx(l, 0.0);
        }
        let resid = (&w * lm * w.adjoint() - &h).norm();
        assert!(resid < 1e-12 * frob(&h));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = ginibre(&mut rng, 3, 3);
        assert!(matches!(eigh(&g), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn expm_zero_is_exact_identity() {
        let e = expm_skew(&CMat::zeros(3, 3)).unwrap();
        assert_eq!(e, CMat::identity(3, 3));
    }

    #[test]
    fn expm_diagonal_phases() {
        let th = [0.3, -1.2];
        let mut s = CMat::zeros(2, 2);
        for (i, &t) in th.iter().enumerate() {
            s[(i, i)] = cx(0.0, t);
        }
        let e = expm_skew(&s).unwrap();
        for (i, &t) in th.iter().enumerate() {
            assert!((e[(i, i)] - Complex64::from_polar(1.0, t)).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_planar_rotation() {
        let th = std::f64::consts::FRAC_PI_2;
        let mut s = CMat::zeros(2, 2);
        s[(0, 1)] = cx(-th, 0.0);
        s[(1, 0)] = cx(th, 0.0);
        let e = expm_skew(&s).unwrap();
        assert!((e[(0, 0)]).norm() < 1e-13);
        assert!((e[(0, 1)] - cx(-1.0, 0.0)).norm() < 1e-13);
        assert!((e[(1, 0)] - cx(1.0, 0.0)).norm() < 1e-13);
        assert!((e[(1, 1)]).norm() < 1e-13);
    }

    #[test]
    fn expm_inverse_property_up_to_100() {
        for (seed, m) in [(1u64, 2usize), (2, 7), (3, 25), (4, 100)] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = ginibre(&mut rng, m, m);
            let s = (&g - g.adjoint()).scale(0.5);
            let e = expm_skew(&s).unwrap();
            let einv = expm_skew(&(-&s)).unwrap();
            let resid = (&e * einv - CMat::identity(m, m)).norm();
            assert!(resid < 1e-10, "m={m} resid {resid:.3e}");
            assert!(unitary_residual(&e) < 1e-12);
        }
    }

    #[test]
    fn expm_rejects_non_skew() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = cx(1.0, 0.0);
        assert!(matches!(expm_skew(&a), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn takagi_identity() {
        let (q, sigma) = takagi(&CMat::identity(4, 4)).unwrap();
        assert!(sigma.iter().all(|&s| (s - 1.0).abs() < 1e-12));
        let resid = (&q * q.transpose() - CMat::identity(4, 4)).norm();
        assert!(resid < 1e-10);
    }

    #[test]
    fn takagi_diagonal_phases() {
        let phases = [0.4, -2.0, std::f64::consts::PI];
        let mut a = CMat::zeros(3, 3);
        for (i, &p) in phases.iter().enumerate() {
            a[(i, i)] = Complex64::from_polar(1.0, p);
        }
        let (q, sigma) = takagi(&a).unwrap();
        assert!(sigma.iter().all(|&s| (s - 1.0).abs() < 1e-10));
        let resid = (&q * q.transpose() - &a).norm();
        assert!(resid < 1e-10, "resid {resid:.3e}");
    }

    #[test]
    fn takagi_roundtrip_unitary_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for m in [1usize, 2, 5, 12] {
            let q0 = random_unitary(&mut rng, m);
            let theta = &q0 * q0.transpose();
            let theta = (&theta + theta.transpose()).scale(0.5);
            let (q, sigma) = takagi(&theta).unwrap();
            assert!(sigma.iter().all(|&s| (s - 1.0).abs() < 1e-8));
            let resid = (&q * q.transpose() - &theta).norm();
            assert!(resid < 1e-8, "m={m} resid {resid:.3e}");
        }
    }

    #[test]
    fn takagi_general_repeated_and_zero_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for sig in [
            vec![2.0, 1.0, 0.5, 0.1],
            vec![1.5, 1.5, 1.5, 0.2],
            vec![2.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
        ] {
            let m = sig.len();
            let q0 = random_unitary(&mut rng, m);
            let mut sm = CMat::zeros(m, m);
            for (i, &s) in sig.iter().enumerate() {
                sm[(i, i)] = cx(s, 0.0);
            }
            let a = &q0 * sm * q0.transpose();
            let a = (&a + a.transpose()).scale(0.5);
            let (q, sigma) = takagi(&a).unwrap();
            assert!(unitary_residual(&q) < 1e-10);
            let mut rm = CMat::zeros(m, m);
            for (i, &s) in sigma.iter().enumerate() {
                rm[(i, i)] = cx(s, 0.0);
            }
            let resid = (&q * rm * q.transpose() - &a).norm();
            assert!(resid < 1e-8 * frob(&a).max(1.0), "sig {sig:?} resid {resid:.3e}");
        }
    }

    #[test]
    fn takagi_zero_matrix() {
        let (q, sigma) = takagi(&CMat::zeros(3, 3)).unwrap();
        assert_eq!(q, CMat::identity(3, 3));
        assert!(sigma.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn takagi_rejects_asymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = ginibre(&mut rng, 3, 3);
        assert!(matches!(takagi(&g), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn nearest_unitary_fixes_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let q = random_unitary(&mut rng, 4);
        let p = nearest_unitary(&q).unwrap();
        assert!((&p - &q).norm() < 1e-12);
    }

    #[test]
    fn nearest_unitary_removes_scaling() {
        let a = CMat::identity(3, 3).scale(2.0);
        let p = nearest_unitary(&a).unwrap();
        assert!((&p - CMat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn nearest_unitary_is_closest_among_random_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = ginibre(&mut rng, 4, 4);
        let p = nearest_unitary(&a).unwrap();
        assert!(unitary_residual(&p) < 1e-12);
        let dist = (&a - &p).norm();
        for _ in 0..100 {
            let c = random_unitary(&mut rng, 4);
            assert!(dist <= (&a - c).norm() + 1e-12);
        }
    }

    #[test]
    fn nearest_unitary_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = ginibre(&mut rng, 5, 5);
        let p1 = nearest_unitary(&a).unwrap();
        let p2 = nearest_unitary(&p1).unwrap();
        assert!((&p2 - &p1).norm() < 1e-12);
    }

    #[test]
    fn nearest_unitary_rejects_rank_deficient() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = cx(1.0, 0.0);
        assert!(matches!(
            nearest_unitary(&a),
            Err(Error::DecompositionFailed { .. })
        ));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for m in [1usize, 3, 10] {
            let q = random_unitary(&mut rng, m);
            assert!(unitary_residual(&q) < 1e-12);
        }
    }

    #[test]
    fn takagi_roundtrip_bulk_100() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..100 {
            let m = 2 + (trial % 7);
            let a = if trial % 2 == 0 {
                let q0 = random_unitary(&mut rng, m);
                &q0 * q0.transpose()
            } else {
                let g = ginibre(&mut rng, m, m);
                &g + g.transpose()
            };
            let a = (&a + a.transpose()).scale(0.5);
            let (q, sigma) = takagi(&a).unwrap();
            let mut sm = CMat::zeros(m, m);
            for (i, &s) in sigma.iter().enumerate() {
                sm[(i, i)] = cx(s, 0.0);
            }
            let resid = (&q * sm * q.transpose() - &a).norm();
            assert!(
                resid <= 1e-8 * frob(&a).max(f64::MIN_POSITIVE),
                "trial {trial} resid {resid:.3e}"
            );
        }
    }
}
