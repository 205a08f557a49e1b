//! Bogoliubov diagonalization of `H~` and the `delta_l`-evolved mode transform.
//!
//! Conventions: `c_n = sum_k u_nk eta_k + v_nk eta_k^dag`, so that
//! `A u + B v* = u Lambda` and `A v + B u* = -v Lambda`. Column `k` of the
//! positive-energy BdG eigenvectors of `[[A, B], [-B*, -A*]]` is
//! `(u_k ; v_k*)`. After evolution `c~ = U^dag c U = u~ c + v~ c^dag`.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::linalg::{conj, max_abs, max_abs_minus_identity, scale_cols, CMat};
use crate::model::QuadraticForm;

/// Eigenvalues with modulus below this are treated as exact zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-10;
/// Relative (to `max |A|`) bound on the diagonalization residuals.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Bound on the canonical-relation residuals.
pub const CANONICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct BogoliubovSolution {
    pub u: CMat,
    pub v: CMat,
    /// Nonnegative quasiparticle energies of `H~`.
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolvedTransform {
    pub u_t: CMat,
    pub v_t: CMat,
    pub delta_l: f64,
}

/// Anything holding a pair `(u, v)` that should satisfy
/// `u u^dag + v v^dag = 1` and `u v^T + v u^T = 0`.
pub trait CanonicalPair {
    fn u_block(&self) -> MatRef<'_, c64>;
    fn v_block(&self) -> MatRef<'_, c64>;
}

impl CanonicalPair for BogoliubovSolution {
    fn u_block(&self) -> MatRef<'_, c64> {
        self.u.as_ref()
    }
    fn v_block(&self) -> MatRef<'_, c64> {
        self.v.as_ref()
    }
}

impl CanonicalPair for EvolvedTransform {
    fn u_block(&self) -> MatRef<'_, c64> {
        self.u_t.as_ref()
    }
    fn v_block(&self) -> MatRef<'_, c64> {
        self.v_t.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalResiduals {
    /// `max |u u^dag + v v^dag - 1|`
    pub completeness: f64,
    /// `max |u v^T + v u^T|`
    pub pairing: f64,
}

impl CanonicalResiduals {
    pub fn max(&self) -> f64 {
        self.completeness.max(self.pairing)
    }
}

pub fn canonical_residuals(t: &impl CanonicalPair) -> CanonicalResiduals {
    let (u, v) = (t.u_block(), t.v_block());
    let completeness = u * u.adjoint() + v * v.adjoint();
    let pairing = u * v.transpose() + v * u.transpose();
    CanonicalResiduals {
        completeness: max_abs_minus_identity(completeness.as_ref()),
        pairing: max_abs(pairing.as_ref()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalizationResiduals {
    /// `max |A u + B v* - u Lambda|`
    pub particle: f64,
    /// `max |A v + B u* + v Lambda|`
    pub hole: f64,
}

pub fn diagonalization_residuals(
    form: &QuadraticForm,
    sol: &BogoliubovSolution,
) -> DiagonalizationResiduals {
    let (a, b) = (form.a_block.as_ref(), form.b_block.as_ref());
    let lam: Vec<c64> = sol.lambda.iter().map(|&x| c64::new(x, 0.0)).collect();
    let particle = a * &sol.u + b * conj(sol.v.as_ref()) - scale_cols(sol.u.as_ref(), &lam);
    let hole = a * &sol.v + b * conj(sol.u.as_ref()) + scale_cols(sol.v.as_ref(), &lam);
    DiagonalizationResiduals {
        particle: max_abs(particle.as_ref()),
        hole: max_abs(hole.as_ref()),
    }
}

/// The 2N x 2N Hermitian BdG matrix `[[A, B], [-B*, -A*]]`.
pub fn bdg_matrix(form: &QuadraticForm) -> CMat {
    let n = form.dim();
    let (a, b) = (&form.a_block, &form.b_block);
    Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => a[(i, j)],
        (true, false) => b[(i, j - n)],
        (false, true) => -b[(i - n, j)].conj(),
        (false, false) => -a[(i - n, j - n)].conj(),
    })
}

/// Diagonalizes `H~`. Forms whose A block only couples same-sign modes and B
/// block only opposite-sign modes (every form from `build_quadratic_form`)
/// take the sector-reduced route; anything else goes through the full BdG
/// matrix.
pub fn diagonalize(form: &QuadraticForm) -> Result<BogoliubovSolution> {
    if form.is_sector_structured() {
        diagonalize_sectors(form)
    } else {
        diagonalize_bdg(form)
    }
}

fn hermitian_eigen(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

fn a_scale(form: &QuadraticForm) -> f64 {
    max_abs(form.a_block.as_ref()).max(f64::MIN_POSITIVE)
}

/// Sector route. Permuting the BdG basis to `(c_{n>=0}, c^dag_{n<0})` and
/// `(c_{n<0}, c^dag_{n>=0})` makes the BdG matrix block diagonal, the second
/// block being minus the conjugate of the first. Every eigenpair `(e, x)` of
/// the first block yields exactly one quasiparticle: itself when `e >= 0`,
/// its particle-hole partner (energy `-e`) otherwise.
pub fn diagonalize_sectors(form: &QuadraticForm) -> Result<BogoliubovSolution> {
    if !form.is_sector_structured() {
        return Err(Error::Numerical(
            "form does not have the sector sparsity pattern".into(),
        ));
    }
    let n = form.dim();
    let layout = form.layout;
    let pos: Vec<usize> = (0..n).filter(|&i| layout.mode(i) >= 0).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| layout.mode(i) < 0).collect();
    let p = pos.len();
    let sector: Vec<(usize, bool)> = pos
        .iter()
        .map(|&i| (i, true))
        .chain(neg.iter().map(|&i| (i, false)))
        .collect();

    let (a, b) = (&form.a_block, &form.b_block);
    let h = Mat::from_fn(n, n, |r, s| {
        let ((i, ip), (j, jp)) = (sector[r], sector[s]);
        match (ip, jp) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j)],
            (false, true) => -b[(i, j)].conj(),
            (false, false) => -a[(i, j)].conj(),
        }
    });
    let (values, vectors) = hermitian_eigen(&h)?;

    let scale = a_scale(form);
    let ev: Vec<c64> = values.iter().map(|&x| c64::new(x, 0.0)).collect();
    let residual = max_abs((&h * &vectors - scale_cols(vectors.as_ref(), &ev)).as_ref());
    let orthonormality = max_abs_minus_identity((vectors.adjoint() * &vectors).as_ref());
    if residual > RESIDUAL_TOL * scale || orthonormality > CANONICAL_TOL {
        return Err(Error::Numerical(format!(
            "sector diagonalization residual {residual:.3e} (bound {:.3e}), \
             orthonormality defect {orthonormality:.3e}",
            RESIDUAL_TOL * scale
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let energy = |k: usize| {
        let e = values[k];
        if e.abs() < ZERO_MODE_TOL {
            0.0
        } else {
            e.abs()
        }
    };
    order.sort_by(|&x, &y| energy(x).total_cmp(&energy(y)));

    let mut u = Mat::<c64>::zeros(n, n);
    let mut v = Mat::<c64>::zeros(n, n);
    let mut lambda = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        let particle_like = values[k] >= 0.0 || values[k].abs() < ZERO_MODE_TOL;
        for r in 0..n {
            let x = vectors[(r, k)];
            let (i, top) = (sector[r].0, r < p);
            match (particle_like, top) {
                (true, true) => u[(i, col)] = x,
                (true, false) => v[(i, col)] = x.conj(),
                (false, true) => v[(i, col)] = x,
                (false, false) => u[(i, col)] = x.conj(),
            }
        }
        lambda.push(energy(k));
    }
    Ok(BogoliubovSolution { u, v, lambda })
}

/// Full 2N x 2N route. Positive eigenvalues are taken directly; the zero
/// cluster is split into particle-hole partners explicitly so no pair is
/// selected twice.
pub fn diagonalize_bdg(form: &QuadraticForm) -> Result<BogoliubovSolution> {
    let n = form.dim();
    let h = bdg_matrix(form);
    let (values, vectors) = hermitian_eigen(&h)?;

    let positive: Vec<usize> = (0..2 * n).filter(|&k| values[k] >= ZERO_MODE_TOL).collect();
    let negative = (0..2 * n).filter(|&k| values[k] <= -ZERO_MODE_TOL).count();
    let zeros: Vec<usize> = (0..2 * n).filter(|&k| values[k].abs() < ZERO_MODE_TOL).collect();
    if positive.len() != negative || positive.len() + zeros.len() / 2 != n || zeros.len() % 2 != 0
    {
        return Err(Error::Numerical(format!(
            "BdG spectrum is not particle-hole paired: {} positive, {} negative, {} zero",
            positive.len(),
            negative,
            zeros.len()
        )));
    }

    let column = |k: usize| -> Vec<c64> { (0..2 * n).map(|r| vectors[(r, k)]).collect() };
    let mut columns: Vec<(f64, Vec<c64>)> =
        positive.iter().map(|&k| (values[k], column(k))).collect();
    for w in zero_mode_partners(zeros.iter().map(|&k| column(k)).collect(), n)? {
        columns.push((0.0, w));
    }
    columns.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut u = Mat::<c64>::zeros(n, n);
    let mut v = Mat::<c64>::zeros(n, n);
    let mut lambda = Vec::with_capacity(n);
    for (k, (e, w)) in columns.iter().enumerate() {
        for i in 0..n {
            u[(i, k)] = w[i];
            v[(i, k)] = w[n + i].conj();
        }
        lambda.push(*e);
    }
    let sol = BogoliubovSolution { u, v, lambda };

    let scale = a_scale(form);
    let res = diagonalization_residuals(form, &sol);
    let can = canonical_residuals(&sol);
    if res.particle.max(res.hole) > RESIDUAL_TOL * scale || can.max() > CANONICAL_TOL {
        return Err(Error::Numerical(format!(
            "BdG diagonalization residuals particle {:.3e}, hole {:.3e} (bound {:.3e}); \
             canonical residuals {:.3e}, {:.3e}",
            res.particle,
            res.hole,
            RESIDUAL_TOL * scale,
            can.completeness,
            can.pairing
        )));
    }
    Ok(sol)
}

/// Particle-hole conjugation `C (x ; y) = (y* ; x*)` on BdG vectors.
fn ph_conjugate(w: &[c64], n: usize) -> Vec<c64> {
    (0..2 * n)
        .map(|r| if r < n { w[n + r].conj() } else { w[r - n].conj() })
        .collect()
}

/// Splits an (orthonormal, C-invariant) zero-energy eigenspace of dimension
/// `2z` into `z` vectors `f` such that `{f, C f}` is an orthonormal basis.
/// Builds a C-real orthonormal basis `r_j` (inner products between C-real
/// vectors are real) and pairs it as `(r_{2j} + i r_{2j+1}) / sqrt 2`.
fn zero_mode_partners(zero_space: Vec<Vec<c64>>, n: usize) -> Result<Vec<Vec<c64>>> {
    let dim = zero_space.len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let dot = |a: &[c64], b: &[c64]| -> c64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let mut real_basis: Vec<Vec<c64>> = Vec::with_capacity(dim);
    let i = c64::new(0.0, 1.0);
    for z in &zero_space {
        let cz = ph_conjugate(z, n);
        let candidates = [
            z.iter().zip(&cz).map(|(a, b)| a + b).collect::<Vec<_>>(),
            z.iter().zip(&cz).map(|(a, b)| i * (a - b)).collect::<Vec<_>>(),
        ];
        for mut r in candidates {
            for q in &real_basis {
                let proj = dot(q, &r).re;
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
            let norm = dot(&r, &r).re.sqrt();
            if norm > 1e-6 && real_basis.len() < dim {
                r.iter_mut().for_each(|x| *x /= norm);
                real_basis.push(r);
            }
        }
    }
    if real_basis.len() != dim {
        return Err(Error::Numerical(format!(
            "zero-mode subspace of dimension {dim} yielded {} particle-hole real vectors",
            real_basis.len()
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(real_basis
        .chunks(2)
        .map(|pair| pair[0].iter().zip(&pair[1]).map(|(a, b)| (a + i * b) * s).collect())
        .collect())
}

/// `u~ = u D u^dag + v D* v^dag`, `v~ = u D v^T + v D* u^T` with
/// `D = diag(exp(-i Lambda delta_l))`.
pub fn evolve(solution: &BogoliubovSolution, delta_l: f64) -> EvolvedTransform {
    let n = solution.u.nrows();
    if delta_l == 0.0 {
        return EvolvedTransform::identity(n);
    }
    let d: Vec<c64> = solution
        .lambda
        .iter()
        .map(|&l| c64::cis(-l * delta_l))
        .collect();
    let dc: Vec<c64> = d.iter().map(|x| x.conj()).collect();
    let ud = scale_cols(solution.u.as_ref(), &d);
    let vd = scale_cols(solution.v.as_ref(), &dc);
    let u_t = &ud * solution.u.adjoint() + &vd * solution.v.adjoint();
    let v_t = &ud * solution.v.transpose() + &vd * solution.u.transpose();
    EvolvedTransform { u_t, v_t, delta_l }
}

impl EvolvedTransform {
    pub fn identity(n: usize) -> Self {
        Self {
            u_t: Mat::identity(n, n),
            v_t: Mat::zeros(n, n),
            delta_l: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.u_t.nrows()
    }

    /// Transform for evolving by `earlier.delta_l` and then by
    /// `self.delta_l`: `(u2 u1 + v2 v1*, u2 v1 + v2 u1*)`.
    pub fn compose(&self, earlier: &EvolvedTransform) -> EvolvedTransform {
        let (u2, v2) = (&self.u_t, &self.v_t);
        let (u1, v1) = (&earlier.u_t, &earlier.v_t);
        EvolvedTransform {
            u_t: u2 * u1 + v2 * conj(v1.as_ref()),
            v_t: u2 * v1 + v2 * conj(u1.as_ref()),
            delta_l: self.delta_l + earlier.delta_l,
        }
    }
}
