//! S-spectrum, pseudo-resolvent and S-resolvents of a full Clifford operator.
//!
//! `Q_s(T) = T² − 2 Re(s) T + |s|² I` depends on `s` only through the sphere
//! `(u, v) = (Re s, |s̲|)`, so every function here that decides invertibility
//! takes `(u, v)` and never an imaginary unit.
//!
//! The spectrum itself is read off the eigenvalues of the real representation
//! `R`: since `real_rep(Q_s(T)) = (R − λ)(R − λ̄)` with `λ = u + iv`, it is
//! singular exactly when `u ± iv` is an eigenvalue of `R`.
//! [`s_spectrum_oracle`] is the brute-force witness for that claim.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{CliffordElement, Paravector, Sphere};
use crate::error::{Error, Result};
use crate::linalg::{self, op_norm2};
use crate::matrix::{CliffordMatrix, RealRep};

/// Spheres merge when `max(|Δu|, |Δv|) <= MERGE_REL · (1 + radius)`.
pub const MERGE_REL: f64 = 1e-8;

/// Resolvents refuse points within `GUARD_REL · (1 + radius)` of a sphere.
pub const GUARD_REL: f64 = 1e-12;

/// Default relative truncation threshold of the resolvent series.
pub const SERIES_REL_TOL: f64 = 1e-14;

/// A sphere `[u + J v]` of the S-spectrum with its algebraic multiplicity in
/// the real representation (a conjugate eigenvalue pair counts once).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralSphere {
    pub u: f64,
    pub v: f64,
    pub multiplicity: usize,
}

impl SpectralSphere {
    pub fn sphere(&self) -> Sphere {
        Sphere::new(self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SSpectrum {
    pub spheres: Vec<SpectralSphere>,
    /// `max √(u² + v²)` over the spheres.
    pub radius: f64,
}

impl SSpectrum {
    pub fn from_spheres(spheres: Vec<SpectralSphere>) -> Self {
        let radius = spheres.iter().map(|s| s.u.hypot(s.v)).fold(0.0, f64::max);
        SSpectrum { spheres, radius }
    }

    pub fn points(&self) -> Vec<Sphere> {
        self.spheres.iter().map(SpectralSphere::sphere).collect()
    }

    /// Distance from `(u, |v|)` to the nearest sphere.
    pub fn distance(&self, u: f64, v: f64) -> f64 {
        let p = Sphere::new(u, v);
        self.spheres.iter().map(|s| s.sphere().distance(&p)).fold(f64::INFINITY, f64::min)
    }

    /// The spheres not listed in `indices`.
    pub fn complement(&self, indices: &[usize]) -> SSpectrum {
        let rest = self
            .spheres
            .iter()
            .enumerate()
            .filter(|(i, _)| !indices.contains(i))
            .map(|(_, s)| *s)
            .collect();
        SSpectrum::from_spheres(rest)
    }

    pub fn subset(&self, indices: &[usize]) -> Result<SSpectrum> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            let s = self.spheres.get(i).ok_or_else(|| {
                Error::InvalidArgument(format!("sphere index {i} out of range ({} spheres)", self.spheres.len()))
            })?;
            out.push(*s);
        }
        Ok(SSpectrum::from_spheres(out))
    }
}

/// Hausdorff distance between two finite point sets of the `(u, v)` half plane.
/// Two empty sets are at distance 0, an empty and a non-empty set at infinity.
pub fn hausdorff_distance(a: &[Sphere], b: &[Sphere]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |x: &[Sphere], y: &[Sphere]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.distance(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// `Q_s(T) = T² − 2u T + (u² + v²) I`.
pub fn q_op(t: &CliffordMatrix, u: f64, v: f64) -> CliffordMatrix {
    let t2 = t * t;
    let id = CliffordMatrix::identity(t.d(), t.n());
    &(&t2 - &t.scale(2.0 * u)) + &id.scale(u * u + v * v)
}

/// `Q_s(T)^{-1}`, computed through the real representation.
///
/// Fails with [`Error::SpectralPoint`] when the representation of `Q_s(T)`
/// fails the relative rank test of [`linalg::SINGULAR_REL`].
pub fn pseudo_resolvent(t: &CliffordMatrix, u: f64, v: f64) -> Result<CliffordMatrix> {
    let q = q_op(t, u, v).real_rep();
    let inv = linalg::guarded_inverse(&q.matrix).map_err(|_| Error::SpectralPoint { u, v: v.abs() })?;
    Ok(RealRep { matrix: inv, ..q }.to_clifford())
}

/// A truncated operator series.
#[derive(Clone, Debug)]
pub struct SeriesSum {
    pub value: CliffordMatrix,
    pub terms: usize,
    /// A priori bound on the 2-norm of the discarded tail.
    pub truncation_bound: f64,
}

fn series_radius_check(t: &CliffordMatrix, s: &Paravector) -> Result<(f64, f64)> {
    if s.n() != t.n() {
        return Err(Error::DimensionMismatch(format!("paravector n = {} vs operator n = {}", s.n(), t.n())));
    }
    let norm = t.norm_paper();
    let modulus = s.modulus();
    if !(norm < modulus) {
        return Err(Error::SeriesRadius { norm, modulus });
    }
    Ok((t.norm_op2(), modulus))
}

/// Tail `Σ_{k > m} (k + 1) r^k` of the coefficient majorant.
fn weighted_geometric_tail(r: f64, m: usize) -> f64 {
    let k0 = (m + 1) as f64;
    r.powi(m as i32 + 1) * ((k0 + 1.0) / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)))
}

/// `Q_s(T)^{-1} = Σ_m T^m Σ_{k=0}^m s̄^{-k-1} s^{-m+k-1}`, valid for `‖T‖ < |s|`.
///
/// The coefficients are formed in Clifford arithmetic and are real up to
/// rounding. Summation stops once the tail majorant
/// `Σ_{k>m} (k+1) |s|^{-k-2} ‖T‖^k` drops below [`SERIES_REL_TOL`] relative to
/// the lower bound `(‖T‖ + |s|)^{-2}` of `‖Q_s(T)^{-1}‖`.
pub fn pseudo_resolvent_series(t: &CliffordMatrix, s: &Paravector, max_terms: usize) -> Result<SeriesSum> {
    let (norm, modulus) = series_radius_check(t, s)?;
    let n = t.n();
    let w = s.inverse()?;
    let w_bar = s.conj().inverse()?;
    let ratio = norm / modulus;
    let floor = SERIES_REL_TOL / ((norm + modulus) * (norm + modulus));

    let r = t.real_rep();
    let dim = r.matrix.nrows();
    let mut power = DMatrix::identity(dim, dim);
    let mut w_pow = CliffordElement::one(n);
    let mut partial = CliffordElement::one(n);
    let mut sum = DMatrix::zeros(dim, dim);
    for m in 0..max_terms {
        if m > 0 {
            power = &power * &r.matrix;
            w_pow = &w_pow * &w;
            partial = &w_pow + &(&w_bar * &partial);
        }
        let a_m = (&(&w_bar * &partial) * &w).scalar_part();
        sum += &power * a_m;
        let tail = weighted_geometric_tail(ratio, m) / (modulus * modulus);
        if tail <= floor {
            let value = RealRep { matrix: sum, ..r }.to_clifford();
            return Ok(SeriesSum { value, terms: m + 1, truncation_bound: tail });
        }
    }
    Err(Error::MaxTermsExceeded(max_terms))
}

/// Right multiplication by a Clifford number, in the real representation.
pub(crate) fn scalar_rep(c: &CliffordElement, d: usize) -> DMatrix<f64> {
    CliffordMatrix::from_element(d, c).real_rep().matrix
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Left,
    Right,
}

fn resolvent_series(t: &CliffordMatrix, s: &Paravector, max_terms: usize, side: Side) -> Result<SeriesSum> {
    let (norm, modulus) = series_radius_check(t, s)?;
    let d = t.d();
    let w = s.inverse()?;
    let ratio = norm / modulus;
    let floor = SERIES_REL_TOL / (norm + modulus);

    let r = t.real_rep();
    let dim = r.matrix.nrows();
    let mut power = DMatrix::identity(dim, dim);
    let mut w_pow = w.clone();
    let mut sum = DMatrix::zeros(dim, dim);
    for m in 0..max_terms {
        if m > 0 {
            power = &power * &r.matrix;
            w_pow = &w_pow * &w;
        }
        let scalar = scalar_rep(&w_pow, d);
        sum += match side {
            Side::Left => &power * scalar,
            Side::Right => scalar * &power,
        };
        let tail = ratio.powi(m as i32 + 1) / (modulus * (1.0 - ratio));
        if tail <= floor {
            let value = RealRep { matrix: sum, ..r }.to_clifford();
            return Ok(SeriesSum { value, terms: m + 1, truncation_bound: tail });
        }
    }
    Err(Error::MaxTermsExceeded(max_terms))
}

/// `S_L^{-1}(s, T) = Σ_m T^m s^{-m-1}` for `‖T‖ < |s|`.
pub fn s_resolvent_left_series(t: &CliffordMatrix, s: &Paravector, max_terms: usize) -> Result<SeriesSum> {
    resolvent_series(t, s, max_terms, Side::Left)
}

/// `S_R^{-1}(s, T) = Σ_m s^{-m-1} T^m` for `‖T‖ < |s|`.
pub fn s_resolvent_right_series(t: &CliffordMatrix, s: &Paravector, max_terms: usize) -> Result<SeriesSum> {
    resolvent_series(t, s, max_terms, Side::Right)
}

/// Cached state for repeated resolvent evaluation of one operator: its real
/// representation, the representation of `T²`, and its S-spectrum.
#[derive(Clone, Debug)]
pub struct SResolvent {
    t: CliffordMatrix,
    rep: DMatrix<f64>,
    rep_sq: DMatrix<f64>,
    spectrum: SSpectrum,
    guard: f64,
}

impl SResolvent {
    pub fn new(t: &CliffordMatrix) -> Result<Self> {
        let spectrum = s_spectrum(t)?;
        let rep = t.real_rep().matrix;
        let rep_sq = &rep * &rep;
        let guard = GUARD_REL * (1.0 + spectrum.radius);
        Ok(SResolvent { t: t.clone(), rep, rep_sq, spectrum, guard })
    }

    /// Overrides the absolute distance below which evaluation points are refused.
    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn operator(&self) -> &CliffordMatrix {
        &self.t
    }

    pub fn spectrum(&self) -> &SSpectrum {
        &self.spectrum
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    /// Refuses `(u, v)` closer than the guard distance to the spectrum.
    pub fn check_point(&self, u: f64, v: f64) -> Result<()> {
        if self.spectrum.distance(u, v) <= self.guard {
            return Err(Error::SpectralPoint { u, v: v.abs() });
        }
        Ok(())
    }

    fn q_rep(&self, u: f64, v: f64) -> DMatrix<f64> {
        let dim = self.rep.nrows();
        &self.rep_sq - &self.rep * (2.0 * u) + DMatrix::identity(dim, dim) * (u * u + v * v)
    }

    fn q_inverse_rep(&self, u: f64, v: f64) -> Result<DMatrix<f64>> {
        self.check_point(u, v)?;
        linalg::guarded_inverse(&self.q_rep(u, v)).map_err(|_| Error::SpectralPoint { u, v: v.abs() })
    }

    fn wrap(&self, matrix: DMatrix<f64>) -> CliffordMatrix {
        RealRep { n: self.t.n(), d: self.t.d(), matrix }.to_clifford()
    }

    pub fn pseudo_resolvent(&self, u: f64, v: f64) -> Result<CliffordMatrix> {
        Ok(self.wrap(self.q_inverse_rep(u, v)?))
    }

    fn shifted(&self, s: &Paravector) -> Result<DMatrix<f64>> {
        if s.n() != self.t.n() {
            return Err(Error::DimensionMismatch(format!(
                "paravector n = {} vs operator n = {}",
                s.n(),
                self.t.n()
            )));
        }
        Ok(&self.rep - scalar_rep(&s.conj().to_element(), self.t.d()))
    }

    /// Real representation of `S_L^{-1}(s, T) = −Q_s(T)^{-1} (T − s̄ I)`.
    pub fn left_rep(&self, s: &Paravector) -> Result<DMatrix<f64>> {
        let sphere = s.sphere();
        let shifted = self.shifted(s)?;
        Ok(-(self.q_inverse_rep(sphere.u, sphere.v)? * shifted))
    }

    /// Real representation of `S_R^{-1}(s, T) = −(T − s̄ I) Q_s(T)^{-1}`.
    pub fn right_rep(&self, s: &Paravector) -> Result<DMatrix<f64>> {
        let sphere = s.sphere();
        let shifted = self.shifted(s)?;
        Ok(-(shifted * self.q_inverse_rep(sphere.u, sphere.v)?))
    }

    pub fn left(&self, s: &Paravector) -> Result<CliffordMatrix> {
        Ok(self.wrap(self.left_rep(s)?))
    }

    pub fn right(&self, s: &Paravector) -> Result<CliffordMatrix> {
        Ok(self.wrap(self.right_rep(s)?))
    }

    /// `‖S_L^{-1}(s,T) s − T S_L^{-1}(s,T) − I‖_2`.
    pub fn left_equation_residual(&self, s: &Paravector) -> Result<f64> {
        let x = self.left_rep(s)?;
        let sc = scalar_rep(&s.to_element(), self.t.d());
        let dim = x.nrows();
        Ok(op_norm2(&(&x * sc - &self.rep * &x - DMatrix::identity(dim, dim))))
    }

    /// `‖s S_R^{-1}(s,T) − S_R^{-1}(s,T) T − I‖_2`.
    pub fn right_equation_residual(&self, s: &Paravector) -> Result<f64> {
        let x = self.right_rep(s)?;
        let sc = scalar_rep(&s.to_element(), self.t.d());
        let dim = x.nrows();
        Ok(op_norm2(&(sc * &x - &x * &self.rep - DMatrix::identity(dim, dim))))
    }

    /// Central-difference Cauchy–Riemann residual of `s ↦ S_L^{-1}(s, T)` at
    /// `(u, v)` with step `h`. Writing `S_L^{-1}(u + Jv, T) = F_0 + F_1 J` with
    /// `F_0 = −Q^{-1}(T − u)` and `F_1 = −Q^{-1} v`, returns the larger 2-norm of
    /// `∂_u F_0 − ∂_v F_1` and `∂_v F_0 + ∂_u F_1`.
    pub fn cauchy_riemann_residual(&self, u: f64, v: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("step h = {h} must be positive")));
        }
        let dim = self.rep.nrows();
        let parts = |u: f64, v: f64| -> Result<(DMatrix<f64>, DMatrix<f64>)> {
            let q_inv = self.q_inverse_rep(u, v)?;
            let f0 = -(&q_inv * (&self.rep - DMatrix::identity(dim, dim) * u));
            let f1 = q_inv * (-v);
            Ok((f0, f1))
        };
        let (u_plus, u_minus) = (parts(u + h, v)?, parts(u - h, v)?);
        let (v_plus, v_minus) = (parts(u, v + h)?, parts(u, v - h)?);
        let scale = 0.5 / h;
        let du0 = (&u_plus.0 - &u_minus.0) * scale;
        let du1 = (&u_plus.1 - &u_minus.1) * scale;
        let dv0 = (&v_plus.0 - &v_minus.0) * scale;
        let dv1 = (&v_plus.1 - &v_minus.1) * scale;
        Ok(op_norm2(&(du0 - dv1)).max(op_norm2(&(dv0 + du1))))
    }

    /// Residuals of both forms of the S-resolvent equation for
    /// `S_R^{-1}(s,T) S_L^{-1}(q,T)`; requires `q ∉ [s]`. With
    /// `D = S_R^{-1}(s,T) − S_L^{-1}(q,T)` the forms are
    /// `[D q − s̄ D] Q_s(q)^{-1}` and `Q_q(s)^{-1} [D q̄ − s D]`.
    pub fn resolvent_equation_residuals(&self, s: &Paravector, q: &Paravector) -> Result<(f64, f64)> {
        let (ss, qs) = (s.sphere(), q.sphere());
        let same_tol = GUARD_REL * (1.0 + s.modulus().max(q.modulus()));
        if ss.distance(&qs) <= same_tol {
            return Err(Error::SameSphere { u: ss.u, v: ss.v });
        }
        let d = self.t.d();
        let sr = self.right_rep(s)?;
        let sl = self.left_rep(q)?;
        let lhs = &sr * &sl;

        let (s_el, q_el) = (s.to_element(), q.to_element());
        let s_conj = s.conj().to_element();
        let q_conj = q.conj().to_element();
        // Q_s(q) = q² − 2 Re(s) q + |s|², a paravector up to rounding.
        let qs_q = &(&(&q_el * &q_el) - &q_el.scale(2.0 * s.re())) + &CliffordElement::scalar(s.n(), s.modulus_sqr());
        let qq_s = &(&(&s_el * &s_el) - &s_el.scale(2.0 * q.re())) + &CliffordElement::scalar(s.n(), q.modulus_sqr());
        let qs_q_inv = qs_q.to_paravector(1e-9)?.inverse()?;
        let qq_s_inv = qq_s.to_paravector(1e-9)?.inverse()?;

        let diff = &sr - &sl;
        let rhs1 = (&diff * scalar_rep(&q_el, d) - scalar_rep(&s_conj, d) * &diff) * scalar_rep(&qs_q_inv, d);
        let rhs2 = scalar_rep(&qq_s_inv, d) * (&diff * scalar_rep(&q_conj, d) - scalar_rep(&s_el, d) * &diff);
        Ok((op_norm2(&(&lhs - rhs1)), op_norm2(&(&lhs - rhs2))))
    }
}

/// `S_L^{-1}(s, T)`.
pub fn s_resolvent_left(t: &CliffordMatrix, s: &Paravector) -> Result<CliffordMatrix> {
    SResolvent::new(t)?.left(s)
}

/// `S_R^{-1}(s, T)`.
pub fn s_resolvent_right(t: &CliffordMatrix, s: &Paravector) -> Result<CliffordMatrix> {
    SResolvent::new(t)?.right(s)
}

/// Left and right S-resolvent equation residuals at `s`.
pub fn left_resolvent_equation_residual(t: &CliffordMatrix, s: &Paravector) -> Result<(f64, f64)> {
    let r = SResolvent::new(t)?;
    Ok((r.left_equation_residual(s)?, r.right_equation_residual(s)?))
}

/// Residuals of the two equivalent forms of the S-resolvent equation.
pub fn s_resolvent_equation_residual(t: &CliffordMatrix, s: &Paravector, q: &Paravector) -> Result<(f64, f64)> {
    SResolvent::new(t)?.resolvent_equation_residuals(s, q)
}

/// Complex eigenvalues of a real square matrix via the real Schur form.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<num_complex::Complex64>> {
    let max_iter = 1000 * m.nrows().max(1);
    let schur = Schur::try_new(m.clone(), f64::EPSILON, max_iter).ok_or(Error::EigenSolver)?;
    let ev = schur.complex_eigenvalues();
    Ok(ev.iter().map(|z| num_complex::Complex64::new(z.re, z.im)).collect())
}

/// Groups `(u, |v|)` eigenvalue shadows into spheres.
pub fn spheres_from_eigenvalues(eigs: &[num_complex::Complex64]) -> SSpectrum {
    let radius = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = MERGE_REL * (1.0 + radius);
    let points: Vec<(f64, f64, bool)> = eigs.iter().map(|z| (z.re, z.im.abs(), z.im == 0.0)).collect();

    // Single-linkage clustering under the max-norm tolerance.
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i].0 - points[j].0).abs() <= tol && (points[i].1 - points[j].1).abs() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut clusters: Vec<(usize, f64, f64, usize, usize)> = Vec::new();
    let mut slot = vec![usize::MAX; points.len()];
    for i in 0..points.len() {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push((0, 0.0, 0.0, 0, 0));
        }
        let c = &mut clusters[slot[r]];
        c.0 += 1;
        c.1 += points[i].0;
        c.2 += points[i].1;
        if points[i].2 {
            c.3 += 1;
        } else {
            c.4 += 1;
        }
    }
    let mut spheres: Vec<SpectralSphere> = clusters
        .into_iter()
        .map(|(count, su, sv, real, complex)| SpectralSphere {
            u: su / count as f64,
            v: if complex == 0 { 0.0 } else { sv / count as f64 },
            multiplicity: real + complex.div_ceil(2),
        })
        .collect();
    spheres.sort_by(|a, b| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)));
    SSpectrum::from_spheres(spheres)
}

/// `σ_S(T)` from the eigenvalues of the real representation.
pub fn s_spectrum(t: &CliffordMatrix) -> Result<SSpectrum> {
    if t.d() == 0 {
        return Err(Error::InvalidArgument("operator of dimension 0".into()));
    }
    Ok(spheres_from_eigenvalues(&eigenvalues(&t.real_rep().matrix)?))
}

/// Rectangle of the closed upper half plane sampled with a uniform step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleGrid {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub step: f64,
}

impl OracleGrid {
    /// Square box `[-bound, bound] × [0, bound]`.
    pub fn covering(bound: f64, step: f64) -> Self {
        OracleGrid { u_min: -bound, u_max: bound, v_min: 0.0, v_max: bound, step }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || self.v_min < 0.0 || self.u_max < self.u_min || self.v_max < self.v_min {
            return Err(Error::InvalidArgument(format!("invalid oracle grid {self:?}")));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        let count = |lo: f64, hi: f64| ((hi - lo) / self.step + 1e-9).floor() as usize + 1;
        (count(self.u_min, self.u_max), count(self.v_min, self.v_max))
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u_min + i as f64 * self.step, self.v_min + j as f64 * self.step)
    }
}

/// Smallest singular value of `real_rep(Q_s(T))` on every grid point.
#[derive(Clone, Debug)]
pub struct OracleField {
    pub grid: OracleGrid,
    pub nu: usize,
    pub nv: usize,
    /// Row-major in `u`: entry `i * nv + j` belongs to `grid.point(i, j)`.
    pub sigma_min: Vec<f64>,
}

impl OracleField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.sigma_min[i * self.nv + j]
    }

    /// `(u, v, σ_min)` triples in grid order.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.nu).flat_map(move |i| {
            (0..self.nv).map(move |j| {
                let (u, v) = self.grid.point(i, j);
                (u, v, self.value(i, j))
            })
        })
    }

    /// Grid points whose value is no larger than any of their (up to 8)
    /// neighbours and at most `threshold`.
    pub fn dips(&self, threshold: f64) -> Vec<Sphere> {
        let mut out = Vec::new();
        for i in 0..self.nu {
            for j in 0..self.nv {
                let x = self.value(i, j);
                if x > threshold {
                    continue;
                }
                let mut minimum = true;
                'scan: for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ni, nj) = (i as i64 + di, j as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= self.nu as i64 || nj >= self.nv as i64 {
                            continue;
                        }
                        if self.value(ni as usize, nj as usize) < x {
                            minimum = false;
                            break 'scan;
                        }
                    }
                }
                if minimum {
                    let (u, v) = self.grid.point(i, j);
                    out.push(Sphere::new(u, v));
                }
            }
        }
        out
    }
}

/// Evaluates `σ_min(real_rep(Q_s(T)))` on a grid; a brute-force witness for
/// the S-spectrum that never touches an eigenvalue solver.
pub fn s_spectrum_oracle(t: &CliffordMatrix, grid: OracleGrid) -> Result<OracleField> {
    grid.validate()?;
    let rep = t.real_rep().matrix;
    let rep_sq = (t * t).real_rep().matrix;
    let dim = rep.nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    let (nu, nv) = grid.shape();
    let mut sigma_min = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (u, v) = grid.point(i, j);
            let q = &rep_sq - &rep * (2.0 * u) + &id * (u * u + v * v);
            sigma_min.push(linalg::sigma_min(&q));
        }
    }
    Ok(OracleField { grid, nu, nv, sigma_min })
}

/// `‖T^m‖_2^{1/m}`, with the power built by repeated squaring and rescaled
/// at every step so that only the logarithm of its size is carried.
pub fn spectral_radius_gelfand(t: &CliffordMatrix, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("Gelfand exponent must be at least 1".into()));
    }
    let rep = t.real_rep().matrix;
    let dim = rep.nrows();
    let normalize = |x: &mut DMatrix<f64>| -> Option<f64> {
        let s = x.amax();
        if s == 0.0 || !s.is_finite() {
            return None;
        }
        *x /= s;
        Some(s.ln())
    };
    let mut base = rep;
    let Some(mut base_log) = normalize(&mut base) else { return Ok(0.0) };
    let mut acc = DMatrix::<f64>::identity(dim, dim);
    let mut acc_log = 0.0;
    let mut e = m;
    loop {
        if e & 1 == 1 {
            acc = &acc * &base;
            acc_log += base_log;
            match normalize(&mut acc) {
                Some(l) => acc_log += l,
                None => return Ok(0.0),
            }
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = &base * &base;
        base_log *= 2.0;
        match normalize(&mut base) {
            Some(l) => base_log += l,
            None => return Ok(0.0),
        }
    }
    let log_norm = op_norm2(&acc).ln() + acc_log;
    Ok((log_norm / m as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{MultiIndex, Paravector};
    use crate::test_util::*;
    use nalgebra::DVector;

    fn e1_scalar() -> CliffordMatrix {
        CliffordMatrix::from_element(1, &CliffordElement::generator(1, 1).unwrap())
    }

    fn diag23(n: usize) -> CliffordMatrix {
        CliffordMatrix::from_real(n, DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])))
    }

    fn close(a: &CliffordMatrix, b: &CliffordMatrix, tol: f64) -> bool {
        (a - b).norm_op2() <= tol * (1.0 + b.norm_op2())
    }

    #[test]
    fn q_op_examples() {
        let mut r = rng(10);
        let t = random_clifford_matrix(&mut r, 2, 2, 1.0);
        let shifted = &t - &CliffordMatrix::identity(2, 2).scale(0.7);
        assert!(close(&q_op(&t, 0.7, 0.0), &(&shifted * &shifted), 1e-14));
        let z = CliffordMatrix::zero(2, 2);
        assert!(close(&q_op(&z, 1.0, 2.0), &CliffordMatrix::identity(2, 2).scale(5.0), 1e-15));
        assert!(q_op(&e1_scalar(), 0.0, 1.0).max_abs() < 1e-15);
        assert!(matches!(pseudo_resolvent(&e1_scalar(), 0.0, 1.0), Err(Error::SpectralPoint { .. })));
    }

    #[test]
    fn pseudo_resolvent_examples() {
        let z = CliffordMatrix::zero(2, 1);
        assert!(close(&pseudo_resolvent(&z, 0.0, 2.0).unwrap(), &CliffordMatrix::identity(2, 1).scale(0.25), 1e-15));

        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, -1.0]);
        let t = CliffordMatrix::from_real(2, a.clone());
        let shifted = &a - DMatrix::identity(2, 2) * 0.3;
        let expected = CliffordMatrix::from_real(2, (&shifted * &shifted).try_inverse().unwrap());
        assert!(close(&pseudo_resolvent(&t, 0.3, 0.0).unwrap(), &expected, 1e-13));

        let mut r = rng(11);
        for _ in 0..10 {
            let t = random_clifford_matrix(&mut r, 3, 2, 1.0);
            let s = paravector_with_modulus(&mut r, 2, 2.0 * t.norm_paper());
            let sphere = s.sphere();
            let direct = pseudo_resolvent(&t, sphere.u, sphere.v).unwrap();
            let series = pseudo_resolvent_series(&t, &s, 10_000).unwrap();
            assert!(close(&direct, &series.value, 1e-10));
        }
    }

    #[test]
    fn pseudo_resolvent_series_examples() {
        let z = CliffordMatrix::zero(2, 2);
        let s = Paravector::new(1.0, vec![1.0, 1.0]);
        let out = pseudo_resolvent_series(&z, &s, 100).unwrap();
        assert!(close(&out.value, &CliffordMatrix::identity(2, 2).scale(1.0 / 3.0), 1e-15));

        // s real: Σ (m+1) T^m s^{-m-2} = ((T − s)²)^{-1}.
        let a = DMatrix::from_row_slice(2, 2, &[0.2, 0.1, -0.3, 0.4]);
        let t = CliffordMatrix::from_real(1, a.clone());
        let s = Paravector::real(1, 2.0);
        let shifted = &a - DMatrix::identity(2, 2) * 2.0;
        let expected = CliffordMatrix::from_real(1, (&shifted * &shifted).try_inverse().unwrap());
        assert!(close(&pseudo_resolvent_series(&t, &s, 1000).unwrap().value, &expected, 1e-13));

        let big = Paravector::real(1, 0.1);
        assert!(matches!(pseudo_resolvent_series(&t, &big, 1000), Err(Error::SeriesRadius { .. })));
        let slow = Paravector::real(1, t.norm_paper() * 1.01);
        assert!(matches!(pseudo_resolvent_series(&t, &slow, 5), Err(Error::MaxTermsExceeded(5))));
    }

    #[test]
    fn resolvent_examples() {
        let z = CliffordMatrix::zero(2, 2);
        let s = Paravector::new(0.5, vec![1.0, -2.0]);
        let inv = CliffordMatrix::from_element(2, &s.inverse().unwrap());
        assert!(close(&s_resolvent_left(&z, &s).unwrap(), &inv, 1e-14));
        assert!(close(&s_resolvent_right(&z, &s).unwrap(), &inv, 1e-14));

        let mut r = rng(12);
        for _ in 0..10 {
            let t = random_clifford_matrix(&mut r, 3, 2, 1.0);
            let s = paravector_with_modulus(&mut r, 2, 2.0 * t.norm_paper());
            let left = s_resolvent_left(&t, &s).unwrap();
            let right = s_resolvent_right(&t, &s).unwrap();
            assert!(close(&left, &s_resolvent_left_series(&t, &s, 10_000).unwrap().value, 1e-10));
            assert!(close(&right, &s_resolvent_right_series(&t, &s, 10_000).unwrap().value, 1e-10));
        }

        // Symmetric T, real s: both reduce to (sI − T)^{-1}.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]);
        let t = CliffordMatrix::from_real(1, a.clone());
        let s = Paravector::real(1, 0.3);
        let expected = CliffordMatrix::from_real(1, (DMatrix::identity(2, 2) * 0.3 - &a).try_inverse().unwrap());
        let left = s_resolvent_left(&t, &s).unwrap();
        assert!(close(&left, &expected, 1e-13));
        assert!(close(&s_resolvent_right(&t, &s).unwrap(), &left, 1e-13));
    }

    #[test]
    fn spectrum_examples() {
        let zero = s_spectrum(&CliffordMatrix::zero(2, 2)).unwrap();
        assert_eq!(zero.spheres.len(), 1);
        assert_eq!((zero.spheres[0].u, zero.spheres[0].v), (0.0, 0.0));
        assert_eq!(zero.spheres[0].multiplicity, 8);

        let rot = s_spectrum(&e1_scalar()).unwrap();
        assert_eq!(rot.spheres.len(), 1);
        assert!(rot.spheres[0].u.abs() < 1e-14 && (rot.spheres[0].v - 1.0).abs() < 1e-14);
        assert_eq!(rot.spheres[0].multiplicity, 1);

        for n in 0..=3 {
            let spec = s_spectrum(&diag23(n)).unwrap();
            let pts: Vec<_> = spec.spheres.iter().map(|s| (s.u, s.v, s.multiplicity)).collect();
            assert_eq!(pts.len(), 2, "n = {n}: {pts:?}");
            assert!((pts[0].0 - 2.0).abs() < 1e-12 && pts[0].1 == 0.0 && pts[0].2 == 1 << n);
            assert!((pts[1].0 - 3.0).abs() < 1e-12 && pts[1].1 == 0.0 && pts[1].2 == 1 << n);
            assert!((spec.radius - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_examples() {
        let field = s_spectrum_oracle(&CliffordMatrix::zero(1, 1), OracleGrid::covering(1.0, 0.1)).unwrap();
        let dips = field.dips(f64::INFINITY);
        assert_eq!(dips.len(), 1);
        assert!(dips[0].u.abs() < 1e-12 && dips[0].v.abs() < 1e-12);

        let field = s_spectrum_oracle(&e1_scalar(), OracleGrid::covering(2.0, 0.05)).unwrap();
        let dips = field.dips(f64::INFINITY);
        assert_eq!(dips.len(), 1);
        assert!(dips[0].distance(&Sphere::new(0.0, 1.0)) < 1e-9);

        assert!(s_spectrum_oracle(&e1_scalar(), OracleGrid { v_min: -1.0, ..OracleGrid::covering(1.0, 0.1) }).is_err());
    }

    #[test]
    fn oracle_agrees_with_eigenvalue_spheres() {
        let mut r = rng(13);
        for _ in 0..3 {
            let t = random_clifford_matrix(&mut r, 3, 2, 0.3);
            let spec = s_spectrum(&t).unwrap();
            let step = 0.02;
            let field = s_spectrum_oracle(&t, OracleGrid::covering(t.norm_paper(), step)).unwrap();
            let dips = field.dips(f64::INFINITY);
            let h = hausdorff_distance(&dips, &spec.points());
            assert!(h <= step, "Hausdorff {h} with dips {dips:?} and spectrum {spec:?}");
        }
    }

    #[test]
    fn gelfand_examples() {
        assert_eq!(spectral_radius_gelfand(&CliffordMatrix::zero(2, 1), 8).unwrap(), 0.0);
        for m in [1, 2, 3, 17, 64] {
            assert!((spectral_radius_gelfand(&e1_scalar(), m).unwrap() - 1.0).abs() < 1e-12);
        }
        let g = spectral_radius_gelfand(&diag23(2), 128).unwrap();
        assert!((g - 3.0).abs() < 0.03);
        // Nilpotent: the power vanishes.
        let nil = CliffordMatrix::from_real(1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(spectral_radius_gelfand(&nil, 4).unwrap(), 0.0);
        assert!(spectral_radius_gelfand(&nil, 0).is_err());
        // Large powers of a large operator must not overflow.
        let big = CliffordMatrix::identity(2, 1).scale(1e200);
        let g = spectral_radius_gelfand(&big, 1024).unwrap();
        assert!((g / 1e200 - 1.0).abs() < 1e-10, "{g}");
    }

    #[test]
    fn resolvent_equations() {
        let z = CliffordMatrix::zero(2, 2);
        let s = Paravector::new(0.3, vec![0.4, -1.0]);
        let (l, r) = left_resolvent_equation_residual(&z, &s).unwrap();
        assert!(l <= 1e-13 && r <= 1e-13);

        let q = Paravector::new(-0.2, vec![0.1, 0.5]);
        let (a, b) = s_resolvent_equation_residual(&z, &s, &q).unwrap();
        assert!(a <= 1e-12 && b <= 1e-12, "{a} {b}");

        let mut rg = rng(14);
        for _ in 0..10 {
            let t = random_clifford_matrix(&mut rg, 2, 2, 1.0);
            let norm = t.norm_paper();
            let s = paravector_with_modulus(&mut rg, 2, 2.0 * norm);
            let q = paravector_with_modulus(&mut rg, 2, 2.0 * norm);
            let (l, r) = left_resolvent_equation_residual(&t, &s).unwrap();
            assert!(l <= 1e-10 && r <= 1e-10);
            let (a, b) = s_resolvent_equation_residual(&t, &s, &q).unwrap();
            assert!(a <= 1e-9 && b <= 1e-9, "{a} {b}");
        }

        // Same sphere, different imaginary unit.
        let q_same = Paravector::new(0.3, vec![1.0, 0.4]);
        assert!(matches!(s_resolvent_equation_residual(&z, &s, &q_same), Err(Error::SameSphere { .. })));
    }

    #[test]
    fn resolvent_equation_near_spectrum() {
        let mut rg = rng(15);
        let t = random_clifford_matrix(&mut rg, 2, 2, 1.0);
        let spec = s_spectrum(&t).unwrap();
        let target = spec.spheres.iter().find(|s| s.v > 0.01).copied().unwrap_or(spec.spheres[0]);
        let unit = random_unit(&mut rg, 2);
        let s = unit.embed(num_complex::Complex64::new(target.u + 1e-3, target.v));
        let (l, r) = left_resolvent_equation_residual(&t, &s).unwrap();
        assert!(l <= 1e-6 && r <= 1e-6, "{l} {r}");
    }

    #[test]
    fn cauchy_riemann_decays_quadratically() {
        let mut rg = rng(17);
        let t = random_clifford_matrix(&mut rg, 2, 2, 0.5);
        let res = SResolvent::new(&t).unwrap();
        let (u, v) = (0.3, res.spectrum().radius + 0.5);
        let mut prev = res.cauchy_riemann_residual(u, v, 0.1).unwrap();
        let mut h = 0.05;
        while h > 1e-3 {
            let next = res.cauchy_riemann_residual(u, v, h).unwrap();
            assert!(prev / next > 3.5, "h = {h}: {prev} -> {next}");
            prev = next;
            h /= 2.0;
        }
        assert!(res.cauchy_riemann_residual(u, v, 0.0).is_err());
    }

    #[test]
    fn spectral_guard() {
        let spec_t = e1_scalar();
        let res = SResolvent::new(&spec_t).unwrap();
        let on = Paravector::new(0.0, vec![1.0]);
        assert!(matches!(res.left(&on), Err(Error::SpectralPoint { .. })));
        assert!(matches!(res.right(&on), Err(Error::SpectralPoint { .. })));
        let res = res.with_guard(0.0);
        assert!(matches!(res.left(&on), Err(Error::SpectralPoint { .. })));
        let _ = MultiIndex::EMPTY;
    }

    #[test]
    fn axial_symmetry_of_resolvent_norm_set() {
        // Q_s(T) depends on (u, v) only: two units give the same pseudo-resolvent
        // and the same invertibility verdict.
        let mut rg = rng(16);
        let t = random_clifford_matrix(&mut rg, 2, 3, 0.5);
        let res = SResolvent::new(&t).unwrap();
        let (j1, j2) = (random_unit(&mut rg, 3), random_unit(&mut rg, 3));
        let z = num_complex::Complex64::new(0.4, 0.9);
        let (s1, s2) = (j1.embed(z), j2.embed(z));
        assert_eq!(s1.sphere().u, s2.sphere().u);
        let p1 = res.pseudo_resolvent(s1.sphere().u, s1.sphere().v).unwrap();
        let p2 = res.pseudo_resolvent(s2.sphere().u, s2.sphere().v).unwrap();
        assert!(close(&p1, &p2, 1e-14));
    }
}
