//! Slice functions: intrinsic functions given by a complex shadow, slice
//! polynomials with Clifford coefficients, Cauchy kernels, and the
//! representation formula.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{CliffordElement, ImaginaryUnit, Paravector};
use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::matrix::CliffordMatrix;
use crate::spectrum::{eigenvalues, GUARD_REL};

/// Reality-symmetry tolerance, relative to `max(1, |h(z)|)`.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Number of points sampled for the reality-symmetry check.
pub const SYMMETRY_SAMPLES: usize = 64;
/// Relative clearance a closed disk must keep from poles.
pub const POLE_MARGIN_REL: f64 = 1e-9;
const IMAGE_SAMPLES: usize = 512;

pub type Shadow = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Axially symmetric region of the shadow plane, closed under conjugation.
#[derive(Clone)]
pub enum Domain {
    Entire,
    /// Complement of finitely many poles (and their conjugates).
    AvoidPoles(Vec<Complex64>),
    /// Complement of the boundaries of finitely many open balls (and their
    /// conjugates): the region where a ball indicator is locally constant.
    Balls(Vec<(Complex64, f64)>),
    Intersection(Vec<Domain>),
    /// `{z ∈ inner : map(z) ∈ outer}`.
    Preimage { inner: Box<Domain>, map: Shadow, outer: Box<Domain> },
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Entire => f.write_str("Entire"),
            Domain::AvoidPoles(p) => f.debug_tuple("AvoidPoles").field(p).finish(),
            Domain::Balls(b) => f.debug_tuple("Balls").field(b).finish(),
            Domain::Intersection(d) => f.debug_tuple("Intersection").field(d).finish(),
            Domain::Preimage { inner, outer, .. } => {
                f.debug_struct("Preimage").field("inner", inner).field("outer", outer).finish()
            }
        }
    }
}

fn with_conjugates(points: &[Complex64]) -> impl Iterator<Item = Complex64> + '_ {
    points.iter().flat_map(|p| [*p, p.conj()])
}

fn pole_margin(p: Complex64) -> f64 {
    POLE_MARGIN_REL * (1.0 + p.norm())
}

fn circle_samples(c: Complex64, rho: f64) -> impl Iterator<Item = Complex64> {
    (0..IMAGE_SAMPLES).map(move |k| c + Complex64::from_polar(rho, 2.0 * PI * k as f64 / IMAGE_SAMPLES as f64))
}

/// Winding number of the closed polygon `w` around `p`.
fn winding(w: &[Complex64], p: Complex64) -> i64 {
    let mut total = 0.0;
    for k in 0..w.len() {
        let a = w[k] - p;
        let b = w[(k + 1) % w.len()] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Entire => z.re.is_finite() && z.im.is_finite(),
            Domain::AvoidPoles(poles) => with_conjugates(poles).all(|p| (z - p).norm() > 0.0),
            Domain::Balls(balls) => balls
                .iter()
                .all(|(c, r)| (z - c).norm() != *r && (z - c.conj()).norm() != *r),
            Domain::Intersection(ds) => ds.iter().all(|d| d.contains(z)),
            Domain::Preimage { inner, map, outer } => inner.contains(z) && outer.contains(map(z)),
        }
    }

    /// Whether the closed disk `|z − c| ≤ rho` lies in the domain.
    pub fn admits_disk(&self, c: Complex64, rho: f64) -> bool {
        match self {
            Domain::Entire => true,
            Domain::AvoidPoles(poles) => with_conjugates(poles).all(|p| (p - c).norm() - rho > pole_margin(p)),
            Domain::Balls(balls) => {
                let centers: Vec<(Complex64, f64)> =
                    balls.iter().flat_map(|(b, r)| [(*b, *r), (b.conj(), *r)]).collect();
                let inside_one = centers.iter().any(|(b, r)| (c - b).norm() + rho < *r);
                let outside_all = centers.iter().all(|(b, r)| (c - b).norm() - rho > *r);
                inside_one || outside_all
            }
            Domain::Intersection(ds) => ds.iter().all(|d| d.admits_disk(c, rho)),
            Domain::Preimage { inner, map, outer } => {
                inner.admits_disk(c, rho) && image_admitted(outer, &|z| map(z), c, rho)
            }
        }
    }
}

/// Whether `map` sends the closed disk into `outer`, judged from the image of
/// its boundary: a point of a simply connected target is hit iff the boundary
/// image winds around it.
fn image_admitted(outer: &Domain, map: &dyn Fn(Complex64) -> Complex64, c: Complex64, rho: f64) -> bool {
    let w: Vec<Complex64> = circle_samples(c, rho).map(map).collect();
    if w.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return false;
    }
    match outer {
        Domain::Entire => true,
        Domain::AvoidPoles(poles) => with_conjugates(poles)
            .all(|p| w.iter().all(|z| (z - p).norm() > pole_margin(p)) && winding(&w, p) == 0),
        Domain::Balls(balls) => {
            let centers: Vec<(Complex64, f64)> =
                balls.iter().flat_map(|(b, r)| [(*b, *r), (b.conj(), *r)]).collect();
            let inside_one = centers.iter().any(|(b, r)| w.iter().all(|z| (z - b).norm() < *r));
            let outside_all = centers
                .iter()
                .all(|(b, r)| w.iter().all(|z| (z - b).norm() > *r) && winding(&w, *b) == 0);
            inside_one || outside_all
        }
        Domain::Intersection(ds) => ds.iter().all(|d| image_admitted(d, map, c, rho)),
        Domain::Preimage { inner, map: second, outer: last } => {
            image_admitted(inner, map, c, rho) && image_admitted(last, &|z| second(map(z)), c, rho)
        }
    }
}

/// A function on the shadow plane that defines an intrinsic slice function
/// `f(u + J v) = Re h(u + iv) + J Im h(u + iv)`.
#[derive(Clone)]
pub struct IntrinsicFunction {
    shadow: Shadow,
    domain: Domain,
    label: String,
}

impl fmt::Debug for IntrinsicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntrinsicFunction").field("label", &self.label).field("domain", &self.domain).finish()
    }
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn format_coeffs(coeffs: &[f64]) -> String {
    coeffs.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",")
}

/// Complex roots of `Σ a_k z^k` via the companion matrix.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::InvalidArgument("zero polynomial has no finite root set".into()));
    }
    let k = c.len() - 1;
    if k == 0 {
        return Ok(Vec::new());
    }
    let lead = c[k];
    let mut companion = DMatrix::zeros(k, k);
    for i in 1..k {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..k {
        companion[(i, k - 1)] = -c[i] / lead;
    }
    eigenvalues(&companion)
}

impl IntrinsicFunction {
    /// Builds an intrinsic function after checking `h(z̄) = conj h(z)` on a
    /// deterministic sample of the domain.
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        shadow: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::from_shadow(label.into(), domain, Arc::new(shadow))
    }

    fn from_shadow(label: String, domain: Domain, shadow: Shadow) -> Result<Self> {
        let f = IntrinsicFunction { shadow, domain, label };
        f.check_symmetry()?;
        Ok(f)
    }

    /// `h(z̄) = conj h(z)` on a golden-angle spiral of radius 2.
    pub fn check_symmetry(&self) -> Result<()> {
        let golden = PI * (3.0 - 5.0f64.sqrt());
        for k in 0..SYMMETRY_SAMPLES {
            let r = 2.0 * ((k as f64 + 0.5) / SYMMETRY_SAMPLES as f64).sqrt();
            let z = Complex64::from_polar(r, golden * k as f64);
            if !self.domain.contains(z) || !self.domain.contains(z.conj()) {
                continue;
            }
            let (a, b) = ((self.shadow)(z), (self.shadow)(z.conj()));
            if !(a.re.is_finite() && a.im.is_finite()) {
                continue;
            }
            let deviation = (b - a.conj()).norm();
            if !(deviation <= SYMMETRY_TOL * a.norm().max(1.0)) {
                return Err(Error::SymmetryViolation { re: z.re, im: z.im, deviation });
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn shadow(&self) -> Shadow {
        self.shadow.clone()
    }

    /// `h(z)`, refusing points outside the domain.
    pub fn eval_shadow(&self, z: Complex64) -> Result<Complex64> {
        if !self.domain.contains(z) {
            return Err(Error::DomainViolation(format!("{} at {z}", self.label)));
        }
        Ok((self.shadow)(z))
    }

    /// `f(x) = Re h(z) + J_x Im h(z)` with `z = Re x + i |x̲|`.
    pub fn eval(&self, x: &Paravector) -> Result<CliffordElement> {
        let sphere = x.sphere();
        let h = self.eval_shadow(Complex64::new(sphere.u, sphere.v))?;
        match x.unit() {
            Some(j) => Ok(j.embed_element(h)),
            None => Ok(CliffordElement::scalar(x.n(), h.re)),
        }
    }

    pub fn identity() -> Self {
        Self::poly(&[0.0, 1.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::poly(&[c])
    }

    /// `z^m`.
    pub fn power(m: usize) -> Self {
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0;
        Self::poly(&coeffs)
    }

    /// `Σ a_k z^k` with real coefficients.
    pub fn poly(coeffs: &[f64]) -> Self {
        let c = coeffs.to_vec();
        let label = format!("poly:{}", format_coeffs(coeffs));
        let shadow: Shadow = Arc::new(move |z| horner(&c, z));
        IntrinsicFunction { shadow, domain: Domain::Entire, label }
    }

    pub fn exp() -> Self {
        IntrinsicFunction { shadow: Arc::new(|z: Complex64| z.exp()), domain: Domain::Entire, label: "exp".into() }
    }

    pub fn sin() -> Self {
        IntrinsicFunction { shadow: Arc::new(|z: Complex64| z.sin()), domain: Domain::Entire, label: "sin".into() }
    }

    pub fn cos() -> Self {
        IntrinsicFunction { shadow: Arc::new(|z: Complex64| z.cos()), domain: Domain::Entire, label: "cos".into() }
    }

    /// `num(z) / den(z)` with real coefficients (lowest degree first); the
    /// roots of `den` are excluded from the domain.
    pub fn ratio(num: &[f64], den: &[f64]) -> Result<Self> {
        let poles = polynomial_roots(den)?;
        let (n, d) = (num.to_vec(), den.to_vec());
        let label = format!("ratio:{}/{}", format_coeffs(num), format_coeffs(den));
        let shadow: Shadow = Arc::new(move |z| horner(&n, z) / horner(&d, z));
        Self::from_shadow(label, Domain::AvoidPoles(poles), shadow)
    }

    /// Indicator of a union of open balls `|(u, |v|) − (u0, v0)| < rho`.
    pub fn chi(balls: &[(f64, f64, f64)]) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::InvalidArgument("indicator needs at least one ball".into()));
        }
        for &(u, v, rho) in balls {
            if !(rho > 0.0) || !u.is_finite() || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid ball ({u}, {v}, {rho})")));
            }
        }
        let centers: Vec<(Complex64, f64)> =
            balls.iter().map(|&(u, v, rho)| (Complex64::new(u, v.abs()), rho)).collect();
        let label = format!(
            "chi:{}",
            balls.iter().map(|(u, v, r)| format!("{u},{v},{r}")).collect::<Vec<_>>().join(";")
        );
        let inside = centers.clone();
        let shadow: Shadow = Arc::new(move |z: Complex64| {
            let w = Complex64::new(z.re, z.im.abs());
            let hit = inside.iter().any(|(c, r)| (w - c).norm() < *r);
            Complex64::new(if hit { 1.0 } else { 0.0 }, 0.0)
        });
        Self::from_shadow(label, Domain::Balls(centers), shadow)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (f, g) = (self.shadow.clone(), other.shadow.clone());
        Self::from_shadow(
            format!("({})+({})", self.label, other.label),
            Domain::Intersection(vec![self.domain.clone(), other.domain.clone()]),
            Arc::new(move |z| f(z) + g(z)),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (f, g) = (self.shadow.clone(), other.shadow.clone());
        Self::from_shadow(
            format!("({})*({})", self.label, other.label),
            Domain::Intersection(vec![self.domain.clone(), other.domain.clone()]),
            Arc::new(move |z| f(z) * g(z)),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        let f = self.shadow.clone();
        IntrinsicFunction {
            shadow: Arc::new(move |z| f(z) * k),
            domain: self.domain.clone(),
            label: format!("{k}*({})", self.label),
        }
    }

    /// `1 / f`, defined where `f` has no zeros.
    pub fn reciprocal(&self) -> Result<Self> {
        let f = self.shadow.clone();
        Self::from_shadow(
            format!("1/({})", self.label),
            Domain::Preimage {
                inner: Box::new(self.domain.clone()),
                map: self.shadow.clone(),
                outer: Box::new(Domain::AvoidPoles(vec![Complex64::new(0.0, 0.0)])),
            },
            Arc::new(move |z| f(z).inv()),
        )
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let (g, f) = (outer.shadow.clone(), inner.shadow.clone());
        Self::from_shadow(
            format!("({})∘({})", outer.label, inner.label),
            Domain::Preimage {
                inner: Box::new(inner.domain.clone()),
                map: inner.shadow.clone(),
                outer: Box::new(outer.domain.clone()),
            },
            Arc::new(move |z| g(f(z))),
        )
    }
}

/// `intrinsic_eval(f, x)`.
pub fn intrinsic_eval(f: &IntrinsicFunction, x: &Paravector) -> Result<CliffordElement> {
    f.eval(x)
}

/// A function that can be evaluated on a slice `C_J` and placed under a
/// contour integral.
pub trait SliceFunction {
    fn label(&self) -> String;

    fn domain(&self) -> Domain;

    /// `f(u + J v)` for `z = u + i v`.
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement>;

    fn eval(&self, x: &Paravector) -> Result<CliffordElement> {
        let sphere = x.sphere();
        let z = Complex64::new(sphere.u, sphere.v);
        match x.unit() {
            Some(j) => self.eval_on_slice(z, &j),
            None if x.n() > 0 => self.eval_on_slice(z, &ImaginaryUnit::generator(x.n(), 1)?),
            None => Err(Error::InvalidArgument("R_{0,0} has no imaginary unit".into())),
        }
    }

    fn admits_disk(&self, center: Complex64, radius: f64) -> bool {
        self.domain().admits_disk(center, radius)
    }
}

/// `f(u + J v) = α(u, v) + J β(u, v)`: admissible in the left calculus.
pub trait LeftSliceFunction: SliceFunction {}

/// `f(u + J v) = α(u, v) + β(u, v) J`: admissible in the right calculus.
pub trait RightSliceFunction: SliceFunction {}

impl<F: SliceFunction + ?Sized> SliceFunction for &F {
    fn label(&self) -> String {
        (**self).label()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        (**self).eval_on_slice(z, unit)
    }
    fn eval(&self, x: &Paravector) -> Result<CliffordElement> {
        (**self).eval(x)
    }
    fn admits_disk(&self, center: Complex64, radius: f64) -> bool {
        (**self).admits_disk(center, radius)
    }
}
impl<F: LeftSliceFunction + ?Sized> LeftSliceFunction for &F {}
impl<F: RightSliceFunction + ?Sized> RightSliceFunction for &F {}

impl SliceFunction for IntrinsicFunction {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn domain(&self) -> Domain {
        self.domain.clone()
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        Ok(unit.embed_element(self.eval_shadow(z)?))
    }
    fn eval(&self, x: &Paravector) -> Result<CliffordElement> {
        IntrinsicFunction::eval(self, x)
    }
}
impl LeftSliceFunction for IntrinsicFunction {}
impl RightSliceFunction for IntrinsicFunction {}

fn check_coefficients(n: usize, coefficients: &[CliffordElement]) -> Result<()> {
    for (m, a) in coefficients.iter().enumerate() {
        if a.n() != n {
            return Err(Error::DimensionMismatch(format!("coefficient {m} has n = {}, expected {n}", a.n())));
        }
    }
    Ok(())
}

/// `P(x) = Σ x^m a_m` with Clifford coefficients on the right.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftSlicePolynomial {
    n: usize,
    coefficients: Vec<CliffordElement>,
}

impl LeftSlicePolynomial {
    pub fn new(n: usize, coefficients: Vec<CliffordElement>) -> Result<Self> {
        check_coefficients(n, &coefficients)?;
        Ok(LeftSlicePolynomial { n, coefficients })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[CliffordElement] {
        &self.coefficients
    }

    pub fn eval_paravector(&self, x: &Paravector) -> Result<CliffordElement> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch(format!("paravector n = {} vs polynomial n = {}", x.n(), self.n)));
        }
        let x = x.to_element();
        let mut power = CliffordElement::one(self.n);
        let mut sum = CliffordElement::zero(self.n);
        for (m, a) in self.coefficients.iter().enumerate() {
            if m > 0 {
                power = &power * &x;
            }
            sum = &sum + &(&power * a);
        }
        Ok(sum)
    }

    /// `Σ T^m a_m`.
    pub fn eval_matrix(&self, t: &CliffordMatrix) -> Result<CliffordMatrix> {
        if t.n() != self.n {
            return Err(Error::DimensionMismatch(format!("operator n = {} vs polynomial n = {}", t.n(), self.n)));
        }
        let mut power = CliffordMatrix::identity(t.d(), t.n());
        let mut sum = CliffordMatrix::zero(t.d(), t.n());
        for (m, a) in self.coefficients.iter().enumerate() {
            if m > 0 {
                power = t.try_mul(&power)?;
            }
            sum = sum.try_add(&power.mul_element_right(a)?)?;
        }
        Ok(sum)
    }
}

impl SliceFunction for LeftSlicePolynomial {
    fn label(&self) -> String {
        format!("left polynomial of degree {}", self.coefficients.len().saturating_sub(1))
    }
    fn domain(&self) -> Domain {
        Domain::Entire
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        self.eval_paravector(&unit.embed(z))
    }
    fn eval(&self, x: &Paravector) -> Result<CliffordElement> {
        self.eval_paravector(x)
    }
}
impl LeftSliceFunction for LeftSlicePolynomial {}

/// `P(x) = Σ a_m x^m` with Clifford coefficients on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct RightSlicePolynomial {
    n: usize,
    coefficients: Vec<CliffordElement>,
}

impl RightSlicePolynomial {
    pub fn new(n: usize, coefficients: Vec<CliffordElement>) -> Result<Self> {
        check_coefficients(n, &coefficients)?;
        Ok(RightSlicePolynomial { n, coefficients })
    }

    pub fn coefficients(&self) -> &[CliffordElement] {
        &self.coefficients
    }

    pub fn eval_paravector(&self, x: &Paravector) -> Result<CliffordElement> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch(format!("paravector n = {} vs polynomial n = {}", x.n(), self.n)));
        }
        let x = x.to_element();
        let mut power = CliffordElement::one(self.n);
        let mut sum = CliffordElement::zero(self.n);
        for (m, a) in self.coefficients.iter().enumerate() {
            if m > 0 {
                power = &power * &x;
            }
            sum = &sum + &(a * &power);
        }
        Ok(sum)
    }

    /// `Σ a_m T^m`.
    pub fn eval_matrix(&self, t: &CliffordMatrix) -> Result<CliffordMatrix> {
        if t.n() != self.n {
            return Err(Error::DimensionMismatch(format!("operator n = {} vs polynomial n = {}", t.n(), self.n)));
        }
        let mut power = CliffordMatrix::identity(t.d(), t.n());
        let mut sum = CliffordMatrix::zero(t.d(), t.n());
        for (m, a) in self.coefficients.iter().enumerate() {
            if m > 0 {
                power = t.try_mul(&power)?;
            }
            sum = sum.try_add(&power.mul_element_left(a)?)?;
        }
        Ok(sum)
    }
}

impl SliceFunction for RightSlicePolynomial {
    fn label(&self) -> String {
        format!("right polynomial of degree {}", self.coefficients.len().saturating_sub(1))
    }
    fn domain(&self) -> Domain {
        Domain::Entire
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        self.eval_paravector(&unit.embed(z))
    }
    fn eval(&self, x: &Paravector) -> Result<CliffordElement> {
        self.eval_paravector(x)
    }
}
impl RightSliceFunction for RightSlicePolynomial {}

/// `left_poly_eval(P, x)` on a paravector.
pub fn left_poly_eval(p: &LeftSlicePolynomial, x: &Paravector) -> Result<CliffordElement> {
    p.eval_paravector(x)
}

/// `left_poly_eval(P, T)` on an operator.
pub fn left_poly_eval_matrix(p: &LeftSlicePolynomial, t: &CliffordMatrix) -> Result<CliffordMatrix> {
    p.eval_matrix(t)
}

/// `f + g`.
#[derive(Clone, Debug)]
pub struct Sum<F, G>(pub F, pub G);

impl<F: SliceFunction, G: SliceFunction> SliceFunction for Sum<F, G> {
    fn label(&self) -> String {
        format!("({})+({})", self.0.label(), self.1.label())
    }
    fn domain(&self) -> Domain {
        Domain::Intersection(vec![self.0.domain(), self.1.domain()])
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        Ok(&self.0.eval_on_slice(z, unit)? + &self.1.eval_on_slice(z, unit)?)
    }
}
impl<F: LeftSliceFunction, G: LeftSliceFunction> LeftSliceFunction for Sum<F, G> {}
impl<F: RightSliceFunction, G: RightSliceFunction> RightSliceFunction for Sum<F, G> {}

/// `x ↦ f(x) a`.
#[derive(Clone, Debug)]
pub struct RightScaled<F>(pub F, pub CliffordElement);

impl<F: SliceFunction> SliceFunction for RightScaled<F> {
    fn label(&self) -> String {
        format!("({})·a", self.0.label())
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        Ok(&self.0.eval_on_slice(z, unit)? * &self.1)
    }
}
impl<F: LeftSliceFunction> LeftSliceFunction for RightScaled<F> {}

/// `x ↦ a f(x)`.
#[derive(Clone, Debug)]
pub struct LeftScaled<F>(pub CliffordElement, pub F);

impl<F: SliceFunction> SliceFunction for LeftScaled<F> {
    fn label(&self) -> String {
        format!("a·({})", self.1.label())
    }
    fn domain(&self) -> Domain {
        self.1.domain()
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        Ok(&self.0 * &self.1.eval_on_slice(z, unit)?)
    }
}
impl<F: RightSliceFunction> RightSliceFunction for LeftScaled<F> {}

/// `x ↦ f(x) g(x)` with `f` intrinsic: left slice whenever `g` is.
#[derive(Clone, Debug)]
pub struct IntrinsicTimes<G> {
    pub f: IntrinsicFunction,
    pub g: G,
}

impl<G: SliceFunction> SliceFunction for IntrinsicTimes<G> {
    fn label(&self) -> String {
        format!("({})*({})", self.f.label, self.g.label())
    }
    fn domain(&self) -> Domain {
        Domain::Intersection(vec![self.f.domain.clone(), self.g.domain()])
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        Ok(&self.f.eval_on_slice(z, unit)? * &self.g.eval_on_slice(z, unit)?)
    }
}
impl<G: LeftSliceFunction> LeftSliceFunction for IntrinsicTimes<G> {}

/// `x ↦ g(f(x))` with `f` intrinsic; `f` maps each slice into itself.
#[derive(Clone, Debug)]
pub struct Composed<G> {
    pub inner: IntrinsicFunction,
    pub outer: G,
}

impl<G: SliceFunction> SliceFunction for Composed<G> {
    fn label(&self) -> String {
        format!("({})∘({})", self.outer.label(), self.inner.label)
    }
    fn domain(&self) -> Domain {
        Domain::Preimage {
            inner: Box::new(self.inner.domain.clone()),
            map: self.inner.shadow.clone(),
            outer: Box::new(self.outer.domain()),
        }
    }
    fn eval_on_slice(&self, z: Complex64, unit: &ImaginaryUnit) -> Result<CliffordElement> {
        self.outer.eval_on_slice(self.inner.eval_shadow(z)?, unit)
    }
}
impl<G: LeftSliceFunction> LeftSliceFunction for Composed<G> {}
impl<G: RightSliceFunction> RightSliceFunction for Composed<G> {}

fn check_off_sphere(s: &Paravector, x: &Paravector) -> Result<()> {
    if s.n() != x.n() {
        return Err(Error::DimensionMismatch(format!("s has n = {}, x has n = {}", s.n(), x.n())));
    }
    let (a, b) = (s.sphere(), x.sphere());
    if a.distance(&b) <= GUARD_REL * (1.0 + s.modulus().max(x.modulus())) {
        return Err(Error::SameSphere { u: a.u, v: a.v });
    }
    Ok(())
}

/// `x² − 2 Re(s) x + |s|²`, formed in Clifford arithmetic and inverted as a paravector.
fn quadratic_inverse(x: &Paravector, s: &Paravector) -> Result<CliffordElement> {
    let xe = x.to_element();
    let q = &(&(&xe * &xe) - &xe.scale(2.0 * s.re())) + &CliffordElement::scalar(x.n(), s.modulus_sqr());
    q.to_paravector(1e-8)?.inverse()
}

/// Forms I and II of the left Cauchy kernel `S_L^{-1}(s, x)`:
/// `−(x² − 2Re(s)x + |s|²)^{-1}(x − s̄)` and `(s − x̄)(s² − 2Re(x)s + |x|²)^{-1}`.
pub fn cauchy_kernel_left_forms(s: &Paravector, x: &Paravector) -> Result<(CliffordElement, CliffordElement)> {
    check_off_sphere(s, x)?;
    let (se, xe) = (s.to_element(), x.to_element());
    let (s_bar, x_bar) = (s.conj().to_element(), x.conj().to_element());
    let one = -&(&quadratic_inverse(x, s)? * &(&xe - &s_bar));
    let two = &(&se - &x_bar) * &quadratic_inverse(s, x)?;
    Ok((one, two))
}

/// Forms I and II of the right Cauchy kernel `S_R^{-1}(s, x)`:
/// `−(x − s̄)(x² − 2Re(s)x + |s|²)^{-1}` and `(s² − 2Re(x)s + |x|²)^{-1}(s − x̄)`.
pub fn cauchy_kernel_right_forms(s: &Paravector, x: &Paravector) -> Result<(CliffordElement, CliffordElement)> {
    check_off_sphere(s, x)?;
    let (se, xe) = (s.to_element(), x.to_element());
    let (s_bar, x_bar) = (s.conj().to_element(), x.conj().to_element());
    let one = -&(&(&xe - &s_bar) * &quadratic_inverse(x, s)?);
    let two = &quadratic_inverse(s, x)? * &(&se - &x_bar);
    Ok((one, two))
}

/// `S_L^{-1}(s, x)`, form I.
pub fn cauchy_kernel_left(s: &Paravector, x: &Paravector) -> Result<CliffordElement> {
    Ok(cauchy_kernel_left_forms(s, x)?.0)
}

/// `S_R^{-1}(s, x)`, form I.
pub fn cauchy_kernel_right(s: &Paravector, x: &Paravector) -> Result<CliffordElement> {
    Ok(cauchy_kernel_right_forms(s, x)?.0)
}

/// Value of a left slice function at `u + K v` from its values
/// `f(u ± J v)` on another slice: `½[1 − K J] f(u + Jv) + ½[1 + K J] f(u − Jv)`.
pub fn representation_formula(
    f_plus: &CliffordElement,
    f_minus: &CliffordElement,
    j: &ImaginaryUnit,
    target: &ImaginaryUnit,
) -> CliffordElement {
    let n = f_plus.n();
    let kj = &target.to_element() * &j.to_element();
    let one = CliffordElement::one(n);
    let a = (&one - &kj).scale(0.5);
    let b = (&one + &kj).scale(0.5);
    &(&a * f_plus) + &(&b * f_minus)
}

/// Right slice counterpart: `½ f(u + Jv)[1 − J K] + ½ f(u − Jv)[1 + J K]`.
pub fn representation_formula_right(
    f_plus: &CliffordElement,
    f_minus: &CliffordElement,
    j: &ImaginaryUnit,
    target: &ImaginaryUnit,
) -> CliffordElement {
    let n = f_plus.n();
    let jk = &j.to_element() * &target.to_element();
    let one = CliffordElement::one(n);
    let a = (&one - &jk).scale(0.5);
    let b = (&one + &jk).scale(0.5);
    &(f_plus * &a) + &(f_minus * &b)
}

/// Checks the contour against `[x]` and the function's domain.
fn check_scalar_contour<F: SliceFunction + ?Sized>(f: &F, x: &Paravector, contour: &Contour) -> Result<()> {
    if !contour.is_conjugation_symmetric(1e-12) {
        return Err(Error::InvalidArgument("contour is not conjugation symmetric".into()));
    }
    let sphere = x.sphere();
    for z in [Complex64::new(sphere.u, sphere.v), Complex64::new(sphere.u, -sphere.v)] {
        if contour.winding_number(z) != 1 || contour.distance(z) <= GUARD_REL * (1.0 + z.norm()) {
            return Err(Error::InvalidArgument(format!("contour does not enclose the sphere of x ({z})")));
        }
    }
    for c in &contour.circles {
        if !f.admits_disk(c.center, c.radius) {
            return Err(Error::DomainViolation(format!(
                "{} on the disk |z − {}| ≤ {}",
                f.label(),
                c.center,
                c.radius
            )));
        }
    }
    Ok(())
}

/// Trapezoid approximation of `(1/2π) ∫ S_L^{-1}(s, x) ds_J f(s)` over the
/// contour on the slice `C_J`.
pub fn scalar_cauchy_integral<F: LeftSliceFunction + ?Sized>(
    f: &F,
    x: &Paravector,
    unit: &ImaginaryUnit,
    contour: &Contour,
    nodes: usize,
) -> Result<CliffordElement> {
    check_scalar_contour(f, x, contour)?;
    if unit.n() != x.n() {
        return Err(Error::DimensionMismatch(format!("unit n = {} vs x n = {}", unit.n(), x.n())));
    }
    let mut sum = CliffordElement::zero(x.n());
    for node in contour.nodes(nodes) {
        let s = node.point(unit);
        let k = cauchy_kernel_left(&s, x)?;
        let value = f.eval_on_slice(node.z, unit)?;
        sum = &sum + &(&(&k * &node.weight_element(unit)) * &value);
    }
    Ok(sum.scale(1.0 / nodes as f64))
}

/// Largest deviation between the scalar Cauchy integral over each unit and
/// the direct value `f(x)`.
pub fn scalar_cauchy_check<F: LeftSliceFunction + ?Sized>(
    f: &F,
    x: &Paravector,
    units: &[ImaginaryUnit],
    contour: &Contour,
    nodes: usize,
) -> Result<f64> {
    if units.is_empty() {
        return Err(Error::InvalidArgument("at least one imaginary unit is required".into()));
    }
    let direct = f.eval(x)?;
    let mut worst: f64 = 0.0;
    for unit in units {
        let q = scalar_cauchy_integral(f, x, unit, contour, nodes)?;
        worst = worst.max((&q - &direct).norm());
    }
    Ok(worst)
}

impl fmt::Display for IntrinsicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
