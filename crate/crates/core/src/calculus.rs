//! The S-functional calculus: contours around (parts of) the S-spectrum,
//! trapezoid quadrature of the left and right S-resolvent integrals, Riesz
//! projectors, and runnable checks of the calculus identities.
//!
//! On a circle node `z = c + ρe^{iθ}` of the slice `C_J`, the left integrand
//! `S_L^{-1}(s, T) ds_J f(s)` with `ds_J = ds (−J)` becomes
//! `S_L^{-1}(s, T) · o(s − c) · f(s) dθ`, so the trapezoid rule is the plain
//! node average of `S_L^{-1}(s_k, T) w_k f(s_k)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{CliffordElement, ImaginaryUnit, Sphere};
use crate::contour::{Circle, Contour, Node};
use crate::error::{Error, Result};
use crate::linalg::op_norm2;
use crate::matrix::{CliffordMatrix, RealRep};
use crate::slice::{
    Composed, IntrinsicFunction, IntrinsicTimes, LeftSliceFunction, RightScaled, RightSliceFunction, SliceFunction,
    Sum,
};
use crate::spectrum::{hausdorff_distance, s_spectrum, scalar_rep, SResolvent, SSpectrum, GUARD_REL};

pub const DEFAULT_NODES: usize = 256;
pub const MAX_NODES: usize = 8192;
pub const DEFAULT_PADDING: f64 = 0.25;
/// Default Richardson target, relative to `max(1, ‖f(T)‖_2)`.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-12;
/// How many times a per-sphere contour may halve its padding to fit a domain.
const PADDING_HALVINGS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeRule {
    Fixed(usize),
    /// Start at `start` nodes per circle and double until the Richardson
    /// estimate is below `tol · max(1, ‖value‖)` or `max` is reached.
    Adaptive { start: usize, max: usize, tol: f64 },
}

impl Default for NodeRule {
    fn default() -> Self {
        NodeRule::Adaptive { start: DEFAULT_NODES, max: MAX_NODES, tol: DEFAULT_QUADRATURE_TOL }
    }
}

/// Contour placement and quadrature settings shared by every calculus entry point.
#[derive(Clone, Debug, PartialEq)]
pub struct CalcOptions {
    /// Slice used for the integral; `e_1` when absent.
    pub unit: Option<ImaginaryUnit>,
    pub padding: f64,
    pub nodes: NodeRule,
}

impl Default for CalcOptions {
    fn default() -> Self {
        CalcOptions { unit: None, padding: DEFAULT_PADDING, nodes: NodeRule::default() }
    }
}

impl CalcOptions {
    pub fn with_unit(mut self, unit: ImaginaryUnit) -> Self {
        self.unit = Some(unit);
        self
    }

    pub fn with_padding(mut self, padding: f64) -> Self {
        self.padding = padding;
        self
    }

    pub fn with_nodes(mut self, nodes: NodeRule) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn unit_for(&self, n: usize) -> Result<ImaginaryUnit> {
        match &self.unit {
            Some(u) if u.n() == n => Ok(u.clone()),
            Some(u) => Err(Error::DimensionMismatch(format!("unit has n = {}, operator has n = {n}", u.n()))),
            None if n == 0 => Err(Error::InvalidArgument("the calculus needs n >= 1".into())),
            None => ImaginaryUnit::generator(n, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalcResult {
    pub value: CliffordMatrix,
    /// Nodes per circle of the final rule.
    pub nodes: usize,
    /// `‖value_N − value_{N/2}‖_2`.
    pub richardson_error: f64,
    pub unit: ImaginaryUnit,
}

#[derive(Clone, Copy, Debug)]
struct Disk {
    c: Complex64,
    r: f64,
}

impl Disk {
    fn enclose(a: Disk, b: Disk) -> Disk {
        let d = (b.c - a.c).norm();
        if d + b.r <= a.r {
            return a;
        }
        if d + a.r <= b.r {
            return b;
        }
        let r = 0.5 * (d + a.r + b.r);
        Disk { c: a.c + (b.c - a.c) * ((r - a.r) / d), r }
    }

    /// Real-centred disk covering this disk and its conjugate.
    fn realify(self) -> Disk {
        Disk { c: Complex64::new(self.c.re, 0.0), r: self.r + self.c.im.abs() }
    }

    fn meets(&self, other: &Disk) -> bool {
        (self.c - other.c).norm() <= self.r + other.r
    }
}

fn sphere_points(s: &Sphere) -> [Complex64; 2] {
    [Complex64::new(s.u, s.v), Complex64::new(s.u, -s.v)]
}

/// Circles around the selected spheres (all of them when `subset` is `None`)
/// that keep every sphere of `exclusions` outside.
///
/// A sphere `(u, v)` with `v > padding` gets the conjugate pair of circles of
/// radius `padding` around `u ± iv`; otherwise one real-centred circle of
/// radius `padding + v`. Overlapping circles are replaced by their enclosing
/// circle, conjugate-symmetrically.
pub fn contour_enclosing(
    spec: &SSpectrum,
    subset: Option<&[usize]>,
    padding: f64,
    exclusions: &SSpectrum,
) -> Result<Contour> {
    if !(padding > 0.0 && padding.is_finite()) {
        return Err(Error::InvalidArgument(format!("padding {padding} must be positive")));
    }
    let selected = match subset {
        Some(idx) => spec.subset(idx)?,
        None => spec.clone(),
    };
    for s in &selected.spheres {
        for e in &exclusions.spheres {
            let gap = s.sphere().distance(&e.sphere());
            if gap <= 2.0 * padding {
                return Err(Error::Separation(format!(
                    "sphere ({}, {}) is {gap:e} from excluded sphere ({}, {}), need more than 2·padding = {}",
                    s.u,
                    s.v,
                    e.u,
                    e.v,
                    2.0 * padding
                )));
            }
        }
    }

    // Upper-half-plane representatives; a disk with c.im > 0 stands for itself and its conjugate.
    let mut disks: Vec<Disk> = selected
        .spheres
        .iter()
        .map(|s| {
            if s.v > padding {
                Disk { c: Complex64::new(s.u, s.v), r: padding }
            } else {
                Disk { c: Complex64::new(s.u, 0.0), r: padding + s.v }
            }
        })
        .collect();
    loop {
        let mut changed = false;
        for d in disks.iter_mut() {
            if d.c.im > 0.0 && d.c.im <= d.r {
                *d = d.realify();
                changed = true;
            }
        }
        'pairs: for i in 0..disks.len() {
            for j in i + 1..disks.len() {
                let (a, b) = (disks[i], disks[j]);
                let b_conj = Disk { c: b.c.conj(), r: b.r };
                let merged = if a.meets(&b) {
                    Some(Disk::enclose(a, b))
                } else if a.meets(&b_conj) {
                    Some(Disk::enclose(a, b_conj).realify())
                } else {
                    None
                };
                if let Some(m) = merged {
                    disks[i] = Disk { c: Complex64::new(m.c.re, m.c.im.abs()), r: m.r };
                    disks.swap_remove(j);
                    changed = true;
                    break 'pairs;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut circles = Vec::new();
    for d in &disks {
        let c = Circle::new(d.c, d.r);
        circles.push(c);
        if d.c.im > 0.0 {
            circles.push(c.conj());
        }
    }
    let contour = Contour::new(circles);

    let guard = GUARD_REL * (1.0 + spec.radius.max(exclusions.radius));
    for e in &exclusions.spheres {
        for z in sphere_points(&e.sphere()) {
            if contour.circles.iter().any(|c| c.signed_distance(z) <= guard) {
                return Err(Error::Separation(format!(
                    "merged contour reaches excluded sphere ({}, {}); reduce the padding",
                    e.u, e.v
                )));
            }
        }
    }
    Ok(contour)
}

/// Contour around the selected spheres that keeps the rest of the spectrum outside.
pub fn contour_for_subset(spec: &SSpectrum, subset: &[usize], padding: f64) -> Result<Contour> {
    contour_enclosing(spec, Some(subset), padding, &spec.complement(subset))
}

/// Whole-spectrum contour for `f`: one origin-centred circle of radius
/// `1.05·radius + padding` when `f` is holomorphic on its disk, else circles
/// around each sphere, halving the padding until `f` admits them.
pub fn default_contour<F: SliceFunction + ?Sized>(f: &F, spec: &SSpectrum, padding: f64) -> Result<Contour> {
    let big = 1.05 * spec.radius + padding;
    if f.admits_disk(Complex64::new(0.0, 0.0), big) {
        return Ok(Contour::new(vec![Circle::new(Complex64::new(0.0, 0.0), big)]));
    }
    let mut p = padding;
    for _ in 0..=PADDING_HALVINGS {
        let contour = contour_enclosing(spec, None, p, &SSpectrum::from_spheres(Vec::new()))?;
        if contour.circles.iter().all(|c| f.admits_disk(c.center, c.radius)) {
            return Ok(contour);
        }
        p *= 0.5;
    }
    Err(Error::DomainViolation(format!("{} is not holomorphic on any neighbourhood of the S-spectrum tried", f.label())))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Left,
    Right,
}

fn validate_contour<F: SliceFunction + ?Sized>(f: &F, res: &SResolvent, contour: &Contour) -> Result<()> {
    if !contour.is_conjugation_symmetric(1e-12) {
        return Err(Error::InvalidArgument("contour is not conjugation symmetric".into()));
    }
    if contour.has_overlaps() {
        return Err(Error::InvalidArgument("contour circles intersect".into()));
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
    for s in &res.spectrum().spheres {
        for z in sphere_points(&s.sphere()) {
            if contour.distance(z) <= res.guard() {
                return Err(Error::SpectralPoint { u: s.u, v: s.v });
            }
        }
    }
    Ok(())
}

fn quadrature<F: SliceFunction + ?Sized>(
    f: &F,
    res: &SResolvent,
    unit: &ImaginaryUnit,
    contour: &Contour,
    rule: NodeRule,
    side: Side,
) -> Result<CalcResult> {
    let t = res.operator();
    if unit.n() != t.n() {
        return Err(Error::DimensionMismatch(format!("unit has n = {}, operator has n = {}", unit.n(), t.n())));
    }
    validate_contour(f, res, contour)?;
    let d = t.d();
    let dim = (1usize << t.n()) * d;
    let term = |node: &Node| -> Result<DMatrix<f64>> {
        let s = node.point(unit);
        let w = node.weight_element(unit);
        let value = f.eval_on_slice(node.z, unit)?;
        Ok(match side {
            Side::Left => res.left_rep(&s)? * scalar_rep(&(&w * &value), d),
            Side::Right => scalar_rep(&(&value * &w), d) * res.right_rep(&s)?,
        })
    };
    let partial = |n: usize, start: usize, step: usize| -> Result<DMatrix<f64>> {
        let mut sum = DMatrix::zeros(dim, dim);
        for node in contour.nodes_strided(n, start, step) {
            sum += term(&node)?;
        }
        Ok(sum)
    };
    let wrap = |m: DMatrix<f64>| RealRep { n: t.n(), d, matrix: m }.to_clifford();

    let (first, max, tol) = match rule {
        NodeRule::Fixed(n) => (n, n, None),
        NodeRule::Adaptive { start, max, tol } => (start, max.max(start), Some(tol)),
    };
    if first < 2 || first % 2 != 0 {
        return Err(Error::InvalidArgument(format!("node count {first} must be even and at least 2")));
    }
    let even = partial(first, 0, 2)?;
    let mut n = first;
    let mut sum = &even + partial(first, 1, 2)?;
    let mut error = op_norm2(&(&sum / n as f64 - &even / (n / 2) as f64));
    if let Some(tol) = tol {
        while n * 2 <= max {
            let target = tol * op_norm2(&(&sum / n as f64)).max(1.0);
            if error <= target {
                break;
            }
            let finer = &sum + partial(2 * n, 1, 2)?;
            error = op_norm2(&(&finer / (2 * n) as f64 - &sum / n as f64));
            sum = finer;
            n *= 2;
        }
    }
    Ok(CalcResult { value: wrap(sum / n as f64), nodes: n, richardson_error: error, unit: unit.clone() })
}

/// `f(T) = (1/2π) ∫ S_L^{-1}(s, T) ds_J f(s)` over the given contour.
pub fn functional_calculus_left<F: LeftSliceFunction + ?Sized>(
    f: &F,
    res: &SResolvent,
    unit: &ImaginaryUnit,
    contour: &Contour,
    rule: NodeRule,
) -> Result<CalcResult> {
    quadrature(f, res, unit, contour, rule, Side::Left)
}

/// `f(T) = (1/2π) ∫ f(s) ds_J S_R^{-1}(s, T)` over the given contour.
pub fn functional_calculus_right<F: RightSliceFunction + ?Sized>(
    f: &F,
    res: &SResolvent,
    unit: &ImaginaryUnit,
    contour: &Contour,
    rule: NodeRule,
) -> Result<CalcResult> {
    quadrature(f, res, unit, contour, rule, Side::Right)
}

/// Left calculus over the default whole-spectrum contour.
pub fn apply_left<F: LeftSliceFunction + ?Sized>(f: &F, res: &SResolvent, opts: &CalcOptions) -> Result<CalcResult> {
    let unit = opts.unit_for(res.operator().n())?;
    let contour = default_contour(f, res.spectrum(), opts.padding)?;
    functional_calculus_left(f, res, &unit, &contour, opts.nodes)
}

/// Right calculus over the default whole-spectrum contour.
pub fn apply_right<F: RightSliceFunction + ?Sized>(f: &F, res: &SResolvent, opts: &CalcOptions) -> Result<CalcResult> {
    let unit = opts.unit_for(res.operator().n())?;
    let contour = default_contour(f, res.spectrum(), opts.padding)?;
    functional_calculus_right(f, res, &unit, &contour, opts.nodes)
}

/// Riesz projector `χ(T)` onto the selected spheres: the left integral of the
/// S-resolvent alone over a contour that separates them from the rest.
pub fn riesz_projector(res: &SResolvent, subset: &[usize], opts: &CalcOptions) -> Result<CalcResult> {
    let unit = opts.unit_for(res.operator().n())?;
    let contour = contour_for_subset(res.spectrum(), subset, opts.padding)?;
    functional_calculus_left(&IntrinsicFunction::constant(1.0), res, &unit, &contour, opts.nodes)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deviation {
    /// Largest pairwise `‖·‖_2` distance between the compared values.
    pub deviation: f64,
    /// Sum of the Richardson estimates of the compared quadratures.
    pub richardson: f64,
}

/// Largest pairwise deviation of `f(T)` over every (unit, padding) pair.
pub fn independence_check<F: LeftSliceFunction + ?Sized>(
    f: &F,
    res: &SResolvent,
    units: &[ImaginaryUnit],
    paddings: &[f64],
    rule: NodeRule,
) -> Result<Deviation> {
    let mut values = Vec::new();
    let mut richardson: f64 = 0.0;
    for unit in units {
        for &p in paddings {
            let opts = CalcOptions { unit: Some(unit.clone()), padding: p, nodes: rule };
            let r = apply_left(f, res, &opts)?;
            richardson = richardson.max(r.richardson_error);
            values.push(r.value);
        }
    }
    let mut deviation: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            deviation = deviation.max((&values[i] - &values[j]).norm_op2());
        }
    }
    Ok(Deviation { deviation, richardson: 2.0 * richardson })
}

/// `‖f(T)_left − f(T)_right‖` for an intrinsic `f` on a shared contour.
pub fn two_sided_check(f: &IntrinsicFunction, res: &SResolvent, opts: &CalcOptions) -> Result<Deviation> {
    let unit = opts.unit_for(res.operator().n())?;
    let contour = default_contour(f, res.spectrum(), opts.padding)?;
    let l = functional_calculus_left(f, res, &unit, &contour, opts.nodes)?;
    let r = functional_calculus_right(f, res, &unit, &contour, opts.nodes)?;
    Ok(Deviation {
        deviation: (&l.value - &r.value).norm_op2(),
        richardson: l.richardson_error + r.richardson_error,
    })
}

/// `‖(fg)(T) − f(T) g(T)‖` with `f` intrinsic and `g` left slice.
pub fn product_rule_check<G: LeftSliceFunction + Clone>(
    f: &IntrinsicFunction,
    g: &G,
    res: &SResolvent,
    opts: &CalcOptions,
) -> Result<f64> {
    let unit = opts.unit_for(res.operator().n())?;
    let fg = IntrinsicTimes { f: f.clone(), g: g.clone() };
    let contour = default_contour(&fg, res.spectrum(), opts.padding)?;
    let prod = functional_calculus_left(&fg, res, &unit, &contour, opts.nodes)?.value;
    let fv = functional_calculus_left(f, res, &unit, &contour, opts.nodes)?.value;
    let gv = functional_calculus_left(g, res, &unit, &contour, opts.nodes)?.value;
    Ok((&prod - &(&fv * &gv)).norm_op2())
}

/// `‖f(T) (1/f)(T) − I‖`.
pub fn inverse_rule_check(f: &IntrinsicFunction, res: &SResolvent, opts: &CalcOptions) -> Result<f64> {
    let unit = opts.unit_for(res.operator().n())?;
    let g = f.reciprocal()?;
    let contour = default_contour(&g, res.spectrum(), opts.padding)?;
    let fv = functional_calculus_left(f, res, &unit, &contour, opts.nodes)?.value;
    let gv = functional_calculus_left(&g, res, &unit, &contour, opts.nodes)?.value;
    let t = res.operator();
    Ok((&(&fv * &gv) - &CliffordMatrix::identity(t.d(), t.n())).norm_op2())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMapping {
    pub hausdorff: f64,
    /// `σ_S(f(T))` recomputed from the quadrature value.
    pub computed: SSpectrum,
    /// `f(σ_S(T))`, sphere by sphere.
    pub mapped: Vec<Sphere>,
}

/// Compares `σ_S(f(T))` with `f(σ_S(T))` in the Hausdorff distance.
pub fn spectral_mapping_check(f: &IntrinsicFunction, res: &SResolvent, opts: &CalcOptions) -> Result<SpectralMapping> {
    let value = apply_left(f, res, opts)?.value;
    let computed = s_spectrum(&value)?;
    let mut mapped = Vec::new();
    for s in &res.spectrum().spheres {
        let w = f.eval_shadow(Complex64::new(s.u, s.v))?;
        mapped.push(Sphere::new(w.re, w.im));
    }
    let hausdorff = hausdorff_distance(&computed.points(), &mapped);
    Ok(SpectralMapping { hausdorff, computed, mapped })
}

/// `‖g(f(T)) − (g∘f)(T)‖`, where `g(f(T))` uses a contour around the
/// recomputed spectrum of `f(T)`.
pub fn composition_check<G: LeftSliceFunction + Clone>(
    f: &IntrinsicFunction,
    g: &G,
    res: &SResolvent,
    opts: &CalcOptions,
) -> Result<f64> {
    let inner = apply_left(f, res, opts)?.value;
    let inner_res = SResolvent::new(&inner)?;
    let outer = apply_left(g, &inner_res, opts)?.value;
    let composed = Composed { inner: f.clone(), outer: g.clone() };
    let direct = apply_left(&composed, res, opts)?.value;
    Ok((&outer - &direct).norm_op2())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Linearity {
    /// `‖(f + g)(T) − f(T) − g(T)‖`.
    pub additivity: f64,
    /// `‖(f a)(T) − f(T) a‖`.
    pub homogeneity: f64,
}

pub fn linearity_check<F: LeftSliceFunction + Clone, G: LeftSliceFunction + Clone>(
    f: &F,
    g: &G,
    a: &CliffordElement,
    res: &SResolvent,
    opts: &CalcOptions,
) -> Result<Linearity> {
    let unit = opts.unit_for(res.operator().n())?;
    let sum = Sum(f.clone(), g.clone());
    let contour = default_contour(&sum, res.spectrum(), opts.padding)?;
    let fv = functional_calculus_left(f, res, &unit, &contour, opts.nodes)?.value;
    let gv = functional_calculus_left(g, res, &unit, &contour, opts.nodes)?.value;
    let sv = functional_calculus_left(&sum, res, &unit, &contour, opts.nodes)?.value;
    let scaled = RightScaled(f.clone(), a.clone());
    let av = functional_calculus_left(&scaled, res, &unit, &contour, opts.nodes)?.value;
    Ok(Linearity {
        additivity: (&sv - &(&fv + &gv)).norm_op2(),
        homogeneity: (&av - &fv.mul_element_right(a)?).norm_op2(),
    })
}

/// `Σ_{m ≤ terms} T^m / m!`.
pub fn exp_taylor(t: &CliffordMatrix, terms: usize) -> CliffordMatrix {
    let mut power = CliffordMatrix::identity(t.d(), t.n());
    let mut sum = power.clone();
    for m in 1..=terms {
        power = (&power * t).scale(1.0 / m as f64);
        sum = &sum + &power;
    }
    sum
}
