//! Runnable checks of the calculus identities on a single operator.
//!
//! Every item reports its residual next to the tolerance it is held to.
//! Residuals are absolute 2-norms of real representations unless the item
//! says otherwise.

use rand::Rng;
use serde::Serialize;
use slicecalc_core::calculus::{
    apply_left, composition_check, independence_check, linearity_check, product_rule_check, riesz_projector,
    spectral_mapping_check, two_sided_check, CalcOptions,
};
use slicecalc_core::slice::{IntrinsicFunction, LeftSlicePolynomial};
use slicecalc_core::spectrum::{
    pseudo_resolvent_series, s_resolvent_left_series, s_resolvent_right_series, spectral_radius_gelfand, SResolvent,
};
use slicecalc_core::{CliffordMatrix, Paravector, Result};

use crate::error::CliError;
use crate::random;

pub const SERIES_TOL: f64 = 1e-10;
pub const RESOLVENT_EQUATION_TOL: f64 = 1e-10;
pub const S_RESOLVENT_EQUATION_TOL: f64 = 1e-9;
pub const POLYNOMIAL_TOL: f64 = 1e-8;
pub const LINEARITY_TOL: f64 = 1e-9;
pub const PRODUCT_RULE_TOL: f64 = 1e-8;
pub const INDEPENDENCE_TOL: f64 = 1e-9;
pub const TWO_SIDED_TOL: f64 = 1e-9;
pub const PROJECTOR_TOL: f64 = 1e-8;
pub const SPECTRAL_MAPPING_TOL: f64 = 1e-6;
pub const COMPOSITION_TOL: f64 = 1e-7;
/// Relative.
pub const GELFAND_TOL: f64 = 0.01;
pub const GELFAND_EXPONENT: u32 = 128;
pub const PROJECTOR_GAP_FRACTION: f64 = 0.4;
pub const PROJECTOR_PADDING_FLOOR: f64 = 0.01;
pub const SERIES_MAX_TERMS: usize = 10_000;
/// Contour paddings compared by the independence item, as multiples of the configured padding.
pub const INDEPENDENCE_PADDINGS: [f64; 2] = [1.0, 2.0];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub calc: CalcOptions,
    /// Random imaginary units for the independence item.
    pub units: usize,
    pub seed: u64,
    /// Replaces every item tolerance when set.
    pub tol: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { calc: CalcOptions::default(), units: 3, seed: 0, tol: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemError {
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Item {
    pub name: &'static str,
    pub passed: bool,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub error: Option<ItemError>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub items: Vec<Item>,
}

fn item(name: &'static str, tolerance: f64, outcome: Result<f64>) -> Item {
    match outcome {
        Ok(r) => Item { name, passed: r <= tolerance, residual: Some(r), tolerance, error: None },
        Err(e) => {
            let e = CliError::Core(e);
            Item {
                name,
                passed: false,
                residual: None,
                tolerance,
                error: Some(ItemError { kind: e.kind().into(), detail: e.to_string() }),
            }
        }
    }
}

fn rel(a: &CliffordMatrix, b: &CliffordMatrix) -> f64 {
    (a - b).norm_op2() / b.norm_op2().max(f64::MIN_POSITIVE)
}

/// Series against closed forms at `|s| = 2·norm_paper(T)`, relative error.
pub fn series_residual(res: &SResolvent, s: &Paravector) -> Result<f64> {
    let t = res.operator();
    let q = pseudo_resolvent_series(t, s, SERIES_MAX_TERMS)?.value;
    let l = s_resolvent_left_series(t, s, SERIES_MAX_TERMS)?.value;
    let r = s_resolvent_right_series(t, s, SERIES_MAX_TERMS)?.value;
    let sphere = s.sphere();
    Ok(rel(&q, &res.pseudo_resolvent(sphere.u, sphere.v)?)
        .max(rel(&l, &res.left(s)?))
        .max(rel(&r, &res.right(s)?)))
}

/// `‖Σ T^m a_m − P(T)‖` for a degree-3 polynomial with random Clifford coefficients.
pub fn polynomial_residual(res: &SResolvent, p: &LeftSlicePolynomial, opts: &CalcOptions) -> Result<f64> {
    let exact = p.eval_matrix(res.operator())?;
    Ok((&apply_left(p, res, opts)?.value - &exact).norm_op2())
}

/// Padding for the projector item: the configured padding, shrunk to
/// `PROJECTOR_GAP_FRACTION` of the smallest sphere gap but never below
/// `PROJECTOR_PADDING_FLOOR` of the configured value.
pub fn projector_padding(res: &SResolvent, padding: f64) -> f64 {
    let spheres = &res.spectrum().spheres;
    let mut gap = f64::INFINITY;
    for (i, a) in spheres.iter().enumerate() {
        for b in &spheres[i + 1..] {
            gap = gap.min(a.sphere().distance(&b.sphere()));
        }
    }
    let shrunk = padding.min(PROJECTOR_GAP_FRACTION * gap);
    if shrunk < PROJECTOR_PADDING_FLOOR * padding {
        padding
    } else {
        shrunk
    }
}

/// Largest of `‖P_i² − P_i‖`, `‖P_i T − T P_i‖` and `‖Σ P_i − I‖` over the
/// projectors onto single spheres.
pub fn projector_residual(res: &SResolvent, opts: &CalcOptions) -> Result<f64> {
    let t = res.operator();
    let mut sum = CliffordMatrix::zero(t.d(), t.n());
    let mut worst: f64 = 0.0;
    for i in 0..res.spectrum().spheres.len() {
        let p = riesz_projector(res, &[i], opts)?.value;
        worst = worst.max((&(&p * &p) - &p).norm_op2());
        worst = worst.max((&(&p * t) - &(t * &p)).norm_op2());
        sum = &sum + &p;
    }
    Ok(worst.max((&sum - &CliffordMatrix::identity(t.d(), t.n())).norm_op2()))
}

/// `|ρ_m − r| / r`, or `ρ_m` when the spectral radius `r` vanishes.
pub fn gelfand_residual(res: &SResolvent) -> Result<f64> {
    let g = spectral_radius_gelfand(res.operator(), GELFAND_EXPONENT)?;
    let r = res.spectrum().radius;
    Ok(if r > 0.0 { (g - r).abs() / r } else { g })
}

/// A pole comfortably outside every default contour.
pub fn outside_pole(res: &SResolvent, padding: f64) -> f64 {
    1.2 * res.spectrum().radius + 2.0 * padding + 1.0
}

pub fn run(t: &CliffordMatrix, cfg: &VerifyConfig) -> std::result::Result<Report, CliError> {
    let res = SResolvent::new(t)?;
    let n = t.n();
    let mut rng = random::rng(cfg.seed);
    let tol = |default: f64| cfg.tol.unwrap_or(default);
    let opts = &cfg.calc;
    let bound = t.norm_paper().max(0.5);
    let mut items = Vec::new();

    let s = random::paravector_with_modulus(&mut rng, n, 2.0 * bound);
    items.push(item("series_closed_form", tol(SERIES_TOL), series_residual(&res, &s)));

    let s = random::paravector_with_modulus(&mut rng, n, 1.5 * bound + 1.0);
    let q = random::paravector_with_modulus(&mut rng, n, 1.5 * bound + 1.3);
    items.push(item(
        "left_right_resolvent_equations",
        tol(RESOLVENT_EQUATION_TOL),
        res.left_equation_residual(&s).and_then(|a| Ok(a.max(res.right_equation_residual(&q)?))),
    ));
    items.push(item(
        "s_resolvent_equation",
        tol(S_RESOLVENT_EQUATION_TOL),
        res.resolvent_equation_residuals(&s, &q).map(|(a, b)| a.max(b)),
    ));

    let coeffs = (0..4).map(|_| random::element(&mut rng, n)).collect();
    let outcome = LeftSlicePolynomial::new(n, coeffs).and_then(|p| polynomial_residual(&res, &p, opts));
    items.push(item("polynomial_reproduction", tol(POLYNOMIAL_TOL), outcome));

    let a = random::element(&mut rng, n);
    let g = IntrinsicFunction::poly(&[0.5, -1.0, 0.25]);
    items.push(item(
        "linearity",
        tol(LINEARITY_TOL),
        linearity_check(&IntrinsicFunction::exp(), &g, &a, &res, opts).map(|l| l.additivity.max(l.homogeneity)),
    ));

    let coeffs = (0..3).map(|_| random::element(&mut rng, n)).collect();
    let outcome = LeftSlicePolynomial::new(n, coeffs)
        .and_then(|p| product_rule_check(&IntrinsicFunction::exp(), &p, &res, opts));
    items.push(item("product_rule", tol(PRODUCT_RULE_TOL), outcome));

    let units: Vec<_> = (0..cfg.units.max(1)).map(|_| random::unit(&mut rng, n.max(1))).collect();
    let paddings: Vec<f64> = INDEPENDENCE_PADDINGS.iter().map(|k| k * opts.padding).collect();
    let pole = outside_pole(&res, *paddings.last().unwrap());
    let outcome = (|| {
        let fs = [IntrinsicFunction::exp(), IntrinsicFunction::power(3), IntrinsicFunction::ratio(&[1.0], &[-pole, 1.0])?];
        let mut worst: f64 = 0.0;
        for f in &fs {
            worst = worst.max(independence_check(f, &res, &units, &paddings, opts.nodes)?.deviation);
        }
        Ok(worst)
    })();
    items.push(item("slice_and_contour_independence", tol(INDEPENDENCE_TOL), outcome));

    items.push(item(
        "left_right_agreement",
        tol(TWO_SIDED_TOL),
        two_sided_check(&IntrinsicFunction::exp(), &res, opts).map(|d| d.deviation),
    ));

    let projector_opts = opts.clone().with_padding(projector_padding(&res, opts.padding));
    items.push(item("riesz_projectors", tol(PROJECTOR_TOL), projector_residual(&res, &projector_opts)));

    let outcome = (|| {
        let fs = [IntrinsicFunction::power(2), IntrinsicFunction::exp(), IntrinsicFunction::poly(&[1.0, 1.0])];
        let mut worst: f64 = 0.0;
        for f in &fs {
            worst = worst.max(spectral_mapping_check(f, &res, opts)?.hausdorff);
        }
        Ok(worst)
    })();
    items.push(item("spectral_mapping", tol(SPECTRAL_MAPPING_TOL), outcome));

    let shift = rng.gen_range(-0.5..0.5);
    items.push(item(
        "composition",
        tol(COMPOSITION_TOL),
        composition_check(&IntrinsicFunction::poly(&[shift, 0.0, 1.0]), &IntrinsicFunction::exp(), &res, opts),
    ));

    items.push(item("gelfand_radius", tol(GELFAND_TOL), gelfand_residual(&res)));

    Ok(Report { passed: items.iter().all(|i| i.passed), items })
}
