//! The group algebra C[G] acting on ℓ²(G) by the left regular representation.
//!
//! Elements are finitely supported coefficient maps. Operator norms of λ(f)
//! are estimated from below by compressing to balls B_R, which for amenable
//! groups approach ‖λ(f)‖ as R grows.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{Ball, CayleyGraph, Element, Group};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, CMatrix};
use crate::sampling::{self, derive_seed};
use crate::scalar::Scalar;

/// A finitely supported function G → S. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S: Scalar> {
    terms: BTreeMap<Element, S>,
}

impl<S: Scalar> Default for AlgebraElement<S> {
    fn default() -> Self {
        AlgebraElement { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// δ_g.
    pub fn delta(g: Element) -> Self {
        Self::monomial(g, S::one())
    }

    pub fn monomial(g: Element, c: S) -> Self {
        Self::from_terms([(g, c)])
    }

    /// Sums repeated elements and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Element, S)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn add_term(&mut self, g: Element, c: S) {
        let next = match self.terms.remove(&g) {
            Some(old) => old + c,
            None => c,
        };
        if !next.is_zero() {
            self.terms.insert(g, next);
        }
    }

    pub fn coefficient(&self, g: &Element) -> S {
        self.terms.get(g).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &S)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Support contained in {e}, i.e. a multiple of the unit.
    pub fn is_scalar(&self, identity: &Element) -> bool {
        self.terms.keys().all(|g| g == identity)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|_, v| v.clone() * c.clone())
    }

    /// Pointwise transform of coefficients; zeros produced by `f` are dropped.
    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&Element, &S) -> T) -> AlgebraElement<T> {
        AlgebraElement {
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g.clone(), f(g, c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Keep only the terms whose element satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Element) -> bool) -> Self {
        AlgebraElement { terms: self.terms.iter().filter(|(g, _)| keep(g)).map(|(g, c)| (g.clone(), c.clone())).collect() }
    }

    pub fn to_c64(&self) -> AlgebraElement<Complex64> {
        self.map(|_, c| c.to_c64())
    }

    fn check<G: Group>(&self, cayley: &CayleyGraph<G>) -> Result<()> {
        self.terms.keys().try_for_each(|g| cayley.check(g))
    }

    /// (f∗g)(z) = Σ_{xy=z} f(x)g(y).
    pub fn convolve<G: Group>(&self, other: &Self, cayley: &CayleyGraph<G>) -> Result<Self> {
        self.check(cayley)?;
        other.check(cayley)?;
        let mut out = Self::zero();
        for (x, a) in &self.terms {
            for (y, b) in &other.terms {
                out.add_term(cayley.mul(x, y), a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// f*(x) = conj(f(x⁻¹)).
    pub fn involution<G: Group>(&self, cayley: &CayleyGraph<G>) -> Result<Self> {
        self.check(cayley)?;
        Ok(Self::from_terms(self.terms.iter().map(|(g, c)| (cayley.inv(g), c.conj()))))
    }

    /// (dˢf)(x) = ℓ(x)ˢ f(x).
    pub fn derivative<G: Group>(&self, s: u32, cayley: &CayleyGraph<G>) -> Result<Self> {
        let lengths = cayley.word_lengths(self.terms.keys())?;
        let mut lengths = lengths.into_iter();
        Ok(self.map(|_, c| {
            let l = lengths.next().unwrap() as u64;
            c.clone() * S::from_u64(l.pow(s))
        }))
    }

    /// Largest word length in the support (0 when empty).
    pub fn support_radius<G: Group>(&self, cayley: &CayleyGraph<G>) -> Result<u32> {
        Ok(cayley.word_lengths(self.terms.keys())?.into_iter().max().unwrap_or(0))
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Matrix of P_B λ(f) P_B in ball order: entry (x, y) is f(xy⁻¹).
pub fn compression<S: Scalar, G: Group>(f: &AlgebraElement<S>, ball: &Ball, cayley: &CayleyGraph<G>) -> DMatrix<S> {
    let n = ball.len();
    let mut m = DMatrix::from_element(n, n, S::zero());
    for (z, c) in f.iter() {
        for (j, y) in ball.elements().iter().enumerate() {
            if let Some(i) = ball.position(&cayley.mul(z, y)) {
                m[(i, j)] = c.clone();
            }
        }
    }
    m
}

/// P_R λ(f) P_R as a complex matrix indexed by B_R.
pub fn compress_rep<S: Scalar, G: Group>(f: &AlgebraElement<S>, radius: u32, cayley: &CayleyGraph<G>) -> Result<CMatrix> {
    let ball = cayley.ball(radius)?;
    Ok(compression(&f.to_c64(), &ball, cayley))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormOptions {
    /// Stop once successive compressions change by less than this.
    pub tol: f64,
    /// Largest compression radius; `None` means four steps past the starting radius.
    pub r_max: Option<u32>,
}

impl Default for OpNormOptions {
    fn default() -> Self {
        OpNormOptions { tol: 1e-10, r_max: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormEstimate {
    /// Lower bound for ‖λ(f)‖.
    pub estimate: f64,
    pub converged: bool,
    pub last_r: u32,
}

/// Compression estimate of ‖λ(f)‖.
///
/// Starts at R = ⌈ρ/2⌉ where ρ is the support radius, which is the first
/// radius whose compression sees every coefficient, and grows R by one.
pub fn opnorm<S: Scalar, G: Group>(
    f: &AlgebraElement<S>,
    opts: &OpNormOptions,
    cayley: &CayleyGraph<G>,
) -> Result<OpNormEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("opnorm tolerance must be positive".into()));
    }
    if f.is_empty() {
        return Ok(OpNormEstimate { estimate: 0.0, converged: true, last_r: 0 });
    }
    let f = f.to_c64();
    let r0 = f.support_radius(cayley)?.div_ceil(2);
    let r_end = opts.r_max.unwrap_or(r0 + 4).max(r0);
    let big = cayley.ball(r_end)?;
    let mut estimate = 0.0_f64;
    for r in r0..=r_end {
        let ball = if r == r_end { big.clone() } else { cayley.ball(r)? };
        let next = spectral_norm(&compression(&f, &ball, cayley)).max(estimate);
        if r > r0 && next - estimate < opts.tol {
            return Ok(OpNormEstimate { estimate: next, converged: true, last_r: r });
        }
        estimate = next;
    }
    Ok(OpNormEstimate { estimate, converged: false, last_r: r_end })
}

/// L_s(f) = ‖λ(dˢf)‖, estimated through [`opnorm`].
pub fn lipnorm<S: Scalar, G: Group>(
    f: &AlgebraElement<S>,
    s: u32,
    opts: &OpNormOptions,
    cayley: &CayleyGraph<G>,
) -> Result<OpNormEstimate> {
    opnorm(&f.derivative(s, cayley)?, opts, cayley)
}

/// ‖f‖_{Hˢ} = (Σ |f(x)|² (1+ℓ(x))^{2s})^{1/2}.
pub fn sobolev_norm<S: Scalar, G: Group>(f: &AlgebraElement<S>, s: f64, cayley: &CayleyGraph<G>) -> Result<f64> {
    let lengths = cayley.word_lengths(f.support())?;
    Ok(f.iter()
        .zip(lengths)
        .map(|((_, c), l)| c.to_c64().norm_sqr() * (1.0 + l as f64).powf(2.0 * s))
        .sum::<f64>()
        .sqrt())
}

/// Empirical rapid-decay constant: the largest observed ‖λ(f)‖ / ‖f‖_{Hˢ}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdEstimate {
    pub exponent: f64,
    pub constant: f64,
    pub trials: usize,
    pub seed: u64,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct RdProbeOptions {
    /// Random supports are drawn from B_support_radius.
    pub support_radius: u32,
    /// Fixed compression radius for the numerator; `None` picks the largest R <= 16 with #B_R <= 600.
    pub compression_radius: Option<u32>,
}

impl Default for RdProbeOptions {
    fn default() -> Self {
        RdProbeOptions { support_radius: 4, compression_radius: None }
    }
}

fn probe_ratio<G: Group>(f: &AlgebraElement<Complex64>, s: f64, ball: &Ball, cayley: &CayleyGraph<G>) -> Result<f64> {
    let num = spectral_norm(&compression(f, ball, cayley));
    Ok(num / sobolev_norm(f, s, cayley)?)
}

/// Max ratio over an explicit probe set, compressed to `radius`.
pub fn rd_probe_set<G: Group>(
    probes: &[AlgebraElement<Complex64>],
    s: f64,
    radius: u32,
    cayley: &CayleyGraph<G>,
) -> Result<f64> {
    let ball = cayley.ball(radius)?;
    probes
        .iter()
        .filter(|f| !f.is_empty())
        .map(|f| probe_ratio(f, s, &ball, cayley))
        .try_fold(0.0_f64, |m, r| Ok(m.max(r?)))
}

pub fn rd_probe<G: Group>(cayley: &CayleyGraph<G>, s: f64, trials: usize, seed: u64) -> Result<RdEstimate> {
    rd_probe_with(cayley, s, trials, seed, &RdProbeOptions::default())
}

/// δ_e plus `trials` random complex Gaussian elements supported in the probe ball.
pub fn rd_probe_with<G: Group>(
    cayley: &CayleyGraph<G>,
    s: f64,
    trials: usize,
    seed: u64,
    opts: &RdProbeOptions,
) -> Result<RdEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("rd_probe needs at least one trial".into()));
    }
    let pool = cayley.ball(opts.support_radius)?;
    let radius = opts
        .compression_radius
        .unwrap_or_else(|| cayley.radius_within(600, 16))
        .max(opts.support_radius.div_ceil(2));
    let ball = cayley.ball(radius)?;
    let unit = AlgebraElement::delta(cayley.identity());
    let mut ratios = vec![probe_ratio(&unit, s, &ball, cayley)?];
    let trial_ratios: Result<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sampling::rng(derive_seed(seed, &[sampling::tag("rd_probe"), t as u64]));
            let f = sampling::random_element(&mut rng, pool.elements());
            probe_ratio(&f, s, &ball, cayley)
        })
        .collect();
    ratios.extend(trial_ratios?);
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(RdEstimate { exponent: s, constant, trials, seed, ratios })
}

/// The ball-overlap multiplier F_Λ(x) = #(B_Λ ∩ xB_Λ) / #B_Λ, stored exactly.
#[derive(Clone, Debug)]
pub struct FejerKernel {
    radius: u32,
    ball_size: u64,
    /// Overlap counts #(B_Λ ∩ xB_Λ) for x ∈ B_{2Λ}.
    overlaps: HashMap<Element, u64>,
    /// max over generators s of #(B_Λ \ sB_Λ).
    max_generator_deficit: u64,
}

impl FejerKernel {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// #B_Λ, the common denominator.
    pub fn ball_size(&self) -> u64 {
        self.ball_size
    }

    pub fn overlap(&self, x: &Element) -> u64 {
        self.overlaps.get(x).copied().unwrap_or(0)
    }

    pub fn value(&self, x: &Element) -> Ratio<i64> {
        Ratio::new(self.overlap(x) as i64, self.ball_size as i64)
    }

    pub fn value_f64(&self, x: &Element) -> f64 {
        self.overlap(x) as f64 / self.ball_size as f64
    }

    /// 1 − F_Λ(x), exactly.
    pub fn defect(&self, x: &Element) -> Ratio<i64> {
        Ratio::from_integer(1) - self.value(x)
    }

    /// ε_Λ = max_s #(B_Λ \ sB_Λ) / #B_Λ.
    pub fn folner_epsilon(&self) -> Ratio<i64> {
        Ratio::new(self.max_generator_deficit as i64, self.ball_size as i64)
    }

    pub fn folner_epsilon_f64(&self) -> f64 {
        self.max_generator_deficit as f64 / self.ball_size as f64
    }

    /// Elements of B_{2Λ}, the support of F_Λ.
    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.overlaps.keys()
    }

    /// (𝓕_Λ f)(x) = F_Λ(x) f(x).
    pub fn apply<S: Scalar>(&self, f: &AlgebraElement<S>) -> AlgebraElement<S> {
        f.map(|g, c| c.clone() * S::from_ratio(self.value(g)))
    }
}

/// F_Λ on B_{2Λ} together with the Følner ratio of the generators.
pub fn fejer_kernel<G: Group>(cayley: &CayleyGraph<G>, radius: u32) -> Result<FejerKernel> {
    let outer = cayley.ball(2 * radius)?;
    let n = outer.size_at(radius);
    let inner = &outer.elements()[..n];
    let overlaps: HashMap<Element, u64> = outer
        .elements()
        .par_iter()
        .map(|x| {
            let xinv = cayley.inv(x);
            let count = inner
                .iter()
                .filter(|b| matches!(outer.length_of(&cayley.mul(&xinv, b)), Some(l) if l <= radius))
                .count();
            (x.clone(), count as u64)
        })
        .collect();
    let max_generator_deficit = cayley
        .generators()
        .iter()
        .map(|s| n as u64 - overlaps.get(s).copied().unwrap_or(0))
        .max()
        .unwrap_or(0);
    Ok(FejerKernel { radius, ball_size: n as u64, overlaps, max_generator_deficit })
}

/// 𝓕_Λ f, building the kernel on the fly.
pub fn fejer_apply<S: Scalar, G: Group>(f: &AlgebraElement<S>, radius: u32, cayley: &CayleyGraph<G>) -> Result<AlgebraElement<S>> {
    Ok(fejer_kernel(cayley, radius)?.apply(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupSpec;
    use num_complex::Complex;
    use num_rational::Rational64;

    fn z1() -> CayleyGraph {
        CayleyGraph::new(GroupSpec::FreeAbelian(1))
    }

    fn e1(k: i64) -> Element {
        Element::new(&[k])
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    type F = AlgebraElement<Complex64>;

    #[test]
    fn convolution_examples() {
        let g = z1();
        let d = |k| F::delta(e1(k));
        assert_eq!(d(2).convolve(&d(3), &g).unwrap(), d(5));
        let sym = d(1).add(&d(-1));
        let sq = sym.convolve(&sym, &g).unwrap();
        let expected = F::from_terms([(e1(2), c(1.0, 0.0)), (e1(0), c(2.0, 0.0)), (e1(-2), c(1.0, 0.0))]);
        assert_eq!(sq, expected);
        assert_eq!(d(0).convolve(&sym, &g).unwrap(), sym);
    }

    #[test]
    fn involution_examples() {
        let g = z1();
        let f = F::monomial(e1(1), c(0.0, 1.0));
        assert_eq!(f.involution(&g).unwrap(), F::monomial(e1(-1), c(0.0, -1.0)));
        let h = F::from_terms([(e1(1), c(1.0, 2.0)), (e1(3), c(-1.0, 0.5))]);
        assert_eq!(h.involution(&g).unwrap().involution(&g).unwrap(), h);
        let sym = F::from_terms([(e1(1), c(2.0, 0.0)), (e1(-1), c(2.0, 0.0))]);
        assert_eq!(sym.involution(&g).unwrap(), sym);
    }

    #[test]
    fn derivative_examples() {
        let g = z1();
        assert!(F::delta(e1(0)).derivative(1, &g).unwrap().is_empty());
        let sym = F::delta(e1(1)).add(&F::delta(e1(-1)));
        assert_eq!(sym.derivative(1, &g).unwrap(), sym);
        assert_eq!(F::delta(e1(2)).derivative(2, &g).unwrap(), F::monomial(e1(2), c(4.0, 0.0)));
    }

    #[test]
    fn compression_examples() {
        let g = z1();
        // ball order is 0, -1, 1
        let m = compress_rep(&F::delta(e1(2)), 1, &g).unwrap();
        let nonzero: Vec<(usize, usize)> =
            (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&(i, j)| m[(i, j)] != c(0.0, 0.0)).collect();
        assert_eq!(nonzero, vec![(2, 1)]);
        let m = compress_rep(&F::delta(e1(1)).add(&F::delta(e1(-1))), 1, &g).unwrap();
        assert_eq!(m, m.adjoint());
        assert_eq!(m.iter().filter(|v| **v == c(1.0, 0.0)).count(), 4);
        let id = compress_rep(&F::delta(e1(0)), 3, &g).unwrap();
        assert_eq!(id, CMatrix::identity(7, 7));
    }

    #[test]
    fn opnorm_examples() {
        let g = z1();
        let opts = OpNormOptions::default();
        let est = opnorm(&F::delta(e1(3)), &opts, &g).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert!(est.converged);
        let sym = F::delta(e1(1)).add(&F::delta(e1(-1)));
        let est = opnorm(&sym, &OpNormOptions { tol: 1e-6, r_max: Some(400) }, &g).unwrap();
        let r = est.last_r as f64;
        assert!((est.estimate - 2.0 * (std::f64::consts::PI / (2.0 * r + 2.0)).cos()).abs() < 1e-12);
        assert!(est.converged && (2.0 - est.estimate) < 1e-3, "{est:?}");
        let scaled = opnorm(&sym.scale(&c(0.0, -3.0)), &opts, &g).unwrap();
        let plain = opnorm(&sym, &opts, &g).unwrap();
        assert!((scaled.estimate - 3.0 * plain.estimate).abs() < 1e-12);
        assert_eq!(opnorm(&F::zero(), &opts, &g).unwrap().estimate, 0.0);
    }

    #[test]
    fn lipnorm_examples() {
        let g = z1();
        let opts = OpNormOptions { tol: 1e-6, r_max: Some(400) };
        assert_eq!(lipnorm(&F::delta(e1(0)), 3, &opts, &g).unwrap().estimate, 0.0);
        let sym = F::delta(e1(1)).add(&F::delta(e1(-1)));
        assert!((lipnorm(&sym, 1, &opts, &g).unwrap().estimate - 2.0).abs() < 1e-3);
        assert!((lipnorm(&F::delta(e1(2)), 2, &opts, &g).unwrap().estimate - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_examples() {
        let g = z1();
        assert_eq!(sobolev_norm(&F::delta(e1(0)), 2.5, &g).unwrap(), 1.0);
        assert!((sobolev_norm(&F::delta(e1(1)), 1.0, &g).unwrap() - 2.0).abs() < 1e-15);
        let sym = F::delta(e1(1)).add(&F::delta(e1(-1)));
        assert!((sobolev_norm(&sym, 1.0, &g).unwrap() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rd_probe_examples() {
        let g = CayleyGraph::new(GroupSpec::FreeAbelian(2));
        let s = 1.5;
        let deltas: Vec<F> = g.ball(3).unwrap().elements().iter().map(|x| F::delta(x.clone())).collect();
        let best = rd_probe_set(&deltas, s, 3, &g).unwrap();
        assert!((best - 1.0).abs() < 1e-15);
        let non_unit = rd_probe_set(&deltas[1..], s, 3, &g).unwrap();
        assert!((non_unit - 2f64.powf(-s)).abs() < 1e-15);
        let est = rd_probe(&g, s, 12, 99).unwrap();
        assert!(est.constant >= 1.0);
        assert!(est.ratios.iter().all(|r| *r <= est.constant));
        assert_eq!(est.ratios.len(), 13);
        let again = rd_probe(&g, s, 12, 99).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn fejer_examples() {
        let g = z1();
        let k = fejer_kernel(&g, 2).unwrap();
        assert_eq!(k.value(&e1(1)), Ratio::new(4, 5));
        assert_eq!(k.value(&e1(0)), Ratio::from_integer(1));
        assert_eq!(k.value(&e1(5)), Ratio::from_integer(0));
        assert_eq!(k.folner_epsilon(), Ratio::new(1, 5));
        let f = AlgebraElement::<Complex<Rational64>>::delta(e1(1));
        let expected = AlgebraElement::monomial(e1(1), Complex::new(Ratio::new(4, 5), Ratio::from_integer(0)));
        assert_eq!(k.apply(&f), expected);
        let unit = AlgebraElement::<Complex<Rational64>>::delta(e1(0));
        assert_eq!(k.apply(&unit), unit);
    }

    #[test]
    fn fejer_commutes_with_derivative() {
        let g = CayleyGraph::new(GroupSpec::Heisenberg);
        let k = fejer_kernel(&g, 2).unwrap();
        let pool = g.ball(4).unwrap();
        let mut rng = sampling::rng(5);
        for _ in 0..10 {
            let f = sampling::random_rational_element(&mut rng, pool.elements());
            let lhs = k.apply(&f.derivative(2, &g).unwrap());
            let rhs = k.apply(&f).derivative(2, &g).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn real_scalars_work_too() {
        let g = z1();
        let f = AlgebraElement::<f32>::from_terms([(e1(1), 1.0), (e1(-1), 1.0)]);
        assert_eq!(f.derivative(2, &g).unwrap(), f.scale(&1.0));
        assert_eq!(f.involution(&g).unwrap(), f);
    }
}
