//! States, the Lip-norm distance on state spaces, bridges, and empirical
//! estimates of the approximation constants ε_Λ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cayley::{CayleyGraph, Element, Group};
use crate::error::{Error, Result};
use crate::frame::{ratio_ascent, AscentResult, RatioObjective, Smoothed, SolverOptions, SolverStatus, SymbolFrame};
use crate::groupalg::{fejer_kernel, lipnorm, opnorm, AlgebraElement, FejerKernel, OpNormOptions};
use crate::linalg::{is_hermitian, min_eigenvalue, CMatrix};
use crate::sampling::{self, derive_seed};
use crate::scalar::Scalar;
use crate::truncation::{compress, materialize_c64, reconstruct, truncated_lipnorm, vector_pairing, ToeplitzOperator};

/// Tolerance for the unit-norm, Hermitian, positivity and trace checks on states.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// The reduced group C*-algebra, acting on ℓ²(G).
    Full,
    /// P_Λ C[G] P_Λ acting on ℓ²(B_Λ).
    Truncated(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    /// x ↦ ⟨ξ, xξ⟩ for a finitely supported unit vector ξ.
    Vector(AlgebraElement<Complex64>),
    /// x ↦ tr(ρx) for a density matrix on ℓ²(B_Λ), rows in ball order.
    Density(CMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    kind: StateKind,
    domain: Domain,
}

impl State {
    pub fn vector<G: Group>(xi: AlgebraElement<Complex64>, domain: Domain, cayley: &CayleyGraph<G>) -> Result<Self> {
        for x in xi.support() {
            cayley.check(x)?;
        }
        if let Domain::Truncated(lambda) = domain {
            let ball = cayley.ball(lambda)?;
            if let Some(x) = xi.support().find(|x| !ball.contains(x)) {
                return Err(Error::DomainMismatch(format!("vector entry {x:?} lies outside B_{lambda}")));
            }
        }
        let norm = xi.l2_norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidParameter(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(State { kind: StateKind::Vector(xi), domain })
    }

    /// Vector state of ξ/‖ξ‖.
    pub fn normalized_vector<G: Group>(xi: AlgebraElement<Complex64>, domain: Domain, cayley: &CayleyGraph<G>) -> Result<Self> {
        let norm = xi.l2_norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero vector does not define a state".into()));
        }
        State::vector(xi.scale(&Complex64::new(1.0 / norm, 0.0)), domain, cayley)
    }

    pub fn density<G: Group>(rho: CMatrix, lambda: u32, cayley: &CayleyGraph<G>) -> Result<Self> {
        let n = cayley.ball_size(lambda)?;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DomainMismatch(format!(
                "density matrix is {}x{}, B_{lambda} has {n} elements",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if !is_hermitian(&rho, STATE_TOL) {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        let trace = rho.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix has trace {trace}")));
        }
        let low = min_eigenvalue(&rho);
        if low < -STATE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix has eigenvalue {low}")));
        }
        Ok(State { kind: StateKind::Density(rho), domain: Domain::Truncated(lambda) })
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// The vector state of the same ξ on P_Λ C[G] P_Λ; needs supp ξ ⊆ B_Λ.
    pub fn truncate<G: Group>(&self, lambda: u32, cayley: &CayleyGraph<G>) -> Result<Self> {
        match &self.kind {
            StateKind::Vector(xi) => State::vector(xi.clone(), Domain::Truncated(lambda), cayley),
            StateKind::Density(_) => match self.domain {
                Domain::Truncated(l) if l == lambda => Ok(self.clone()),
                _ => Err(Error::DomainMismatch("density states cannot change radius".into())),
            },
        }
    }

    /// φ(E_k) for the matrix units E_k of each frame symbol, i.e. φ as a
    /// linear functional on frame coefficients.
    fn frame_functional(&self, frame: &SymbolFrame, ball: &crate::cayley::Ball) -> Vec<Complex64> {
        match &self.kind {
            StateKind::Vector(xi) => {
                let v: Vec<Complex64> = ball.elements().iter().map(|x| xi.coefficient(x)).collect();
                (0..frame.len())
                    .map(|k| frame.cells(k).iter().map(|&(r, c)| v[r].conj() * v[c]).sum())
                    .collect()
            }
            StateKind::Density(rho) => {
                (0..frame.len()).map(|k| frame.cells(k).iter().map(|&(r, c)| rho[(c, r)]).sum()).collect()
            }
        }
    }
}

/// Something a state can be evaluated on.
pub enum Observable<'a, S: Scalar> {
    Algebra(&'a AlgebraElement<S>),
    Toeplitz(&'a ToeplitzOperator<S>),
}

impl<'a, S: Scalar> From<&'a AlgebraElement<S>> for Observable<'a, S> {
    fn from(a: &'a AlgebraElement<S>) -> Self {
        Observable::Algebra(a)
    }
}

impl<'a, S: Scalar> From<&'a ToeplitzOperator<S>> for Observable<'a, S> {
    fn from(t: &'a ToeplitzOperator<S>) -> Self {
        Observable::Toeplitz(t)
    }
}

/// φ(a): ⟨ξ, λ(a)ξ⟩ on the full algebra, ⟨ξ, Tξ⟩ or tr(ρT) on a truncation.
pub fn state_eval<'a, S: Scalar, G: Group>(
    phi: &State,
    a: impl Into<Observable<'a, S>>,
    cayley: &CayleyGraph<G>,
) -> Result<Complex64> {
    match (a.into(), phi.domain, &phi.kind) {
        (Observable::Algebra(f), Domain::Full, StateKind::Vector(xi)) => Ok(vector_pairing(xi, f, cayley)),
        (Observable::Toeplitz(t), Domain::Truncated(lambda), kind) if t.radius() == lambda => match kind {
            StateKind::Vector(xi) => Ok(vector_pairing(xi, t.symbol(), cayley)),
            StateKind::Density(rho) => {
                let m = materialize_c64(t, cayley)?;
                Ok((rho * m).trace())
            }
        },
        (Observable::Algebra(_), Domain::Truncated(l), _) => {
            Err(Error::DomainMismatch(format!("state on the radius-{l} truncation evaluated on a group algebra element")))
        }
        (Observable::Toeplitz(t), Domain::Full, _) => Err(Error::DomainMismatch(format!(
            "state on the full algebra evaluated on a radius-{} Toeplitz operator",
            t.radius()
        ))),
        (Observable::Toeplitz(t), Domain::Truncated(l), _) => Err(Error::DomainMismatch(format!(
            "state on the radius-{l} truncation evaluated on a radius-{} Toeplitz operator",
            t.radius()
        ))),
        (Observable::Algebra(_), Domain::Full, StateKind::Density(_)) => {
            Err(Error::DomainMismatch("density states live on truncations".into()))
        }
    }
}

/// Representatives z < z⁻¹ of the pairs {z, z⁻¹} in `symbols`, excluding e.
fn inverse_pairs<G: Group>(symbols: &[Element], cayley: &CayleyGraph<G>) -> Vec<(Element, Element)> {
    let identity = cayley.identity();
    symbols
        .iter()
        .filter(|z| **z != identity)
        .filter_map(|z| {
            let zi = cayley.inv(z);
            (*z < zi).then(|| (z.clone(), zi))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceOptions {
    pub solver: SolverOptions,
    /// Distance for the Lip-norm c·L_{s,Λ}.
    pub lip_scale: f64,
    /// Also run [`brute_distance`] when the instance is small enough and record the gap.
    pub check_oracle: bool,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions { solver: SolverOptions::default(), lip_scale: 1.0, check_oracle: false }
    }
}

#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub value: f64,
    /// Self-adjoint, symbol(e) = 0, Lip-norm 1, and (φ−ψ)(witness) = value.
    pub witness: ToeplitzOperator<Complex64>,
    pub status: SolverStatus,
    pub oracle_gap: Option<f64>,
    pub evaluations: usize,
}

/// sup |c·x| / ‖M(x)‖ over the self-adjoint symbol parameters.
struct DistanceObjective {
    frame: SymbolFrame,
    /// Frame positions of z and z⁻¹ for each parameter pair.
    pairs: Vec<(usize, usize)>,
    weights: Vec<f64>,
    c: Vec<f64>,
}

impl DistanceObjective {
    fn coeffs(&self, x: &[f64]) -> Vec<Complex64> {
        let mut b = vec![Complex64::new(0.0, 0.0); self.frame.len()];
        for (p, &(k, ki)) in self.pairs.iter().enumerate() {
            let a = Complex64::new(x[2 * p], x[2 * p + 1]) * self.weights[p];
            b[k] = a;
            b[ki] = a.conj();
        }
        b
    }

    fn linear(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

impl RatioObjective for DistanceObjective {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.frame.norm(&self.coeffs(x));
        if n == 0.0 {
            return 0.0;
        }
        self.linear(x).abs() / n
    }

    fn smoothed(&self, x: &[f64], smoothing: f64) -> Smoothed {
        let norm = self.frame.schatten_norm(&self.coeffs(x), 1.0 / smoothing);
        let lin = self.linear(x);
        if norm.value == 0.0 {
            return Smoothed { value: 0.0, exact: 0.0, gradient: self.c.clone() };
        }
        let (f, g) = (norm.value, &norm.gradient);
        let sign = if lin < 0.0 { -1.0 } else { 1.0 };
        let mut d = vec![0.0; x.len()];
        for (p, &(k, ki)) in self.pairs.iter().enumerate() {
            let w = self.weights[p];
            let df_re = w * (g[k].re + g[ki].re);
            let df_im = w * (g[k].im - g[ki].im);
            d[2 * p] = sign * self.c[2 * p] / f - lin.abs() * df_re / (f * f);
            d[2 * p + 1] = sign * self.c[2 * p + 1] / f - lin.abs() * df_im / (f * f);
        }
        Smoothed { value: lin.abs() / f, exact: lin.abs() / norm.exact, gradient: d }
    }
}

fn check_pair(phi: &State, psi: &State, lambda: u32) -> Result<()> {
    for st in [phi, psi] {
        if st.domain() != Domain::Truncated(lambda) {
            return Err(Error::DomainMismatch(format!(
                "distance on the radius-{lambda} truncation needs states there, got {:?}",
                st.domain()
            )));
        }
    }
    Ok(())
}

/// d(φ, ψ) = sup{ |φ(a) − ψ(a)| : a = a*, L_{s,Λ}(a) ≤ 1 } on P_Λ C[G] P_Λ.
///
/// Solved as a dual norm: the ratio |(φ−ψ)(x)| / ‖d_Λˢ x‖ is maximized by
/// multi-start ascent and the best x is rescaled onto the constraint boundary,
/// so the value is always attained by the returned witness.
pub fn lip_distance<G: Group>(
    phi: &State,
    psi: &State,
    s: u32,
    lambda: u32,
    opts: &DistanceOptions,
    cayley: &CayleyGraph<G>,
) -> Result<DistanceResult> {
    check_pair(phi, psi, lambda)?;
    if !(opts.lip_scale > 0.0) {
        return Err(Error::InvalidParameter("lip_scale must be positive".into()));
    }
    let ball = cayley.ball(lambda)?;
    let outer = cayley.ball(2 * lambda)?;
    let pairs = inverse_pairs(outer.elements(), cayley);
    let mut symbols = Vec::with_capacity(2 * pairs.len());
    for (z, zi) in &pairs {
        symbols.push(z.clone());
        symbols.push(zi.clone());
    }
    let frame = SymbolFrame::new(&ball, &symbols, cayley);
    let e_phi = phi.frame_functional(&frame, &ball);
    let e_psi = psi.frame_functional(&frame, &ball);
    let e: Vec<Complex64> = e_phi.iter().zip(&e_psi).map(|(a, b)| a - b).collect();
    let mut c = Vec::with_capacity(2 * pairs.len());
    let mut weights = Vec::with_capacity(pairs.len());
    let mut index = Vec::with_capacity(pairs.len());
    for (p, (z, _)) in pairs.iter().enumerate() {
        let (k, ki) = (2 * p, 2 * p + 1);
        // a(z) = t, a(z⁻¹) = t and a(z) = it, a(z⁻¹) = −it
        c.push((e[k] + e[ki]).re);
        c.push(-(e[k] - e[ki]).im);
        weights.push((outer.length_of(z).unwrap() as f64).powi(s as i32));
        index.push((k, ki));
    }
    let obj = DistanceObjective { frame, pairs: index, weights, c };
    let witness_of = |x: &[f64], scale: f64| -> Result<ToeplitzOperator<Complex64>> {
        let mut sym = AlgebraElement::zero();
        for (p, (z, zi)) in pairs.iter().enumerate() {
            let a = Complex64::new(x[2 * p], x[2 * p + 1]) * scale;
            sym.add_term(z.clone(), a);
            sym.add_term(zi.clone(), a.conj());
        }
        ToeplitzOperator::new(lambda, sym, cayley)
    };
    if obj.c.iter().all(|v| *v == 0.0) {
        return Ok(DistanceResult {
            value: 0.0,
            witness: ToeplitzOperator::zero(lambda),
            status: SolverStatus::Converged,
            oracle_gap: oracle_gap(phi, psi, s, lambda, opts, 0.0, cayley)?,
            evaluations: 0,
        });
    }
    // the objective only sees |c·x|, so orienting the start makes d(φ,ψ) and d(ψ,φ) identical runs
    let orient = obj.c.iter().find(|v| **v != 0.0).map_or(1.0, |v| v.signum());
    let mut starts = vec![obj.c.iter().map(|v| v * orient).collect::<Vec<f64>>()];
    let mut rng = sampling::rng(derive_seed(opts.solver.seed, &[sampling::tag("lip_distance")]));
    for _ in 0..opts.solver.starts {
        starts.push((0..obj.dim()).map(|_| rng.sample_gaussian()).collect());
    }
    let AscentResult { x, value, status, evaluations } = ratio_ascent(&obj, &starts, &opts.solver).expect("at least one start");
    let norm = obj.frame.norm(&obj.coeffs(&x));
    let sign = if obj.linear(&x) < 0.0 { -1.0 } else { 1.0 };
    let value = value / opts.lip_scale;
    let witness = witness_of(&x, sign / (norm * opts.lip_scale))?;
    Ok(DistanceResult {
        value,
        witness,
        status,
        oracle_gap: oracle_gap(phi, psi, s, lambda, opts, value, cayley)?,
        evaluations,
    })
}

fn oracle_gap<G: Group>(
    phi: &State,
    psi: &State,
    s: u32,
    lambda: u32,
    opts: &DistanceOptions,
    value: f64,
    cayley: &CayleyGraph<G>,
) -> Result<Option<f64>> {
    if !opts.check_oracle {
        return Ok(None);
    }
    let brute = BruteOptions { lip_scale: opts.lip_scale, ..BruteOptions::default() };
    match brute_distance(phi, psi, s, lambda, &brute, cayley) {
        Ok(b) => Ok(Some((value - b).abs())),
        Err(Error::InvalidParameter(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

trait GaussianExt {
    fn sample_gaussian(&mut self) -> f64;
}

impl GaussianExt for sampling::SeededRng {
    fn sample_gaussian(&mut self) -> f64 {
        use rand::Rng;
        self.sample(rand_distr::StandardNormal)
    }
}

/// Distance estimates on truncations of increasing radius, for vector
/// states of the full algebra whose vectors fit in the smallest ball.
pub fn full_distance_sequence<G: Group>(
    phi: &State,
    psi: &State,
    s: u32,
    lambdas: &[u32],
    opts: &DistanceOptions,
    cayley: &CayleyGraph<G>,
) -> Result<Vec<DistanceResult>> {
    lambdas
        .iter()
        .map(|&l| lip_distance(&phi.truncate(l, cayley)?, &psi.truncate(l, cayley)?, s, l, opts, cayley))
        .collect()
}

/// Largest number of real parameters [`brute_distance`] accepts.
pub const BRUTE_MAX_PARAMS: usize = 4;

const PATIENCE: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteOptions {
    /// Grid points per edge of each face of the cube [−1,1]^k.
    pub resolution: usize,
    /// Grid points refined by compass search.
    pub refine: usize,
    /// Compass search stops below this step.
    pub step_tol: f64,
    pub lip_scale: f64,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions { resolution: 24, refine: 8, step_tol: 1e-12, lip_scale: 1.0 }
    }
}

/// Exhaustive oracle for [`lip_distance`] on instances with at most
/// [`BRUTE_MAX_PARAMS`] real parameters.
pub fn brute_distance<G: Group>(
    phi: &State,
    psi: &State,
    s: u32,
    lambda: u32,
    opts: &BruteOptions,
    cayley: &CayleyGraph<G>,
) -> Result<f64> {
    let outer = cayley.ball(2 * lambda)?;
    let reps: Vec<Element> = inverse_pairs(outer.elements(), cayley).into_iter().map(|(z, _)| z).collect();
    brute_distance_on(phi, psi, s, lambda, &reps, opts, cayley)
}

/// [`brute_distance`] with symbol(z) = 0 off the pairs {z, z⁻¹}, z ∈ `reps`.
pub fn brute_distance_on<G: Group>(
    phi: &State,
    psi: &State,
    s: u32,
    lambda: u32,
    reps: &[Element],
    opts: &BruteOptions,
    cayley: &CayleyGraph<G>,
) -> Result<f64> {
    check_pair(phi, psi, lambda)?;
    let k = 2 * reps.len();
    if k > BRUTE_MAX_PARAMS {
        return Err(Error::InvalidParameter(format!(
            "brute force handles at most {BRUTE_MAX_PARAMS} real parameters, this instance has {k}"
        )));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let identity = cayley.identity();
    if reps.iter().any(|z| *z == identity) {
        return Err(Error::InvalidParameter("the identity carries no parameter".into()));
    }
    let ratio = |x: &[f64]| -> Result<f64> {
        let sym = AlgebraElement::from_terms(reps.iter().enumerate().flat_map(|(p, z)| {
            let a = Complex64::new(x[2 * p], x[2 * p + 1]);
            [(z.clone(), a), (cayley.inv(z), a.conj())]
        }));
        let t = ToeplitzOperator::new(lambda, sym, cayley)?;
        let lip = truncated_lipnorm(&t, s, cayley)? * opts.lip_scale;
        if lip == 0.0 {
            return Ok(0.0);
        }
        let diff = state_eval(phi, &t, cayley)? - state_eval(psi, &t, cayley)?;
        Ok(diff.re.abs() / lip)
    };
    // grid on the surface of the cube, projected to the sphere by homogeneity
    let n = opts.resolution.max(2);
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    for face in 0..k {
        for sign in [-1.0, 1.0] {
            let mut idx = vec![0usize; k - 1];
            loop {
                let mut x = Vec::with_capacity(k);
                let mut it = idx.iter();
                for d in 0..k {
                    if d == face {
                        x.push(sign);
                    } else {
                        let i = *it.next().unwrap();
                        x.push(-1.0 + 2.0 * i as f64 / (n - 1) as f64);
                    }
                }
                scored.push((ratio(&x)?, x));
                let mut d = 0;
                while d < idx.len() {
                    idx[d] += 1;
                    if idx[d] < n {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == idx.len() {
                    break;
                }
            }
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;
    let mut rng = sampling::rng(sampling::tag("brute_distance"));
    for (v0, x0) in scored.into_iter().take(opts.refine.max(1)) {
        let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut x: Vec<f64> = x0.iter().map(|v| v / norm).collect();
        let mut v = v0;
        let mut step = 2.0 / (n - 1) as f64;
        let mut misses = 0;
        while step > opts.step_tol {
            // coordinate directions plus a fresh batch of random ones
            let mut dirs: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
            for _ in 0..4 * k {
                let d: Vec<f64> = (0..k).map(|_| rng.sample_gaussian()).collect();
                let dn = d.iter().map(|a| a * a).sum::<f64>().sqrt();
                dirs.push(d.into_iter().map(|a| a / dn).collect());
            }
            let mut improved = false;
            for d in &dirs {
                for sgn in [1.0, -1.0] {
                    let cand: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + sgn * step * b).collect();
                    let cv = ratio(&cand)?;
                    if cv > v {
                        let cn = cand.iter().map(|a| a * a).sum::<f64>().sqrt();
                        x = cand.into_iter().map(|a| a / cn).collect();
                        v = cv;
                        improved = true;
                    }
                }
            }
            // near a ridge the ascent cone is thin, so retry fresh directions before shrinking
            if improved {
                misses = 0;
            } else {
                misses += 1;
                if misses >= PATIENCE {
                    step *= 0.5;
                    misses = 0;
                }
            }
        }
        best = best.max(v);
    }
    Ok(best)
}

/// The bridge N(a, b) = ‖a − r_Λ(b)‖/ε between C[G] and P_Λ C[G] P_Λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeSpec {
    pub epsilon: f64,
    pub lambda: u32,
    pub opnorm: OpNormOptions,
}

impl BridgeSpec {
    pub fn new(epsilon: f64, lambda: u32) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("bridge constant must be positive, got {epsilon}")));
        }
        Ok(BridgeSpec { epsilon, lambda, opnorm: OpNormOptions::default() })
    }

    /// q_Λ.
    pub fn forward<S: Scalar, G: Group>(&self, f: &AlgebraElement<S>, cayley: &CayleyGraph<G>) -> Result<ToeplitzOperator<S>> {
        compress(f, self.lambda, cayley)
    }

    /// r_Λ.
    pub fn backward<S: Scalar, G: Group>(&self, t: &ToeplitzOperator<S>, cayley: &CayleyGraph<G>) -> Result<AlgebraElement<S>> {
        reconstruct(t, cayley)
    }

    pub fn norm<S: Scalar, G: Group>(
        &self,
        a: &AlgebraElement<S>,
        b: &ToeplitzOperator<S>,
        cayley: &CayleyGraph<G>,
    ) -> Result<f64> {
        if b.radius() != self.lambda {
            return Err(Error::DomainMismatch(format!(
                "bridge at radius {} applied to a radius-{} operator",
                self.lambda,
                b.radius()
            )));
        }
        let diff = a.sub(&self.backward(b, cayley)?);
        Ok(opnorm(&diff, &self.opnorm, cayley)?.estimate / self.epsilon)
    }

    /// L(a, b) = L_s(a) ∨ L_{s,Λ}(b) ∨ N(a, b).
    pub fn combined_lipnorm<S: Scalar, G: Group>(
        &self,
        a: &AlgebraElement<S>,
        b: &ToeplitzOperator<S>,
        s: u32,
        cayley: &CayleyGraph<G>,
    ) -> Result<f64> {
        let la = lipnorm(a, s, &self.opnorm, cayley)?.estimate;
        let lb = truncated_lipnorm(b, s, cayley)?;
        Ok(la.max(lb).max(self.norm(a, b, cayley)?))
    }
}

pub fn bridge_norm<S: Scalar, G: Group>(
    a: &AlgebraElement<S>,
    b: &ToeplitzOperator<S>,
    epsilon: f64,
    cayley: &CayleyGraph<G>,
) -> Result<f64> {
    BridgeSpec::new(epsilon, b.radius())?.norm(a, b, cayley)
}

pub fn combined_lipnorm<S: Scalar, G: Group>(
    a: &AlgebraElement<S>,
    b: &ToeplitzOperator<S>,
    s: u32,
    epsilon: f64,
    cayley: &CayleyGraph<G>,
) -> Result<f64> {
    BridgeSpec::new(epsilon, b.radius())?.combined_lipnorm(a, b, s, cayley)
}

/// Budget for the ε searches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSearch {
    pub solver: SolverOptions,
    /// Compression radius standing in for the full operator norms in
    /// [`epsilon_full`]; `None` picks min(2Λ, largest radius with at most
    /// `compression_cap` elements), and never less than Λ.
    pub compression_radius: Option<u32>,
    pub compression_cap: usize,
}

impl Default for EpsilonSearch {
    fn default() -> Self {
        EpsilonSearch {
            solver: SolverOptions { starts: 8, max_iters: 200, ..SolverOptions::default() },
            compression_radius: None,
            compression_cap: 400,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EpsilonEstimate {
    /// max(probe_floor, ascent_value).
    pub value: f64,
    /// Best ratio over the basis probes δ_x.
    pub probe_floor: f64,
    pub best_probe: Option<Element>,
    pub ascent_value: f64,
    /// Symbol attaining `value`.
    pub witness: AlgebraElement<Complex64>,
    pub status: SolverStatus,
    pub starts: usize,
    pub max_iters: usize,
    pub evaluations: usize,
    /// Matrices are indexed by B_R for this R.
    pub compression_radius: u32,
}

/// ‖N x‖ / ‖D x‖ with N, D diagonal weightings of the same symbol frame.
struct DefectObjective {
    frame: SymbolFrame,
    num: Vec<f64>,
    den: Vec<f64>,
}

impl DefectObjective {
    fn weighted(&self, x: &[f64], w: &[f64]) -> Vec<Complex64> {
        w.iter().enumerate().map(|(k, wk)| Complex64::new(x[2 * k], x[2 * k + 1]) * wk).collect()
    }
}

impl RatioObjective for DefectObjective {
    fn dim(&self) -> usize {
        2 * self.frame.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = self.frame.norm(&self.weighted(x, &self.den));
        if d == 0.0 {
            return 0.0;
        }
        self.frame.norm(&self.weighted(x, &self.num)) / d
    }

    fn smoothed(&self, x: &[f64], smoothing: f64) -> Smoothed {
        let p = 1.0 / smoothing;
        let num = self.frame.schatten_norm(&self.weighted(x, &self.num), p);
        let den = self.frame.schatten_norm(&self.weighted(x, &self.den), p);
        let (n, d) = (num.value, den.value);
        let mut gradient = vec![0.0; x.len()];
        if d == 0.0 {
            return Smoothed { value: 0.0, exact: 0.0, gradient };
        }
        for k in 0..self.frame.len() {
            let (wn, wd) = (self.num[k], self.den[k]);
            let (gn, gd) = (num.gradient[k], den.gradient[k]);
            gradient[2 * k] = (wn * gn.re * d - n * wd * gd.re) / (d * d);
            gradient[2 * k + 1] = (wn * gn.im * d - n * wd * gd.im) / (d * d);
        }
        Smoothed { value: n / d, exact: num.exact / den.exact, gradient }
    }
}

fn defect_search<G: Group>(
    lambda: u32,
    s: u32,
    matrix_radius: u32,
    kernel: &FejerKernel,
    search: &EpsilonSearch,
    tag: &str,
    cayley: &CayleyGraph<G>,
) -> Result<EpsilonEstimate> {
    let outer = cayley.ball(2 * lambda)?;
    let ball = cayley.ball(matrix_radius)?;
    let identity = cayley.identity();
    let symbols: Vec<Element> = outer.elements().iter().filter(|z| **z != identity).cloned().collect();
    let num: Vec<f64> = symbols.iter().map(|z| 1.0 - kernel.value_f64(z)).collect();
    let den: Vec<f64> = symbols.iter().map(|z| (outer.length_of(z).unwrap() as f64).powi(s as i32)).collect();
    // δ_z is unitary (full) or a nonzero partial isometry (truncated), so its ratio is exact
    let mut probe_floor = 0.0;
    let mut best_probe = None;
    for k in 0..symbols.len() {
        let r = num[k] / den[k];
        if r > probe_floor {
            probe_floor = r;
            best_probe = Some(k);
        }
    }
    let frame = SymbolFrame::new(&ball, &symbols, cayley);
    let obj = DefectObjective { frame, num, den };
    let mut starts = Vec::new();
    if let Some(k) = best_probe {
        let mut x = vec![0.0; obj.dim()];
        x[2 * k] = 1.0;
        starts.push(x);
    }
    let mut rng = sampling::rng(derive_seed(search.solver.seed, &[sampling::tag(tag), lambda as u64, s as u64]));
    for _ in 0..search.solver.starts {
        starts.push((0..obj.dim()).map(|_| rng.sample_gaussian()).collect());
    }
    let to_symbol = |x: &[f64]| AlgebraElement::from_terms(symbols.iter().enumerate().map(|(k, z)| (z.clone(), Complex64::new(x[2 * k], x[2 * k + 1]))));
    let (ascent_value, status, evaluations, ascent_x) = match ratio_ascent(&obj, &starts, &search.solver) {
        Some(r) => (r.value, r.status, r.evaluations, Some(r.x)),
        None => (0.0, SolverStatus::Converged, 0, None),
    };
    let (value, witness) = match (&ascent_x, best_probe) {
        (Some(x), _) if ascent_value > probe_floor => (ascent_value, to_symbol(x)),
        (_, Some(k)) => (probe_floor, AlgebraElement::delta(symbols[k].clone())),
        _ => (0.0, AlgebraElement::zero()),
    };
    Ok(EpsilonEstimate {
        value,
        probe_floor,
        best_probe: best_probe.map(|k| symbols[k].clone()),
        ascent_value,
        witness,
        status,
        starts: starts.len(),
        max_iters: search.solver.max_iters,
        evaluations,
        compression_radius: matrix_radius,
    })
}

/// Empirical sup of ‖f − 𝓕_Λ f‖ / L_s(f) over non-scalar f supported in B_{2Λ}.
///
/// Full operator norms are replaced by compressions to B_R with R as in
/// [`EpsilonSearch::compression_radius`].
pub fn epsilon_full<G: Group>(cayley: &CayleyGraph<G>, lambda: u32, s: u32, search: &EpsilonSearch) -> Result<EpsilonEstimate> {
    let r = match search.compression_radius {
        Some(r) => r,
        None => (2 * lambda).min(cayley.radius_within(search.compression_cap, 2 * lambda)),
    }
    .max(lambda);
    let kernel = fejer_kernel(cayley, lambda)?;
    defect_search(lambda, s, r, &kernel, search, "epsilon_full", cayley)
}

/// Empirical sup of ‖T − q_Λ r_Λ T‖ / L_{s,Λ}(T) over non-scalar Toeplitz T.
pub fn epsilon_truncated<G: Group>(cayley: &CayleyGraph<G>, lambda: u32, s: u32, search: &EpsilonSearch) -> Result<EpsilonEstimate> {
    let kernel = fejer_kernel(cayley, lambda)?;
    defect_search(lambda, s, lambda, &kernel, search, "epsilon_truncated", cayley)
}

/// The quantum Gromov-Hausdorff bound 2·max(ε_full, ε_trunc).
pub fn gh_bound(eps_full: f64, eps_trunc: f64) -> Result<f64> {
    if !(eps_full >= 0.0 && eps_trunc >= 0.0) {
        return Err(Error::InvalidParameter(format!("ε values must be nonnegative, got {eps_full}, {eps_trunc}")));
    }
    Ok(2.0 * eps_full.max(eps_trunc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupSpec;
    use crate::linalg::CVector;

    type F = AlgebraElement<Complex64>;

    fn z1() -> CayleyGraph {
        CayleyGraph::new(GroupSpec::FreeAbelian(1))
    }

    fn e1(k: i64) -> Element {
        Element::new(&[k])
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basic_pair(g: &CayleyGraph) -> (State, State) {
        let phi = State::vector(F::delta(e1(0)), Domain::Truncated(1), g).unwrap();
        let psi = State::normalized_vector(F::delta(e1(0)).add(&F::delta(e1(1))), Domain::Truncated(1), g).unwrap();
        (phi, psi)
    }

    fn quick() -> DistanceOptions {
        DistanceOptions { solver: SolverOptions { starts: 4, ..SolverOptions::default() }, ..DistanceOptions::default() }
    }

    #[test]
    fn state_eval_examples() {
        let g = z1();
        let t = ToeplitzOperator::new(1, F::from_terms([(e1(0), c(0.5, 0.0)), (e1(1), c(2.0, 1.0)), (e1(-1), c(2.0, -1.0))]), &g).unwrap();
        let (phi, psi) = basic_pair(&g);
        assert_eq!(state_eval(&phi, &t, &g).unwrap(), c(0.5, 0.0));
        let v = state_eval(&psi, &t, &g).unwrap();
        assert!((v - c(2.5, 0.0)).norm() < 1e-14);
        let id = ToeplitzOperator::<Complex64>::identity(1, &g);
        assert!((state_eval(&psi, &id, &g).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let rho = CMatrix::identity(3, 3) / c(3.0, 0.0);
        let mixed = State::density(rho, 1, &g).unwrap();
        assert!((state_eval(&mixed, &id, &g).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let full = State::vector(F::delta(e1(0)), Domain::Full, &g).unwrap();
        assert!(matches!(state_eval(&full, &t, &g), Err(Error::DomainMismatch(_))));
        assert!(matches!(state_eval(&phi, &F::delta(e1(0)), &g), Err(Error::DomainMismatch(_))));
        assert_eq!(state_eval(&full, &F::delta(e1(0)), &g).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn invalid_states_are_rejected() {
        let g = z1();
        assert!(State::vector(F::monomial(e1(0), c(2.0, 0.0)), Domain::Full, &g).is_err());
        assert!(State::vector(F::delta(e1(2)), Domain::Truncated(1), &g).is_err());
        let not_psd = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0)]));
        assert!(State::density(not_psd, 1, &g).is_err());
        assert!(State::density(CMatrix::identity(3, 3), 1, &g).is_err());
    }

    #[test]
    fn distance_examples() {
        let g = z1();
        let (phi, psi) = basic_pair(&g);
        let d = lip_distance(&phi, &psi, 1, 1, &quick(), &g).unwrap();
        assert!(d.value >= std::f64::consts::FRAC_1_SQRT_2 - 1e-8, "{}", d.value);
        let lip = truncated_lipnorm(&d.witness, 1, &g).unwrap();
        assert!(lip <= 1.0 + 1e-8);
        assert!(d.witness.is_self_adjoint(&g));
        let diff = state_eval(&phi, &d.witness, &g).unwrap() - state_eval(&psi, &d.witness, &g).unwrap();
        assert!((diff.re - d.value).abs() < 1e-10);
        let same = lip_distance(&phi, &phi, 1, 1, &quick(), &g).unwrap();
        assert_eq!(same.value, 0.0);
        let scaled = lip_distance(&phi, &psi, 1, 1, &DistanceOptions { lip_scale: 4.0, ..quick() }, &g).unwrap();
        assert!((scaled.value - d.value / 4.0).abs() < 1e-9);
    }

    #[test]
    fn brute_examples() {
        let g = z1();
        let (phi, psi) = basic_pair(&g);
        let opts = BruteOptions::default();
        assert_eq!(brute_distance(&phi, &phi, 1, 1, &opts, &g).unwrap(), 0.0);
        let one = brute_distance_on(&phi, &psi, 1, 1, &[e1(1)], &opts, &g).unwrap();
        assert!((one - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9, "{one}");
        let full = brute_distance(&phi, &psi, 1, 1, &opts, &g).unwrap();
        let solver = lip_distance(&phi, &psi, 1, 1, &quick(), &g).unwrap();
        assert!((full - solver.value).abs() <= 1e-4, "{full} vs {}", solver.value);
        let big = CayleyGraph::new(GroupSpec::FreeAbelian(2));
        let p = State::vector(F::delta(big.identity()), Domain::Truncated(1), &big).unwrap();
        assert!(matches!(brute_distance(&p, &p, 1, 1, &opts, &big), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bridge_examples() {
        let g = z1();
        let id = ToeplitzOperator::<Complex64>::identity(2, &g);
        assert_eq!(bridge_norm(&F::delta(e1(0)), &id, 0.3, &g).unwrap(), 0.0);
        let a = F::from_terms([(e1(1), c(1.0, 0.0)), (e1(-1), c(1.0, 0.0))]);
        let zero = ToeplitzOperator::zero(2);
        let n = bridge_norm(&a, &zero, 0.5, &g).unwrap();
        let direct = opnorm(&a, &OpNormOptions::default(), &g).unwrap().estimate;
        assert!((n - direct / 0.5).abs() < 1e-12);
        let f = F::from_terms([(e1(2), c(1.0, 2.0)), (e1(-3), c(0.5, 0.0))]);
        let q = compress(&f, 2, &g).unwrap();
        let smoothed = fejer_kernel(&g, 2).unwrap().apply(&f);
        assert!(bridge_norm(&smoothed, &q, 0.1, &g).unwrap() < 1e-12);
        assert!(BridgeSpec::new(0.0, 1).is_err());
    }

    #[test]
    fn combined_examples() {
        let g = z1();
        let id = ToeplitzOperator::<Complex64>::identity(2, &g);
        assert_eq!(combined_lipnorm(&F::delta(e1(0)), &id, 1, 0.2, &g).unwrap(), 0.0);
        for lambda in 1..=3u32 {
            let f = F::delta(e1(1));
            let q = compress(&f, lambda, &g).unwrap();
            let defect = 1.0 / (2 * lambda + 1) as f64;
            let v = combined_lipnorm(&f, &q, 1, defect, &g).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
        let b = compress(&F::delta(e1(2)), 1, &g).unwrap();
        let v = combined_lipnorm(&F::zero(), &b, 1, 0.5, &g).unwrap();
        let r = reconstruct(&b, &g).unwrap();
        let expected = truncated_lipnorm(&b, 1, &g).unwrap().max(opnorm(&r, &OpNormOptions::default(), &g).unwrap().estimate / 0.5);
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn epsilon_probe_floors() {
        let g = z1();
        let search = EpsilonSearch { solver: SolverOptions { starts: 2, max_iters: 30, ..SolverOptions::default() }, ..EpsilonSearch::default() };
        for lambda in [1u32, 2, 4] {
            let floor = 1.0 / (2 * lambda + 1) as f64;
            let full = epsilon_full(&g, lambda, 2, &search).unwrap();
            assert!((full.probe_floor - floor).abs() < 1e-15);
            assert!(full.value >= full.probe_floor);
            assert_eq!(full.best_probe.map(|z| z.coords()[0].abs()), Some(1));
            let trunc = epsilon_truncated(&g, lambda, 1, &search).unwrap();
            assert!(trunc.value >= floor - 1e-15);
            assert!(trunc.witness.coefficient(&g.identity()) == c(0.0, 0.0));
        }
    }

    fn check_direction(obj: &dyn RatioObjective, x: &[f64]) {
        let level = 0.05;
        let here = obj.smoothed(x, level);
        assert!((here.exact - obj.value(x)).abs() < 1e-12);
        let d = here.gradient;
        let h = 1e-6;
        for i in 0..x.len() {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            let fd = (obj.smoothed(&up, level).value - obj.smoothed(&down, level).value) / (2.0 * h);
            assert!((fd - d[i]).abs() < 1e-5 * (1.0 + fd.abs()), "component {i}: {fd} vs {}", d[i]);
        }
    }

    #[test]
    fn objective_gradients_match_finite_differences() {
        let g = CayleyGraph::new(GroupSpec::FreeAbelian(2));
        let ball = g.ball(1).unwrap();
        let outer = g.ball(2).unwrap();
        let kernel = fejer_kernel(&g, 1).unwrap();
        let symbols: Vec<Element> = outer.elements()[1..].to_vec();
        let obj = DefectObjective {
            frame: SymbolFrame::new(&ball, &symbols, &g),
            num: symbols.iter().map(|z| 1.0 - kernel.value_f64(z)).collect(),
            den: symbols.iter().map(|z| outer.length_of(z).unwrap() as f64).collect(),
        };
        let x: Vec<f64> = (0..obj.dim()).map(|i| (i as f64 * 0.73).sin()).collect();
        check_direction(&obj, &x);
        let pairs = inverse_pairs(outer.elements(), &g);
        let mut syms = Vec::new();
        for (z, zi) in &pairs {
            syms.push(z.clone());
            syms.push(zi.clone());
        }
        let obj = DistanceObjective {
            frame: SymbolFrame::new(&ball, &syms, &g),
            pairs: (0..pairs.len()).map(|p| (2 * p, 2 * p + 1)).collect(),
            weights: pairs.iter().map(|(z, _)| outer.length_of(z).unwrap() as f64).collect(),
            c: (0..2 * pairs.len()).map(|i| (i as f64 * 1.3).cos()).collect(),
        };
        let x: Vec<f64> = (0..obj.dim()).map(|i| (i as f64 * 0.41 + 0.2).sin()).collect();
        check_direction(&obj, &x);
    }

    #[test]
    fn gh_bound_examples() {
        assert!((gh_bound(0.2, 0.3).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(gh_bound(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(gh_bound(0.1, 0.4).unwrap(), gh_bound(0.4, 0.1).unwrap());
        assert!(gh_bound(-1.0, 0.0).is_err());
    }
}
