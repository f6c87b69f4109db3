//! The truncated operator system P_Λ C[G] P_Λ.
//!
//! Its elements are Toeplitz-type matrices (a_{xy⁻¹})_{x,y ∈ B_Λ}, stored by
//! their symbol a on B_{2Λ}. The compression q_Λ and reconstruction r_Λ are
//! maps between C[G] and this space; r_Λ ∘ q_Λ is the Fejér multiplier.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cayley::{CayleyGraph, Group};
use crate::error::{Error, Result};
use crate::groupalg::{compression, fejer_kernel, AlgebraElement, FejerKernel};
use crate::linalg::{quadratic_form, spectral_norm, CMatrix, CVector};
use crate::scalar::Scalar;

/// An element of P_Λ C[G] P_Λ, given by its symbol supported in B_{2Λ}.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzOperator<S: Scalar> {
    radius: u32,
    symbol: AlgebraElement<S>,
}

impl<S: Scalar> ToeplitzOperator<S> {
    /// Checks that the symbol lives in B_{2Λ}.
    pub fn new<G: Group>(radius: u32, symbol: AlgebraElement<S>, cayley: &CayleyGraph<G>) -> Result<Self> {
        let outer = cayley.ball(2 * radius)?;
        if let Some(z) = symbol.support().find(|z| !outer.contains(z)) {
            return Err(Error::Structural(format!("symbol entry {z:?} lies outside B_{}", 2 * radius)));
        }
        Ok(ToeplitzOperator { radius, symbol })
    }

    pub fn identity<G: Group>(radius: u32, cayley: &CayleyGraph<G>) -> Self {
        ToeplitzOperator { radius, symbol: AlgebraElement::delta(cayley.identity()) }
    }

    pub fn zero(radius: u32) -> Self {
        ToeplitzOperator { radius, symbol: AlgebraElement::zero() }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn symbol(&self) -> &AlgebraElement<S> {
        &self.symbol
    }

    pub fn into_symbol(self) -> AlgebraElement<S> {
        self.symbol
    }

    /// Multiple of the identity matrix.
    pub fn is_scalar<G: Group>(&self, cayley: &CayleyGraph<G>) -> bool {
        self.symbol.is_scalar(&cayley.identity())
    }

    /// symbol(z⁻¹) = conj(symbol(z)) for every z.
    pub fn is_self_adjoint<G: Group>(&self, cayley: &CayleyGraph<G>) -> bool {
        self.symbol.iter().all(|(z, c)| self.symbol.coefficient(&cayley.inv(z)) == c.conj())
            && self.symbol.support().all(|z| self.symbol.iter().any(|(w, _)| *w == cayley.inv(z)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_radius(other)?;
        Ok(ToeplitzOperator { radius: self.radius, symbol: self.symbol.add(&other.symbol) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_radius(other)?;
        Ok(ToeplitzOperator { radius: self.radius, symbol: self.symbol.sub(&other.symbol) })
    }

    pub fn scale(&self, c: &S) -> Self {
        ToeplitzOperator { radius: self.radius, symbol: self.symbol.scale(c) }
    }

    fn same_radius(&self, other: &Self) -> Result<()> {
        if self.radius != other.radius {
            return Err(Error::Structural(format!(
                "Toeplitz operators of radius {} and {} do not share a space",
                self.radius, other.radius
            )));
        }
        Ok(())
    }

    pub fn to_c64(&self) -> ToeplitzOperator<Complex64> {
        ToeplitzOperator { radius: self.radius, symbol: self.symbol.to_c64() }
    }
}

/// q_Λ(f) = P_Λ λ(f) P_Λ: the symbol of f restricted to B_{2Λ}.
pub fn compress<S: Scalar, G: Group>(f: &AlgebraElement<S>, radius: u32, cayley: &CayleyGraph<G>) -> Result<ToeplitzOperator<S>> {
    let outer = cayley.ball(2 * radius)?;
    Ok(ToeplitzOperator { radius, symbol: f.restrict(|z| outer.contains(z)) })
}

/// The #B_Λ × #B_Λ matrix (symbol(xy⁻¹)).
pub fn materialize<S: Scalar, G: Group>(t: &ToeplitzOperator<S>, cayley: &CayleyGraph<G>) -> Result<DMatrix<S>> {
    let ball = cayley.ball(t.radius)?;
    Ok(compression(&t.symbol, &ball, cayley))
}

pub fn materialize_c64<S: Scalar, G: Group>(t: &ToeplitzOperator<S>, cayley: &CayleyGraph<G>) -> Result<CMatrix> {
    Ok(materialize(t, cayley)?.map(|v| v.to_c64()))
}

/// d_Λˢ: symbol(z) ↦ ℓ(z)ˢ symbol(z).
pub fn truncated_derivative<S: Scalar, G: Group>(
    t: &ToeplitzOperator<S>,
    s: u32,
    cayley: &CayleyGraph<G>,
) -> Result<ToeplitzOperator<S>> {
    Ok(ToeplitzOperator { radius: t.radius, symbol: t.symbol.derivative(s, cayley)? })
}

/// L_{s,Λ}(T) = ‖d_Λˢ T‖.
pub fn truncated_lipnorm<S: Scalar, G: Group>(t: &ToeplitzOperator<S>, s: u32, cayley: &CayleyGraph<G>) -> Result<f64> {
    Ok(spectral_norm(&materialize_c64(&truncated_derivative(t, s, cayley)?, cayley)?))
}

/// r_Λ(T) = Σ_x symbol(x) F_Λ(x) δ_x with a prebuilt kernel.
pub fn reconstruct_with<S: Scalar>(t: &ToeplitzOperator<S>, kernel: &FejerKernel) -> Result<AlgebraElement<S>> {
    if kernel.radius() != t.radius {
        return Err(Error::Structural(format!(
            "Fejér kernel of radius {} applied to a radius-{} operator",
            kernel.radius(),
            t.radius
        )));
    }
    Ok(kernel.apply(&t.symbol))
}

pub fn reconstruct<S: Scalar, G: Group>(t: &ToeplitzOperator<S>, cayley: &CayleyGraph<G>) -> Result<AlgebraElement<S>> {
    reconstruct_with(t, &fejer_kernel(cayley, t.radius)?)
}

/// [P_Λ D P_Λ, T] with entries (ℓ(x) − ℓ(y))·symbol(xy⁻¹).
pub fn dirac_commutator<S: Scalar, G: Group>(t: &ToeplitzOperator<S>, cayley: &CayleyGraph<G>) -> Result<DMatrix<S>> {
    let ball = cayley.ball(t.radius)?;
    let m = compression(&t.symbol, &ball, cayley);
    let len = |i: usize| ball.lengths()[i] as i64;
    Ok(DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let w = len(i) - len(j);
        let scaled = S::from_u64(w.unsigned_abs()) * m[(i, j)].clone();
        if w < 0 {
            -scaled
        } else {
            scaled
        }
    }))
}

/// Norm of the commutator seminorm L'_Λ(T) = ‖[P_Λ D P_Λ, T]‖.
pub fn commutator_seminorm<S: Scalar, G: Group>(t: &ToeplitzOperator<S>, cayley: &CayleyGraph<G>) -> Result<f64> {
    Ok(spectral_norm(&dirac_commutator(t, cayley)?.map(|v| v.to_c64())))
}

/// ⟨ξ, λ(g) ξ⟩ = Σ_{x,y} conj(ξ(x)) g(xy⁻¹) ξ(y) for finitely supported ξ.
pub fn vector_pairing<S: Scalar, G: Group>(
    xi: &AlgebraElement<Complex64>,
    g: &AlgebraElement<S>,
    cayley: &CayleyGraph<G>,
) -> Complex64 {
    let g = g.to_c64();
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, a) in xi.iter() {
        for (y, b) in xi.iter() {
            let c = g.coefficient(&cayley.mul(x, &cayley.inv(y)));
            acc += a.conj() * c * b;
        }
    }
    acc
}

/// |Σ_α ⟨P_Λ U_α ξ, T P_Λ U_α ξ⟩ − #B_Λ ⟨ξ, λ(r_Λ T) ξ⟩| with (U_α ξ)(x) = ξ(xα⁻¹).
///
/// The α-sum runs over all of B_pad; it is an error if some α outside B_pad
/// would contribute.
pub fn averaging_check<S: Scalar, G: Group>(
    t: &ToeplitzOperator<S>,
    xi: &AlgebraElement<Complex64>,
    pad: u32,
    cayley: &CayleyGraph<G>,
) -> Result<f64> {
    if xi.is_empty() {
        return Ok(0.0);
    }
    let ball = cayley.ball(t.radius)?;
    let alphas = cayley.ball(pad)?;
    // U_α ξ meets B_Λ iff α = x'⁻¹x with x' ∈ supp ξ, x ∈ B_Λ
    for xp in xi.support() {
        let xpinv = cayley.inverse(xp)?;
        for x in ball.elements() {
            let alpha = cayley.mul(&xpinv, x);
            if !alphas.contains(&alpha) {
                return Err(Error::Structural(format!(
                    "pad {pad} misses contributing translation {alpha:?}"
                )));
            }
        }
    }
    let m = materialize_c64(t, cayley)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    for alpha in alphas.elements() {
        let ainv = cayley.inv(alpha);
        let v = CVector::from_iterator(ball.len(), ball.elements().iter().map(|x| xi.coefficient(&cayley.mul(x, &ainv))));
        if v.iter().any(|c| c.norm_sqr() > 0.0) {
            lhs += quadratic_form(&v, &m, &v);
        }
    }
    let r = reconstruct(t, cayley)?;
    let rhs = vector_pairing(xi, &r, cayley) * ball.len() as f64;
    Ok((lhs - rhs).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationDefect {
    /// ‖T − q_Λ r_Λ T‖.
    pub defect_norm: f64,
    /// L_{s,Λ}(T).
    pub lip: f64,
    pub ratio: f64,
}

/// T − q_Λ r_Λ T, whose symbol is (1 − F_Λ(z))·symbol(z).
pub fn defect_operator<S: Scalar>(t: &ToeplitzOperator<S>, kernel: &FejerKernel) -> Result<ToeplitzOperator<S>> {
    let r = reconstruct_with(t, kernel)?;
    Ok(ToeplitzOperator { radius: t.radius, symbol: t.symbol.sub(&r) })
}

pub fn truncation_defect<S: Scalar, G: Group>(
    t: &ToeplitzOperator<S>,
    s: u32,
    cayley: &CayleyGraph<G>,
) -> Result<TruncationDefect> {
    if t.is_scalar(cayley) {
        return Err(Error::UndefinedRatio("scalar operators have zero Lip-norm".into()));
    }
    let kernel = fejer_kernel(cayley, t.radius)?;
    let d = defect_operator(t, &kernel)?;
    let defect_norm = spectral_norm(&materialize_c64(&d, cayley)?);
    let lip = truncated_lipnorm(t, s, cayley)?;
    Ok(TruncationDefect { defect_norm, lip, ratio: defect_norm / lip })
}
