//! Symbol frames and smoothed ratio ascent.
//!
//! A [`SymbolFrame`] records, for a ball B and a list of symbol elements z,
//! which matrix cells (x, y) ∈ B×B satisfy xy⁻¹ = z. Every operator the
//! searches touch (compressions P_B λ(f) P_B, Toeplitz matrices, their
//! derivatives and defects) is "coefficient vector → matrix" through a frame.
//!
//! [`ratio_ascent`] maximizes a scale-invariant ratio over real parameter
//! vectors. The spectral norm is replaced by a Schatten p-norm whose exponent
//! grows level by level; each level is climbed on the smoothed ratio, and the
//! best exact ratio seen is what gets reported, so every value is attained by
//! a concrete parameter vector.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cayley::{Ball, CayleyGraph, Element, Group};
use crate::linalg::{singular_system, spectral_norm, CMatrix};

/// A smoothed norm, the exact norm it bounds, and the smoothed gradient.
#[derive(Clone, Debug)]
pub struct SmoothNorm {
    pub value: f64,
    pub exact: f64,
    pub gradient: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct SymbolFrame {
    dim: usize,
    symbols: Vec<Element>,
    index: HashMap<Element, usize>,
    cells: Vec<Vec<(usize, usize)>>,
}

impl SymbolFrame {
    /// Frame of matrices indexed by `ball` with symbols restricted to `symbols`.
    pub fn new<G: Group>(ball: &Ball, symbols: &[Element], cayley: &CayleyGraph<G>) -> Self {
        let index: HashMap<Element, usize> = symbols.iter().cloned().enumerate().map(|(i, z)| (z, i)).collect();
        let mut cells = vec![Vec::new(); symbols.len()];
        let inverses: Vec<Element> = ball.elements().iter().map(|y| cayley.inv(y)).collect();
        for (r, x) in ball.elements().iter().enumerate() {
            for (c, yinv) in inverses.iter().enumerate() {
                if let Some(&k) = index.get(&cayley.mul(x, yinv)) {
                    cells[k].push((r, c));
                }
            }
        }
        SymbolFrame { dim: ball.len(), symbols: symbols.to_vec(), index, cells }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> &[Element] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, z: &Element) -> Option<usize> {
        self.index.get(z).copied()
    }

    pub fn cells(&self, k: usize) -> &[(usize, usize)] {
        &self.cells[k]
    }

    /// Matrix with `coeffs[k]` in every cell of symbol k.
    pub fn matrix(&self, coeffs: &[Complex64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (k, cells) in self.cells.iter().enumerate() {
            let a = coeffs[k];
            if a != Complex64::new(0.0, 0.0) {
                for &(r, c) in cells {
                    m[(r, c)] = a;
                }
            }
        }
        m
    }

    /// `Σ_{(r,c) ∈ cells(k)} conj(u_r)·M_rc·v_c / coeff_k`, i.e. ∂(u*Mv)/∂coeff_k.
    fn pairing(&self, u: impl Fn(usize) -> Complex64, v: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        self.cells
            .iter()
            .map(|cells| cells.iter().map(|&(r, c)| u(r).conj() * v(c)).sum())
            .collect()
    }

    /// Schatten p-norm (Σ σ_iᵖ)^{1/p} and its complex gradient g with
    /// dF = Re Σ_k conj(g_k)·d coeff_k. Also returns the spectral norm σ_1.
    ///
    /// σ_1 ≤ ‖M‖_p ≤ n^{1/p} σ_1, and ‖·‖_p is a norm, so ratios against it stay quasiconcave.
    pub fn schatten_norm(&self, coeffs: &[Complex64], p: f64) -> SmoothNorm {
        let svd = singular_system(&self.matrix(coeffs));
        let top = svd.values.first().copied().unwrap_or(0.0);
        let mut gradient = vec![Complex64::new(0.0, 0.0); self.len()];
        if top == 0.0 {
            return SmoothNorm { value: 0.0, exact: 0.0, gradient };
        }
        let sum: f64 = svd.values.iter().map(|s| (s / top).powf(p)).sum();
        let value = top * sum.powf(1.0 / p);
        for (i, s) in svd.values.iter().enumerate() {
            let w = (s / value).powf(p - 1.0);
            if w < 1e-16 {
                continue;
            }
            let g = self.pairing(|r| svd.left[(r, i)], |c| svd.right[(c, i)]);
            for (acc, gk) in gradient.iter_mut().zip(g) {
                *acc += gk.conj() * w;
            }
        }
        SmoothNorm { value, exact: top, gradient }
    }

    pub fn norm(&self, coeffs: &[Complex64]) -> f64 {
        spectral_norm(&self.matrix(coeffs))
    }
}

/// Search budget and schedule shared by the distance solver and ε searches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Random starts (deterministic starts are added on top).
    pub starts: usize,
    /// Ascent iterations per start.
    pub max_iters: usize,
    /// Initial step length on the unit sphere.
    pub step: f64,
    /// Step multiplier after an accepted step.
    pub step_growth: f64,
    /// Initial smoothing level 1/p for the Schatten p-norm.
    pub smoothing: f64,
    /// Smoothing floor; finishing the level below it ends a start as converged.
    pub smoothing_min: f64,
    /// Smallest step tried before tightening the smoothing.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            starts: 32,
            max_iters: 300,
            step: 0.5,
            step_growth: 2.0,
            smoothing: 1e-2,
            smoothing_min: 1e-10,
            tol: 1e-13,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Converged,
    IterationCap,
}

/// A scale-invariant objective on real parameter vectors.
pub trait RatioObjective: Sync {
    fn dim(&self) -> usize;
    /// Exact objective value at `x`.
    fn value(&self, x: &[f64]) -> f64;
    /// Smoothed surrogate at level `smoothing`, with the exact value at the same point.
    fn smoothed(&self, x: &[f64], smoothing: f64) -> Smoothed;
}

#[derive(Clone, Debug)]
pub struct Smoothed {
    pub value: f64,
    pub exact: f64,
    pub gradient: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub status: SolverStatus,
    pub evaluations: usize,
}

fn normalize(x: &mut [f64]) -> bool {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= n);
    true
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Component of the gradient tangent to the sphere at `x` (|x| = 1).
fn tangential(g: &[f64], x: &[f64]) -> Vec<f64> {
    let radial = dot(g, x);
    g.iter().zip(x).map(|(gi, xi)| gi - radial * xi).collect()
}

/// L-BFGS two-loop recursion: an approximation of H⁻¹g from the stored pairs.
fn two_loop(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (sk, yk) in memory.iter().rev() {
        let a = dot(sk, &q) / dot(yk, sk);
        q.iter_mut().zip(yk).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((sk, yk)) = memory.back() {
        let gamma = dot(sk, yk) / dot(yk, yk);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((sk, yk), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = dot(yk, &q) / dot(yk, sk);
        q.iter_mut().zip(sk).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q
}

const MEMORY: usize = 8;

/// Ascent from one start.
///
/// Each smoothing level is climbed by L-BFGS on the sphere with a backtracking
/// line search on the smoothed ratio; the level is tightened tenfold once no
/// step makes progress.
pub fn ascend<O: RatioObjective + ?Sized>(obj: &O, start: &[f64], opts: &SolverOptions) -> AscentResult {
    let mut x = start.to_vec();
    if !normalize(&mut x) {
        return AscentResult { x, value: 0.0, status: SolverStatus::Converged, evaluations: 0 };
    }
    let mut smoothing = opts.smoothing;
    let mut here = obj.smoothed(&x, smoothing);
    let mut evaluations = 1;
    let mut best = (here.exact, x.clone());
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut status = SolverStatus::IterationCap;
    for _ in 0..opts.max_iters {
        let g = tangential(&here.gradient, &x);
        let mut d = tangential(&two_loop(&g, &memory), &x);
        let mut slope = dot(&g, &d);
        if memory.is_empty() || !(slope > 0.0) {
            memory.clear();
            let gn = dot(&g, &g).sqrt();
            d = g.iter().map(|v| v * opts.step / gn).collect();
            slope = dot(&g, &d);
        }
        let dn = dot(&d, &d).sqrt();
        let mut progressed = false;
        if slope > 0.0 && dn.is_finite() {
            let mut t = 1.0_f64.min(1.0 / dn);
            while t * dn >= opts.tol {
                let mut cand: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
                normalize(&mut cand);
                let next = obj.smoothed(&cand, smoothing);
                evaluations += 1;
                if next.value > here.value + 1e-4 * t * slope || (next.value > here.value && t * dn < 1e-8) {
                    progressed = next.value - here.value > 1e-15 * here.value.abs();
                    if next.exact > best.0 {
                        best = (next.exact, cand.clone());
                    }
                    let sk: Vec<f64> = cand.iter().zip(&x).map(|(a, b)| a - b).collect();
                    // ascent: curvature pairs of the negated objective
                    let gnew = tangential(&next.gradient, &cand);
                    let yk: Vec<f64> = g.iter().zip(&gnew).map(|(a, b)| a - b).collect();
                    if dot(&sk, &yk) > 1e-12 * dot(&sk, &sk).sqrt() * dot(&yk, &yk).sqrt() {
                        if memory.len() == MEMORY {
                            memory.pop_front();
                        }
                        memory.push_back((sk, yk));
                    }
                    x = cand;
                    here = next;
                    break;
                }
                t *= 0.5;
            }
        }
        if !progressed {
            smoothing *= 0.1;
            if smoothing < opts.smoothing_min {
                status = SolverStatus::Converged;
                break;
            }
            here = obj.smoothed(&x, smoothing);
            evaluations += 1;
            memory.clear();
        }
    }
    AscentResult { x: best.1, value: best.0, status, evaluations }
}

/// Best result over all starts; ties keep the earliest start.
pub fn ratio_ascent<O: RatioObjective + ?Sized>(obj: &O, starts: &[Vec<f64>], opts: &SolverOptions) -> Option<AscentResult> {
    use rayon::prelude::*;
    let results: Vec<AscentResult> = starts.par_iter().map(|s| ascend(obj, s, opts)).collect();
    let evaluations = results.iter().map(|r| r.evaluations).sum();
    let mut best: Option<AscentResult> = None;
    for r in results {
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.map(|mut b| {
        b.evaluations = evaluations;
        b
    })
}

/// Complex coefficient vector ↔ real parameter vector (re parts, then im parts).
pub fn split_complex(a: &[Complex64]) -> Vec<f64> {
    a.iter().map(|z| z.re).chain(a.iter().map(|z| z.im)).collect()
}

pub fn join_complex(x: &[f64]) -> Vec<Complex64> {
    let k = x.len() / 2;
    (0..k).map(|i| Complex64::new(x[i], x[k + i])).collect()
}
