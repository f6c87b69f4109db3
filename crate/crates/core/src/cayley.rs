//! Finitely generated groups, word lengths and Cayley-graph balls.
//!
//! Elements are integer tuples in a normal form that is unique per group
//! element, so multiplication is O(1) and elements hash exactly. Any group
//! that can provide such a normal form plugs in through [`Group`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default upper bound on the number of elements of a single ball.
pub const DEFAULT_BALL_CAP: usize = 200_000;

/// A group element in normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub SmallVec<[i64; 4]>);

impl Element {
    pub fn new(coords: &[i64]) -> Self {
        Element(SmallVec::from_slice(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl From<&[i64]> for Element {
    fn from(c: &[i64]) -> Self {
        Element::new(c)
    }
}

impl<const N: usize> From<[i64; N]> for Element {
    fn from(c: [i64; N]) -> Self {
        Element::new(&c)
    }
}

/// A finitely generated group with a symmetric generating set and unique normal forms.
///
/// Implementors only supply the raw group law; validation of element shape
/// happens in [`CayleyGraph`].
pub trait Group: Send + Sync + fmt::Debug {
    /// Selection key, e.g. `z:2`.
    fn key(&self) -> String;
    /// Number of integer coordinates in the normal form.
    fn arity(&self) -> usize;
    fn identity(&self) -> Element;
    fn multiply(&self, g: &Element, h: &Element) -> Element;
    fn inverse(&self, g: &Element) -> Element;
    /// Symmetric generating set, closed under inverse and without the identity.
    fn generators(&self) -> Vec<Element>;

    fn is_valid(&self, g: &Element) -> bool {
        g.dim() == self.arity()
    }
}

/// The built-in polynomial-growth groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupSpec {
    /// Z^d with the standard generators ±e_i.
    FreeAbelian(u32),
    /// Integer Heisenberg group, (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x·y').
    Heisenberg,
}

impl GroupSpec {
    pub fn integers(d: u32) -> Self {
        GroupSpec::FreeAbelian(d)
    }
}

impl Group for GroupSpec {
    fn key(&self) -> String {
        match self {
            GroupSpec::FreeAbelian(d) => format!("z:{d}"),
            GroupSpec::Heisenberg => "heisenberg".to_string(),
        }
    }

    fn arity(&self) -> usize {
        match self {
            GroupSpec::FreeAbelian(d) => *d as usize,
            GroupSpec::Heisenberg => 3,
        }
    }

    fn identity(&self) -> Element {
        Element(SmallVec::from_elem(0, self.arity()))
    }

    fn multiply(&self, g: &Element, h: &Element) -> Element {
        match self {
            GroupSpec::FreeAbelian(_) => Element(g.0.iter().zip(h.0.iter()).map(|(a, b)| a + b).collect()),
            GroupSpec::Heisenberg => {
                let (a, b) = (&g.0, &h.0);
                Element::new(&[a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]])
            }
        }
    }

    fn inverse(&self, g: &Element) -> Element {
        match self {
            GroupSpec::FreeAbelian(_) => Element(g.0.iter().map(|a| -a).collect()),
            GroupSpec::Heisenberg => {
                let a = &g.0;
                Element::new(&[-a[0], -a[1], a[0] * a[1] - a[2]])
            }
        }
    }

    fn generators(&self) -> Vec<Element> {
        let n = self.arity();
        let axes = match self {
            GroupSpec::FreeAbelian(_) => n,
            GroupSpec::Heisenberg => 2,
        };
        let mut gens = Vec::with_capacity(2 * axes);
        for i in 0..axes {
            for sign in [1, -1] {
                let mut c: SmallVec<[i64; 4]> = SmallVec::from_elem(0, n);
                c[i] = sign;
                gens.push(Element(c));
            }
        }
        gens
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupSpec> for String {
    fn from(g: GroupSpec) -> String {
        g.to_string()
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("heisenberg") {
            return Ok(GroupSpec::Heisenberg);
        }
        if let Some(d) = s.strip_prefix("z:") {
            let d: u32 = d
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad dimension in group key `{s}`")))?;
            if d == 0 {
                return Err(Error::InvalidParameter("z:<d> needs d >= 1".into()));
            }
            return Ok(GroupSpec::FreeAbelian(d));
        }
        Err(Error::InvalidParameter(format!(
            "unknown group `{s}` (expected `z:<d>` or `heisenberg`)"
        )))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Closed word-metric ball around the identity, in BFS layer order with a
/// lexicographic tie-break inside each layer.
///
/// Because of this ordering `B_r` is always a prefix of `B_R` for `r <= R`.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: u32,
    elements: Vec<Element>,
    lengths: Vec<u32>,
    index: HashMap<Element, usize>,
    /// `layer_ends[k]` = #B_k.
    layer_ends: Vec<usize>,
}

impl Ball {
    fn singleton(identity: Element) -> Self {
        let mut index = HashMap::new();
        index.insert(identity.clone(), 0);
        Ball { radius: 0, elements: vec![identity], lengths: vec![0], index, layer_ends: vec![1] }
    }

    /// Continue the BFS up to `radius`.
    fn grow<G: Group + ?Sized>(&mut self, group: &G, radius: u32, cap: usize) -> Result<()> {
        let gens = group.generators();
        while self.radius < radius {
            let start = if self.radius == 0 { 0 } else { self.layer_ends[self.radius as usize - 1] };
            let end = self.elements.len();
            let mut fresh: HashSet<Element> = HashSet::new();
            for g in &self.elements[start..end] {
                for s in &gens {
                    let h = group.multiply(g, s);
                    if !self.index.contains_key(&h) {
                        fresh.insert(h);
                    }
                }
            }
            let next = self.radius + 1;
            if self.elements.len() + fresh.len() > cap {
                return Err(Error::ResourceCap { radius: next, cap });
            }
            let mut layer: Vec<Element> = fresh.into_iter().collect();
            layer.sort();
            for h in layer {
                self.index.insert(h.clone(), self.elements.len());
                self.elements.push(h);
                self.lengths.push(next);
            }
            self.layer_ends.push(self.elements.len());
            self.radius = next;
        }
        Ok(())
    }

    fn prefix(&self, radius: u32) -> Ball {
        debug_assert!(radius <= self.radius);
        let n = self.layer_ends[radius as usize];
        let elements = self.elements[..n].to_vec();
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ball {
            radius,
            elements,
            lengths: self.lengths[..n].to_vec(),
            index,
            layer_ends: self.layer_ends[..=radius as usize].to_vec(),
        }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn position(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    pub fn length_of(&self, g: &Element) -> Option<u32> {
        self.position(g).map(|i| self.lengths[i])
    }

    /// Number of elements of length at most `r` (`r <= radius`).
    pub fn size_at(&self, r: u32) -> usize {
        self.layer_ends[r.min(self.radius) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, u32)> {
        self.elements.iter().zip(self.lengths.iter().copied())
    }
}

/// Per-radius growth data and fitted exponents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `ball_sizes[r]` = #B_r for r = 0..=Λ_max+1.
    pub ball_sizes: Vec<usize>,
    /// `boundary_ratios[r]` = #(B_{r+1} \ B_r) / #B_r for r = 0..=Λ_max, as (numerator, denominator).
    pub boundary_ratios: Vec<(u64, u64)>,
    /// Decay exponent β of the boundary ratio (negated log-log slope).
    pub fitted_beta: f64,
    /// Log-log slope of #B_r.
    pub fitted_degree: f64,
    /// Inclusive radius range used by both fits.
    pub fit_range: (u32, u32),
}

impl GrowthReport {
    pub fn boundary_ratio(&self, r: u32) -> Ratio<i64> {
        let (n, d) = self.boundary_ratios[r as usize];
        Ratio::new(n as i64, d as i64)
    }

    pub fn boundary_ratio_f64(&self, r: u32) -> f64 {
        let (n, d) = self.boundary_ratios[r as usize];
        n as f64 / d as f64
    }

    /// Refit β and the degree over an explicit radius window.
    pub fn fit(&self, lo: u32, hi: u32) -> (f64, f64) {
        let lo = lo.max(1);
        let xs: Vec<f64> = (lo..=hi).map(|r| (r as f64).ln()).collect();
        let ratios: Vec<f64> = (lo..=hi).map(|r| self.boundary_ratio_f64(r).ln()).collect();
        let sizes: Vec<f64> = (lo..=hi).map(|r| (self.ball_sizes[r as usize] as f64).ln()).collect();
        (-least_squares_slope(&xs, &ratios), least_squares_slope(&xs, &sizes))
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// A group together with its word metric.
///
/// Balls are computed lazily and cached; the largest computed ball serves
/// every smaller radius since smaller balls are prefixes.
#[derive(Debug)]
pub struct CayleyGraph<G: Group = GroupSpec> {
    group: G,
    cap: usize,
    cache: RwLock<Arc<Ball>>,
}

impl<G: Group + Clone> Clone for CayleyGraph<G> {
    fn clone(&self) -> Self {
        CayleyGraph { group: self.group.clone(), cap: self.cap, cache: RwLock::new(self.cache.read().unwrap().clone()) }
    }
}

impl<G: Group> CayleyGraph<G> {
    pub fn new(group: G) -> Self {
        Self::with_cap(group, DEFAULT_BALL_CAP)
    }

    pub fn with_cap(group: G, cap: usize) -> Self {
        let ball = Ball::singleton(group.identity());
        CayleyGraph { group, cap, cache: RwLock::new(Arc::new(ball)) }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn identity(&self) -> Element {
        self.group.identity()
    }

    pub fn generators(&self) -> Vec<Element> {
        self.group.generators()
    }

    pub fn check(&self, g: &Element) -> Result<()> {
        if self.group.is_valid(g) {
            Ok(())
        } else {
            Err(Error::Structural(format!("element {g:?} does not belong to group {}", self.group.key())))
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.group.multiply(g, h))
    }

    pub fn inverse(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(self.group.inverse(g))
    }

    /// `g·h` without validation, for hot loops over elements produced by this graph.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        self.group.multiply(g, h)
    }

    pub fn inv(&self, g: &Element) -> Element {
        self.group.inverse(g)
    }

    /// Largest ball computed so far, grown to at least `radius`.
    fn covering(&self, radius: u32) -> Result<Arc<Ball>> {
        {
            let cached = self.cache.read().unwrap();
            if cached.radius >= radius {
                return Ok(cached.clone());
            }
        }
        let mut guard = self.cache.write().unwrap();
        if guard.radius < radius {
            let mut ball = (**guard).clone();
            ball.grow(&self.group, radius, self.cap)?;
            *guard = Arc::new(ball);
        }
        Ok(guard.clone())
    }

    /// The closed ball B_radius.
    pub fn ball(&self, radius: u32) -> Result<Ball> {
        let big = self.covering(radius)?;
        if big.radius == radius {
            Ok((*big).clone())
        } else {
            Ok(big.prefix(radius))
        }
    }

    /// Number of elements of B_radius.
    pub fn ball_size(&self, radius: u32) -> Result<usize> {
        Ok(self.covering(radius)?.size_at(radius))
    }

    /// Word length of `g`, found by growing the cached ball until it contains `g`.
    pub fn word_length(&self, g: &Element) -> Result<u32> {
        self.check(g)?;
        let mut r = self.cache.read().unwrap().radius;
        loop {
            let ball = self.covering(r)?;
            if let Some(l) = ball.length_of(g) {
                return Ok(l);
            }
            r = ball.radius + 1;
        }
    }

    /// Word length of every element of `elems`, growing the ball once.
    pub fn word_lengths<'a>(&self, elems: impl IntoIterator<Item = &'a Element>) -> Result<Vec<u32>> {
        elems.into_iter().map(|g| self.word_length(g)).collect()
    }

    /// A geodesic word for `g`: generators s_1..s_n with g = s_1⋯s_n and n = ℓ(g).
    pub fn geodesic_word(&self, g: &Element) -> Result<Vec<Element>> {
        let n = self.word_length(g)?;
        let ball = self.covering(n)?;
        let gens = self.group.generators();
        let mut word = Vec::with_capacity(n as usize);
        let mut cur = g.clone();
        for k in (1..=n).rev() {
            // peel the last letter: cur = prev·s with ℓ(prev) = k-1
            let (s, prev) = gens
                .iter()
                .map(|s| (s, self.group.multiply(&cur, &self.group.inverse(s))))
                .find(|(_, p)| ball.length_of(p) == Some(k - 1))
                .ok_or_else(|| Error::Structural(format!("no geodesic predecessor for {cur:?}")))?;
            word.push(s.clone());
            cur = prev;
        }
        word.reverse();
        Ok(word)
    }

    /// #(B_Λ \ x·B_Λ).
    pub fn folner_deficit(&self, x: &Element, radius: u32) -> Result<usize> {
        self.check(x)?;
        let ball = self.covering(radius)?;
        let n = ball.size_at(radius);
        let xinv = self.group.inverse(x);
        // b ∈ x·B  iff  x⁻¹b ∈ B
        Ok(ball.elements[..n]
            .iter()
            .filter(|b| {
                let y = self.group.multiply(&xinv, b);
                !matches!(ball.length_of(&y), Some(l) if l <= radius)
            })
            .count())
    }

    /// #(B_Λ ∩ x·B_Λ).
    pub fn overlap(&self, x: &Element, radius: u32) -> Result<usize> {
        Ok(self.ball_size(radius)? - self.folner_deficit(x, radius)?)
    }

    /// max over generators s of #(B_Λ \ s·B_Λ).
    pub fn max_generator_deficit(&self, radius: u32) -> Result<usize> {
        self.group
            .generators()
            .iter()
            .map(|s| self.folner_deficit(s, radius))
            .try_fold(0, |m, d| Ok(m.max(d?)))
    }

    /// Ball sizes, boundary ratios and log-log fits up to `lambda_max`.
    ///
    /// Both fits use radii in `[max(1, Λ_max/16), Λ_max]`.
    pub fn growth_report(&self, lambda_max: u32) -> Result<GrowthReport> {
        if lambda_max < 2 {
            return Err(Error::InvalidParameter("growth_report needs Λ_max >= 2".into()));
        }
        let ball = self.covering(lambda_max + 1)?;
        let ball_sizes: Vec<usize> = (0..=lambda_max + 1).map(|r| ball.size_at(r)).collect();
        let boundary_ratios = (0..=lambda_max as usize)
            .map(|r| ((ball_sizes[r + 1] - ball_sizes[r]) as u64, ball_sizes[r] as u64))
            .collect();
        let lo = (lambda_max / 16).max(1);
        let mut report = GrowthReport {
            ball_sizes,
            boundary_ratios,
            fitted_beta: 0.0,
            fitted_degree: 0.0,
            fit_range: (lo, lambda_max),
        };
        let (beta, deg) = report.fit(lo, lambda_max);
        report.fitted_beta = beta;
        report.fitted_degree = deg;
        Ok(report)
    }

    /// Largest radius whose ball stays within `limit` elements, capped at `max_radius`.
    pub fn radius_within(&self, limit: usize, max_radius: u32) -> u32 {
        let mut r = 0;
        while r < max_radius {
            match self.ball_size(r + 1) {
                Ok(n) if n <= limit => r += 1,
                _ => break,
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(d: u32) -> CayleyGraph {
        CayleyGraph::new(GroupSpec::FreeAbelian(d))
    }

    fn h3() -> CayleyGraph {
        CayleyGraph::new(GroupSpec::Heisenberg)
    }

    /// 3×3 unipotent upper-triangular matrices [[1,x,z],[0,1,y],[0,0,1]].
    fn unipotent_product(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
        let m = |v: [i64; 3]| [[1, v[0], v[2]], [0, 1, v[1]], [0, 0, 1]];
        let (p, q) = (m(a), m(b));
        let mut r = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = (0..3).map(|k| p[i][k] * q[k][j]).sum();
            }
        }
        [r[0][1], r[1][2], r[0][2]]
    }

    #[test]
    fn multiply_examples() {
        let g = z(2);
        assert_eq!(g.multiply(&[1, 0].into(), &[0, 1].into()).unwrap(), [1, 1].into());
        let h = h3();
        assert_eq!(h.multiply(&[1, 0, 0].into(), &[0, 1, 0].into()).unwrap(), [1, 1, 1].into());
        assert_eq!(h.multiply(&[0, 1, 0].into(), &[1, 0, 0].into()).unwrap(), [1, 1, 0].into());
    }

    #[test]
    fn heisenberg_matches_matrix_oracle() {
        let h = GroupSpec::Heisenberg;
        let samples = [[1, 0, 0], [0, 1, 0], [2, -3, 5], [-1, 4, -2], [3, 3, 3], [0, 0, 1]];
        for a in samples {
            for b in samples {
                let got = h.multiply(&a.into(), &b.into());
                assert_eq!(got, unipotent_product(a, b).into());
            }
            let ai = h.inverse(&a.into());
            assert_eq!(h.multiply(&a.into(), &ai), h.identity());
        }
    }

    #[test]
    fn mismatched_elements_are_rejected() {
        let g = z(2);
        assert!(matches!(g.multiply(&[1].into(), &[0, 1].into()), Err(Error::Structural(_))));
        assert!(h3().word_length(&[1, 2].into()).is_err());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(z(1).ball(2).unwrap().len(), 5);
        assert_eq!(z(2).ball(2).unwrap().len(), 13);
        assert_eq!(h3().ball(2).unwrap().len(), 17);
        for r in 0..10 {
            assert_eq!(z(2).ball_size(r).unwrap(), 2 * (r * r + r) as usize + 1);
        }
    }

    #[test]
    fn ball_order_is_layered_and_lexicographic() {
        let b = z(1).ball(2).unwrap();
        let coords: Vec<i64> = b.elements().iter().map(|e| e.coords()[0]).collect();
        assert_eq!(coords, vec![0, -1, 1, -2, 2]);
        for (i, e) in b.elements().iter().enumerate() {
            assert_eq!(b.position(e), Some(i));
        }
    }

    #[test]
    fn smaller_balls_are_prefixes() {
        let g = h3();
        let big = g.ball(4).unwrap();
        let small = g.ball(2).unwrap();
        assert_eq!(&big.elements()[..small.len()], small.elements());
    }

    #[test]
    fn ball_cap_is_reported() {
        let g = CayleyGraph::with_cap(GroupSpec::FreeAbelian(2), 50);
        match g.ball(10) {
            Err(Error::ResourceCap { cap, .. }) => assert_eq!(cap, 50),
            other => panic!("expected cap error, got {other:?}"),
        }
        // smaller balls remain available
        assert_eq!(g.ball(3).unwrap().len(), 25);
    }

    #[test]
    fn word_lengths() {
        assert_eq!(z(2).word_length(&[0, 0].into()).unwrap(), 0);
        assert_eq!(z(2).word_length(&[3, -2].into()).unwrap(), 5);
        assert_eq!(h3().word_length(&[0, 0, 1].into()).unwrap(), 4);
        let g = z(3);
        for c in [[1, 2, 3], [-4, 0, 2], [0, 0, -7]] {
            let taxicab: i64 = c.iter().map(|v: &i64| v.abs()).sum();
            assert_eq!(g.word_length(&c.into()).unwrap() as i64, taxicab);
        }
    }

    #[test]
    fn geodesic_words_multiply_back() {
        let g = h3();
        for x in g.ball(4).unwrap().elements() {
            let word = g.geodesic_word(x).unwrap();
            assert_eq!(word.len() as u32, g.word_length(x).unwrap());
            let prod = word.iter().fold(g.identity(), |acc, s| g.mul(&acc, s));
            assert_eq!(&prod, x);
        }
    }

    #[test]
    fn folner_deficit_examples() {
        let g = z(1);
        assert_eq!(g.folner_deficit(&[1].into(), 2).unwrap(), 1);
        assert_eq!(g.folner_deficit(&[3].into(), 2).unwrap(), 3);
        assert_eq!(g.folner_deficit(&[0].into(), 2).unwrap(), 0);
        assert_eq!(g.overlap(&[1].into(), 2).unwrap(), 4);
    }

    #[test]
    fn growth_examples() {
        let rep = z(2).growth_report(8).unwrap();
        assert_eq!(rep.boundary_ratio(2), Ratio::new(12, 13));
        let rep = z(1).growth_report(64).unwrap();
        for r in 0..=64u32 {
            assert_eq!(rep.boundary_ratio(r), Ratio::new(2, 2 * r as i64 + 1));
        }
        assert!((rep.fitted_beta - 1.0).abs() <= 0.1, "beta = {}", rep.fitted_beta);
        assert!((rep.fitted_degree - 1.0).abs() <= 0.1);
        assert!(z(1).growth_report(1).is_err());
    }

    #[test]
    fn group_keys_parse() {
        assert_eq!("z:2".parse::<GroupSpec>().unwrap(), GroupSpec::FreeAbelian(2));
        assert_eq!("heisenberg".parse::<GroupSpec>().unwrap(), GroupSpec::Heisenberg);
        assert!("z:0".parse::<GroupSpec>().is_err());
        assert!("sl2".parse::<GroupSpec>().is_err());
        assert_eq!(GroupSpec::FreeAbelian(3).to_string(), "z:3");
    }

    #[test]
    fn generators_are_symmetric() {
        for spec in [GroupSpec::FreeAbelian(1), GroupSpec::FreeAbelian(3), GroupSpec::Heisenberg] {
            let gens = spec.generators();
            assert!(!gens.contains(&spec.identity()));
            for s in &gens {
                assert!(gens.contains(&spec.inverse(s)));
            }
        }
    }
}
