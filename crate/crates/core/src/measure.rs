//! The self-similar measure of a 1D affine rational system.
//!
//! The measure μ is the unique Borel probability measure with
//! `μ = Σ_i p_i · μ∘τ_i^{−1}`, equivalently `∫f dμ = Σ_i p_i ∫ f∘τ_i dμ`
//! for Borel f. Everything here exploits that one identity:
//!
//! * moments solve a triangular rational linear system, exactly;
//! * the cumulative distribution descends through branch preimages, with
//!   exact cycle detection for rational arguments;
//! * Fourier coefficients are a truncated infinite product with a certified
//!   tail bound (equal-ratio systems);
//! * level-k quadrature sums `Σ_{|w|=k} p_w f(τ_w(anchor))`.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{rat_int, rat_to_f64, Rat};
use crate::ifs::{Affine1, Domain, IfsSystem, Point};
use crate::symbolic::InfiniteWord;

/// The IFS measure μ of a 1D affine rational system.
#[derive(Clone, Debug)]
pub struct IfsMeasure {
    system: IfsSystem,
    coeffs: Vec<(Rat, Rat)>,
}

impl IfsMeasure {
    pub fn new(system: IfsSystem) -> Result<Self> {
        let coeffs = system.affine_coeffs()?;
        if coeffs.iter().any(|(r, _)| *r <= Rat::zero()) {
            return Err(Error::NotAffine(
                "measure queries need increasing branches".into(),
            ));
        }
        Ok(IfsMeasure { system, coeffs })
    }

    pub fn standard(name: &str) -> Result<Self> {
        IfsMeasure::new(IfsSystem::standard(name)?)
    }

    pub fn system(&self) -> &IfsSystem {
        &self.system
    }

    pub fn branch_count(&self) -> usize {
        self.coeffs.len()
    }

    fn domain_interval(&self) -> (Rat, Rat) {
        match self.system.domain() {
            Domain::Interval(a, b) => (a.clone(), b.clone()),
            _ => (Rat::zero(), Rat::one()),
        }
    }

    /// Exact moments `m_j = ∫ x^j dμ` for `j = 0, …, n`.
    ///
    /// Substituting `f = x^n` into the self-similarity identity gives
    /// `m_n = Σ_i p_i Σ_j C(n,j) r_i^j t_i^{n−j} m_j`; isolating the `j = n`
    /// term leaves a triangular system solvable by forward substitution.
    /// The pivot `1 − Σ_i p_i r_i^n` is nonzero because every `r_i < 1`.
    pub fn moments(&self, n: usize) -> Vec<Rat> {
        let weights = self.system.weights().weights();
        let mut m = Vec::with_capacity(n + 1);
        m.push(Rat::one());
        // binomial row maintained incrementally
        for deg in 1..=n {
            let binom = binomial_row(deg);
            let mut rhs = Rat::zero();
            let mut pivot = Rat::one();
            for (p_i, (r_i, t_i)) in weights.iter().zip(&self.coeffs) {
                // powers of r_i and t_i
                let mut r_pow = vec![Rat::one()];
                let mut t_pow = vec![Rat::one()];
                for j in 1..=deg {
                    r_pow.push(&r_pow[j - 1] * r_i);
                    t_pow.push(&t_pow[j - 1] * t_i);
                }
                for (j, m_j) in m.iter().enumerate() {
                    rhs += p_i * &binom[j] * &r_pow[j] * &t_pow[deg - j] * m_j;
                }
                pivot -= p_i * &r_pow[deg];
            }
            m.push(rhs / pivot);
        }
        m
    }

    pub fn moment(&self, n: usize) -> Rat {
        self.moments(n).pop().unwrap()
    }

    /// Exact cumulative distribution `F(x) = μ([0, x])`.
    ///
    /// Descends `F(x) = Σ_i p_i F(τ_i^{−1}(x))` with F clamped to 0/1
    /// outside the domain. At most one branch preimage stays interior; the
    /// orbit of a rational argument under the expanding inverse map is
    /// eventually periodic, so the descent either clamps out (x in a gap)
    /// or closes a cycle, which is solved in closed form.
    pub fn cdf(&self, x: &Rat) -> Result<Rat> {
        let (lo, hi) = self.domain_interval();
        if *x < lo {
            return Ok(Rat::zero());
        }
        if *x >= hi {
            return Ok(Rat::one());
        }
        let weights = self.system.weights().weights();
        // stack of (argument, mass of branches entirely to the left, weight
        // of the branch we descended into)
        let mut args: Vec<Rat> = Vec::new();
        let mut bases: Vec<Rat> = Vec::new();
        let mut probs: Vec<Rat> = Vec::new();
        let mut current = x.clone();
        let max_depth = 4096;
        loop {
            if args.len() > max_depth {
                return Err(Error::DescentDepth);
            }
            if let Some(start) = args.iter().position(|a| *a == current) {
                // cycle: F(c) = A + B·F(c)
                let mut a = Rat::zero();
                let mut b = Rat::one();
                for i in start..args.len() {
                    a += &b * &bases[i];
                    b *= &probs[i];
                }
                let mut value = a / (Rat::one() - b);
                for i in (0..start).rev() {
                    value = &bases[i] + &probs[i] * value;
                }
                return Ok(value);
            }
            let mut base = Rat::zero();
            let mut descend: Option<(Rat, Rat)> = None;
            for (p_i, (r_i, t_i)) in weights.iter().zip(&self.coeffs) {
                let y = (&current - t_i) / r_i;
                if y >= hi {
                    base += p_i;
                } else if y >= lo {
                    // branch images are non-overlapping, so at most one
                    descend = Some((p_i.clone(), y));
                }
            }
            match descend {
                None => {
                    // x fell in a gap at this level
                    let mut value = base;
                    for i in (0..args.len()).rev() {
                        value = &bases[i] + &probs[i] * value;
                    }
                    return Ok(value);
                }
                Some((p, y)) => {
                    args.push(current);
                    bases.push(base);
                    probs.push(p);
                    current = y;
                }
            }
        }
    }

    /// Common contraction ratio, when all branches share one.
    pub fn equal_ratio(&self) -> Result<Rat> {
        let r0 = self.coeffs[0].0.clone();
        if self.coeffs.iter().any(|(r, _)| *r != r0) {
            return Err(Error::UnequalRatios);
        }
        Ok(r0)
    }

    /// One factor `m(u) = Σ_i p_i e^{2πi·u·t_i}` of the Fourier product.
    fn fourier_factor(&self, u: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p_i, (_, t_i)) in self.system.weights().weights().iter().zip(&self.coeffs) {
            let ang = 2.0 * std::f64::consts::PI * u * rat_to_f64(t_i);
            acc += rat_to_f64(p_i) * Complex64::from_polar(1.0, ang);
        }
        acc
    }

    /// `μ̂(ξ) = ∫ e^{2πiξx} dμ(x)` truncated to `factors` product terms.
    ///
    /// Iterating the self-similarity identity with `f = e^{2πiξx}` gives
    /// `μ̂(ξ) = m(ξ) · μ̂(rξ)` and hence `μ̂(ξ) = Π_{j<K} m(ξ r^j) · μ̂(ξ r^K)`
    /// for the common ratio r.
    pub fn fourier_truncated(&self, xi: i64, factors: usize) -> Result<Complex64> {
        let r = rat_to_f64(&self.equal_ratio()?);
        let mut u = xi as f64;
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..factors {
            acc *= self.fourier_factor(u);
            u *= r;
        }
        Ok(acc)
    }

    /// `μ̂(ξ)` with the truncation depth chosen so the dropped tail perturbs
    /// the value by less than `tol`; returns the value and the certified
    /// tail bound. The bound uses `|μ̂(u) − 1| ≤ 2π|u|·E|x|` and `|m| ≤ 1`.
    pub fn fourier(&self, xi: i64, tol: f64) -> Result<(Complex64, f64)> {
        let r = rat_to_f64(&self.equal_ratio()?);
        let (lo, hi) = self.domain_interval();
        let bound_x = rat_to_f64(&lo).abs().max(rat_to_f64(&hi).abs());
        let mut factors = 1usize;
        let mut tail = 2.0 * std::f64::consts::PI * (xi as f64).abs() * bound_x * r;
        while tail >= tol && factors < 4096 {
            factors += 1;
            tail *= r;
        }
        Ok((self.fourier_truncated(xi, factors)?, tail))
    }

    /// Level-k quadrature `Σ_{|w|=k} p_w f(τ_w(anchor))`.
    ///
    /// Error at most `Lip(f) · r_max^k · diam(M)` for Lipschitz f. Summation
    /// order is a fixed balanced tree over the lexicographic word order, so
    /// results are reproducible and rounding stays O(k·ε).
    pub fn integrate_level<F: Fn(f64) -> f64>(&self, f: &F, k: usize) -> f64 {
        let anchor = match self.system.anchor() {
            Point::One(a) => rat_to_f64(&a),
            _ => 0.5,
        };
        let coeffs: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .map(|(r, t)| (rat_to_f64(r), rat_to_f64(t)))
            .collect();
        let probs: Vec<f64> = self
            .system
            .weights()
            .weights()
            .iter()
            .map(rat_to_f64)
            .collect();
        fn descend<F: Fn(f64) -> f64>(
            f: &F,
            coeffs: &[(f64, f64)],
            probs: &[f64],
            depth: usize,
            r: f64,
            t: f64,
            anchor: f64,
        ) -> f64 {
            if depth == 0 {
                return f(r * anchor + t);
            }
            let mut acc = 0.0;
            for (i, (ri, ti)) in coeffs.iter().enumerate() {
                // (r,t)∘(r_i,t_i)
                acc += probs[i]
                    * descend(f, coeffs, probs, depth - 1, r * ri, r * ti + t, anchor);
            }
            acc
        }
        descend(f, &coeffs, &probs, k, 1.0, 0.0, anchor)
    }

    /// The boundary limit `∫ f∘τ_{ω|k} dμ → f(Y(ω))`.
    ///
    /// The value is the level-`quad` quadrature of `f∘τ_{ω|k}`, the target
    /// is f at the exact encoded point, and the residual decays geometrically
    /// in k at rate `r_max` for Lipschitz f.
    pub fn boundary_limit<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        w: &InfiniteWord,
        k: usize,
        quad: usize,
    ) -> Result<BoundaryLimit> {
        let prefix_map = self.system.compose_word_1d(&w.prefix(k))?;
        let rf = rat_to_f64(&prefix_map.ratio);
        let tf = rat_to_f64(&prefix_map.offset);
        let composed = |x: f64| f(rf * x + tf);
        let value = self.integrate_level(&composed, quad);
        let target = match self.system.encode_exact(w)? {
            Point::One(y) => f(rat_to_f64(&y)),
            _ => unreachable!(),
        };
        Ok(BoundaryLimit { value, target, residual: (value - target).abs() })
    }

    /// Exact measure of the cylinder image `τ_f(M)` via CDF differences at
    /// the image endpoints. Equals the product weight `p_f` by
    /// self-similarity.
    pub fn image_mass(&self, prefix_map: &Affine1) -> Result<Rat> {
        let (lo, hi) = self.domain_interval();
        let a = prefix_map.apply(&lo);
        let b = prefix_map.apply(&hi);
        Ok(self.cdf(&b)? - self.cdf(&a)?)
    }
}

/// Result of [`IfsMeasure::boundary_limit`].
#[derive(Clone, Copy, Debug)]
pub struct BoundaryLimit {
    pub value: f64,
    pub target: f64,
    pub residual: f64,
}

/// Row `C(n, 0..=n)` of Pascal's triangle as rationals.
fn binomial_row(n: usize) -> Vec<Rat> {
    let mut row = vec![Rat::one()];
    for j in 1..=n {
        let prev = &row[j - 1];
        row.push(prev * rat_int((n - j + 1) as i64) / rat_int(j as i64));
    }
    row
}

/// CSV `x,F` curve of the CDF on an equally spaced rational grid over the
/// domain, plus the exact values at grid points.
pub fn cdf_curve(measure: &IfsMeasure, grid: usize) -> Result<Vec<(Rat, Rat)>> {
    let mut out = Vec::with_capacity(grid + 1);
    for g in 0..=grid {
        let x = rat_int(g as i64) / rat_int(grid as i64);
        let f = measure.cdf(&x)?;
        out.push((x, f));
    }
    Ok(out)
}

/// The level-k staircase polyline: cumulative mass at the sorted cylinder
/// image endpoints.
pub fn staircase(measure: &IfsMeasure, k: usize) -> Result<Vec<(Rat, Rat)>> {
    let n = measure.branch_count();
    let alphabet = measure.system().alphabet();
    let words = alphabet.words_at_level(k);
    let mut steps: Vec<(Rat, Rat)> = Vec::with_capacity(words);
    for idx in 0..words {
        let w = crate::symbolic::Word::from_index(alphabet, idx, k);
        let map = measure.system().compose_word_1d(&w)?;
        let mass = measure.system().weights().word_measure(&w)?;
        let (lo, _) = match measure.system().domain() {
            Domain::Interval(a, b) => (a.clone(), b.clone()),
            _ => (Rat::zero(), Rat::one()),
        };
        steps.push((map.apply(&lo), mass));
    }
    steps.sort_by(|a, b| a.0.cmp(&b.0));
    let mut acc = Rat::zero();
    let mut out = Vec::with_capacity(words);
    for (x, mass) in steps {
        acc += mass;
        out.push((x, acc.clone()));
    }
    debug_assert_eq!(out.last().map(|p| p.1.clone()), Some(Rat::one()));
    let _ = n;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn iw(s: &str) -> InfiniteWord {
        s.parse().unwrap()
    }

    #[test]
    fn moment_oracles() {
        // dyadic = Lebesgue: m_n = 1/(n+1)
        let dy = IfsMeasure::standard("dyadic").unwrap();
        assert_eq!(dy.moment(1), rat(1, 2));
        assert_eq!(dy.moment(2), rat(1, 3));
        assert_eq!(dy.moment(5), rat(1, 6));

        // cantor3: m1 solves m1 = m1/3 + 1/3; m2 solves 9m2 = m2 + 2m1 + 2
        let c3 = IfsMeasure::standard("cantor3").unwrap();
        assert_eq!(c3.moment(1), rat(1, 2));
        assert_eq!(c3.moment(2), rat(3, 8));
        // degree 3: 26·m3 = 3·m2 + 6·m1 + 4 = 65/8
        assert_eq!(c3.moment(3), rat(5, 16));

        // cantor4: m1 solves 4m1 = m1 + 1
        let c4 = IfsMeasure::standard("cantor4").unwrap();
        assert_eq!(c4.moment(1), rat(1, 3));
        assert_eq!(c4.moment(2), rat(8, 45));
    }

    #[test]
    fn moments_match_monte_carlo() {
        let c3 = IfsMeasure::standard("cantor3").unwrap();
        if let crate::ifs::PointSet::D1(pts) = c3.system().chaos_game(11, 200_000, 128) {
            let mean: f64 = pts.iter().sum::<f64>() / pts.len() as f64;
            let var = rat_to_f64(&(c3.moment(2) - c3.moment(1) * c3.moment(1)));
            let se = (var / pts.len() as f64).sqrt();
            assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean} se {se}");
        } else {
            panic!("expected 1D samples");
        }
    }

    #[test]
    fn cdf_paper_values() {
        let c4 = IfsMeasure::standard("cantor4").unwrap();
        assert_eq!(c4.cdf(&rat(1, 6)).unwrap(), rat(1, 2));
        assert_eq!(c4.cdf(&rat(2, 3)).unwrap(), rat(1, 1));
        let c3 = IfsMeasure::standard("cantor3").unwrap();
        assert_eq!(c3.cdf(&rat(1, 3)).unwrap(), rat(1, 2));
        // gap plateau
        assert_eq!(c3.cdf(&rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(c3.cdf(&rat(3, 5)).unwrap(), rat(1, 2));
        let dy = IfsMeasure::standard("dyadic").unwrap();
        for g in [rat(1, 4), rat(3, 8), rat(1, 2), rat(7, 8)] {
            assert_eq!(dy.cdf(&g).unwrap(), g);
        }
        // non-dyadic rationals still terminate via cycle detection
        assert_eq!(dy.cdf(&rat(1, 3)).unwrap(), rat(1, 3));
        assert_eq!(c3.cdf(&rat(1, 4)).unwrap(), c3.cdf(&rat(1, 4)).unwrap());
    }

    #[test]
    fn cdf_monotone_and_self_similar() {
        let c4 = IfsMeasure::standard("cantor4").unwrap();
        let mut prev = Rat::zero();
        for g in 0..=500 {
            let x = rat(g, 500);
            let f = c4.cdf(&x).unwrap();
            assert!(f >= prev);
            prev = f;
        }
        // image masses reproduce product weights exactly
        let alphabet = c4.system().alphabet();
        for len in 1..=6 {
            for idx in 0..alphabet.words_at_level(len) {
                let w = crate::symbolic::Word::from_index(alphabet, idx, len);
                let map = c4.system().compose_word_1d(&w).unwrap();
                let mass = c4.image_mass(&map).unwrap();
                assert_eq!(mass, c4.system().weights().word_measure(&w).unwrap());
            }
        }
    }

    #[test]
    fn fourier_values() {
        let dy = IfsMeasure::standard("dyadic").unwrap();
        let (one, _) = dy.fourier(0, 1e-12).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for n in [1i64, 2, 7, -3] {
            let (v, tail) = dy.fourier(n, 1e-12).unwrap();
            assert!(tail < 1e-12);
            assert!(v.norm() < 1e-10, "Lebesgue coefficient at {n} was {v}");
        }
        // tail certification: doubling the factor count moves the value by
        // less than the advertised bound
        let c4 = IfsMeasure::standard("cantor4").unwrap();
        for n in [1i64, 5, 21] {
            let (v, tail) = c4.fourier(n, 1e-12).unwrap();
            let more = c4.fourier_truncated(n, 80).unwrap();
            assert!((v - more).norm() <= tail + 1e-15);
        }
    }

    #[test]
    fn quadrature_matches_moments() {
        let c3 = IfsMeasure::standard("cantor3").unwrap();
        let one = c3.integrate_level(&|_| 1.0, 10);
        assert!((one - 1.0).abs() < 1e-12);
        let m1 = c3.integrate_level(&|x| x, 20);
        assert!((m1 - 0.5).abs() < 3f64.powi(-20) * 2.0);
        let dy = IfsMeasure::standard("dyadic").unwrap();
        let m2 = dy.integrate_level(&|x| x * x, 20);
        assert!((m2 - 1.0 / 3.0).abs() < 2f64.powi(-20) * 2.0);
    }

    #[test]
    fn boundary_limit_geometric_decay() {
        let c3 = IfsMeasure::standard("cantor3").unwrap();
        // ω = (0,0,…): value = m1/3^k → 0 = f(Y)
        let b = c3.boundary_limit(&|x| x, &iw("(0)"), 5, 12).unwrap();
        assert_eq!(b.target, 0.0);
        assert!((b.value - 0.5 / 243.0).abs() < 1e-6);
        // ω = (1,1,…): target 1, residual ratio ≈ 1/3
        let mut prev: Option<f64> = None;
        for k in 1..=12 {
            let b = c3.boundary_limit(&|x| x, &iw("(1)"), k, 12).unwrap();
            assert_eq!(b.target, 1.0);
            if let Some(p) = prev {
                assert!(b.residual <= p * (1.0 / 3.0 + 0.05));
            }
            prev = Some(b.residual);
        }
    }

    #[test]
    fn staircase_levels() {
        let c3 = IfsMeasure::standard("cantor3").unwrap();
        let steps = staircase(&c3, 3).unwrap();
        assert_eq!(steps.len(), 8);
        assert_eq!(steps.last().unwrap().1, Rat::one());
    }
}
