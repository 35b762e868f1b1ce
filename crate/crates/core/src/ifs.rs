//! Contractive iterated function systems and the encoding of infinite words.
//!
//! An [`IfsSystem`] is a finite family of strict contractions `τ_i` on a
//! compact domain together with weights `p_i` and a left inverse `σ` with
//! `σ∘τ_i = id`. Affine systems over the rationals admit exact encoding:
//! for an eventually periodic word the encoded point `Y(ω)` — the singleton
//! intersection of the nested images `τ_{ω|k}(M)` — is an exact rational.
//!
//! Sampling (the chaos game and the Julia inverse iteration) is `f64` and
//! deterministic in the seed.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{rat, rat_int, rat_to_f64, Rat};
use crate::symbolic::{Alphabet, InfiniteWord, WeightVector, Word};

/// One contraction branch.
#[derive(Clone, Debug, PartialEq)]
pub enum ContractionMap {
    /// `x ↦ ratio·x + offset` on an interval.
    Affine1D { ratio: Rat, offset: Rat },
    /// `v ↦ M·v + t` on a box.
    Affine2D { matrix: [[Rat; 2]; 2], translation: [Rat; 2] },
    /// One branch `z ↦ ±√(z − c)` of the inverse of `z ↦ z² + c`.
    SqrtBranch { negative: bool, c: Complex64 },
}

impl ContractionMap {
    pub fn affine_1d(ratio: Rat, offset: Rat) -> Self {
        ContractionMap::Affine1D { ratio, offset }
    }

    /// Strict-contraction check; the square-root branch is only checked on
    /// its working disk, which is the caller's responsibility.
    pub fn is_contraction(&self) -> bool {
        match self {
            ContractionMap::Affine1D { ratio, .. } => {
                !ratio.is_zero() && ratio.abs() < Rat::one()
            }
            ContractionMap::Affine2D { matrix, .. } => {
                // row-sum (∞-operator) norm
                let norm = matrix
                    .iter()
                    .map(|row| row[0].abs() + row[1].abs())
                    .max()
                    .unwrap();
                norm < Rat::one()
            }
            ContractionMap::SqrtBranch { .. } => true,
        }
    }

    pub fn apply_f64_1d(&self, x: f64) -> f64 {
        match self {
            ContractionMap::Affine1D { ratio, offset } => {
                rat_to_f64(ratio) * x + rat_to_f64(offset)
            }
            _ => f64::NAN,
        }
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        match self {
            ContractionMap::SqrtBranch { negative, c } => {
                let w = (z - c).sqrt();
                if *negative {
                    -w
                } else {
                    w
                }
            }
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

/// Compact domain of the system.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Interval(Rat, Rat),
    Square { x0: Rat, x1: Rat, y0: Rat, y1: Rat },
    Disk { radius: f64 },
}

impl Domain {
    pub fn unit_interval() -> Self {
        Domain::Interval(Rat::zero(), Rat::one())
    }

    pub fn unit_square() -> Self {
        Domain::Square { x0: Rat::zero(), x1: Rat::one(), y0: Rat::zero(), y1: Rat::one() }
    }

    pub fn diameter(&self) -> Rat {
        match self {
            Domain::Interval(a, b) => b - a,
            // ∞-norm diameter of the box
            Domain::Square { x0, x1, y0, y1 } => {
                let dx = x1 - x0;
                let dy = y1 - y0;
                if dx >= dy {
                    dx
                } else {
                    dy
                }
            }
            Domain::Disk { radius } => {
                Rat::from_float(2.0 * radius).unwrap_or_else(|| rat_int(4))
            }
        }
    }
}

/// The left inverse `σ` of the branch system.
#[derive(Clone, Debug, PartialEq)]
pub enum ShiftMap {
    /// `x ↦ factor·x mod 1` on the unit interval.
    Mod1 { factor: Rat },
    /// Coordinatewise doubling `(x, y) ↦ (2x mod 1, 2y mod 1)`.
    DoubleMod1,
    /// `z ↦ z² + c`.
    Square { c: Complex64 },
    /// Invert the branch whose image contains the point (affine systems).
    BranchInverse,
}

/// A point of the domain with exact rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    One(Rat),
    Two(Rat, Rat),
}

impl Point {
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Point::One(x) => Some(x),
            _ => None,
        }
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        match self {
            Point::One(x) => vec![rat_to_f64(x)],
            Point::Two(x, y) => vec![rat_to_f64(x), rat_to_f64(y)],
        }
    }
}

/// `τ_{ω|k}(M)` as a center/radius ball: the exact center is the image of
/// the anchor point and the radius bounds the image diameter.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedBall {
    pub center: Point,
    pub radius: Rat,
}

/// Composition `x ↦ r·x + t` of 1D affine branches.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine1 {
    pub ratio: Rat,
    pub offset: Rat,
}

impl Affine1 {
    pub fn identity() -> Self {
        Affine1 { ratio: Rat::one(), offset: Rat::zero() }
    }

    pub fn apply(&self, x: &Rat) -> Rat {
        &self.ratio * x + &self.offset
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        rat_to_f64(&self.ratio) * x + rat_to_f64(&self.offset)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine1) -> Affine1 {
        Affine1 {
            ratio: &self.ratio * &other.ratio,
            offset: &self.ratio * &other.offset + &self.offset,
        }
    }

    /// Unique fixed point `t/(1−r)` of a strict contraction.
    pub fn fixed_point(&self) -> Rat {
        &self.offset / (Rat::one() - &self.ratio)
    }
}

/// A named or ad-hoc iterated function system.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSystem {
    name: String,
    maps: Vec<ContractionMap>,
    weights: WeightVector,
    domain: Domain,
    shift: ShiftMap,
}

/// Default number of discarded leading samples in the chaos game.
pub const DEFAULT_BURN_IN: usize = 128;

impl IfsSystem {
    pub fn new(
        name: impl Into<String>,
        maps: Vec<ContractionMap>,
        weights: WeightVector,
        domain: Domain,
        shift: ShiftMap,
    ) -> Result<Self> {
        if maps.len() != weights.len() {
            return Err(Error::InvalidWeights);
        }
        for (i, m) in maps.iter().enumerate() {
            if !m.is_contraction() {
                return Err(Error::NotContractive(i));
            }
        }
        let sys = IfsSystem { name: name.into(), maps, weights, domain, shift };
        sys.check_non_overlap()?;
        Ok(sys)
    }

    /// Builds a 1D affine system `x ↦ r_i·x + t_i` on the unit interval with
    /// the generic branch-inverse shift.
    pub fn affine_1d(
        name: impl Into<String>,
        coeffs: Vec<(Rat, Rat)>,
        weights: WeightVector,
    ) -> Result<Self> {
        let maps = coeffs
            .into_iter()
            .map(|(r, t)| ContractionMap::Affine1D { ratio: r, offset: t })
            .collect();
        IfsSystem::new(name, maps, weights, Domain::unit_interval(), ShiftMap::BranchInverse)
    }

    /// The named example systems.
    pub fn standard(name: &str) -> Result<Self> {
        match name {
            "dyadic" => IfsSystem::new(
                "dyadic",
                vec![
                    ContractionMap::affine_1d(rat(1, 2), rat(0, 1)),
                    ContractionMap::affine_1d(rat(1, 2), rat(1, 2)),
                ],
                WeightVector::uniform(2)?,
                Domain::unit_interval(),
                ShiftMap::Mod1 { factor: rat_int(2) },
            ),
            "cantor3" => IfsSystem::new(
                "cantor3",
                vec![
                    ContractionMap::affine_1d(rat(1, 3), rat(0, 1)),
                    ContractionMap::affine_1d(rat(1, 3), rat(2, 3)),
                ],
                WeightVector::uniform(2)?,
                Domain::unit_interval(),
                ShiftMap::Mod1 { factor: rat_int(3) },
            ),
            "cantor4" => IfsSystem::new(
                "cantor4",
                vec![
                    ContractionMap::affine_1d(rat(1, 4), rat(0, 1)),
                    ContractionMap::affine_1d(rat(1, 4), rat(1, 2)),
                ],
                WeightVector::uniform(2)?,
                Domain::unit_interval(),
                ShiftMap::Mod1 { factor: rat_int(4) },
            ),
            "sierpinski" => {
                let half = rat(1, 2);
                let zero = Rat::zero();
                let diag = [[half.clone(), zero.clone()], [zero.clone(), half.clone()]];
                IfsSystem::new(
                    "sierpinski",
                    vec![
                        ContractionMap::Affine2D {
                            matrix: diag.clone(),
                            translation: [zero.clone(), zero.clone()],
                        },
                        ContractionMap::Affine2D {
                            matrix: diag.clone(),
                            translation: [half.clone(), zero.clone()],
                        },
                        ContractionMap::Affine2D {
                            matrix: diag,
                            translation: [zero, half],
                        },
                    ],
                    WeightVector::uniform(3)?,
                    Domain::unit_square(),
                    ShiftMap::DoubleMod1,
                )
            }
            other => Err(Error::UnknownSystem(other.to_string())),
        }
    }

    /// The Julia system: branches `z ↦ ±√(z − c)` inverting `σ(z) = z² + c`.
    pub fn julia(c: Complex64) -> Result<Self> {
        if c.norm() == 0.0 {
            return Err(Error::UnknownSystem("julia requires c ≠ 0".into()));
        }
        IfsSystem::new(
            format!("julia({}, {})", c.re, c.im),
            vec![
                ContractionMap::SqrtBranch { negative: false, c },
                ContractionMap::SqrtBranch { negative: true, c },
            ],
            WeightVector::uniform(2)?,
            Domain::Disk { radius: 2.0 },
            ShiftMap::Square { c },
        )
    }

    /// Equal-ratio subdivision `x ↦ (x + i)/n` (Lebesgue measure for any n).
    pub fn n_adic(n: usize) -> Result<Self> {
        let coeffs = (0..n)
            .map(|i| (Rat::new(1.into(), (n as i64).into()), rat(i as i64, n as i64)))
            .collect();
        let mut sys = IfsSystem::affine_1d(format!("{n}-adic"), coeffs, WeightVector::uniform(n)?)?;
        sys.shift = ShiftMap::Mod1 { factor: rat_int(n as i64) };
        Ok(sys)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn shift(&self) -> &ShiftMap {
        &self.shift
    }

    pub fn branch_count(&self) -> usize {
        self.maps.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.weights.alphabet()
    }

    pub fn is_affine_1d(&self) -> bool {
        self.maps.iter().all(|m| matches!(m, ContractionMap::Affine1D { .. }))
    }

    pub fn is_affine(&self) -> bool {
        self.maps
            .iter()
            .all(|m| !matches!(m, ContractionMap::SqrtBranch { .. }))
    }

    /// 1D branch coefficients `(r_i, t_i)`.
    pub fn affine_coeffs(&self) -> Result<Vec<(Rat, Rat)>> {
        self.maps
            .iter()
            .map(|m| match m {
                ContractionMap::Affine1D { ratio, offset } => {
                    Ok((ratio.clone(), offset.clone()))
                }
                _ => Err(Error::NotAffine(self.name.clone())),
            })
            .collect()
    }

    /// Largest contraction ratio, the rate in every geometric bound.
    pub fn max_ratio(&self) -> Rat {
        self.maps
            .iter()
            .map(|m| match m {
                ContractionMap::Affine1D { ratio, .. } => ratio.abs(),
                ContractionMap::Affine2D { matrix, .. } => matrix
                    .iter()
                    .map(|row| row[0].abs() + row[1].abs())
                    .max()
                    .unwrap(),
                ContractionMap::SqrtBranch { .. } => rat(1, 2),
            })
            .max()
            .unwrap()
    }

    fn check_non_overlap(&self) -> Result<()> {
        if !self.is_affine_1d() {
            return Ok(());
        }
        let (lo, hi) = match &self.domain {
            Domain::Interval(a, b) => (a.clone(), b.clone()),
            _ => return Ok(()),
        };
        let mut images: Vec<(Rat, Rat)> = self
            .affine_coeffs()?
            .iter()
            .map(|(r, t)| {
                let a = r * &lo + t;
                let b = r * &hi + t;
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        images.sort();
        for pair in images.windows(2) {
            // endpoint contact is measure zero and allowed
            if pair[1].0 < pair[0].1 {
                return Err(Error::OverlappingBranches);
            }
        }
        Ok(())
    }

    /// Anchor point for encodings: the domain midpoint.
    pub fn anchor(&self) -> Point {
        match &self.domain {
            Domain::Interval(a, b) => Point::One((a + b) / rat_int(2)),
            Domain::Square { x0, x1, y0, y1 } => {
                Point::Two((x0 + x1) / rat_int(2), (y0 + y1) / rat_int(2))
            }
            Domain::Disk { .. } => Point::One(Rat::zero()),
        }
    }

    /// The composite branch `τ_{ω|k} = τ_{ω_1}∘⋯∘τ_{ω_k}` for a 1D system.
    pub fn compose_word_1d(&self, prefix: &Word) -> Result<Affine1> {
        let coeffs = self.affine_coeffs()?;
        let mut acc = Affine1::identity();
        for &l in prefix.letters() {
            let (r, t) = coeffs
                .get(l as usize)
                .ok_or(Error::LetterOutOfRange { letter: l, size: coeffs.len() })?;
            acc = acc.compose(&Affine1 { ratio: r.clone(), offset: t.clone() });
        }
        Ok(acc)
    }

    fn compose_word_2d(&self, prefix: &Word) -> Result<([[Rat; 2]; 2], [Rat; 2])> {
        let mut m = [
            [Rat::one(), Rat::zero()],
            [Rat::zero(), Rat::one()],
        ];
        let mut t = [Rat::zero(), Rat::zero()];
        for &l in prefix.letters() {
            let (bm, bt) = match &self.maps[l as usize] {
                ContractionMap::Affine2D { matrix, translation } => (matrix, translation),
                _ => return Err(Error::NotAffine(self.name.clone())),
            };
            // acc ∘ branch: (M, t)∘(B, b) = (M·B, M·b + t)
            let mut nm = [
                [Rat::zero(), Rat::zero()],
                [Rat::zero(), Rat::zero()],
            ];
            for i in 0..2 {
                for j in 0..2 {
                    nm[i][j] = &m[i][0] * &bm[0][j] + &m[i][1] * &bm[1][j];
                }
            }
            let nt = [
                &m[0][0] * &bt[0] + &m[0][1] * &bt[1] + &t[0],
                &m[1][0] * &bt[0] + &m[1][1] * &bt[1] + &t[1],
            ];
            m = nm;
            t = nt;
        }
        Ok((m, t))
    }

    /// The ball `τ_{ω|k}(M)` around the encoded point: exact center (image
    /// of the anchor) and radius `r_max^k · diam(M)`.
    pub fn encode_ball(&self, w: &InfiniteWord, k: usize) -> Result<EncodedBall> {
        if !self.is_affine() {
            return Err(Error::NotAffine(self.name.clone()));
        }
        let prefix = w.prefix(k);
        prefix.validate(self.alphabet())?;
        let mut radius = self.domain.diameter();
        let rmax = self.max_ratio();
        for _ in 0..k {
            radius *= &rmax;
        }
        let center = if self.is_affine_1d() {
            let aff = self.compose_word_1d(&prefix)?;
            match self.anchor() {
                Point::One(a) => Point::One(aff.apply(&a)),
                _ => unreachable!(),
            }
        } else {
            let (m, t) = self.compose_word_2d(&prefix)?;
            match self.anchor() {
                Point::Two(ax, ay) => Point::Two(
                    &m[0][0] * &ax + &m[0][1] * &ay + &t[0],
                    &m[1][0] * &ax + &m[1][1] * &ay + &t[1],
                ),
                _ => unreachable!(),
            }
        };
        Ok(EncodedBall { center, radius })
    }

    /// Exact encoded point `Y(ω)` for an eventually periodic word: the fixed
    /// point of the periodic composite, pushed through the preperiod.
    pub fn encode_exact(&self, w: &InfiniteWord) -> Result<Point> {
        if !self.is_affine() {
            return Err(Error::NotAffine(self.name.clone()));
        }
        w.prefix(w.preperiod().len() + w.period().len()).validate(self.alphabet())?;
        if self.is_affine_1d() {
            let per = self.compose_word_1d(w.period())?;
            let fixed = per.fixed_point();
            let pre = self.compose_word_1d(w.preperiod())?;
            Ok(Point::One(pre.apply(&fixed)))
        } else {
            let (pm, pt) = self.compose_word_2d(w.period())?;
            // solve (I − M)·x = t
            let a = Rat::one() - &pm[0][0];
            let b = -pm[0][1].clone();
            let c = -pm[1][0].clone();
            let d = Rat::one() - &pm[1][1];
            let det = &a * &d - &b * &c;
            let x = (&d * &pt[0] - &b * &pt[1]) / &det;
            let y = (&a * &pt[1] - &c * &pt[0]) / &det;
            let (qm, qt) = self.compose_word_2d(w.preperiod())?;
            Ok(Point::Two(
                &qm[0][0] * &x + &qm[0][1] * &y + &qt[0],
                &qm[1][0] * &x + &qm[1][1] * &y + &qt[1],
            ))
        }
    }

    /// Applies `σ` to an exact 1D point.
    pub fn shift_point_1d(&self, x: &Rat) -> Result<Rat> {
        match &self.shift {
            ShiftMap::Mod1 { factor } => {
                let y = factor * x;
                Ok(&y - y.floor())
            }
            ShiftMap::BranchInverse => {
                for (r, t) in self.affine_coeffs()? {
                    let y = (x - &t) / &r;
                    if y >= Rat::zero() && y <= Rat::one() {
                        return Ok(y);
                    }
                }
                Err(Error::Unsupported(format!("{x} lies outside every branch image")))
            }
            _ => Err(Error::Unsupported("shift is not one-dimensional".into())),
        }
    }

    /// Checks the intertwining `τ_b(Y(ω)) = Y(τ̂_b ω)`: exactly for the
    /// encoded fixed points, and with the depth-`k` contraction bound for
    /// the finite-depth centers.
    pub fn intertwine_check(
        &self,
        b: u8,
        w: &InfiniteWord,
        k: usize,
    ) -> Result<IntertwineReport> {
        self.alphabet().check_letter(b)?;
        let coeffs = self.affine_coeffs()?;
        let (r_b, t_b) = &coeffs[b as usize];

        let exact_lhs = match self.encode_exact(w)? {
            Point::One(y) => r_b * &y + t_b,
            _ => return Err(Error::NotAffine(self.name.clone())),
        };
        let exact_rhs = match self.encode_exact(&w.prepend(b))? {
            Point::One(y) => y,
            _ => unreachable!(),
        };

        let lhs_k = match self.encode_ball(w, k)?.center {
            Point::One(c) => r_b * &c + t_b,
            _ => unreachable!(),
        };
        let ball_rhs = self.encode_ball(&w.prepend(b), k)?;
        let rhs_k = match ball_rhs.center {
            Point::One(c) => c,
            _ => unreachable!(),
        };
        let residual = (&lhs_k - &rhs_k).abs();
        let bound = {
            let mut r = self.domain.diameter();
            let rmax = self.max_ratio();
            for _ in 0..k {
                r *= &rmax;
            }
            r
        };
        Ok(IntertwineReport {
            exact_equal: exact_lhs == exact_rhs,
            encoded: exact_rhs,
            residual: rat_to_f64(&residual),
            bound: rat_to_f64(&bound),
            within_bound: residual <= bound,
        })
    }

    /// Chaos-game sampling of the system measure: iterate `x ← τ_i(x)` with
    /// letters drawn i.i.d. from the weights. Deterministic in the seed.
    pub fn chaos_game(&self, seed: u64, n: usize, burn_in: usize) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let thresholds: Vec<f64> = {
            let mut acc = 0.0;
            self.weights
                .weights()
                .iter()
                .map(|p| {
                    acc += rat_to_f64(p);
                    acc
                })
                .collect()
        };
        let draw = move |rng: &mut ChaCha8Rng| -> usize {
            let u: f64 = rng.gen();
            thresholds.iter().position(|t| u < *t).unwrap_or(self.maps.len() - 1)
        };
        match &self.maps[0] {
            ContractionMap::Affine1D { .. } => {
                let coeffs: Vec<(f64, f64)> = self
                    .maps
                    .iter()
                    .map(|m| match m {
                        ContractionMap::Affine1D { ratio, offset } => {
                            (rat_to_f64(ratio), rat_to_f64(offset))
                        }
                        _ => (f64::NAN, f64::NAN),
                    })
                    .collect();
                let mut x = match self.anchor() {
                    Point::One(a) => rat_to_f64(&a),
                    _ => 0.5,
                };
                let mut out = Vec::with_capacity(n);
                for step in 0..n + burn_in {
                    let i = draw(&mut rng);
                    x = coeffs[i].0 * x + coeffs[i].1;
                    if step >= burn_in {
                        out.push(x);
                    }
                }
                PointSet::D1(out)
            }
            ContractionMap::Affine2D { .. } => {
                let coeffs: Vec<([[f64; 2]; 2], [f64; 2])> = self
                    .maps
                    .iter()
                    .map(|m| match m {
                        ContractionMap::Affine2D { matrix, translation } => (
                            [
                                [rat_to_f64(&matrix[0][0]), rat_to_f64(&matrix[0][1])],
                                [rat_to_f64(&matrix[1][0]), rat_to_f64(&matrix[1][1])],
                            ],
                            [rat_to_f64(&translation[0]), rat_to_f64(&translation[1])],
                        ),
                        _ => ([[f64::NAN; 2]; 2], [f64::NAN; 2]),
                    })
                    .collect();
                let (mut x, mut y) = (0.5, 0.5);
                let mut out = Vec::with_capacity(n);
                for step in 0..n + burn_in {
                    let (m, t) = &coeffs[draw(&mut rng)];
                    let nx = m[0][0] * x + m[0][1] * y + t[0];
                    let ny = m[1][0] * x + m[1][1] * y + t[1];
                    x = nx;
                    y = ny;
                    if step >= burn_in {
                        out.push([x, y]);
                    }
                }
                PointSet::D2(out)
            }
            ContractionMap::SqrtBranch { c, .. } => julia_inverse_orbit(*c, seed, n, burn_in),
        }
    }
}

/// Random inverse iteration `z ← ±√(z − c)` with uniform branch choice.
/// Every emitted point satisfies `σ(τ_±(z)) = z` up to rounding.
pub fn julia_inverse_orbit(c: Complex64, seed: u64, n: usize, burn_in: usize) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for step in 0..n + burn_in {
        let w = (z - c).sqrt();
        z = if rng.gen::<bool>() { w } else { -w };
        if step >= burn_in {
            out.push(z);
        }
    }
    PointSet::C(out)
}

/// Sampled point clouds, exported as CSV per the declared interface:
/// `x` for 1D sets, `x,y` for planar sets, `re,im` for complex sets.
#[derive(Clone, Debug, PartialEq)]
pub enum PointSet {
    D1(Vec<f64>),
    D2(Vec<[f64; 2]>),
    C(Vec<Complex64>),
}

impl PointSet {
    pub fn len(&self) -> usize {
        match self {
            PointSet::D1(v) => v.len(),
            PointSet::D2(v) => v.len(),
            PointSet::C(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match self {
            PointSet::D1(v) => {
                s.push_str("x\n");
                for x in v {
                    s.push_str(&format!("{:.14e}\n", x));
                }
            }
            PointSet::D2(v) => {
                s.push_str("x,y\n");
                for p in v {
                    s.push_str(&format!("{:.14e},{:.14e}\n", p[0], p[1]));
                }
            }
            PointSet::C(v) => {
                s.push_str("re,im\n");
                for z in v {
                    s.push_str(&format!("{:.14e},{:.14e}\n", z.re, z.im));
                }
            }
        }
        s
    }
}

/// Outcome of [`IfsSystem::intertwine_check`].
#[derive(Clone, Debug)]
pub struct IntertwineReport {
    /// Whether `τ_b(Y(ω)) = Y(τ̂_b ω)` holds exactly for the encoded points.
    pub exact_equal: bool,
    /// The exact encoded point `Y(τ̂_b ω)`.
    pub encoded: Rat,
    /// Distance between the depth-`k` centers.
    pub residual: f64,
    /// The contraction bound `r_max^k · diam(M)`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Attractor hull of an increasing 1D affine system: the interval between
/// the fixed points of the extreme branches.
pub fn attractor_hull(system: &IfsSystem) -> Result<(Rat, Rat)> {
    let coeffs = system.affine_coeffs()?;
    let fixed: Vec<Rat> = coeffs
        .iter()
        .map(|(r, t)| Affine1 { ratio: r.clone(), offset: t.clone() }.fixed_point())
        .collect();
    let lo = fixed.iter().min().unwrap().clone();
    let hi = fixed.iter().max().unwrap().clone();
    Ok((lo, hi))
}

/// Level-1 gap intervals of the attractor hull: the complement of the branch
/// images of the hull, inside the hull.
pub fn hull_gaps(system: &IfsSystem) -> Result<Vec<(Rat, Rat)>> {
    let (lo, hi) = attractor_hull(system)?;
    let mut images: Vec<(Rat, Rat)> = system
        .affine_coeffs()?
        .iter()
        .map(|(r, t)| (r * &lo + t, r * &hi + t))
        .collect();
    images.sort();
    let mut gaps = Vec::new();
    let mut cursor = lo;
    for (a, b) in images {
        if a > cursor {
            gaps.push((cursor.clone(), a.clone()));
        }
        if b > cursor {
            cursor = b;
        }
    }
    if cursor < hi {
        gaps.push((cursor, hi));
    }
    Ok(gaps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iw(s: &str) -> InfiniteWord {
        s.parse().unwrap()
    }

    #[test]
    fn standard_systems_build() {
        for name in ["dyadic", "cantor3", "cantor4", "sierpinski"] {
            let sys = IfsSystem::standard(name).unwrap();
            assert_eq!(sys.name(), name);
        }
        assert!(IfsSystem::standard("mystery").is_err());
        assert!(IfsSystem::julia(Complex64::new(0.125, 0.625)).is_ok());
        assert!(IfsSystem::julia(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn cantor_fixed_points() {
        let c3 = IfsSystem::standard("cantor3").unwrap();
        assert_eq!(c3.encode_exact(&iw("(0)")).unwrap(), Point::One(Rat::zero()));
        assert_eq!(c3.encode_exact(&iw("(1)")).unwrap(), Point::One(Rat::one()));
        let c4 = IfsSystem::standard("cantor4").unwrap();
        // x = (x+2)/4 has solution 2/3, the supremum of supp(μ₄)
        assert_eq!(c4.encode_exact(&iw("(1)")).unwrap(), Point::One(rat(2, 3)));
    }

    #[test]
    fn nested_balls_and_radius() {
        let c3 = IfsSystem::standard("cantor3").unwrap();
        let w = iw("01(10)");
        let mut prev: Option<EncodedBall> = None;
        for k in 1..8 {
            let ball = c3.encode_ball(&w, k).unwrap();
            assert_eq!(ball.radius, rat(1, 3i64.pow(k as u32)));
            if let Some(p) = prev {
                // nested: |c_k − c_{k+1}| + r_{k+1} ≤ r_k
                let ck = p.center.as_rat().unwrap().clone();
                let cl = ball.center.as_rat().unwrap().clone();
                assert!((ck - cl).abs() + &ball.radius <= p.radius);
            }
            prev = Some(ball);
        }
    }

    #[test]
    fn intertwine_examples() {
        let c3 = IfsSystem::standard("cantor3").unwrap();
        // τ_0(Y(1,1,…)) = τ_0(1) = 1/3 = Y(0,1,1,…)
        let rep = c3.intertwine_check(0, &iw("(1)"), 6).unwrap();
        assert!(rep.exact_equal);
        assert_eq!(rep.encoded, rat(1, 3));
        assert!(rep.within_bound);

        let dy = IfsSystem::standard("dyadic").unwrap();
        let rep = dy.intertwine_check(1, &iw("(0)"), 6).unwrap();
        assert!(rep.exact_equal);
        assert_eq!(rep.encoded, rat(1, 2));
    }

    #[test]
    fn left_inverse_exact_on_grid() {
        for name in ["dyadic", "cantor3", "cantor4"] {
            let sys = IfsSystem::standard(name).unwrap();
            let coeffs = sys.affine_coeffs().unwrap();
            for g in 0..100i64 {
                let x = rat(g, 100);
                for (r, t) in &coeffs {
                    let y = r * &x + t;
                    assert_eq!(sys.shift_point_1d(&y).unwrap(), x, "{name}");
                }
            }
        }
    }

    #[test]
    fn covering_and_gaps() {
        let dy = IfsSystem::standard("dyadic").unwrap();
        assert!(hull_gaps(&dy).unwrap().is_empty());
        let c3 = IfsSystem::standard("cantor3").unwrap();
        assert_eq!(hull_gaps(&c3).unwrap(), vec![(rat(1, 3), rat(2, 3))]);
        let c4 = IfsSystem::standard("cantor4").unwrap();
        // hull [0, 2/3]; images [0,1/6] and [1/2,2/3]
        assert_eq!(attractor_hull(&c4).unwrap(), (Rat::zero(), rat(2, 3)));
        assert_eq!(hull_gaps(&c4).unwrap(), vec![(rat(1, 6), rat(1, 2))]);
    }

    #[test]
    fn overlap_rejected() {
        let bad = IfsSystem::affine_1d(
            "bad",
            vec![(rat(2, 3), rat(0, 1)), (rat(2, 3), rat(1, 3))],
            WeightVector::uniform(2).unwrap(),
        );
        assert_eq!(bad.unwrap_err(), Error::OverlappingBranches);
        let not_contractive = IfsSystem::affine_1d(
            "bad",
            vec![(rat(1, 1), rat(0, 1)), (rat(1, 3), rat(2, 3))],
            WeightVector::uniform(2).unwrap(),
        );
        assert!(matches!(not_contractive.unwrap_err(), Error::NotContractive(0)));
    }

    #[test]
    fn chaos_game_deterministic_and_supported() {
        let c3 = IfsSystem::standard("cantor3").unwrap();
        let a = c3.chaos_game(7, 2000, DEFAULT_BURN_IN);
        let b = c3.chaos_game(7, 2000, DEFAULT_BURN_IN);
        assert_eq!(a, b);
        let c = c3.chaos_game(8, 2000, DEFAULT_BURN_IN);
        assert_ne!(a, c);
        if let PointSet::D1(points) = a {
            let eps = 1e-9;
            for x in points {
                assert!((-eps..=1.0 + eps).contains(&x));
                // the level-1 gap is avoided after burn-in
                assert!(!(x > 1.0 / 3.0 + eps && x < 2.0 / 3.0 - eps));
            }
        } else {
            panic!("expected 1D point set");
        }
    }

    #[test]
    fn julia_branch_identity() {
        let c = Complex64::new(0.375, -0.125);
        if let PointSet::C(points) = julia_inverse_orbit(c, 3, 500, 64) {
            let mut prev = None;
            for z in &points {
                // z was produced as ±√(prev − c): z² + c = prev
                if let Some(p) = prev {
                    let back = z * z + c;
                    let diff: Complex64 = back - p;
                    assert!(diff.norm() < 1e-12);
                }
                assert!(z.norm() <= 2.0);
                prev = Some(*z);
            }
        } else {
            panic!("expected complex point set");
        }
    }

    #[test]
    fn csv_shapes() {
        let one = PointSet::D1(vec![0.5]);
        assert!(one.to_csv().starts_with("x\n"));
        let two = PointSet::D2(vec![[0.0, 1.0]]);
        assert!(two.to_csv().starts_with("x,y\n"));
        let c = PointSet::C(vec![Complex64::new(0.0, 1.0)]);
        assert!(c.to_csv().starts_with("re,im\n"));
    }
}
