//! Explicit super-solution barriers.
//!
//! The building block is the profile `f(y) = (Σ |y_i|^{θ_i})^{−α}` which
//! satisfies `Σ[(f^{m_i})_{y_i y_i} + α_i (y_i f)_{y_i}] ≤ 0` outside the set
//! `Σ |y_i|^{θ_i} ≤ R₀`. Its anisotropic rescalings `f^{(λ)}` give
//!
//! * the space-time barrier `ū(x,t) = min(C₀, h(t)^{-1} f^{(λ)}(x_i h(t)^{-α_i}))`
//!   for the original equation, and
//! * the stationary envelope `F(y) = min(C₁, f^{(λ₁)}(y))` that bounds the
//!   rescaled solution for all times.
//!
//! Throughout, `α` (field `alpha_exp`) is the profile exponent and is unrelated
//! to the per-axis rates `α_i` of [`ExponentSet::alpha`].

use thiserror::Error;

use crate::params::{Condition, ExponentSet, ParamsError};
use crate::quasi::Halton;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarrierError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("exponents are not admissible (violated: {0:?})")]
    Inadmissible(Vec<Condition>),
    #[error("profile parameters violate (1-m_i)/2 < 1/(alpha theta_i) < alpha_i on axis {axis}")]
    ChainViolated { axis: usize },
    #[error("R0 denominator min_i(alpha_i alpha theta_i) - 1 = {0} is not positive")]
    NonPositiveDenominator(f64),
    #[error("factor 1/alpha - mu_i theta_i = {value} is not positive on axis {axis}")]
    NonPositiveLambdaFactor { axis: usize, value: f64 },
    #[error("parameter {name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("point has wrong dimension: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("the profile is singular at the origin")]
    Origin,
    #[error("closed-form residual needs every coordinate nonzero (axis {0} is zero)")]
    CoordinatePlane(usize),
    #[error("time {t} outside the barrier horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("envelope radius R1 = {r1} is below R0 = {r0}")]
    EnvelopeRadius { r1: f64, r0: f64 },
    #[error("envelope height C1 = {c1} is below the data maximum {max}")]
    EnvelopeHeight { c1: f64, max: f64 },
}

/// Exponent `α` and per-axis powers `θ_i` of the profile `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileParams {
    pub theta: Vec<f64>,
    pub alpha_exp: f64,
}

/// Picks `θ_i > 2` and `α > 0` inside the admissible chain
/// `(1−m_i)/2 < 1/(α θ_i) < α_i`.
///
/// Rule: `g_i` is the midpoint of `(max(μ_i, 0), α_i)`, `α = 1/(3 max g_i)`,
/// `θ_i = 1/(α g_i)`. This gives `1/(α θ_i) = g_i` and `θ_i ≥ 3`.
pub fn choose_profile_params(e: &ExponentSet) -> Result<ProfileParams, BarrierError> {
    let verdict = e.check_admissible()?;
    if !verdict.is_admissible() {
        return Err(BarrierError::Inadmissible(verdict.violations()));
    }
    let mu = e.mu();
    let g: Vec<f64> = mu
        .iter()
        .zip(e.alpha())
        .map(|(&m, &a)| (m.max(0.0) + a) / 2.0)
        .collect();
    let g_max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let alpha_exp = 1.0 / (3.0 * g_max);
    let theta: Vec<f64> = g.iter().map(|gi| 1.0 / (alpha_exp * gi)).collect();
    let p = ProfileParams { theta, alpha_exp };
    check_chain(e, &p)?;
    Ok(p)
}

/// Verifies `θ_i > 2`, `α > 0` and the strict chain on every axis.
pub fn check_chain(e: &ExponentSet, p: &ProfileParams) -> Result<(), BarrierError> {
    if !(p.alpha_exp > 0.0) {
        return Err(BarrierError::NonPositive {
            name: "alpha",
            value: p.alpha_exp,
        });
    }
    for (axis, ((&th, &mu), &ai)) in p.theta.iter().zip(&e.mu()).zip(e.alpha()).enumerate() {
        let g = 1.0 / (p.alpha_exp * th);
        if !(th > 2.0 && mu < g && g < ai) {
            return Err(BarrierError::ChainViolated { axis });
        }
    }
    Ok(())
}

/// `R₀ = max{1, [n·max_i m_iα(m_iα+1)θ_i² / (min_i α_iαθ_i − 1)]^{1/(2α·max_i((θ_iα)^{-1} − μ_i))}}`.
pub fn compute_r0(e: &ExponentSet, p: &ProfileParams) -> Result<f64, BarrierError> {
    let a = p.alpha_exp;
    let n = e.dim() as f64;
    let mu = e.mu();
    let num = n * e
        .m()
        .iter()
        .zip(&p.theta)
        .map(|(&m, &th)| m * a * (m * a + 1.0) * th * th)
        .fold(f64::NEG_INFINITY, f64::max);
    let den = e
        .alpha()
        .iter()
        .zip(&p.theta)
        .map(|(&ai, &th)| ai * a * th)
        .fold(f64::INFINITY, f64::min)
        - 1.0;
    if !(den > 0.0) {
        return Err(BarrierError::NonPositiveDenominator(den));
    }
    let gap = p
        .theta
        .iter()
        .zip(&mu)
        .map(|(&th, &m)| 1.0 / (th * a) - m)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(gap > 0.0) {
        return Err(BarrierError::NonPositiveDenominator(gap));
    }
    let r = (num / den).powf(1.0 / (2.0 * a * gap));
    Ok(r.max(1.0))
}

/// Smallest `λ` allowed by the barrier construction:
/// `max{[C₀(1+βT)^{1/β} R₀^α]^{nβ/2}, (C₀A^α)^{nβ/2} · max_i(α^{-1} − μ_iθ_i)^{-1}}`.
pub fn compute_lambda(
    e: &ExponentSet,
    p: &ProfileParams,
    r0: f64,
    c0: f64,
    a: f64,
    horizon: f64,
) -> Result<f64, BarrierError> {
    positive("C0", c0)?;
    positive("A", a)?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(BarrierError::NonPositive {
            name: "T",
            value: horizon,
        });
    }
    let beta = e.beta();
    let n = e.dim() as f64;
    let power = n * beta / 2.0;
    let al = p.alpha_exp;
    let first = (c0 * (1.0 + beta * horizon).powf(1.0 / beta) * r0.powf(al)).powf(power);
    let mut factor = f64::NEG_INFINITY;
    for (axis, (&mu, &th)) in e.mu().iter().zip(&p.theta).enumerate() {
        let value = 1.0 / al - mu * th;
        if !(value > 0.0) {
            return Err(BarrierError::NonPositiveLambdaFactor { axis, value });
        }
        factor = factor.max(1.0 / value);
    }
    let second = (c0 * a.powf(al)).powf(power) * factor;
    Ok(first.max(second))
}

fn positive(name: &'static str, value: f64) -> Result<(), BarrierError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(BarrierError::NonPositive { name, value })
    }
}

/// Regions used by the barrier construction.
#[derive(Debug, Clone, PartialEq)]
pub enum BarrierDomain {
    /// `{y : Σ |y_i|^{θ_i} > R₀}`.
    OmegaR0 { r0: f64 },
    /// Image of `Ω_{R₀}` under `y_i = λ^{(m_i−1)/(nβ)} x_i`.
    OmegaR0Lambda { r0: f64, lambda: f64 },
    /// `Π_i [−A^{1/θ_i}, A^{1/θ_i}]`.
    PlateauBox { half_widths: Vec<f64> },
}

/// Fully specified barrier: profile parameters, `R₀`, `λ` and the plateau data.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSpec {
    exponents: ExponentSet,
    theta: Vec<f64>,
    alpha_exp: f64,
    mu: Vec<f64>,
    r0: f64,
    lambda: f64,
    c0: f64,
    a: f64,
    horizon: f64,
}

impl BarrierSpec {
    /// Builds the barrier for plateau height `c0`, plateau parameter `a` and
    /// horizon `horizon`, with `λ` at its lower bound.
    pub fn build(e: &ExponentSet, c0: f64, a: f64, horizon: f64) -> Result<Self, BarrierError> {
        let p = choose_profile_params(e)?;
        let r0 = compute_r0(e, &p)?;
        let lambda = compute_lambda(e, &p, r0, c0, a, horizon)?;
        Ok(Self {
            exponents: e.clone(),
            mu: e.mu(),
            theta: p.theta,
            alpha_exp: p.alpha_exp,
            r0,
            lambda,
            c0,
            a,
            horizon,
        })
    }

    /// Default barrier for data with maximum `max_value` supported in
    /// `Π [−s_i, s_i]`: `C₀ = 2·max`, plateau box twice the support box.
    pub fn dominating(
        e: &ExponentSet,
        max_value: f64,
        support_extent: &[f64],
        horizon: f64,
    ) -> Result<Self, BarrierError> {
        let p = choose_profile_params(e)?;
        check_dim(e.dim(), support_extent)?;
        let a = support_extent
            .iter()
            .zip(&p.theta)
            .map(|(&s, &th)| (2.0 * s).powf(th))
            .fold(f64::MIN_POSITIVE, f64::max);
        Self::build(e, 2.0 * max_value, a, horizon)
    }

    pub fn exponents(&self) -> &ExponentSet {
        &self.exponents
    }
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    pub fn alpha_exp(&self) -> f64 {
        self.alpha_exp
    }
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn plateau_param(&self) -> f64 {
        self.a
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn profile_params(&self) -> ProfileParams {
        ProfileParams {
            theta: self.theta.clone(),
            alpha_exp: self.alpha_exp,
        }
    }

    fn dim(&self) -> usize {
        self.theta.len()
    }

    /// `2/(nβ)`, the amplitude power of the `λ`-scaling.
    fn amp_power(&self) -> f64 {
        2.0 / (self.dim() as f64 * self.exponents.beta())
    }

    /// Per-axis stretch powers `(1 − m_i)/(nβ)`: `f^{(λ)}(y) = λ^{2/(nβ)} f(λ^{b_i} y_i)`.
    fn stretch_powers(&self) -> Vec<f64> {
        let nb = self.dim() as f64 * self.exponents.beta();
        self.exponents.m().iter().map(|m| (1.0 - m) / nb).collect()
    }

    /// `Σ_i |y_i|^{θ_i} λ^{b_i θ_i}`.
    fn weighted_sum(&self, lambda: f64, y: &[f64]) -> f64 {
        y.iter()
            .zip(&self.theta)
            .zip(self.stretch_powers())
            .map(|((&yi, &th), b)| yi.abs().powf(th) * lambda.powf(b * th))
            .sum()
    }

    /// `f(y) = (Σ |y_i|^{θ_i})^{−α}`.
    pub fn profile(&self, y: &[f64]) -> Result<f64, BarrierError> {
        self.scaled_profile_at(1.0, y)
    }

    /// `f^{(λ)}` with the barrier's own `λ`.
    pub fn scaled_profile(&self, y: &[f64]) -> Result<f64, BarrierError> {
        self.scaled_profile_at(self.lambda, y)
    }

    /// `f^{(λ)}(y) = λ^{2/(nβ)} (Σ |y_i|^{θ_i} λ^{(1−m_i)θ_i/(nβ)})^{−α}`.
    pub fn scaled_profile_at(&self, lambda: f64, y: &[f64]) -> Result<f64, BarrierError> {
        check_dim(self.dim(), y)?;
        positive("lambda", lambda)?;
        let s = self.weighted_sum(lambda, y);
        if s == 0.0 {
            return Err(BarrierError::Origin);
        }
        Ok(lambda.powf(self.amp_power()) * s.powf(-self.alpha_exp))
    }

    /// Self-similar branch `(1+βt)^{−1/β} f^{(λ)}(x_i (1+βt)^{−α_i/β})`;
    /// `+∞` at the origin.
    pub fn branch(&self, x: &[f64], t: f64) -> f64 {
        let beta = self.exponents.beta();
        let base = 1.0 + beta * t;
        let z: Vec<f64> = x
            .iter()
            .zip(self.exponents.alpha())
            .map(|(&xi, &ai)| xi * base.powf(-ai / beta))
            .collect();
        let s = self.weighted_sum(self.lambda, &z);
        if s == 0.0 {
            return f64::INFINITY;
        }
        base.powf(-1.0 / beta) * self.lambda.powf(self.amp_power()) * s.powf(-self.alpha_exp)
    }

    /// Barrier `ū(x,t) = min(C₀, branch(x,t))` for `t ∈ [0, T]`.
    pub fn supersolution(&self, x: &[f64], t: f64) -> Result<f64, BarrierError> {
        check_dim(self.dim(), x)?;
        if !(t >= 0.0 && t <= self.horizon) {
            return Err(BarrierError::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(self.branch(x, t).min(self.c0))
    }

    /// Half-widths `A^{1/θ_i}` of the plateau box.
    pub fn plateau_half_widths(&self) -> Vec<f64> {
        self.theta.iter().map(|th| self.a.powf(1.0 / th)).collect()
    }

    /// `min_{t} branch(corner, t) / C₀` over a uniform sample of `[0, T]`.
    ///
    /// The branch is decreasing in every `|x_i|`, so its minimum over the
    /// plateau box is attained at the corner; a value `≥ 1` means the barrier
    /// equals `C₀` on the whole box at every sampled time.
    pub fn plateau_margin(&self, time_samples: usize) -> f64 {
        let corner = self.plateau_half_widths();
        let k = time_samples.max(1);
        (0..=k)
            .map(|j| self.horizon * j as f64 / k as f64)
            .map(|t| self.branch(&corner, t) / self.c0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, domain: &BarrierDomain, y: &[f64]) -> bool {
        match domain {
            BarrierDomain::OmegaR0 { r0 } => self.weighted_sum(1.0, y) > *r0,
            BarrierDomain::OmegaR0Lambda { r0, lambda } => self.weighted_sum(*lambda, y) > *r0,
            BarrierDomain::PlateauBox { half_widths } => {
                y.iter().zip(half_widths).all(|(yi, w)| yi.abs() <= *w)
            }
        }
    }

    /// Closed-form `Σ_i [(g^{m_i})_{y_i y_i} + α_i (y_i g)_{y_i}]` for
    /// `g = f^{(λ)}`.
    pub fn stationary_residual(&self, lambda: f64, y: &[f64]) -> Result<f64, BarrierError> {
        check_dim(self.dim(), y)?;
        positive("lambda", lambda)?;
        if let Some(axis) = y.iter().position(|&v| v == 0.0) {
            return Err(BarrierError::CoordinatePlane(axis));
        }
        let al = self.alpha_exp;
        let amp = lambda.powf(self.amp_power());
        let scale: Vec<f64> = self
            .theta
            .iter()
            .zip(self.stretch_powers())
            .map(|(&th, b)| lambda.powf(b * th))
            .collect();
        let s = self.weighted_sum(lambda, y);
        let mut diffusion = 0.0;
        let mut drift = 0.0;
        for i in 0..self.dim() {
            let th = self.theta[i];
            let c = scale[i];
            let ay = y[i].abs();
            let ds = c * th * ay.powf(th - 1.0);
            let dds = c * th * (th - 1.0) * ay.powf(th - 2.0);
            let mi = self.exponents.m()[i];
            let p = al * mi;
            let second = p * (p + 1.0) * s.powf(-p - 2.0) * ds * ds - p * s.powf(-p - 1.0) * dds;
            diffusion += amp.powf(mi) * second;
            let y_ds = c * th * ay.powf(th);
            drift += self.exponents.alpha()[i]
                * amp
                * (s.powf(-al) - al * y_ds * s.powf(-al - 1.0));
        }
        Ok(diffusion + drift)
    }

    /// Samples `count` Halton points of `Ω^{(λ)}_{R₀}` and records the extreme
    /// residual values.
    ///
    /// Points are drawn as `Σ |x_i|^{θ_i} = R₀·10^{6u}` with uniformly
    /// distributed simplex weights and signs, then mapped by
    /// `y_i = λ^{(m_i−1)/(nβ)} x_i`.
    pub fn residual_certificate(
        &self,
        lambda: f64,
        count: usize,
        seed: u64,
    ) -> Result<ResidualCertificate, BarrierError> {
        let n = self.dim();
        let stretch = self.stretch_powers();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut argmax = Vec::new();
        let mut used = 0usize;
        let domain = BarrierDomain::OmegaR0Lambda {
            r0: self.r0,
            lambda,
        };
        for u in Halton::new(n + 2, seed.wrapping_mul(1 << 20)) {
            if used == count {
                break;
            }
            let s = self.r0 * 10f64.powf(6.0 * u[0]);
            let raw: Vec<f64> = u[1..=n].iter().map(|v| -v.ln()).collect();
            let total: f64 = raw.iter().sum();
            let signs = (u[n + 1] * (1u64 << n) as f64) as u64;
            let y: Vec<f64> = (0..n)
                .map(|i| {
                    let w = raw[i] / total;
                    let xi = (w * s).powf(1.0 / self.theta[i]);
                    let sign = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                    sign * xi * lambda.powf(-stretch[i])
                })
                .collect();
            if y.iter().any(|&v| v == 0.0 || !v.is_finite()) || !self.contains(&domain, &y) {
                continue;
            }
            let r = self.stationary_residual(lambda, &y)?;
            min = min.min(r);
            if r > max {
                max = r;
                argmax = y;
            }
            used += 1;
        }
        Ok(ResidualCertificate {
            lambda,
            samples: used,
            seed,
            min,
            max,
            argmax,
        })
    }

    /// `min_i (1/(αθ_i) − μ_i)` and `min_i (α_i − 1/(αθ_i))`: both positive iff
    /// the admissible chain holds strictly.
    pub fn chain_margins(&self) -> (f64, f64) {
        let mut lower = f64::INFINITY;
        let mut upper = f64::INFINITY;
        for ((&th, &mu), &ai) in self.theta.iter().zip(&self.mu).zip(self.exponents.alpha()) {
            let g = 1.0 / (self.alpha_exp * th);
            lower = lower.min(g - mu);
            upper = upper.min(ai - g);
        }
        (lower, upper)
    }

    /// Key/value report of the barrier parameters.
    pub fn report(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let (lo, hi) = self.chain_margins();
        format!(
            "theta: {}\nalpha_exp: {}\nmu: {}\nR0: {}\nlambda: {}\nC0: {}\nA: {}\nT: {}\n\
             plateau_half_widths: {}\nchain_margin_lower: {}\nchain_margin_upper: {}\n\
             plateau_margin: {}\n",
            join(&self.theta),
            self.alpha_exp,
            join(&self.mu),
            self.r0,
            self.lambda,
            self.c0,
            self.a,
            self.horizon,
            join(&self.plateau_half_widths()),
            lo,
            hi,
            self.plateau_margin(64),
        )
    }
}

fn check_dim(expected: usize, y: &[f64]) -> Result<(), BarrierError> {
    if y.len() == expected {
        Ok(())
    } else {
        Err(BarrierError::Dimension {
            expected,
            got: y.len(),
        })
    }
}

/// Extreme values of the stationary residual over a quasi-random sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCertificate {
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
    pub min: f64,
    pub max: f64,
    /// Point where `max` was attained.
    pub argmax: Vec<f64>,
}

impl ResidualCertificate {
    pub fn holds(&self) -> bool {
        self.samples > 0 && self.max <= 0.0
    }
}

/// Stationary envelope `F = f^{(λ₁)}` on `Ω^{(λ₁)}_{R₁}` and `C₁` elsewhere,
/// with `λ₁` fixed by `f^{(λ₁)} = C₁` on the boundary of `Ω^{(λ₁)}_{R₁}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    spec: BarrierSpec,
    c1: f64,
    r1: f64,
    lambda1: f64,
}

impl Envelope {
    pub fn new(spec: &BarrierSpec, c1: f64, r1: f64) -> Result<Self, BarrierError> {
        positive("C1", c1)?;
        if !(r1 >= spec.r0) {
            return Err(BarrierError::EnvelopeRadius { r1, r0: spec.r0 });
        }
        // λ₁^{2/(nβ)} R₁^{−α} = C₁
        let lambda1 = (c1 * r1.powf(spec.alpha_exp)).powf(1.0 / spec.amp_power());
        positive("lambda1", lambda1)?;
        Ok(Self {
            spec: spec.clone(),
            c1,
            r1,
            lambda1,
        })
    }

    /// Envelope whose plateau `R^n \ Ω^{(λ₁)}_{R₁}` contains the box
    /// `Π [−s_i, s_i]`; `R₁` is the smallest such radius `≥ R₀` up to 1%.
    pub fn covering(spec: &BarrierSpec, c1: f64, support_extent: &[f64]) -> Result<Self, BarrierError> {
        positive("C1", c1)?;
        check_dim(spec.dim(), support_extent)?;
        // Corner sum at radius R: Σ s_i^{θ_i} (C₁ R^α)^{μ_i θ_i}.
        let excess = |r: f64| -> f64 {
            support_extent
                .iter()
                .zip(&spec.theta)
                .zip(&spec.mu)
                .map(|((&s, &th), &mu)| s.abs().powf(th) * (c1 * r.powf(spec.alpha_exp)).powf(mu * th))
                .sum::<f64>()
                - r
        };
        let mut hi = spec.r0;
        if excess(hi) > 0.0 {
            let mut lo = hi;
            while excess(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
            }
            while hi / lo > 1.01 {
                let mid = (lo * hi).sqrt();
                if excess(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        Self::new(spec, c1, hi)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn r1(&self) -> f64 {
        self.r1
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn domain(&self) -> BarrierDomain {
        BarrierDomain::OmegaR0Lambda {
            r0: self.r1,
            lambda: self.lambda1,
        }
    }

    /// `F(y)`.
    pub fn eval(&self, y: &[f64]) -> Result<f64, BarrierError> {
        check_dim(self.spec.dim(), y)?;
        if self.spec.contains(&self.domain(), y) {
            self.spec.scaled_profile_at(self.lambda1, y)
        } else {
            Ok(self.c1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat() -> ExponentSet {
        ExponentSet::new(&[1.0]).unwrap()
    }

    fn planar() -> ExponentSet {
        ExponentSet::new(&[0.8, 1.2]).unwrap()
    }

    #[test]
    fn profile_params_planar() {
        let p = choose_profile_params(&planar()).unwrap();
        assert!((p.alpha_exp - 1.0 / 1.05).abs() < 1e-14);
        assert!((p.theta[0] - 3.0).abs() < 1e-12);
        assert!((p.theta[1] - 5.25).abs() < 1e-12);
        assert!((1.0 / (p.alpha_exp * p.theta[0]) - 0.35).abs() < 1e-12);
        assert!((1.0 / (p.alpha_exp * p.theta[1]) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn profile_params_heat() {
        let p = choose_profile_params(&heat()).unwrap();
        assert!((p.alpha_exp - 2.0 / 3.0).abs() < 1e-14);
        assert!((p.theta[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_rejected() {
        let e = ExponentSet::new(&[1.0, 3.0]).unwrap();
        assert_eq!(
            choose_profile_params(&e),
            Err(BarrierError::Inadmissible(vec![Condition::MaxBelowBound]))
        );
    }

    #[test]
    fn r0_heat() {
        let e = heat();
        let p = choose_profile_params(&e).unwrap();
        let r0 = compute_r0(&e, &p).unwrap();
        assert!((r0 - 10f64.powf(1.5)).abs() < 1e-10);
    }

    #[test]
    fn r0_clamped_at_one() {
        // m = 0.05, alpha = 0.5, theta = 3: bracket = 0.2306/0.5 < 1
        let e = ExponentSet::new(&[0.05]).unwrap();
        let p = ProfileParams {
            theta: vec![3.0],
            alpha_exp: 0.5,
        };
        check_chain(&e, &p).unwrap();
        assert_eq!(compute_r0(&e, &p).unwrap(), 1.0);
    }

    #[test]
    fn r0_denominator_guard() {
        let e = heat();
        let p = ProfileParams {
            theta: vec![3.0],
            alpha_exp: 0.3,
        };
        assert!(matches!(
            compute_r0(&e, &p),
            Err(BarrierError::NonPositiveDenominator(_))
        ));
    }

    #[test]
    fn lambda_heat_terms() {
        let e = heat();
        let p = choose_profile_params(&e).unwrap();
        assert!((compute_lambda(&e, &p, 1.0, 1.0, 1e-30, 0.0).unwrap() - 1.0).abs() < 1e-14);
        // second term dominates when R0 is tiny
        let l = compute_lambda(&e, &p, 1e-30, 1.0, 1.0, 0.0).unwrap();
        assert!((l - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_guard() {
        let e = ExponentSet::new(&[0.8, 1.2]).unwrap();
        let p = ProfileParams {
            theta: vec![3.0, 5.25],
            alpha_exp: 10.0,
        };
        // 1/alpha - mu_0 theta_0 = 0.1 - 0.3 < 0
        assert!(matches!(
            compute_lambda(&e, &p, 1.0, 1.0, 1.0, 1.0),
            Err(BarrierError::NonPositiveLambdaFactor { axis: 0, .. })
        ));
        let p = choose_profile_params(&e).unwrap();
        assert!(compute_lambda(&e, &p, 1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn profile_values() {
        let b = BarrierSpec::build(&heat(), 1.0, 1.0, 1.0).unwrap();
        assert!((b.profile(&[1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((b.profile(&[2.0]).unwrap() - 0.25).abs() < 1e-14);
        assert_eq!(b.profile(&[0.0]), Err(BarrierError::Origin));
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        let v = b.profile(&[1.0, 1.0]).unwrap();
        assert!((v - 2f64.powf(-1.0 / 1.05)).abs() < 1e-14);
        assert!((v - 0.5168).abs() < 1e-4);
    }

    #[test]
    fn scaled_profile_identity_and_linear_case() {
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        let y = [0.7, -1.3];
        assert_eq!(b.scaled_profile_at(1.0, &y), b.profile(&y));
        let h = BarrierSpec::build(&heat(), 1.0, 1.0, 1.0).unwrap();
        for &lam in &[0.3f64, 2.0, 17.0] {
            let want = lam.powf(2.0 / 2.0) * h.profile(&[1.7]).unwrap();
            let got = h.scaled_profile_at(lam, &[1.7]).unwrap();
            assert!((got - want).abs() <= 1e-13 * want);
        }
    }

    #[test]
    fn supersolution_plateau_and_time_guard() {
        let b = BarrierSpec::build(&planar(), 1.5, 4.0, 2.0).unwrap();
        let w = b.plateau_half_widths();
        assert!(b.plateau_margin(64) >= 1.0);
        for &t in &[0.0, 0.5, 2.0] {
            for &s in &[-1.0, -0.3, 0.0, 0.9, 1.0] {
                let x = [s * w[0], -s * w[1]];
                assert_eq!(b.supersolution(&x, t).unwrap(), 1.5);
            }
        }
        assert!(matches!(
            b.supersolution(&[0.0, 0.0], 2.5),
            Err(BarrierError::TimeOutOfRange { .. })
        ));
        assert!(b.supersolution(&[0.0, 0.0], -1e-9).is_err());
    }

    #[test]
    fn supersolution_initial_is_clipped_profile() {
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        let x = [1e3, 1e3];
        let v = b.supersolution(&x, 0.0).unwrap();
        let f = b.scaled_profile(&x).unwrap();
        assert_eq!(v, f.min(1.0));
        assert!(v < 1.0);
    }

    #[test]
    fn residual_needs_off_plane_points() {
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        assert_eq!(
            b.stationary_residual(1.0, &[0.0, 1.0]),
            Err(BarrierError::CoordinatePlane(0))
        );
    }

    #[test]
    fn residual_sign_symmetry() {
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        let r = b.stationary_residual(1.0, &[3.0, 5.0]).unwrap();
        for y in [[-3.0, 5.0], [3.0, -5.0], [-3.0, -5.0]] {
            assert_eq!(b.stationary_residual(1.0, &y).unwrap(), r);
        }
    }

    #[test]
    fn envelope_matches_on_boundary() {
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        let env = Envelope::new(&b, 2.0, b.r0() * 3.0).unwrap();
        // boundary point: scale a direction until the weighted sum hits R1
        let dir = [1.0, 0.5];
        let (mut lo, mut hi) = (1e-6, 1e6);
        for _ in 0..200 {
            let mid = (lo * hi as f64).sqrt();
            let y = [dir[0] * mid, dir[1] * mid];
            if env.spec.weighted_sum(env.lambda1, &y) > env.r1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let y = [dir[0] * hi, dir[1] * hi];
        let v = env.spec.scaled_profile_at(env.lambda1, &y).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        assert_eq!(env.eval(&[0.0, 0.0]).unwrap(), 2.0);
        assert!(Envelope::new(&b, 2.0, b.r0() * 0.5).is_err());
        assert!(Envelope::new(&b, 0.0, b.r0()).is_err());
    }

    #[test]
    fn envelope_covering_contains_box() {
        let b = BarrierSpec::build(&planar(), 1.0, 1.0, 1.0).unwrap();
        let env = Envelope::covering(&b, 0.5, &[40.0, 30.0]).unwrap();
        assert!(env.r1() >= b.r0());
        for y in [[40.0, 30.0], [-40.0, 30.0], [0.0, -30.0]] {
            assert_eq!(env.eval(&y).unwrap(), 0.5);
        }
    }
}
