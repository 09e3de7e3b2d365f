//! Parameter derivation and the per-level seed budget.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::samplers::gf::MAX_DEGREE;
use crate::samplers::{AlmostKWiseSpec, SmallBiasSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Rigorous,
    Scaled,
}

/// Caller-chosen values for desk-scale runs. Anything set here voids the
/// error guarantee; fooling is then measured, not proved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    pub threshold: Option<usize>,
    /// Field degree of the inner small-bias source for `T` at every level.
    pub m_t: Option<u32>,
    /// Field degree of the small-bias source for `X` at every level.
    pub m_x: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrgParams {
    pub a: f64,
    pub b: f64,
    pub w: usize,
    pub n: usize,
    pub eps: f64,
    pub mode: Mode,
    /// `p = 2^{-d}`.
    pub d: u32,
    pub p: f64,
    pub eps_prime: f64,
    pub k: usize,
    pub delta: f64,
    pub mu: f64,
    pub r: usize,
    /// Lengths at or below this are filled with seed bits directly.
    pub threshold: usize,
    pub m_t: Option<u32>,
    pub m_x: Option<u32>,
}

fn validate(a: f64, b: f64, w: usize, n: usize, eps: f64) -> Result<()> {
    if !(b >= 2.0) || !b.is_finite() {
        return Err(Error::InvalidParams(format!("b = {b} must be at least 2")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParams(format!("a = {a} must be positive")));
    }
    if n < 2 || w == 0 {
        return Err(Error::InvalidParams(format!("need n ≥ 2 and w ≥ 1 (n={n}, w={w})")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps = {eps} must lie in (0, 1)")));
    }
    Ok(())
}

/// Rigorous parameters: every constraint taken with equality, `k` rounded up
/// and `p` rounded down to a power of two.
pub fn derive_params(a: f64, b: f64, w: usize, n: usize, eps: f64) -> Result<PrgParams> {
    validate(a, b, w, n, eps)?;
    let d = (2.0 * b).log2().ceil() as u32;
    let p = 0.5f64.powi(d as i32);
    let eps_prime = eps * p / (14.0 * w as f64 * (n as f64).log2());
    if !(eps_prime < 1.0) {
        return Err(Error::InvalidParams(format!("eps' = {eps_prime} is not below 1")));
    }
    let k = (8.0 * a * (n as f64).powi(4) * w as f64 / eps_prime).log2().ceil().max(1.0) as usize;
    let delta = eps_prime * (p / 2.0).powi(2 * k as i32);
    let mu = eps_prime / (2.0 * a * b.powi(k as i32));
    let r = ((n as f64).ln() / (p / 2.0)).ceil() as usize;
    let threshold = 320 * ((1.0 / eps_prime).log2().ceil() as usize) << d;
    Ok(PrgParams {
        a,
        b,
        w,
        n,
        eps,
        mode: Mode::Rigorous,
        d,
        p,
        eps_prime,
        k,
        delta,
        mu,
        r,
        threshold,
        m_t: None,
        m_x: None,
    })
}

/// Rigorous derivation followed by the given overrides. The result is always
/// labelled [`Mode::Scaled`].
pub fn derive_scaled(a: f64, b: f64, w: usize, n: usize, eps: f64, o: Overrides) -> Result<PrgParams> {
    let mut params = derive_params(a, b, w, n, eps)?;
    params.mode = Mode::Scaled;
    if let Some(k) = o.k {
        if k == 0 {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        params.k = k;
        params.delta = params.eps_prime * (params.p / 2.0).powi(2 * k as i32);
        params.mu = params.eps_prime / (2.0 * a * b.powi(k as i32));
    }
    if let Some(delta) = o.delta {
        params.delta = delta;
    }
    if let Some(mu) = o.mu {
        params.mu = mu;
    }
    if let Some(t) = o.threshold {
        if t == 0 {
            return Err(Error::InvalidParams("threshold must be at least 1".into()));
        }
        params.threshold = t;
    }
    for m in [o.m_t, o.m_x].into_iter().flatten() {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::UnsupportedField(m));
        }
    }
    params.m_t = o.m_t;
    params.m_x = o.m_x;
    if !(params.delta > 0.0) || !(params.mu > 0.0) {
        return Err(Error::InvalidParams("delta and mu must be positive".into()));
    }
    Ok(params)
}

/// What one recursion level does with its share of the seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelPlan {
    /// Output `n` seed bits.
    Base { n: usize },
    Step { n: usize, t: AlmostKWiseSpec, x: SmallBiasSpec },
}

impl LevelPlan {
    pub fn n(&self) -> usize {
        match self {
            LevelPlan::Base { n } | LevelPlan::Step { n, .. } => *n,
        }
    }

    /// Seed bits this level reads, excluding deeper levels.
    pub fn own_bits(&self) -> usize {
        match self {
            LevelPlan::Base { n } => *n,
            LevelPlan::Step { t, x, .. } => t.seed_len() + x.seed_len(),
        }
    }
}

impl PrgParams {
    pub fn is_rigorous(&self) -> bool {
        self.mode == Mode::Rigorous
    }

    /// `⌊n(1 − p/2)⌋`.
    pub fn next_len(&self, n: usize) -> usize {
        n - n.div_ceil(1usize << (self.d + 1))
    }

    /// Inner field degree for `T` at length `n`: the smallest `m` whose
    /// accounted distance `2^{2k·d/2}(nd − 1)/2^m` is at most `delta`.
    pub fn m_t_at(&self, n: usize) -> Result<u32> {
        if let Some(m) = self.m_t {
            return Ok(m);
        }
        let num = 2f64.powf(self.k as f64 * self.d as f64) * (n as f64 * self.d as f64 - 1.0);
        field_for(num, self.delta)
    }

    /// Field degree for `X` at length `n`: smallest `m` with `(n − 1)/2^m <= mu`.
    pub fn m_x_at(&self, n: usize) -> Result<u32> {
        if let Some(m) = self.m_x {
            return Ok(m);
        }
        field_for(n as f64 - 1.0, self.mu)
    }

    /// The recursion, level by level, down to the base case.
    pub fn plan(&self) -> Result<Vec<LevelPlan>> {
        let mut out = Vec::new();
        let mut n = self.n;
        loop {
            if n <= self.threshold {
                out.push(LevelPlan::Base { n });
                return Ok(out);
            }
            let t_inner = self.m_t_at(n)?;
            let mut t = AlmostKWiseSpec::new(n, self.d, (2 * self.k).min(n), t_inner)?;
            if self.m_t.is_none() {
                t.delta = self.delta;
            }
            let x = SmallBiasSpec::new(n, self.m_x_at(n)?)?;
            out.push(LevelPlan::Step { n, t, x });
            n = self.next_len(n);
        }
    }
}

fn field_for(num: f64, target: f64) -> Result<u32> {
    let m = if num <= target { 1 } else { (num / target).log2().ceil().max(1.0) as u32 };
    if m > MAX_DEGREE {
        return Err(Error::UnsupportedField(m));
    }
    Ok(m)
}

/// Exact number of seed bits `generate` reads, on every path.
pub fn seed_length(params: &PrgParams) -> Result<usize> {
    Ok(params.plan()?.iter().map(LevelPlan::own_bits).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_rigorous_example() {
        let p = derive_params(1.0, 2.0, 3, 1024, 0.1).unwrap();
        assert_eq!(p.d, 2);
        assert_eq!(p.p, 0.25);
        assert!((p.eps_prime - 5.9523809523809524e-05).abs() < 1e-18);
        assert_eq!(p.k, 59);
        assert!((p.delta / 1.622079939050724e-111 - 1.0).abs() < 1e-12);
        assert!((p.mu / 5.1628674880262116e-23 - 1.0).abs() < 1e-12);
        assert_eq!(p.threshold, 19200);
        assert_eq!(p.r, 56);
        assert!(p.delta <= p.eps_prime * (p.p / 2.0).powi(2 * p.k as i32));
        assert!(p.mu <= p.eps_prime / (2.0 * p.a * p.b.powi(p.k as i32)));
        assert!(p.p <= 1.0 / (2.0 * p.b));
    }

    #[test]
    fn rigorous_desk_scale_is_base_case() {
        let p = derive_params(1.0, 2.0, 3, 1024, 0.1).unwrap();
        assert_eq!(p.plan().unwrap(), vec![LevelPlan::Base { n: 1024 }]);
        assert_eq!(seed_length(&p).unwrap(), 1024);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(derive_params(1.0, 1.5, 3, 100, 0.1).is_err());
        assert!(derive_params(1.0, 2.0, 3, 1, 0.1).is_err());
        assert!(derive_params(1.0, 2.0, 3, 100, 1.0).is_err());
    }

    #[test]
    fn scaled_override_is_labelled() {
        let o = Overrides { k: Some(4), ..Default::default() };
        let p = derive_scaled(1.0, 2.0, 3, 64, 0.1, o).unwrap();
        assert_eq!(p.mode, Mode::Scaled);
        assert_eq!(p.k, 4);
        assert!(!p.is_rigorous());
    }

    #[test]
    fn next_len_is_floor() {
        let p = derive_params(1.0, 2.0, 3, 64, 0.1).unwrap();
        for n in 1..500usize {
            assert_eq!(p.next_len(n), (n as f64 * (1.0 - p.p / 2.0)).floor() as usize);
        }
    }

    #[test]
    fn toy_plan_costs() {
        let o = Overrides {
            threshold: Some(7),
            m_t: Some(3),
            m_x: Some(3),
            ..Default::default()
        };
        let p = derive_scaled(1.0, 2.0, 3, 8, 0.25, o).unwrap();
        let plan = p.plan().unwrap();
        assert_eq!(plan.len(), 2);
        assert_eq!(plan[1], LevelPlan::Base { n: 7 });
        assert_eq!(seed_length(&p).unwrap(), 6 + 6 + 7);
    }

    #[test]
    fn unsupported_field_surfaces() {
        let o = Overrides { threshold: Some(10), ..Default::default() };
        let p = derive_scaled(1.0, 2.0, 3, 64, 0.1, o).unwrap();
        assert!(matches!(p.plan(), Err(Error::UnsupportedField(_))));
    }
}
