use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::Number;

/// Otter's constant, used where a fixed value is needed (cycle-length selection).
pub const OTTER_ALPHA: f64 = 0.338_321_856_899_207_6;

/// Scalar parameters shared by all models. Fields are optional because each
/// model uses a different subset; accessors report what is missing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Number>,
    /// Degree budget `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Cycle-length constant `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_len: Option<usize>,
}

fn missing(name: &'static str) -> Error {
    invalid(name, "required but not set")
}

fn open_unit(name: &'static str, x: &Number, allow_one: bool) -> Result<()> {
    let v = x.value();
    let ok = v > 0.0 && (v < 1.0 || (allow_one && v == 1.0));
    if !ok || !v.is_finite() {
        let range = if allow_one { "(0,1]" } else { "(0,1)" };
        return Err(invalid(name, format!("{x} is not in {range}")));
    }
    Ok(())
}

impl ModelParams {
    pub fn new(n: usize) -> Self {
        ModelParams {
            n,
            p: None,
            s: None,
            q: None,
            rho: None,
            lambda: None,
            k: None,
            eps: None,
            delta: None,
            degree: None,
            cycle_len: None,
        }
    }

    /// Correlated Erdős–Rényi parameters given the parent density `p` and subsampling `s`.
    pub fn correlated_er(n: usize, p: Number, s: Number) -> Result<Self> {
        let mut m = ModelParams::new(n);
        m.p = Some(p);
        m.s = Some(s);
        m.validate()?;
        Ok(m)
    }

    /// Correlated Erdős–Rényi parameters given the marginal density `q` and correlation `ρ`.
    pub fn correlated_er_q_rho(n: usize, q: Number, rho: Number) -> Result<Self> {
        let mut m = ModelParams::new(n);
        m.q = Some(q);
        m.rho = Some(rho);
        m.validate()?;
        Ok(m)
    }

    pub fn sbm(n: usize, k: usize, lambda: Number, eps: Number) -> Result<Self> {
        let mut m = ModelParams::new(n);
        m.k = Some(k);
        m.lambda = Some(lambda);
        m.eps = Some(eps);
        m.validate()?;
        Ok(m)
    }

    pub fn with_s(mut self, s: Number) -> Result<Self> {
        self.s = Some(s);
        self.validate()?;
        Ok(self)
    }

    pub fn with_degree(mut self, d: usize) -> Result<Self> {
        self.degree = Some(d);
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: Number) -> Result<Self> {
        self.delta = Some(delta);
        self.validate()?;
        Ok(self)
    }

    pub fn with_cycle_len(mut self, len: usize) -> Result<Self> {
        self.cycle_len = Some(len);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n", format!("must be at least 2, got {}", self.n)));
        }
        if let Some(p) = &self.p {
            open_unit("p", p, true)?;
        }
        if let Some(s) = &self.s {
            open_unit("s", s, true)?;
        }
        if let Some(q) = &self.q {
            open_unit("q", q, false)?;
        }
        if let Some(rho) = &self.rho {
            let v = rho.value();
            if !(0.0..1.0).contains(&v) {
                return Err(invalid("rho", format!("{rho} is not in [0,1)")));
            }
        }
        if let (Some(p), Some(s), Some(q), Some(rho)) = (&self.p, &self.s, &self.q, &self.rho) {
            let (p, s) = (p.value(), s.value());
            let q2 = p * s;
            let rho2 = s * (1.0 - p) / (1.0 - p * s);
            if (q2 - q.value()).abs() > 1e-12 || (rho2 - rho.value()).abs() > 1e-12 {
                return Err(Error::Invalid(format!(
                    "(p,s) and (q,rho) disagree: p*s = {q2}, q = {q}; rho(p,s) = {rho2}, rho = {rho}"
                )));
            }
        }
        if let Some(lambda) = &self.lambda {
            if !(lambda.value() > 0.0) || !lambda.value().is_finite() {
                return Err(invalid("lambda", format!("{lambda} must be positive")));
            }
        }
        if let Some(k) = self.k {
            if k < 2 {
                return Err(invalid("k", format!("must be at least 2, got {k}")));
            }
        }
        if let Some(eps) = &self.eps {
            if !(0.0..1.0).contains(&eps.value()) {
                return Err(invalid("eps", format!("{eps} is not in [0,1)")));
            }
        }
        if let (Some(_), Some(_), Some(_)) = (&self.lambda, self.k, &self.eps) {
            let (same, diff) = self.sbm_probabilities()?;
            for (name, x) in [
                ("intra-community probability", same),
                ("inter-community probability", diff),
            ] {
                if !(0.0..=1.0).contains(&x.value()) {
                    return Err(Error::Invalid(format!("{name} {x} is not in [0,1]")));
                }
            }
        }
        if let Some(delta) = &self.delta {
            let v = delta.value();
            if !(v > 0.0 && v <= 0.01) {
                return Err(invalid("delta", format!("{delta} is not in (0, 0.01]")));
            }
        }
        if self.degree == Some(0) {
            return Err(invalid("degree", "must be at least 1"));
        }
        Ok(())
    }

    pub fn n_number(&self) -> Number {
        Number::int(self.n as i64)
    }

    pub fn s(&self) -> Result<Number> {
        if let Some(s) = &self.s {
            return Ok(s.clone());
        }
        let q = self.q.as_ref().ok_or_else(|| missing("s"))?;
        let rho = self.rho.as_ref().ok_or_else(|| missing("s"))?;
        // s = q + ρ(1 − q)
        Ok(q.add(&rho.mul(&Number::int(1).sub(q))))
    }

    pub fn p(&self) -> Result<Number> {
        if let Some(p) = &self.p {
            return Ok(p.clone());
        }
        if self.q.is_some() && self.rho.is_some() {
            return Ok(self.q.as_ref().unwrap().div(&self.s()?));
        }
        if self.lambda.is_some() {
            return self.mean_edge_probability();
        }
        Err(missing("p"))
    }

    pub fn q(&self) -> Result<Number> {
        if let Some(q) = &self.q {
            return Ok(q.clone());
        }
        Ok(self.p()?.mul(&self.s()?))
    }

    pub fn rho(&self) -> Result<Number> {
        if let Some(rho) = &self.rho {
            return Ok(rho.clone());
        }
        let (p, s) = (self.p()?, self.s()?);
        let one = Number::int(1);
        Ok(s.mul(&one.sub(&p)).div(&one.sub(&p.mul(&s))))
    }

    pub fn lambda(&self) -> Result<Number> {
        self.lambda.clone().ok_or_else(|| missing("lambda"))
    }

    pub fn lambda_tilde(&self) -> Result<f64> {
        Ok(self.lambda()?.value().max(1.0))
    }

    pub fn k(&self) -> Result<usize> {
        self.k.ok_or_else(|| missing("k"))
    }

    pub fn eps(&self) -> Result<Number> {
        self.eps.clone().ok_or_else(|| missing("eps"))
    }

    pub fn delta(&self) -> Result<Number> {
        self.delta.clone().ok_or_else(|| missing("delta"))
    }

    pub fn degree(&self) -> Result<usize> {
        self.degree.ok_or_else(|| missing("degree"))
    }

    pub fn cycle_len(&self) -> Result<usize> {
        self.cycle_len.ok_or_else(|| missing("cycle_len"))
    }

    /// `λ/n`.
    pub fn mean_edge_probability(&self) -> Result<Number> {
        Ok(self.lambda()?.div(&self.n_number()))
    }

    /// `((1+(k−1)ε)λ/n, (1−ε)λ/n)`.
    pub fn sbm_probabilities(&self) -> Result<(Number, Number)> {
        let base = self.mean_edge_probability()?;
        let eps = self.eps()?;
        let k = Number::int(self.k()? as i64);
        let one = Number::int(1);
        let same = one.add(&k.sub(&one).mul(&eps)).mul(&base);
        let diff = one.sub(&eps).mul(&base);
        Ok((same, diff))
    }

    /// Whether `N` satisfies the four inequalities that fix the cycle-length constant.
    pub fn cycle_len_conditions(&self, big_n: usize) -> Result<[bool; 4]> {
        let delta = self.delta()?.value();
        let eps = self.eps()?.value();
        let k = self.k()? as f64;
        let sa = OTTER_ALPHA.sqrt();
        let nf = big_n as f64;
        let half = (1.0 - delta / 2.0).powf(nf);
        Ok([
            (sa - delta) * (1.0 + eps.powf(nf) * k) <= sa - delta / 2.0,
            10.0 * k * (1.0 - delta).powf(nf) <= half,
            (sa - delta / 2.0) * (1.0 + half).powi(2) <= sa - delta / 4.0,
            half * (nf + 1.0) <= 1.0,
        ])
    }

    /// Smallest `N ≥ 2/δ` satisfying all four conditions.
    pub fn select_cycle_len(&self) -> Result<usize> {
        let delta = self.delta()?.value();
        let start = (2.0 / delta).ceil() as usize;
        for big_n in start..start + 10_000_000 {
            if self.cycle_len_conditions(big_n)?.iter().all(|&b| b) {
                return Ok(big_n);
            }
        }
        Err(Error::BudgetExceeded(
            "no cycle length found within search range".into(),
        ))
    }
}
