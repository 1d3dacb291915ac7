//! Noether currents, the characteristic-form identity, and hard-coded
//! transcriptions of the published current families.
//!
//! A current `(I_0, I_1..I_n)` of a generator with characteristic `Q`
//! satisfies `D_t I_0 + Σ D_j I_j = s·μQ·𝓔` identically for a sign
//! `s ∈ {+1, −1}` that is found by trying both rather than fixed in advance.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jet::{divergence, euler, JetError, JetExpr, MultiIndex, VectorField};
use crate::model::{conformal_factor, dilation_weight, special_exponent, Damping, ModelError, ModelSpec, Nonlinearity};
use crate::param::ParamField;
use crate::symmetry::{self, variational_test, SymmetryError, Verdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurrentError {
    #[error("{generator} is not a variational symmetry; obstruction {obstruction}")]
    NotVariational { generator: String, obstruction: String },
    #[error("{0} is a divergence symmetry but no potential was found")]
    MissingPotential(String),
    #[error("not applicable to this model: {0}")]
    Inapplicable(String),
    #[error("currents belong to different generators: {0} vs {1}")]
    Mismatch(String, String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurrentSet {
    pub name: String,
    pub generator: String,
    pub density: JetExpr,
    pub flux: Vec<JetExpr>,
    /// `μQ`.
    pub multiplier: JetExpr,
    /// `𝓔` of the model.
    pub residual: JetExpr,
    /// Recorded sign `s`; 0 until verified.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub passed: bool,
    pub sign: i8,
    /// `Div I − s·μQ𝓔` for the recorded sign (`s = +1` when both fail).
    pub residual: JetExpr,
}

impl CurrentSet {
    fn components(&self) -> Vec<JetExpr> {
        std::iter::once(self.density.clone()).chain(self.flux.iter().cloned()).collect()
    }

    pub fn divergence(&self) -> Result<JetExpr, JetError> {
        divergence(&self.components())
    }

    pub fn scaled(&self, c: &ParamField) -> CurrentSet {
        CurrentSet {
            density: self.density.scale(c),
            flux: self.flux.iter().map(|f| f.scale(c)).collect(),
            ..self.clone()
        }
    }
}

/// Canonicalizes `Div I − s·μQ𝓔` for both signs.
pub fn verify_identity(cs: &CurrentSet) -> Result<IdentityCheck, CurrentError> {
    let div = cs.divergence()?;
    let source = &cs.multiplier * &cs.residual;
    let plus = &div - &source;
    if plus.is_zero() {
        return Ok(IdentityCheck { passed: true, sign: 1, residual: plus });
    }
    if (&div + &source).is_zero() {
        return Ok(IdentityCheck { passed: true, sign: -1, residual: JetExpr::zero() });
    }
    Ok(IdentityCheck { passed: false, sign: 0, residual: plus })
}

/// `E_u(μQ𝓔) = 0`.
pub fn multiplier_check(cs: &CurrentSet) -> Result<bool, CurrentError> {
    Ok(euler(&(&cs.multiplier * &cs.residual))?.is_zero())
}

fn checked(mut cs: CurrentSet) -> Result<CurrentSet, CurrentError> {
    cs.sign = verify_identity(&cs)?.sign;
    Ok(cs)
}

/// `I_a = ξ_a L + Q ∂L/∂u_a − B_a` for a verified symmetry.
pub fn noether_current(v: &VectorField, spec: &ModelSpec, verdict: &Verdict) -> Result<CurrentSet, CurrentError> {
    if !verdict.is_symmetry() {
        return Err(CurrentError::NotVariational {
            generator: verdict.generator.clone(),
            obstruction: verdict.obstruction.to_string(),
        });
    }
    let b = verdict.potential.clone().ok_or_else(|| CurrentError::MissingPotential(verdict.generator.clone()))?;
    let l = spec.lagrangian()?;
    let q = v.characteristic();
    let mut comps = Vec::with_capacity(spec.n + 1);
    for a in 0..=spec.n {
        let dl = l.partial_deriv(&MultiIndex::single(a));
        comps.push(v.xi(a) * &l + &q * &dl - b[a].clone());
    }
    let density = comps.remove(0);
    checked(CurrentSet {
        name: format!("noether[{}]", v.name()),
        generator: v.name().to_string(),
        density,
        flux: comps,
        multiplier: spec.mu()? * q,
        residual: spec.residual()?,
        sign: 0,
    })
}

/// Verifies the generator for the model and builds its current.
pub fn current_for(v: &VectorField, spec: &ModelSpec) -> Result<CurrentSet, CurrentError> {
    let verdict = variational_test(v, &spec.lagrangian()?)?;
    noether_current(v, spec, &verdict)
}

/// Passes iff `Div(s1·cs1 − s2·cs2) = 0`, i.e. the currents differ by a null current.
pub fn null_difference(cs1: &CurrentSet, cs2: &CurrentSet) -> Result<bool, CurrentError> {
    let s1 = if cs1.sign == 0 { verify_identity(cs1)?.sign } else { cs1.sign };
    let s2 = if cs2.sign == 0 { verify_identity(cs2)?.sign } else { cs2.sign };
    if s1 == 0 || s2 == 0 {
        return Ok(false);
    }
    let a = cs1.scaled(&ParamField::from_int(s1 as i64));
    let b = cs2.scaled(&ParamField::from_int(s2 as i64));
    let diff: Vec<JetExpr> = a.components().iter().zip(b.components()).map(|(x, y)| x - &y).collect();
    Ok(divergence(&diff)?.is_zero())
}

/// One attempted reading of a printed current.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReadingOutcome {
    pub reading: String,
    pub passed: bool,
    pub sign: i8,
}

/// A published current family member, with each reading tried.
#[derive(Clone, Debug, PartialEq)]
pub struct Transcription {
    pub family: String,
    pub generator: VectorField,
    pub readings: Vec<ReadingOutcome>,
    /// The first reading that verified.
    pub adopted: Option<CurrentSet>,
}

impl Transcription {
    pub fn printed_passes(&self) -> bool {
        self.readings.first().map(|r| r.passed).unwrap_or(false)
    }
}

fn delta(j: usize, k: usize) -> ParamField {
    ParamField::from_int((j == k) as i64)
}

fn grad2(n: usize) -> JetExpr {
    (1..=n).map(|k| JetExpr::ud(k).pow(2)).sum()
}

struct Ctx {
    n: usize,
    mu: JetExpr,
    l0: JetExpr,
    f: JetExpr,
    residual: JetExpr,
}

impl Ctx {
    fn new(spec: &ModelSpec) -> Result<Ctx, CurrentError> {
        Ok(Ctx {
            n: spec.n,
            mu: spec.mu()?,
            l0: spec.lagrangian0()?,
            f: spec.nonlinearity.potential()?,
            residual: spec.residual()?,
        })
    }

    fn try_readings(
        &self,
        family: &str,
        v: VectorField,
        multiplier: JetExpr,
        readings: Vec<(&str, JetExpr, Vec<JetExpr>)>,
    ) -> Result<Transcription, CurrentError> {
        let mut outcomes = Vec::new();
        let mut adopted = None;
        for (name, density, flux) in readings {
            let cs = CurrentSet {
                name: format!("{} ({})", family, name),
                generator: v.name().to_string(),
                density,
                flux,
                multiplier: multiplier.clone(),
                residual: self.residual.clone(),
                sign: 0,
            };
            let check = verify_identity(&cs)?;
            outcomes.push(ReadingOutcome { reading: name.to_string(), passed: check.passed, sign: check.sign });
            if check.passed && adopted.is_none() {
                adopted = Some(CurrentSet { sign: check.sign, ..cs });
            }
        }
        Ok(Transcription { family: family.to_string(), generator: v, readings: outcomes, adopted })
    }

    fn momentum(&self, k: usize) -> Result<Transcription, CurrentError> {
        let v = symmetry::translation(self.n, k);
        let density = &self.mu * &(JetExpr::ud(k) * JetExpr::ud(0));
        let flux: Vec<JetExpr> =
            (1..=self.n).map(|j| &self.mu * &(JetExpr::ud(k) * JetExpr::ud(j) + self.l0.scale(&delta(j, k)))).collect();
        let negated = flux.iter().map(|f| -f).collect();
        let mult = &self.mu * &v.characteristic();
        self.try_readings(
            "linear momentum",
            v,
            mult,
            vec![("printed", density.clone(), flux), ("negated flux", density, negated)],
        )
    }

    fn angular(&self, k: usize, l: usize) -> Result<Transcription, CurrentError> {
        let v = symmetry::rotation(self.n, k, l);
        let q = JetExpr::x(k) * JetExpr::ud(l) - JetExpr::x(l) * JetExpr::ud(k);
        let density = &self.mu * &(&q * &JetExpr::ud(0));
        let half = ParamField::ratio(1, 2);
        let phi = |j: usize, i: usize, trace: &JetExpr| JetExpr::ud(j) * JetExpr::ud(i) - trace.scale(&delta(j, i));
        let flux_with = |trace: &JetExpr| -> Vec<JetExpr> {
            (1..=self.n)
                .map(|j| {
                    let fx = (JetExpr::x(k).scale(&delta(j, l)) - JetExpr::x(l).scale(&delta(k, j))) * self.f.clone();
                    &self.mu * &(JetExpr::x(l) * phi(j, k, trace) - JetExpr::x(k) * phi(j, l, trace) + fx)
                })
                .collect()
        };
        let printed_trace = grad2(self.n).scale(&half);
        let full_trace = (grad2(self.n) - JetExpr::ud(0).pow(2)).scale(&half);
        let printed = flux_with(&printed_trace);
        let negated = printed.iter().map(|f| -f).collect();
        let mult = &self.mu * &v.characteristic();
        self.try_readings(
            "angular momentum",
            v,
            mult,
            vec![
                ("printed", density.clone(), printed),
                ("negated flux", density.clone(), negated),
                ("u_t^2 in the trace of Phi", density, flux_with(&full_trace)),
            ],
        )
    }

    fn dilation(&self, m: &ParamField) -> Result<Transcription, CurrentError> {
        let v = symmetry::dilation(self.n, &dilation_weight(self.n, m));
        let q = v.characteristic();
        let density = &self.mu * &(JetExpr::t() * self.l0.clone() + &q * &JetExpr::ud(0));
        let flux_sign = |s: i64| -> Vec<JetExpr> {
            (1..=self.n)
                .map(|j| {
                    &self.mu * &(JetExpr::x(j) * self.l0.clone() + (&q * &JetExpr::ud(j)).scale(&ParamField::from_int(s)))
                })
                .collect()
        };
        let mult = &self.mu * &q;
        self.try_readings(
            "dilation",
            v,
            mult,
            vec![("printed", density.clone(), flux_sign(1)), ("flux with -Q u_j", density, flux_sign(-1))],
        )
    }

    /// Shared shape of the conformal families; `extra` is the printed δ_jk term.
    fn conformal_like(&self, family: &str, v: VectorField, k: usize, extra: JetExpr) -> Result<Transcription, CurrentError> {
        let q = v.characteristic();
        let two = ParamField::from_int(2);
        let printed_density =
            &self.mu * &((JetExpr::x(k) * self.l0.clone()).scale(&two) - &q * &JetExpr::ud(k));
        let corrected_density =
            &self.mu * &((JetExpr::t() * JetExpr::x(k) * self.l0.clone()).scale(&two) + &q * &JetExpr::ud(0));
        let flux: Vec<JetExpr> = (1..=self.n)
            .map(|j| &self.mu * &(self.l0.clone() * v.xi(j).clone() - &q * &JetExpr::ud(j) + extra.scale(&delta(j, k))))
            .collect();
        let mult = &self.mu * &q;
        self.try_readings(
            family,
            v,
            mult,
            vec![
                ("printed", printed_density, flux.clone()),
                ("density 2t x_k L0 + Q u_t", corrected_density, flux),
            ],
        )
    }

    fn conformal(&self, k: usize, m: &ParamField) -> Result<Transcription, CurrentError> {
        let q = conformal_factor(self.n, m);
        let v = symmetry::conformal(self.n, k, &q);
        let extra = JetExpr::u().pow(2).scale(&(&q * &ParamField::ratio(1, 2)));
        self.conformal_like("conformal", v, k, extra)
    }

    fn conformal_exp(&self, k: usize, m: &ParamField) -> Result<Transcription, CurrentError> {
        let v = symmetry::conformal_exp(self.n, k, m);
        let extra = JetExpr::u().scale(&(&ParamField::from_int(-4) / m));
        self.conformal_like("exponential conformal", v, k, extra)
    }

    fn energy(&self) -> Result<Transcription, CurrentError> {
        let v = symmetry::translation(self.n, 0);
        let density = (JetExpr::ud(0).pow(2) + grad2(self.n)).scale(&ParamField::ratio(1, 2)) + self.f.clone();
        let flux = (1..=self.n).map(|j| -(JetExpr::ud(0) * JetExpr::ud(j))).collect();
        let mult = &self.mu * &v.characteristic();
        self.try_readings("energy", v, mult, vec![("printed", density, flux)])
    }
}

/// Which published families apply to a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Applicability {
    pub family: String,
    pub applicable: bool,
    pub reason: String,
}

fn power_m(spec: &ModelSpec) -> Option<ParamField> {
    spec.damping.power_m()
}

fn special_power(spec: &ModelSpec) -> Result<ParamField, String> {
    let m = power_m(spec).ok_or("needs a = m/t or a = 0")?;
    match &spec.nonlinearity {
        Nonlinearity::Power { p, .. } => {
            let sp = special_exponent(spec.n, &m).map_err(|e| e.to_string())?;
            if *p == sp {
                Ok(m)
            } else {
                Err(format!("needs p = {}, got {}", sp, p))
            }
        }
        _ => Err("needs a power interaction".into()),
    }
}

fn exponential_m(spec: &ModelSpec) -> Result<ParamField, String> {
    let m = match &spec.damping {
        Damping::Power(m) => m.clone(),
        _ => return Err("needs a = m/t with m != 0".into()),
    };
    match &spec.nonlinearity {
        Nonlinearity::Exponential { rate, .. } if *rate == m => {}
        _ => return Err("needs f = f0 exp(m u) with the damping exponent m".into()),
    }
    let required = ParamField::from_int(1 - spec.n as i64);
    if m != required {
        return Err(format!("needs m = 1 - n = {}, got {}", required, m));
    }
    Ok(m)
}

/// The published families that apply to `spec`, each verified reading by reading.
pub fn paper_catalog(spec: &ModelSpec) -> Result<(Vec<Transcription>, Vec<Applicability>), CurrentError> {
    spec.check_symbolic()?;
    let ctx = Ctx::new(spec)?;
    let n = spec.n;
    let mut jobs: Vec<Box<dyn Fn() -> Result<Transcription, CurrentError> + Send + Sync + '_>> = Vec::new();
    let mut notes = Vec::new();
    let note = |family: &str, r: &Result<ParamField, String>| Applicability {
        family: family.into(),
        applicable: r.is_ok(),
        reason: r.as_ref().err().cloned().unwrap_or_default(),
    };
    let ctx = &ctx;
    for k in 1..=n {
        jobs.push(Box::new(move || ctx.momentum(k)));
    }
    for k in 1..=n {
        for l in k + 1..=n {
            jobs.push(Box::new(move || ctx.angular(k, l)));
        }
    }
    notes.push(Applicability { family: "linear momentum".into(), applicable: true, reason: String::new() });
    notes.push(Applicability { family: "angular momentum".into(), applicable: true, reason: String::new() });
    let sp = special_power(spec);
    notes.push(note("dilation", &sp));
    notes.push(note("conformal", &sp));
    if let Ok(m) = sp {
        let m2 = m.clone();
        jobs.push(Box::new(move || ctx.dilation(&m2)));
        for k in 1..=n {
            let m = m.clone();
            jobs.push(Box::new(move || ctx.conformal(k, &m)));
        }
    }
    let ex = exponential_m(spec);
    notes.push(note("exponential conformal", &ex));
    if let Ok(m) = ex {
        for k in 1..=n {
            let m = m.clone();
            jobs.push(Box::new(move || ctx.conformal_exp(k, &m)));
        }
    }
    let undamped: Result<ParamField, String> =
        if spec.damping == Damping::None { Ok(ParamField::zero()) } else { Err("energy decays when a != 0".into()) };
    notes.push(note("energy", &undamped));
    if undamped.is_ok() {
        jobs.push(Box::new(move || ctx.energy()));
    }
    let out: Result<Vec<Transcription>, CurrentError> = jobs.par_iter().map(|j| j()).collect();
    Ok((out?, notes))
}

/// JSON-friendly current.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CurrentReport {
    pub name: String,
    pub generator: String,
    pub sign: i8,
    pub identity: bool,
    pub multiplier_ok: bool,
    pub density: String,
    pub flux: Vec<String>,
    pub density_latex: String,
    pub flux_latex: Vec<String>,
}

impl CurrentReport {
    pub fn new(cs: &CurrentSet) -> Result<CurrentReport, CurrentError> {
        let check = verify_identity(cs)?;
        Ok(CurrentReport {
            name: cs.name.clone(),
            generator: cs.generator.clone(),
            sign: check.sign,
            identity: check.passed,
            multiplier_ok: multiplier_check(cs)?,
            density: cs.density.to_sexpr(),
            flux: cs.flux.iter().map(JetExpr::to_sexpr).collect(),
            density_latex: cs.density.to_latex(),
            flux_latex: cs.flux.iter().map(JetExpr::to_latex).collect(),
        })
    }
}
