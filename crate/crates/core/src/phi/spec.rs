//! JSON descriptor for Φ-functions.

use super::{Growth, Kind, PhiFunction};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use serde::{Deserialize, Serialize};

/// Version of the Φ-spec JSON layout, reported by `--version`.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_inc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_dec: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_q: Option<f64>,
}

/// `{"family": ..., "p": {...}, "a": {...}, "growth": {...}}`.
///
/// `autonomous` reads `coef` and `exponent`; `tabulated` reads `t` and `values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ScalarField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ScalarField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSpec>,
}

fn need<T>(v: Option<T>, family: &str, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::Input(format!("family \"{family}\" requires field \"{field}\"")))
}

impl PhiSpec {
    pub fn build(&self) -> Result<PhiFunction> {
        let f = self.family.as_str();
        let phi = match f {
            "linear" => PhiFunction::linear(),
            "power_varexp" => PhiFunction::power_varexp(need(self.p.clone(), f, "p")?)?,
            "normalized_varexp" => PhiFunction::normalized_varexp(need(self.p.clone(), f, "p")?)?,
            "clr" => PhiFunction::clr(need(self.p.clone(), f, "p")?)?,
            "double_phase" => PhiFunction::double_phase(need(self.a.clone(), f, "a")?)?,
            "autonomous" => PhiFunction::autonomous(self.coef.unwrap_or(1.0), need(self.exponent, f, "exponent")?)?,
            "tabulated" => PhiFunction::tabulated(need(self.t.clone(), f, "t")?, need(self.values.clone(), f, "values")?)?,
            other => return Err(Error::Input(format!("unknown family \"{other}\""))),
        };
        let g = self.growth.clone().unwrap_or_default();
        Ok(phi.with_growth(Growth {
            p_inc: g.p_inc,
            q_dec: g.q_dec,
            l_p: g.l_p.unwrap_or(1.0),
            l_q: g.l_q.unwrap_or(1.0),
        }))
    }

    pub fn from_json(s: &str) -> Result<PhiFunction> {
        let spec: PhiSpec = serde_json::from_str(s)?;
        spec.build()
    }
}

impl PhiFunction {
    pub fn to_spec(&self) -> PhiSpec {
        let mut spec = PhiSpec {
            family: self.family().name().to_string(),
            p: None,
            a: None,
            coef: None,
            exponent: None,
            t: None,
            values: None,
            growth: None,
        };
        match &self.kind {
            Kind::Linear => {}
            Kind::PowerVarExp(p) | Kind::NormalizedVarExp(p) | Kind::Clr(p) => spec.p = Some(p.clone()),
            Kind::DoublePhase(a) => spec.a = Some(a.clone()),
            Kind::Autonomous { coef, exponent } => {
                spec.coef = Some(*coef);
                spec.exponent = Some(*exponent);
            }
            Kind::Tabulated(tab) => {
                let (t, v) = tab.nodes();
                spec.t = Some(t.to_vec());
                spec.values = Some(v.to_vec());
            }
        }
        let g = self.growth;
        if g != Growth::default() {
            spec.growth = Some(GrowthSpec { p_inc: g.p_inc, q_dec: g.q_dec, l_p: Some(g.l_p), l_q: Some(g.l_q) });
        }
        spec
    }
}
