//! Text forms of the inputs: fields, characters, additive characters and
//! measures, either from flags or from a JSON job file.

use std::fs;
use std::path::Path;

use epsilon_core::{
    addchar_standard, AddChar, CycNum, HaarMeasure, KElement, LocalFieldSpec, MulChar,
};
use serde::Deserialize;

use crate::CliError;

/// Twist precision used when a `--psi-twist` gives no `prec`.
pub const DEFAULT_TWIST_PREC: u32 = 8;

/// A job file: every field optional, flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub field: Option<String>,
    #[serde(rename = "char")]
    pub character: Option<String>,
    pub psi_twist: Option<String>,
    pub vol: Option<String>,
    pub l: Option<Vec<u64>>,
}

impl JobFile {
    pub fn load(path: &Path) -> Result<JobFile, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("job {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("job {}: {e}", path.display())))
    }
}

/// A fully parsed `(χ, ψ, dx)` triple.
pub struct Job {
    pub field: LocalFieldSpec,
    pub chi: MulChar,
    pub psi: AddChar,
    pub dx: HaarMeasure,
}

fn parse_err(what: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("--{what} {value:?}: {why}"))
}

pub fn parse_field(s: &str) -> Result<LocalFieldSpec, CliError> {
    s.parse().map_err(|e| parse_err("field", s, e))
}

pub fn parse_cyc(what: &str, p: u64, s: &str) -> Result<CycNum, CliError> {
    CycNum::parse(p, s).map_err(|e| parse_err(what, s, e))
}

fn key_values<'a>(what: &str, s: &'a str) -> Result<Vec<(&'a str, &'a str)>, CliError> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| parse_err(what, s, format!("expected key=value, got {t:?}")))
        })
        .collect()
}

fn parse_list(what: &str, s: &str, v: &str) -> Result<Vec<u64>, CliError> {
    v.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| parse_err(what, s, format!("bad number {x:?}")))
        })
        .collect()
}

/// `trivial`, or `a=<conductor>;exps=<e1,e2,…>;pi=<χ(π)>`. Exponents are
/// on the unit-group generators at level `a`; missing ones are zero.
pub fn parse_char(field: LocalFieldSpec, s: &str) -> Result<MulChar, CliError> {
    let p = field.p();
    if s.trim() == "trivial" {
        return Ok(MulChar::trivial(field));
    }
    let mut a = 0u32;
    let mut exps = Vec::new();
    let mut pi = CycNum::one(p);
    for (k, v) in key_values("char", s)? {
        match k {
            "a" => {
                a = v
                    .parse()
                    .map_err(|_| parse_err("char", s, format!("bad conductor {v:?}")))?
            }
            "exps" => exps = parse_list("char", s, v)?,
            "pi" => pi = parse_cyc("char", p, v)?,
            other => return Err(parse_err("char", s, format!("unknown key {other:?}"))),
        }
    }
    if a > 0 {
        let orders = epsilon_core::unit_group(field, a)
            .map_err(|e| parse_err("char", s, e))?
            .orders()
            .len();
        if exps.len() > orders {
            return Err(parse_err(
                "char",
                s,
                format!("{} exponents for {orders} generators", exps.len()),
            ));
        }
        exps.resize(orders, 0);
    } else if !exps.is_empty() {
        return Err(parse_err("char", s, "exponents given with a=0"));
    }
    MulChar::from_exponents(field, a, pi, exps).map_err(|e| parse_err("char", s, e))
}

/// `standard`, or `n=<valuation>;u=<c1,…,cf>;prec=<k>`: the character
/// `x ↦ ψ₀(π^n u x)`. `u` defaults to 1.
pub fn parse_psi(field: LocalFieldSpec, s: &str) -> Result<AddChar, CliError> {
    let std = addchar_standard(field).map_err(|e| parse_err("psi-twist", s, e))?;
    if s.trim() == "standard" {
        return Ok(std);
    }
    let mut n = 0i64;
    let mut u = Vec::new();
    let mut prec = DEFAULT_TWIST_PREC;
    for (k, v) in key_values("psi-twist", s)? {
        match k {
            "n" => {
                n = v
                    .parse()
                    .map_err(|_| parse_err("psi-twist", s, format!("bad valuation {v:?}")))?
            }
            "u" => u = parse_list("psi-twist", s, v)?,
            "prec" => {
                prec = v
                    .parse()
                    .map_err(|_| parse_err("psi-twist", s, format!("bad precision {v:?}")))?
            }
            other => return Err(parse_err("psi-twist", s, format!("unknown key {other:?}"))),
        }
    }
    if u.is_empty() {
        u.push(1);
    }
    u.resize(field.f(), 0);
    let b = KElement::from_coords(field, n, prec, &u).map_err(|e| parse_err("psi-twist", s, e))?;
    std.scale(&b).map_err(|e| parse_err("psi-twist", s, e))
}

pub fn parse_vol(p: u64, s: &str) -> Result<HaarMeasure, CliError> {
    HaarMeasure::new(parse_cyc("vol", p, s)?).map_err(|e| parse_err("vol", s, e))
}

/// Flag values, falling back to the job file, then to defaults.
#[derive(Debug, Clone, Default)]
pub struct JobInputs {
    pub field: Option<String>,
    pub character: Option<String>,
    pub psi_twist: Option<String>,
    pub vol: Option<String>,
}

impl JobInputs {
    pub fn merge(self, file: &JobFile) -> JobInputs {
        JobInputs {
            field: self.field.or_else(|| file.field.clone()),
            character: self.character.or_else(|| file.character.clone()),
            psi_twist: self.psi_twist.or_else(|| file.psi_twist.clone()),
            vol: self.vol.or_else(|| file.vol.clone()),
        }
    }

    pub fn resolve(&self) -> Result<Job, CliError> {
        let field_s = self
            .field
            .as_deref()
            .ok_or_else(|| CliError::Parse("--field is required".into()))?;
        let field = parse_field(field_s)?;
        let chi = parse_char(field, self.character.as_deref().unwrap_or("trivial"))?;
        let psi = parse_psi(field, self.psi_twist.as_deref().unwrap_or("standard"))?;
        let dx = parse_vol(field.p(), self.vol.as_deref().unwrap_or("1"))?;
        Ok(Job {
            field,
            chi,
            psi,
            dx,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> LocalFieldSpec {
        parse_field("padic:p=3,f=1").unwrap()
    }

    #[test]
    fn characters() {
        let chi = parse_char(q3(), "a=1;exps=1").unwrap();
        assert_eq!((chi.conductor(), chi.unit_exps()), (1, &[1u64][..]));
        let chi = parse_char(q3(), "a=2;pi=-1").unwrap();
        assert_eq!(chi.conductor(), 0);
        assert_eq!(chi.pi_value(), &CycNum::from_int(3, -1));
        assert!(parse_char(q3(), "a=1;exps=1,1").is_err());
        assert!(parse_char(q3(), "a=1;bogus=1").is_err());
        assert!(parse_char(q3(), "exps=1").is_err());
    }

    #[test]
    fn additive_characters() {
        assert_eq!(parse_psi(q3(), "standard").unwrap().level(), 0);
        assert_eq!(parse_psi(q3(), "n=-1;u=2").unwrap().level(), -1);
        assert!(parse_psi(q3(), "n=0;u=3").is_err());
        let f9 = parse_field("laurent:p=3,f=2").unwrap();
        assert_eq!(parse_psi(f9, "n=2;u=0,1").unwrap().level(), 2);
    }

    #[test]
    fn job_inputs_prefer_flags() {
        let file: JobFile = serde_json::from_str(r#"{"field":"padic:p=5,f=1","vol":"9"}"#).unwrap();
        let inputs = JobInputs {
            field: Some("padic:p=3,f=1".into()),
            ..Default::default()
        }
        .merge(&file);
        let job = inputs.resolve().unwrap();
        assert_eq!(job.field, q3());
        assert!(job.dx.volume().p() == 3);
        assert!(serde_json::from_str::<JobFile>(r#"{"nope":1}"#).is_err());
    }
}
