// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON configuration ingest.
//!
//! Frequency fields carry a unit suffix: `_hz` values are ordinary
//! frequencies and are multiplied by 2π, `_rad` values are taken as angular.
//! A `"preset"` key selects a built-in set whose fields the remaining keys
//! override; without it every field is required.

use std::f64::consts::TAU;
use std::path::Path;

use serde_json::{Map, Value};

use super::params::{preset, Drive, Preset, SystemParams};
use crate::error::{Error, Result};

const FREQ_FIELDS: [&str; 7] = [
    "E_C", "g0", "Omega_m", "omega_c", "kappa_c", "gamma_t", "gamma_phi",
];
const PLAIN_FIELDS: [&str; 4] = ["zeta", "n_ac", "Q_m", "T_K"];
const DEFAULT_SPAN: f64 = 50.0;

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn number(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| cfg_err(&format!("{path}{key}"), "expected a number")),
    }
}

/// Angular value of a frequency field given as `<base>_hz` or `<base>_rad`.
fn frequency(obj: &Map<String, Value>, base: &str, path: &str) -> Result<Option<f64>> {
    let hz = number(obj, &format!("{base}_hz"), path)?;
    let rad = number(obj, &format!("{base}_rad"), path)?;
    match (hz, rad) {
        (Some(_), Some(_)) => Err(cfg_err(
            &format!("{path}{base}"),
            format!("give only one of {base}_hz and {base}_rad"),
        )),
        (Some(h), None) => Ok(Some(TAU * h)),
        (None, r) => Ok(r),
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[String], path: &str) -> Result<()> {
    for k in obj.keys() {
        if !allowed.contains(k) {
            return Err(cfg_err(&format!("{path}{k}"), "unknown field"));
        }
    }
    Ok(())
}

fn with_suffixes(bases: &[&str]) -> Vec<String> {
    bases
        .iter()
        .flat_map(|b| [format!("{b}_hz"), format!("{b}_rad")])
        .collect()
}

/// Parses a configuration document.
pub fn parse_config(text: &str) -> Result<Preset> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        cfg_err(
            &format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| cfg_err("<root>", "expected a JSON object"))?;

    let mut allowed = with_suffixes(&FREQ_FIELDS);
    allowed.extend(with_suffixes(&["omega_c_bare"]));
    allowed.extend(PLAIN_FIELDS.iter().map(|s| s.to_string()));
    allowed.extend(["preset", "drive", "zeta_span", "name"].map(String::from));
    check_keys(obj, &allowed, "")?;

    let base = match obj.get("preset") {
        None => None,
        Some(Value::String(name)) => Some(preset(name)?),
        Some(_) => return Err(cfg_err("preset", "expected a preset name")),
    };

    let get = |key: &str, fallback: Option<f64>| -> Result<f64> {
        let v = if FREQ_FIELDS.contains(&key) {
            frequency(obj, key, "")?
        } else {
            number(obj, key, "")?
        };
        v.or(fallback)
            .ok_or_else(|| cfg_err(key, "missing required field"))
    };
    let bp = base.as_ref().map(|p| &p.params);

    let zeta = get("zeta", bp.map(|p| p.zeta))?;
    let e_c = get("E_C", bp.map(|p| p.e_c))?;
    let g0 = get("g0", bp.map(|p| p.g0))?;
    let n_ac = get("n_ac", bp.map(|p| p.n_ac))?;
    let omega_m = get("Omega_m", bp.map(|p| p.omega_m))?;
    let kappa_c = get("kappa_c", bp.map(|p| p.kappa_c))?;
    let gamma_t = get("gamma_t", bp.map(|p| p.gamma_t))?;
    let gamma_phi = get("gamma_phi", bp.map(|p| p.gamma_phi))?;
    let q_m = get("Q_m", bp.map(|p| p.q_m))?;
    let temperature = get("T_K", bp.map(|p| p.temperature))?;

    let effective = frequency(obj, "omega_c", "")?;
    let bare = frequency(obj, "omega_c_bare", "")?;
    let omega_c = match (effective, bare) {
        (Some(_), Some(_)) => {
            return Err(cfg_err(
                "omega_c",
                "give either the effective or the bare cavity frequency",
            ))
        }
        (Some(w), None) => w,
        (None, Some(w)) => w + 8.0 * e_c * n_ac * n_ac,
        (None, None) => bp
            .map(|p| p.omega_c)
            .ok_or_else(|| cfg_err("omega_c", "missing required field"))?,
    };

    let drive = match obj.get("drive") {
        None | Some(Value::Null) => bp.and_then(|p| p.drive),
        Some(Value::Object(d)) => {
            check_keys(d, &with_suffixes(&["E_L", "omega_L"]), "drive.")?;
            let e_l = frequency(d, "E_L", "drive.")?
                .ok_or_else(|| cfg_err("drive.E_L", "missing required field"))?;
            let omega_l = frequency(d, "omega_L", "drive.")?
                .ok_or_else(|| cfg_err("drive.omega_L", "missing required field"))?;
            Some(Drive { e_l, omega_l })
        }
        Some(_) => return Err(cfg_err("drive", "expected an object")),
    };

    let zeta_span = number(obj, "zeta_span", "")?
        .or(base.as_ref().map(|p| p.zeta_span))
        .unwrap_or(DEFAULT_SPAN);
    let name = match obj.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(cfg_err("name", "expected a string")),
        None => base
            .as_ref()
            .map(|p| p.name.clone())
            .unwrap_or_else(|| "custom".into()),
    };

    let params = SystemParams {
        zeta,
        e_c,
        g0,
        n_ac,
        omega_m,
        omega_c,
        kappa_c,
        gamma_t,
        gamma_phi,
        q_m,
        temperature,
        drive,
    };
    params.validate()?;
    Ok(Preset {
        name,
        params,
        zeta_span,
    })
}

pub fn load_config(path: &Path) -> Result<Preset> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "zeta": 150, "E_C_hz": 0.5e9, "g0_hz": 18.2e3, "n_ac": 8.5e-4,
        "Omega_m_hz": 10e6, "omega_c_hz": 16.8e9, "kappa_c_hz": 10e3,
        "gamma_t_hz": 3e3, "gamma_phi_hz": 6e3, "Q_m": 1e6, "T_K": 0.01,
        "drive": {"E_L_hz": 1e5, "omega_L_rad": 1.0e11}
    }"#;

    #[test]
    fn full_config_parses_with_units() {
        let p = parse_config(FULL).unwrap();
        assert_eq!(p.params.g0, TAU * 18.2e3);
        let d = p.params.drive.unwrap();
        assert_eq!(d.omega_l, 1.0e11);
        assert_eq!(d.e_l, TAU * 1e5);
    }

    #[test]
    fn missing_field_is_named() {
        let text = FULL.replace("\"n_ac\": 8.5e-4,", "");
        match parse_config(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n_ac"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preset_override_and_bare_cavity() {
        let p = parse_config(r#"{"preset": "set1", "kappa_c_rad": 1.0}"#).unwrap();
        assert_eq!(p.params.kappa_c, 1.0);
        assert_eq!(p.params.g0, preset("set1").unwrap().params.g0);
        let q = parse_config(r#"{"preset": "set1", "omega_c_bare_rad": 1.0e11}"#).unwrap();
        let s = &q.params;
        assert_eq!(s.omega_c, 1.0e11 + 8.0 * s.e_c * s.n_ac * s.n_ac);
    }

    #[test]
    fn rejects_ambiguous_and_unknown() {
        assert!(parse_config(r#"{"preset":"set1","g0_hz":1,"g0_rad":1}"#).is_err());
        assert!(parse_config(r#"{"preset":"set1","g0":1}"#).is_err());
        assert!(parse_config(r#"{"preset":"set1","zeta":0.5}"#).is_err());
        assert!(parse_config("{ not json").is_err());
    }
}
