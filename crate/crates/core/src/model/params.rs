// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Coherent drive of the cavity. `e_l` is an angular rate, `omega_l` an
/// angular frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub e_l: f64,
    pub omega_l: f64,
}

/// Raw system inputs. Every frequency and rate is angular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub zeta: f64,
    pub e_c: f64,
    pub g0: f64,
    pub n_ac: f64,
    pub omega_m: f64,
    /// Effective (already shifted) cavity frequency.
    pub omega_c: f64,
    pub kappa_c: f64,
    pub gamma_t: f64,
    pub gamma_phi: f64,
    pub q_m: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
    pub drive: Option<Drive>,
}

/// Coefficients of the system Hamiltonian and dissipator derived from
/// [`SystemParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub omega_t: f64,
    pub lambda: f64,
    pub chi: f64,
    pub g_t: f64,
    pub g_tc: f64,
    pub g_c: f64,
    pub gamma_m: f64,
    pub n_bar: f64,
    pub delta: f64,
}

/// Bose–Einstein occupation of a mode at angular frequency `omega`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

/// Temperature at which a mode at `omega` holds `n_bar` quanta.
pub fn temperature_for_occupation(omega: f64, n_bar: f64) -> f64 {
    if n_bar <= 0.0 {
        return 0.0;
    }
    HBAR * omega / (K_B * (1.0 / n_bar).ln_1p())
}

/// Transmon transition frequency `E_C(√(8ζ) − 1)`.
pub fn transmon_frequency(e_c: f64, zeta: f64) -> f64 {
    e_c * ((8.0 * zeta).sqrt() - 1.0)
}

/// The ζ at which the transmon frequency equals `omega`.
pub fn zeta_for_transmon_frequency(e_c: f64, omega: f64) -> f64 {
    (omega / e_c + 1.0).powi(2) / 8.0
}

impl SystemParams {
    /// Checks the invariants; warns when ζ is too small for the
    /// rotating-wave treatment of the Duffing term.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("zeta", self.zeta),
            ("E_C", self.e_c),
            ("g0", self.g0),
            ("n_ac", self.n_ac),
            ("Omega_m", self.omega_m),
            ("omega_c", self.omega_c),
            ("kappa_c", self.kappa_c),
            ("gamma_t", self.gamma_t),
            ("gamma_phi", self.gamma_phi),
            ("T", self.temperature),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config {
                    field: name.into(),
                    message: format!("must be finite and ≥ 0, got {v}"),
                });
            }
        }
        if self.zeta <= 1.0 {
            return Err(Error::Config {
                field: "zeta".into(),
                message: format!("transmon regime needs ζ > 1, got {}", self.zeta),
            });
        }
        if self.zeta < 20.0 {
            log::warn!("ζ = {} is small; the Duffing RWA assumes ζ ≫ 1", self.zeta);
        }
        if !(self.q_m > 0.0) {
            return Err(Error::Config {
                field: "Q_m".into(),
                message: format!("must be > 0, got {}", self.q_m),
            });
        }
        if let Some(d) = self.drive {
            for (name, v) in [("drive.E_L", d.e_l), ("drive.omega_L", d.omega_l)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Config {
                        field: name.into(),
                        message: format!("must be finite and ≥ 0, got {v}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn derive(&self) -> DerivedParams {
        let quarter = (self.zeta / 2.0).powf(0.25);
        let omega_t = transmon_frequency(self.e_c, self.zeta);
        DerivedParams {
            omega_t,
            lambda: self.e_c / 2.0,
            chi: 4.0 * self.e_c * self.n_ac * quarter,
            g_t: self.g0 * (2.0 * self.zeta).sqrt(),
            g_tc: 4.0 * self.g0 * self.n_ac * quarter,
            g_c: 8.0 * self.g0 * self.n_ac * self.n_ac,
            gamma_m: self.omega_m / self.q_m,
            n_bar: bose_occupation(self.omega_m, self.temperature),
            delta: omega_t - self.omega_c,
        }
    }

    pub fn with_zeta(&self, zeta: f64) -> Self {
        Self {
            zeta,
            ..self.clone()
        }
    }

    pub fn with_drive(&self, drive: Option<Drive>) -> Self {
        Self {
            drive,
            ..self.clone()
        }
    }

    /// Same system with all dissipation switched off.
    pub fn lossless(&self) -> Self {
        Self {
            kappa_c: 0.0,
            gamma_t: 0.0,
            gamma_phi: 0.0,
            temperature: 0.0,
            q_m: f64::INFINITY,
            ..self.clone()
        }
    }

    /// Sets the bath temperature so that the mechanical mode holds `n_bar`
    /// thermal phonons.
    pub fn with_bath_occupation(&self, n_bar: f64) -> Self {
        Self {
            temperature: temperature_for_occupation(self.omega_m, n_bar),
            ..self.clone()
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.kappa_c == 0.0
            && self.gamma_t == 0.0
            && self.gamma_phi == 0.0
            && self.derive().gamma_m == 0.0
    }
}

/// A parameter set with the flux tuning span around its resonance ζ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub params: SystemParams,
    pub zeta_span: f64,
}

const PRESET_NAMES: [&str; 2] = ["set1", "set2"];

pub fn preset_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

/// Built-in parameter sets. The cavity sits at the transmon frequency of
/// the resonance ζ.
pub fn preset(name: &str) -> Result<Preset> {
    let e_c = TAU * 0.5e9;
    let (zeta, g0_hz, omega_m_hz, kappa_hz, gamma_t_hz, n_ac, t, span) = match name {
        "set1" => (150.0, 18.2e3, 10e6, 10e3, 3e3, 8.5e-4, 10e-3, 50.0),
        "set2" => (142.0, 20.6e3, 1e6, 50e3, 5e3, 1.4e-2, 5e-3, 60.0),
        _ => {
            return Err(Error::Config {
                field: "preset".into(),
                message: format!("unknown preset '{name}' (known: {})", PRESET_NAMES.join(", ")),
            })
        }
    };
    let gamma_t = TAU * gamma_t_hz;
    Ok(Preset {
        name: name.into(),
        params: SystemParams {
            zeta,
            e_c,
            g0: TAU * g0_hz,
            n_ac,
            omega_m: TAU * omega_m_hz,
            omega_c: transmon_frequency(e_c, zeta),
            kappa_c: TAU * kappa_hz,
            gamma_t,
            gamma_phi: 2.0 * gamma_t,
            q_m: 1e6,
            temperature: t,
            drive: None,
        },
        zeta_span: span,
    })
}

/// Converts an angular frequency to ordinary frequency in Hz.
pub fn to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// One mechanical period.
pub fn mech_period(omega_m: f64) -> f64 {
    2.0 * PI / omega_m
}
