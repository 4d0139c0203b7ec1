//! Empirical sp³ parameter sets.
//!
//! File layout (TOML, energies in eV):
//!
//! ```toml
//! [onsite.Pb]
//! e_s = -0.6
//! e_p = 4.0
//!
//! [sk.Pb_I]
//! ss_sigma = -1.1
//! sp_sigma = 1.3   # s on Pb, p on I
//! ps_sigma = 2.2   # p on Pb, s on I
//! pp_sigma = 2.5
//! pp_pi = -0.6
//!
//! [soc]
//! Pb = 1.5
//! I = 0.6
//! ```
//!
//! A reversed pair (`[sk.I_Pb]`) may be omitted; it is derived by exchanging
//! `sp_sigma` and `ps_sigma`. If both orders are given they must agree.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::{Error, Result};

const PAIR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnsiteEnergies {
    pub e_s: f64,
    pub e_p: f64,
}

/// Two-center integrals for an ordered pair `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoCenterIntegrals {
    pub ss_sigma: f64,
    /// `s` on the first species, `p` on the second.
    pub sp_sigma: f64,
    /// `p` on the first species, `s` on the second.
    pub ps_sigma: f64,
    pub pp_sigma: f64,
    pub pp_pi: f64,
}

impl TwoCenterIntegrals {
    /// Integrals of the pair read in the opposite order.
    pub fn reversed(&self) -> Self {
        Self {
            sp_sigma: self.ps_sigma,
            ps_sigma: self.sp_sigma,
            ..*self
        }
    }

    fn max_diff(&self, other: &Self) -> f64 {
        [
            self.ss_sigma - other.ss_sigma,
            self.sp_sigma - other.sp_sigma,
            self.ps_sigma - other.ps_sigma,
            self.pp_sigma - other.pp_sigma,
            self.pp_pi - other.pp_pi,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
    }

    fn values(&self) -> [f64; 5] {
        [
            self.ss_sigma,
            self.sp_sigma,
            self.ps_sigma,
            self.pp_sigma,
            self.pp_pi,
        ]
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParameterFile {
    onsite: BTreeMap<String, OnsiteEnergies>,
    sk: BTreeMap<String, TwoCenterIntegrals>,
    #[serde(default)]
    soc: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TbParameterSet {
    pub onsite: BTreeMap<String, OnsiteEnergies>,
    pub slater_koster: BTreeMap<(String, String), TwoCenterIntegrals>,
    pub soc_lambda: BTreeMap<String, f64>,
}

impl TbParameterSet {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ParameterFile =
            toml::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let mut slater_koster = BTreeMap::new();
        for (key, integrals) in file.sk {
            let (a, b) = key.split_once('_').ok_or_else(|| {
                Error::InvalidParams(format!("section [sk.{key}] must be named <A>_<B>"))
            })?;
            slater_koster.insert((a.to_string(), b.to_string()), integrals);
        }
        let mut set = Self {
            onsite: file.onsite,
            slater_koster,
            soc_lambda: file.soc,
        };
        set.complete_reversed_pairs()?;
        set.validate()?;
        Ok(set)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Shipped Pb/I fixture. Plausible magnitudes only; not fitted to any band structure.
    pub fn pbi3_fixture() -> Self {
        Self::from_toml_str(FIXTURE_PBI3).expect("fixture parses")
    }

    fn complete_reversed_pairs(&mut self) -> Result<()> {
        let keys: Vec<(String, String)> = self.slater_koster.keys().cloned().collect();
        for (a, b) in keys {
            let forward = self.slater_koster[&(a.clone(), b.clone())];
            let rev_key = (b.clone(), a.clone());
            match self.slater_koster.get(&rev_key) {
                Some(rev) => {
                    if forward.reversed().max_diff(rev) > PAIR_TOLERANCE {
                        return Err(Error::InvalidParams(format!(
                            "[sk.{a}_{b}] and [sk.{b}_{a}] are inconsistent (the Hamiltonian would not be Hermitian)"
                        )));
                    }
                }
                None => {
                    self.slater_koster.insert(rev_key, forward.reversed());
                }
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (name, e) in &self.onsite {
            if !(e.e_s.is_finite() && e.e_p.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "non-finite on-site energy for {name}"
                )));
            }
        }
        for ((a, b), v) in &self.slater_koster {
            if v.values().iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "non-finite integral for {a}_{b}"
                )));
            }
        }
        for (name, l) in &self.soc_lambda {
            if !l.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "non-finite SOC strength for {name}"
                )));
            }
        }
        Ok(())
    }

    pub fn onsite_for(&self, species: &str) -> Result<OnsiteEnergies> {
        self.onsite
            .get(species)
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("no on-site energies for {species}")))
    }

    pub fn integrals_for(&self, from: &str, to: &str) -> Result<TwoCenterIntegrals> {
        self.slater_koster
            .get(&(from.to_string(), to.to_string()))
            .copied()
            .ok_or_else(|| Error::UnknownSpeciesPair(from.to_string(), to.to_string()))
    }

    pub fn soc_for(&self, species: &str) -> f64 {
        self.soc_lambda.get(species).copied().unwrap_or(0.0)
    }

    /// Shifts every on-site energy by `delta` eV; the spectrum moves rigidly.
    pub fn with_energy_shift(mut self, delta: f64) -> Self {
        for e in self.onsite.values_mut() {
            e.e_s += delta;
            e.e_p += delta;
        }
        self
    }
}

pub const FIXTURE_PBI3: &str = include_str!("../../fixtures/pbi3_sp3.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversed_pair_is_derived() {
        let p = TbParameterSet::from_toml_str(
            r#"
            [onsite.A]
            e_s = 0.0
            e_p = 1.0
            [onsite.B]
            e_s = 0.5
            e_p = 2.0
            [sk.A_B]
            ss_sigma = -1.0
            sp_sigma = 0.4
            ps_sigma = 0.7
            pp_sigma = 2.0
            pp_pi = -0.5
            "#,
        )
        .unwrap();
        let rev = p.integrals_for("B", "A").unwrap();
        assert_eq!(rev.sp_sigma, 0.7);
        assert_eq!(rev.ps_sigma, 0.4);
        assert_eq!(p.soc_for("A"), 0.0);
    }

    #[test]
    fn inconsistent_pair_rejected() {
        let err = TbParameterSet::from_toml_str(
            r#"
            [onsite.A]
            e_s = 0.0
            e_p = 1.0
            [sk.A_B]
            ss_sigma = -1.0
            sp_sigma = 0.4
            ps_sigma = 0.7
            pp_sigma = 2.0
            pp_pi = -0.5
            [sk.B_A]
            ss_sigma = -1.0
            sp_sigma = 0.4
            ps_sigma = 0.7
            pp_sigma = 2.0
            pp_pi = -0.5
            "#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParams(_)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(TbParameterSet::from_toml_str(
            "[onsite.A]\ne_s = 0.0\ne_p = 1.0\ne_d = 3.0\n[sk]\n"
        )
        .is_err());
    }

    #[test]
    fn fixture_loads() {
        let p = TbParameterSet::pbi3_fixture();
        assert!(p.integrals_for("Pb", "I").is_ok());
        assert!(p.integrals_for("I", "Pb").is_ok());
        assert!(p.soc_for("Pb") > 0.0);
        assert!(matches!(
            p.integrals_for("Pb", "Br"),
            Err(Error::UnknownSpeciesPair(_, _))
        ));
    }
}
