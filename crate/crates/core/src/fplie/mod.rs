//! Finitely presented Lie algebras `L = Λ/J`: truncated ideals, nilpotent
//! quotients `L/Γ_n`, the graded Hopf formula for `H_2`, and the rewrite into
//! a presentation with linear and quadratic relators only.

mod ideal;
mod linearize;
mod nilpotent;
mod quotient;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freelie::{parse_element, LieElement};

pub use ideal::{
    brute_force_ideal, finiteness_scan, h2_graded, h2_multigraded, ideal_span, FinitenessReport,
    SliceDims, Verdict, WordIndex,
};
pub use linearize::linearize_presentation;
pub(crate) use nilpotent::render_combination;
pub use nilpotent::{AlgebraReport, NilpotentLieAlgebra};
pub use quotient::{hopf_h2_of_quotient, lcs_graded_dims, lcs_quotient, NilpotentQuotient};

/// Dimension per degree.
pub type GradedDims = BTreeMap<u32, usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelatorScheme {
    Finite(Vec<LieElement>),
    /// The `k`-th derived subalgebra of the free Lie algebra.
    Derived(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiePresentation {
    generators: Vec<String>,
    scheme: RelatorScheme,
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum RawScheme {
    Named(String),
    Derived { derived: u32 },
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPresentation {
    generators: Vec<String>,
    #[serde(default)]
    relators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<RawScheme>,
}

impl LiePresentation {
    pub fn new(generators: Vec<String>, scheme: RelatorScheme) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty()
                || !g.chars().all(|c| c.is_alphanumeric() || c == '_')
                || g.starts_with(|c: char| c.is_ascii_digit())
            {
                return Err(Error::Invalid(format!(
                    "generator name '{g}' is not an identifier"
                )));
            }
            if generators[..i].contains(g) {
                return Err(Error::Invalid(format!("generator '{g}' is listed twice")));
            }
        }
        match &scheme {
            RelatorScheme::Finite(rs) => {
                for (k, r) in rs.iter().enumerate() {
                    if r.alphabet() != generators.len() {
                        return Err(Error::Invalid(format!(
                            "relator {k} is over a different alphabet"
                        )));
                    }
                    if r.is_zero() {
                        return Err(Error::Invalid(format!("relator {k} is zero")));
                    }
                }
            }
            RelatorScheme::Derived(k) if *k == 0 => {
                return Err(Error::Invalid("derived scheme needs k >= 1".into()));
            }
            RelatorScheme::Derived(_) => {}
        }
        Ok(LiePresentation { generators, scheme })
    }

    /// Parses relators written over `generators`.
    pub fn parse(generators: &[&str], relators: &[&str]) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let rels = relators
            .iter()
            .map(|r| parse_element(r, &names))
            .collect::<Result<Vec<_>>>()?;
        LiePresentation::new(names, RelatorScheme::Finite(rels))
    }

    pub fn free(generators: Vec<String>) -> Self {
        LiePresentation {
            generators,
            scheme: RelatorScheme::Finite(Vec::new()),
        }
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let raw: RawPresentation = serde_json::from_str(src)?;
        let scheme = match raw.scheme {
            None => None,
            Some(RawScheme::Named(s)) if s == "finite" => None,
            Some(RawScheme::Named(s)) => {
                return Err(Error::Parse(format!(
                    "unknown scheme '{s}' (expected \"finite\" or {{\"derived\": k}})"
                )))
            }
            Some(RawScheme::Derived { derived }) => Some(derived),
        };
        match scheme {
            None => {
                let rels = raw
                    .relators
                    .iter()
                    .enumerate()
                    .map(|(k, r)| {
                        parse_element(r, &raw.generators).map_err(|e| {
                            Error::Parse(format!(
                                "relator {k}: {}",
                                e.to_string().trim_start_matches("parse error: ")
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                LiePresentation::new(raw.generators, RelatorScheme::Finite(rels))
            }
            Some(k) => {
                if !raw.relators.is_empty() {
                    return Err(Error::Invalid(
                        "a derived scheme takes no explicit relators".into(),
                    ));
                }
                LiePresentation::new(raw.generators, RelatorScheme::Derived(k))
            }
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = RawPresentation {
            generators: self.generators.clone(),
            relators: self.relator_strings(),
            scheme: Some(match self.scheme {
                RelatorScheme::Finite(_) => RawScheme::Named("finite".into()),
                RelatorScheme::Derived(k) => RawScheme::Derived { derived: k },
            }),
        };
        serde_json::to_value(raw).expect("presentation serializes")
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn alphabet(&self) -> usize {
        self.generators.len()
    }

    pub fn scheme(&self) -> &RelatorScheme {
        &self.scheme
    }

    /// The explicit relators; empty for a derived scheme.
    pub fn relators(&self) -> &[LieElement] {
        match &self.scheme {
            RelatorScheme::Finite(r) => r,
            RelatorScheme::Derived(_) => &[],
        }
    }

    pub fn relator_strings(&self) -> Vec<String> {
        self.relators()
            .iter()
            .map(|r| r.render(&self.generators))
            .collect()
    }

    /// Whether every relator is homogeneous in total degree.
    pub fn is_homogeneous(&self) -> bool {
        self.relators().iter().all(LieElement::is_homogeneous)
    }

    /// Whether every relator lies in degrees one and two.
    pub fn is_linear_plus_quadratic(&self) -> bool {
        matches!(self.scheme, RelatorScheme::Finite(_))
            && self.relators().iter().all(|r| r.max_degree() <= 2)
    }
}
