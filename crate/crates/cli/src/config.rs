//! Experiment configuration and the small JSON input documents.

use std::path::Path;

use cchaos::cpoly::{CWPoly, PolyDocument};
use cchaos::fourth_moment::RationalMatrix;
use cchaos::linalg::CMatrix;
use cchaos::ou::{ChaoticVector, Eigenfunction};
use cchaos::rational::{parse_rational, ComplexDoc, Rational, RationalComplex};
use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// A matrix entry: `"a/b"` or `{"re": "a/b", "im": "c/d"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Real(String),
    Complex(ComplexDoc),
}

impl EntryDoc {
    pub fn parse(&self) -> CliResult<RationalComplex> {
        Ok(match self {
            EntryDoc::Real(s) => RationalComplex::real(parse_rational(s)?),
            EntryDoc::Complex(c) => RationalComplex::try_from(c)?,
        })
    }
}

pub type SigmaDoc = Vec<Vec<EntryDoc>>;

pub fn parse_sigma(doc: &SigmaDoc) -> CliResult<RationalMatrix> {
    let sigma: RationalMatrix = doc.iter().map(|r| r.iter().map(EntryDoc::parse).collect()).collect::<CliResult<_>>()?;
    let d = sigma.len();
    if d == 0 || sigma.iter().any(|r| r.len() != d) {
        return Err(CliError::Validation("target covariance must be a nonempty square matrix".into()));
    }
    // PD and Hermitian checks happen in the library
    cchaos::cgauss::GaussianSpec::centered(to_cmatrix(&sigma))?;
    Ok(sigma)
}

pub fn to_cmatrix(sigma: &RationalMatrix) -> CMatrix {
    cchaos::fourth_moment::to_cmatrix(sigma)
}

/// A chaotic vector on disk: either one polynomial document, or
/// `{"components": [...], "scale": "a/b"}` with `F = sqrt(scale) (G_1, ..)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorDoc {
    Vector {
        components: Vec<PolyDocument>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<String>,
    },
    Single(PolyDocument),
}

impl VectorDoc {
    pub fn build(&self) -> CliResult<ChaoticVector> {
        let (docs, scale) = match self {
            VectorDoc::Vector { components, scale } => (components.as_slice(), scale.as_deref()),
            VectorDoc::Single(doc) => (std::slice::from_ref(doc), None),
        };
        let polys = docs.iter().map(CWPoly::from_document).collect::<cchaos::Result<Vec<_>>>()?;
        let scale = match scale {
            Some(s) => parse_rational(s)?,
            None => Rational::one(),
        };
        let comps = polys.into_iter().map(Eigenfunction::new).collect::<cchaos::Result<Vec<_>>>()?;
        Ok(ChaoticVector::with_scale(comps, scale)?)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Component `k` is `m^{-1/2} sum z_j^2` over its own block of `m` variables.
    SumOfSquares,
    /// Component `k` is `m^{-1/2} sum z_j` over its own block of `m` variables.
    GaussianControl,
    /// The same vector at every grid point.
    CustomPolynomial { vector: VectorDoc },
}

fn default_threshold() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub generator: Generator,
    pub dimension: usize,
    /// Block size `m = variables_per_n * n` for the built-in generators.
    #[serde(default = "one")]
    pub variables_per_n: usize,
    pub n_grid: Vec<u64>,
    pub target_sigma: SigmaDoc,
    #[serde(default = "default_true")]
    pub exact: bool,
    /// Zero skips the Monte Carlo route.
    #[serde(default)]
    pub mc_samples: usize,
    /// Zero skips the empirical distance.
    #[serde(default)]
    pub w1_sample_size: usize,
    #[serde(default)]
    pub w1_repeats: usize,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default = "default_threshold")]
    pub cor3_threshold: f64,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let cfg: Self = read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Validation(m.into()));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad("name must be a nonempty file stem");
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] == 0 {
            return bad("n_grid must be nonempty, positive and strictly increasing");
        }
        if self.dimension == 0 || self.variables_per_n == 0 {
            return bad("dimension and variables_per_n must be positive");
        }
        let sigma = parse_sigma(&self.target_sigma)?;
        if sigma.len() != self.dimension {
            return bad("target_sigma does not match dimension");
        }
        if let Generator::CustomPolynomial { vector } = &self.generator {
            if vector.build()?.d() != self.dimension {
                return bad("custom polynomial has the wrong number of components");
            }
        }
        if !self.exact && self.mc_samples == 0 {
            return bad("enable the exact route or set mc_samples");
        }
        if self.mc_samples == 1 {
            return bad("mc_samples must be 0 or at least 2");
        }
        if (self.w1_sample_size == 0) != (self.w1_repeats == 0) {
            return bad("w1_sample_size and w1_repeats must both be set or both be 0");
        }
        if self.w1_sample_size > cchaos::transport::DEFAULT_CAP {
            return bad("w1_sample_size exceeds the exact solver cap");
        }
        // written negated so NaN is rejected too
        if !(self.cor3_threshold > 0.0) {
            return bad("cor3_threshold must be positive");
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The vector at grid point `n`.
    pub fn build(&self, n: u64) -> CliResult<ChaoticVector> {
        let d = self.dimension;
        let m = self.variables_per_n * n as usize;
        let (power, level) = match &self.generator {
            Generator::CustomPolynomial { vector } => return vector.build(),
            Generator::SumOfSquares => (2, 2),
            Generator::GaussianControl => (1, 1),
        };
        let vars = d * m;
        let comps = (0..d)
            .map(|k| {
                let mut g = CWPoly::zero(vars);
                for j in 0..m {
                    g = &g + &CWPoly::var(vars, k * m + j).pow(power);
                }
                Eigenfunction::with_eigenvalue(g, level)
            })
            .collect::<cchaos::Result<Vec<_>>>()?;
        Ok(ChaoticVector::with_scale(comps, Rational::new(1.into(), (m as i64).into()))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> ExperimentConfig {
        serde_json::from_str(
            r#"{"name": "sos", "generator": {"kind": "sum_of_squares"}, "dimension": 1,
                "n_grid": [1, 4], "target_sigma": [["2"]], "seed": 7}"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_validates() {
        let cfg = sample_config();
        cfg.validate().unwrap();
        assert!(cfg.exact && cfg.mc_samples == 0 && cfg.variables_per_n == 1);
        let f = cfg.build(4).unwrap();
        assert_eq!((f.d(), f.n()), (1, 4));
        let mut bad = cfg.clone();
        bad.n_grid = vec![4, 4];
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.target_sigma = vec![vec![EntryDoc::Real("-1".into())]];
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"name": "x", "bogus": 1}"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = sample_config();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 8;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn complex_entries() {
        let doc: SigmaDoc = serde_json::from_str(r#"[["2", {"re": "1/2", "im": "1/2"}], [{"re": "1/2", "im": "-1/2"}, "1"]]"#).unwrap();
        let s = parse_sigma(&doc).unwrap();
        assert_eq!(s[0][1], RationalComplex::new(parse_rational("1/2").unwrap(), parse_rational("1/2").unwrap()));
        let not_herm: SigmaDoc = serde_json::from_str(r#"[["2", "1"], ["0", "1"]]"#).unwrap();
        assert!(parse_sigma(&not_herm).is_err());
    }
}
