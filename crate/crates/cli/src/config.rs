//! Run configuration.
//!
//! A run is described by a TOML document. Every key is optional except
//! `data.path` (required by `fit`) and `[[anchors]]` (an empty list is legal
//! but leaves the model unidentified). Relative paths are resolved against
//! the directory of the config file.
//!
//! Precedence, highest first: command-line flags, the config file, the
//! defaults below.
//!
//! ```toml
//! [data]
//! path = "votes.csv"          # required for `fit`
//! format = "csv"              # csv | json; default: from the file extension
//!
//! [filter]
//! min_participation = 0.95
//! drop_unanimous = true
//!
//! [model]
//! d = 1
//! sigma2 = 25.0               # prior variance of (μ_j, α_j)
//!
//! [[anchors]]
//! id = "L001"
//! position = [-1.0]
//!
//! [sampler]
//! iterations = 25000
//! burn_in = 5000
//! thin = 10
//! chains = 2
//! seed = 1
//!
//! [analysis]
//! ci_level = 0.95
//! ranks = []                  # empty: the median rank
//! ppc_statistics = ["yea_rate", "legislator_yea_sd", "close_margin_fraction"]
//! ppc_replicates = 200
//!
//! [party]
//! enabled = false
//! group_label = "1"           # legislators whose `group` equals this get D = 1
//! group_file = "groups.csv"   # optional: legislator_id,group with 0/1 values
//! delta_mean = 0.0
//! delta_variance = 25.0
//!
//! [orientation]               # optional sign fix after sampling
//! reference = "L007"
//! sign = [1.0]
//!
//! [output]
//! dir = "ideal-out"
//! ```

use std::path::{Path, PathBuf};

use ideal_core::analytics::PpcStatistic;
use ideal_core::data::DataFormat;
use ideal_core::model::DEFAULT_SIGMA2;
use ideal_core::party::DeltaPrior;
use ideal_core::{Anchor, AnchorSpec, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub filter: FilterSection,
    pub model: ModelSection,
    pub anchors: Vec<AnchorEntry>,
    pub sampler: SamplerSection,
    pub analysis: AnalysisSection,
    pub party: PartySection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationSection>,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    pub min_participation: f64,
    pub drop_unanimous: bool,
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection {
            min_participation: 0.95,
            drop_unanimous: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub d: usize,
    pub sigma2: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            d: 1,
            sigma2: DEFAULT_SIGMA2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorEntry {
    pub id: String,
    pub position: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
    pub seed: u64,
}

impl Default for SamplerSection {
    fn default() -> Self {
        let c = SamplerConfig::default();
        SamplerSection {
            iterations: c.iterations,
            burn_in: c.burn_in,
            thin: c.thin,
            chains: c.chains,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub ci_level: f64,
    pub ranks: Vec<usize>,
    pub ppc_statistics: Vec<String>,
    pub ppc_replicates: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            ci_level: 0.95,
            ranks: Vec::new(),
            ppc_statistics: PpcStatistic::ALL.iter().map(|s| s.name().to_string()).collect(),
            ppc_replicates: ideal_core::analytics::MIN_PPC_REPLICATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartySection {
    pub enabled: bool,
    pub group_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_file: Option<PathBuf>,
    pub delta_mean: f64,
    pub delta_variance: f64,
}

impl Default for PartySection {
    fn default() -> Self {
        let prior = DeltaPrior::default();
        PartySection {
            enabled: false,
            group_label: "1".into(),
            group_file: None,
            delta_mean: prior.mean,
            delta_variance: prior.variance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationSection {
    pub reference: String,
    pub sign: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("ideal-out"),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: DataSection::default(),
            filter: FilterSection::default(),
            model: ModelSection::default(),
            anchors: Vec::new(),
            sampler: SamplerSection::default(),
            analysis: AnalysisSection::default(),
            party: PartySection::default(),
            orientation: None,
            output: OutputSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::from_toml(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.data.path.as_mut() {
            fix(p);
        }
        if let Some(p) = self.party.group_file.as_mut() {
            fix(p);
        }
        fix(&mut self.output.dir);
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.data
            .path
            .as_deref()
            .ok_or_else(|| CliError::Config("no data path: set data.path or pass --data".into()))
    }

    pub fn data_format(&self) -> Result<DataFormat> {
        match &self.data.format {
            Some(f) => Ok(f.parse()?),
            None => Ok(DataFormat::from_path(self.data_path()?)),
        }
    }

    pub fn anchor_spec(&self) -> AnchorSpec {
        AnchorSpec::new(
            self.anchors
                .iter()
                .map(|a| Anchor::new(a.id.clone(), a.position.clone()))
                .collect(),
        )
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            iterations: self.sampler.iterations,
            burn_in: self.sampler.burn_in,
            thin: self.sampler.thin,
            chains: self.sampler.chains,
            seed: self.sampler.seed,
            d: self.model.d,
        }
    }

    pub fn delta_prior(&self) -> DeltaPrior {
        DeltaPrior {
            mean: self.party.delta_mean,
            variance: self.party.delta_variance,
        }
    }

    pub fn ppc_statistics(&self) -> Result<Vec<PpcStatistic>> {
        Ok(ideal_core::analytics::parse_statistics(&self.analysis.ppc_statistics)?)
    }

    /// Checks settings that the core library would otherwise reject late.
    pub fn validate(&self) -> Result<()> {
        if !(self.analysis.ci_level > 0.0 && self.analysis.ci_level < 1.0) {
            return Err(CliError::Config(format!(
                "analysis.ci_level must lie in (0, 1), got {}",
                self.analysis.ci_level
            )));
        }
        if self.analysis.ranks.contains(&0) {
            return Err(CliError::Config("analysis.ranks are 1-based".into()));
        }
        self.ppc_statistics()?;
        self.sampler_config().validate()?;
        if let Some(o) = &self.orientation {
            if o.sign.len() != self.model.d {
                return Err(CliError::Config(format!(
                    "orientation.sign needs {} entries",
                    self.model.d
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.filter.min_participation, 0.95);
        assert_eq!(c.sampler.iterations, 25_000);
        assert_eq!(c.analysis.ppc_statistics.len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("[model]\nsigma = 3\n").unwrap_err();
        assert!(err.exit_code() == 2, "{err}");
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig::default();
        c.data.path = Some("x.csv".into());
        c.anchors.push(AnchorEntry {
            id: "A".into(),
            position: vec![1.0],
        });
        c.orientation = Some(OrientationSection {
            reference: "B".into(),
            sign: vec![-1.0],
        });
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let mut c = RunConfig::from_toml("[data]\npath = \"v.csv\"\n").unwrap();
        c.resolve_paths(Path::new("/tmp/run"));
        assert_eq!(c.data.path.unwrap(), Path::new("/tmp/run/v.csv"));
        assert_eq!(c.output.dir, Path::new("/tmp/run/ideal-out"));
    }

    #[test]
    fn missing_data_path_is_a_usage_error() {
        let c = RunConfig::default();
        assert_eq!(c.data_path().unwrap_err().exit_code(), 2);
    }
}
