//! Scenario configuration: a flat TOML document with an `include` key.
//!
//! Included files are merged first, in order, and the including file's keys
//! override them. Path-valued keys resolve against the directory of the file
//! that sets them, so shared baselines can live anywhere.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use chiplink::assignment::{Lambdas, LinkFilter};
use chiplink::ecc_model::{rs_family, FrameConfig, ProtectionMode, RetryLimit, RsCode};
use chiplink::link_library::CorrectionOptions;
use chiplink::{CostParams, Scaling, Targets};

const PATH_KEYS: [&str; 5] = ["synth_table", "link_library", "netlist", "floorplan", "out_dir"];
const MAX_INCLUDE_DEPTH: usize = 16;

/// Retry limit as written in a config: a count or `"unbounded"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Retries {
    Count(u32),
    Word(RetryWord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryWord {
    Unbounded,
}

impl Retries {
    pub fn limit(self) -> RetryLimit {
        match self {
            Retries::Count(r) => RetryLimit::Bounded(r),
            Retries::Word(RetryWord::Unbounded) => RetryLimit::Unbounded,
        }
    }

    pub fn label(self) -> String {
        match self {
            Retries::Count(r) => format!("r{r}"),
            Retries::Word(RetryWord::Unbounded) => "unbounded".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

/// A case study: bandwidth and distance multipliers applied to every net.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseStudy {
    pub label: String,
    #[serde(default = "one")]
    pub bw_scale: f64,
    #[serde(default = "one")]
    pub dist_scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Name used in report file names.
    pub label: String,

    pub payload_bytes: u32,
    pub header_bytes: u32,
    pub mode: ProtectionMode,

    pub ber_target: f64,
    pub p_undet: f64,
    pub f_wrong: f64,
    pub max_retries: Retries,

    pub code_n: u32,
    pub code_k_min: u32,

    pub synth_table: Option<PathBuf>,
    pub syndrome_fraction: f64,
    pub crc_clock_mhz: f64,
    pub gbn_rtt_ns: f64,
    pub gbn_slack_frames: u32,
    pub frames_per_cycle: f64,
    pub energy_scale: f64,
    pub area_scale: f64,
    pub scaling_label: String,
    pub reference_bw_gbps: f64,

    /// Explicit p_pre grid for `ecc-sweep`; absent means the default grid, empty sweeps nothing.
    pub ber_grid: Option<Vec<f64>>,
    pub sweep_retries: Vec<Retries>,

    pub link_library: Option<PathBuf>,

    pub netlist: Option<PathBuf>,
    pub floorplan: Option<PathBuf>,
    pub lambda_p_w: Option<f64>,
    pub lambda_a_mm2: Option<f64>,
    pub filter: OneOrMany,
    pub bw_scale: f64,
    pub dist_scale: f64,
    pub case_studies: Vec<CaseStudy>,
    pub time_budget_s: f64,

    pub oracle_ber_grid: Vec<f64>,
    pub oracle_instances: u32,
    pub oracle_max_nets: usize,
    pub oracle_max_links: usize,
    pub mc_trials: u64,
    pub mc_ber: f64,
    pub mc_code_k: u32,

    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let t = Targets::default();
        let c = CostParams::default();
        Self {
            label: "scenario".into(),
            payload_bytes: 256,
            header_bytes: 8,
            mode: ProtectionMode::Hybrid,
            ber_target: t.ber_target,
            p_undet: t.p_undet,
            f_wrong: t.f_wrong,
            max_retries: Retries::Count(1),
            code_n: chiplink::ecc_model::DEFAULT_N,
            code_k_min: chiplink::ecc_model::DEFAULT_K_MIN,
            synth_table: None,
            syndrome_fraction: c.syndrome_fraction,
            crc_clock_mhz: c.crc_clock_hz / 1e6,
            gbn_rtt_ns: c.gbn_rtt_ns,
            gbn_slack_frames: c.gbn_slack_frames,
            frames_per_cycle: c.frames_per_cycle,
            energy_scale: 1.0,
            area_scale: 1.0,
            scaling_label: "identity".into(),
            reference_bw_gbps: 1000.0,
            ber_grid: None,
            sweep_retries: vec![Retries::Count(1), Retries::Word(RetryWord::Unbounded)],
            link_library: None,
            netlist: None,
            floorplan: None,
            lambda_p_w: None,
            lambda_a_mm2: None,
            filter: OneOrMany::One("all".into()),
            bw_scale: 1.0,
            dist_scale: 1.0,
            case_studies: Vec::new(),
            time_budget_s: 10.0,
            oracle_ber_grid: vec![1e-2, 1e-3, 1e-4, 1e-5],
            oracle_instances: 200,
            oracle_max_nets: 8,
            oracle_max_links: 6,
            mc_trials: 1_000_000,
            mc_ber: 1e-2,
            mc_code_k: 72,
            seed: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line overrides applied after the file is loaded.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub filter: Option<String>,
    pub time_budget_s: Option<f64>,
}

/// Default `ecc-sweep` grid: the R10 preferred numbers per decade from 1e-7
/// to 1e-2, written as decimal literals so decade points are exact.
pub fn default_ber_grid() -> Vec<f64> {
    const R10: [&str; 10] = ["1", "1.25", "1.6", "2", "2.5", "3.15", "4", "5", "6.3", "8"];
    let mut grid = Vec::new();
    for e in -7..-2 {
        for m in R10 {
            grid.push(format!("{m}e{e}").parse().expect("decimal literal"));
        }
    }
    grid.push(1e-2);
    grid
}

impl ScenarioConfig {
    /// Loads `path` with its includes; `None` gives the built-in baseline.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            None => Self::default(),
            Some(p) => {
                let mut origin = BTreeMap::new();
                let mut stack = Vec::new();
                let table = load_table(p, &mut stack, &mut origin)?;
                Self::from_table(table, &origin)?
            }
        };
        if let Some(out) = &overrides.out {
            cfg.out_dir = out.clone();
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(f) = &overrides.filter {
            cfg.filter = OneOrMany::One(f.clone());
        }
        if let Some(t) = overrides.time_budget_s {
            cfg.time_budget_s = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_table(table: toml::Table, origin: &BTreeMap<String, PathBuf>) -> Result<Self> {
        // check field by field so an error names the key and the file that set it
        let known = toml::Table::try_from(Self::default()).expect("defaults serialize");
        for (key, value) in &table {
            let file = origin.get(key).map(|p| p.display().to_string()).unwrap_or_default();
            let optional = matches!(
                key.as_str(),
                "synth_table" | "link_library" | "netlist" | "floorplan" | "lambda_p_w" | "lambda_a_mm2" | "ber_grid"
            );
            if !known.contains_key(key) && !optional {
                bail!("{file}: unknown field `{key}`");
            }
            let mut single = toml::Table::new();
            single.insert(key.clone(), value.clone());
            toml::Value::Table(single)
                .try_into::<Self>()
                .map_err(|e| anyhow!("{file}: field `{key}`: {}", e.to_string().trim()))?;
        }
        toml::Value::Table(table).try_into::<Self>().map_err(|e| anyhow!("config: {}", e.to_string().trim()))
    }

    fn validate(&self) -> Result<()> {
        self.frame().context("config: payload_bytes/header_bytes")?;
        self.targets().validate().context("config: ber_target/p_undet/f_wrong")?;
        self.family().context("config: code_n/code_k_min")?;
        let positive = [
            ("syndrome_fraction", self.syndrome_fraction + f64::MIN_POSITIVE),
            ("crc_clock_mhz", self.crc_clock_mhz),
            ("gbn_rtt_ns", self.gbn_rtt_ns + f64::MIN_POSITIVE),
            ("frames_per_cycle", self.frames_per_cycle),
            ("energy_scale", self.energy_scale),
            ("area_scale", self.area_scale),
            ("reference_bw_gbps", self.reference_bw_gbps),
            ("bw_scale", self.bw_scale),
            ("dist_scale", self.dist_scale),
            ("time_budget_s", self.time_budget_s + f64::MIN_POSITIVE),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("config: field `{name}` must be positive");
            }
        }
        if !(0.0..=1.0).contains(&self.syndrome_fraction) {
            bail!("config: field `syndrome_fraction` must lie in [0, 1]");
        }
        for (name, grid) in [("ber_grid", self.ber_grid.as_deref().unwrap_or(&[])), ("oracle_ber_grid", &self.oracle_ber_grid)] {
            if let Some(p) = grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                bail!("config: field `{name}` holds {p}, outside (0, 1)");
            }
        }
        if !(0.0..=1.0).contains(&self.mc_ber) {
            bail!("config: field `mc_ber` must lie in [0, 1]");
        }
        RsCode::new(self.code_n, self.mc_code_k).context("config: field `mc_code_k`")?;
        for l in [self.lambda_p_w, self.lambda_a_mm2].into_iter().flatten() {
            if !(l > 0.0 && l.is_finite()) {
                bail!("config: lambda_p_w and lambda_a_mm2 must be positive");
            }
        }
        for cs in &self.case_studies {
            if !(cs.bw_scale > 0.0 && cs.dist_scale > 0.0) {
                bail!("config: case study '{}' needs positive scales", cs.label);
            }
        }
        self.filters()?;
        Ok(())
    }

    pub fn frame(&self) -> Result<FrameConfig> {
        Ok(FrameConfig::new(self.payload_bytes, self.header_bytes, self.mode)?)
    }

    pub fn frame_in(&self, mode: ProtectionMode) -> Result<FrameConfig> {
        Ok(self.frame()?.with_mode(mode))
    }

    pub fn targets(&self) -> Targets {
        Targets { ber_target: self.ber_target, p_undet: self.p_undet, f_wrong: self.f_wrong, max_retries: self.max_retries.limit() }
    }

    pub fn family(&self) -> Result<Vec<RsCode>> {
        Ok(rs_family(self.code_n, self.code_k_min)?)
    }

    pub fn cost_params(&self) -> CostParams {
        CostParams {
            syndrome_fraction: self.syndrome_fraction,
            crc_clock_hz: self.crc_clock_mhz * 1e6,
            gbn_rtt_ns: self.gbn_rtt_ns,
            gbn_slack_frames: self.gbn_slack_frames,
            frames_per_cycle: self.frames_per_cycle,
        }
    }

    pub fn scaling(&self) -> Result<Scaling> {
        Ok(Scaling::new(self.energy_scale, self.area_scale, self.scaling_label.clone())?)
    }

    pub fn correction_options(&self) -> Result<CorrectionOptions> {
        Ok(CorrectionOptions {
            family: self.family()?,
            reference_bw_gbps: self.reference_bw_gbps,
            scaling: self.scaling()?,
            params: self.cost_params(),
        })
    }

    pub fn sweep_grid(&self) -> Vec<f64> {
        self.ber_grid.clone().unwrap_or_else(default_ber_grid)
    }

    pub fn filters(&self) -> Result<Vec<LinkFilter>> {
        let names = match &self.filter {
            OneOrMany::One(s) => vec![s.clone()],
            OneOrMany::Many(v) => v.clone(),
        };
        let mut out = Vec::new();
        for n in names {
            let f: LinkFilter = n.parse().map_err(|e| anyhow!("config: field `filter`: {e}"))?;
            if !out.contains(&f) {
                out.push(f);
            }
        }
        Ok(out)
    }

    pub fn lambdas(&self) -> Result<Lambdas> {
        match (self.lambda_p_w, self.lambda_a_mm2) {
            (Some(p), Some(a)) => Ok(Lambdas { power_w: p, area_mm2: a }),
            _ => bail!("config: `assign` needs lambda_p_w and lambda_a_mm2"),
        }
    }

    pub fn time_budget(&self) -> Duration {
        Duration::from_secs_f64(self.time_budget_s)
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        value.as_deref().ok_or_else(|| anyhow!("config: field `{key}` is required for this command"))
    }
}

fn load_table(path: &Path, stack: &mut Vec<PathBuf>, origin: &mut BTreeMap<String, PathBuf>) -> Result<toml::Table> {
    let canonical = fs::canonicalize(path).with_context(|| format!("cannot open config {}", path.display()))?;
    if stack.contains(&canonical) {
        bail!("{}: include cycle", path.display());
    }
    if stack.len() >= MAX_INCLUDE_DEPTH {
        bail!("{}: includes nested too deeply", path.display());
    }
    let text = fs::read_to_string(&canonical).with_context(|| format!("cannot read config {}", path.display()))?;
    let mut table: toml::Table =
        toml::from_str(&text).map_err(|e| anyhow!("{}: {}", path.display(), e.to_string().trim()))?;
    let dir = canonical.parent().map(Path::to_path_buf).unwrap_or_default();

    let includes = match table.remove("include") {
        None => Vec::new(),
        Some(toml::Value::String(s)) => vec![s],
        Some(toml::Value::Array(a)) => a
            .into_iter()
            .map(|v| match v {
                toml::Value::String(s) => Ok(s),
                _ => Err(anyhow!("{}: `include` entries must be strings", path.display())),
            })
            .collect::<Result<_>>()?,
        Some(_) => bail!("{}: `include` must be a string or a list of strings", path.display()),
    };

    stack.push(canonical.clone());
    let mut merged = toml::Table::new();
    let mut seen = HashSet::new();
    for inc in includes {
        let inc_path = dir.join(&inc);
        if !seen.insert(inc_path.clone()) {
            continue;
        }
        merged.extend(load_table(&inc_path, stack, origin)?);
    }
    stack.pop();

    for (key, mut value) in table {
        if value.is_table() {
            bail!("{}: field `{key}`: nested tables are not allowed in a flat config", path.display());
        }
        if PATH_KEYS.contains(&key.as_str()) {
            match &value {
                toml::Value::String(s) => value = toml::Value::String(dir.join(s).to_string_lossy().into_owned()),
                _ => bail!("{}: field `{key}` must be a path string", path.display()),
            }
        }
        origin.insert(key.clone(), canonical.clone());
        merged.insert(key, value);
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn defaults_match_baseline() {
        let c = ScenarioConfig::load(None, &Overrides::default()).unwrap();
        assert_eq!(c.frame().unwrap(), FrameConfig::baseline(ProtectionMode::Hybrid));
        assert_eq!(c.targets(), Targets::default());
        assert_eq!(c.family().unwrap().len(), 22);
    }

    #[test]
    fn default_grid_hits_decades_exactly() {
        let g = default_ber_grid();
        for p in [1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
            assert!(g.contains(&p), "{p}");
        }
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn include_merges_and_resolves_paths() {
        let tmp = tempfile::tempdir().unwrap();
        fs::create_dir(tmp.path().join("base")).unwrap();
        write(&tmp.path().join("base"), "b.toml", "payload_bytes = 128\nsynth_table = \"t.csv\"\nseed = 3\n");
        let top = write(tmp.path(), "top.toml", "include = \"base/b.toml\"\nseed = 9\nmax_retries = \"unbounded\"\n");
        let c = ScenarioConfig::load(Some(&top), &Overrides::default()).unwrap();
        assert_eq!(c.payload_bytes, 128);
        assert_eq!(c.seed, 9);
        assert_eq!(c.max_retries.limit(), RetryLimit::Unbounded);
        let t = c.synth_table.unwrap();
        assert!(t.ends_with("base/t.csv"), "{}", t.display());
        let o = Overrides { seed: Some(4), filter: Some("optical".into()), ..Overrides::default() };
        let c = ScenarioConfig::load(Some(&top), &o).unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(c.filters().unwrap(), [LinkFilter::OpticalOnly]);
    }

    #[test]
    fn errors_name_file_and_field() {
        let tmp = tempfile::tempdir().unwrap();
        let p = write(tmp.path(), "bad.toml", "ber_target = \"tiny\"\n");
        let e = ScenarioConfig::load(Some(&p), &Overrides::default()).unwrap_err().to_string();
        assert!(e.contains("bad.toml") && e.contains("ber_target"), "{e}");
        let p = write(tmp.path(), "typo.toml", "payload_byte = 1\n");
        let e = ScenarioConfig::load(Some(&p), &Overrides::default()).unwrap_err().to_string();
        assert!(e.contains("payload_byte"), "{e}");
        let p = write(tmp.path(), "nested.toml", "[frame]\npayload_bytes = 1\n");
        assert!(ScenarioConfig::load(Some(&p), &Overrides::default()).is_err());
        let p = write(tmp.path(), "cycle.toml", "include = \"cycle.toml\"\n");
        let e = ScenarioConfig::load(Some(&p), &Overrides::default()).unwrap_err().to_string();
        assert!(e.contains("cycle"), "{e}");
        let p = write(tmp.path(), "neg.toml", "energy_scale = -1.0\n");
        assert!(ScenarioConfig::load(Some(&p), &Overrides::default()).is_err());
        let p = write(tmp.path(), "filt.toml", "filter = \"copper\"\n");
        assert!(ScenarioConfig::load(Some(&p), &Overrides::default()).is_err());
    }

    #[test]
    fn case_studies_parse() {
        let tmp = tempfile::tempdir().unwrap();
        let p = write(
            tmp.path(),
            "cs.toml",
            "case_studies = [{ label = \"bw_x1.4\", bw_scale = 1.4 }, { label = \"dist_x2\", dist_scale = 2.0 }]\nfilter = [\"all\", \"electrical\"]\n",
        );
        let c = ScenarioConfig::load(Some(&p), &Overrides::default()).unwrap();
        assert_eq!(c.case_studies.len(), 2);
        assert_eq!(c.case_studies[1].bw_scale, 1.0);
        assert_eq!(c.filters().unwrap().len(), 2);
    }
}
