//! Simulation and model parameters.
//!
//! Parameters are read from a flat `key = value` text file (`#` starts a
//! comment), then overridden by `key=value` pairs from the command line.
//! Every key is validated against its admissible interval at load time.
//!
//! [`Config::canonical_text`] writes every parameter back out in the same
//! format, so loading the emitted text reproduces the config exactly.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::rng::RNG_ALGORITHM;
use crate::space::Design;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "POLISIM_CONFIG";

/// Closed or open bounds of an admissible parameter range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    pub const fn left_open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: false }
    }

    pub const fn right_open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: true }
    }

    pub fn contains(&self, v: f64) -> bool {
        if v.is_nan() {
            return false;
        }
        let above = if self.lo_open { v > self.lo } else { v >= self.lo };
        let below = if self.hi_open { v < self.hi } else { v <= self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// Run-defining parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub num_days: u32,
    pub num_agents: usize,
    pub num_families: usize,
    pub num_dwellings: usize,
    pub num_firms: usize,
    pub num_regions: Design,
    pub seed: u64,
    pub num_runs: usize,
    pub output_dir: PathBuf,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            num_days: 5_040,
            num_agents: 1_000,
            num_families: 400,
            num_dwellings: 440,
            num_firms: 110,
            num_regions: Design::One,
            seed: 1,
            num_runs: 1,
            output_dir: PathBuf::from("output"),
        }
    }
}

/// Exogenous behavioural parameters of the economy.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Production and wage exponent on qualification.
    pub alpha: f64,
    /// Consumption exponent applied to cash holdings.
    pub beta: f64,
    /// Inventory threshold (δ) that switches between mark-up and cost price.
    pub price_change_quantity: f64,
    /// Monthly probability (γ) that a firm skips its hire/fire evaluation.
    pub labor_market_frequency: f64,
    /// Mark-up (φ) applied when inventory is below the threshold.
    pub markup: f64,
    /// Number of firms (Γ) a consumer inspects before buying.
    pub market_size: usize,
    /// Loaded and fingerprinted, not used by the economy.
    pub consumption_satisfaction: f64,
    /// Share of families entering the housing market each month.
    pub housing_entry_share: f64,
    /// Consumption tax rate (τ).
    pub tax_consumption: f64,
    /// Wage multiplier k.
    pub wage_base: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            alpha: 0.25,
            beta: 0.87,
            price_change_quantity: 10.0,
            labor_market_frequency: 0.28,
            markup: 0.03,
            market_size: 100,
            consumption_satisfaction: 0.01,
            housing_entry_share: 0.021,
            tax_consumption: 0.21,
            wage_base: 0.65,
        }
    }
}

/// Uniform ranges for the initial population. These have no published
/// values; the defaults keep early wages and the unit cost price compatible.
#[derive(Debug, Clone, PartialEq)]
pub struct InitRanges {
    pub age_min: u32,
    pub age_max: u32,
    pub qualification_min: u32,
    pub qualification_max: u32,
    pub cash_min: f64,
    pub cash_max: f64,
    pub dwelling_size_min: u32,
    pub dwelling_size_max: u32,
    pub sqm_value_min: f64,
    pub sqm_value_max: f64,
    pub firm_capital_min: f64,
    pub firm_capital_max: f64,
}

impl Default for InitRanges {
    fn default() -> Self {
        InitRanges {
            age_min: 1,
            age_max: 90,
            qualification_min: 1,
            qualification_max: 21,
            cash_min: 0.0,
            cash_max: 5.0,
            dwelling_size_min: 20,
            dwelling_size_max: 120,
            sqm_value_min: 1.0,
            sqm_value_max: 2.0,
            firm_capital_min: 50.0,
            firm_capital_max: 150.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub sim: SimParams,
    pub model: ModelParams,
    pub init: InitRanges,
}

/// Every recognised key, in canonical order.
pub const KEYS: &[&str] = &[
    "num_days",
    "num_agents",
    "num_families",
    "num_dwellings",
    "num_firms",
    "num_regions",
    "seed",
    "num_runs",
    "output_dir",
    "alpha",
    "beta",
    "price_change_quantity",
    "labor_market_frequency",
    "markup",
    "market_size",
    "consumption_satisfaction",
    "housing_entry_share",
    "tax_consumption",
    "wage_base",
    "age_min",
    "age_max",
    "qualification_min",
    "qualification_max",
    "cash_min",
    "cash_max",
    "dwelling_size_min",
    "dwelling_size_max",
    "sqm_value_min",
    "sqm_value_max",
    "firm_capital_min",
    "firm_capital_max",
];

/// Admissible interval for a numeric key, `None` for keys without one.
///
/// The δ default (10) is below the published lower bound of 100, so its
/// interval starts at 1 instead.
pub fn interval_of(key: &str) -> Option<Interval> {
    let iv = match key {
        "num_days" => Interval::closed(63.0, 12_800.0),
        "num_agents" => Interval::closed(10.0, 10_000.0),
        "num_families" => Interval::closed(4.0, 2_000.0),
        "num_dwellings" => Interval::closed(5.0, 2_200.0),
        "num_firms" => Interval::closed(2.0, 1_000.0),
        "num_runs" => Interval::closed(1.0, 1_000_000.0),
        "alpha" | "beta" => Interval::left_open(0.0, 1.0),
        "price_change_quantity" => Interval::closed(1.0, 2_000.0),
        "labor_market_frequency" => Interval::right_open(0.0, 1.0),
        "markup" => Interval::open(0.0, 1.0),
        "market_size" => Interval::closed(1.0, 1_000.0),
        "consumption_satisfaction" => Interval::right_open(0.0, 1.0),
        "housing_entry_share" | "tax_consumption" => Interval::open(0.0, 1.0),
        "wage_base" => Interval::left_open(0.0, 100.0),
        "age_min" | "age_max" => Interval::closed(0.0, 150.0),
        "qualification_min" | "qualification_max" => Interval::closed(1.0, 40.0),
        "cash_min" | "cash_max" => Interval::closed(0.0, 1e9),
        "dwelling_size_min" | "dwelling_size_max" => Interval::closed(1.0, 10_000.0),
        "sqm_value_min" | "sqm_value_max" => Interval::left_open(0.0, 1e6),
        "firm_capital_min" | "firm_capital_max" => Interval::closed(0.0, 1e9),
        _ => return None,
    };
    Some(iv)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse { key: key.to_string(), value: value.to_string() })
}

fn checked_f64(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_num(key, value)?;
    check_interval(key, v, value)?;
    Ok(v)
}

fn checked_int<T>(key: &str, value: &str) -> Result<T>
where
    T: std::str::FromStr + Copy + Into<f64>,
{
    let v: T = parse_num(key, value)?;
    check_interval(key, v.into(), value)?;
    Ok(v)
}

fn checked_usize(key: &str, value: &str) -> Result<usize> {
    let v: u32 = checked_int(key, value)?;
    Ok(v as usize)
}

fn check_interval(key: &str, v: f64, raw: &str) -> Result<()> {
    if let Some(iv) = interval_of(key) {
        if !iv.contains(v) {
            return Err(Error::OutOfInterval {
                key: key.to_string(),
                value: raw.to_string(),
                interval: iv.to_string(),
            });
        }
    }
    Ok(())
}

impl Config {
    /// Applies one `key = value` assignment with interval checking.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let s = &mut self.sim;
        let m = &mut self.model;
        let i = &mut self.init;
        match key {
            "num_days" => s.num_days = checked_int(key, value)?,
            "num_agents" => s.num_agents = checked_usize(key, value)?,
            "num_families" => s.num_families = checked_usize(key, value)?,
            "num_dwellings" => s.num_dwellings = checked_usize(key, value)?,
            "num_firms" => s.num_firms = checked_usize(key, value)?,
            "num_regions" => {
                let n: u32 = parse_num(key, value)?;
                s.num_regions = Design::from_count(n).map_err(|_| Error::OutOfInterval {
                    key: key.to_string(),
                    value: value.to_string(),
                    interval: "{1, 4, 7}".to_string(),
                })?;
            }
            "seed" => s.seed = parse_num(key, value)?,
            "num_runs" => s.num_runs = checked_usize(key, value)?,
            "output_dir" => s.output_dir = PathBuf::from(value),
            "alpha" => m.alpha = checked_f64(key, value)?,
            "beta" => m.beta = checked_f64(key, value)?,
            "price_change_quantity" => m.price_change_quantity = checked_f64(key, value)?,
            "labor_market_frequency" => m.labor_market_frequency = checked_f64(key, value)?,
            "markup" => m.markup = checked_f64(key, value)?,
            "market_size" => m.market_size = checked_usize(key, value)?,
            "consumption_satisfaction" => m.consumption_satisfaction = checked_f64(key, value)?,
            "housing_entry_share" => m.housing_entry_share = checked_f64(key, value)?,
            "tax_consumption" => m.tax_consumption = checked_f64(key, value)?,
            "wage_base" => m.wage_base = checked_f64(key, value)?,
            "age_min" => i.age_min = checked_int(key, value)?,
            "age_max" => i.age_max = checked_int(key, value)?,
            "qualification_min" => i.qualification_min = checked_int(key, value)?,
            "qualification_max" => i.qualification_max = checked_int(key, value)?,
            "cash_min" => i.cash_min = checked_f64(key, value)?,
            "cash_max" => i.cash_max = checked_f64(key, value)?,
            "dwelling_size_min" => i.dwelling_size_min = checked_int(key, value)?,
            "dwelling_size_max" => i.dwelling_size_max = checked_int(key, value)?,
            "sqm_value_min" => i.sqm_value_min = checked_f64(key, value)?,
            "sqm_value_max" => i.sqm_value_max = checked_f64(key, value)?,
            "firm_capital_min" => i.firm_capital_min = checked_f64(key, value)?,
            "firm_capital_max" => i.firm_capital_max = checked_f64(key, value)?,
            // Accepted so that a fingerprint can be loaded back, but only
            // when it names the generator this build uses.
            "rng_algorithm" => {
                if value != RNG_ALGORITHM {
                    return Err(Error::Invalid(format!("rng_algorithm `{value}` does not match `{RNG_ALGORITHM}`")));
                }
            }
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Value of a key rendered as canonical text.
    pub fn get(&self, key: &str) -> Option<String> {
        let s = &self.sim;
        let m = &self.model;
        let i = &self.init;
        let v = match key {
            "num_days" => s.num_days.to_string(),
            "num_agents" => s.num_agents.to_string(),
            "num_families" => s.num_families.to_string(),
            "num_dwellings" => s.num_dwellings.to_string(),
            "num_firms" => s.num_firms.to_string(),
            "num_regions" => s.num_regions.count().to_string(),
            "seed" => s.seed.to_string(),
            "num_runs" => s.num_runs.to_string(),
            "output_dir" => s.output_dir.display().to_string(),
            "alpha" => m.alpha.to_string(),
            "beta" => m.beta.to_string(),
            "price_change_quantity" => m.price_change_quantity.to_string(),
            "labor_market_frequency" => m.labor_market_frequency.to_string(),
            "markup" => m.markup.to_string(),
            "market_size" => m.market_size.to_string(),
            "consumption_satisfaction" => m.consumption_satisfaction.to_string(),
            "housing_entry_share" => m.housing_entry_share.to_string(),
            "tax_consumption" => m.tax_consumption.to_string(),
            "wage_base" => m.wage_base.to_string(),
            "age_min" => i.age_min.to_string(),
            "age_max" => i.age_max.to_string(),
            "qualification_min" => i.qualification_min.to_string(),
            "qualification_max" => i.qualification_max.to_string(),
            "cash_min" => i.cash_min.to_string(),
            "cash_max" => i.cash_max.to_string(),
            "dwelling_size_min" => i.dwelling_size_min.to_string(),
            "dwelling_size_max" => i.dwelling_size_max.to_string(),
            "sqm_value_min" => i.sqm_value_min.to_string(),
            "sqm_value_max" => i.sqm_value_max.to_string(),
            "firm_capital_min" => i.firm_capital_min.to_string(),
            "firm_capital_max" => i.firm_capital_max.to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// Checks constraints that span several keys.
    pub fn validate(&self) -> Result<()> {
        let s = &self.sim;
        if s.num_dwellings <= s.num_families {
            return Err(Error::NotEnoughDwellings { dwellings: s.num_dwellings, families: s.num_families });
        }
        let i = &self.init;
        let ordered = [
            ("age", i.age_min as f64, i.age_max as f64),
            ("qualification", i.qualification_min as f64, i.qualification_max as f64),
            ("cash", i.cash_min, i.cash_max),
            ("dwelling_size", i.dwelling_size_min as f64, i.dwelling_size_max as f64),
            ("sqm_value", i.sqm_value_min, i.sqm_value_max),
            ("firm_capital", i.firm_capital_min, i.firm_capital_max),
        ];
        for (name, lo, hi) in ordered {
            if lo > hi {
                return Err(Error::Invalid(format!("{name}_min ({lo}) exceeds {name}_max ({hi})")));
            }
        }
        Ok(())
    }

    /// Parses config text on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Syntax { line: n + 1, text: raw.to_string() })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Applies `key=value` override strings.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (key, value) = o.split_once('=').ok_or_else(|| Error::Syntax { line: 0, text: o.to_string() })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Every parameter as `key = value` lines, in [`KEYS`] order.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let v = self.get(key).expect("every key has a value");
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// Canonical text without `output_dir`, plus the generator identifier.
    /// Two configs share a fingerprint exactly when every parameter that can
    /// affect results agrees.
    pub fn fingerprint(&self) -> String {
        let mut out: String =
            self.canonical_text().lines().filter(|l| !l.starts_with("output_dir ")).flat_map(|l| [l, "\n"]).collect();
        out.push_str("rng_algorithm = ");
        out.push_str(RNG_ALGORITHM);
        out.push('\n');
        out
    }
}

/// Loads defaults, then the file (if any), then the overrides.
pub fn load_config<S: AsRef<str>>(file: Option<&Path>, overrides: &[S]) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        cfg.apply_text(&text)?;
    }
    cfg.apply_overrides(overrides)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, overrides: &[&str]) -> Result<Config> {
        let mut cfg = Config::default();
        cfg.apply_text(text)?;
        cfg.apply_overrides(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = load("", &[]).unwrap();
        assert_eq!(cfg.sim.num_days, 5_040);
        assert_eq!(cfg.sim.num_agents, 1_000);
        assert_eq!(cfg.sim.num_families, 400);
        assert_eq!(cfg.sim.num_dwellings, 440);
        assert_eq!(cfg.sim.num_firms, 110);
        assert_eq!(cfg.model.alpha, 0.25);
        assert_eq!(cfg.model.beta, 0.87);
        assert_eq!(cfg.model.price_change_quantity, 10.0);
        assert_eq!(cfg.model.labor_market_frequency, 0.28);
        assert_eq!(cfg.model.markup, 0.03);
        assert_eq!(cfg.model.market_size, 100);
        assert_eq!(cfg.model.consumption_satisfaction, 0.01);
        assert_eq!(cfg.model.housing_entry_share, 0.021);
        assert_eq!(cfg.model.tax_consumption, 0.21);
        assert_eq!(cfg.model.wage_base, 0.65);
    }

    #[test]
    fn region_override() {
        let cfg = load("", &["num_regions=4"]).unwrap();
        assert_eq!(cfg.sim.num_regions, Design::Four);
        let mut expected = Config::default();
        expected.sim.num_regions = Design::Four;
        assert_eq!(cfg, expected);
    }

    #[test]
    fn out_of_interval_names_key_and_interval() {
        let err = load("", &["tax_consumption=1.5"]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tax_consumption"), "{msg}");
        assert!(msg.contains("1.5"), "{msg}");
        assert!(msg.contains("(0, 1)"), "{msg}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = load("gamma2 = 3\n", &[]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey(ref k) if k == "gamma2"));
    }

    #[test]
    fn overrides_beat_file_values() {
        let cfg = load("alpha = 0.3 # comment\n\n# whole line\nbeta=0.5", &["alpha=0.4"]).unwrap();
        assert_eq!(cfg.model.alpha, 0.4);
        assert_eq!(cfg.model.beta, 0.5);
    }

    #[test]
    fn dwellings_must_exceed_families() {
        let err = load("num_dwellings = 400", &[]).unwrap_err();
        assert!(matches!(err, Error::NotEnoughDwellings { .. }));
    }

    #[test]
    fn bad_region_count() {
        assert!(load("num_regions = 3", &[]).is_err());
    }

    #[test]
    fn delta_default_is_admissible() {
        assert!(load("price_change_quantity = 10", &[]).is_ok());
        assert!(load("price_change_quantity = 2001", &[]).is_err());
        assert!(load("price_change_quantity = 0.5", &[]).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = load("alpha = 0.26\nnum_regions = 7\nseed = 99\ncash_max = 3.5", &[]).unwrap();
        let again = load(&cfg.canonical_text(), &[]).unwrap();
        assert_eq!(cfg, again);
        let from_fp = load(&cfg.fingerprint(), &[]).unwrap();
        assert_eq!(cfg, from_fp);
        assert_eq!(again.canonical_text(), cfg.canonical_text());
    }

    #[test]
    fn fingerprint_is_stable_and_sensitive() {
        let a = Config::default();
        assert_eq!(a.fingerprint(), a.fingerprint());
        assert!(a.fingerprint().contains(RNG_ALGORITHM));

        let mut b = Config::default();
        b.set("alpha", "0.26").unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());

        let mut s1 = Config::default();
        s1.sim.seed = 1;
        let mut s2 = Config::default();
        s2.sim.seed = 2;
        assert_ne!(s1.fingerprint(), s2.fingerprint());

        let mut o = Config::default();
        o.set("output_dir", "elsewhere").unwrap();
        assert_eq!(a.fingerprint(), o.fingerprint());
    }

    #[test]
    fn every_key_round_trips_through_get() {
        let cfg = Config::default();
        for key in KEYS {
            let v = cfg.get(key).unwrap();
            let mut c = Config::default();
            c.set(key, &v).unwrap();
            assert_eq!(c, cfg, "key {key}");
        }
    }

    #[test]
    fn interval_display() {
        assert_eq!(Interval::open(0.0, 1.0).to_string(), "(0, 1)");
        assert_eq!(Interval::left_open(0.0, 1.0).to_string(), "(0, 1]");
        assert_eq!(Interval::closed(63.0, 12800.0).to_string(), "[63, 12800]");
    }
}
