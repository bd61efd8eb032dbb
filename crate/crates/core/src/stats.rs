//! Monthly indicators and cross-run summaries.

use crate::error::{Error, Result};
use crate::labor::is_working_age;
use crate::space::Design;
use crate::world::World;

/// Gini coefficient `Σ_i Σ_j |x_i - x_j| / (2 n² mean)` of non-negative
/// values, computed from the sorted values in O(n log n). All-zero input
/// gives 0.
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let total: f64 = xs.iter().sum();
    if total <= 0.0 {
        return Ok(0.0);
    }
    // Σ_i Σ_j |x_i - x_j| = 2 Σ_i (2i - n - 1) x_(i), i = 1..n. The weights
    // sum to zero, so shifting by the minimum changes nothing but makes
    // constant input exactly 0.
    let lo = xs[0];
    let weighted: f64 = xs.iter().enumerate().map(|(i, &x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * (x - lo)).sum();
    Ok((weighted / (n * total)).clamp(0.0, 1.0))
}

/// Linear-interpolation quantile between order statistics
/// (`h = (n - 1) p`).
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    Some(quantile_sorted(&xs, p))
}

fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let h = (xs.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(xs.len() - 1);
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

/// Median; even counts average the middle two.
pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample standard deviation; 0 for a single value.
pub fn std_dev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Economy-wide indicators at the end of a month.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    /// 1-based month number.
    pub month: usize,
    pub gdp_month: f64,
    pub gdp_cumulative: f64,
    pub unemployment: f64,
    pub avg_workers_per_firm: f64,
    pub avg_price: f64,
    pub avg_firm_balance: f64,
    pub sum_firm_profit: f64,
    pub gini_utility: f64,
    pub median_family_wealth: f64,
    pub avg_utility: f64,
}

impl RunRecord {
    pub const COLUMNS: [&'static str; 12] = [
        "run_id",
        "month",
        "gdp_month",
        "gdp_cumulative",
        "unemployment",
        "avg_workers_per_firm",
        "avg_price",
        "avg_firm_balance",
        "sum_firm_profit",
        "gini_utility",
        "median_family_wealth",
        "avg_utility",
    ];

    /// Real-valued indicators by column name.
    pub fn indicators(&self) -> [(&'static str, f64); 10] {
        [
            ("gdp_month", self.gdp_month),
            ("gdp_cumulative", self.gdp_cumulative),
            ("unemployment", self.unemployment),
            ("avg_workers_per_firm", self.avg_workers_per_firm),
            ("avg_price", self.avg_price),
            ("avg_firm_balance", self.avg_firm_balance),
            ("sum_firm_profit", self.sum_firm_profit),
            ("gini_utility", self.gini_utility),
            ("median_family_wealth", self.median_family_wealth),
            ("avg_utility", self.avg_utility),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRecord {
    pub run_id: usize,
    pub month: usize,
    pub region_id: usize,
    pub qli: f64,
    pub population: usize,
    pub tax_collected_month: f64,
    /// Taxes carried over to the next month (non-zero only when empty).
    pub treasury: f64,
}

impl RegionRecord {
    pub const COLUMNS: [&'static str; 7] =
        ["run_id", "month", "region_id", "qli", "population", "tax_collected_month", "treasury"];
}

/// Share of working-age agents without a job.
pub fn unemployment(world: &World) -> f64 {
    let (mut working_age, mut idle) = (0usize, 0usize);
    for a in world.agents.iter().filter(|a| is_working_age(a)) {
        working_age += 1;
        if a.employer.is_none() {
            idle += 1;
        }
    }
    if working_age == 0 {
        0.0
    } else {
        idle as f64 / working_age as f64
    }
}

/// Mean member utility of each non-empty family.
pub fn family_utilities(world: &World) -> Vec<f64> {
    world
        .families
        .iter()
        .filter(|f| !f.members.is_empty())
        .map(|f| f.members.iter().map(|a| world.agents[a.index()].utility).sum::<f64>() / f.members.len() as f64)
        .collect()
}

/// Cash plus home value of each non-empty family.
pub fn family_wealth(world: &World) -> Vec<f64> {
    world
        .families
        .iter()
        .filter(|f| !f.members.is_empty())
        .map(|f| {
            let home = f.dwelling.map_or(0.0, |d| world.dwellings[d.index()].price);
            world.family_cash(f.id) + home
        })
        .collect()
}

pub fn snapshot(
    world: &World,
    run_id: usize,
    month: usize,
    gdp_month: f64,
    gdp_cumulative: f64,
) -> (RunRecord, Vec<RegionRecord>) {
    let n_firms = world.firms.len() as f64;
    let employed: usize = world.firms.iter().map(|f| f.employees.len()).sum();
    let utilities = family_utilities(world);
    let record = RunRecord {
        run_id,
        month,
        gdp_month,
        gdp_cumulative,
        unemployment: unemployment(world),
        avg_workers_per_firm: employed as f64 / n_firms,
        avg_price: world.firms.iter().map(|f| f.price).sum::<f64>() / n_firms,
        avg_firm_balance: world.firms.iter().map(|f| f.balance).sum::<f64>() / n_firms,
        sum_firm_profit: world.firms.iter().map(|f| f.last_profit).sum(),
        gini_utility: if utilities.is_empty() { 0.0 } else { gini(&utilities).expect("non-empty") },
        median_family_wealth: median(&family_wealth(world)).unwrap_or(0.0),
        avg_utility: world.agents.iter().map(|a| a.utility).sum::<f64>() / world.agents.len().max(1) as f64,
    };
    let regions = world
        .regions
        .iter()
        .map(|r| RegionRecord {
            run_id,
            month,
            region_id: r.id(),
            qli: r.qli,
            population: r.population,
            tax_collected_month: r.tax_collected_month,
            treasury: r.treasury,
        })
        .collect();
    (record, regions)
}

/// Final-month state of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub design: Design,
    pub record: RunRecord,
    pub regions: Vec<RegionRecord>,
}

impl FinalState {
    /// Indicators summarised across runs: every series column plus the
    /// regional QLI and population extremes.
    pub fn indicators(&self) -> Vec<(&'static str, f64)> {
        let mut out: Vec<(&'static str, f64)> = self.record.indicators().to_vec();
        let qlis: Vec<f64> = self.regions.iter().map(|r| r.qli).collect();
        out.push(("qli_mean", mean(&qlis).unwrap_or(0.0)));
        if let (Some(max), Some(min)) = (
            self.regions.iter().max_by(|a, b| a.qli.total_cmp(&b.qli)),
            self.regions.iter().min_by(|a, b| a.qli.total_cmp(&b.qli)),
        ) {
            out.push(("qli_max", max.qli));
            out.push(("population_at_qli_max", max.population as f64));
            out.push(("qli_min", min.qli));
            out.push(("population_at_qli_min", min.population as f64));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub design: Design,
    pub indicator: String,
    pub runs: usize,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub mean: f64,
    pub std: f64,
}

impl SummaryRow {
    pub const COLUMNS: [&'static str; 8] = ["design", "indicator", "runs", "q25", "median", "q75", "mean", "std"];
}

/// Quartiles, mean and standard deviation of every indicator, per design.
/// Rows are ordered by design, then indicator order of [`FinalState::indicators`].
pub fn summarize(finals: &[FinalState]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for design in Design::ALL {
        let group: Vec<&FinalState> = finals.iter().filter(|f| f.design == design).collect();
        let Some(first) = group.first() else { continue };
        for (k, (name, _)) in first.indicators().iter().enumerate() {
            let mut xs: Vec<f64> = group.iter().map(|f| f.indicators()[k].1).collect();
            xs.sort_by(f64::total_cmp);
            rows.push(SummaryRow {
                design,
                indicator: name.to_string(),
                runs: xs.len(),
                q25: quantile_sorted(&xs, 0.25),
                median: quantile_sorted(&xs, 0.5),
                q75: quantile_sorted(&xs, 0.75),
                mean: mean(&xs).unwrap_or(0.0),
                std: std_dev(&xs).unwrap_or(0.0),
            });
        }
    }
    rows
}
