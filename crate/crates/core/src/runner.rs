//! Single runs, Monte Carlo batches and one-at-a-time sweeps, plus the CSV
//! files they write.
//!
//! File layout of an output directory:
//!
//! * `meta.txt`: config fingerprint, generator id and partition tables;
//! * `series_<design>_<run>.csv`: one [`RunRecord`] row per month;
//! * `regions_<design>_<run>.csv`: one [`RegionRecord`] row per region and month;
//! * `summary.csv`: final-month quantiles per design and indicator.
//!
//! Floats are written with 9 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::goods::SaleReceipt;
use crate::rng::{RngStream, RNG_ALGORITHM};
use crate::scheduler::{self, Clock, NullRecorder, Phase, Recorder, Series};
use crate::space::{Design, Partition};
use crate::stats::{self, FinalState, RegionRecord, RunRecord, SummaryRow};
use crate::world::World;

/// Formats `x` with 9 significant digits, dropping trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn series_csv(records: &[RunRecord]) -> String {
    let mut out = RunRecord::COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{}", r.run_id, r.month);
        for (_, v) in r.indicators() {
            out.push(',');
            out.push_str(&fmt_num(v));
        }
        out.push('\n');
    }
    out
}

pub fn regions_csv(records: &[RegionRecord]) -> String {
    let mut out = RegionRecord::COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.run_id,
            r.month,
            r.region_id,
            fmt_num(r.qli),
            r.population,
            fmt_num(r.tax_collected_month),
            fmt_num(r.treasury)
        );
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = SummaryRow::COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.design,
            r.indicator,
            r.runs,
            fmt_num(r.q25),
            fmt_num(r.median),
            fmt_num(r.q75),
            fmt_num(r.mean),
            fmt_num(r.std)
        );
    }
    out
}

/// Rows of a CSV file after checking its header.
fn csv_rows<'a>(path: &Path, text: &'a str, columns: &[&str]) -> Result<Vec<Vec<&'a str>>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != columns.join(",") {
        return Err(Error::Summary(format!("{}: unexpected header `{header}`", path.display())));
    }
    let rows: Vec<Vec<&str>> = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').collect()).collect();
    if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
        return Err(Error::Summary(format!("{}: malformed row `{}`", path.display(), bad.join(","))));
    }
    Ok(rows)
}

fn num<T: std::str::FromStr>(path: &Path, field: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Summary(format!("{}: cannot parse `{field}`", path.display())))
}

pub fn parse_series(path: &Path, text: &str) -> Result<Vec<RunRecord>> {
    csv_rows(path, text, &RunRecord::COLUMNS)?
        .into_iter()
        .map(|r| {
            Ok(RunRecord {
                run_id: num(path, r[0])?,
                month: num(path, r[1])?,
                gdp_month: num(path, r[2])?,
                gdp_cumulative: num(path, r[3])?,
                unemployment: num(path, r[4])?,
                avg_workers_per_firm: num(path, r[5])?,
                avg_price: num(path, r[6])?,
                avg_firm_balance: num(path, r[7])?,
                sum_firm_profit: num(path, r[8])?,
                gini_utility: num(path, r[9])?,
                median_family_wealth: num(path, r[10])?,
                avg_utility: num(path, r[11])?,
            })
        })
        .collect()
}

pub fn parse_regions(path: &Path, text: &str) -> Result<Vec<RegionRecord>> {
    csv_rows(path, text, &RegionRecord::COLUMNS)?
        .into_iter()
        .map(|r| {
            Ok(RegionRecord {
                run_id: num(path, r[0])?,
                month: num(path, r[1])?,
                region_id: num(path, r[2])?,
                qli: num(path, r[3])?,
                population: num(path, r[4])?,
                tax_collected_month: num(path, r[5])?,
                treasury: num(path, r[6])?,
            })
        })
        .collect()
}

/// Final month of a series and its regional rows.
pub fn final_state(design: Design, series: &Series) -> Option<FinalState> {
    let record = series.records.last()?.clone();
    let regions = series.regions.iter().filter(|r| r.month == record.month).cloned().collect();
    Some(FinalState { design, record, regions })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Creates `dir` and proves it writable before any simulation starts.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    let fail = |source| Error::OutputDir { path: dir.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)
}

pub fn meta_text(cfg: &Config, designs: &[Design], extra: &[(&str, String)]) -> String {
    let mut out = String::from("# fingerprint\n");
    out.push_str(&cfg.fingerprint());
    let _ = writeln!(out, "# rng\n{RNG_ALGORITHM}");
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}\n{v}");
    }
    for &d in designs {
        let _ = writeln!(out, "# partition {d}");
        out.push_str(&Partition::build(d).table());
    }
    out
}

/// Config with the region design replaced.
pub fn with_design(cfg: &Config, design: Design) -> Config {
    let mut c = cfg.clone();
    c.sim.num_regions = design;
    c
}

/// Prints a line to stderr at every simulated year.
pub struct YearProgress {
    pub label: String,
    pub years: u32,
}

impl Recorder for YearProgress {
    fn year(&mut self, year: u32) {
        eprintln!("{}: year {year}/{}", self.label, self.years);
    }
}

/// Writes every sale as a CSV row.
pub struct TransactionLog<W: Write> {
    out: W,
    month: u32,
    error: Option<std::io::Error>,
}

impl<W: Write> TransactionLog<W> {
    pub const COLUMNS: [&'static str; 9] =
        ["month", "buyer", "firm", "region", "gross_value", "tax", "net_to_firm", "quantity", "change_returned"];

    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{}", Self::COLUMNS.join(","))?;
        Ok(TransactionLog { out, month: 1, error: None })
    }

    /// Flushes and reports the first write error, if any.
    pub fn finish(mut self) -> std::io::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()
    }
}

impl<W: Write> Recorder for TransactionLog<W> {
    fn sale(&mut self, r: &SaleReceipt) {
        if self.error.is_some() {
            return;
        }
        let res = writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{}",
            self.month,
            r.buyer.index(),
            r.firm.index(),
            r.region,
            fmt_num(r.gross_value),
            fmt_num(r.tax),
            fmt_num(r.net_to_firm),
            fmt_num(r.quantity),
            fmt_num(r.change_returned)
        );
        if let Err(e) = res {
            self.error = Some(e);
        }
    }

    fn phase_end(&mut self, phase: Phase, clock: Clock, _world: &World) {
        if phase == Phase::Wages {
            self.month = clock.months_completed();
        }
    }
}

/// Fans every hook out to two recorders.
pub struct Both<'a>(pub &'a mut dyn Recorder, pub &'a mut dyn Recorder);

impl Recorder for Both<'_> {
    fn phase_end(&mut self, phase: Phase, clock: Clock, world: &World) {
        self.0.phase_end(phase, clock, world);
        self.1.phase_end(phase, clock, world);
    }
    fn wage_round(&mut self, firm: crate::world::FirmId, round: &crate::firm::WageRound) {
        self.0.wage_round(firm, round);
        self.1.wage_round(firm, round);
    }
    fn sale(&mut self, receipt: &SaleReceipt) {
        self.0.sale(receipt);
        self.1.sale(receipt);
    }
    fn labor_action(&mut self, firm: crate::world::FirmId, action: crate::firm::LaborAction) {
        self.0.labor_action(firm, action);
        self.1.labor_action(firm, action);
    }
    fn hires(&mut self, hires: &[crate::labor::Hire]) {
        self.0.hires(hires);
        self.1.hires(hires);
    }
    fn moves(&mut self, moves: &[crate::housing::Move]) {
        self.0.moves(moves);
        self.1.moves(moves);
    }
    fn month(&mut self, record: &RunRecord, regions: &[RegionRecord]) {
        self.0.month(record, regions);
        self.1.month(record, regions);
    }
    fn year(&mut self, year: u32) {
        self.0.year(year);
        self.1.year(year);
    }
}

/// Writes one CSV per entity class into `dir`.
pub fn dump_world(world: &World, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let opt = |v: Option<usize>| v.map_or(String::new(), |i| i.to_string());

    let mut s = String::from("id,age,qualification,cash,utility,family,employer\n");
    for a in &world.agents {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            a.id.index(),
            a.age,
            a.qualification,
            fmt_num(a.cash),
            fmt_num(a.utility),
            a.family.index(),
            opt(a.employer.map(|f| f.index()))
        );
    }
    write_file(&dir.join("agents.csv"), &s)?;

    let mut s = String::from("id,size,dwelling\n");
    for f in &world.families {
        let _ = writeln!(s, "{},{},{}", f.id.index(), f.members.len(), opt(f.dwelling.map(|d| d.index())));
    }
    write_file(&dir.join("families.csv"), &s)?;

    let mut s = String::from("id,x,y,region,size,base_sqm_value,price,quality,occupant\n");
    for d in &world.dwellings {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            d.id.index(),
            fmt_num(d.location.x),
            fmt_num(d.location.y),
            d.region,
            fmt_num(d.size),
            fmt_num(d.base_sqm_value),
            fmt_num(d.price),
            fmt_num(d.quality),
            opt(d.occupant.map(|f| f.index()))
        );
    }
    write_file(&dir.join("dwellings.csv"), &s)?;

    let mut s = String::from("id,x,y,region,balance,price,inventory,employees,last_profit,cumulative_sold_value\n");
    for f in &world.firms {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            f.id.index(),
            fmt_num(f.location.x),
            fmt_num(f.location.y),
            f.region,
            fmt_num(f.balance),
            fmt_num(f.price),
            fmt_num(f.inventory),
            f.employees.len(),
            fmt_num(f.last_profit),
            fmt_num(f.cumulative_sold_value)
        );
    }
    write_file(&dir.join("firms.csv"), &s)?;

    let mut s = String::from("region_id,qli,prev_qli,treasury,population\n");
    for r in &world.regions {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.id(),
            fmt_num(r.qli),
            fmt_num(r.prev_qli),
            fmt_num(r.treasury),
            r.population
        );
    }
    write_file(&dir.join("regions.csv"), &s)
}

/// Writes the series and regions files of one run.
pub fn write_run(dir: &Path, design: Design, run: usize, series: &Series) -> Result<()> {
    write_file(&dir.join(format!("series_{design}_{run}.csv")), &series_csv(&series.records))?;
    write_file(&dir.join(format!("regions_{design}_{run}.csv")), &regions_csv(&series.regions))
}

/// Stream of run `run` under base seed `seed`. Every design uses the same
/// stream for a given run index.
pub fn run_stream(seed: u64, run: usize) -> RngStream {
    RngStream::derive_run_stream(seed, run as u64)
}

/// Runs one simulation with the stream of run index `run`.
pub fn simulate(cfg: &Config, design: Design, run: usize, recorder: &mut dyn Recorder) -> Result<(World, Series)> {
    let cfg = with_design(cfg, design);
    scheduler::run_simulation(&cfg, run_stream(cfg.sim.seed, run), run, recorder)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchPlan {
    pub designs: Vec<Design>,
    pub runs: usize,
    /// Worker threads; outputs do not depend on it.
    pub jobs: usize,
    pub progress: bool,
}

/// Executes `jobs` closures over `0..n` on worker threads and returns the
/// results in index order.
fn parallel_map<T: Send>(n: usize, jobs: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i);
                let failed = r.is_err();
                slots.lock().expect("no worker panicked")[i] = Some(r);
                if failed {
                    next.store(n, Ordering::Relaxed);
                }
            });
        }
    });
    let slots = slots.into_inner().expect("no worker panicked");
    let mut out = Vec::with_capacity(n);
    for slot in slots {
        match slot {
            Some(r) => out.push(r?),
            None => continue,
        }
    }
    Ok(out)
}

/// Runs `plan.runs` simulations per design into `cfg.sim.output_dir`.
pub fn run_batch(cfg: &Config, plan: &BatchPlan) -> Result<Vec<FinalState>> {
    let dir = cfg.sim.output_dir.clone();
    prepare_output_dir(&dir)?;
    write_file(&dir.join("meta.txt"), &meta_text(cfg, &plan.designs, &[("runs", plan.runs.to_string())]))?;

    let cells: Vec<(Design, usize)> = plan.designs.iter().flat_map(|&d| (0..plan.runs).map(move |r| (d, r))).collect();
    let years = cfg.sim.num_days / (scheduler::DAYS_PER_MONTH * scheduler::MONTHS_PER_YEAR);
    let finals = parallel_map(cells.len(), plan.jobs, |i| {
        let (design, run) = cells[i];
        let (_, series) = if plan.progress {
            let mut p = YearProgress { label: format!("design {design} run {run}"), years };
            simulate(cfg, design, run, &mut p)?
        } else {
            simulate(cfg, design, run, &mut NullRecorder)?
        };
        write_run(&dir, design, run, &series)?;
        final_state(design, &series).ok_or_else(|| Error::Invalid("run shorter than one month".into()))
    })?;
    write_file(&dir.join("summary.csv"), &summary_csv(&stats::summarize(&finals)))?;
    Ok(finals)
}

/// Sensitivity-analysis values for each sweepable parameter.
pub const SWEEP_TABLE: [(&str, [f64; 10]); 8] = [
    ("alpha", [0.1, 0.14, 0.19, 0.23, 0.28, 0.32, 0.37, 0.41, 0.46, 0.5]),
    ("beta", [0.5, 0.55, 0.61, 0.66, 0.72, 0.77, 0.83, 0.88, 0.94, 0.99]),
    ("price_change_quantity", [10.0, 42.0, 74.0, 107.0, 139.0, 171.0, 203.0, 235.0, 268.0, 300.0]),
    ("markup", [0.01, 0.04, 0.06, 0.09, 0.12, 0.14, 0.17, 0.2, 0.22, 0.25]),
    ("labor_market_frequency", [0.1, 0.14, 0.19, 0.23, 0.28, 0.32, 0.37, 0.41, 0.46, 0.5]),
    ("market_size", [1.0, 3.0, 5.0, 7.0, 10.0, 15.0, 30.0, 50.0, 70.0, 110.0]),
    ("housing_entry_share", [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1]),
    ("tax_consumption", [0.01, 0.06, 0.11, 0.16, 0.21, 0.25, 0.3, 0.35, 0.4, 0.45]),
];

/// One parameter varied over its values, everything else fixed, every
/// cell run with the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub param: String,
    pub values: Vec<f64>,
    pub designs: Vec<Design>,
    pub seed: u64,
}

impl SweepPlan {
    /// The standard ten values for `param`.
    pub fn standard(param: &str, designs: Vec<Design>, seed: u64) -> Result<Self> {
        let (_, values) = SWEEP_TABLE
            .iter()
            .find(|(name, _)| *name == param)
            .ok_or_else(|| Error::UnknownSweepParam(param.to_string()))?;
        Ok(SweepPlan { param: param.to_string(), values: values.to_vec(), designs, seed })
    }

    /// Directory label of value row `row`.
    pub fn label(&self, row: usize) -> String {
        format!("{}={}", self.param, fmt_num(self.values[row]))
    }

    /// Base config with row `row` applied.
    pub fn cell_config(&self, base: &Config, row: usize) -> Result<Config> {
        let mut cfg = base.clone();
        cfg.sim.seed = self.seed;
        let wrap = |e: Error| Error::SweepValue { param: self.param.clone(), row: row + 1, source: Box::new(e) };
        cfg.set(&self.param, &fmt_num(self.values[row])).map_err(wrap)?;
        cfg.validate().map_err(wrap)?;
        Ok(cfg)
    }
}

/// Runs one sweep cell. Every cell uses run index 0 of the plan's seed.
pub fn run_sweep_cell(base: &Config, plan: &SweepPlan, row: usize, design: Design) -> Result<Series> {
    let cfg = plan.cell_config(base, row)?;
    Ok(simulate(&cfg, design, 0, &mut NullRecorder)?.1)
}

/// Runs every (value, design) cell into `<out>/<param>=<value>/` and writes
/// `sweep_summary.csv` with the final-month indicators of each cell.
pub fn run_sweep(base: &Config, plan: &SweepPlan, jobs: usize) -> Result<PathBuf> {
    let configs: Vec<Config> = (0..plan.values.len()).map(|row| plan.cell_config(base, row)).collect::<Result<_>>()?;
    let dir = base.sim.output_dir.clone();
    prepare_output_dir(&dir)?;
    let values = plan.values.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(",");
    let extra = [("sweep", format!("{} = {values}", plan.param)), ("seed", plan.seed.to_string())];
    write_file(&dir.join("meta.txt"), &meta_text(&configs[0], &plan.designs, &extra))?;

    let cells: Vec<(usize, Design)> =
        (0..plan.values.len()).flat_map(|row| plan.designs.iter().map(move |&d| (row, d))).collect();
    let finals = parallel_map(cells.len(), jobs, |i| {
        let (row, design) = cells[i];
        let sub = dir.join(plan.label(row));
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        let (_, series) = simulate(&configs[row], design, 0, &mut NullRecorder)?;
        write_run(&sub, design, 0, &series)?;
        final_state(design, &series).ok_or_else(|| Error::Invalid("run shorter than one month".into()))
    })?;

    let mut out = String::from("param,value,design");
    if let Some(f) = finals.first() {
        for (name, _) in f.indicators() {
            out.push(',');
            out.push_str(name);
        }
    }
    out.push('\n');
    for (&(row, design), f) in cells.iter().zip(&finals) {
        let _ = write!(out, "{},{},{}", plan.param, fmt_num(plan.values[row]), design);
        for (_, v) in f.indicators() {
            out.push(',');
            out.push_str(&fmt_num(v));
        }
        out.push('\n');
    }
    write_file(&dir.join("sweep_summary.csv"), &out)?;
    Ok(dir)
}

/// Rebuilds final states from the series and regions files in `dir`.
pub fn load_finals(dir: &Path) -> Result<Vec<FinalState>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut runs: Vec<(Design, usize)> = Vec::new();
    for entry in entries {
        let name = entry.map_err(|e| Error::io(dir, e))?.file_name();
        let Some(stem) = name.to_str().and_then(|n| n.strip_prefix("series_")?.strip_suffix(".csv")) else {
            continue;
        };
        let Some((d, r)) = stem.split_once('_') else { continue };
        let (Ok(d), Ok(r)) = (d.parse::<u32>(), r.parse::<usize>()) else {
            continue;
        };
        runs.push((Design::from_count(d)?, r));
    }
    if runs.is_empty() {
        return Err(Error::Summary(format!("no series files in {}", dir.display())));
    }
    runs.sort_unstable();

    let mut finals = Vec::with_capacity(runs.len());
    for (design, run) in runs {
        let sp = dir.join(format!("series_{design}_{run}.csv"));
        let rp = dir.join(format!("regions_{design}_{run}.csv"));
        let st = fs::read_to_string(&sp).map_err(|e| Error::io(&sp, e))?;
        let rt = fs::read_to_string(&rp).map_err(|e| Error::io(&rp, e))?;
        let series = Series { records: parse_series(&sp, &st)?, regions: parse_regions(&rp, &rt)? };
        finals
            .push(final_state(design, &series).ok_or_else(|| Error::Summary(format!("{} has no rows", sp.display())))?);
    }
    Ok(finals)
}

/// Recomputes `summary.csv` for `dir` from its run files.
pub fn summarize_dir(dir: &Path) -> Result<Vec<SummaryRow>> {
    let rows = stats::summarize(&load_finals(dir)?);
    write_file(&dir.join("summary.csv"), &summary_csv(&rows))?;
    Ok(rows)
}

/// Opens a buffered transactions file.
pub fn transactions_file(path: &Path) -> Result<TransactionLog<BufWriter<fs::File>>> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    TransactionLog::new(BufWriter::new(f)).map_err(|e| Error::io(path, e))
}
