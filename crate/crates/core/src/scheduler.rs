//! Calendar and the fixed order of events within a run.
//!
//! A month has 21 days, a quarter three months, a year twelve. Firms
//! produce every day; everything else happens at month end in this order:
//! wages, consumption (with tax), QLI, profits, prices, hire/fire
//! decisions, matching, housing, statistics.

use crate::config::Config;
use crate::error::Result;
use crate::firm::{self, LaborAction, WageRound};
use crate::goods::{self, FirmSampler, SaleReceipt};
use crate::government;
use crate::housing::{self, Move};
use crate::labor::{self, Hire, MatchPolicy, MatchingBoard};
use crate::rng::RngStream;
use crate::stats::{self, RegionRecord, RunRecord};
use crate::world::{FirmId, World};

pub const DAYS_PER_MONTH: u32 = 21;
pub const MONTHS_PER_QUARTER: u32 = 3;
pub const MONTHS_PER_YEAR: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Clock {
    pub day: u32,
}

impl Clock {
    /// Completed months at the end of the current day.
    pub fn months_completed(&self) -> u32 {
        (self.day + 1) / DAYS_PER_MONTH
    }

    pub fn is_month_end(&self) -> bool {
        (self.day + 1).is_multiple_of(DAYS_PER_MONTH)
    }

    pub fn is_quarter_end(&self) -> bool {
        self.is_month_end() && self.months_completed().is_multiple_of(MONTHS_PER_QUARTER)
    }

    pub fn is_year_end(&self) -> bool {
        self.is_month_end() && self.months_completed().is_multiple_of(MONTHS_PER_YEAR)
    }

    pub fn quarter(&self) -> u32 {
        self.day / (DAYS_PER_MONTH * MONTHS_PER_QUARTER)
    }

    pub fn year(&self) -> u32 {
        self.day / (DAYS_PER_MONTH * MONTHS_PER_YEAR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Initial vacancies, hiring and first production.
    DayZero,
    Wages,
    Consumption,
    Qli,
    Profits,
    Prices,
    LaborDecisions,
    Matching,
    Housing,
    Stats,
}

impl Phase {
    pub const MONTHLY: [Phase; 9] = [
        Phase::Wages,
        Phase::Consumption,
        Phase::Qli,
        Phase::Profits,
        Phase::Prices,
        Phase::LaborDecisions,
        Phase::Matching,
        Phase::Housing,
        Phase::Stats,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Phase::DayZero => "day0",
            Phase::Wages => "wages",
            Phase::Consumption => "consumption",
            Phase::Qli => "qli",
            Phase::Profits => "profits",
            Phase::Prices => "prices",
            Phase::LaborDecisions => "labor-decisions",
            Phase::Matching => "matching",
            Phase::Housing => "housing",
            Phase::Stats => "stats",
        }
    }
}

/// Observation hooks. Every method defaults to doing nothing.
pub trait Recorder {
    fn phase_end(&mut self, _phase: Phase, _clock: Clock, _world: &World) {}
    fn wage_round(&mut self, _firm: FirmId, _round: &WageRound) {}
    fn sale(&mut self, _receipt: &SaleReceipt) {}
    fn labor_action(&mut self, _firm: FirmId, _action: LaborAction) {}
    fn hires(&mut self, _hires: &[Hire]) {}
    fn moves(&mut self, _moves: &[Move]) {}
    fn month(&mut self, _record: &RunRecord, _regions: &[RegionRecord]) {}
    fn year(&mut self, _year: u32) {}
}

pub struct NullRecorder;

impl Recorder for NullRecorder {}

/// Monthly records of a finished run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Series {
    pub records: Vec<RunRecord>,
    pub regions: Vec<RegionRecord>,
}

pub struct Simulation {
    pub cfg: Config,
    pub world: World,
    pub rng: RngStream,
    pub clock: Clock,
    pub run_id: usize,
    pub match_policy: MatchPolicy,
    gdp_month: f64,
    gdp_cumulative: f64,
    sampler: FirmSampler,
}

impl Simulation {
    /// Generates and allocates a fresh world from `rng`.
    pub fn new(cfg: Config, mut rng: RngStream, run_id: usize) -> Result<Self> {
        let world = World::generate(&cfg, &mut rng)?;
        Ok(Self::from_world(cfg, world, rng, run_id))
    }

    pub fn from_world(cfg: Config, world: World, rng: RngStream, run_id: usize) -> Self {
        Simulation {
            cfg,
            world,
            rng,
            clock: Clock::default(),
            run_id,
            match_policy: MatchPolicy::Random,
            gdp_month: 0.0,
            gdp_cumulative: 0.0,
            sampler: FirmSampler::default(),
        }
    }

    /// Runs all `num_days` days and returns the monthly series.
    pub fn run(&mut self, recorder: &mut dyn Recorder) -> Result<Series> {
        let mut series = Series::default();
        for day in 0..self.cfg.sim.num_days {
            self.clock = Clock { day };
            if day == 0 {
                self.day_zero(recorder)?;
            } else {
                self.produce();
            }
            if self.clock.is_month_end() {
                let (record, regions) = self.month_end(recorder)?;
                series.records.push(record);
                series.regions.extend(regions);
                if self.clock.is_year_end() {
                    recorder.year(self.clock.months_completed() / MONTHS_PER_YEAR);
                }
            }
        }
        Ok(series)
    }

    fn produce(&mut self) {
        for f in &mut self.world.firms {
            firm::produce_daily(f);
        }
    }

    fn day_zero(&mut self, recorder: &mut dyn Recorder) -> Result<()> {
        let vacancies = self.world.firms.iter().map(|f| f.id).collect();
        self.matching(vacancies, recorder)?;
        self.produce();
        self.world.refresh_population();
        recorder.phase_end(Phase::DayZero, self.clock, &self.world);
        Ok(())
    }

    fn matching(&mut self, vacancies: Vec<FirmId>, recorder: &mut dyn Recorder) -> Result<()> {
        let candidates = labor::register_candidates(&self.world.agents);
        let board = MatchingBoard::new(vacancies, candidates);
        let hires =
            labor::run_matching(board, &mut self.world, self.cfg.model.alpha, self.match_policy, &mut self.rng)?;
        recorder.hires(&hires);
        Ok(())
    }

    fn month_end(&mut self, recorder: &mut dyn Recorder) -> Result<(RunRecord, Vec<RegionRecord>)> {
        let m = self.cfg.model.clone();
        let clock = self.clock;

        for f in &mut self.world.firms {
            let round = firm::pay_wages(f, &mut self.world.agents, m.wage_base, m.alpha);
            recorder.wage_round(f.id, &round);
        }
        recorder.phase_end(Phase::Wages, clock, &self.world);

        self.consumption(recorder);
        recorder.phase_end(Phase::Consumption, clock, &self.world);

        for r in &mut self.world.regions {
            government::update_qli(r)?;
        }
        recorder.phase_end(Phase::Qli, clock, &self.world);

        let quarter_end = clock.is_quarter_end();
        for f in &mut self.world.firms {
            firm::update_profit(f, quarter_end);
        }
        recorder.phase_end(Phase::Profits, clock, &self.world);

        for f in &mut self.world.firms {
            firm::update_price(f, m.price_change_quantity, m.markup);
        }
        recorder.phase_end(Phase::Prices, clock, &self.world);

        let mut vacancies = Vec::new();
        for f in &mut self.world.firms {
            let action =
                firm::labor_decision(f, &mut self.world.agents, m.labor_market_frequency, m.alpha, &mut self.rng);
            if action == LaborAction::PostVacancy {
                vacancies.push(f.id);
            }
            recorder.labor_action(f.id, action);
        }
        recorder.phase_end(Phase::LaborDecisions, clock, &self.world);

        self.matching(vacancies, recorder)?;
        recorder.phase_end(Phase::Matching, clock, &self.world);

        let moves = housing::run_housing_market(&mut self.world, m.housing_entry_share, &mut self.rng)?;
        self.world.refresh_population();
        recorder.moves(&moves);
        recorder.phase_end(Phase::Housing, clock, &self.world);

        let snap = stats::snapshot(
            &self.world,
            self.run_id,
            clock.months_completed() as usize,
            self.gdp_month,
            self.gdp_cumulative,
        );
        recorder.month(&snap.0, &snap.1);
        recorder.phase_end(Phase::Stats, clock, &self.world);
        Ok(snap)
    }

    fn consumption(&mut self, recorder: &mut dyn Recorder) {
        let m = &self.cfg.model;
        let w = &mut self.world;
        for r in &mut w.regions {
            r.tax_collected_month = 0.0;
        }
        for fam in &w.families {
            goods::equalize_family_funds(fam, &mut w.agents);
        }
        self.gdp_month = 0.0;
        for i in 0..w.agents.len() {
            let cash = w.agents[i].cash;
            if cash <= 0.0 {
                continue;
            }
            let budget = goods::draw_consumption_budget(cash, m.beta, &mut self.rng);
            let fam = w.agents[i].family;
            let Some(home) = w.families[fam.index()].dwelling.map(|d| w.dwellings[d.index()].location) else {
                continue;
            };
            let chosen = self.sampler.choose(home, &w.firms, m.market_size, &mut self.rng);
            let f = &mut w.firms[chosen.index()];
            let region = &mut w.regions[f.region];
            let receipt = goods::execute_sale(&mut w.agents[i], f, region, budget, m.tax_consumption);
            self.gdp_month += receipt.gross_value;
            recorder.sale(&receipt);
        }
        self.gdp_cumulative += self.gdp_month;
    }
}

/// Generates a world from `rng` and runs it to completion.
pub fn run_simulation(
    cfg: &Config,
    rng: RngStream,
    run_id: usize,
    recorder: &mut dyn Recorder,
) -> Result<(World, Series)> {
    let mut sim = Simulation::new(cfg.clone(), rng, run_id)?;
    let series = sim.run(recorder)?;
    Ok((sim.world, series))
}
