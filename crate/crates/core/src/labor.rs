//! Vacancy board and firm–candidate matching.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{distance_sq, Point};
use crate::world::{Agent, AgentId, FirmId, World};

pub const MIN_WORKING_AGE: u32 = 17;
pub const MAX_WORKING_AGE: u32 = 70;

pub fn is_working_age(agent: &Agent) -> bool {
    (MIN_WORKING_AGE..=MAX_WORKING_AGE).contains(&agent.age)
}

/// Open posts (one per firm) and job seekers for one matching round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchingBoard {
    pub vacancies: Vec<FirmId>,
    pub candidates: Vec<AgentId>,
}

impl MatchingBoard {
    pub fn new(mut vacancies: Vec<FirmId>, candidates: Vec<AgentId>) -> Self {
        vacancies.sort_unstable();
        vacancies.dedup();
        MatchingBoard { vacancies, candidates }
    }
}

/// Unemployed agents of working age, in id order.
pub fn register_candidates(agents: &[Agent]) -> Vec<AgentId> {
    agents.iter().filter(|a| a.employer.is_none() && is_working_age(a)).map(|a| a.id).collect()
}

/// Which criterion a firm applies when picking among candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchPolicy {
    /// Fair coin between qualification and proximity, per hire.
    #[default]
    Random,
    AlwaysQualification,
    AlwaysProximity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hire {
    pub firm: FirmId,
    pub agent: AgentId,
}

struct Seeker {
    id: AgentId,
    qualification: u32,
    home: Point,
}

/// Pairs a uniformly drawn firm with either the most qualified or the
/// closest-living candidate until one side of the board is exhausted.
/// Ties go to the lower agent id.
pub fn run_matching(
    board: MatchingBoard,
    world: &mut World,
    alpha: f64,
    policy: MatchPolicy,
    rng: &mut RngStream,
) -> Result<Vec<Hire>> {
    let mut seekers = Vec::with_capacity(board.candidates.len());
    for &id in &board.candidates {
        let home = world.agent_location(id).ok_or(Error::HomelessCandidate(id.index()))?;
        seekers.push(Seeker { id, qualification: world.agents[id.index()].qualification, home });
    }
    let mut firms = board.vacancies;
    let mut hires = Vec::with_capacity(firms.len().min(seekers.len()));

    while !firms.is_empty() && !seekers.is_empty() {
        let firm_id = firms.swap_remove(rng.below(firms.len()));
        let site = world.firms[firm_id.index()].location;

        let best = most_qualified(&seekers);
        let near = closest(&seekers, site);
        let pick = match policy {
            MatchPolicy::Random => {
                if rng.coin() {
                    best
                } else {
                    near
                }
            }
            MatchPolicy::AlwaysQualification => best,
            MatchPolicy::AlwaysProximity => near,
        };
        let seeker = seekers.swap_remove(pick);
        let agent = &mut world.agents[seeker.id.index()];
        world.firms[firm_id.index()].hire(agent, alpha);
        hires.push(Hire { firm: firm_id, agent: seeker.id });
    }
    Ok(hires)
}

fn most_qualified(seekers: &[Seeker]) -> usize {
    let mut best = 0;
    for (i, s) in seekers.iter().enumerate().skip(1) {
        let b = &seekers[best];
        if s.qualification > b.qualification || (s.qualification == b.qualification && s.id < b.id) {
            best = i;
        }
    }
    best
}

fn closest(seekers: &[Seeker], site: Point) -> usize {
    let mut best = 0;
    let mut best_d = distance_sq(seekers[0].home, site);
    for (i, s) in seekers.iter().enumerate().skip(1) {
        let d = distance_sq(s.home, site);
        if d < best_d || (d == best_d && s.id < seekers[best].id) {
            best = i;
            best_d = d;
        }
    }
    best
}
