//! Dwelling revaluation and the monthly housing round.
//!
//! Families poorer than the median sell down to the cheapest vacancy and
//! pocket the difference; the rest reach for the best-quality vacancy when
//! their current home plus cash covers its price. There is no seller on the
//! other side: vacant stock has no owner, so price differences enter or
//! leave family cash directly.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::median;
use crate::world::{Agent, Dwelling, DwellingId, FamilyId, Region, World};

/// Scales prices by regional QLI growth and recomputes quality.
pub fn update_dwelling_prices(dwellings: &mut [Dwelling], regions: &[Region]) -> Result<()> {
    for r in regions {
        if r.prev_qli <= 0.0 {
            return Err(Error::NonPositiveQli { region: r.id(), qli: r.prev_qli });
        }
    }
    for d in dwellings.iter_mut() {
        let r = &regions[d.region];
        let growth = (r.qli - r.prev_qli) / r.prev_qli;
        d.price *= 1.0 + growth;
        d.quality = d.size * r.qli;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HousingRound {
    /// Families on the market, in processing order.
    pub entrants: Vec<FamilyId>,
    /// Currently vacant dwellings.
    pub vacancies: Vec<DwellingId>,
    /// Median family cash over all families.
    pub median_resources: f64,
}

pub fn open_round(world: &World, share: f64, rng: &mut RngStream) -> HousingRound {
    let ids: Vec<FamilyId> = world.families.iter().map(|f| f.id).collect();
    let entrants = rng.sample_fraction(&ids, share);
    let vacancies = world.dwellings.iter().filter(|d| d.occupant.is_none()).map(|d| d.id).collect();
    let cash: Vec<f64> = world.families.iter().map(|f| world.family_cash(f.id)).collect();
    let median_resources = median(&cash).unwrap_or(0.0);
    HousingRound { entrants, vacancies, median_resources }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub family: FamilyId,
    pub from: DwellingId,
    pub to: DwellingId,
    /// Cash received by the family (negative when it paid).
    pub cash_delta: f64,
}

/// Decides and executes one family's move, if any.
pub fn process_family(world: &mut World, round: &mut HousingRound, family: FamilyId) -> Option<Move> {
    let fam = &world.families[family.index()];
    if fam.members.is_empty() || round.vacancies.is_empty() {
        return None;
    }
    let current = fam.dwelling?;
    let current_price = world.dwellings[current.index()].price;
    let cash = world.family_cash(family);

    let (slot, target_price) = if cash < round.median_resources {
        let slot = pick(&round.vacancies, &world.dwellings, |a, b| a.price < b.price);
        let target_price = world.dwellings[round.vacancies[slot].index()].price;
        if current_price <= target_price {
            return None;
        }
        (slot, target_price)
    } else {
        let slot = pick(&round.vacancies, &world.dwellings, |a, b| a.quality > b.quality);
        let target_price = world.dwellings[round.vacancies[slot].index()].price;
        if current_price + cash <= target_price {
            return None;
        }
        (slot, target_price)
    };

    let target = round.vacancies.swap_remove(slot);
    round.vacancies.push(current);
    world.dwellings[current.index()].occupant = None;
    world.dwellings[target.index()].occupant = Some(family);
    world.families[family.index()].dwelling = Some(target);

    let delta = current_price - target_price;
    let members = &world.families[family.index()].members;
    settle(&mut world.agents, members, cash, delta);
    Some(Move { family, from: current, to: target, cash_delta: delta })
}

/// Credits are shared equally; a debit leaves every member with an equal
/// share of what remains, so nobody goes negative.
fn settle(agents: &mut [Agent], members: &[crate::world::AgentId], family_cash: f64, delta: f64) {
    let n = members.len() as f64;
    if delta >= 0.0 {
        for a in members {
            agents[a.index()].cash += delta / n;
        }
    } else {
        let share = (family_cash + delta) / n;
        for a in members {
            agents[a.index()].cash = share;
        }
    }
}

/// Index of the preferred vacancy; ties go to the lower dwelling id.
fn pick(vacancies: &[DwellingId], dwellings: &[Dwelling], better: impl Fn(&Dwelling, &Dwelling) -> bool) -> usize {
    let mut best = 0;
    for (i, id) in vacancies.iter().enumerate().skip(1) {
        let cand = &dwellings[id.index()];
        let cur = &dwellings[vacancies[best].index()];
        let tie = !better(cand, cur) && !better(cur, cand);
        if better(cand, cur) || (tie && cand.id < cur.id) {
            best = i;
        }
    }
    best
}

/// Revalues dwellings, then lets the sampled families move in order.
pub fn run_housing_market(world: &mut World, share: f64, rng: &mut RngStream) -> Result<Vec<Move>> {
    update_dwelling_prices(&mut world.dwellings, &world.regions)?;
    let mut round = open_round(world, share, rng);
    let entrants = std::mem::take(&mut round.entrants);
    let moves = entrants.iter().filter_map(|&f| process_family(world, &mut round, f)).collect();
    Ok(moves)
}
