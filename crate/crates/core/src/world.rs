//! Entities of the economy and the initial population.

use crate::config::{Config, InitRanges};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::space::{Partition, Point, RegionGeometry};

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

id_type!(AgentId);
id_type!(FamilyId);
id_type!(DwellingId);
id_type!(FirmId);

pub const INITIAL_QLI: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub age: u32,
    /// Years of schooling, at least 1.
    pub qualification: u32,
    pub cash: f64,
    /// Cumulative value consumed.
    pub utility: f64,
    pub family: FamilyId,
    pub employer: Option<FirmId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub id: FamilyId,
    pub members: Vec<AgentId>,
    pub dwelling: Option<DwellingId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dwelling {
    pub id: DwellingId,
    pub location: Point,
    /// Square meters, fixed.
    pub size: f64,
    pub base_sqm_value: f64,
    pub price: f64,
    pub quality: f64,
    pub region: usize,
    pub occupant: Option<FamilyId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Firm {
    pub id: FirmId,
    pub location: Point,
    pub region: usize,
    pub balance: f64,
    pub price: f64,
    pub inventory: f64,
    /// Employees in hiring order.
    pub employees: Vec<AgentId>,
    pub quarterly_ref_balance: f64,
    pub last_profit: f64,
    pub cumulative_sold_value: f64,
    /// Units produced per day by the current workforce.
    pub daily_output: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub geometry: RegionGeometry,
    pub qli: f64,
    /// Index before the most recent update.
    pub prev_qli: f64,
    /// Taxes awaiting conversion into QLI.
    pub treasury: f64,
    /// Taxes credited during the current month.
    pub tax_collected_month: f64,
    pub population: usize,
}

impl Region {
    pub fn id(&self) -> usize {
        self.geometry.region_id
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub partition: Partition,
    pub agents: Vec<Agent>,
    pub families: Vec<Family>,
    pub dwellings: Vec<Dwelling>,
    pub firms: Vec<Firm>,
    pub regions: Vec<Region>,
}

/// Words drawn by [`World::generate`] for the given sizes.
pub fn generation_draws(agents: usize, families: usize, dwellings: usize, firms: usize) -> u64 {
    (3 * agents + 4 * dwellings + 3 * firms + agents + families) as u64
}

fn random_point(rng: &mut RngStream) -> Point {
    let x = rng.uniform_range(-10.0, 10.0);
    let y = rng.uniform_range(-10.0, 10.0);
    Point::new(x, y)
}

impl World {
    /// Creates every entity and performs both initial allocations.
    pub fn generate(cfg: &Config, rng: &mut RngStream) -> Result<World> {
        cfg.validate()?;
        let partition = Partition::build(cfg.sim.num_regions);
        let init = &cfg.init;

        let mut agents = create_agents(cfg.sim.num_agents, init, rng);
        let mut families: Vec<Family> = (0..cfg.sim.num_families)
            .map(|i| Family { id: FamilyId(i), members: Vec::new(), dwelling: None })
            .collect();
        let mut dwellings = create_dwellings(cfg.sim.num_dwellings, init, &partition, rng)?;
        let firms = create_firms(cfg.sim.num_firms, init, &partition, rng)?;
        let regions = partition
            .regions
            .iter()
            .map(|g| Region {
                geometry: *g,
                qli: INITIAL_QLI,
                prev_qli: INITIAL_QLI,
                treasury: 0.0,
                tax_collected_month: 0.0,
                population: 0,
            })
            .collect();

        allocate_agents_to_families(&mut agents, &mut families, rng)?;
        allocate_families_to_dwellings(&mut families, &mut dwellings, rng)?;

        let mut world = World { partition, agents, families, dwellings, firms, regions };
        world.refresh_population();
        Ok(world)
    }

    pub fn family_cash(&self, family: FamilyId) -> f64 {
        self.families[family.index()].members.iter().map(|a| self.agents[a.index()].cash).sum()
    }

    /// Location of the agent's family dwelling.
    pub fn agent_location(&self, agent: AgentId) -> Option<Point> {
        let fam = self.agents[agent.index()].family;
        self.families[fam.index()].dwelling.map(|d| self.dwellings[d.index()].location)
    }

    /// Recounts residents per region from current family locations.
    pub fn refresh_population(&mut self) {
        for r in &mut self.regions {
            r.population = 0;
        }
        for fam in &self.families {
            if let Some(d) = fam.dwelling {
                let region = self.dwellings[d.index()].region;
                self.regions[region].population += fam.members.len();
            }
        }
    }

    pub fn total_money(&self) -> f64 {
        let agents: f64 = self.agents.iter().map(|a| a.cash).sum();
        let firms: f64 = self.firms.iter().map(|f| f.balance).sum();
        let treasury: f64 = self.regions.iter().map(|r| r.treasury).sum();
        agents + firms + treasury
    }
}

fn create_agents(n: usize, init: &InitRanges, rng: &mut RngStream) -> Vec<Agent> {
    (0..n)
        .map(|i| {
            let age = rng.int_inclusive(init.age_min, init.age_max);
            let qualification = rng.int_inclusive(init.qualification_min, init.qualification_max);
            let cash = rng.uniform_range(init.cash_min, init.cash_max);
            Agent {
                id: AgentId(i),
                age,
                qualification,
                cash,
                utility: 0.0,
                family: FamilyId(usize::MAX),
                employer: None,
            }
        })
        .collect()
}

fn create_dwellings(n: usize, init: &InitRanges, partition: &Partition, rng: &mut RngStream) -> Result<Vec<Dwelling>> {
    (0..n)
        .map(|i| {
            let location = random_point(rng);
            let size = rng.int_inclusive(init.dwelling_size_min, init.dwelling_size_max) as f64;
            let base_sqm_value = rng.uniform_range(init.sqm_value_min, init.sqm_value_max);
            Ok(Dwelling {
                id: DwellingId(i),
                location,
                size,
                base_sqm_value,
                price: size * base_sqm_value,
                quality: size * INITIAL_QLI,
                region: partition.locate(location)?,
                occupant: None,
            })
        })
        .collect()
}

fn create_firms(n: usize, init: &InitRanges, partition: &Partition, rng: &mut RngStream) -> Result<Vec<Firm>> {
    (0..n)
        .map(|i| {
            let location = random_point(rng);
            let balance = rng.uniform_range(init.firm_capital_min, init.firm_capital_max);
            Ok(Firm {
                id: FirmId(i),
                location,
                region: partition.locate(location)?,
                balance,
                price: 1.0,
                inventory: 0.0,
                employees: Vec::new(),
                quarterly_ref_balance: balance,
                last_profit: 0.0,
                cumulative_sold_value: 0.0,
                daily_output: 0.0,
            })
        })
        .collect()
}

/// Links every agent, in id order, to a uniformly drawn family.
pub fn allocate_agents_to_families(agents: &mut [Agent], families: &mut [Family], rng: &mut RngStream) -> Result<()> {
    if families.is_empty() {
        return Err(Error::NoFamilies);
    }
    for agent in agents.iter_mut() {
        let f = rng.below(families.len());
        agent.family = FamilyId(f);
        families[f].members.push(agent.id);
    }
    Ok(())
}

/// Gives each family a distinct vacant dwelling drawn uniformly.
pub fn allocate_families_to_dwellings(
    families: &mut [Family],
    dwellings: &mut [Dwelling],
    rng: &mut RngStream,
) -> Result<()> {
    if dwellings.len() <= families.len() {
        return Err(Error::NotEnoughDwellings { dwellings: dwellings.len(), families: families.len() });
    }
    let mut pool: Vec<usize> = (0..dwellings.len()).filter(|&d| dwellings[d].occupant.is_none()).collect();
    if pool.len() < families.len() {
        return Err(Error::NotEnoughDwellings { dwellings: pool.len(), families: families.len() });
    }
    rng.partial_shuffle(&mut pool, families.len());
    for (fam, &d) in families.iter_mut().zip(&pool) {
        fam.dwelling = Some(DwellingId(d));
        dwellings[d].occupant = Some(fam.id);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Design;
    use std::collections::HashSet;

    fn world(cfg: &Config, seed: u64) -> World {
        World::generate(cfg, &mut RngStream::from_seed(seed)).unwrap()
    }

    #[test]
    fn default_counts() {
        let w = world(&Config::default(), 1);
        assert_eq!(w.agents.len(), 1_000);
        assert_eq!(w.families.len(), 400);
        assert_eq!(w.dwellings.len(), 440);
        assert_eq!(w.firms.len(), 110);
        assert_eq!(w.regions.len(), 1);
        let vacant = w.dwellings.iter().filter(|d| d.occupant.is_none()).count();
        assert_eq!(vacant, 40);
    }

    #[test]
    fn attribute_ranges() {
        let w = world(&Config::default(), 2);
        for a in &w.agents {
            assert!((1..=90).contains(&a.age));
            assert!((1..=21).contains(&a.qualification));
            assert!((0.0..5.0).contains(&a.cash));
        }
        for d in &w.dwellings {
            assert!((20.0..=120.0).contains(&d.size));
            assert!((1.0..2.0).contains(&d.base_sqm_value));
            assert_eq!(d.price, d.size * d.base_sqm_value);
            assert_eq!(d.quality, d.size);
            assert!(d.location.in_square());
        }
        for f in &w.firms {
            assert!((50.0..150.0).contains(&f.balance));
            assert_eq!(f.price, 1.0);
            assert_eq!(f.inventory, 0.0);
        }
    }

    #[test]
    fn region_caches_match_locate() {
        let mut cfg = Config::default();
        cfg.sim.num_regions = Design::Seven;
        let w = world(&cfg, 3);
        for f in &w.firms {
            assert_eq!(f.region, w.partition.locate(f.location).unwrap());
        }
        for d in &w.dwellings {
            assert_eq!(d.region, w.partition.locate(d.location).unwrap());
        }
    }

    #[test]
    fn families_partition_agents() {
        let w = world(&Config::default(), 4);
        let total: usize = w.families.iter().map(|f| f.members.len()).sum();
        assert_eq!(total, 1_000);
        let mean = total as f64 / w.families.len() as f64;
        assert_eq!(mean, 2.5);
        for f in &w.families {
            for a in &f.members {
                assert_eq!(w.agents[a.index()].family, f.id);
            }
        }
        let pop: usize = w.regions.iter().map(|r| r.population).sum();
        assert_eq!(pop, 1_000);
    }

    #[test]
    fn single_agent_single_family() {
        let mut agents = vec![Agent {
            id: AgentId(0),
            age: 30,
            qualification: 5,
            cash: 1.0,
            utility: 0.0,
            family: FamilyId(usize::MAX),
            employer: None,
        }];
        let mut families = vec![Family { id: FamilyId(0), members: vec![], dwelling: None }];
        allocate_agents_to_families(&mut agents, &mut families, &mut RngStream::from_seed(1)).unwrap();
        assert_eq!(families[0].members, vec![AgentId(0)]);
        assert!(allocate_agents_to_families(&mut agents, &mut [], &mut RngStream::from_seed(1)).is_err());
    }

    #[test]
    fn occupancy_is_injective() {
        let w = world(&Config::default(), 5);
        let homes: HashSet<_> = w.families.iter().map(|f| f.dwelling.unwrap()).collect();
        assert_eq!(homes.len(), w.families.len());
        for f in &w.families {
            assert_eq!(w.dwellings[f.dwelling.unwrap().index()].occupant, Some(f.id));
        }
    }

    #[test]
    fn insufficient_dwellings_rejected() {
        let mut fams: Vec<Family> =
            (0..3).map(|i| Family { id: FamilyId(i), members: vec![], dwelling: None }).collect();
        let w = world(&Config::default(), 6);
        let mut dw: Vec<Dwelling> = w.dwellings[..3].to_vec();
        for d in &mut dw {
            d.occupant = None;
        }
        let err = allocate_families_to_dwellings(&mut fams, &mut dw, &mut RngStream::from_seed(1));
        assert!(err.is_err());
    }

    #[test]
    fn generation_is_deterministic_and_counts_draws() {
        let cfg = Config::default();
        let mut r1 = RngStream::from_seed(42);
        let a = World::generate(&cfg, &mut r1).unwrap();
        let b = world(&cfg, 42);
        assert_eq!(a, b);
        assert_eq!(r1.draws(), generation_draws(1_000, 400, 440, 110));
    }
}
