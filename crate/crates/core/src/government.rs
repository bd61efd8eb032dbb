//! Regional treasuries and the quality-of-life index.

use crate::error::{Error, Result};
use crate::world::{Dwelling, Family, Region};

/// Converts the treasury into QLI at the per-capita rate. An empty region
/// keeps its treasury for a later month.
pub fn update_qli(region: &mut Region) -> Result<f64> {
    if region.treasury < 0.0 {
        return Err(Error::NegativeTreasury { region: region.id(), treasury: region.treasury });
    }
    region.prev_qli = region.qli;
    if region.population > 0 {
        region.qli += region.treasury / region.population as f64;
        region.treasury = 0.0;
    }
    Ok(region.qli)
}

/// Residents of `region`: members of families living in it.
pub fn refresh_population(region: &mut Region, families: &[Family], dwellings: &[Dwelling]) -> usize {
    let id = region.id();
    region.population = families
        .iter()
        .filter(|f| f.dwelling.is_some_and(|d| dwellings[d.index()].region == id))
        .map(|f| f.members.len())
        .sum();
    region.population
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::rng::RngStream;
    use crate::space::{Design, Partition};
    use crate::world::{DwellingId, World};

    fn region(qli: f64, treasury: f64, population: usize) -> Region {
        Region {
            geometry: Partition::build(Design::One).regions[0],
            qli,
            prev_qli: qli,
            treasury,
            tax_collected_month: 0.0,
            population,
        }
    }

    #[test]
    fn per_capita_increment() {
        let mut r = region(1.0, 50.0, 100);
        assert_eq!(update_qli(&mut r).unwrap(), 1.5);
        assert_eq!(r.treasury, 0.0);
        assert_eq!(r.prev_qli, 1.0);
    }

    #[test]
    fn empty_treasury_leaves_qli() {
        let mut r = region(2.0, 0.0, 100);
        assert_eq!(update_qli(&mut r).unwrap(), 2.0);
    }

    #[test]
    fn empty_region_carries_treasury() {
        let mut r = region(1.0, 10.0, 0);
        assert_eq!(update_qli(&mut r).unwrap(), 1.0);
        assert_eq!(r.treasury, 10.0);
        r.population = 5;
        assert_eq!(update_qli(&mut r).unwrap(), 3.0);
    }

    #[test]
    fn negative_treasury_rejected() {
        let mut r = region(1.0, -1.0, 10);
        assert!(update_qli(&mut r).is_err());
    }

    #[test]
    fn populations_partition_agents() {
        for design in Design::ALL {
            let mut cfg = Config::default();
            cfg.sim.num_regions = design;
            let mut w = World::generate(&cfg, &mut RngStream::from_seed(3)).unwrap();
            let mut total = 0;
            for i in 0..w.regions.len() {
                total += refresh_population(&mut w.regions[i], &w.families, &w.dwellings);
            }
            assert_eq!(total, 1_000);
            if design == Design::One {
                assert_eq!(w.regions[0].population, 1_000);
            }
        }
    }

    #[test]
    fn move_shifts_population() {
        let mut cfg = Config::default();
        cfg.sim.num_regions = Design::Four;
        let mut w = World::generate(&cfg, &mut RngStream::from_seed(8)).unwrap();
        // A family of three and a vacancy in another region.
        let fam = w.families.iter().position(|f| f.members.len() == 3).unwrap();
        let from = w.dwellings[w.families[fam].dwelling.unwrap().index()].region;
        let target = w.dwellings.iter().find(|d| d.occupant.is_none() && d.region != from).map(|d| d.id).unwrap();
        let to = w.dwellings[target.index()].region;
        let before: Vec<usize> = w.regions.iter().map(|r| r.population).collect();

        let old: DwellingId = w.families[fam].dwelling.unwrap();
        w.dwellings[old.index()].occupant = None;
        w.dwellings[target.index()].occupant = Some(w.families[fam].id);
        w.families[fam].dwelling = Some(target);
        for i in 0..w.regions.len() {
            refresh_population(&mut w.regions[i], &w.families, &w.dwellings);
        }
        assert_eq!(w.regions[from].population, before[from] - 3);
        assert_eq!(w.regions[to].population, before[to] + 3);
    }
}
