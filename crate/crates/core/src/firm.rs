//! Production, pricing, wages, profit accounting and the hire/fire rule.

use crate::rng::RngStream;
use crate::world::{Agent, AgentId, Firm};

/// Unit cost price firms revert to when inventory is plentiful.
pub const COST_PRICE: f64 = 1.0;

/// Output of one worker with `qualification` years of schooling.
pub fn worker_output(qualification: u32, alpha: f64) -> f64 {
    (qualification as f64).powf(alpha)
}

/// Monthly wage: `k * E^alpha`.
pub fn wage_of(qualification: u32, wage_base: f64, alpha: f64) -> f64 {
    wage_base * worker_output(qualification, alpha)
}

impl Firm {
    /// Recomputes the daily output of the current workforce.
    pub fn refresh_output(&mut self, agents: &[Agent], alpha: f64) {
        self.daily_output = self.employees.iter().map(|a| worker_output(agents[a.index()].qualification, alpha)).sum();
    }

    pub fn hire(&mut self, agent: &mut Agent, alpha: f64) {
        debug_assert!(agent.employer.is_none());
        agent.employer = Some(self.id);
        self.employees.push(agent.id);
        self.daily_output += worker_output(agent.qualification, alpha);
    }

    /// Releases the employee at `slot`, clearing their employer link.
    pub fn release(&mut self, slot: usize, agents: &mut [Agent], alpha: f64) -> AgentId {
        let id = self.employees.remove(slot);
        agents[id.index()].employer = None;
        self.refresh_output(agents, alpha);
        id
    }
}

/// One day of production. Returns the units added.
pub fn produce_daily(firm: &mut Firm) -> f64 {
    let out = firm.daily_output;
    firm.inventory += out;
    out
}

/// Mark-up when stock is short, cost price when it is long.
pub fn update_price(firm: &mut Firm, threshold: f64, markup: f64) -> f64 {
    if firm.inventory < threshold {
        firm.price *= 1.0 + markup;
    } else if firm.inventory > threshold {
        firm.price = COST_PRICE;
    }
    firm.price
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WageRound {
    /// Observed fall in the firm balance.
    pub debit: f64,
    /// Observed rise in employee cash, summed.
    pub credited: f64,
    pub payments: usize,
}

/// Pays every employee their wage. The balance may go negative.
pub fn pay_wages(firm: &mut Firm, agents: &mut [Agent], wage_base: f64, alpha: f64) -> WageRound {
    let mut bill = 0.0;
    let mut credited = 0.0;
    for a in &firm.employees {
        let agent = &mut agents[a.index()];
        let w = wage_of(agent.qualification, wage_base, alpha);
        let before = agent.cash;
        agent.cash += w;
        credited += agent.cash - before;
        bill += w;
    }
    let before = firm.balance;
    firm.balance -= bill;
    WageRound { debit: before - firm.balance, credited, payments: firm.employees.len() }
}

/// Profit against the last quarterly snapshot; at a quarter end the
/// snapshot moves to the current balance.
pub fn update_profit(firm: &mut Firm, quarter_end: bool) -> f64 {
    firm.last_profit = firm.balance - firm.quarterly_ref_balance;
    if quarter_end {
        firm.quarterly_ref_balance = firm.balance;
    }
    firm.last_profit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaborAction {
    None,
    PostVacancy,
    Fire(AgentId),
}

/// Monthly hire/fire decision. With probability `skip_probability` the
/// firm sits the month out; otherwise it posts one vacancy when profitable
/// or empty, and fires a random employee when losing money.
pub fn labor_decision(
    firm: &mut Firm,
    agents: &mut [Agent],
    skip_probability: f64,
    alpha: f64,
    rng: &mut RngStream,
) -> LaborAction {
    if rng.chance(skip_probability) {
        return LaborAction::None;
    }
    if firm.employees.is_empty() || firm.last_profit > 0.0 {
        LaborAction::PostVacancy
    } else if firm.last_profit < 0.0 {
        let slot = rng.below(firm.employees.len());
        LaborAction::Fire(firm.release(slot, agents, alpha))
    } else {
        LaborAction::None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Point;
    use crate::world::{FamilyId, FirmId};

    pub(crate) fn agent(id: usize, qualification: u32) -> Agent {
        Agent { id: AgentId(id), age: 30, qualification, cash: 0.0, utility: 0.0, family: FamilyId(0), employer: None }
    }

    pub(crate) fn firm() -> Firm {
        Firm {
            id: FirmId(0),
            location: Point::new(0.0, 0.0),
            region: 0,
            balance: 100.0,
            price: 1.0,
            inventory: 0.0,
            employees: vec![],
            quarterly_ref_balance: 100.0,
            last_profit: 0.0,
            cumulative_sold_value: 0.0,
            daily_output: 0.0,
        }
    }

    fn staffed(quals: &[u32], alpha: f64) -> (Firm, Vec<Agent>) {
        let mut agents: Vec<Agent> = quals.iter().enumerate().map(|(i, &q)| agent(i, q)).collect();
        let mut f = firm();
        for a in agents.iter_mut() {
            f.hire(a, alpha);
        }
        (f, agents)
    }

    #[test]
    fn production() {
        let (mut f, _) = staffed(&[16], 0.25);
        assert_eq!(produce_daily(&mut f), 2.0);
        assert_eq!(f.inventory, 2.0);

        let mut empty = firm();
        assert_eq!(produce_daily(&mut empty), 0.0);

        let (mut f, _) = staffed(&[1, 16], 0.25);
        assert_eq!(produce_daily(&mut f), 3.0);
    }

    #[test]
    fn pricing() {
        let mut f = firm();
        f.inventory = 5.0;
        assert!((update_price(&mut f, 10.0, 0.03) - 1.03).abs() < 1e-12);
        assert!((update_price(&mut f, 10.0, 0.03) - 1.0609).abs() < 1e-12);

        f.price = 2.7;
        f.inventory = 500.0;
        assert_eq!(update_price(&mut f, 10.0, 0.03), 1.0);

        f.price = 1.5;
        f.inventory = 10.0;
        assert_eq!(update_price(&mut f, 10.0, 0.03), 1.5);
    }

    #[test]
    fn wages() {
        assert!((wage_of(1, 0.65, 0.25) - 0.65).abs() < 1e-12);
        assert!((wage_of(16, 0.65, 0.25) - 1.30).abs() < 1e-12);
        for e in 1..40 {
            assert!(wage_of(e + 1, 0.65, 0.25) > wage_of(e, 0.65, 0.25));
        }
    }

    #[test]
    fn wage_payment_conserves_money() {
        let (mut f, mut agents) = staffed(&[1, 16], 0.25);
        f.balance = 10.0;
        let round = pay_wages(&mut f, &mut agents, 0.65, 0.25);
        assert!((f.balance - 8.05).abs() < 1e-12);
        assert!((agents[0].cash - 0.65).abs() < 1e-12);
        assert!((agents[1].cash - 1.30).abs() < 1e-12);
        assert!((round.debit - round.credited).abs() < 1e-9);

        f.balance = 0.5;
        pay_wages(&mut f, &mut agents, 0.65, 0.25);
        assert!((f.balance - (-1.45)).abs() < 1e-12);

        let mut empty = firm();
        let r = pay_wages(&mut empty, &mut [], 0.65, 0.25);
        assert_eq!(r.payments, 0);
        assert_eq!(empty.balance, 100.0);
    }

    #[test]
    fn profit_accounting() {
        let mut f = firm();
        f.balance = 130.0;
        assert_eq!(update_profit(&mut f, false), 30.0);
        assert_eq!(f.quarterly_ref_balance, 100.0);
        f.balance = 70.0;
        assert_eq!(update_profit(&mut f, false), -30.0);
        f.balance = 130.0;
        update_profit(&mut f, true);
        assert_eq!(f.quarterly_ref_balance, 130.0);
        assert_eq!(f.last_profit, 30.0);
    }

    #[test]
    fn zero_skip_probability_always_evaluates() {
        let mut rng = RngStream::from_seed(1);
        for _ in 0..200 {
            let mut f = firm();
            assert_eq!(labor_decision(&mut f, &mut [], 0.0, 0.25, &mut rng), LaborAction::PostVacancy);
        }
    }

    #[test]
    fn empty_firm_posts_regardless_of_profit() {
        let mut rng = RngStream::from_seed(2);
        let mut f = firm();
        f.last_profit = -50.0;
        assert_eq!(labor_decision(&mut f, &mut [], 0.0, 0.25, &mut rng), LaborAction::PostVacancy);
    }

    #[test]
    fn losses_fire_one_employee() {
        let mut rng = RngStream::from_seed(3);
        let (mut f, mut agents) = staffed(&[4, 9, 16], 0.25);
        f.last_profit = -5.0;
        let action = labor_decision(&mut f, &mut agents, 0.0, 0.25, &mut rng);
        let LaborAction::Fire(id) = action else { panic!("expected a firing, got {action:?}") };
        assert_eq!(f.employees.len(), 2);
        assert!(!f.employees.contains(&id));
        assert_eq!(agents[id.index()].employer, None);
        let expected: f64 = f.employees.iter().map(|a| worker_output(agents[a.index()].qualification, 0.25)).sum();
        assert!((f.daily_output - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_profit_with_staff_does_nothing() {
        let mut rng = RngStream::from_seed(4);
        let (mut f, mut agents) = staffed(&[4], 0.25);
        f.last_profit = 0.0;
        assert_eq!(labor_decision(&mut f, &mut agents, 0.0, 0.25, &mut rng), LaborAction::None);
    }

    #[test]
    fn firing_is_uniform() {
        let mut counts = [0usize; 3];
        let mut rng = RngStream::from_seed(5);
        for _ in 0..3_000 {
            let (mut f, mut agents) = staffed(&[4, 9, 16], 0.25);
            f.last_profit = -1.0;
            if let LaborAction::Fire(id) = labor_decision(&mut f, &mut agents, 0.0, 0.25, &mut rng) {
                counts[id.index()] += 1;
            }
        }
        for c in counts {
            assert!((850..1150).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn skip_probability_is_respected() {
        let mut rng = RngStream::from_seed(6);
        let skipped = (0..10_000)
            .filter(|_| {
                let mut f = firm();
                labor_decision(&mut f, &mut [], 0.28, 0.25, &mut rng) == LaborAction::None
            })
            .count();
        let share = skipped as f64 / 10_000.0;
        assert!((share - 0.28).abs() < 0.02, "{share}");
    }
}
