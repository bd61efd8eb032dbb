//! Household consumption: fund equalisation, budget draw, firm choice and
//! taxed sales.

use crate::rng::RngStream;
use crate::space::{distance_sq, Point};
use crate::world::{Agent, AgentId, Family, Firm, FirmId, Region};

/// Splits the family's cash evenly across its members.
pub fn equalize_family_funds(family: &Family, agents: &mut [Agent]) {
    if family.members.is_empty() {
        return;
    }
    let total: f64 = family.members.iter().map(|a| agents[a.index()].cash).sum();
    let share = total / family.members.len() as f64;
    for a in &family.members {
        agents[a.index()].cash = share;
    }
}

/// Amount an agent sets aside for consumption this month.
pub fn draw_consumption_budget(cash: f64, beta: f64, rng: &mut RngStream) -> f64 {
    if cash <= 0.0 {
        0.0
    } else if cash < 1.0 {
        rng.uniform() * cash
    } else {
        rng.uniform() * cash.powf(beta)
    }
}

/// Reusable index buffer for drawing the firms a consumer inspects.
#[derive(Debug, Clone, Default)]
pub struct FirmSampler {
    pool: Vec<usize>,
}

impl FirmSampler {
    /// Draws `min(market_size, firms)` firms, then returns either the
    /// cheapest or the closest of them by a fair coin. Ties go to the
    /// lower firm id.
    pub fn choose(&mut self, home: Point, firms: &[Firm], market_size: usize, rng: &mut RngStream) -> FirmId {
        assert!(!firms.is_empty(), "no firms to choose from");
        let n = firms.len();
        self.pool.clear();
        self.pool.extend(0..n);
        let k = market_size.clamp(1, n);
        rng.partial_shuffle(&mut self.pool, k);
        let sample = &self.pool[..k];

        let mut cheapest = sample[0];
        let mut closest = sample[0];
        let mut closest_d = distance_sq(home, firms[closest].location);
        for &f in &sample[1..] {
            let p = firms[f].price;
            let cp = firms[cheapest].price;
            if p < cp || (p == cp && f < cheapest) {
                cheapest = f;
            }
            let d = distance_sq(home, firms[f].location);
            if d < closest_d || (d == closest_d && f < closest) {
                closest = f;
                closest_d = d;
            }
        }
        FirmId(if rng.coin() { cheapest } else { closest })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaleReceipt {
    pub buyer: AgentId,
    pub firm: FirmId,
    pub region: usize,
    pub gross_value: f64,
    pub tax: f64,
    pub net_to_firm: f64,
    pub quantity: f64,
    pub change_returned: f64,
    /// Observed fall in the buyer's cash.
    pub buyer_debit: f64,
    /// Observed rise in the firm balance.
    pub firm_credit: f64,
    /// Observed rise in the region's treasury.
    pub treasury_credit: f64,
}

impl SaleReceipt {
    pub fn is_empty(&self) -> bool {
        self.quantity == 0.0
    }
}

/// Sells up to `budget` worth of the firm's product to `buyer`. The firm
/// keeps the net value, the firm's region collects `tax_rate` of the gross.
pub fn execute_sale(
    buyer: &mut Agent,
    firm: &mut Firm,
    region: &mut Region,
    budget: f64,
    tax_rate: f64,
) -> SaleReceipt {
    let mut receipt = SaleReceipt {
        buyer: buyer.id,
        firm: firm.id,
        region: firm.region,
        gross_value: 0.0,
        tax: 0.0,
        net_to_firm: 0.0,
        quantity: 0.0,
        change_returned: budget.max(0.0),
        buyer_debit: 0.0,
        firm_credit: 0.0,
        treasury_credit: 0.0,
    };
    if budget <= 0.0 || firm.inventory <= 0.0 {
        return receipt;
    }
    let desired = budget / firm.price;
    let quantity = desired.min(firm.inventory);
    let gross = (quantity * firm.price).min(budget);
    let tax = tax_rate * gross;
    let net = gross - tax;

    let (cash0, balance0, treasury0) = (buyer.cash, firm.balance, region.treasury);
    firm.inventory -= quantity;
    firm.balance += net;
    firm.cumulative_sold_value += gross;
    region.treasury += tax;
    region.tax_collected_month += tax;
    buyer.cash -= gross;
    buyer.utility += gross;

    receipt.gross_value = gross;
    receipt.tax = tax;
    receipt.net_to_firm = net;
    receipt.quantity = quantity;
    receipt.change_returned = budget - gross;
    receipt.buyer_debit = cash0 - buyer.cash;
    receipt.firm_credit = firm.balance - balance0;
    receipt.treasury_credit = region.treasury - treasury0;
    receipt
}
