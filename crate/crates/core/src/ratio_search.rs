//! Best-ratio `k`-thin component by binary search on `rho`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::component_dp::{slack_max, SlackMax};
use crate::error::SolveError;
use crate::instance::{drop_set, LinkCatalog, LinkId};
use crate::rational::{self, Rational};

/// A component with its ratio `w(C) / w(Drop_U(C))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioResult {
    #[serde(with = "rational::serde_str")]
    pub rho: Rational,
    pub component: Vec<LinkId>,
    pub drop: Vec<LinkId>,
    pub component_weight: u64,
    pub drop_weight: u64,
}

impl RatioResult {
    /// Evaluates a nonempty component that drops something.
    pub fn new(catalog: &LinkCatalog<'_>, uplinks: &[LinkId], mut component: Vec<LinkId>) -> Self {
        component.sort_unstable();
        let drop = drop_set(catalog, uplinks, &component);
        let component_weight = catalog.weight_of(&component);
        let drop_weight = catalog.weight_of(&drop);
        assert!(drop_weight > 0, "component drops nothing");
        RatioResult {
            rho: Rational::new(component_weight as i128, drop_weight as i128),
            component,
            drop,
            component_weight,
            drop_weight,
        }
    }
}

/// Outcome of comparing `rho` against the optimal ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// `rho >= rho*`, witnessed by a nonempty component of ratio `<= rho`.
    AtLeast(Vec<LinkId>),
    Below,
}

pub fn decide(catalog: &LinkCatalog<'_>, uplinks: &[LinkId], k: usize, rho: Rational, search: &[LinkId]) -> Decision {
    let SlackMax { component, slack } = slack_max(catalog, uplinks, k, rho, search);
    if !component.is_empty() && slack >= Rational::zero() {
        Decision::AtLeast(component)
    } else {
        Decision::Below
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Probe {
    #[serde(with = "rational::serde_str")]
    pub rho: Rational,
    pub at_least: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct SearchTrace {
    /// Every `rho` handed to the slack maximizer, in order.
    pub probes: Vec<Probe>,
    /// Bisection steps (the opening probes at the upper end excluded).
    pub iterations: usize,
}

/// Minimizer of `w(C) / w(Drop_U(C))` over nonempty `k`-thin `C ⊆ search`.
///
/// Bisects `[a, b]` until `b - a < 1 / w(U)^2`; by integrality the witness
/// held at `b` then has ratio exactly `rho*`. After each successful probe the
/// upper end moves to the witness's own ratio, which is never above the
/// midpoint.
pub fn best_ratio_component(
    catalog: &LinkCatalog<'_>,
    uplinks: &[LinkId],
    k: usize,
    search: &[LinkId],
) -> Result<(RatioResult, SearchTrace), SolveError> {
    if uplinks.is_empty() {
        return Err(SolveError::EmptyU);
    }
    let wu = catalog.weight_of(uplinks) as i128;
    let precision = Rational::new(1, wu * wu);
    let mut trace = SearchTrace::default();

    let probe = |rho: Rational, trace: &mut SearchTrace| {
        let d = decide(catalog, uplinks, k, rho, search);
        trace.probes.push(Probe {
            rho,
            at_least: matches!(d, Decision::AtLeast(_)),
        });
        d
    };

    // upper end: 1 suffices whenever a single up-link is in the alphabet
    let mut a = Rational::zero();
    let mut b = Rational::one();
    let mut witness = loop {
        match probe(b, &mut trace) {
            Decision::AtLeast(c) => break RatioResult::new(catalog, uplinks, c),
            Decision::Below => {
                a = b;
                b *= Rational::from_integer(2);
                if b > Rational::from_integer(wu.max(1) * catalog.weight_of(search).max(1) as i128) {
                    return Err(SolveError::NoComponent);
                }
            }
        }
    };
    b = witness.rho;

    while b - a >= precision {
        let mid = (a + b) / Rational::from_integer(2);
        trace.iterations += 1;
        match probe(mid, &mut trace) {
            Decision::AtLeast(c) => {
                witness = RatioResult::new(catalog, uplinks, c);
                debug_assert!(witness.rho <= mid);
                b = witness.rho;
            }
            Decision::Below => a = mid,
        }
    }
    Ok((witness, trace))
}

/// Upper bound on bisection steps for a given `w(U)`.
pub fn iteration_bound(uplink_weight: u64) -> usize {
    let sq = (uplink_weight as u128) * (uplink_weight as u128);
    // ceil(log2(sq)) + 1
    let ceil_log = if sq <= 1 { 0 } else { 128 - (sq - 1).leading_zeros() as usize };
    ceil_log + 1
}
