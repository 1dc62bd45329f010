//! Transmit-power and bit allocation maximizing the analytic detection
//! probability under an aggregate power budget.
//!
//! The objective is the detection-probability argument
//!
//! ```text
//! beta(p) = (Q^{-1}(P_fa) sqrt(Var{T_f|H0}) - Psi) / sqrt(Var{T_f|H1})
//! ```
//!
//! for the quantized likelihood-derived rule; `P_d = Q(beta)`, so
//! minimizing `beta` maximizes `P_d`. Power enters only through each
//! sensor's bit budget (a nondecreasing step function of its power), so
//! `beta` is piecewise constant on the power simplex and the search is a
//! best-first spatial branch-and-bound over per-sensor bit intervals:
//! a box's lower bound evaluates the best bit vector it permits, its
//! feasible corners supply upper bounds, and branching splits the widest
//! bit interval. Sensors whose channels support no bits are censored and
//! spend no power; if every sensor is censored the objective is the
//! `+inf` sentinel and `P_d` falls back to `p_fa`.
//!
//! An exhaustive grid oracle over the discretized simplex (`M <= 4`)
//! provides independent validation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::analytics::ui_moments;
use crate::error::{Error, Result};
use crate::fusion::optimal_weight;
use crate::model::Scenario;
use crate::quant::{bits_for_power, min_power_for_bits, quant_noise_variance};
use crate::special::{q, q_inv};

/// Default node budget before the search returns its incumbent with a
/// nonzero gap report.
pub const DEFAULT_MAX_NODES: usize = 100_000;

/// Result of an allocation run: powers, bit budgets, and the achieved
/// objective together with the optimality gap evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// Per-sensor transmit powers; censored sensors hold zero.
    pub powers: Vec<f64>,
    /// The aggregate budget the run was given.
    pub budget: f64,
    /// Per-sensor bit budgets implied by `powers` through the channel
    /// capacity.
    pub bits: Vec<u32>,
    /// Achieved objective `beta` (minimized; `+inf` if all censored).
    pub beta: f64,
    /// Achieved detection probability `Q(beta)`, or `p_fa` when no sensor
    /// transmits.
    pub p_d: f64,
    /// Upper bound on `beta - beta_optimal` at termination.
    pub gap: f64,
    pub nodes_explored: usize,
    /// False when the node budget ran out before the gap closed.
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

/// `beta` evaluated for an explicit bit vector.
fn beta_for_bits(scenario: &Scenario, bits: &[u32], qinv_pfa: f64) -> f64 {
    let n = scenario.n_samples;
    let mut e0 = 0.0;
    let mut v0 = 0.0;
    let mut e1 = 0.0;
    let mut v1 = 0.0;
    for (i, &l) in bits.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let site = &scenario.sites[i];
        let qv = quant_noise_variance(scenario.quant_half_range, l);
        let (a, b) = optimal_weight(site.snr(n), site.noise_var, n, qv);
        if a == 0.0 {
            continue;
        }
        let u = ui_moments(site, n, qv, b);
        e0 += a * u.mean_h0;
        e1 += a * u.mean_h1;
        v0 += a * a * u.var_h0;
        v1 += a * a * u.var_h1;
    }
    if !(v0 > 0.0 && v1 > 0.0) {
        return f64::INFINITY;
    }
    (qinv_pfa * v0.sqrt() - (e1 - e0)) / v1.sqrt()
}

/// The allocation objective at a power vector: bit budgets via the
/// channel capacity, quantization noise, quantized optimal weights,
/// fused moments, then `beta`. All-censored allocations return the
/// `+inf` sentinel (reported as `P_d = p_fa`).
pub fn beta_objective(powers: &[f64], scenario: &Scenario, p_fa: f64) -> Result<f64> {
    if powers.len() != scenario.num_sites() {
        return Err(Error::LengthMismatch {
            expected: scenario.num_sites(),
            got: powers.len(),
        });
    }
    if powers.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidParameter(
            "powers must be nonnegative".into(),
        ));
    }
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_fa must lie in (0, 1), got {p_fa}"
        )));
    }
    let bits = bits_from_powers(scenario, powers);
    Ok(beta_for_bits(scenario, &bits, q_inv(p_fa)))
}

fn bits_from_powers(scenario: &Scenario, powers: &[f64]) -> Vec<u32> {
    powers
        .iter()
        .zip(&scenario.sites)
        .map(|(&p, site)| bits_for_power(p, site.channel_gain, site.comm_noise_var))
        .collect()
}

fn min_power(scenario: &Scenario, i: usize, bits: u32) -> f64 {
    let site = &scenario.sites[i];
    min_power_for_bits(bits, site.channel_gain, site.comm_noise_var)
}

fn total_min_power(scenario: &Scenario, bits: &[u32]) -> f64 {
    bits.iter()
        .enumerate()
        .map(|(i, &l)| min_power(scenario, i, l))
        .sum()
}

// ---------------------------------------------------------------------------
// Incumbent bookkeeping
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Incumbent {
    beta: f64,
    bits: Vec<u32>,
    total_power: f64,
}

impl Incumbent {
    /// Preference order: smaller `beta`, then smaller total minimum
    /// power, then lexicographically smaller bit vector (reproducible
    /// ties).
    fn is_improved_by(&self, beta: f64, bits: &[u32], total_power: f64) -> bool {
        match beta.total_cmp(&self.beta) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match total_power.total_cmp(&self.total_power) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => bits < self.bits.as_slice(),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Branch and bound over bit intervals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Node {
    lo: Vec<u32>,
    hi: Vec<u32>,
    lower: f64,
    id: u64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.lower == other.lower && self.id == other.id
    }
}
impl Eq for Node {}
impl Ord for Node {
    // BinaryHeap is a max-heap; invert so the smallest bound pops first,
    // with the node id as a deterministic tie-break.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.id.cmp(&self.id))
    }
}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    scenario: &'a Scenario,
    budget: f64,
    qinv_pfa: f64,
    incumbent: Incumbent,
    nodes_explored: usize,
}

impl<'a> Search<'a> {
    fn beta(&self, bits: &[u32]) -> f64 {
        beta_for_bits(self.scenario, bits, self.qinv_pfa)
    }

    fn offer(&mut self, bits: &[u32]) {
        let beta = self.beta(bits);
        let total = total_min_power(self.scenario, bits);
        if total <= self.budget && self.incumbent.is_improved_by(beta, bits, total) {
            self.incumbent = Incumbent {
                beta,
                bits: bits.to_vec(),
                total_power: total,
            };
        }
    }

    /// Greedy fill: repeatedly take the single-bit upgrade that lowers
    /// `beta` the most while it still fits the budget.
    fn greedy_fill(&mut self, start: &[u32], cap: &[u32]) {
        let mut bits = start.to_vec();
        let mut spent = total_min_power(self.scenario, &bits);
        self.offer(&bits);
        loop {
            let current = self.beta(&bits);
            let mut best: Option<(usize, f64, f64)> = None;
            for i in 0..bits.len() {
                if bits[i] >= cap[i] {
                    continue;
                }
                let cost = min_power(self.scenario, i, bits[i] + 1)
                    - min_power(self.scenario, i, bits[i]);
                if spent + cost > self.budget {
                    continue;
                }
                bits[i] += 1;
                let beta = self.beta(&bits);
                bits[i] -= 1;
                if beta < current && best.is_none_or(|(_, b, _)| beta < b) {
                    best = Some((i, beta, cost));
                }
            }
            match best {
                Some((i, _, cost)) => {
                    bits[i] += 1;
                    spent += cost;
                    self.offer(&bits);
                }
                None => break,
            }
        }
    }

    /// Tighten a box's upper bits: coordinate `i` can use at most the
    /// budget left over when everyone else sits at their box minimum.
    fn refine_hi(&self, lo: &[u32], hi: &mut [u32]) {
        let base: f64 = total_min_power(self.scenario, lo);
        for i in 0..hi.len() {
            let slack = self.budget - (base - min_power(self.scenario, i, lo[i]));
            let site = &self.scenario.sites[i];
            let max_bits = bits_for_power(slack.max(0.0), site.channel_gain, site.comm_noise_var);
            hi[i] = hi[i].min(max_bits).max(lo[i]);
        }
    }
}

/// Globally minimize `beta` over the simplex `{p >= 0, sum p <= budget}`
/// to within `epsilon`, and return the allocation realizing it.
///
/// The returned powers give each sensor the minimum supporting its bits,
/// then spread the remaining budget evenly over transmitting sensors
/// (capped just below each sensor's next bit boundary, so the reported
/// bits stay consistent with the channel capacity). If the node budget
/// runs out first, the incumbent is returned with `converged = false`
/// and the remaining `gap` — never silently.
pub fn branch_and_bound(
    scenario: &Scenario,
    budget: f64,
    p_fa: f64,
    epsilon: f64,
) -> Result<PowerAllocation> {
    if !(budget > 0.0) {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_fa must lie in (0, 1), got {p_fa}"
        )));
    }
    let m = scenario.num_sites();
    let qinv_pfa = q_inv(p_fa);

    // Per-sensor bit cap: what the whole budget could buy that sensor.
    let cap: Vec<u32> = (0..m)
        .map(|i| {
            let site = &scenario.sites[i];
            bits_for_power(budget, site.channel_gain, site.comm_noise_var)
        })
        .collect();

    let mut search = Search {
        scenario,
        budget,
        qinv_pfa,
        incumbent: Incumbent {
            beta: f64::INFINITY,
            bits: vec![0; m],
            total_power: 0.0,
        },
        nodes_explored: 0,
    };

    // Multi-start incumbents: greedy from zero, and from a channel-
    // proportional split of the budget.
    search.offer(&vec![0; m]);
    search.greedy_fill(&vec![0; m], &cap);
    let quality: Vec<f64> = scenario
        .sites
        .iter()
        .map(|s| s.channel_gain * s.channel_gain / s.comm_noise_var)
        .collect();
    let qsum: f64 = quality.iter().sum();
    if qsum > 0.0 {
        let proportional: Vec<u32> = (0..m)
            .map(|i| {
                let site = &scenario.sites[i];
                bits_for_power(
                    budget * quality[i] / qsum,
                    site.channel_gain,
                    site.comm_noise_var,
                )
            })
            .collect();
        search.greedy_fill(&proportional, &cap);
    }

    // Best-first search over bit boxes. A box whose best corner fits the
    // budget is solved outright: by monotonicity that corner attains the
    // box minimum, so it feeds the incumbent and is never branched.
    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    {
        let lo = vec![0u32; m];
        let mut hi = cap.clone();
        search.refine_hi(&lo, &mut hi);
        if total_min_power(scenario, &hi) <= budget {
            search.offer(&hi);
        } else {
            let lower = search.beta(&hi);
            heap.push(Node {
                lo,
                hi,
                lower,
                id: next_id,
            });
        }
    }

    let mut gap = f64::INFINITY;
    let mut converged = false;
    while let Some(node) = heap.pop() {
        search.nodes_explored += 1;
        // Best-first: this bound is the global lower bound.
        gap = match (search.incumbent.beta.is_finite(), node.lower.is_finite()) {
            (true, true) => (search.incumbent.beta - node.lower).max(0.0),
            (true, false) => 0.0,  // remaining boxes are all-censored
            (false, _) => f64::INFINITY,
        };
        if gap <= epsilon {
            converged = true;
            break;
        }
        if search.nodes_explored >= DEFAULT_MAX_NODES {
            break;
        }

        #[cfg(debug_assertions)]
        sandwich_check(&search, &node);

        // Branch on the coordinate with the widest power-cost range; the
        // budget coupling is what keeps boxes unsolved.
        let mut split = 0usize;
        let mut widest = f64::NEG_INFINITY;
        for i in 0..m {
            if node.hi[i] > node.lo[i] {
                let range = min_power(scenario, i, node.hi[i])
                    - min_power(scenario, i, node.lo[i]);
                if range > widest {
                    widest = range;
                    split = i;
                }
            }
        }
        if widest == f64::NEG_INFINITY {
            // degenerate box (cannot occur for unsolved nodes); close out
            search.offer(&node.lo);
            continue;
        }
        let mid = node.lo[split] + (node.hi[split] - node.lo[split]).div_ceil(2);

        // Lower child caps the split coordinate below mid; the upper
        // child raises its floor (and may exceed the budget and die).
        for upper in [false, true] {
            let mut lo = node.lo.clone();
            let mut hi = node.hi.clone();
            if upper {
                lo[split] = mid;
                if total_min_power(scenario, &lo) > budget {
                    continue;
                }
                search.offer(&lo);
            } else {
                hi[split] = mid - 1;
            }
            search.refine_hi(&lo, &mut hi);
            if total_min_power(scenario, &hi) <= budget {
                // best corner affordable: box solved exactly
                search.offer(&hi);
                continue;
            }
            let lower = search.beta(&hi);
            if lower < search.incumbent.beta {
                next_id += 1;
                heap.push(Node {
                    lo,
                    hi,
                    lower,
                    id: next_id,
                });
            }
        }
    }
    if heap.is_empty() && !converged {
        // Exhausted the tree: the incumbent is exact.
        gap = 0.0;
        converged = true;
    }

    let mut incumbent = search.incumbent;
    polish_ties(scenario, qinv_pfa, &mut incumbent);
    Ok(finish_allocation(
        scenario,
        budget,
        p_fa,
        incumbent,
        gap,
        search.nodes_explored,
        converged,
    ))
}

/// Objective-preserving cleanup of the winning bit vector: swap any pair
/// of bit assignments that leaves `beta` unchanged (to 1e-12 relative)
/// while spending less power. For sensors with equal measurement quality
/// this settles exact ties onto the cheaper assignment, i.e. more bits on
/// the better channel.
fn polish_ties(scenario: &Scenario, qinv_pfa: f64, incumbent: &mut Incumbent) {
    if !incumbent.beta.is_finite() {
        return;
    }
    let m = incumbent.bits.len();
    loop {
        let mut improved = false;
        for i in 0..m {
            for j in (i + 1)..m {
                if incumbent.bits[i] == incumbent.bits[j] {
                    continue;
                }
                let mut candidate = incumbent.bits.clone();
                candidate.swap(i, j);
                let total = total_min_power(scenario, &candidate);
                if total >= incumbent.total_power {
                    continue;
                }
                let beta = beta_for_bits(scenario, &candidate, qinv_pfa);
                if (beta - incumbent.beta).abs()
                    <= 1e-12 * incumbent.beta.abs().max(1e-300)
                {
                    incumbent.bits = candidate;
                    incumbent.total_power = total;
                    incumbent.beta = beta;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Runtime check of the bound sandwich on a box: the box's best bit
/// vector must not score worse than its midpoint, nor the midpoint worse
/// than its worst corner.
#[cfg(debug_assertions)]
fn sandwich_check(search: &Search<'_>, node: &Node) {
    let mid: Vec<u32> = node
        .lo
        .iter()
        .zip(&node.hi)
        .map(|(&l, &h)| l + (h - l) / 2)
        .collect();
    let f_lb = search.beta(&node.hi);
    let f_ub = search.beta(&node.lo);
    let f_mid = search.beta(&mid);
    if f_mid.is_finite() {
        debug_assert!(
            f_lb <= f_mid + 1e-9 && f_mid <= f_ub + 1e-9,
            "bound sandwich violated: lb {f_lb} mid {f_mid} ub {f_ub}"
        );
    } else {
        debug_assert!(
            f_ub.is_infinite(),
            "mid censored but ub finite: lb {f_lb} ub {f_ub}"
        );
    }
}

/// Turn the winning bit vector into a reported power vector: minimum
/// power per transmitting sensor, remaining budget spread evenly with
/// per-sensor caps just below the next bit boundary.
fn finish_allocation(
    scenario: &Scenario,
    budget: f64,
    p_fa: f64,
    incumbent: Incumbent,
    gap: f64,
    nodes_explored: usize,
    converged: bool,
) -> PowerAllocation {
    let m = scenario.num_sites();
    let bits = incumbent.bits;
    let mut powers: Vec<f64> = (0..m).map(|i| min_power(scenario, i, bits[i])).collect();

    let caps: Vec<f64> = (0..m)
        .map(|i| {
            if bits[i] == 0 {
                0.0
            } else {
                let site = &scenario.sites[i];
                let h2 = site.channel_gain * site.channel_gain;
                site.comm_noise_var * (4f64.powi(bits[i] as i32 + 1) - 1.0) / h2 * (1.0 - 1e-9)
            }
        })
        .collect();
    let mut leftover = budget - powers.iter().sum::<f64>();
    for _ in 0..=m {
        if leftover <= 1e-12 {
            break;
        }
        let open: Vec<usize> = (0..m)
            .filter(|&i| bits[i] >= 1 && powers[i] < caps[i])
            .collect();
        if open.is_empty() {
            break;
        }
        let share = leftover / open.len() as f64;
        for &i in &open {
            let add = share.min(caps[i] - powers[i]);
            powers[i] += add;
            leftover -= add;
        }
    }

    let final_bits = bits_from_powers(scenario, &powers);
    debug_assert_eq!(final_bits, bits, "leftover spread crossed a bit boundary");
    let beta = incumbent.beta;
    let p_d = if beta.is_finite() { q(beta) } else { p_fa };
    PowerAllocation {
        powers,
        budget,
        bits: final_bits,
        beta,
        p_d,
        gap,
        nodes_explored,
        converged,
    }
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

/// Brute-force minimization of `beta` over the discretized simplex:
/// every combination of `k * budget / grid_steps` per axis with the
/// budget respected. Validation only; cost grows as `grid_steps^M`, so
/// `M <= 4` is enforced.
pub fn exhaustive_grid_oracle(
    scenario: &Scenario,
    budget: f64,
    p_fa: f64,
    grid_steps: usize,
) -> Result<PowerAllocation> {
    let axis: Vec<f64> = (0..=grid_steps)
        .map(|k| budget * k as f64 / grid_steps as f64)
        .collect();
    let axes = vec![axis; scenario.num_sites()];
    exhaustive_oracle_with_candidates(scenario, budget, p_fa, &axes)
}

/// Brute force over explicit per-axis candidate power lists (used to
/// augment the uniform grid with exact bit boundaries when quantifying
/// grid resolution error).
pub fn exhaustive_oracle_with_candidates(
    scenario: &Scenario,
    budget: f64,
    p_fa: f64,
    axes: &[Vec<f64>],
) -> Result<PowerAllocation> {
    let m = scenario.num_sites();
    if m > 4 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive oracle supports at most 4 sensors, got {m}"
        )));
    }
    if axes.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: axes.len(),
        });
    }
    if !(budget > 0.0) {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_fa must lie in (0, 1), got {p_fa}"
        )));
    }
    let mut sweep = GridSweep {
        scenario,
        axes,
        budget,
        qinv_pfa: q_inv(p_fa),
        powers: vec![0.0; m],
        evaluated: 0,
        best_beta: f64::INFINITY,
        best_powers: vec![0.0; m],
        best_total: 0.0,
    };
    sweep.recurse(0, 0.0);

    let bits = bits_from_powers(scenario, &sweep.best_powers);
    let p_d = if sweep.best_beta.is_finite() {
        q(sweep.best_beta)
    } else {
        p_fa
    };
    Ok(PowerAllocation {
        powers: sweep.best_powers,
        budget,
        bits,
        beta: sweep.best_beta,
        p_d,
        gap: 0.0,
        nodes_explored: sweep.evaluated,
        converged: true,
    })
}

/// Depth-first product of the candidate axes with budget pruning.
struct GridSweep<'a> {
    scenario: &'a Scenario,
    axes: &'a [Vec<f64>],
    budget: f64,
    qinv_pfa: f64,
    powers: Vec<f64>,
    evaluated: usize,
    best_beta: f64,
    best_powers: Vec<f64>,
    best_total: f64,
}

impl GridSweep<'_> {
    fn recurse(&mut self, depth: usize, spent: f64) {
        if depth == self.axes.len() {
            self.evaluated += 1;
            let bits = bits_from_powers(self.scenario, &self.powers);
            let beta = beta_for_bits(self.scenario, &bits, self.qinv_pfa);
            let better = match beta.total_cmp(&self.best_beta) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => match spent.total_cmp(&self.best_total) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => self.powers < self.best_powers,
                },
            };
            if better {
                self.best_beta = beta;
                self.best_powers = self.powers.clone();
                self.best_total = spent;
            }
            return;
        }
        for k in 0..self.axes[depth].len() {
            let p = self.axes[depth][k];
            if spent + p > self.budget * (1.0 + 1e-12) {
                break;
            }
            self.powers[depth] = p;
            self.recurse(depth + 1, spent + p);
        }
        self.powers[depth] = 0.0;
    }
}
