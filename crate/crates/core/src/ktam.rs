//! Analytic reliability under the kinetic Tile Assembly Model.
//!
//! Each site is modelled as a small Markov chain: empty (E), holding the
//! correct tile (C), a tile with one mismatching input (A) or two (I). Growth
//! of the neighbourhood freezes C into FC and A, I into FI at rate `r_star`.
//! Only the steady state of the flow with unit inflow into E is computed.

use crate::atam::{assemble, TileSystem};
use crate::error::KineticError;
use crate::pattern::Pattern;

/// Physical constants of the kinetic model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Arrhenius prefactor, /M/s.
    pub a_f: f64,
    /// Activation energy, cal/mol.
    pub e_f: f64,
    /// Gas constant, cal/mol/K.
    pub r_gas: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Seconds.
    pub assembly_time: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            a_f: 5e8,
            e_f: 4000.0,
            r_gas: 2.0,
            temperature: 298.0,
            assembly_time: 3600.0,
        }
    }
}

impl PhysicalParams {
    pub fn with_time(self, assembly_time: f64) -> Self {
        Self {
            assembly_time,
            ..self
        }
    }

    pub fn with_temperature(self, temperature: f64) -> Self {
        Self {
            temperature,
            ..self
        }
    }
}

/// Forward rate constant `A_f * exp(-E_f / (R T))`, in /M/s.
pub fn forward_rate_constant(params: &PhysicalParams) -> f64 {
    params.a_f * (-params.e_f / (params.r_gas * params.temperature)).exp()
}

/// Standard free energy term for `b` bonds, `exp(5b(11 - 4000/T) + 3)`.
///
/// Not used on the reliability path, which works in `G_mc` and `G_se` only.
pub fn standard_free_energy(bonds: u32, temperature: f64) -> f64 {
    (5.0 * bonds as f64 * (11.0 - 4000.0 / temperature) + 3.0).exp()
}

/// Rates of the kinetic model, all per second except `k_f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticModel {
    pub k_f: f64,
    pub k_hat: f64,
    pub g_mc: f64,
    pub g_se: f64,
    /// Attachment rate of a given tile type.
    pub r_f: f64,
    /// Detachment rate of a tile held by `b` bonds, `b` in `0..=4`.
    pub r_rb: [f64; 5],
    /// Net growth rate `r_f - r_rb[2]`.
    pub r_star: f64,
}

impl KineticModel {
    /// Rates for arbitrary `G_mc`, `G_se` and adjusted scale `k_hat`.
    pub fn new(k_f: f64, k_hat: f64, g_mc: f64, g_se: f64) -> Result<Self, KineticError> {
        if g_mc >= 2.0 * g_se {
            return Err(KineticError::NoGrowth { g_mc, g_se });
        }
        let r_f = k_hat * (-g_mc).exp();
        let r_rb = std::array::from_fn(|b| k_hat * (-(b as f64) * g_se).exp());
        Ok(Self {
            k_f,
            k_hat,
            g_mc,
            g_se,
            r_f,
            r_rb,
            r_star: r_f - r_rb[2],
        })
    }

    /// `2 G_se > G_mc > G_se`, where the first-order error estimate holds.
    pub fn in_approximation_regime(&self) -> bool {
        2.0 * self.g_se > self.g_mc && self.g_mc > self.g_se
    }
}

/// Parameters maximising reliability for an `m x n` pattern grown in the
/// given time.
pub fn optimal_params(
    width: usize,
    height: usize,
    params: &PhysicalParams,
) -> Result<KineticModel, KineticError> {
    if !(params.temperature > 0.0 && params.assembly_time > 0.0) {
        return Err(KineticError::NonPositive);
    }
    let k_f = forward_rate_constant(params);
    let k_hat = std::f64::consts::E.powi(3) * k_f;
    let r_star = ((width * width + height * height) as f64).sqrt() / params.assembly_time;
    if 2.0 * r_star >= k_hat {
        return Err(KineticError::TooFast {
            time: params.assembly_time,
            r_star,
            k_hat,
        });
    }
    let g_mc = -(2.0 * r_star / k_hat).ln();
    let g_se = -0.5 * (r_star / k_hat).ln();
    let mut model = KineticModel::new(k_f, k_hat, g_mc, g_se)?;
    // Exact by construction; the float difference r_f - r_rb[2] agrees to
    // rounding.
    model.r_star = r_star;
    Ok(model)
}

/// Growth margin `G_mc + ln(exp(-G_mc) - r_star/k_hat) / 2` at fixed
/// `r_star`; the optimal `G_mc` maximises it.
pub fn delta_g(g_mc: f64, r_star: f64, k_hat: f64) -> f64 {
    g_mc + 0.5 * ((-g_mc).exp() - r_star / k_hat).ln()
}

/// Steady state of the site chain under unit inflow into E.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowState {
    pub empty: f64,
    pub correct: f64,
    pub almost: f64,
    pub incorrect: f64,
    /// Outflow into the frozen-correct state; equals the site's
    /// correctness probability since total outflow is 1.
    pub frozen_correct: f64,
    pub frozen_incorrect: f64,
}

/// Solves the site flow by back substitution: each occupied state is fed
/// only by E, and everything leaving the chain passes through growth.
pub fn flow_steady_state(m1: u32, m2: u32, model: &KineticModel) -> FlowState {
    let [r0, r1, r2, ..] = model.r_rb;
    let rs = model.r_star;
    // Occupancy per unit of p_E.
    let c = model.r_f / (r2 + rs);
    let a = m1 as f64 * model.r_f / (r1 + rs);
    let i = m2 as f64 * model.r_f / (r0 + rs);
    let empty = 1.0 / (rs * (c + a + i));
    FlowState {
        empty,
        correct: c * empty,
        almost: a * empty,
        incorrect: i * empty,
        frozen_correct: rs * c * empty,
        frozen_incorrect: rs * (a + i) * empty,
    }
}

/// Probability that a site freezes with the correct tile.
pub fn site_correct_prob(m1: u32, m2: u32, model: &KineticModel) -> f64 {
    let [r0, r1, r2, ..] = model.r_rb;
    let rs = model.r_star;
    let correct = 1.0 / (rs + r2);
    correct / (correct + m1 as f64 / (rs + r1) + m2 as f64 / (rs + r0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxError {
    pub value: f64,
    /// False when `2 G_se > G_mc > G_se` fails and the estimate is unreliable.
    pub in_regime: bool,
}

/// First-order site error `M1 * exp(-(G_mc - G_se))`.
pub fn approx_site_error(m1: u32, model: &KineticModel) -> ApproxError {
    let in_regime = model.in_approximation_regime();
    if !in_regime {
        log::warn!(
            "approximation regime violated: G_mc = {}, G_se = {}",
            model.g_mc,
            model.g_se
        );
    }
    ApproxError {
        value: m1 as f64 * (-(model.g_mc - model.g_se)).exp(),
        in_regime,
    }
}

/// Per-site mismatch counts, row-major from `(1, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchProfile {
    width: usize,
    height: usize,
    /// `(M1, M2)` per site.
    counts: Vec<(u32, u32)>,
}

impl MismatchProfile {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(M1, M2)` at 1-based `(x, y)`.
    pub fn at(&self, x: usize, y: usize) -> (u32, u32) {
        self.counts[(y - 1) * self.width + (x - 1)]
    }

    /// `((x, y), M1, M2)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u32, u32)> + '_ {
        let w = self.width;
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &(m1, m2))| ((i % w + 1, i / w + 1), m1, m2))
    }
}

/// Counts, for every site, the tile types whose input glues differ from the
/// correct tile's in one or in both positions.
pub fn mismatch_profile(
    system: &TileSystem,
    pattern: &Pattern,
) -> Result<MismatchProfile, KineticError> {
    let (width, height) = (pattern.width(), pattern.height());
    let assembly = assemble(system, width, height)?;
    let mut counts = Vec::with_capacity(width * height);
    for site in assembly.sites() {
        let correct = system.tiles[site.expect("assemble returns complete assemblies")];
        let (mut m1, mut m2) = (0, 0);
        for t in &system.tiles {
            match (t.south != correct.south) as u8 + (t.west != correct.west) as u8 {
                1 => m1 += 1,
                2 => m2 += 1,
                _ => {}
            }
        }
        counts.push((m1, m2));
    }
    Ok(MismatchProfile {
        width,
        height,
        counts,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reliability {
    pub model: KineticModel,
    pub profile: MismatchProfile,
    /// Per-site correctness probabilities, row-major.
    pub site_probs: Vec<f64>,
    pub log_reliability: f64,
    /// `None` when the value is below `1e-300`; use the log instead.
    pub reliability: Option<f64>,
}

/// Lower limit below which the reliability is reported through its log only.
pub const UNDERFLOW_LIMIT: f64 = 1e-300;

/// Probability that every site freezes correctly under the optimal
/// parameters for the pattern size and assembly time.
pub fn reliability(
    system: &TileSystem,
    pattern: &Pattern,
    params: &PhysicalParams,
) -> Result<Reliability, KineticError> {
    let profile = mismatch_profile(system, pattern)?;
    let model = optimal_params(pattern.width(), pattern.height(), params)?;
    Ok(reliability_with(profile, model))
}

/// As [`reliability`], for a fixed model.
pub fn reliability_with(profile: MismatchProfile, model: KineticModel) -> Reliability {
    let site_probs: Vec<f64> = profile
        .counts
        .iter()
        .map(|&(m1, m2)| site_correct_prob(m1, m2, &model))
        .collect();
    let log_reliability: f64 = site_probs.iter().map(|p| p.ln()).sum();
    let value = log_reliability.exp();
    Reliability {
        model,
        profile,
        site_probs,
        log_reliability,
        reliability: (value >= UNDERFLOW_LIMIT).then_some(value),
    }
}
