//! The reward-function family: the partitioned nonlinear reward and the seven
//! ablation variants evaluated against it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::QstabError;

/// Reward-function variants compared in the ablation harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RewardVariant {
    /// Partitioned nonlinear reward, slopes e < f.
    Pnr,
    /// Same structure with slopes reversed (e > f).
    Pnr1,
    /// Partitioned linear reward.
    Plr,
    /// Partitioned sparse reward: constant in the proximity zone, zero outside.
    Psr,
    /// Non-partitioned nonlinear reward over [0, 1] into [-1, 0].
    Npnr,
    /// Non-partitioned linear reward into [-1, 0].
    Nplnr,
    /// Non-partitioned linear reward into [0, 100].
    Nplpr,
    /// Fidelity-based reward F^4 + 4 F^25.
    Fpr,
}

impl RewardVariant {
    pub const ALL: [RewardVariant; 8] = [
        RewardVariant::Pnr,
        RewardVariant::Pnr1,
        RewardVariant::Plr,
        RewardVariant::Psr,
        RewardVariant::Npnr,
        RewardVariant::Nplnr,
        RewardVariant::Nplpr,
        RewardVariant::Fpr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RewardVariant::Pnr => "PNR",
            RewardVariant::Pnr1 => "PNR1",
            RewardVariant::Plr => "PLR",
            RewardVariant::Psr => "PSR",
            RewardVariant::Npnr => "NPNR",
            RewardVariant::Nplnr => "NPLNR",
            RewardVariant::Nplpr => "NPLPR",
            RewardVariant::Fpr => "FPR",
        }
    }

    pub fn from_name(s: &str) -> Result<Self, QstabError> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QstabError::Config(format!("unknown reward variant '{s}'")))
    }

    pub fn is_partitioned(self) -> bool {
        matches!(
            self,
            RewardVariant::Pnr | RewardVariant::Pnr1 | RewardVariant::Plr | RewardVariant::Psr
        )
    }

    /// Whether the per-step penalty applies. Sparse and non-partitioned
    /// baselines are reproduced without it.
    pub fn carries_step_penalty(self) -> bool {
        matches!(self, RewardVariant::Pnr | RewardVariant::Pnr1 | RewardVariant::Plr)
    }
}

/// Distance and reward bounds for one zone of the partition.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ZoneBounds {
    pub d_lo: f64,
    pub d_hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Full parameterization of a reward function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RewardSpec {
    pub variant: RewardVariant,
    /// Partition parameter separating the proximity and exploration zones.
    pub d: f64,
    pub proximity: ZoneBounds,
    pub exploration: ZoneBounds,
    /// Bounds used by the non-partitioned variants.
    pub full: ZoneBounds,
    pub slope_e: f64,
    pub slope_f: f64,
    pub step_penalty_unit: f64,
}

impl RewardSpec {
    // Negated comparisons so NaN fails validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), QstabError> {
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(QstabError::InvalidSpec("partition d must lie in (0, 1)".into()));
        }
        for z in [&self.proximity, &self.exploration, &self.full] {
            if !(z.d_lo < z.d_hi) || !(z.r_lo <= z.r_hi) {
                return Err(QstabError::InvalidSpec("zone bounds out of order".into()));
            }
        }
        let nonlinear = matches!(
            self.variant,
            RewardVariant::Pnr | RewardVariant::Pnr1 | RewardVariant::Npnr
        );
        if nonlinear {
            if !(self.slope_e > 0.0 && self.slope_f > 0.0) {
                return Err(QstabError::InvalidSpec("slopes must be positive".into()));
            }
            if self.slope_e == self.slope_f {
                // The nonlinear formula divides by f - e.
                return Err(QstabError::InvalidSpec("slopes e and f must differ".into()));
            }
        }
        Ok(())
    }
}

/// Nonlinear zone reward. Maps [d_lo, d_hi] onto [r_hi, r_lo] monotonically,
/// with e and f regulating the steepness near each end:
///
/// r(D) = ((Dhi - Dlo) / (f (D - Dlo) - e (D - Dhi)) - 1/f) * (e f (Rhi - Rlo) / (f - e)) + Rlo
pub fn pnr_core(d_dist: f64, zone: &ZoneBounds, e: f64, f: f64) -> f64 {
    debug_assert!(d_dist >= zone.d_lo - 1e-12 && d_dist <= zone.d_hi + 1e-12);
    let span = zone.d_hi - zone.d_lo;
    let denom = f * (d_dist - zone.d_lo) - e * (d_dist - zone.d_hi);
    (span / denom - 1.0 / f) * (e * f * (zone.r_hi - zone.r_lo) / (f - e)) + zone.r_lo
}

/// Linear zone reward: r(d_lo) = r_hi, r(d_hi) = r_lo.
fn linear_core(d_dist: f64, zone: &ZoneBounds) -> f64 {
    let t = (zone.d_hi - d_dist) / (zone.d_hi - zone.d_lo);
    zone.r_lo + (zone.r_hi - zone.r_lo) * t
}

/// Evaluates the configured reward at distance `d_dist` on step `step_index`.
/// Zone membership at exactly D = d goes to the exploration zone.
pub fn evaluate(spec: &RewardSpec, d_dist: f64, step_index: u64) -> f64 {
    let base = match spec.variant {
        RewardVariant::Pnr | RewardVariant::Pnr1 => {
            if d_dist < spec.d {
                pnr_core(d_dist, &spec.proximity, spec.slope_e, spec.slope_f)
            } else {
                pnr_core(d_dist, &spec.exploration, spec.slope_e, spec.slope_f)
            }
        }
        RewardVariant::Plr => {
            if d_dist < spec.d {
                linear_core(d_dist, &spec.proximity)
            } else {
                linear_core(d_dist, &spec.exploration)
            }
        }
        RewardVariant::Psr => {
            if d_dist < spec.d {
                spec.proximity.r_hi
            } else {
                0.0
            }
        }
        RewardVariant::Npnr => pnr_core(d_dist, &spec.full, spec.slope_e, spec.slope_f),
        RewardVariant::Nplnr | RewardVariant::Nplpr => linear_core(d_dist, &spec.full),
        RewardVariant::Fpr => {
            let fid = 1.0 - d_dist;
            fid.powi(4) + 4.0 * fid.powi(25)
        }
    };
    if spec.variant.carries_step_penalty() {
        base - step_index as f64 * spec.step_penalty_unit
    } else {
        base
    }
}

/// The eight benchmark configurations, keyed by variant.
pub fn default_specs() -> BTreeMap<RewardVariant, RewardSpec> {
    let d = 0.001;
    let proximity = ZoneBounds { d_lo: 0.0, d_hi: d, r_lo: 1.0, r_hi: 100.0 };
    let exploration = ZoneBounds { d_lo: d, d_hi: 1.0, r_lo: -0.1, r_hi: 0.0 };
    let negative_full = ZoneBounds { d_lo: 0.0, d_hi: 1.0, r_lo: -1.0, r_hi: 0.0 };
    let positive_full = ZoneBounds { d_lo: 0.0, d_hi: 1.0, r_lo: 0.0, r_hi: 100.0 };

    let base = |variant, full, e, f| RewardSpec {
        variant,
        d,
        proximity,
        exploration,
        full,
        slope_e: e,
        slope_f: f,
        step_penalty_unit: 1e-6,
    };

    let mut map = BTreeMap::new();
    map.insert(RewardVariant::Pnr, base(RewardVariant::Pnr, negative_full, 2.0, 10.0));
    map.insert(RewardVariant::Pnr1, base(RewardVariant::Pnr1, negative_full, 10.0, 2.0));
    map.insert(RewardVariant::Plr, base(RewardVariant::Plr, negative_full, 2.0, 10.0));
    map.insert(
        RewardVariant::Psr,
        RewardSpec {
            proximity: ZoneBounds { d_lo: 0.0, d_hi: d, r_lo: 1.0, r_hi: 1.0 },
            exploration: ZoneBounds { d_lo: d, d_hi: 1.0, r_lo: 0.0, r_hi: 0.0 },
            ..base(RewardVariant::Psr, negative_full, 2.0, 10.0)
        },
    );
    map.insert(RewardVariant::Npnr, base(RewardVariant::Npnr, negative_full, 2.0, 10.0));
    map.insert(RewardVariant::Nplnr, base(RewardVariant::Nplnr, negative_full, 2.0, 10.0));
    map.insert(RewardVariant::Nplpr, base(RewardVariant::Nplpr, positive_full, 2.0, 10.0));
    map.insert(RewardVariant::Fpr, base(RewardVariant::Fpr, negative_full, 2.0, 10.0));
    map
}

/// Convenience accessor for one default configuration.
pub fn default_spec(variant: RewardVariant) -> RewardSpec {
    default_specs().remove(&variant).unwrap()
}

#[cfg(test)]
mod tests;
