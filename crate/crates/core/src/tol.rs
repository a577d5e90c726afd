//! Central registry of numeric tolerances and probe budgets.
//!
//! Every threshold used by the library lives here, with its role documented
//! next to the value. Experiment configs may override individual entries by
//! name (see [`Tolerances`]); reports echo the effective values so a run can
//! be reproduced byte-for-byte.

use serde::{Deserialize, Serialize};

/// Comparison-triangle and geodesic identities (floating-point models).
/// Tree computations are exact rationals and use zero tolerance instead.
pub const EPS_GEO: f64 = 1e-9;

/// Busemann identity suite (antisymmetry, Lipschitz, cocycle, ray calibration).
pub const EPS_BD: f64 = 1e-7;

/// Boundary-convergence detector: directions over the terminal quarter of a
/// sequence must agree pairwise within this visual distance.
pub const EPS_CONV: f64 = 1e-4;

/// Horizon (in letters) when comparing tree boundary words numerically.
pub const D_BD: usize = 64;

/// Parameter along a ray at which the definitional Busemann limit is probed.
pub const T_BUS: f64 = 1e6;

/// Resolution of 1-D minimizers: projection feet are pinned to this accuracy.
pub const EPS_PARAM: f64 = 1e-8;

/// Sub-level offset defining the flat interval of a boundary projection.
pub const TAU_FLAT: f64 = 1e-6;

/// Slack for the quantitative projection/window inequalities.
pub const EPS_LEMMA: f64 = 1e-5;

/// Exponential probe horizon: geodesics are examined at |t| up to 2^PROBE_K.
pub const PROBE_K: u32 = 40;

/// Iterations of ternary search after bracketing (deterministic).
pub const TERNARY_ITERS: u32 = 200;

/// Contraction ladder: number of sphere samples per ball.
pub const N_BALL: usize = 256;

/// Contraction ladder: centers per radius rung.
pub const N_CENTERS: usize = 32;

/// Contraction verdict: the two largest rungs must agree within this.
pub const DELTA_STAB: f64 = 0.01;

/// Divergence verdict: rung diameter at least C_DIV * radius on the two
/// largest rungs.
pub const C_DIV: f64 = 1.5;

/// Endpoint quality for boundary-connecting lines (visual distance).
pub const EPS_VIS: f64 = 1e-3;

/// Exact classification cut (trace tests, word reduction).
pub const EPS_CLASS: f64 = 1e-9;

/// Numeric fallback classification cut (displacement minimization).
pub const EPS_CLASS_NUM: f64 = 1e-5;

/// North-south dynamics: iteration cap per sampled boundary point.
pub const K_MAX: u32 = 1000;

/// Boundary sample size for inclusion checks and dynamics grids.
pub const N_BD: usize = 512;

/// Flat-strip probe: product-metric identity must hold within this.
pub const EPS_FLAT: f64 = 1e-6;

/// Minimum reported separation between contracting-line families.
pub const C_SEP_MIN: f64 = 0.01;

/// Escape radius: an orbit point must move at least this far to count as
/// heading to infinity.
pub const R_ESC: f64 = 10.0;

/// Deduplication radius for boundary samples (visual distance).
pub const EPS_DEDUP: f64 = 1e-3;

/// Reference pairs for atlas coverage must be at least this far apart.
pub const SEP_MIN: f64 = 0.05;

/// Translation lengths below this are treated as degenerate in freeness
/// certificates.
pub const DELTA_FREE: f64 = 1e-6;

/// Runtime-adjustable copy of the registry. `Default` mirrors the constants;
/// [`Tolerances::set`] overrides one entry by its registry name.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Tolerances {
    pub eps_geo: f64,
    pub eps_bd: f64,
    pub eps_conv: f64,
    pub t_bus: f64,
    pub eps_param: f64,
    pub tau_flat: f64,
    pub eps_lemma: f64,
    /// Doubling-probe horizon exponent (integer-valued f64 so it shares the
    /// override channel).
    pub probe_k: f64,
    /// Ternary-search iteration budget (integer-valued f64).
    pub ternary_iters: f64,
    pub delta_stab: f64,
    pub c_div: f64,
    pub eps_vis: f64,
    pub eps_class: f64,
    pub eps_class_num: f64,
    pub eps_flat: f64,
    pub c_sep_min: f64,
    pub r_esc: f64,
    pub eps_dedup: f64,
    pub sep_min: f64,
    pub delta_free: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_geo: EPS_GEO,
            eps_bd: EPS_BD,
            eps_conv: EPS_CONV,
            t_bus: T_BUS,
            eps_param: EPS_PARAM,
            tau_flat: TAU_FLAT,
            eps_lemma: EPS_LEMMA,
            probe_k: PROBE_K as f64,
            ternary_iters: TERNARY_ITERS as f64,
            delta_stab: DELTA_STAB,
            c_div: C_DIV,
            eps_vis: EPS_VIS,
            eps_class: EPS_CLASS,
            eps_class_num: EPS_CLASS_NUM,
            eps_flat: EPS_FLAT,
            c_sep_min: C_SEP_MIN,
            r_esc: R_ESC,
            eps_dedup: EPS_DEDUP,
            sep_min: SEP_MIN,
            delta_free: DELTA_FREE,
        }
    }
}

impl Tolerances {
    /// Override one entry by name. Unknown names are rejected so that a typo
    /// in a config cannot silently run with defaults.
    pub fn set(&mut self, name: &str, value: f64) -> crate::error::Result<()> {
        match name {
            "eps_geo" => self.eps_geo = value,
            "eps_bd" => self.eps_bd = value,
            "eps_conv" => self.eps_conv = value,
            "t_bus" => self.t_bus = value,
            "eps_param" => self.eps_param = value,
            "tau_flat" => self.tau_flat = value,
            "eps_lemma" => self.eps_lemma = value,
            "probe_k" => self.probe_k = value,
            "ternary_iters" => self.ternary_iters = value,
            "delta_stab" => self.delta_stab = value,
            "c_div" => self.c_div = value,
            "eps_vis" => self.eps_vis = value,
            "eps_class" => self.eps_class = value,
            "eps_class_num" => self.eps_class_num = value,
            "eps_flat" => self.eps_flat = value,
            "c_sep_min" => self.c_sep_min = value,
            "r_esc" => self.r_esc = value,
            "eps_dedup" => self.eps_dedup = value,
            "sep_min" => self.sep_min = value,
            "delta_free" => self.delta_free = value,
            _ => {
                return Err(crate::error::Cat0Error::Parse(format!(
                    "unknown tolerance name `{name}`"
                )))
            }
        }
        Ok(())
    }
}
