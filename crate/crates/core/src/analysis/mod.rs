//! Weights, mixed norms, maximal operators over phi-adapted cylinders and
//! the ratio studies built on them.

pub mod lp;
pub mod maximal;
pub mod norms;
pub mod random;
pub mod verify;
pub mod weights;

pub use lp::littlewood_paley_norm;
pub use maximal::{
    cylinder_window, dyadic_ladder, hl_maximal, hl_maximal_iterated, sharp_function, sharp_function_with, CylinderSpec,
    MaximalMode,
};
pub use norms::{lp_norm, mixed_norm, MixedNormParams, MixedNormSpec};
pub use verify::{
    verify_fefferman_stein, verify_g1_mixed_norm, verify_oscillation_lemmas, verify_sharp_bound, verify_theorem1,
    verify_weighted_hl, LemmaCase, Operator, OscillationOptions, OscillationReport, RatioRow, RatioStudy, SharpOptions,
    SharpReport, StudyGrid, Theorem1Report,
};
pub use weights::{ap_characteristic, Weight, WeightAxis, WeightSpec};
