//! Hard-instance generators: packing datasets for pure DP, fingerprinting
//! datasets with group-privacy replication, dummy-row padding, and the
//! accompanying privacy arithmetic.

mod group;
mod instance;
mod manifest;
mod packing;

pub use group::{biased_column_stability, dilution_bound, group_privacy_params, GroupPrivacy, StabilityReport};
pub use instance::{
    balanced_padding, fp_hard_instance, pad_dataset, padding_regime, FpHardInstance, GroupPrivacyPlan,
    InstanceColumns, PaddingRegime,
};
pub use manifest::{InstanceFiles, InstanceManifest, MANIFEST_FORMAT};
pub use packing::{packing_points, pure_dp_instance, PackingFamily, PureDpInstance, MIN_SEPARATION};
