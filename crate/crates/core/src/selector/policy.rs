use serde::{Deserialize, Serialize};

/// Every numeric threshold the decision trees use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    /// Base relations receive SAPP instead of BP when appends per base
    /// contains exceed this ratio and arrivals are aligned.
    pub sapp_new_ratio: f64,
    /// Exclusive ordered representations need probe multiplicity at most
    /// this value...
    pub exclusive_max_multiplicity: f64,
    /// ...or evaluation operations per initialization tuple at least this.
    pub exclusive_min_eval_init: f64,
    /// Switch to S2 when new contains per new append exceed this ratio.
    pub s2_duplicate_ratio: f64,
    /// Switch to S3 when new appends per base contains exceed this ratio
    /// and arrivals into the base are unaligned.
    pub s3_new_ratio: f64,
    /// Bytes per attribute used to estimate footprints against a budget.
    pub bytes_per_attribute: u64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            sapp_new_ratio: 0.5,
            exclusive_max_multiplicity: 2.0,
            exclusive_min_eval_init: 2.0,
            s2_duplicate_ratio: 2.0,
            s3_new_ratio: 0.5,
            bytes_per_attribute: 8,
        }
    }
}

/// UKI pays off when the key leaves at most half the schema in the index
/// entry and a key plus one reference is narrower than the tuple.
pub fn uki_worthwhile(key_width: usize, schema_width: usize) -> bool {
    key_width <= schema_width.div_ceil(2) && key_width + 1 < schema_width
}
