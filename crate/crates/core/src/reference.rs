//! Experimental summary values, kept as comparison fixtures.
//! The simulator is not expected to reproduce them.

/// Measured context sums p_1, p_2, p_3.
pub const CONTEXT_SUMS: [f64; 3] = [0.9939, 0.9980, 0.9983];
pub const CONTEXT_SUM_ERRORS: [f64; 3] = [0.0015, 0.0002, 0.0002];
/// Sum of the measured context sums.
pub const PROBABILITY_TOTAL: f64 = 2.990;
/// Mean exclusivity defect over the surveyed pairs.
pub const MEAN_DEFECT: f64 = 0.0174;
/// Standard error of the mean defect.
pub const MEAN_DEFECT_ERROR: f64 = 0.0011;
/// Deduced compensation term and its error.
pub const DEFECT_TERM: f64 = 0.651;
pub const DEFECT_TERM_ERROR: f64 = 0.004;
/// Violation of the corrected bound in standard deviations.
pub const VIOLATION_SIGMAS: f64 = 8.06;
/// Exclusive pairs of the 57-event graph.
pub const EXCLUSIVE_PAIRS: usize = 1425;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_matches_context_sums() {
        let total: f64 = CONTEXT_SUMS.iter().sum();
        assert!((total - PROBABILITY_TOTAL).abs() < 5e-4);
    }
}
