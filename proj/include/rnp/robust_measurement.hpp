#pragma once

#include "rnp/core_model.hpp"

namespace rnp {

/// Binomial coefficient C(n, k) as a double. Exact (128-bit integer
/// arithmetic) for n <= 61, log-gamma beyond.
double binomial(int n, int k);

/// Leading-order error of a majority vote over 2m+1 QND readouts:
///   C(2m+1, m+1) (p_I + p_M)^(m+1) + (2m+1)/2 p_L, clamped to [0, 1].
/// Throws DomainError for m < 0 or p_I + p_M >= 1.
double measurement_error(int m, const ErrorParams& params);

/// Same model without the leading-order truncation: the full binomial tail
/// P[more than m of 2m+1 readouts wrong] plus (2m+1)/2 p_L, clamped.
double majority_vote_error(int m, const ErrorParams& params);

/// (2m+1)(t_I + t_L + t_M).
double measurement_time(int m, const PhysicalTimings& timings);

/// Picks m in [0, m_max] minimizing majority_vote_error(); ties go to the
/// smaller m. duration_s is left at zero.
MeasurementPlan optimal_m(const ErrorParams& params, int m_max);

/// As above, with duration_s filled from the timings.
MeasurementPlan optimal_m(const ErrorParams& params, const PhysicalTimings& timings, int m_max);

}  // namespace rnp
