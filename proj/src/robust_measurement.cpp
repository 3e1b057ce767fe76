#include "rnp/robust_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rnp {

namespace {

void require_half_width(int m) {
    if (m < 0) throw DomainError("m must be nonnegative, got " + std::to_string(m));
}

double readout_error(const ErrorParams& params) {
    const ErrorParams p = validate(params);
    const double per_readout = p.p_init + p.p_meas;
    if (per_readout >= 1.0) throw DomainError("p_I + p_M must be below 1 for majority voting");
    return per_readout;
}

double clamp_probability(double value) { return std::clamp(value, 0.0, 1.0); }

}  // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    if (n <= 61) {
        // C(61, 30) < 2^63; each intermediate product stays below 2^127.
        unsigned __int128 acc = 1;
        for (int i = 1; i <= k; ++i) acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        return static_cast<double>(acc);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double measurement_error(int m, const ErrorParams& params) {
    require_half_width(m);
    const double per_readout = readout_error(params);
    const int n = 2 * m + 1;
    const double vote = binomial(n, m + 1) * std::pow(per_readout, m + 1);
    return clamp_probability(vote + 0.5 * n * params.p_local);
}

double majority_vote_error(int m, const ErrorParams& params) {
    require_half_width(m);
    const double p = readout_error(params);
    const int n = 2 * m + 1;
    double tail = 0.0;
    if (p > 0.0) {
        const double log_p = std::log(p);
        const double log_q = std::log1p(-p);
        for (int k = m + 1; k <= n; ++k) {
            const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
            tail += std::exp(log_c + k * log_p + (n - k) * log_q);
        }
    }
    return clamp_probability(tail + 0.5 * n * params.p_local);
}

double measurement_time(int m, const PhysicalTimings& timings) {
    require_half_width(m);
    return (2.0 * m + 1.0) * (timings.t_init + timings.t_local + timings.t_meas);
}

MeasurementPlan optimal_m(const ErrorParams& params, int m_max) {
    require_half_width(m_max);
    MeasurementPlan best;
    best.half_width = 0;
    best.eps_meas = majority_vote_error(0, params);
    for (int m = 1; m <= m_max; ++m) {
        const double eps = majority_vote_error(m, params);
        if (eps < best.eps_meas) {
            best.half_width = m;
            best.eps_meas = eps;
        }
    }
    best.eps_meas_leading = measurement_error(best.half_width, params);
    return best;
}

MeasurementPlan optimal_m(const ErrorParams& params, const PhysicalTimings& timings, int m_max) {
    MeasurementPlan plan = optimal_m(params, m_max);
    plan.duration_s = measurement_time(plan.half_width, timings);
    return plan;
}

}  // namespace rnp
