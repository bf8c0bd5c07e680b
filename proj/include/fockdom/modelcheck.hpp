#pragma once

#include <string>
#include <vector>

#include "fockdom/fockspace.hpp"

namespace fockdom {

/// Diagonal of sum_{|alpha| <= m} a_alpha W_alpha W_alpha^* on the truncated
/// space: d_beta = sum over beta = alpha gamma, |alpha| <= m, of a_alpha b_gamma / b_beta.
RealVector defect_diagonal(const UniversalModel& model, const FreeSeries& a, int m);

/// The same operator as a dense matrix.
Matrix defect_operator(const UniversalModel& model, const FreeSeries& a, int m);

/// Byte budget for holding every dense W_alpha at once.
inline constexpr std::size_t kDenseProductBudget = std::size_t{512} << 20;

/// Reference evaluation by explicit products of the W_alpha: dense matrix
/// products while all of them fit in `memory_budget`, otherwise exact sparse
/// composition of the weighted partial permutations, one level at a time.
Matrix defect_operator_dense(const UniversalModel& model, const FreeSeries& a, int m,
                             std::size_t memory_budget = kDenseProductBudget);

/// sum_{|alpha| <= N} b_alpha W_alpha P_vac W_alpha^*, evaluated like defect_operator_dense.
Matrix vacuum_resolution(const UniversalModel& model, std::size_t memory_budget = kDenseProductBudget);

struct CheckFlag {
    std::string name;
    std::string status;  // "pass", "fail", "divergence-trend"
    bool truncation_limited = true;
    std::string note;
};

struct AdmissibilityReport {
    int degree = 0;
    std::vector<double> observed_sup_ratio;        // per generator, observed through the degree
    double observed_sup = 0.0;
    std::vector<double> sup_ratio_per_level;
    std::vector<double> radius_values;
    std::string radius_trend;
    std::vector<double> partial_sum_norms;         // k = 0..N
    double partial_sum_sup = 0.0;
    std::vector<double> cauchy_increments;         // k = 1..N
    std::vector<CheckFlag> checks;
};

/// Throws when some coefficient is non-positive (the offending word is named).
AdmissibilityReport check_admissibility(const FreeSeries& b, int N);

struct BoundaryReport {
    int degree = 0;
    bool level_constant = true;
    std::vector<double> s_min;   // per level k = 0..N
    std::vector<double> s_max;
    double sup = 0.0;            // sup_k s_k = ||sum_i W_i^* W_i|| on the untruncated model restricted to |gamma| <= N
    int sup_level = 0;           // first level attaining the sup
    double tail_min = 0.0;       // band at level N
    double tail_max = 0.0;
    bool tail_monotone = false;
    double gap = 0.0;            // sup - tail_max
    std::string verdict;         // "boundary-property-certified", "criterion-not-satisfied", "inconclusive"
    std::string reason;
    std::vector<double> compactness_tail;  // max |b_{g_p g}/b_{g_i g_p g} - b_g/b_{g_p g}| per level
    bool compactness_tail_small = false;
};

inline constexpr double kMonotoneSlack = 1e-6;
inline constexpr double kCertifyGap = 1e-3;

/// Requires weights through degree N + 1 so that s_N is available.
BoundaryReport boundary_property(const FreeSeries& b, int N);

} // namespace fockdom
