#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fockdom/fockspace.hpp"
#include "fockdom/linalg.hpp"

namespace fockdom {

/// n-tuple of d x d complex matrices acting on H = C^d.
struct OperatorTuple {
    std::vector<Matrix> t;

    OperatorTuple() = default;
    explicit OperatorTuple(std::vector<Matrix> mats);

    int n() const { return static_cast<int>(t.size()); }
    Eigen::Index dim() const { return t.empty() ? 0 : t[0].rows(); }
    const Matrix& operator[](int i) const { return t.at(static_cast<std::size_t>(i - 1)); }

    OperatorTuple scaled(double r) const;
    OperatorTuple conjugated(const Matrix& q) const;  // Q T_i Q^*

    static OperatorTuple zero(int n, Eigen::Index d);
    /// The dense truncated model W_1..W_n.
    static OperatorTuple from_model(const UniversalModel& model);
    /// Block-diagonal direct sum.
    static OperatorTuple direct_sum(const std::vector<OperatorTuple>& parts);

    nlohmann::json to_json() const;
    static OperatorTuple from_json(const nlohmann::json& j);
};

struct Tolerances {
    double psd = 1e-10;
    double residual = 1e-8;
    double rank = 1e-10;
    double intertwine = 1e-10;
};

struct MembershipReport {
    int degree = 0;
    std::vector<double> delta_norms;        // ||Delta_m||, m = 0..M
    std::vector<double> delta_increments;   // ||Delta_m - Delta_{m-1}||, m = 1..M
    double delta_min_eig = 0.0;             // of the Hermitian part of Delta_M
    double delta_norm = 0.0;
    bool psd = false;
    bool stabilized = false;
    std::vector<double> purity_residuals;   // rho_m, m = 0..M
    double partial_sum_excess = 0.0;        // max(0, -min eig(I - sum_M))
    std::string verdict;                    // member, pure, Cuntz, not-member, inconclusive
    Matrix delta;                           // Delta_M
};

/// Domain membership via the truncated defect series of g^{-1} through degree M.
MembershipReport membership(const OperatorTuple& T, const FreeSeries& g, int M, const Tolerances& tol = {});

struct RadialPoint {
    double r = 0.0;
    MembershipReport report;
};
struct RadialScan {
    std::vector<RadialPoint> points;
    std::optional<double> largest_pure_r;
};
RadialScan radial_scan(const OperatorTuple& T, const FreeSeries& g, const std::vector<double>& grid, int M,
                       const Tolerances& tol = {});

struct BerezinKernel {
    Matrix K;               // (dim F_N * m) x d, Fock index major
    Matrix defect_basis;    // d x m orthonormal basis of the range of Delta^{1/2}
    Matrix delta;
    Matrix delta_sqrt;
    Eigen::Index multiplicity = 0;
    double isometry_defect = 0.0;           // ||K^*K - I||
    std::vector<double> intertwining;       // ||K T_i^* - (W_i^* (x) I) K||
};

/// Throws when Delta (summed through N) is not PSD within tol.psd.
BerezinKernel berezin_kernel(const OperatorTuple& T, const FreeSeries& g, int N, const Tolerances& tol = {});

/// Random strictly upper-triangular n-tuple on C^d, scaled by `shrink` until
/// its defect (summed through degree d) is PSD. Requires g.degree() >= d.
OperatorTuple random_nilpotent_member(int n, Eigen::Index d, const FreeSeries& g, linalg::Rng& rng,
                                      const Tolerances& tol = {}, double shrink = 0.8);

/// Numerical rank of Delta for a pure tuple; throws for non-pure input.
Eigen::Index dilation_index(const OperatorTuple& T, const FreeSeries& g, const Tolerances& tol = {});

struct MinimalityReport {
    double coinvariance_defect = 0.0;
    Eigen::Index span_rank = 0;      // (i) rank of the span of (W_alpha (x) I) H
    Eigen::Index vacuum_rank = 0;    // (iii) rank of (P_vac (x) I) H
    Eigen::Index vacuum_nullity = 0; // (iv) dim of H^perp intersected with C1 (x) C^m
    bool flag_span = false;
    bool flag_vacuum = false;
    bool flag_orthogonal = false;
    bool agree = false;
    bool minimal = false;
};

/// `v` has orthonormal columns spanning H inside F_N (x) C^m. Throws when H is
/// not co-invariant under every W_i (x) I within tol.
MinimalityReport minimality_check(const Matrix& v, const UniversalModel& model, Eigen::Index m, double tol = 1e-9);

struct ReducedDilation {
    Matrix g0;           // m x m0 orthonormal basis of G_0
    Matrix embedding;    // (dim * m0) x d
    double orthogonality_defect = 0.0;   // ||(I (x) (I - P_{G0})) V||
    double tuple_change = 0.0;           // max_i ||V^*(W_i^*(x)I)V - V'^*(W_i^*(x)I)V'||
};
ReducedDilation reduce_dilation(const Matrix& v, const UniversalModel& model, Eigen::Index m, double tol = 1e-9);

struct LiftEquivalence {
    Matrix u;                  // m' x m
    double unitarity_defect = 0.0;
    double residual = 0.0;     // ||(I (x) U) K - K' V||
};
/// Throws when V does not intertwine T and T' within tol or either tuple is not pure.
LiftEquivalence lift_equivalence(const OperatorTuple& T, const OperatorTuple& Tp, const Matrix& v,
                                 const FreeSeries& g, int N, double tol = 1e-9);

/// Word-pair term c W_alpha W_beta^*.
struct WordPairTerm {
    Complex c;
    Word alpha;
    Word beta;
};

struct BerezinTransform {
    std::vector<double> r;
    std::vector<Matrix> values;       // K_{rT}^* (A (x) I) K_{rT}
    std::vector<bool> pure;           // purity flag of rT per grid point
    Matrix extrapolated;              // linear in (1 - r) through the last two grid points
    Matrix target;                    // sum c T_alpha T_beta^*
    double extrapolation_error = 0.0; // ||extrapolated - target||
};
BerezinTransform berezin_transform(const OperatorTuple& T, const FreeSeries& g,
                                   const std::vector<WordPairTerm>& a, const std::vector<double>& grid, int N,
                                   const Tolerances& tol = {});

/// (A (x) I_m) X for A = sum c W_alpha W_beta^*.
Matrix apply_word_pairs(const UniversalModel& model, const std::vector<WordPairTerm>& a, const Matrix& x,
                        Eigen::Index m);

} // namespace fockdom
