#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fockdom/domainops.hpp"
#include "fockdom/linalg.hpp"

namespace fockdom {

using ModelPtr = std::shared_ptr<const UniversalModel>;

inline ModelPtr make_model(const FreeSeries& b, int N) { return std::make_shared<const UniversalModel>(b, N); }

/// Operator F_src (x) E -> F_tgt (x) E* intertwining the two weighted models.
/// Column (alpha, e) is sqrt(b^src_alpha) (W^tgt_alpha (x) I) theta(e).
struct MultiAnalyticOperator {
    ModelPtr source;
    Eigen::Index source_mult = 0;
    ModelPtr target;
    Eigen::Index target_mult = 0;
    Matrix symbol;  // (dim_tgt * target_mult) x source_mult
    Matrix M;       // (dim_tgt * target_mult) x (dim_src * source_mult)

    /// max_i ||M (W_i^src (x) I) - (W_i^tgt (x) I) M|| on source words of length <= N-1.
    double intertwining_residual() const;
    /// The same residual restricted to the source's top level.
    double boundary_residual() const;
};

MultiAnalyticOperator from_symbol(const Matrix& theta, ModelPtr source, Eigen::Index source_mult, ModelPtr target,
                                  Eigen::Index target_mult);

/// Wraps an assembled matrix; the symbol is read off the vacuum columns.
MultiAnalyticOperator wrap_multi_analytic(const Matrix& m, ModelPtr source, Eigen::Index source_mult,
                                          ModelPtr target, Eigen::Index target_mult);

struct InvariantSubspace {
    Matrix basis;              // orthonormal columns in F_N (x) C^K
    Eigen::Index mult = 1;
    double closure_defect = 0.0;
};

/// Orthonormalizes spanning vectors; throws when the span is not invariant under every W_i (x) I within tol.
InvariantSubspace make_invariant_subspace(const Matrix& spanning, const UniversalModel& model, Eigen::Index mult,
                                          double tol = 1e-9);

/// max_i ||(I - P) (W_i (x) I) P|| for the orthonormal basis q.
double invariance_defect(const Matrix& q, const UniversalModel& model, Eigen::Index mult);

/// Span of (W_alpha (x) I) v_j for `seeds` random vectors supported on levels >= min_level.
InvariantSubspace random_invariant_subspace(const UniversalModel& model, Eigen::Index mult, int seeds, int min_level,
                                            linalg::Rng& rng);

struct ToeplitzResult {
    MultiAnalyticOperator psi;       // F_g (x) D -> F_f (x) C^K
    OperatorTuple f_tuple;           // F_i on range(Y^{1/2}), in the eigenbasis coordinates
    Eigen::Index defect_dim = 0;
    double hypothesis_min_eig = 0.0; // of Y - sum c_alpha (W_alpha (x) I) Y (W_alpha (x) I)^*
    double factor_residual = 0.0;    // ||Psi Psi^* - Y||
    double multi_analytic_residual = 0.0;
    double boundary_residual = 0.0;
    double kernel_isometry_defect = 0.0;
};

/// Y = Psi Psi^* for Y satisfying the positivity hypothesis with the regular
/// series g (degree >= Ng). Psi is multi-analytic from the g model of degree Ng.
ToeplitzResult toeplitz_factorize(const Matrix& y, ModelPtr fmodel, Eigen::Index mult, const FreeSeries& g, int Ng,
                                  double tol = 1e-9);

struct BeurlingResult {
    ToeplitzResult factor;
    double d = 1.0;
    bool d_closed_form = false;
    bool d_provisional = false;
    std::string d_note;
    double partial_isometry_defect = 0.0;  // max |s^2 - s^4| over singular values of Psi
    double range_distance = 0.0;           // ||P_range(Psi) - P_M||
    double intertwining_residual = 0.0;    // sqrt(d) Psi (S_i (x) I) vs (W_i (x) I) Psi, off the top level
    double boundary_residual = 0.0;
};

/// Throws when M is not invariant within tol.
BeurlingResult beurling_factorize(const InvariantSubspace& m, ModelPtr fmodel, double tol = 1e-9);

struct SupportResult {
    Matrix g;                  // orthonormal basis of the support fiber in E
    double vanishing_defect;   // ||A (I (x) (I - P_G))||
};
SupportResult support(const MultiAnalyticOperator& a, double rel_tol = 1e-10);

struct CoincidenceResult {
    Matrix v;                       // K1 -> K2
    double hypothesis_defect = 0.0; // ||A1 A1^* - A2 A2^*||
    double residual = 0.0;          // ||A1 - A2 (I (x) V)||
    double support_defect = 0.0;    // ||V^*V - P_{G1}||
};
/// Throws when the hypothesis fails beyond tol or the operators are incompatible.
CoincidenceResult coincidence(const MultiAnalyticOperator& a1, const MultiAnalyticOperator& a2, double tol = 1e-8);

/// A (I (x) V) for A with source multiplicity V.rows().
Matrix right_multiply_fiber(const Matrix& a, const Matrix& v);

struct LiftClause {
    std::string name;
    bool pass = false;
    double value = 0.0;
};
struct LiftReport {
    std::vector<LiftClause> clauses;
    bool pass = false;
};
/// G1 (basis q1, in F_src (x) E1) and G2 (basis q2, in F_tgt (x) E2) co-invariant;
/// X : G1 -> G2 in those bases; Gamma multi-analytic from src to tgt.
LiftReport verify_commutant_lift(const Matrix& x, const Matrix& q1, const Matrix& q2,
                                 const MultiAnalyticOperator& gamma, double tol = 1e-8);

struct CoronaResult {
    std::string verdict;                 // feasible, infeasible, inconclusive
    std::optional<MultiAnalyticOperator> c;
    double douglas_min_eig = 0.0;        // min eig(BB^* - AA^*)
    double residual = 0.0;               // ||A - BC||
    double symbol_residual = 0.0;        // ||B theta_C - theta_A||
    double c_norm = 0.0;
    double c_norm_least_squares = 0.0;   // before norm minimization
    bool contractive = false;
    std::optional<Vector> witness;       // ||A^*x|| > ||B^*x||
    double witness_gap = 0.0;            // ||A^*x||^2 - ||B^*x||^2
};
/// Solves A = BC over multi-analytic C (source = A's source, target = B's source),
/// choosing the C of least norm.
CoronaResult corona_solve(const MultiAnalyticOperator& a, const MultiAnalyticOperator& b, double tol = 1e-8);

struct CoronaRowResult {
    std::string verdict;                 // solved, lower-bound-failure, inconclusive
    double delta_hat = 0.0;              // min eig(sum Phi_k Phi_k^*)
    std::vector<Matrix> psi;             // Psi_k, F_f (x) E -> F_g (x) E_k
    std::optional<MultiAnalyticOperator> psi_column;
    double residual = 0.0;               // ||sum Phi_k Psi_k - I||
    double psi_norm = 0.0;
    double bound = 0.0;                  // 1/sqrt(delta_hat)
    bool bound_ok = false;               // psi_norm <= (1 + 1e-6) bound
    std::optional<Vector> witness;
};
/// Phi_k share source and target models and the target multiplicity.
CoronaRowResult corona_row(const std::vector<MultiAnalyticOperator>& phi, double tol = 1e-8);

/// Identity operator on F_f (x) C^m as a multi-analytic operator.
MultiAnalyticOperator identity_operator(ModelPtr model, Eigen::Index mult);

} // namespace fockdom
