#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fockdom/freewords.hpp"

namespace fockdom {

enum class FamilyKind { none, gs, xi };

struct FamilyTag {
    FamilyKind kind = FamilyKind::none;
    double s = 0.0;
};

/// Truncated noncommutative power series sum_alpha c_alpha Z_alpha with real
/// coefficients, stored per word in the graded-lex order of its table.
class FreeSeries {
public:
    FreeSeries() = default;
    FreeSeries(WordTablePtr table, std::vector<Coeff> coeffs, bool level_constant = false,
               FamilyTag tag = {});

    /// Series whose coefficient on every word of length k is levels[k].
    static FreeSeries from_levels(int n, const std::vector<Coeff>& levels,
                                  std::size_t cap = kDefaultDimCap, FamilyTag tag = {});
    static FreeSeries unit(int n, int degree, std::size_t cap = kDefaultDimCap);

    int n() const { return table_->n(); }
    int degree() const { return table_->degree(); }
    std::size_t size() const { return coeffs_.size(); }
    const WordTablePtr& table() const { return table_; }
    const std::vector<Coeff>& coeffs() const { return coeffs_; }
    bool level_constant() const { return level_constant_; }
    const FamilyTag& family() const { return tag_; }

    Coeff operator[](std::size_t index) const { return coeffs_[index]; }
    Coeff coefficient(const Word& w) const;
    /// Coefficient shared by all words of length k; requires level_constant().
    Coeff level_value(int k) const;
    double at(std::size_t index) const { return static_cast<double>(coeffs_[index]); }

    /// Same series restricted to words of length <= degree.
    FreeSeries truncate(int degree) const;

    /// True when the constant term is 1 and every stored coefficient is > 0.
    bool is_weight_family() const;
    /// First word (in index order) with a non-positive coefficient, if any.
    std::optional<std::size_t> first_nonpositive() const;

    nlohmann::json to_json() const;
    static FreeSeries from_json(const nlohmann::json& j, std::size_t cap = kDefaultDimCap);

private:
    WordTablePtr table_;
    std::vector<Coeff> coeffs_;
    bool level_constant_ = false;
    FamilyTag tag_;
};

/// Cauchy product over factorizations alpha = beta gamma, truncated to the smaller degree.
/// Per-word sums run in increasing prefix length.
FreeSeries multiply(const FreeSeries& f, const FreeSeries& h);

/// Inverse with a_alpha = -sum_{beta gamma = alpha, |beta| >= 1} g_beta a_gamma.
FreeSeries invert(const FreeSeries& g);

/// b_alpha = C(s + k - 1, k) for |alpha| = k.
FreeSeries family_gs(double s, int n, int degree, std::size_t cap = kDefaultDimCap);
/// b_alpha = (|alpha| + 1)^s.
FreeSeries family_xis(double s, int n, int degree, std::size_t cap = kDefaultDimCap);

/// Generalized binomial C(x, k) by the product recurrence.
Coeff binomial(Coeff x, int k);

struct RegularityReport {
    bool regular = false;
    std::vector<std::string> positive_words;      // a_alpha > 0, |alpha| >= 1
    std::vector<std::string> nonnegative_linear;  // a_{g_i} >= 0
};
RegularityReport is_regular_domain(const FreeSeries& a);

struct RadiusDiagnostic {
    std::vector<double> values;  // level k = 1..N
    std::string trend;           // "constant", "decreasing", "increasing", "mixed", "empty"
    bool divergence_trend = false;
};
RadiusDiagnostic convergence_radius_diagnostic(const FreeSeries& b);

struct RatioSummary {
    std::vector<double> sup_per_generator;  // observed over |alpha| < N
    double sup = 0.0;
    std::vector<double> sup_per_level;      // max over i and |alpha| = k, for k < N
};
/// Observed sup of b_alpha / b_{g_i alpha} through the truncation.
RatioSummary ratio_summary(const FreeSeries& b);

struct Envelope {
    FreeSeries g1_inverse;  // 1 - sum |a_alpha|/c Z_alpha
    FreeSeries g2_inverse;  // 1 - (1/d)(Z_1 + ... + Z_n)
    FreeSeries g2;          // b_alpha = d^{-|alpha|}
    double c = 0.5;
    double d = 1.0;
    bool closed_form = false;
    bool provisional = false;
    std::string note;
};
/// Envelope domains of a weight family. `d` is closed-form for built-in
/// families and otherwise the observed sup through the truncation degree.
Envelope envelope_series(const FreeSeries& b, double c = 0.5);

/// Closed-form sup_k b_k / b_{k+1} for built-ins; nullopt for other series.
std::optional<double> closed_form_sup_ratio(const FamilyTag& tag);

/// Parse "gs:<s>", "xi:<s>" or "file:<path>" into a series of the given shape.
/// File series must match `n` when n > 0; they are truncated to `degree` when
/// longer and returned unchanged when shorter.
FreeSeries parse_family(const std::string& name, int n, int degree, std::size_t cap = kDefaultDimCap);

} // namespace fockdom
