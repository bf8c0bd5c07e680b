#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "fockdom/freeseries.hpp"

namespace fockdom {

/// Operator on the truncated Fock space with at most one nonzero per column:
/// e_col -> weight[col] * e_{row[col]}, or 0 when row[col] == npos. Rows are
/// hit at most once, so the map is a partial weighted permutation.
struct ShiftOperator {
    std::size_t dim = 0;
    std::vector<std::size_t> row;
    std::vector<double> weight;

    Matrix dense() const;
};

/// Weighted left creation tuple W_i = S_i D_i compressed to words of length
/// <= N, together with the plain left and right creation tuples.
class UniversalModel {
public:
    /// `b` must be a weight family of degree >= N; coefficients past N are ignored.
    UniversalModel(const FreeSeries& b, int N);

    int n() const { return table_->n(); }
    int degree() const { return table_->degree(); }
    std::size_t dim() const { return table_->size(); }
    const WordTablePtr& table() const { return table_; }
    const FreeSeries& weights() const { return b_; }
    double b(std::size_t index) const { return static_cast<double>(b_[index]); }

    const ShiftOperator& W(int i) const { return w_.at(static_cast<std::size_t>(i - 1)); }
    const ShiftOperator& S(int i) const { return s_.at(static_cast<std::size_t>(i - 1)); }
    const ShiftOperator& R(int i) const { return r_.at(static_cast<std::size_t>(i - 1)); }

    /// Dense W_1..W_n.
    std::vector<Matrix> dense_tuple() const;

private:
    WordTablePtr table_;
    FreeSeries b_;
    std::vector<ShiftOperator> w_;
    std::vector<ShiftOperator> s_;
    std::vector<ShiftOperator> r_;
};

/// Plain left creation S_i (weights 1).
ShiftOperator left_creation(const WordTable& t, int i);
/// Plain right creation R_i: e_alpha -> e_{alpha g_i}.
ShiftOperator right_creation(const WordTable& t, int i);

Matrix vacuum_projection(const WordTable& t);

/// A (x) I_m with Fock index major, multiplicity minor.
Matrix tensor_with_identity(const Matrix& a, Eigen::Index m);

/// Matrix dump: {"shape":[r,c],"entries":[[re,im],...]} row-major.
nlohmann::json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const nlohmann::json& j);
/// Little-endian float64 (re, im) pairs, row-major.
void write_matrix_sidecar(const Matrix& a, const std::string& path);
Matrix read_matrix_sidecar(const std::string& path, Eigen::Index rows, Eigen::Index cols);

} // namespace fockdom
