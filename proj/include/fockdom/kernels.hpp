#pragma once

#include <vector>

#include "fockdom/fockspace.hpp"

// Word-indexed kernels. The serial and parallel paths compute identical results
// bit for bit: work is split into independent outputs, and every reduction runs
// over fixed blocks of kReduceBlock words whose partial sums are added in order.

namespace fockdom::kernels {

enum class Exec { serial, parallel };

inline constexpr std::size_t kReduceBlock = 32;

/// (A (x) I_m) X
Matrix shift_left(const ShiftOperator& a, const Matrix& x, Eigen::Index m, Exec ex = Exec::parallel);
/// (A^* (x) I_m) X
Matrix shift_left_adjoint(const ShiftOperator& a, const Matrix& x, Eigen::Index m, Exec ex = Exec::parallel);
/// X (A (x) I_m)
Matrix shift_right(const Matrix& x, const ShiftOperator& a, Eigen::Index m, Exec ex = Exec::parallel);

/// T_alpha for every word of the table, built as T_{g_i alpha} = T_i T_alpha.
std::vector<Matrix> word_products(const std::vector<Matrix>& t, const WordTable& table,
                                  Exec ex = Exec::parallel);

/// sum_{begin <= idx < end} coef[idx] P_idx M P_idx^*, with M = I when `middle` is null.
Matrix weighted_gram_sum(const std::vector<Matrix>& p, const std::vector<double>& coef, const Matrix* middle,
                         std::size_t begin, std::size_t end, Exec ex = Exec::parallel);

/// Row block idx (rows idx*m .. idx*m+m-1, m = left.rows()) holds scale[idx] * left * P_idx^*.
Matrix stacked_blocks(const std::vector<Matrix>& p, const std::vector<double>& scale, const Matrix& left,
                      std::size_t count, Exec ex = Exec::parallel);

/// Column (alpha, e) = sqrt(b_alpha) (W_alpha (x) I) theta(:, e), alpha over the source table.
Matrix symbol_extend(const Matrix& theta, const UniversalModel& target, Eigen::Index target_mult,
                     const WordTable& source, const std::vector<double>& source_b, Exec ex = Exec::parallel);

/// Threads the parallel path will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

} // namespace fockdom::kernels
