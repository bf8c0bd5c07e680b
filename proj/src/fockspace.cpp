#include "fockdom/fockspace.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fockdom {

Matrix ShiftOperator::dense() const {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
        if (row[c] != WordTable::npos) {
            m(static_cast<Eigen::Index>(row[c]), static_cast<Eigen::Index>(c)) = weight[c];
        }
    }
    return m;
}

ShiftOperator left_creation(const WordTable& t, int i) {
    ShiftOperator s{t.size(), std::vector<std::size_t>(t.size()), std::vector<double>(t.size(), 0.0)};
    for (std::size_t c = 0; c < t.size(); ++c) {
        s.row[c] = t.prepend(i, c);
        if (s.row[c] != WordTable::npos) s.weight[c] = 1.0;
    }
    return s;
}

ShiftOperator right_creation(const WordTable& t, int i) {
    ShiftOperator s{t.size(), std::vector<std::size_t>(t.size()), std::vector<double>(t.size(), 0.0)};
    for (std::size_t c = 0; c < t.size(); ++c) {
        s.row[c] = t.append(c, i);
        if (s.row[c] != WordTable::npos) s.weight[c] = 1.0;
    }
    return s;
}

UniversalModel::UniversalModel(const FreeSeries& b, int N) {
    if (N < 0) throw Error("model: degree must be >= 0");
    if (b.degree() < N) throw Error("model: weight series degree " + std::to_string(b.degree()) +
                                    " below model degree " + std::to_string(N));
    b_ = b.truncate(N);
    if (auto bad = b_.first_nonpositive()) {
        throw Error("model: non-positive weight at word \"" + b_.table()->word_at(*bad).to_string() + "\"");
    }
    if (b_[0] != 1.0L) throw Error("model: weight family must have constant term 1");
    table_ = b_.table();
    const WordTable& t = *table_;
    for (int i = 1; i <= t.n(); ++i) {
        ShiftOperator w = left_creation(t, i);
        for (std::size_t c = 0; c < t.size(); ++c) {
            if (w.row[c] != WordTable::npos) {
                w.weight[c] = static_cast<double>(std::sqrt(b_[c] / b_[w.row[c]]));
            }
        }
        w_.push_back(std::move(w));
        s_.push_back(left_creation(t, i));
        r_.push_back(right_creation(t, i));
    }
}

std::vector<Matrix> UniversalModel::dense_tuple() const {
    std::vector<Matrix> out;
    for (const auto& w : w_) out.push_back(w.dense());
    return out;
}

Matrix vacuum_projection(const WordTable& t) {
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.size()));
    p(0, 0) = 1.0;
    return p;
}

Matrix tensor_with_identity(const Matrix& a, Eigen::Index m) {
    if (m < 1) throw Error("tensor_with_identity: multiplicity must be >= 1");
    Matrix out = Matrix::Zero(a.rows() * m, a.cols() * m);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const Complex v = a(i, j);
            if (v == Complex(0.0, 0.0)) continue;
            for (Eigen::Index k = 0; k < m; ++k) out(i * m + k, j * m + k) = v;
        }
    }
    return out;
}

nlohmann::json matrix_to_json(const Matrix& a) {
    nlohmann::json j;
    j["shape"] = {a.rows(), a.cols()};
    auto e = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) e.push_back({a(i, k).real(), a(i, k).imag()});
    }
    j["entries"] = std::move(e);
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    try {
        const auto rows = j.at("shape").at(0).get<Eigen::Index>();
        const auto cols = j.at("shape").at(1).get<Eigen::Index>();
        const auto& e = j.at("entries");
        if (e.size() != static_cast<std::size_t>(rows * cols)) throw Error("matrix: entry count does not match shape");
        Matrix a(rows, cols);
        std::size_t p = 0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index k = 0; k < cols; ++k, ++p) {
                a(i, k) = Complex(e[p].at(0).get<double>(), e[p].at(1).get<double>());
            }
        }
        return a;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("matrix: ") + ex.what());
    }
}

namespace {

void put_le(std::ofstream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

double get_le(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw Error("matrix sidecar: truncated file");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    return std::bit_cast<double>(bits);
}

} // namespace

void write_matrix_sidecar(const Matrix& a, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("matrix sidecar: cannot open \"" + path + "\"");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            put_le(out, a(i, k).real());
            put_le(out, a(i, k).imag());
        }
    }
}

Matrix read_matrix_sidecar(const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("matrix sidecar: cannot open \"" + path + "\"");
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
            const double re = get_le(in);
            const double im = get_le(in);
            a(i, k) = Complex(re, im);
        }
    }
    return a;
}

} // namespace fockdom
