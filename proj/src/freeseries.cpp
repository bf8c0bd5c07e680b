#include "fockdom/freeseries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fockdom {

namespace {

std::vector<Coeff> broadcast_levels(const WordTable& t, const std::vector<Coeff>& levels) {
    std::vector<Coeff> c(t.size());
    for (int k = 0; k <= t.degree(); ++k) {
        const std::size_t off = t.level_offset(k);
        std::fill(c.begin() + static_cast<std::ptrdiff_t>(off),
                  c.begin() + static_cast<std::ptrdiff_t>(off + t.level_size(k)),
                  levels[static_cast<std::size_t>(k)]);
    }
    return c;
}

} // namespace

FreeSeries::FreeSeries(WordTablePtr table, std::vector<Coeff> coeffs, bool level_constant, FamilyTag tag)
    : table_(std::move(table)), coeffs_(std::move(coeffs)), level_constant_(level_constant), tag_(tag) {
    if (!table_) throw Error("series: missing word table");
    if (coeffs_.size() != table_->size()) {
        throw Error("series: coefficient count does not match the word table");
    }
}

FreeSeries FreeSeries::from_levels(int n, const std::vector<Coeff>& levels, std::size_t cap, FamilyTag tag) {
    if (levels.empty()) throw Error("series: empty level list");
    auto t = make_table(n, static_cast<int>(levels.size()) - 1, cap);
    auto c = broadcast_levels(*t, levels);
    return FreeSeries(t, std::move(c), true, tag);
}

FreeSeries FreeSeries::unit(int n, int degree, std::size_t cap) {
    std::vector<Coeff> levels(static_cast<std::size_t>(degree) + 1, 0.0L);
    levels[0] = 1.0L;
    return from_levels(n, levels, cap);
}

Coeff FreeSeries::coefficient(const Word& w) const { return coeffs_[table_->index_of(w)]; }

Coeff FreeSeries::level_value(int k) const {
    if (!level_constant_) throw Error("series: not level-constant");
    return coeffs_[table_->level_offset(k)];
}

FreeSeries FreeSeries::truncate(int degree) const {
    if (degree > this->degree()) throw Error("degree exceeded");
    if (degree == this->degree()) return *this;
    auto t = make_table(n(), degree, table_->size());
    std::vector<Coeff> c(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(t->size()));
    return FreeSeries(t, std::move(c), level_constant_, tag_);
}

bool FreeSeries::is_weight_family() const {
    return !coeffs_.empty() && coeffs_[0] == 1.0L && !first_nonpositive();
}

std::optional<std::size_t> FreeSeries::first_nonpositive() const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (!(coeffs_[i] > 0.0L)) return i;
    }
    return std::nullopt;
}

nlohmann::json FreeSeries::to_json() const {
    nlohmann::json j;
    j["n"] = n();
    j["degree"] = degree();
    if (level_constant_) {
        j["kind"] = "level";
        auto lv = nlohmann::json::array();
        for (int k = 0; k <= degree(); ++k) lv.push_back(static_cast<double>(level_value(k)));
        j["level_values"] = lv;
    } else {
        j["kind"] = "explicit";
        auto obj = nlohmann::json::object();
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] != 0.0L) obj[table_->word_at(i).to_string()] = static_cast<double>(coeffs_[i]);
        }
        j["coefficients"] = obj;
    }
    return j;
}

FreeSeries FreeSeries::from_json(const nlohmann::json& j, std::size_t cap) {
    try {
        const int n = j.at("n").get<int>();
        const int degree = j.at("degree").get<int>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "level") {
            const auto& lv = j.at("level_values");
            if (lv.size() != static_cast<std::size_t>(degree) + 1) {
                throw Error("series file: level_values must have degree+1 entries");
            }
            std::vector<Coeff> levels;
            for (const auto& v : lv) levels.push_back(static_cast<Coeff>(v.get<double>()));
            auto t = make_table(n, degree, cap);
            return FreeSeries(t, broadcast_levels(*t, levels), true);
        }
        if (kind == "explicit") {
            auto t = make_table(n, degree, cap);
            std::vector<Coeff> c(t->size(), 0.0L);
            for (const auto& [key, v] : j.at("coefficients").items()) {
                c[t->index_of(Word::parse(n, key))] = static_cast<Coeff>(v.get<double>());
            }
            return FreeSeries(t, std::move(c), false);
        }
        throw Error("series file: unknown kind \"" + kind + "\"");
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("series file: ") + e.what());
    }
}

FreeSeries multiply(const FreeSeries& f, const FreeSeries& h) {
    if (f.n() != h.n()) throw Error("multiply: mismatched generator counts");
    const FreeSeries& small = f.degree() <= h.degree() ? f : h;
    const WordTable& t = *small.table();
    const int N = t.degree();

    if (f.level_constant() && h.level_constant()) {
        std::vector<Coeff> levels(static_cast<std::size_t>(N) + 1, 0.0L);
        for (int k = 0; k <= N; ++k) {
            Coeff s = 0.0L;
            for (int j = 0; j <= k; ++j) s += f.level_value(j) * h.level_value(k - j);
            levels[static_cast<std::size_t>(k)] = s;
        }
        return FreeSeries(small.table(), broadcast_levels(t, levels), true);
    }

    std::vector<Coeff> out(t.size());
    const auto total = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < total; ++ii) {
        const auto idx = static_cast<std::size_t>(ii);
        const int k = t.length(idx);
        Coeff s = 0.0L;
        for (int j = 0; j <= k; ++j) s += f[t.prefix(idx, j)] * h[t.suffix(idx, j)];
        out[idx] = s;
    }
    return FreeSeries(small.table(), std::move(out), false);
}

FreeSeries invert(const FreeSeries& g) {
    if (g.size() == 0 || g[0] != 1.0L) throw Error("invert: nonunit constant term");
    const WordTable& t = *g.table();
    const int N = t.degree();

    if (g.level_constant()) {
        std::vector<Coeff> a(static_cast<std::size_t>(N) + 1, 0.0L);
        a[0] = 1.0L;
        for (int k = 1; k <= N; ++k) {
            Coeff s = 0.0L;
            for (int j = 1; j <= k; ++j) s += g.level_value(j) * a[static_cast<std::size_t>(k - j)];
            a[static_cast<std::size_t>(k)] = -s;
        }
        return FreeSeries(g.table(), broadcast_levels(t, a), true);
    }

    std::vector<Coeff> a(t.size(), 0.0L);
    a[0] = 1.0L;
    for (int k = 1; k <= N; ++k) {
        const auto off = static_cast<std::ptrdiff_t>(t.level_offset(k));
        const auto cnt = static_cast<std::ptrdiff_t>(t.level_size(k));
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < cnt; ++r) {
            const auto idx = static_cast<std::size_t>(off + r);
            Coeff s = 0.0L;
            for (int j = 1; j <= k; ++j) s += g[t.prefix(idx, j)] * a[t.suffix(idx, j)];
            a[idx] = -s;
        }
    }
    return FreeSeries(g.table(), std::move(a), false);
}

Coeff binomial(Coeff x, int k) {
    Coeff c = 1.0L;
    for (int j = 1; j <= k; ++j) c *= (x - static_cast<Coeff>(j - 1)) / static_cast<Coeff>(j);
    return c;
}

FreeSeries family_gs(double s, int n, int degree, std::size_t cap) {
    if (!(s > 0.0)) throw Error("family gs: s must be positive");
    std::vector<Coeff> levels(static_cast<std::size_t>(degree) + 1);
    levels[0] = 1.0L;
    for (int k = 1; k <= degree; ++k) {
        // C(s+k-1, k) = C(s+k-2, k-1) * (s+k-1)/k
        levels[static_cast<std::size_t>(k)] =
            levels[static_cast<std::size_t>(k - 1)] * (static_cast<Coeff>(s) + static_cast<Coeff>(k - 1)) /
            static_cast<Coeff>(k);
    }
    return FreeSeries::from_levels(n, levels, cap, {FamilyKind::gs, s});
}

FreeSeries family_xis(double s, int n, int degree, std::size_t cap) {
    std::vector<Coeff> levels(static_cast<std::size_t>(degree) + 1);
    for (int k = 0; k <= degree; ++k) {
        levels[static_cast<std::size_t>(k)] = std::pow(static_cast<Coeff>(k + 1), static_cast<Coeff>(s));
    }
    levels[0] = 1.0L;
    return FreeSeries::from_levels(n, levels, cap, {FamilyKind::xi, s});
}

RegularityReport is_regular_domain(const FreeSeries& a) {
    RegularityReport rep;
    const WordTable& t = *a.table();
    Coeff scale = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) scale = std::max(scale, std::fabs(a[i]));
    const Coeff zero_tol = 1e-13L * scale;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (a[i] > zero_tol) rep.positive_words.push_back(t.word_at(i).to_string());
    }
    if (t.degree() >= 1) {
        for (int i = 1; i <= t.n(); ++i) {
            if (!(a[static_cast<std::size_t>(i)] < -zero_tol)) {
                rep.nonnegative_linear.push_back(std::to_string(i));
            }
        }
    }
    rep.regular = rep.positive_words.empty() && rep.nonnegative_linear.empty();
    return rep;
}

RadiusDiagnostic convergence_radius_diagnostic(const FreeSeries& b) {
    RadiusDiagnostic d;
    const WordTable& t = *b.table();
    for (int k = 1; k <= t.degree(); ++k) {
        Coeff s = 0.0L;
        const std::size_t off = t.level_offset(k);
        for (std::size_t r = 0; r < t.level_size(k); ++r) s += b[off + r] * b[off + r];
        d.values.push_back(static_cast<double>(std::pow(s, 1.0L / (2.0L * k))));
    }
    if (d.values.empty()) {
        d.trend = "empty";
        return d;
    }
    bool up = false;
    bool down = false;
    for (std::size_t i = 1; i < d.values.size(); ++i) {
        const double prev = d.values[i - 1];
        const double slack = 1e-12 * std::max(std::fabs(prev), 1e-300);
        if (d.values[i] > prev + slack) up = true;
        if (d.values[i] < prev - slack) down = true;
    }
    d.trend = up && down ? "mixed" : up ? "increasing" : down ? "decreasing" : "constant";
    if (d.values.size() >= 3 && d.trend == "increasing") {
        bool convex = true;
        for (std::size_t i = 2; i < d.values.size(); ++i) {
            if (d.values[i] - d.values[i - 1] < (d.values[i - 1] - d.values[i - 2]) * (1.0 - 1e-9)) convex = false;
        }
        d.divergence_trend = convex;
    }
    return d;
}

RatioSummary ratio_summary(const FreeSeries& b) {
    const WordTable& t = *b.table();
    RatioSummary r;
    r.sup_per_generator.assign(static_cast<std::size_t>(t.n()), 0.0);
    for (int k = 0; k < t.degree(); ++k) {
        double lv = 0.0;
        const std::size_t off = t.level_offset(k);
        for (std::size_t q = 0; q < t.level_size(k); ++q) {
            const std::size_t idx = off + q;
            for (int i = 1; i <= t.n(); ++i) {
                const double ratio = static_cast<double>(b[idx] / b[t.prepend(i, idx)]);
                auto& g = r.sup_per_generator[static_cast<std::size_t>(i - 1)];
                g = std::max(g, ratio);
                lv = std::max(lv, ratio);
            }
        }
        r.sup_per_level.push_back(lv);
        r.sup = std::max(r.sup, lv);
    }
    return r;
}

std::optional<double> closed_form_sup_ratio(const FamilyTag& tag) {
    switch (tag.kind) {
    case FamilyKind::gs:
        // b_k / b_{k+1} = (k+1)/(s+k): decreasing in k when s < 1, increasing to 1 otherwise
        return tag.s <= 1.0 ? 1.0 / tag.s : 1.0;
    case FamilyKind::xi:
        // ((k+1)/(k+2))^s: largest at k = 0 when s < 0, tends to 1 otherwise
        return tag.s < 0.0 ? std::pow(2.0, -tag.s) : 1.0;
    case FamilyKind::none:
        break;
    }
    return std::nullopt;
}

Envelope envelope_series(const FreeSeries& b, double c) {
    if (!b.is_weight_family()) throw Error("envelope: series is not a weight family");
    if (!(c > 0.0 && c < 1.0)) throw Error("envelope: c must lie in (0, 1)");
    Envelope env;
    env.c = c;
    const int n = b.n();
    const int N = b.degree();

    if (auto cf = closed_form_sup_ratio(b.family())) {
        env.d = *cf;
        env.closed_form = true;
    } else {
        const RatioSummary rs = ratio_summary(b);
        env.d = rs.sup;
        env.note = "observed sup through degree " + std::to_string(N);
        const auto& lv = rs.sup_per_level;
        if (lv.size() < 2) {
            env.provisional = true;
        } else {
            const double before = *std::max_element(lv.begin(), lv.end() - 1);
            env.provisional = lv.back() > before * (1.0 + 1e-12);
        }
        if (env.provisional) env.note += "; sup still growing at the last level, envelope provisional";
    }

    const FreeSeries a = invert(b);
    std::vector<Coeff> g1(a.size());
    g1[0] = 1.0L;
    for (std::size_t i = 1; i < a.size(); ++i) g1[i] = -std::fabs(a[i]) / static_cast<Coeff>(c);
    env.g1_inverse = FreeSeries(a.table(), std::move(g1), a.level_constant());

    std::vector<Coeff> inv(static_cast<std::size_t>(N) + 1, 0.0L);
    std::vector<Coeff> fwd(static_cast<std::size_t>(N) + 1, 1.0L);
    inv[0] = 1.0L;
    if (N >= 1) inv[1] = -1.0L / static_cast<Coeff>(env.d);
    for (int k = 1; k <= N; ++k) {
        fwd[static_cast<std::size_t>(k)] = fwd[static_cast<std::size_t>(k - 1)] / static_cast<Coeff>(env.d);
    }
    env.g2_inverse = FreeSeries(b.table(), [&] {
        std::vector<Coeff> c2(b.size(), 0.0L);
        c2[0] = 1.0L;
        for (int i = 1; N >= 1 && i <= n; ++i) c2[static_cast<std::size_t>(i)] = inv[1];
        return c2;
    }(), true);
    env.g2 = FreeSeries(b.table(), [&] {
        std::vector<Coeff> c2(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) c2[i] = fwd[static_cast<std::size_t>(b.table()->length(i))];
        return c2;
    }(), true);
    return env;
}

FreeSeries parse_family(const std::string& name, int n, int degree, std::size_t cap) {
    const auto colon = name.find(':');
    if (colon == std::string::npos) throw Error("family: expected gs:<s>, xi:<s> or file:<path>, got \"" + name + "\"");
    const std::string kind = name.substr(0, colon);
    const std::string arg = name.substr(colon + 1);
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw Error("family: cannot parse parameter \"" + s + "\"");
        return v;
    };
    if (kind == "gs") return family_gs(number(arg), n, degree, cap);
    if (kind == "xi") return family_xis(number(arg), n, degree, cap);
    if (kind == "file") {
        std::ifstream in(arg);
        if (!in) throw Error("family: cannot open \"" + arg + "\"");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("family file: ") + e.what());
        }
        FreeSeries s = FreeSeries::from_json(j, cap);
        if (n > 0 && s.n() != n) throw Error("family file: generator count differs from --n");
        if (degree >= 0 && degree < s.degree()) return s.truncate(degree);
        return s;
    }
    throw Error("family: unknown kind \"" + kind + "\"");
}

} // namespace fockdom
