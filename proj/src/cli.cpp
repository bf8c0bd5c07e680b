#include "fockdom/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "fockdom/domainops.hpp"
#include "fockdom/factorization.hpp"
#include "fockdom/kernels.hpp"
#include "fockdom/modelcheck.hpp"

#ifndef FOCKDOM_VERSION
#define FOCKDOM_VERSION "0.0.0"
#endif

namespace fockdom::cli {

using nlohmann::json;

namespace {

struct RunConfig {
    std::string family = "gs:1";
    int n = 0;  // 0: take it from the input (files) or use 2
    int degree = 4;
    Tolerances tols;
    std::size_t cap = kDefaultDimCap;
    std::uint64_t seed = 20240601;
    std::string output;
    std::string format = "json";
    int threads = 0;

    // command inputs
    std::string tuple = "nilpotent:3";
    std::string tuple2;
    std::string intertwiner;
    std::string subspace;
    std::string instance;
    std::string grid = "0.25,0.5,0.75,0.9,0.99";
    std::string kernel_out;
    Eigen::Index mult = 1;
    Eigen::Index mult_a = 1;
    Eigen::Index mult_b = 2;
    int seeds = 1;
    int min_level = 1;
    int count = 2;
    double scale = 0.9;
};

int resolved_n(const RunConfig& c) { return c.n > 0 ? c.n : 2; }

FreeSeries family_at(const RunConfig& c, const std::string& name, int n, int degree) {
    const bool file = name.rfind("file:", 0) == 0;
    return parse_family(name, file ? n : (n > 0 ? n : 2), degree, c.cap);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open \"" + path + "\"");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw Error("\"" + path + "\": " + e.what());
    }
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw Error("grid: cannot parse \"" + item + "\"");
        if (!(v > 0.0 && v < 1.0)) throw Error("grid: values must lie in (0, 1)");
        out.push_back(v);
    }
    if (out.empty()) throw Error("grid: empty");
    return out;
}

long parse_count(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || v <= 0) throw Error(what + ": expected a positive integer, got \"" + text + "\"");
    return v;
}

// Tuple sources: file:<path>, zero:<d>, nilpotent:<d>, model, model-sum:<k>.
OperatorTuple load_tuple(const RunConfig& c, const std::string& name, linalg::Rng& rng) {
    const auto colon = name.find(':');
    const std::string kind = name.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
    const int n = resolved_n(c);
    if (kind == "file") {
        OperatorTuple t = OperatorTuple::from_json(read_json_file(arg));
        if (c.n > 0 && t.n() != c.n) throw Error("tuple file: generator count differs from --n");
        return t;
    }
    if (kind == "zero") return OperatorTuple::zero(n, parse_count(arg, "zero tuple"));
    if (kind == "nilpotent") {
        const auto d = parse_count(arg, "nilpotent tuple");
        const FreeSeries g = family_at(c, c.family, n, static_cast<int>(std::max<long>(d, c.degree)));
        return random_nilpotent_member(g.n(), d, g, rng, c.tols);
    }
    if (kind == "model" || kind == "model-sum") {
        const FreeSeries g = family_at(c, c.family, n, c.degree);
        const OperatorTuple w = OperatorTuple::from_model(UniversalModel(g, c.degree));
        if (kind == "model") return w;
        const auto k = parse_count(arg, "model-sum");
        return OperatorTuple::direct_sum(std::vector<OperatorTuple>(static_cast<std::size_t>(k), w));
    }
    throw Error("tuple: expected file:<path>, zero:<d>, nilpotent:<d>, model or model-sum:<k>");
}

json series_values(const FreeSeries& s) {
    json j;
    j["n"] = s.n();
    j["degree"] = s.degree();
    if (s.level_constant()) {
        j["kind"] = "level";
        std::vector<double> lv;
        for (int k = 0; k <= s.degree(); ++k) lv.push_back(static_cast<double>(s.level_value(k)));
        j["level_values"] = lv;
    } else {
        j["kind"] = "explicit";
        json coeffs = json::object();
        for (std::size_t i = 0; i < s.size(); ++i) coeffs[s.table()->word_at(i).to_string()] = s.at(i);
        j["coefficients"] = coeffs;
    }
    return j;
}

json membership_json(const MembershipReport& r) {
    return {{"degree", r.degree},
            {"verdict", r.verdict},
            {"delta_norms", r.delta_norms},
            {"delta_increments", r.delta_increments},
            {"delta_min_eig", r.delta_min_eig},
            {"delta_norm", r.delta_norm},
            {"psd", r.psd},
            {"stabilized", r.stabilized},
            {"purity_residuals", r.purity_residuals},
            {"partial_sum_excess", r.partial_sum_excess},
            {"caveat", "purity is judged from the residual trend through the truncation degree"}};
}

// ---- series

json cmd_series_invert(const RunConfig& c, linalg::Rng&) {
    const FreeSeries g = family_at(c, c.family, c.n, c.degree);
    const FreeSeries a = invert(g);
    const FreeSeries u = multiply(g, a);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        err = std::max(err, static_cast<double>(std::fabs(u[i] - (i == 0 ? 1.0L : 0.0L))));
    }
    const RegularityReport reg = is_regular_domain(a);
    return {{"inverse", series_values(a)},
            {"unit_error", err},
            {"regular_domain", reg.regular},
            {"positive_higher_coefficients", reg.positive_words},
            {"nonnegative_linear_coefficients", reg.nonnegative_linear}};
}

// ---- model

json cmd_model_defect(const RunConfig& c, linalg::Rng&) {
    const FreeSeries b = family_at(c, c.family, c.n, c.degree);
    const int N = b.degree();
    const UniversalModel model(b, N);
    const FreeSeries a = invert(b);
    const RealVector d = defect_diagonal(model, a, N);
    double dev = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) dev = std::max(dev, std::fabs(d(i) - (i == 0 ? 1.0 : 0.0)));
    json r{{"dim", model.dim()}, {"degree", N}, {"max_deviation_closed_form", dev}};
    constexpr std::size_t kDenseLimit = 1100;
    double worst = dev;
    if (model.dim() <= kDenseLimit) {
        const Matrix vac = vacuum_projection(*model.table());
        const double dense = linalg::max_abs(defect_operator_dense(model, a, N) - vac);
        const double res =
            linalg::max_abs(vacuum_resolution(model) - Matrix::Identity(model.dim(), model.dim()));
        r["max_deviation_dense"] = dense;
        r["max_deviation_resolution"] = res;
        worst = std::max({worst, dense, res});
    } else {
        r["max_deviation_dense"] = nullptr;
        r["max_deviation_resolution"] = nullptr;
        r["note"] = "dense products skipped above dimension 1100";
    }
    r["max_deviation"] = worst;
    r["verdict"] = worst <= 1e-12 ? "identity-holds" : "deviation-above-1e-12";
    return r;
}

json cmd_model_check(const RunConfig& c, linalg::Rng&) {
    const FreeSeries b = family_at(c, c.family, c.n, c.degree);
    const AdmissibilityReport r = check_admissibility(b, b.degree());
    json checks = json::array();
    for (const auto& f : r.checks) {
        checks.push_back({{"name", f.name}, {"status", f.status}, {"truncation_limited", f.truncation_limited}, {"note", f.note}});
    }
    return {{"degree", r.degree},
            {"observed_sup_ratio_per_generator", r.observed_sup_ratio},
            {"observed_sup_ratio", r.observed_sup},
            {"observed_sup_label", "observed through degree " + std::to_string(r.degree)},
            {"sup_ratio_per_level", r.sup_ratio_per_level},
            {"radius_values", r.radius_values},
            {"radius_trend", r.radius_trend},
            {"partial_sum_norms", r.partial_sum_norms},
            {"partial_sum_sup", r.partial_sum_sup},
            {"cauchy_increments", r.cauchy_increments},
            {"cauchy_increments_label", "diagnostic"},
            {"checks", checks}};
}

json cmd_model_boundary(const RunConfig& c, linalg::Rng&) {
    const FreeSeries b = family_at(c, c.family, c.n, c.degree + 1);
    const BoundaryReport r = boundary_property(b, c.degree);
    return {{"degree", r.degree},
            {"level_constant", r.level_constant},
            {"s_min", r.s_min},
            {"s_max", r.s_max},
            {"sup", r.sup},
            {"sup_level", r.sup_level},
            {"tail_min", r.tail_min},
            {"tail_max", r.tail_max},
            {"tail_monotone", r.tail_monotone},
            {"gap", r.gap},
            {"verdict", r.verdict},
            {"reason", r.reason},
            {"compactness_tail", r.compactness_tail},
            {"compactness_tail_small", r.compactness_tail_small}};
}

// ---- domain

json cmd_domain_membership(const RunConfig& c, linalg::Rng& rng) {
    const OperatorTuple t = load_tuple(c, c.tuple, rng);
    const FreeSeries g = family_at(c, c.family, t.n(), c.degree);
    json r = membership_json(membership(t, g, g.degree(), c.tols));
    r["dim"] = t.dim();
    return r;
}

json cmd_domain_radial(const RunConfig& c, linalg::Rng& rng) {
    const OperatorTuple t = load_tuple(c, c.tuple, rng);
    const FreeSeries g = family_at(c, c.family, t.n(), c.degree);
    const RadialScan s = radial_scan(t, g, parse_grid(c.grid), g.degree(), c.tols);
    json pts = json::array();
    for (const auto& p : s.points) {
        pts.push_back({{"r", p.r}, {"verdict", p.report.verdict}, {"delta_min_eig", p.report.delta_min_eig},
                       {"purity_residual", p.report.purity_residuals.back()}});
    }
    json r{{"dim", t.dim()}, {"points", pts}};
    r["largest_pure_r"] = s.largest_pure_r ? json(*s.largest_pure_r) : json(nullptr);
    return r;
}

json cmd_domain_berezin(const RunConfig& c, linalg::Rng& rng) {
    const OperatorTuple t = load_tuple(c, c.tuple, rng);
    const FreeSeries g = family_at(c, c.family, t.n(), c.degree);
    const BerezinKernel k = berezin_kernel(t, g, g.degree(), c.tols);
    double worst = 0.0;
    for (double v : k.intertwining) worst = std::max(worst, v);
    json r{{"dim", t.dim()},
           {"degree", g.degree()},
           {"multiplicity", k.multiplicity},
           {"isometry_defect", k.isometry_defect},
           {"intertwining", k.intertwining},
           {"intertwining_max", worst},
           {"verdict", k.isometry_defect <= c.tols.intertwine && worst <= c.tols.intertwine ? "isometric-dilation"
                                                                                            : "defects-above-tolerance"}};
    if (!c.kernel_out.empty()) {
        std::ofstream f(c.kernel_out);
        if (!f) throw Error("cannot write \"" + c.kernel_out + "\"");
        f << matrix_to_json(k.K).dump() << '\n';
        r["kernel_file"] = c.kernel_out;
    }
    return r;
}

json cmd_domain_dilation_index(const RunConfig& c, linalg::Rng& rng) {
    const OperatorTuple t = load_tuple(c, c.tuple, rng);
    const FreeSeries g = family_at(c, c.family, t.n(), c.degree);
    return {{"dim", t.dim()}, {"dilation_index", dilation_index(t, g, c.tols)}};
}

// ---- dilation

json cmd_dilation_minimality(const RunConfig& c, linalg::Rng& rng) {
    const OperatorTuple t = load_tuple(c, c.tuple, rng);
    const FreeSeries g = family_at(c, c.family, t.n(), c.degree);
    const BerezinKernel k = berezin_kernel(t, g, g.degree(), c.tols);
    const UniversalModel model(g, g.degree());
    const MinimalityReport m = minimality_check(k.K, model, k.multiplicity);
    const ReducedDilation red = reduce_dilation(k.K, model, k.multiplicity);
    return {{"dim", t.dim()},
            {"multiplicity", k.multiplicity},
            {"coinvariance_defect", m.coinvariance_defect},
            {"span_rank", m.span_rank},
            {"vacuum_rank", m.vacuum_rank},
            {"vacuum_nullity", m.vacuum_nullity},
            {"flag_span", m.flag_span},
            {"flag_vacuum", m.flag_vacuum},
            {"flag_orthogonal", m.flag_orthogonal},
            {"flags_agree", m.agree},
            {"minimal", m.minimal},
            {"reduced_multiplicity", red.g0.cols()},
            {"reduction_orthogonality_defect", red.orthogonality_defect},
            {"reduction_tuple_change", red.tuple_change}};
}

json cmd_dilation_equivalence(const RunConfig& c, linalg::Rng& rng) {
    if (c.tuple2.empty() || c.intertwiner.empty()) throw Error("equivalence: --tuple2 and --intertwiner are required");
    const OperatorTuple t = load_tuple(c, c.tuple, rng);
    const OperatorTuple tp = load_tuple(c, c.tuple2, rng);
    const Matrix v = matrix_from_json(read_json_file(c.intertwiner));
    const FreeSeries g = family_at(c, c.family, t.n(), c.degree);
    const LiftEquivalence e = lift_equivalence(t, tp, v, g, g.degree(), c.tols.residual);
    return {{"unitarity_defect", e.unitarity_defect}, {"residual", e.residual}, {"u", matrix_to_json(e.u)}};
}

// ---- beurling

Matrix vectors_from_json(const json& arr, Eigen::Index rows) {
    Matrix m(rows, static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j) {
        if (arr[j].size() != static_cast<std::size_t>(rows)) throw Error("subspace file: vector length differs from dim * K");
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto& e = arr[j][static_cast<std::size_t>(i)];
            m(i, static_cast<Eigen::Index>(j)) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

json cmd_beurling_factorize(const RunConfig& c, linalg::Rng& rng) {
    const ModelPtr f = make_model(family_at(c, c.family, c.n, c.degree), c.degree);
    InvariantSubspace m;
    if (!c.subspace.empty()) {
        const json j = read_json_file(c.subspace);
        try {
            const auto k = j.at("multiplicity").get<Eigen::Index>();
            if (k <= 0) throw Error("subspace file: multiplicity must be positive");
            m = make_invariant_subspace(vectors_from_json(j.at("vectors"), static_cast<Eigen::Index>(f->dim()) * k), *f, k);
        } catch (const json::exception& e) {
            throw Error(std::string("subspace file: ") + e.what());
        }
    } else {
        m = random_invariant_subspace(*f, c.mult, c.seeds, c.min_level, rng);
    }
    const BeurlingResult b = beurling_factorize(m, f, c.tols.residual);
    const double tol = c.tols.residual;
    const bool ok = b.partial_isometry_defect <= tol && b.range_distance <= tol && b.intertwining_residual <= tol;
    return {{"dim", f->dim()},
            {"multiplicity", m.mult},
            {"subspace_dim", m.basis.cols()},
            {"closure_defect", m.closure_defect},
            {"d", b.d},
            {"d_closed_form", b.d_closed_form},
            {"d_provisional", b.d_provisional},
            {"d_note", b.d_note},
            {"defect_dim", b.factor.defect_dim},
            {"hypothesis_min_eig", b.factor.hypothesis_min_eig},
            {"factor_residual", b.factor.factor_residual},
            {"partial_isometry_defect", b.partial_isometry_defect},
            {"range_distance", b.range_distance},
            {"intertwining_residual", b.intertwining_residual},
            {"boundary_residual", b.boundary_residual},
            {"verdict", ok ? "representation-verified" : "residuals-above-tolerance"}};
}

// ---- corona

struct CoronaInstance {
    MultiAnalyticOperator a;
    MultiAnalyticOperator b;
};

CoronaInstance corona_instance(const RunConfig& c, linalg::Rng& rng) {
    if (!c.instance.empty()) {
        const json j = read_json_file(c.instance);
        try {
            const int n = j.at("n").get<int>();
            const int N = j.at("degree").get<int>();
            const ModelPtr tgt = make_model(family_at(c, j.at("target").get<std::string>(), n, N), N);
            const ModelPtr sa = make_model(family_at(c, j.at("source_a").get<std::string>(), n, N), N);
            const ModelPtr sb = make_model(family_at(c, j.at("source_b").get<std::string>(), n, N), N);
            const auto mt = j.at("mult_target").get<Eigen::Index>();
            const Matrix ta = matrix_from_json(j.at("theta_a"));
            const Matrix tb = matrix_from_json(j.at("theta_b"));
            if (ta.rows() != static_cast<Eigen::Index>(tgt->dim()) * mt || tb.rows() != ta.rows()) {
                throw Error("corona instance: symbol rows must equal dim * mult_target");
            }
            return {from_symbol(ta, sa, ta.cols(), tgt, mt), from_symbol(tb, sb, tb.cols(), tgt, mt)};
        } catch (const json::exception& e) {
            throw Error(std::string("corona instance: ") + e.what());
        }
    }
    // Random instance A = B C_true with ||C_true|| = scale.
    const ModelPtr m = make_model(family_at(c, c.family, c.n, c.degree), c.degree);
    const Eigen::Index dim = static_cast<Eigen::Index>(m->dim());
    const Eigen::Index mt = c.mult;
    Matrix tb = Matrix::Zero(dim * mt, c.mult_b);
    tb.topRows(mt * (1 + m->n())) = linalg::random_complex(rng, mt * (1 + m->n()), c.mult_b);
    tb.topRows(mt) += 3.0 * Matrix::Identity(mt, c.mult_b);
    const MultiAnalyticOperator b = from_symbol(tb, m, c.mult_b, m, mt);
    Matrix tc = Matrix::Zero(dim * c.mult_b, c.mult_a);
    tc.topRows(c.mult_b) = linalg::random_complex(rng, c.mult_b, c.mult_a);
    MultiAnalyticOperator ctrue = from_symbol(tc, m, c.mult_a, m, c.mult_b);
    tc *= c.scale / linalg::spectral_norm(ctrue.M);
    ctrue = from_symbol(tc, m, c.mult_a, m, c.mult_b);
    const Matrix ta = b.M * ctrue.M.leftCols(c.mult_a);
    return {from_symbol(ta, m, c.mult_a, m, mt), b};
}

json cmd_corona_solve(const RunConfig& c, linalg::Rng& rng) {
    const CoronaInstance inst = corona_instance(c, rng);
    const CoronaResult r = corona_solve(inst.a, inst.b, c.tols.residual);
    json out{{"verdict", r.verdict},
             {"douglas_min_eig", r.douglas_min_eig},
             {"residual", r.residual},
             {"symbol_residual", r.symbol_residual},
             {"c_norm", r.c_norm},
             {"c_norm_least_squares", r.c_norm_least_squares},
             {"contractive", r.contractive},
             {"witness_gap", r.witness_gap}};
    out["witness"] = r.witness ? matrix_to_json(*r.witness) : json(nullptr);
    return out;
}

json cmd_corona_row(const RunConfig& c, linalg::Rng& rng) {
    std::vector<MultiAnalyticOperator> phi;
    if (!c.instance.empty()) {
        const json j = read_json_file(c.instance);
        try {
            const int n = j.at("n").get<int>();
            const int N = j.at("degree").get<int>();
            const ModelPtr tgt = make_model(family_at(c, j.at("target").get<std::string>(), n, N), N);
            const ModelPtr src = make_model(family_at(c, j.at("source").get<std::string>(), n, N), N);
            const auto mt = j.at("mult_target").get<Eigen::Index>();
            for (const auto& p : j.at("phi")) {
                const Matrix th = matrix_from_json(p);
                if (th.rows() != static_cast<Eigen::Index>(tgt->dim()) * mt) throw Error("corona row: symbol rows must equal dim * mult_target");
                phi.push_back(from_symbol(th, src, th.cols(), tgt, mt));
            }
        } catch (const json::exception& e) {
            throw Error(std::string("corona row instance: ") + e.what());
        }
    } else {
        // (e_0 + e_{g_k}) / sqrt 2 plus a small random perturbation on the linear words.
        const ModelPtr m = make_model(family_at(c, c.family, c.n, c.degree), c.degree);
        const Eigen::Index dim = static_cast<Eigen::Index>(m->dim());
        for (int k = 0; k < c.count; ++k) {
            Matrix th = Matrix::Zero(dim, 1);
            th(0, 0) = 1.0 / std::sqrt(2.0);
            th(1 + (k % m->n()), 0) += 1.0 / std::sqrt(2.0);
            th.block(1, 0, m->n(), 1) += 0.1 * linalg::random_complex(rng, m->n(), 1);
            phi.push_back(from_symbol(th, m, 1, m, 1));
        }
    }
    const CoronaRowResult r = corona_row(phi, c.tols.residual);
    json out{{"verdict", r.verdict},
             {"delta_hat", r.delta_hat},
             {"residual", r.residual},
             {"psi_norm", r.psi_norm},
             {"bound", r.bound},
             {"bound_ok", r.bound_ok}};
    out["witness"] = r.witness ? matrix_to_json(*r.witness) : json(nullptr);
    return out;
}

// ---- plumbing

json config_echo(const RunConfig& c, const std::string& command) {
    return {{"command", command},
            {"family", c.family},
            {"n", c.n},
            {"degree", c.degree},
            {"tolerances", {{"psd", c.tols.psd}, {"residual", c.tols.residual}, {"rank", c.tols.rank}, {"intertwine", c.tols.intertwine}}},
            {"dim_cap", c.cap},
            {"seed", c.seed},
            {"tuple", c.tuple},
            {"subspace", c.subspace},
            {"instance", c.instance},
            {"grid", c.grid},
            {"mult", c.mult},
            {"mult_a", c.mult_a},
            {"mult_b", c.mult_b},
            {"seeds", c.seeds},
            {"min_level", c.min_level},
            {"count", c.count},
            {"scale", c.scale}};
}

void validate(const RunConfig& c) {
    for (double t : {c.tols.psd, c.tols.residual, c.tols.rank, c.tols.intertwine}) {
        if (!(t > 0.0)) throw Error("tolerances must be positive");
    }
    if (c.degree < 0) throw Error("--degree must be non-negative");
    if (c.n < 0) throw Error("--n must be positive");
    if (c.mult < 1 || c.mult_a < 1 || c.mult_b < 1 || c.seeds < 1 || c.count < 1) {
        throw Error("multiplicities and counts must be positive");
    }
    if (c.format != "json" && c.format != "pretty") throw Error("--format must be json or pretty");
}

using Handler = std::function<json(const RunConfig&, linalg::Rng&)>;

struct Leaf {
    CLI::App* app;
    std::string name;
    Handler run;
};

void add_common(CLI::App* a, RunConfig& c, bool family = true) {
    if (family) {
        a->add_option("--family,--model", c.family, "Weight family: gs:<s>, xi:<s> or file:<path>");
    }
    a->add_option("--n", c.n, "Number of generators (default 2; files carry their own)");
    a->add_option("--degree,-N", c.degree, "Truncation degree N");
    a->add_option("--tol", c.tols.residual, "Residual tolerance");
    a->add_option("--tol-psd", c.tols.psd, "Positivity tolerance");
    a->add_option("--tol-rank", c.tols.rank, "Relative rank tolerance");
    a->add_option("--tol-intertwine", c.tols.intertwine, "Isometry and intertwining tolerance");
    a->add_option("--dim-cap", c.cap, "Maximum number of basis words (default 2^20 or FOCKDOM_DIM_CAP)");
    a->add_option("--seed", c.seed, "Seed for every random choice");
    a->add_option("--output,-o", c.output, "Write the report here instead of stdout");
    a->add_option("--format", c.format, "json or pretty");
    a->add_option("--threads", c.threads, "OpenMP threads (results do not depend on it)");
}

void add_tuple(CLI::App* a, RunConfig& c) {
    a->add_option("--tuple", c.tuple, "file:<path>, zero:<d>, nilpotent:<d>, model or model-sum:<k>");
}

} // namespace

std::string pretty(const json& j) {
    std::ostringstream os;
    std::function<void(const json&, const std::string&)> walk = [&](const json& v, const std::string& path) {
        if (v.is_object()) {
            for (auto it = v.begin(); it != v.end(); ++it) walk(it.value(), path.empty() ? it.key() : path + "." + it.key());
        } else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array())) {
            for (std::size_t i = 0; i < v.size(); ++i) walk(v[i], path + "[" + std::to_string(i) + "]");
        } else {
            os << path << " = " << v.dump() << '\n';
        }
    };
    walk(j, "");
    return os.str();
}

json without_timings(json report) {
    report.erase("timings");
    return report;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    if (const char* env = std::getenv("FOCKDOM_DIM_CAP")) {
        try {
            c.cap = static_cast<std::size_t>(parse_count(env, "FOCKDOM_DIM_CAP"));
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        }
    }

    CLI::App app{"Operator models on truncated noncommutative Fock spaces", "fockdom"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FOCKDOM_VERSION);
    std::vector<Leaf> leaves;
    auto group = [&](const std::string& name, const std::string& help) {
        auto* g = app.add_subcommand(name, help);
        g->require_subcommand(1);
        return g;
    };
    auto leaf = [&](CLI::App* g, const std::string& name, const std::string& help, Handler h) {
        auto* a = g->add_subcommand(name, help);
        leaves.push_back({a, g->get_name() + " " + name, std::move(h)});
        return a;
    };

    auto* series = group("series", "Free power series");
    add_common(leaf(series, "invert", "Inverse series and regularity", cmd_series_invert), c);

    auto* model = group("model", "Weighted creation models");
    add_common(leaf(model, "defect", "Defect identity and vacuum resolution", cmd_model_defect), c);
    add_common(leaf(model, "check", "Admissibility diagnostics", cmd_model_check), c);
    add_common(leaf(model, "admissibility", "Alias of check", cmd_model_check), c);
    add_common(leaf(model, "boundary", "Boundary-property criterion", cmd_model_boundary), c);

    auto* domain = group("domain", "Operator tuples in the domain");
    for (auto [name, help, h] : {std::tuple{"membership", "Membership and purity", Handler(cmd_domain_membership)},
                                 std::tuple{"radial", "Radial scan r T", Handler(cmd_domain_radial)},
                                 std::tuple{"berezin", "Berezin kernel", Handler(cmd_domain_berezin)},
                                 std::tuple{"dilation-index", "Rank of the defect", Handler(cmd_domain_dilation_index)}}) {
        auto* a = leaf(domain, name, help, h);
        add_common(a, c);
        add_tuple(a, c);
        if (std::string(name) == "radial") a->add_option("--grid", c.grid, "Comma-separated radii in (0,1)");
        if (std::string(name) == "berezin") a->add_option("--kernel-out", c.kernel_out, "Write K as JSON here");
    }

    auto* dilation = group("dilation", "Canonical dilations");
    {
        auto* a = leaf(dilation, "minimality", "Minimality flags and reduction", cmd_dilation_minimality);
        add_common(a, c);
        add_tuple(a, c);
        auto* e = leaf(dilation, "equivalence", "Unitary equivalence of canonical dilations", cmd_dilation_equivalence);
        add_common(e, c);
        add_tuple(e, c);
        e->add_option("--tuple2", c.tuple2, "Second tuple");
        e->add_option("--intertwiner", c.intertwiner, "Matrix JSON file with V T_i = T'_i V");
    }

    auto* beurling = group("beurling", "Invariant subspaces");
    {
        auto* a = leaf(beurling, "factorize", "Partial-isometry representation of an invariant subspace",
                       cmd_beurling_factorize);
        add_common(a, c);
        a->add_option("--subspace", c.subspace, "JSON file {multiplicity, vectors}; random when omitted");
        a->add_option("--mult,-K", c.mult, "Multiplicity of a random subspace");
        a->add_option("--seeds", c.seeds, "Generators of a random subspace");
        a->add_option("--min-level", c.min_level, "Lowest level of the random generators");
    }

    auto* corona = group("corona", "Factorization problems A = BC");
    {
        auto* a = leaf(corona, "solve", "Solve A = BC", cmd_corona_solve);
        add_common(a, c);
        a->add_option("--instance", c.instance, "JSON instance; random when omitted");
        a->add_option("--mult", c.mult, "Target multiplicity of a random instance");
        a->add_option("--mult-a", c.mult_a, "Source multiplicity of A");
        a->add_option("--mult-b", c.mult_b, "Source multiplicity of B");
        a->add_option("--scale", c.scale, "Norm of the planted C");
        auto* r = leaf(corona, "row", "Solve sum Phi_k Psi_k = I", cmd_corona_row);
        add_common(r, c);
        r->add_option("--instance", c.instance, "JSON instance; random when omitted");
        r->add_option("--count", c.count, "Number of operators in a random row");
    }

    std::vector<const char*> argv{"fockdom"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Leaf* chosen = nullptr;
    for (const auto& l : leaves) {
        if (l.app->parsed()) chosen = &l;
    }
    if (chosen == nullptr) {
        err << app.help();
        return 2;
    }

    try {
        validate(c);
        if (c.threads > 0) kernels::set_threads(c.threads);
        linalg::Rng rng(c.seed);
        const auto t0 = std::chrono::steady_clock::now();
        json results = chosen->run(c, rng);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json report{{"schema_version", kSchemaVersion},
                    {"tool_version", FOCKDOM_VERSION},
                    {"config", config_echo(c, chosen->name)},
                    {"results", std::move(results)},
                    {"timings", {{"wall_seconds", secs}, {"threads", kernels::max_threads()}}}};
        const std::string text = c.format == "pretty" ? pretty(report) : report.dump(2) + "\n";
        if (c.output.empty()) {
            out << text;
        } else {
            std::ofstream f(c.output);
            if (!f) throw Error("cannot write \"" + c.output + "\"");
            f << text;
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace fockdom::cli
