#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "srfe/experiment.hpp"
#include "srfe/pipeline.hpp"

namespace srfe {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Files

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe a partially written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::random_device rd;
    const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot rename temp file onto " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// CSV: comma-separated, header row required, UTF-8, decimal point only.

struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;  // rows x columns

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double_field(const std::string& field, const std::string& path, int line,
                                 int col) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError(path + ": line " + std::to_string(line) + ", column " +
                        std::to_string(col + 1) + ": cannot parse '" + field + "' as a number");
    return value;
}

}  // namespace detail

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file, header row required");
    CsvTable table;
    table.header = detail::split_csv_line(line);
    const int n_cols = static_cast<int>(table.header.size());

    std::vector<Eigen::VectorXd> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto fields = detail::split_csv_line(line);
        if (static_cast<int>(fields.size()) != n_cols)
            throw DataError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(n_cols) + " fields, got " +
                            std::to_string(fields.size()));
        Eigen::VectorXd row(n_cols);
        for (int c = 0; c < n_cols; ++c)
            row(c) = detail::parse_double_field(fields[static_cast<std::size_t>(c)], path.string(),
                                                line_no, c);
        rows.push_back(std::move(row));
    }
    table.values.resize(static_cast<Eigen::Index>(rows.size()), n_cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        table.values.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return table;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& values) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out.push_back(',');
        out += header[c];
    }
    out.push_back('\n');
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c) out.push_back(',');
            out += format_double(values(r, c));
        }
        out.push_back('\n');
    }
    atomic_write(path, out);
}

/// Splits a data table into points (d x m) and the target column.
inline std::pair<PointSet, Eigen::VectorXd> dataset_from_csv(const CsvTable& table,
                                                             int target_col = -1) {
    if (table.cols() < 2) throw DataError("dataset CSV needs at least one feature column and a target");
    if (target_col < 0) target_col = table.cols() - 1;
    if (target_col >= table.cols())
        throw DataError("target column " + std::to_string(target_col) + " out of range");
    PointSet points;
    points.law = PointLaw::External;
    points.points.resize(table.cols() - 1, table.rows());
    Eigen::VectorXd y(table.rows());
    for (int r = 0; r < table.rows(); ++r) {
        int idx = 0;
        for (int c = 0; c < table.cols(); ++c) {
            if (c == target_col) continue;
            points.points(idx++, r) = table.values(r, c);
        }
        y(r) = table.values(r, target_col);
    }
    return {std::move(points), std::move(y)};
}

// ---------------------------------------------------------------------------
// JSON config parsing. Unknown keys are rejected so typos fail loudly.

namespace detail {

inline void require_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& ctx) {
    if (!obj.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
    }
}

}  // namespace detail

inline SamplingConfig sampling_config_from_json(const Json& j) {
    detail::require_keys(j,
                         {"dim", "n_features", "n_per_subset", "sigma", "q", "scheme",
                          "bias_range", "seed", "feature_cap"},
                         "sampling");
    SamplingConfig cfg;
    if (!j.contains("dim")) throw ConfigError("sampling: missing 'dim'");
    cfg.dim = j.at("dim").get<int>();
    cfg.n_features = j.value("n_features", 0);
    cfg.n_per_subset = j.value("n_per_subset", 0);
    cfg.sigma = j.value("sigma", 1.0);
    cfg.q = j.value("q", 0);
    cfg.scheme = scheme_from_string(j.value("scheme", "dense"));
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.feature_cap = j.value("feature_cap", std::uint64_t{10'000'000});
    if (j.contains("bias_range") && !j.at("bias_range").is_null()) {
        const auto& br = j.at("bias_range");
        if (!br.is_array() || br.size() != 2)
            throw ConfigError("sampling: bias_range must be [lo, hi]");
        cfg.bias_range = {br.at(0).get<double>(), br.at(1).get<double>()};
    }
    return cfg;
}

inline SolverConfig solver_config_from_json(const Json& j) {
    detail::require_keys(j, {"eta", "max_iters", "abs_tol", "rel_tol", "penalty", "zero_tol"},
                         "solver");
    SolverConfig cfg;
    cfg.eta = j.value("eta", cfg.eta);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.abs_tol = j.value("abs_tol", cfg.abs_tol);
    cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
    cfg.penalty = j.value("penalty", cfg.penalty);
    cfg.zero_tol = j.value("zero_tol", cfg.zero_tol);
    return cfg;
}

inline FitConfig fit_config_from_json(const Json& j) {
    detail::require_keys(j, {"sampling", "activation", "eta", "prune_s", "solver", "n_threads"},
                         "fit config");
    FitConfig cfg;
    if (!j.contains("sampling")) throw ConfigError("fit config: missing 'sampling'");
    cfg.sampling = sampling_config_from_json(j.at("sampling"));
    cfg.activation = activation_from_string(j.value("activation", "sine"));
    cfg.eta = j.value("eta", 0.0);
    if (j.contains("prune_s") && !j.at("prune_s").is_null()) cfg.prune_s = j.at("prune_s").get<int>();
    if (j.contains("solver")) cfg.solver = solver_config_from_json(j.at("solver"));
    cfg.n_threads = j.value("n_threads", 1);
    return cfg;
}

inline PointSpec point_spec_from_json(const Json& j) {
    detail::require_keys(j, {"law", "gamma", "lo", "hi", "mix_gamma"}, "points");
    PointSpec spec;
    const std::string law = j.value("law", "uniform");
    if (law == "gaussian") spec.law = PointLaw::Gaussian;
    else if (law == "uniform") spec.law = PointLaw::Uniform;
    else if (law == "mixture") spec.law = PointLaw::Mixture;
    else throw ConfigError("points: unknown law '" + law + "'");
    spec.gamma = j.value("gamma", 1.0);
    spec.lo = j.value("lo", -1.0);
    spec.hi = j.value("hi", 1.0);
    spec.mix_gamma = j.value("mix_gamma", 0.1);
    return spec;
}

inline NoiseSpec noise_spec_from_json(const Json& j) {
    detail::require_keys(j, {"kind", "amount"}, "noise");
    NoiseSpec spec;
    const std::string kind = j.value("kind", "none");
    if (kind == "none") spec.kind = NoiseKind::None;
    else if (kind == "bounded-uniform") spec.kind = NoiseKind::BoundedUniform;
    else if (kind == "gaussian") spec.kind = NoiseKind::Gaussian;
    else throw ConfigError("noise: unknown kind '" + kind + "'");
    spec.amount = j.value("amount", 0.0);
    return spec;
}

inline ExperimentConfig experiment_config_from_json(const Json& j) {
    detail::require_keys(j,
                         {"name", "target", "sampling", "activation", "eta", "prune_s", "solver",
                          "points", "m", "test_size", "noise", "seeds", "run_ols", "jobs", "note"},
                         "experiment");
    ExperimentConfig cfg;
    if (!j.contains("target")) throw ConfigError("experiment: missing 'target'");
    if (!j.contains("m")) throw ConfigError("experiment: missing 'm'");
    if (!j.contains("sampling")) throw ConfigError("experiment: missing 'sampling'");
    cfg.target = j.at("target").get<std::string>();
    cfg.name = j.value("name", cfg.target);
    cfg.sampling = sampling_config_from_json(j.at("sampling"));
    cfg.activation = activation_from_string(j.value("activation", "sine"));
    cfg.eta = j.value("eta", 0.01);
    if (j.contains("prune_s") && !j.at("prune_s").is_null()) cfg.prune_s = j.at("prune_s").get<int>();
    if (j.contains("solver")) cfg.solver = solver_config_from_json(j.at("solver"));
    if (j.contains("points")) cfg.points = point_spec_from_json(j.at("points"));
    cfg.m = j.at("m").get<int>();
    cfg.test_size = j.value("test_size", 0);
    if (j.contains("noise")) cfg.noise = noise_spec_from_json(j.at("noise"));
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) cfg.seeds = default_seeds();
    cfg.run_ols = j.value("run_ols", true);
    cfg.jobs = j.value("jobs", 1);
    cfg.note = j.value("note", "");
    return cfg;
}

inline TheoryParams theory_params_from_json(const Json& j) {
    detail::require_keys(j, {"gamma", "sigma", "d", "q", "s", "n_features", "m", "delta", "epsilon"},
                         "diagnose");
    TheoryParams p;
    p.gamma = j.value("gamma", 1.0);
    p.sigma = j.value("sigma", 1.0);
    p.d = j.value("d", 1);
    p.q = j.value("q", p.d);
    p.s = j.value("s", 1);
    p.n_features = j.value("n_features", 1);
    p.m = j.value("m", 1);
    p.delta = j.value("delta", 0.1);
    p.epsilon = j.value("epsilon", 0.1);
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// JSON emission

inline Json sampling_config_to_json(const SamplingConfig& cfg) {
    Json j{{"dim", cfg.dim},
           {"sigma", cfg.sigma},
           {"q", cfg.effective_q()},
           {"scheme", to_string(cfg.scheme)},
           {"seed", cfg.seed}};
    if (cfg.scheme == SamplingScheme::Complete) j["n_per_subset"] = cfg.n_per_subset;
    else j["n_features"] = cfg.n_features;
    if (cfg.bias_range) j["bias_range"] = {cfg.bias_range->first, cfg.bias_range->second};
    else j["bias_range"] = nullptr;
    return j;
}

inline Json solver_config_to_json(const SolverConfig& cfg) {
    return Json{{"eta", cfg.eta},         {"max_iters", cfg.max_iters}, {"abs_tol", cfg.abs_tol},
                {"rel_tol", cfg.rel_tol}, {"penalty", cfg.penalty},     {"zero_tol", cfg.zero_tol}};
}

inline Json solve_report_to_json(const SolveReport& rep) {
    return Json{{"iterations", rep.iterations},
                {"primal_residual", rep.primal_residual},
                {"dual_residual", rep.dual_residual},
                {"feasibility_gap", rep.feasibility_gap},
                {"objective", rep.objective},
                {"sparsity", rep.sparsity},
                {"converged", rep.converged}};
}

namespace detail {

inline Json coefficients_to_json(const Eigen::VectorXd& c) {
    Json arr = Json::array();
    for (Eigen::Index j = 0; j < c.size(); ++j) arr.push_back(c(j));
    return arr;
}

inline Json coefficients_to_json(const Eigen::VectorXcd& c) {
    Json arr = Json::array();
    for (Eigen::Index j = 0; j < c.size(); ++j) arr.push_back({c(j).real(), c(j).imag()});
    return arr;
}

inline void coefficients_from_json(const Json& arr, Eigen::VectorXd& c) {
    c.resize(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j)
        c(static_cast<Eigen::Index>(j)) = arr.at(j).get<double>();
}

inline void coefficients_from_json(const Json& arr, Eigen::VectorXcd& c) {
    c.resize(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j)
        c(static_cast<Eigen::Index>(j)) = {arr.at(j).at(0).get<double>(),
                                           arr.at(j).at(1).get<double>()};
}

}  // namespace detail

template <typename Scalar>
Json model_to_json(const SrfeModel<Scalar>& model) {
    const WeightSet& ws = model.weights;
    Json weights = Json::array();
    Json supports = Json::array();
    for (int j = 0; j < ws.count(); ++j) {
        Json col = Json::array();
        for (int i = 0; i < ws.dim(); ++i) col.push_back(ws.weights(i, j));
        weights.push_back(std::move(col));
        supports.push_back(ws.supports[static_cast<std::size_t>(j)]);
    }
    Json j{{"format", "srfe-model-v1"},
           {"activation", to_string(model.activation)},
           {"dim", ws.dim()},
           {"n_features", ws.count()},
           {"sigma", ws.sigma},
           {"q", ws.q},
           {"scheme", to_string(ws.scheme)},
           {"weights", std::move(weights)},
           {"supports", std::move(supports)},
           {"coefficients", detail::coefficients_to_json(model.coefficients)},
           {"fit_report", solve_report_to_json(model.fit_report)}};
    j["biases"] = ws.has_bias() ? Json(ws.biases) : Json(nullptr);
    j["pruned_to"] = model.pruned_to ? Json(*model.pruned_to) : Json(nullptr);
    return j;
}

template <typename Scalar>
SrfeModel<Scalar> model_from_json(const Json& j) {
    try {
        if (j.at("format").get<std::string>() != "srfe-model-v1")
            throw DataError("model file: unsupported format");
        SrfeModel<Scalar> model;
        model.activation = activation_from_string(j.at("activation").get<std::string>());
        const int dim = j.at("dim").get<int>();
        const int n = j.at("n_features").get<int>();
        WeightSet& ws = model.weights;
        ws.sigma = j.at("sigma").get<double>();
        ws.q = j.at("q").get<int>();
        ws.scheme = scheme_from_string(j.at("scheme").get<std::string>());
        ws.weights.resize(dim, n);
        const auto& weights = j.at("weights");
        const auto& supports = j.at("supports");
        if (static_cast<int>(weights.size()) != n || static_cast<int>(supports.size()) != n)
            throw DataError("model file: weight/support count mismatch");
        for (int col = 0; col < n; ++col) {
            const auto& wc = weights.at(static_cast<std::size_t>(col));
            if (static_cast<int>(wc.size()) != dim) throw DataError("model file: weight length mismatch");
            for (int i = 0; i < dim; ++i) ws.weights(i, col) = wc.at(static_cast<std::size_t>(i)).get<double>();
            ws.supports.push_back(supports.at(static_cast<std::size_t>(col)).get<std::vector<int>>());
        }
        if (!j.at("biases").is_null()) ws.biases = j.at("biases").get<std::vector<double>>();
        detail::coefficients_from_json(j.at("coefficients"), model.coefficients);
        if (model.coefficients.size() != n) throw DataError("model file: coefficient length mismatch");
        if (!j.at("pruned_to").is_null()) model.pruned_to = j.at("pruned_to").get<int>();
        return model;
    } catch (const Json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

inline Json point_spec_to_json(const PointSpec& spec) {
    const char* law = spec.law == PointLaw::Gaussian  ? "gaussian"
                      : spec.law == PointLaw::Uniform ? "uniform"
                      : spec.law == PointLaw::Mixture ? "mixture"
                                                      : "external";
    return Json{{"law", law},       {"gamma", spec.gamma},         {"lo", spec.lo},
                {"hi", spec.hi},    {"mix_gamma", spec.mix_gamma}};
}

inline Json noise_spec_to_json(const NoiseSpec& spec) {
    const char* kind = spec.kind == NoiseKind::None             ? "none"
                       : spec.kind == NoiseKind::BoundedUniform ? "bounded-uniform"
                                                                : "gaussian";
    return Json{{"kind", kind}, {"amount", spec.amount}};
}

inline Json experiment_config_to_json(const ExperimentConfig& cfg) {
    Json j{{"name", cfg.name},
           {"target", cfg.target},
           {"sampling", sampling_config_to_json(cfg.sampling)},
           {"activation", to_string(cfg.activation)},
           {"eta", cfg.eta},
           {"solver", solver_config_to_json(cfg.solver)},
           {"points", point_spec_to_json(cfg.points)},
           {"m", cfg.m},
           {"test_size", cfg.test_size},
           {"noise", noise_spec_to_json(cfg.noise)},
           {"seeds", cfg.seeds},
           {"run_ols", cfg.run_ols},
           {"jobs", cfg.jobs},
           {"note", cfg.note}};
    j["prune_s"] = cfg.prune_s ? Json(*cfg.prune_s) : Json(nullptr);
    return j;
}

inline Json experiment_report_to_json(const ExperimentReport& report) {
    Json records = Json::array();
    for (const auto& r : report.records) {
        Json jr{{"seed", r.seed},
                {"failed", r.failed},
                {"train_error", r.train_error},
                {"test_error", r.test_error},
                {"sparsity", r.sparsity},
                {"solve", solve_report_to_json(r.solve)},
                {"wall_seconds", r.wall_seconds}};
        if (r.failed) jr["error"] = r.error;
        if (r.relaxed) jr["relaxed_eta"] = r.relaxed_eta;
        if (r.has_ols) {
            jr["ols_train_error"] = r.ols_train_error;
            jr["ols_test_error"] = r.ols_test_error;
        }
        records.push_back(std::move(jr));
    }
    return Json{{"format", "srfe-report-v1"},
                {"config", experiment_config_to_json(report.config)},
                {"records", std::move(records)},
                {"median_test_error", report.median_test_error},
                {"median_ols_test_error", report.median_ols_test_error},
                {"timing", Json{{"total_wall_seconds", report.total_wall_seconds}}}};
}

/// Removes wall-clock fields in place; reports are byte-identical across reruns
/// of the same seeds once timing is stripped.
inline void strip_timing_fields(Json& j) {
    if (j.is_object()) {
        j.erase("timing");
        j.erase("wall_seconds");
        j.erase("total_wall_seconds");
        for (auto& [key, value] : j.items()) strip_timing_fields(value);
    } else if (j.is_array()) {
        for (auto& item : j) strip_timing_fields(item);
    }
}

}  // namespace srfe
