// srfe: command-line driver for sparse random feature expansions.
//
//   srfe fit        --config cfg.json --data train.csv --out model.json
//   srfe predict    --model model.json --points pts.csv --out preds.csv
//   srfe experiment <preset|config.json> --out report.json
//   srfe diagnose   --config theory.json [--out diag.json]
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 solver infeasibility,
// 5 internal error. SRFE_LOG={quiet,info,debug} controls stderr verbosity.

#include <CLI11.hpp>

#include <complex>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "srfe/srfe.hpp"

namespace {

namespace fs = std::filesystem;
using srfe::Json;

std::string sanitize(std::string name) {
    for (char& c : name)
        if (c == '/' || c == ' ') c = '-';
    return name;
}

Json load_json(const fs::path& path) {
    try {
        return Json::parse(srfe::read_file(path));
    } catch (const Json::exception& e) {
        throw srfe::ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

template <typename Scalar>
void run_fit_typed(const srfe::FitConfig& cfg, const std::pair<srfe::PointSet, Eigen::VectorXd>& data,
                   const fs::path& out) {
    srfe::Dataset<Scalar> dataset{data.first, data.second.template cast<Scalar>()};
    srfe::SrfeModel<Scalar> model = cfg.sampling.scheme == srfe::SamplingScheme::Dense
                                        ? srfe::fit_srfe<Scalar>(dataset, cfg)
                                        : srfe::fit_srfe_s<Scalar>(dataset, cfg);
    srfe::atomic_write(out, srfe::model_to_json(model).dump(2) + "\n");
    Json report{{"format", "srfe-fit-report-v1"},
                {"fit_report", srfe::solve_report_to_json(model.fit_report)},
                {"train_error", srfe::relative_test_error<Scalar>(model, dataset)}};
    srfe::atomic_write(out.string() + ".report.json", report.dump(2) + "\n");
    srfe::log::info("model written to " + out.string());
}

int cmd_fit(const std::string& config_path, const std::string& data_path, const std::string& out,
            std::optional<std::uint64_t> seed, int target_col) {
    Json j = load_json(config_path);
    srfe::FitConfig cfg = srfe::fit_config_from_json(j);
    if (seed) cfg.sampling.seed = *seed;

    const srfe::CsvTable table = srfe::read_csv(data_path);
    auto data = srfe::dataset_from_csv(table, target_col);
    if (data.first.dim() != cfg.sampling.dim)
        throw srfe::ShapeError("data has " + std::to_string(data.first.dim()) +
                               " feature columns but config expects dim " +
                               std::to_string(cfg.sampling.dim));

    if (srfe::is_complex(cfg.activation))
        run_fit_typed<std::complex<double>>(cfg, data, out);
    else
        run_fit_typed<double>(cfg, data, out);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& points_path,
                const std::string& out) {
    const Json mj = load_json(model_path);
    const srfe::CsvTable table = srfe::read_csv(points_path);

    const bool complex_model =
        srfe::is_complex(srfe::activation_from_string(mj.at("activation").get<std::string>()));

    srfe::PointSet points;
    points.points = table.values.transpose();

    if (complex_model) {
        auto model = srfe::model_from_json<std::complex<double>>(mj);
        if (points.dim() != model.weights.dim())
            throw srfe::ShapeError("points have dim " + std::to_string(points.dim()) +
                                   ", model expects " + std::to_string(model.weights.dim()));
        const Eigen::VectorXcd preds = srfe::evaluate_expansion(model, points);
        Eigen::MatrixXd cols(preds.size(), 2);
        cols.col(0) = preds.real();
        cols.col(1) = preds.imag();
        srfe::write_csv(out, {"prediction_re", "prediction_im"}, cols);
    } else {
        auto model = srfe::model_from_json<double>(mj);
        if (points.dim() != model.weights.dim())
            throw srfe::ShapeError("points have dim " + std::to_string(points.dim()) +
                                   ", model expects " + std::to_string(model.weights.dim()));
        const Eigen::VectorXd preds = srfe::evaluate_expansion(model, points);
        srfe::write_csv(out, {"prediction"}, preds);
    }
    srfe::log::info("predictions written to " + out);
    return 0;
}

void write_plot_csv(const srfe::ExperimentReport& report, const fs::path& path) {
    if (!report.plot) return;
    const auto& p = *report.plot;
    const int cols = p.has_ols ? 4 : 3;
    Eigen::MatrixXd values(p.x.size(), cols);
    values.col(0) = p.x;
    values.col(1) = p.truth;
    values.col(2) = p.srfe;
    std::vector<std::string> header = {"x", "f", "fsharp"};
    if (p.has_ols) {
        values.col(3) = p.ols;
        header.push_back("ols");
    }
    srfe::write_csv(path, header, values);
}

int cmd_experiment(const std::string& what, const std::string& out, const std::string& sampler,
                   int jobs, std::optional<std::uint64_t> seed) {
    std::vector<srfe::ExperimentConfig> configs;
    if (fs::exists(what) && !fs::is_directory(what)) {
        configs.push_back(srfe::experiment_config_from_json(load_json(what)));
    } else if (what == "ishigami" && !sampler.empty()) {
        srfe::PointLaw law = sampler == "uniform"    ? srfe::PointLaw::Uniform
                             : sampler == "gaussian" ? srfe::PointLaw::Gaussian
                             : sampler == "mixture"  ? srfe::PointLaw::Mixture
                                                     : srfe::PointLaw::External;
        if (law == srfe::PointLaw::External)
            throw srfe::ConfigError("--sampler must be uniform, gaussian, or mixture");
        configs.push_back(srfe::make_ishigami_config(law));
    } else {
        configs = srfe::expand_preset(what);
    }
    for (auto& cfg : configs) {
        if (jobs > 0) cfg.jobs = jobs;
        if (seed) cfg.seeds = {*seed};
    }

    Json reports = Json::array();
    const fs::path out_path(out);
    for (const auto& cfg : configs) {
        srfe::log::info("running experiment " + cfg.name);
        const srfe::ExperimentReport report = srfe::run_experiment(cfg);
        reports.push_back(srfe::experiment_report_to_json(report));
        if (report.plot) {
            fs::path plot_path = out_path;
            plot_path.replace_extension("");
            plot_path += "." + sanitize(cfg.name) + ".plot.csv";
            write_plot_csv(report, plot_path);
        }
        std::cout << cfg.name << ": median test error " << report.median_test_error;
        if (report.config.run_ols) std::cout << " (OLS " << report.median_ols_test_error << ")";
        std::cout << '\n';
    }
    Json doc{{"format", "srfe-report-set-v1"}, {"reports", std::move(reports)}};
    srfe::atomic_write(out_path, doc.dump(2) + "\n");
    srfe::log::info("report written to " + out_path.string());
    return 0;
}

int cmd_diagnose(const std::string& config_path, const std::string& out) {
    const srfe::TheoryParams p = srfe::theory_params_from_json(load_json(config_path));
    Json j{{"format", "srfe-diagnostics-v1"},
           {"params",
            Json{{"gamma", p.gamma},
                 {"sigma", p.sigma},
                 {"d", p.d},
                 {"q", p.q},
                 {"s", p.s},
                 {"n_features", p.n_features},
                 {"m", p.m},
                 {"delta", p.delta},
                 {"epsilon", p.epsilon}}},
           {"coherence_threshold", srfe::coherence_threshold(p.s)},
           {"uncertainty_lower_bound", srfe::uncertainty_lower_bound(p.s, p.q)},
           {"feature_count_bound", srfe::feature_count_bound(p)},
           {"feature_count_bound_order_q", srfe::feature_count_bound_order_q(p)},
           {"measurement_count_bound", srfe::measurement_count_bound(p)},
           {"sample_radius_bound", srfe::sample_radius_bound(p.gamma, p.d, p.m, p.delta)}};
    Json gram = Json::array();
    for (int overlap = std::max(2 * p.q - p.d, 0); overlap <= p.q; ++overlap)
        gram.push_back(Json{{"overlap", overlap},
                            {"gamma_jl", srfe::expected_gram(p.gamma, p.sigma, p.q, overlap, p.d)}});
    j["expected_gram"] = std::move(gram);

    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty()) srfe::atomic_write(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse random feature expansion toolkit"};
    app.require_subcommand(1);

    std::string config_path, data_path, model_path, points_path, out_path, experiment_arg, sampler;
    std::optional<std::uint64_t> seed;
    int target_col = -1;
    int jobs = 0;

    auto* fit = app.add_subcommand("fit", "fit a model to CSV data");
    fit->add_option("--config", config_path, "fit configuration JSON")->required();
    fit->add_option("--data", data_path, "training CSV (header row, target in last column)")
        ->required();
    fit->add_option("--out", out_path, "output model JSON path")->required();
    fit->add_option("--seed", seed, "override the sampling seed");
    fit->add_option("--target-col", target_col, "0-based target column (default: last)");

    auto* predict = app.add_subcommand("predict", "evaluate a model on CSV points");
    predict->add_option("--model", model_path, "model JSON from 'fit'")->required();
    predict->add_option("--points", points_path, "points CSV (feature columns only)")->required();
    predict->add_option("--out", out_path, "output predictions CSV")->required();

    auto* experiment = app.add_subcommand("experiment", "run a named preset or a config file");
    experiment->add_option("preset", experiment_arg, "preset name or experiment config JSON path")
        ->required();
    experiment->add_option("--out", out_path, "output report JSON")->required();
    experiment->add_option("--sampler", sampler, "ishigami sampler: uniform, gaussian, mixture");
    experiment->add_option("--jobs", jobs, "max concurrent runs within an experiment");
    experiment->add_option("--seed", seed, "run a single seed instead of the preset list");

    auto* diagnose = app.add_subcommand("diagnose", "print theory diagnostics as JSON");
    diagnose->add_option("--config", config_path, "theory parameter JSON")->required();
    diagnose->add_option("--out", out_path, "also write the JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(config_path, data_path, out_path, seed, target_col);
        if (predict->parsed()) return cmd_predict(model_path, points_path, out_path);
        if (experiment->parsed())
            return cmd_experiment(experiment_arg, out_path, sampler, jobs, seed);
        if (diagnose->parsed()) return cmd_diagnose(config_path, out_path);
    } catch (const srfe::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const srfe::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const srfe::ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const srfe::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 5;
    }
    return 5;
}
