#include "gknn/csv.hpp"
#include "gknn/dataset.hpp"
#include "gknn/evaluation.hpp"
#include "gknn/fixtures.hpp"
#include "gknn/metrics.hpp"
#include "gknn/theory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gknn;

constexpr std::uint64_t default_seed = 42;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw data_error("cannot open output file '" + path + "'");
    out << text;
}

std::vector<double> parse_grid_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
            out.push_back(v);
        } catch (const std::exception&) {
            throw data_error(std::string("cannot parse ") + what + " value '" + cell + "'");
        }
    }
    if (out.empty()) throw data_error(std::string("empty ") + what + " list");
    return out;
}

struct CommonOptions {
    std::string classifier = "gammaknn";
    std::string sampler = "none";
    double ratio = 1.0;
    int k = 3;
    int runs = 5;
    int folds = 10;
    std::uint64_t seed = default_seed;
    std::uint64_t sampler_seed = default_seed;
    int sampler_k = 5;
    bool include_noise = false;
    bool sequential = false;
    std::string out;
    std::string gammas;  // comma list overriding both gamma grids
};

std::optional<SamplerConfig> sampler_config(const CommonOptions& opt) {
    const SamplerStrategy strategy = sampler_from_name(opt.sampler);
    if (strategy == SamplerStrategy::none) return std::nullopt;
    SamplerConfig cfg;
    cfg.strategy = strategy;
    cfg.target_ratio = opt.ratio;
    cfg.k_neighbors = opt.sampler_k;
    cfg.seed = opt.sampler_seed;
    cfg.include_noise = opt.include_noise;
    return cfg;
}

TuningGrid grid_for(const CommonOptions& opt) {
    TuningGrid grid = TuningGrid::defaults();
    if (!opt.gammas.empty()) {
        grid.gamma_real = parse_grid_list(opt.gammas, "gamma");
        grid.gamma_synth = grid.gamma_real;
    }
    return grid;
}

int cmd_bench(const std::vector<std::string>& data_paths, const CommonOptions& opt) {
    const ClassifierKind kind = classifier_from_name(opt.classifier);
    const std::optional<SamplerConfig> sampler = sampler_config(opt);
    TuningGrid grid = grid_for(opt);
    if (sampler.has_value()) grid.ratios = {opt.ratio};

    const std::string out_dir = opt.out.empty() ? std::string("out") : opt.out;
    std::filesystem::create_directories(out_dir);

    std::vector<EvalReport> reports;
    bool data_failure = false;
    for (const std::string& path : data_paths) {
        try {
            const Dataset data = load_dataset(path);
            EvalReport report = run_experiment(data, kind, sampler, opt.k, opt.runs, opt.seed,
                                               grid, opt.folds, opt.sequential);
            const std::string json_path =
                (std::filesystem::path(out_dir) / (data.name + ".json")).string();
            write_text(json_path, to_json(report));
            std::cerr << "wrote " << json_path << "\n";
            reports.push_back(std::move(report));
        } catch (const data_error& e) {
            std::cerr << "error: " << path << ": " << e.what() << "\n";
            data_failure = true;
        }
    }

    if (!reports.empty()) {
        const std::string table = format_table(reports);
        write_text((std::filesystem::path(out_dir) / "results.txt").string(), table);
        std::cout << table;
    }
    return data_failure ? 2 : 0;
}

int cmd_tune(const std::string& data_path, const CommonOptions& opt, bool ratio_given) {
    const Dataset data = load_dataset(data_path);
    auto [train_raw, test_raw] = stratified_split(data, 0.2, opt.seed);
    (void)test_raw;
    const NormalizationParams norm = fit_normalizer(train_raw);
    const Dataset train = apply_normalizer(train_raw, norm);

    const std::optional<SamplerConfig> sampler = sampler_config(opt);
    TuningGrid grid = grid_for(opt);
    if (sampler.has_value() && ratio_given) grid.ratios = {opt.ratio};

    const TuneResult tuned =
        tune_gamma(train, opt.k, grid, sampler, opt.folds, opt.seed, opt.sequential);

    nlohmann::json j;
    j["gamma_real"] = tuned.gamma_real;
    j["gamma_synth"] = tuned.gamma_synth;
    j["ratio"] = tuned.ratio;
    j["cv_f1"] = tuned.cv_f1;
    j["folds_used"] = tuned.folds_used;
    j["warnings"] = tuned.warnings;
    const std::string text = j.dump(2) + "\n";
    write_text(opt.out, text);
    if (!opt.out.empty()) std::cout << text;
    return 0;
}

int cmd_boundary(const std::string& data_path, double gamma, int resolution,
                 const CommonOptions& opt) {
    const Dataset data = load_dataset(data_path);
    if (data.dim() != 2) {
        throw data_error("boundary grids need 2-D data, got " + std::to_string(data.dim()) +
                         " features");
    }
    if (!(gamma > 0.0)) throw data_error("gamma must be positive");

    GammaKnnModel model;
    model.train = &data;
    model.k = opt.k;
    model.params.gamma_real = gamma;
    model.params.gamma_synth = gamma;

    // Bounding box with a 10% margin per side; a degenerate dimension gets
    // a fixed pad so the grid still has area.
    double lo[2], hi[2];
    for (int d = 0; d < 2; ++d) {
        lo[d] = data.X.col(d).minCoeff();
        hi[d] = data.X.col(d).maxCoeff();
        const double range = hi[d] - lo[d];
        const double margin = range > 0.0 ? 0.1 * range : 1.0;
        lo[d] -= margin;
        hi[d] += margin;
    }

    std::string text = "x,y,label\n";
    Eigen::RowVectorXd q(2);
    for (int i = 0; i < resolution; ++i) {
        const double step_y = static_cast<double>(i) / static_cast<double>(resolution - 1);
        q[1] = lo[1] + (hi[1] - lo[1]) * step_y;
        for (int j = 0; j < resolution; ++j) {
            const double step_x = static_cast<double>(j) / static_cast<double>(resolution - 1);
            q[0] = lo[0] + (hi[0] - lo[0]) * step_x;
            const Prediction pred = gamma_knn_classify(model, q);
            text += num(q[0]) + "," + num(q[1]) + "," + std::to_string(pred.label) + "\n";
        }
    }
    write_text(opt.out, text);
    return 0;
}

int cmd_heatmap(const std::string& data_path, const CommonOptions& opt) {
    const std::optional<SamplerConfig> sampler = sampler_config(opt);
    if (!sampler.has_value()) {
        std::cerr << "heatmap: pick an active sampler (--sampler smote, ...)\n";
        return 1;
    }
    const Dataset data = load_dataset(data_path);
    auto [train_raw, test_raw] = stratified_split(data, 0.2, opt.seed);
    (void)test_raw;
    const NormalizationParams norm = fit_normalizer(train_raw);
    const Dataset train = apply_normalizer(train_raw, norm);

    const TuningGrid grid = grid_for(opt);
    const HeatmapResult hm = heatmap_matrix(train, opt.k, grid, *sampler, opt.folds, opt.seed);

    std::string text = "gamma_real";
    for (double gs : hm.gamma_synth) text += "," + num(gs);
    text += "\n";
    for (Eigen::Index r = 0; r < hm.f1.rows(); ++r) {
        text += num(hm.gamma_real[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < hm.f1.cols(); ++c) text += "," + num(hm.f1(r, c));
        text += "\n";
    }
    write_text(opt.out, text);

    // Convenience argmax under the tuner's tie rules.
    Eigen::Index br = 0, bc = 0;
    for (Eigen::Index r = 0; r < hm.f1.rows(); ++r) {
        for (Eigen::Index c = 0; c < hm.f1.cols(); ++c) {
            const double f1 = hm.f1(r, c);
            const double best = hm.f1(br, bc);
            bool wins = false;
            if (f1 != best) {
                wins = f1 > best;
            } else {
                const double gr = hm.gamma_real[static_cast<std::size_t>(r)];
                const double gbr = hm.gamma_real[static_cast<std::size_t>(br)];
                if (gr != gbr) {
                    wins = gr > gbr;
                } else {
                    const double gs = hm.gamma_synth[static_cast<std::size_t>(c)];
                    const double gbs = hm.gamma_synth[static_cast<std::size_t>(bc)];
                    const double da = std::abs(gs - 1.0), db = std::abs(gbs - 1.0);
                    wins = da != db ? da < db : gs < gbs;
                }
            }
            if (wins) {
                br = r;
                bc = c;
            }
        }
    }
    std::cerr << "best gamma_real=" << num(hm.gamma_real[static_cast<std::size_t>(br)])
              << " gamma_synth=" << num(hm.gamma_synth[static_cast<std::size_t>(bc)])
              << " cv_f1=" << num(hm.f1(br, bc)) << "\n";
    return 0;
}

int cmd_sample(const std::string& data_path, const CommonOptions& opt) {
    const std::optional<SamplerConfig> sampler = sampler_config(opt);
    if (!sampler.has_value()) {
        std::cerr << "sample: pick an active sampler (--sampler smote, ...)\n";
        return 1;
    }
    const Dataset data = load_dataset(data_path);
    const SamplerResult result = apply_sampler(data, *sampler);
    if (result.warning) std::cerr << "warning: " << result.message << "\n";

    std::ostringstream buffer;
    write_csv(buffer, result.data);
    write_text(opt.out, buffer.str());
    std::cerr << "rows " << data.rows() << " -> " << result.data.rows() << " ("
              << result.records.size() << " synthetic)\n";
    return 0;
}

int cmd_theory(const std::string& distribution, int dim, long m_plus, long m_minus, long trials,
               double epsilon, const std::string& query_text, const CommonOptions& opt) {
    SphereModel model;
    model.generator = generator_from_name(distribution, dim);
    model.m_plus = m_plus;
    model.m_minus = m_minus;
    model.trials = trials;
    model.seed = opt.seed;

    Eigen::VectorXd query;
    if (query_text.empty()) {
        if (const auto* box = std::get_if<UniformBox>(&model.generator)) {
            query = 0.5 * (box->lo + box->hi);
        } else if (const auto* g = std::get_if<IsotropicGaussian>(&model.generator)) {
            query = g->mean;
        } else {
            query = std::get<TwoGaussianMixture>(model.generator).mean1;
        }
    } else {
        const std::vector<double> cells = parse_grid_list(query_text, "query");
        if (static_cast<int>(cells.size()) != dim) {
            throw data_error("query has " + std::to_string(cells.size()) + " coordinates, need " +
                             std::to_string(dim));
        }
        query = Eigen::Map<const Eigen::VectorXd>(cells.data(), dim);
    }

    std::vector<double> gammas;
    if (opt.gammas.empty()) {
        for (int i = 1; i <= 20; ++i) gammas.push_back(static_cast<double>(i) / 10.0);
    } else {
        gammas = parse_grid_list(opt.gammas, "gamma");
    }

    const std::vector<TheoryRow> rows = theory_table(model, query, epsilon, gammas);
    std::string text = "gamma,fn,fn_se,fp,fp_se\n";
    for (const TheoryRow& row : rows) {
        text += num(row.gamma) + "," + num(row.fn) + "," + num(row.fn_se) + "," + num(row.fp) +
                "," + num(row.fp_se) + "\n";
    }
    write_text(opt.out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gamma k-NN: class-asymmetric nearest neighbors for imbalanced binary data"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::vector<std::string> data_paths;
    std::string data_path;
    double gamma = 1.0;
    int resolution = 200;
    std::string distribution = "uniform-box";
    int dim = 2;
    long m_plus = 10;
    long m_minus = 100;
    long trials = 100000;
    double epsilon = 0.25;
    std::string query_text;

    const auto add_sampler_flags = [&](CLI::App* cmd) {
        cmd->add_option("--sampler", opt.sampler,
                        "Oversampler: none, smote, borderline, adasyn, smote-enn, smote-tomek")
            ->capture_default_str();
        cmd->add_option("--ratio", opt.ratio, "Sampler target ratio m+/m-, in (0,1]")
            ->capture_default_str();
        cmd->add_option("--sampler-seed", opt.sampler_seed, "Sampler RNG seed")
            ->capture_default_str();
        cmd->add_option("--sampler-k", opt.sampler_k, "Sampler neighborhood size")
            ->capture_default_str();
        cmd->add_flag("--borderline-include-noise", opt.include_noise,
                      "Borderline: keep all-negative neighborhoods as seeds");
    };
    const auto add_eval_flags = [&](CLI::App* cmd) {
        cmd->add_option("--k", opt.k, "Neighborhood size")->capture_default_str();
        cmd->add_option("--seed", opt.seed, "Base RNG seed")->capture_default_str();
        cmd->add_option("--folds", opt.folds, "Cross-validation folds")->capture_default_str();
        cmd->add_option("--gamma-grid", opt.gammas,
                        "Comma-separated gamma grid override (both real and synthetic)");
        cmd->add_flag("--sequential-tuning", opt.sequential,
                      "Tune (ratio, gamma) first, synthetic gamma second");
        cmd->add_option("--out", opt.out, "Output path");
    };

    CLI::App* bench = app.add_subcommand("bench", "Run seeded experiments, write JSON + table");
    bench->add_option("--data", data_paths, "Dataset path(s): CSV, KEEL .dat, or fixture:irN")
        ->required();
    bench->add_option("--classifier", opt.classifier,
                      "Classifier: knn, wknn, cwknn, dupknn, gammaknn")
        ->capture_default_str();
    bench->add_option("--runs", opt.runs, "Independent runs to average")->capture_default_str();
    add_sampler_flags(bench);
    add_eval_flags(bench);

    CLI::App* tune = app.add_subcommand("tune", "Cross-validated gamma (and ratio) search");
    CLI::Option* tune_ratio = nullptr;
    tune->add_option("--data", data_path, "Dataset path")->required();
    add_sampler_flags(tune);
    add_eval_flags(tune);
    tune_ratio = tune->get_option("--ratio");

    CLI::App* boundary = app.add_subcommand("boundary", "Decision-boundary raster over 2-D data");
    boundary->add_option("--data", data_path, "2-D dataset path")->required();
    boundary->add_option("--gamma", gamma, "Positive-class distance multiplier")
        ->capture_default_str();
    boundary->add_option("--resolution", resolution, "Grid cells per axis")
        ->capture_default_str()
        ->check(CLI::Range(2, 4096));
    boundary->add_option("--k", opt.k, "Neighborhood size")->capture_default_str();
    boundary->add_option("--out", opt.out, "Output path");

    CLI::App* heatmap = app.add_subcommand("heatmap", "CV-F1 matrix over (gamma_real, gamma_synth)");
    heatmap->add_option("--data", data_path, "Dataset path")->required();
    add_sampler_flags(heatmap);
    add_eval_flags(heatmap);

    CLI::App* sample = app.add_subcommand("sample", "Apply an oversampler, emit CSV with provenance");
    sample->add_option("--data", data_path, "Dataset path")->required();
    add_sampler_flags(sample);
    sample->add_option("--out", opt.out, "Output path");

    CLI::App* theory = app.add_subcommand("theory", "Monte-Carlo FN/FP probability tables");
    theory->add_option("--distribution", distribution,
                       "uniform-box, gaussian, or two-gaussian")
        ->capture_default_str();
    theory->add_option("--dim", dim, "Sample dimension")->capture_default_str()->check(CLI::PositiveNumber);
    theory->add_option("--m-plus", m_plus, "Positive training count")->capture_default_str();
    theory->add_option("--m-minus", m_minus, "Negative training count")->capture_default_str();
    theory->add_option("--trials", trials, "Monte-Carlo trials")->capture_default_str();
    theory->add_option("--epsilon", epsilon, "Nearest-opposite-class distance")
        ->capture_default_str();
    theory->add_option("--query", query_text, "Query point, comma-separated (default: center)");
    theory->add_option("--gamma-grid", opt.gammas,
                       "Comma-separated gamma grid (default 0.1..2.0 step 0.1)");
    theory->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
    theory->add_option("--out", opt.out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(bench)) return cmd_bench(data_paths, opt);
        if (app.got_subcommand(tune)) return cmd_tune(data_path, opt, tune_ratio->count() > 0);
        if (app.got_subcommand(boundary)) return cmd_boundary(data_path, gamma, resolution, opt);
        if (app.got_subcommand(heatmap)) return cmd_heatmap(data_path, opt);
        if (app.got_subcommand(sample)) return cmd_sample(data_path, opt);
        if (app.got_subcommand(theory)) {
            return cmd_theory(distribution, dim, m_plus, m_minus, trials, epsilon, query_text, opt);
        }
        return 1;
    } catch (const gknn::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
