#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gknn/dataset.hpp"
#include "gknn/evaluation.hpp"
#include "gknn/fixtures.hpp"
#include "gknn/rng.hpp"

#include <cmath>
#include <vector>

using namespace gknn;

namespace {

Eigen::VectorXi labels(const std::vector<int>& ys) {
    Eigen::VectorXi v(static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < ys.size(); ++i) v[static_cast<Eigen::Index>(i)] = ys[i];
    return v;
}

Dataset by_counts(Eigen::Index m_plus, Eigen::Index m_minus, std::uint64_t seed) {
    return make_two_gaussian(m_plus, m_minus, seed, "counts");
}

}  // namespace

TEST_CASE("confusion counts") {
    const ConfusionCounts c = confusion(labels({1, 1, -1}), labels({1, -1, -1}));
    CHECK(c.tp == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 1);
    CHECK(c.tn == 1);
    CHECK(c.total() == 3);
    CHECK_THROWS_AS(confusion(labels({1, 1}), labels({1})), data_error);
}

TEST_CASE("f_measure") {
    CHECK(f_measure({2, 1, 1, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(f_measure({0, 0, 0, 5}) == 0.0);
    CHECK(f_measure({0, 3, 2, 5}) == 0.0);
    // equals the harmonic mean of precision and recall whenever both exist
    Rng rng(12);
    for (int t = 0; t < 200; ++t) {
        ConfusionCounts c{static_cast<long>(1 + rng.uniform_index(50)),
                          static_cast<long>(rng.uniform_index(50)),
                          static_cast<long>(rng.uniform_index(50)),
                          static_cast<long>(rng.uniform_index(50))};
        const auto [p, r] = precision_recall(c);
        REQUIRE(p > 0.0);
        REQUIRE(r > 0.0);
        CHECK(f_measure(c) == doctest::Approx(2.0 * p * r / (p + r)).epsilon(1e-12));
    }
}

TEST_CASE("precision_recall") {
    const auto [p, r] = precision_recall({8, 2, 2, 10});
    CHECK(p == 0.8);
    CHECK(r == 0.8);
    CHECK(precision_recall({0, 0, 4, 1}).first == 0.0);
    CHECK(precision_recall({0, 4, 0, 1}).second == 0.0);
}

TEST_CASE("imbalance_ratio") {
    CHECK(imbalance_ratio(by_counts(136, 864, 1)) == doctest::Approx(6.3529411764705879));
    CHECK(imbalance_ratio(by_counts(461, 539, 1)) == doctest::Approx(1.1691973969631237));
    Dataset none;
    none.X.resize(2, 1);
    none.X << 0.0, 1.0;
    none.y = labels({-1, -1});
    none.provenance.assign(2, Provenance::real);
    CHECK_THROWS_AS(imbalance_ratio(none), data_error);
}

TEST_CASE("tune_gamma returns the single grid point when there is no choice") {
    const Dataset train = by_counts(15, 60, 42);
    TuningGrid grid;
    grid.gamma_real = {0.7};
    grid.gamma_synth = {1.3};
    grid.ratios = {0.5};
    SamplerConfig cfg;
    cfg.strategy = SamplerStrategy::smote;
    const TuneResult r = tune_gamma(train, 3, grid, cfg, 5, 9);
    CHECK(r.gamma_real == 0.7);
    CHECK(r.gamma_synth == 1.3);
    CHECK(r.ratio == 0.5);
    CHECK(r.folds_used == 5);
    CHECK(r.cv_f1 >= 0.0);
    CHECK(r.cv_f1 <= 1.0);
    // without a sampler the synthetic gamma is pinned to the real one
    const TuneResult plain = tune_gamma(train, 3, grid, std::nullopt, 5, 9);
    CHECK(plain.gamma_synth == plain.gamma_real);
    CHECK(plain.ratio == 0.0);
}

TEST_CASE("cross-validation never leaks validation rows into the sampler") {
    const Dataset train = by_counts(15, 60, 77);
    const int folds = 5;
    const std::uint64_t seed = 123;

    // reproduce the fold assignment the tuner uses
    const std::vector<std::vector<Eigen::Index>> val_sets =
        stratified_fold_indices(train, folds, derive_seed(seed, 0));
    REQUIRE(val_sets.size() == static_cast<std::size_t>(folds));

    int calls = 0;
    bool all_exact = true;
    const SamplerFn probe = [&](const Dataset& fold_train, double ratio, std::uint64_t s) {
        const std::size_t f = static_cast<std::size_t>(calls++) % val_sets.size();
        std::vector<char> in_val(static_cast<std::size_t>(train.rows()), 0);
        for (Eigen::Index i : val_sets[f]) in_val[static_cast<std::size_t>(i)] = 1;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (!in_val[static_cast<std::size_t>(i)]) keep.push_back(i);
        }
        Dataset expect = train.select(keep);
        expect = apply_normalizer(expect, fit_normalizer(expect));
        if (fold_train.rows() != expect.rows() || fold_train.X != expect.X ||
            fold_train.y != expect.y) {
            all_exact = false;
        }
        SamplerConfig cfg;
        cfg.strategy = SamplerStrategy::smote;
        cfg.target_ratio = ratio;
        cfg.seed = s;
        return smote(fold_train, cfg);
    };

    TuningGrid grid;
    grid.gamma_real = {0.5, 1.0};
    grid.gamma_synth = {0.8, 1.2};
    grid.ratios = {0.6};
    const TuneResult r = tune_gamma_with(train, 3, grid, &probe, folds, seed);
    CHECK(calls == folds);  // one sampler call per fold for the single ratio
    CHECK(all_exact);       // sampler saw exactly the normalized complement rows
    CHECK(r.ratio == 0.6);
}

TEST_CASE("cv objective equals direct classification of each fold") {
    // Mixed provenance with distinct real/synthetic multipliers is the case
    // where the cached per-group lists could diverge from the classifier.
    const Dataset train = by_counts(18, 72, 555);
    const int folds = 4;
    const int k = 3;
    const std::uint64_t seed = 11;
    const double gr = 0.6, gs = 1.7, ratio = 0.8;

    const std::vector<std::vector<Eigen::Index>> val_sets =
        stratified_fold_indices(train, folds, derive_seed(seed, 0));
    REQUIRE(val_sets.size() == static_cast<std::size_t>(folds));

    std::vector<Dataset> fold_trains;
    const SamplerFn probe = [&](const Dataset& fold_train, double r, std::uint64_t s) {
        SamplerConfig cfg;
        cfg.strategy = SamplerStrategy::smote;
        cfg.target_ratio = r;
        cfg.seed = s;
        SamplerResult out = smote(fold_train, cfg);
        fold_trains.push_back(out.data);
        return out;
    };

    TuningGrid grid;
    grid.gamma_real = {gr};
    grid.gamma_synth = {gs};
    grid.ratios = {ratio};
    const TuneResult r = tune_gamma_with(train, k, grid, &probe, folds, seed);
    REQUIRE(fold_trains.size() == static_cast<std::size_t>(folds));
    CHECK(r.gamma_real == gr);
    CHECK(r.gamma_synth == gs);

    double sum = 0.0;
    for (std::size_t f = 0; f < static_cast<std::size_t>(folds); ++f) {
        REQUIRE(fold_trains[f].has_synthetic());
        std::vector<char> in_val(static_cast<std::size_t>(train.rows()), 0);
        for (Eigen::Index i : val_sets[f]) in_val[static_cast<std::size_t>(i)] = 1;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (!in_val[static_cast<std::size_t>(i)]) keep.push_back(i);
        }
        const NormalizationParams norm = fit_normalizer(train.select(keep));
        const Dataset val = apply_normalizer(train.select(val_sets[f]), norm);

        const GammaKnnModel model{&fold_trains[f], k, {gr, gs}};
        ConfusionCounts c;
        for (Eigen::Index i = 0; i < val.rows(); ++i) {
            const int pred = gamma_knn_classify(model, val.X.row(i)).label;
            if (val.y[i] == positive_label) {
                (pred == positive_label ? ++c.tp : ++c.fn);
            } else {
                (pred == positive_label ? ++c.fp : ++c.tn);
            }
        }
        sum += f_measure(c);
    }
    CHECK(r.cv_f1 == sum / folds);
}

TEST_CASE("a superset gamma grid never lowers the tuned objective") {
    const Dataset train = by_counts(12, 60, 5);
    SamplerConfig cfg;
    cfg.strategy = SamplerStrategy::smote;

    TuningGrid small;
    small.gamma_real = {0.4, 0.8};
    small.gamma_synth = {1.0};
    small.ratios = {0.5};
    TuningGrid big = small;
    big.gamma_real = {0.2, 0.4, 0.6, 0.8, 1.0};
    big.gamma_synth = {0.6, 1.0, 1.4};

    const TuneResult a = tune_gamma(train, 3, small, cfg, 4, 31);
    const TuneResult b = tune_gamma(train, 3, big, cfg, 4, 31);
    CHECK(b.cv_f1 >= a.cv_f1);

    // and the same holds without a sampler
    const TuneResult c = tune_gamma(train, 3, small, std::nullopt, 4, 31);
    const TuneResult d = tune_gamma(train, 3, big, std::nullopt, 4, 31);
    CHECK(d.cv_f1 >= c.cv_f1);
}

TEST_CASE("folds auto-reduce to the minority count with a warning") {
    const Dataset train = by_counts(3, 40, 10);
    const TuneResult r = tune_gamma(train, 3, TuningGrid::defaults(), std::nullopt, 10, 4);
    CHECK(r.folds_used == 3);
    REQUIRE_FALSE(r.warnings.empty());
    bool mentioned = false;
    for (const std::string& w : r.warnings) {
        if (w.find("reduced folds") != std::string::npos) mentioned = true;
    }
    CHECK(mentioned);
    // too small to split at all
    const Dataset lone = by_counts(1, 10, 10);
    CHECK_THROWS_AS(tune_gamma(lone, 3, TuningGrid::defaults(), std::nullopt, 10, 4), data_error);
}

TEST_CASE("tune_gamma is deterministic in its seed") {
    const Dataset train = by_counts(10, 50, 3);
    SamplerConfig cfg;
    cfg.strategy = SamplerStrategy::smote;
    TuningGrid grid;
    grid.gamma_real = {0.3, 0.6, 1.0};
    grid.gamma_synth = {0.8, 1.0, 1.2};
    grid.ratios = {0.4, 0.8};
    const TuneResult a = tune_gamma(train, 3, grid, cfg, 5, 20);
    const TuneResult b = tune_gamma(train, 3, grid, cfg, 5, 20);
    CHECK(a.gamma_real == b.gamma_real);
    CHECK(a.gamma_synth == b.gamma_synth);
    CHECK(a.ratio == b.ratio);
    CHECK(a.cv_f1 == b.cv_f1);
}

TEST_CASE("heatmap argmax reproduces the tuned pair at a shared ratio") {
    const Dataset train = by_counts(12, 60, 14);
    TuningGrid grid;
    grid.gamma_real = {0.4, 0.6, 0.8, 1.0};
    grid.gamma_synth = {0.8, 1.0, 1.2};
    grid.ratios = {0.5};
    SamplerConfig cfg;
    cfg.strategy = SamplerStrategy::smote;
    cfg.target_ratio = 0.5;
    const std::uint64_t seed = 88;

    const TuneResult tuned = tune_gamma(train, 3, grid, cfg, 5, seed);
    const HeatmapResult hm = heatmap_matrix(train, 3, grid, cfg, 5, seed);
    REQUIRE(hm.f1.rows() == 4);
    REQUIRE(hm.f1.cols() == 3);

    // argmax under the tuner's tie rules
    double best = -1.0;
    double best_gr = 0.0, best_gs = 0.0;
    for (Eigen::Index r = 0; r < hm.f1.rows(); ++r) {
        for (Eigen::Index c = 0; c < hm.f1.cols(); ++c) {
            const double gr = hm.gamma_real[static_cast<std::size_t>(r)];
            const double gs = hm.gamma_synth[static_cast<std::size_t>(c)];
            const double f1 = hm.f1(r, c);
            bool better = f1 > best;
            if (f1 == best) {
                if (gr != best_gr) {
                    better = gr > best_gr;
                } else if (std::abs(gs - 1.0) != std::abs(best_gs - 1.0)) {
                    better = std::abs(gs - 1.0) < std::abs(best_gs - 1.0);
                } else {
                    better = gs < best_gs;
                }
            }
            if (better) {
                best = f1;
                best_gr = gr;
                best_gs = gs;
            }
        }
    }
    CHECK(best_gr == tuned.gamma_real);
    CHECK(best_gs == tuned.gamma_synth);
    CHECK(best == doctest::Approx(tuned.cv_f1).epsilon(1e-12));
}

TEST_CASE("run_experiment report arithmetic") {
    const Dataset data = fixture_ir5();
    SamplerConfig cfg;
    cfg.strategy = SamplerStrategy::smote;
    cfg.target_ratio = 0.5;
    TuningGrid grid;
    grid.gamma_real = {0.5, 1.0};
    grid.gamma_synth = {1.0};
    grid.ratios = {0.5};

    const EvalReport rep =
        run_experiment(data, ClassifierKind::gammaknn, cfg, 3, 3, 42, grid, 5);
    REQUIRE(rep.per_run.size() == 3);
    double sum = 0.0;
    for (const RunRecord& run : rep.per_run) {
        CHECK(run.f1 == doctest::Approx(f_measure(run.counts)).epsilon(1e-12));
        const auto [p, r] = precision_recall(run.counts);
        CHECK(run.precision == doctest::Approx(p).epsilon(1e-12));
        CHECK(run.recall == doctest::Approx(r).epsilon(1e-12));
        sum += run.f1;
    }
    const double mean = sum / 3.0;
    CHECK(rep.mean_f1 == doctest::Approx(mean).epsilon(1e-12));
    double ss = 0.0;
    for (const RunRecord& run : rep.per_run) ss += (run.f1 - mean) * (run.f1 - mean);
    CHECK(rep.std_f1 == doctest::Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));
    CHECK(rep.per_run[0].seed == 42);
    CHECK(rep.per_run[1].seed == 43);
    CHECK(rep.per_run[2].seed == 44);

    // a single run has no spread
    const EvalReport one = run_experiment(data, ClassifierKind::knn, std::nullopt, 3, 1, 7, grid, 5);
    CHECK(one.per_run.size() == 1);
    CHECK(one.std_f1 == 0.0);
    CHECK(one.mean_f1 == one.per_run[0].f1);

    // identical inputs give identical reports
    const EvalReport again =
        run_experiment(data, ClassifierKind::gammaknn, cfg, 3, 3, 42, grid, 5);
    CHECK(to_json(rep) == to_json(again));
    CHECK(format_table({rep}) == format_table({again}));
}

TEST_CASE("gamma_ir_sweep structure") {
    const Dataset data = fixture_ir1();

    SUBCASE("keep 1.0 leaves the training portion untouched") {
        const std::vector<SweepPoint> pts = gamma_ir_sweep(data, {1.0}, 3, 42, 5);
        REQUIRE(pts.size() == 1);
        auto [train, test] = stratified_split(data, 0.2, 42);
        (void)test;
        CHECK(pts[0].ir == imbalance_ratio(train));
        // and it reproduces a direct tune on that portion
        const TuneResult direct =
            tune_gamma(train, 3, TuningGrid::defaults(), std::nullopt, 5, derive_seed(42, 200));
        CHECK(pts[0].gamma_real == direct.gamma_real);
        CHECK(pts[0].cv_f1 == direct.cv_f1);
    }
    SUBCASE("descending keep fractions give non-decreasing imbalance") {
        const std::vector<SweepPoint> pts =
            gamma_ir_sweep(data, {1.0, 0.5, 0.25, 0.1}, 3, 7, 5);
        REQUIRE(pts.size() == 4);
        for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].ir >= pts[i - 1].ir);
        for (const SweepPoint& p : pts) {
            CHECK(p.gamma_real > 0.0);
            CHECK(p.gamma_real <= 1.0);
            CHECK(p.cv_f1 >= 0.0);
            CHECK(p.cv_f1 <= 1.0);
        }
    }
    SUBCASE("empty fraction list throws") {
        CHECK_THROWS_AS(gamma_ir_sweep(data, {}, 3, 1, 5), data_error);
    }
}

TEST_CASE("spearman") {
    // perfectly concordant and perfectly discordant
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
    // hand value: ranks a {1,2,3}, b {2,1,3} -> rho = 1 - 6*2/(3*8) = 0.5
    CHECK(spearman({10, 20, 30}, {5, 1, 8}) == doctest::Approx(0.5));
    // ties get average ranks: a {1, 2.5, 2.5, 4}
    const double rho = spearman({1, 2, 2, 3}, {1, 2, 2, 3});
    CHECK(rho == doctest::Approx(1.0));
    // constant input has no ordering information
    CHECK(spearman({5, 5, 5}, {1, 2, 3}) == 0.0);
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), data_error);
    CHECK_THROWS_AS(spearman({1}, {1}), data_error);
}
