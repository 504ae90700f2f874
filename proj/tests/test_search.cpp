#include "oracles.hpp"

#include "sdrc/readout.hpp"
#include "sdrc/search.hpp"
#include "sdrc/tasks.hpp"

#include <doctest.h>

#include <set>

using namespace sdrc;

namespace {

/// Pool of `n_det` detectors x `pool` nodes; targets depend on a few nodes.
struct Fixture {
    StateMatrix pool;
    Eigen::MatrixXd targets;
};

Fixture make_fixture(int n_det, int pool_size, Eigen::Index rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Fixture f;
    f.pool.values = oracle::gaussian_matrix(rows, n_det * pool_size, rng);
    for (int d = 0; d < n_det; ++d) {
        for (int i = 0; i < pool_size; ++i) {
            f.pool.columns.push_back({d, i, 1e8 * (i + 1), "d" + std::to_string(d) + "n" + std::to_string(i)});
        }
    }
    f.targets.resize(rows, 2);
    f.targets.col(0) = f.pool.values.col(1) - 0.7 * f.pool.values.col(pool_size - 2) +
                       0.3 * oracle::gaussian_matrix(rows, 1, rng);
    f.targets.col(1) = f.pool.values.col(3) + 0.5 * oracle::gaussian_matrix(rows, 1, rng);
    return f;
}

SplitSpec no_washout() {
    SplitSpec s;
    s.washout = 0;
    return s;
}

}  // namespace

TEST_CASE("binomial coefficients") {
    CHECK(binomial(50, 5) == 2118760);
    CHECK(binomial(20, 5) == 15504);
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(200, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("fast evaluator equals train_ridge + predict + capacity on the same columns") {
    const auto f = make_fixture(2, 6, 300, 1);
    const auto spec = no_washout();
    const TrialEvaluator ev(f.pool, f.targets, spec, 1e-2, MetricKind::Capacity);
    for (const std::vector<int>& nodes : {std::vector<int>{1}, std::vector<int>{0, 3, 4}, std::vector<int>{1, 2, 3, 4, 5}}) {
        const auto cols = ev.columns_for(nodes, SelectionMode::Shared);
        CHECK(cols.size() == nodes.size() * 2);
        const StateMatrix sub = f.pool.select_columns(cols);
        const auto p = split(sub.values, f.targets, spec);
        const auto model = train_ridge(p.train_x, p.train_y, 1e-2);
        const auto c = capacity(predict(model, p.test_x), p.test_y);
        CHECK(ev.evaluate_columns(cols) == doctest::Approx(c.capacity).epsilon(1e-9));
        const auto per = ev.evaluate_outputs(cols);
        CHECK(per[0] == doctest::Approx(c.r2_per_k[0]).epsilon(1e-9));
    }
    const TrialEvaluator nm(f.pool, f.targets.leftCols(1), spec, 1e-2, MetricKind::Nmse);
    const auto cols = nm.columns_for({1, 4}, SelectionMode::Shared);
    const StateMatrix sub = f.pool.select_columns(cols);
    const auto p = split(sub.values, f.targets.leftCols(1), spec);
    const auto pred = predict(train_ridge(p.train_x, p.train_y, 1e-2), p.test_x);
    CHECK(nm.evaluate_columns(cols) == doctest::Approx(nmse(pred.col(0), p.test_y.col(0))).epsilon(1e-9));
    CHECK_FALSE(nm.higher_is_better());
}

TEST_CASE("per-detector selection maps blocks to detectors") {
    const auto f = make_fixture(3, 4, 100, 2);
    const TrialEvaluator ev(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    const auto cols = ev.columns_for({0, 1, 2, 3, 1, 2}, SelectionMode::PerDetector);
    CHECK(cols == std::vector<Eigen::Index>{0, 1, 6, 7, 9, 10});
    CHECK_THROWS((void)ev.columns_for({0, 1}, SelectionMode::PerDetector));
}

TEST_CASE("exhaustive enumeration and the random path agree on the best subset") {
    const auto f = make_fixture(1, 10, 400, 3);
    const TrialEvaluator ev(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_per_detector = 3;
    o.n_trials = 120;
    const auto exhaustive = run_selection(ev, o);
    CHECK(exhaustive.size() == 120);
    std::set<std::vector<int>> distinct;
    for (const auto& t : exhaustive) distinct.insert(t.node_indices);
    CHECK(distinct.size() == 120);

    o.n_trials = 119;  // forces the random path
    const auto random = run_selection(ev, o);
    CHECK(random.size() == 119);
    std::set<std::vector<int>> rdistinct;
    for (const auto& t : random) rdistinct.insert(t.node_indices);
    CHECK(rdistinct.size() == 119);
    // 119 of 120 subsets: the best is missed only if it is the one left out.
    const bool has_best = rdistinct.count(exhaustive.front().node_indices) == 1;
    if (has_best) CHECK(random.front().metric_value == exhaustive.front().metric_value);

    // Brute-force oracle over all subsets.
    double best = -1.0;
    for (int a = 0; a < 10; ++a)
        for (int b = a + 1; b < 10; ++b)
            for (int c = b + 1; c < 10; ++c) best = std::max(best, ev.evaluate_columns({a, b, c}));
    CHECK(exhaustive.front().metric_value == best);
    for (std::size_t i = 1; i < exhaustive.size(); ++i) {
        CHECK(exhaustive[i - 1].metric_value >= exhaustive[i].metric_value);
    }
}

TEST_CASE("selection is deterministic and independent of worker count") {
    const auto f = make_fixture(2, 12, 300, 4);
    const TrialEvaluator ev(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_per_detector = 4;
    o.n_trials = 200;
    o.master_seed = 123;
    o.threads = 1;
    const auto serial = run_selection(ev, o);
    o.threads = 4;
    const auto parallel = run_selection(ev, o);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].node_indices == parallel[i].node_indices);
        CHECK(serial[i].metric_value == parallel[i].metric_value);
        CHECK(serial[i].seed == parallel[i].seed);
    }
    o.master_seed = 124;
    CHECK(run_selection(ev, o).front().seed != serial.front().seed);
    o.n_trials = 1;
    const auto one = run_selection(ev, o);
    CHECK(one.size() == 1);
    CHECK(run_selection(ev, o).front().node_indices == one.front().node_indices);
}

TEST_CASE("min <= mean <= max over any trial set") {
    const auto f = make_fixture(1, 8, 200, 5);
    const TrialEvaluator ev(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_per_detector = 2;
    const auto trials = run_selection(ev, o);
    double sum = 0, lo = 1e300, hi = -1e300;
    for (const auto& t : trials) {
        sum += t.metric_value;
        lo = std::min(lo, t.metric_value);
        hi = std::max(hi, t.metric_value);
    }
    const double mean = sum / static_cast<double>(trials.size());
    CHECK(lo <= mean);
    CHECK(mean <= hi);
}

TEST_CASE("selection draws only from nodes present on every detector") {
    auto f = make_fixture(2, 6, 100, 6);
    StateMatrix partial = f.pool.select_columns({0, 1, 2, 3, 4, 5, 8, 9, 10});  // detector 1 lacks 0, 1, 5
    const TrialEvaluator ev(partial, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    CHECK(ev.available_nodes() == std::vector<int>{2, 3, 4});
    SelectionOptions o;
    o.n_per_detector = 2;
    for (const auto& t : run_selection(ev, o)) {
        for (int i : t.node_indices) CHECK((i >= 2 && i <= 4));
    }
    o.n_per_detector = 4;
    CHECK_THROWS((void)run_selection(ev, o));
}

TEST_CASE("occurrence histogram") {
    std::vector<SelectionTrial> trials{{{0, 2, 4}, 3.0, 0}, {{2, 3, 4}, 2.0, 0}, {{1, 2, 3}, 1.0, 0}};
    const auto k2 = occurrence_histogram(trials, 2, 6);
    CHECK(k2 == std::vector<int>{1, 0, 2, 1, 2, 0});  // hand tally
    const auto k1 = occurrence_histogram(trials, 1, 6);
    CHECK(k1 == std::vector<int>{1, 0, 1, 0, 1, 0});
    int sum = 0;
    for (int c : occurrence_histogram(trials, 3, 6)) sum += c;
    CHECK(sum == 3 * 3);
    CHECK_THROWS((void)occurrence_histogram(trials, 4, 6));
    CHECK_THROWS((void)occurrence_histogram(trials, 1, 3));
}

TEST_CASE("top-20 of 5-node selections counts 100 occurrences") {
    const auto f = make_fixture(1, 12, 200, 7);
    const TrialEvaluator ev(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_per_detector = 5;
    o.n_trials = 300;
    const auto trials = run_selection(ev, o);
    int sum = 0;
    for (int c : occurrence_histogram(trials, 20, 12)) sum += c;
    CHECK(sum == 100);
}

TEST_CASE("comparison with identical pools gives identical ranges") {
    const auto f = make_fixture(2, 8, 200, 8);
    const TrialEvaluator a(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    const TrialEvaluator b(f.pool, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    SelectionOptions o;
    o.n_trials = 50;
    const auto rows = compare_extraction(a, b, {1, 2, 3}, o);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.spectral_min == r.virtual_min);
        CHECK(r.spectral_max == r.virtual_max);
        CHECK(r.spectral_best.node_indices == r.virtual_best.node_indices);
    }
}

TEST_CASE("one-node pools compare as two direct evaluations") {
    const auto f = make_fixture(2, 2, 200, 9);
    const StateMatrix s = f.pool.select_columns({0, 2});
    const StateMatrix v = f.pool.select_columns({1, 3});
    const TrialEvaluator es(s, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    StateMatrix v_relabel = v;
    for (auto& c : v_relabel.columns) c.node_index = 0;
    const TrialEvaluator ev(v_relabel, f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    const auto rows = compare_extraction(es, ev, {1}, SelectionOptions{});
    REQUIRE(rows.size() == 1);
    const auto direct = [&](const StateMatrix& m) {
        const auto p = split(m.values, f.targets, no_washout());
        return capacity(predict(train_ridge(p.train_x, p.train_y, 1e-3), p.test_x), p.test_y).capacity;
    };
    CHECK(rows[0].spectral_max == doctest::Approx(direct(s)).epsilon(1e-9));
    CHECK(rows[0].spectral_min == rows[0].spectral_max);
    CHECK(rows[0].virtual_max == doctest::Approx(direct(v)).epsilon(1e-9));

    const TrialEvaluator short_pool(f.pool.select_columns({0}), f.targets, no_washout(), 1e-3, MetricKind::Capacity);
    CHECK_THROWS((void)compare_extraction(es, short_pool, {1}, SelectionOptions{}));
}

TEST_CASE("two-branch helpers") {
    const std::vector<double> centers{1e9, 2e9, 3e9, 4e9};
    const std::vector<int> counts{2, 10, 0, 6};
    // Exclude 2 GHz +- 0.2 GHz: (2*1 + 6*4) / 8 GHz.
    CHECK(occurrence_weighted_frequency(counts, centers, 2e9, 0.2e9) == doctest::Approx(26e9 / 8));
    CHECK(std::isnan(occurrence_weighted_frequency({0, 5, 0, 0}, centers, 2e9, 0.2e9)));
    CHECK(modal_node(counts) == 1);
    CHECK(modal_node({3, 3, 1}) == 0);
    const auto fit = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK_THROWS((void)linear_fit({1, 1}, {2, 3}));
}
