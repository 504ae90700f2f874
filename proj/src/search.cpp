#include "sdrc/search.hpp"

#include "sdrc/parallel.hpp"
#include "sdrc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace sdrc {

const char* to_string(MetricKind kind) noexcept {
    return kind == MetricKind::Capacity ? "capacity" : "nmse";
}

// =============================================================================
// TrialEvaluator
// =============================================================================

namespace {

/// z-scores columns with the given statistics; constant columns become zero.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean, const Eigen::VectorXd& scale,
                            const std::vector<Eigen::Index>& constant_cols) {
    Eigen::MatrixXd z = (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
    for (const auto j : constant_cols) z.col(j).setZero();
    return z;
}

}  // namespace

TrialEvaluator::TrialEvaluator(const StateMatrix& pool, const Eigen::MatrixXd& targets, const SplitSpec& split_spec,
                               double lambda, MetricKind metric)
    : pool_(&pool), metric_(metric), lambda_(lambda) {
    if (pool.rows() != targets.rows()) {
        throw std::invalid_argument("search: task has " + std::to_string(targets.rows()) + " rows but the state pool has " +
                                    std::to_string(pool.rows()));
    }
    if (static_cast<Eigen::Index>(pool.columns.size()) != pool.cols()) {
        throw std::invalid_argument("search: pool column labels do not match its values");
    }
    if (!(lambda > 0.0)) throw std::invalid_argument("search: lambda must be > 0");
    if (metric == MetricKind::Nmse && targets.cols() != 1) throw std::invalid_argument("search: NMSE needs one target column");

    for (const auto& c : pool.columns) {
        if (c.detector < 0 || c.node_index < 0) throw std::invalid_argument("search: negative detector or node index");
        n_detectors_ = std::max(n_detectors_, c.detector + 1);
        pool_size_ = std::max(pool_size_, c.node_index + 1);
    }
    column_of_.assign(static_cast<std::size_t>(n_detectors_), std::vector<Eigen::Index>(static_cast<std::size_t>(pool_size_), -1));
    for (Eigen::Index j = 0; j < pool.cols(); ++j) {
        const auto& c = pool.columns[static_cast<std::size_t>(j)];
        auto& slot = column_of_[static_cast<std::size_t>(c.detector)][static_cast<std::size_t>(c.node_index)];
        if (slot >= 0) throw std::invalid_argument("search: duplicate (detector, node_index) column " + c.label);
        slot = j;
    }
    for (int idx = 0; idx < pool_size_; ++idx) {
        bool everywhere = true;
        for (const auto& det : column_of_) everywhere = everywhere && det[static_cast<std::size_t>(idx)] >= 0;
        if (everywhere) available_.push_back(idx);
    }
    if (available_.empty()) throw std::invalid_argument("search: no node index is present on every detector");

    const Partition p = split(pool.values, targets, split_spec);
    if (p.test_x.rows() < 30) throw std::invalid_argument("search: test partition shorter than 30 rows");

    const auto n_train = static_cast<double>(p.train_x.rows());
    const Eigen::VectorXd mean = p.train_x.colwise().mean().transpose();
    Eigen::VectorXd scale =
        ((p.train_x.rowwise() - mean.transpose()).array().square().colwise().sum() / n_train).sqrt().transpose();
    std::vector<Eigen::Index> constant_cols;
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        if (scale(j) == 0.0 || scale(j) <= 1e-13 * std::abs(mean(j))) {
            scale(j) = 1.0;
            constant_cols.push_back(j);
        }
    }

    const Eigen::MatrixXd z = standardize(p.train_x, mean, scale, constant_cols);
    train_ymean_ = p.train_y.colwise().mean().transpose();
    gram_ = z.transpose() * z;
    cross_ = z.transpose() * (p.train_y.rowwise() - train_ymean_.transpose());

    const Eigen::MatrixXd zt = standardize(p.test_x, mean, scale, constant_cols);
    test_zmean_ = zt.colwise().mean().transpose();
    test_ymean_ = p.test_y.colwise().mean().transpose();
    const Eigen::MatrixXd ztc = zt.rowwise() - test_zmean_.transpose();
    const Eigen::MatrixXd ytc = p.test_y.rowwise() - test_ymean_.transpose();
    test_zz_ = ztc.transpose() * ztc;
    test_zy_ = ztc.transpose() * ytc;
    test_yy_ = ytc.colwise().squaredNorm().transpose();
    n_test_ = static_cast<double>(p.test_x.rows());

    for (Eigen::Index k = 0; k < p.test_y.cols(); ++k) {
        if ((p.test_y.col(k).array() == p.test_y(0, k)).all()) {
            throw std::invalid_argument("search: constant test target in column " + std::to_string(k + 1) +
                                        " (degenerate split)");
        }
    }
}

std::vector<double> TrialEvaluator::evaluate_outputs(const std::vector<Eigen::Index>& cols) const {
    if (cols.empty()) throw std::invalid_argument("search: empty column selection");
    for (const auto c : cols) {
        if (c < 0 || c >= gram_.rows()) throw std::out_of_range("search: column index outside the pool");
    }
    Eigen::MatrixXd a = gram_(cols, cols);
    a.diagonal().array() += lambda_;
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw SingularSystemError("search: normal equations not positive definite");
    const Eigen::MatrixXd w = llt.solve(cross_(cols, Eigen::all));
    const Eigen::MatrixXd szz_w = test_zz_(cols, cols) * w;
    const Eigen::MatrixXd szy = test_zy_(cols, Eigen::all);

    std::vector<double> out(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
        const double wsw = w.col(k).dot(szz_w.col(k));
        const double wsy = w.col(k).dot(szy.col(k));
        const double syy = test_yy_(k);
        if (metric_ == MetricKind::Capacity) {
            const double r2 = wsw > 0.0 ? wsy * wsy / (wsw * syy) : 0.0;
            out[static_cast<std::size_t>(k)] = std::min(r2, 1.0);
        } else {
            double offset = train_ymean_(k) - test_ymean_(k);
            for (std::size_t i = 0; i < cols.size(); ++i) offset += test_zmean_(cols[i]) * w(static_cast<Eigen::Index>(i), k);
            const double sse = wsw - 2.0 * wsy + syy + n_test_ * offset * offset;
            out[static_cast<std::size_t>(k)] = std::max(sse, 0.0) / syy;
        }
    }
    return out;
}

double TrialEvaluator::evaluate_columns(const std::vector<Eigen::Index>& cols) const {
    const auto v = evaluate_outputs(cols);
    if (metric_ == MetricKind::Nmse) return v.front();
    return std::accumulate(v.begin(), v.end(), 0.0);
}

std::vector<Eigen::Index> TrialEvaluator::columns_for(const std::vector<int>& node_indices, SelectionMode mode) const {
    std::vector<Eigen::Index> cols;
    const auto lookup = [&](int d, int idx) {
        if (idx < 0 || idx >= pool_size_) throw std::out_of_range("search: node index " + std::to_string(idx) + " outside the pool");
        const auto c = column_of_[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx)];
        if (c < 0) {
            throw std::invalid_argument("search: detector " + std::to_string(d) + " has no node " + std::to_string(idx));
        }
        return c;
    };
    if (mode == SelectionMode::Shared) {
        cols.reserve(node_indices.size() * static_cast<std::size_t>(n_detectors_));
        for (int d = 0; d < n_detectors_; ++d) {
            for (int idx : node_indices) cols.push_back(lookup(d, idx));
        }
    } else {
        if (node_indices.size() % static_cast<std::size_t>(n_detectors_) != 0) {
            throw std::invalid_argument("search: per-detector selection must hold one block per detector");
        }
        const std::size_t per = node_indices.size() / static_cast<std::size_t>(n_detectors_);
        for (std::size_t i = 0; i < node_indices.size(); ++i) {
            cols.push_back(lookup(static_cast<int>(i / per), node_indices[i]));
        }
    }
    return cols;
}

// =============================================================================
// Selection
// =============================================================================

std::uint64_t binomial(int n, int k) noexcept {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays exact because r is C(n-k+i-1, i-1).
        const auto num = static_cast<std::uint64_t>(n - k + i);
        if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
        r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
}

namespace {

std::uint64_t saturating_pow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
        r *= base;
    }
    return r;
}

std::vector<std::vector<int>> all_combinations(int pool, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> c(static_cast<std::size_t>(n));
    std::iota(c.begin(), c.end(), 0);
    while (true) {
        out.push_back(c);
        int i = n - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == pool - n + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

std::vector<int> random_subset(std::mt19937_64& rng, int pool, int n) {
    std::vector<int> idx(static_cast<std::size_t>(pool));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(pool - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(n));
    std::sort(idx.begin(), idx.end());
    return idx;
}

bool better(const SelectionTrial& a, const SelectionTrial& b, bool higher) {
    const bool an = std::isnan(a.metric_value), bn = std::isnan(b.metric_value);
    if (an != bn) return bn;
    if (!an && a.metric_value != b.metric_value) {
        return higher ? a.metric_value > b.metric_value : a.metric_value < b.metric_value;
    }
    return a.node_indices < b.node_indices;
}

}  // namespace

std::vector<SelectionTrial> run_selection(const TrialEvaluator& evaluator, const SelectionOptions& options) {
    const auto& available = evaluator.available_nodes();
    const int pool = static_cast<int>(available.size());
    const int n = options.n_per_detector;
    if (n < 1 || n > pool) {
        throw std::invalid_argument("search: n_per_detector = " + std::to_string(n) + " must be in [1, " +
                                    std::to_string(pool) + "]");
    }
    if (options.n_trials < 1) throw std::invalid_argument("search: n_trials must be >= 1");
    const int groups = options.mode == SelectionMode::Shared ? 1 : evaluator.n_detectors();
    const std::uint64_t total = saturating_pow(binomial(pool, n), groups);

    std::vector<SelectionTrial> trials;
    if (total <= options.n_trials) {
        const auto combos = all_combinations(pool, n);
        std::vector<std::size_t> digit(static_cast<std::size_t>(groups), 0);
        for (std::uint64_t t = 0; t < total; ++t) {
            SelectionTrial tr;
            for (int g = 0; g < groups; ++g) {
                for (int i : combos[digit[static_cast<std::size_t>(g)]]) {
                    tr.node_indices.push_back(available[static_cast<std::size_t>(i)]);
                }
            }
            tr.seed = derive_seed(options.master_seed, t);
            trials.push_back(std::move(tr));
            for (int g = groups - 1; g >= 0; --g) {
                if (++digit[static_cast<std::size_t>(g)] < combos.size()) break;
                digit[static_cast<std::size_t>(g)] = 0;
            }
        }
    } else {
        std::set<std::vector<int>> seen;
        trials.reserve(options.n_trials);
        for (std::size_t t = 0; t < options.n_trials; ++t) {
            SelectionTrial tr;
            tr.seed = derive_seed(options.master_seed, t);
            std::mt19937_64 rng(tr.seed);
            do {
                tr.node_indices.clear();
                for (int g = 0; g < groups; ++g) {
                    for (int i : random_subset(rng, pool, n)) tr.node_indices.push_back(available[static_cast<std::size_t>(i)]);
                }
            } while (!seen.insert(tr.node_indices).second);
            trials.push_back(std::move(tr));
        }
    }

    parallel_for(trials.size(), options.threads, [&](std::size_t i) {
        trials[i].metric_value = evaluator.evaluate_columns(evaluator.columns_for(trials[i].node_indices, options.mode));
    });
    const bool higher = evaluator.higher_is_better();
    std::sort(trials.begin(), trials.end(), [higher](const auto& a, const auto& b) { return better(a, b, higher); });
    return trials;
}

std::vector<int> occurrence_histogram(const std::vector<SelectionTrial>& trials, std::size_t k, int pool_size) {
    if (k > trials.size()) throw std::invalid_argument("occurrence_histogram: k exceeds the number of trials");
    if (pool_size < 1) throw std::invalid_argument("occurrence_histogram: pool_size must be >= 1");
    std::vector<int> counts(static_cast<std::size_t>(pool_size), 0);
    for (std::size_t t = 0; t < k; ++t) {
        for (int idx : trials[t].node_indices) {
            if (idx < 0 || idx >= pool_size) throw std::out_of_range("occurrence_histogram: node index outside the pool");
            ++counts[static_cast<std::size_t>(idx)];
        }
    }
    return counts;
}

std::vector<ComparisonRow> compare_extraction(const TrialEvaluator& spectral, const TrialEvaluator& virtual_pool,
                                              const std::vector<int>& node_counts, const SelectionOptions& options) {
    if (spectral.pool().rows() != virtual_pool.pool().rows() || spectral.n_detectors() != virtual_pool.n_detectors()) {
        throw std::invalid_argument("compare_extraction: pools come from mismatched response sets");
    }
    if (spectral.metric() != virtual_pool.metric()) throw std::invalid_argument("compare_extraction: metrics differ");
    std::vector<ComparisonRow> rows;
    for (int n : node_counts) {
        SelectionOptions o = options;
        o.n_per_detector = n;
        const auto s = run_selection(spectral, o);
        const auto v = run_selection(virtual_pool, o);
        const auto range = [](const std::vector<SelectionTrial>& t) {
            auto [lo, hi] = std::minmax_element(t.begin(), t.end(), [](const auto& a, const auto& b) {
                return a.metric_value < b.metric_value;
            });
            return std::pair{lo->metric_value, hi->metric_value};
        };
        ComparisonRow r;
        r.n_per_detector = n;
        r.trials = std::max(s.size(), v.size());
        std::tie(r.spectral_min, r.spectral_max) = range(s);
        std::tie(r.virtual_min, r.virtual_max) = range(v);
        r.spectral_best = s.front();
        r.virtual_best = v.front();
        rows.push_back(r);
    }
    return rows;
}

// =============================================================================
// Two-branch helpers
// =============================================================================

double occurrence_weighted_frequency(const std::vector<int>& counts, const std::vector<double>& centers,
                                     double exclude_center, double exclude_halfwidth) {
    if (counts.size() != centers.size()) throw std::invalid_argument("occurrence_weighted_frequency: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (std::abs(centers[i] - exclude_center) <= exclude_halfwidth) continue;
        num += counts[i] * centers[i];
        den += counts[i];
    }
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

int modal_node(const std::vector<int>& counts) {
    if (counts.empty()) throw std::invalid_argument("modal_node: empty histogram");
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: x has zero variance");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

}  // namespace sdrc
