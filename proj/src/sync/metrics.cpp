#include "turnsim/sync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <utility>

#include <boost/math/special_functions/digamma.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "turnsim/errors.hpp"
#include "turnsim/rng.hpp"

namespace turnsim::sync {

namespace {

void require_finite(const RealSeries& x, const char* where) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw UsageError(std::string(where) + ": series contains a non-finite value");
        }
    }
}

/// Map raw symbols to dense ranks (ascending symbol order).
std::vector<int> dense_rank(const SymbolSequence& a, int& alphabet) {
    std::map<int, int> rank;
    for (int s : a) rank.emplace(s, 0);
    int next = 0;
    for (auto& [symbol, r] : rank) r = next++;
    alphabet = next;
    std::vector<int> out;
    out.reserve(a.size());
    for (int s : a) out.push_back(rank.at(s));
    return out;
}

/// Joint histogram of two dense-ranked sequences. Integer accumulation is
/// exact, so the parallel path is bit-identical to the serial one.
std::vector<long long> joint_histogram(const std::vector<int>& a,
                                       const std::vector<int>& b, int ka,
                                       int kb, Exec exec) {
    const long long n = static_cast<long long>(a.size());
    std::vector<long long> joint(static_cast<std::size_t>(ka) * kb, 0);
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            std::vector<long long> local(joint.size(), 0);
#pragma omp for schedule(static) nowait
            for (long long i = 0; i < n; ++i) {
                ++local[static_cast<std::size_t>(a[i]) * kb + b[i]];
            }
#pragma omp critical(turnsim_joint_histogram)
            for (std::size_t c = 0; c < joint.size(); ++c) joint[c] += local[c];
        }
        return joint;
#endif
    }
    for (long long i = 0; i < n; ++i) {
        ++joint[static_cast<std::size_t>(a[i]) * kb + b[i]];
    }
    return joint;
}

}  // namespace

double discrete_mutual_information(const SymbolSequence& a,
                                   const SymbolSequence& b, Exec exec) {
    if (a.size() != b.size()) {
        throw UsageError("discrete_mutual_information: length mismatch");
    }
    if (a.empty()) {
        throw UsageError("discrete_mutual_information: empty sequences");
    }
    int ka = 0;
    int kb = 0;
    const std::vector<int> ra = dense_rank(a, ka);
    const std::vector<int> rb = dense_rank(b, kb);
    const std::vector<long long> joint = joint_histogram(ra, rb, ka, kb, exec);

    std::vector<long long> ca(ka, 0);
    std::vector<long long> cb(kb, 0);
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            ca[i] += joint[static_cast<std::size_t>(i) * kb + j];
            cb[j] += joint[static_cast<std::size_t>(i) * kb + j];
        }
    }

    // Each cell's term is bitwise symmetric in the two arguments, and the
    // terms are summed in sorted order, so MI(a, b) == MI(b, a) exactly and
    // both execution paths agree bit for bit.
    const double n = static_cast<double>(a.size());
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(ka) * kb);
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            const long long nij = joint[static_cast<std::size_t>(i) * kb + j];
            if (nij == 0) continue;
            const double ratio = (static_cast<double>(nij) * n) /
                                 (static_cast<double>(ca[i]) *
                                  static_cast<double>(cb[j]));
            terms.push_back((static_cast<double>(nij) / n) * std::log2(ratio));
        }
    }
    std::sort(terms.begin(), terms.end());
    double mi = 0.0;
    for (double t : terms) mi += t;
    return std::max(0.0, mi);
}

double empirical_entropy_bits(const SymbolSequence& a) {
    if (a.empty()) {
        throw UsageError("empirical_entropy_bits: empty sequence");
    }
    std::map<int, long long> counts;
    for (int s : a) ++counts[s];
    const double n = static_cast<double>(a.size());
    double h = 0.0;
    for (const auto& [symbol, c] : counts) {
        h += (static_cast<double>(c) / n) * std::log2(n / static_cast<double>(c));
    }
    return h;
}

double ksg_mutual_information(const RealSeries& a, const RealSeries& b,
                              const KsgOptions& options) {
    if (a.size() != b.size()) {
        throw UsageError("ksg_mutual_information: length mismatch");
    }
    if (options.k < 1) {
        throw UsageError("ksg_mutual_information: k must be >= 1");
    }
    const long long n = static_cast<long long>(a.size());
    if (n <= options.k) {
        throw UsageError("ksg_mutual_information: need more than k samples");
    }
    require_finite(a, "ksg_mutual_information");
    require_finite(b, "ksg_mutual_information");

    std::vector<double> x(a);
    std::vector<double> y(b);
    if (options.jitter) {
        SplitMix rng(options.jitter_seed);
        for (double& v : x) v += options.jitter_amplitude * rng.uniform();
        for (double& v : y) v += options.jitter_amplitude * rng.uniform();
    }

    const int k = options.k;
    std::vector<int> nx(n);
    std::vector<int> ny(n);
    const auto process = [&](long long i) {
        // Distance to the k-th nearest neighbor in the joint max-norm; exact
        // distance ties are ordered by sample index.
        std::vector<std::pair<double, long long>> dist;
        dist.reserve(n - 1);
        for (long long j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.emplace_back(
                std::max(std::abs(x[j] - x[i]), std::abs(y[j] - y[i])), j);
        }
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        const double eps = dist[static_cast<std::size_t>(k) - 1].first;

        int cx = 0;
        int cy = 0;
        for (long long j = 0; j < n; ++j) {
            if (j == i) continue;
            if (std::abs(x[j] - x[i]) < eps) ++cx;
            if (std::abs(y[j] - y[i]) < eps) ++cy;
        }
        nx[i] = cx;
        ny[i] = cy;
    };

    if (options.exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long i = 0; i < n; ++i) process(i);
    } else {
        for (long long i = 0; i < n; ++i) process(i);
    }

    // Fixed-order serial reduction over exact integer neighbor counts keeps
    // both execution paths bit-identical.
    double acc = 0.0;
    for (long long i = 0; i < n; ++i) {
        acc += boost::math::digamma(static_cast<double>(nx[i] + 1)) +
               boost::math::digamma(static_cast<double>(ny[i] + 1));
    }
    return boost::math::digamma(static_cast<double>(k)) +
           boost::math::digamma(static_cast<double>(n)) - acc / static_cast<double>(n);
}

double ksg_mutual_information(const RealSeries& a, const RealSeries& b, int k,
                              Exec exec) {
    KsgOptions options;
    options.k = k;
    options.exec = exec;
    return ksg_mutual_information(a, b, options);
}

std::optional<std::size_t> convergence_tick(const RealSeries& x,
                                            std::size_t window,
                                            double epsilon) {
    if (window < 2) {
        throw UsageError("convergence_tick: window must be >= 2");
    }
    if (!(epsilon > 0.0)) {
        throw UsageError("convergence_tick: epsilon must be > 0");
    }
    const std::size_t n = x.size();
    if (n <= window) return std::nullopt;

    // Monotonic deques give the sliding max and min in O(n) total.
    std::deque<std::size_t> maxq;
    std::deque<std::size_t> minq;
    for (std::size_t t = 0; t < n; ++t) {
        while (!maxq.empty() && x[maxq.back()] <= x[t]) maxq.pop_back();
        maxq.push_back(t);
        while (!minq.empty() && x[minq.back()] >= x[t]) minq.pop_back();
        minq.push_back(t);
        if (t < window) continue;
        const std::size_t lo = t - window;
        while (maxq.front() < lo) maxq.pop_front();
        while (minq.front() < lo) minq.pop_front();
        if (x[maxq.front()] - x[minq.front()] < epsilon) return t;
    }
    return std::nullopt;
}

}  // namespace turnsim::sync
