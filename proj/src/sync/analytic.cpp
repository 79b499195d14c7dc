#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "turnsim/errors.hpp"
#include "turnsim/sync/metrics.hpp"

namespace turnsim::sync {

namespace {

/// FFTW planning is not thread-safe; executions are. One process-wide lock
/// around plan creation and destruction.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_constant(const RealSeries& x) {
    for (double v : x) {
        if (v != x.front()) return false;
    }
    return true;
}

}  // namespace

std::vector<std::complex<double>> analytic_signal(const RealSeries& x) {
    const std::size_t n = x.size();
    if (n < 4) {
        throw UsageError("analytic_signal: need at least 4 samples");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw UsageError("analytic_signal: series contains a non-finite value");
        }
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    std::vector<std::complex<double>> time(n);
    std::vector<std::complex<double>> freq(n);
    for (std::size_t i = 0; i < n; ++i) time[i] = x[i] - mean;

    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        forward = fftw_plan_dft_1d(
            static_cast<int>(n), reinterpret_cast<fftw_complex*>(time.data()),
            reinterpret_cast<fftw_complex*>(freq.data()), FFTW_FORWARD,
            FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(
            static_cast<int>(n), reinterpret_cast<fftw_complex*>(freq.data()),
            reinterpret_cast<fftw_complex*>(time.data()), FFTW_BACKWARD,
            FFTW_ESTIMATE);
    }
    fftw_execute(forward);

    // Keep DC (and the Nyquist bin for even lengths), double the positive
    // frequencies, zero the negative ones.
    const std::size_t half = n / 2;
    const bool even = (n % 2) == 0;
    const std::size_t last_positive = even ? half - 1 : half;
    for (std::size_t k = 1; k <= last_positive; ++k) freq[k] *= 2.0;
    for (std::size_t k = (even ? half + 1 : half + 1); k < n; ++k) {
        freq[k] = {0.0, 0.0};
    }

    fftw_execute(backward);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }

    const double scale = 1.0 / static_cast<double>(n);
    for (std::complex<double>& v : time) v *= scale;
    return time;
}

PlvResult phase_locking_value(const RealSeries& a, const RealSeries& b,
                              Exec exec) {
    if (a.size() != b.size()) {
        throw UsageError("phase_locking_value: length mismatch");
    }
    const std::size_t n = a.size();
    if (n < 20) {
        throw UsageError("phase_locking_value: need at least 20 samples");
    }
    if (is_constant(a) || is_constant(b)) {
        return {0.0, true};
    }

    // Periodic Hann taper against spectral leakage on non-periodic windows.
    // The periodic form is bin-aligned: tapering an integer-frequency
    // sinusoid spreads it over exactly three DFT bins, so its analytic
    // phase stays exact.
    RealSeries ta(n);
    RealSeries tb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                               static_cast<double>(i) /
                                               static_cast<double>(n)));
        ta[i] = a[i] * w;
        tb[i] = b[i] * w;
    }
    const auto za = analytic_signal(ta);
    const auto zb = analytic_signal(tb);

    // Drop 5% of samples per side against edge effects, then take the
    // magnitude of the mean phase-difference exponential.
    const std::size_t drop = n / 20;
    const std::size_t m = n - 2 * drop;
    std::vector<std::complex<double>> unit(m);
    const long long mm = static_cast<long long>(m);
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long i = 0; i < mm; ++i) {
            unit[i] = std::polar(1.0, std::arg(za[drop + i]) -
                                          std::arg(zb[drop + i]));
        }
    } else {
        for (long long i = 0; i < mm; ++i) {
            unit[i] = std::polar(1.0, std::arg(za[drop + i]) -
                                          std::arg(zb[drop + i]));
        }
    }

    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) sum += unit[i];
    const double value = std::abs(sum) / static_cast<double>(m);
    return {std::clamp(value, 0.0, 1.0), false};
}

}  // namespace turnsim::sync
