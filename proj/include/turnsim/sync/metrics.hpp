#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace turnsim::sync {

/// Every metric ships as an OpenMP kernel plus a serial reference path.
/// Both paths produce bit-identical results (parallel loops write
/// per-element slots; final reductions run serially in a fixed order), so
/// the choice only affects speed.
enum class Exec { Serial, Parallel };

using SymbolSequence = std::vector<int>;  // non-negative symbols
using RealSeries = std::vector<double>;

/// Plug-in mutual information between two equal-length symbol sequences,
/// in bits. Always >= 0 and <= min of the empirical entropies.
double discrete_mutual_information(const SymbolSequence& a,
                                   const SymbolSequence& b,
                                   Exec exec = Exec::Parallel);

/// Empirical (plug-in) entropy of a symbol sequence, in bits.
double empirical_entropy_bits(const SymbolSequence& a);

struct KsgOptions {
    int k = 4;
    /// Break exact-tie plateaus (clamped or converged series) with uniform
    /// noise of this amplitude before estimating. Deterministic: the noise
    /// stream is derived from jitter_seed only.
    bool jitter = false;
    double jitter_amplitude = 1e-10;
    std::uint64_t jitter_seed = 0x6b7950734d494a74ull;
    Exec exec = Exec::Parallel;
};

/// Kraskov k-nearest-neighbor mutual information (algorithm 1, max-norm),
/// in nats. Deterministic: neighbor ties are broken by sample index.
/// Requires equal lengths with N > k >= 1.
double ksg_mutual_information(const RealSeries& a, const RealSeries& b,
                              const KsgOptions& options);
double ksg_mutual_information(const RealSeries& a, const RealSeries& b, int k,
                              Exec exec = Exec::Parallel);

/// Discrete analytic signal of a real series: mean-removed input with
/// negative frequencies zeroed (DC and Nyquist kept, positive frequencies
/// doubled). The real part equals the mean-removed input within 1e-9.
/// Requires N >= 4.
std::vector<std::complex<double>> analytic_signal(const RealSeries& x);

struct PlvResult {
    double value = 0.0;       // in [0, 1]
    bool degenerate = false;  // an input had no variation; value forced to 0
};

/// Phase-locking value between two equal-length series (N >= 20): magnitude
/// of the mean complex exponential of the analytic-signal phase difference.
/// Inputs are Hann-tapered before the transform; the first and last 5% of
/// samples are discarded against edge effects.
PlvResult phase_locking_value(const RealSeries& a, const RealSeries& b,
                              Exec exec = Exec::Parallel);

/// Smallest t >= window such that max - min of x over [t - window, t] is
/// below epsilon; nullopt when the series never settles.
std::optional<std::size_t> convergence_tick(const RealSeries& x,
                                            std::size_t window,
                                            double epsilon);

}  // namespace turnsim::sync
