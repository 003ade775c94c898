#pragma once

// Correlation sequences under the uniform measure, a mixing screen,
// eigenfrequency detection with rational identification, and root-of-unity
// spectra of the finite cyclic models.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eqca/blocking.hpp"
#include "eqca/core.hpp"

namespace eqca {

/// The cylinder set of configurations carrying `word` at `offset`.
struct Cylinder {
    Word word;
    std::int64_t offset = 0;

    Interval interval() const { return {offset, word.size()}; }
};

struct ExactCyclic {
    std::size_t period = 12;
    std::uint64_t budget = std::uint64_t{1} << 22;
};

struct MonteCarlo {
    std::size_t samples = 10000;
    std::uint64_t seed = kDefaultSeed;
};

using CorrelationMethod = std::variant<ExactCyclic, MonteCarlo>;

/// values[n] = nu(U and F^-n V) - nu(U) nu(V), n = 0..horizon.
struct CorrelationSeries {
    std::vector<double> values;
    std::string method;  // "exact_cyclic" or "monte_carlo"
    std::size_t period = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

CorrelationSeries correlation(const RuleTable& rule, const Cylinder& u, const Cylinder& v, std::size_t horizon,
                              const CorrelationMethod& method, unsigned threads = 1);

enum class MixingVerdict { mixing_consistent, not_mixing, inconclusive };

std::string to_string(MixingVerdict v);

MixingVerdict mixing_test(const CorrelationSeries& series, double tail_fraction = 0.5, double tolerance = 0.05);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    auto operator<=>(const Rational& o) const {
        return static_cast<__int128>(num) * o.den <=> static_cast<__int128>(o.num) * den;
    }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

Rational reduced(std::int64_t num, std::int64_t den);

/// Closest fraction to x in [0, 1] with denominator at most max_den
/// (continued fractions with semiconvergents).
Rational best_rational(double x, std::int64_t max_den);

std::vector<std::complex<double>> dft(std::span<const double> series);

struct SpectralPeak {
    double alpha = 0;  // in [0, 1/2]; real series carry the mirror at 1 - alpha
    double magnitude = 0;
    Rational approximation;
    double error = 0;
    bool rational = false;
};

struct SpectralReport {
    std::vector<SpectralPeak> peaks;  // by decreasing magnitude
    double threshold = 0;
    double bin_width = 0;
    std::int64_t max_den = 64;
    double tolerance = 0;
};

struct ScanOptions {
    std::int64_t max_den = 64;
    std::optional<double> tolerance;  // defaults to the bin width 1/L
    double peak_factor = 4;
    std::size_t max_peaks = 16;
};

/// Peaks above peak_factor times the median DFT magnitude, each refined and
/// removed in turn, then matched to a fraction.
SpectralReport eigenvalue_scan(std::span<const double> series, const ScanOptions& options = {});

struct OrbitSpectrum {
    std::size_t period = 0;
    std::size_t states = 0;
    std::map<std::size_t, std::size_t> cycles;  // cycle length -> count
    std::vector<Rational> frequencies;          // multiset, k/l per cycle
};

OrbitSpectrum orbit_spectrum_cyclic(const RuleTable& rule, std::size_t period,
                                    std::uint64_t budget = std::uint64_t{1} << 22, unsigned threads = 1);

struct ShiftComparison {
    std::vector<Rational> shift_frequencies;  // distinct, sorted
    std::vector<Rational> rule_frequencies;
    std::vector<Rational> missing;  // shift frequencies the rule lacks
    bool contained = false;
};

/// Finite-model comparison of frequency sets; a heuristic, not a decision.
ShiftComparison compare_shift_spectrum(const RuleTable& rule, std::size_t period,
                                       std::uint64_t budget = std::uint64_t{1} << 22, unsigned threads = 1);

}  // namespace eqca
