#pragma once

// Monte Carlo estimation of conditional trace-class measures under Bernoulli
// measures, and the A / B / C evidence report built on it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqca/blocking.hpp"
#include "eqca/core.hpp"

namespace eqca {

/// Independent cells, letter a with probability probs[a].
class BernoulliSpec {
public:
    explicit BernoulliSpec(std::vector<double> probs);
    static BernoulliSpec uniform(int alphabet_size);

    int alphabet_size() const noexcept { return static_cast<int>(probs_.size()); }
    const std::vector<double>& probs() const noexcept { return probs_; }
    // Letter whose cumulative interval contains u in [0, 1).
    Letter letter_for(double u) const;
    bool is_uniform() const noexcept;

private:
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

/// A spatially periodic base point; position i holds config.at(i + center).
struct BasePoint {
    CyclicConfig config;
    std::int64_t center = 0;

    Letter at(std::int64_t i) const { return config.at(i + center); }
    CyclicConfig aligned() const { return config.rotated(center); }
};

/// Window of `width` cells around 0 that agrees with x on [-n, n] and is
/// spec-distributed elsewhere. Cells are drawn in the order 0, -1, 1, -2, 2,
/// ... and every position consumes one draw, so samples of different widths
/// or conditioning radii share their common cells.
WindowConfig sample_conditioned(const BernoulliSpec& spec, const BasePoint& x, std::size_t n, std::size_t width,
                                std::uint64_t seed, std::uint64_t index = 0);

/// First time j <= horizon at which F^j(y) and F^j(x) differ on [-m, m], or
/// nullopt when they agree throughout.
std::optional<std::size_t> first_divergence(const RuleTable& rule, const BasePoint& x, const WindowConfig& y,
                                            std::size_t m, std::size_t horizon);

/// Finite-horizon membership of y in B_[-m,m](x).
bool membership_B(const RuleTable& rule, const BasePoint& x, const WindowConfig& y, std::size_t m,
                  std::size_t horizon);

struct WilsonInterval {
    double low = 0;
    double high = 1;
};

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct EquicontinuityEstimate {
    BasePoint point;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t horizon = 0;
    std::size_t samples = 0;
    std::size_t members = 0;
    double ratio = 0;
    WilsonInterval ci;
    std::size_t trace_classes = 0;  // distinct sampled traces on [-m, m]
    std::uint64_t seed = 0;
};

struct EstimateOptions {
    std::size_t m = 1;
    std::vector<std::size_t> n_list{1, 2, 4, 8};
    std::size_t horizon = 32;
    std::size_t samples = 1000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
};

std::vector<EquicontinuityEstimate> estimate_mu_equicontinuity(const RuleTable& rule, const BernoulliSpec& spec,
                                                               const BasePoint& x, const EstimateOptions& options);

enum class GilmanVerdict { a, b_evidence, c_evidence, inconclusive };

std::string to_string(GilmanVerdict v);

struct GilmanOptions {
    std::vector<std::size_t> m_list{0, 1};
    std::vector<std::size_t> n_list{1, 2, 4, 8};
    std::size_t horizon = 32;
    std::size_t samples = 1000;
    std::uint64_t seed = kDefaultSeed;
    double b_threshold = 0.9;
    double c_threshold = 0.1;
    // blocking search used for class A
    std::size_t lmax = 5;
    std::optional<std::size_t> margin;
    std::size_t max_steps = kDefaultMaxSteps;
    unsigned threads = 1;
};

struct GilmanReport {
    GilmanVerdict verdict = GilmanVerdict::inconclusive;
    std::string provenance;
    std::optional<BlockingCertificate> certificate;
    // estimates[point][m] holds the series along n_list
    std::vector<std::vector<std::vector<EquicontinuityEstimate>>> estimates;
};

GilmanReport classify_gilman(const RuleTable& rule, const BernoulliSpec& spec, const std::vector<BasePoint>& points,
                             const GilmanOptions& options = {});

/// Ratios nondecreasing along n up to CI overlap, ending at or above threshold.
bool trend_toward_one(const std::vector<EquicontinuityEstimate>& series, double threshold);

}  // namespace eqca
