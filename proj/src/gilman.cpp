#include "eqca/gilman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "eqca/parallel.hpp"
#include "eqca/random.hpp"

namespace eqca {

namespace {

std::uint64_t hash_rows(const std::vector<Word>& rows) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Word& row : rows) {
        for (Letter a : row) {
            h ^= a;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x100;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Interval central(std::size_t m) { return {-static_cast<std::int64_t>(m), 2 * m + 1}; }

}  // namespace

BernoulliSpec::BernoulliSpec(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty() || probs_.size() > 256) fail(ErrorCode::invalid_argument, "Bernoulli spec needs 1..256 letters");
    double total = 0;
    for (double p : probs_) {
        if (!(p >= 0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "Bernoulli probabilities must be >= 0");
        total += p;
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "Bernoulli probabilities sum to " << total << ", not 1";
        fail(ErrorCode::invalid_argument, os.str());
    }
}

BernoulliSpec BernoulliSpec::uniform(int alphabet_size) {
    if (alphabet_size < 1) fail(ErrorCode::invalid_argument, "alphabet size must be positive");
    return BernoulliSpec(std::vector<double>(static_cast<std::size_t>(alphabet_size), 1.0 / alphabet_size));
}

Letter BernoulliSpec::letter_for(double u) const {
    // The last letter with positive mass absorbs rounding in the cumulative sum.
    std::size_t last = probs_.size() - 1;
    while (last > 0 && probs_[last] == 0) --last;
    for (std::size_t a = 0; a < last; ++a)
        if (probs_[a] > 0 && u < cumulative_[a]) return static_cast<Letter>(a);
    return static_cast<Letter>(last);
}

bool BernoulliSpec::is_uniform() const noexcept {
    return std::all_of(probs_.begin(), probs_.end(), [&](double p) { return p == probs_.front(); });
}

WindowConfig sample_conditioned(const BernoulliSpec& spec, const BasePoint& x, std::size_t n, std::size_t width,
                                std::uint64_t seed, std::uint64_t index) {
    if (width < 2 * n + 1) {
        std::ostringstream os;
        os << "sample width " << width << " cannot hold the conditioned block of " << 2 * n + 1 << " cells";
        fail(ErrorCode::invalid_argument, os.str());
    }
    const auto left = static_cast<std::int64_t>((width - 1) / 2);
    const auto right = static_cast<std::int64_t>(width) - left - 1;
    WindowConfig y{-left, Word(width)};
    auto rng = sample_stream(seed, index);
    const auto fixed = static_cast<std::int64_t>(n);
    auto place = [&](std::int64_t pos) {
        const double u = unit_uniform(rng);
        if (pos < -left || pos > right) return;
        y.cells[static_cast<std::size_t>(pos + left)] = (pos >= -fixed && pos <= fixed) ? x.at(pos) : spec.letter_for(u);
    };
    const std::int64_t reach = std::max(left, right);
    place(0);
    for (std::int64_t d = 1; d <= reach; ++d) {
        place(-d);
        place(d);
    }
    return y;
}

std::optional<std::size_t> first_divergence(const RuleTable& rule, const BasePoint& x, const WindowConfig& y,
                                            std::size_t m, std::size_t horizon) {
    const Trace tx = trace(rule, x.aligned(), central(m), horizon);
    const Trace ty = trace(rule, y, central(m), horizon);
    for (std::size_t j = 0; j <= horizon; ++j)
        if (tx.rows[j] != ty.rows[j]) return j;
    return std::nullopt;
}

bool membership_B(const RuleTable& rule, const BasePoint& x, const WindowConfig& y, std::size_t m,
                  std::size_t horizon) {
    return !first_divergence(rule, x, y, m, horizon).has_value();
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0, 1};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double center = (phat + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
    WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) ci.low = 0;
    if (successes == trials) ci.high = 1;
    return ci;
}

std::vector<EquicontinuityEstimate> estimate_mu_equicontinuity(const RuleTable& rule, const BernoulliSpec& spec,
                                                               const BasePoint& x, const EstimateOptions& options) {
    if (spec.alphabet_size() != rule.alphabet_size())
        fail(ErrorCode::alphabet_mismatch, "Bernoulli spec and rule use different alphabets");
    if (options.samples == 0) fail(ErrorCode::invalid_argument, "estimation needs at least one sample");
    check_letters(rule.alphabet_size(), x.config.cells);
    if (x.config.cells.empty()) fail(ErrorCode::invalid_argument, "base point must be nonempty");

    const Trace tx = trace(rule, x.aligned(), central(options.m), options.horizon);
    const std::size_t reach = options.m + options.horizon * static_cast<std::size_t>(rule.radius());

    std::vector<EquicontinuityEstimate> out;
    for (std::size_t n : options.n_list) {
        if (n < options.m) {
            std::ostringstream os;
            os << "conditioning radius n=" << n << " is below m=" << options.m;
            fail(ErrorCode::invalid_argument, os.str());
        }
        const std::size_t width = 2 * std::max(n, reach) + 1;
        std::vector<char> member(options.samples);
        std::vector<std::uint64_t> classes(options.samples);
        parallel_for(options.samples, options.threads, [&](std::size_t k) {
            const WindowConfig y = sample_conditioned(spec, x, n, width, options.seed, k);
            const Trace ty = trace(rule, y, central(options.m), options.horizon);
            member[k] = ty.rows == tx.rows;
            classes[k] = hash_rows(ty.rows);
        });
        EquicontinuityEstimate e;
        e.point = x;
        e.m = options.m;
        e.n = n;
        e.horizon = options.horizon;
        e.samples = options.samples;
        e.members = static_cast<std::size_t>(std::count(member.begin(), member.end(), 1));
        e.ratio = static_cast<double>(e.members) / static_cast<double>(e.samples);
        e.ci = wilson_interval(e.members, e.samples);
        e.trace_classes = std::set<std::uint64_t>(classes.begin(), classes.end()).size();
        e.seed = options.seed;
        out.push_back(std::move(e));
    }
    return out;
}

std::string to_string(GilmanVerdict v) {
    switch (v) {
        case GilmanVerdict::a: return "A";
        case GilmanVerdict::b_evidence: return "B-EVIDENCE";
        case GilmanVerdict::c_evidence: return "C-EVIDENCE";
        case GilmanVerdict::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

bool trend_toward_one(const std::vector<EquicontinuityEstimate>& series, double threshold) {
    if (series.empty() || series.back().ratio < threshold) return false;
    for (std::size_t k = 1; k < series.size(); ++k) {
        const auto& prev = series[k - 1];
        const auto& cur = series[k];
        if (cur.ratio < prev.ratio && cur.ci.high < prev.ci.low) return false;
    }
    return true;
}

GilmanReport classify_gilman(const RuleTable& rule, const BernoulliSpec& spec, const std::vector<BasePoint>& points,
                             const GilmanOptions& options) {
    if (points.empty()) fail(ErrorCode::invalid_argument, "Gilman classification needs at least one base point");
    if (options.m_list.empty() || options.n_list.empty())
        fail(ErrorCode::invalid_argument, "Gilman classification needs nonempty m and n lists");
    GilmanReport report;

    const std::size_t s = std::max<std::size_t>(1, static_cast<std::size_t>(rule.radius()));
    const std::size_t margin = options.margin.value_or(2 * static_cast<std::size_t>(rule.radius()));
    auto certs = search_blocking_words(rule, s, std::max(options.lmax, s), margin, options.max_steps, false,
                                       options.threads);
    if (!certs.empty()) {
        report.verdict = GilmanVerdict::a;
        report.certificate = std::move(certs.front());
        report.provenance = "blocking certificate for word " + format_word(report.certificate->word) +
                            " (proof: equicontinuity points exist)";
        return report;
    }

    for (const BasePoint& x : points) {
        std::vector<std::vector<EquicontinuityEstimate>> per_m;
        for (std::size_t m : options.m_list) {
            EstimateOptions eo;
            eo.m = m;
            eo.n_list.clear();
            for (std::size_t n : options.n_list)
                if (n >= m) eo.n_list.push_back(n);
            eo.horizon = options.horizon;
            eo.samples = options.samples;
            eo.seed = options.seed;
            eo.threads = options.threads;
            per_m.push_back(eo.n_list.empty() ? std::vector<EquicontinuityEstimate>{}
                                              : estimate_mu_equicontinuity(rule, spec, x, eo));
        }
        report.estimates.push_back(std::move(per_m));
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        const bool all_m = std::all_of(report.estimates[i].begin(), report.estimates[i].end(),
                                       [&](const auto& series) { return trend_toward_one(series, options.b_threshold); });
        if (all_m) {
            report.verdict = GilmanVerdict::b_evidence;
            report.provenance = "base point " + std::to_string(i) + " shows ratios rising to >= " +
                                std::to_string(options.b_threshold) + " at every m (evidence, not proof)";
            return report;
        }
    }
    for (std::size_t j = 0; j < options.m_list.size(); ++j) {
        const bool all_low = std::all_of(report.estimates.begin(), report.estimates.end(), [&](const auto& per_m) {
            return !per_m[j].empty() && per_m[j].back().ratio < options.c_threshold;
        });
        if (all_low) {
            report.verdict = GilmanVerdict::c_evidence;
            report.provenance = "every base point stays below " + std::to_string(options.c_threshold) +
                                " at m=" + std::to_string(options.m_list[j]) + " (evidence, not proof)";
            return report;
        }
    }
    report.verdict = GilmanVerdict::inconclusive;
    report.provenance = "neither trend criterion met";
    return report;
}

}  // namespace eqca
