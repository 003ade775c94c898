#include "eqca/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "eqca/parallel.hpp"
#include "eqca/random.hpp"

namespace eqca {

namespace {

double cylinder_measure(int q, std::size_t len) { return std::pow(static_cast<double>(q), -static_cast<double>(len)); }

bool matches(const Word& cells, std::int64_t first, const Cylinder& c, std::size_t period) {
    // cells holds positions first, first+1, ... (cyclically when period > 0)
    for (std::size_t k = 0; k < c.word.size(); ++k) {
        std::int64_t pos = c.offset + static_cast<std::int64_t>(k) - first;
        if (period) pos = ((pos % static_cast<std::int64_t>(period)) + static_cast<std::int64_t>(period)) %
                          static_cast<std::int64_t>(period);
        if (cells[static_cast<std::size_t>(pos)] != c.word[k]) return false;
    }
    return true;
}

Interval hull(Interval a, Interval b) {
    const std::int64_t lo = std::min(a.start, b.start);
    const std::int64_t hi = std::max(a.end(), b.end());
    return {lo, static_cast<std::size_t>(hi - lo)};
}

// Least-squares fit of a*cos + b*sin at frequency alpha; returns the fitted
// component and its energy.
struct ToneFit {
    std::vector<double> component;
    double energy = 0;
};

ToneFit fit_tone(std::span<const double> x, double alpha) {
    const std::size_t n = x.size();
    std::vector<double> cs(n), sn(n);
    double cc = 0, ss = 0, cssn = 0, xc = 0, xs = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double ph = 2 * std::numbers::pi * alpha * static_cast<double>(k);
        cs[k] = std::cos(ph);
        sn[k] = std::sin(ph);
        cc += cs[k] * cs[k];
        ss += sn[k] * sn[k];
        cssn += cs[k] * sn[k];
        xc += x[k] * cs[k];
        xs += x[k] * sn[k];
    }
    double a = 0, b = 0;
    const double det = cc * ss - cssn * cssn;
    if (ss < 1e-9 * static_cast<double>(n) || std::abs(det) < 1e-9 * cc * ss) {
        a = cc > 0 ? xc / cc : 0;
    } else {
        a = (xc * ss - xs * cssn) / det;
        b = (xs * cc - xc * cssn) / det;
    }
    ToneFit fit{std::vector<double>(n), 0};
    for (std::size_t k = 0; k < n; ++k) {
        fit.component[k] = a * cs[k] + b * sn[k];
        fit.energy += fit.component[k] * fit.component[k];
    }
    return fit;
}

double dtft_magnitude(std::span<const double> x, double alpha) {
    std::complex<double> acc = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
        acc += x[k] * std::polar(1.0, -2 * std::numbers::pi * alpha * static_cast<double>(k));
    return std::abs(acc);
}

// Frequency in [lo, hi] maximizing the fitted tone energy.
double refine_frequency(std::span<const double> x, double lo, double hi) {
    constexpr int kGrid = 32;
    double best = lo;
    double best_energy = -1;
    for (int g = 0; g <= kGrid; ++g) {
        const double a = lo + (hi - lo) * g / kGrid;
        const double e = fit_tone(x, a).energy;
        if (e > best_energy) {
            best_energy = e;
            best = a;
        }
    }
    const double step = (hi - lo) / kGrid;
    double a = std::max(lo, best - step);
    double b = std::min(hi, best + step);
    const double invphi = (std::sqrt(5.0) - 1) / 2;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = fit_tone(x, c).energy;
    double fd = fit_tone(x, d).energy;
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = fit_tone(x, c).energy;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = fit_tone(x, d).energy;
        }
    }
    const double mid = (a + b) / 2;
    // Endpoints matter for alpha = 0 and alpha = 1/2.
    double answer = mid;
    double answer_energy = fit_tone(x, mid).energy;
    for (double edge : {lo, hi}) {
        const double e = fit_tone(x, edge).energy;
        if (e > answer_energy * (1 + 1e-12) && std::abs(edge - mid) < 2 * step) {
            answer = edge;
            answer_energy = e;
        }
    }
    return answer;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2) return upper;
    return (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2;
}

}  // namespace

CorrelationSeries correlation(const RuleTable& rule, const Cylinder& u, const Cylinder& v, std::size_t horizon,
                              const CorrelationMethod& method, unsigned threads) {
    check_letters(rule.alphabet_size(), u.word);
    check_letters(rule.alphabet_size(), v.word);
    if (u.word.empty() || v.word.empty()) fail(ErrorCode::invalid_argument, "cylinders must be nonempty");
    const int q = rule.alphabet_size();
    const double product = cylinder_measure(q, u.word.size()) * cylinder_measure(q, v.word.size());
    CorrelationSeries out;
    std::vector<std::uint64_t> hits(horizon + 1, 0);
    std::uint64_t total = 0;

    if (const auto* exact = std::get_if<ExactCyclic>(&method)) {
        const std::size_t n = exact->period;
        const Interval both = hull(u.interval(), v.interval());
        if (n == 0 || both.width > n) {
            std::ostringstream os;
            os << "cyclic period " << n << " does not cover both cylinders (need " << both.width << ")";
            fail(ErrorCode::invalid_argument, os.str());
        }
        total = checked_pow(static_cast<std::uint64_t>(q), n, exact->budget);
        out.method = "exact_cyclic";
        out.period = n;
        const std::size_t chunks = std::min<std::uint64_t>(total, 256);
        std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(horizon + 1, 0));
        parallel_for(chunks, threads, [&](std::size_t chunk) {
            const std::uint64_t begin = total * chunk / chunks;
            const std::uint64_t end = total * (chunk + 1) / chunks;
            CyclicConfig x{Word(n)};
            for (std::uint64_t s = begin; s < end; ++s) {
                std::uint64_t rest = s;
                for (std::size_t k = n; k-- > 0;) {
                    x.cells[k] = static_cast<Letter>(rest % static_cast<std::uint64_t>(q));
                    rest /= static_cast<std::uint64_t>(q);
                }
                if (!matches(x.cells, 0, u, n)) continue;
                CyclicConfig cur = x;
                for (std::size_t j = 0;; ++j) {
                    if (matches(cur.cells, 0, v, n)) ++partial[chunk][j];
                    if (j == horizon) break;
                    cur = step(rule, cur);
                }
            }
        });
        for (const auto& p : partial)
            for (std::size_t j = 0; j <= horizon; ++j) hits[j] += p[j];
    } else {
        const auto& mc = std::get<MonteCarlo>(method);
        if (mc.samples == 0) fail(ErrorCode::invalid_argument, "Monte Carlo correlation needs samples");
        const Interval window = hull(u.interval(), light_cone(rule, v.interval(), horizon));
        total = mc.samples;
        out.method = "monte_carlo";
        out.samples = mc.samples;
        out.seed = mc.seed;
        std::vector<std::vector<char>> per_sample(mc.samples);
        parallel_for(mc.samples, threads, [&](std::size_t k) {
            auto rng = sample_stream(mc.seed, k);
            WindowConfig x{window.start, Word(window.width)};
            for (Letter& a : x.cells) a = static_cast<Letter>(uniform_below(rng, static_cast<std::uint64_t>(q)));
            std::vector<char> flags(horizon + 1, 0);
            if (matches(x.cells, x.offset, u, 0)) {
                const Trace t = trace(rule, x, v.interval(), horizon);
                for (std::size_t j = 0; j <= horizon; ++j) flags[j] = t.rows[j] == v.word;
            }
            per_sample[k] = std::move(flags);
        });
        for (const auto& flags : per_sample)
            for (std::size_t j = 0; j <= horizon; ++j) hits[j] += static_cast<std::uint64_t>(flags[j]);
    }

    out.values.resize(horizon + 1);
    for (std::size_t j = 0; j <= horizon; ++j)
        out.values[j] = static_cast<double>(hits[j]) / static_cast<double>(total) - product;
    return out;
}

std::string to_string(MixingVerdict v) {
    switch (v) {
        case MixingVerdict::mixing_consistent: return "MIXING_CONSISTENT";
        case MixingVerdict::not_mixing: return "NOT_MIXING";
        case MixingVerdict::inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

MixingVerdict mixing_test(const CorrelationSeries& series, double tail_fraction, double tolerance) {
    if (series.values.size() < 8) fail(ErrorCode::invalid_argument, "mixing test needs at least 8 correlations");
    if (!(tail_fraction > 0 && tail_fraction <= 1)) fail(ErrorCode::invalid_argument, "tail fraction must lie in (0, 1]");
    if (series.samples > 0) {
        const double stderr_bound = 0.5 / std::sqrt(static_cast<double>(series.samples));
        if (tolerance <= stderr_bound) {
            std::ostringstream os;
            os << "tolerance " << tolerance << " does not exceed the Monte Carlo standard error " << stderr_bound;
            fail(ErrorCode::invalid_argument, os.str());
        }
    }
    const std::size_t len = series.values.size();
    const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(len))));
    std::size_t above = 0;
    double worst = 0;
    for (std::size_t k = len - tail; k < len; ++k) {
        const double a = std::abs(series.values[k]);
        worst = std::max(worst, a);
        if (a > tolerance) ++above;
    }
    if (2 * above > tail) return MixingVerdict::not_mixing;
    if (worst <= tolerance) return MixingVerdict::mixing_consistent;
    return MixingVerdict::inconclusive;
}

Rational reduced(std::int64_t num, std::int64_t den) {
    if (den == 0) fail(ErrorCode::invalid_argument, "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return g ? Rational{num / g, den / g} : Rational{0, 1};
}

Rational best_rational(double x, std::int64_t max_den) {
    if (max_den < 1) fail(ErrorCode::invalid_argument, "denominator bound must be positive");
    if (!(x >= 0 && x <= 1)) fail(ErrorCode::invalid_argument, "best_rational expects x in [0, 1]");
    // x is exactly m / 2^53 for integer m.
    using I = __int128;
    const I d0 = I{1} << 53;
    I n = static_cast<I>(std::llround(std::ldexp(x, 53)));
    I d = d0;
    const I target_n = n;
    I p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    while (d != 0) {
        const I a = n / d;
        const I q2 = q0 + a * q1;
        if (q2 > max_den) break;
        const I p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const I rem = n - a * d;
        n = d;
        d = rem;
    }
    if (d == 0) return reduced(static_cast<std::int64_t>(p1), static_cast<std::int64_t>(q1));
    const I k = (max_den - q0) / q1;
    const I bp = p0 + k * p1, bq = q0 + k * q1;
    // compare |bp/bq - x| with |p1/q1 - x| exactly
    auto dist = [&](I p, I q) {
        I diff = p * d0 - target_n * q;
        return diff < 0 ? -diff : diff;
    };
    // |p/q - x| = dist / (q d0); cross-multiply to compare
    const I lhs = dist(p1, q1) * bq;
    const I rhs = dist(bp, bq) * q1;
    if (lhs <= rhs) return reduced(static_cast<std::int64_t>(p1), static_cast<std::int64_t>(q1));
    return reduced(static_cast<std::int64_t>(bp), static_cast<std::int64_t>(bq));
}

std::vector<std::complex<double>> dft(std::span<const double> series) {
    const std::size_t n = series.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0;
        for (std::size_t j = 0; j < n; ++j)
            acc += series[j] * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>((k * j) % n) /
                                                   static_cast<double>(n));
        out[k] = acc;
    }
    return out;
}

SpectralReport eigenvalue_scan(std::span<const double> series, const ScanOptions& options) {
    const std::size_t len = series.size();
    if (len < 16) fail(ErrorCode::invalid_argument, "eigenvalue scan needs at least 16 correlations");
    if (options.max_den < 1) fail(ErrorCode::invalid_argument, "denominator bound must be positive");
    SpectralReport report;
    report.bin_width = 1.0 / static_cast<double>(len);
    report.max_den = options.max_den;
    report.tolerance = options.tolerance.value_or(report.bin_width);

    const std::size_t half = len / 2;
    auto half_magnitudes = [&](std::span<const double> x) {
        const auto spectrum = dft(x);
        std::vector<double> mags(half + 1);
        for (std::size_t k = 0; k <= half; ++k) mags[k] = std::abs(spectrum[k]);
        return mags;
    };
    const std::vector<double> original = half_magnitudes(series);
    const double top = *std::max_element(original.begin(), original.end());
    report.threshold = std::max({options.peak_factor * median(original), 1e-6 * top, 1e-12});

    std::vector<double> residual(series.begin(), series.end());
    for (std::size_t found = 0; found < options.max_peaks; ++found) {
        const std::vector<double> mags = half_magnitudes(residual);
        const auto it = std::max_element(mags.begin(), mags.end());
        if (*it <= report.threshold) break;
        const auto k = static_cast<std::size_t>(it - mags.begin());
        const double lo = std::max(0.0, (static_cast<double>(k) - 1) / static_cast<double>(len));
        const double hi = std::min(0.5, (static_cast<double>(k) + 1) / static_cast<double>(len));
        const double alpha = refine_frequency(residual, lo, hi);

        SpectralPeak peak;
        peak.alpha = alpha;
        peak.magnitude = dtft_magnitude(residual, alpha);
        peak.approximation = best_rational(alpha, options.max_den);
        peak.error = std::abs(alpha - peak.approximation.value());
        peak.rational = peak.error <= report.tolerance;
        report.peaks.push_back(peak);

        const ToneFit fit = fit_tone(residual, alpha);
        for (std::size_t j = 0; j < len; ++j) residual[j] -= fit.component[j];
    }
    std::stable_sort(report.peaks.begin(), report.peaks.end(),
                     [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
    return report;
}

OrbitSpectrum orbit_spectrum_cyclic(const RuleTable& rule, std::size_t period, std::uint64_t budget,
                                    unsigned threads) {
    if (period == 0) fail(ErrorCode::invalid_argument, "cyclic period must be positive");
    const auto q = static_cast<std::uint64_t>(rule.alphabet_size());
    const std::uint64_t states = checked_pow(q, period, budget);

    std::vector<std::uint32_t> next(static_cast<std::size_t>(states));
    const std::size_t chunks = std::min<std::uint64_t>(states, 256);
    parallel_for(chunks, threads, [&](std::size_t chunk) {
        CyclicConfig x{Word(period)};
        for (std::uint64_t s = states * chunk / chunks; s < states * (chunk + 1) / chunks; ++s) {
            std::uint64_t rest = s;
            for (std::size_t k = period; k-- > 0;) {
                x.cells[k] = static_cast<Letter>(rest % q);
                rest /= q;
            }
            const CyclicConfig y = step(rule, x);
            std::uint64_t code = 0;
            for (Letter a : y.cells) code = code * q + a;
            next[static_cast<std::size_t>(s)] = static_cast<std::uint32_t>(code);
        }
    });

    OrbitSpectrum out;
    out.period = period;
    out.states = static_cast<std::size_t>(states);
    constexpr std::uint32_t kUnseen = 0;
    std::vector<std::uint32_t> walk(static_cast<std::size_t>(states), kUnseen);
    std::vector<char> done(static_cast<std::size_t>(states), 0);
    std::uint32_t walk_id = 0;
    for (std::uint64_t s0 = 0; s0 < states; ++s0) {
        if (done[s0]) continue;
        ++walk_id;
        std::uint32_t s = static_cast<std::uint32_t>(s0);
        while (!done[s] && walk[s] != walk_id) {
            walk[s] = walk_id;
            s = next[s];
        }
        if (!done[s] && walk[s] == walk_id) {
            std::size_t len = 1;
            for (std::uint32_t t = next[s]; t != s; t = next[t]) ++len;
            ++out.cycles[len];
            for (std::size_t k = 0; k < len; ++k)
                out.frequencies.push_back(reduced(static_cast<std::int64_t>(k), static_cast<std::int64_t>(len)));
        }
        for (std::uint32_t t = static_cast<std::uint32_t>(s0); !done[t]; t = next[t]) done[t] = 1;
    }
    return out;
}

ShiftComparison compare_shift_spectrum(const RuleTable& rule, std::size_t period, std::uint64_t budget,
                                       unsigned threads) {
    auto distinct = [](const OrbitSpectrum& o) {
        std::set<Rational> s(o.frequencies.begin(), o.frequencies.end());
        return std::vector<Rational>(s.begin(), s.end());
    };
    ShiftComparison cmp;
    cmp.shift_frequencies =
        distinct(orbit_spectrum_cyclic(shift_rule(rule.alphabet_size()), period, budget, threads));
    cmp.rule_frequencies = distinct(orbit_spectrum_cyclic(rule, period, budget, threads));
    std::set_difference(cmp.shift_frequencies.begin(), cmp.shift_frequencies.end(), cmp.rule_frequencies.begin(),
                        cmp.rule_frequencies.end(), std::back_inserter(cmp.missing));
    cmp.contained = cmp.missing.empty();
    return cmp;
}

}  // namespace eqca
