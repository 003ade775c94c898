#include "eqca/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "eqca/blocking.hpp"
#include "eqca/factor.hpp"
#include "eqca/gilman.hpp"
#include "eqca/spectrum.hpp"

namespace eqca {

using nlohmann::json;

namespace {

// Reads parameters with defaults and records the resolved values.
class Params {
public:
    explicit Params(const json& in) : in_(in.is_null() ? json::object() : in) {
        if (!in_.is_object()) fail(ErrorCode::parse_error, "parameters must be a JSON object");
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        T value = fallback;
        if (in_.contains(key) && !in_.at(key).is_null()) value = convert<T>(key);
        used_.insert(key);
        resolved_[key] = value;
        return value;
    }

    template <class T>
    std::optional<T> maybe(const std::string& key) {
        used_.insert(key);
        if (!in_.contains(key) || in_.at(key).is_null()) {
            resolved_[key] = nullptr;
            return std::nullopt;
        }
        T value = convert<T>(key);
        resolved_[key] = value;
        return value;
    }

    unsigned threads() {
        used_.insert("threads");
        if (!in_.contains("threads")) return 1;
        const auto t = convert<long long>("threads");
        if (t < 1) fail(ErrorCode::invalid_argument, "threads must be at least 1");
        return static_cast<unsigned>(std::min<long long>(t, 1024));
    }

    void finish() const {
        for (const auto& item : in_.items())
            if (!used_.count(item.key())) fail(ErrorCode::invalid_argument, "unknown parameter '" + item.key() + "'");
    }

    const json& resolved() const { return resolved_; }

private:
    template <class T>
    T convert(const std::string& key) {
        const json& v = in_.at(key);
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
                fail(ErrorCode::parse_error, "parameter '" + key + "' must be a nonnegative integer");
        }
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            fail(ErrorCode::parse_error, "parameter '" + key + "' has the wrong type");
        }
    }

    json in_;
    json resolved_ = json::object();
    std::set<std::string> used_;
};

std::string rational_text(const Rational& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

json interval_json(Interval iv) { return json::array({iv.start, iv.width}); }

json window_json(const WindowConfig& x) { return {{"offset", x.offset}, {"cells", format_word(x.cells)}}; }

json rows_json(const std::vector<Word>& rows) {
    json out = json::array();
    for (const Word& row : rows) out.push_back(format_word(row));
    return out;
}

json certificate_json(const BlockingCertificate& c) {
    return {{"word", format_word(c.word)},
            {"s", c.s},
            {"p", c.p},
            {"W", c.margin},
            {"preperiod", c.preperiod},
            {"period", c.period},
            {"steps", c.steps},
            {"witness", rows_json(c.witness)},
            {"replay_hash", hex64(c.replay_hash)}};
}

json optional_certificate(const std::optional<BlockingCertificate>& c) {
    return c ? certificate_json(*c) : json(nullptr);
}

json cycle_json(const std::optional<TemporalCycle>& c) {
    if (!c) return nullptr;
    return {{"preperiod", c->preperiod}, {"period", c->period}};
}

// "word" or "word@offset"
std::pair<Word, std::optional<std::int64_t>> parse_placed(const std::string& text, int q) {
    const auto at = text.rfind('@');
    if (at == std::string::npos) return {parse_word(text, q), std::nullopt};
    const std::string off = text.substr(at + 1);
    std::int64_t offset = 0;
    try {
        std::size_t used = 0;
        offset = std::stoll(off, &used);
        if (used != off.size()) throw std::invalid_argument(off);
    } catch (const std::exception&) {
        fail(ErrorCode::parse_error, "malformed offset in '" + text + "'");
    }
    return {parse_word(text.substr(0, at), q), offset};
}

Cylinder parse_cylinder(const std::string& text, int q) {
    auto [word, offset] = parse_placed(text, q);
    return {std::move(word), offset.value_or(0)};
}

BernoulliSpec parse_spec(const json& j, int q) {
    if (j.is_string()) {
        if (j.get<std::string>() != "uniform") fail(ErrorCode::parse_error, "spec must be \"uniform\" or a probability list");
        return BernoulliSpec::uniform(q);
    }
    if (!j.is_array()) fail(ErrorCode::parse_error, "spec must be \"uniform\" or a probability list");
    BernoulliSpec spec(j.get<std::vector<double>>());
    if (spec.alphabet_size() != q) fail(ErrorCode::alphabet_mismatch, "Bernoulli spec and rule use different alphabets");
    return spec;
}

json estimate_json(const EquicontinuityEstimate& e) {
    return {{"m", e.m},
            {"n", e.n},
            {"horizon", e.horizon},
            {"samples", e.samples},
            {"members", e.members},
            {"ratio", e.ratio},
            {"ci", json::array({e.ci.low, e.ci.high})},
            {"trace_classes", e.trace_classes}};
}

json commutation_json(const CommutationReport& rep) {
    json mismatches = json::array();
    for (const Mismatch& m : rep.mismatches)
        mismatches.push_back({{"input", m.input},
                              {"position", m.position},
                              {"pi_of_x", m.pi_of_x},
                              {"pi_of_fx", m.pi_of_fx},
                              {"c_of_pi_x", m.c_of_pix},
                              {"context", format_word(m.context)}});
    return {{"inputs", rep.inputs},
            {"positions_checked", rep.positions_checked},
            {"locked_positions", rep.locked_positions},
            {"mismatch_count", rep.mismatch_count},
            {"mismatches", mismatches},
            {"pass", rep.pass()}};
}

json factor_json(const FactorMap& pi) {
    return {{"p0", pi.phases.preperiod},
            {"p", pi.phases.period},
            {"rows", rows_json(pi.phases.rows)},
            {"horizon", pi.horizon()},
            {"lock", pi.lock},
            {"source", {{"u", format_word(pi.phases.source.u)}, {"w", format_word(pi.phases.source.w)}}},
            {"rule_hash", hex64(pi.rule_hash())}};
}

std::string ratio_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

using Handler = std::function<void(const RuleTable&, Params&, unsigned, AnalysisResult&, json&)>;

void run_simulate(const RuleTable& rule, Params& p, unsigned, AnalysisResult& out, json& result) {
    const auto init = p.get<std::string>("init", "0");
    const auto steps = p.get<std::size_t>("steps", 16);
    const auto format = p.get<std::string>("format", "ascii");
    if (format != "ascii" && format != "pgm") fail(ErrorCode::invalid_argument, "format must be ascii or pgm");
    auto [cells, offset] = parse_placed(init, rule.alphabet_size());
    Trace t;
    if (!offset) {
        if (cells.empty()) {
            t.alphabet_size = rule.alphabet_size();
        } else {
            t = trace(rule, CyclicConfig{cells}, {0, cells.size()}, steps);
        }
        result["kind"] = "cyclic";
    } else {
        const WindowConfig x{*offset, cells};
        const std::size_t reach = steps * static_cast<std::size_t>(rule.radius());
        if (cells.empty()) {
            t.alphabet_size = rule.alphabet_size();
            t.interval = {*offset, 0};
        } else if (cells.size() <= 2 * reach) {
            std::ostringstream os;
            os << cells.size() << " cells cannot support " << steps
               << " steps at radius " << rule.radius() << " (need more than " << 2 * reach << ")";
            fail(ErrorCode::insufficient_window, os.str());
        } else {
            t = trace(rule, x, {*offset + static_cast<std::int64_t>(reach), cells.size() - 2 * reach}, steps);
        }
        result["kind"] = "window";
    }
    result["interval"] = interval_json(t.interval);
    result["rows"] = rows_json(t.rows);
    out.text = render_spacetime(t, RenderFormat::ascii);
    out.artifact = render_spacetime(t, format == "pgm" ? RenderFormat::pgm : RenderFormat::ascii);
}

std::size_t default_s(const RuleTable& rule) { return std::max<std::size_t>(1, static_cast<std::size_t>(rule.radius())); }

std::size_t default_margin(const RuleTable& rule) { return 2 * static_cast<std::size_t>(rule.radius()); }

void run_certify(const RuleTable& rule, Params& p, unsigned, AnalysisResult& out, json& result) {
    const Word w = parse_word(p.get<std::string>("word", "0"), rule.alphabet_size());
    const auto s = p.get<std::size_t>("s", default_s(rule));
    const auto margin = p.get<std::size_t>("margin", default_margin(rule));
    const auto max_steps = p.get<std::size_t>("max_steps", kDefaultMaxSteps);
    const CertifyResult res = certify_blocking(rule, w, s, margin, max_steps);
    result["verdict"] = res.certificate ? "certified" : "inconclusive";
    result["certificate"] = optional_certificate(res.certificate);
    result["orbit_closed"] = res.orbit_closed;
    result["steps"] = res.steps;
    result["reason"] = res.reason;
    if (res.certificate)
        out.text = "certified: " + format_word(w) + " is " + std::to_string(s) + "-blocking at offset " +
                   std::to_string(res.certificate->p) + "\n";
    else
        out.text = "inconclusive: " + res.reason + "\n";
}

void run_falsify(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const Word w = parse_word(p.get<std::string>("word", "0"), rule.alphabet_size());
    const auto s = p.get<std::size_t>("s", default_s(rule));
    const auto horizon = p.get<std::size_t>("horizon", 32);
    const auto samples = p.get<std::size_t>("samples", 500);
    const auto seed = p.get<std::uint64_t>("seed", kDefaultSeed);
    const FalsifyResult res = falsify_blocking(rule, w, s, horizon, samples, seed, threads);
    json offsets = json::array();
    for (std::size_t k = 0; k < res.per_offset.size(); ++k) {
        const auto& c = res.per_offset[k];
        json entry{{"p", k}, {"counterexample", nullptr}};
        if (c)
            entry["counterexample"] = {{"sample", c->sample},
                                       {"time", c->time},
                                       {"interval", interval_json(c->interval)},
                                       {"x", window_json(c->x)},
                                       {"y", window_json(c->y)}};
        offsets.push_back(entry);
    }
    result["refuted"] = res.refuted;
    result["samples_used"] = res.samples_used;
    result["offsets"] = offsets;
    out.text = res.refuted ? "refuted: every offset has a counterexample\n"
                           : "not refuted (some offset survived " + std::to_string(res.samples_used) + " samples)\n";
}

void run_search(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const auto s = p.get<std::size_t>("s", default_s(rule));
    const auto lmax = p.get<std::size_t>("lmax", 5);
    const auto margin = p.get<std::size_t>("margin", default_margin(rule));
    const auto max_steps = p.get<std::size_t>("max_steps", kDefaultMaxSteps);
    const auto skip = p.get<bool>("skip_extensions", false);
    const auto certs = search_blocking_words(rule, s, lmax, margin, max_steps, skip, threads);
    json list = json::array();
    std::ostringstream os;
    for (const auto& c : certs) {
        list.push_back(certificate_json(c));
        os << format_word(c.word) << " offset " << c.p << "\n";
    }
    result["count"] = certs.size();
    result["certificates"] = list;
    out.text = std::to_string(certs.size()) + " certified word(s)\n" + os.str();
}

void run_classify(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    KurkaOptions o;
    o.max_preperiod = p.get<std::size_t>("max_preperiod", o.max_preperiod);
    o.max_period = p.get<std::size_t>("max_period", o.max_period);
    o.table_budget = p.get<std::uint64_t>("table_budget", o.table_budget);
    o.lmax = p.get<std::size_t>("lmax", o.lmax);
    o.margin = p.get<std::size_t>("margin", default_margin(rule));
    o.max_steps = p.get<std::size_t>("max_steps", o.max_steps);
    o.horizon = p.get<std::size_t>("horizon", o.horizon);
    o.samples = p.get<std::size_t>("samples", o.samples);
    o.seed = p.get<std::uint64_t>("seed", o.seed);
    o.threads = threads;
    const KurkaReport rep = classify_kurka(rule, o);
    result["verdict"] = to_string(rep.verdict);
    result["global_status"] = rep.global_status;
    result["global"] = cycle_json(rep.global);
    result["s"] = rep.s;
    result["certificate"] = optional_certificate(rep.certificate);
    result["words_tested"] = rep.words_tested;
    result["words_refuted"] = rep.words_refuted;
    std::ostringstream os;
    os << to_string(rep.verdict);
    if (rep.global) os << " (F^" << rep.global->preperiod + rep.global->period << " = F^" << rep.global->preperiod << ")";
    else if (rep.certificate) os << " (blocking word " << format_word(rep.certificate->word) << ")";
    os << "\n";
    out.text = os.str();
}

void run_surjective(const RuleTable& rule, Params& p, unsigned, AnalysisResult& out, json& result) {
    const auto budget = p.get<std::uint64_t>("subset_budget", kDefaultSubsetBudget);
    const SurjectivityResult res = is_surjective(rule, budget);
    result["surjective"] = res.surjective;
    result["balanced"] = res.balanced;
    result["orphan"] = res.orphan ? json(format_word(*res.orphan)) : json(nullptr);
    result["subsets_explored"] = res.subsets_explored;
    out.text = res.surjective ? "surjective\n" : "not surjective; orphan word " + format_word(*res.orphan) + "\n";
}

BasePoint parse_point(const std::string& text, int q) {
    auto [cells, center] = parse_placed(text, q);
    if (cells.empty()) fail(ErrorCode::invalid_argument, "base point must be nonempty");
    return {CyclicConfig{cells}, center.value_or(0)};
}

void run_gilman_estimate(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const BernoulliSpec spec = parse_spec(p.get<json>("spec", "uniform"), rule.alphabet_size());
    const BasePoint x = parse_point(p.get<std::string>("point", "0"), rule.alphabet_size());
    EstimateOptions o;
    o.m = p.get<std::size_t>("m", o.m);
    o.n_list = p.get<std::vector<std::size_t>>("n", o.n_list);
    o.horizon = p.get<std::size_t>("horizon", o.horizon);
    o.samples = p.get<std::size_t>("samples", o.samples);
    o.seed = p.get<std::uint64_t>("seed", o.seed);
    o.threads = threads;
    const auto est = estimate_mu_equicontinuity(rule, spec, x, o);
    json list = json::array();
    std::ostringstream os;
    for (const auto& e : est) {
        list.push_back(estimate_json(e));
        os << "m=" << e.m << " n=" << e.n << " ratio " << ratio_text(e.ratio) << " [" << ratio_text(e.ci.low) << ", "
           << ratio_text(e.ci.high) << "]\n";
    }
    result["estimates"] = list;
    out.text = os.str();
}

void run_gilman_classify(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const BernoulliSpec spec = parse_spec(p.get<json>("spec", "uniform"), rule.alphabet_size());
    std::vector<BasePoint> points;
    for (const auto& text : p.get<std::vector<std::string>>("points", {"0"}))
        points.push_back(parse_point(text, rule.alphabet_size()));
    GilmanOptions o;
    o.m_list = p.get<std::vector<std::size_t>>("m", o.m_list);
    o.n_list = p.get<std::vector<std::size_t>>("n", o.n_list);
    o.horizon = p.get<std::size_t>("horizon", o.horizon);
    o.samples = p.get<std::size_t>("samples", o.samples);
    o.seed = p.get<std::uint64_t>("seed", o.seed);
    o.b_threshold = p.get<double>("b_threshold", o.b_threshold);
    o.c_threshold = p.get<double>("c_threshold", o.c_threshold);
    o.lmax = p.get<std::size_t>("lmax", o.lmax);
    o.margin = p.get<std::size_t>("margin", default_margin(rule));
    o.max_steps = p.get<std::size_t>("max_steps", o.max_steps);
    o.threads = threads;
    const GilmanReport rep = classify_gilman(rule, spec, points, o);
    json per_point = json::array();
    for (const auto& per_m : rep.estimates) {
        json series = json::array();
        for (const auto& s : per_m) {
            json row = json::array();
            for (const auto& e : s) row.push_back(estimate_json(e));
            series.push_back(row);
        }
        per_point.push_back(series);
    }
    result["verdict"] = to_string(rep.verdict);
    result["provenance"] = rep.provenance;
    result["certificate"] = optional_certificate(rep.certificate);
    result["estimates"] = per_point;
    out.text = to_string(rep.verdict) + ": " + rep.provenance + "\n";
}

struct BuiltFactor {
    FactorMap map;
    std::optional<TemporalCycle> witness;
    std::optional<CommutationReport> verification;
};

BuiltFactor build_factor(const RuleTable& rule, Params& p, unsigned threads) {
    const auto point = p.maybe<std::string>("point");
    const auto from_witness = p.get<bool>("from_witness", !point.has_value());
    const auto lock = p.maybe<std::size_t>("lock");
    if (point && from_witness) fail(ErrorCode::invalid_argument, "give either a point or from_witness, not both");
    if (from_witness) {
        const auto max_pre = p.get<std::size_t>("max_preperiod", 6);
        const auto max_per = p.get<std::size_t>("max_period", 4);
        const auto verify_period = p.get<std::size_t>("verify_period", 8);
        const auto witness = check_global_equicontinuity(rule, max_pre, max_per);
        if (!witness) fail(ErrorCode::witness_invalid, "no global equicontinuity witness within the preperiod/period bounds");
        TopologicalFactor tf = build_topological_factor(rule, *witness, verify_period, threads);
        if (lock) tf.map = make_factor_map(rule, tf.map.phases, lock);
        return {tf.map, witness, tf.verification};
    }
    auto [cells, offset] = parse_placed(*point, rule.alphabet_size());
    if (cells.empty()) fail(ErrorCode::invalid_argument, "point must be nonempty");
    CyclicConfig y{cells};
    if (offset) y = y.rotated(*offset);
    const PhaseSet phases = build_phase_set(rule, PeriodicPoint::around_origin(y, rule.radius()));
    return {make_factor_map(rule, phases, lock), std::nullopt, std::nullopt};
}

void run_factor_build(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const BuiltFactor f = build_factor(rule, p, threads);
    result["factor"] = factor_json(f.map);
    result["witness"] = cycle_json(f.witness);
    result["verification"] = f.verification ? commutation_json(*f.verification) : json(nullptr);
    out.passed = !f.verification || f.verification->pass();
    std::ostringstream os;
    os << "factor p0=" << f.map.phases.preperiod << " p=" << f.map.phases.period << " rows";
    for (const Word& row : f.map.phases.rows) os << " " << format_word(row);
    os << "\n";
    if (f.verification)
        os << "commutation on " << f.verification->positions_checked << " positions: "
           << f.verification->mismatch_count << " mismatch(es)\n";
    out.text = os.str();
}

void run_factor_verify(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const BuiltFactor f = build_factor(rule, p, threads);
    const auto max_period = p.get<std::size_t>("max_period_exhaustive", 8);
    const auto windows = p.get<std::size_t>("windows", 1000);
    const auto reach = static_cast<std::size_t>(rule.radius()) * (f.map.horizon() + 1);
    const auto width = p.get<std::size_t>("window_width", 2 * reach + 2 * static_cast<std::size_t>(rule.radius()) + 16);
    const auto seed = p.get<std::uint64_t>("seed", kDefaultSeed);
    const CounterCA counter = counter_ca(f.map.phases.period);
    const CommutationReport cyc =
        verify_commutation(rule, f.map, counter, exhaustive_cyclic_inputs(rule.alphabet_size(), max_period), threads);
    const CommutationReport win = verify_commutation(
        rule, f.map, counter, sampled_window_inputs(rule.alphabet_size(), windows, width, seed), threads);
    result["factor"] = factor_json(f.map);
    result["witness"] = cycle_json(f.witness);
    result["cyclic"] = commutation_json(cyc);
    result["windows"] = commutation_json(win);
    result["pass"] = cyc.pass() && win.pass();
    out.passed = cyc.pass() && win.pass();
    std::ostringstream os;
    os << (out.passed ? "commutes" : "MISMATCH") << ": cyclic " << cyc.positions_checked << " positions, "
       << cyc.mismatch_count << " mismatch(es); windows " << win.positions_checked << " positions, "
       << win.mismatch_count << " mismatch(es)\n";
    out.text = os.str();
}

CorrelationSeries correlation_from(const RuleTable& rule, Params& p, unsigned threads) {
    const Cylinder u = parse_cylinder(p.get<std::string>("u", "1@0"), rule.alphabet_size());
    const Cylinder v = parse_cylinder(p.get<std::string>("v", "1@0"), rule.alphabet_size());
    const auto horizon = p.get<std::size_t>("horizon", 32);
    const auto method = p.get<std::string>("method", "exact");
    ExactCyclic exact;
    exact.period = p.get<std::size_t>("period", exact.period);
    exact.budget = p.get<std::uint64_t>("budget", exact.budget);
    MonteCarlo mc;
    mc.samples = p.get<std::size_t>("samples", mc.samples);
    mc.seed = p.get<std::uint64_t>("seed", mc.seed);
    if (method == "exact") return correlation(rule, u, v, horizon, exact, threads);
    if (method == "mc") return correlation(rule, u, v, horizon, mc, threads);
    fail(ErrorCode::invalid_argument, "method must be exact or mc");
}

json series_json(const CorrelationSeries& s) {
    json j{{"method", s.method}, {"values", s.values}};
    if (s.method == "exact_cyclic") j["period"] = s.period;
    else {
        j["samples"] = s.samples;
        j["seed"] = s.seed;
    }
    return j;
}

void run_correlate(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const CorrelationSeries s = correlation_from(rule, p, threads);
    const auto tail = p.get<double>("tail_fraction", 0.5);
    const auto tol = p.get<double>("tolerance", 0.05);
    result["series"] = series_json(s);
    std::ostringstream os;
    for (std::size_t n = 0; n < s.values.size(); ++n) os << "c_" << n << " = " << s.values[n] << "\n";
    if (s.values.size() >= 8) {
        const MixingVerdict v = mixing_test(s, tail, tol);
        result["mixing"] = to_string(v);
        os << to_string(v) << "\n";
    } else {
        result["mixing"] = nullptr;
    }
    out.text = os.str();
}

void run_scan(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    std::vector<double> values;
    if (auto given = p.maybe<std::vector<double>>("series")) {
        values = *given;
        p.get<std::uint64_t>("seed", kDefaultSeed);
        result["series"] = {{"method", "given"}, {"values", values}};
    } else {
        const CorrelationSeries s = correlation_from(rule, p, threads);
        values = s.values;
        result["series"] = series_json(s);
    }
    ScanOptions o;
    o.max_den = p.get<std::int64_t>("qmax", o.max_den);
    o.tolerance = p.maybe<double>("tolerance");
    o.peak_factor = p.get<double>("peak_factor", o.peak_factor);
    o.max_peaks = p.get<std::size_t>("max_peaks", o.max_peaks);
    const SpectralReport rep = eigenvalue_scan(values, o);
    json peaks = json::array();
    std::ostringstream os;
    for (const SpectralPeak& pk : rep.peaks) {
        const std::string verdict = pk.rational ? "RATIONAL(" + rational_text(pk.approximation) + ")" : "UNRESOLVED";
        peaks.push_back({{"alpha", pk.alpha},
                         {"magnitude", pk.magnitude},
                         {"approximation", rational_text(pk.approximation)},
                         {"error", pk.error},
                         {"verdict", verdict}});
        os << "alpha " << pk.alpha << " magnitude " << pk.magnitude << " " << verdict << "\n";
    }
    if (rep.peaks.empty()) os << "no peaks above threshold\n";
    result["peaks"] = peaks;
    result["threshold"] = rep.threshold;
    result["bin_width"] = rep.bin_width;
    result["qmax"] = rep.max_den;
    result["tolerance"] = rep.tolerance;
    result["note"] =
        "probe, not proof: ergodic rules are expected to show no persistent UNRESOLVED peak; "
        "finite series cannot decide the spectrum";
    out.text = os.str();
}

void run_orbits(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const auto n = p.get<std::size_t>("period", 8);
    const auto budget = p.get<std::uint64_t>("budget", std::uint64_t{1} << 22);
    const OrbitSpectrum o = orbit_spectrum_cyclic(rule, n, budget, threads);
    json cycles = json::array();
    std::ostringstream os;
    for (const auto& [len, count] : o.cycles) {
        cycles.push_back({{"length", len}, {"count", count}});
        os << count << " cycle(s) of length " << len << "\n";
    }
    std::set<Rational> distinct(o.frequencies.begin(), o.frequencies.end());
    json freqs = json::array();
    for (const Rational& r : distinct) freqs.push_back(rational_text(r));
    result["states"] = o.states;
    result["cycles"] = cycles;
    result["frequency_count"] = o.frequencies.size();
    result["distinct_frequencies"] = freqs;
    out.text = os.str();
}

void run_compare_shift(const RuleTable& rule, Params& p, unsigned threads, AnalysisResult& out, json& result) {
    const auto n = p.get<std::size_t>("period", 8);
    const auto budget = p.get<std::uint64_t>("budget", std::uint64_t{1} << 22);
    const ShiftComparison c = compare_shift_spectrum(rule, n, budget, threads);
    auto list = [](const std::vector<Rational>& v) {
        json a = json::array();
        for (const Rational& r : v) a.push_back(rational_text(r));
        return a;
    };
    result["shift_frequencies"] = list(c.shift_frequencies);
    result["rule_frequencies"] = list(c.rule_frequencies);
    result["missing"] = list(c.missing);
    result["contained"] = c.contained;
    result["note"] = "finite-model heuristic: cyclic models neither prove nor refute spectrum containment";
    out.text = std::string(c.contained ? "contained" : "not contained") + " at period " + std::to_string(n) +
               " (finite-model heuristic)\n";
}

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table{
        {"simulate", run_simulate},
        {"blocking.certify", run_certify},
        {"blocking.falsify", run_falsify},
        {"blocking.search", run_search},
        {"blocking.classify", run_classify},
        {"classify", run_classify},
        {"surjective", run_surjective},
        {"gilman.estimate", run_gilman_estimate},
        {"gilman.classify", run_gilman_classify},
        {"factor.build", run_factor_build},
        {"factor.verify", run_factor_verify},
        {"spectrum.correlate", run_correlate},
        {"spectrum.scan", run_scan},
        {"spectrum.orbits", run_orbits},
        {"spectrum.compare-shift", run_compare_shift},
    };
    return table;
}

}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

RuleTable rule_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::parse_error, "rule must be a JSON object");
    try {
        if (j.contains("eca")) {
            if (!j.at("eca").is_number_integer()) fail(ErrorCode::parse_error, "\"eca\" must be an integer");
            return eca(j.at("eca").get<int>());
        }
        if (!j.contains("alphabet_size") || !j.contains("radius") || !j.contains("table"))
            fail(ErrorCode::parse_error, "rule needs alphabet_size, radius and table (or eca)");
        const auto table = j.at("table").get<std::vector<int>>();
        std::vector<Letter> letters;
        for (int a : table) {
            if (a < 0 || a > 255) fail(ErrorCode::parse_error, "rule table letters must lie in 0..255");
            letters.push_back(static_cast<Letter>(a));
        }
        return RuleTable(j.at("alphabet_size").get<int>(), j.at("radius").get<int>(), std::move(letters));
    } catch (const json::exception& e) {
        fail(ErrorCode::parse_error, std::string("malformed rule: ") + e.what());
    }
}

json rule_to_json(const RuleTable& rule) {
    return {{"alphabet_size", rule.alphabet_size()}, {"radius", rule.radius()}, {"table", rule.table()}};
}

const std::vector<std::string>& analysis_commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, h] : handlers()) v.push_back(name);
        return v;
    }();
    return names;
}

AnalysisResult analyze(const RuleTable& rule, const std::string& command, const json& params) {
    const auto it = handlers().find(command);
    if (it == handlers().end()) fail(ErrorCode::invalid_argument, "unknown command '" + command + "'");
    Params p(params);
    const unsigned threads = p.threads();
    AnalysisResult out;
    json result = json::object();
    it->second(rule, p, threads, out, result);
    p.finish();
    out.report = {{"schema", kReportSchema},
                  {"toolkit_version", kToolkitVersion},
                  {"command", command},
                  {"rule",
                   {{"alphabet_size", rule.alphabet_size()}, {"radius", rule.radius()}, {"hash", hex64(rule.hash())}}},
                  {"params", p.resolved()},
                  {"result", result},
                  {"passed", out.passed}};
    return out;
}

}  // namespace eqca
