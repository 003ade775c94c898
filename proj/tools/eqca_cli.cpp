// eqca: command-line front end over the C interface.

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqca/eqca.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Flag {
    CLI::Option* option;
    std::function<void(json&)> put;
};

struct Command {
    CLI::App* app;
    std::string name;
    std::vector<Flag> flags;
};

template <class T>
void add(Command& c, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = c.app->add_option(flag, *value, help);
    c.flags.push_back({opt, [value, key](json& params) { params[key] = *value; }});
}

void add_bool(Command& c, const std::string& flag, const std::string& key, const std::string& help) {
    CLI::Option* opt = c.app->add_flag(flag, help);
    c.flags.push_back({opt, [key](json& params) { params[key] = true; }});
}

unsigned default_threads() {
    const char* env = std::getenv("EQCA_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    errno = 0;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (errno || *end || v == 0) return 1;
    return static_cast<unsigned>(v);
}

int exit_code_for(eqca_status s) {
    switch (s) {
        case EQCA_OK: return kExitOk;
        case EQCA_INVALID_ARGUMENT:
        case EQCA_ALPHABET_MISMATCH:
        case EQCA_INSUFFICIENT_WINDOW:
        case EQCA_PARSE_ERROR: return kExitUsage;
        default: return kExitFailure;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equicontinuity, blocking words and spectra of one-dimensional cellular automata"};
    app.require_subcommand(1);
    app.fallthrough();

    int eca_number = -1;
    std::string rule_file;
    bool want_json = false;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    std::string manifest_file;
    std::string out_file;
    auto* eca_opt = app.add_option("--eca", eca_number, "elementary rule number 0..255")->check(CLI::Range(0, 255));
    auto* rule_opt = app.add_option("--rule", rule_file, "rule file (JSON)");
    eca_opt->excludes(rule_opt);
    app.add_flag("--json", want_json, "print the JSON report");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized analyses (default 1)");
    app.add_option("--threads", threads, "parallelism cap (default: EQCA_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--manifest", manifest_file, "write the run manifest, with timestamp, to this file");
    app.add_option("--out", out_file, "write the space-time diagram here instead of standard output");

    std::vector<Command> commands;
    auto command = [&](CLI::App* parent, const std::string& name, const std::string& key, const std::string& help) {
        commands.push_back({parent->add_subcommand(name, help), key, {}});
        return commands.size() - 1;
    };

    std::size_t k = command(&app, "simulate", "simulate", "space-time diagram from a cyclic word or word@offset window");
    add<std::string>(commands[k], "--init", "init", "initial word (cyclic) or word@offset (window)");
    add<std::size_t>(commands[k], "--steps", "steps", "number of steps");
    add<std::string>(commands[k], "--format", "format", "ascii or pgm");

    CLI::App* blocking = app.add_subcommand("blocking", "blocking words");
    blocking->require_subcommand(1);
    k = command(blocking, "certify", "blocking.certify", "certify a blocking word by set abstraction");
    add<std::string>(commands[k], "--word", "word", "candidate word");
    add<std::size_t>(commands[k], "--s", "s", "column width");
    add<std::size_t>(commands[k], "--margin", "margin", "margin W of unknown cells");
    add<std::size_t>(commands[k], "--max-steps", "max_steps", "abstract step budget");
    k = command(blocking, "falsify", "blocking.falsify", "search for counterexamples by simulation");
    add<std::string>(commands[k], "--word", "word", "candidate word");
    add<std::size_t>(commands[k], "--s", "s", "column width");
    add<std::size_t>(commands[k], "--horizon", "horizon", "time horizon T");
    add<std::size_t>(commands[k], "--samples", "samples", "samples per offset");
    k = command(blocking, "search", "blocking.search", "certify every word up to a length");
    add<std::size_t>(commands[k], "--s", "s", "column width");
    add<std::size_t>(commands[k], "--lmax", "lmax", "maximum word length");
    add<std::size_t>(commands[k], "--margin", "margin", "margin W");
    add<std::size_t>(commands[k], "--max-steps", "max_steps", "abstract step budget");
    add_bool(commands[k], "--skip-extensions", "skip_extensions", "omit words containing a certified word");

    auto classify_flags = [&](std::size_t i) {
        add<std::size_t>(commands[i], "--lmax", "lmax", "maximum blocking word length");
        add<std::size_t>(commands[i], "--margin", "margin", "margin W");
        add<std::size_t>(commands[i], "--max-steps", "max_steps", "abstract step budget");
        add<std::size_t>(commands[i], "--horizon", "horizon", "falsification horizon");
        add<std::size_t>(commands[i], "--samples", "samples", "falsification samples per offset");
        add<std::size_t>(commands[i], "--max-preperiod", "max_preperiod", "global check preperiod bound");
        add<std::size_t>(commands[i], "--max-period", "max_period", "global check period bound");
    };
    k = command(blocking, "classify", "blocking.classify", "topological classification");
    classify_flags(k);
    k = command(&app, "classify", "classify", "topological classification");
    classify_flags(k);

    k = command(&app, "surjective", "surjective", "surjectivity with an orphan word when not surjective");
    add<std::uint64_t>(commands[k], "--subset-budget", "subset_budget", "subset construction budget");

    CLI::App* gilman = app.add_subcommand("gilman", "measure-theoretic equicontinuity");
    gilman->require_subcommand(1);
    k = command(gilman, "estimate", "gilman.estimate", "estimate conditional trace-class measures");
    add<std::string>(commands[k], "--point", "point", "cyclic base point word (optionally word@center)");
    add<std::size_t>(commands[k], "--m", "m", "trace half-width m");
    add<std::vector<std::size_t>>(commands[k], "--n", "n", "conditioning radius (repeatable)");
    add<std::size_t>(commands[k], "--horizon", "horizon", "time horizon T");
    add<std::size_t>(commands[k], "--samples", "samples", "sample count N");
    const std::size_t estimate_index = k;
    k = command(gilman, "classify", "gilman.classify", "A / B / C evidence report");
    add<std::vector<std::string>>(commands[k], "--point", "points", "cyclic base point (repeatable)");
    add<std::vector<std::size_t>>(commands[k], "--m", "m", "trace half-width (repeatable)");
    add<std::vector<std::size_t>>(commands[k], "--n", "n", "conditioning radius (repeatable)");
    add<std::size_t>(commands[k], "--horizon", "horizon", "time horizon T");
    add<std::size_t>(commands[k], "--samples", "samples", "sample count N");
    add<std::size_t>(commands[k], "--lmax", "lmax", "blocking search length");
    add<double>(commands[k], "--b-threshold", "b_threshold", "ratio threshold for B evidence");
    add<double>(commands[k], "--c-threshold", "c_threshold", "ratio threshold for C evidence");
    const std::size_t gilman_classify_index = k;
    std::string spec_text;
    for (std::size_t i : {estimate_index, gilman_classify_index}) {
        CLI::Option* opt = commands[i].app->add_option("--spec", spec_text, "\"uniform\" or probabilities a,b,...");
        commands[i].flags.push_back({opt, [&spec_text](json& params) {
                                         if (spec_text == "uniform") {
                                             params["spec"] = "uniform";
                                             return;
                                         }
                                         std::vector<double> probs;
                                         std::istringstream is(spec_text);
                                         std::string item;
                                         while (std::getline(is, item, ',')) probs.push_back(std::stod(item));
                                         params["spec"] = probs;
                                     }});
    }

    CLI::App* factor = app.add_subcommand("factor", "equicontinuous counter factors");
    factor->require_subcommand(1);
    for (const auto& [name, key] : {std::pair{"build", "factor.build"}, std::pair{"verify", "factor.verify"}}) {
        k = command(factor, name, key, name == std::string("build") ? "build a factor map" : "check pi(F(x)) = C(pi(x))");
        add<std::string>(commands[k], "--point", "point", "cyclic word whose central window cycle gives the phases");
        add_bool(commands[k], "--from-witness", "from_witness", "use the global equicontinuity witness");
        add<std::size_t>(commands[k], "--lock", "lock", "steps matched past the preperiod (at least p)");
        add<std::size_t>(commands[k], "--verify-period", "verify_period", "exhaustive check bound for --from-witness");
    }
    add<std::size_t>(commands[k], "--max-period", "max_period_exhaustive", "exhaustive cyclic period bound");
    add<std::size_t>(commands[k], "--windows", "windows", "number of random windows");
    add<std::size_t>(commands[k], "--window-width", "window_width", "random window width");

    CLI::App* spectrum = app.add_subcommand("spectrum", "correlations and spectra");
    spectrum->require_subcommand(1);
    auto correlation_flags = [&](std::size_t i) {
        add<std::string>(commands[i], "--u", "u", "cylinder U as word@offset");
        add<std::string>(commands[i], "--v", "v", "cylinder V as word@offset");
        add<std::size_t>(commands[i], "--horizon", "horizon", "last correlation index N");
        add<std::string>(commands[i], "--method", "method", "exact or mc");
        add<std::size_t>(commands[i], "--period", "period", "cyclic period for the exact method");
        add<std::size_t>(commands[i], "--samples", "samples", "Monte Carlo samples");
    };
    k = command(spectrum, "correlate", "spectrum.correlate", "correlation sequence and mixing screen");
    correlation_flags(k);
    add<double>(commands[k], "--tail-fraction", "tail_fraction", "tail share used by the mixing screen");
    add<double>(commands[k], "--tolerance", "tolerance", "mixing tolerance");
    k = command(spectrum, "scan", "spectrum.scan", "spectral peaks with rational identification");
    correlation_flags(k);
    add<std::int64_t>(commands[k], "--qmax", "qmax", "largest denominator Q_max");
    add<double>(commands[k], "--tolerance", "tolerance", "rational match tolerance (default 1/L)");
    std::string series_file;
    CLI::Option* series_opt = commands[k].app->add_option("--series", series_file, "JSON array of values to scan");
    commands[k].flags.push_back({series_opt, [&series_file](json& params) {
                                     params["series"] = json::parse(read_file(series_file));
                                 }});
    k = command(spectrum, "orbits", "spectrum.orbits", "cycle structure on cyclic configurations");
    add<std::size_t>(commands[k], "--period", "period", "cyclic period n");
    k = command(spectrum, "compare-shift", "spectrum.compare-shift", "finite-model shift spectrum comparison");
    add<std::size_t>(commands[k], "--period", "period", "cyclic period n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const Command* chosen = nullptr;
    for (const Command& c : commands)
        if (c.app->parsed()) chosen = &c;
    if (!chosen) {
        std::cerr << "usage error: no subcommand given\n";
        return kExitUsage;
    }
    if (eca_number < 0 && rule_file.empty()) {
        std::cerr << "usage error: give a rule with --eca N or --rule FILE\n";
        return kExitUsage;
    }

    json params = json::object();
    try {
        for (const Flag& f : chosen->flags)
            if (f.option->count()) f.put(params);
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    static const std::vector<std::string> seeded{"blocking.falsify", "blocking.classify", "classify",
                                                 "gilman.estimate",  "gilman.classify",   "factor.verify",
                                                 "spectrum.correlate", "spectrum.scan"};
    if (std::find(seeded.begin(), seeded.end(), chosen->name) != seeded.end()) params["seed"] = seed;
    else if (seed_opt->count()) {
        std::cerr << "usage error: --seed has no effect on " << chosen->name << "\n";
        return kExitUsage;
    }
    params["threads"] = threads;

    eqca_rule* raw_rule = nullptr;
    eqca_status status;
    if (!rule_file.empty()) {
        std::string text;
        try {
            text = read_file(rule_file);
        } catch (const std::exception&) {
            std::cerr << "error: unknown rule file '" << rule_file << "'\n";
            return kExitUsage;
        }
        status = eqca_rule_from_json(text.c_str(), &raw_rule);
    } else {
        status = eqca_rule_from_eca(eca_number, &raw_rule);
    }
    if (status != EQCA_OK) {
        std::cerr << "error: " << eqca_status_name(status) << ": " << eqca_last_error() << "\n";
        return exit_code_for(status);
    }
    std::unique_ptr<eqca_rule, void (*)(eqca_rule*)> rule(raw_rule, eqca_rule_free);

    eqca_report* raw_report = nullptr;
    const std::string params_text = params.dump();
    status = eqca_analyze(rule.get(), chosen->name.c_str(), params_text.c_str(), &raw_report);
    if (status != EQCA_OK) {
        std::cerr << "error: " << eqca_status_name(status) << ": " << eqca_last_error() << "\n";
        return exit_code_for(status);
    }
    std::unique_ptr<eqca_report, void (*)(eqca_report*)> report(raw_report, eqca_report_free);

    std::size_t artifact_len = 0;
    const std::uint8_t* artifact = eqca_report_artifact(report.get(), &artifact_len);
    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << out_file << "'\n";
            return kExitFailure;
        }
        out.write(reinterpret_cast<const char*>(artifact), static_cast<std::streamsize>(artifact_len));
    }
    if (want_json) {
        std::cout << eqca_report_json(report.get());
    } else if (chosen->name == "simulate") {
        if (out_file.empty()) std::cout.write(reinterpret_cast<const char*>(artifact), static_cast<std::streamsize>(artifact_len));
    } else {
        std::cout << eqca_report_text(report.get());
    }
    std::cout.flush();

    if (!manifest_file.empty()) {
        const json full = json::parse(eqca_report_json(report.get()));
        json manifest{{"schema", "eqca.manifest/1"},
                      {"toolkit_version", full.at("toolkit_version")},
                      {"rule_hash", full.at("rule").at("hash")},
                      {"command", full.at("command")},
                      {"params", full.at("params")},
                      {"threads", threads},
                      {"timestamp", utc_timestamp()}};
        std::ofstream mf(manifest_file);
        if (!mf) {
            std::cerr << "error: cannot write '" << manifest_file << "'\n";
            return kExitFailure;
        }
        mf << manifest.dump(2) << "\n";
    }
    return eqca_report_passed(report.get()) ? kExitOk : kExitFailure;
}
