// Command-line front end. Talks to the shared library exclusively through
// the C API in seqtest.h; everything here is argument plumbing and I/O.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqtest.h"

namespace {

using nlohmann::json;

int status_to_exit(seqtest_status s) {
    switch (s) {
        case SEQTEST_OK: return 0;
        case SEQTEST_ERR_INVALID_ARGUMENT:
        case SEQTEST_ERR_CONFIG:
        case SEQTEST_ERR_USAGE: return 2;
        case SEQTEST_ERR_REPRODUCTION: return 4;
        case SEQTEST_ERR_NUMERIC:
        case SEQTEST_ERR_INTERNAL:
        default: return 3;
    }
}

int fail(seqtest_status s) {
    std::fprintf(stderr, "error: %s\n", seqtest_last_error());
    return status_to_exit(s);
}

int fail_config(const std::string& message) {
    std::fprintf(stderr, "error: %s\n", message.c_str());
    return 2;
}

bool read_file(const std::string& path, std::string& out, std::string& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err = "cannot open " + path;
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool write_output(const std::string& target, const std::string& text,
                  std::string& err) {
    if (target.empty() || target == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return true;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) {
        err = "cannot write " + target;
        return false;
    }
    out << text;
    return out.good();
}

struct ModelHandle {
    seqtest_model* m = nullptr;
    ~ModelHandle() { seqtest_model_free(m); }
};

struct CStr {
    char* s = nullptr;
    ~CStr() { seqtest_string_free(s); }
};

// Options shared by the subcommands; defaults may come from --config.
struct Options {
    std::string config_path;
    std::string model_path;
    std::string design_path;
    std::string out = "-";
    std::string prior = "kl";
    std::string rule = "corrected";
    std::string weights = "formula";
    std::string test = "milrt";
    std::string truth = "0";
    std::string estimator = "direct";
    std::string what = "constants";
    std::string per_rep_path;
    std::string trace_path;
    double alpha = 1e-4;
    double beta = 1e-2;
    long long reps = 10000;
    long long max_steps = 1000000;
    uint64_t seed = 1;
    int threads = 1;
    bool strict = false;

    json config;  // parsed --config contents (empty object when absent)
};

// Fills unset options from the config file; command-line flags win.
template <typename T>
void cfg(const Options& o, const CLI::Option* opt, const char* key, T& var) {
    if (opt != nullptr && opt->count() > 0) return;
    if (o.config.contains(key)) var = o.config.at(key).get<T>();
}

int load_config(Options& o) {
    o.config = json::object();
    if (o.config_path.empty()) return 0;
    std::string text, err;
    if (!read_file(o.config_path, text, err)) return fail_config(err);
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        return fail_config("config file is not a JSON object: " + o.config_path);
    o.config = std::move(parsed);
    return 0;
}

// Model JSON from --model, or from the config's inline "model" object /
// "model_file" path.
int resolve_model_json(const Options& o, std::string& out) {
    std::string err;
    if (!o.model_path.empty()) {
        if (!read_file(o.model_path, out, err)) return fail_config(err);
        return 0;
    }
    if (o.config.contains("model")) {
        out = o.config.at("model").dump();
        return 0;
    }
    if (o.config.contains("model_file")) {
        std::string path = o.config.at("model_file").get<std::string>();
        if (!read_file(path, out, err)) return fail_config(err);
        return 0;
    }
    return fail_config("no model given (use --model or a config with \"model\")");
}

int resolve_design_json(const Options& o, std::string& out) {
    std::string err;
    if (!o.design_path.empty()) {
        if (!read_file(o.design_path, out, err)) return fail_config(err);
        return 0;
    }
    if (o.config.contains("design")) {
        out = o.config.at("design").dump();
        return 0;
    }
    if (o.config.contains("design_file")) {
        std::string path = o.config.at("design_file").get<std::string>();
        if (!read_file(path, out, err)) return fail_config(err);
        return 0;
    }
    return fail_config("no design given (use --design or a config with \"design\")");
}

int open_model(const Options& o, ModelHandle& model) {
    std::string model_json;
    if (int rc = resolve_model_json(o, model_json); rc != 0) return rc;
    seqtest_status s = seqtest_model_create_json(model_json.c_str(), &model.m);
    if (s != SEQTEST_OK) return fail(s);
    return 0;
}

int emit(const Options& o, const std::string& text) {
    std::string err;
    if (!write_output(o.out, text, err)) return fail_config(err);
    return 0;
}

int run_constants(const Options& o) {
    ModelHandle model;
    if (int rc = open_model(o, model); rc != 0) return rc;
    CStr csv;
    seqtest_status s = seqtest_emit_constants_csv(model.m, &csv.s);
    if (s != SEQTEST_OK) return fail(s);
    return emit(o, csv.s);
}

int run_design(const Options& o) {
    ModelHandle model;
    if (int rc = open_model(o, model); rc != 0) return rc;
    CStr out;
    seqtest_status s =
        seqtest_emit_design_json(model.m, o.prior.c_str(), o.rule.c_str(), o.alpha,
                                 o.beta, o.weights.c_str(), &out.s);
    if (s != SEQTEST_OK) return fail(s);
    return emit(o, std::string(out.s) + "\n");
}

int run_approximate(const Options& o) {
    ModelHandle model;
    if (int rc = open_model(o, model); rc != 0) return rc;
    std::string design_json;
    if (int rc = resolve_design_json(o, design_json); rc != 0) return rc;
    CStr csv;
    seqtest_status s = seqtest_emit_approximate_csv(model.m, design_json.c_str(),
                                                    o.alpha, o.beta, &csv.s);
    if (s != SEQTEST_OK) return fail(s);
    return emit(o, csv.s);
}

int run_simulate(const Options& o) {
    ModelHandle model;
    if (int rc = open_model(o, model); rc != 0) return rc;
    std::string design_json;
    if (int rc = resolve_design_json(o, design_json); rc != 0) return rc;
    CStr report, per_rep, trace;
    seqtest_status s = seqtest_emit_simulate_json(
        model.m, design_json.c_str(), o.test.c_str(), o.truth.c_str(), o.reps,
        o.seed, o.max_steps, o.estimator.c_str(), o.threads, &report.s,
        o.per_rep_path.empty() ? nullptr : &per_rep.s,
        o.trace_path.empty() ? nullptr : &trace.s);
    if (s != SEQTEST_OK) return fail(s);
    std::string err;
    if (!o.per_rep_path.empty() && !write_output(o.per_rep_path, per_rep.s, err))
        return fail_config(err);
    if (!o.trace_path.empty() && !write_output(o.trace_path, trace.s, err))
        return fail_config(err);
    return emit(o, std::string(report.s) + "\n");
}

int run_reproduce(const Options& o) {
    CStr csv;
    seqtest_status s = seqtest_emit_reproduce_csv(o.what.c_str(), o.reps, o.seed,
                                                  o.threads, o.strict ? 1 : 0,
                                                  &csv.s);
    if (s != SEQTEST_OK && csv.s != nullptr) {
        // Strict mismatch still produces the comparison table.
        std::string err;
        write_output(o.out, csv.s, err);
        return fail(s);
    }
    if (s != SEQTEST_OK) return fail(s);
    return emit(o, csv.s);
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Sequential tests of a simple null against finitely many "
                 "alternatives: design constants, asymptotic approximations, and "
                 "Monte Carlo evaluation"};
    app.require_subcommand(1);
    app.add_option("--config", o.config_path,
                   "JSON file with default options (flags override it)");

    CLI::App* constants =
        app.add_subcommand("constants", "Per-alternative information and overshoot "
                                        "constants as CSV");
    CLI::Option* c_model = constants->add_option("--model", o.model_path,
                                                 "model JSON file");
    CLI::Option* c_out = constants->add_option("--out", o.out, "output path or -");

    CLI::App* design = app.add_subcommand(
        "design", "Weights and thresholds for a prior/rule/level as JSON");
    CLI::Option* d_model = design->add_option("--model", o.model_path,
                                              "model JSON file");
    CLI::Option* d_prior =
        design->add_option("--prior", o.prior, "uniform|kl|l|hat");
    CLI::Option* d_rule =
        design->add_option("--rule", o.rule, "conservative|corrected");
    CLI::Option* d_alpha = design->add_option("--alpha", o.alpha, "type-I level");
    CLI::Option* d_beta = design->add_option("--beta", o.beta, "type-II level");
    CLI::Option* d_weights = design->add_option(
        "--weights", o.weights, "formula|published (reference-table override)");
    CLI::Option* d_out = design->add_option("--out", o.out, "output path or -");

    CLI::App* approx = app.add_subcommand(
        "approximate", "First-order ESS and error approximations as CSV");
    CLI::Option* a_model = approx->add_option("--model", o.model_path,
                                              "model JSON file");
    CLI::Option* a_design = approx->add_option("--design", o.design_path,
                                               "design JSON file");
    CLI::Option* a_alpha = approx->add_option("--alpha", o.alpha, "type-I level");
    CLI::Option* a_beta = approx->add_option("--beta", o.beta, "type-II level");
    CLI::Option* a_out = approx->add_option("--out", o.out, "output path or -");

    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo run; emits a JSON report");
    CLI::Option* s_model = simulate->add_option("--model", o.model_path,
                                                "model JSON file");
    CLI::Option* s_design = simulate->add_option("--design", o.design_path,
                                                 "design JSON file");
    CLI::Option* s_test =
        simulate->add_option("--test", o.test, "milrt|wglrt|sprt:<i>");
    CLI::Option* s_truth =
        simulate->add_option("--truth", o.truth, "0|<i>|weighted");
    CLI::Option* s_reps = simulate->add_option("--reps", o.reps, "replications");
    CLI::Option* s_seed = simulate->add_option("--seed", o.seed, "RNG seed");
    CLI::Option* s_max = simulate->add_option("--max-steps", o.max_steps,
                                              "truncation horizon");
    CLI::Option* s_est =
        simulate->add_option("--estimator", o.estimator, "direct|is");
    CLI::Option* s_threads = simulate->add_option("--threads", o.threads,
                                                  "worker threads");
    CLI::Option* s_out = simulate->add_option("--out", o.out, "output path or -");
    simulate->add_option("--per-rep", o.per_rep_path,
                         "also write per-replication (T, d) CSV here");
    simulate->add_option("--trace", o.trace_path,
                         "also write the first replication's statistic trace here");

    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "Reference-study tables and figure data as CSV");
    CLI::Option* r_what = reproduce->add_option(
        "--what", o.what, "constants|ess|figure1|figure2|figure3");
    CLI::Option* r_reps = reproduce->add_option("--reps", o.reps,
                                                "Monte Carlo effort");
    CLI::Option* r_seed = reproduce->add_option("--seed", o.seed, "RNG seed");
    CLI::Option* r_threads = reproduce->add_option("--threads", o.threads,
                                                   "worker threads");
    CLI::Option* r_out = reproduce->add_option("--out", o.out, "output path or -");
    reproduce->add_flag("--strict", o.strict,
                        "exit 4 when a comparison misses its tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (int rc = load_config(o); rc != 0) return rc;

    if (constants->parsed()) {
        cfg(o, c_model, "model_file", o.model_path);
        cfg(o, c_out, "out", o.out);
        return run_constants(o);
    }
    if (design->parsed()) {
        cfg(o, d_model, "model_file", o.model_path);
        cfg(o, d_prior, "prior", o.prior);
        cfg(o, d_rule, "rule", o.rule);
        cfg(o, d_alpha, "alpha", o.alpha);
        cfg(o, d_beta, "beta", o.beta);
        cfg(o, d_weights, "weights", o.weights);
        cfg(o, d_out, "out", o.out);
        return run_design(o);
    }
    if (approx->parsed()) {
        cfg(o, a_model, "model_file", o.model_path);
        cfg(o, a_design, "design_file", o.design_path);
        cfg(o, a_alpha, "alpha", o.alpha);
        cfg(o, a_beta, "beta", o.beta);
        cfg(o, a_out, "out", o.out);
        return run_approximate(o);
    }
    if (simulate->parsed()) {
        cfg(o, s_model, "model_file", o.model_path);
        cfg(o, s_design, "design_file", o.design_path);
        cfg(o, s_test, "test", o.test);
        cfg(o, s_truth, "truth", o.truth);
        cfg(o, s_reps, "reps", o.reps);
        cfg(o, s_seed, "seed", o.seed);
        cfg(o, s_max, "max_steps", o.max_steps);
        cfg(o, s_est, "estimator", o.estimator);
        cfg(o, s_threads, "threads", o.threads);
        cfg(o, s_out, "out", o.out);
        return run_simulate(o);
    }
    if (reproduce->parsed()) {
        cfg(o, r_what, "what", o.what);
        cfg(o, r_reps, "reps", o.reps);
        cfg(o, r_seed, "seed", o.seed);
        cfg(o, r_threads, "threads", o.threads);
        cfg(o, r_out, "out", o.out);
        return run_reproduce(o);
    }
    return 2;
}
