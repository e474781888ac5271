// bvs: Bayesian variable selection and model averaging from the command line.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bvs/benchmark.hpp"
#include "bvs/dataset.hpp"
#include "bvs/error.hpp"
#include "bvs/exact_posterior.hpp"
#include "bvs/report.hpp"
#include "bvs/sampler.hpp"
#include "bvs/summary.hpp"

namespace {

using namespace bvs;

constexpr int auto_enumeration_limit = 25;

struct RunConfig {
    std::string command;
    std::string data;
    std::string response;
    std::vector<std::string> fixed;
    std::string gprior = "uip";
    std::string model_prior = "fixed:0.5";
    std::string engine = "auto";
    std::uint64_t iterations = 100000;
    std::int64_t burn_in = -1;  // -1: 10% of iterations
    std::uint64_t seed = 1;
    int threads = 1;
    std::string estimator;
    std::string start = "null";
    std::size_t top_k = 10;
    std::string predict;
    std::string out;
    std::string format = "table";
    std::string model_table;
    // benchmark
    std::string metric = "delta-exact";
    double dt = 0;
    double horizon = 0;
    std::string reference;
    std::string clock = "wall";
};

int default_threads() {
    const char* env = std::getenv("BVS_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw config_error("BVS_THREADS must be a positive integer");
    return static_cast<int>(v);
}

std::uint64_t burn_in_of(const RunConfig& c) {
    return c.burn_in < 0 ? c.iterations / 10 : static_cast<std::uint64_t>(c.burn_in);
}

/// Output stream for --out, or stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw config_error("cannot write '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

/// Rows of covariate values read from a delimited file whose header names the covariates.
std::vector<Eigen::VectorXd> read_prediction_points(const std::string& arg, const Dataset& d) {
    const std::string path = !arg.empty() && arg.front() == '@' ? arg.substr(1) : arg;
    std::ifstream in(path);
    if (!in) throw config_error("cannot open prediction file '" + path + "'");
    std::string header;
    if (!std::getline(in, header)) throw data_error("prediction file '" + path + "' is empty");
    const char delim = detect_delimiter(header);
    const auto cols = split_fields(header, delim);
    std::vector<int> where(d.p(), -1);
    for (int j = 0; j < d.p(); ++j)
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (cols[c] == d.names[j]) where[j] = static_cast<int>(c);
    for (int j = 0; j < d.p(); ++j)
        if (where[j] < 0) throw config_error("prediction file lacks column '" + d.names[j] + "'");
    std::vector<Eigen::VectorXd> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_fields(line, delim);
        if (f.size() != cols.size())
            throw data_error("prediction file line " + std::to_string(lineno) + ": wrong number of fields");
        Eigen::VectorXd x(d.p());
        for (int j = 0; j < d.p(); ++j) {
            try {
                std::size_t used = 0;
                x(j) = std::stod(f[where[j]], &used);
                if (used != f[where[j]].size()) throw std::invalid_argument("trailing");
            } catch (const std::logic_error&) {
                throw data_error("prediction file line " + std::to_string(lineno) + ": non-numeric value");
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

/// PIP reference: a JSON report (its "pip" object), "name,value" rows, or bare values in column order.
Eigen::VectorXd read_reference(const std::string& path, const Dataset& d) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open reference file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    Eigen::VectorXd ref = Eigen::VectorXd::Constant(d.p(), std::nan(""));
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception&) {
            throw data_error("reference file is not valid JSON");
        }
        if (!doc.contains("pip")) throw data_error("reference document has no 'pip' object");
        for (int j = 0; j < d.p(); ++j)
            if (doc["pip"].contains(d.names[j])) ref(j) = doc["pip"][d.names[j]].get<double>();
    } else {
        std::istringstream is(text);
        std::string line;
        int next = 0;
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto f = split_fields(line, line.find(',') != std::string::npos ? ',' : '\t');
            try {
                if (f.size() == 1) {
                    if (next >= d.p()) throw data_error("reference file has too many values");
                    ref(next++) = std::stod(f[0]);
                } else {
                    for (int j = 0; j < d.p(); ++j)
                        if (d.names[j] == f[0]) ref(j) = std::stod(f[1]);
                }
            } catch (const std::logic_error&) {
                if (f.size() == 1 || f[0] != "covariate") throw data_error("reference file has a non-numeric value");
            }
        }
    }
    for (int j = 0; j < d.p(); ++j)
        if (std::isnan(ref(j))) throw config_error("reference has no value for '" + d.names[j] + "'");
    return ref;
}

struct ScorerInputs {
    GPriorSpec g;
    ModelPriorSpec m;
};

ScorerInputs priors_of(const RunConfig& c, const Dataset& d) {
    return {parse_gprior(c.gprior), parse_model_prior(c.model_prior, d.p_free())};
}

RunInfo run_info(const RunConfig& c, const Dataset& d, const ScorerInputs& in) {
    RunInfo info;
    info.command = c.command;
    info.gprior = to_string(in.g);
    info.model_prior = to_string(in.m);
    info.response = d.response_name;
    info.fixed = c.fixed;
    info.n = d.n();
    info.p = d.p();
    info.seed = c.seed;
    info.threads = c.threads;
    return info;
}

std::string resolve_engine(const RunConfig& c, const Dataset& d) {
    if (c.command == "enumerate") {
        if (c.engine != "auto" && c.engine != "enumerate") throw config_error("enumerate runs the enumerate engine only");
        return "enumerate";
    }
    if (c.command == "sample") {
        if (c.engine == "auto" || c.engine == "gibbs") return "gibbs";
        if (c.engine == "mc3") return "mc3";
        throw config_error("sample runs the gibbs or mc3 engine");
    }
    if (c.engine == "auto") return d.p_free() <= auto_enumeration_limit ? "enumerate" : "gibbs";
    if (c.engine == "enumerate" || c.engine == "gibbs" || c.engine == "mc3") return c.engine;
    throw config_error("unknown engine '" + c.engine + "'");
}

SamplerConfig sampler_config(const RunConfig& c, const std::string& engine) {
    SamplerConfig s;
    s.kind = engine == "mc3" ? SamplerKind::birth_death : SamplerKind::gibbs_scan;
    s.iterations = c.iterations;
    s.burn_in = burn_in_of(c);
    s.seed = c.seed;
    s.keep_visited = false;
    s.validate();
    return s;
}

PipEstimator estimator_of(const RunConfig& c, const std::string& engine) {
    if (c.estimator.empty()) return engine == "mc3" ? PipEstimator::frequency : PipEstimator::rao_blackwell;
    const auto e = parse_estimator(c.estimator);
    if (e == PipEstimator::rao_blackwell && engine == "mc3")
        throw config_error("the rb estimator needs the gibbs engine");
    return e;
}

int cmd_analyze(const RunConfig& c) {
    const auto format = parse_format(c.format);
    const Dataset d = load_dataset_file(c.data, c.response, c.fixed);
    const auto pri = priors_of(c, d);
    const std::string engine = resolve_engine(c, d);
    RunInfo info = run_info(c, d, pri);
    info.engine = engine;
    SummaryOptions so;
    so.top_k = c.top_k;
    PosteriorSummary s;
    if (engine == "enumerate") {
        EnumerationOptions eo;
        eo.threads = c.threads;
        const auto post = enumerate(d, pri.g, pri.m, {}, eo);
        s = summarize(post, d, so);
        info.shard_bits = post.shard_bits;
        if (!c.model_table.empty()) {
            Sink mt(c.model_table);
            write_model_table(mt.stream(), post, c.top_k);
        }
    } else {
        const auto sc = sampler_config(c, engine);
        const auto est = estimator_of(c, engine);
        const ModelScorer scorer(d, pri.g, pri.m);
        const auto trace = run_chains(d, scorer, sc, c.threads, c.threads, parse_start(c.start));
        s = summarize(trace, est, d, scorer, so);
        info.estimator = to_string(est);
        info.chains = trace.chains;
        info.iterations = sc.iterations;
        info.burn_in = sc.burn_in;
        if (!c.model_table.empty()) {
            Sink mt(c.model_table);
            write_visit_table(mt.stream(), trace, c.top_k);
        }
    }
    info.models = s.models;
    std::vector<double> predictions;
    if (!c.predict.empty())
        for (const auto& x : read_prediction_points(c.predict, d)) predictions.push_back(predict(s, d, x));
    Sink out(c.out);
    write_report(out.stream(), format, s, info, predictions);
    return 0;
}

int cmd_benchmark(const RunConfig& c) {
    const Dataset d = load_dataset_file(c.data, c.response, c.fixed);
    const auto pri = priors_of(c, d);
    const auto metric = parse_metric(c.metric);
    std::string engine = c.engine == "auto" ? "gibbs" : c.engine;
    if (engine != "gibbs" && engine != "mc3") throw config_error("benchmark runs the gibbs or mc3 engine");
    CheckpointClock clock;
    if (c.clock == "wall") {
        clock = CheckpointClock::wall;
    } else if (c.clock == "iterations") {
        clock = CheckpointClock::iterations;
    } else {
        throw config_error("clock must be wall or iterations");
    }
    const bool self = metric == CurveMetric::delta_self;
    const double dt = c.dt > 0 ? c.dt : (self ? 60.0 : 1.0);
    const double horizon = c.horizon > 0 ? c.horizon : (self ? 600.0 : 60.0);
    if (self && !(horizon > 2 * dt)) throw config_error("delta-self needs horizon > 2 dt");
    if (!self && !(horizon >= dt)) throw config_error("horizon must be at least dt");

    Eigen::VectorXd reference;
    if (!self) {
        if (!c.reference.empty()) {
            reference = read_reference(c.reference, d);
        } else if (d.p_free() <= auto_enumeration_limit) {
            const auto post = enumerate(d, pri.g, pri.m);
            reference = summarize(post, d).pip;
        } else {
            throw config_error("delta-exact with " + std::to_string(d.p_free()) +
                               " free covariates needs --reference");
        }
    }

    SamplerConfig sc;
    sc.kind = engine == "mc3" ? SamplerKind::birth_death : SamplerKind::gibbs_scan;
    sc.burn_in = c.burn_in < 0 ? 1000 : static_cast<std::uint64_t>(c.burn_in);
    sc.iterations = sc.burn_in + 1;
    sc.seed = c.seed;
    std::vector<PipEstimator> ests;
    if (!c.estimator.empty()) {
        ests.push_back(estimator_of(c, engine));
    } else {
        if (engine == "gibbs") ests.push_back(PipEstimator::rao_blackwell);
        ests.push_back(PipEstimator::frequency);
        ests.push_back(PipEstimator::renormalized);
    }

    const ModelScorer scorer(d, pri.g, pri.m);
    ChainStream stream(d, scorer, sc, parse_start(c.start));
    const auto snaps = take_snapshots(stream, clock, regular_checkpoints(dt, horizon), ests);

    const std::string prefix = c.out.empty() ? "curve" : c.out;
    for (auto e : ests) {
        const auto curve = self ? delta_self(snaps, e, dt, clock) : delta_exact(snaps, e, reference, clock);
        const std::string path = prefix + "-" + to_string(e) + ".csv";
        Sink file(path);
        write_curve(file.stream(), curve,
                    {{"seed", std::to_string(c.seed)},
                     {"engine", engine},
                     {"gprior", to_string(pri.g)},
                     {"model_prior", to_string(pri.m)},
                     {"data", c.data},
                     {"response", d.response_name},
                     {"n", std::to_string(d.n())},
                     {"p", std::to_string(d.p())},
                     {"burn_in", std::to_string(sc.burn_in)}});
        std::cout << to_string(e) << ": " << path << ", " << curve.values.size() << " points, final "
                  << format_number(curve.values.empty() ? 0.0 : curve.values.back());
        const double hit = curve.first_below(0.01);
        if (hit >= 0) std::cout << ", <= 0.01 at " << format_number(hit);
        std::cout << '\n';
    }
    return 0;
}

void add_common(CLI::App* app, RunConfig& c) {
    app->add_option("--data", c.data, "delimited data file with a header row")->required();
    app->add_option("--response", c.response, "response column label")->required();
    app->add_option("--fixed", c.fixed, "covariate kept in every model (repeatable)");
    app->add_option("--gprior", c.gprior, "uip, ric, bric, hq, ebl, jzs, hyper-g[:a], hyper-g-n[:a], robust")
        ->capture_default_str();
    app->add_option("--model-prior", c.model_prior,
                    "fixed[:theta], scott-berger, beta-binomial:a,b, mean-size:w, user-size-probs:@file")
        ->capture_default_str();
    app->add_option("--seed", c.seed, "master random seed")->capture_default_str();
    app->add_option("--threads", c.threads, "worker threads (default from BVS_THREADS, else 1)");
    app->add_option("--iterations", c.iterations, "sampler iterations including burn-in")->capture_default_str();
    app->add_option("--burn-in", c.burn_in, "discarded iterations (default 10% of iterations; benchmark 1000)");
    app->add_option("--estimator", c.estimator, "frequency, rb or renorm");
    app->add_option("--start", c.start, "null, full, random or a 0/1 string")->capture_default_str();
    app->add_option("--out", c.out, "output path (benchmark: curve file prefix)");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Bayesian variable selection for Gaussian linear regression under g-priors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "bvs 1.0");

    for (const char* name : {"analyze", "enumerate", "sample"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "analyze"
                                                 ? "posterior summaries, engine chosen by problem size"
                                                 : (std::string(name) == "enumerate" ? "exact posterior over all models"
                                                                                     : "MCMC over model space"));
        add_common(sub, cfg);
        sub->add_option("--engine", cfg.engine, "auto, enumerate, gibbs or mc3")->capture_default_str();
        sub->add_option("--top-k", cfg.top_k, "models listed in the report")->capture_default_str();
        sub->add_option("--predict", cfg.predict, "@file of covariate rows to predict at");
        sub->add_option("--format", cfg.format, "table, json or csv")->capture_default_str();
        sub->add_option("--model-table", cfg.model_table, "write the top-k model table to this path");
    }
    auto* bench = app.add_subcommand("benchmark", "convergence curves of sampler estimates");
    add_common(bench, cfg);
    bench->add_option("--engine", cfg.engine, "gibbs or mc3")->capture_default_str();
    bench->add_option("--metric", cfg.metric, "delta-exact or delta-self")->capture_default_str();
    bench->add_option("--dt", cfg.dt, "checkpoint spacing (default 1 for delta-exact, 60 for delta-self)");
    bench->add_option("--horizon", cfg.horizon, "last checkpoint (default 60 / 600)");
    bench->add_option("--reference", cfg.reference, "reference PIPs: JSON report or name,value rows");
    bench->add_option("--clock", cfg.clock, "wall or iterations")->capture_default_str();

    try {
        cfg.threads = default_threads();
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorKind::config);
    } catch (const Error& e) {
        std::cerr << "bvs: " << e.what() << '\n';
        return e.exit_code();
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (cfg.threads < 1) throw config_error("--threads must be at least 1");
        if (cfg.command == "benchmark") return cmd_benchmark(cfg);
        return cmd_analyze(cfg);
    } catch (const Error& e) {
        std::cerr << "bvs: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::bad_alloc&) {
        std::cerr << "bvs: out of memory\n";
        return static_cast<int>(ErrorKind::resource_cap);
    } catch (const std::exception& e) {
        std::cerr << "bvs: internal error: " << e.what() << '\n';
        return 1;
    }
}
