#include "cb2o/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace cb2o::cli {

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::cb2o: return "cb2o";
    case Mode::fed: return "fed";
    case Mode::sweep: return "sweep";
    default: return "oracle";
    }
}

Mode parse_mode(const std::string& text)
{
    if (text == "cb2o") return Mode::cb2o;
    if (text == "fed") return Mode::fed;
    if (text == "sweep") return Mode::sweep;
    if (text == "oracle") return Mode::oracle;
    throw ConfigError("unknown mode '" + text + "' (expected cb2o|fed|sweep|oracle)", "mode");
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
    return out;
}

std::string fmt(const std::vector<std::string>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + values[i];
    return out;
}

double to_double(const std::string& key, const std::string& text)
{
    if (text == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + text + "'", key);
    return v;
}

long long to_int(const std::string& key, const std::string& text)
{
    long long v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'", key);
    return v;
}

bool to_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'", key);
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
    return out;
}

void require(bool ok, const std::string& key, const std::string& bound)
{
    if (!ok) throw ConfigError(key + " must be " + bound, key);
}

double positive(const std::string& key, const std::string& text)
{
    const double v = to_double(key, text);
    require(v > 0.0, key, "> 0");
    return v;
}

double nonnegative(const std::string& key, const std::string& text)
{
    const double v = to_double(key, text);
    require(v >= 0.0, key, ">= 0");
    return v;
}

long long at_least(const std::string& key, const std::string& text, long long lo)
{
    const long long v = to_int(key, text);
    require(v >= lo, key, ">= " + std::to_string(lo));
    return v;
}

struct Entry {
    std::string key;
    std::string doc;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

std::vector<Entry> make_registry()
{
    using C = ExperimentConfig;
    using S = const std::string&;
    std::vector<Entry> r;
    auto add = [&](std::string key, std::string doc, auto set, auto get) {
        r.push_back({std::move(key), std::move(doc), set, get});
    };

    add("mode", "cb2o | fed | sweep | oracle", [](C& c, S, S v) { c.mode = parse_mode(v); },
        [](const C& c) { return to_string(c.mode); });
    add("seed", "master seed", [](C& c, S k, S v) { c.seed = static_cast<std::uint64_t>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.seed); });
    add("threads", "worker threads; results do not depend on it",
        [](C& c, S k, S v) { c.threads = static_cast<unsigned>(at_least(k, v, 1)); },
        [](const C& c) { return std::to_string(c.threads); });
    add("out", "output directory", [](C& c, S k, S v) {
            require(!v.empty(), k, "a nonempty path");
            c.out = v;
        },
        [](const C& c) { return c.out; });

    add("problem.name", "ring | hyperplane", [](C& c, S k, S v) {
            require(v == "ring" || v == "hyperplane", k, "ring or hyperplane");
            c.problem.name = v;
        },
        [](const C& c) { return c.problem.name; });
    add("problem.dim", "dimension d", [](C& c, S k, S v) { c.problem.dim = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.problem.dim); });
    add("problem.point", "target point p, comma separated; empty for the default",
        [](C& c, S k, S v) { c.problem.point = to_doubles(k, v); }, [](const C& c) { return fmt(c.problem.point); });

    add("init.half_width", "benign init is uniform on center + [-h, h]^d",
        [](C& c, S k, S v) { c.cb2o.init_half_width = positive(k, v); },
        [](const C& c) { return fmt(c.cb2o.init_half_width); });
    add("init.center", "box center; empty for the origin",
        [](C& c, S k, S v) {
            const auto x = to_doubles(k, v);
            c.cb2o.init_center = Eigen::Map<const Vector>(x.data(), static_cast<Index>(x.size()));
        },
        [](const C& c) {
            return fmt(std::vector<double>(c.cb2o.init_center.data(),
                                           c.cb2o.init_center.data() + c.cb2o.init_center.size()));
        });

    add("consensus.alpha", "Gibbs weight alpha", [](C& c, S k, S v) { c.cb2o.consensus.alpha = nonnegative(k, v); },
        [](const C& c) { return fmt(c.cb2o.consensus.alpha); });
    add("consensus.beta", "quantile fraction beta in (0, 1]",
        [](C& c, S k, S v) {
            const double b = to_double(k, v);
            require(b > 0.0 && b <= 1.0, k, "in (0, 1]");
            c.cb2o.consensus.beta = b;
        },
        [](const C& c) { return fmt(c.cb2o.consensus.beta); });
    add("consensus.delta_q", "quantile slack (theoretical mode)",
        [](C& c, S k, S v) { c.cb2o.consensus.delta_q = nonnegative(k, v); },
        [](const C& c) { return fmt(c.cb2o.consensus.delta_q); });
    add("consensus.radius", "ball radius R: auto (10x init.half_width) | inf | number",
        [](C& c, S k, S v) {
            c.radius_auto = v == "auto";
            if (!c.radius_auto) c.cb2o.consensus.radius = positive(k, v);
        },
        [](const C& c) { return c.radius_auto ? std::string("auto") : fmt(c.cb2o.consensus.radius); });
    add("consensus.mode", "practical | theoretical",
        [](C& c, S k, S v) {
            require(v == "practical" || v == "theoretical", k, "practical or theoretical");
            c.cb2o.consensus.mode = v == "practical" ? QuantileMode::practical : QuantileMode::theoretical;
        },
        [](const C& c) {
            return std::string(c.cb2o.consensus.mode == QuantileMode::practical ? "practical" : "theoretical");
        });
    add("consensus.weights", "upper (exp(-alpha G)) | lower (exp(-alpha L))",
        [](C& c, S k, S v) {
            require(v == "upper" || v == "lower", k, "upper or lower");
            c.cb2o.weights = v == "upper" ? WeightSource::upper : WeightSource::lower;
        },
        [](const C& c) { return std::string(c.cb2o.weights == WeightSource::upper ? "upper" : "lower"); });

    add("step.lambda", "drift lambda", [](C& c, S k, S v) { c.cb2o.step.lambda = positive(k, v); },
        [](const C& c) { return fmt(c.cb2o.step.lambda); });
    add("step.sigma", "diffusion sigma", [](C& c, S k, S v) { c.cb2o.step.sigma = nonnegative(k, v); },
        [](const C& c) { return fmt(c.cb2o.step.sigma); });
    add("step.gamma", "time step", [](C& c, S k, S v) { c.cb2o.step.gamma = positive(k, v); },
        [](const C& c) { return fmt(c.cb2o.step.gamma); });

    add("cb2o.particles", "total particles N", [](C& c, S k, S v) { c.cb2o.n_particles = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.cb2o.n_particles); });
    add("cb2o.malicious", "malicious particles, < N", [](C& c, S k, S v) { c.cb2o.n_malicious = at_least(k, v, 0); },
        [](const C& c) { return std::to_string(c.cb2o.n_malicious); });
    add("cb2o.iters", "iterations", [](C& c, S k, S v) { c.cb2o.n_iters = static_cast<std::size_t>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.cb2o.n_iters); });
    add("cb2o.robust", "adjust alpha and beta for the malicious share",
        [](C& c, S k, S v) { c.cb2o.robust = to_bool(k, v); },
        [](const C& c) { return std::string(c.cb2o.robust ? "true" : "false"); });
    add("cb2o.epsilon", "target accuracy used by the alpha adjustment",
        [](C& c, S k, S v) { c.cb2o.epsilon = positive(k, v); }, [](const C& c) { return fmt(c.cb2o.epsilon); });

    add("adversary.policy", "none | random_noise | fixed_decoy | drift_to_decoy | mimic_offset",
        [](C& c, S k, S v) {
            require(v == "none" || v == "random_noise" || v == "fixed_decoy" || v == "drift_to_decoy" ||
                        v == "mimic_offset",
                    k, "one of none, random_noise, fixed_decoy, drift_to_decoy, mimic_offset");
            c.adversary.policy = v;
        },
        [](const C& c) { return c.adversary.policy; });
    add("adversary.scale", "random_noise scale", [](C& c, S k, S v) { c.adversary.scale = nonnegative(k, v); },
        [](const C& c) { return fmt(c.adversary.scale); });
    add("adversary.point", "decoy point; worst = the minimizer with maximal G",
        [](C& c, S k, S v) {
            if (v == "worst") c.adversary.point.reset();
            else c.adversary.point = to_doubles(k, v);
        },
        [](const C& c) { return c.adversary.point ? fmt(*c.adversary.point) : std::string("worst"); });
    add("adversary.rate", "drift_to_decoy rate", [](C& c, S k, S v) { c.adversary.rate = nonnegative(k, v); },
        [](const C& c) { return fmt(c.adversary.rate); });
    add("adversary.offset", "mimic_offset offset; empty for zero",
        [](C& c, S k, S v) { c.adversary.offset = to_doubles(k, v); },
        [](const C& c) { return fmt(c.adversary.offset); });

    add("fed.clusters", "clusters K", [](C& c, S k, S v) { c.fed.clusters = static_cast<int>(at_least(k, v, 1)); },
        [](const C& c) { return std::to_string(c.fed.clusters); });
    add("fed.benign_per_cluster", "benign agents per cluster",
        [](C& c, S k, S v) { c.fed.benign_per_cluster = static_cast<int>(at_least(k, v, 1)); },
        [](const C& c) { return std::to_string(c.fed.benign_per_cluster); });
    add("fed.malicious_per_cluster", "label-flipping agents per cluster",
        [](C& c, S k, S v) { c.fed.malicious_per_cluster = static_cast<int>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.fed.malicious_per_cluster); });
    add("fed.M", "download budget", [](C& c, S k, S v) { c.fed.M = static_cast<std::size_t>(at_least(k, v, 1)); },
        [](const C& c) { return std::to_string(c.fed.M); });
    add("fed.T", "communication rounds", [](C& c, S k, S v) { c.fed.T = static_cast<std::size_t>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.fed.T); });
    add("fed.tau", "local epochs", [](C& c, S k, S v) { c.fed.tau = static_cast<int>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.fed.tau); });
    add("fed.lambda1", "aggregation drift", [](C& c, S k, S v) { c.fed.lambda1 = nonnegative(k, v); },
        [](const C& c) { return fmt(c.fed.lambda1); });
    add("fed.lambda2", "local SGD scale", [](C& c, S k, S v) { c.fed.lambda2 = nonnegative(k, v); },
        [](const C& c) { return fmt(c.fed.lambda2); });
    add("fed.alpha", "aggregation weight alpha", [](C& c, S k, S v) { c.fed.alpha = nonnegative(k, v); },
        [](const C& c) { return fmt(c.fed.alpha); });
    add("fed.kappa", "likelihood temperature", [](C& c, S k, S v) { c.fed.kappa = nonnegative(k, v); },
        [](const C& c) { return fmt(c.fed.kappa); });
    add("fed.zeta", "likelihood EMA rate in [0, 1]",
        [](C& c, S k, S v) {
            const double z = to_double(k, v);
            require(z >= 0.0 && z <= 1.0, k, "in [0, 1]");
            c.fed.zeta = z;
        },
        [](const C& c) { return fmt(c.fed.zeta); });
    add("fed.gamma", "time step", [](C& c, S k, S v) { c.fed.gamma = positive(k, v); },
        [](const C& c) { return fmt(c.fed.gamma); });
    add("fed.T_G", "round from which robustness weights apply",
        [](C& c, S k, S v) { c.fed.T_G = static_cast<std::size_t>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.fed.T_G); });
    add("fed.mode", "fedcb2o | fedcbo | uniform",
        [](C& c, S k, S v) {
            if (v == "fedcb2o") c.fed.mode = fed::AggregationMode::fedcb2o;
            else if (v == "fedcbo") c.fed.mode = fed::AggregationMode::fedcbo;
            else if (v == "uniform") c.fed.mode = fed::AggregationMode::uniform;
            else throw ConfigError(k + " must be fedcb2o, fedcbo or uniform", k);
        },
        [](const C& c) {
            switch (c.fed.mode) {
            case fed::AggregationMode::fedcb2o: return std::string("fedcb2o");
            case fed::AggregationMode::fedcbo: return std::string("fedcbo");
            default: return std::string("uniform");
            }
        });
    add("fed.batch_size", "SGD mini-batch size", [](C& c, S k, S v) { c.fed.batch_size = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.fed.batch_size); });
    add("fed.init_scale", "std of the initial model parameters",
        [](C& c, S k, S v) { c.fed.init_scale = nonnegative(k, v); }, [](const C& c) { return fmt(c.fed.init_scale); });

    add("data.classes", "classes C", [](C& c, S k, S v) { c.data.n_classes = static_cast<int>(at_least(k, v, 2)); },
        [](const C& c) { return std::to_string(c.data.n_classes); });
    add("data.feature_dim", "feature dimension", [](C& c, S k, S v) { c.data.feature_dim = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.data.feature_dim); });
    add("data.class_radius", "radius of the class-mean circle",
        [](C& c, S k, S v) { c.data.class_radius = nonnegative(k, v); },
        [](const C& c) { return fmt(c.data.class_radius); });
    add("data.noise_std", "within-class noise", [](C& c, S k, S v) { c.data.noise_std = positive(k, v); },
        [](const C& c) { return fmt(c.data.noise_std); });
    add("data.source_target_gap", "distance between source and target class means",
        [](C& c, S k, S v) { c.data.source_target_gap = nonnegative(k, v); },
        [](const C& c) { return fmt(c.data.source_target_gap); });
    add("data.source_class", "flipped class c_S",
        [](C& c, S k, S v) { c.data.source_class = static_cast<int>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.data.source_class); });
    add("data.target_class", "flip target c_T",
        [](C& c, S k, S v) { c.data.target_class = static_cast<int>(at_least(k, v, 0)); },
        [](const C& c) { return std::to_string(c.data.target_class); });
    add("data.rotations", "rotation in degrees per cluster",
        [](C& c, S k, S v) { c.data.rotations_deg = to_doubles(k, v); },
        [](const C& c) { return fmt(c.data.rotations_deg); });
    add("data.benign_samples", "samples per benign agent",
        [](C& c, S k, S v) { c.data.benign_samples = at_least(k, v, 2); },
        [](const C& c) { return std::to_string(c.data.benign_samples); });
    add("data.benign_train", "training part of the benign samples",
        [](C& c, S k, S v) { c.data.benign_train = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.data.benign_train); });
    add("data.malicious_samples", "samples per malicious agent",
        [](C& c, S k, S v) { c.data.malicious_samples = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.data.malicious_samples); });
    add("data.test_samples", "test samples per cluster",
        [](C& c, S k, S v) { c.data.test_samples = at_least(k, v, 1); },
        [](const C& c) { return std::to_string(c.data.test_samples); });

    add("sweep.key", "config key varied by sweep mode", [](C& c, S k, S v) {
            require(!v.empty() && v.rfind("sweep.", 0) != 0 && v != "mode" && v != "out", k,
                    "a simulation key (not mode, out or sweep.*)");
            c.sweep.key = v;
        },
        [](const C& c) { return c.sweep.key; });
    add("sweep.values", "comma separated values for sweep.key",
        [](C& c, S k, S v) {
            c.sweep.values = split_list(v);
            require(!c.sweep.values.empty(), k, "a nonempty list");
        },
        [](const C& c) { return fmt(c.sweep.values); });
    add("sweep.base_mode", "cb2o | fed",
        [](C& c, S k, S v) {
            const Mode m = parse_mode(v);
            require(m == Mode::cb2o || m == Mode::fed, k, "cb2o or fed");
            c.sweep.base_mode = m;
        },
        [](const C& c) { return to_string(c.sweep.base_mode); });

    auto count_key = [&](std::string key, std::string doc, std::size_t oracle::SuiteConfig::*field) {
        add(std::move(key), std::move(doc),
            [field](C& c, S k, S v) { c.oracle.*field = static_cast<std::size_t>(at_least(k, v, 1)); },
            [field](const C& c) { return std::to_string(c.oracle.*field); });
    };
    count_key("oracle.consensus_trials", "random ensembles for the consensus oracle",
              &oracle::SuiteConfig::consensus_trials);
    count_key("oracle.quantile_trials", "random loss vectors for the quantile oracle",
              &oracle::SuiteConfig::quantile_trials);
    count_key("oracle.laplace_configs", "random admissible configurations for the bound sweep",
              &oracle::SuiteConfig::laplace_configs);
    count_key("oracle.coverage_seeds", "seeds for the sampling coverage check", &oracle::SuiteConfig::coverage_seeds);
    count_key("oracle.gradient_trials", "(theta, batch) pairs for the gradient check",
              &oracle::SuiteConfig::gradient_trials);
    count_key("oracle.sampling_trials", "draws for the sampling frequency check",
              &oracle::SuiteConfig::sampling_trials);
    count_key("oracle.probe_samples", "samples per assumption probe", &oracle::SuiteConfig::probe_samples);
    return r;
}

const std::vector<Entry>& registry()
{
    static const auto r = make_registry();
    return r;
}

const Entry& find_entry(const std::string& key)
{
    for (const auto& e : registry())
        if (e.key == key) return e;
    throw ConfigError("unknown config key '" + key + "'", key);
}

}  // namespace

void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    find_entry(key).set(cfg, key, value);
}

std::string get_value(const ExperimentConfig& cfg, const std::string& key) { return find_entry(key).get(cfg); }

std::vector<KeyInfo> config_keys()
{
    const ExperimentConfig defaults;
    std::vector<KeyInfo> out;
    for (const auto& e : registry()) out.push_back({e.key, e.get(defaults), e.doc});
    return out;
}

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", {}, line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key", {}, line_no);
        if (const auto it = seen.find(key); it != seen.end())
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "' (first on line " +
                                  std::to_string(it->second) + ")",
                              key, line_no);
        seen[key] = line_no;
        try {
            set_value(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what(), key, line_no);
        }
    }
    validate(cfg);
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg)
{
    std::string out;
    for (const auto& e : registry()) out += e.key + " = " + e.get(cfg) + "\n";
    return out;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void validate(const ExperimentConfig& cfg)
{
    const auto& c = cfg.cb2o;
    if (c.n_malicious >= c.n_particles)
        throw ConfigError("cb2o.malicious must be < cb2o.particles (" + std::to_string(c.n_particles) + ")",
                          "cb2o.malicious");
    if (cfg.problem.name == "ring" && cfg.problem.dim < 2) throw ConfigError("problem.dim must be >= 2 for ring", "problem.dim");
    const auto d = static_cast<std::size_t>(cfg.problem.dim);
    auto check_dim = [&](std::size_t size, const std::string& key) {
        if (size != 0 && size != d)
            throw ConfigError(key + " must have problem.dim = " + std::to_string(d) + " entries", key);
    };
    check_dim(cfg.problem.point.size(), "problem.point");
    check_dim(static_cast<std::size_t>(c.init_center.size()), "init.center");
    if (cfg.adversary.point) {
        if (cfg.adversary.point->size() != d)
            throw ConfigError("adversary.point must have problem.dim entries", "adversary.point");
    }
    check_dim(cfg.adversary.offset.size(), "adversary.offset");

    const auto& f = cfg.fed;
    if (f.T_G > f.T) throw ConfigError("fed.T_G must be <= fed.T (" + std::to_string(f.T) + ")", "fed.T_G");
    if (f.M >= f.agents())
        throw ConfigError("fed.M must be < the number of agents (" + std::to_string(f.agents()) + ")", "fed.M");
    const auto& s = cfg.data;
    if (static_cast<int>(s.rotations_deg.size()) != f.clusters)
        throw ConfigError("data.rotations needs one angle per cluster (fed.clusters = " + std::to_string(f.clusters) + ")",
                          "data.rotations");
    if (s.source_class >= s.n_classes) throw ConfigError("data.source_class must be < data.classes", "data.source_class");
    if (s.target_class >= s.n_classes) throw ConfigError("data.target_class must be < data.classes", "data.target_class");
    if (s.source_class == s.target_class)
        throw ConfigError("data.target_class must differ from data.source_class", "data.target_class");
    if (s.benign_train >= s.benign_samples)
        throw ConfigError("data.benign_train must be < data.benign_samples", "data.benign_train");
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), "data");
    }
    if (cfg.sweep.key.rfind("sweep.", 0) == 0) throw ConfigError("sweep.key cannot name a sweep key", "sweep.key");
    find_entry(cfg.sweep.key);
}

BiLevelProblem build_problem(const ExperimentConfig& cfg)
{
    return make_problem(cfg.problem.name, cfg.problem.dim, cfg.problem.point);
}

AdversaryPolicy build_adversary(const ExperimentConfig& cfg, const BiLevelProblem& problem)
{
    const auto& a = cfg.adversary;
    auto as_vector = [](const std::vector<double>& v) {
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
    };
    const Vector point = a.point ? as_vector(*a.point) : problem.worst_minimizer;
    if (a.policy == "random_noise") return policy::RandomNoise{a.scale};
    if (a.policy == "fixed_decoy") return policy::FixedDecoy{point};
    if (a.policy == "drift_to_decoy") return policy::DriftToDecoy{point, a.rate};
    if (a.policy == "mimic_offset")
        return policy::MimicOffset{a.offset.empty() ? Vector(Vector::Zero(problem.dimension)) : as_vector(a.offset)};
    return policy::None{};
}

Cb2oRunConfig build_run_config(const ExperimentConfig& cfg)
{
    Cb2oRunConfig r = cfg.cb2o;
    r.seed = cfg.seed;
    r.threads = cfg.threads;
    if (cfg.radius_auto) r.consensus.radius = 10.0 * r.init_half_width;
    return r;
}

}  // namespace cb2o::cli
