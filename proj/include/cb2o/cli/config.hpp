#pragma once

#include "cb2o/adversary.hpp"
#include "cb2o/fed/federation.hpp"
#include "cb2o/oracles.hpp"
#include "cb2o/problems.hpp"
#include "cb2o/run.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cb2o::cli {

/// Bad configuration text or values. Carries the offending key when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {}, std::size_t line = 0)
        : std::runtime_error(message), key_(std::move(key)), line_(line)
    {
    }
    const std::string& key() const { return key_; }
    std::size_t line() const { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

enum class Mode { cb2o, fed, sweep, oracle };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct ExperimentConfig {
    Mode mode = Mode::cb2o;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = "out";

    struct Problem {
        std::string name = "ring";
        Index dim = 2;
        std::vector<double> point;  // empty: the problem's default target
    } problem;

    // Particle system. `radius_auto` means 10x the init box half width.
    Cb2oRunConfig cb2o;
    bool radius_auto = true;

    struct Adversary {
        std::string policy = "none";
        double scale = 1.0;
        std::optional<std::vector<double>> point;  // empty: the problem's worst minimizer
        double rate = 1.0;
        std::vector<double> offset;                // empty: zero
    } adversary;

    fed::FedConfig fed;
    fed::SyntheticDatasetSpec data;

    struct Sweep {
        std::string key = "consensus.alpha";
        std::vector<std::string> values{"1", "10", "100"};
        Mode base_mode = Mode::cb2o;
    } sweep;

    oracle::SuiteConfig oracle;
};

/// Parses `key = value` lines; `#` starts a comment. Unset keys keep their
/// defaults. Throws ConfigError naming the line or key at fault.
ExperimentConfig parse_config(const std::string& text);

/// Every key in registry order, one `key = value` line each.
std::string serialize_config(const ExperimentConfig& cfg);

/// Applies one `key=value` override. Call validate() once all are applied.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_value(const ExperimentConfig& cfg, const std::string& key);

struct KeyInfo {
    std::string key;
    std::string default_value;
    std::string doc;
};
std::vector<KeyInfo> config_keys();

/// Cross-field checks; range checks on single keys happen when they are set.
void validate(const ExperimentConfig& cfg);

// Translation into simulator inputs.
BiLevelProblem build_problem(const ExperimentConfig& cfg);
AdversaryPolicy build_adversary(const ExperimentConfig& cfg, const BiLevelProblem& problem);
Cb2oRunConfig build_run_config(const ExperimentConfig& cfg);

}  // namespace cb2o::cli
