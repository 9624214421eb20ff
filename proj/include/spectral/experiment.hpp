#pragma once

#include <cstdint>
#include <stdexcept>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spectral {

class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Declarative experiment description: flat key=value text with [section]
/// headers.  Keys are addressed as "section.key".
class ExperimentConfig {
public:
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_string(const std::string& text, const std::string& name);

    const std::string& raw() const { return raw_; }
    const std::string& name() const { return name_; }
    std::string experiment() const { return get("experiment.type", ""); }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& def) const;
    double get_num(const std::string& key, double def) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    std::vector<double> get_list(const std::string& key) const;

    /// All violated preconditions, without running; empty means runnable.
    std::vector<std::string> validate() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::string name_;
    std::string raw_;
    std::map<std::string, std::string> kv_;
};

struct RunOptions {
    std::string out_dir;                       // default out-<experiment>
    std::optional<std::uint64_t> seed_override;
    bool plots = false;
};

/// Execute the experiment, writing CSVs, run.meta and (optionally) SVG plots
/// into the output directory.  Throws config_error for invalid configs and
/// propagates numerical errors.
void run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

extern const char* kToolVersion;

} // namespace spectral
