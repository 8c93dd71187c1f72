#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tikflow/dynamics.hpp"
#include "tikflow/integrate.hpp"

namespace tikflow {

/// Flat `section.key = value` configuration. `#` starts a comment; blank
/// lines are ignored. CLI overrides use the same dotted keys.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    static RunConfig from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::optional<Vec> get_vec(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

    /// Rejects keys outside the known vocabulary.
    void validate_keys() const;

private:
    std::map<std::string, std::string> kv_;
};

Vec parse_reals(const std::string& csv);

ObjectiveProblem problem_from_config(const RunConfig& cfg);
TikhonovSchedule schedule_from_config(const RunConfig& cfg, double default_t_ref);
DynamicsSpec dynamics_from_config(const RunConfig& cfg);
IntegratorConfig integrator_from_config(const RunConfig& cfg, const DynamicsSpec& spec);

}  // namespace tikflow
