#ifndef DUNKL_RUNNER_HPP
#define DUNKL_RUNNER_HPP

#include "core/cubature.hpp"
#include "core/weight.hpp"

#include <cstdint>
#include <string>

namespace dunkl {

// Command outcome classes, mirrored by the C API status codes and the CLI
// exit codes.
enum class RunStatus : int {
    ok = 0,
    invalid_config = 1,
    assertion_failed = 2,
    infeasible = 3,
    capability = 4,
    internal_error = 5,
};

struct RunResult {
    RunStatus status = RunStatus::ok;
    std::string json;    // result document (empty on invalid config)
    std::string csv;     // optional trace
    std::string message; // human-readable error context
};

// Executes one CLI-level command ("nodes", "cubature", "mz", "kernel",
// "lemma31", "ball-entropy", "sobolev-upper", "sobolev-lower", "rate")
// against a JSON config document. `seed_override` replaces the config seed
// when `has_seed_override` is set. Deterministic for fixed inputs.
RunResult run_command(const std::string& command, const std::string& config_json,
                      std::uint64_t seed_override, bool has_seed_override, bool want_csv);

// Serialization of cubature rules (schema_version 1).
std::string rule_to_json(const CubatureRule& rule, const DunklWeight& w);
CubatureRule rule_from_json(const std::string& text);

// Weight construction from config fields ("kappa" inline Z_2^d list or
// "root_system" text / "root_system_file" path).
DunklWeight weight_from_config_json(const std::string& config_json);

} // namespace dunkl

#endif
