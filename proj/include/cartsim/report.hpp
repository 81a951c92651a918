#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cartsim/scenario.hpp"
#include "cartsim/serialize.hpp"

namespace cartsim {

inline constexpr std::string_view kVersionStamp = "cartsim 0.1.0";

/// Command flags after argument parsing; unset optionals fall back to the
/// scenario's own values.
struct CommandOptions {
    std::string name;
    std::string op;
    std::optional<std::vector<std::string>> set;
    std::size_t agent = 1;
    std::optional<double> theta;
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> steps;
    std::optional<std::string> action;
    std::optional<std::string> env;
    std::optional<std::filesystem::path> audit_log;
};

/// Raised for flag combinations a command cannot accept; the CLI maps it to
/// exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Report {
    std::string command;
    std::vector<std::string> argv;
    std::vector<std::uint64_t> seeds;
    Json result;
};

Report frame_command(const Scenario& sc, const CommandOptions& opts);
Report object_command(const Scenario& sc, const CommandOptions& opts);
Report sim_command(const Scenario& sc, const CommandOptions& opts);
Report duel_command(const Scenario& sc, const CommandOptions& opts);
Report pse_command(const Scenario& sc, const CommandOptions& opts);

/// Dispatches on "frame", "object", "sim", "duel" or "pse".
Report run_command(const Scenario& sc, std::string_view command, const CommandOptions& opts);

Json to_json(const Report& report);
std::string render_human(const Report& report);

/// Splits "a,b,c"; the empty string is the empty list.
std::vector<std::string> split_list(std::string_view text);

}  // namespace cartsim
