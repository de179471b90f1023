#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace curvlab {

//! One experiment invocation; params hold the raw flag values by name.
struct ExperimentConfig
{
    std::string command;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string format = "json";
    std::string poly;  //!< optional polynomial JSON path
};

//! Subcommand names in help order.
std::vector<std::string> const& command_names();

//! Flag names and defaults accepted by a subcommand.
std::vector<std::pair<std::string, std::string>> const&
command_flags(std::string const& command);

//! Empty iff the configuration is valid; messages name the offending flag.
std::vector<std::string> validate(ExperimentConfig const& cfg);

struct RunResult
{
    nlohmann::json record;
    std::optional<std::string> csv;  //!< table for tabular commands
    int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/*!
 * Validate, dispatch, and build the result record. Validation failures and
 * numerical aborts are reported through exit_code and record["error"].
 */
RunResult run(ExperimentConfig const& cfg);

//! Full command-line entry point (parse, run, write output).
int cli_main(int argc, char** argv);

}  // namespace curvlab
