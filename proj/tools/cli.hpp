#pragma once

// Command-line front end. Kept in a library so tests can drive it in-process.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace lvmotion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Everything that determines a run's output. Embedded in every JSON report;
/// `jobs` is deliberately absent because it never changes results.
struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    int points = 20;
    int folds = 5;
    std::uint64_t seed = 42;
    std::string classifier = "lr";
    std::string ensemble_mode = "weighted";
    std::string norm = "max";
    std::string partition = "tracked";
    double beta = 1.0;
    bool mirror_segments = false;
    bool renorm = false;
};

nlohmann::ordered_json to_json(const RunConfig& c);

/// `args` excludes the program name. Returns 0 on success, 1 on a data or
/// processing error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace lvmotion::cli
