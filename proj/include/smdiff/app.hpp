#pragma once

#include "smdiff/config.hpp"
#include "smdiff/errors.hpp"

#include <exception>
#include <filesystem>
#include <string>

namespace smd {

struct RunOptions {
    std::filesystem::path out = ".";
    int threads = 1;
    bool force_strict = false;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitSolver = 4,
    kExitNotConverged = 5,
};

/// Failure raised after partial artifacts were written; `details` is a JSON object.
class RunFailure : public Error {
public:
    RunFailure(const std::string& what, int code, std::string details)
        : Error(what), code_(code), details_(std::move(details)) {}
    int code() const noexcept { return code_; }
    const std::string& details() const noexcept { return details_; }

private:
    int code_;
    std::string details_;
};

/// Runs one experiment and writes its artifacts (results.csv, report.json, and
/// slopes.json / *.vtk where applicable) into options.out. Returns the exit code;
/// failures are thrown and mapped with `exit_code_for`.
int run_experiment(const RunConfig& config, const RunOptions& options);

int exit_code_for(const std::exception& e);
/// Machine-readable description of a failure: {"error": {"type", "message", ...}}.
std::string error_json(const std::exception& e);

}  // namespace smd
