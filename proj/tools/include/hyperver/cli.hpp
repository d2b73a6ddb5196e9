#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperver/smc.hpp"

namespace hyperver::cli {

enum ExitCode : int {
    kExitTrue = 0,
    kExitFalse = 1,
    kExitUndecided = 2,
    kExitUsage = 64,
    kExitNoInput = 66,
    kExitInternal = 70,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One verification run, or the trailing summary of a repeated run
/// (run == "mean").
struct RunRecord {
    std::string run;
    std::string model;
    std::string formula;
    std::string assignment;
    std::string method;
    double prior_a = 1.0;
    double prior_b = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double eps = 0.0;
    std::uint64_t max_samples = 0;
    double timeout_s = 0.0;
    std::uint64_t seed = 0;
    std::string verdict;
    std::string reason;
    double samples = 0.0;
    double total_samples = 0.0;
    std::optional<double> seconds;  // omitted with --timing none
};

const std::vector<std::string>& run_record_columns();
std::string csv_header();
std::string to_csv_row(const RunRecord& r);
std::string to_json(const std::vector<RunRecord>& records);

/// CSV field quoting: fields containing ',', '"' or a newline are quoted
/// with embedded quotes doubled.
std::string csv_escape(const std::string& field);
/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

struct ExperimentOptions {
    int table = 2;
    unsigned runs = 50;
    std::uint64_t seed = 0;
    double timeout_s = 1800.0;
    std::uint64_t max_samples = 1'000'000;
    std::vector<unsigned> sizes = {4, 6, 8, 10};
    bool timing = true;
    unsigned threads = 0;
};

struct ExperimentRow {
    unsigned n = 0;
    unsigned k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::string method;
    std::string prior;
    std::optional<double> mean_samples;
    std::optional<double> mean_time_s;
    std::string status;
    std::optional<double> undecided_rate;
};

std::vector<ExperimentRow> run_experiment(const ExperimentOptions& options);
std::string experiment_header();
std::string to_csv_row(const ExperimentRow& row);

}  // namespace hyperver::cli
