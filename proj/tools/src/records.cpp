#include <charconv>
#include <cmath>

#include <json.hpp>

#include "hyperver/cli.hpp"

namespace hyperver::cli {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, end);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const std::vector<std::string>& run_record_columns() {
    static const std::vector<std::string> columns = {
        "run",       "model",   "formula", "assignment", "method",  "prior_a",       "prior_b",
        "alpha",     "beta",    "eps",     "max_samples", "timeout_s", "seed",       "verdict",
        "reason",    "samples", "total_samples", "seconds"};
    return columns;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : run_record_columns()) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

namespace {

std::vector<std::string> fields(const RunRecord& r) {
    return {r.run,
            r.model,
            r.formula,
            r.assignment,
            r.method,
            format_number(r.prior_a),
            format_number(r.prior_b),
            format_number(r.alpha),
            format_number(r.beta),
            format_number(r.eps),
            std::to_string(r.max_samples),
            format_number(r.timeout_s),
            std::to_string(r.seed),
            r.verdict,
            r.reason,
            format_number(r.samples),
            format_number(r.total_samples),
            r.seconds ? format_number(*r.seconds) : std::string("NA")};
}

std::string join_csv(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(values[i]);
    }
    return out;
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); }

// counts stay integers in JSON unless they are a mean
nlohmann::ordered_json count_value(double v) {
    if (v >= 0 && v < 9e15 && std::floor(v) == v) return static_cast<std::uint64_t>(v);
    return v;
}

}  // namespace

std::string to_csv_row(const RunRecord& r) { return join_csv(fields(r)); }

std::string to_json(const std::vector<RunRecord>& records) {
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json o;
        o["run"] = r.run;
        o["model"] = r.model;
        o["formula"] = r.formula;
        o["assignment"] = r.assignment;
        o["method"] = r.method;
        o["prior_a"] = r.prior_a;
        o["prior_b"] = r.prior_b;
        o["alpha"] = r.alpha;
        o["beta"] = r.beta;
        o["eps"] = r.eps;
        o["max_samples"] = r.max_samples;
        o["timeout_s"] = r.timeout_s;
        o["seed"] = r.seed;
        o["verdict"] = r.verdict;
        o["reason"] = r.reason;
        o["samples"] = count_value(r.samples);
        o["total_samples"] = count_value(r.total_samples);
        o["seconds"] = r.seconds ? nlohmann::ordered_json(*r.seconds) : nlohmann::ordered_json(nullptr);
        array.push_back(std::move(o));
    }
    return array.dump(2);
}

std::string experiment_header() { return "n,K,alpha,beta,method,prior,mean_samples,mean_time_s,status,undecided_rate"; }

std::string to_csv_row(const ExperimentRow& row) {
    return join_csv({std::to_string(row.n), std::to_string(row.k), format_number(row.alpha), format_number(row.beta),
                     row.method, row.prior, optional_number(row.mean_samples), optional_number(row.mean_time_s),
                     row.status, optional_number(row.undecided_rate)});
}

}  // namespace hyperver::cli
