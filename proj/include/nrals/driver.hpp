#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nrals/formula.hpp"
#include "nrals/search.hpp"

namespace nrals {

struct RunConfig {
    SearchParams params;
    bool verify = true;
    std::string trace_path; // empty: no trace
};

struct RunRecord {
    std::string instance;
    std::string answer = "unknown"; // sat | unknown | error
    double time_s = 0.0;
    std::uint64_t steps = 0;
    long minor_restarts = 0;
    long major_restarts = 0;
    long relaxations = 0;
    bool verified = false;
};

// Exit codes of the `solve` subcommand.
inline constexpr int kExitSat = 0;
inline constexpr int kExitUnknown = 1;
inline constexpr int kExitInputError = 2;

// Stable per-instance seed derivation (FNV-1a over the name, mixed with
// the base seed); std::hash is avoided for cross-platform determinism.
inline std::uint64_t instance_seed(const std::string& name, std::uint64_t base) {
    std::uint64_t h = 14695981039346656037ULL ^ base;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

// Parses, preprocesses, solves and verifies one instance. `out` receives
// the "sat"/"unknown" line and the model; diagnostics go to `err`.
inline std::pair<RunRecord, int> run_file(const std::string& path, const RunConfig& config,
                                          std::ostream& out, std::ostream& err) {
    RunRecord rec;
    rec.instance = std::filesystem::path(path).filename().string();
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Instance inst;
    try {
        inst = parse_smt2(detail::read_file(path));
        preprocess(inst);
    } catch (const std::exception& e) {
        rec.answer = "error";
        rec.time_s = elapsed();
        err << "error: " << e.what() << "\n";
        return {rec, kExitInputError};
    }

    if (inst.contradiction) {
        // Preprocessing refuted the input; local search cannot certify
        // unsatisfiability, so the reported answer stays "unknown".
        rec.answer = "unknown";
        rec.time_s = elapsed();
        out << "unknown\n";
        return {rec, kExitUnknown};
    }

    std::ofstream trace_file;
    std::ostream* trace = nullptr;
    if (!config.trace_path.empty()) {
        trace_file.open(config.trace_path, std::ios::binary | std::ios::trunc);
        if (!trace_file) {
            err << "error: cannot open trace file: " << config.trace_path << "\n";
            rec.answer = "error";
            return {rec, kExitInputError};
        }
        trace = &trace_file;
    }

    SearchResult r = solve(inst.clauses, inst.num_reals(), inst.num_bools(), config.params,
                           trace);
    rec.steps = r.stats.steps;
    rec.minor_restarts = r.stats.minor_restarts;
    rec.major_restarts = r.stats.major_restarts;
    rec.relaxations = r.stats.relaxations;

    if (r.answer == Answer::Sat) {
        Assignment model = r.model;
        extend_model(inst, model);
        bool ok = true;
        if (config.verify) {
            ok = verify_model(inst.original, model) && ast_eval(inst.ast, model);
            rec.verified = ok;
        }
        if (ok) {
            rec.answer = "sat";
            rec.time_s = elapsed();
            out << "sat\n" << print_model(inst, model);
            return {rec, kExitSat};
        }
        err << "internal error: model failed verification\n";
    }
    rec.answer = "unknown";
    rec.time_s = elapsed();
    out << "unknown\n";
    return {rec, kExitUnknown};
}

inline std::string csv_header() {
    return "instance,answer,time_s,steps,minor_restarts,major_restarts,relaxations,"
           "verified";
}

inline std::string csv_row(const RunRecord& r) {
    std::ostringstream ss;
    ss.precision(17); // doubles must survive the parse-back round trip
    ss << r.instance << "," << r.answer << "," << r.time_s << "," << r.steps << ","
       << r.minor_restarts << "," << r.major_restarts << "," << r.relaxations << ","
       << (r.verified ? "true" : "false");
    return ss.str();
}

inline std::optional<RunRecord> csv_parse_row(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            f.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(cur);
    if (f.size() != 8) return std::nullopt;
    RunRecord r;
    r.instance = f[0];
    r.answer = f[1];
    try {
        r.time_s = std::stod(f[2]);
        r.steps = std::stoull(f[3]);
        r.minor_restarts = std::stol(f[4]);
        r.major_restarts = std::stol(f[5]);
        r.relaxations = std::stol(f[6]);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    r.verified = f[7] == "true";
    return r;
}

// Runs every .smt2 file in the directory (sorted by name) and streams CSV
// rows plus a final summary row. Per-instance failures never abort the
// suite.
inline std::vector<RunRecord> run_suite(const std::string& dir, const RunConfig& config,
                                        std::ostream& csv, std::ostream& err) {
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".smt2")
            files.push_back(e.path().string());
    std::sort(files.begin(), files.end());

    csv << csv_header() << "\n";
    std::vector<RunRecord> records;
    RunRecord total;
    total.instance = "TOTAL";
    int solved = 0;
    for (const std::string& f : files) {
        RunConfig per = config;
        per.params.seed =
            instance_seed(std::filesystem::path(f).filename().string(), config.params.seed);
        std::ostringstream sink;
        RunRecord rec;
        try {
            rec = run_file(f, per, sink, err).first;
        } catch (const std::exception& e) {
            rec.instance = std::filesystem::path(f).filename().string();
            rec.answer = "error";
            err << "error: " << f << ": " << e.what() << "\n";
        }
        csv << csv_row(rec) << "\n";
        if (rec.answer == "sat") ++solved;
        total.time_s += rec.time_s;
        total.steps += rec.steps;
        total.minor_restarts += rec.minor_restarts;
        total.major_restarts += rec.major_restarts;
        total.relaxations += rec.relaxations;
        records.push_back(std::move(rec));
    }
    total.answer = std::to_string(solved) + "/" + std::to_string(files.size()) + " sat";
    total.verified = solved > 0;
    csv << csv_row(total) << "\n";
    return records;
}

} // namespace nrals
