// Command-line front end: `solve <file>` for a single instance,
// `bench <dir> --csv out.csv` for a directory of instances.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nrals/driver.hpp"

namespace {

void usage(std::ostream& os) {
    os << "usage:\n"
          "  nrals solve <file> [options]\n"
          "  nrals bench <dir> --csv <out.csv> [options]\n"
          "options:\n"
          "  --timeout <s>      wall-clock limit in seconds\n"
          "  --max-steps <n>    step limit\n"
          "  --seed <k>         random seed (default 0)\n"
          "  --sp <r>           smoothing probability (rational, default 3/500)\n"
          "  --t1 <n>           steps without improvement before minor restart\n"
          "  --t2 <n>           minor restarts before major restart\n"
          "  --eps-v <r>        value-complexity threshold (rational)\n"
          "  --eps-p <r>        relaxation amount (rational)\n"
          "  --no-incremental   recompute all scores from scratch each step\n"
          "  --no-relax         reject complex values instead of relaxing\n"
          "  --full-order       rank moves by value complexity first\n"
          "  --no-verify        skip model verification\n"
          "  --trace <path>     write the move trace to a file\n";
}

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Args {
public:
    Args(int argc, char** argv) : argv_(argv), argc_(argc) {}
    bool done() const { return i_ >= argc_; }
    std::string next(const std::string& what) {
        if (done()) throw CliError("missing " + what);
        return argv_[i_++];
    }

private:
    char** argv_;
    int argc_;
    int i_ = 1;
};

long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CliError("invalid value for " + what + ": " + s);
    }
}

nrals::Rational parse_rat(const std::string& s, const std::string& what) {
    try {
        return nrals::parse_rational(s);
    } catch (const std::exception&) {
        throw CliError("invalid value for " + what + ": " + s);
    }
}

} // namespace

int main(int argc, char** argv) {
    using namespace nrals;
    Args args(argc, argv);
    std::string cmd, target, csv_path;
    RunConfig config;
    try {
        cmd = args.next("command");
        if (cmd == "-h" || cmd == "--help") {
            usage(std::cout);
            return 0;
        }
        if (cmd != "solve" && cmd != "bench") throw CliError("unknown command: " + cmd);
        target = args.next(cmd == "solve" ? "input file" : "input directory");
        while (!args.done()) {
            std::string opt = args.next("option");
            if (opt == "--timeout")
                config.params.time_limit_s =
                    static_cast<double>(parse_rat(args.next(opt), opt).get_d());
            else if (opt == "--max-steps")
                config.params.max_steps =
                    static_cast<std::uint64_t>(parse_long(args.next(opt), opt));
            else if (opt == "--seed")
                config.params.seed = static_cast<std::uint64_t>(parse_long(args.next(opt), opt));
            else if (opt == "--sp")
                config.params.sp = parse_rat(args.next(opt), opt);
            else if (opt == "--t1")
                config.params.T1 = static_cast<int>(parse_long(args.next(opt), opt));
            else if (opt == "--t2")
                config.params.T2 = static_cast<int>(parse_long(args.next(opt), opt));
            else if (opt == "--eps-v")
                config.params.eps_v = parse_rat(args.next(opt), opt);
            else if (opt == "--eps-p")
                config.params.eps_p = parse_rat(args.next(opt), opt);
            else if (opt == "--no-incremental")
                config.params.incremental = false;
            else if (opt == "--no-relax")
                config.params.relax_mode = RelaxMode::Threshold;
            else if (opt == "--full-order")
                config.params.relax_mode = RelaxMode::FullOrder;
            else if (opt == "--no-verify")
                config.verify = false;
            else if (opt == "--trace")
                config.trace_path = args.next(opt);
            else if (opt == "--csv")
                csv_path = args.next(opt);
            else
                throw CliError("unknown option: " + opt);
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        usage(std::cerr);
        return kExitInputError;
    }

    if (cmd == "solve") {
        auto [rec, code] = run_file(target, config, std::cout, std::cerr);
        return code;
    }

    // bench
    if (csv_path.empty()) {
        std::cerr << "error: bench requires --csv <out.csv>\n";
        return kExitInputError;
    }
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) {
        std::cerr << "error: cannot open CSV output: " << csv_path << "\n";
        return kExitInputError;
    }
    try {
        std::vector<RunRecord> recs = run_suite(target, config, csv, std::cerr);
        int solved = 0;
        for (const RunRecord& r : recs)
            if (r.answer == "sat") ++solved;
        std::cout << "solved " << solved << "/" << recs.size() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return 0;
}
