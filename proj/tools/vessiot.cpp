#include "vessiot/linalg.hpp"
#include "vessiot/problem.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

std::vector<std::string> expand(const std::vector<std::string>& args) {
    std::vector<std::string> files;
    for (const auto& a : args) {
        if (fs::is_directory(a)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(a))
                if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(a);
        }
    }
    return files;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact jet calculus checks for Lie pseudogroups"};
    app.require_subcommand(1);

    auto* check = app.add_subcommand("check", "Run the checks of problem files or directories of them");
    std::vector<std::string> inputs;
    std::string only = "*";
    std::string format = "text";
    std::uint64_t seed = 0;
    int max_order = 0;
    bool timing = false;
    check->add_option("file", inputs, "Problem files or directories (default: $VESSIOT_CORPUS)");
    check->add_option("--only", only, "Run only checks whose id matches this glob");
    check->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
    check->add_option("--seed", seed, "Seed for random-point rank computations");
    check->add_option("--max-order", max_order, "Refuse checks whose contexts exceed this jet order")
        ->check(CLI::NonNegativeNumber);
    check->add_flag("--timing", timing, "Include timings in the JSON report");

    auto* ops = app.add_subcommand("ops", "List the check operations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (ops->parsed()) {
        for (const auto& n : vessiot::op_names()) std::cout << n << "\n";
        return 0;
    }

    if (inputs.empty()) {
        const char* corpus = std::getenv("VESSIOT_CORPUS");
        if (!corpus || !*corpus) {
            std::cerr << "error: no problem files given and VESSIOT_CORPUS is not set\n";
            return 2;
        }
        inputs.push_back(corpus);
    }
    vessiot::set_global_seed(seed);

    std::vector<vessiot::FileReport> reports;
    bool parse_error = false;
    for (const auto& path : expand(inputs)) {
        try {
            auto file = vessiot::load_problem(path);
            reports.push_back(vessiot::run(file, {only, max_order}));
        } catch (const vessiot::ProblemError& e) {
            std::cerr << e.describe(path) << "\n";
            parse_error = true;
        }
    }

    if (format == "json")
        std::cout << vessiot::report_json(reports, timing).dump(2) << "\n";
    else
        std::cout << vessiot::report_text(reports);

    if (parse_error) return 2;
    for (const auto& r : reports)
        if (!r.all_matched()) return 1;
    return 0;
}
