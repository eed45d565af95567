#include "circtrace/acceptance.hpp"
#include "circtrace/scenario.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Outcome {
    std::optional<ct::ScenarioReport> report;
    std::string error;
};

int run_files(const std::vector<std::string>& files, const ct::RunOptions& opt, bool quiet) {
    std::vector<Outcome> out(files.size());
    // scenarios are independent; reports are written afterwards in input order
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < files.size(); ++i) {
        try {
            out[i].report = ct::run_scenario_file(files[i], opt);
        } catch (const ct::InputError& e) {
            out[i].error = e.what();
        } catch (const std::exception& e) {
            out[i].error = std::string("error: ") + e.what();
        }
    }
    int status = 0;
    for (size_t i = 0; i < files.size(); ++i) {
        if (!out[i].report) {
            std::cerr << files[i] << ": " << out[i].error << '\n';
            status = 1;
            continue;
        }
        const auto& r = *out[i].report;
        if (!opt.out_dir.empty())
            ct::write_report(r, opt.out_dir, std::filesystem::path(files[i]).stem().string());
        if (!quiet) std::cout << r.summary.dump(2) << '\n';
        std::cerr << files[i] << ": " << (r.pass ? "pass" : "FAIL") << '\n';
        if (!r.pass && status == 0) status = 2;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regularized traces and Chern-Weil forms on the circle"};
    app.require_subcommand(1);
    ct::RunOptions ropt;
    ct::AcceptanceOptions aopt;

    auto* run = app.add_subcommand("run", "run scenario files");
    std::vector<std::string> files;
    bool quiet = false;
    run->add_option("files", files, "scenario JSON files")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", ropt.seed, "seed recorded in the report");
    run->add_option("--out", ropt.out_dir, "directory for <name>.json / <name>.csv reports");
    run->add_option("--tolerance-scale", ropt.tolerance_scale, "multiply every tolerance")->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "do not print the summary");

    auto* self = app.add_subcommand("selftest", "run the acceptance criteria");
    bool list = false;
    self->add_option("--seed", aopt.seed);
    self->add_option("--tolerance-scale", aopt.tolerance_scale)->check(CLI::PositiveNumber);
    self->add_flag("--list", list, "list the criteria without running them");

    auto* ops = app.add_subcommand("builtins", "list built-in operator and weight ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*run) return run_files(files, ropt, quiet);
    if (*ops) {
        for (auto& id : ct::builtin_operator_ids()) std::cout << "operator " << id << '\n';
        for (const char* w : {"abs_D", "laplacian", "bracket"}) std::cout << "weight " << w << '\n';
        return 0;
    }
    if (list) {
        for (int i = 1; i <= ct::kCriteria; ++i) std::cout << i << ' ' << ct::criterion_title(i) << '\n';
        return 0;
    }
    int failed = 0;
    std::cout << "seed " << aopt.seed << ", tolerance scale " << aopt.tolerance_scale << '\n';
    for (int i = 1; i <= ct::kCriteria; ++i) {
        auto r = ct::run_criterion(i, aopt);
        std::cout << ct::format_result(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << ct::kCriteria - failed << "/" << ct::kCriteria << " criteria pass\n";
    return failed ? 2 : 0;
}
