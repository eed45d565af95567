#include "circtrace/acceptance.hpp"

#include <CLI11.hpp>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    ct::AcceptanceOptions opt;
    app.add_option("--seed", opt.seed);
    app.add_option("--tolerance-scale", opt.tolerance_scale);
    CLI11_PARSE(app, argc, argv);
    int failed = 0;
    for (int i = 1; i <= ct::kCriteria; ++i) {
        auto r = ct::run_criterion(i, opt);
        std::cout << ct::format_result(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << (failed ? "FAILED " : "ALL PASS ") << ct::kCriteria - failed << "/" << ct::kCriteria << std::endl;
    return failed ? 1 : 0;
}
