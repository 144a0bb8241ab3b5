#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "coniwave/runner.hpp"

using namespace coniwave;

namespace {

int dispatch(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}

ExperimentConfig load(const std::string& config_path, const std::string& out_dir,
                      int threads) {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    return cfg;
}

void print_report(const RunReport& rep) {
    for (const EpsResult& r : rep.eps) {
        std::printf("eps=%-8g L2(T)=%-12.5g Sigma1(T)=%-12.5g m+=%-10.5g m-=%-10.5g "
                    "c+=%-10.5g c-=%-10.5g box=%g%s\n",
                    r.epsilon, r.err_l2_T, r.err_sigma1_T, r.mass_plus_ref,
                    r.mass_minus_ref, r.c_plus, r.c_minus, r.box_L,
                    r.resolution_ok ? "" : " [coarse]");
    }
    if (rep.eps.size() > 1)
        std::printf("fitted slope %.3f, monotone decay: %s\n", rep.fitted_slope,
                    rep.monotone ? "yes" : "no");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical wave packets through conical intersections"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    bool eigenframe = false;
    std::string eta2_grid;

    auto add_common = [&](CLI::App* sub, bool need_config = true) {
        auto* opt = sub->add_option("--config", config_path, "experiment config file");
        if (need_config) opt->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "parallel epsilon runs");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run the configured pipeline once");
    add_common(sim);
    CLI::App* swp = app.add_subcommand("sweep", "epsilon-convergence study");
    add_common(swp);
    CLI::App* cls = app.add_subcommand("classical", "dump trajectory and action CSV");
    add_common(cls);
    cls->add_flag("--eigenframe", eigenframe, "also dump the transported eigenvector");
    CLI::App* lzs = app.add_subcommand("lz-scatter", "Landau-Zener coefficient table");
    add_common(lzs, false);
    lzs->add_option("--eta2-grid", eta2_grid, "grid as min:max:step");
    CLI::App* pft = app.add_subcommand("profile-test", "singular profile diagnostics");
    add_common(pft);

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return dispatch([&] { print_report(run(load(config_path, out_dir, threads))); });
    if (swp->parsed())
        return dispatch([&] { print_report(sweep(load(config_path, out_dir, threads))); });
    if (cls->parsed())
        return dispatch(
            [&] { classical_dump(load(config_path, out_dir, threads), eigenframe); });
    if (pft->parsed())
        return dispatch([&] { profile_diagnostics(load(config_path, out_dir, threads)); });
    if (lzs->parsed())
        return dispatch([&] {
            ExperimentConfig cfg;
            if (!config_path.empty()) cfg = parse_config_file(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (!eta2_grid.empty()) {
                double lo, hi, st;
                if (std::sscanf(eta2_grid.c_str(), "%lf:%lf:%lf", &lo, &hi, &st) != 3 ||
                    st <= 0)
                    throw ConfigError("--eta2-grid: expected min:max:step");
                cfg.lz.eta2_min = lo;
                cfg.lz.eta2_max = hi;
                cfg.lz.eta2_step = st;
            }
            lz_table(cfg);
        });
    return 2;
}
