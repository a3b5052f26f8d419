#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delayev/commands.hpp"
#include "delayev/solver.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int seed = -1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides outputs.dir)");
    sub->add_option("--seed", args.seed, "seed override for randomized diagnostics");
}

delayev::RunConfig load(const CommonArgs& args) {
    delayev::RunConfig cfg = delayev::load_config(args.config_path);
    if (args.seed >= 0)
        cfg.seed = static_cast<unsigned>(args.seed);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delayev: mild-solution solver and decay certificates for "
                 "evolution equations with time-varying delay feedbacks"};
    app.require_subcommand(1);

    CommonArgs check_args, sim_args, decay_args, sweep_args, info_args;
    std::string sweep_param;
    std::vector<double> sweep_values;
    int sweep_workers = 1;

    add_common(app.add_subcommand("check", "evaluate the smallness certificate"),
               check_args);
    add_common(app.add_subcommand("simulate", "integrate the mild solution"),
               sim_args);
    add_common(app.add_subcommand("certify-decay",
                                  "certificate + simulation + envelope check"),
               decay_args);
    CLI::App* sweep =
        app.add_subcommand("sweep", "map certificate and decay rate over a parameter");
    add_common(sweep, sweep_args);
    sweep->add_option("--param", sweep_param, "dot path of a numeric config field")
        ->required();
    sweep->add_option("--values", sweep_values, "values to sweep")
        ->required()
        ->delimiter(',');
    sweep->add_option("--workers", sweep_workers, "parallel row workers");
    add_common(app.add_subcommand("model-info", "emit the model summary"), info_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("check"))
            return delayev::cmd_check(load(check_args), check_args.out_dir);
        if (app.got_subcommand("simulate"))
            return delayev::cmd_simulate(load(sim_args), sim_args.out_dir);
        if (app.got_subcommand("certify-decay"))
            return delayev::cmd_certify_decay(load(decay_args), decay_args.out_dir);
        if (app.got_subcommand("sweep"))
            return delayev::cmd_sweep(load(sweep_args), sweep_param, sweep_values,
                                      sweep_workers, sweep_args.out_dir);
        if (app.got_subcommand("model-info"))
            return delayev::cmd_model_info(load(info_args), info_args.out_dir);
    } catch (const delayev::PicardNonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const delayev::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
