#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcstf/config.hpp"
#include "lcstf/harness.hpp"

namespace lcstf::cli {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : "n/a"; }

ExperimentConfig config_from(const std::string& path) {
    return path.empty() ? ExperimentConfig{} : load_config(path);
}

void print_summary(std::ostream& out, const EvalSummary& s) {
    out << "agent_fraction=" << format_number(s.agent_fraction) << " mean_speed_mps=" << format_number(s.mean_speed)
        << " collision_rate_per_1k_lc=" << opt(s.collision_rate_per_1k_lc)
        << " mean_comfort=" << opt(s.mean_comfort) << " episodes=" << s.episodes
        << " collisions=" << s.collisions << '\n';
}

int gradcheck(std::ostream& out) {
    bool ok = true;
    for (const GradCheckCase& c : standard_gradcheck()) {
        std::string sizes;
        for (int n : c.layer_sizes) sizes += (sizes.empty() ? "" : ",") + std::to_string(n);
        char line[256];
        std::snprintf(line, sizeof(line), "%-4s %-22s (%s) max_rel_err=%.3e %s %.0e compared=%zu/%zu kinks=%zu\n",
                      c.passed() ? "PASS" : "FAIL", c.name.c_str(), sizes.c_str(), c.result.max_relative_error,
                      c.expect_detection ? ">" : "<", c.threshold, c.result.compared, c.result.total, c.result.kinks);
        out << line;
        ok = ok && c.passed();
    }
    return ok ? kOk : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-agent DQN lane changing on a simulated highway", "lcstf"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string checkpoint;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
    int eval_episodes = 10;
    int sweep_episodes = 20;
    std::vector<double> fractions;

    CLI::App* train = app.add_subcommand("train", "train a shared Q-network");
    train->add_option("--config", config_path, "experiment config file")->required();
    train->add_option("--out", out_dir, "output directory")->required();
    train->add_option("--seed", seed, "override sim.seed");
    train->add_option("--episodes", episodes, "override trainer.episodes")->check(CLI::NonNegativeNumber);

    CLI::App* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
    eval->add_option("--config", config_path, "experiment config file")->required();
    eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    eval->add_option("--episodes", eval_episodes, "evaluation episodes")->check(CLI::NonNegativeNumber);
    eval->add_option("--out", out_dir, "output directory")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate a checkpoint over agent fractions");
    sweep->add_option("--config", config_path, "experiment config file")->required();
    sweep->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    sweep->add_option("--fractions", fractions, "comma separated agent fractions")->delimiter(',')->required();
    sweep->add_option("--episodes", sweep_episodes, "evaluation episodes per fraction")->check(CLI::NonNegativeNumber);
    sweep->add_option("--out", out_dir, "output directory")->required();

    CLI::App* print = app.add_subcommand("print-config", "print every config key with its value");
    print->add_option("--config", config_path, "show this file's values instead of the defaults");

    app.add_subcommand("gradcheck", "finite-difference check of backpropagation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "lcstf: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*train) {
            ExperimentConfig c = load_config(config_path);
            if (seed) c.sim.seed = *seed;
            if (episodes) c.trainer.episodes = *episodes;
            try {
                c.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("invalid configuration: ") + e.what());
            }
            const auto start = std::chrono::steady_clock::now();
            const TrainingResult r = run_training(c, out_dir);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            out << "trained " << r.episodes.size() << " episodes, " << r.gradient_updates
                << " gradient updates, epsilon=" << format_number(r.final_epsilon) << ", "
                << format_number(std::round(elapsed.count() * 10) / 10) << " s -> " << out_dir << '\n';
        } else if (*eval) {
            const ExperimentConfig c = load_config(config_path);
            print_summary(out, run_eval(c, std::filesystem::path(checkpoint), eval_episodes, out_dir));
        } else if (*sweep) {
            const ExperimentConfig c = load_config(config_path);
            const int obs = observation_size(c.sim.road.lane_count);
            const DenseNet net = load_checkpoint(checkpoint, c.trainer.layer_sizes(obs));
            for (const EvalSummary& s : run_density_sweep(c, net, fractions, sweep_episodes, out_dir)) {
                print_summary(out, s);
            }
        } else if (*print) {
            out << serialize_config(config_from(config_path));
        } else {
            return gradcheck(out);
        }
    } catch (const ConfigError& e) {
        err << "lcstf: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IoError& e) {
        err << "lcstf: io error: " << e.what() << '\n';
        return kIo;
    } catch (const CheckpointError& e) {
        err << "lcstf: checkpoint error: " << e.what() << '\n';
        return kCheckpoint;
    } catch (const std::invalid_argument& e) {
        err << "lcstf: invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "lcstf: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace lcstf::cli
