#include "wta/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "wta/output.hpp"

namespace wta {

namespace {

struct Parser {
    CLI::App app{"Weapon-target assignment engagement simulator"};
    CLI::App* run = nullptr;
    CLI::App* replay = nullptr;
    RunConfig cfg;
    std::string assigner = "hungarian";
    std::string backend;
    std::string model;
    std::string coverage;
    std::string threat_sense;
    std::string scenario;
    std::string out_dir = "out";
    std::string replay_log;
    double epoch_dt = 0.0;
    double switch_penalty = 0.0;

    Parser() {
        app.require_subcommand(1);
        run = app.add_subcommand("run", "Run one engagement and write trajectories, metrics and plots");
        run->add_option("--scenario", scenario, "Scenario file")->required();
        run->add_option("--assigner", assigner, "Assignment policy")
            ->check(CLI::IsMember({"hungarian", "milp", "auction", "llm"}));
        run->add_option("--backend", backend, "Chat-completion endpoint URL or mock://<mode>");
        run->add_option("--model", model, "Model name for the chat-completion backend");
        run->add_option("--seed", cfg.seed, "Random seed");
        run->add_option("--epoch-dt", epoch_dt, "Seconds between decision epochs")->check(CLI::PositiveNumber);
        run->add_option("--out", out_dir, "Output directory");
        run->add_flag("--emit-plots", cfg.emit_plots, "Write SVG snapshots");
        run->add_option("--switch-penalty", switch_penalty, "Cost added to reassignments")
            ->check(CLI::NonNegativeNumber);
        run->add_option("--coverage", coverage, "Require every target covered")->check(CLI::IsMember({"on", "off"}));
        run->add_option("--threat-sense", threat_sense, "Sign of threat terms in the surrogate cost")
            ->check(CLI::IsMember({"literal", "inverted"}));

        replay = app.add_subcommand("replay", "Re-parse logged chat responses offline");
        replay->add_option("--log", replay_log, "Replay log file")->required();
    }
};

void print_summary(const MissionLog& log, std::ostream& out) {
    const auto& m = log.metrics;
    out << "targets_intercepted " << m.targets_intercepted << "\n"
        << "assets_breached " << m.assets_breached << "\n"
        << "targets_surviving " << m.targets_surviving << "\n"
        << "mean_intercept_time " << m.mean_intercept_time << " s\n"
        << "total_switches " << m.total_switches << "\n"
        << "fallback_count " << m.fallback_count << "\n"
        << "epochs " << m.epochs << "\n"
        << "end_time " << m.end_time << " s\n";
}

int run_command(const RunConfig& cfg, std::ostream& out) {
    const Scenario scenario = apply_overrides(load_scenario(cfg.scenario_path), cfg);
    std::filesystem::create_directories(cfg.output_dir);

    MissionConfig mission;
    mission.assigner = cfg.assigner;
    mission.seed = cfg.seed;
    mission.backend = cfg.backend;
    if (cfg.assigner == AssignerKind::llm) {
        const auto replay = cfg.output_dir / "replay.jsonl";
        std::filesystem::remove(replay);
        mission.replay_log = replay;
    }
    const MissionLog log = run_mission(scenario, mission);

    write_trajectory_csv(log, cfg.output_dir / "trajectory.csv");
    write_metrics(log, cfg.output_dir / "metrics.json");
    if (cfg.emit_plots) {
        emit_plot(log, 0.0, cfg.output_dir / "plot_initial.svg");
        emit_plot(log, log.metrics.end_time / 2.0, cfg.output_dir / "plot_mid.svg");
        emit_plot(log, log.metrics.end_time, cfg.output_dir / "plot_final.svg");
    }
    print_summary(log, out);
    return log.metrics.assets_breached > 0 ? kExitBreach : kExitOk;
}

int replay_command(const RunConfig& cfg, std::ostream& out) {
    for (const auto& record : read_replay_log(cfg.replay_log)) {
        out << "epoch " << record.epoch << " t=" << record.time << " source=" << record.source << "\n";
        for (std::size_t a = 0; a < record.responses.size(); ++a) {
            const ParseResult p = parse_response(record.responses[a], record.n_agents, record.n_targets);
            out << "  attempt " << a + 1 << ": ";
            if (p.ok()) {
                out << "ok " << render_row_vector(p.values);
                if (!p.clipped.empty()) out << " (clipped " << p.clipped.size() << ")";
            } else {
                out << "fail " << to_string(p.failure) << ": " << p.detail;
            }
            out << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
    Parser p;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        p.app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(p.app.help(), true);
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError(p.app.help("", CLI::AppFormatMode::All), true);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + p.app.help());
    }

    RunConfig cfg = p.cfg;
    if (p.replay->parsed()) {
        cfg.command = "replay";
        cfg.replay_log = p.replay_log;
        return cfg;
    }
    cfg.command = "run";
    cfg.scenario_path = p.scenario;
    cfg.assigner = assigner_kind_from_string(p.assigner);
    cfg.output_dir = p.out_dir;
    if (p.run->count("--epoch-dt")) cfg.epoch_dt = p.epoch_dt;
    if (p.run->count("--switch-penalty")) cfg.switch_penalty = p.switch_penalty;
    if (!p.coverage.empty()) cfg.coverage = p.coverage == "on";
    if (!p.threat_sense.empty()) cfg.threat_sense = threat_sense_from_string(p.threat_sense);
    if (!p.model.empty()) cfg.backend.model_name = p.model;

    if (cfg.assigner == AssignerKind::llm) {
        if (p.backend.empty()) {
            throw UsageError("--assigner llm requires --backend <url|mock://mode> (and " +
                             cfg.backend.api_key_env_var + " in the environment for a live endpoint)\n" +
                             p.app.help());
        }
        cfg.backend.endpoint_url = p.backend;
        if (cfg.backend.is_mock()) {
            try {
                mock_mode_from_string(p.backend.substr(7));
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string(e.what()) + "\n" + p.app.help());
            }
        } else {
            const char* key = std::getenv(cfg.backend.api_key_env_var.c_str());
            if (key == nullptr || *key == '\0') {
                throw UsageError("live backend requires the API key in environment variable " +
                                 cfg.backend.api_key_env_var + "\n" + p.app.help());
            }
        }
    } else if (!p.backend.empty()) {
        cfg.backend.endpoint_url = p.backend;
    }
    return cfg;
}

Scenario apply_overrides(Scenario scenario, const RunConfig& config) {
    if (config.epoch_dt) scenario.epoch_dt = *config.epoch_dt;
    if (config.switch_penalty) scenario.options.switch_penalty = *config.switch_penalty;
    if (config.coverage) scenario.options.coverage = *config.coverage;
    if (config.threat_sense) scenario.options.threat_sense = *config.threat_sense;
    if (auto violations = validate_scenario(scenario); !violations.empty()) {
        throw ScenarioError("scenario invalid after command-line overrides", violations);
    }
    return scenario;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_args(args);
    } catch (const UsageError& e) {
        (e.help_requested() ? out : err) << e.what() << "\n";
        return e.help_requested() ? kExitOk : kExitUsage;
    }
    try {
        return cfg.command == "replay" ? replay_command(cfg, out) : run_command(cfg, out);
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        for (const auto& v : e.violations()) err << "  - " << v << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "fatal: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace wta
