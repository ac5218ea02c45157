#include "uavtp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavtp/config.hpp"
#include "uavtp/observation.hpp"
#include "uavtp/qnet.hpp"
#include "uavtp/trainer.hpp"

namespace uavtp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::string seed;
    std::string episodes;
    bool gu_growth = false;
    std::string trend_mode;
};

struct ResolvedConfig {
    ScenarioConfig scenario;
    TrainConfig train;
};

ResolvedConfig resolve(const CommonOptions& opt) {
    KeyValues kv;
    if (!opt.config_path.empty()) kv = read_key_values(opt.config_path);
    for (const auto& o : opt.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(o, "override '" + o + "' is not key=value");
        auto key = o.substr(0, eq);
        auto value = o.substr(eq + 1);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        value.erase(std::remove_if(value.begin(), value.end(), ::isspace), value.end());
        kv[key] = value;
    }
    if (!opt.seed.empty()) kv["seed"] = opt.seed;
    if (!opt.episodes.empty()) kv["episodes"] = opt.episodes;
    if (opt.gu_growth) kv["gu_growth"] = "true";
    if (!opt.trend_mode.empty()) kv["trend_mode"] = opt.trend_mode;

    ResolvedConfig rc;
    apply_scenario_keys(rc.scenario, kv);
    apply_train_keys(rc.train, kv);
    if (!kv.empty()) {
        const auto& key = kv.begin()->first;
        throw ConfigError(key, "unknown config key '" + key + "'");
    }
    validate(rc.scenario);
    validate(rc.train);
    return rc;
}

std::string num(double v) { return format_double(v); }

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = dir / ".write_probe";
    std::ofstream f(probe);
    if (ec || !f) throw OutputError("output directory '" + dir.string() + "' is not writable");
    f.close();
    fs::remove(probe, ec);
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw OutputError("cannot write '" + p.string() + "'");
    return f;
}

void write_resolved(const fs::path& p, const ResolvedConfig& rc) {
    auto f = open_out(p);
    f << "# resolved configuration; rerun with --config " << p.filename().string() << "\n";
    write_scenario_keys(f, rc.scenario);
    write_train_keys(f, rc.train);
}

json config_json(const ResolvedConfig& rc) {
    std::ostringstream os;
    write_scenario_keys(os, rc.scenario);
    write_train_keys(os, rc.train);
    std::istringstream is(os.str());
    json j = json::object();
    for (const auto& [k, v] : parse_key_values(is)) j[k] = v;
    return j;
}

void write_manifest(const fs::path& dir, const std::string& command, const ResolvedConfig& rc,
                    const std::vector<std::string>& artifacts) {
    json m;
    m["command"] = command;
    m["master_seed"] = rc.scenario.seed;
    m["output_directory"] = dir.string();
    m["config"] = config_json(rc);
    m["artifacts"] = artifacts;
    auto f = open_out(dir / "manifest.json");
    f << m.dump(2) << '\n';
}

void write_matrix_csv(const fs::path& p, const Grid& g) {
    auto f = open_out(p);
    // One line per row y (south to north), columns x = 0..K-1.
    for (Eigen::Index y = 0; y < g.cols(); ++y) {
        for (Eigen::Index x = 0; x < g.rows(); ++x) {
            if (x) f << ',';
            f << num(g(x, y));
        }
        f << '\n';
    }
}

int cmd_train(const CommonOptions& opt, std::ostream& out) {
    const ResolvedConfig rc = resolve(opt);
    const fs::path dir(opt.out_dir);
    prepare_out_dir(dir);
    write_manifest(dir, "train", rc, {"manifest.json", "config.resolved", "episodes.csv", "checkpoint.bin"});
    write_resolved(dir / "config.resolved", rc);

    auto csv = open_out(dir / "episodes.csv");
    csv << "episode,num_gus,total_reward,steps,final_fairness,throughput_bits,energy_used,mean_td_loss\n";
    Trainer trainer(rc.scenario, rc.train);
    trainer.train([&](const EpisodeReport& r) {
        csv << r.episode << ',' << r.num_gus << ',' << num(r.total_reward) << ',' << r.steps << ','
            << num(r.final_fairness) << ',' << num(r.throughput_bits) << ',' << num(r.energy_used) << ','
            << num(r.mean_td_loss) << '\n';
        csv.flush();
        out << "episode " << r.episode << " reward " << num(r.total_reward) << " steps " << r.steps << '\n';
    });
    save_checkpoint((dir / "checkpoint.bin").string(), trainer.eval_net());
    return kExitOk;
}

int cmd_eval(const CommonOptions& opt, const std::string& checkpoint, std::ostream& out) {
    const ResolvedConfig rc = resolve(opt);
    const NetworkParams net = load_checkpoint(checkpoint, network_shape(rc.scenario, rc.train));
    const fs::path dir(opt.out_dir);
    prepare_out_dir(dir);
    write_manifest(dir, "eval", rc, {"manifest.json", "trajectory.csv", "summary.json"});

    const EvalResult res = evaluate(net, rc.scenario);
    auto csv = open_out(dir / "trajectory.csv");
    csv << "t,x_cell,y_cell,action,reward,fairness,throughput_bits,energy,served\n";
    for (const auto& r : res.trajectory) {
        csv << r.t << ',' << r.cell.col << ',' << r.cell.row << ',' << static_cast<int>(r.action) << ','
            << num(r.reward) << ',' << num(r.fairness) << ',' << num(r.throughput_bits) << ','
            << num(r.energy) << ',' << r.served << '\n';
    }
    json s;
    s["steps"] = res.report.steps;
    s["total_reward"] = res.report.total_reward;
    s["throughput_bits"] = res.report.throughput_bits;
    s["energy_used"] = res.report.energy_used;
    s["final_fairness"] = res.report.final_fairness;
    s["num_gus"] = res.report.num_gus;
    auto f = open_out(dir / "summary.json");
    f << s.dump(2) << '\n';
    out << "steps " << res.report.steps << " reward " << num(res.report.total_reward) << '\n';
    return kExitOk;
}

int cmd_inspect_obs(const CommonOptions& opt, int slots, std::ostream& out) {
    const ResolvedConfig rc = resolve(opt);
    const fs::path dir(opt.out_dir);
    prepare_out_dir(dir);
    std::vector<std::string> artifacts{"manifest.json"};
    for (int t = 0; t < slots; ++t) {
        for (const char* ch : {"t1", "t2", "t3"}) {
            std::ostringstream name;
            name << "slot_" << std::setw(4) << std::setfill('0') << t << '_' << ch << ".csv";
            artifacts.push_back(name.str());
        }
    }
    write_manifest(dir, "inspect-obs", rc, artifacts);

    const ScenarioConfig& cfg = rc.scenario;
    WorldState world = spawn_world(cfg, cfg.num_gus);
    std::uniform_int_distribution<int> random_action(0, kNumActions - 1);
    std::size_t a = 1;
    for (int t = 0; t < slots; ++t) {
        if (t > 0) {
            if (world.done) break;
            step(world, action_from_index(random_action(world.rng.agent)), cfg);
        }
        const Observation obs = build_observation(world, cfg, world.rng.trend);
        write_matrix_csv(dir / artifacts[a++], obs.t1);
        write_matrix_csv(dir / artifacts[a++], obs.t2);
        write_matrix_csv(dir / artifacts[a++], obs.t3);
    }
    out << "wrote " << (a - 1) / 3 << " slots to " << dir.string() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"UAV trajectory planning with trend-aware deep Q-learning"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string checkpoint;
    int slots = 5;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "key = value configuration file");
        sub->add_option("--override", opt.overrides, "key=value, applied after --config")->take_all();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--trend-mode", opt.trend_mode, "stochastic | expectation");
    };

    auto* train = app.add_subcommand("train", "train the value network");
    add_common(train);
    train->add_option("--episodes", opt.episodes, "number of training episodes");
    train->add_flag("--gu-growth", opt.gu_growth, "add one GU per episode");

    auto* eval = app.add_subcommand("eval", "greedy rollout of a checkpoint");
    add_common(eval);
    eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();

    auto* inspect = app.add_subcommand("inspect-obs", "dump observation channels under a random policy");
    add_common(inspect);
    inspect->add_option("--slots", slots, "number of slots to dump")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (train->parsed()) return cmd_train(opt, out);
        if (eval->parsed()) return cmd_eval(opt, checkpoint, out);
        if (inspect->parsed()) return cmd_inspect_obs(opt, slots, out);
    } catch (const ConfigError& e) {
        err << "config error [" << e.key() << "]: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const OutputError& e) {
        err << e.what() << '\n';
        return kExitUnwritableOutput;
    } catch (const ShapeMismatch& e) {
        err << e.what() << '\n';
        return kExitShapeMismatch;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace uavtp
