// Copyright 2026 The HQF-Net Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Command-line front end: training, evaluation, ablation, oracle checks
// and data/feature utilities.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hqf/circuits/circuits.hpp"
#include "hqf/segnet/net.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/train/checkpoint.hpp"
#include "hqf/train/config.hpp"
#include "hqf/train/dataset.hpp"
#include "hqf/train/oracles.hpp"
#include "hqf/train/synth.hpp"
#include "hqf/train/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace hqf;

namespace {

constexpr int kUsageExit = 2;

void require_data_root(const train::RunConfig &cfg) {
    if (cfg.data_root.empty()) {
        throw ConfigError("data.root is required for this command");
    }
}

void print_row(const train::EpochRow &r) {
    std::cout << "epoch " << r.epoch << "  step " << r.step << "  loss "
              << train::format_metric(r.loss) << "  mIoU " << train::format_metric(r.miou)
              << "  OA " << train::format_metric(100.0 * r.oa) << "%\n"
              << std::flush;
}

int cmd_train(const fs::path &config_path) {
    const auto cfg = train::load_run_config(config_path);
    require_data_root(cfg);
    const auto data = train::Dataset::load(cfg.data_root, cfg.net.classes);
    const auto provider = train::make_provider(cfg);
    segnet::HqfNet net(cfg.net, cfg.seed);
    std::cout << "parameters " << net.parameter_count() << ", samples " << data.size()
              << ", steps " << cfg.total_steps(data.size()) << "\n";
    const auto outcome = train::train_network(net, data, *provider, cfg, print_row);
    if (!cfg.report.empty()) {
        train::write_train_csv(cfg.report, outcome.rows);
        std::cout << "report " << cfg.report.string() << "\n";
    }
    if (!cfg.checkpoint.empty()) {
        train::save_checkpoint(cfg.checkpoint, net.parameters());
        std::cout << "checkpoint " << cfg.checkpoint.string() << "\n";
    }
    return 0;
}

int cmd_eval(const fs::path &config_path, const fs::path &checkpoint) {
    const auto cfg = train::load_run_config(config_path);
    require_data_root(cfg);
    const auto data = train::Dataset::load(cfg.data_root, cfg.net.classes);
    const auto provider = train::make_provider(cfg);
    segnet::HqfNet net(cfg.net, cfg.seed);
    train::load_checkpoint(checkpoint, net.parameters());
    const auto r = train::evaluate_network(net, data, *provider, cfg);
    std::cout << "loss,mIoU,OA\n"
              << train::format_metric(r.loss) << ',' << train::format_metric(r.metrics.miou)
              << ',' << train::format_metric(100.0 * r.metrics.oa) << '\n';
    return 0;
}

int cmd_ablate(const fs::path &config_path) {
    const auto cfg = train::load_run_config(config_path);
    require_data_root(cfg);
    const auto data = train::Dataset::load(cfg.data_root, cfg.net.classes);
    const auto provider = train::make_provider(cfg);
    const auto rows = train::run_ablation(data, *provider, cfg, [](const train::AblationRow &r) {
        std::cout << r.variant << "  mIoU " << train::format_metric(r.miou) << "  OA "
                  << train::format_metric(100.0 * r.oa) << "%  params " << r.params << "  "
                  << r.seconds << " s\n"
                  << std::flush;
    });
    const fs::path out = cfg.report.empty() ? fs::path("ablation.csv") : cfg.report;
    train::write_ablation_csv(out, rows);
    std::cout << "report " << out.string() << "\n";
    return 0;
}

int cmd_gradcheck(const fs::path &config_path) {
    const auto cfg = train::load_run_config(config_path);
    train::OracleOptions opt;
    opt.n_qubits = cfg.net.n_qubits;
    opt.network = cfg.net;
    opt.seed = cfg.seed;
    std::size_t failed = 0;
    (void)train::run_gradient_oracles(opt, [&](const train::OracleResult &r) {
        std::printf("%s %-40s error %.3e  tolerance %.0e\n", r.passed() ? "PASS" : "FAIL",
                    r.name.c_str(), r.error, r.tolerance);
        std::fflush(stdout);
        failed += r.passed() ? 0 : 1;
    });
    if (failed > 0) {
        throw NumericError(std::to_string(failed) + " gradient oracle(s) above tolerance");
    }
    return 0;
}

int cmd_dump(const std::string &name, std::size_t qubits) {
    const auto spec = circuits::build_by_name(name, circuits::QubitGrid::for_qubits(qubits));
    std::cout << "# " << name << ": " << spec.n_qubits << " qubits, " << spec.n_trainable
              << " trainable, " << spec.n_inputs << " inputs, " << spec.gates.size()
              << " gates\n"
              << qsim::dump_circuit(spec);
    return 0;
}

int cmd_synth(const fs::path &out, std::size_t n, std::size_t size, std::size_t classes,
              std::uint64_t seed) {
    const auto recs = train::synth_dataset(out, n, size, classes, seed);
    std::cout << "wrote " << recs.size() << " samples to " << out.string() << "\n";
    return 0;
}

int cmd_provider_cache(const fs::path &config_path, const fs::path &out) {
    const auto cfg = train::load_run_config(config_path);
    require_data_root(cfg);
    if (cfg.net.variant.fusion == segnet::Fusion::None) {
        throw ConfigError("variant.fusion is none: the network reads no semantic features");
    }
    const auto records = train::scan_dataset(cfg.data_root);
    const segnet::SyntheticProvider provider(cfg.provider_seed);
    const segnet::HqfNet net(cfg.net, cfg.seed);
    const auto geometry = net.semantic_geometry();
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw IoError("cannot create " + out.string() + ": " + ec.message());
    }
    nlohmann::json manifest = nlohmann::json::object();
    for (const auto &rec : records) {
        for (std::size_t s = 0; s < geometry.size(); ++s) {
            const std::size_t level = segnet::NetConfig::kFusedLevels[s];
            const std::string file = rec.stem + ".l" + std::to_string(level) + ".hqft";
            segnet::write_feature_file(out / file,
                                       provider.features(rec.stem, level, geometry[s]));
            manifest[rec.stem][std::to_string(level)] = file;
        }
    }
    std::ofstream mf(out / "manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) {
        throw IoError("cannot write " + (out / "manifest.json").string());
    }
    std::cout << "cached features for " << records.size() << " samples in " << out.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"HQF-Net hybrid segmentation toolkit"};
    app.require_subcommand(1);

    fs::path config;
    fs::path checkpoint;
    fs::path out;
    std::string circuit;
    std::size_t qubits = 16;
    std::size_t n = 16, size = 64, classes = 3;
    std::uint64_t seed = 7;

    auto *train_cmd = app.add_subcommand("train", "train a network from a config file");
    train_cmd->add_option("config", config, "run config (JSON)")->required();

    auto *eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the config's data");
    eval_cmd->add_option("config", config, "run config (JSON)")->required();
    eval_cmd->add_option("--checkpoint", checkpoint, "HQFC checkpoint")->required();

    auto *ablate_cmd = app.add_subcommand("ablate", "train and evaluate all six variants");
    ablate_cmd->add_option("config", config, "run config (JSON)")->required();

    auto *grad_cmd = app.add_subcommand("gradcheck", "run the gradient oracle suite");
    grad_cmd->add_option("config", config, "run config (JSON)")->required();

    auto *dump_cmd = app.add_subcommand("dump-circuit", "print a circuit's gate list");
    dump_cmd->add_option("name", circuit, "enrichment, localist, globalist, diagonal or filter")
        ->required();
    dump_cmd->add_option("--qubits", qubits, "8 or 16")->capture_default_str();

    auto *synth_cmd = app.add_subcommand("synth-data", "write a synthetic shapes dataset");
    synth_cmd->add_option("--out", out, "output directory")->required();
    synth_cmd->add_option("--n", n, "number of samples")->capture_default_str();
    synth_cmd->add_option("--size", size, "image side in pixels")->capture_default_str();
    synth_cmd->add_option("--classes", classes, "class count")->capture_default_str();
    synth_cmd->add_option("--seed", seed, "random seed")->capture_default_str();

    auto *cache_cmd =
        app.add_subcommand("provider-cache", "precompute synthetic features as HQFT files");
    cache_cmd->add_option("config", config, "run config (JSON)")->required();
    cache_cmd->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << app.help() << "error: usage: " << e.what() << "\n";
        return kUsageExit;
    }

    try {
        if (*train_cmd) return cmd_train(config);
        if (*eval_cmd) return cmd_eval(config, checkpoint);
        if (*ablate_cmd) return cmd_ablate(config);
        if (*grad_cmd) return cmd_gradcheck(config);
        if (*dump_cmd) return cmd_dump(circuit, qubits);
        if (*synth_cmd) return cmd_synth(out, n, size, classes, seed);
        if (*cache_cmd) return cmd_provider_cache(config, out);
    } catch (const Error &e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return kUsageExit;
}
