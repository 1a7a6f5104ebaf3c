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
#include "hqf/train/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hqf/tensor/error.hpp"
#include "json.hpp"

namespace hqf::train {

namespace {

using Json = nlohmann::json;

std::size_t as_count(const Json &v, const std::string &key, std::size_t min = 0) {
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
        throw ConfigError(key + " must be an integer >= " + std::to_string(min));
    }
    return v.get<std::size_t>();
}

std::uint64_t as_seed(const Json &v, const std::string &key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError(key + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

double as_real(const Json &v, const std::string &key) {
    if (!v.is_number()) {
        throw ConfigError(key + " must be a number");
    }
    return v.get<double>();
}

bool as_bool(const Json &v, const std::string &key) {
    if (!v.is_boolean()) {
        throw ConfigError(key + " must be true or false");
    }
    return v.get<bool>();
}

std::string as_string(const Json &v, const std::string &key) {
    if (!v.is_string()) {
        throw ConfigError(key + " must be a string");
    }
    return v.get<std::string>();
}

std::filesystem::path as_path(const Json &v, const std::string &key,
                              const std::filesystem::path &base) {
    std::filesystem::path p = as_string(v, key);
    return p.is_relative() && !base.empty() ? base / p : p;
}

} // namespace

void RunConfig::validate() const {
    net.validate();
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw ConfigError("optim.lr must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("optim.betas must lie in [0, 1)");
    }
    if (!(eps > 0.0)) {
        throw ConfigError("optim.eps must be positive");
    }
    if (batch < 1) {
        throw ConfigError("train.batch must be at least 1");
    }
    if (steps && *steps == 0) {
        throw ConfigError("train.steps must be at least 1");
    }
    if (!steps && epochs == 0) {
        throw ConfigError("train.epochs must be at least 1");
    }
    if (provider_mode == ProviderMode::File && provider_manifest.empty() &&
        net.variant.fusion != segnet::Fusion::None) {
        throw ConfigError("provider.mode \"file\" needs provider.manifest");
    }
}

std::size_t RunConfig::steps_per_epoch(std::size_t samples) const {
    return (samples + batch - 1) / batch;
}

std::size_t RunConfig::total_steps(std::size_t samples) const {
    return steps ? *steps : epochs * steps_per_epoch(samples);
}

RunConfig parse_run_config(const std::string &json_text, const std::filesystem::path &base_dir) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::exception &e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object of dotted keys");
    }

    RunConfig cfg;
    std::optional<std::size_t> crop;
    std::optional<std::size_t> resize;
    auto &net = cfg.net;
    const auto &base = base_dir;
    using Setter = std::function<void(const Json &, const std::string &)>;
    const std::map<std::string, Setter> setters{
        {"variant.fusion",
         [&](const Json &v, const std::string &k) {
             net.variant.fusion = segnet::parse_fusion(as_string(v, k));
         }},
        {"variant.qskip", [&](const Json &v, const std::string &k) { net.variant.qskip = as_bool(v, k); }},
        {"variant.qmoe", [&](const Json &v, const std::string &k) { net.variant.qmoe = as_bool(v, k); }},
        {"net.width", [&](const Json &v, const std::string &k) { net.width = as_real(v, k); }},
        {"net.classes", [&](const Json &v, const std::string &k) { net.classes = as_count(v, k, 2); }},
        {"net.input", [&](const Json &v, const std::string &k) { net.input = as_count(v, k, 16); }},
        {"quantum.n_qubits", [&](const Json &v, const std::string &k) { net.n_qubits = as_count(v, k); }},
        {"dmcaf.d", [&](const Json &v, const std::string &k) { net.dmcaf.d = as_count(v, k, 1); }},
        {"dmcaf.heads", [&](const Json &v, const std::string &k) { net.dmcaf.heads = as_count(v, k, 1); }},
        {"dmcaf.points", [&](const Json &v, const std::string &k) { net.dmcaf.points = as_count(v, k, 1); }},
        {"dmcaf.stride", [&](const Json &v, const std::string &k) { net.dmcaf.stride = as_count(v, k, 1); }},
        {"provider.mode",
         [&](const Json &v, const std::string &k) {
             const auto m = as_string(v, k);
             if (m == "synthetic") {
                 cfg.provider_mode = ProviderMode::Synthetic;
             } else if (m == "file") {
                 cfg.provider_mode = ProviderMode::File;
             } else {
                 throw ConfigError(k + " must be \"synthetic\" or \"file\"");
             }
         }},
        {"provider.seed", [&](const Json &v, const std::string &k) { cfg.provider_seed = as_seed(v, k); }},
        {"provider.manifest",
         [&](const Json &v, const std::string &k) { cfg.provider_manifest = as_path(v, k, base); }},
        {"provider.patch", [&](const Json &v, const std::string &k) { net.patch = as_count(v, k, 1); }},
        {"optim.lr", [&](const Json &v, const std::string &k) { cfg.lr = as_real(v, k); }},
        {"optim.betas",
         [&](const Json &v, const std::string &k) {
             if (!v.is_array() || v.size() != 2) {
                 throw ConfigError(k + " must be a two-element array");
             }
             cfg.beta1 = as_real(v[0], k);
             cfg.beta2 = as_real(v[1], k);
         }},
        {"optim.eps", [&](const Json &v, const std::string &k) { cfg.eps = as_real(v, k); }},
        {"train.epochs", [&](const Json &v, const std::string &k) { cfg.epochs = as_count(v, k, 1); }},
        {"train.batch", [&](const Json &v, const std::string &k) { cfg.batch = as_count(v, k, 1); }},
        {"train.seed", [&](const Json &v, const std::string &k) { cfg.seed = as_seed(v, k); }},
        {"train.steps", [&](const Json &v, const std::string &k) { cfg.steps = as_count(v, k, 1); }},
        {"train.checkpoint",
         [&](const Json &v, const std::string &k) { cfg.checkpoint = as_path(v, k, base); }},
        {"data.root", [&](const Json &v, const std::string &k) { cfg.data_root = as_path(v, k, base); }},
        {"data.crop", [&](const Json &v, const std::string &k) { crop = as_count(v, k, 1); }},
        {"data.resize", [&](const Json &v, const std::string &k) { resize = as_count(v, k, 1); }},
        {"report.path", [&](const Json &v, const std::string &k) { cfg.report = as_path(v, k, base); }},
    };

    for (const auto &[key, value] : doc.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("unknown config key \"" + key + "\"");
        }
        it->second(value, key);
    }
    if (crop && resize) {
        throw ConfigError("data.crop and data.resize are mutually exclusive");
    }
    const std::optional<std::size_t> size = crop ? crop : resize;
    cfg.resize = resize.has_value();
    if (size && *size != net.input) {
        throw ConfigError((crop ? std::string("data.crop ") : std::string("data.resize ")) +
                          std::to_string(*size) + " differs from net.input " +
                          std::to_string(net.input));
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path.parent_path());
}

} // namespace hqf::train
