// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "risne/baselines.hpp"
#include "risne/channel.hpp"
#include "risne/cosyne.hpp"
#include "risne/feedforward.hpp"
#include "risne/mbacnn.hpp"
#include "risne/multiris.hpp"

namespace risne {

inline const std::vector<std::string> kPolicyKinds{"mbacnn", "ff", "ff_cent", "lga", "random", "oracle"};

/// Evaluation-time perturbation of the RIS-RX channels; epsilon == 0 disables it.
struct PerturbationConfig {
    double epsilon = 0.0;
    double alpha = 1.0;

    bool operator==(const PerturbationConfig&) const = default;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    ArchConfig arch;
    FeedForwardArch ff;
    EvoParams evo;
    LgaParams lga;
    AggregatorConfig aggregator;
    PerturbationConfig perturbation;

    std::string policy = "mbacnn";
    std::size_t eval_episodes = 20;
    std::uint64_t seed = 1;
    std::string output_dir = "runs";
    std::size_t runs_per_point = 1;
    SelectMode train_mode = SelectMode::sample;
    SelectMode eval_mode = SelectMode::argmax;
    std::uint64_t oracle_cap = kDefaultOracleCap;

    /// Copies the scenario dimensions into the network architectures.
    void resolve();
    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Missing fields keep their defaults; unknown fields are rejected. The result
/// is resolved and validated.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

std::string to_string(SelectMode mode);
SelectMode select_mode_from_string(const std::string& name);
std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

} // namespace risne
