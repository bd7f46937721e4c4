// SPDX-License-Identifier: Apache-2.0
#include "risne/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <type_traits>

namespace risne {

using nlohmann::json;

std::string to_string(SelectMode mode)
{
    return mode == SelectMode::sample ? "sample" : "argmax";
}

SelectMode select_mode_from_string(const std::string& name)
{
    if (name == "sample") {
        return SelectMode::sample;
    }
    if (name == "argmax") {
        return SelectMode::argmax;
    }
    throw ConfigError("expected 'sample' or 'argmax', got '" + name + "'");
}

std::string to_string(Activation act)
{
    switch (act) {
    case Activation::tanh:
        return "tanh";
    case Activation::relu:
        return "relu";
    case Activation::identity:
        return "identity";
    }
    return "identity";
}

Activation activation_from_string(const std::string& name)
{
    if (name == "tanh") {
        return Activation::tanh;
    }
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "identity") {
        return Activation::identity;
    }
    throw ConfigError("expected tanh, relu or identity, got '" + name + "'");
}

namespace {

// Reads fields of one JSON object, remembering which keys were used so the
// leftovers can be reported.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        if (!j_.contains(key)) {
            return;
        }
        seen_.insert(key);
        const json& v = j_.at(key);
        const std::string field = path_.empty() ? key : path_ + "." + key;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw ConfigError(field + ": expected a boolean");
                }
                out = v.get<bool>();
            } else if constexpr (std::is_unsigned_v<T>) {
                if (!v.is_number_unsigned()) {
                    throw ConfigError(field + ": expected a non-negative integer");
                }
                out = v.get<T>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) {
                    throw ConfigError(field + ": expected an integer");
                }
                out = v.get<T>();
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) {
                    throw ConfigError(field + ": expected a number");
                }
                out = v.get<T>();
            } else {
                out = v.get<T>();
            }
        } catch (const json::exception& e) {
            throw ConfigError(field + ": " + e.what());
        }
    }

    template <typename T, typename Parse>
    void get_with(const char* key, T& out, Parse parse)
    {
        std::string s;
        get(key, s);
        if (j_.contains(key)) {
            try {
                out = parse(s);
            } catch (const ConfigError& e) {
                throw ConfigError(field(key) + ": " + e.what());
            }
        }
    }

    const json* child(const char* key)
    {
        if (!j_.contains(key)) {
            return nullptr;
        }
        seen_.insert(key);
        return &j_.at(key);
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const
    {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(field(item.key()) + ": unknown field");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

json vec_to_json(const Vec3& v)
{
    return json::array({v.x, v.y, v.z});
}

Vec3 vec_from_json(const json& j, const std::string& field)
{
    if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); })) {
        throw ConfigError(field + ": expected [x, y, z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json scenario_to_json(const ScenarioConfig& s)
{
    json ris = json::array();
    for (const auto& p : s.ris_positions) {
        ris.push_back(vec_to_json(p));
    }
    return {{"n_tx", s.n_tx},
            {"n_ris", s.n_ris},
            {"tx_position", vec_to_json(s.tx_position)},
            {"rx_position", vec_to_json(s.rx_position)},
            {"ris_positions", ris},
            {"kappa_h_db", s.kappa_h_db},
            {"kappa_h1_db", s.kappa_h1_db},
            {"kappa_h2_db", s.kappa_h2_db},
            {"h1_los", s.h1_los},
            {"direct_blocked", s.direct_blocked},
            {"direct_attenuation_db", s.direct_attenuation_db},
            {"carrier_wavelength", s.carrier_wavelength},
            {"pathloss", s.pathloss},
            {"tx_power_dbm", s.tx_power_dbm},
            {"noise_dbm", s.noise_dbm},
            {"horizon", s.horizon}};
}

void scenario_from_json(const json& j, ScenarioConfig& s)
{
    ObjectReader r(j, "scenario");
    r.get("n_tx", s.n_tx);
    r.get("n_ris", s.n_ris);
    if (const json* v = r.child("tx_position")) {
        s.tx_position = vec_from_json(*v, "scenario.tx_position");
    }
    if (const json* v = r.child("rx_position")) {
        s.rx_position = vec_from_json(*v, "scenario.rx_position");
    }
    if (const json* v = r.child("ris_positions")) {
        if (!v->is_array()) {
            throw ConfigError("scenario.ris_positions: expected a list of [x, y, z]");
        }
        s.ris_positions.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            s.ris_positions.push_back(vec_from_json((*v)[i], "scenario.ris_positions[" + std::to_string(i) + "]"));
        }
    }
    r.get("kappa_h_db", s.kappa_h_db);
    r.get("kappa_h1_db", s.kappa_h1_db);
    r.get("kappa_h2_db", s.kappa_h2_db);
    r.get("h1_los", s.h1_los);
    r.get("direct_blocked", s.direct_blocked);
    r.get("direct_attenuation_db", s.direct_attenuation_db);
    r.get("carrier_wavelength", s.carrier_wavelength);
    r.get("pathloss", s.pathloss);
    r.get("tx_power_dbm", s.tx_power_dbm);
    r.get("noise_dbm", s.noise_dbm);
    r.get("horizon", s.horizon);
    r.finish();
}

// n_tx, n_ris and codebook_size come from the scenario and are not part of
// the arch section.
json arch_to_json(const ArchConfig& a)
{
    return {{"kernel_size", a.kernel_size},
            {"conv_channels_1", a.conv_channels_1},
            {"conv_channels_2", a.conv_channels_2},
            {"conv_activation", to_string(a.conv_activation)},
            {"phase_hidden", a.phase_hidden},
            {"precoder_hidden", a.precoder_hidden},
            {"direct_branch", a.direct_branch},
            {"phase_states", a.phase_states},
            {"normalize_inputs", a.normalize_inputs}};
}

void arch_from_json(const json& j, ArchConfig& a)
{
    ObjectReader r(j, "arch");
    r.get("kernel_size", a.kernel_size);
    r.get("conv_channels_1", a.conv_channels_1);
    r.get("conv_channels_2", a.conv_channels_2);
    r.get_with("conv_activation", a.conv_activation, activation_from_string);
    r.get("phase_hidden", a.phase_hidden);
    r.get("precoder_hidden", a.precoder_hidden);
    r.get("direct_branch", a.direct_branch);
    r.get("phase_states", a.phase_states);
    r.get("normalize_inputs", a.normalize_inputs);
    r.finish();
}

json ff_to_json(const FeedForwardArch& f)
{
    return {{"hidden", f.hidden}, {"include_direct", f.include_direct}, {"normalize_inputs", f.normalize_inputs}};
}

void ff_from_json(const json& j, FeedForwardArch& f)
{
    ObjectReader r(j, "ff");
    r.get("hidden", f.hidden);
    r.get("include_direct", f.include_direct);
    r.get("normalize_inputs", f.normalize_inputs);
    r.finish();
}

json evo_to_json(const EvoParams& e)
{
    return {{"l_pop", e.l_pop},
            {"p_mut", e.p_mut},
            {"sigma_mut", e.sigma_mut},
            {"generations", e.generations},
            {"t_e_train", e.t_e_train},
            {"permutation_enabled", e.permutation_enabled},
            {"init_sigma", e.init_sigma},
            {"refresh_episode_seeds", e.refresh_episode_seeds}};
}

void evo_from_json(const json& j, EvoParams& e)
{
    ObjectReader r(j, "evolution");
    r.get("l_pop", e.l_pop);
    r.get("p_mut", e.p_mut);
    r.get("sigma_mut", e.sigma_mut);
    r.get("generations", e.generations);
    r.get("t_e_train", e.t_e_train);
    r.get("permutation_enabled", e.permutation_enabled);
    r.get("init_sigma", e.init_sigma);
    r.get("refresh_episode_seeds", e.refresh_episode_seeds);
    r.finish();
}

json lga_to_json(const LgaParams& l)
{
    json j{{"individuals", l.individuals}, {"generations", l.generations}, {"elitism", l.elitism}};
    j["p_mut"] = l.p_mut ? json(*l.p_mut) : json(nullptr);
    return j;
}

void lga_from_json(const json& j, LgaParams& l)
{
    ObjectReader r(j, "lga");
    r.get("individuals", l.individuals);
    r.get("generations", l.generations);
    r.get("elitism", l.elitism);
    if (const json* v = r.child("p_mut")) {
        if (v->is_null()) {
            l.p_mut.reset();
        } else if (v->is_number()) {
            l.p_mut = v->get<double>();
        } else {
            throw ConfigError("lga.p_mut: expected a number or null");
        }
    }
    r.finish();
}

json aggregator_to_json(const AggregatorConfig& a)
{
    return {{"hidden", a.hidden}, {"encoding", to_string(a.encoding)}, {"bypass", a.bypass}};
}

void aggregator_from_json(const json& j, AggregatorConfig& a)
{
    ObjectReader r(j, "aggregator");
    r.get("hidden", a.hidden);
    r.get_with("encoding", a.encoding, vote_encoding_from_string);
    r.get("bypass", a.bypass);
    r.finish();
}

} // namespace

void ExperimentConfig::resolve()
{
    arch.n_tx = scenario.n_tx;
    arch.n_ris = scenario.n_ris;
    arch.codebook_size = scenario.n_tx;
    ff.n_tx = scenario.n_tx;
    ff.n_ris = scenario.n_ris;
    ff.codebook_size = scenario.n_tx;
    ff.ris_count = policy == "ff_cent" ? scenario.ris_count() : 1;
}

void ExperimentConfig::validate() const
{
    scenario.validate();
    evo.validate();
    lga.validate();
    aggregator.validate();
    if (std::find(kPolicyKinds.begin(), kPolicyKinds.end(), policy) == kPolicyKinds.end()) {
        throw ConfigError("experiment.policy: unknown policy '" + policy + "'");
    }
    if (policy == "mbacnn") {
        arch.validate();
    }
    if (policy == "ff" || policy == "ff_cent") {
        ff.validate();
    }
    if (eval_episodes < 1) {
        throw ConfigError("experiment.eval_episodes: must be at least 1");
    }
    if (runs_per_point < 1) {
        throw ConfigError("experiment.runs_per_point: must be at least 1");
    }
    if (!(perturbation.epsilon >= 0.0) || !(perturbation.alpha >= 0.0)) {
        throw ConfigError("perturbation: epsilon and alpha must be non-negative");
    }
}

json config_to_json(const ExperimentConfig& cfg)
{
    return {{"scenario", scenario_to_json(cfg.scenario)},
            {"arch", arch_to_json(cfg.arch)},
            {"ff", ff_to_json(cfg.ff)},
            {"evolution", evo_to_json(cfg.evo)},
            {"lga", lga_to_json(cfg.lga)},
            {"aggregator", aggregator_to_json(cfg.aggregator)},
            {"perturbation", {{"epsilon", cfg.perturbation.epsilon}, {"alpha", cfg.perturbation.alpha}}},
            {"experiment",
             {{"policy", cfg.policy},
              {"eval_episodes", cfg.eval_episodes},
              {"seed", cfg.seed},
              {"output_dir", cfg.output_dir},
              {"runs_per_point", cfg.runs_per_point},
              {"train_mode", to_string(cfg.train_mode)},
              {"eval_mode", to_string(cfg.eval_mode)},
              {"oracle_cap", cfg.oracle_cap}}}};
}

ExperimentConfig config_from_json(const json& j)
{
    ExperimentConfig cfg;
    ObjectReader r(j, "");
    if (const json* s = r.child("scenario")) {
        scenario_from_json(*s, cfg.scenario);
    }
    if (const json* s = r.child("arch")) {
        arch_from_json(*s, cfg.arch);
    }
    if (const json* s = r.child("ff")) {
        ff_from_json(*s, cfg.ff);
    }
    if (const json* s = r.child("evolution")) {
        evo_from_json(*s, cfg.evo);
    }
    if (const json* s = r.child("lga")) {
        lga_from_json(*s, cfg.lga);
    }
    if (const json* s = r.child("aggregator")) {
        aggregator_from_json(*s, cfg.aggregator);
    }
    if (const json* s = r.child("perturbation")) {
        ObjectReader p(*s, "perturbation");
        p.get("epsilon", cfg.perturbation.epsilon);
        p.get("alpha", cfg.perturbation.alpha);
        p.finish();
    }
    if (const json* s = r.child("experiment")) {
        ObjectReader e(*s, "experiment");
        e.get("policy", cfg.policy);
        e.get("eval_episodes", cfg.eval_episodes);
        e.get("seed", cfg.seed);
        e.get("output_dir", cfg.output_dir);
        e.get("runs_per_point", cfg.runs_per_point);
        e.get_with("train_mode", cfg.train_mode, select_mode_from_string);
        e.get_with("eval_mode", cfg.eval_mode, select_mode_from_string);
        e.get("oracle_cap", cfg.oracle_cap);
        e.finish();
    }
    r.finish();
    cfg.resolve();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write config file '" + path.string() + "'");
    }
    out << config_to_json(cfg).dump(2) << '\n';
}

} // namespace risne
