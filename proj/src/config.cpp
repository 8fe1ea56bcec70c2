#include "c2m/config.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace c2m {

namespace {

using nlohmann::json;

void read_int(const json& j, const char* key, int& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
        throw std::invalid_argument(std::string("config: ") + key + " must be an integer");
    }
    out = v.get<int>();
}

void read_u64(const json& j, const char* key, std::uint64_t& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw std::invalid_argument(std::string("config: ") + key + " must be an integer");
    }
    out = v.get<std::uint64_t>();
}

void read_double(const json& j, const char* key, double& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw std::invalid_argument(std::string("config: ") + key + " must be a number");
    }
    out = v.get<double>();
}

void read_bool(const json& j, const char* key, bool& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_boolean()) {
        throw std::invalid_argument(std::string("config: ") + key + " must be a boolean");
    }
    out = v.get<bool>();
}

void read_string(const json& j, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_string()) {
        throw std::invalid_argument(std::string("config: ") + key + " must be a string");
    }
    out = v.get<std::string>();
}

const char* const kKnownKeys[] = {
    "n",           "blend_start",   "elevate_start",        "optional_stop",
    "evolve_end",  "tau_init",      "rapid_phase_end",      "tau_rapid",
    "tau_final",   "lr",            "ring_r_in",            "ring_r_out",
    "downscale",   "latent_channels", "target_initial_area", "seeds_per_batch",
    "evolutions",  "master_seed",   "closing_radius",       "min_component_cells",
    "phi_blur_sigma", "feather_sigma", "scorer_dilation_cells", "augmentations",
    "noise_scale", "rerun",         "early_stop",           "target_seed",
    "backend",
};

}  // namespace

EvolutionConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : kKnownKeys) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw std::invalid_argument("config: unknown key: " + item.key());
    }

    EvolutionConfig cfg;
    read_int(j, "n", cfg.n);
    read_double(j, "blend_start", cfg.blend_start);
    read_double(j, "elevate_start", cfg.elevate_start);
    read_double(j, "optional_stop", cfg.optional_stop);
    read_double(j, "evolve_end", cfg.evolve_end);
    read_double(j, "tau_init", cfg.tau.tau_init);
    read_double(j, "rapid_phase_end", cfg.tau.rapid_phase_end);
    read_double(j, "tau_rapid", cfg.tau.tau_rapid);
    read_double(j, "tau_final", cfg.tau.tau_final);
    read_double(j, "lr", cfg.lr);
    read_int(j, "ring_r_in", cfg.ring_r_in);
    read_int(j, "ring_r_out", cfg.ring_r_out);
    read_int(j, "downscale", cfg.downscale);
    read_int(j, "latent_channels", cfg.latent_channels);
    read_double(j, "target_initial_area", cfg.target_initial_area);
    read_int(j, "seeds_per_batch", cfg.seeds_per_batch);
    read_int(j, "evolutions", cfg.evolutions);
    read_u64(j, "master_seed", cfg.master_seed);
    read_int(j, "closing_radius", cfg.closing_radius);
    read_int(j, "min_component_cells", cfg.min_component_cells);
    read_double(j, "phi_blur_sigma", cfg.phi_blur_sigma);
    read_double(j, "feather_sigma", cfg.feather_sigma);
    read_int(j, "scorer_dilation_cells", cfg.scorer_dilation_cells);
    read_int(j, "augmentations", cfg.augmentations);
    read_double(j, "noise_scale", cfg.noise_scale);
    read_bool(j, "rerun", cfg.rerun);
    read_bool(j, "early_stop", cfg.early_stop);
    read_u64(j, "target_seed", cfg.target_seed);
    read_string(j, "backend", cfg.backend);

    validate(cfg);
    return cfg;
}

EvolutionConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const EvolutionConfig& cfg) {
    nlohmann::ordered_json j;
    j["n"] = cfg.n;
    j["blend_start"] = cfg.blend_start;
    j["elevate_start"] = cfg.elevate_start;
    j["optional_stop"] = cfg.optional_stop;
    j["evolve_end"] = cfg.evolve_end;
    j["tau_init"] = cfg.tau.tau_init;
    j["rapid_phase_end"] = cfg.tau.rapid_phase_end;
    j["tau_rapid"] = cfg.tau.tau_rapid;
    j["tau_final"] = cfg.tau.tau_final;
    j["lr"] = cfg.lr;
    j["ring_r_in"] = cfg.ring_r_in;
    j["ring_r_out"] = cfg.ring_r_out;
    j["downscale"] = cfg.downscale;
    j["latent_channels"] = cfg.latent_channels;
    j["target_initial_area"] = cfg.target_initial_area;
    j["seeds_per_batch"] = cfg.seeds_per_batch;
    j["evolutions"] = cfg.evolutions;
    j["master_seed"] = cfg.master_seed;
    j["closing_radius"] = cfg.closing_radius;
    j["min_component_cells"] = cfg.min_component_cells;
    j["phi_blur_sigma"] = cfg.phi_blur_sigma;
    j["feather_sigma"] = cfg.feather_sigma;
    j["scorer_dilation_cells"] = cfg.scorer_dilation_cells;
    j["augmentations"] = cfg.augmentations;
    j["noise_scale"] = cfg.noise_scale;
    j["rerun"] = cfg.rerun;
    j["early_stop"] = cfg.early_stop;
    j["target_seed"] = cfg.target_seed;
    j["backend"] = cfg.backend;
    return j.dump(2);
}

}  // namespace c2m
