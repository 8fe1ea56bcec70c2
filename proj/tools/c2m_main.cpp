#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "c2m/config.hpp"
#include "c2m/engine.hpp"
#include "c2m/mask.hpp"
#include "c2m/metrics.hpp"
#include "c2m/png_io.hpp"
#include "c2m/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitEvolution = 4;

bool parse_point(const std::string& text, c2m::Point& out) {
    std::istringstream in(text);
    char comma = 0;
    if (!(in >> out.x >> comma >> out.y) || comma != ',') return false;
    std::string rest;
    return !(in >> rest);
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end == nullptr || *end != '\0') return false;
    out = static_cast<std::uint64_t>(v);
    return true;
}

std::string candidates_path_for(const std::string& out_path) {
    std::string base = out_path;
    if (base.size() >= 4 && base.substr(base.size() - 4) == ".png") {
        base.resize(base.size() - 4);
    }
    return base + ".candidates.json";
}

ordered_json trace_record_json(const c2m::TraceRecord& r) {
    ordered_json j;
    j["t"] = r.t;
    j["progress"] = r.progress;
    j["tau"] = r.tau;
    j["area"] = r.area;
    if (r.scored) {
        j["score"] = r.score;
    } else {
        j["score"] = nullptr;
    }
    j["rerun"] = r.rerun;
    j["stopped"] = r.stopped;
    return j;
}

int cmd_edit(const std::string& image_path, const std::string& point_text,
             const std::string& prompt, const std::string& config_path,
             std::optional<std::uint64_t> seed_flag, const std::string& out_path,
             const std::string& trace_dir, bool frames) {
    c2m::EvolutionConfig cfg;
    try {
        if (!config_path.empty()) cfg = c2m::load_config_file(config_path);
    } catch (const c2m::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::optional<std::uint64_t> seed = seed_flag;
    if (const char* env = std::getenv("C2M_SEED")) {
        std::uint64_t v = 0;
        if (!parse_u64(env, v)) {
            std::cerr << "error: C2M_SEED is not an unsigned integer: " << env << "\n";
            return kExitUsage;
        }
        seed = v;  // environment wins over --seed
    }
    if (seed) cfg.master_seed = *seed;

    c2m::Point point{0, 0};
    if (!parse_point(point_text, point)) {
        std::cerr << "error: --point expects X,Y integers, got '" << point_text << "'\n";
        return kExitUsage;
    }

    c2m::Image image;
    try {
        image = c2m::load_image(image_path);
    } catch (const c2m::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    if (point.x < 0 || point.x >= image.width) {
        std::cerr << "error: point x=" << point.x << " out of bounds [0, "
                  << image.width << ")\n";
        return kExitUsage;
    }
    if (point.y < 0 || point.y >= image.height) {
        std::cerr << "error: point y=" << point.y << " out of bounds [0, "
                  << image.height << ")\n";
        return kExitUsage;
    }

    c2m::EditResult result;
    try {
        auto backend = c2m::make_backend(cfg.backend, c2m::synthetic_params(cfg));
        result = c2m::edit(image, prompt, point, cfg, *backend);
    } catch (const c2m::EvolutionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEvolution;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        c2m::save_image(out_path, result.image);

        ordered_json report;
        const auto& cs = result.candidates;
        report["selected"] = nullptr;
        if (cs.selected >= 0) {
            const auto& sel = cs.candidates[static_cast<size_t>(cs.selected)];
            report["selected"] = ordered_json{
                {"index", cs.selected}, {"seed", sel.seed}, {"score", sel.score}};
        }
        report["candidates"] = ordered_json::array();
        for (const auto& c : cs.candidates) {
            report["candidates"].push_back(
                ordered_json{{"seed", c.seed}, {"score", c.score}});
        }
        std::ofstream cand(candidates_path_for(out_path), std::ios::binary);
        if (!cand) throw c2m::IoError("cannot write " + candidates_path_for(out_path));
        cand << report.dump(2) << "\n";

        if (!trace_dir.empty()) {
            fs::create_directories(trace_dir);
            for (size_t i = 0; i < result.traces.size(); ++i) {
                const auto& trace = result.traces[i];
                fs::path jsonl = fs::path(trace_dir) / ("trace_" + std::to_string(i) + ".jsonl");
                std::ofstream out(jsonl, std::ios::binary);
                if (!out) throw c2m::IoError("cannot write " + jsonl.string());
                for (const auto& rec : trace.records) {
                    out << trace_record_json(rec).dump() << "\n";
                }
                if (frames) {
                    fs::path fdir = fs::path(trace_dir) / ("frames_" + std::to_string(i));
                    fs::create_directories(fdir);
                    for (const auto& rec : trace.records) {
                        char name[32];
                        std::snprintf(name, sizeof(name), "t_%04d.png", rec.t);
                        c2m::save_mask((fdir / name).string(),
                                       c2m::upscale_mask(rec.mask, cfg.downscale));
                    }
                }
            }
        }
    } catch (const c2m::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

int cmd_extract_mask(const std::string& input_path, const std::string& output_path,
                     const std::string& mask_out, const c2m::ExtractParams& params) {
    c2m::Image input;
    c2m::Image output;
    try {
        input = c2m::load_image(input_path);
        output = c2m::load_image(output_path);
    } catch (const c2m::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    c2m::Mask mask;
    try {
        mask = c2m::extract_edit_mask(input, output, params);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!mask_out.empty()) {
        try {
            c2m::save_mask(mask_out, mask);
        } catch (const c2m::IoError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitIo;
        }
    }
    std::printf("%.6f\n", c2m::area_fraction(mask));
    return 0;
}

int cmd_stats(const std::string& votes_path) {
    std::ifstream in(votes_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open votes file: " << votes_path << "\n";
        return kExitIo;
    }
    std::vector<c2m::VoteRecord> votes;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string item, rater, choice;
        if (!std::getline(row, item, ',') || !std::getline(row, rater, ',') ||
            !std::getline(row, choice)) {
            std::cerr << "error: line " << line_no << ": expected item,rater,choice\n";
            return kExitUsage;
        }
        if (line_no == 1 && item == "item_id") continue;  // optional header
        c2m::VoteRecord rec;
        rec.item_id = item;
        rec.rater_id = rater;
        if (choice == "method_a") {
            rec.choice = c2m::Choice::method_a;
        } else if (choice == "method_b") {
            rec.choice = c2m::Choice::method_b;
        } else if (choice == "tie") {
            rec.choice = c2m::Choice::tie;
        } else {
            std::cerr << "error: line " << line_no << ": unknown choice '" << choice
                      << "' (expected method_a, method_b, or tie)\n";
            return kExitUsage;
        }
        votes.push_back(std::move(rec));
    }
    if (votes.empty()) {
        std::cerr << "error: no vote records in " << votes_path << "\n";
        return kExitUsage;
    }

    c2m::MajorityReport rep;
    try {
        rep = c2m::majority_analysis(votes);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    ordered_json j;
    j["items_total"] = rep.items_total;
    j["items_decided_ignoring_ties"] = rep.items_decided_ignoring_ties;
    j["pct_majority_a"] = rep.pct_majority_a;
    j["pct_majority_b"] = rep.pct_majority_b;
    j["items_tied"] = rep.items_tied;
    j["pct_tied_items"] = rep.pct_tied_items;
    j["pct_majority_a_non_tied"] = rep.pct_majority_a_non_tied;
    j["pct_majority_b_non_tied"] = rep.pct_majority_b_non_tied;
    j["total_votes_a"] = rep.total_votes_a;
    j["total_votes_b"] = rep.total_votes_b;
    j["total_votes_tie"] = rep.total_votes_tie;

    // Symmetric 2x2 on the raw a/b vote totals; degenerate when both are zero.
    if (rep.total_votes_a + rep.total_votes_b > 0) {
        std::array<std::array<long, 2>, 2> table = {
            {{rep.total_votes_a, rep.total_votes_b},
             {rep.total_votes_b, rep.total_votes_a}}};
        try {
            c2m::ChiSquared chi = c2m::chi_squared_yates(table);
            j["chi_squared"] =
                ordered_json{{"statistic", chi.statistic}, {"p_value", chi.p_value}};
        } catch (const std::invalid_argument&) {
            j["chi_squared"] = nullptr;
        }
    } else {
        j["chi_squared"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Click-driven mask evolution for localized image edits"};
    app.require_subcommand(1);

    // edit
    std::string image_path, point_text, prompt, config_path;
    std::string out_path = "edit.png";
    std::string trace_dir;
    bool frames = false;
    std::uint64_t seed_value = 0;
    auto* edit = app.add_subcommand("edit", "Evolve a mask from a click and composite the edit");
    edit->add_option("--image", image_path, "Input PNG")->required();
    edit->add_option("--point", point_text, "Click as X,Y pixels")->required();
    edit->add_option("--prompt", prompt, "Edit prompt")->required();
    edit->add_option("--config", config_path, "JSON config file");
    auto* seed_opt = edit->add_option("--seed", seed_value, "Master seed (C2M_SEED overrides)");
    edit->add_option("--out", out_path, "Output PNG path");
    edit->add_option("--trace-dir", trace_dir, "Directory for per-evolution trace JSONL");
    edit->add_flag("--frames", frames, "Also write per-step mask frames (needs --trace-dir)");

    // extract-mask
    std::string in_a, in_b, mask_out;
    c2m::ExtractParams params;
    auto* extract = app.add_subcommand("extract-mask", "Extract the changed region of an image pair");
    extract->add_option("--input", in_a, "Original PNG")->required();
    extract->add_option("--output", in_b, "Edited PNG")->required();
    extract->add_option("--mask-out", mask_out, "Where to write the 1-bit mask PNG");
    extract->add_option("--threshold", params.threshold, "Per-pixel mean-L1 change threshold");
    extract->add_option("--pool-radius", params.pool_radius, "Open/close radius in pixels");
    extract->add_option("--min-component", params.min_component, "Minimum component pixel count");

    // stats
    std::string votes_path;
    auto* stats = app.add_subcommand("stats", "Majority/chi-squared report from a votes CSV");
    stats->add_option("--votes", votes_path, "CSV of item_id,rater_id,choice")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message and usage
        return kExitUsage;
    }

    if (edit->parsed()) {
        std::optional<std::uint64_t> seed;
        if (seed_opt->count() > 0) seed = seed_value;
        return cmd_edit(image_path, point_text, prompt, config_path, seed, out_path,
                        trace_dir, frames);
    }
    if (extract->parsed()) {
        return cmd_extract_mask(in_a, in_b, mask_out, params);
    }
    if (stats->parsed()) {
        return cmd_stats(votes_path);
    }
    return kExitUsage;
}
