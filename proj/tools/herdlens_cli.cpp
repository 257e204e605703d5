// herdlens command-line front end. Talks to the engine only through the C API.

#include "herdlens/herdlens.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Owns a C-API string list.
class StringList {
public:
    ~StringList() { hl_string_list_destroy(list_); }
    hl_string_list** out() { return &list_; }
    std::vector<std::string> items() const {
        std::vector<std::string> v;
        for (size_t i = 0; i < hl_string_list_count(list_); ++i) v.emplace_back(hl_string_list_get(list_, i));
        return v;
    }

private:
    hl_string_list* list_ = nullptr;
};

int report_failure(hl_status status) {
    std::cerr << "error: " << hl_status_name(status) << ": " << hl_last_error_message() << "\n";
    return kExitFailure;
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto doc = nlohmann::json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw UsageError(path + " is not a JSON object");
    return doc;
}

uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(what + " must be a nonnegative integer, got '" + text + "'");
    }
}

// --seed, then the config's "seed", then HERDLENS_SEED, then 42.
uint64_t resolve_seed(const std::optional<std::string>& flag, const nlohmann::json& config) {
    if (flag) return parse_u64(*flag, "--seed");
    if (config.contains("seed")) {
        if (!config["seed"].is_number_unsigned()) throw UsageError("config seed must be a nonnegative integer");
        return config["seed"].get<uint64_t>();
    }
    if (const char* env = std::getenv("HERDLENS_SEED"); env && *env) return parse_u64(env, "HERDLENS_SEED");
    return 42;
}

struct ScenarioFlag {
    const char* flag;
    const char* key;
    const char* help;
    bool is_flag = false;
};

const std::map<std::string, std::vector<ScenarioFlag>>& scenario_flags() {
    static const std::map<std::string, std::vector<ScenarioFlag>> flags = {
        {"motion",
         {{"--video-id", "video_id", "video identifier"},
          {"--vx", "vx", "x velocity, pixels per kept frame (required)"},
          {"--vy", "vy", "y velocity, pixels per kept frame (required)"},
          {"--fps", "fps", "frames per second"},
          {"--frame-stride", "frame_stride", "source frames per kept frame"},
          {"--frames", "frames", "kept frames"},
          {"--width", "width", "frame width"},
          {"--height", "height", "frame height"},
          {"--start-x", "start_x", "initial center x"},
          {"--start-y", "start_y", "initial center y"},
          {"--radius-x", "radius_x", "ellipse x radius"},
          {"--radius-y", "radius_y", "ellipse y radius"},
          {"--depth-scales", "depth_scales", "comma-separated depth segments, e.g. 1,2"},
          {"--distractor", "distractor", "add a smaller stationary ellipse", true}}},
        {"blobs",
         {{"--k", "k", "blob count"},
          {"--per-blob", "per_blob", "points per blob"},
          {"--dim", "dim", "dimensions"},
          {"--sigma", "sigma", "blob standard deviation"},
          {"--separation", "separation", "minimum center separation"}}},
        {"grazing",
         {{"--videos-per-group", "videos_per_group", "videos per social group"},
          {"--frames", "frames", "kept frames per video"},
          {"--width", "width", "frame width"},
          {"--height", "height", "frame height"},
          {"--single-green", "single_green", "green fraction for single videos"},
          {"--herd-green", "herd_green", "green fraction for herd videos"},
          {"--green-jitter", "green_jitter", "per-frame green fraction jitter"},
          {"--herd-animals", "herd_animals", "animals per herd frame"}}},
        {"resting",
         {{"--single-frames", "single_frames", "frames per single video"},
          {"--herd-frames", "herd_frames", "frames per herd video"},
          {"--herd-animals", "herd_animals", "animals per herd frame"},
          {"--single-templates", "single_templates", "silhouette templates for single videos"},
          {"--herd-templates", "herd_templates", "silhouette templates for herd videos"},
          {"--flip-noise", "flip_noise", "pixel flip probability"}}},
        {"gait",
         {{"--animals", "animals", "animal count"},
          {"--templates", "templates", "pose templates"},
          {"--frames", "frames", "kept frames per animal"},
          {"--sigma", "sigma", "pose jitter as a fraction of the bbox diagonal"}}}};
    return flags;
}

const std::map<std::string, std::vector<std::string>>& analysis_flags() {
    static const std::map<std::string, std::vector<std::string>> flags = {
        {"run",
         {"n-neighbors", "min-dist", "n-epochs", "learning-rate", "negative-sample-rate", "kmeans-k",
          "kmeans-max-iters", "kmeans-tol", "cluster-space", "frame-stride", "norm-exponent", "min-conf",
          "min-visible"}},
        {"graze", {"nose-index", "min-conf", "patch-factor", "green-index", "bootstrap"}},
        {"rest",
         {"n-neighbors", "min-dist", "n-epochs", "learning-rate", "negative-sample-rate", "kmeans-k",
          "kmeans-max-iters", "kmeans-tol", "resize"}}};
    return flags;
}

// Converts a flag value to the JSON type the generator expects.
nlohmann::json flag_value(const std::string& key, const std::string& text) {
    if (key == "video_id" || key == "depth_scales") return text;
    auto parsed = nlohmann::json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_number()) throw UsageError("--" + key + " expects a number");
    return parsed;
}

int run_synth_one(const std::string& scenario, nlohmann::json params, uint64_t seed, const std::string& out) {
    if (scenario == "motion" && (!params.contains("vx") || !params.contains("vy"))) {
        throw UsageError("synth motion requires --vx and --vy");
    }
    StringList written;
    const std::string text = params.dump();
    const hl_status st = hl_synth(scenario.c_str(), text.c_str(), seed, out.c_str(), written.out());
    if (st != HL_OK) return report_failure(st);
    for (const auto& p : written.items()) std::cout << p << "\n";
    return kExitOk;
}

std::string json_scalar_text(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"herdlens: behavioral analytics over animal perception outputs"};
    app.set_version_flag("--version", std::string(hl_version()));
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "check interchange files for format and invariant violations");
    std::vector<std::string> validate_paths;
    validate->add_option("paths", validate_paths, "video directories, manifests or trees to search")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
    synth->require_subcommand(1);
    std::string synth_out;
    std::optional<std::string> synth_seed;
    std::string synth_config;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "random seed (default: HERDLENS_SEED or 42)");
    synth->add_option("--config", synth_config, "JSON config with a \"synth\" object per scenario");
    std::map<std::string, std::map<std::string, std::string>> scenario_values;
    std::map<std::string, std::map<std::string, bool>> scenario_switches;
    std::map<std::string, CLI::App*> scenario_cmds;
    for (const auto& [name, flags] : scenario_flags()) {
        auto* sub = synth->add_subcommand(name, "synthesize the " + name + " scenario");
        sub->fallthrough();
        scenario_cmds[name] = sub;
        for (const auto& f : flags) {
            if (f.is_flag) {
                sub->add_flag(f.flag, scenario_switches[name][f.key], f.help);
            } else {
                sub->add_option(f.flag, scenario_values[name][f.key], f.help);
            }
        }
    }
    auto* synth_all = synth->add_subcommand("all", "synthesize every scenario into <out>/<scenario>");
    synth_all->fallthrough();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "run an analysis and write report.json plus artifacts");
    analyze->require_subcommand(1);
    std::vector<std::string> inputs;
    std::string analyze_out;
    std::optional<std::string> analyze_seed;
    std::string analyze_config;
    analyze->add_option("--input", inputs, "video directories or trees (repeatable)")->required();
    analyze->add_option("--out", analyze_out, "output directory")->required();
    analyze->add_option("--seed", analyze_seed, "random seed (default: HERDLENS_SEED or 42)");
    analyze->add_option("--config", analyze_config, "JSON config with an \"analyze\" object per kind");
    std::map<std::string, std::map<std::string, std::string>> analysis_values;
    std::map<std::string, CLI::App*> analysis_cmds;
    for (const auto& [kind, keys] : analysis_flags()) {
        auto* sub = analyze->add_subcommand(kind, "analysis '" + kind + "'");
        sub->fallthrough();
        analysis_cmds[kind] = sub;
        for (const auto& key : keys) sub->add_option("--" + key, analysis_values[kind][key], "override " + key);
    }

    // report
    auto* report = app.add_subcommand("report", "inspect reports");
    report->require_subcommand(1);
    auto* show = report->add_subcommand("show", "validate a report and print a digest");
    std::string report_path;
    show->add_option("path", report_path, "report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) {
            std::vector<const char*> raw;
            for (const auto& p : validate_paths) raw.push_back(p.c_str());
            StringList diags;
            const hl_status st = hl_validate(raw.data(), raw.size(), diags.out());
            for (const auto& d : diags.items()) std::cerr << d << "\n";
            if (st == HL_OK) {
                std::cout << "ok\n";
                return kExitOk;
            }
            if (st != HL_ERR_VALIDATION) return report_failure(st);
            std::cerr << hl_last_error_message() << "\n";
            return kExitFailure;
        }

        if (synth->parsed()) {
            const auto config = load_config(synth_config);
            const uint64_t seed = resolve_seed(synth_seed, config);
            const auto section = config.value("synth", nlohmann::json::object());
            if (synth_all->parsed()) {
                const auto motion = section.value("motion", nlohmann::json::object());
                if (!motion.contains("vx") || !motion.contains("vy")) {
                    throw UsageError("synth all needs synth.motion.vx and synth.motion.vy in --config");
                }
                for (const auto& [name, flags] : scenario_flags()) {
                    const auto params = section.value(name, nlohmann::json::object());
                    const int rc = run_synth_one(name, params, seed, synth_out + "/" + name);
                    if (rc != kExitOk) return rc;
                }
                return kExitOk;
            }
            for (const auto& [name, sub] : scenario_cmds) {
                if (!sub->parsed()) continue;
                nlohmann::json params = section.value(name, nlohmann::json::object());
                for (const auto& [key, value] : scenario_values[name]) {
                    if (!value.empty()) params[key] = flag_value(key, value);
                }
                for (const auto& [key, on] : scenario_switches[name]) {
                    if (on) params[key] = true;
                }
                return run_synth_one(name, params, seed, synth_out);
            }
        }

        if (analyze->parsed()) {
            const auto config = load_config(analyze_config);
            const uint64_t seed = resolve_seed(analyze_seed, config);
            for (const auto& [kind, sub] : analysis_cmds) {
                if (!sub->parsed()) continue;
                hl_params* params = hl_params_create();
                auto cleanup = std::unique_ptr<hl_params, void (*)(hl_params*)>(params, hl_params_destroy);
                const auto section = config.value("analyze", nlohmann::json::object()).value(kind, nlohmann::json::object());
                for (const auto& [key, value] : section.items()) {
                    if (hl_params_set(params, key.c_str(), json_scalar_text(value).c_str()) != HL_OK) {
                        throw UsageError("config: " + std::string(hl_last_error_message()));
                    }
                }
                for (const auto& [key, value] : analysis_values[kind]) {
                    if (value.empty()) continue;
                    if (hl_params_set(params, key.c_str(), value.c_str()) != HL_OK) {
                        throw UsageError(hl_last_error_message());
                    }
                }
                std::vector<const char*> raw;
                for (const auto& p : inputs) raw.push_back(p.c_str());
                StringList written;
                const hl_status st =
                    hl_analyze(kind.c_str(), raw.data(), raw.size(), params, seed, analyze_out.c_str(), written.out());
                if (st != HL_OK) return report_failure(st);
                for (const auto& p : written.items()) std::cout << p << "\n";
                return kExitOk;
            }
        }

        if (show->parsed()) {
            char* summary = nullptr;
            const hl_status st = hl_report_show(report_path.c_str(), &summary);
            if (st != HL_OK) return report_failure(st);
            std::cout << summary;
            hl_string_free(summary);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
