#ifndef HERDLENS_PIPELINE_HPP
#define HERDLENS_PIPELINE_HPP

#include "herdlens/gait.hpp"
#include "herdlens/graze.hpp"
#include "herdlens/report.hpp"
#include "herdlens/rest.hpp"
#include "herdlens/speed.hpp"
#include "herdlens/synth.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace herdlens {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum class AnalysisKind { Run, Graze, Rest };

std::string_view to_string(AnalysisKind kind);
std::optional<AnalysisKind> parse_analysis_kind(std::string_view text);

/// Activity an analysis consumes: run -> running, graze -> grazing,
/// rest -> sitting.
Activity activity_for(AnalysisKind kind);

/// String overrides keyed by flag name without dashes, e.g. "n-neighbors".
class Params {
public:
    /// Throws InvalidArgument for an unknown key.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

struct RunSettings {
    GaitConfig gait;
    double norm_exponent = kDefaultNormExponent;
    std::optional<int> frame_stride;
};

struct AnalysisSettings {
    std::uint64_t seed = kDefaultSeed;
    RunSettings run;
    GrazeConfig graze;
    RestConfig rest;
};

/// Defaults for every analysis with the overrides applied and the seed
/// propagated to every stochastic stage. Malformed values throw InvalidArgument.
AnalysisSettings resolve_settings(AnalysisKind kind, const Params& params, std::uint64_t seed);

/// Full echo of the settings `kind` runs with.
nlohmann::json settings_echo(AnalysisKind kind, const AnalysisSettings& settings);

/// Video directories under the inputs: a directory holding manifest.json, a
/// manifest path, or any directory searched recursively. Sorted, unique.
std::vector<std::filesystem::path> find_videos(const std::vector<std::filesystem::path>& inputs);

struct ValidationOutcome {
    std::size_t videos = 0;
    std::size_t frames = 0;
    std::vector<std::string> diagnostics;

    bool ok() const noexcept { return videos > 0 && diagnostics.empty(); }
};

ValidationOutcome validate_inputs(const std::vector<std::filesystem::path>& inputs);

/// Report plus side files keyed by path relative to the output directory.
struct AnalysisOutput {
    AnalysisReport report;
    std::map<std::string, std::string> files;
};

/// Runs one analysis over the matching videos. Every artifact is computed
/// before anything is written; `report.json` in `out_dir`, when present,
/// keeps its other sections. Returns the written paths.
std::vector<std::filesystem::path> analyze(AnalysisKind kind, const std::vector<std::filesystem::path>& inputs,
                                           const Params& params, std::uint64_t seed,
                                           const std::filesystem::path& out_dir);

/// The in-memory half of analyze(), without touching `out_dir`.
AnalysisOutput run_analysis(AnalysisKind kind, const std::vector<std::filesystem::path>& inputs,
                            const Params& params, std::uint64_t seed);

inline constexpr const char* kReportFile = "report.json";

/// Human-readable digest of a report.
std::string summarize_report(const AnalysisReport& report);

/// Seed from text, as used for HERDLENS_SEED. Throws InvalidArgument.
std::uint64_t parse_seed(const std::string& text);

} // namespace herdlens

#endif
