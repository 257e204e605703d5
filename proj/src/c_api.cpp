#include "herdlens/herdlens.h"

#include "herdlens/cluster.hpp"
#include "herdlens/embed.hpp"
#include "herdlens/error.hpp"
#include "herdlens/interchange.hpp"
#include "herdlens/pipeline.hpp"
#include "herdlens/synth.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

struct hl_string_list {
    std::vector<std::string> items;
};

struct hl_params {
    herdlens::Params params;
};

namespace {

using herdlens::ErrorCode;

thread_local std::string g_last_error;

hl_status status_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return HL_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return HL_ERR_IO;
    case ErrorCode::ParseError: return HL_ERR_PARSE;
    case ErrorCode::InvariantViolation: return HL_ERR_INVARIANT_VIOLATION;
    case ErrorCode::ManifestMismatch: return HL_ERR_MANIFEST_MISMATCH;
    case ErrorCode::SumMismatch: return HL_ERR_SUM_MISMATCH;
    case ErrorCode::Overflow: return HL_ERR_OVERFLOW;
    case ErrorCode::EmptyMask: return HL_ERR_EMPTY_MASK;
    case ErrorCode::NoMasks: return HL_ERR_NO_MASKS;
    case ErrorCode::DimensionMismatch: return HL_ERR_DIMENSION_MISMATCH;
    case ErrorCode::TooFewPoints: return HL_ERR_TOO_FEW_POINTS;
    case ErrorCode::TooFewFeatures: return HL_ERR_TOO_FEW_FEATURES;
    case ErrorCode::TooFewSamples: return HL_ERR_TOO_FEW_SAMPLES;
    case ErrorCode::NoUsableFrames: return HL_ERR_NO_USABLE_FRAMES;
    case ErrorCode::DegenerateBBox: return HL_ERR_DEGENERATE_BBOX;
    case ErrorCode::LengthMismatch: return HL_ERR_LENGTH_MISMATCH;
    case ErrorCode::EmptyGroup: return HL_ERR_EMPTY_GROUP;
    case ErrorCode::MissingSocialLabel: return HL_ERR_MISSING_SOCIAL_LABEL;
    case ErrorCode::MissingViewLabel: return HL_ERR_MISSING_VIEW_LABEL;
    case ErrorCode::MissingImagery: return HL_ERR_MISSING_IMAGERY;
    case ErrorCode::LowConfidenceNose: return HL_ERR_LOW_CONFIDENCE_NOSE;
    case ErrorCode::OutOfFrame: return HL_ERR_OUT_OF_FRAME;
    case ErrorCode::Schema: return HL_ERR_SCHEMA;
    }
    return HL_ERR_INTERNAL;
}

hl_status fail_with(hl_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

// Runs `body`, translating exceptions into status codes and messages.
template <typename F>
hl_status guarded(F&& body) {
    try {
        g_last_error.clear();
        return body();
    } catch (const herdlens::Error& e) {
        return fail_with(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail_with(HL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail_with(HL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail_with(HL_ERR_INTERNAL, "unknown failure");
    }
}

hl_string_list* make_list(std::vector<std::string> items) {
    auto* list = new hl_string_list;
    list->items = std::move(items);
    return list;
}

std::vector<std::filesystem::path> to_paths(const char* const* paths, size_t n) {
    std::vector<std::filesystem::path> out;
    for (size_t i = 0; i < n; ++i) {
        if (!paths[i]) herdlens::fail(ErrorCode::InvalidArgument, "null path");
        out.emplace_back(paths[i]);
    }
    return out;
}

std::vector<std::string> path_strings(const std::vector<std::filesystem::path>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(p.string());
    return out;
}

} // namespace

extern "C" {

const char* hl_status_name(hl_status status) {
    switch (status) {
    case HL_OK: return "Ok";
    case HL_ERR_VALIDATION: return "ValidationFailed";
    case HL_ERR_INTERNAL: return "Internal";
    default: break;
    }
    for (int c = 0; c <= static_cast<int>(ErrorCode::Schema); ++c) {
        const auto code = static_cast<ErrorCode>(c);
        if (status_of(code) == status) return herdlens::to_string(code);
    }
    return "Unknown";
}

const char* hl_last_error_message(void) { return g_last_error.c_str(); }

const char* hl_version(void) { return HERDLENS_VERSION; }

void hl_string_free(char* text) { std::free(text); }

size_t hl_string_list_count(const hl_string_list* list) { return list ? list->items.size() : 0; }

const char* hl_string_list_get(const hl_string_list* list, size_t index) {
    if (!list || index >= list->items.size()) return nullptr;
    return list->items[index].c_str();
}

void hl_string_list_destroy(hl_string_list* list) { delete list; }

hl_params* hl_params_create(void) { return new (std::nothrow) hl_params; }

hl_status hl_params_set(hl_params* params, const char* key, const char* value) {
    return guarded([&] {
        if (!params || !key || !value) return fail_with(HL_ERR_INVALID_ARGUMENT, "null argument");
        params->params.set(key, value);
        return HL_OK;
    });
}

void hl_params_destroy(hl_params* params) { delete params; }

hl_status hl_validate(const char* const* paths, size_t n_paths, hl_string_list** diagnostics) {
    if (diagnostics) *diagnostics = nullptr;
    return guarded([&] {
        if (!paths && n_paths > 0) return fail_with(HL_ERR_INVALID_ARGUMENT, "null path array");
        const auto outcome = herdlens::validate_inputs(to_paths(paths, n_paths));
        if (diagnostics) *diagnostics = make_list(outcome.diagnostics);
        if (!outcome.ok()) {
            return fail_with(HL_ERR_VALIDATION, std::to_string(outcome.diagnostics.size()) + " validation problem(s)");
        }
        return HL_OK;
    });
}

hl_status hl_synth(const char* scenario, const char* params_json, uint64_t seed, const char* out_dir,
                   hl_string_list** written) {
    if (written) *written = nullptr;
    return guarded([&] {
        if (!scenario || !out_dir) return fail_with(HL_ERR_INVALID_ARGUMENT, "null argument");
        const auto parsed = herdlens::parse_scenario(scenario);
        if (!parsed) return fail_with(HL_ERR_INVALID_ARGUMENT, std::string("unknown scenario '") + scenario + "'");
        nlohmann::json params;
        if (params_json && *params_json) {
            params = nlohmann::json::parse(params_json, nullptr, false);
            if (params.is_discarded()) return fail_with(HL_ERR_PARSE, "scenario parameters are not valid JSON");
        }
        const auto output = herdlens::synthesize(*parsed, params, seed);
        const auto paths = herdlens::write_synth(output, out_dir);
        if (written) *written = make_list(path_strings(paths));
        return HL_OK;
    });
}

hl_status hl_analyze(const char* kind, const char* const* inputs, size_t n_inputs, const hl_params* params,
                     uint64_t seed, const char* out_dir, hl_string_list** written) {
    if (written) *written = nullptr;
    return guarded([&] {
        if (!kind || !out_dir || (!inputs && n_inputs > 0)) return fail_with(HL_ERR_INVALID_ARGUMENT, "null argument");
        const auto parsed = herdlens::parse_analysis_kind(kind);
        if (!parsed) return fail_with(HL_ERR_INVALID_ARGUMENT, std::string("unknown analysis '") + kind + "'");
        const herdlens::Params empty;
        const auto paths =
            herdlens::analyze(*parsed, to_paths(inputs, n_inputs), params ? params->params : empty, seed, out_dir);
        if (written) *written = make_list(path_strings(paths));
        return HL_OK;
    });
}

hl_status hl_report_show(const char* path, char** summary) {
    if (summary) *summary = nullptr;
    return guarded([&] {
        if (!path || !summary) return fail_with(HL_ERR_INVALID_ARGUMENT, "null argument");
        const std::string text = herdlens::summarize_report(herdlens::read_report(path));
        char* out = static_cast<char*>(std::malloc(text.size() + 1));
        if (!out) return fail_with(HL_ERR_INTERNAL, "out of memory");
        std::memcpy(out, text.c_str(), text.size() + 1);
        *summary = out;
        return HL_OK;
    });
}

hl_status hl_rle_decode(int height, int width, const uint64_t* counts, size_t n_counts, uint8_t* out_bits) {
    return guarded([&] {
        if ((!counts && n_counts > 0) || !out_bits || height < 0 || width < 0) {
            return fail_with(HL_ERR_INVALID_ARGUMENT, "invalid argument");
        }
        herdlens::RleMask mask{height, width, std::vector<std::uint64_t>(counts, counts + n_counts)};
        const auto grid = herdlens::decode_rle(mask);
        std::memcpy(out_bits, grid.bits().data(), grid.size());
        return HL_OK;
    });
}

hl_status hl_rle_encode(int height, int width, const uint8_t* bits, uint64_t* out_counts, size_t capacity,
                        size_t* n_counts) {
    return guarded([&] {
        if (!bits || !n_counts || height < 0 || width < 0) return fail_with(HL_ERR_INVALID_ARGUMENT, "invalid argument");
        herdlens::BitGrid grid(height, width);
        for (size_t i = 0; i < grid.size(); ++i) grid.bits()[i] = bits[i] ? 1 : 0;
        const auto mask = herdlens::encode_rle(grid);
        *n_counts = mask.counts.size();
        if (!out_counts) return HL_OK;
        if (capacity < mask.counts.size()) return fail_with(HL_ERR_OVERFLOW, "output buffer too small");
        std::memcpy(out_counts, mask.counts.data(), mask.counts.size() * sizeof(uint64_t));
        return HL_OK;
    });
}

hl_umap_options hl_umap_default_options(void) {
    const herdlens::EmbeddingConfig c;
    return {c.n_neighbors, c.min_dist, c.n_components, -1, c.learning_rate, c.negative_sample_rate, c.seed};
}

hl_status hl_umap(const double* data, size_t n, size_t d, const hl_umap_options* options, double* out) {
    return guarded([&] {
        if (!data || !out || !options || d == 0) return fail_with(HL_ERR_INVALID_ARGUMENT, "invalid argument");
        herdlens::Matrix m(n, d);
        std::memcpy(m.values().data(), data, n * d * sizeof(double));
        herdlens::EmbeddingConfig c;
        c.n_neighbors = options->n_neighbors;
        c.min_dist = options->min_dist;
        c.n_components = options->n_components;
        if (options->n_epochs >= 0) c.n_epochs = options->n_epochs;
        c.learning_rate = options->learning_rate;
        c.negative_sample_rate = options->negative_sample_rate;
        c.seed = options->seed;
        const auto result = herdlens::umap(m, c);
        std::memcpy(out, result.embedding.values().data(), result.embedding.values().size() * sizeof(double));
        return HL_OK;
    });
}

hl_status hl_kmeans(const double* data, size_t n, size_t d, int k, int max_iters, double tol, uint64_t seed,
                    int* labels, double* centroids, double* inertia) {
    return guarded([&] {
        if (!data || !labels || d == 0) return fail_with(HL_ERR_INVALID_ARGUMENT, "invalid argument");
        herdlens::Matrix m(n, d);
        std::memcpy(m.values().data(), data, n * d * sizeof(double));
        const auto result = herdlens::kmeans(m, {k, max_iters, tol, seed});
        std::memcpy(labels, result.labels.data(), n * sizeof(int));
        if (centroids) {
            std::memcpy(centroids, result.centroids.values().data(), result.centroids.values().size() * sizeof(double));
        }
        if (inertia) *inertia = result.inertia;
        return HL_OK;
    });
}

} // extern "C"
