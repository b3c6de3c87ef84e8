#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "envelopes.hpp"
#include "g2tr/error.hpp"
#include "g2tr/io/feature_dump.hpp"

namespace g2tr::cli {

namespace fs = std::filesystem;

namespace {

struct ReduceOptions {
    std::string features;
    double rho = 0.5;
    std::int64_t kmin = 1;
    double lambda = 1.0;
    std::string strategy = "latent";
    std::uint64_t seed = 0;
    std::string out;
    std::string mask;
    std::string merged_out;
    std::string layout;
};

struct CostOptions {
    std::string spec;
    std::int64_t text = 0;
    std::int64_t visual = 0;
    double rho = 0.5;
    std::int64_t kmin = 1;
};

struct CompareOptions {
    std::string features;
    double rho = 0.5;
    std::int64_t kmin = 1;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

std::vector<std::uint8_t> as_bytes(const std::string& text) { return {text.begin(), text.end()}; }

std::string read_text(const fs::path& path) {
    const auto bytes = io::read_file(path);
    return {bytes.begin(), bytes.end()};
}

void emit(const Json& doc, const std::string& out_path, std::ostream& out) {
    const auto text = to_text(doc);
    if (out_path.empty()) {
        out << text;
    } else {
        io::write_file_atomic(out_path, as_bytes(text));
    }
}

ReductionConfig make_config(double rho, std::int64_t kmin, double lambda, std::uint64_t seed) {
    if (kmin < 1) throw Error(ErrorCode::InvalidConfig, "kmin must be >= 1");
    ReductionConfig config;
    config.rho = rho;
    config.k_min = static_cast<std::size_t>(kmin);
    config.lambda = lambda;
    config.seed = seed;
    return config;
}

std::optional<SequenceSpec> load_layout(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return parse_sequence_spec(read_text(path));
}

// One dump through the full pipeline; writes the result document and the
// optional mask and sidecar.
void reduce_one(const fs::path& features, const ReductionConfig& config, const std::optional<SequenceSpec>& layout,
                const std::string& out_path, const std::string& mask_path, const std::string& merged_path,
                std::ostream& out) {
    const auto dump = io::read_dump(features);
    const auto result = reduce(dump, config);

    const auto spec = layout ? *layout : default_layout(dump.tokens.size());
    if (visual_span_count(spec) != 1) {
        throw Error(ErrorCode::MalformedSpec, "layout must contain exactly one visual span");
    }
    for (const auto& seg : spec.segments) {
        if (seg.kind == SegmentKind::VisualSpan && seg.count != dump.tokens.size()) {
            throw Error(ErrorCode::MalformedSpec, "layout visual span holds " + std::to_string(seg.count) +
                                                      " tokens, the dump has " + std::to_string(dump.tokens.size()));
        }
    }
    const auto original = scaffold(spec);
    const auto rebuilt = rebuild(spec, result.compressed);

    MergedFeaturesRef merged;
    if (!merged_path.empty()) {
        io::write_file_atomic(merged_path, io::encode_f32le(result.compressed.features));
        merged.sidecar_path = merged_path;
    }
    if (!mask_path.empty()) {
        io::write_mask(mask_path, result.retained.indices, dump.tokens.height(), dump.tokens.width());
    }
    emit(reduction_json(result, original, rebuilt, merged), out_path, out);
}

std::vector<fs::path> dumps_in(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".g2fd") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

int report(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    return e.is_input_error() ? kInputError : kInternalError;
}

int run_reduce(const ReduceOptions& o, std::ostream& out, std::ostream& err) {
    auto config = make_config(o.rho, o.kmin, o.lambda, o.seed);
    const auto strategy = parse_strategy(o.strategy);
    if (!strategy) throw Error(ErrorCode::InvalidConfig, "unknown strategy \"" + o.strategy + "\"");
    config.strategy = *strategy;
    const auto layout = load_layout(o.layout);

    if (!fs::is_directory(o.features)) {
        reduce_one(o.features, config, layout, o.out, o.mask, o.merged_out, out);
        return kSuccess;
    }

    // Directory mode: every *.g2fd becomes <out>/<stem>.json (plus .pgm/.f32 when requested).
    if (o.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out must name a directory when --features is one");
    fs::create_directories(o.out);
    if (!o.mask.empty()) fs::create_directories(o.mask);
    if (!o.merged_out.empty()) fs::create_directories(o.merged_out);

    const auto files = dumps_in(o.features);
    std::vector<std::future<std::optional<Error>>> jobs;
    for (const auto& file : files) {
        jobs.push_back(std::async(std::launch::async, [&, file]() -> std::optional<Error> {
            const auto stem = file.stem().string();
            const auto target = [&](const std::string& dir, const char* ext) {
                return dir.empty() ? std::string{} : (fs::path(dir) / (stem + ext)).string();
            };
            std::ostringstream sink;
            try {
                reduce_one(file, config, layout, target(o.out, ".json"), target(o.mask, ".pgm"),
                           target(o.merged_out, ".f32"), sink);
            } catch (const Error& e) {
                return e;
            } catch (const std::exception& e) {
                return Error(ErrorCode::Internal, file.string() + ": " + e.what());
            }
            return std::nullopt;
        }));
    }
    int status = kSuccess;
    for (auto& job : jobs) {
        if (auto failure = job.get()) status = std::max(status, report(*failure, err));
    }
    return status;
}

int run_cost(const CostOptions& o, std::ostream& out) {
    if (o.text < 0) throw Error(ErrorCode::InvalidConfig, "text must be >= 0");
    if (o.visual < 1) throw Error(ErrorCode::InvalidConfig, "visual must be >= 1");
    if (o.kmin < 1) throw Error(ErrorCode::InvalidConfig, "kmin must be >= 1");
    const auto spec = o.spec.empty() ? reference_model_spec() : parse_model_spec(read_text(o.spec));
    const auto n_visual = static_cast<std::uint64_t>(o.visual);
    const auto n_text = static_cast<std::uint64_t>(o.text);
    const auto budget = compute_budget(o.rho, n_visual, static_cast<std::size_t>(o.kmin));
    const auto cost = compare(spec, n_text, n_visual, budget.k);
    out << to_text(cost_json(spec, cost, n_text, n_visual, budget.k));
    return kSuccess;
}

double overlap(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(a.size());
}

int run_compare(const CompareOptions& o, std::ostream& out) {
    const auto base = make_config(o.rho, o.kmin, o.lambda, o.seed);
    const auto dump = io::read_dump(o.features);

    Json doc;
    doc["format"] = "g2tr.compare.v1";
    Json cfg;
    cfg["rho"] = fixed9(base.rho);
    cfg["kmin"] = base.k_min;
    cfg["lambda"] = fixed9(base.lambda);
    cfg["seed"] = base.seed;
    doc["config"] = cfg;

    Json rows = Json::array();
    Json warnings = Json::array();
    std::vector<std::pair<Strategy, std::vector<std::size_t>>> kept;
    for (auto strategy : {Strategy::Latent, Strategy::Random, Strategy::Attention, Strategy::TextSimilarity}) {
        auto config = base;
        config.strategy = strategy;
        try {
            const auto result = reduce(dump, config);
            Json row;
            row["strategy"] = std::string(to_string(strategy));
            row["budget"] = result.budget.k;
            row["retained"] = result.retained.indices;
            row["surrogate"] = fixed9(result.report.surrogate);
            row["merge_error"] = fixed9(result.report.merge_error);
            row["prune_error"] = fixed9(result.report.prune_error);
            rows.push_back(row);
            kept.emplace_back(strategy, result.retained.indices);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MissingSideInput) throw;
            Json w;
            w["strategy"] = std::string(to_string(strategy));
            w["warning"] = e.message();
            warnings.push_back(w);
        }
    }
    doc["strategies"] = rows;
    doc["warnings"] = warnings;

    Json overlaps = Json::array();
    for (std::size_t a = 0; a < kept.size(); ++a) {
        for (std::size_t b = a + 1; b < kept.size(); ++b) {
            Json pair;
            pair["a"] = std::string(to_string(kept[a].first));
            pair["b"] = std::string(to_string(kept[b].first));
            pair["overlap"] = fixed9(overlap(kept[a].second, kept[b].second));
            overlaps.push_back(pair);
        }
    }
    doc["overlap"] = overlaps;
    emit(doc, o.out, out);
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generation-guided visual token reduction engine", "g2tr"};
    app.require_subcommand(1);

    ReduceOptions reduce_opts;
    auto* reduce_cmd = app.add_subcommand("reduce", "Score, select and merge the visual tokens of a feature dump");
    reduce_cmd->add_option("--features", reduce_opts.features, "G2FD dump (or a directory of *.g2fd)")->required();
    reduce_cmd->add_option("--rho", reduce_opts.rho, "Keep ratio in [0, 1]")->capture_default_str();
    reduce_cmd->add_option("--kmin", reduce_opts.kmin, "Minimum token budget")->capture_default_str();
    reduce_cmd->add_option("--lambda", reduce_opts.lambda, "Weight of the retained token when merging")
        ->capture_default_str();
    reduce_cmd->add_option("--strategy", reduce_opts.strategy, "latent|random|attn|textsim")->capture_default_str();
    reduce_cmd->add_option("--seed", reduce_opts.seed, "Seed of the random strategy")->capture_default_str();
    reduce_cmd->add_option("--out", reduce_opts.out, "Result JSON path (stdout when omitted)");
    reduce_cmd->add_option("--mask", reduce_opts.mask, "Retained-token mask (PGM)");
    reduce_cmd->add_option("--merged-out", reduce_opts.merged_out, "Merged features as raw f32le instead of inline");
    reduce_cmd->add_option("--layout", reduce_opts.layout, "Sequence layout JSON to rebuild");

    CostOptions cost_opts;
    auto* cost_cmd = app.add_subcommand("cost", "Prefill FLOPs and KV-cache savings for a token mix");
    cost_cmd->add_option("--spec", cost_opts.spec, "Model geometry JSON (built-in reference when omitted)");
    cost_cmd->add_option("--text", cost_opts.text, "Text tokens")->required();
    cost_cmd->add_option("--visual", cost_opts.visual, "Visual tokens before reduction")->required();
    cost_cmd->add_option("--rho", cost_opts.rho, "Keep ratio in [0, 1]")->capture_default_str();
    cost_cmd->add_option("--kmin", cost_opts.kmin, "Minimum token budget")->capture_default_str();

    CompareOptions cmp_opts;
    auto* cmp_cmd = app.add_subcommand("compare", "Run every guidance strategy on one dump");
    cmp_cmd->add_option("--features", cmp_opts.features, "G2FD dump")->required();
    cmp_cmd->add_option("--rho", cmp_opts.rho, "Keep ratio in [0, 1]")->capture_default_str();
    cmp_cmd->add_option("--kmin", cmp_opts.kmin, "Minimum token budget")->capture_default_str();
    cmp_cmd->add_option("--lambda", cmp_opts.lambda, "Weight of the retained token when merging")
        ->capture_default_str();
    cmp_cmd->add_option("--seed", cmp_opts.seed, "Seed of the random strategy")->capture_default_str();
    cmp_cmd->add_option("--out", cmp_opts.out, "Comparison JSON path (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        if (*reduce_cmd) return run_reduce(reduce_opts, out, err);
        if (*cost_cmd) return run_cost(cost_opts, out);
        if (*cmp_cmd) return run_compare(cmp_opts, out);
    } catch (const Error& e) {
        return report(e, err);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}

}  // namespace g2tr::cli
