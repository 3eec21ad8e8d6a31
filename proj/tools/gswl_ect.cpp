// gswl-ect: command-line front end for the gswl library.
//
// Exit codes: 0 success (or "equivalent" / all cases passed), 1 negative
// verdict or failed case, 2 usage or input error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gswl/complex.hpp"
#include "gswl/ect.hpp"
#include "gswl/generators.hpp"
#include "gswl/harness.hpp"
#include "gswl/io.hpp"
#include "gswl/mpsn.hpp"
#include "gswl/refinement.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gswl;

namespace {

struct RefineOptions {
    std::string mode = "gswl";
    std::string phi = "dimension_only";
    std::string adjacency = "full";
    int depth = 0;
};

RefinementConfig make_config(const RefineOptions& o) {
    RefinementConfig cfg;
    cfg.mode = parse_mode(o.mode);
    cfg.phi = parse_phi(o.phi);
    cfg.adjacency = parse_adjacency(o.adjacency);
    cfg.depth = o.depth;
    cfg.quantization_digits = default_quantization_digits();
    return cfg;
}

void add_refine_options(CLI::App* cmd, RefineOptions& o) {
    cmd->add_option("--mode", o.mode, "wl | swl | gswl")->capture_default_str();
    cmd->add_option("--phi", o.phi, "dimension_only | sorted_coords | derived_features")->capture_default_str();
    cmd->add_option("--adjacency", o.adjacency, "full | boundary_only | coboundary_only")->capture_default_str();
    cmd->add_option("--depth", o.depth, "refinement rounds")->capture_default_str()->check(CLI::NonNegativeNumber);
}

json histogram(const EmbeddedComplex& k, const std::vector<Color>& colors) {
    std::map<std::uint32_t, std::pair<int, std::size_t>> counts;
    for (std::size_t i = 0; i < colors.size(); ++i) {
        auto& [dim, n] = counts[colors[i].id];
        dim = k.complex().simplices()[i].dim();
        ++n;
    }
    json out = json::array();
    for (const auto& [id, entry] : counts) out.push_back({{"color", id}, {"dim", entry.first}, {"count", entry.second}});
    return out;
}

void emit(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

std::vector<Direction> directions_for(const EmbeddedComplex& k, int n) {
    return uniform_directions(k.embedding().ambient_dim(), n);
}

std::vector<fs::path> family_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".json" || ext == ".off")) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw std::invalid_argument("no .json or .off complexes in " + dir.string());
    return out;
}

json vector_json(const Vector& v) { return json(v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric simplicial WL refinement, Euler characteristic transforms and constructive message passing"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    int exit_code = 0;

    // validate
    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a complex file and print its face counts");
    validate->add_option("input", validate_path)->required();
    validate->callback([&] {
        const auto k = load_complex(validate_path);
        json counts = json::array();
        for (int d = 0; d <= k.complex().max_dim(); ++d) counts.push_back(k.complex().count(d));
        emit({{"valid", true},
              {"ambient_dim", k.embedding().ambient_dim()},
              {"dimension", k.complex().max_dim()},
              {"counts", counts},
              {"euler_characteristic", euler_characteristic(k.complex())}},
             "");
    });

    // refine
    std::string refine_path;
    RefineOptions refine_opts;
    auto* refine_cmd = app.add_subcommand("refine", "per-round color histograms");
    refine_cmd->add_option("input", refine_path)->required();
    add_refine_options(refine_cmd, refine_opts);
    refine_cmd->callback([&] {
        const auto cfg = make_config(refine_opts);
        const auto k = load_complex(refine_path, cfg.quantization_digits);
        ColorInterner interner;
        const auto coloring = gswl::refine(k, cfg, interner);
        json rounds = json::array();
        for (int l = 0; l <= coloring.depth(); ++l) {
            rounds.push_back({{"round", l}, {"histogram", histogram(k, coloring.round(l))}});
        }
        emit({{"mode", to_string(cfg.mode)},
              {"phi", to_string(cfg.phi)},
              {"adjacency", to_string(cfg.adjacency)},
              {"depth", cfg.depth},
              {"rounds", rounds}},
             "");
    });

    // equiv
    std::string equiv_a, equiv_b;
    RefineOptions equiv_opts;
    auto* equiv = app.add_subcommand("equiv", "round-L equivalence of two complexes (exit 0 iff equivalent)");
    equiv->add_option("a", equiv_a)->required();
    equiv->add_option("b", equiv_b)->required();
    add_refine_options(equiv, equiv_opts);
    equiv->callback([&] {
        const auto cfg = make_config(equiv_opts);
        const auto a = load_complex(equiv_a, cfg.quantization_digits);
        const auto b = load_complex(equiv_b, cfg.quantization_digits);
        ColorInterner interner;
        const bool same = equivalent_at(a, b, cfg, cfg.depth, interner);
        emit({{"equivalent", same}, {"mode", to_string(cfg.mode)}, {"depth", cfg.depth}}, "");
        exit_code = same ? 0 : 1;
    });

    // ect
    std::string ect_path, ect_out;
    int ect_dirs = 8, ect_thresholds = 10;
    auto* ect = app.add_subcommand("ect", "sampled Euler characteristic transform as CSV");
    ect->add_option("input", ect_path)->required();
    ect->add_option("--directions", ect_dirs)->capture_default_str()->check(CLI::PositiveNumber);
    ect->add_option("--thresholds", ect_thresholds)->capture_default_str()->check(CLI::PositiveNumber);
    ect->add_option("--out", ect_out, "CSV path (stdout if omitted)");
    ect->callback([&] {
        const auto k = load_complex(ect_path);
        const auto dirs = directions_for(k, ect_dirs);
        const auto sampled = sampled_ect(k, dirs, spanning_thresholds({k}, dirs, ect_thresholds, 0.1));
        std::ostringstream os;
        os << "direction,threshold,chi\n";
        for (std::size_t i = 0; i < sampled.directions.size(); ++i) {
            for (std::size_t j = 0; j < sampled.thresholds.size(); ++j) {
                os << i << ',' << json(sampled.thresholds[j]).dump() << ',' << sampled.values[i][j] << '\n';
            }
        }
        if (ect_out.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream f(ect_out);
            if (!f) throw std::runtime_error("cannot write " + ect_out);
            f << os.str();
        }
    });

    // ect-dist
    std::string dist_a, dist_b;
    int dist_quad = 0;
    auto* ect_dist = app.add_subcommand("ect-dist", "ECT distance between two embeddings of one complex");
    ect_dist->add_option("a", dist_a)->required();
    ect_dist->add_option("b", dist_b)->required();
    ect_dist->add_option("--quad", dist_quad, "quadrature directions (default by dimension)")
        ->check(CLI::PositiveNumber);
    ect_dist->callback([&] {
        const auto a = load_complex(dist_a);
        const auto b = load_complex(dist_b);
        const int d = a.embedding().ambient_dim();
        const auto quad = dist_quad > 0 ? sphere_quadrature(d, dist_quad) : default_quadrature(d);
        const auto result = ect_distance(a, b, quad);
        json per = json::array();
        for (const auto& [nu, l1] : result.per_direction) per.push_back({{"direction", nu.vector()}, {"l1", l1}});
        emit({{"distance", result.total}, {"quadrature", result.quadrature}, {"per_direction", per}}, "");
    });

    // realize
    std::string realize_dir, realize_readout = "histogram";
    int realize_depth = 2, realize_dirs = 8, realize_thresholds = 10;
    auto* realize = app.add_subcommand("realize", "build the constructive message-passing model for a family");
    realize->add_option("--family", realize_dir, "directory of .json/.off complexes")->required();
    realize->add_option("--depth", realize_depth)->capture_default_str()->check(CLI::NonNegativeNumber);
    realize->add_option("--readout", realize_readout)
        ->capture_default_str()
        ->check(CLI::IsMember({"histogram", "ect"}));
    realize->add_option("--directions", realize_dirs)->capture_default_str()->check(CLI::PositiveNumber);
    realize->add_option("--thresholds", realize_thresholds)->capture_default_str()->check(CLI::PositiveNumber);
    realize->callback([&] {
        std::vector<EmbeddedComplex> family;
        json members = json::array();
        for (const auto& p : family_files(realize_dir)) {
            family.push_back(load_complex(p));
            members.push_back(p.filename().string());
        }
        RefinementConfig cfg;
        cfg.depth = realize_depth;
        cfg.quantization_digits = default_quantization_digits();
        json readouts = json::array();
        json summary{{"members", members}, {"depth", realize_depth}, {"readout", realize_readout}};
        if (realize_readout == "histogram") {
            const auto r = construct_realizer(family, realize_depth, cfg);
            for (const auto& k : family) readouts.push_back(vector_json(readout_histogram(r, k)));
            summary["hidden_dim"] = r.model.hidden_dim;
            summary["colors_per_round"] = json::array();
            for (const auto& rc : r.round_colors) summary["colors_per_round"].push_back(rc.size());
        } else {
            const auto dirs = uniform_directions(family.front().embedding().ambient_dim(), realize_dirs);
            const auto thresholds = spanning_thresholds(family, dirs, realize_thresholds, 0.1);
            const auto r = construct_ect_readout(family, dirs, thresholds, realize_depth, cfg);
            std::size_t mismatches = 0;
            for (const auto& k : family) {
                const auto values = r.evaluate(k);
                if (values != sampled_ect(k, dirs, thresholds).flatten()) ++mismatches;
                readouts.push_back(values);
            }
            summary["hidden_dim"] = r.realizer.model.hidden_dim;
            summary["thresholds"] = thresholds;
            summary["direct_ect_mismatches"] = mismatches;
        }
        summary["readouts"] = readouts;
        emit(summary, "");
    });

    // check-upper
    std::string upper_a, upper_b;
    int upper_depth = 2, upper_trials = 50;
    std::uint64_t upper_seed = 0;
    auto* upper = app.add_subcommand("check-upper", "random message-passing models cannot separate an equivalent pair");
    upper->add_option("a", upper_a)->required();
    upper->add_option("b", upper_b)->required();
    upper->add_option("--depth", upper_depth)->capture_default_str()->check(CLI::NonNegativeNumber);
    upper->add_option("--trials", upper_trials)->capture_default_str()->check(CLI::PositiveNumber);
    upper->add_option("--seed", upper_seed)->capture_default_str();
    upper->callback([&] {
        const auto a = load_complex(upper_a);
        const auto b = load_complex(upper_b);
        RefinementConfig cfg;
        cfg.quantization_digits = default_quantization_digits();
        const auto rep = upper_bound_check(a, b, upper_depth, upper_trials, upper_seed, cfg);
        emit({{"skipped", rep.skipped},
              {"trials", rep.trials},
              {"agreements", rep.agreements},
              {"max_abs_diff", rep.max_abs_diff},
              {"note", rep.note},
              {"ok", rep.ok()}},
             "");
        exit_code = rep.ok() ? 0 : 1;
    });

    // generate
    std::string gen_kind = "grid", gen_deform, gen_library, gen_embed = "spectral", gen_out;
    int gen_nx = 8, gen_ny = 5, gen_segments = 6;
    double gen_spacing = 1.0, gen_amplitude = 0.1;
    std::uint64_t gen_seed = 0;
    auto* generate = app.add_subcommand("generate", "write a generated complex as JSON");
    generate->add_option("--kind", gen_kind)->capture_default_str()->check(CLI::IsMember({"grid", "disk_fan"}));
    generate->add_option("--nx", gen_nx)->capture_default_str()->check(CLI::Range(2, 1000));
    generate->add_option("--ny", gen_ny)->capture_default_str()->check(CLI::Range(2, 1000));
    generate->add_option("--spacing", gen_spacing)->capture_default_str();
    generate->add_option("--segments", gen_segments)->capture_default_str()->check(CLI::Range(3, 100000));
    generate->add_option("--deform", gen_deform, "bend | twist | stretch | random_smooth");
    generate->add_option("--amplitude", gen_amplitude)->capture_default_str();
    generate->add_option("--seed", gen_seed)->capture_default_str();
    generate->add_option("--library", gen_library, "sphere_S2 | torus_T2 | klein_bottle | rp2");
    generate->add_option("--embed", gen_embed)->capture_default_str()->check(CLI::IsMember({"spectral"}));
    generate->add_option("--out", gen_out, "output path (stdout if omitted)");
    generate->callback([&] {
        MeshSpec spec;
        spec.seed = gen_seed;
        if (!gen_library.empty()) {
            spec.kind = MeshKind::library;
            spec.library = gen_library;
        } else if (gen_kind == "disk_fan") {
            spec.kind = MeshKind::disk_fan;
            spec.segments = gen_segments;
            spec.spacing = gen_spacing;
        } else {
            spec.nx = gen_nx;
            spec.ny = gen_ny;
            spec.spacing = gen_spacing;
        }
        auto k = generate_mesh(spec);
        if (!gen_deform.empty()) k = apply_deformation(k, {parse_deformation(gen_deform), gen_amplitude, gen_seed});
        if (gen_out.empty()) {
            std::cout << complex_to_json(k).dump(2) << '\n';
        } else {
            save_complex(k, gen_out);
        }
    });

    // run
    std::string run_config, run_out;
    auto* run_cmd = app.add_subcommand("run", "run a scenario config and write CSV/JSON reports");
    run_cmd->add_option("config", run_config)->required();
    run_cmd->add_option("--out", run_out, "report directory (overrides the config's output)");
    run_cmd->callback([&] {
        std::ifstream f(run_config);
        if (!f) throw std::invalid_argument("cannot read " + run_config);
        json j;
        try {
            j = json::parse(f);
        } catch (const json::parse_error& e) {
            throw ConfigError("", std::string("invalid JSON: ") + e.what());
        }
        const auto cfg = ExperimentConfig::from_json(j);
        const auto report = gswl::run(cfg);
        const fs::path dir = run_out.empty() ? fs::path(cfg.output) : fs::path(run_out);
        report_tables(report, dir);
        std::size_t failed = 0;
        for (const auto& c : report.cases) {
            if (!c.pass) ++failed;
        }
        std::cout << report.scenario << ": " << report.cases.size() - failed << "/" << report.cases.size()
                  << " cases passed, reports in " << dir.string() << '\n';
        exit_code = report.passed() ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << (e.pointer().empty() ? "/" : e.pointer()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return exit_code;
}
