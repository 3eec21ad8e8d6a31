#include "gswl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "gswl/ect.hpp"
#include "gswl/generators.hpp"
#include "gswl/mpsn.hpp"
#include "gswl/refinement.hpp"

namespace gswl {

using nlohmann::json;

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::deform_separation: return "deform_separation";
        case Scenario::ect_realization: return "ect_realization";
        case Scenario::coboundary_ablation: return "coboundary_ablation";
        case Scenario::stability_scan: return "stability_scan";
        case Scenario::mantra_suite: return "mantra_suite";
        case Scenario::recovery_check: return "recovery_check";
    }
    return "unknown";
}

Scenario parse_scenario(const std::string& s) {
    for (auto sc : {Scenario::deform_separation, Scenario::ect_realization, Scenario::coboundary_ablation,
                    Scenario::stability_scan, Scenario::mantra_suite, Scenario::recovery_check}) {
        if (to_string(sc) == s) return sc;
    }
    throw ConfigError("/scenario", "unknown scenario '" + s + "'");
}

// ------------------------------------------------------------------- config

namespace {

template <typename T>
T read_number(const json& j, const std::string& pointer) {
    if constexpr (std::is_floating_point_v<T>) {
        if (!j.is_number()) throw ConfigError(pointer, "expected a number");
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
            throw ConfigError(pointer, "expected a non-negative integer");
        }
    } else {
        if (!j.is_number_integer()) throw ConfigError(pointer, "expected an integer");
    }
    return j.get<T>();
}

template <typename T>
std::vector<T> read_list(const json& j, const std::string& pointer) {
    if (!j.is_array()) throw ConfigError(pointer, "expected an array");
    if (j.empty()) throw ConfigError(pointer, "must not be empty");
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number<T>(j[i], pointer + "/" + std::to_string(i)));
    return out;
}

void require(bool ok, const std::string& pointer, const std::string& message) {
    if (!ok) throw ConfigError(pointer, message);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    static const std::set<std::string> known{"scenario", "seeds", "depths", "directions", "thresholds", "amplitude",
                                             "deltas", "trials", "quadrature", "quantization_digits", "output"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("/" + key, "unknown field");
    }
    ExperimentConfig c;
    if (!j.contains("scenario")) throw ConfigError("/scenario", "required field missing");
    if (!j["scenario"].is_string()) throw ConfigError("/scenario", "expected a string");
    c.scenario = parse_scenario(j["scenario"].get<std::string>());

    if (j.contains("seeds")) c.seeds = read_list<std::uint64_t>(j["seeds"], "/seeds");
    if (j.contains("depths")) {
        c.depths = read_list<int>(j["depths"], "/depths");
        for (std::size_t i = 0; i < c.depths.size(); ++i) {
            require(c.depths[i] >= 0 && c.depths[i] <= 64, "/depths/" + std::to_string(i), "must be in [0, 64]");
        }
    }
    if (j.contains("directions")) c.directions = read_number<int>(j["directions"], "/directions");
    require(c.directions >= 1, "/directions", "must be >= 1");
    if (j.contains("thresholds")) c.thresholds = read_number<int>(j["thresholds"], "/thresholds");
    require(c.thresholds >= 1, "/thresholds", "must be >= 1");
    if (j.contains("amplitude")) c.amplitude = read_number<double>(j["amplitude"], "/amplitude");
    require(std::isfinite(c.amplitude) && c.amplitude >= 0.0, "/amplitude", "must be finite and >= 0");
    if (j.contains("deltas")) {
        c.deltas = read_list<double>(j["deltas"], "/deltas");
        for (std::size_t i = 0; i < c.deltas.size(); ++i) {
            require(c.deltas[i] > 0.0 && std::isfinite(c.deltas[i]), "/deltas/" + std::to_string(i), "must be > 0");
        }
    }
    if (j.contains("trials")) c.trials = read_number<int>(j["trials"], "/trials");
    require(c.trials >= 1, "/trials", "must be >= 1");
    if (j.contains("quadrature")) c.quadrature = read_number<int>(j["quadrature"], "/quadrature");
    require(c.quadrature >= 1, "/quadrature", "must be >= 1");
    if (j.contains("quantization_digits")) {
        c.quantization_digits = read_number<int>(j["quantization_digits"], "/quantization_digits");
    }
    require(c.quantization_digits >= 0 && c.quantization_digits <= 15, "/quantization_digits", "must be in [0, 15]");
    if (j.contains("output")) {
        if (!j["output"].is_string()) throw ConfigError("/output", "expected a string");
        c.output = j["output"].get<std::string>();
    }
    return c;
}

json ExperimentConfig::to_json() const {
    return json{{"scenario", to_string(scenario)},
                {"seeds", seeds},
                {"depths", depths},
                {"directions", directions},
                {"thresholds", thresholds},
                {"amplitude", amplitude},
                {"deltas", deltas},
                {"trials", trials},
                {"quadrature", quadrature},
                {"quantization_digits", quantization_digits},
                {"output", output}};
}

// ------------------------------------------------------------------- report

bool Report::passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; });
}

json Report::to_json() const {
    json out;
    out["scenario"] = scenario;
    out["passed"] = passed();
    out["environment"] = environment;
    out["cases"] = json::array();
    for (const auto& c : cases) {
        json row{{"id", c.id}, {"pass", c.pass}, {"metrics", c.metrics}};
        if (!c.note.empty()) row["note"] = c.note;
        out["cases"].push_back(std::move(row));
    }
    return out;
}

std::string report_csv(const Report& report) {
    std::set<std::string> names;
    for (const auto& c : report.cases) {
        for (const auto& [k, v] : c.metrics) names.insert(k);
    }
    std::ostringstream os;
    os << "case_id,pass";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (const auto& c : report.cases) {
        os << c.id << ',' << (c.pass ? "true" : "false");
        for (const auto& n : names) {
            os << ',';
            auto it = c.metrics.find(n);
            if (it != c.metrics.end()) os << json(it->second).dump();
        }
        os << '\n';
    }
    return os.str();
}

void report_tables(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / (report.scenario + ".csv"));
        if (!f) throw std::runtime_error("cannot write " + (dir / (report.scenario + ".csv")).string());
        f << report_csv(report);
    }
    std::ofstream f(dir / (report.scenario + ".json"));
    if (!f) throw std::runtime_error("cannot write " + (dir / (report.scenario + ".json")).string());
    f << report.to_json().dump(2) << '\n';
}

// ---------------------------------------------------------------- scenarios

namespace {

EmbeddedComplex with_digits(const EmbeddedComplex& k, int digits) {
    return {k.complex(), Embedding(k.embedding().coords(), digits)};
}

std::vector<EmbeddedComplex> with_digits(const std::vector<EmbeddedComplex>& family, int digits) {
    std::vector<EmbeddedComplex> out;
    for (const auto& k : family) out.push_back(with_digits(k, digits));
    return out;
}

std::string pad(int i) {
    std::string s = std::to_string(i);
    return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

std::string delta_label(double delta) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << delta;
    return os.str();
}

RefinementConfig refinement(const ExperimentConfig& c, RefinementMode mode, int depth) {
    RefinementConfig r;
    r.mode = mode;
    r.depth = depth;
    r.quantization_digits = c.quantization_digits;
    return r;
}

void deform_separation(const ExperimentConfig& c, Report& report) {
    const auto family =
        with_digits(deformation_suite(grid_triangulation(8, 10), c.seeds, c.amplitude), c.quantization_digits);
    const int max_depth = *std::max_element(c.depths.begin(), c.depths.end());
    ColorInterner gswl_interner;
    ColorInterner swl_interner;
    std::vector<Coloring> gswl;
    std::vector<Coloring> swl;
    for (const auto& k : family) {
        gswl.push_back(refine(k, refinement(c, RefinementMode::gswl, max_depth), gswl_interner));
        swl.push_back(refine(k, refinement(c, RefinementMode::swl, max_depth), swl_interner));
    }
    for (int depth : std::set<int>(c.depths.begin(), c.depths.end())) {
        std::size_t pairs = 0, gswl_separated = 0, swl_separated = 0;
        for (std::size_t i = 0; i < family.size(); ++i) {
            for (std::size_t j = i + 1; j < family.size(); ++j) {
                ++pairs;
                if (!equivalent_at(gswl[i], gswl[j], depth)) ++gswl_separated;
                if (!equivalent_at(swl[i], swl[j], depth)) ++swl_separated;
            }
        }
        CaseResult r;
        r.id = "depth_" + pad(depth);
        r.metrics = {{"members", static_cast<double>(family.size())},
                     {"pairs", static_cast<double>(pairs)},
                     {"gswl_separated", static_cast<double>(gswl_separated)},
                     {"swl_separated", static_cast<double>(swl_separated)}};
        r.pass = gswl_separated == pairs && swl_separated == 0;
        report.cases.push_back(std::move(r));
    }
}

void ect_realization(const ExperimentConfig& c, Report& report) {
    const auto family =
        with_digits(deformation_suite(grid_triangulation(4, 3), c.seeds, c.amplitude), c.quantization_digits);
    const auto dirs = uniform_directions(2, c.directions);
    const auto thresholds = spanning_thresholds(family, dirs, c.thresholds, 0.1);
    for (int depth : std::set<int>(c.depths.begin(), c.depths.end())) {
        CaseResult r;
        r.id = "depth_" + pad(depth);
        const auto cfg = refinement(c, RefinementMode::gswl, depth);
        if (depth < 2) {
            try {
                construct_ect_readout(family, dirs, thresholds, depth, cfg);
                r.note = "construction accepted a depth below the complex dimension";
            } catch (const std::invalid_argument&) {
                r.pass = true;
                r.note = "depth below complex dimension; construction refused";
            }
            report.cases.push_back(std::move(r));
            continue;
        }
        const auto readout = construct_ect_readout(family, dirs, thresholds, depth, cfg);
        const auto realizer = construct_realizer(family, depth, cfg);
        std::size_t mismatches = 0, histogram_mismatches = 0;
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (readout.evaluate(family[i]) != sampled_ect(family[i], dirs, thresholds).flatten()) ++mismatches;
            if (readout_histogram(realizer, family[i]) != color_histogram(realizer, realizer.colorings[i])) {
                ++histogram_mismatches;
            }
        }
        r.metrics = {{"members", static_cast<double>(family.size())},
                     {"hidden_dim", static_cast<double>(readout.realizer.model.hidden_dim)},
                     {"ect_mismatches", static_cast<double>(mismatches)},
                     {"histogram_mismatches", static_cast<double>(histogram_mismatches)}};
        r.pass = mismatches == 0 && histogram_mismatches == 0;
        report.cases.push_back(std::move(r));
    }
}

std::vector<Color> vertex_colors(const EmbeddedComplex& k, const Coloring& coloring, int depth) {
    std::vector<Color> out;
    const auto& simplices = k.complex().simplices();
    for (std::size_t i = 0; i < simplices.size(); ++i) {
        if (simplices[i].dim() == 0) out.push_back(coloring.round(depth)[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Same vertices and edges; the first member carries every triangle, the
/// second drops `hollow` of them.
std::pair<EmbeddedComplex, EmbeddedComplex> filled_and_hollow(const EmbeddedComplex& filled, std::size_t hollow) {
    std::vector<Simplex> kept;
    std::size_t dropped = 0;
    for (const auto& s : filled.complex().simplices()) {
        if (s.dim() == 2 && dropped < hollow) {
            ++dropped;
            continue;
        }
        kept.push_back(s);
    }
    return {filled, EmbeddedComplex(AbstractComplex::from_simplices(std::move(kept)), filled.embedding())};
}

void coboundary_ablation(const ExperimentConfig& c, Report& report) {
    const Embedding tri({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {0.0, 1.0}}}, c.quantization_digits);
    const std::vector<std::pair<std::string, std::pair<EmbeddedComplex, EmbeddedComplex>>> pairs{
        {"triangle", filled_and_hollow(EmbeddedComplex(build_complex({{0, 1, 2}}), tri), 1)},
        {"grid_3x3", filled_and_hollow(with_digits(grid_triangulation(3, 3), c.quantization_digits), 1)},
        {"grid_4x3", filled_and_hollow(with_digits(grid_triangulation(4, 3), c.quantization_digits), 6)},
    };
    for (const auto& [name, pair] : pairs) {
        const auto& [filled, hollow] = pair;
        for (auto adjacency : {Adjacency::boundary_only, Adjacency::full}) {
            auto cfg = refinement(c, RefinementMode::gswl, 8);
            cfg.adjacency = adjacency;
            ColorInterner interner;
            const auto a = refine(filled, cfg, interner);
            const auto b = refine(hollow, cfg, interner);
            if (adjacency == Adjacency::boundary_only) {
                for (int depth : {1, 4, 8}) {
                    CaseResult r;
                    r.id = name + "_boundary_only_depth_" + pad(depth);
                    r.pass = vertex_colors(filled, a, depth) == vertex_colors(hollow, b, depth);
                    r.metrics = {{"vertex_colors_equal", r.pass ? 1.0 : 0.0}};
                    report.cases.push_back(std::move(r));
                }
            } else {
                int separated_at = -1;
                for (int depth = 0; depth <= 8 && separated_at < 0; ++depth) {
                    if (vertex_colors(filled, a, depth) != vertex_colors(hollow, b, depth)) separated_at = depth;
                }
                CaseResult r;
                r.id = name + "_full";
                r.metrics = {{"separating_depth", static_cast<double>(separated_at)}};
                r.pass = separated_at >= 0 && separated_at <= 2;
                report.cases.push_back(std::move(r));
            }
        }
    }
}

void stability_scan(const ExperimentConfig& c, Report& report) {
    const auto base = with_digits(grid40(), c.quantization_digits);
    const auto quad = sphere_quadrature(2, c.quadrature);
    const std::uint64_t seed = c.seeds.front();
    {
        CaseResult r;
        r.id = "identity";
        const double d = ect_distance(base, base, quad).total;
        r.metrics = {{"distance", d}};
        r.pass = d == 0.0;
        report.cases.push_back(std::move(r));
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t di = 0; di < c.deltas.size(); ++di) {
        const double delta = c.deltas[di];
        std::vector<double> ratios;
        double sum = 0.0;
        for (int t = 0; t < c.trials; ++t) {
            const auto moved = perturb_embedding(base, delta, seed * 1000003u + di * 1000u + static_cast<unsigned>(t));
            const double d = ect_distance(base, moved, quad).total;
            double displacement = 0.0;
            for (const auto& [v, p] : base.embedding().coords()) {
                const auto& q = moved.embedding().at(v);
                double sq = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i) sq += (p[i] - q[i]) * (p[i] - q[i]);
                displacement += std::sqrt(sq);
            }
            sum += d;
            ratios.push_back(d / displacement);
        }
        const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
        lo = std::min(lo, *mn);
        hi = std::max(hi, *mx);
        CaseResult r;
        r.id = "delta_" + delta_label(delta);
        r.metrics = {{"delta", delta},
                     {"mean_distance", sum / c.trials},
                     {"mean_ratio", std::accumulate(ratios.begin(), ratios.end(), 0.0) / c.trials},
                     {"min_ratio", *mn},
                     {"max_ratio", *mx}};
        r.pass = *mn > 0.0;
        report.cases.push_back(std::move(r));
    }
    CaseResult r;
    r.id = "ratio_band";
    r.metrics = {{"min_ratio", lo}, {"max_ratio", hi}, {"spread", lo > 0.0 ? hi / lo : 0.0}};
    r.pass = lo > 0.0 && hi / lo <= 4.0;
    report.cases.push_back(std::move(r));
}

void mantra_suite(const ExperimentConfig& c, Report& report) {
    for (const auto& name : library_names()) {
        const auto lib = library_triangulation(name);
        const auto surface = check_closed_surface(lib.complex);
        const auto spectral = spectral_embedding(lib.complex, c.seeds.front(), c.quantization_digits);
        const EmbeddedComplex k(lib.complex, spectral.embedding);
        CaseResult r;
        r.id = name;
        r.metrics = {{"vertices", static_cast<double>(lib.complex.count(0))},
                     {"edges", static_cast<double>(lib.complex.count(1))},
                     {"triangles", static_cast<double>(lib.complex.count(2))},
                     {"chi", static_cast<double>(surface.chi)},
                     {"expected_chi", static_cast<double>(lib.expected_chi)},
                     {"gswl_stable_round", static_cast<double>(stable_round(k, refinement(c, RefinementMode::gswl, 0), 16))},
                     {"swl_stable_round", static_cast<double>(stable_round(k, refinement(c, RefinementMode::swl, 0), 16))},
                     {"degenerate_spectrum", spectral.degenerate ? 1.0 : 0.0},
                     {"jittered", spectral.jittered ? 1.0 : 0.0}};
        r.pass = surface.valid() && surface.chi == lib.expected_chi;
        if (!r.pass) r.note = "library triangulation is not a closed surface with the expected Euler characteristic";
        report.cases.push_back(std::move(r));
    }
}

void recovery_check(const ExperimentConfig& c, Report& report) {
    auto family = deformation_suite(grid_triangulation(4, 3), c.seeds, c.amplitude);
    for (std::uint64_t s : c.seeds) family.push_back(perturb_embedding(grid_triangulation(4, 3), 0.05, s + 7919));
    family = with_digits(family, c.quantization_digits);

    for (int depth : std::set<int>(c.depths.begin(), c.depths.end())) {
        ColorInterner interner;
        const auto rep = coordinate_recovery_check(family, depth, interner, refinement(c, RefinementMode::gswl, depth));
        CaseResult r;
        r.id = "colors_depth_" + pad(depth);
        r.metrics = {{"checked_simplices", static_cast<double>(rep.checked_simplices)},
                     {"same_color_pairs", static_cast<double>(rep.same_color_pairs)},
                     {"cross_complex_pairs", static_cast<double>(rep.cross_complex_pairs)},
                     {"excluded_pairs", static_cast<double>(rep.excluded_pairs)},
                     {"decode_failures", static_cast<double>(rep.decode_failures)},
                     {"violations", static_cast<double>(rep.violations.size())}};
        r.pass = rep.ok();
        report.cases.push_back(std::move(r));
    }

    const auto realizer = construct_realizer(family, 2, refinement(c, RefinementMode::gswl, 2));
    const auto quad = sphere_quadrature(2, c.quadrature);
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& k = family[i];
        const auto recovered = recover_coords(skip_forward(realizer.model, k));
        double max_error = 0.0;
        for (const auto& [v, p] : k.embedding().coords()) {
            const auto& q = recovered.at(v);
            for (std::size_t d = 0; d < p.size(); ++d) max_error = std::max(max_error, std::abs(p[d] - q[d]));
        }
        const double dist = ect_distance(k.complex(), k.embedding(), recovered, quad).total;
        CaseResult r;
        r.id = "skip_member_" + pad(static_cast<int>(i));
        r.metrics = {{"max_coordinate_error", max_error}, {"ect_distance", dist}};
        r.pass = max_error == 0.0 && dist == 0.0;
        report.cases.push_back(std::move(r));
    }
}

}  // namespace

Report run(const ExperimentConfig& config) {
    Report report;
    report.scenario = to_string(config.scenario);
    report.environment = {{"version", kVersion},
                          {"quantization_digits", config.quantization_digits},
                          {"config", config.to_json()}};
    switch (config.scenario) {
        case Scenario::deform_separation: deform_separation(config, report); break;
        case Scenario::ect_realization: ect_realization(config, report); break;
        case Scenario::coboundary_ablation: coboundary_ablation(config, report); break;
        case Scenario::stability_scan: stability_scan(config, report); break;
        case Scenario::mantra_suite: mantra_suite(config, report); break;
        case Scenario::recovery_check: recovery_check(config, report); break;
    }
    std::sort(report.cases.begin(), report.cases.end(),
              [](const CaseResult& a, const CaseResult& b) { return a.id < b.id; });
    return report;
}

}  // namespace gswl
