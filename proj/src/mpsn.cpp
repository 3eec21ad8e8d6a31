#include "gswl/mpsn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gswl {

// ---------------------------------------------------------- lookup tables

LookupFunction::LookupFunction(std::size_t output_dim, MissPolicy miss, int quantization_digits)
    : output_dim_(output_dim), miss_(miss), quantizer_(quantization_digits) {}

bool LookupFunction::insert(std::span<const double> input, Vector output) {
    if (output.size() != output_dim_) throw std::invalid_argument("lookup output has the wrong dimension");
    auto [it, inserted] = table_.emplace(quantizer_.quantize(input), output);
    return inserted || it->second == output;
}

bool LookupFunction::contains(std::span<const double> input) const {
    return table_.count(quantizer_.quantize(input)) != 0;
}

std::optional<Vector> LookupFunction::find(std::span<const double> input) const {
    auto it = table_.find(quantizer_.quantize(input));
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

Vector LookupFunction::operator()(std::span<const double> input) const {
    if (auto hit = find(input)) return *hit;
    if (miss_ == MissPolicy::zero) return Vector(output_dim_, 0.0);
    throw UnseenInput("unseen input of length " + std::to_string(input.size()));
}

double MPSNModel::eta(int k) const {
    if (k >= 0 && static_cast<std::size_t>(k) < dim_weights.size()) return dim_weights[static_cast<std::size_t>(k)];
    return 1.0;
}

// ---------------------------------------------------------------- forward

Vector encoder_input(const EmbeddedComplex& k, std::size_t simplex, const RefinementConfig& init) {
    const auto c = initial_color(k, simplex, init);
    const Quantizer q(init.quantization_digits);
    Vector out{static_cast<double>(c.dim), static_cast<double>(static_cast<int>(c.kind))};
    for (std::int64_t f : c.features) out.push_back(q.dequantize(f));
    return out;
}

namespace {

Vector aggregate(const LookupFunction& f, const std::vector<Vector>& states, const std::vector<std::size_t>& idx,
                 std::size_t dim) {
    Vector sum(dim, 0.0);
    for (std::size_t j : idx) {
        const Vector msg = f(states[j]);
        for (std::size_t i = 0; i < dim; ++i) sum[i] += msg[i];
    }
    return sum;
}

Vector concat3(const Vector& a, const Vector& b, const Vector& c) {
    Vector out;
    out.reserve(a.size() + b.size() + c.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

template <class F>
auto with_context(const std::string& where, const Simplex& s, F&& f) {
    try {
        return f();
    } catch (const UnseenInput& e) {
        throw UnseenInput(where + " at simplex " + s.to_string() + ": " + e.what());
    }
}

Vector mu_input(const LayerParams& layer, const std::vector<Vector>& states, const HasseAdjacency& adj,
                std::size_t i, std::size_t hidden) {
    return concat3(states[i], aggregate(layer.phi, states, adj.boundary[i], hidden),
                   aggregate(layer.psi, states, adj.coboundary[i], hidden));
}

}  // namespace

HiddenStates forward(const MPSNModel& model, const EmbeddedComplex& k) {
    const auto& complex = k.complex();
    HiddenStates out;
    std::vector<Vector> h;
    h.reserve(complex.size());
    for (std::size_t i = 0; i < complex.size(); ++i) {
        h.push_back(with_context("encoder", complex[i], [&] { return model.encoder(encoder_input(k, i, model.init)); }));
    }
    out.rounds.push_back(std::move(h));

    const auto adj = hasse(complex);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        const auto& cur = out.rounds.back();
        std::vector<Vector> next;
        next.reserve(complex.size());
        for (std::size_t i = 0; i < complex.size(); ++i) {
            next.push_back(with_context("layer " + std::to_string(l), complex[i],
                                        [&] { return layer.mu(mu_input(layer, cur, adj, i, model.hidden_dim)); }));
        }
        out.rounds.push_back(std::move(next));
    }
    return out;
}

Vector readout(const MPSNModel& model, const HiddenStates& states, const EmbeddedComplex& k) {
    Vector z(model.readout.output_dim(), 0.0);
    const auto& last = states.last();
    for (std::size_t i = 0; i < last.size(); ++i) {
        const Vector psi = with_context("readout", k.complex()[i], [&] { return model.readout(last[i]); });
        const double w = model.eta(k.complex()[i].dim());
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += w * psi[j];
    }
    return z;
}

// --------------------------------------------------------------- realizer

std::optional<std::size_t> Realizer::color_index(int round, Color c) const {
    const auto& colors = round_colors.at(static_cast<std::size_t>(round));
    auto it = std::find(colors.begin(), colors.end(), c);
    if (it == colors.end()) return std::nullopt;
    return static_cast<std::size_t>(it - colors.begin());
}

Realizer construct_realizer(const std::vector<EmbeddedComplex>& family, int depth, RefinementConfig cfg,
                            std::shared_ptr<ColorInterner> interner) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (cfg.mode == RefinementMode::wl) throw std::invalid_argument("the realizer matches SWL or GSWL, not WL");
    if (cfg.adjacency != Adjacency::full) throw std::invalid_argument("the realizer uses full adjacency");
    cfg.depth = depth;

    Realizer r;
    r.interner = interner ? std::move(interner) : std::make_shared<ColorInterner>();
    for (const auto& k : family) r.colorings.push_back(refine(k, cfg, *r.interner));

    // iota_l: first-seen order over (member, simplex).
    r.round_colors.resize(static_cast<std::size_t>(depth) + 1);
    for (int l = 0; l <= depth; ++l) {
        auto& seen = r.round_colors[static_cast<std::size_t>(l)];
        std::map<Color, std::size_t> index;
        for (const auto& coloring : r.colorings) {
            for (Color c : coloring.round(l)) {
                if (index.emplace(c, seen.size()).second) seen.push_back(c);
            }
        }
        r.m = std::max(r.m, seen.size());
    }
    const std::size_t m = std::max<std::size_t>(r.m, 1);
    const std::size_t hidden = 3 * m;
    const int digits = cfg.quantization_digits;

    // Blocks A = [0, m), B = [m, 2m), C = [2m, 3m).
    auto basis = [&](std::size_t block, std::size_t j) {
        Vector v(hidden, 0.0);
        v[block * m + j] = 1.0;
        return v;
    };
    auto index_of = [&](int l, Color c) {
        return *r.color_index(l, c);
    };

    MPSNModel& model = r.model;
    model.init = cfg;
    model.hidden_dim = hidden;
    model.encoder = LookupFunction(hidden, MissPolicy::error, digits);

    std::vector<std::vector<Vector>> states(family.size());
    std::vector<HasseAdjacency> adjs;
    for (std::size_t f = 0; f < family.size(); ++f) {
        adjs.push_back(hasse(family[f].complex()));
        const auto& c0 = r.colorings[f].round(0);
        for (std::size_t i = 0; i < c0.size(); ++i) {
            Vector a = basis(0, index_of(0, c0[i]));
            if (!model.encoder.insert(encoder_input(family[f], i, cfg), a)) {
                throw std::logic_error("encoder input maps to two round-0 colors");
            }
            states[f].push_back(std::move(a));
        }
    }

    for (int l = 0; l < depth; ++l) {
        const auto ml = r.round_colors[static_cast<std::size_t>(l)].size();
        LayerParams layer{LookupFunction(hidden, MissPolicy::error, digits),
                          LookupFunction(hidden, MissPolicy::error, digits),
                          LookupFunction(hidden, MissPolicy::error, digits)};
        for (std::size_t j = 0; j < ml; ++j) {
            layer.phi.insert(basis(0, j), basis(1, j));
            layer.psi.insert(basis(0, j), basis(2, j));
        }
        // mu is interpolated on exactly the triples the family produces.
        for (std::size_t f = 0; f < family.size(); ++f) {
            const auto& next_colors = r.colorings[f].round(l + 1);
            std::vector<Vector> next;
            next.reserve(states[f].size());
            for (std::size_t i = 0; i < states[f].size(); ++i) {
                Vector target = basis(0, index_of(l + 1, next_colors[i]));
                if (!layer.mu.insert(mu_input(layer, states[f], adjs[f], i, hidden), target)) {
                    throw std::logic_error("one message triple maps to two refined colors");
                }
                next.push_back(std::move(target));
            }
            states[f] = std::move(next);
        }
        model.layers.push_back(std::move(layer));
    }

    const auto ml = r.round_colors[static_cast<std::size_t>(depth)].size();
    model.readout = LookupFunction(ml, MissPolicy::error, digits);
    for (std::size_t j = 0; j < ml; ++j) {
        Vector e(ml, 0.0);
        e[j] = 1.0;
        model.readout.insert(basis(0, j), std::move(e));
    }
    return r;
}

Vector readout_histogram(const Realizer& realizer, const EmbeddedComplex& k) {
    return readout(realizer.model, forward(realizer.model, k), k);
}

Vector color_histogram(const Realizer& realizer, const Coloring& coloring) {
    const int depth = realizer.model.depth();
    Vector h(realizer.round_colors.at(static_cast<std::size_t>(depth)).size(), 0.0);
    for (Color c : coloring.round(depth)) {
        const auto j = realizer.color_index(depth, c);
        if (!j) throw std::invalid_argument("coloring contains a color the realizer never observed");
        h[*j] += 1.0;
    }
    return h;
}

// ------------------------------------------------------------ ECT readout

std::vector<long long> ECTReadout::evaluate(const EmbeddedComplex& k) const {
    const auto z = readout(realizer.model, forward(realizer.model, k), k);
    std::vector<long long> out;
    out.reserve(z.size());
    for (double v : z) out.push_back(std::llround(v));
    return out;
}

ECTReadout construct_ect_readout(const std::vector<EmbeddedComplex>& family, const std::vector<Direction>& directions,
                                 std::vector<double> thresholds, int depth, RefinementConfig cfg) {
    if (cfg.mode != RefinementMode::gswl) throw std::invalid_argument("the ECT readout needs GSWL colors");
    int max_dim = 0;
    for (const auto& k : family) {
        max_dim = std::max(max_dim, k.complex().max_dim());
        if (k.embedding().quantizer().digits() != cfg.quantization_digits) {
            throw std::invalid_argument("embedding and refinement quantization digits differ");
        }
    }
    if (depth < max_dim) {
        throw std::invalid_argument("depth below complex dimension: " + std::to_string(depth) + " < " +
                                    std::to_string(max_dim));
    }

    ECTReadout out{construct_realizer(family, depth, cfg), directions, std::move(thresholds)};
    Realizer& r = out.realizer;
    const std::size_t m = std::max<std::size_t>(r.m, 1);
    const std::size_t width = out.directions.size() * out.thresholds.size();
    const Quantizer q(cfg.quantization_digits);

    LookupFunction psi(width, MissPolicy::error, cfg.quantization_digits);
    ColorDecoder decoder(*r.interner);
    const auto& final_colors = r.round_colors[static_cast<std::size_t>(depth)];
    for (std::size_t j = 0; j < final_colors.size(); ++j) {
        const auto coords = decoder.vertex_set(final_colors[j]);
        if (!coords) throw std::logic_error("round-" + std::to_string(depth) + " color does not determine its vertices");
        std::vector<Point> pts;
        for (const auto& qp : *coords) {
            Point p;
            for (std::int64_t c : qp) p.push_back(q.dequantize(c));
            pts.push_back(std::move(p));
        }
        Vector indicators;
        indicators.reserve(width);
        for (const auto& nu : out.directions) {
            double t_entry = -std::numeric_limits<double>::infinity();
            for (const auto& p : pts) t_entry = std::max(t_entry, dot(p, nu));
            for (double t : out.thresholds) indicators.push_back(t_entry <= t ? 1.0 : 0.0);
        }
        Vector a(3 * m, 0.0);
        a[j] = 1.0;
        psi.insert(a, std::move(indicators));
    }
    r.model.readout = std::move(psi);
    r.model.dim_weights.clear();
    for (int k = 0; k <= max_dim; ++k) r.model.dim_weights.push_back(k % 2 == 0 ? 1.0 : -1.0);
    return out;
}

// ------------------------------------------------------------ upper bound

MPSNModel random_model(const std::vector<EmbeddedComplex>& complexes, int depth, RefinementConfig init,
                       std::size_t hidden_dim, std::size_t output_dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> lattice(-1024, 1024);
    auto draw = [&](std::size_t n) {
        Vector v(n);
        for (double& x : v) x = std::ldexp(static_cast<double>(lattice(rng)), -10);
        return v;
    };
    const int digits = init.quantization_digits;

    MPSNModel model;
    model.init = init;
    model.hidden_dim = hidden_dim;
    model.encoder = LookupFunction(hidden_dim, MissPolicy::error, digits);

    std::vector<std::vector<Vector>> states(complexes.size());
    std::vector<HasseAdjacency> adjs;
    int max_dim = 0;
    for (std::size_t f = 0; f < complexes.size(); ++f) {
        const auto& k = complexes[f];
        max_dim = std::max(max_dim, k.complex().max_dim());
        adjs.push_back(hasse(k.complex()));
        for (std::size_t i = 0; i < k.complex().size(); ++i) {
            const auto in = encoder_input(k, i, init);
            if (!model.encoder.contains(in)) model.encoder.insert(in, draw(hidden_dim));
            states[f].push_back(model.encoder(in));
        }
    }
    for (int l = 0; l < depth; ++l) {
        LayerParams layer{LookupFunction(hidden_dim, MissPolicy::error, digits),
                          LookupFunction(hidden_dim, MissPolicy::error, digits),
                          LookupFunction(hidden_dim, MissPolicy::error, digits)};
        for (const auto& hs : states) {
            for (const auto& h : hs) {
                if (!layer.phi.contains(h)) layer.phi.insert(h, draw(hidden_dim));
                if (!layer.psi.contains(h)) layer.psi.insert(h, draw(hidden_dim));
            }
        }
        for (std::size_t f = 0; f < complexes.size(); ++f) {
            std::vector<Vector> next;
            for (std::size_t i = 0; i < states[f].size(); ++i) {
                const auto in = mu_input(layer, states[f], adjs[f], i, hidden_dim);
                if (!layer.mu.contains(in)) layer.mu.insert(in, draw(hidden_dim));
                next.push_back(layer.mu(in));
            }
            states[f] = std::move(next);
        }
        model.layers.push_back(std::move(layer));
    }
    model.readout = LookupFunction(output_dim, MissPolicy::error, digits);
    for (const auto& hs : states) {
        for (const auto& h : hs) {
            if (!model.readout.contains(h)) model.readout.insert(h, draw(output_dim));
        }
    }
    for (int k = 0; k <= max_dim; ++k) model.dim_weights.push_back(draw(1)[0]);
    return model;
}

UpperBoundReport upper_bound_check(const EmbeddedComplex& a, const EmbeddedComplex& b, int depth, int trials,
                                   std::uint64_t seed, RefinementConfig cfg, std::size_t hidden_dim,
                                   std::size_t output_dim) {
    UpperBoundReport report;
    {
        ColorInterner interner;
        cfg.adjacency = Adjacency::full;
        if (!equivalent_at(a, b, cfg, depth, interner)) {
            report.skipped = true;
            report.note = "pair is not equivalent at this depth; check is vacuous";
            return report;
        }
    }
    std::mt19937_64 seeds(seed);
    for (int t = 0; t < trials; ++t) {
        const auto model = random_model({a, b}, depth, cfg, hidden_dim, output_dim, seeds());
        const auto za = readout(model, forward(model, a), a);
        const auto zb = readout(model, forward(model, b), b);
        double diff = 0.0;
        for (std::size_t i = 0; i < za.size(); ++i) diff = std::max(diff, std::abs(za[i] - zb[i]));
        report.max_abs_diff = std::max(report.max_abs_diff, diff);
        ++report.trials;
        if (diff <= kUpperBoundTolerance) ++report.agreements;
    }
    return report;
}

// ----------------------------------------------------------- skip channel

// The wrapped model consumes g only; x_v rides alongside in the first d
// slots of every vertex state and is never rewritten.
SkipState skip_forward(const MPSNModel& model, const EmbeddedComplex& k) {
    if (model.depth() < k.complex().max_dim()) {
        throw std::invalid_argument("skip channel needs depth >= dim(K)");
    }
    const auto states = forward(model, k);
    SkipState out;
    out.coord_dim = k.embedding().ambient_dim();
    out.quantization_digits = k.embedding().quantizer().digits();
    for (const auto& round : states.rounds) {
        std::map<VertexId, Vector> vs;
        for (std::size_t i = 0; i < round.size(); ++i) {
            const Simplex& s = k.complex()[i];
            if (s.dim() != 0) continue;
            const VertexId v = s.vertices().front();
            Vector h = k.embedding().at(v);
            h.insert(h.end(), round[i].begin(), round[i].end());
            vs.emplace(v, std::move(h));
        }
        out.rounds.push_back(std::move(vs));
    }
    return out;
}

Embedding recover_coords(const SkipState& states) {
    if (states.rounds.empty()) throw std::invalid_argument("empty skip state");
    std::map<VertexId, Point> coords;
    for (const auto& [v, h] : states.rounds.back()) {
        coords.emplace(v, Point(h.begin(), h.begin() + states.coord_dim));
    }
    return Embedding(std::move(coords), states.quantization_digits);
}

}  // namespace gswl
