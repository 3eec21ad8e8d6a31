#include "gswl/refinement.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>

namespace gswl {

// ---------------------------------------------------------- serialization

namespace {

enum Tag : char { kInitial = 'I', kRefined = 'R', kNeighbor = 'W' };

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_colors(std::string& out, std::vector<Color> colors) {
    std::sort(colors.begin(), colors.end());
    put_u64(out, colors.size());
    for (Color c : colors) put_u64(out, c.id);
}

class Reader {
  public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    char tag() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    std::vector<Color> colors() {
        const auto n = u64();
        std::vector<Color> out;
        out.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(Color{static_cast<std::uint32_t>(u64())});
        return out;
    }
    void finish() const {
        if (pos_ != bytes_.size()) throw std::invalid_argument("trailing bytes in color record");
    }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw std::invalid_argument("truncated color record");
    }
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const ColorRecord& record) {
    std::string out;
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, InitialColor>) {
                out.push_back(kInitial);
                put_u64(out, static_cast<std::uint64_t>(r.dim));
                out.push_back(static_cast<char>(r.kind));
                put_u64(out, r.features.size());
                for (std::int64_t f : r.features) put_u64(out, static_cast<std::uint64_t>(f));
            } else if constexpr (std::is_same_v<T, RefinedColor>) {
                out.push_back(kRefined);
                put_u64(out, r.previous.id);
                put_colors(out, r.boundary);
                put_colors(out, r.coboundary);
            } else {
                out.push_back(kNeighbor);
                put_u64(out, r.previous.id);
                put_colors(out, r.neighbors);
            }
        },
        record);
    return out;
}

ColorRecord deserialize(std::string_view bytes) {
    Reader in(bytes);
    ColorRecord out;
    switch (in.tag()) {
        case kInitial: {
            InitialColor r;
            r.dim = static_cast<int>(in.u64());
            r.kind = static_cast<FeatureKind>(in.tag());
            const auto n = in.u64();
            for (std::uint64_t i = 0; i < n; ++i) r.features.push_back(static_cast<std::int64_t>(in.u64()));
            out = std::move(r);
            break;
        }
        case kRefined: {
            RefinedColor r;
            r.previous = Color{static_cast<std::uint32_t>(in.u64())};
            r.boundary = in.colors();
            r.coboundary = in.colors();
            out = std::move(r);
            break;
        }
        case kNeighbor: {
            NeighborColor r;
            r.previous = Color{static_cast<std::uint32_t>(in.u64())};
            r.neighbors = in.colors();
            out = std::move(r);
            break;
        }
        default:
            throw std::invalid_argument("unknown color record tag");
    }
    in.finish();
    return out;
}

// --------------------------------------------------------------- interner

namespace {
std::atomic<std::uint64_t> next_interner_id{1};
}

ColorInterner::ColorInterner() : instance_id_(next_interner_id.fetch_add(1)) {}

Color ColorInterner::intern(const ColorRecord& record) { return intern_bytes(serialize(record)); }

Color ColorInterner::intern_bytes(std::string bytes) {
    std::lock_guard lock(mutex_);
    auto it = table_.find(bytes);
    if (it != table_.end()) return it->second;
    const Color c{static_cast<std::uint32_t>(reverse_.size())};
    reverse_.push_back(bytes);
    table_.emplace(std::move(bytes), c);
    return c;
}

const std::string& ColorInterner::bytes(Color c) const {
    std::lock_guard lock(mutex_);
    if (c.id >= reverse_.size()) throw std::out_of_range("unknown color id " + std::to_string(c.id));
    return reverse_[c.id];
}

std::size_t ColorInterner::size() const {
    std::lock_guard lock(mutex_);
    return reverse_.size();
}

// ------------------------------------------------------------ config text

std::string to_string(RefinementMode m) {
    switch (m) {
        case RefinementMode::wl: return "wl";
        case RefinementMode::swl: return "swl";
        case RefinementMode::gswl: return "gswl";
    }
    return "?";
}

std::string to_string(Adjacency a) {
    switch (a) {
        case Adjacency::full: return "full";
        case Adjacency::boundary_only: return "boundary_only";
        case Adjacency::coboundary_only: return "coboundary_only";
    }
    return "?";
}

std::string to_string(PhiMode p) {
    switch (p) {
        case PhiMode::dimension_only: return "dimension_only";
        case PhiMode::sorted_coords: return "sorted_coords";
        case PhiMode::derived_features: return "derived_features";
    }
    return "?";
}

RefinementMode parse_mode(std::string_view s) {
    if (s == "wl") return RefinementMode::wl;
    if (s == "swl") return RefinementMode::swl;
    if (s == "gswl") return RefinementMode::gswl;
    throw std::invalid_argument("unknown refinement mode '" + std::string(s) + "'");
}

Adjacency parse_adjacency(std::string_view s) {
    if (s == "full") return Adjacency::full;
    if (s == "boundary_only" || s == "boundary") return Adjacency::boundary_only;
    if (s == "coboundary_only" || s == "coboundary") return Adjacency::coboundary_only;
    throw std::invalid_argument("unknown adjacency '" + std::string(s) + "'");
}

PhiMode parse_phi(std::string_view s) {
    if (s == "dimension_only" || s == "dimension") return PhiMode::dimension_only;
    if (s == "sorted_coords" || s == "coords") return PhiMode::sorted_coords;
    if (s == "derived_features" || s == "derived") return PhiMode::derived_features;
    throw std::invalid_argument("unknown phi mode '" + std::string(s) + "'");
}

// ------------------------------------------------------------- refinement

std::vector<Color> Coloring::multiset(int l) const {
    auto out = round(l);
    std::sort(out.begin(), out.end());
    return out;
}

InitialColor initial_color(const EmbeddedComplex& k, std::size_t simplex, const RefinementConfig& cfg) {
    const Simplex& s = k.complex()[simplex];
    InitialColor c;
    c.dim = s.dim();
    if (cfg.mode != RefinementMode::gswl) return c;

    const Quantizer q(cfg.quantization_digits);
    const auto& x = k.embedding();
    if (c.dim == 0) {
        c.kind = FeatureKind::coordinates;
        c.features = q.quantize(x.at(s.vertices().front()));
        return c;
    }
    switch (cfg.phi) {
        case PhiMode::dimension_only:
            break;
        case PhiMode::sorted_coords: {
            std::vector<std::vector<std::int64_t>> pts;
            for (VertexId v : s.vertices()) pts.push_back(q.quantize(x.at(v)));
            std::sort(pts.begin(), pts.end());
            c.kind = FeatureKind::coordinates;
            for (const auto& p : pts) c.features.insert(c.features.end(), p.begin(), p.end());
            break;
        }
        case PhiMode::derived_features:
            // Beyond triangles Phi falls back to dimension only.
            if (c.dim <= 2) {
                c.kind = FeatureKind::derived;
                c.features = q.quantize(derived_features(s, x));
            }
            break;
    }
    return c;
}

std::vector<Color> init_colors(const EmbeddedComplex& k, const RefinementConfig& cfg, ColorInterner& interner) {
    if (cfg.mode == RefinementMode::wl && k.complex().max_dim() > 1) {
        throw ValidationError("WL mode requires a 1-dimensional complex (graph)");
    }
    if (cfg.mode == RefinementMode::gswl && !k.embedding().is_injective()) {
        throw ValidationError("GSWL requires an injective embedding");
    }
    std::vector<Color> out;
    out.reserve(k.complex().size());
    for (std::size_t i = 0; i < k.complex().size(); ++i) out.push_back(interner.intern(initial_color(k, i, cfg)));
    return out;
}

std::vector<Color> refine_round(const EmbeddedComplex& k, const HasseAdjacency& adj, const std::vector<Color>& current,
                                const RefinementConfig& cfg, ColorInterner& interner) {
    const auto& complex = k.complex();
    std::vector<Color> next(current.size());
    auto gather = [&](const std::vector<std::size_t>& idx) {
        std::vector<Color> out;
        out.reserve(idx.size());
        for (std::size_t j : idx) out.push_back(current[j]);
        return out;
    };

    if (cfg.mode == RefinementMode::wl) {
        // Neighbors of a vertex are the other endpoints of its cofaces (edges).
        for (std::size_t i = 0; i < complex.size(); ++i) {
            NeighborColor r{current[i], {}};
            if (complex[i].dim() == 0) {
                for (std::size_t e : adj.coboundary[i]) {
                    for (std::size_t u : adj.boundary[e]) {
                        if (u != i) r.neighbors.push_back(current[u]);
                    }
                }
            }
            next[i] = interner.intern(r);
        }
        return next;
    }

    const bool use_boundary = cfg.adjacency != Adjacency::coboundary_only;
    const bool use_coboundary = cfg.adjacency != Adjacency::boundary_only;
    for (std::size_t i = 0; i < complex.size(); ++i) {
        RefinedColor r{current[i], {}, {}};
        if (use_boundary) r.boundary = gather(adj.boundary[i]);
        if (use_coboundary) r.coboundary = gather(adj.coboundary[i]);
        next[i] = interner.intern(r);
    }
    return next;
}

Coloring refine(const EmbeddedComplex& k, const RefinementConfig& cfg, ColorInterner& interner) {
    if (cfg.depth < 0) throw std::invalid_argument("refinement depth must be >= 0");
    std::vector<std::vector<Color>> rounds;
    rounds.reserve(static_cast<std::size_t>(cfg.depth) + 1);
    rounds.push_back(init_colors(k, cfg, interner));
    if (cfg.depth > 0) {
        const auto adj = hasse(k.complex());
        for (int l = 0; l < cfg.depth; ++l) rounds.push_back(refine_round(k, adj, rounds.back(), cfg, interner));
    }
    return {cfg, interner.instance_id(), std::move(rounds)};
}

bool equivalent_at(const Coloring& a, const Coloring& b, int depth) {
    if (a.interner_id() != b.interner_id()) {
        throw std::invalid_argument("colorings were built with different interners");
    }
    if (depth < 0 || depth > a.depth() || depth > b.depth()) {
        throw std::invalid_argument("coloring is shallower than the requested depth");
    }
    return a.multiset(depth) == b.multiset(depth);
}

bool equivalent_at(const EmbeddedComplex& a, const EmbeddedComplex& b, RefinementConfig cfg, int depth,
                   ColorInterner& interner) {
    cfg.depth = depth;
    return equivalent_at(refine(a, cfg, interner), refine(b, cfg, interner), depth);
}

bool same_partition(const std::vector<Color>& a, const std::vector<Color>& b) {
    if (a.size() != b.size()) return false;
    std::map<Color, Color> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto [it1, new1] = ab.emplace(a[i], b[i]);
        auto [it2, new2] = ba.emplace(b[i], a[i]);
        if (it1->second != b[i] || it2->second != a[i]) return false;
    }
    return true;
}

int stable_round(const EmbeddedComplex& k, RefinementConfig cfg, int max_rounds) {
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    ColorInterner interner;
    const auto adj = hasse(k.complex());
    auto current = init_colors(k, cfg, interner);
    for (int l = 0; l < max_rounds; ++l) {
        auto next = refine_round(k, adj, current, cfg, interner);
        if (same_partition(current, next)) return l;
        current = std::move(next);
    }
    throw std::runtime_error("partition did not stabilize within " + std::to_string(max_rounds) + " rounds");
}

// ---------------------------------------------------------------- decoder

int ColorDecoder::dimension(Color c) {
    if (auto it = dims_.find(c.id); it != dims_.end()) return it->second;
    const auto rec = interner_.record(c);
    int d = 0;
    if (const auto* init = std::get_if<InitialColor>(&rec)) {
        d = init->dim;
    } else if (const auto* r = std::get_if<RefinedColor>(&rec)) {
        d = dimension(r->previous);
    } else {
        d = dimension(std::get<NeighborColor>(rec).previous);
    }
    dims_.emplace(c.id, d);
    return d;
}

std::optional<CoordinateSet> ColorDecoder::vertex_set(Color c) {
    if (auto it = sets_.find(c.id); it != sets_.end()) return it->second;
    const auto rec = interner_.record(c);
    std::optional<CoordinateSet> out;
    if (const auto* init = std::get_if<InitialColor>(&rec)) {
        if (init->kind == FeatureKind::coordinates && !init->features.empty()) {
            const auto n = static_cast<std::size_t>(init->dim + 1);
            const auto d = init->features.size() / n;
            CoordinateSet pts;
            for (std::size_t i = 0; i < n; ++i) {
                pts.emplace_back(init->features.begin() + static_cast<std::ptrdiff_t>(i * d),
                                 init->features.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
            }
            out = std::move(pts);
        }
    } else if (const auto* r = std::get_if<RefinedColor>(&rec)) {
        out = vertex_set(r->previous);
        const int dim = dimension(c);
        if (!out && dim > 0 && !r->boundary.empty()) {
            // Union of the facets' coordinate sets; injectivity of x makes it
            // exactly the simplex's vertex set.
            std::set<std::vector<std::int64_t>> pts;
            bool complete = true;
            for (Color f : r->boundary) {
                auto fs = vertex_set(f);
                if (!fs) {
                    complete = false;
                    break;
                }
                pts.insert(fs->begin(), fs->end());
            }
            if (complete && pts.size() == static_cast<std::size_t>(dim + 1)) out = CoordinateSet(pts.begin(), pts.end());
        }
    } else {
        out = vertex_set(std::get<NeighborColor>(rec).previous);
    }
    sets_.emplace(c.id, out);
    return out;
}

// ----------------------------------------------------- recovery checking

RecoveryReport coordinate_recovery_check(const std::vector<EmbeddedComplex>& family, int depth,
                                         ColorInterner& interner, RefinementConfig cfg) {
    if (cfg.mode != RefinementMode::gswl || cfg.adjacency != Adjacency::full) {
        throw std::invalid_argument("coordinate recovery requires GSWL with full adjacency");
    }
    cfg.depth = depth;
    RecoveryReport report;
    report.depth = depth;

    struct Entry {
        std::size_t complex, simplex;
        int dim;
        CoordinateSet coords;
    };
    std::map<Color, std::vector<Entry>> groups;
    for (std::size_t f = 0; f < family.size(); ++f) {
        const auto coloring = refine(family[f], cfg, interner);
        const auto& colors = coloring.round(depth);
        for (std::size_t i = 0; i < colors.size(); ++i) {
            const Simplex& s = family[f].complex()[i];
            groups[colors[i]].push_back({f, i, s.dim(), family[f].coordinate_set(s)});
        }
    }

    ColorDecoder decoder(interner);
    for (const auto& [color, entries] : groups) {
        for (std::size_t a = 0; a < entries.size(); ++a) {
            const Entry& ea = entries[a];
            if (ea.dim <= depth) {
                ++report.checked_simplices;
                const auto decoded = decoder.vertex_set(color);
                if (!decoded || *decoded != ea.coords) ++report.decode_failures;
            }
            for (std::size_t b = a + 1; b < entries.size(); ++b) {
                const Entry& eb = entries[b];
                if (ea.dim > depth || eb.dim > depth) {
                    if (ea.coords != eb.coords) ++report.excluded_pairs;
                    continue;
                }
                ++report.same_color_pairs;
                if (ea.complex != eb.complex) ++report.cross_complex_pairs;
                if (ea.coords != eb.coords) report.violations.push_back({ea.complex, ea.simplex, eb.complex, eb.simplex});
            }
        }
    }
    return report;
}

}  // namespace gswl
