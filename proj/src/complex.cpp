#include "gswl/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

namespace gswl {

Quantizer::Quantizer(int digits) : digits_(digits), scale_(std::pow(10.0, digits)) {
    if (digits < 0 || digits > 15) {
        throw ValidationError("quantization digits must be in [0, 15], got " + std::to_string(digits));
    }
}

std::int64_t Quantizer::quantize(double value) const {
    const double scaled = value * scale_;
    if (!std::isfinite(scaled) || std::abs(scaled) > 9.0e18) {
        throw ValidationError("coordinate out of quantization range");
    }
    return std::llround(scaled);
}

double Quantizer::dequantize(std::int64_t q) const { return static_cast<double>(q) / scale_; }

std::vector<std::int64_t> Quantizer::quantize(std::span<const double> values) const {
    std::vector<std::int64_t> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(quantize(v));
    return out;
}

int default_quantization_digits() {
    if (const char* env = std::getenv("GSWL_QUANT_DIGITS")) {
        char* end = nullptr;
        const long digits = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && digits >= 0 && digits <= 15) return static_cast<int>(digits);
    }
    return kDefaultQuantizationDigits;
}

// ---------------------------------------------------------------- Simplex

Simplex::Simplex(std::vector<VertexId> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw ValidationError("simplex must have at least one vertex");
    std::sort(vertices_.begin(), vertices_.end());
    if (vertices_.front() < 0) throw ValidationError("vertex ids must be non-negative");
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
        throw ValidationError("duplicate vertex in simplex " + to_string());
    }
}

bool Simplex::contains(VertexId v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

std::vector<Simplex> Simplex::facets() const {
    std::vector<Simplex> out;
    if (vertices_.size() < 2) return out;
    out.reserve(vertices_.size());
    for (std::size_t drop = 0; drop < vertices_.size(); ++drop) {
        Simplex f;
        f.vertices_.reserve(vertices_.size() - 1);
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            if (i != drop) f.vertices_.push_back(vertices_[i]);
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::strong_ordering operator<=>(const Simplex& a, const Simplex& b) {
    if (auto c = a.vertices_.size() <=> b.vertices_.size(); c != 0) return c;
    return a.vertices_ <=> b.vertices_;
}

std::string Simplex::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < vertices_.size(); ++i) os << (i ? "," : "") << vertices_[i];
    os << '}';
    return os.str();
}

// -------------------------------------------------------- AbstractComplex

AbstractComplex AbstractComplex::from_simplices(std::vector<Simplex> simplices) {
    AbstractComplex k;
    std::sort(simplices.begin(), simplices.end());
    simplices.erase(std::unique(simplices.begin(), simplices.end()), simplices.end());
    k.simplices_ = std::move(simplices);
    for (const auto& s : k.simplices_) {
        const auto d = static_cast<std::size_t>(s.dim());
        if (k.counts_.size() <= d) k.counts_.resize(d + 1, 0);
        ++k.counts_[d];
        for (const auto& f : s.facets()) {
            if (!std::binary_search(k.simplices_.begin(), k.simplices_.end(), f)) {
                throw ValidationError("complex is not closed: face " + f.to_string() + " of " +
                                      s.to_string() + " is missing");
            }
        }
    }
    return k;
}

std::size_t AbstractComplex::count(int dim) const {
    if (dim < 0 || static_cast<std::size_t>(dim) >= counts_.size()) return 0;
    return counts_[static_cast<std::size_t>(dim)];
}

std::vector<VertexId> AbstractComplex::vertices() const {
    std::vector<VertexId> out;
    for (const auto& s : simplices_) {
        if (s.dim() != 0) break;
        out.push_back(s.vertices().front());
    }
    return out;
}

std::optional<std::size_t> AbstractComplex::index_of(const Simplex& s) const {
    auto it = std::lower_bound(simplices_.begin(), simplices_.end(), s);
    if (it == simplices_.end() || *it != s) return std::nullopt;
    return static_cast<std::size_t>(it - simplices_.begin());
}

std::vector<Simplex> AbstractComplex::maximal_simplices() const {
    const auto adj = hasse(*this);
    std::vector<Simplex> out;
    for (std::size_t i = 0; i < simplices_.size(); ++i) {
        if (adj.coboundary[i].empty()) out.push_back(simplices_[i]);
    }
    return out;
}

AbstractComplex build_complex(const std::vector<std::vector<VertexId>>& maximal_simplices) {
    std::set<Simplex> all;
    for (const auto& raw : maximal_simplices) {
        Simplex top(raw);
        const auto& v = top.vertices();
        const std::size_t n = v.size();
        if (n > 20) throw ValidationError("simplex dimension too large for face closure");
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<VertexId> face;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1u << i)) face.push_back(v[i]);
            }
            all.emplace(std::move(face));
        }
    }
    return AbstractComplex::from_simplices({all.begin(), all.end()});
}

HasseAdjacency hasse(const AbstractComplex& complex) {
    HasseAdjacency adj;
    adj.boundary.resize(complex.size());
    adj.coboundary.resize(complex.size());
    for (std::size_t i = 0; i < complex.size(); ++i) {
        for (const auto& f : complex[i].facets()) {
            const auto j = complex.index_of(f);
            adj.boundary[i].push_back(*j);
            adj.coboundary[*j].push_back(i);
        }
    }
    for (auto& b : adj.boundary) std::sort(b.begin(), b.end());
    for (auto& c : adj.coboundary) std::sort(c.begin(), c.end());
    return adj;
}

long long euler_characteristic(const AbstractComplex& complex) {
    long long chi = 0;
    const auto& counts = complex.per_dim_counts();
    for (std::size_t k = 0; k < counts.size(); ++k) {
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(counts[k]);
    }
    return chi;
}

// -------------------------------------------------------------- Embedding

Embedding::Embedding(std::map<VertexId, Point> coords, int quantization_digits)
    : coords_(std::move(coords)), quantizer_(quantization_digits) {
    bool first = true;
    for (auto& [v, p] : coords_) {
        if (v < 0) throw ValidationError("vertex ids must be non-negative");
        if (first) {
            ambient_dim_ = static_cast<int>(p.size());
            first = false;
        } else if (static_cast<int>(p.size()) != ambient_dim_) {
            throw ValidationError("vertex " + std::to_string(v) + " has " + std::to_string(p.size()) +
                                  " coordinates, expected " + std::to_string(ambient_dim_));
        }
        for (double& c : p) c = quantizer_.snap(c);
    }
    if (!coords_.empty() && ambient_dim_ < 1) throw ValidationError("ambient dimension must be >= 1");
}

const Point& Embedding::at(VertexId v) const {
    auto it = coords_.find(v);
    if (it == coords_.end()) throw ValidationError("vertex " + std::to_string(v) + " is not embedded");
    return it->second;
}

std::vector<std::int64_t> Embedding::quantized(VertexId v) const { return quantizer_.quantize(at(v)); }

bool Embedding::is_injective() const {
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& [v, p] : coords_) {
        if (!seen.insert(quantizer_.quantize(p)).second) return false;
    }
    return true;
}

bool operator==(const Embedding& a, const Embedding& b) {
    if (a.coords_.size() != b.coords_.size() || a.ambient_dim_ != b.ambient_dim_) return false;
    auto ib = b.coords_.begin();
    for (const auto& [v, p] : a.coords_) {
        if (v != ib->first || a.quantizer_.quantize(p) != a.quantizer_.quantize(ib->second)) return false;
        ++ib;
    }
    return true;
}

// -------------------------------------------------------- EmbeddedComplex

EmbeddedComplex::EmbeddedComplex(AbstractComplex complex, Embedding embedding)
    : complex_(std::move(complex)), embedding_(std::move(embedding)) {
    const auto verts = complex_.vertices();
    if (verts.size() != embedding_.size()) {
        throw ValidationError("embedding covers " + std::to_string(embedding_.size()) + " vertices, complex has " +
                              std::to_string(verts.size()));
    }
    for (VertexId v : verts) {
        if (!embedding_.has(v)) throw ValidationError("vertex " + std::to_string(v) + " is not embedded");
    }
    if (!embedding_.is_injective()) throw ValidationError("embedding is not injective");
}

std::vector<std::vector<std::int64_t>> EmbeddedComplex::coordinate_set(const Simplex& s) const {
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(s.vertices().size());
    for (VertexId v : s.vertices()) out.push_back(embedding_.quantized(v));
    std::sort(out.begin(), out.end());
    return out;
}

EmbeddedComplex relabeled(const EmbeddedComplex& k, const std::map<VertexId, VertexId>& relabel) {
    auto map_vertex = [&](VertexId v) {
        auto it = relabel.find(v);
        if (it == relabel.end()) throw ValidationError("relabeling misses vertex " + std::to_string(v));
        return it->second;
    };
    std::vector<Simplex> simplices;
    for (const auto& s : k.complex().simplices()) {
        std::vector<VertexId> vs;
        for (VertexId v : s.vertices()) vs.push_back(map_vertex(v));
        simplices.emplace_back(std::move(vs));
    }
    std::map<VertexId, Point> coords;
    for (const auto& [v, p] : k.embedding().coords()) {
        if (!coords.emplace(map_vertex(v), p).second) throw ValidationError("relabeling is not injective");
    }
    return {AbstractComplex::from_simplices(std::move(simplices)),
            Embedding(std::move(coords), k.embedding().quantizer().digits())};
}

EmbeddedComplex disjoint_union(const EmbeddedComplex& a, const EmbeddedComplex& b) {
    const auto va = a.complex().vertices();
    const VertexId shift = va.empty() ? 0 : va.back() + 1;
    std::vector<Simplex> simplices = a.complex().simplices();
    for (const auto& s : b.complex().simplices()) {
        std::vector<VertexId> vs;
        for (VertexId v : s.vertices()) vs.push_back(v + shift);
        simplices.emplace_back(std::move(vs));
    }
    auto coords = a.embedding().coords();
    for (const auto& [v, p] : b.embedding().coords()) coords.emplace(v + shift, p);
    return {AbstractComplex::from_simplices(std::move(simplices)),
            Embedding(std::move(coords), a.embedding().quantizer().digits())};
}

// ------------------------------------------------------ derived features

namespace {

double norm(const Point& p) {
    double s = 0.0;
    for (double c : p) s += c * c;
    return std::sqrt(s);
}

Point sub(const Point& a, const Point& b) {
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double triangle_area(const Point& a, const Point& b, const Point& c) {
    const Point u = sub(b, a);
    const Point w = sub(c, a);
    if (u.size() == 1) return 0.0;
    if (u.size() == 2) return 0.5 * std::abs(u[0] * w[1] - u[1] * w[0]);
    if (u.size() == 3) {
        const Point cross{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
        return 0.5 * norm(cross);
    }
    // Gram determinant for d > 3.
    double uu = 0, ww = 0, uw = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        ww += w[i] * w[i];
        uw += u[i] * w[i];
    }
    return 0.5 * std::sqrt(std::max(0.0, uu * ww - uw * uw));
}

}  // namespace

std::vector<double> derived_features(const Simplex& s, const Embedding& x) {
    const int k = s.dim();
    if (k > 2) {
        throw UnsupportedFeatureDimension("unsupported feature dimension " + std::to_string(k));
    }
    const auto& vs = s.vertices();
    const auto d = static_cast<std::size_t>(x.ambient_dim());
    std::vector<double> out(d, 0.0);
    for (VertexId v : vs) {
        const auto& p = x.at(v);
        for (std::size_t i = 0; i < d; ++i) out[i] += p[i];
    }
    for (double& c : out) c /= static_cast<double>(vs.size());
    if (k == 1) out.push_back(norm(sub(x.at(vs[0]), x.at(vs[1]))));
    if (k == 2) out.push_back(triangle_area(x.at(vs[0]), x.at(vs[1]), x.at(vs[2])));
    return out;
}

// ---------------------------------------------------- isomorphism oracle

bool embedded_isomorphic(const EmbeddedComplex& a, const EmbeddedComplex& b, std::size_t vertex_budget) {
    const auto va = a.complex().vertices();
    const auto vb = b.complex().vertices();
    if (va.size() > vertex_budget || vb.size() > vertex_budget) {
        throw OracleBudgetExceeded("oracle budget exceeded: " + std::to_string(std::max(va.size(), vb.size())) +
                                   " vertices > " + std::to_string(vertex_budget));
    }
    if (va.size() != vb.size() || a.complex().per_dim_counts() != b.complex().per_dim_counts()) return false;
    if (a.embedding().ambient_dim() != b.embedding().ambient_dim()) return false;

    std::vector<std::vector<std::size_t>> candidates(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
        const auto qa = a.embedding().quantized(va[i]);
        for (std::size_t j = 0; j < vb.size(); ++j) {
            if (b.embedding().quantized(vb[j]) == qa) candidates[i].push_back(j);
        }
        if (candidates[i].empty()) return false;
    }

    std::vector<std::size_t> image(va.size());
    std::vector<bool> used(vb.size(), false);
    auto maps_simplices = [&] {
        std::map<VertexId, VertexId> phi;
        for (std::size_t i = 0; i < va.size(); ++i) phi[va[i]] = vb[image[i]];
        for (const auto& s : a.complex().simplices()) {
            std::vector<VertexId> mapped;
            for (VertexId v : s.vertices()) mapped.push_back(phi[v]);
            if (!b.complex().contains(Simplex(std::move(mapped)))) return false;
        }
        return true;  // equal per-dimension counts make the injective map onto
    };
    std::function<bool(std::size_t)> search = [&](std::size_t i) {
        if (i == va.size()) return maps_simplices();
        for (std::size_t j : candidates[i]) {
            if (used[j]) continue;
            used[j] = true;
            image[i] = j;
            if (search(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return search(0);
}

}  // namespace gswl
