#include "gswl/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace gswl {

namespace {

EmbeddedComplex from_triangles(const std::vector<std::vector<VertexId>>& tris, std::map<VertexId, Point> coords,
                               int digits = kDefaultQuantizationDigits) {
    auto maximal = tris;
    for (const auto& [v, p] : coords) maximal.push_back({v});
    return {build_complex(maximal), Embedding(std::move(coords), digits)};
}

}  // namespace

EmbeddedComplex grid_triangulation(int nx, int ny, double spacing) {
    if (nx < 2 || ny < 2) throw ValidationError("grid needs nx, ny >= 2");
    std::map<VertexId, Point> coords;
    auto id = [nx](int i, int j) { return static_cast<VertexId>(j * nx + i); };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) coords[id(i, j)] = {i * spacing, j * spacing};
    }
    std::vector<std::vector<VertexId>> tris;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return from_triangles(tris, std::move(coords));
}

EmbeddedComplex disk_fan(int segments, double radius) {
    if (segments < 3) throw ValidationError("disk fan needs at least 3 segments");
    std::map<VertexId, Point> coords{{0, {0.0, 0.0}}};
    std::vector<std::vector<VertexId>> tris;
    for (int i = 0; i < segments; ++i) {
        const double a = 2.0 * std::numbers::pi * i / segments;
        coords[i + 1] = {radius * std::cos(a), radius * std::sin(a)};
        tris.push_back({0, i + 1, (i + 1) % segments + 1});
    }
    return from_triangles(tris, std::move(coords));
}

EmbeddedComplex grid40() { return grid_triangulation(8, 5, 1.0); }

// ------------------------------------------------------------ deformations

std::string to_string(DeformationFamily f) {
    switch (f) {
        case DeformationFamily::bend: return "bend";
        case DeformationFamily::twist: return "twist";
        case DeformationFamily::stretch: return "stretch";
        case DeformationFamily::random_smooth: return "random_smooth";
    }
    return "?";
}

DeformationFamily parse_deformation(std::string_view s) {
    for (auto f : kDeformationFamilies) {
        if (s == to_string(f)) return f;
    }
    throw std::invalid_argument("unknown deformation family '" + std::string(s) + "'");
}

EmbeddedComplex apply_deformation(const EmbeddedComplex& k, const DeformationSpec& spec) {
    const int d = k.embedding().ambient_dim();
    if (d != 2 && d != 3) throw ValidationError("deformations need ambient dimension 2 or 3");
    const double a = spec.amplitude;
    auto coords = k.embedding().coords();

    double cx = 0.0, cy = 0.0;
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
    for (const auto& [v, p] : coords) {
        cx += p[0];
        cy += p[1];
        lo_x = std::min(lo_x, p[0]);
        hi_x = std::max(hi_x, p[0]);
        lo_y = std::min(lo_y, p[1]);
        hi_y = std::max(hi_y, p[1]);
    }
    cx /= static_cast<double>(coords.size());
    cy /= static_cast<double>(coords.size());

    switch (spec.family) {
        case DeformationFamily::bend:
            for (auto& [v, p] : coords) p[1] += a * p[0] * p[0];
            break;
        case DeformationFamily::twist:
            for (auto& [v, p] : coords) {
                const double theta = a * (p[1] - cy);
                const double dx = p[0] - cx, dy = p[1] - cy;
                p[0] = cx + std::cos(theta) * dx - std::sin(theta) * dy;
                p[1] = cy + std::sin(theta) * dx + std::cos(theta) * dy;
            }
            break;
        case DeformationFamily::stretch:
            for (auto& [v, p] : coords) p[0] *= 1.0 + a;
            break;
        case DeformationFamily::random_smooth: {
            std::mt19937_64 rng(spec.seed);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const double extent = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
            const double width = 0.3 * extent;
            struct Bump {
                double x, y, ux, uy;
            };
            std::vector<Bump> bumps;
            for (int b = 0; b < 3; ++b) {
                const double x = lo_x + unit(rng) * (hi_x - lo_x);
                const double y = lo_y + unit(rng) * (hi_y - lo_y);
                const double angle = 2.0 * std::numbers::pi * unit(rng);
                bumps.push_back({x, y, std::cos(angle), std::sin(angle)});
            }
            for (auto& [v, p] : coords) {
                double dx = 0.0, dy = 0.0;
                for (const auto& b : bumps) {
                    const double r2 = (p[0] - b.x) * (p[0] - b.x) + (p[1] - b.y) * (p[1] - b.y);
                    const double g = a * std::exp(-r2 / (2.0 * width * width));
                    dx += g * b.ux;
                    dy += g * b.uy;
                }
                p[0] += dx;
                p[1] += dy;
            }
            break;
        }
    }

    Embedding x(std::move(coords), k.embedding().quantizer().digits());
    if (!x.is_injective()) {
        throw InjectivityLost(to_string(spec.family) + " deformation with amplitude " + std::to_string(a) +
                                  " is not injective; try " + std::to_string(a / 2),
                              a / 2);
    }
    return {k.complex(), std::move(x)};
}

std::vector<EmbeddedComplex> deformation_suite(const EmbeddedComplex& base, const std::vector<std::uint64_t>& seeds,
                                               double amplitude) {
    std::vector<EmbeddedComplex> out;
    for (auto family : kDeformationFamilies) {
        for (std::uint64_t seed : seeds) {
            const double a = family == DeformationFamily::random_smooth
                                 ? amplitude
                                 : amplitude * (1.0 + static_cast<double>(seed) / 10.0);
            out.push_back(apply_deformation(base, {family, a, seed}));
        }
    }
    return out;
}

EmbeddedComplex generate_mesh(const MeshSpec& spec) {
    switch (spec.kind) {
        case MeshKind::grid: return grid_triangulation(spec.nx, spec.ny, spec.spacing);
        case MeshKind::disk_fan: return disk_fan(spec.segments, spec.spacing);
        case MeshKind::library: {
            auto lib = library_triangulation(spec.library);
            auto emb = spectral_embedding(lib.complex, spec.seed);
            return {std::move(lib.complex), std::move(emb.embedding)};
        }
    }
    throw std::invalid_argument("unknown mesh kind");
}

// ---------------------------------------------------------- triangulations

namespace {

AbstractComplex complex_of(const std::vector<std::vector<VertexId>>& tris) { return build_complex(tris); }

std::vector<std::vector<VertexId>> torus_triangles() {
    std::vector<std::vector<VertexId>> out;
    for (VertexId i = 0; i < 7; ++i) {
        out.push_back({i, (i + 1) % 7, (i + 3) % 7});
        out.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return out;
}

// 3 x 3 grid on the unit square with (i, j + 3) ~ (i, j) and (i + 3, j) ~ (i, -j).
std::vector<std::vector<VertexId>> klein_triangles() {
    auto id = [](int i, int j) -> VertexId {
        j %= 3;
        if (i >= 3) {
            i -= 3;
            j = (3 - j) % 3;
        }
        return i * 3 + j;
    };
    std::vector<std::vector<VertexId>> out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            out.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return out;
}

}  // namespace

LibraryTriangulation library_triangulation(std::string_view name) {
    if (name == "sphere_S2") {
        return {"sphere_S2", complex_of({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}), 2, true};
    }
    if (name == "torus_T2") return {"torus_T2", complex_of(torus_triangles()), 0, true};
    if (name == "klein_bottle") return {"klein_bottle", complex_of(klein_triangles()), 0, false};
    if (name == "rp2") {
        return {"rp2",
                complex_of({{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                            {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}}),
                1, false};
    }
    throw std::invalid_argument("unknown library triangulation '" + std::string(name) + "'");
}

std::vector<std::string> library_names() { return {"sphere_S2", "torus_T2", "klein_bottle", "rp2"}; }

SurfaceCheck check_closed_surface(const AbstractComplex& k) {
    SurfaceCheck out;
    out.chi = euler_characteristic(k);
    const auto adj = hasse(k);
    out.pure = k.max_dim() == 2;
    out.closed = k.count(1) > 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (adj.coboundary[i].empty() && k[i].dim() != 2) out.pure = false;
        if (k[i].dim() == 1 && adj.coboundary[i].size() != 2) out.closed = false;
    }
    // BFS over the 1-skeleton.
    const auto verts = k.vertices();
    if (!verts.empty()) {
        std::vector<bool> seen(k.size(), false);
        std::queue<std::size_t> todo;
        todo.push(0);
        seen[0] = true;
        std::size_t reached = 0;
        while (!todo.empty()) {
            const auto v = todo.front();
            todo.pop();
            ++reached;
            for (std::size_t e : adj.coboundary[v]) {
                for (std::size_t u : adj.boundary[e]) {
                    if (!seen[u]) {
                        seen[u] = true;
                        todo.push(u);
                    }
                }
            }
        }
        out.connected = reached == verts.size();
    }
    return out;
}

// ---------------------------------------------------------------- spectral

std::vector<std::vector<double>> graph_laplacian(const AbstractComplex& k) {
    const auto verts = k.vertices();
    const std::size_t n = verts.size();
    std::vector<std::vector<double>> lap(n, std::vector<double>(n, 0.0));
    std::map<VertexId, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[verts[i]] = i;
    for (const auto& s : k.simplices()) {
        if (s.dim() != 1) continue;
        const auto a = pos[s.vertices()[0]], b = pos[s.vertices()[1]];
        lap[a][b] -= 1.0;
        lap[b][a] -= 1.0;
        lap[a][a] += 1.0;
        lap[b][b] += 1.0;
    }
    return lap;
}

EigenDecomposition jacobi_eigen(std::vector<std::vector<double>> a, double tolerance, int max_sweeps) {
    const std::size_t n = a.size();
    for (const auto& row : a) {
        if (row.size() != n) throw std::invalid_argument("matrix must be square");
    }
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) s += a[i][j] * a[i][j];
            }
        }
        return std::sqrt(s);
    };

    EigenDecomposition out;
    while (off_norm() >= tolerance) {
        if (out.sweeps >= max_sweeps) throw std::runtime_error("Jacobi eigensolver did not converge");
        ++out.sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    struct Pair {
        double value;
        std::vector<double> vec;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        Pair pr{a[i][i], std::vector<double>(n)};
        for (std::size_t k = 0; k < n; ++k) pr.vec[k] = v[k][i];
        std::size_t big = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs(pr.vec[k]) > std::abs(pr.vec[big]) + 1e-12) big = k;
        }
        if (n > 0 && pr.vec[big] < 0) {
            for (double& x : pr.vec) x = -x;
        }
        pairs.push_back(std::move(pr));
    }
    constexpr double kTie = 1e-9;
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (std::abs(x.value - y.value) > kTie) return x.value < y.value;
        return x.vec < y.vec;
    });
    for (auto& pr : pairs) {
        out.values.push_back(pr.value);
        out.vectors.push_back(std::move(pr.vec));
    }
    return out;
}

SpectralEmbedding spectral_embedding(const AbstractComplex& k, std::uint64_t seed, int quantization_digits) {
    const auto verts = k.vertices();
    if (verts.size() < 3) throw ValidationError("spectral embedding needs at least 3 vertices");
    if (verts.size() > 200) throw ValidationError("spectral embedding supports at most 200 vertices");
    if (!check_closed_surface(k).connected) throw ValidationError("spectral embedding needs a connected 1-skeleton");

    const auto eig = jacobi_eigen(graph_laplacian(k));
    SpectralEmbedding out;
    out.eigenvalues = eig.values;
    constexpr double kTie = 1e-9;
    for (std::size_t i = 1; i + 1 < eig.values.size() && i <= 3; ++i) {
        if (std::abs(eig.values[i + 1] - eig.values[i]) <= kTie) out.degenerate = true;
    }

    std::map<VertexId, Point> coords;
    for (std::size_t i = 0; i < verts.size(); ++i) coords[verts[i]] = {eig.vectors[1][i], eig.vectors[2][i]};
    Embedding x(coords, quantization_digits);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-1e-6, 1e-6);
    for (int attempt = 0; !x.is_injective(); ++attempt) {
        if (attempt >= 10) throw std::runtime_error("spectral embedding stayed non-injective after jitter");
        out.jittered = true;
        for (auto& [v, p] : coords) {
            for (double& c : p) c += jitter(rng);
        }
        x = Embedding(coords, quantization_digits);
    }
    out.embedding = std::move(x);
    return out;
}

// ------------------------------------------------------------ perturbation

EmbeddedComplex perturb_embedding(const EmbeddedComplex& k, double scale, std::uint64_t seed) {
    if (!(scale >= 0.0)) throw ValidationError("perturbation scale must be >= 0");
    if (scale == 0.0) return k;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, scale);
    for (int attempt = 0; attempt < 10; ++attempt) {
        auto coords = k.embedding().coords();
        for (auto& [v, p] : coords) {
            for (double& c : p) c += noise(rng);
        }
        Embedding x(std::move(coords), k.embedding().quantizer().digits());
        if (x.is_injective()) return {k.complex(), std::move(x)};
    }
    throw InjectivityLost("perturbation stayed non-injective after 10 resamples", scale / 2);
}

// ------------------------------------------------------------------ summary

namespace {

struct Moments {
    double mean = 0, stddev = 0, min = 0, max = 0, sum = 0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    m.sum = std::accumulate(xs.begin(), xs.end(), 0.0);
    m.mean = m.sum / static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    m.min = *std::min_element(xs.begin(), xs.end());
    m.max = *std::max_element(xs.begin(), xs.end());
    return m;
}

// Linear interpolation between closest ranks.
double percentile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double rank = p / 100.0 * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (rank - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double angle_at(const Point& apex, const Point& b, const Point& c) {
    double uu = 0, ww = 0, uw = 0;
    for (std::size_t i = 0; i < apex.size(); ++i) {
        const double u = b[i] - apex[i], w = c[i] - apex[i];
        uu += u * u;
        ww += w * w;
        uw += u * w;
    }
    if (uu == 0.0 || ww == 0.0) return 0.0;
    return std::acos(std::clamp(uw / std::sqrt(uu * ww), -1.0, 1.0));
}

}  // namespace

std::vector<double> angle_defects(const EmbeddedComplex& k) {
    const auto verts = k.complex().vertices();
    std::map<VertexId, double> total;
    for (VertexId v : verts) total[v] = 0.0;
    const auto& x = k.embedding();
    for (const auto& s : k.complex().simplices()) {
        if (s.dim() != 2) continue;
        const auto& v = s.vertices();
        for (int i = 0; i < 3; ++i) {
            total[v[i]] += angle_at(x.at(v[i]), x.at(v[(i + 1) % 3]), x.at(v[(i + 2) % 3]));
        }
    }
    std::vector<double> out;
    for (VertexId v : verts) out.push_back(2.0 * std::numbers::pi - total[v]);
    return out;
}

std::array<double, kSummarySize> geometric_summary(const EmbeddedComplex& k, const Embedding& base) {
    const auto& x = k.embedding();
    const auto verts = k.complex().vertices();
    if (base.size() != verts.size()) throw ValidationError("base embedding does not match the complex");

    std::vector<double> disp, lengths, areas;
    for (VertexId v : verts) disp.push_back(distance(x.at(v), base.at(v)));
    for (const auto& s : k.complex().simplices()) {
        if (s.dim() == 1) lengths.push_back(distance(x.at(s.vertices()[0]), x.at(s.vertices()[1])));
        if (s.dim() == 2) areas.push_back(derived_features(s, x).back());
    }
    const auto defects = angle_defects(k);

    std::array<double, kSummarySize> out{};
    std::size_t i = 0;
    const auto md = moments(disp);
    for (double v : {md.mean, md.stddev, md.max}) out[i++] = v;
    const auto ml = moments(lengths);
    for (double v : {ml.mean, ml.stddev, ml.min, ml.max}) out[i++] = v;
    for (double p : {10.0, 25.0, 50.0, 75.0, 90.0}) out[i++] = percentile(lengths, p);
    const auto ma = moments(areas);
    for (double v : {ma.mean, ma.stddev, ma.min, ma.max, ma.sum}) out[i++] = v;
    const auto mk = moments(defects);
    for (double v : {mk.mean, mk.stddev, mk.min, mk.max, mk.sum}) out[i++] = v;

    out[i++] = static_cast<double>(k.complex().count(0));
    out[i++] = static_cast<double>(k.complex().count(1));
    out[i++] = static_cast<double>(k.complex().count(2));
    out[i++] = static_cast<double>(euler_characteristic(k.complex()));
    out[i++] = ml.sum;
    for (int axis = 0; axis < 3; ++axis) {
        double lo = 0.0, hi = 0.0;
        if (axis < x.ambient_dim() && !verts.empty()) {
            lo = hi = x.at(verts.front())[static_cast<std::size_t>(axis)];
            for (VertexId v : verts) {
                lo = std::min(lo, x.at(v)[static_cast<std::size_t>(axis)]);
                hi = std::max(hi, x.at(v)[static_cast<std::size_t>(axis)]);
            }
        }
        out[i++] = hi - lo;
    }
    return out;
}

}  // namespace gswl
