#include "gswl/ect.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace gswl {

Direction::Direction(std::vector<double> v) : v_(std::move(v)) {
    if (v_.empty()) throw ValidationError("direction must have at least one component");
    double n = 0.0;
    for (double c : v_) n += c * c;
    n = std::sqrt(n);
    if (!(n > 1e-12) || !std::isfinite(n)) throw ValidationError("direction must be a finite nonzero vector");
    for (double& c : v_) c /= n;
}

double dot(const Point& p, const Direction& nu) {
    const auto& v = nu.vector();
    if (p.size() != v.size()) throw ValidationError("direction dimension does not match the embedding");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * v[i];
    return s;
}

double entry_time(const Simplex& s, const Direction& nu, const Embedding& x) {
    double t = -std::numeric_limits<double>::infinity();
    for (VertexId v : s.vertices()) t = std::max(t, dot(x.at(v), nu));
    return t;
}

AbstractComplex sublevel_complex(const EmbeddedComplex& k, const Direction& nu, double t) {
    std::vector<Simplex> kept;
    for (const auto& s : k.complex().simplices()) {
        if (entry_time(s, nu, k.embedding()) <= t) kept.push_back(s);
    }
    // from_simplices validates face closure.
    return AbstractComplex::from_simplices(std::move(kept));
}

// ------------------------------------------------------------------ curves

ECCCurve::ECCCurve(std::vector<Breakpoint> breakpoints) : breakpoints_(std::move(breakpoints)) {
    long long prev = 0;
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (i > 0 && !(breakpoints_[i].threshold > breakpoints_[i - 1].threshold)) {
            throw std::invalid_argument("ECC breakpoints must be strictly increasing");
        }
        if (breakpoints_[i].chi == prev) throw std::invalid_argument("ECC breakpoint does not change the value");
        prev = breakpoints_[i].chi;
    }
}

long long ECCCurve::operator()(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                               [](double value, const Breakpoint& b) { return value < b.threshold; });
    if (it == breakpoints_.begin()) return 0;
    return std::prev(it)->chi;
}

ECCCurve ecc_curve(const EmbeddedComplex& k, const Direction& nu) {
    std::vector<std::pair<double, int>> events;
    events.reserve(k.complex().size());
    for (const auto& s : k.complex().simplices()) {
        events.emplace_back(entry_time(s, nu, k.embedding()), s.dim() % 2 == 0 ? 1 : -1);
    }
    std::sort(events.begin(), events.end());
    std::vector<Breakpoint> out;
    long long chi = 0;
    for (std::size_t i = 0; i < events.size();) {
        const double t = events[i].first;
        long long delta = 0;
        for (; i < events.size() && events[i].first == t; ++i) delta += events[i].second;
        if (delta == 0) continue;
        chi += delta;
        out.push_back({t, chi});
    }
    return ECCCurve(std::move(out));
}

double l1_distance(const ECCCurve& f, const ECCCurve& g) {
    if (f.final_value() != g.final_value()) {
        throw std::domain_error("curves end at different Euler characteristics; L1 distance is infinite");
    }
    std::vector<double> ts;
    for (const auto& b : f.breakpoints()) ts.push_back(b.threshold);
    for (const auto& b : g.breakpoints()) ts.push_back(b.threshold);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const long long diff = f(ts[i]) - g(ts[i]);
        total += static_cast<double>(std::llabs(diff)) * (ts[i + 1] - ts[i]);
    }
    return total;
}

// ----------------------------------------------------------------- sampling

std::vector<long long> SampledECT::flatten() const {
    std::vector<long long> out;
    out.reserve(directions.size() * thresholds.size());
    for (const auto& row : values) out.insert(out.end(), row.begin(), row.end());
    return out;
}

SampledECT sampled_ect(const EmbeddedComplex& k, const std::vector<Direction>& directions,
                       std::vector<double> thresholds) {
    SampledECT out{directions, std::move(thresholds), {}};
    out.values.reserve(directions.size());
    for (const auto& nu : directions) {
        const auto curve = ecc_curve(k, nu);
        std::vector<long long> row;
        row.reserve(out.thresholds.size());
        for (double t : out.thresholds) row.push_back(curve(t));
        out.values.push_back(std::move(row));
    }
    return out;
}

// --------------------------------------------------------------- quadrature

std::vector<Direction> uniform_directions(int d, int n) {
    if (n < 1) throw std::invalid_argument("direction count must be >= 1");
    std::vector<Direction> out;
    switch (d) {
        case 1:
            out.emplace_back(std::vector<double>{1.0});
            out.emplace_back(std::vector<double>{-1.0});
            break;
        case 2:
            for (int i = 0; i < n; ++i) {
                const double a = 2.0 * std::numbers::pi * i / n;
                out.emplace_back(std::vector<double>{std::cos(a), std::sin(a)});
            }
            break;
        case 3: {
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < n; ++i) {
                const double z = 1.0 - (2.0 * i + 1.0) / n;
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = golden * i;
                out.emplace_back(std::vector<double>{r * std::cos(phi), r * std::sin(phi), z});
            }
            break;
        }
        default:
            throw std::invalid_argument("sphere quadrature supports d in {1,2,3}, got " + std::to_string(d));
    }
    return out;
}

Quadrature sphere_quadrature(int d, int n) {
    Quadrature q;
    q.directions = uniform_directions(d, n);
    double w = 0.0;
    switch (d) {
        case 1:
            w = 0.5;
            q.scheme = "S0 counting {+1,-1}";
            break;
        case 2:
            w = 2.0 * std::numbers::pi / n;
            q.scheme = "S1 uniform angles n=" + std::to_string(n);
            break;
        default:
            w = 4.0 * std::numbers::pi / n;
            q.scheme = "S2 fibonacci lattice n=" + std::to_string(n);
            break;
    }
    q.weights.assign(q.directions.size(), w);
    return q;
}

Quadrature default_quadrature(int d) {
    return sphere_quadrature(d, d == 3 ? kDefaultQuadrature3d : kDefaultQuadrature2d);
}

std::vector<double> spanning_thresholds(const std::vector<EmbeddedComplex>& family,
                                        const std::vector<Direction>& directions, int count, double margin) {
    if (count < 1) throw std::invalid_argument("threshold count must be >= 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& k : family) {
        for (const auto& [v, p] : k.embedding().coords()) {
            for (const auto& nu : directions) {
                const double t = dot(p, nu);
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        }
    }
    if (!std::isfinite(lo)) throw std::invalid_argument("cannot span thresholds of an empty family");
    lo -= margin;
    hi += margin;
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
}

// ----------------------------------------------------------------- distance

ECTDistanceResult ect_distance(const AbstractComplex& k, const Embedding& x, const Embedding& y,
                               const Quadrature& quadrature) {
    if (quadrature.directions.empty()) throw std::invalid_argument("quadrature has no directions");
    if (quadrature.directions.size() != quadrature.weights.size()) {
        throw std::invalid_argument("quadrature weights do not match its directions");
    }
    const EmbeddedComplex a(k, x);
    const EmbeddedComplex b(k, y);
    ECTDistanceResult out;
    out.quadrature = quadrature.scheme;
    for (std::size_t i = 0; i < quadrature.directions.size(); ++i) {
        const auto& nu = quadrature.directions[i];
        const double l1 = l1_distance(ecc_curve(a, nu), ecc_curve(b, nu));
        out.per_direction.emplace_back(nu, l1);
    }
    // Summed in direction order so the result is independent of scheduling.
    for (std::size_t i = 0; i < out.per_direction.size(); ++i) {
        out.total += quadrature.weights[i] * out.per_direction[i].second;
    }
    return out;
}

ECTDistanceResult ect_distance(const EmbeddedComplex& a, const EmbeddedComplex& b, const Quadrature& quadrature) {
    if (!(a.complex() == b.complex())) {
        throw ValidationError("ECT distance is defined only between embeddings of the same abstract complex");
    }
    return ect_distance(a.complex(), a.embedding(), b.embedding(), quadrature);
}

// ------------------------------------------------------------- injectivity

std::vector<double> entry_time_grid(const std::vector<EmbeddedComplex>& family,
                                    const std::vector<Direction>& directions) {
    std::set<double> times;
    for (const auto& k : family) {
        for (const auto& [v, p] : k.embedding().coords()) {
            for (const auto& nu : directions) times.insert(dot(p, nu));
        }
    }
    if (times.empty()) return {};
    std::vector<double> sorted(times.begin(), times.end());
    std::vector<double> out{sorted.front() - 1.0};
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.push_back(sorted[i]);
        if (i + 1 < sorted.size()) out.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    return out;
}

InjectivityReport injectivity_check(const std::vector<EmbeddedComplex>& family, const std::vector<Direction>& directions,
                                    bool auto_grid, const std::vector<double>& thresholds) {
    const auto grid = auto_grid ? entry_time_grid(family, directions) : thresholds;
    InjectivityReport report;
    report.thresholds = grid.size();
    report.directions = directions.size();
    std::vector<SampledECT> ects;
    ects.reserve(family.size());
    for (const auto& k : family) ects.push_back(sampled_ect(k, directions, grid));
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            ++report.pairs;
            if (ects[i].values == ects[j].values) report.collisions.emplace_back(i, j);
        }
    }
    return report;
}

}  // namespace gswl
