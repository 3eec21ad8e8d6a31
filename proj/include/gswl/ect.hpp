#pragma once

// Euler characteristic transform of embedded complexes: entry times,
// sublevel complexes, exact directional Euler characteristic curves, sampled
// grids, and the ECT distance with exact per-direction L1 integrals.
//
// Curves are right-continuous: chi(K_{v,t}) counts simplices with entry
// time <= t.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gswl/complex.hpp"

namespace gswl {

/// Unit vector; normalized on construction.
class Direction {
  public:
    explicit Direction(std::vector<double> v);

    const std::vector<double>& vector() const { return v_; }
    int dim() const { return static_cast<int>(v_.size()); }

    friend bool operator==(const Direction&, const Direction&) = default;

  private:
    std::vector<double> v_;
};

double dot(const Point& p, const Direction& nu);

/// max_{u in sigma} <x_u, nu>
double entry_time(const Simplex& s, const Direction& nu, const Embedding& x);

AbstractComplex sublevel_complex(const EmbeddedComplex& k, const Direction& nu, double t);

struct Breakpoint {
    double threshold;
    long long chi;  // value on [threshold, next threshold)
    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-constant t -> chi(K_{nu,t}); zero before the first breakpoint.
/// Breakpoints are strictly increasing and consecutive values differ, so two
/// curves are equal as functions iff their breakpoint lists are equal.
class ECCCurve {
  public:
    ECCCurve() = default;
    explicit ECCCurve(std::vector<Breakpoint> breakpoints);

    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
    long long operator()(double t) const;
    long long final_value() const { return breakpoints_.empty() ? 0 : breakpoints_.back().chi; }

    friend bool operator==(const ECCCurve&, const ECCCurve&) = default;

  private:
    std::vector<Breakpoint> breakpoints_;
};

ECCCurve ecc_curve(const EmbeddedComplex& k, const Direction& nu);

/// Exact integral of |f - g| over the real line. Throws std::domain_error
/// when the curves end at different values (the integral diverges).
double l1_distance(const ECCCurve& f, const ECCCurve& g);

struct SampledECT {
    std::vector<Direction> directions;
    std::vector<double> thresholds;
    std::vector<std::vector<long long>> values;  // [direction][threshold]

    /// Direction-major flattening, length |V| * |T|.
    std::vector<long long> flatten() const;
    friend bool operator==(const SampledECT&, const SampledECT&) = default;
};

SampledECT sampled_ect(const EmbeddedComplex& k, const std::vector<Direction>& directions,
                       std::vector<double> thresholds);

/// Quadrature rule on S^{d-1}.
struct Quadrature {
    std::string scheme;
    std::vector<Direction> directions;
    std::vector<double> weights;
};

/// d = 1: {+1, -1}, weight 1/2 each. d = 2: n uniform angles, weight 2*pi/n.
/// d = 3: n Fibonacci-lattice points, weight 4*pi/n.
Quadrature sphere_quadrature(int d, int n);

inline constexpr int kDefaultQuadrature2d = 64;
inline constexpr int kDefaultQuadrature3d = 256;
Quadrature default_quadrature(int d);

/// n directions at uniform angles in the plane (d = 2) or the Fibonacci
/// lattice (d = 3), without weights.
std::vector<Direction> uniform_directions(int d, int n);

/// Evenly spaced thresholds spanning [min, max] entry time over the family and
/// directions, padded by `margin` on both sides.
std::vector<double> spanning_thresholds(const std::vector<EmbeddedComplex>& family,
                                        const std::vector<Direction>& directions, int count, double margin = 0.0);

struct ECTDistanceResult {
    double total = 0.0;
    std::vector<std::pair<Direction, double>> per_direction;
    std::string quadrature;
};

/// Both embeddings must cover exactly the vertex set of `k`.
ECTDistanceResult ect_distance(const AbstractComplex& k, const Embedding& x, const Embedding& y,
                               const Quadrature& quadrature);
/// Throws ValidationError unless both share the same abstract complex.
ECTDistanceResult ect_distance(const EmbeddedComplex& a, const EmbeddedComplex& b, const Quadrature& quadrature);

struct InjectivityReport {
    std::size_t thresholds = 0;
    std::size_t directions = 0;
    std::size_t pairs = 0;
    /// Pairs with identical sampled ECTs: either the grid is too coarse or
    /// the pair is a genuine counterexample. Never silently passed.
    std::vector<std::pair<std::size_t, std::size_t>> collisions;
    bool all_distinct() const { return collisions.empty(); }
};

/// Union of all entry times over the family plus the midpoints between
/// consecutive ones and one point below the minimum.
std::vector<double> entry_time_grid(const std::vector<EmbeddedComplex>& family,
                                    const std::vector<Direction>& directions);

/// Pairwise sampled-ECT comparison. With auto_grid the thresholds come from
/// entry_time_grid; otherwise `thresholds` is used as given.
InjectivityReport injectivity_check(const std::vector<EmbeddedComplex>& family, const std::vector<Direction>& directions,
                                    bool auto_grid, const std::vector<double>& thresholds = {});

}  // namespace gswl
