#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "gswl/complex.hpp"
#include "gswl/generators.hpp"
#include "gswl/io.hpp"

using namespace gswl;

namespace {

EmbeddedComplex filled_triangle() {
    return {build_complex({{0, 1, 2}}), Embedding({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {0.0, 1.0}}})};
}

// Every nonempty subset of every listed simplex, by bitmask enumeration.
std::set<std::vector<VertexId>> closure_oracle(const std::vector<std::vector<VertexId>>& maximal) {
    std::set<std::vector<VertexId>> out;
    for (auto s : maximal) {
        std::sort(s.begin(), s.end());
        for (unsigned mask = 1; mask < (1u << s.size()); ++mask) {
            std::vector<VertexId> face;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (mask & (1u << i)) face.push_back(s[i]);
            }
            out.insert(face);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("quantizer snaps equal decimals to equal integers") {
    const Quantizer q(12);
    CHECK(q.quantize(0.1 + 0.2) == q.quantize(0.3));
    CHECK(q.snap(0.1 + 0.2) == q.snap(0.3));
    CHECK(q.quantize(-1.5) == -1500000000000LL);
    CHECK(Quantizer(0).quantize(2.4) == 2);
    CHECK_THROWS_AS(Quantizer(16), std::invalid_argument);
    CHECK_THROWS(q.quantize(1e300));
    CHECK_THROWS(q.quantize(std::nan("")));
}

TEST_CASE("simplex validation and facets") {
    const Simplex s{2, 0, 1};
    CHECK(s.vertices() == std::vector<VertexId>{0, 1, 2});
    CHECK(s.dim() == 2);
    const auto f = s.facets();
    REQUIRE(f.size() == 3);
    CHECK(std::set<Simplex>(f.begin(), f.end()) == std::set<Simplex>{Simplex{0, 1}, Simplex{0, 2}, Simplex{1, 2}});
    CHECK(Simplex{3}.facets().empty());
    CHECK_THROWS_AS(Simplex({1, 1}), ValidationError);
    CHECK_THROWS_AS(Simplex(std::vector<VertexId>{}), ValidationError);
    CHECK_THROWS_AS(Simplex({-1, 2}), ValidationError);
}

TEST_CASE("from_simplices rejects a missing face") {
    CHECK_THROWS_AS(AbstractComplex::from_simplices({Simplex{0}, Simplex{1}, Simplex{0, 1, 2}}), ValidationError);
    const auto k = AbstractComplex::from_simplices({Simplex{0}, Simplex{0}, Simplex{1}, Simplex{0, 1}});
    CHECK(k.size() == 3);
}

TEST_CASE("closure matches subset enumeration") {
    const std::vector<std::vector<VertexId>> maximal{{0, 1, 2}, {2, 3}, {1, 2, 4, 5}, {6}};
    const auto k = build_complex(maximal);
    std::set<std::vector<VertexId>> got;
    for (const auto& s : k.simplices()) got.insert(s.vertices());
    CHECK(got == closure_oracle(maximal));
    CHECK(k.max_dim() == 3);
    std::set<std::vector<VertexId>> maximal_got;
    for (const auto& s : k.maximal_simplices()) maximal_got.insert(s.vertices());
    CHECK(maximal_got == std::set<std::vector<VertexId>>{{0, 1, 2}, {2, 3}, {1, 2, 4, 5}, {6}});
}

TEST_CASE("simplex index order groups by dimension") {
    const auto k = build_complex({{0, 1, 2}, {2, 3}});
    for (std::size_t i = 1; i < k.size(); ++i) CHECK(k[i - 1].dim() <= k[i].dim());
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k.index_of(k[i]) == i);
    CHECK_FALSE(k.index_of(Simplex{0, 3}).has_value());
}

TEST_CASE("hasse boundary and coboundary are dual") {
    const auto k = grid_triangulation(4, 3).complex();
    const auto adj = hasse(k);
    for (std::size_t s = 0; s < k.size(); ++s) {
        CHECK(adj.boundary[s].size() == (k[s].dim() == 0 ? 0u : k[s].vertices().size()));
        for (std::size_t t : adj.boundary[s]) {
            CHECK(k[t].dim() + 1 == k[s].dim());
            const auto& cof = adj.coboundary[t];
            CHECK(std::find(cof.begin(), cof.end(), s) != cof.end());
        }
        for (std::size_t r : adj.coboundary[s]) {
            const auto& bd = adj.boundary[r];
            CHECK(std::find(bd.begin(), bd.end(), s) != bd.end());
        }
    }
}

TEST_CASE("euler characteristic of grids and small surfaces") {
    for (int nx = 2; nx <= 5; ++nx) {
        for (int ny = 2; ny <= 4; ++ny) {
            const auto k = grid_triangulation(nx, ny).complex();
            const long long v = nx * ny;
            const long long e = (nx - 1) * ny + nx * (ny - 1) + (nx - 1) * (ny - 1);
            const long long t = 2LL * (nx - 1) * (ny - 1);
            CHECK(static_cast<long long>(k.count(0)) == v);
            CHECK(static_cast<long long>(k.count(1)) == e);
            CHECK(static_cast<long long>(k.count(2)) == t);
            CHECK(euler_characteristic(k) == 1);
        }
    }
    // Hollow triangle is a circle.
    CHECK(euler_characteristic(build_complex({{0, 1}, {1, 2}, {0, 2}})) == 0);
}

TEST_CASE("embedding must be injective and cover the vertex set") {
    const auto k = build_complex({{0, 1}});
    CHECK_THROWS_AS(EmbeddedComplex(k, Embedding({{0, {0.0}}, {1, {0.0}}})), ValidationError);
    CHECK_THROWS_AS(EmbeddedComplex(k, Embedding(std::map<VertexId, Point>{{0, {0.0}}})), ValidationError);
    CHECK_THROWS_AS(EmbeddedComplex(k, Embedding({{0, {0.0}}, {1, {1.0}}, {2, {2.0}}})), ValidationError);
    CHECK_THROWS_AS(Embedding({{0, {0.0}}, {1, {1.0, 2.0}}}), ValidationError);
    // Coordinates closer than the quantum collapse.
    CHECK_FALSE(Embedding({{0, {0.0}}, {1, {1e-14}}}).is_injective());
}

TEST_CASE("coordinate sets are sorted quantized tuples") {
    const auto k = filled_triangle();
    const auto cs = k.coordinate_set(Simplex{0, 1, 2});
    REQUIRE(cs.size() == 3);
    CHECK(std::is_sorted(cs.begin(), cs.end()));
    CHECK(cs.front() == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("derived features of an edge and triangles") {
    const auto k = filled_triangle();
    const auto e = derived_features(Simplex{0, 1}, k.embedding());
    CHECK(e == std::vector<double>{0.5, 0.0, 1.0});
    const auto t = derived_features(Simplex{0, 1, 2}, k.embedding());
    REQUIRE(t.size() == 3);
    CHECK(t[0] == doctest::Approx(1.0 / 3.0));
    CHECK(t[1] == doctest::Approx(1.0 / 3.0));
    CHECK(t[2] == doctest::Approx(0.5));

    // Heron's formula as an independent area oracle in R^3 and R^4.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int dim : {3, 4}) {
        for (int trial = 0; trial < 20; ++trial) {
            std::map<VertexId, Point> c;
            for (VertexId v = 0; v < 3; ++v) {
                Point p(dim);
                for (double& x : p) x = u(rng);
                c[v] = p;
            }
            const Embedding x(c);
            auto dist = [&](VertexId a, VertexId b) {
                double s = 0.0;
                for (int i = 0; i < dim; ++i) s += (x.at(a)[i] - x.at(b)[i]) * (x.at(a)[i] - x.at(b)[i]);
                return std::sqrt(s);
            };
            const double a = dist(0, 1), b = dist(1, 2), cc = dist(0, 2);
            const double s = (a + b + cc) / 2;
            const double heron = std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - cc)));
            const auto f = derived_features(Simplex{0, 1, 2}, x);
            CHECK(f.back() == doctest::Approx(heron).epsilon(1e-9));
        }
    }
    const auto tet = build_complex({{0, 1, 2, 3}});
    const Embedding x3({{0, {0.0, 0.0, 0.0}}, {1, {1.0, 0.0, 0.0}}, {2, {0.0, 1.0, 0.0}}, {3, {0.0, 0.0, 1.0}}});
    CHECK_THROWS_AS(derived_features(Simplex{0, 1, 2, 3}, x3), UnsupportedFeatureDimension);
}

TEST_CASE("relabeling preserves embedded isomorphism") {
    const auto k = grid_triangulation(3, 3);
    std::vector<VertexId> perm(9);
    std::iota(perm.begin(), perm.end(), 100);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::map<VertexId, VertexId> relabel;
        for (VertexId v = 0; v < 9; ++v) relabel[v] = perm[static_cast<std::size_t>(v)];
        const auto r = relabeled(k, relabel);
        CHECK(embedded_isomorphic(k, r));
        CHECK(euler_characteristic(r.complex()) == euler_characteristic(k.complex()));
    }
}

TEST_CASE("embedded isomorphism distinguishes geometry and combinatorics") {
    const auto a = filled_triangle();
    const EmbeddedComplex hollow(build_complex({{0, 1}, {1, 2}, {0, 2}}), a.embedding());
    CHECK_FALSE(embedded_isomorphic(a, hollow));
    const EmbeddedComplex moved(a.complex(), Embedding({{0, {0.0, 0.0}}, {1, {1.0, 0.0}}, {2, {0.0, 2.0}}}));
    CHECK_FALSE(embedded_isomorphic(a, moved));
    CHECK_THROWS_AS(embedded_isomorphic(grid_triangulation(4, 4), grid_triangulation(4, 4)), OracleBudgetExceeded);
}

TEST_CASE("disjoint union adds face counts") {
    const auto a = filled_triangle();
    const EmbeddedComplex b(build_complex({{0, 1}, {1, 2}}),
                            Embedding({{0, {10.0, 0.0}}, {1, {11.0, 0.0}}, {2, {12.0, 1.0}}}));
    const auto u = disjoint_union(a, b);
    for (int d = 0; d <= 2; ++d) CHECK(u.complex().count(d) == a.complex().count(d) + b.complex().count(d));
    CHECK(euler_characteristic(u.complex()) == 2);
}

TEST_CASE("json round trip is exact") {
    const auto k = apply_deformation(grid_triangulation(3, 2), {DeformationFamily::random_smooth, 0.3, 4});
    const auto j = complex_to_json(k);
    const auto back = complex_from_json(j);
    CHECK(back.complex() == k.complex());
    CHECK(back.embedding() == k.embedding());
    for (const auto& [v, p] : k.embedding().coords()) CHECK(back.embedding().at(v) == p);
    CHECK(complex_to_json(back).dump() == j.dump());
}

TEST_CASE("json input errors") {
    CHECK_THROWS(complex_from_json(nlohmann::json::parse(R"({"vertices": {"0": [0]}})")));
    CHECK_THROWS(complex_from_json(
        nlohmann::json::parse(R"({"ambient_dim": 1, "vertices": {"0": [0]}, "maximal_simplices": [[0, 1]]})")));
}

TEST_CASE("off triangle meshes") {
    std::istringstream in(
        "OFF\n# a square\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n");
    const auto k = read_off(in);
    CHECK(k.complex().count(0) == 4);
    CHECK(k.complex().count(1) == 5);
    CHECK(k.complex().count(2) == 2);
    CHECK(k.embedding().ambient_dim() == 3);
    std::istringstream quad("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
    CHECK_THROWS(read_off(quad));
}
