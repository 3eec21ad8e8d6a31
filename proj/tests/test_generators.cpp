#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "gswl/generators.hpp"

using namespace gswl;

namespace {

// Closed 2-manifold check via vertex links: the link of every vertex is a
// single cycle. Orientability by propagating triangle orientations.
struct ManifoldOracle {
    bool links_are_cycles = true;
    bool orientable = true;
};

ManifoldOracle manifold_oracle(const AbstractComplex& k) {
    ManifoldOracle out;
    std::vector<std::vector<VertexId>> tris;
    for (const auto& s : k.simplices()) {
        if (s.dim() == 2) tris.push_back(s.vertices());
    }
    for (VertexId v : k.vertices()) {
        std::map<VertexId, std::vector<VertexId>> link;
        for (const auto& t : tris) {
            if (std::find(t.begin(), t.end(), v) == t.end()) continue;
            std::vector<VertexId> other;
            for (VertexId u : t) {
                if (u != v) other.push_back(u);
            }
            link[other[0]].push_back(other[1]);
            link[other[1]].push_back(other[0]);
        }
        if (link.empty()) {
            out.links_are_cycles = false;
            continue;
        }
        for (const auto& [u, nbrs] : link) {
            if (nbrs.size() != 2) out.links_are_cycles = false;
        }
        // Walk the cycle from any start; it must visit every link vertex.
        std::set<VertexId> seen;
        VertexId prev = -1, cur = link.begin()->first;
        while (!seen.count(cur)) {
            seen.insert(cur);
            const auto& nbrs = link[cur];
            const VertexId next = nbrs[0] != prev ? nbrs[0] : nbrs[1];
            prev = cur;
            cur = next;
        }
        if (seen.size() != link.size()) out.links_are_cycles = false;
    }

    // orientation[i] = +1 keeps the sorted vertex order, -1 reverses it.
    std::vector<int> orientation(tris.size(), 0);
    auto directed = [&](std::size_t i, std::size_t e) {
        const auto& t = tris[i];
        std::pair<VertexId, VertexId> edge{t[e], t[(e + 1) % 3]};
        if (orientation[i] < 0) std::swap(edge.first, edge.second);
        return edge;
    };
    for (std::size_t start = 0; start < tris.size(); ++start) {
        if (orientation[start] != 0) continue;
        orientation[start] = 1;
        std::vector<std::size_t> stack{start};
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t e = 0; e < 3; ++e) {
                const auto [a, b] = directed(i, e);
                for (std::size_t j = 0; j < tris.size(); ++j) {
                    if (j == i) continue;
                    const auto& t = tris[j];
                    if (std::find(t.begin(), t.end(), a) == t.end() || std::find(t.begin(), t.end(), b) == t.end()) {
                        continue;
                    }
                    // Neighbor must traverse the shared edge as (b, a): keep its
                    // sorted cycle if that cycle already runs b -> a, else reverse.
                    bool runs_b_to_a = false;
                    for (std::size_t f = 0; f < 3; ++f) {
                        if (t[f] == b && t[(f + 1) % 3] == a) runs_b_to_a = true;
                    }
                    const int want = runs_b_to_a ? 1 : -1;
                    if (orientation[j] == 0) {
                        orientation[j] = want;
                        stack.push_back(j);
                    } else if (orientation[j] != want) {
                        out.orientable = false;
                    }
                }
            }
        }
    }
    return out;
}

double det_residual(const std::vector<std::vector<double>>& a, double lambda, const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = -lambda * v[i];
        for (std::size_t j = 0; j < a.size(); ++j) s += a[i][j] * v[j];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

}  // namespace

TEST_CASE("grid and fan face counts") {
    const auto g = grid40();
    CHECK(g.complex().count(0) == 40);
    CHECK(g.complex().count(1) == 95);
    CHECK(g.complex().count(2) == 56);
    CHECK(g.embedding().at(9) == Point{1.0, 1.0});  // id j * nx + i
    const auto fan = disk_fan(7);
    CHECK(fan.complex().count(0) == 8);
    CHECK(fan.complex().count(1) == 14);
    CHECK(fan.complex().count(2) == 7);
    CHECK(euler_characteristic(fan.complex()) == 1);
    CHECK_THROWS(grid_triangulation(1, 4));
    CHECK_THROWS(disk_fan(2));
}

TEST_CASE("deformation formulas") {
    const auto base = grid_triangulation(3, 2);
    const auto bent = apply_deformation(base, {DeformationFamily::bend, 0.25, 0});
    for (const auto& [v, p] : base.embedding().coords()) {
        CHECK(bent.embedding().at(v)[0] == doctest::Approx(p[0]));
        CHECK(bent.embedding().at(v)[1] == doctest::Approx(p[1] + 0.25 * p[0] * p[0]));
    }
    const auto stretched = apply_deformation(base, {DeformationFamily::stretch, 0.5, 0});
    for (const auto& [v, p] : base.embedding().coords()) CHECK(stretched.embedding().at(v)[0] == doctest::Approx(1.5 * p[0]));

    // Twist angle a (y - y_mean) vanishes on the middle row.
    const auto g = grid_triangulation(3, 3);
    const auto twisted = apply_deformation(g, {DeformationFamily::twist, 0.4, 0});
    for (VertexId v = 3; v < 6; ++v) CHECK(twisted.embedding().at(v) == g.embedding().at(v));
    CHECK_FALSE(twisted.embedding() == g.embedding());

    for (auto f : kDeformationFamilies) {
        const auto same = apply_deformation(g, {f, 0.0, 3});
        CHECK(same.embedding() == g.embedding());
        CHECK(same.complex() == g.complex());
        CHECK(parse_deformation(to_string(f)) == f);
    }
    CHECK_THROWS(parse_deformation("melt"));
}

TEST_CASE("random smooth deformation is seeded") {
    const auto g = grid_triangulation(4, 4);
    const auto a = apply_deformation(g, {DeformationFamily::random_smooth, 0.3, 5});
    const auto b = apply_deformation(g, {DeformationFamily::random_smooth, 0.3, 5});
    const auto c = apply_deformation(g, {DeformationFamily::random_smooth, 0.3, 6});
    CHECK(a.embedding() == b.embedding());
    CHECK_FALSE(a.embedding() == c.embedding());
}

TEST_CASE("collapsing deformations raise with a suggestion") {
    const auto g = grid_triangulation(3, 2);
    try {
        apply_deformation(g, {DeformationFamily::stretch, -1.0, 0});
        FAIL("expected InjectivityLost");
    } catch (const InjectivityLost& e) {
        CHECK(std::abs(e.suggested_amplitude()) < 1.0);
    }
}

TEST_CASE("deformation suite covers families and seeds") {
    const auto suite = deformation_suite(grid_triangulation(3, 3), {0, 1, 2}, 0.1);
    CHECK(suite.size() == 12);
    for (std::size_t i = 0; i < suite.size(); ++i) {
        for (std::size_t j = i + 1; j < suite.size(); ++j) CHECK_FALSE(suite[i].embedding() == suite[j].embedding());
    }
}

TEST_CASE("library triangulations are closed surfaces") {
    const std::map<std::string, std::array<std::size_t, 3>> counts{
        {"sphere_S2", {4, 6, 4}}, {"torus_T2", {7, 21, 14}}, {"klein_bottle", {9, 27, 18}}, {"rp2", {6, 15, 10}}};
    CHECK(library_names().size() == counts.size());
    for (const auto& name : library_names()) {
        const auto lib = library_triangulation(name);
        const auto& c = counts.at(name);
        CHECK(lib.complex.count(0) == c[0]);
        CHECK(lib.complex.count(1) == c[1]);
        CHECK(lib.complex.count(2) == c[2]);
        const auto check = check_closed_surface(lib.complex);
        CHECK(check.valid());
        CHECK(check.chi == lib.expected_chi);
        const auto oracle = manifold_oracle(lib.complex);
        CHECK(oracle.links_are_cycles);
        CHECK(oracle.orientable == lib.orientable);
    }
    CHECK_THROWS(library_triangulation("genus_7"));
    CHECK_FALSE(check_closed_surface(grid_triangulation(3, 3).complex()).closed);
}

TEST_CASE("jacobi eigenvalues of small laplacians") {
    // Path on three vertices: 0, 1, 3.
    const auto p3 = jacobi_eigen(graph_laplacian(build_complex({{0, 1}, {1, 2}})));
    REQUIRE(p3.values.size() == 3);
    CHECK(p3.values[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(p3.values[1] == doctest::Approx(1.0));
    CHECK(p3.values[2] == doctest::Approx(3.0));
    // Triangle: 0, 3, 3.
    const auto k3 = jacobi_eigen(graph_laplacian(build_complex({{0, 1}, {1, 2}, {0, 2}})));
    CHECK(k3.values[1] == doctest::Approx(3.0));
    CHECK(k3.values[2] == doctest::Approx(3.0));
    // The u_2 of P3 is (1, 0, -1)/sqrt 2 up to sign; sign-fixed to a positive max entry.
    const double r = 1.0 / std::sqrt(2.0);
    const auto& u2 = p3.vectors[1];
    CHECK(std::abs(u2[1]) < 1e-9);
    CHECK(std::abs(std::abs(u2[0]) - r) < 1e-9);
    CHECK(u2[0] + u2[2] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("jacobi on random symmetric matrices") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {2, 5, 9}) {
        std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) a[i][j] = a[j][i] = u(rng);
        }
        const auto e = jacobi_eigen(a);
        CHECK(std::is_sorted(e.values.begin(), e.values.end()));
        double trace = 0.0, sum = 0.0;
        for (int i = 0; i < n; ++i) trace += a[i][i];
        for (double l : e.values) sum += l;
        CHECK(sum == doctest::Approx(trace));
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            CHECK(det_residual(a, e.values[i], e.vectors[i]) < 1e-8);
            for (std::size_t j = 0; j < e.values.size(); ++j) {
                double d = 0.0;
                for (int k = 0; k < n; ++k) d += e.vectors[i][k] * e.vectors[j][k];
                CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("spectral embeddings of library surfaces") {
    for (const auto& name : library_names()) {
        const auto lib = library_triangulation(name);
        const auto a = spectral_embedding(lib.complex, 3);
        const auto b = spectral_embedding(lib.complex, 3);
        CHECK(a.embedding == b.embedding);
        CHECK(a.embedding.is_injective());
        CHECK(a.embedding.ambient_dim() == 2);
        CHECK_NOTHROW(EmbeddedComplex(lib.complex, a.embedding));
    }
    // The tetrahedron boundary is K4: spectrum 0, 4, 4, 4.
    const auto s2 = spectral_embedding(library_triangulation("sphere_S2").complex);
    CHECK(s2.degenerate);
    CHECK(s2.eigenvalues[1] == doctest::Approx(4.0));
    CHECK_THROWS(spectral_embedding(build_complex({{0, 1}, {2, 3}})));
}

TEST_CASE("perturbation is seeded and scaled") {
    const auto g = grid40();
    const auto a = perturb_embedding(g, 0.01, 1);
    CHECK(a.embedding() == perturb_embedding(g, 0.01, 1).embedding());
    CHECK_FALSE(a.embedding() == perturb_embedding(g, 0.01, 2).embedding());
    double sq = 0.0;
    std::size_t n = 0;
    for (const auto& [v, p] : g.embedding().coords()) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = a.embedding().at(v)[i] - p[i];
            sq += d * d;
            ++n;
        }
    }
    // 80 draws of N(0, 0.01^2): the sample std sits well inside [0.005, 0.015].
    const double sd = std::sqrt(sq / static_cast<double>(n));
    CHECK(sd > 0.005);
    CHECK(sd < 0.015);
}

TEST_CASE("angle defect at the apex of a square pyramid") {
    // Base corners (+-1, +-1, 0), apex (0, 0, h). Adjacent apex edges meet at
    // cos(theta) = h^2 / (2 + h^2).
    for (double h : {0.5, 1.0, 2.0}) {
        const EmbeddedComplex pyramid(
            build_complex({{4, 0, 1}, {4, 1, 2}, {4, 2, 3}, {4, 3, 0}}),
            Embedding({{0, {1.0, 1.0, 0.0}}, {1, {-1.0, 1.0, 0.0}}, {2, {-1.0, -1.0, 0.0}}, {3, {1.0, -1.0, 0.0}},
                       {4, {0.0, 0.0, h}}}));
        const double expected = 2.0 * std::numbers::pi - 4.0 * std::acos(h * h / (2.0 + h * h));
        CHECK(angle_defects(pyramid)[4] == doctest::Approx(expected));
    }
    // Interior vertex of a flat grid has zero defect.
    CHECK(angle_defects(grid_triangulation(3, 3))[4] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("geometric summary of a unit square") {
    const auto g = grid_triangulation(2, 2);
    const auto s = geometric_summary(g, g.embedding());
    CHECK(s[0] == 0.0);
    CHECK(s[2] == 0.0);
    const double diag = std::sqrt(2.0);
    CHECK(s[3] == doctest::Approx((4.0 + diag) / 5.0));
    CHECK(s[5] == doctest::Approx(1.0));
    CHECK(s[6] == doctest::Approx(diag));
    // Sorted lengths 1, 1, 1, 1, sqrt 2; linear interpolation at rank q (n - 1).
    CHECK(s[10] == doctest::Approx(1.0));
    CHECK(s[11] == doctest::Approx(1.0 + 0.6 * (diag - 1.0)));
    CHECK(s[12] == doctest::Approx(0.5));
    CHECK(s[16] == doctest::Approx(1.0));
    CHECK(s[22] == 4.0);
    CHECK(s[23] == 5.0);
    CHECK(s[24] == 2.0);
    CHECK(s[25] == 1.0);
    CHECK(s[26] == doctest::Approx(4.0 + diag));
    CHECK(s[27] == 1.0);
    CHECK(s[28] == 1.0);
    CHECK(s[29] == 0.0);
    // Corner angle sums: two corners see 90 degrees, two see 45 + 45.
    CHECK(s[21] == doctest::Approx(4.0 * 2.0 * std::numbers::pi - 2.0 * std::numbers::pi));
}
