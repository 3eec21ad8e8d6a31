#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include "gswl/generators.hpp"
#include "gswl/refinement.hpp"

using namespace gswl;

namespace {

RefinementConfig make(RefinementMode mode, int depth, Adjacency adjacency = Adjacency::full,
                      PhiMode phi = PhiMode::dimension_only) {
    RefinementConfig c;
    c.mode = mode;
    c.depth = depth;
    c.adjacency = adjacency;
    c.phi = phi;
    return c;
}

EmbeddedComplex on_line(const std::vector<std::vector<VertexId>>& maximal, std::size_t n) {
    std::map<VertexId, Point> c;
    for (std::size_t v = 0; v < n; ++v) c[static_cast<VertexId>(v)] = {static_cast<double>(v), 0.5 * (v % 2)};
    return {build_complex(maximal), Embedding(c)};
}

// partition(fine) refines partition(coarse): equal fine colors imply equal coarse colors.
bool refines(const std::vector<Color>& fine, const std::vector<Color>& coarse) {
    std::map<std::uint32_t, std::uint32_t> seen;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        auto [it, inserted] = seen.emplace(fine[i].id, coarse[i].id);
        if (!inserted && it->second != coarse[i].id) return false;
    }
    return true;
}

std::size_t classes(const std::vector<Color>& colors) {
    std::set<std::uint32_t> ids;
    for (Color c : colors) ids.insert(c.id);
    return ids.size();
}

}  // namespace

TEST_CASE("color records round trip through their serialization") {
    const std::vector<ColorRecord> records{
        InitialColor{2, FeatureKind::derived, {1, -2, 300000000000}},
        InitialColor{0, FeatureKind::none, {}},
        RefinedColor{Color{7}, {Color{1}, Color{1}, Color{3}}, {}},
        NeighborColor{Color{2}, {Color{4}, Color{5}}},
    };
    for (const auto& r : records) {
        const auto bytes = serialize(r);
        CHECK(serialize(deserialize(bytes)) == bytes);
    }
    CHECK(serialize(records[0]) != serialize(records[1]));
    CHECK_THROWS(deserialize("Zgarbage"));
    CHECK_THROWS(deserialize(serialize(records[0]).substr(0, 5)));
}

TEST_CASE("interner is injective and stable") {
    ColorInterner a;
    const Color x = a.intern(InitialColor{0, FeatureKind::none, {}});
    const Color y = a.intern(InitialColor{1, FeatureKind::none, {}});
    CHECK(x != y);
    CHECK(a.intern(InitialColor{0, FeatureKind::none, {}}) == x);
    CHECK(a.size() == 2);
    CHECK(std::get<InitialColor>(deserialize(a.bytes(y))).dim == 1);
    ColorInterner b;
    CHECK(a.instance_id() != b.instance_id());
}

TEST_CASE("interner is safe under concurrent use") {
    ColorInterner interner;
    std::vector<std::thread> threads;
    std::vector<std::vector<Color>> got(4);
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (std::int64_t i = 0; i < 500; ++i) {
                got[static_cast<std::size_t>(t)].push_back(interner.intern(InitialColor{0, FeatureKind::coordinates, {i}}));
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(interner.size() == 500);
    for (int t = 1; t < 4; ++t) CHECK(got[static_cast<std::size_t>(t)] == got[0]);
}

TEST_CASE("mode, adjacency and phi names parse") {
    CHECK(parse_mode("gswl") == RefinementMode::gswl);
    CHECK(parse_mode("swl") == RefinementMode::swl);
    CHECK(parse_adjacency("boundary_only") == Adjacency::boundary_only);
    CHECK(parse_phi("derived") == PhiMode::derived_features);
    for (auto m : {RefinementMode::wl, RefinementMode::swl, RefinementMode::gswl}) CHECK(parse_mode(to_string(m)) == m);
    CHECK_THROWS(parse_mode("xyz"));
}

TEST_CASE("swl on a path separates endpoints from interior by round 1") {
    const auto k = on_line({{0, 1}, {1, 2}, {2, 3}}, 4);
    ColorInterner interner;
    const auto c = refine(k, make(RefinementMode::swl, 2), interner);
    std::vector<Color> vertices(c.round(1).begin(), c.round(1).begin() + 4);
    CHECK(classes(std::vector<Color>(c.round(0).begin(), c.round(0).begin() + 4)) == 1);
    CHECK(vertices[0] == vertices[3]);
    CHECK(vertices[1] == vertices[2]);
    CHECK(vertices[0] != vertices[1]);
}

TEST_CASE("wl cannot tell a hexagon from two triangles") {
    const auto hexagon = on_line({{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}, 6);
    const auto triangles = on_line({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, 6);
    for (auto mode : {RefinementMode::wl, RefinementMode::swl}) {
        ColorInterner interner;
        for (int l = 0; l <= 6; ++l) CHECK(equivalent_at(hexagon, triangles, make(mode, l), l, interner));
    }
    ColorInterner interner;
    // Same vertex coordinates: round 0 agrees, round 1 sees which pairs are joined.
    CHECK(equivalent_at(hexagon, triangles, make(RefinementMode::gswl, 0), 0, interner));
    CHECK_FALSE(equivalent_at(hexagon, triangles, make(RefinementMode::gswl, 1), 1, interner));
    CHECK_THROWS(refine(grid_triangulation(2, 2), make(RefinementMode::wl, 1), interner));
}

TEST_CASE("refinement is monotone and gswl refines swl") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto k = apply_deformation(grid_triangulation(4, 3), {DeformationFamily::random_smooth, 0.2, seed});
        for (auto mode : {RefinementMode::swl, RefinementMode::gswl}) {
            for (auto adj : {Adjacency::full, Adjacency::boundary_only, Adjacency::coboundary_only}) {
                ColorInterner interner;
                const auto c = refine(k, make(mode, 5, adj), interner);
                for (int l = 0; l < 5; ++l) CHECK(refines(c.round(l + 1), c.round(l)));
            }
        }
        ColorInterner gi, si;
        const auto g = refine(k, make(RefinementMode::gswl, 4), gi);
        const auto s = refine(k, make(RefinementMode::swl, 4), si);
        for (int l = 0; l <= 4; ++l) CHECK(refines(g.round(l), s.round(l)));
    }
}

TEST_CASE("gswl round 0 separates every vertex of an injective embedding") {
    const auto k = apply_deformation(grid_triangulation(5, 4), {DeformationFamily::twist, 0.3, 0});
    ColorInterner interner;
    const auto c = refine(k, make(RefinementMode::gswl, 2), interner);
    CHECK(classes(std::vector<Color>(c.round(0).begin(), c.round(0).begin() + 20)) == 20);
    // Round 1 reads vertex coordinates through the boundary, so every simplex is distinct.
    CHECK(classes(c.round(2)) == k.complex().size());
}

TEST_CASE("colorings are relabeling invariant") {
    const auto k = apply_deformation(grid_triangulation(4, 3), {DeformationFamily::bend, 0.2, 0});
    std::map<VertexId, VertexId> relabel;
    for (VertexId v = 0; v < 12; ++v) relabel[v] = 40 - 3 * v;
    const auto r = relabeled(k, relabel);
    for (auto mode : {RefinementMode::swl, RefinementMode::gswl}) {
        for (auto phi : {PhiMode::dimension_only, PhiMode::sorted_coords, PhiMode::derived_features}) {
            ColorInterner interner;
            for (int l = 0; l <= 4; ++l) CHECK(equivalent_at(k, r, make(mode, l, Adjacency::full, phi), l, interner));
        }
    }
}

TEST_CASE("same abstract complex, different geometry") {
    const auto base = grid_triangulation(3, 3);
    const auto moved = apply_deformation(base, {DeformationFamily::stretch, 0.5, 0});
    ColorInterner interner;
    for (int l = 0; l <= 8; ++l) CHECK(equivalent_at(base, moved, make(RefinementMode::swl, l), l, interner));
    CHECK_FALSE(equivalent_at(base, moved, make(RefinementMode::gswl, 0), 0, interner));
}

TEST_CASE("equivalence requires a shared interner and enough depth") {
    const auto k = grid_triangulation(2, 2);
    ColorInterner a, b;
    const auto ca = refine(k, make(RefinementMode::gswl, 1), a);
    const auto cb = refine(k, make(RefinementMode::gswl, 1), b);
    CHECK_THROWS_AS(equivalent_at(ca, cb, 1), std::invalid_argument);
    CHECK_THROWS_AS(equivalent_at(ca, ca, 2), std::invalid_argument);
    CHECK(equivalent_at(ca, ca, 1));
}

TEST_CASE("refinement is deterministic") {
    const auto k = apply_deformation(grid_triangulation(4, 4), {DeformationFamily::random_smooth, 0.3, 9});
    ColorInterner a, b;
    const auto ca = refine(k, make(RefinementMode::gswl, 3), a);
    const auto cb = refine(k, make(RefinementMode::gswl, 3), b);
    CHECK(ca.rounds() == cb.rounds());
    for (std::uint32_t id = 0; id < a.size(); ++id) CHECK(a.bytes(Color{id}) == b.bytes(Color{id}));
}

TEST_CASE("stable round") {
    // Round 0 already separates every simplex class in a single vertex.
    CHECK(stable_round(on_line({{0}}, 1), make(RefinementMode::swl, 0), 4) == 0);
    // Path on four vertices: round 1 splits endpoints, round 2 splits end edges.
    const auto path = on_line({{0, 1}, {1, 2}, {2, 3}}, 4);
    CHECK(stable_round(path, make(RefinementMode::swl, 0), 8) == 2);
    CHECK_THROWS(stable_round(path, make(RefinementMode::swl, 0), 1));
}

TEST_CASE("decoder recovers vertex coordinate sets") {
    const auto k = apply_deformation(grid_triangulation(3, 3), {DeformationFamily::bend, 0.1, 0});
    ColorInterner interner;
    const auto c = refine(k, make(RefinementMode::gswl, 2), interner);
    ColorDecoder decoder(interner);
    for (std::size_t i = 0; i < k.complex().size(); ++i) {
        const auto& s = k.complex()[i];
        CHECK(decoder.dimension(c.round(2)[i]) == s.dim());
        const auto set = decoder.vertex_set(c.round(2)[i]);
        REQUIRE(set.has_value());
        CHECK(*set == k.coordinate_set(s));
    }
}

TEST_CASE("coordinate recovery across a family") {
    std::vector<EmbeddedComplex> family;
    for (std::uint64_t s = 0; s < 4; ++s) {
        family.push_back(apply_deformation(grid_triangulation(3, 3), {DeformationFamily::random_smooth, 0.2, s}));
    }
    family.push_back(family.front());
    ColorInterner interner;
    const auto rep = coordinate_recovery_check(family, 2, interner);
    CHECK(rep.ok());
    CHECK(rep.checked_simplices > 0);
    CHECK(rep.cross_complex_pairs > 0);  // the duplicate shares every color

    // At depth 0 with dimension-only features, distinct edges share a color.
    ColorInterner shallow;
    const auto low = coordinate_recovery_check(family, 0, shallow);
    CHECK(low.ok());
    CHECK(low.excluded_pairs > 0);
    ColorInterner bad;
    CHECK_THROWS(coordinate_recovery_check(family, 1, bad, make(RefinementMode::swl, 1)));
}
