#pragma once

// WL, SWL and GSWL color refinement over simplicial complexes.
//
// HASH is literal interning: every structured color is serialized to a
// canonical byte string and mapped to a dense id, so two colors share an id
// iff their serializations are byte-identical. Colors from different
// complexes are only comparable when they were produced by the same
// ColorInterner instance.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gswl/complex.hpp"

namespace gswl {

struct Color {
    std::uint32_t id = 0;
    friend auto operator<=>(Color, Color) = default;
};

enum class FeatureKind : std::uint8_t {
    none = 0,         // dimension-only
    coordinates = 1,  // vertex coordinates, or sorted vertex coordinates of a simplex
    derived = 2,      // midpoint/length, centroid/area
};

/// Round-0 color (dim, Phi_dim(...)).
struct InitialColor {
    int dim = 0;
    FeatureKind kind = FeatureKind::none;
    std::vector<std::int64_t> features;
};

/// (previous color, {{boundary colors}}, {{coboundary colors}}); multisets sorted.
struct RefinedColor {
    Color previous;
    std::vector<Color> boundary;
    std::vector<Color> coboundary;
};

/// Graph 1-WL: (previous color, {{neighbor colors}}).
struct NeighborColor {
    Color previous;
    std::vector<Color> neighbors;
};

using ColorRecord = std::variant<InitialColor, RefinedColor, NeighborColor>;

/// Length-prefixed, type-tagged encoding. Multisets are sorted before encoding.
std::string serialize(const ColorRecord& record);
ColorRecord deserialize(std::string_view bytes);

class ColorInterner {
  public:
    ColorInterner();
    ColorInterner(const ColorInterner&) = delete;
    ColorInterner& operator=(const ColorInterner&) = delete;

    Color intern(const ColorRecord& record);
    Color intern_bytes(std::string bytes);

    const std::string& bytes(Color c) const;
    ColorRecord record(Color c) const { return deserialize(bytes(c)); }
    std::size_t size() const;

    /// Distinguishes interner instances within a process.
    std::uint64_t instance_id() const { return instance_id_; }

  private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Color> table_;
    std::deque<std::string> reverse_;  // stable references under concurrent interning
    std::uint64_t instance_id_;
};

enum class RefinementMode { wl, swl, gswl };
enum class Adjacency { full, boundary_only, coboundary_only };
enum class PhiMode { dimension_only, sorted_coords, derived_features };

struct RefinementConfig {
    RefinementMode mode = RefinementMode::gswl;
    Adjacency adjacency = Adjacency::full;
    PhiMode phi = PhiMode::dimension_only;
    int depth = 0;
    int quantization_digits = kDefaultQuantizationDigits;
};

std::string to_string(RefinementMode m);
std::string to_string(Adjacency a);
std::string to_string(PhiMode p);
RefinementMode parse_mode(std::string_view s);
Adjacency parse_adjacency(std::string_view s);
PhiMode parse_phi(std::string_view s);

/// Per-round colors indexed by simplex index.
class Coloring {
  public:
    Coloring(RefinementConfig config, std::uint64_t interner_id, std::vector<std::vector<Color>> rounds)
        : config_(config), interner_id_(interner_id), rounds_(std::move(rounds)) {}

    const RefinementConfig& config() const { return config_; }
    std::uint64_t interner_id() const { return interner_id_; }
    int depth() const { return static_cast<int>(rounds_.size()) - 1; }
    const std::vector<std::vector<Color>>& rounds() const { return rounds_; }
    const std::vector<Color>& round(int l) const { return rounds_.at(static_cast<std::size_t>(l)); }

    /// Sorted color multiset at round l.
    std::vector<Color> multiset(int l) const;

  private:
    RefinementConfig config_;
    std::uint64_t interner_id_;
    std::vector<std::vector<Color>> rounds_;
};

InitialColor initial_color(const EmbeddedComplex& k, std::size_t simplex, const RefinementConfig& cfg);

std::vector<Color> init_colors(const EmbeddedComplex& k, const RefinementConfig& cfg, ColorInterner& interner);

std::vector<Color> refine_round(const EmbeddedComplex& k, const HasseAdjacency& adj, const std::vector<Color>& current,
                                const RefinementConfig& cfg, ColorInterner& interner);

/// Rounds 0..cfg.depth.
Coloring refine(const EmbeddedComplex& k, const RefinementConfig& cfg, ColorInterner& interner);

/// Round-L multiset equality. Throws std::invalid_argument when the colorings
/// were produced by different interners or are shallower than L.
bool equivalent_at(const Coloring& a, const Coloring& b, int depth);

/// Refines both complexes to `depth` with the shared interner and compares.
bool equivalent_at(const EmbeddedComplex& a, const EmbeddedComplex& b, RefinementConfig cfg, int depth,
                   ColorInterner& interner);

/// True iff both color vectors induce the same partition of simplex indices.
bool same_partition(const std::vector<Color>& a, const std::vector<Color>& b);

/// Smallest l with partition(l) == partition(l + 1), searched for l < max_rounds.
int stable_round(const EmbeddedComplex& k, RefinementConfig cfg, int max_rounds);

using CoordinateSet = std::vector<std::vector<std::int64_t>>;

/// Inverts colors through the interner's reverse map: recovers the dimension
/// and, where the color determines it, the vertex-coordinate set of the
/// simplex that carries the color.
class ColorDecoder {
  public:
    explicit ColorDecoder(const ColorInterner& interner) : interner_(interner) {}

    int dimension(Color c);
    std::optional<CoordinateSet> vertex_set(Color c);

  private:
    const ColorInterner& interner_;
    std::unordered_map<std::uint32_t, int> dims_;
    std::unordered_map<std::uint32_t, std::optional<CoordinateSet>> sets_;
};

struct RecoveryViolation {
    std::size_t complex_a, simplex_a, complex_b, simplex_b;
};

struct RecoveryReport {
    int depth = 0;
    std::size_t checked_simplices = 0;   // simplices with dim <= depth
    std::size_t same_color_pairs = 0;    // pairs checked (dim <= depth)
    std::size_t cross_complex_pairs = 0; // subset of the above spanning two complexes
    std::size_t excluded_pairs = 0;      // dim > depth, equal colors, different vertex sets
    std::size_t decode_failures = 0;     // reverse-map recovery disagreed with the simplex
    std::vector<RecoveryViolation> violations;

    bool ok() const { return violations.empty() && decode_failures == 0; }
};

/// Checks that equal round-L GSWL colors on simplices of dimension <= L imply
/// equal vertex-coordinate sets, across the whole family. cfg.mode must be
/// GSWL with full adjacency; cfg.depth is overridden by `depth`.
RecoveryReport coordinate_recovery_check(const std::vector<EmbeddedComplex>& family, int depth,
                                         ColorInterner& interner, RefinementConfig cfg = {});

}  // namespace gswl
