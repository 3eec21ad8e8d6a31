#pragma once

// Abstract and embedded simplicial complexes, Hasse adjacency, and the
// brute-force ground-truth oracles used throughout the test suites.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gswl {

using VertexId = std::int64_t;

/// Thrown for malformed inputs: bad simplices, non-injective embeddings,
/// mismatched complexes.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kDefaultQuantizationDigits = 12;

/// Canonical decimal quantization. Coordinates are snapped to multiples of
/// 10^-digits; two coordinates are equal iff their quantized integers are.
class Quantizer {
  public:
    explicit Quantizer(int digits = kDefaultQuantizationDigits);

    int digits() const { return digits_; }
    std::int64_t quantize(double value) const;
    double dequantize(std::int64_t q) const;
    double snap(double value) const { return dequantize(quantize(value)); }
    std::vector<std::int64_t> quantize(std::span<const double> values) const;

  private:
    int digits_;
    double scale_;
};

/// Reads GSWL_QUANT_DIGITS, falling back to kDefaultQuantizationDigits.
int default_quantization_digits();

/// A k-simplex stored as its sorted vertex list.
class Simplex {
  public:
    Simplex() = default;
    /// Sorts the input; throws ValidationError on empty input, negative ids or
    /// repeated vertices.
    explicit Simplex(std::vector<VertexId> vertices);
    Simplex(std::initializer_list<VertexId> vertices)
        : Simplex(std::vector<VertexId>(vertices)) {}

    int dim() const { return static_cast<int>(vertices_.size()) - 1; }
    const std::vector<VertexId>& vertices() const { return vertices_; }
    bool contains(VertexId v) const;

    /// Codimension-1 faces, each obtained by dropping one vertex.
    std::vector<Simplex> facets() const;

    // Ordered by (dim, vertices) so that std::sort groups by dimension.
    friend std::strong_ordering operator<=>(const Simplex& a, const Simplex& b);
    friend bool operator==(const Simplex& a, const Simplex& b) = default;

    std::string to_string() const;

  private:
    std::vector<VertexId> vertices_;
};

/// Face-closed set of simplices. Simplices are stored sorted by
/// (dim, vertices); the position in that order is the simplex index used by
/// every per-simplex array in the library.
class AbstractComplex {
  public:
    AbstractComplex() = default;

    /// Takes an arbitrary simplex list, deduplicates it and checks closure.
    static AbstractComplex from_simplices(std::vector<Simplex> simplices);

    std::size_t size() const { return simplices_.size(); }
    bool empty() const { return simplices_.empty(); }
    int max_dim() const { return counts_.empty() ? -1 : static_cast<int>(counts_.size()) - 1; }
    const std::vector<Simplex>& simplices() const { return simplices_; }
    const Simplex& operator[](std::size_t i) const { return simplices_[i]; }
    const std::vector<std::size_t>& per_dim_counts() const { return counts_; }
    std::size_t count(int dim) const;
    std::vector<VertexId> vertices() const;

    std::optional<std::size_t> index_of(const Simplex& s) const;
    bool contains(const Simplex& s) const { return index_of(s).has_value(); }

    /// Simplices that are not a face of any other simplex.
    std::vector<Simplex> maximal_simplices() const;

    friend bool operator==(const AbstractComplex& a, const AbstractComplex& b) {
        return a.simplices_ == b.simplices_;
    }

  private:
    std::vector<Simplex> simplices_;
    std::vector<std::size_t> counts_;
};

/// Face closure of the given maximal simplices.
AbstractComplex build_complex(const std::vector<std::vector<VertexId>>& maximal_simplices);

/// Boundary and coboundary lists by simplex index.
struct HasseAdjacency {
    std::vector<std::vector<std::size_t>> boundary;
    std::vector<std::vector<std::size_t>> coboundary;
};

HasseAdjacency hasse(const AbstractComplex& complex);

long long euler_characteristic(const AbstractComplex& complex);

using Point = std::vector<double>;

/// Injective vertex-coordinate map. Coordinates are snapped to the
/// quantization grid on construction so that every downstream computation
/// sees the same canonical doubles.
class Embedding {
  public:
    Embedding() = default;
    Embedding(std::map<VertexId, Point> coords, int quantization_digits = kDefaultQuantizationDigits);

    int ambient_dim() const { return ambient_dim_; }
    const Quantizer& quantizer() const { return quantizer_; }
    const std::map<VertexId, Point>& coords() const { return coords_; }
    const Point& at(VertexId v) const;
    bool has(VertexId v) const { return coords_.count(v) != 0; }
    std::size_t size() const { return coords_.size(); }

    std::vector<std::int64_t> quantized(VertexId v) const;
    bool is_injective() const;

    /// Quantized-coordinate equality.
    friend bool operator==(const Embedding& a, const Embedding& b);

  private:
    std::map<VertexId, Point> coords_;
    int ambient_dim_ = 0;
    Quantizer quantizer_;
};

class EmbeddedComplex {
  public:
    EmbeddedComplex() = default;
    /// Requires the embedding to cover exactly the vertex set and be injective.
    EmbeddedComplex(AbstractComplex complex, Embedding embedding);

    const AbstractComplex& complex() const { return complex_; }
    const Embedding& embedding() const { return embedding_; }

    /// Quantized coordinates of the simplex's vertices, sorted.
    std::vector<std::vector<std::int64_t>> coordinate_set(const Simplex& s) const;

  private:
    AbstractComplex complex_;
    Embedding embedding_;
};

/// Relabels vertices by `relabel` (old id -> new id), carrying coordinates.
EmbeddedComplex relabeled(const EmbeddedComplex& k, const std::map<VertexId, VertexId>& relabel);

/// Disjoint union; the second complex's vertex ids are shifted past the first's.
EmbeddedComplex disjoint_union(const EmbeddedComplex& a, const EmbeddedComplex& b);

class UnsupportedFeatureDimension : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Coordinate-derived features: vertices give x_v, edges give
/// (midpoint, length), triangles give (centroid, area). Throws
/// UnsupportedFeatureDimension for dim > 2.
std::vector<double> derived_features(const Simplex& s, const Embedding& x);

inline constexpr std::size_t kDefaultIsomorphismBudget = 12;

class OracleBudgetExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ground-truth embedded isomorphism by backtracking search over vertex
/// bijections, pruned to candidates with identical quantized coordinates.
bool embedded_isomorphic(const EmbeddedComplex& a, const EmbeddedComplex& b,
                         std::size_t vertex_budget = kDefaultIsomorphismBudget);

}  // namespace gswl
