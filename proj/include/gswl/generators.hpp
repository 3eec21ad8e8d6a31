#pragma once

// Seeded constructors for experiment inputs: structured triangulations,
// smooth deformation families, small closed-surface triangulations with
// spectral planar embeddings, Gaussian perturbations, and geometric
// summary targets. Every generator is a pure function of its arguments.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gswl/complex.hpp"

namespace gswl {

/// nx * ny lattice points, each cell split along its (i,j)-(i+1,j+1) diagonal.
/// Vertex id of lattice point (i, j) is j * nx + i.
EmbeddedComplex grid_triangulation(int nx, int ny, double spacing = 1.0);

/// Center vertex 0 plus `segments` rim vertices on a circle.
EmbeddedComplex disk_fan(int segments, double radius = 1.0);

/// 8 x 5 unit-square grid (V = 40, E = 95, T = 56); the stand-in for the
/// 40-vertex planar triangulation used by the deformation experiments.
EmbeddedComplex grid40();

enum class MeshKind { grid, disk_fan, library };

struct MeshSpec {
    MeshKind kind = MeshKind::grid;
    int nx = 2;
    int ny = 2;
    double spacing = 1.0;
    int segments = 6;
    std::string library;  // for kind == library
    std::uint64_t seed = 0;
};

EmbeddedComplex generate_mesh(const MeshSpec& spec);

enum class DeformationFamily { bend, twist, stretch, random_smooth };

std::string to_string(DeformationFamily f);
DeformationFamily parse_deformation(std::string_view s);
inline constexpr std::array<DeformationFamily, 4> kDeformationFamilies{
    DeformationFamily::bend, DeformationFamily::twist, DeformationFamily::stretch, DeformationFamily::random_smooth};

struct DeformationSpec {
    DeformationFamily family = DeformationFamily::bend;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
};

/// Raised when a deformation or perturbation collapses two vertices.
class InjectivityLost : public ValidationError {
  public:
    InjectivityLost(const std::string& what, double suggested_amplitude)
        : ValidationError(what), suggested_amplitude_(suggested_amplitude) {}
    double suggested_amplitude() const { return suggested_amplitude_; }

  private:
    double suggested_amplitude_;
};

/// bend:          y' = y + a x^2
/// twist:         rotate (x, y) about the centroid by a (y - y_mean)
/// stretch:       x' = (1 + a) x
/// random_smooth: sum of 3 seeded Gaussian radial bumps of height a
/// Only the first two coordinates move; the abstract complex is unchanged.
EmbeddedComplex apply_deformation(const EmbeddedComplex& k, const DeformationSpec& spec);

/// One deformed copy of `base` per (family, seed), families in declaration
/// order. bend, twist and stretch use amplitude * (1 + seed / 10) so distinct
/// seeds give distinct embeddings; random_smooth draws its bumps from the seed.
std::vector<EmbeddedComplex> deformation_suite(const EmbeddedComplex& base, const std::vector<std::uint64_t>& seeds,
                                               double amplitude);

struct LibraryTriangulation {
    std::string name;
    AbstractComplex complex;
    long long expected_chi = 0;
    bool orientable = true;
};

/// sphere_S2 (tetrahedron boundary), torus_T2 (7 vertices), klein_bottle
/// (9-vertex twisted 3x3 grid quotient), rp2 (6-vertex hemi-icosahedron).
LibraryTriangulation library_triangulation(std::string_view name);
std::vector<std::string> library_names();

struct SurfaceCheck {
    bool pure = false;       // every maximal simplex is a triangle
    bool closed = false;     // every edge has exactly two cofaces
    bool connected = false;  // connected 1-skeleton
    long long chi = 0;
    bool valid() const { return pure && closed && connected; }
};

SurfaceCheck check_closed_surface(const AbstractComplex& k);

/// Dense L = D - A of the 1-skeleton, rows in vertex order.
std::vector<std::vector<double>> graph_laplacian(const AbstractComplex& k);

struct EigenDecomposition {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations on a dense symmetric matrix. Eigenvectors are
/// sign-fixed (largest-magnitude entry positive); ties in eigenvalue are
/// ordered lexicographically by eigenvector.
EigenDecomposition jacobi_eigen(std::vector<std::vector<double>> a, double tolerance = 1e-10, int max_sweeps = 100);

struct SpectralEmbedding {
    Embedding embedding;
    std::vector<double> eigenvalues;
    bool degenerate = false;  // lambda_2, lambda_3 or lambda_4 coincide
    bool jittered = false;
};

/// Planar coordinates (u_2(v), u_3(v)) from the graph Laplacian. Requires a
/// connected 1-skeleton with at most 200 vertices.
SpectralEmbedding spectral_embedding(const AbstractComplex& k, std::uint64_t seed = 0,
                                     int quantization_digits = kDefaultQuantizationDigits);

/// Adds isotropic N(0, scale^2) noise per coordinate.
EmbeddedComplex perturb_embedding(const EmbeddedComplex& k, double scale, std::uint64_t seed);

inline constexpr std::size_t kSummarySize = 30;

/// Fixed layout:
///   [0..2]   displacement |x_v - base_v|: mean, std, max
///   [3..11]  edge length: mean, std, min, max, p10, p25, p50, p75, p90
///   [12..16] triangle area: mean, std, min, max, total
///   [17..21] angle defect 2*pi - sum of incident angles: mean, std, min, max, sum
///   [22..29] V, E, T, chi, total edge length, extent x, extent y, extent z
std::array<double, kSummarySize> geometric_summary(const EmbeddedComplex& k, const Embedding& base);

/// Angle defect per vertex, in vertex order.
std::vector<double> angle_defects(const EmbeddedComplex& k);

}  // namespace gswl
