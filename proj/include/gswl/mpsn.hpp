#pragma once

// Boundary/coboundary simplicial message passing
//
//   h^{l+1}_s = mu_l( h^l_s, sum_{t in bd s} phi_l(h^l_t), sum_{r in cof s} psi_l(h^l_r) )
//
// with every learnable map drawn from the lookup-table function class. A
// lookup table can interpolate any finite set of distinct inputs, which is
// the only property the realizability arguments need, so the constructions
// here are exact and training-free.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gswl/complex.hpp"
#include "gswl/ect.hpp"
#include "gswl/refinement.hpp"

namespace gswl {

using Vector = std::vector<double>;

class UnseenInput : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class MissPolicy { zero, error };

/// Finite table from quantized input vectors to R^output_dim.
class LookupFunction {
  public:
    explicit LookupFunction(std::size_t output_dim = 0, MissPolicy miss = MissPolicy::error,
                            int quantization_digits = kDefaultQuantizationDigits);

    std::size_t output_dim() const { return output_dim_; }
    std::size_t size() const { return table_.size(); }
    MissPolicy miss_policy() const { return miss_; }

    /// Inserts a new pair. Returns false (and leaves the table unchanged) when
    /// the input is already present with a different output.
    bool insert(std::span<const double> input, Vector output);
    bool contains(std::span<const double> input) const;
    std::optional<Vector> find(std::span<const double> input) const;

    /// Throws UnseenInput on a miss unless the miss policy is `zero`.
    Vector operator()(std::span<const double> input) const;

  private:
    std::size_t output_dim_;
    MissPolicy miss_;
    Quantizer quantizer_;
    std::map<std::vector<std::int64_t>, Vector> table_;
};

struct LayerParams {
    LookupFunction phi;  // boundary message map
    LookupFunction psi;  // coboundary message map
    LookupFunction mu;   // update on [h || boundary sum || coboundary sum]
};

struct MPSNModel {
    RefinementConfig init;  // how round-0 colors c^0 are formed (mode, phi, digits)
    LookupFunction encoder;
    std::vector<LayerParams> layers;
    std::size_t hidden_dim = 0;
    LookupFunction readout;
    std::vector<double> dim_weights;  // eta_k; missing entries default to 1

    int depth() const { return static_cast<int>(layers.size()); }
    double eta(int k) const;
};

/// [dim, feature kind, dequantized features...] of c^0_sigma.
Vector encoder_input(const EmbeddedComplex& k, std::size_t simplex, const RefinementConfig& init);

/// [round][simplex index] -> hidden state.
struct HiddenStates {
    std::vector<std::vector<Vector>> rounds;
    const std::vector<Vector>& last() const { return rounds.back(); }
};

HiddenStates forward(const MPSNModel& model, const EmbeddedComplex& k);

/// z(K) = sum_sigma eta_{dim sigma} Psi(h^L_sigma)
Vector readout(const MPSNModel& model, const HiddenStates& states, const EmbeddedComplex& k);

/// The realizability construction: states are basis vectors indexed by the
/// round-l refinement colors observed on the family.
struct Realizer {
    MPSNModel model;
    std::shared_ptr<ColorInterner> interner;
    /// Observed colors per round in first-seen order; position j is iota_l(c).
    std::vector<std::vector<Color>> round_colors;
    std::size_t m = 0;
    std::vector<Coloring> colorings;  // one per family member

    /// iota_l(c), or nullopt if c was not observed at round l.
    std::optional<std::size_t> color_index(int round, Color c) const;
};

/// cfg.mode selects the refinement the realizer matches (GSWL, or SWL for the
/// combinatorial variant); adjacency must be full.
Realizer construct_realizer(const std::vector<EmbeddedComplex>& family, int depth, RefinementConfig cfg = {},
                            std::shared_ptr<ColorInterner> interner = nullptr);

/// Histogram of round-L colors, computed by the realizer's readout.
Vector readout_histogram(const Realizer& realizer, const EmbeddedComplex& k);

/// Color histogram counted directly from a coloring, in iota_L order.
Vector color_histogram(const Realizer& realizer, const Coloring& coloring);

struct ECTReadout {
    Realizer realizer;
    std::vector<Direction> directions;
    std::vector<double> thresholds;

    /// Euler-signed sum of Psi over simplices; direction-major, |V| * |T| long.
    std::vector<long long> evaluate(const EmbeddedComplex& k) const;
};

/// Psi maps each round-L basis state to the indicators 1{t_nu(sigma) <= t},
/// reading the simplex's vertex coordinates back out of its color. Requires
/// depth >= the maximal dimension over the family.
ECTReadout construct_ect_readout(const std::vector<EmbeddedComplex>& family, const std::vector<Direction>& directions,
                                 std::vector<double> thresholds, int depth, RefinementConfig cfg = {});

/// Draws a model whose tables cover every state reachable on `complexes`.
/// Outputs are integers scaled by 2^-10, so every sum is exact.
MPSNModel random_model(const std::vector<EmbeddedComplex>& complexes, int depth, RefinementConfig init,
                       std::size_t hidden_dim, std::size_t output_dim, std::uint64_t seed);

struct UpperBoundReport {
    bool skipped = false;  // pair not equivalent at this depth; nothing to check
    int trials = 0;
    int agreements = 0;
    double max_abs_diff = 0.0;
    /// The bound quantifies over all parameters; this samples finitely many.
    std::string note = "statistical check: finitely many random parameter draws";

    bool ok() const { return skipped || agreements == trials; }
};

inline constexpr double kUpperBoundTolerance = 1e-9;

UpperBoundReport upper_bound_check(const EmbeddedComplex& a, const EmbeddedComplex& b, int depth, int trials,
                                   std::uint64_t seed, RefinementConfig cfg = {}, std::size_t hidden_dim = 4,
                                   std::size_t output_dim = 3);

/// Vertex states [x_v || g_v] per round, g from the wrapped model.
struct SkipState {
    int coord_dim = 0;
    int quantization_digits = kDefaultQuantizationDigits;
    std::vector<std::map<VertexId, Vector>> rounds;
};

/// Requires model depth >= dim(K).
SkipState skip_forward(const MPSNModel& model, const EmbeddedComplex& k);

/// First-d projection of the final-round vertex states.
Embedding recover_coords(const SkipState& states);

}  // namespace gswl
