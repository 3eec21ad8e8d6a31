#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gswl/complex.hpp"

namespace gswl {

// JSON complex format:
//   { "ambient_dim": d, "vertices": {"<id>": [coords]}, "maximal_simplices": [[ids]] }
EmbeddedComplex complex_from_json(const nlohmann::json& j, int quantization_digits = default_quantization_digits());
nlohmann::json complex_to_json(const EmbeddedComplex& k);

EmbeddedComplex load_complex(const std::filesystem::path& path,
                             int quantization_digits = default_quantization_digits());
void save_complex(const EmbeddedComplex& k, const std::filesystem::path& path);

/// OFF triangle mesh: vertices become 0-simplices, every face must be a
/// triangle and becomes a maximal simplex.
EmbeddedComplex read_off(std::istream& in, int quantization_digits = default_quantization_digits());
EmbeddedComplex load_off(const std::filesystem::path& path,
                         int quantization_digits = default_quantization_digits());

}  // namespace gswl
