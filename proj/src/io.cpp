#include "gswl/io.hpp"

#include <fstream>
#include <sstream>

namespace gswl {

using nlohmann::json;

EmbeddedComplex complex_from_json(const json& j, int quantization_digits) {
    if (!j.is_object()) throw ValidationError("complex JSON must be an object");
    for (const char* key : {"ambient_dim", "vertices", "maximal_simplices"}) {
        if (!j.contains(key)) throw ValidationError(std::string("complex JSON is missing \"") + key + "\"");
    }
    const int d = j.at("ambient_dim").get<int>();
    if (d < 1) throw ValidationError("ambient_dim must be >= 1");

    std::map<VertexId, Point> coords;
    for (const auto& [key, value] : j.at("vertices").items()) {
        std::size_t used = 0;
        const long long id = std::stoll(key, &used);
        if (used != key.size()) throw ValidationError("vertex key \"" + key + "\" is not an integer");
        auto p = value.get<Point>();
        if (static_cast<int>(p.size()) != d) {
            throw ValidationError("vertex " + key + " has " + std::to_string(p.size()) + " coordinates, ambient_dim is " +
                                  std::to_string(d));
        }
        coords.emplace(id, std::move(p));
    }
    auto maximal = j.at("maximal_simplices").get<std::vector<std::vector<VertexId>>>();
    // Isolated vertices need not be listed as maximal simplices.
    for (const auto& [v, p] : coords) maximal.push_back({v});
    return {build_complex(maximal), Embedding(std::move(coords), quantization_digits)};
}

json complex_to_json(const EmbeddedComplex& k) {
    json vertices = json::object();
    for (const auto& [v, p] : k.embedding().coords()) vertices[std::to_string(v)] = p;
    json maximal = json::array();
    for (const auto& s : k.complex().maximal_simplices()) maximal.push_back(s.vertices());
    return {{"ambient_dim", k.embedding().ambient_dim()}, {"vertices", vertices}, {"maximal_simplices", maximal}};
}

EmbeddedComplex load_complex(const std::filesystem::path& path, int quantization_digits) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    if (path.extension() == ".off" || path.extension() == ".OFF") return read_off(in, quantization_digits);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return complex_from_json(j, quantization_digits);
}

void save_complex(const EmbeddedComplex& k, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << complex_to_json(k).dump(2) << '\n';
}

namespace {

// Next non-empty line with '#' comments stripped.
bool next_line(std::istream& in, std::istringstream& line) {
    std::string raw;
    while (std::getline(in, raw)) {
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        line.clear();
        line.str(raw);
        return true;
    }
    return false;
}

}  // namespace

EmbeddedComplex read_off(std::istream& in, int quantization_digits) {
    std::istringstream line;
    if (!next_line(in, line)) throw ValidationError("OFF: empty input");
    std::string header;
    line >> header;
    if (header != "OFF") throw ValidationError("OFF: missing OFF header");
    std::size_t nv = 0, nf = 0, ne = 0;
    if (!(line >> nv)) {
        if (!next_line(in, line)) throw ValidationError("OFF: missing counts");
        line >> nv;
    }
    if (!(line >> nf >> ne)) throw ValidationError("OFF: malformed counts line");

    std::map<VertexId, Point> coords;
    for (std::size_t i = 0; i < nv; ++i) {
        if (!next_line(in, line)) throw ValidationError("OFF: truncated vertex list");
        Point p(3);
        if (!(line >> p[0] >> p[1] >> p[2])) throw ValidationError("OFF: malformed vertex line " + std::to_string(i));
        coords.emplace(static_cast<VertexId>(i), std::move(p));
    }
    std::vector<std::vector<VertexId>> maximal;
    for (std::size_t i = 0; i < nf; ++i) {
        if (!next_line(in, line)) throw ValidationError("OFF: truncated face list");
        std::size_t n = 0;
        line >> n;
        if (n != 3) throw ValidationError("OFF: face " + std::to_string(i) + " is not a triangle");
        std::vector<VertexId> f(3);
        if (!(line >> f[0] >> f[1] >> f[2])) throw ValidationError("OFF: malformed face line " + std::to_string(i));
        for (VertexId v : f) {
            if (v < 0 || static_cast<std::size_t>(v) >= nv) throw ValidationError("OFF: face index out of range");
        }
        maximal.push_back(std::move(f));
    }
    for (const auto& [v, p] : coords) maximal.push_back({v});
    return {build_complex(maximal), Embedding(std::move(coords), quantization_digits)};
}

EmbeddedComplex load_off(const std::filesystem::path& path, int quantization_digits) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_off(in, quantization_digits);
}

}  // namespace gswl
