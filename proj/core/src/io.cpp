#include "anticonc/io.hpp"

#include "anticonc/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace anticonc {

using nlohmann::json;

namespace {

json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // nlohmann reports "line L, column C" inside what().
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    } catch (const json::exception& e) {
        throw ParseError("document", e.what());
    }
}

const json& field(const json& obj, const char* name, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
    const auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(path + "/" + name, "missing required field");
    return *it;
}

double real_at(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError(path, "value must be finite");
    return x;
}

std::size_t dim_at(const json& doc) {
    const json& d = field(doc, "dim", "");
    if (!d.is_number_integer() || d.get<long long>() <= 0) throw ParseError("/dim", "expected a positive integer");
    return d.get<std::size_t>();
}

std::vector<double> vector_at(const json& v, std::size_t dim, const std::string& path) {
    if (!v.is_array()) throw ParseError(path, "expected an array of reals");
    if (v.size() != dim) {
        throw ParseError(path, "expected " + std::to_string(dim) + " components, found " + std::to_string(v.size()));
    }
    std::vector<double> out;
    out.reserve(dim);
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real_at(v[i], path + "/" + std::to_string(i)));
    return out;
}

FiniteDiscreteMeasure measure_from(const json& doc) {
    const std::size_t dim = dim_at(doc);
    const json& atoms = field(doc, "atoms", "");
    if (!atoms.is_array() || atoms.empty()) throw ParseError("/atoms", "expected a nonempty array");
    std::vector<Atom> list;
    list.reserve(atoms.size());
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string path = "/atoms/" + std::to_string(i);
        Atom atom{vector_at(field(atoms[i], "x", path), dim, path + "/x"),
                  real_at(field(atoms[i], "p", path), path + "/p")};
        if (!(atom.mass > 0.0)) throw ParseError(path + "/p", "mass must be positive");
        total += atom.mass;
        list.push_back(std::move(atom));
    }
    MeasureKind kind = MeasureKind::unnormalized;
    if (std::abs(total - 1.0) <= FiniteDiscreteMeasure::kMassTolerance) {
        kind = MeasureKind::probability;
    } else if (total < 1.0) {
        kind = MeasureKind::sub_probability;
    }
    return FiniteDiscreteMeasure(dim, list, kind);
}

json measure_json(const FiniteDiscreteMeasure& m) {
    json atoms = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto p = m.point(i);
        atoms.push_back({{"x", std::vector<double>(p.begin(), p.end())}, {"p", m.mass(i)}});
    }
    return {{"dim", m.dim()}, {"atoms", std::move(atoms)}};
}

}  // namespace

FiniteDiscreteMeasure parse_measure(std::string_view json_text) {
    return measure_from(parse_document(json_text));
}

CoefficientVector parse_coefficients(std::string_view json_text) {
    const json doc = parse_document(json_text);
    const std::size_t dim = dim_at(doc);
    const json& a = field(doc, "a", "");
    if (!a.is_array() || a.empty()) throw ParseError("/a", "expected a nonempty array");
    std::vector<std::vector<double>> entries;
    entries.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) entries.push_back(vector_at(a[k], dim, "/a/" + std::to_string(k)));
    return CoefficientVector(dim, std::move(entries));
}

CompoundPoissonModel parse_compound_poisson(std::string_view json_text) {
    const json doc = parse_document(json_text);
    const double alpha = real_at(field(doc, "alpha", ""), "/alpha");
    if (alpha < 0.0) throw ParseError("/alpha", "intensity must be nonnegative");
    FiniteDiscreteMeasure jumps = measure_from(doc);
    if (jumps.kind() != MeasureKind::probability) throw ParseError("/atoms", "jump law masses must sum to 1");
    return CompoundPoissonModel(alpha, std::move(jumps));
}

std::vector<double> parse_weights(std::string_view json_text) {
    const json doc = parse_document(json_text);
    if (!doc.is_array()) throw ParseError("/", "expected an array of weights");
    std::vector<double> w;
    w.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string path = "/" + std::to_string(i);
        const double f = real_at(doc[i], path);
        if (f < 0.0 || f > 1.0) throw ParseError(path, "weight must lie in [0, 1]");
        w.push_back(f);
    }
    return w;
}

std::string to_json(const FiniteDiscreteMeasure& measure) {
    return measure_json(measure).dump();
}

std::string to_json(const CoefficientVector& a) {
    json rows = json::array();
    for (std::size_t k = 0; k < a.size(); ++k) rows.push_back(std::vector<double>(a[k].begin(), a[k].end()));
    return json{{"dim", a.dim()}, {"a", std::move(rows)}}.dump();
}

std::string to_json(const CompoundPoissonModel& model) {
    json doc = measure_json(model.jump_law());
    doc["alpha"] = model.alpha();
    return doc.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace anticonc
