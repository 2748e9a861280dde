#include "totcorr/state_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "totcorr/errors.hpp"

namespace totcorr {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ArgumentError("complex entries must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

} // namespace

State parse_state(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ArgumentError(std::string("state document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("dims") || !doc["dims"].is_array())
        throw ArgumentError("state document needs an integer list 'dims'");
    std::vector<int> dims;
    for (const auto& d : doc["dims"]) {
        if (!d.is_number_integer()) throw ArgumentError("'dims' entries must be integers");
        dims.push_back(d.get<int>());
    }
    RegisterShape shape(std::move(dims));
    const auto total = static_cast<Eigen::Index>(shape.total());

    const bool has_amps = doc.contains("amplitudes");
    const bool has_matrix = doc.contains("matrix");
    if (has_amps == has_matrix) throw ArgumentError("state document needs exactly one of 'amplitudes' or 'matrix'");

    if (has_amps) {
        const auto& amps = doc["amplitudes"];
        if (!amps.is_array() || static_cast<Eigen::Index>(amps.size()) != total)
            throw ArgumentError("'amplitudes' must have length " + std::to_string(total));
        Vector v(total);
        for (Eigen::Index i = 0; i < total; ++i) v(i) = parse_complex(amps[static_cast<std::size_t>(i)]);
        return PureState(std::move(shape), std::move(v));
    }
    const auto& rows = doc["matrix"];
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != total)
        throw ArgumentError("'matrix' must have " + std::to_string(total) + " rows");
    Matrix m(total, total);
    for (Eigen::Index i = 0; i < total; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != total)
            throw ArgumentError("'matrix' rows must have length " + std::to_string(total));
        for (Eigen::Index j = 0; j < total; ++j) m(i, j) = parse_complex(row[static_cast<std::size_t>(j)]);
    }
    return DensityMatrix(std::move(shape), std::move(m));
}

std::string serialize_state(const State& state) {
    json doc;
    doc["dims"] = shape_of(state).dims();
    if (const auto* psi = std::get_if<PureState>(&state)) {
        json amps = json::array();
        for (Eigen::Index i = 0; i < psi->amplitudes().size(); ++i) amps.push_back(complex_json(psi->amplitudes()(i)));
        doc["amplitudes"] = std::move(amps);
    } else {
        const auto& m = std::get<DensityMatrix>(state).matrix();
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
            rows.push_back(std::move(row));
        }
        doc["matrix"] = std::move(rows);
    }
    return doc.dump();
}

State read_state_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open state file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state(buf.str());
}

void write_state_file(const std::filesystem::path& path, const State& state) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write state file: " + path.string());
    out << serialize_state(state) << '\n';
    if (!out) throw ArgumentError("failed writing state file: " + path.string());
}

} // namespace totcorr
