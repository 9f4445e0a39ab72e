// io.hpp
// JSON serialization of states, Fock matrices and results (nlohmann::json).
// State format: {"modes": n, "mean": [2n doubles], "cov": [[2n doubles] x 2n]}.
// Infinite values are written as the strings "inf" and "-inf".

#pragma once

#include "capacity.hpp"
#include "fock.hpp"
#include "gaussian.hpp"
#include "tail.hpp"
#include "tracedist.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bosonic {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

inline json number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

inline double read_number(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return kInfinity;
        if (s == "-inf") return -kInfinity;
    }
    throw io_error("expected a number for " + what);
}

inline json to_json(const GaussianState& s) {
    json mean = json::array();
    for (int i = 0; i < s.mean().size(); ++i) mean.push_back(s.mean()(i));
    json cov = json::array();
    for (int i = 0; i < s.cov().rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < s.cov().cols(); ++k) row.push_back(s.cov()(i, k));
        cov.push_back(row);
    }
    return json{{"modes", s.modes()}, {"mean", mean}, {"cov", cov}};
}

inline GaussianState state_from_json(const json& j) {
    if (!j.is_object() || !j.contains("modes") || !j.contains("mean") || !j.contains("cov"))
        throw io_error("state JSON must be an object with keys modes, mean, cov");
    if (!j["modes"].is_number_integer() || j["modes"].get<int>() < 1) throw io_error("modes must be a positive integer");
    const int n = j["modes"].get<int>();
    const json& mean = j["mean"];
    const json& cov = j["cov"];
    if (!mean.is_array() || static_cast<int>(mean.size()) != 2 * n) throw io_error("mean must have 2*modes entries");
    if (!cov.is_array() || static_cast<int>(cov.size()) != 2 * n) throw io_error("cov must have 2*modes rows");
    Vector m(2 * n);
    Matrix v(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        m(i) = read_number(mean[i], "mean entry");
        if (!cov[i].is_array() || static_cast<int>(cov[i].size()) != 2 * n)
            throw io_error("cov must be a 2*modes x 2*modes matrix");
        for (int k = 0; k < 2 * n; ++k) v(i, k) = read_number(cov[i][k], "cov entry");
    }
    return GaussianState(m, v);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw io_error("cannot parse '" + path + "': " + e.what());
    }
}

inline GaussianState read_state_file(const std::string& path) { return state_from_json(read_json_file(path)); }

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw io_error("write to '" + path + "' failed");
}

inline json to_json(const ValidityReport& r) {
    return json{{"valid", r.valid()},
                {"symmetric", r.symmetric},
                {"symmetry_residual", r.symmetry_residual},
                {"symmetry_tolerance", r.symmetry_tolerance},
                {"uncertainty_ok", r.uncertainty_ok},
                {"uncertainty_warning", r.uncertainty_warning},
                {"min_uncertainty_eigenvalue", r.min_uncertainty_eigenvalue},
                {"symplectic_ok", r.symplectic_ok},
                {"min_symplectic_eigenvalue", r.min_symplectic_eigenvalue}};
}

inline json to_json(const FockMatrix& f) {
    json entries = json::array();
    for (int i = 0; i < f.entries.rows(); ++i)
        for (int k = 0; k < f.entries.cols(); ++k)
            entries.push_back(json::array({f.entries(i, k).real(), f.entries(i, k).imag()}));
    return json{{"modes", f.basis.modes()}, {"cutoff", f.basis.cutoff()}, {"entries", entries}};
}

inline json to_json(const TailBoundResult& r) {
    json j{{"bound", number(r.bound)}, {"decay_rate", number(r.decay_rate)}, {"alpha", number(r.alpha)}};
    if (r.optimizer_x) j["optimizer_x"] = number(*r.optimizer_x);
    j["fallback"] = r.fallback;
    return j;
}

inline json to_json(const TraceDistanceResult& r) {
    return json{{"estimate", number(r.estimate)},
                {"certified_error", number(r.certified_error)},
                {"cutoff", r.cutoff},
                {"fock_dim", r.fock_dim},
                {"tail_bounds", json::array({number(r.tail_bounds.first), number(r.tail_bounds.second)})}};
}

inline json to_json(const CapacityBound& b) {
    json params = json::object();
    if (b.channel) {
        params["channel"] = to_string(b.channel->kind);
        params[b.channel->kind == ChannelKind::loss ? "lambda" : "g"] = number(b.channel->param);
    }
    if (b.ns) params["Ns"] = number(*b.ns);
    json breakdown = json::object();
    for (const auto& [k, v] : b.breakdown) breakdown[k] = number(v);
    return json{{"value", number(b.value)},
                {"direction", to_string(b.direction)},
                {"task", to_string(b.task)},
                {"method", to_string(b.method)},
                {"n", b.n},
                {"eps", number(b.eps)},
                {"params", params},
                {"preconditions_met", b.preconditions_met},
                {"precondition_reason", b.precondition_reason},
                {"vacuous", b.vacuous},
                {"breakdown", breakdown}};
}

}  // namespace bosonic
