/**
 * @file json_io.hpp
 * @brief JSON (de)serialization for quivers, representations, plans,
 *        verdicts and synthesis certificates, plus Graphviz export.
 *
 * Matrices are stored densely with row-major "re"/"im" arrays.  Formats are
 * stable: quiver {vertices, arrows:[{id,src,dst}]}, representation
 * {quiver, dims, mats}.
 */

#pragma once

#include <string>

#include <json.hpp>

#include "decompose.hpp"
#include "planner.hpp"

namespace qrep {

using Json = nlohmann::json;

inline Json matrix_to_json(const CMatrix& m) {
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> re, im;
    re.reserve(m.size());
    im.reserve(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            re.push_back(m(i, k).real());
            im.push_back(m(i, k).imag());
        }
    j["re"] = re;
    j["im"] = im;
    return j;
}

inline CMatrix matrix_from_json(const Json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw BadInput("negative matrix dimensions");
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(re.size()) != rows * cols || im.size() != re.size())
        throw BadInput("matrix entry count mismatch");
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) {
            const size_t idx = static_cast<size_t>(i * cols + k);
            m(i, k) = Complex(re[idx], im[idx]);
        }
    return m;
}

inline Json quiver_to_json(const Quiver& q) {
    Json j;
    j["vertices"] = q.vertices;
    j["arrows"] = Json::array();
    for (const auto& a : q.arrows)
        j["arrows"].push_back({{"id", a.id}, {"src", a.src}, {"dst", a.dst}});
    return j;
}

inline Quiver quiver_from_json(const Json& j) {
    Quiver q;
    q.vertices = j.at("vertices").get<std::vector<std::string>>();
    for (const auto& a : j.at("arrows"))
        q.arrows.push_back({a.at("id").get<std::string>(), a.at("src").get<std::string>(),
                            a.at("dst").get<std::string>()});
    q.normalize();
    q.validate();
    return q;
}

inline Json rep_to_json(const HilbertRep& x) {
    Json j;
    j["quiver"] = quiver_to_json(x.quiver);
    j["dims"] = Json::object();
    for (const auto& [v, d] : x.dims) j["dims"][v] = d;
    j["mats"] = Json::object();
    for (const auto& [id, m] : x.mats) j["mats"][id] = matrix_to_json(m);
    return j;
}

inline HilbertRep rep_from_json(const Json& j) {
    HilbertRep x;
    x.quiver = quiver_from_json(j.at("quiver"));
    for (const auto& [v, d] : j.at("dims").items()) x.dims[v] = d.get<int>();
    for (const auto& [id, m] : j.at("mats").items()) x.mats[id] = matrix_from_json(m);
    x.validate();
    return x;
}

inline Json family_to_json(const VertexFamily& t) {
    Json j = Json::object();
    for (const auto& [v, m] : t) j[v] = matrix_to_json(m);
    return j;
}

inline Json witness_to_json(const Witness& w) {
    Json j;
    j["type"] = w.type;
    j["vertices"] = w.vertices;
    j["arrows"] = w.arrow_ids;
    if (!w.cycle.empty()) j["cycle"] = w.cycle;
    if (!w.spine.empty()) j["spine"] = w.spine;
    if (!w.arms.empty()) j["arms"] = w.arms;
    return j;
}

inline Json graph_class_to_json(const GraphClass& c) {
    Json j;
    switch (c.kind) {
    case GraphClass::Dynkin: j["kind"] = "dynkin"; break;
    case GraphClass::ExtendedDynkin: j["kind"] = "extended_dynkin"; break;
    case GraphClass::ContainsExtended: j["kind"] = "contains_extended"; break;
    }
    j["type"] = c.type;
    if (c.witness) j["witness"] = witness_to_json(*c.witness);
    return j;
}

inline Json plan_to_json(const ReflectionPlan& p) {
    Json j;
    j["start"] = quiver_to_json(p.start);
    j["target"] = quiver_to_json(p.target);
    j["steps"] = Json::array();
    for (const auto& s : p.steps)
        j["steps"].push_back({{"vertex", s.vertex}, {"sign", s.sign}});
    return j;
}

inline Json verdict_to_json(const IndecomposabilityVerdict& v) {
    Json j;
    j["verdict"] = v.indecomposable ? "indecomposable" : "decomposable";
    j["end_dim"] = v.end_dim;
    j["radical_dim"] = v.radical_dim;
    if (v.marginal) j["marginal"] = true;
    if (v.witness) {
        j["witness"] = {{"idempotent", family_to_json(v.witness->p)},
                        {"idem_residual", v.witness->idem_residual},
                        {"intertwine_residual", v.witness->intertwine_residual}};
    }
    return j;
}

inline Json synthesis_to_json(const SynthesisResult& r) {
    Json j;
    j["verdict"] = r.indecomposable ? "indecomposable" : "decomposable";
    j["end_dim"] = r.end_dim;
    j["radical_dim"] = r.radical_dim;
    j["witness_type"] = r.witness_type;
    j["N"] = r.N;
    j["plan"] = plan_to_json(r.plan);
    j["rep"] = rep_to_json(r.rep);
    return j;
}

inline Json decomposition_to_json(const DecompositionResult& d) {
    Json j;
    j["summands"] = Json::array();
    for (const auto& s : d.summands) {
        Json e;
        e["dims"] = Json::object();
        for (const auto& [v, dd] : s.dims) e["dims"][v] = dd;
        e["rep"] = rep_to_json(s);
        j["summands"].push_back(e);
    }
    j["iso"] = family_to_json(d.iso);
    j["residual"] = d.residual;
    j["log"] = d.log;
    return j;
}

/// Graphviz rendering of a quiver.
inline std::string export_dot(const Quiver& q) {
    std::string out = "digraph quiver {\n";
    for (const auto& v : q.vertices) out += "  \"" + v + "\";\n";
    for (const auto& a : q.arrows)
        out += "  \"" + a.src + "\" -> \"" + a.dst + "\" [label=\"" + a.id + "\"];\n";
    out += "}\n";
    return out;
}

} // namespace qrep
