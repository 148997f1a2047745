#pragma once

// File formats:
//  - potentials CSV: header `x,re_q,im_q,re_r,im_r`, 17 significant digits;
//  - triplet JSON:   {"half_plane":"upper","bound_states":[{"lambda":[re,im],
//                     "multiplicity":m,"norm_constants":[[re,im],...]}]},
//    pairs as {"unbarred":{...},"barred":{...}};
//  - scattering JSON: lambda grid plus per-coefficient [re,im] arrays and the
//    R/zeta convenience samples used by the inverse pipeline.
// All writes are atomic (temp file + rename).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "giscat/core.hpp"
#include "giscat/direct.hpp"
#include "giscat/grid.hpp"
#include "giscat/marchenko.hpp"
#include "giscat/triplets.hpp"

namespace giscat {

using nlohmann::json;

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.good()) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

//------------------------------------------------------------------------------
// potentials CSV
//------------------------------------------------------------------------------

inline std::string potential_csv(const PotentialPair& p) {
    std::string out = "x,re_q,im_q,re_r,im_r\n";
    char line[256];
    const Grid1D& g = p.grid();
    for (int i = 0; i < g.n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.node(i),
                      p.q.values[k].real(), p.q.values[k].imag(), p.r.values[k].real(),
                      p.r.values[k].imag());
        out += line;
    }
    return out;
}

inline void write_potential_csv(const std::filesystem::path& path, const PotentialPair& p) {
    atomic_write(path, potential_csv(p));
}

inline PotentialPair read_potential_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (header.rfind("x,re_q,im_q,re_r,im_r", 0) != 0)
        throw IoError(path.string() + ": unexpected CSV header '" + header + "'");
    std::vector<double> xs;
    std::vector<Complex> qs, rs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x, rq, iq, rr, ir;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &x, &rq, &iq, &rr, &ir) != 5)
            throw IoError(path.string() + ": malformed row '" + line + "'");
        xs.push_back(x);
        qs.emplace_back(rq, iq);
        rs.emplace_back(rr, ir);
    }
    if (xs.size() < 3) throw IoError(path.string() + ": too few rows");
    double h = xs[1] - xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw IoError(path.string() + ": grid is not uniform");
    }
    Grid1D g(xs.front(), xs.back(), static_cast<int>(xs.size()));
    return PotentialPair(SampledField(g, std::move(qs)), SampledField(g, std::move(rs)));
}

//------------------------------------------------------------------------------
// complex <-> [re, im]
//------------------------------------------------------------------------------

inline json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw IoError("complex values must be [re, im] pairs");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json complex_vector_to_json(const std::vector<Complex>& v) {
    json arr = json::array();
    for (const auto& z : v) arr.push_back(complex_to_json(z));
    return arr;
}

inline std::vector<Complex> complex_vector_from_json(const json& j) {
    std::vector<Complex> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

//------------------------------------------------------------------------------
// triplet JSON
//------------------------------------------------------------------------------

inline json triplet_spec_to_json(const BoundStateSpec& spec) {
    json j;
    j["half_plane"] = spec.half_plane == HalfPlane::Upper ? "upper" : "lower";
    j["bound_states"] = json::array();
    for (const auto& e : spec.entries) {
        json b;
        b["lambda"] = complex_to_json(e.lambda);
        b["multiplicity"] = e.multiplicity;
        b["norm_constants"] = complex_vector_to_json(e.norm_constants);
        j["bound_states"].push_back(b);
    }
    return j;
}

inline BoundStateSpec triplet_spec_from_json(const json& j) {
    BoundStateSpec spec;
    std::string hp = j.at("half_plane").get<std::string>();
    if (hp == "upper")
        spec.half_plane = HalfPlane::Upper;
    else if (hp == "lower")
        spec.half_plane = HalfPlane::Lower;
    else
        throw IoError("half_plane must be 'upper' or 'lower'");
    for (const auto& b : j.at("bound_states")) {
        BoundStateEntry e;
        e.lambda = complex_from_json(b.at("lambda"));
        e.multiplicity = b.at("multiplicity").get<int>();
        e.norm_constants = complex_vector_from_json(b.at("norm_constants"));
        spec.entries.push_back(std::move(e));
    }
    return spec;
}

inline TripletPair triplet_pair_from_json(const json& j) {
    try {
        BoundStateSpec up = triplet_spec_from_json(j.at("unbarred"));
        BoundStateSpec down = triplet_spec_from_json(j.at("barred"));
        if (up.half_plane != HalfPlane::Upper || down.half_plane != HalfPlane::Lower)
            throw IoError("triplet pair: unbarred must be upper, barred lower");
        return TripletPair(build_triplet(up), build_triplet(down));
    } catch (const json::exception& e) {
        throw IoError(std::string("triplet JSON: ") + e.what());
    }
}

inline TripletPair load_triplet_pair(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return triplet_pair_from_json(j);
}

//------------------------------------------------------------------------------
// scattering JSON
//------------------------------------------------------------------------------

inline json scattering_to_json(const ScatteringData& d) {
    json j;
    j["lambda"] = d.lambda;
    j["T"] = complex_vector_to_json(d.T);
    j["Tbar"] = complex_vector_to_json(d.Tbar);
    j["R"] = complex_vector_to_json(d.R);
    j["Rbar"] = complex_vector_to_json(d.Rbar);
    j["L"] = complex_vector_to_json(d.L);
    j["Lbar"] = complex_vector_to_json(d.Lbar);
    json flagged = json::array();
    for (char f : d.flagged) flagged.push_back(static_cast<int>(f));
    j["flagged"] = flagged;
    ReflectionSamples rs = reflection_samples(d);
    j["R_over_zeta"] = complex_vector_to_json(rs.R_over_zeta);
    j["Rbar_over_zeta"] = complex_vector_to_json(rs.Rbar_over_zeta);
    return j;
}

inline ScatteringData scattering_from_json(const json& j) {
    ScatteringData d;
    try {
        d.lambda = j.at("lambda").get<std::vector<double>>();
        auto get = [&](const char* key, std::vector<Complex>& slot, bool required) {
            if (j.contains(key))
                slot = complex_vector_from_json(j.at(key));
            else if (required)
                throw IoError(std::string("scattering JSON: missing ") + key);
            else
                slot.assign(d.lambda.size(), Complex{});
        };
        get("T", d.T, false);
        get("Tbar", d.Tbar, false);
        get("R", d.R, false);
        get("Rbar", d.Rbar, false);
        get("L", d.L, false);
        get("Lbar", d.Lbar, false);
        d.flagged.assign(d.lambda.size(), 0);
        // R/zeta samples take precedence when present (exact inverse input)
        if (j.contains("R_over_zeta")) {
            auto rz = complex_vector_from_json(j.at("R_over_zeta"));
            auto rbz = complex_vector_from_json(j.at("Rbar_over_zeta"));
            for (std::size_t i = 0; i < d.lambda.size(); ++i) {
                Complex z = std::sqrt(Complex(d.lambda[i], 0.0));
                d.R[i] = rz[i] * z;
                d.Rbar[i] = rbz[i] * z;
            }
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("scattering JSON: ") + e.what());
    }
    return d;
}

inline ReflectionSamples reflection_samples_from_json(const json& j) {
    ReflectionSamples s;
    try {
        s.lambda = j.at("lambda").get<std::vector<double>>();
        s.R_over_zeta = complex_vector_from_json(j.at("R_over_zeta"));
        s.Rbar_over_zeta = complex_vector_from_json(j.at("Rbar_over_zeta"));
    } catch (const json::exception& e) {
        throw IoError(std::string("scattering JSON: ") + e.what());
    }
    if (s.R_over_zeta.size() != s.lambda.size() || s.Rbar_over_zeta.size() != s.lambda.size())
        throw IoError("scattering JSON: array lengths disagree");
    return s;
}

}  // namespace giscat
