#pragma once

// CSV/JSON output for orbits, bound reports and sweeps, and JSON input for
// matrices and LTI systems.

#include "entrain/bounds.hpp"
#include "entrain/core.hpp"
#include "entrain/linalg.hpp"
#include "entrain/models.hpp"
#include "entrain/sim.hpp"

#ifdef ENTRAIN_JSON_SINGLE_HEADER
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace entrain {

using Json = nlohmann::json;

/// 15 significant digits, general notation; "nan" / "inf" / "-inf" otherwise.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
    return {buf, res.ptr};
}

/// Ordered key=value pairs for the single "# meta" comment line.
class Meta {
public:
    Meta& add(std::string key, std::string value) {
        items_.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Meta& add(std::string key, double value) { return add(std::move(key), format_number(value)); }

    Meta& add_params(const ParamList& params) {
        std::string joined;
        for (const auto& [k, v] : params) joined += (joined.empty() ? "" : ";") + k + "=" + format_number(v);
        return add("params", joined);
    }

    std::string line() const {
        std::string out = "# meta";
        for (const auto& [k, v] : items_) out += " " + k + "=" + quote(v);
        return out + " version=" + kVersion;
    }

private:
    static std::string quote(const std::string& v) {
        if (v.find_first_of(" \t\"") == std::string::npos && !v.empty()) return v;
        std::string q = "\"";
        for (char c : v) q += c == '"' ? std::string("\\\"") : std::string(1, c);
        return q + "\"";
    }
    std::vector<std::pair<std::string, std::string>> items_;
};

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

inline void write_orbit_csv(std::ostream& out, const PeriodicOrbit& orbit, const Meta& meta) {
    out << meta.line() << '\n' << 't';
    for (Eigen::Index i = 0; i < orbit.dim(); ++i) out << ",x" << i + 1;
    out << '\n';
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        out << format_number(orbit.time(k));
        for (Eigen::Index i = 0; i < orbit.dim(); ++i) out << ',' << format_number(orbit.sample(k)(i));
        out << '\n';
    }
}

inline Meta report_meta(const BoundReport& r) {
    Meta meta;
    meta.add("model", r.model).add_params(r.params).add("approx", r.approx).add("eta", r.eta).add("norm", r.norm);
    meta.add("N", static_cast<double>(r.grid)).add("period", r.period).add("c_T", r.c_period);
    meta.add("constant_bound", r.constant_bound);
    if (r.box_program) {
        meta.add("box_program_bound", r.box_program->value).add("box_program_exact", r.box_program->exact ? "yes" : "no");
    }
    meta.add("max_ratio", r.max_ratio).add("valid", r.valid() ? "yes" : "no");
    return meta;
}

/// Columns tau, measured, bound_curve, constant_bound.
inline void write_report_csv(std::ostream& out, const BoundReport& r, const Meta& meta) {
    out << meta.line() << "\ntau,measured,bound_curve,constant_bound\n";
    const std::string constant = format_number(r.constant_bound);
    for (std::size_t k = 0; k < r.grid; ++k) {
        out << format_number(r.tau[k]) << ',' << format_number(r.measured[k]) << ',' << format_number(r.curve[k]) << ','
            << constant << '\n';
    }
}

inline void write_report_csv(std::ostream& out, const BoundReport& r) { write_report_csv(out, r, report_meta(r)); }

inline Json report_json(const BoundReport& r) {
    Json params = Json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    Json j = {{"model", r.model},
              {"params", params},
              {"approx", r.approx},
              {"norm", r.norm},
              {"eta", r.eta},
              {"period", r.period},
              {"N", r.grid},
              {"c_T", r.c_period},
              {"constant_bound", r.constant_bound},
              {"max_ratio", r.max_ratio},
              {"valid", r.valid()},
              {"validity_slack", r.validity_slack},
              {"tau", r.tau},
              {"mismatch", r.mismatch},
              {"bound_curve", r.curve},
              {"measured", r.measured},
              {"version", kVersion}};
    if (r.box_program) {
        j["box_program"] = {{"value", r.box_program->value},
                            {"exact", r.box_program->exact},
                            {"argmax_z", std::vector<double>(r.box_program->z.data(),
                                                             r.box_program->z.data() + r.box_program->z.size())},
                            {"argmax_v", r.box_program->v}};
    }
    return j;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const Meta& meta) {
    out << meta.line() << "\nomega,measured_max,bound_max\n";
    for (const auto& r : rows) {
        out << format_number(r.omega) << ',' << format_number(r.measured_max) << ',' << format_number(r.bound_max)
            << '\n';
    }
}

// ---------------------------------------------------------------------------
// Readers
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(what + ": " + e.what());
    }
}

namespace detail {

inline double finite_number(const Json& j, const std::string& what) {
    if (!j.is_number()) throw InputError(what + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw InputError(what + ": non-finite number");
    return x;
}

} // namespace detail

/// Row-major array of arrays of finite numbers.
inline Matrix matrix_from_json(const Json& j, const std::string& what = "matrix") {
    if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw InputError(what + ": rows must be non-empty arrays");
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InputError(what + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                detail::finite_number(j[r][c], what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return m;
}

inline Vector vector_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = detail::finite_number(j[i], what + "[" + std::to_string(i) + "]");
    }
    return v;
}

inline PeriodicInput input_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("input: expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "offset" && key != "terms" && key != "period") throw InputError("input: unknown key '" + key + "'");
    }
    if (!j.contains("period")) throw InputError("input: missing 'period'");
    const double offset = j.contains("offset") ? detail::finite_number(j["offset"], "input.offset") : 0.0;
    std::vector<CosineTerm> terms;
    if (j.contains("terms")) {
        if (!j["terms"].is_array()) throw InputError("input.terms: expected an array");
        for (const auto& t : j["terms"]) {
            if (!t.is_object()) throw InputError("input.terms: expected objects");
            for (const auto& [key, _] : t.items()) {
                if (key != "amp" && key != "omega" && key != "phase") {
                    throw InputError("input.terms: unknown key '" + key + "'");
                }
            }
            if (!t.contains("amp") || !t.contains("omega")) throw InputError("input.terms: need 'amp' and 'omega'");
            terms.push_back({detail::finite_number(t["amp"], "amp"), detail::finite_number(t["omega"], "omega"),
                             t.contains("phase") ? detail::finite_number(t["phase"], "phase") : 0.0});
        }
    }
    return {offset, std::move(terms), detail::finite_number(j["period"], "input.period")};
}

struct LtiSpec {
    LtiSystem system;
    PeriodicInput input;
};

/// {"A": [[..]], "B": [[..]], "offset": [..], "input": {"offset", "terms": [{"amp", "omega", "phase"}], "period"}}
inline LtiSpec lti_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("lti: expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "A" && key != "B" && key != "offset" && key != "input") {
            throw InputError("lti: unknown key '" + key + "'");
        }
    }
    if (!j.contains("A") || !j.contains("B") || !j.contains("input")) throw InputError("lti: need 'A', 'B' and 'input'");
    const Matrix a = matrix_from_json(j["A"], "A");
    const Matrix b = matrix_from_json(j["B"], "B");
    const Vector offset = j.contains("offset") ? vector_from_json(j["offset"], "offset") : Vector();
    return {LtiSystem(a, b, offset), input_from_json(j["input"])};
}

} // namespace entrain
