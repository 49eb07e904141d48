#pragma once

// JSON and CSV export. Exact values always cross this boundary as "num/den"
// strings. Requires nlohmann/json (json.hpp on the include path).

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "k2d/error.hpp"
#include "k2d/kernel.hpp"
#include "k2d/ortho.hpp"
#include "k2d/params.hpp"
#include "k2d/polynomial_table.hpp"
#include "k2d/recurrence.hpp"

namespace k2d::io {

using nlohmann::json;

inline json to_json(const Rational &x) { return x.str(); }

inline json to_json(GridPoint p) { return json::array({p.a, p.b}); }

/// "m1_m2" label used for CSV headers and JSON label lists.
inline std::string label(GridPoint p) { return std::to_string(p.a) + "_" + std::to_string(p.b); }

inline json to_json(const ParameterSet &ps) {
    json out{{"u1", to_json(ps.u1())},     {"v1", to_json(ps.v1())},     {"u2", to_json(ps.u2())},
             {"v2", to_json(ps.v2())},     {"eta1", to_json(ps.eta1())}, {"eta2", to_json(ps.eta2())},
             {"dual_det", to_json(ps.dual_det())}};
    out["eta_bar1"] = ps.eta_bar1() ? to_json(*ps.eta_bar1()) : json(nullptr);
    out["eta_bar2"] = ps.eta_bar2() ? to_json(*ps.eta_bar2()) : json(nullptr);
    const auto &f = ps.flags();
    out["flags"] = {{"orthogonal", f.orthogonal},
                    {"trinomial_valid", f.trinomial_valid},
                    {"boundary_trinomial", f.boundary_trinomial},
                    {"dual_singular", f.dual_singular},
                    {"delta_singular", f.delta_singular}};
    if (ps.source()) {
        json p = json::array();
        for (const auto &v : ps.source()->values()) {
            p.push_back(to_json(v));
        }
        out["p"] = p;
    } else {
        out["p"] = nullptr;
    }
    return out;
}

inline json to_json(const PolynomialTable &table) {
    json values = json::array();
    for (const auto m : table.grid()) {
        for (const auto x : table.grid()) {
            values.push_back({{"m", to_json(m)}, {"x", to_json(x)}, {"value", to_json(table.at(m, x))}});
        }
    }
    return {{"N", table.N()}, {"params", to_json(table.params())}, {"values", values}};
}

/// One line per (m, x) pair: m1,m2,x1,x2,value.
inline std::string to_csv(const PolynomialTable &table) {
    std::ostringstream out;
    out << "m1,m2,x1,x2,value\n";
    for (const auto m : table.grid()) {
        for (const auto x : table.grid()) {
            out << m.a << ',' << m.b << ',' << x.a << ',' << x.b << ',' << table.at(m, x).str() << '\n';
        }
    }
    return out.str();
}

/// Gram matrix document. "failures" lists the nonzero off-diagonal entries.
inline json to_json(const GramMatrix &g) {
    json labels = json::array();
    json rows = json::array();
    json diagonal = json::array();
    for (std::size_t r = 0; r < g.grid().size(); ++r) {
        labels.push_back(label(g.grid()[r]));
        diagonal.push_back(to_json(g.at_index(r, r)));
        json row = json::array();
        for (std::size_t c = 0; c < g.grid().size(); ++c) {
            row.push_back(to_json(g.at_index(r, c)));
        }
        rows.push_back(row);
    }
    json failures = json::array();
    for (const auto &[r, c] : g.nonzero_off_diagonal()) {
        failures.push_back({{"row", label(r)}, {"col", label(c)}, {"value", to_json(g.at(r, c))}});
    }
    return {{"N", g.N()}, {"labels", labels}, {"entries", rows}, {"diagonal", diagonal}, {"failures", failures}};
}

/// Dense CSV with "m1_m2" row and column labels in grid order.
inline std::string to_csv(const GramMatrix &g) {
    std::ostringstream out;
    out << "label";
    for (const auto p : g.grid()) {
        out << ',' << label(p);
    }
    out << '\n';
    for (std::size_t r = 0; r < g.grid().size(); ++r) {
        out << label(g.grid()[r]);
        for (std::size_t c = 0; c < g.grid().size(); ++c) {
            out << ',' << g.at_index(r, c).str();
        }
        out << '\n';
    }
    return out.str();
}

inline json to_json(const RecurrenceReport &report) {
    json p = json::array();
    for (const auto &v : report.p) {
        p.push_back(to_json(v));
    }
    json failures = json::array();
    for (const auto &f : report.failures) {
        failures.push_back({{"m", to_json(f.m)}, {"x", to_json(f.x)}, {"lhs", to_json(f.lhs)}, {"rhs", to_json(f.rhs)}});
    }
    return {{"N", report.N}, {"p", p}, {"pairs_checked", report.pairs_checked}, {"failures", failures}};
}

inline json to_json(const IdentityReport &report) {
    json failures = json::array();
    for (const auto &f : report.failures) {
        failures.push_back({{"m", to_json(f.m)}, {"x", to_json(f.x)}, {"residual", to_json(f.residual)}});
    }
    return {{"N", report.N}, {"pairs_checked", report.pairs_checked}, {"failures", failures}};
}

inline json to_json(const KernelParameters &kp) {
    return {{"alpha1", to_json(kp.alpha1)},
            {"alpha2", to_json(kp.alpha2)},
            {"beta1", to_json(kp.beta1)},
            {"beta2", to_json(kp.beta2)},
            {"N", kp.N}};
}

/// entries[r][c] = K(state r; state c), the probability of moving from c to r.
inline json to_json(const KernelMatrix &k) {
    json states = json::array();
    json rows = json::array();
    for (std::size_t r = 0; r < k.size(); ++r) {
        states.push_back(to_json(k.grid()[r]));
        json row = json::array();
        for (std::size_t c = 0; c < k.size(); ++c) {
            row.push_back(to_json(k.at_index(r, c)));
        }
        rows.push_back(row);
    }
    return {{"N", k.N()},
            {"params", to_json(k.params())},
            {"ordering", "entries[r][c] is the probability of moving from states[c] to states[r]"},
            {"states", states},
            {"entries", rows}};
}

/// Dense CSV; row r, column c holds the probability of moving from state c to state r.
inline std::string to_csv(const KernelMatrix &k) {
    std::ostringstream out;
    out << "to\\from";
    for (const auto p : k.grid()) {
        out << ',' << label(p);
    }
    out << '\n';
    for (std::size_t r = 0; r < k.size(); ++r) {
        out << label(k.grid()[r]);
        for (std::size_t c = 0; c < k.size(); ++c) {
            out << ',' << k.at_index(r, c).str();
        }
        out << '\n';
    }
    return out.str();
}

inline json to_json(const Error &e) { return {{"error", to_string(e.code())}, {"message", e.what()}}; }

}  // namespace k2d::io
