// k2d: evaluate and verify bivariate Krawtchouk polynomials from the shell.
//
// Exit status: 0 success (verification commands: no failures), 1 verification
// failures (the document lists them under "failures"), 2 usage or parameter
// errors (the document carries an "error" code).

#include <CLI11.hpp>

#include "k2d/io.hpp"
#include "k2d/k2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using k2d::Error;
using k2d::ErrorCode;
using k2d::GridPoint;
using k2d::ParameterSet;
using k2d::PQuadruple;
using k2d::Rational;
using nlohmann::json;

enum class Format { json, csv, table };

struct Options {
    std::string command;
    std::string p, uv, eta, kernel;
    int N = -1;
    std::string m, x;
    std::string format = "json";
    std::string mode = "exact";
    std::uint64_t seed = k2d::default_panel_seed;
    std::size_t panel_size = 20;
    bool panel = false;
    bool dual = false;
    bool calibrate = false;
};

struct Outcome {
    std::string text;
    bool failed = false;
};

[[noreturn]] void usage(const std::string &message) { throw Error(ErrorCode::usage, message); }

std::vector<Rational> parse_list(const std::string &text, std::size_t expected, const char *flag) {
    std::vector<Rational> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        out.push_back(Rational::parse(item));
    }
    if (out.size() != expected || (!text.empty() && text.back() == ',')) {
        usage(std::string(flag) + " expects " + std::to_string(expected) + " comma-separated values");
    }
    return out;
}

GridPoint parse_point(const std::string &text, const char *flag) {
    const auto values = parse_list(text, 2, flag);
    for (const auto &v : values) {
        if (!v.is_integer() || v.sign() < 0) {
            usage(std::string(flag) + " expects two nonnegative integers");
        }
    }
    return {static_cast<int>(values[0].to_long()), static_cast<int>(values[1].to_long())};
}

Format parse_format(const std::string &text) {
    if (text == "json") {
        return Format::json;
    }
    if (text == "csv") {
        return Format::csv;
    }
    if (text == "table") {
        return Format::table;
    }
    usage("--format must be json, csv or table");
}

int require_n(const Options &o) {
    if (o.N < 0) {
        usage("--N is required and must be nonnegative");
    }
    return o.N;
}

void require_exact(const Options &o) {
    if (o.mode != "exact") {
        usage("'" + o.command + "' supports only --mode exact");
    }
}

/// Exactly one source: --p, or --uv together with --eta.
ParameterSet parameter_set(const Options &o) {
    const bool has_p = !o.p.empty();
    const bool has_uv = !o.uv.empty() || !o.eta.empty();
    if (has_p == has_uv) {
        usage("give exactly one parameter source: --p, or --uv with --eta");
    }
    if (has_p) {
        return k2d::from_p(PQuadruple::parse(o.p));
    }
    if (o.uv.empty() || o.eta.empty()) {
        usage("--uv and --eta must be given together");
    }
    const auto uv = parse_list(o.uv, 4, "--uv");
    const auto eta = parse_list(o.eta, 2, "--eta");
    return ParameterSet::make(uv[0], uv[1], uv[2], uv[3], eta[0], eta[1]);
}

PQuadruple quadruple(const Options &o) {
    if (o.p.empty() || !o.uv.empty() || !o.eta.empty()) {
        usage("'" + o.command + "' needs --p and no explicit --uv/--eta set");
    }
    return PQuadruple::parse(o.p);
}

std::string dump(const json &doc) { return doc.dump(2) + "\n"; }

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Fixed-width text grid for table output.
std::string text_grid(const std::vector<std::string> &header, const std::vector<std::vector<std::string>> &rows) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto &row : rows) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream out;
    const auto line = [&](const std::vector<std::string> &cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            out << (c == 0 ? "" : "  ") << cells[c] << std::string(width[c] - cells[c].size(), ' ');
        }
        out << '\n';
    };
    line(header);
    for (const auto &row : rows) {
        line(row);
    }
    return out.str();
}

std::string failures_table(const json &failures) {
    if (failures.empty()) {
        return "failures: none\n";
    }
    std::ostringstream out;
    out << "failures: " << failures.size() << '\n';
    for (const auto &f : failures) {
        out << "  " << f.dump() << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------- eval

Outcome run_eval(const Options &o, Format format) {
    const int n = require_n(o);
    const ParameterSet ps = parameter_set(o);
    if (o.m.empty() != o.x.empty()) {
        usage("eval takes both --m and --x, or neither for the full table");
    }
    if (!o.m.empty()) {
        const GridPoint m = parse_point(o.m, "--m");
        const GridPoint x = parse_point(o.x, "--x");
        std::string value;
        if (o.mode == "exact") {
            value = k2d::eval_P(k2d::F12Arguments{m, x, n, ps.u1(), ps.v1(), ps.u2(), ps.v2()}).str();
        } else {
            value = format_double(k2d::eval_P(k2d::BasicF12Arguments<double>{
                m, x, n, ps.u1().to_double(), ps.v1().to_double(), ps.u2().to_double(), ps.v2().to_double()}));
        }
        switch (format) {
            case Format::json:
                return {dump({{"N", n}, {"m", k2d::io::to_json(m)}, {"x", k2d::io::to_json(x)}, {"mode", o.mode},
                              {"value", value}})};
            case Format::csv:
                return {"m1,m2,x1,x2,value\n" + std::to_string(m.a) + "," + std::to_string(m.b) + "," +
                        std::to_string(x.a) + "," + std::to_string(x.b) + "," + value + "\n"};
            case Format::table:
                return {value + "\n"};
        }
    }
    require_exact(o);
    const k2d::PolynomialTable table(ps, n);
    switch (format) {
        case Format::json:
            return {dump(k2d::io::to_json(table))};
        case Format::csv:
            return {k2d::io::to_csv(table)};
        case Format::table: {
            std::vector<std::vector<std::string>> rows;
            for (const auto m : table.grid()) {
                for (const auto x : table.grid()) {
                    rows.push_back({m.str(), x.str(), table.at(m, x).str()});
                }
            }
            return {text_grid({"m", "x", "P_m(x)"}, rows)};
        }
    }
    return {};
}

// ---------------------------------------------------------------- gram

std::string matrix_table(const k2d::TriangularGrid &grid, const std::vector<std::string> &cells) {
    std::vector<std::string> header{""};
    std::vector<std::vector<std::string>> rows;
    const std::size_t g = grid.size();
    for (std::size_t c = 0; c < g; ++c) {
        header.push_back(k2d::io::label(grid[c]));
    }
    for (std::size_t r = 0; r < g; ++r) {
        std::vector<std::string> row{k2d::io::label(grid[r])};
        for (std::size_t c = 0; c < g; ++c) {
            row.push_back(cells[r * g + c]);
        }
        rows.push_back(std::move(row));
    }
    return text_grid(header, rows);
}

Outcome gram_float_document(const Options &o, Format format, const ParameterSet &ps, int n) {
    if (o.dual) {
        usage("--dual supports only --mode exact");
    }
    const auto values = k2d::gram_float(ps, n);
    const k2d::TriangularGrid grid(n);
    const std::size_t g = grid.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        scale = std::max(scale, std::abs(values[i * g + i]));
    }
    const double tolerance = 1e-10 * std::max(scale, 1.0);
    json labels = json::array();
    json entries = json::array();
    json failures = json::array();
    std::vector<std::string> cells;
    for (std::size_t r = 0; r < g; ++r) {
        labels.push_back(k2d::io::label(grid[r]));
        json row = json::array();
        for (std::size_t c = 0; c < g; ++c) {
            const double v = values[r * g + c];
            row.push_back(v);
            cells.push_back(format_double(v));
            if (r != c && std::abs(v) > tolerance) {
                failures.push_back(
                    {{"row", k2d::io::label(grid[r])}, {"col", k2d::io::label(grid[c])}, {"value", v}});
            }
        }
        entries.push_back(row);
    }
    const bool failed = !failures.empty();
    switch (format) {
        case Format::json:
            return {dump({{"N", n},
                          {"kind", "gram"},
                          {"mode", "float"},
                          {"tolerance", tolerance},
                          {"labels", labels},
                          {"entries", entries},
                          {"failures", failures}}),
                    failed};
        case Format::csv: {
            std::ostringstream out;
            out << "label";
            for (const auto p : grid) {
                out << ',' << k2d::io::label(p);
            }
            out << '\n';
            for (std::size_t r = 0; r < g; ++r) {
                out << k2d::io::label(grid[r]);
                for (std::size_t c = 0; c < g; ++c) {
                    out << ',' << cells[r * g + c];
                }
                out << '\n';
            }
            return {out.str(), failed};
        }
        case Format::table:
            return {matrix_table(grid, cells) + failures_table(failures), failed};
    }
    return {};
}

Outcome run_gram_panel(const Options &o, Format format, int n) {
    require_exact(o);
    if (!o.uv.empty() || !o.eta.empty()) {
        usage("--panel draws its own quadruples; do not pass --uv/--eta");
    }
    std::vector<PQuadruple> panel;
    if (!o.p.empty()) {
        panel.push_back(PQuadruple::parse(o.p));
    }
    for (auto &q : k2d::random_quadruples(o.seed, o.panel_size)) {
        panel.push_back(std::move(q));
    }
    json runs = json::array();
    json failures = json::array();
    for (const auto &q : panel) {
        const ParameterSet ps = k2d::from_p(q);
        const auto g = o.dual ? k2d::dual_gram(ps, n) : k2d::gram(ps, n);
        const auto bad = g.nonzero_off_diagonal();
        runs.push_back({{"p", q.str()}, {"diagonal", bad.empty()}});
        for (const auto &[r, c] : bad) {
            failures.push_back({{"p", q.str()},
                                {"row", k2d::io::label(r)},
                                {"col", k2d::io::label(c)},
                                {"value", g.at(r, c).str()}});
        }
    }
    const bool failed = !failures.empty();
    const json doc{{"N", n},         {"kind", o.dual ? "dual_gram" : "gram"}, {"seed", o.seed}, {"panel", runs},
                   {"failures", failures}};
    switch (format) {
        case Format::json:
            return {dump(doc), failed};
        case Format::csv: {
            std::string out = "p,diagonal\n";
            for (const auto &r : runs) {
                out += "\"" + r["p"].get<std::string>() + "\"," + (r["diagonal"].get<bool>() ? "true" : "false") + "\n";
            }
            return {out, failed};
        }
        case Format::table: {
            std::vector<std::vector<std::string>> rows;
            for (const auto &r : runs) {
                rows.push_back({r["p"].get<std::string>(), r["diagonal"].get<bool>() ? "yes" : "NO"});
            }
            return {text_grid({"p", "diagonal"}, rows) + failures_table(failures), failed};
        }
    }
    return {};
}

Outcome run_gram(const Options &o, Format format) {
    const int n = require_n(o);
    if (o.panel) {
        return run_gram_panel(o, format, n);
    }
    const ParameterSet ps = parameter_set(o);
    if (o.mode == "float") {
        return gram_float_document(o, format, ps, n);
    }
    const auto g = o.dual ? k2d::dual_gram(ps, n) : k2d::gram(ps, n);
    json doc = k2d::io::to_json(g);
    doc["kind"] = o.dual ? "dual_gram" : "gram";
    doc["params"] = k2d::io::to_json(ps);
    const bool failed = !doc["failures"].empty();
    switch (format) {
        case Format::json:
            return {dump(doc), failed};
        case Format::csv:
            return {k2d::io::to_csv(g), failed};
        case Format::table: {
            std::vector<std::string> cells;
            for (std::size_t r = 0; r < g.grid().size(); ++r) {
                for (std::size_t c = 0; c < g.grid().size(); ++c) {
                    cells.push_back(g.at_index(r, c).str());
                }
            }
            return {matrix_table(g.grid(), cells) + failures_table(doc["failures"]), failed};
        }
    }
    return {};
}

// ---------------------------------------------------------------- norms

Outcome run_norms(const Options &o, Format format) {
    require_exact(o);
    const int n = require_n(o);
    const ParameterSet ps = parameter_set(o);
    if (!ps.flags().orthogonal) {
        throw Error(ErrorCode::non_orthogonal, "norms need a parameter set satisfying the orthogonality conditions");
    }
    const auto g = k2d::gram(ps, n);
    json rows = json::array();
    json failures = json::array();
    std::vector<std::vector<std::string>> text_rows;
    for (const auto m : g.grid()) {
        const Rational &brute = g.at(m, m);
        const Rational closed = k2d::norm_closed_form(ps, n, m);
        const Rational product = k2d::norm_product_form(ps, n, m);
        const Rational printed_v2 = k2d::norm_product_form(ps, n, m, k2d::NormProductForm::printed_one_minus_v2);
        const Rational printed_u2 = k2d::norm_product_form(ps, n, m, k2d::NormProductForm::printed_one_minus_u2);
        rows.push_back({{"m", k2d::io::to_json(m)},
                        {"brute_force", brute.str()},
                        {"dual_weight_form", closed.str()},
                        {"product_form", product.str()},
                        {"printed_one_minus_v2", printed_v2.str()},
                        {"printed_one_minus_u2", printed_u2.str()}});
        text_rows.push_back({m.str(), brute.str(), closed.str(), product.str(), printed_v2 == brute ? "ok" : "differs",
                             printed_u2 == brute ? "ok" : "differs"});
        if (brute != closed || brute != product) {
            failures.push_back({{"m", k2d::io::to_json(m)},
                                {"brute_force", brute.str()},
                                {"dual_weight_form", closed.str()},
                                {"product_form", product.str()}});
        }
    }
    const bool failed = !failures.empty();
    switch (format) {
        case Format::json:
            return {dump({{"N", n}, {"params", k2d::io::to_json(ps)}, {"norms", rows}, {"failures", failures}}),
                    failed};
        case Format::csv: {
            std::string out = "m1_m2,brute_force,dual_weight_form,product_form,printed_one_minus_v2,printed_one_minus_u2\n";
            for (const auto &r : rows) {
                out += std::to_string(r["m"][0].get<int>()) + "_" + std::to_string(r["m"][1].get<int>()) + "," +
                       r["brute_force"].get<std::string>() + "," + r["dual_weight_form"].get<std::string>() + "," +
                       r["product_form"].get<std::string>() + "," + r["printed_one_minus_v2"].get<std::string>() +
                       "," + r["printed_one_minus_u2"].get<std::string>() + "\n";
            }
            return {out, failed};
        }
        case Format::table:
            return {text_grid({"m", "brute force", "dual weights", "product", "printed (1-v2)", "printed (1-u2)"},
                              text_rows) +
                        failures_table(failures),
                    failed};
    }
    return {};
}

// ---------------------------------------------------------------- recurrence

json tag_failures(const json &failures, const std::string &p) {
    json out = json::array();
    for (auto f : failures) {
        f["p"] = p;
        out.push_back(std::move(f));
    }
    return out;
}

Outcome run_recurrence(const Options &o, Format format) {
    require_exact(o);
    const int n = require_n(o);
    std::vector<PQuadruple> panel;
    if (o.panel) {
        if (!o.uv.empty() || !o.eta.empty()) {
            usage("--panel draws its own quadruples; do not pass --uv/--eta");
        }
        if (!o.p.empty()) {
            panel.push_back(PQuadruple::parse(o.p));
        }
        for (auto &q : k2d::random_quadruples(o.seed, o.panel_size)) {
            panel.push_back(std::move(q));
        }
    } else {
        panel.push_back(quadruple(o));
    }
    json reports = json::array();
    json failures = json::array();
    for (const auto &q : panel) {
        const json report = k2d::io::to_json(k2d::verify_recurrence_full(q, n));
        for (const auto &f : tag_failures(report["failures"], q.str())) {
            failures.push_back(f);
        }
        reports.push_back(report);
    }
    const bool failed = !failures.empty();
    json doc = o.panel ? json{{"N", n}, {"seed", o.seed}, {"panel", reports}, {"failures", failures}} : reports[0];
    switch (format) {
        case Format::json:
            return {dump(doc), failed};
        case Format::csv: {
            std::string out = "p,N,pairs_checked,failures\n";
            for (std::size_t i = 0; i < panel.size(); ++i) {
                out += "\"" + panel[i].str() + "\"," + std::to_string(n) + "," +
                       std::to_string(reports[i]["pairs_checked"].get<std::size_t>()) + "," +
                       std::to_string(reports[i]["failures"].size()) + "\n";
            }
            return {out, failed};
        }
        case Format::table: {
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < panel.size(); ++i) {
                rows.push_back({panel[i].str(), std::to_string(reports[i]["pairs_checked"].get<std::size_t>()),
                                std::to_string(reports[i]["failures"].size())});
            }
            return {text_grid({"p", "pairs", "failed"}, rows) + failures_table(failures), failed};
        }
    }
    return {};
}

// ---------------------------------------------------------------- identity

Outcome run_identity(const Options &o, Format format) {
    require_exact(o);
    const int n = require_n(o);
    const PQuadruple q = quadruple(o);
    json doc;
    if (o.m.empty() != o.x.empty()) {
        usage("identity takes both --m and --x, or neither for the full grid");
    }
    if (!o.m.empty()) {
        const GridPoint m = parse_point(o.m, "--m");
        const GridPoint x = parse_point(o.x, "--x");
        const Rational r = k2d::identity_residual(q, m, x, n);
        json failures = json::array();
        if (!r.is_zero()) {
            failures.push_back({{"m", k2d::io::to_json(m)}, {"x", k2d::io::to_json(x)}, {"residual", r.str()}});
        }
        doc = {{"N", n}, {"pairs_checked", 1}, {"failures", failures}};
    } else {
        doc = k2d::io::to_json(k2d::verify_identity_full(q, n));
    }
    doc["p"] = q.str();
    const bool failed = !doc["failures"].empty();
    switch (format) {
        case Format::json:
            return {dump(doc), failed};
        case Format::csv: {
            std::string out = "m1,m2,x1,x2,residual\n";
            for (const auto &f : doc["failures"]) {
                out += std::to_string(f["m"][0].get<int>()) + "," + std::to_string(f["m"][1].get<int>()) + "," +
                       std::to_string(f["x"][0].get<int>()) + "," + std::to_string(f["x"][1].get<int>()) + "," +
                       f["residual"].get<std::string>() + "\n";
            }
            return {out, failed};
        }
        case Format::table:
            return {"pairs checked: " + std::to_string(doc["pairs_checked"].get<std::size_t>()) + "\n" +
                        failures_table(doc["failures"]),
                    failed};
    }
    return {};
}

// ---------------------------------------------------------------- kernel

json calibration_document(const k2d::CalibratedPair &pair, json &failures) {
    const k2d::KernelMatrix k = k2d::build_kernel(pair.kernel);
    const k2d::PolynomialTable table(pair.family, pair.kernel.N);
    json labels = json::array();
    for (const auto m : table.grid()) {
        const auto test = k2d::eigenfunction_ratio_test(k, table, m);
        const Rational expected = pair.eigenvalue(m);
        labels.push_back({{"m", k2d::io::to_json(m)},
                          {"is_eigen", test.is_eigen},
                          {"lambda", test.lambda ? json(test.lambda->str()) : json(nullptr)}});
        if (!test.is_eigen || *test.lambda != expected) {
            failures.push_back({{"kernel", pair.kernel.str()},
                                {"m", k2d::io::to_json(m)},
                                {"reason", "ratio test"},
                                {"expected_lambda", expected.str()}});
        }
    }
    return {{"kernel", k2d::io::to_json(pair.kernel)},
            {"family", k2d::io::to_json(pair.family)},
            {"lambda1", pair.lambda1.str()},
            {"lambda2", pair.lambda2.str()},
            {"labels", labels}};
}

Outcome run_kernel(const Options &o, Format format) {
    require_exact(o);
    const int n = require_n(o);
    if (!o.p.empty() || !o.uv.empty() || !o.eta.empty()) {
        usage("kernel takes --kernel alpha1,alpha2,beta1,beta2, not a polynomial parameter set");
    }
    json failures = json::array();
    if (o.panel) {
        json pairs = json::array();
        for (const auto &pair : k2d::calibration_search(n, 6, o.panel_size)) {
            pairs.push_back(calibration_document(pair, failures));
        }
        const bool failed = !failures.empty() || pairs.empty();
        if (pairs.empty()) {
            failures.push_back({{"reason", "calibration search found no kernel"}});
        }
        const json doc{{"N", n}, {"lattice_denominator", 6}, {"calibrated", pairs}, {"failures", failures}};
        if (format == Format::json) {
            return {dump(doc), failed};
        }
        std::vector<std::vector<std::string>> rows;
        for (const auto &p : pairs) {
            rows.push_back({k2d::KernelParameters{Rational::parse(p["kernel"]["alpha1"].get<std::string>()),
                                                  Rational::parse(p["kernel"]["alpha2"].get<std::string>()),
                                                  Rational::parse(p["kernel"]["beta1"].get<std::string>()),
                                                  Rational::parse(p["kernel"]["beta2"].get<std::string>()), n}
                                .str(),
                            p["lambda1"].get<std::string>(), p["lambda2"].get<std::string>()});
        }
        if (format == Format::csv) {
            std::string out = "alpha1_alpha2_beta1_beta2,lambda1,lambda2\n";
            for (const auto &r : rows) {
                out += "\"" + r[0] + "\"," + r[1] + "," + r[2] + "\n";
            }
            return {out, failed};
        }
        return {text_grid({"kernel", "lambda1", "lambda2"}, rows) + failures_table(failures), failed};
    }
    if (o.kernel.empty()) {
        usage("kernel needs --kernel alpha1,alpha2,beta1,beta2 (or --panel)");
    }
    const auto values = parse_list(o.kernel, 4, "--kernel");
    const k2d::KernelParameters kp{values[0], values[1], values[2], values[3], n};
    const k2d::KernelMatrix k = k2d::build_kernel(kp);
    if (format == Format::csv) {
        return {k2d::io::to_csv(k)};
    }

    const auto sums = k.column_sums();
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (sums[i] != Rational(1)) {
            failures.push_back({{"reason", "column sum"}, {"state", k2d::io::to_json(k.grid()[i])}, {"sum", sums[i].str()}});
        }
    }
    json doc = k2d::io::to_json(k);
    if (kp.interior() && n <= 6) {
        const auto pi = k2d::stationary_distribution(k);
        json pij = json::array();
        for (const auto &v : pi) {
            pij.push_back(v.str());
        }
        const auto fit = k2d::fit_eta(pi, n);
        doc["stationary"] = pij;
        doc["eta_fit"] = {{"trinomial", fit.trinomial},
                          {"degenerate", fit.degenerate},
                          {"eta1", fit.eta1.str()},
                          {"eta2", fit.eta2.str()}};
    } else if (kp.interior()) {
        doc["stationary"] = k2d::stationary_distribution_float(k);
    }
    if (n <= 12) {
        json spectrum = json::array();
        for (const auto &z : k2d::spectrum_float(k)) {
            spectrum.push_back({z.real(), z.imag()});
        }
        doc["spectrum"] = spectrum;
    }
    if (o.calibrate) {
        if (auto pair = k2d::calibrate(kp)) {
            doc["calibration"] = calibration_document(*pair, failures);
        } else {
            doc["calibration"] = nullptr;
            failures.push_back({{"reason", "kernel has no rational single-die spectrum or is outside the open region"}});
        }
    }
    doc["failures"] = failures;
    const bool failed = !failures.empty();
    if (format == Format::json) {
        return {dump(doc), failed};
    }
    std::vector<std::string> cells;
    for (std::size_t r = 0; r < k.size(); ++r) {
        for (std::size_t c = 0; c < k.size(); ++c) {
            cells.push_back(k.at_index(r, c).str());
        }
    }
    return {"rows: destination state, columns: source state\n" + matrix_table(k.grid(), cells) +
                failures_table(failures),
            failed};
}

// ---------------------------------------------------------------- transform

void check_pair(json &failures, json &checks, const std::string &name, GridPoint m, GridPoint x, const Rational &lhs,
                const Rational &rhs) {
    checks.push_back({{"identity", name}, {"m", k2d::io::to_json(m)}, {"x", k2d::io::to_json(x)},
                      {"lhs", lhs.str()}, {"rhs", rhs.str()}});
    if (lhs != rhs) {
        failures.push_back(checks.back());
    }
}

Outcome run_transform(const Options &o, Format format) {
    require_exact(o);
    const int n = require_n(o);
    const ParameterSet ps = parameter_set(o);
    if (o.m.empty() != o.x.empty()) {
        usage("transform takes both --m and --x, or neither for the full grid");
    }
    std::vector<std::pair<GridPoint, GridPoint>> pairs;
    const k2d::TriangularGrid grid(n);
    if (!o.m.empty()) {
        pairs.emplace_back(parse_point(o.m, "--m"), parse_point(o.x, "--x"));
    } else {
        for (const auto m : grid) {
            for (const auto x : grid) {
                pairs.emplace_back(m, x);
            }
        }
    }
    const Rational one(1);
    const bool v_pivot = ps.v1() != one && ps.v2() != one;
    const bool u_pivot = ps.u1() != one && ps.u2() != one;
    json checks = json::array();
    json failures = json::array();
    for (const auto &[m, x] : pairs) {
        const k2d::F12Arguments args{m, x, n, ps.u1(), ps.v1(), ps.u2(), ps.v2()};
        if (v_pivot) {
            const auto [l, r] = k2d::pfaff_transform(args, k2d::PfaffVariant::pivot_v);
            check_pair(failures, checks, "pfaff_pivot_v", m, x, l, r);
        }
        if (u_pivot) {
            const auto [l, r] = k2d::pfaff_transform(args, k2d::PfaffVariant::pivot_u);
            check_pair(failures, checks, "pfaff_pivot_u", m, x, l, r);
        }
        const auto [l, r] = k2d::reflection_transform(args);
        check_pair(failures, checks, "reflection", m, x, l, r);
        const auto one_var = k2d::reflection_transform_2f1(m.a, x.a, n, ps.u1());
        check_pair(failures, checks, "reflection_2f1_m", {m.a, 0}, {x.a, 0}, one_var.lhs, one_var.rhs_m);
        check_pair(failures, checks, "reflection_2f1_x", {m.a, 0}, {x.a, 0}, one_var.lhs, one_var.rhs_x);
    }
    const bool failed = !failures.empty();
    switch (format) {
        case Format::json:
            return {dump({{"N", n}, {"params", k2d::io::to_json(ps)}, {"checks", checks}, {"failures", failures}}),
                    failed};
        case Format::csv: {
            std::string out = "identity,m1,m2,x1,x2,lhs,rhs\n";
            for (const auto &c : checks) {
                out += c["identity"].get<std::string>() + "," + std::to_string(c["m"][0].get<int>()) + "," +
                       std::to_string(c["m"][1].get<int>()) + "," + std::to_string(c["x"][0].get<int>()) + "," +
                       std::to_string(c["x"][1].get<int>()) + "," + c["lhs"].get<std::string>() + "," +
                       c["rhs"].get<std::string>() + "\n";
            }
            return {out, failed};
        }
        case Format::table:
            return {"checks: " + std::to_string(checks.size()) + "\n" + failures_table(failures), failed};
    }
    return {};
}

// ---------------------------------------------------------------- params

Outcome run_params(const Options &o, Format format) {
    require_exact(o);
    const ParameterSet ps = parameter_set(o);
    json doc = k2d::io::to_json(ps);
    json residuals = json::array();
    for (const auto &r : k2d::orthogonality_residuals(ps)) {
        residuals.push_back(r.str());
    }
    doc["orthogonality_residuals"] = residuals;
    try {
        doc["cone_residual"] = k2d::cone_residual(ps).str();
    } catch (const Error &) {
        doc["cone_residual"] = nullptr;
    }
    if (ps.source() && !ps.source()->delta().is_zero()) {
        const auto c = k2d::coefficients(*ps.source());
        doc["recurrence"] = {{"cA", c.cA.str()}, {"cB", c.cB.str()}, {"cC", c.cC.str()}, {"cD", c.cD.str()}};
    } else {
        doc["recurrence"] = nullptr;
    }
    switch (format) {
        case Format::json:
            return {dump(doc)};
        case Format::csv:
        case Format::table: {
            std::vector<std::vector<std::string>> rows;
            for (const auto &[key, value] : doc.items()) {
                rows.push_back({key, value.is_string() ? value.get<std::string>() : value.dump()});
            }
            if (format == Format::table) {
                return {text_grid({"field", "value"}, rows)};
            }
            std::string out = "field,value\n";
            for (const auto &r : rows) {
                std::string quoted;
                for (char ch : r[1]) {
                    quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                }
                out += r[0] + ",\"" + quoted + "\"\n";
            }
            return {out};
        }
    }
    return {};
}

Outcome dispatch(const Options &o) {
    const Format format = parse_format(o.format);
    if (o.mode != "exact" && o.mode != "float") {
        usage("--mode must be exact or float");
    }
    if (o.command == "eval") {
        return run_eval(o, format);
    }
    if (o.command == "gram") {
        return run_gram(o, format);
    }
    if (o.command == "norms") {
        return run_norms(o, format);
    }
    if (o.command == "recurrence") {
        return run_recurrence(o, format);
    }
    if (o.command == "identity") {
        return run_identity(o, format);
    }
    if (o.command == "kernel") {
        return run_kernel(o, format);
    }
    if (o.command == "transform") {
        return run_transform(o, format);
    }
    return run_params(o, format);
}

void add_common(CLI::App *sub, Options &o) {
    sub->add_option("--p", o.p, "p-quadruple, e.g. 1,2,3,4 or 1/2,3,5/7,4");
    sub->add_option("--uv", o.uv, "explicit u1,v1,u2,v2 (use with --eta)");
    sub->add_option("--eta", o.eta, "explicit eta1,eta2 (use with --uv)");
    sub->add_option("--N", o.N, "grid size");
    sub->add_option("--m", o.m, "spectral label m1,m2");
    sub->add_option("--x", o.x, "state x1,x2");
    sub->add_option("--n", o.m, "alias of --m");
    sub->add_option("--format", o.format, "json | csv | table");
    sub->add_option("--mode", o.mode, "exact | float");
    sub->add_option("--seed", o.seed, "seed for --panel");
    sub->add_option("--panel-size", o.panel_size, "random quadruples (or kernels) in --panel");
    sub->add_flag("--panel", o.panel, "run the randomized panel");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Exact bivariate Krawtchouk polynomials: evaluation and verification"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"eval", "evaluate P_m(x), or the whole table"},
        {"gram", "Gram matrix (or --dual) with off-diagonal check"},
        {"norms", "squared norms by brute force and closed forms"},
        {"recurrence", "five-term recurrence over every grid pair"},
        {"identity", "first-order differential identity residuals"},
        {"kernel", "poker-dice kernel, stationary law, spectrum, calibration"},
        {"transform", "transformation identities on the grid"},
        {"params", "parameter set, residuals, dual weights, coefficients"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        add_common(sub, o);
        if (name == "gram") {
            sub->add_flag("--dual", o.dual, "dual Gram matrix over spectral labels");
        }
        if (name == "kernel") {
            sub->add_option("--kernel", o.kernel, "alpha1,alpha2,beta1,beta2");
            sub->add_flag("--calibrate", o.calibrate, "derive the diagonalizing family and run the ratio test");
        }
        sub->callback([&o, name = name] { o.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cout << dump({{"error", "USAGE"}, {"message", e.what()}});
        std::cerr << "k2d: " << e.what() << '\n';
        return 2;
    }
    try {
        const Outcome outcome = dispatch(o);
        std::cout << outcome.text;
        return outcome.failed ? 1 : 0;
    } catch (const Error &e) {
        std::cout << dump(k2d::io::to_json(e));
        std::cerr << "k2d: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cout << dump({{"error", "INTERNAL"}, {"message", e.what()}});
        std::cerr << "k2d: internal error: " << e.what() << '\n';
        return 3;
    }
}
