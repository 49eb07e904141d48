// Builds the family for p = (1,2,3,4), prints a few values and norms, and
// checks orthogonality and the recurrence at N = 3.

#include "k2d/k2d.hpp"

#include <iostream>

int main() {
    const auto p = k2d::PQuadruple::parse("1,2,3,4");
    const auto ps = k2d::from_p(p);
    std::cout << "u1=" << ps.u1() << " v1=" << ps.v1() << " u2=" << ps.u2() << " v2=" << ps.v2()
              << " eta1=" << ps.eta1() << " eta2=" << ps.eta2() << '\n';

    const int n = 3;
    const k2d::PolynomialTable table(ps, n);
    for (const auto x : table.grid()) {
        std::cout << "P_{1,1}(" << x.str() << ") = " << table.at({1, 1}, x) << '\n';
    }

    const auto g = k2d::gram(table);
    std::cout << "Gram diagonal: " << std::boolalpha << g.is_diagonal() << '\n';
    for (const auto m : g.grid()) {
        std::cout << "||P_" << m.str() << "||^2 = " << g.at(m, m) << "  closed form " << k2d::norm_closed_form(ps, n, m)
                  << '\n';
    }

    const auto report = k2d::verify_recurrence_full(p, n);
    std::cout << "recurrence: " << report.pairs_checked << " pairs, " << report.failures.size() << " failures\n";
    return g.is_diagonal() && report.failures.empty() ? 0 : 1;
}
