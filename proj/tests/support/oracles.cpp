#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace normstance::testkit {

double oracle_pearson(const std::vector<std::vector<double>>& table) {
    const std::size_t r = table.size(), c = table[0].size();
    double total = 0.0;
    std::vector<double> rows(r, 0.0), cols(c, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            rows[i] += table[i][j];
            cols[j] += table[i][j];
            total += table[i][j];
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double e = rows[i] * cols[j] / total;
            stat += (table[i][j] - e) * (table[i][j] - e) / e;
        }
    }
    return stat;
}

double oracle_chi_square_sf(double x, int dof) {
    const double h = x / 2.0;
    double sum = 0.0;
    if (dof % 2 == 0) {
        double term = 1.0;
        for (int k = 0; k < dof / 2; ++k) {
            sum += term;
            term *= h / (k + 1);
        }
        return std::exp(-h) * sum;
    }
    for (int k = 1; k <= (dof - 1) / 2; ++k) sum += std::pow(h, k - 0.5) / std::tgamma(k + 0.5);
    return std::erfc(std::sqrt(h)) + std::exp(-h) * sum;
}

double oracle_u(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a) {
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    }
    return u;
}

double oracle_mann_whitney_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size(), na = a.size();
    const double observed = oracle_u(a, b);

    double below = 0.0, above = 0.0, all = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
        const double u = oracle_u(x, y);
        all += 1.0;
        if (u <= observed + 1e-9) below += 1.0;
        if (u >= observed - 1e-9) above += 1.0;
    }
    return std::min(1.0, 2.0 * std::min(below, above) / all);
}

double oracle_mcnemar_p(std::size_t b, std::size_t c) {
    const std::size_t n = b + c;
    if (n == 0) return 1.0;
    const std::size_t k = std::min(b, c);
    double hits = 0.0;
    for (unsigned long long mask = 0; mask < (1ull << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) <= k) hits += 1.0;
    }
    return std::min(1.0, 2.0 * hits / std::ldexp(1.0, static_cast<int>(n)));
}

double oracle_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> alphabet(a.begin(), a.end());
    alphabet.insert(b.begin(), b.end());
    std::map<std::pair<std::string, std::string>, double> cell;
    for (std::size_t i = 0; i < a.size(); ++i) cell[{a[i], b[i]}] += 1.0;
    const double n = static_cast<double>(a.size());
    double po = 0.0, pe = 0.0;
    for (const auto& x : alphabet) {
        double row = 0.0, col = 0.0;
        for (const auto& y : alphabet) {
            row += cell[{x, y}];
            col += cell[{y, x}];
        }
        po += cell[{x, x}] / n;
        pe += (row / n) * (col / n);
    }
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

}  // namespace normstance::testkit
