#include "optbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace optbench {

namespace {

double normal_sf(double z)
{
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// Exact null tail P(U >= u) for sample sizes n, m without ties, from the
// standard recurrence f(i,j,u) = f(i-1,j,u-j) + f(i,j-1,u): the largest
// remaining value is either an a (beating all j b's) or a b.
double exact_u_tail(int n, int m, double u_obs)
{
    const int umax = n * m;
    const auto U = static_cast<std::size_t>(umax) + 1;
    std::vector<std::vector<std::vector<double>>> f(
        static_cast<std::size_t>(n) + 1,
        std::vector<std::vector<double>>(static_cast<std::size_t>(m) + 1,
                                         std::vector<double>(U, 0.0)));
    for (int j = 0; j <= m; ++j)
        f[0][static_cast<std::size_t>(j)][0] = 1.0;
    for (int i = 0; i <= n; ++i)
        f[static_cast<std::size_t>(i)][0][0] = 1.0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j)
            for (int u = 0; u <= i * j; ++u) {
                double c = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) - 1]
                            [static_cast<std::size_t>(u)];
                if (u >= j)
                    c += f[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(j)]
                          [static_cast<std::size_t>(u - j)];
                f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                 [static_cast<std::size_t>(u)] = c;
            }
    double total = 0.0, tail = 0.0;
    for (int u = 0; u <= umax; ++u) {
        const double c =
            f[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)][static_cast<std::size_t>(u)];
        total += c;
        if (static_cast<double>(u) >= u_obs)
            tail += c;
    }
    return tail / total;
}

} // namespace

MannWhitneyResult mann_whitney_greater(std::span<const double> a, std::span<const double> b)
{
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (n < 1 || m < 1)
        throw std::invalid_argument("mann_whitney_greater: empty sample");

    MannWhitneyResult res;
    double u = 0.0;
    bool any_tie = false;
    for (double x : a)
        for (double y : b) {
            if (x > y)
                u += 1.0;
            else if (x == y) {
                u += 0.5;
                any_tie = true;
            }
        }
    res.u = u;
    res.ties = any_tie;

    // identical samples are a degenerate case: no evidence either way
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa == sb) {
        res.p = 0.5;
        res.ties = true;
        return res;
    }

    if (!any_tie && n <= 20 && m <= 20) {
        res.p = exact_u_tail(n, m, u);
        res.exact = true;
        return res;
    }

    // tie-corrected normal approximation with continuity correction
    const double N = n + m;
    std::map<double, int> tally;
    for (double x : a)
        ++tally[x];
    for (double y : b)
        ++tally[y];
    double tie_term = 0.0;
    for (const auto& [value, t] : tally) {
        (void)value;
        tie_term += static_cast<double>(t) * t * t - t;
    }
    const double mu = n * static_cast<double>(m) / 2.0;
    const double var =
        (n * static_cast<double>(m) / 12.0) * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (var <= 0.0) {
        res.p = 0.5;
        res.ties = true;
        return res;
    }
    const double z = (u - mu - 0.5) / std::sqrt(var);
    res.p = normal_sf(z);
    return res;
}

} // namespace optbench
