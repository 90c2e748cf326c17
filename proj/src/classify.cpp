#include "rank2geo/classify.hpp"

namespace rank2geo {

std::vector<Rat> alpha_constants(long long m) {
    if (m < 1) throw BadDimension("alpha coefficients need m >= 1");
    // Expand prod_{i=1}^m (y - (2i-1)^2) over y = x^2, ascending in y.
    std::vector<Rat> p{Rat(1)};
    for (long long i = 1; i <= m; ++i) {
        const long odd = static_cast<long>(2 * i - 1);
        const Rat root(odd * odd);
        std::vector<Rat> q(p.size() + 1, Rat(0));
        for (std::size_t k = 0; k < p.size(); ++k) {
            q[k + 1] += p[k];
            q[k] -= root * p[k];
        }
        p = std::move(q);
    }
    // p[k] is the y^k coefficient, so alpha_i = (-1)^i p[m-i].
    std::vector<Rat> alpha;
    alpha.reserve(static_cast<std::size_t>(m));
    for (long long i = 1; i <= m; ++i) {
        Rat v = p[static_cast<std::size_t>(m - i)];
        if (i % 2 == 1) v = -v;
        alpha.push_back(v);
    }
    return alpha;
}

}  // namespace rank2geo
