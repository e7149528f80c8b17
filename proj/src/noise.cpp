#include "rsqp/noise.hpp"

#include <cmath>

namespace rsqp {

namespace detail {

namespace {
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}
}  // namespace

double uniform_sym(uint64_t seed, uint64_t stream, uint64_t component) {
    uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (stream + 0xbf58476d1ce4e5b9ULL));
    h = mix64(h ^ (component + 0x94d049bb133111ebULL));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
    return 2.0 * u - 1.0;
}

}  // namespace detail

NoiseModel derive_eps(double eps1) {
    NoiseModel m;
    m.eps_f = eps1;
    m.eps_c = eps1;
    m.eps_g = std::sqrt(eps1);
    m.eps_J = std::sqrt(eps1);
    m.seed = 0;
    return m;
}

NoisyEvaluation noisy_eval(const NoiseModel& model, const Problem& p, const Vec& x,
                           uint64_t eval_index) {
    const Evaluation exact = eval_true(p, x);
    const int n = p.n, m = p.m;

    NoisyEvaluation e;
    e.eval_index = eval_index;
    e.f = exact.f;
    e.g = exact.g;
    e.c = exact.c;
    e.J = exact.J;

    // component layout: f = 0, c_i = 1+i, g_j = 1+m+j, J(j,i) = 1+m+n+j*m+i
    const uint64_t base_c = 1, base_g = 1 + static_cast<uint64_t>(m),
                   base_J = 1 + static_cast<uint64_t>(m) + static_cast<uint64_t>(n);
    if (model.eps_f > 0.0)
        e.f += model.eps_f * detail::uniform_sym(model.seed, eval_index, 0);
    if (model.eps_c > 0.0)
        for (int i = 0; i < m; ++i)
            e.c[i] += model.eps_c * detail::uniform_sym(model.seed, eval_index, base_c + i);
    if (model.eps_g > 0.0) {
        const double half = model.eps_g / std::sqrt(static_cast<double>(n));
        for (int j = 0; j < n; ++j)
            e.g[j] += half * detail::uniform_sym(model.seed, eval_index, base_g + j);
    }
    if (model.eps_J > 0.0) {
        const double half = model.eps_J / static_cast<double>(n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < m; ++i)
                e.J(j, i) += half * detail::uniform_sym(model.seed, eval_index,
                                                        base_J + static_cast<uint64_t>(j) * m + i);
    }
    return e;
}

}  // namespace rsqp
