#pragma once

#include "vforge/construction.hpp"
#include "vforge/seed.hpp"

namespace tfix {

using namespace vforge;

/* Reference construction, spec defaults N=5, eps=beta1=1/128. */
inline const ConstructionParams& ref_params() {
    static const ConstructionParams p = derive_params(5, 1.0 / 128, 1.0 / 128, (1.0 / 128) * (1.0 / 128) / 2.0);
    return p;
}

inline const ConstructionState& ref_state_depth2() {
    static const ConstructionState st = build_construction(ref_params(), 2);
    return st;
}

inline const ConstructionState& ref_state_depth3() {
    static const ConstructionState st = build_construction(ref_params(), 3);
    return st;
}

inline const SeedFunction& exp_seed_fixture() {
    static const SeedFunction s = exp_seed(20.0);
    return s;
}

inline const SeedConstants& exp_constants_fixture() {
    static const SeedConstants sc = estimate_constants(exp_seed_fixture());
    return sc;
}

/* Auxiliary state compatible with the bi-Lipschitz hypothesis eps <= eta/(2 pi). */
inline const ConstructionState& bilip_state_depth2() {
    static const ConstructionState st = [] {
        const SeedConstants& sc = exp_constants_fixture();
        double eps = 0.9 * sc.eta / (2.0 * kPi);
        double beta1 = 1.0 / 128;
        return build_construction(derive_params(5, eps, beta1, eps * beta1 / 2.0), 2);
    }();
    return st;
}

/* Auxiliary state inside the certified valence range beta1 <= 4 beta1_rec. */
inline const ConstructionState& valence_state_depth2() {
    static const ConstructionState st = [] {
        const SeedConstants& sc = exp_constants_fixture();
        double eps = sc.eps_rec();
        double beta1 = sc.beta1_rec();
        return build_construction(derive_params(5, eps, beta1, eps * beta1 / 2.0), 2);
    }();
    return st;
}

} // namespace tfix
