#pragma once

#include "fsiwave/error.hpp"

namespace fsiwave {

/// Lame constants of the linearly elastic solid, both strictly positive.
struct ElasticParams {
    double lambda1 = 1.0;
    double lambda2 = 1.0;

    void check() const {
        if (lambda1 <= 0 || lambda2 <= 0)
            throw InvalidArgument("ElasticParams: Lame constants must be > 0");
    }
};

/// Newtonian fluid viscosity.
struct FluidParams {
    double nu = 1.0;

    void check() const {
        if (nu <= 0) throw InvalidArgument("FluidParams: nu must be > 0");
    }
};

}  // namespace fsiwave
