#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "zeromode/linalg.hpp"

namespace zeromode {

/// Seeded generator with hand-rolled distributions. std:: distributions are
/// implementation-defined sequences; reproducibility across toolchains needs
/// the mapping from raw bits to doubles pinned here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::vector<double> point(int dim, double scale) {
        std::vector<double> x(dim);
        for (double& c : x) c = scale * normal();
        return x;
    }

    std::vector<Complex> spinor(int n) {
        std::vector<Complex> v(n);
        for (Complex& z : v) z = Complex(normal(), normal());
        return v;
    }

    std::vector<Complex> unit_spinor(int n) {
        std::vector<Complex> v = spinor(n);
        double s = 0.0;
        for (const Complex& z : v) s += std::norm(z);
        s = std::sqrt(s);
        for (Complex& z : v) z /= s;
        return v;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace zeromode
