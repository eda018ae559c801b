#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

namespace otrp {

// Deterministic pseudo-random source with explicit distributions, so equal
// seeds reproduce identical streams on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // inclusive range
    int uniform_int(int lo, int hi) {
        return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::VectorXd normal_vec(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    // uniform over the interior of the unit n-ball
    Eigen::VectorXd in_unit_ball(int n) {
        Eigen::VectorXd v = normal_vec(n);
        const double nv = v.norm();
        if (nv < 1e-300) return Eigen::VectorXd::Zero(n);
        return v * (std::pow(uniform(), 1.0 / n) / nv);
    }

    Eigen::VectorXd on_unit_sphere(int n) {
        Eigen::VectorXd v = normal_vec(n);
        const double nv = v.norm();
        if (nv < 1e-300) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e(0) = 1.0;
            return e;
        }
        return v / nv;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace otrp
