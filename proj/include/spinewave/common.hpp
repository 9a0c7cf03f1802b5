#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spinewave {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Error taxonomy. Everything user-facing derives from error so the CLI can
// split "bad input" (validation_error) from "runtime gave up" (the rest).
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct validation_error : error {
    using error::error;
};
struct dimension_error : validation_error {
    using validation_error::validation_error;
};
struct duplicate_point_error : validation_error {
    using validation_error::validation_error;
};
struct divergence_error : error {
    using error::error;
};
struct insufficient_data_error : error {
    using error::error;
};
struct conditioning_error : error {
    using error::error;
};
struct fit_error : error {
    using error::error;
};
struct bend_limit_error : validation_error {
    using validation_error::validation_error;
};
struct no_equilibrium_error : error {
    using error::error;
};
struct solver_error : error {
    using error::error;
};
struct io_error : error {
    using error::error;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// One master seed fans out into named sub-streams so components draw from
// independent sequences and consume order never leaks between them.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t s = master ^ fnv1a64(stream);
    splitmix64(s);
    s ^= 0x6a09e667f3bcc909ull + index * 0x9e3779b97f4a7c15ull;
    return splitmix64(s);
}

// Draw mapping is hand-rolled (not std::*_distribution) so streams are
// identical across standard library implementations.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Box-Muller, spare cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = u01();
        double u2 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(u01() * static_cast<double>(n)) % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Latin hypercube in [0,1)^dim: each column is a shuffled set of strata with
// one uniform draw per cell.
inline Eigen::MatrixXd lhs_sample(int n, int dim, RngStream& rng) {
    if (n < 1 || dim < 1)
        throw validation_error("lhs_sample: n and dim must be positive");
    Eigen::MatrixXd out(n, dim);
    std::vector<int> perm(n);
    for (int d = 0; d < dim; ++d) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        for (int i = 0; i < n; ++i)
            out(i, d) = (perm[i] + rng.u01()) / static_cast<double>(n);
    }
    return out;
}

// %.*g formatting for CSV output; 17 significant digits round-trips exactly.
inline std::string fmt_g(double v, int sig) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig, v);
    return buf;
}

}  // namespace spinewave
