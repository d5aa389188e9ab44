#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace qrbf {

enum class KernelFamily {
    Gaussian,
    Multiquadric,
    InverseMultiquadric,
    MaternC0,
    MaternC2,
    MaternC4,
    Wendland,
};

[[nodiscard]] std::string_view to_string(KernelFamily family);
[[nodiscard]] KernelFamily family_from_string(std::string_view name);

/// Space dimension / smoothness pair selecting one Wendland function.
struct WendlandSpec {
    int dim = 3;
    int smoothness = 2;

    friend bool operator==(const WendlandSpec&, const WendlandSpec&) = default;
};

/// True when (dim, smoothness) is one of the ten tabulated minimal-degree
/// Wendland functions: d=1 with C0/C2/C4, d=3 with C0/C2/C4/C6, d=5 with C0/C2/C4.
[[nodiscard]] bool is_tabulated(WendlandSpec spec);

/// Radial profile phi with its shape parameters.
///
/// Global families are parameterized by eta; the Gaussian additionally keeps
/// sigma = sqrt(1/(2 eta^2)) and is evaluated as exp(-r^2 / (2 sigma^2)).
/// Wendland kernels are evaluated as phi(r / alpha) and vanish for r > alpha.
class Kernel {
public:
    static Kernel gaussian_sigma(double sigma);
    static Kernel gaussian_eta(double eta);
    static Kernel multiquadric(double eta);
    static Kernel inverse_multiquadric(double eta);
    static Kernel matern_c0(double eta);
    static Kernel matern_c2(double eta);
    static Kernel matern_c4(double eta);
    static Kernel wendland(WendlandSpec spec, double alpha);

    [[nodiscard]] KernelFamily family() const { return family_; }
    [[nodiscard]] double eta() const { return eta_; }
    [[nodiscard]] double sigma() const { return sigma_; }
    /// Support radius; +infinity for global families.
    [[nodiscard]] double support() const { return alpha_; }
    [[nodiscard]] WendlandSpec wendland_spec() const { return wendland_; }

    [[nodiscard]] bool is_compact() const { return family_ == KernelFamily::Wendland; }
    /// Every family except the multiquadric yields positive definite matrices.
    [[nodiscard]] bool is_positive_definite() const { return family_ != KernelFamily::Multiquadric; }

    /// phi(r) for global kernels, phi(r/alpha) for compact ones. Throws on r < 0.
    [[nodiscard]] double operator()(double r) const;
    /// Value at zero distance.
    [[nodiscard]] double at_zero() const { return (*this)(0.0); }

    [[nodiscard]] std::string describe() const;

private:
    Kernel() = default;

    KernelFamily family_ = KernelFamily::Gaussian;
    double eta_ = 1.0;
    double sigma_ = std::numeric_limits<double>::quiet_NaN();
    double alpha_ = std::numeric_limits<double>::infinity();
    WendlandSpec wendland_{};
};

/// w_+ : identity on nonnegative reals, zero otherwise.
[[nodiscard]] constexpr double cutoff(double w) { return w >= 0.0 ? w : 0.0; }

/// Unscaled Wendland profile on the unit support, ((1-r)_+)^l q(r).
[[nodiscard]] double wendland_profile(WendlandSpec spec, double r);

/// Convenience: eval(kernel, r) == kernel(r).
[[nodiscard]] inline double eval(const Kernel& kernel, double r) { return kernel(r); }

}  // namespace qrbf
