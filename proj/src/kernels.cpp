#include "qrbf/kernels.hpp"

#include <cmath>
#include <sstream>

#include "qrbf/error.hpp"

namespace qrbf {

namespace {

double ipow(double base, int exponent) {
    double out = 1.0;
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidArgument(std::string("kernel parameter ") + name + " must be positive and finite");
    }
}

}  // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Gaussian: return "gaussian";
        case KernelFamily::Multiquadric: return "multiquadric";
        case KernelFamily::InverseMultiquadric: return "inverse-multiquadric";
        case KernelFamily::MaternC0: return "matern-c0";
        case KernelFamily::MaternC2: return "matern-c2";
        case KernelFamily::MaternC4: return "matern-c4";
        case KernelFamily::Wendland: return "wendland";
    }
    return "unknown";
}

KernelFamily family_from_string(std::string_view name) {
    for (auto family : {KernelFamily::Gaussian, KernelFamily::Multiquadric, KernelFamily::InverseMultiquadric,
                        KernelFamily::MaternC0, KernelFamily::MaternC2, KernelFamily::MaternC4,
                        KernelFamily::Wendland}) {
        if (to_string(family) == name) return family;
    }
    throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

bool is_tabulated(WendlandSpec spec) {
    switch (spec.dim) {
        case 1:
        case 5: return spec.smoothness == 0 || spec.smoothness == 2 || spec.smoothness == 4;
        case 3: return spec.smoothness == 0 || spec.smoothness == 2 || spec.smoothness == 4 || spec.smoothness == 6;
        default: return false;
    }
}

double wendland_profile(WendlandSpec spec, double r) {
    const double s = cutoff(1.0 - r);
    if (s == 0.0) return 0.0;
    switch (spec.dim) {
        case 1:
            switch (spec.smoothness) {
                case 0: return s;
                case 2: return ipow(s, 3) * (3.0 * r + 1.0);
                case 4: return ipow(s, 5) * (8.0 * r * r + 5.0 * r + 1.0);
                default: break;
            }
            break;
        case 3:
            switch (spec.smoothness) {
                case 0: return ipow(s, 2);
                case 2: return ipow(s, 4) * (4.0 * r + 1.0);
                case 4: return ipow(s, 6) * (35.0 * r * r + 18.0 * r + 3.0);
                case 6: return ipow(s, 8) * (32.0 * r * r * r + 25.0 * r * r + 8.0 * r + 1.0);
                default: break;
            }
            break;
        case 5:
            switch (spec.smoothness) {
                case 0: return ipow(s, 3);
                case 2: return ipow(s, 5) * (5.0 * r + 1.0);
                case 4: return ipow(s, 7) * (16.0 * r * r + 7.0 * r + 1.0);
                default: break;
            }
            break;
        default: break;
    }
    throw InvalidArgument("no Wendland function for d=" + std::to_string(spec.dim) + ", C" +
                          std::to_string(spec.smoothness));
}

Kernel Kernel::gaussian_sigma(double sigma) {
    require_positive(sigma, "sigma");
    Kernel k;
    k.family_ = KernelFamily::Gaussian;
    k.sigma_ = sigma;
    k.eta_ = 1.0 / (sigma * std::sqrt(2.0));
    return k;
}

Kernel Kernel::gaussian_eta(double eta) {
    require_positive(eta, "eta");
    Kernel k;
    k.family_ = KernelFamily::Gaussian;
    k.eta_ = eta;
    k.sigma_ = std::sqrt(1.0 / (2.0 * eta * eta));
    return k;
}

#define QRBF_GLOBAL_FACTORY(name, fam)     \
    Kernel Kernel::name(double eta) {      \
        require_positive(eta, "eta");      \
        Kernel k;                          \
        k.family_ = KernelFamily::fam;     \
        k.eta_ = eta;                      \
        return k;                          \
    }

QRBF_GLOBAL_FACTORY(multiquadric, Multiquadric)
QRBF_GLOBAL_FACTORY(inverse_multiquadric, InverseMultiquadric)
QRBF_GLOBAL_FACTORY(matern_c0, MaternC0)
QRBF_GLOBAL_FACTORY(matern_c2, MaternC2)
QRBF_GLOBAL_FACTORY(matern_c4, MaternC4)

#undef QRBF_GLOBAL_FACTORY

Kernel Kernel::wendland(WendlandSpec spec, double alpha) {
    require_positive(alpha, "alpha");
    if (!is_tabulated(spec)) {
        throw InvalidArgument("no Wendland function for d=" + std::to_string(spec.dim) + ", C" +
                              std::to_string(spec.smoothness));
    }
    Kernel k;
    k.family_ = KernelFamily::Wendland;
    k.alpha_ = alpha;
    k.wendland_ = spec;
    return k;
}

double Kernel::operator()(double r) const {
    if (!(r >= 0.0)) throw InvalidArgument("kernel radius must be nonnegative");
    const double er = eta_ * r;
    switch (family_) {
        case KernelFamily::Gaussian: return std::exp(-r * r / (2.0 * sigma_ * sigma_));
        case KernelFamily::Multiquadric: return std::sqrt(1.0 + er * er);
        case KernelFamily::InverseMultiquadric: return 1.0 / std::sqrt(1.0 + er * er);
        case KernelFamily::MaternC0: return std::exp(-er);
        case KernelFamily::MaternC2: return std::exp(-er) * (1.0 + er);
        case KernelFamily::MaternC4: return std::exp(-er) * (3.0 + 3.0 * er + er * er);
        case KernelFamily::Wendland: {
            const double scaled = r / alpha_;
            if (scaled > 1.0) return 0.0;
            return wendland_profile(wendland_, scaled);
        }
    }
    return 0.0;
}

std::string Kernel::describe() const {
    std::ostringstream out;
    out << to_string(family_);
    if (family_ == KernelFamily::Gaussian) {
        out << "(sigma=" << sigma_ << ")";
    } else if (family_ == KernelFamily::Wendland) {
        out << "(d=" << wendland_.dim << ",C" << wendland_.smoothness << ",alpha=" << alpha_ << ")";
    } else {
        out << "(eta=" << eta_ << ")";
    }
    return out.str();
}

}  // namespace qrbf
