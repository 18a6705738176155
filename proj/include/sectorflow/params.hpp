#pragma once

#include <cmath>
#include <string>

#include "sectorflow/errors.hpp"

namespace sectorflow {

enum class Variant {
    MobileBaseline,          // mobile labour, symmetric preferences, no externalities
    MobileExternalities,     // mobile labour, productivity A0(i) * mu(i)^eta
    ImmobileLabour,          // labour locked at L(i); eta allowed
    NonSymmetricPreferences, // mobile labour, taste weights gamma(i)
};

const char* variant_name(Variant v);
Variant variant_from_string(const std::string& s);

// Structural parameters. rho = sigma*(1-beta)+beta is the composite exponent
// showing up throughout the equilibrium formulas.
struct ModelParams {
    double beta = 0.86;
    double sigma = 1.3144;
    double eta = 0.0;
    double n = 1.0;
    double c0 = 0.0;
    Variant variant = Variant::MobileBaseline;

    double rho() const { return sigma * (1.0 - beta) + beta; }
    bool mobile() const { return variant != Variant::ImmobileLabour; }

    // Throws config_error unless the parameters admit a well-posed economy:
    //   mobile variants:   eta*(sigma-1) - 1 < 0
    //   immobile labour:   (eta-beta)*(sigma-1) - 1 < 0
    // plus the common bounds and a nonzero gradient-flow prefactor 1-beta+eta.
    void validate() const;
};

inline void ModelParams::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw config_error("ModelParams: beta must lie in (0,1)");
    if (!(sigma > 0.0) || sigma == 1.0) throw config_error("ModelParams: sigma must be positive and != 1");
    if (!(n > 0.0)) throw config_error("ModelParams: n must be positive");
    if (!(c0 >= 0.0)) throw config_error("ModelParams: c0 must be non-negative");
    if (!std::isfinite(beta) || !std::isfinite(sigma) || !std::isfinite(eta) || !std::isfinite(n) || !std::isfinite(c0))
        throw config_error("ModelParams: parameters must be finite");
    if (variant == Variant::MobileBaseline && eta != 0.0)
        throw config_error("ModelParams: MobileBaseline requires eta = 0 (use MobileExternalities)");
    if (mobile()) {
        if (!(eta * (sigma - 1.0) - 1.0 < 0.0))
            throw config_error("ModelParams: ill-posed mobile economy, requires eta*(sigma-1) < 1");
    } else {
        if (!((eta - beta) * (sigma - 1.0) - 1.0 < 0.0))
            throw config_error("ModelParams: ill-posed immobile economy, requires (eta-beta)*(sigma-1) < 1");
    }
    if (std::fabs(1.0 - beta + eta) < 1e-12)
        throw config_error("ModelParams: gradient-flow prefactor 1-beta+eta vanishes");
}

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::MobileBaseline: return "MobileBaseline";
        case Variant::MobileExternalities: return "MobileExternalities";
        case Variant::ImmobileLabour: return "ImmobileLabour";
        case Variant::NonSymmetricPreferences: return "NonSymmetricPreferences";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "MobileBaseline" || s == "mobile") return Variant::MobileBaseline;
    if (s == "MobileExternalities" || s == "externalities") return Variant::MobileExternalities;
    if (s == "ImmobileLabour" || s == "immobile") return Variant::ImmobileLabour;
    if (s == "NonSymmetricPreferences" || s == "nonsymmetric") return Variant::NonSymmetricPreferences;
    throw config_error("unknown variant '" + s + "'");
}

} // namespace sectorflow
