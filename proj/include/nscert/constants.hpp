#pragma once

namespace nscert {

// Tunable absolute constants of the certification machinery. The theorems
// only assert their existence; candidates live here, every report embeds
// the values used. A zero mu1/mu2 means "derive from the step geometry"
// (mu1 = 4/theta^2, mu2 = 2N/(kappa^2 theta rho)).
struct CertificationConstants {
    double C = 1.0;      // generic constant in the growth coefficients
    double C0 = 0.05;    // local existence window T = C0 ||u0||_inf^-2
    double C1 = 0.1;     // corollary threshold prefactor
    double C2 = 1.0;     // corollary exponent factor
    double delta1 = 0.1; // global criterion prefactor
    double mu1 = 0.0;    // global criterion rate (0 = auto)
    double delta2 = 0.1; // local criterion prefactor (audit record)
    double mu2 = 0.0;    // local criterion rate (0 = auto; underflows at
                         // desk scale, recorded for audit only)
    double eps0 = 0.01;  // eps-regularity smallness threshold
    double Cbar = 2.05;  // sup-norm constant of the eps-regularity bound, > 2
    double Ctilde_global = 2.0; // conclusion factor of the global route
};

} // namespace nscert
