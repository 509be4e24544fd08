#pragma once

#include <string>

#include "nscert/field.hpp"

namespace nscert {

// Initial-data generators for the scenario registry. Random fields are
// seed-deterministic: modes are drawn with a hand-rolled Box-Muller on top
// of mt19937_64 so results do not depend on the standard library's
// distribution internals.
struct Scenario {
    enum class Kind { TaylorGreen, TaylorGreen3D, SingleMode, RandomBand, File };
    std::string id;
    Kind kind = Kind::TaylorGreen;
    std::uint64_t seed = 1;
    int kmax = 4;
    double amplitude = 1.0;
    std::string path; // for Kind::File

    static Scenario parse(const std::string& id);
};

// (sin x cos y, -cos x sin y, 0): exact NSE solution decaying as exp(-2t)
SpectralVelocityField taylor_green(const Grid& g);
// (sin x cos y cos z, -cos x sin y cos z, 0): genuinely 3D dynamics
SpectralVelocityField taylor_green_3d(const Grid& g);
// (0, sin x, 0)
SpectralVelocityField single_mode(const Grid& g);
// Leray-projected seeded Gaussian modes with |k| <= kmax, sup norm scaled
// to `amplitude`
SpectralVelocityField random_band(const Grid& g, std::uint64_t seed, int kmax, double amplitude);

SpectralVelocityField generate_initial_data(const Scenario& s, const Grid& g);

} // namespace nscert
