#pragma once

#include <string>

#include "nscert/field.hpp"

namespace nscert {

// Field snapshot file: magic "NSCF", format version u32, n u32, L f64,
// time f64, component count u32, then per component the little-endian f64
// (re,im) pairs in row-major half-spectrum wavevector order.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const SpectralVelocityField& f);
SpectralVelocityField read_velocity_snapshot(const std::string& path);

void write_snapshot(const std::string& path, const ScalarField& f, double time);
ScalarField read_scalar_snapshot(const std::string& path);

} // namespace nscert
