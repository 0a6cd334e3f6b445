#pragma once

// Shifted covariant Laplacian solves used to precondition the flow.

#include "vortex/matrix_field.hpp"
#include "vortex/system_config.hpp"
#include "vortex/vortex_model.hpp"

namespace vortex {

// Solves (shift - Delta_m) x = f for a charge-m field with the same finite
// volume operator as covariant_laplacian: FFT in longitude, then one
// tridiagonal solve in colatitude per Fourier mode. shift > 0.
ComplexField shifted_laplacian_solve(const ComplexField& f, int charge, double shift, const SphereGrid& g,
                                     Exec exec = Exec::serial);

// Applies the solve to every entry of a Hermitian endomorphism field; the
// result is Hermitian.
MatrixField precondition(const MatrixField& X, const SplitSystemConfig& cfg, double shift, const SphereGrid& g,
                         Exec exec = Exec::parallel);

} // namespace vortex
