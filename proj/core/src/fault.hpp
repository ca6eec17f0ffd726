#pragma once

namespace papevo::detail {

// Multiplies the heat kernel prefactor; 1 except under selftest fault injection.
double kernel_constant_scale();
void set_kernel_constant_scale(double s);

}  // namespace papevo::detail
