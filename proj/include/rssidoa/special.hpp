#pragma once

namespace rssidoa {

/// ln I_nu(z) for nu >= -1/2 and z >= 0, without overflow for large z.
///
/// Uses the ascending series summed outward from its largest term, switching
/// to the large-argument Hankel expansion once z dominates nu^2. Returns
/// -infinity where I_nu(z) == 0 (z == 0, nu > 0).
double log_bessel_i(double nu, double z);

}  // namespace rssidoa
