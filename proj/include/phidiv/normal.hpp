#pragma once

namespace phidiv {

/// Standard normal cdf, survival function, density.
double norm_cdf(double x);
double norm_sf(double x);
double norm_pdf(double x);

/// Inverse standard normal cdf, accurate to ~1e-15 relative in the argument
/// (rational approximation refined by Newton steps against norm_cdf).
/// Throws std::domain_error for p outside (0,1).
double norm_quantile(double p);

}  // namespace phidiv
