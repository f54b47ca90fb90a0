#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "truncmil/experiments.hpp"

namespace truncmil {

/// Shortest round-trip decimal form, '.' decimal point, locale-free.
std::string format_double(double v);

/// errors.csv: scheme,delta,error,stderr,samples,excluded
void write_errors_csv(std::ostream& os, const ConvergenceReport& report);
/// slopes.csv: scheme,slope,intercept,conf_halfwidth,points,degenerate
void write_slopes_csv(std::ostream& os, const ConvergenceReport& report);
/// moments.csv: p,delta,sup_moment,samples,excluded
void write_moments_csv(std::ostream& os, const MomentTable& table);
/// moments_trend.csv: p,slope,intercept
void write_moment_trend_csv(std::ostream& os, const MomentTable& table);
/// trajectory.csv: scheme,t,y1..yd,finite  (rows stop at a blow-up)
void write_trajectory_csv(std::ostream& os, const std::vector<Trajectory>& trajectories);

/// FNV-1a 64-bit over a byte string, as 16 hex digits.
std::string fnv1a64_hex(const std::string& bytes);

} // namespace truncmil
