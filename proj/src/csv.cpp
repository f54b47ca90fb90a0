#include "truncmil/csv.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace truncmil {

std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_errors_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "scheme,delta,error,stderr,samples,excluded\n";
    for (const ErrorRow& row : report.rows) {
        os << scheme_name(row.scheme) << ',' << format_double(row.delta) << ','
           << format_double(row.error) << ',' << format_double(row.std_error) << ','
           << row.samples << ',' << row.excluded << '\n';
    }
}

void write_slopes_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "scheme,slope,intercept,conf_halfwidth,points,degenerate\n";
    for (const SlopeFit& fit : report.fits) {
        os << scheme_name(fit.scheme) << ',' << format_double(fit.slope) << ','
           << format_double(fit.intercept) << ',' << format_double(fit.half_width) << ','
           << fit.points << ',' << (fit.degenerate ? 1 : 0) << '\n';
    }
}

void write_moments_csv(std::ostream& os, const MomentTable& table) {
    os << "p,delta,sup_moment,samples,excluded\n";
    for (const MomentRow& row : table.rows) {
        os << format_double(row.p) << ',' << format_double(row.delta) << ','
           << format_double(row.sup_moment) << ',' << row.samples << ',' << row.excluded
           << '\n';
    }
}

void write_moment_trend_csv(std::ostream& os, const MomentTable& table) {
    os << "p,slope,intercept\n";
    for (const MomentTrend& trend : table.trends) {
        os << format_double(trend.p) << ',' << format_double(trend.slope) << ','
           << format_double(trend.intercept) << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const std::vector<Trajectory>& trajectories) {
    std::size_t d = 1;
    for (const Trajectory& t : trajectories) d = std::max(d, t.state_dim);
    os << "scheme,t";
    for (std::size_t i = 1; i <= d; ++i) os << ",y" << i;
    os << ",finite\n";
    for (const Trajectory& traj : trajectories) {
        const double dt = traj.grid.step();
        for (std::size_t k = 0; k < traj.rows(); ++k) {
            os << scheme_name(traj.scheme) << ',' << format_double(dt * static_cast<double>(k));
            const auto row = traj.state(k);
            for (std::size_t i = 0; i < d; ++i)
                os << ',' << (i < row.size() ? format_double(row[i]) : std::string());
            const bool finite = !(traj.blow_up_index && *traj.blow_up_index == k);
            os << ',' << (finite ? 1 : 0) << '\n';
        }
    }
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

} // namespace truncmil
