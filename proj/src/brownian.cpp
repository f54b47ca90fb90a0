#include "truncmil/brownian.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "truncmil/rng.hpp"

namespace truncmil {

PathGrid::PathGrid(double t_end_, std::size_t steps_) : t_end(t_end_), steps(steps_) {
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("PathGrid: t_end must be positive and finite");
    if (steps == 0) throw std::invalid_argument("PathGrid: steps must be >= 1");
}

BrownianPath BrownianPath::sample(const PathGrid& grid, std::size_t noise_dim,
                                  std::uint64_t master_seed, std::uint64_t sample_index) {
    if (noise_dim == 0) throw std::invalid_argument("sample_path: noise_dim must be >= 1");
    if (grid.steps > std::numeric_limits<std::uint32_t>::max() ||
        sample_index > std::numeric_limits<std::uint32_t>::max() ||
        noise_dim > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("sample_path: counter field out of range");

    const double root_dt = std::sqrt(grid.step());
    auto data = std::make_shared<std::vector<double>>(grid.steps * noise_dim);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        for (std::size_t j = 0; j < noise_dim; ++j) {
            const double z = normal_draw(master_seed, static_cast<std::uint32_t>(k),
                                         static_cast<std::uint32_t>(j),
                                         static_cast<std::uint32_t>(sample_index), 0u);
            (*data)[k * noise_dim + j] = z * root_dt;
        }
    }

    BrownianPath p;
    p.grid_ = grid;
    p.noise_dim_ = noise_dim;
    p.seed_ = {master_seed, sample_index};
    p.finest_ = data;
    p.finest_steps_ = grid.steps;
    p.increments_ = *data;
    return p;
}

BrownianPath BrownianPath::coarsened(std::size_t factor) const {
    if (factor == 0 || (factor & (factor - 1)) != 0)
        throw std::invalid_argument("coarsen: factor must be a power of two");
    if (grid_.steps % factor != 0)
        throw std::invalid_argument("coarsen: factor must divide the step count");

    const std::size_t coarse_steps = grid_.steps / factor;
    const std::size_t group = finest_steps_ / coarse_steps;

    BrownianPath p;
    p.grid_ = PathGrid(grid_.t_end, coarse_steps);
    p.noise_dim_ = noise_dim_;
    p.seed_ = seed_;
    p.finest_ = finest_;
    p.finest_steps_ = finest_steps_;
    p.increments_.assign(coarse_steps * noise_dim_, 0.0);
    const std::vector<double>& fine = *finest_;
    for (std::size_t k = 0; k < coarse_steps; ++k) {
        for (std::size_t j = 0; j < noise_dim_; ++j) {
            double s = 0.0;
            for (std::size_t r = k * group; r < (k + 1) * group; ++r)
                s += fine[r * noise_dim_ + j];
            p.increments_[k * noise_dim_ + j] = s;
        }
    }
    return p;
}

double BrownianPath::total_displacement(std::size_t j) const {
    if (j >= noise_dim_) throw std::out_of_range("total_displacement: noise index");
    double s = 0.0;
    const std::vector<double>& fine = *finest_;
    for (std::size_t k = 0; k < finest_steps_; ++k) s += fine[k * noise_dim_ + j];
    return s;
}

namespace {

void put_le_double(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    os.write(buf, 8);
}

double get_le_double(std::istream& is) {
    char buf[8];
    is.read(buf, 8);
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

void BrownianPath::dump(std::ostream& os) const {
    const auto saved = os.precision(17);
    os << "truncmil-path " << grid_.t_end << ' ' << finest_steps_ << ' ' << noise_dim_
       << ' ' << seed_.master_seed << ' ' << seed_.sample_index << '\n';
    os.precision(saved);
    for (double v : *finest_) put_le_double(os, v);
}

BrownianPath BrownianPath::load(std::istream& is) {
    std::string tag;
    double t_end = 0.0;
    std::size_t steps = 0, m = 0;
    std::uint64_t seed = 0, index = 0;
    is >> tag >> t_end >> steps >> m >> seed >> index;
    if (!is || tag != "truncmil-path")
        throw std::runtime_error("BrownianPath::load: bad header");
    is.ignore(1); // header newline
    auto data = std::make_shared<std::vector<double>>(steps * m);
    for (double& v : *data) v = get_le_double(is);
    if (!is) throw std::runtime_error("BrownianPath::load: truncated body");

    BrownianPath p;
    p.grid_ = PathGrid(t_end, steps);
    p.noise_dim_ = m;
    p.seed_ = {seed, index};
    p.finest_ = data;
    p.finest_steps_ = steps;
    p.increments_ = *data;
    return p;
}

BrownianPath sample_path(const PathGrid& grid, std::size_t noise_dim,
                         std::uint64_t master_seed, std::uint64_t sample_index) {
    return BrownianPath::sample(grid, noise_dim, master_seed, sample_index);
}

BrownianPath coarsen(const BrownianPath& path, std::size_t factor) {
    return path.coarsened(factor);
}

} // namespace truncmil
