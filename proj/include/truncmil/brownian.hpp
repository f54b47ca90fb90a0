#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace truncmil {

/// Uniform time mesh 0 = t_0 < t_1 < ... < t_N = T with t_k = k*step.
struct PathGrid {
    double t_end = 1.0;
    std::size_t steps = 1;

    PathGrid() = default;
    PathGrid(double t_end_, std::size_t steps_);

    double step() const { return t_end / static_cast<double>(steps); }

    friend bool operator==(const PathGrid&, const PathGrid&) = default;
};

struct SeedInfo {
    std::uint64_t master_seed = 0;
    std::uint64_t sample_index = 0;

    friend bool operator==(const SeedInfo&, const SeedInfo&) = default;
};

/// Brownian increments on a uniform grid, one column per noise dimension.
///
/// A path keeps the increments it was originally sampled with. Coarsening
/// returns a view-level path whose increments are group sums of those finest
/// increments, always summed left to right from the finest level. Coarsening
/// in stages therefore gives bit-identical results to coarsening in one go,
/// which is what couples the reference and coarse solutions in the strong
/// error experiments.
class BrownianPath {
public:
    /// Increment (k, j) is N(0, step) and depends only on
    /// (master_seed, sample_index, k, j) — never on evaluation order.
    static BrownianPath sample(const PathGrid& grid, std::size_t noise_dim,
                               std::uint64_t master_seed, std::uint64_t sample_index);

    /// Path on steps/factor steps; increment k is the left-to-right sum of the
    /// finest increments it covers. factor must be a power of two dividing steps.
    BrownianPath coarsened(std::size_t factor) const;

    const PathGrid& grid() const { return grid_; }
    std::size_t noise_dim() const { return noise_dim_; }
    const SeedInfo& seed_info() const { return seed_; }

    double increment(std::size_t k, std::size_t j) const {
        return increments_[k * noise_dim_ + j];
    }
    /// Row-major (k, j) view of the increments at this level.
    std::span<const double> increments() const { return increments_; }

    /// B^j(T): canonical left-to-right sum over the finest retained level,
    /// invariant under coarsening by construction.
    double total_displacement(std::size_t j) const;

    /// Binary dump: text header line "truncmil-path T N m seed index\n",
    /// then N*m little-endian doubles, row-major (k, j). Finest level only.
    void dump(std::ostream& os) const;
    static BrownianPath load(std::istream& is);

private:
    BrownianPath() = default;

    PathGrid grid_;
    std::size_t noise_dim_ = 1;
    SeedInfo seed_;
    std::shared_ptr<const std::vector<double>> finest_;
    std::size_t finest_steps_ = 0;
    std::vector<double> increments_;
};

/// Free-function spellings used by the drivers.
BrownianPath sample_path(const PathGrid& grid, std::size_t noise_dim,
                         std::uint64_t master_seed, std::uint64_t sample_index);
BrownianPath coarsen(const BrownianPath& path, std::size_t factor);

} // namespace truncmil
