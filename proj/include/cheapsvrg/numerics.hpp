#ifndef CHEAPSVRG_NUMERICS_HPP
#define CHEAPSVRG_NUMERICS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cheapsvrg {

using Vector = Eigen::VectorXd;
/// Sample-major storage: row i holds x_i^T, so an (n x p) matrix.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sorted, duplicate-free indices into [0, n).
class IndexSet {
 public:
  IndexSet() = default;
  /// Sorts and validates; throws std::invalid_argument on duplicates or
  /// entries >= bound.
  IndexSet(std::vector<std::size_t> indices, std::size_t bound);

  static IndexSet range(std::size_t n);

  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  bool contains(std::size_t i) const;

  /// Complement within [0, bound).
  IndexSet complement(std::size_t bound) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// xoshiro256** seeded through splitmix64.
///
/// State expansion: s[k] = splitmix64 step k (k = 0..3) starting from the
/// seed, with splitmix64 increment 0x9e3779b97f4a7c15 and finalizer
/// multipliers 0xbf58476d1ce4e5b9, 0x94d049bb133111eb. The output stream is
/// a pure function of the seed on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, bound) by rejection (no modulo bias).
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached and returned by the next call.
  double normal();

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);
/// Deterministic seed for (master, a, b); distinct (a, b) pairs give
/// distinct seeds for a fixed master (the map is a bijection of a 64-bit
/// packing of a and b when both fit in 32 bits).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Uniform size-s subset of [0, n) by partial Fisher-Yates: for j < s,
/// swap position j with j + uniform_index(n - j), one accepted draw per
/// element. Large n with small s uses a sparse swap table with identical output.
/// Throws std::invalid_argument when s > n.
IndexSet sample_subset(std::size_t n, std::size_t s, SeededRng& rng);

struct SpectralExtremes {
  double sigma_max;
  double sigma_min;  ///< smallest strictly positive singular value
  std::size_t rank;  ///< number of singular values above the cutoff
};

/// Largest and smallest strictly positive singular values. Computed by a
/// bidiagonalizing divide-and-conquer SVD; values below
/// max(rows, cols) * eps * sigma_max are treated as zero.
/// Throws std::invalid_argument for an empty or all-zero matrix.
SpectralExtremes spectral_extremes(const Matrix& x);

}  // namespace cheapsvrg

#endif  // CHEAPSVRG_NUMERICS_HPP
