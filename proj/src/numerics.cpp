#include "cheapsvrg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace cheapsvrg {

IndexSet::IndexSet(std::vector<std::size_t> indices, std::size_t bound)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("IndexSet: duplicate index");
  }
  if (!indices_.empty() && indices_.back() >= bound) {
    throw std::invalid_argument("IndexSet: index " + std::to_string(indices_.back()) +
                                " out of range [0, " + std::to_string(bound) + ")");
  }
}

IndexSet IndexSet::range(std::size_t n) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return IndexSet(std::move(all), n);
}

bool IndexSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

IndexSet IndexSet::complement(std::size_t bound) const {
  std::vector<std::size_t> rest;
  rest.reserve(bound > size() ? bound - size() : 0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < bound; ++i) {
    if (k < indices_.size() && indices_[k] == i) {
      ++k;
    } else {
      rest.push_back(i);
    }
  }
  return IndexSet(std::move(rest), bound);
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t packed = (a << 32) ^ (b & 0xffffffffULL) ^ ((b >> 32) * kGolden);
  return mix64(master + mix64(packed));
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& word : state_) {
    x += kGolden;
    word = mix64(x);
  }
}

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
  // Reject the low (2^64 mod bound) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

IndexSet sample_subset(std::size_t n, std::size_t s, SeededRng& rng) {
  if (s > n) {
    throw std::invalid_argument("sample_subset: s = " + std::to_string(s) +
                                " exceeds n = " + std::to_string(n));
  }
  std::vector<std::size_t> chosen(s);
  if (4 * s < n) {
    // Same swap sequence as the dense shuffle, with untouched slots implicit.
    std::unordered_map<std::size_t, std::size_t> moved;
    moved.reserve(2 * s);
    auto at = [&](std::size_t k) {
      auto it = moved.find(k);
      return it == moved.end() ? k : it->second;
    };
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t r = j + static_cast<std::size_t>(rng.uniform_index(n - j));
      const std::size_t vj = at(j);
      const std::size_t vr = at(r);
      moved[j] = vr;
      moved[r] = vj;
      chosen[j] = vr;
    }
  } else {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t r = j + static_cast<std::size_t>(rng.uniform_index(n - j));
      std::swap(pool[j], pool[r]);
      chosen[j] = pool[j];
    }
  }
  return IndexSet(std::move(chosen), n);
}

SpectralExtremes spectral_extremes(const Matrix& x) {
  if (x.size() == 0) throw std::invalid_argument("spectral_extremes: empty matrix");
  const Eigen::MatrixXd dense = x;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const Vector& sv = svd.singularValues();  // descending
  const double sigma_max = sv(0);
  if (!(sigma_max > 0.0)) {
    throw std::invalid_argument("spectral_extremes: zero matrix has no positive singular value");
  }
  const double cutoff = static_cast<double>(std::max(x.rows(), x.cols())) *
                        std::numeric_limits<double>::epsilon() * sigma_max;
  double sigma_min = sigma_max;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) {
      sigma_min = sv(k);
      ++rank;
    }
  }
  return {sigma_max, sigma_min, rank};
}

}  // namespace cheapsvrg
