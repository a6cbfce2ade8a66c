#pragma once

#include <array>
#include <cstdint>

#include "rsense/linalg.hpp"

namespace rsense {

// Counter-based generator (Philox4x32-10). A stream is addressed by
// (seed, stream_id): identical pairs replay the identical draw sequence on any
// platform, and distinct stream_ids give independent sequences, so Monte Carlo
// trials can be farmed out with stream_id = trial index and still reproduce
// bitwise regardless of scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller (second draw of each pair is cached).
  double gaussian();
  double gaussian(double mu, double sigma);

  // Laplacian with mean mu and *variance* sigma^2 (scale sigma/sqrt(2)),
  // via inverse CDF.
  double laplacian(double mu, double sigma);

  Vector gaussian_vector(Eigen::Index len, double mu = 0.0, double sigma = 1.0);
  Vector laplacian_vector(Eigen::Index len, double mu, double sigma);
  // Filled in row-major order (fixed draw order is part of the contract).
  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rsense
