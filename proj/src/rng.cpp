#include "rsense/rng.hpp"

#include <cmath>

namespace rsense {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
         static_cast<std::uint32_t>(p0)};
  key[0] += kWeyl0;
  key[1] += kWeyl1;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_id_(stream_id) {}

void RngStream::refill() {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_),
      static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_),
      static_cast<std::uint32_t>(stream_id_ >> 32)};
  std::array<std::uint32_t, 2> key = key_;
  for (int round = 0; round < 10; ++round) philox_round(ctr, key);
  buf_ = ctr;
  pos_ = 0;
  ++block_;
}

std::uint32_t RngStream::next_u32() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 on (0,1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

double RngStream::gaussian(double mu, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian: sigma must be positive");
  return mu + sigma * gaussian();
}

double RngStream::laplacian(double mu, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("laplacian: sigma must be positive");
  const double scale = sigma / std::sqrt(2.0);  // variance = sigma^2
  // u strictly inside (0,1), keeping both logs finite.
  const double u =
      (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  const double centered = u - 0.5;
  const double mag = -scale * std::log(1.0 - 2.0 * std::abs(centered));
  return mu + (centered < 0.0 ? -mag : mag);
}

Vector RngStream::gaussian_vector(Eigen::Index len, double mu, double sigma) {
  Vector v(len);
  for (Eigen::Index i = 0; i < len; ++i) v(i) = mu + sigma * gaussian();
  return v;
}

Vector RngStream::laplacian_vector(Eigen::Index len, double mu, double sigma) {
  Vector v(len);
  for (Eigen::Index i = 0; i < len; ++i) v(i) = laplacian(mu, sigma);
  return v;
}

Matrix RngStream::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = gaussian();
  return M;
}

}  // namespace rsense
