#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace bvmlab {

/// Deterministic random stream keyed by (seed, stream_id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard, seeded with a SplitMix64 mix of both keys. All variate
/// transforms below are hand-written so the draws do not depend on the
/// standard library's distribution implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential(double rate);
  /// Gamma(shape, rate) via Marsaglia-Tsang, with the U^{1/a} boost for shape < 1.
  double gamma(double shape, double rate);
  double beta(double a, double b);
  std::vector<double> dirichlet(std::span<const double> alpha);
  /// Index drawn from a probability vector.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stable stream id from a label and integer coordinates.
std::uint64_t stream_hash(std::string_view label, std::initializer_list<std::uint64_t> parts);

/// Vector samplers; each throws std::domain_error on invalid parameters.
std::vector<double> gamma_sampler(double shape, double rate, std::size_t count, RngStream& rng);
std::vector<double> normal_sampler(double mean, double sd, std::size_t count, RngStream& rng);
/// Row-major count x alpha.size() matrix of Dirichlet draws.
std::vector<double> dirichlet_sampler(std::span<const double> alpha, std::size_t count,
                                      RngStream& rng);

}  // namespace bvmlab
