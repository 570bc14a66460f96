#include "bvmlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bvmlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_hash(std::string_view label, std::initializer_list<std::uint64_t> parts) {
  // FNV-1a over the label, then SplitMix64 chaining over the integer parts.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(seed ^ splitmix64(stream_id))) {}

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  // Marsaglia polar method; the second variate is discarded to keep the
  // stream stateless beyond the engine.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0 && rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw std::domain_error("gamma: shape and rate must be positive and finite");
  }
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    // squeeze
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double RngStream::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

std::vector<double> RngStream::dirichlet(std::span<const double> alpha) {
  if (alpha.empty()) throw std::domain_error("dirichlet: empty concentration vector");
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = gamma(alpha[k], 1.0);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

std::size_t RngStream::categorical(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return probs.size() - 1;
}

std::vector<double> gamma_sampler(double shape, double rate, std::size_t count, RngStream& rng) {
  std::vector<double> out(count);
  for (double& v : out) v = rng.gamma(shape, rate);
  return out;
}

std::vector<double> normal_sampler(double mean, double sd, std::size_t count, RngStream& rng) {
  if (!(sd > 0.0)) throw std::domain_error("normal_sampler: sd must be positive");
  std::vector<double> out(count);
  for (double& v : out) v = mean + sd * rng.normal();
  return out;
}

std::vector<double> dirichlet_sampler(std::span<const double> alpha, std::size_t count,
                                      RngStream& rng) {
  for (double a : alpha) {
    if (!(a > 0.0)) throw std::domain_error("dirichlet_sampler: concentrations must be positive");
  }
  std::vector<double> out;
  out.reserve(count * alpha.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto row = rng.dirichlet(alpha);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace bvmlab
