#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "dapc/error.hpp"
#include "dapc/numeric.hpp"
#include "dapc/parallel.hpp"

namespace dapc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::MissingField: return "missing-field";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::Placement: return "placement";
  }
  return "unknown";
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("PCD_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double stable_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  double compensation = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::abs(sum) >= std::abs(t)) {
      compensation += (sum - next) + t;
    } else {
      compensation += (t - next) + sum;
    }
    sum = next;
  }
  return sum + compensation;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return stable_sum({values.begin(), values.end()}) /
         static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean = stable_mean(values);
  std::vector<double> squares;
  squares.reserve(values.size());
  for (double v : values) squares.push_back((v - mean) * (v - mean));
  return std::sqrt(stable_sum(std::move(squares)) /
                   static_cast<double>(values.size()));
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace dapc
