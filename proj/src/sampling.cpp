#include "conesmith/sampling.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace conesmith {

double sphere_volume(int k) {
  // 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

double all_right_simplex_area(int k) {
  return sphere_volume(k) / std::pow(2.0, k + 1);
}

double Sampler::uniform() { return unit_(rng_); }

double Sampler::gaussian() { return normal_(rng_); }

int Sampler::pick_weighted(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    u -= weights[i];
    if (u <= 0.0) return i;
  }
  return static_cast<int>(weights.size()) - 1;
}

SimplexPoint Sampler::point_in_simplex(const AllRightComplex& P, int simplex) {
  const int n = P.simplex_dim(simplex) + 1;
  SimplexPoint x;
  x.simplex = simplex;
  x.dir = Eigen::VectorXd(n);
  do {
    for (int i = 0; i < n; ++i) x.dir[i] = std::abs(gaussian());
  } while (x.dir.norm() < 1e-12);
  x.dir.normalize();
  return x;
}

SimplexPoint Sampler::point(const AllRightComplex& P) {
  const std::vector<int>& maximal = P.maximal_simplices();
  if (maximal.empty()) throw std::invalid_argument("complex has no simplices");
  std::vector<double> weights;
  for (int id : maximal)
    weights.push_back(all_right_simplex_area(P.simplex_dim(id)));
  return point_in_simplex(P, maximal[pick_weighted(weights)]);
}

uint64_t chunk_seed(uint64_t seed, int chunk) {
  // splitmix64 over a stride of the base seed
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(chunk + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int configured_thread_count() {
  if (const char* env = std::getenv("CONESMITH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void run_chunked(long long total, uint64_t seed,
                 const std::function<void(int chunk, long long count,
                                          uint64_t chunk_seed)>& fn) {
  const long long base = total / kSampleChunks;
  const long long rem = total % kSampleChunks;
  auto chunk_count = [&](int i) { return base + (i < rem ? 1 : 0); };

  const int workers =
      std::max(1, std::min(configured_thread_count(), kSampleChunks));
  if (workers == 1) {
    for (int i = 0; i < kSampleChunks; ++i)
      fn(i, chunk_count(i), chunk_seed(seed, i));
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < kSampleChunks;
           i = next.fetch_add(1))
        fn(i, chunk_count(i), chunk_seed(seed, i));
    });
  for (std::thread& t : pool) t.join();
}

}  // namespace conesmith
