#pragma once

// Deterministic random sampling on all-right complexes.
//
// Every statistical check in the library runs through this module so that
// results are reproducible: work is split into a fixed number of chunks,
// each chunk draws from its own generator seeded only by (seed, chunk
// index), and chunk results are merged in chunk order. The thread count
// (CONESMITH_THREADS, default: hardware concurrency) can never change an
// outcome, only the wall time.

#include <cstdint>
#include <functional>
#include <random>

#include "conesmith/complexes.hpp"

namespace conesmith {

// Surface measure of the unit k-sphere (2 for k = 0, 2*pi for k = 1, ...).
double sphere_volume(int k);

// Area of a single all-right k-simplex: one of the 2^{k+1} orthant pieces
// of the unit k-sphere.
double all_right_simplex_area(int k);

class Sampler {
 public:
  explicit Sampler(uint64_t seed) : rng_(seed) {}

  double uniform();   // [0, 1)
  double gaussian();  // standard normal
  // Index into `weights` with probability proportional to the weight.
  int pick_weighted(const std::vector<double>& weights);

  // Uniform point of one simplex: componentwise |gaussian|, normalized.
  SimplexPoint point_in_simplex(const AllRightComplex& P, int simplex);
  // Area-weighted uniform point of the whole complex, drawn on a maximal
  // simplex (faces have measure zero).
  SimplexPoint point(const AllRightComplex& P);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline constexpr int kSampleChunks = 64;

// Seed for one chunk, derived only from the base seed and the chunk index.
uint64_t chunk_seed(uint64_t seed, int chunk);

// Worker count: CONESMITH_THREADS when set to a positive integer, otherwise
// the hardware concurrency.
int configured_thread_count();

// Splits `total` draws into kSampleChunks nearly equal chunks and calls
// fn(chunk, count, chunk_seed) for each, possibly in parallel. fn must touch
// only per-chunk state; merging in chunk index order is the caller's job.
void run_chunked(long long total, uint64_t seed,
                 const std::function<void(int chunk, long long count,
                                          uint64_t chunk_seed)>& fn);

}  // namespace conesmith
