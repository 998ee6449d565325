#pragma once

#include <vector>

#include "allocbench/idea.hpp"
#include "allocbench/rng.hpp"
#include "allocbench/types.hpp"

namespace allocbench {

// A D-dimensional 0-1 ball with exactly f populated dimensions.
struct MdBall {
  int dims = 1;
  std::vector<int> populated;  // sorted, |populated| = f
};

// Per-bin multidimensional state for the public md_gap contract.
struct MdBinState {
  std::vector<int> dim_loads;
  double est_avg = 0.0;
};

// Flat n x D per-dimension load matrix kept alongside the scalar state.
struct MdLoads {
  long n = 0;
  int dims = 1;
  std::vector<int> loads;  // bin-major

  void reset(long n_, int dims_) {
    n = n_;
    dims = dims_;
    loads.assign((size_t)n_ * (size_t)dims_, 0);
  }
  int& at(int bin, int dim) { return loads[(size_t)bin * (size_t)dims + (size_t)dim]; }
  int at(int bin, int dim) const { return loads[(size_t)bin * (size_t)dims + (size_t)dim]; }
  void place(int bin, const MdBall& ball) {
    for (int q : ball.populated) ++at(bin, q);
  }
  double max_dimension_gap(long balls_thrown, int populated) const;
  double max_dimension_gap(long balls_thrown, const std::vector<double>& marginals) const;
  std::vector<MdBinState> to_bin_states(const std::vector<BinState>& scalar) const;
};

// Uniform draw over all C(D,f) populated-dimension subsets.
MdBall generate_md_ball(int dims, int populated, Stream& rng);

// Variant-aware draw: uniform f-subsets, or the custom categorical law
// (one real01 draw against cumulative weights).
MdBall generate_md_ball(const Variant& variant, Stream& rng);

// Max over dimensions a of (max over bins of dim load - avg(a)) with the
// analytic per-dimension average balls_thrown*f/(n*D).
double md_gap(const std::vector<MdBinState>& bins, long balls_thrown, int dims, int populated);

// One multidimensional ball, allocated on the scalar reduction: the retry
// loop and placement read sum(dim_loads) - est_avg, the destination gains
// one unit in each populated dimension, and candidate estimates grow by f/d
// with the cap level scaled to f * ceil(j/n).
AllocationOutcome allocate_md_ball(SystemState& state, MdLoads& loads, long ball_index,
                                   const MdBall& ball, const RngContract& rng,
                                   const SimConfig& cfg);

}  // namespace allocbench
