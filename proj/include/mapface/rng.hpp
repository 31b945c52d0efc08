#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace mapface {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the j-th output is mix64(key + j * golden). A stream
// is identified by a 64-bit key, and substreams are derived by hashing
// (key, index), so trial i of a run seeded with s always sees the same numbers
// no matter which worker executes it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key = 0) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ ^ mix64(counter_));
  }

  Stream substream(std::uint64_t index) const {
    return Stream(mix64(key_ ^ mix64(index ^ 0xd1b54a32d192ed03ULL)));
  }

  // Uniform integer in [0, bound). Lemire's nearly-divisionless rejection.
  std::size_t below(std::size_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t b = bound;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * b;
    auto low = static_cast<std::uint64_t>(m);
    if (low < b) {
      const std::uint64_t threshold = (0 - b) % b;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * b;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// A source of uniform choices. Samplers take any type with
// `std::size_t below(std::size_t)`, so the same code path can be driven by a
// Stream or by ChoiceTreeWalker for exact enumeration of every outcome.
template <class C>
concept Chooser = requires(C c, std::size_t n) {
  { c.below(n) } -> std::convertible_to<std::size_t>;
};

// Drives a sampler through every leaf of its finite choice tree. Each call to
// run() replays the current prefix of choices and records the radix of every
// decision; next() advances to the following leaf in odometer order.
class ChoiceTreeWalker {
 public:
  std::size_t below(std::size_t bound) {
    if (depth_ == choices_.size()) {
      choices_.push_back(0);
      radices_.push_back(bound);
    } else if (radices_[depth_] != bound) {
      radices_[depth_] = bound;  // tree shape changed below a decision; clamp
      if (choices_[depth_] >= bound) choices_[depth_] = 0;
    }
    return bound == 0 ? 0 : choices_[depth_++];
  }

  // Probability weight of the leaf just replayed, as (numerator 1, denominator).
  // Returned as the product of radices, which fits 64 bits for small trees.
  unsigned __int128 leaf_denominator() const {
    unsigned __int128 d = 1;
    for (std::size_t i = 0; i < depth_; ++i) d *= radices_[i] == 0 ? 1 : radices_[i];
    return d;
  }

  std::span<const std::size_t> path() const { return {choices_.data(), depth_}; }

  // Prepare to replay; call before each run of the sampler.
  void rewind() { depth_ = 0; }

  // Move to the next leaf. Returns false once every leaf has been visited.
  bool next() {
    choices_.resize(depth_);
    radices_.resize(depth_);
    while (!choices_.empty()) {
      if (choices_.back() + 1 < radices_.back()) {
        ++choices_.back();
        return true;
      }
      choices_.pop_back();
      radices_.pop_back();
    }
    return false;
  }

 private:
  std::vector<std::size_t> choices_;
  std::vector<std::size_t> radices_;
  std::size_t depth_ = 0;
};

// Sattolo's single-cycle shuffle. If `items` holds 0..d-1 on entry, then on
// exit i -> items[i] is a single d-cycle, and each of the (d-1)! cycles comes
// from exactly one sequence of choices.
template <class T, Chooser C>
void single_cycle_shuffle(std::span<T> items, C& chooser) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = chooser.below(i - 1);
    std::swap(items[i - 1], items[j]);
  }
}

// A uniformly random cyclic permutation of 0..d-1, as a successor array.
template <Chooser C>
std::vector<int> random_cycle(std::size_t d, C& chooser) {
  std::vector<int> p(d);
  std::iota(p.begin(), p.end(), 0);
  single_cycle_shuffle(std::span<int>(p), chooser);
  return p;
}

}  // namespace mapface
