#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "episim/error.hpp"

namespace episim {

// Per-node external rates held in a complete binary sum tree.  Internal sums
// are recomputed from their children on every update, so an all-zero board
// has an exactly zero total.
class RateBoard {
 public:
  RateBoard() = default;
  explicit RateBoard(std::size_t n) { resize(n); }

  void resize(std::size_t n) {
    n_ = n;
    leaves_ = 1;
    while (leaves_ < n) leaves_ <<= 1;
    tree_.assign(2 * leaves_, 0.0);
    dirty_ = true;
  }

  std::size_t size() const noexcept { return n_; }

  double rate(std::size_t i) const noexcept { return tree_[leaves_ + i]; }
  double total() const noexcept { return tree_[1]; }

  void set(std::size_t i, double r) {
    if (!(r >= 0.0) || !std::isfinite(r))
      throw PolicyContractError("external rate for node " + std::to_string(i) + " must be finite and >= 0");
    std::size_t pos = leaves_ + i;
    if (tree_[pos] == r) return;
    tree_[pos] = r;
    for (pos >>= 1; pos >= 1; pos >>= 1) tree_[pos] = tree_[2 * pos] + tree_[2 * pos + 1];
    dirty_ = true;
  }

  void add(std::size_t i, double delta) { set(i, rate(i) + delta); }

  // Sets every node to the same rate in O(n).
  void fill(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw PolicyContractError("external rate must be finite and >= 0");
    std::fill(tree_.begin() + static_cast<std::ptrdiff_t>(leaves_),
              tree_.begin() + static_cast<std::ptrdiff_t>(leaves_ + n_), r);
    std::fill(tree_.begin() + static_cast<std::ptrdiff_t>(leaves_ + n_), tree_.end(), 0.0);
    for (std::size_t pos = leaves_ - 1; pos >= 1; --pos) tree_[pos] = tree_[2 * pos] + tree_[2 * pos + 1];
    dirty_ = true;
  }

  // Node whose cumulative-rate interval contains u * total(), u in (0, 1].
  std::size_t sample(double u) const noexcept {
    double target = u * total();
    std::size_t pos = 1;
    while (pos < leaves_) {
      const double left = tree_[2 * pos];
      if ((target <= left && left > 0.0) || tree_[2 * pos + 1] <= 0.0) {
        pos = 2 * pos;
      } else {
        target -= left;
        pos = 2 * pos + 1;
      }
    }
    return pos - leaves_;
  }

  // Set whenever a rate changed since the last clear_dirty().
  bool dirty() const noexcept { return dirty_; }
  void clear_dirty() noexcept { dirty_ = false; }

 private:
  std::size_t n_ = 0;
  std::size_t leaves_ = 1;
  std::vector<double> tree_{0.0, 0.0};
  bool dirty_ = false;
};

}  // namespace episim
