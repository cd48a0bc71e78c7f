#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coconet/error.hpp"
#include "coconet/rng.hpp"

namespace coconet {

enum class Status : std::uint8_t {
  Bankrupt = 0,
  Converting = 1,
  Healthy = 2,
};

inline char status_char(Status s) {
  switch (s) {
    case Status::Bankrupt: return 'B';
    case Status::Converting: return 'C';
    case Status::Healthy: return 'H';
  }
  return '?';
}

/// Assignment of every bank to exactly one of bankrupt / converting /
/// healthy. Stored per bank, so disjointness and cover hold by
/// construction. Bank indices are 0-based throughout the library; the CLI
/// converts to 1-based on input and output.
class Partition {
 public:
  Partition() = default;  // empty; placeholder before assignment

  explicit Partition(std::vector<Status> statuses) : st_(std::move(statuses)) {}

  static Partition uniform(int n, Status s) {
    return Partition(std::vector<Status>(static_cast<std::size_t>(n), s));
  }

  /// Decode a ternary partition index: bank i holds digit i (base 3, bank 0
  /// least significant), digit values B=0, C=1, H=2. Index 0 is all-bankrupt,
  /// 3^n - 1 is all-healthy. This ordering fixes every deterministic
  /// enumeration in the library.
  static Partition from_index(int n, long code) {
    std::vector<Status> st(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      st[static_cast<std::size_t>(i)] = static_cast<Status>(code % 3);
      code /= 3;
    }
    return Partition(std::move(st));
  }

  /// Build from explicit index sets, validating that they are disjoint and
  /// cover {0, ..., n-1}.
  static Partition from_sets(int n, const std::vector<int>& bankrupt,
                             const std::vector<int>& converting,
                             const std::vector<int>& healthy) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    std::vector<Status> st(static_cast<std::size_t>(n), Status::Bankrupt);
    auto place = [&](const std::vector<int>& banks, Status s) {
      for (int i : banks) {
        if (i < 0 || i >= n)
          throw SolverError(ErrorCode::DimensionMismatch,
                            "bank index " + std::to_string(i) + " out of range for n=" +
                                std::to_string(n));
        if (seen[static_cast<std::size_t>(i)]++)
          throw SolverError(ErrorCode::DimensionMismatch,
                            "bank " + std::to_string(i) + " assigned to two statuses");
        st[static_cast<std::size_t>(i)] = s;
      }
    };
    place(bankrupt, Status::Bankrupt);
    place(converting, Status::Converting);
    place(healthy, Status::Healthy);
    for (int i = 0; i < n; ++i)
      if (!seen[static_cast<std::size_t>(i)])
        throw SolverError(ErrorCode::DimensionMismatch,
                          "bank " + std::to_string(i) + " not assigned a status");
    return Partition(std::move(st));
  }

  int size() const { return static_cast<int>(st_.size()); }

  Status status(int i) const { return st_[static_cast<std::size_t>(i)]; }

  std::vector<int> bankrupt() const { return collect(Status::Bankrupt); }
  std::vector<int> converting() const { return collect(Status::Converting); }
  std::vector<int> healthy() const { return collect(Status::Healthy); }

  int count(Status s) const {
    int k = 0;
    for (Status t : st_) k += (t == s);
    return k;
  }

  /// Healthy banks as a bitmask (bank i -> bit i). Requires n <= 32.
  std::uint32_t healthy_mask() const {
    std::uint32_t mask = 0;
    for (int i = 0; i < size(); ++i)
      if (status(i) == Status::Healthy) mask |= (1u << i);
    return mask;
  }

  long index() const {
    long code = 0;
    for (int i = size() - 1; i >= 0; --i)
      code = code * 3 + static_cast<long>(st_[static_cast<std::size_t>(i)]);
    return code;
  }

  /// One character per bank, e.g. "CH" for bank 1 converting, bank 2 healthy.
  std::string label() const {
    std::string out;
    out.reserve(st_.size());
    for (Status s : st_) out.push_back(status_char(s));
    return out;
  }

  bool operator==(const Partition& other) const { return st_ == other.st_; }
  bool operator!=(const Partition& other) const { return !(*this == other); }

 private:
  std::vector<int> collect(Status s) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (status(i) == s) out.push_back(i);
    return out;
  }

  std::vector<Status> st_;
};

inline long partition_count(int n) {
  long k = 1;
  for (int i = 0; i < n; ++i) k *= 3;
  return k;
}

inline Partition random_partition(Rng& rng, int n) {
  std::vector<Status> st(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) st[static_cast<std::size_t>(i)] = static_cast<Status>(rng.below(3));
  return Partition(std::move(st));
}

}  // namespace coconet
