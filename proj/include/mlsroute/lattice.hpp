#pragma once

// Security labels for multilevel-secure routing: hierarchical levels, category
// sets over a registered universe, dominance, and the scalar policy functions
// used by admission (lev, cat), flow control (orig) and conflict scoring (conf).

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mlsroute {

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when two category sets are drawn from different universes.
class UniverseMismatch : public LatticeError {
 public:
  UniverseMismatch() : LatticeError("category sets belong to different universes") {}
};

/// Hierarchical security rank; 1 is the lowest.
class SecurityLevel {
 public:
  constexpr SecurityLevel() = default;
  constexpr explicit SecurityLevel(int value) : value_(value) {
    if (value < 1) throw LatticeError("security level must be >= 1");
  }

  [[nodiscard]] constexpr int value() const noexcept { return value_; }

  friend constexpr auto operator<=>(SecurityLevel, SecurityLevel) = default;

 private:
  int value_ = 1;
};

inline const std::vector<std::string>& default_level_names() {
  static const std::vector<std::string> names{"Public", "Confidential", "Secret", "TopSecret"};
  return names;
}

enum class ObjectMode { Provider, Receiver, Both };

inline std::string_view to_string(ObjectMode mode) {
  switch (mode) {
    case ObjectMode::Provider: return "provider";
    case ObjectMode::Receiver: return "receiver";
    case ObjectMode::Both: return "both";
  }
  return "provider";
}

inline ObjectMode parse_object_mode(std::string_view text) {
  if (text == "provider") return ObjectMode::Provider;
  if (text == "receiver") return ObjectMode::Receiver;
  if (text == "both") return ObjectMode::Both;
  throw LatticeError("unknown object mode '" + std::string(text) + "'");
}

/// Ordered list of category names fixed for an engine instance. Sets over it
/// are indicator vectors, packed into a 64-bit mask.
class CategoryUniverse {
 public:
  static constexpr std::size_t kMaxCategories = 64;

  explicit CategoryUniverse(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxCategories) {
      throw LatticeError("category universe limited to 64 entries");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw LatticeError("empty category name");
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[j] == names_[i]) throw LatticeError("duplicate category '" + names_[i] + "'");
      }
    }
  }

  static std::shared_ptr<const CategoryUniverse> make(std::vector<std::string> names) {
    return std::make_shared<const CategoryUniverse>(std::move(names));
  }

  static const std::vector<std::string>& default_names() {
    static const std::vector<std::string> names{"ARP", "IP", "ICMP", "TCP", "UDP"};
    return names;
  }

  [[nodiscard]] std::size_t size() const noexcept { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const std::string& name(std::size_t index) const { return names_.at(index); }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::uint64_t full_mask() const noexcept {
    return names_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << names_.size()) - 1;
  }

  friend bool operator==(const CategoryUniverse& a, const CategoryUniverse& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
};

using UniversePtr = std::shared_ptr<const CategoryUniverse>;

class CategorySet {
 public:
  CategorySet() = default;
  explicit CategorySet(UniversePtr universe, std::uint64_t mask = 0)
      : universe_(std::move(universe)), mask_(mask) {
    if (!universe_) throw LatticeError("category set requires a universe");
    if ((mask_ & ~universe_->full_mask()) != 0) {
      throw LatticeError("category mask exceeds universe");
    }
  }

  static CategorySet from_names(UniversePtr universe, const std::vector<std::string>& names) {
    CategorySet set(std::move(universe));
    for (const auto& n : names) set.insert(n);
    return set;
  }

  void insert(std::string_view name) {
    const auto idx = universe_->index_of(name);
    if (!idx) throw LatticeError("unknown category '" + std::string(name) + "'");
    mask_ |= std::uint64_t{1} << *idx;
  }

  [[nodiscard]] bool contains(std::size_t index) const noexcept {
    return index < 64 && ((mask_ >> index) & 1U) != 0;
  }
  [[nodiscard]] bool contains(std::string_view name) const {
    const auto idx = universe_ ? universe_->index_of(name) : std::nullopt;
    return idx && contains(*idx);
  }

  /// The indicator lambda^c in {0, 1}.
  [[nodiscard]] int indicator(std::size_t index) const noexcept { return contains(index) ? 1 : 0; }

  [[nodiscard]] bool empty() const noexcept { return mask_ == 0; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
  [[nodiscard]] std::uint64_t mask() const noexcept { return mask_; }
  [[nodiscard]] const UniversePtr& universe() const noexcept { return universe_; }

  [[nodiscard]] bool same_universe(const CategorySet& other) const noexcept {
    if (universe_ == other.universe_) return true;
    return universe_ && other.universe_ && *universe_ == *other.universe_;
  }

  [[nodiscard]] bool is_subset_of(const CategorySet& other) const {
    require_same(other);
    return (mask_ & ~other.mask_) == 0;
  }
  [[nodiscard]] bool is_superset_of(const CategorySet& other) const { return other.is_subset_of(*this); }

  [[nodiscard]] CategorySet intersect(const CategorySet& other) const {
    require_same(other);
    return CategorySet(universe_, mask_ & other.mask_);
  }

  /// Member names in universe order.
  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (!universe_) return out;
    for (std::size_t i = 0; i < universe_->size(); ++i) {
      if (contains(i)) out.push_back(universe_->name(i));
    }
    return out;
  }

  friend bool operator==(const CategorySet& a, const CategorySet& b) {
    if (a.universe_ == nullptr || b.universe_ == nullptr) {
      return a.universe_ == b.universe_ && a.mask_ == b.mask_;
    }
    a.require_same(b);
    return a.mask_ == b.mask_;
  }

 private:
  void require_same(const CategorySet& other) const {
    if (!same_universe(other)) throw UniverseMismatch();
  }

  UniversePtr universe_;
  std::uint64_t mask_ = 0;
};

struct Label {
  SecurityLevel level;
  CategorySet categories;

  friend bool operator==(const Label&, const Label&) = default;
};

/// a >= b in the label lattice: higher-or-equal level and a category superset.
inline bool dominates(const Label& a, const Label& b) {
  return a.level >= b.level && a.categories.is_superset_of(b.categories);
}

enum class LabelOrder { Equal, Above, Below, Incomparable };

inline LabelOrder compare_labels(const Label& a, const Label& b) {
  const bool ab = dominates(a, b);
  const bool ba = dominates(b, a);
  if (ab && ba) return LabelOrder::Equal;
  if (ab) return LabelOrder::Above;
  if (ba) return LabelOrder::Below;
  return LabelOrder::Incomparable;
}

/// Level admission: 1 when the object's and subject's levels permit the mode.
inline int lev(SecurityLevel sigma_o, SecurityLevel sigma_s, ObjectMode mode) noexcept {
  switch (mode) {
    case ObjectMode::Provider: return sigma_o <= sigma_s ? 1 : 0;
    case ObjectMode::Receiver: return sigma_o >= sigma_s ? 1 : 0;
    case ObjectMode::Both: return sigma_o == sigma_s ? 1 : 0;
  }
  return 0;
}

/// Per-category admission term over indicators lambda_o, lambda_s in {0,1}.
inline int cat_term(int lambda_o, int lambda_s, ObjectMode mode) noexcept {
  switch (mode) {
    case ObjectMode::Provider: return 1 - (lambda_o - lambda_o * lambda_s);
    case ObjectMode::Receiver: return 1 - (lambda_s - lambda_s * lambda_o);
    case ObjectMode::Both: return 1 - (lambda_s - lambda_o) * (lambda_s - lambda_o);
  }
  return 0;
}

/// Category admission: 1 iff the per-category term is 1 for every category in the universe.
inline int cat(const CategorySet& c_o, const CategorySet& c_s, ObjectMode mode) {
  if (!c_o.same_universe(c_s)) throw UniverseMismatch();
  const std::size_t n = c_o.universe() ? c_o.universe()->size() : 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (cat_term(c_o.indicator(c), c_s.indicator(c), mode) != 1) return 0;
  }
  return 1;
}

/// Level of the node the information originates from.
inline SecurityLevel orig(SecurityLevel sigma_o, SecurityLevel sigma_s, ObjectMode mode) noexcept {
  return mode == ObjectMode::Receiver ? sigma_s : sigma_o;
}

/// Conflict severity of visiting a node at level sigma_j.
inline int conf(SecurityLevel sigma_o, SecurityLevel sigma_s, SecurityLevel sigma_j,
                ObjectMode mode) noexcept {
  const SecurityLevel origin = orig(sigma_o, sigma_s, mode);
  return sigma_j < origin ? origin.value() - sigma_j.value() : 0;
}

}  // namespace mlsroute
