#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bpn {

using Count = boost::multiprecision::cpp_int;

/// Finitely supported map from symbols to positive counts.
/// The empty multiset is the monoidal unit; entries with count zero are
/// normalized away so structural equality coincides with multiset equality.
class Multiset {
 public:
  using Map = std::map<std::string, Count>;

  Multiset() = default;

  explicit Multiset(Map entries) : entries_(std::move(entries)) {
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (it->second == 0) {
        it = entries_.erase(it);
      } else if (it->second < 0) {
        throw std::invalid_argument("multiset count must be non-negative: " + it->first);
      } else {
        ++it;
      }
    }
  }

  static Multiset single(const std::string& sym, Count n = 1) {
    Map m;
    if (n != 0) m.emplace(sym, std::move(n));
    return Multiset(std::move(m));
  }

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  Count count(const std::string& sym) const {
    auto it = entries_.find(sym);
    return it == entries_.end() ? Count(0) : it->second;
  }

  bool contains(const std::string& sym) const { return entries_.count(sym) > 0; }

  /// Total number of tokens (sum of all counts).
  Count total() const {
    Count t = 0;
    for (const auto& [_, n] : entries_) t += n;
    return t;
  }

  Count max_count() const {
    Count m = 0;
    for (const auto& [_, n] : entries_)
      if (n > m) m = n;
    return m;
  }

  void add(const std::string& sym, const Count& n = 1) {
    if (n == 0) return;
    auto [it, inserted] = entries_.emplace(sym, n);
    if (!inserted) it->second += n;
    if (it->second == 0) entries_.erase(it);
    else if (it->second < 0) throw std::invalid_argument("multiset count went negative: " + sym);
  }

  bool operator==(const Multiset& other) const { return entries_ == other.entries_; }
  bool operator!=(const Multiset& other) const { return entries_ != other.entries_; }
  bool operator<(const Multiset& other) const { return entries_ < other.entries_; }

  /// Textual form `{sym:count, ...}` with symbols sorted.
  std::string str() const {
    std::ostringstream oss;
    oss << '{';
    bool first = true;
    for (const auto& [sym, n] : entries_) {
      if (!first) oss << ',';
      first = false;
      oss << sym << ':' << n;
    }
    oss << '}';
    return oss.str();
  }

 private:
  Map entries_;
};

/// Pointwise sum; commutative and associative with the empty multiset as unit.
inline Multiset sum(const Multiset& a, const Multiset& b) {
  Multiset::Map m = a.entries();
  for (const auto& [sym, n] : b.entries()) {
    auto [it, inserted] = m.emplace(sym, n);
    if (!inserted) it->second += n;
  }
  return Multiset(std::move(m));
}

inline Multiset operator+(const Multiset& a, const Multiset& b) { return sum(a, b); }

/// True iff a <= b pointwise.
inline bool leq(const Multiset& a, const Multiset& b) {
  for (const auto& [sym, n] : a.entries())
    if (b.count(sym) < n) return false;
  return true;
}

/// Pointwise difference, defined iff b <= a pointwise.
inline std::optional<Multiset> diff(const Multiset& a, const Multiset& b) {
  if (!leq(b, a)) return std::nullopt;
  Multiset::Map m = a.entries();
  for (const auto& [sym, n] : b.entries()) {
    auto it = m.find(sym);
    it->second -= n;
    if (it->second == 0) m.erase(it);
  }
  return Multiset(std::move(m));
}

/// Scalar multiple (k >= 0).
inline Multiset scale(const Multiset& a, const Count& k) {
  if (k < 0) throw std::invalid_argument("negative multiset scale");
  Multiset::Map m;
  if (k != 0)
    for (const auto& [sym, n] : a.entries()) m.emplace(sym, n * k);
  return Multiset(std::move(m));
}

/// Parses the textual form `{sym:count, ...}`. Whitespace is allowed around
/// tokens. Throws std::invalid_argument with a position on malformed input.
inline Multiset parse_multiset(const std::string& text) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("multiset parse error at position " + std::to_string(i) + ": " + why);
  };
  skip_ws();
  if (i >= text.size() || text[i] != '{') fail("expected '{'");
  ++i;
  Multiset::Map m;
  skip_ws();
  if (i < text.size() && text[i] == '}') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      std::size_t start = i;
      while (i < text.size() && text[i] != ':' && text[i] != ',' && text[i] != '}' &&
             !std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      if (start == i) fail("expected symbol");
      std::string sym = text.substr(start, i - start);
      skip_ws();
      Count n = 1;
      if (i < text.size() && text[i] == ':') {
        ++i;
        skip_ws();
        std::size_t nstart = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (nstart == i) fail("expected count");
        n = Count(text.substr(nstart, i - nstart));
      }
      auto [it, inserted] = m.emplace(sym, n);
      if (!inserted) it->second += n;
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '}') {
        ++i;
        break;
      }
      fail("expected ',' or '}'");
    }
  }
  skip_ws();
  if (i != text.size()) fail("trailing input");
  return Multiset(std::move(m));
}

}  // namespace bpn
