#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "weilcat/weil.hpp"

namespace weilcat {

// Base-26 letters with a = 0; negative values carry a leading 'a'.
inline std::string encode_coefficient(const Int& n) {
  if (n == 0) return "a";
  Int m = abs(n);
  std::string digits;
  while (m > 0) {
    digits.insert(digits.begin(), static_cast<char>('a' + Int(m % 26).get_si()));
    m /= 26;
  }
  return n < 0 ? "a" + digits : digits;
}

// Malformed label text; `position` is the 0-based offset of the offending character.
struct LabelError : std::invalid_argument {
  std::size_t position;
  LabelError(const std::string& what, std::size_t pos)
      : std::invalid_argument(what + " at position " + std::to_string(pos)), position(pos) {}
};

inline Int decode_coefficient(const std::string& s, std::size_t offset = 0) {
  if (s.empty()) throw LabelError("empty label coefficient", offset);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < 'a' || s[i] > 'z') throw LabelError(std::string("bad character '") + s[i] + "' in label coefficient", offset + i);
  if (s == "a") return 0;
  const bool negative = s[0] == 'a';
  const std::string digits = negative ? s.substr(1) : s;
  if (digits.empty() || digits[0] == 'a') throw LabelError("non-canonical label coefficient " + s, offset + (negative ? 1 : 0));
  Int v = 0;
  for (char c : digits) v = v * 26 + (c - 'a');
  return negative ? Int(-v) : v;
}

inline std::string make_label(const WeilPoly& P) {
  std::ostringstream os;
  os << P.g() << '.' << P.q().get_str() << '.';
  for (int i = 1; i <= P.g(); ++i) {
    if (i > 1) os << '_';
    os << encode_coefficient(P.a(i));
  }
  return os.str();
}

// "g.q.c1_c2_..._cg"; the result is checked only for the functional equation shape, not for the Weil property.
inline WeilPoly parse_label(const std::string& label) {
  const auto d1 = label.find('.');
  if (d1 == std::string::npos) throw LabelError("missing '.' after the dimension", label.size());
  const auto d2 = label.find('.', d1 + 1);
  if (d2 == std::string::npos) throw LabelError("missing '.' after the field size", label.size());
  auto digits = [&](std::size_t from, std::size_t to) {
    if (from == to) throw LabelError("expected digits", from);
    for (std::size_t i = from; i < to; ++i)
      if (label[i] < '0' || label[i] > '9') throw LabelError(std::string("bad character '") + label[i] + "'", i);
    if (label[from] == '0') throw LabelError("leading zero", from);
    return label.substr(from, to - from);
  };
  const std::string gs = digits(0, d1), qs = digits(d1 + 1, d2);
  if (gs.size() > 4) throw LabelError("dimension out of range", 0);
  const int g = std::stoi(gs);
  WeilContext ctx;
  try {
    ctx = make_context(g, Int(qs));
  } catch (const std::invalid_argument& e) {
    throw LabelError(e.what(), d1 + 1);
  }
  std::vector<Int> half;
  std::size_t start = d2 + 1;
  for (;;) {
    const auto us = label.find('_', start);
    const std::size_t end = us == std::string::npos ? label.size() : us;
    half.push_back(decode_coefficient(label.substr(start, end - start), start));
    if (us == std::string::npos) break;
    start = us + 1;
  }
  if (static_cast<int>(half.size()) != g)
    throw LabelError("expected " + std::to_string(g) + " coefficients, found " + std::to_string(half.size()), d2 + 1);
  return WeilPoly::from_half(ctx, half);
}

}  // namespace weilcat
