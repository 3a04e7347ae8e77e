#pragma once

// Brute-force reference for the streaming engine: evaluates each schema
// predicate over a point's full sample list at once, constants taken from
// the first sample. Deliberately shares no update logic with the engine.

#include <set>
#include <string>
#include <vector>

#include "carrot/engine.hpp"

namespace testsupport {

inline int64_t oracle_wrap_add(int64_t a, int64_t b) {
  return int64_t(uint64_t(a) + uint64_t(b));
}

// Canonical key "Kind a b [const]", comparable across implementations.
inline std::string inv_key(const carrot::InvariantInstance& inv,
                           const carrot::ProgramPoint& ppt) {
  std::string key = std::string(carrot::schema_name(inv.kind)) + " " +
                    ppt.decls[inv.slot_a].name;
  if (inv.is_pair()) key += " " + ppt.decls[inv.slot_b].name;
  if (inv.learned_const) key += " " + std::to_string(*inv.learned_const);
  return key;
}

inline std::set<std::string> engine_live_keys(
    const std::vector<carrot::InvariantInstance>& live,
    const carrot::ProgramPoint& ppt) {
  std::set<std::string> keys;
  for (const carrot::InvariantInstance& inv : live) keys.insert(inv_key(inv, ppt));
  return keys;
}

inline std::set<std::string> oracle_live_keys(
    const carrot::ProgramPoint& ppt,
    const std::vector<std::vector<int64_t>>& samples, carrot::SchemaSet enabled) {
  // On an empty stream Equality/LessThan hold vacuously; the constant
  // schemata never get to bind and so are not live.
  std::set<std::string> keys;
  const std::size_t n = ppt.arity();

  std::vector<std::size_t> by_name(n);
  for (std::size_t i = 0; i < n; ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(), [&](std::size_t a, std::size_t b) {
    return ppt.decls[a].name < ppt.decls[b].name;
  });
  auto name = [&](std::size_t slot) { return ppt.decls[slot].name; };

  if (enabled.contains(carrot::SchemaKind::Equality)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t a = by_name[i], b = by_name[j];
        bool holds = true;
        for (const auto& s : samples)
          if (s[a] != s[b]) {
            holds = false;
            break;
          }
        if (holds) keys.insert("Equality " + name(a) + " " + name(b));
      }
  }
  if (enabled.contains(carrot::SchemaKind::Sum) && !samples.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::size_t a = by_name[i], b = by_name[j];
        const int64_t c = oracle_wrap_add(samples[0][a], samples[0][b]);
        bool holds = true;
        for (const auto& s : samples)
          if (oracle_wrap_add(s[a], s[b]) != c) {
            holds = false;
            break;
          }
        if (holds)
          keys.insert("Sum " + name(a) + " " + name(b) + " " + std::to_string(c));
      }
  }
  if (enabled.contains(carrot::SchemaKind::LessThan)) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        bool holds = true;
        for (const auto& s : samples)
          if (!(s[a] < s[b])) {
            holds = false;
            break;
          }
        if (holds) keys.insert("LessThan " + name(a) + " " + name(b));
      }
  }
  if (enabled.contains(carrot::SchemaKind::ConstantEquality) && !samples.empty()) {
    for (std::size_t a = 0; a < n; ++a) {
      const int64_t c = samples[0][a];
      bool holds = true;
      for (const auto& s : samples)
        if (s[a] != c) {
          holds = false;
          break;
        }
      if (holds)
        keys.insert("ConstantEquality " + name(a) + " " + std::to_string(c));
    }
  }
  return keys;
}

}  // namespace testsupport
