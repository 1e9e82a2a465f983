#pragma once

#include <set>
#include <string>
#include <vector>

#include "rollingcache/rolling_cache.hpp"

namespace rctest {

/// Full-scan checks of the structural invariants. Returns one message per
/// violation; empty means the state is consistent.
inline std::vector<std::string> check_invariants(const rollingcache::RollingCache& c) {
  using rollingcache::SetId;
  std::vector<std::string> bad;
  const auto& g = c.geometry();
  const auto handling = c.handling_register();

  auto live_for = [&](SetId set, SetId addrset) {
    for (const auto& h : handling)
      if (h.cacheset == set && h.addrset == addrset) return true;
    return false;
  };

  std::vector<std::uint32_t> reachable(g.num_sets, 0);
  for (SetId s = 0; s < g.num_sets; ++s) {
    for (const auto& l : c.set_lines(s)) {
      if (!l.valid) continue;
      const auto& e = c.entry(l.addrset);
      if (s == e.present || s == e.past || live_for(s, l.addrset))
        ++reachable[l.addrset];
      else
        bad.push_back("unreachable line of addrset " + std::to_string(l.addrset) + " in set " + std::to_string(s));
    }
  }
  for (SetId a = 0; a < g.num_sets; ++a) {
    if (reachable[a] > 2 * g.ways && handling.empty())
      bad.push_back("addrset " + std::to_string(a) + " holds " + std::to_string(reachable[a]) + " lines");
    const auto& e = c.entry(a);
    if (e.fill_count > g.ways) bad.push_back("fill_count above W for addrset " + std::to_string(a));
    if (e.present >= g.num_sets || e.past >= g.num_sets) bad.push_back("pointer out of range");
  }
  if (c.freelist().size() + handling.size() != g.freelist_len)
    bad.push_back("freelist length " + std::to_string(c.freelist().size()) + " + " +
                  std::to_string(handling.size()) + " pending != " + std::to_string(g.freelist_len));
  for (SetId s : c.freelist())
    if (s >= g.num_sets) bad.push_back("freelist entry out of range");
  return bad;
}

}  // namespace rctest
