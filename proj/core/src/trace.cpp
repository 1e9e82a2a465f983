#include "rollingcache/trace.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "rollingcache/errors.hpp"
#include "rollingcache/rng.hpp"

namespace rollingcache {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view next_token(std::string_view& s) {
  s = trim(s);
  const auto end = s.find_first_of(" \t");
  std::string_view tok = s.substr(0, end);
  s = end == std::string_view::npos ? std::string_view{} : s.substr(end);
  return tok;
}

TraceRecord parse_line(std::string_view line, std::size_t lineno) {
  std::string_view rest = line;
  const std::string_view op = next_token(rest);
  const std::string_view addr = next_token(rest);
  const std::string_view delta = next_token(rest);

  TraceRecord rec;
  if (op == "R")
    rec.kind = AccessKind::read;
  else if (op == "W")
    rec.kind = AccessKind::write;
  else
    throw ParseError(lineno, "bad opcode '" + std::string(op) + "' (expected R or W)");

  if (addr.empty()) throw ParseError(lineno, "missing address");
  std::string_view digits = addr;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) digits.remove_prefix(2);
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), rec.address, 16);
  if (ec != std::errc{} || p != digits.data() + digits.size())
    throw ParseError(lineno, "address '" + std::string(addr) + "' is not a 64-bit hex number");

  if (delta.empty()) throw ParseError(lineno, "missing instr_delta");
  auto [q, ec2] = std::from_chars(delta.data(), delta.data() + delta.size(), rec.instr_delta, 10);
  if (ec2 != std::errc{} || q != delta.data() + delta.size())
    throw ParseError(lineno, "instr_delta '" + std::string(delta) + "' is not a decimal count");
  if (rec.instr_delta == 0) throw ParseError(lineno, "instr_delta must be >= 1");

  if (!trim(rest).empty()) throw ParseError(lineno, "unexpected trailing field '" + std::string(trim(rest)) + "'");
  return rec;
}

}  // namespace

Trace parse_trace(std::istream& in) {
  Trace out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    out.push_back(parse_line(line, lineno));
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

void write_trace(std::ostream& out, std::span<const TraceRecord> trace) {
  for (const auto& r : trace) {
    out << (r.kind == AccessKind::read ? 'R' : 'W') << " 0x" << std::hex << r.address << std::dec << ' '
        << r.instr_delta << '\n';
  }
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::sequential: return "sequential";
    case SyntheticKind::strided: return "strided";
    case SyntheticKind::uniform_random: return "uniform_random";
    case SyntheticKind::conflict_storm: return "conflict_storm";
    case SyntheticKind::mixed: return "mixed";
  }
  return "unknown";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  for (auto k : {SyntheticKind::sequential, SyntheticKind::strided, SyntheticKind::uniform_random,
                 SyntheticKind::conflict_storm, SyntheticKind::mixed}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown synthetic trace kind '" + std::string(name) +
                    "' (expected sequential, strided, uniform_random, conflict_storm or mixed)");
}

Trace gen_synthetic(const SyntheticSpec& spec, const CacheGeometry& geom, std::uint64_t seed) {
  geom.validate();
  if (spec.length == 0) throw ConfigError("synthetic trace: length must be >= 1");
  if (spec.instr_delta == 0) throw ConfigError("synthetic trace: instr_delta must be >= 1");
  if (!(spec.write_fraction >= 0.0 && spec.write_fraction <= 1.0))
    throw ConfigError("synthetic trace: write fraction must be in [0, 1]");

  Stream rng = derive(seed, StreamLabel::trace_gen);
  const std::uint64_t line = geom.line_size;
  const Address base_line = spec.base / line * line;
  const std::uint64_t base_tag = decompose(base_line, geom).tag;

  Trace out;
  out.reserve(spec.length);
  auto emit = [&](Address a) {
    TraceRecord r;
    r.address = a;
    r.instr_delta = spec.instr_delta;
    if (spec.write_fraction > 0.0 && rng.uniform01() < spec.write_fraction) r.kind = AccessKind::write;
    out.push_back(r);
  };

  switch (spec.kind) {
    case SyntheticKind::sequential:
      for (std::uint64_t i = 0; i < spec.length; ++i) emit(base_line + i * line);
      break;
    case SyntheticKind::strided:
      if (spec.stride_lines == 0) throw ConfigError("synthetic trace: stride must be >= 1");
      for (std::uint64_t i = 0; i < spec.length; ++i) emit(base_line + i * spec.stride_lines * line);
      break;
    case SyntheticKind::uniform_random:
      if (spec.footprint_lines == 0) throw ConfigError("synthetic trace: footprint must be >= 1");
      for (std::uint64_t i = 0; i < spec.length; ++i) emit(base_line + rng.uniform_below(spec.footprint_lines) * line);
      break;
    case SyntheticKind::conflict_storm: {
      if (spec.addrset >= geom.num_sets)
        throw ConfigError("synthetic trace: addrset " + std::to_string(spec.addrset) + " out of range");
      const std::uint64_t n = spec.distinct == 0 ? spec.length : spec.distinct;
      for (std::uint64_t i = 0; i < spec.length; ++i) {
        const std::uint64_t k = spec.shuffled ? rng.uniform_below(n) : i % n;
        emit(geom.line_address(base_tag + k, spec.addrset));
      }
      break;
    }
    case SyntheticKind::mixed: {
      if (spec.footprint_lines == 0) throw ConfigError("synthetic trace: footprint must be >= 1");
      if (!(spec.hot_fraction >= 0.0 && spec.hot_fraction <= 1.0))
        throw ConfigError("synthetic trace: hot fraction must be in [0, 1]");
      const std::uint32_t hot_n = std::min(spec.hot_sets, geom.num_sets);
      std::vector<SetId> all(geom.num_sets);
      std::iota(all.begin(), all.end(), SetId{0});
      for (std::uint32_t i = 0; i < hot_n; ++i)
        std::swap(all[i], all[i + rng.uniform_below(geom.num_sets - i)]);
      const std::uint64_t tags_per_set = std::max<std::uint64_t>(1, spec.footprint_lines / geom.num_sets);
      for (std::uint64_t i = 0; i < spec.length; ++i) {
        if (hot_n > 0 && rng.uniform01() < spec.hot_fraction) {
          const SetId s = all[rng.uniform_below(hot_n)];
          emit(geom.line_address(base_tag + rng.uniform_below(tags_per_set), s));
        } else {
          emit(base_line + rng.uniform_below(spec.footprint_lines) * line);
        }
      }
      break;
    }
  }
  return out;
}

Trace interleave(std::span<const Trace> traces) {
  if (traces.empty()) throw ConfigError("interleave: no traces given");
  std::size_t total = 0;
  std::size_t longest = 0;
  for (const auto& t : traces) {
    total += t.size();
    longest = std::max(longest, t.size());
  }
  Trace out;
  out.reserve(total);
  for (std::size_t i = 0; i < longest; ++i)
    for (const auto& t : traces)
      if (i < t.size()) out.push_back(t[i]);
  return out;
}

Trace conflict_storm_suite(const CacheGeometry& geom, std::uint64_t seed, std::uint64_t length_per_storm) {
  geom.validate();
  const std::uint64_t w = geom.ways;
  const std::uint64_t sizes[] = {w + 1, w + w / 2 + 1, 2 * w};
  // Storm tags start high so they never alias the background lines.
  const Address storm_base = Address{1} << (geom.addr_bits - 1);

  std::vector<Trace> parts;
  std::uint64_t part = 0;
  for (std::uint64_t n : sizes) {
    for (bool shuffled : {false, true}) {
      SyntheticSpec s;
      s.kind = SyntheticKind::conflict_storm;
      s.length = length_per_storm;
      s.distinct = n;
      s.shuffled = shuffled;
      s.base = storm_base;
      s.addrset = static_cast<SetId>((part * 7 + 3) % geom.num_sets);
      parts.push_back(gen_synthetic(s, geom, child_seed(seed, part)));
      ++part;
    }
  }
  SyntheticSpec bg;
  bg.kind = SyntheticKind::uniform_random;
  bg.length = length_per_storm;
  bg.footprint_lines = geom.lines();
  parts.push_back(gen_synthetic(bg, geom, child_seed(seed, part)));
  return interleave(parts);
}

}  // namespace rollingcache
