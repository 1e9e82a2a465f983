#include "rollingcache/snapshot.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rollingcache/errors.hpp"

namespace rollingcache {

void write_snapshot(std::ostream& os, const Snapshot& snap) {
  const auto& g = snap.geometry;
  os << "rollingcache-snapshot " << kSnapshotVersion << '\n';
  os << "geometry " << g.num_sets << ' ' << g.ways << ' ' << g.line_size << ' ' << g.freelist_len << ' '
     << g.addr_bits << '\n';
  os << "entries " << snap.entries.size() << '\n';
  for (std::size_t a = 0; a < snap.entries.size(); ++a) {
    const auto& e = snap.entries[a];
    os << a << ' ' << e.present << ' ' << e.past << ' ' << e.fill_count << '\n';
  }
  os << "freelist " << snap.freelist.size();
  for (SetId s : snap.freelist) os << ' ' << s;
  os << '\n';
  os << "handling " << snap.handling.size() << '\n';
  for (const auto& h : snap.handling)
    os << h.cacheset << ' ' << h.addrset << ' ' << h.pending_writebacks << ' ' << h.countdown << '\n';
  os << "lines " << snap.lines.size() << '\n';
  for (const auto& l : snap.lines)
    os << l.set << ' ' << l.way << " 0x" << std::hex << l.tag << std::dec << ' ' << l.addrset << ' '
       << (l.dirty ? 1 : 0) << '\n';
  os << "end\n";
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::istringstream next(const char* expecting) {
    std::string text;
    if (!std::getline(is_, text)) throw ParseError(line_ + 1, std::string("unexpected end of input, expected ") + expecting);
    ++line_;
    return std::istringstream(text);
  }

  [[nodiscard]] std::size_t line() const { return line_; }

  template <typename... Ts>
  void read(std::istringstream& ss, const char* what, Ts&... out) {
    if (!(ss >> ... >> out)) throw ParseError(line_, std::string("malformed ") + what);
    std::string rest;
    if (ss >> rest) throw ParseError(line_, std::string("trailing data in ") + what);
  }

  void keyword(std::istringstream& ss, const std::string& expected) {
    std::string kw;
    if (!(ss >> kw) || kw != expected) throw ParseError(line_, "expected '" + expected + "'");
  }

 private:
  std::istream& is_;
  std::size_t line_ = 0;
};

}  // namespace

Snapshot read_snapshot(std::istream& is) {
  LineReader r(is);
  Snapshot snap;

  auto ss = r.next("header");
  r.keyword(ss, "rollingcache-snapshot");
  int version = 0;
  r.read(ss, "header", version);
  if (version != kSnapshotVersion) throw ParseError(r.line(), "unsupported snapshot version " + std::to_string(version));

  ss = r.next("geometry");
  r.keyword(ss, "geometry");
  auto& g = snap.geometry;
  r.read(ss, "geometry", g.num_sets, g.ways, g.line_size, g.freelist_len, g.addr_bits);
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw ParseError(r.line(), e.what());
  }

  ss = r.next("entries");
  r.keyword(ss, "entries");
  std::size_t n = 0;
  r.read(ss, "entries count", n);
  for (std::size_t i = 0; i < n; ++i) {
    ss = r.next("indirection entry");
    std::size_t a = 0;
    IndirectionEntry e;
    r.read(ss, "indirection entry", a, e.present, e.past, e.fill_count);
    if (a != i) throw ParseError(r.line(), "indirection entries must be listed in AddrSet order");
    snap.entries.push_back(e);
  }

  ss = r.next("freelist");
  r.keyword(ss, "freelist");
  std::size_t k = 0;
  if (!(ss >> k)) throw ParseError(r.line(), "malformed freelist");
  for (std::size_t i = 0; i < k; ++i) {
    SetId s = 0;
    if (!(ss >> s)) throw ParseError(r.line(), "freelist shorter than its declared length");
    snap.freelist.push_back(s);
  }

  ss = r.next("handling");
  r.keyword(ss, "handling");
  r.read(ss, "handling count", n);
  for (std::size_t i = 0; i < n; ++i) {
    ss = r.next("handling entry");
    HandlingRegisterEntry h;
    r.read(ss, "handling entry", h.cacheset, h.addrset, h.pending_writebacks, h.countdown);
    snap.handling.push_back(h);
  }

  ss = r.next("lines");
  r.keyword(ss, "lines");
  r.read(ss, "lines count", n);
  for (std::size_t i = 0; i < n; ++i) {
    ss = r.next("line record");
    Snapshot::Line l;
    std::string tag;
    int dirty = 0;
    r.read(ss, "line record", l.set, l.way, tag, l.addrset, dirty);
    try {
      std::size_t used = 0;
      l.tag = std::stoull(tag, &used, 16);
      if (used != tag.size()) throw std::invalid_argument(tag);
    } catch (const std::exception&) {
      throw ParseError(r.line(), "bad tag '" + tag + "'");
    }
    if (dirty != 0 && dirty != 1) throw ParseError(r.line(), "dirty flag must be 0 or 1");
    l.dirty = dirty == 1;
    snap.lines.push_back(l);
  }

  ss = r.next("end");
  r.keyword(ss, "end");
  return snap;
}

}  // namespace rollingcache
