#include "tdl/kripke.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace tdl {

int KripkeStructure::add_world(const std::string& name) {
  if (name.empty()) throw KripkeError("empty world name");
  if (index_.count(name)) throw KripkeError("duplicate world '" + name + "'");
  int w = static_cast<int>(names_.size());
  names_.push_back(name);
  index_.emplace(name, w);
  succ_.emplace_back();
  std::size_t n = names_.size();
  for (auto& s : succ_set_) s.resize(n);
  succ_set_.emplace_back(n);
  for (auto& e : ext_) e.resize(n);
  return w;
}

void KripkeStructure::add_edge(int from, int to) {
  int n = static_cast<int>(num_worlds());
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw KripkeError("edge references an unknown world");
  if (succ_set_[from].test(to)) return;
  succ_set_[from].set(to);
  auto& list = succ_[from];
  list.insert(std::lower_bound(list.begin(), list.end(), to), to);
  ++num_edges_;
}

int KripkeStructure::declare_prop(const std::string& p) {
  auto it = prop_index_.find(p);
  if (it != prop_index_.end()) return it->second;
  int id = static_cast<int>(props_.size());
  props_.push_back(p);
  prop_index_.emplace(p, id);
  ext_.emplace_back(num_worlds());
  return id;
}

void KripkeStructure::set_label(int world, const std::string& p, bool on) {
  if (world < 0 || world >= static_cast<int>(num_worlds()))
    throw KripkeError("label references an unknown world");
  int id = declare_prop(p);
  ext_[id].set(world, on);
}

std::optional<int> KripkeStructure::world_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int KripkeStructure::world(const std::string& name) const {
  auto w = world_index(name);
  if (!w) throw KripkeError("unknown world '" + name + "'");
  return *w;
}

std::optional<int> KripkeStructure::prop_index(const std::string& p) const {
  auto it = prop_index_.find(p);
  if (it == prop_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> KripkeStructure::label(int w) const {
  std::vector<std::string> out;
  for (std::size_t p = 0; p < props_.size(); ++p)
    if (ext_[p].test(w)) out.push_back(props_[p]);
  return out;
}

Team KripkeStructure::full_team() const {
  Team t(num_worlds());
  t.set();
  return t;
}

Team KripkeStructure::team_of(const std::vector<std::string>& names) const {
  Team t(num_worlds());
  for (const auto& n : names) t.set(world(n));
  return t;
}

Team KripkeStructure::singleton(int w) const {
  Team t(num_worlds());
  t.set(w);
  return t;
}

std::vector<std::string> KripkeStructure::team_names(const Team& t) const {
  std::vector<std::string> out;
  for (int w : members(t)) out.push_back(names_[w]);
  return out;
}

std::vector<int> members(const Team& t) {
  std::vector<int> out;
  for (auto i = t.find_first(); i != Team::npos; i = t.find_next(i))
    out.push_back(static_cast<int>(i));
  return out;
}

namespace {

void check_team(const KripkeStructure& k, const Team& t) {
  if (t.size() != k.num_worlds())
    throw KripkeError("team does not belong to this structure");
}

// Enumerates subsets of `base` by popcount, ties by numeric value.
void enumerate_subsets(const std::vector<int>& base, std::size_t universe,
                       const std::function<bool(const Team&)>& visit) {
  const unsigned r = static_cast<unsigned>(base.size());
  for (unsigned c = 0; c <= r; ++c) {
    if (c == 0) {
      if (!visit(Team(universe))) return;
      continue;
    }
    std::uint64_t mask = (std::uint64_t{1} << c) - 1;
    const std::uint64_t limit = std::uint64_t{1} << r;
    while (mask < limit) {
      Team t(universe);
      for (std::uint64_t m = mask; m; m &= m - 1)
        t.set(base[std::countr_zero(m)]);
      if (!visit(t)) return;
      std::uint64_t lo = mask & (~mask + 1);
      std::uint64_t hi = mask + lo;
      mask = (((hi ^ mask) >> 2) / lo) | hi;
    }
  }
}

void check_cap(const Team& r, std::size_t cap) {
  if (r.count() > cap)
    throw ResourceError("successor set of size " + std::to_string(r.count()) +
                        " exceeds the cap of " + std::to_string(cap));
}

}  // namespace

Team image(const KripkeStructure& k, const Team& t) {
  check_team(k, t);
  Team r(k.num_worlds());
  for (auto i = t.find_first(); i != Team::npos; i = t.find_next(i))
    r |= k.successor_set(static_cast<int>(i));
  return r;
}

void successor_teams(const KripkeStructure& k, const Team& t,
                     const TeamVisitor& visit, std::size_t cap) {
  Team r = image(k, t);
  check_cap(r, cap);
  std::vector<int> with_succ;
  for (int s : members(t))
    if (!k.successors(s).empty()) with_succ.push_back(s);
  enumerate_subsets(members(r), k.num_worlds(), [&](const Team& cand) {
    for (int s : with_succ)
      if (!k.successor_set(s).intersects(cand)) return true;
    return visit(cand);
  });
}

void minimal_diamond_teams(const KripkeStructure& k, const Team& t,
                           const TeamVisitor& visit, bool minimal_only,
                           std::size_t cap) {
  Team r = image(k, t);
  std::vector<int> ms = members(t);
  for (int s : ms)
    if (k.successors(s).empty()) return;
  check_cap(r, cap);
  auto covers = [&](const Team& cand) {
    for (int s : ms)
      if (!k.successor_set(s).intersects(cand)) return false;
    return true;
  };
  enumerate_subsets(members(r), k.num_worlds(), [&](const Team& cand) {
    if (!covers(cand)) return true;
    if (minimal_only) {
      for (auto i = cand.find_first(); i != Team::npos; i = cand.find_next(i)) {
        Team smaller = cand;
        smaller.reset(i);
        if (covers(smaller)) return true;
      }
    }
    return visit(cand);
  });
}

std::vector<Team> collect(
    const std::function<void(const TeamVisitor&)>& producer) {
  std::vector<Team> out;
  producer([&](const Team& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

LoadedStructure load_kripke(const std::string& text) {
  LoadedStructure out;
  KripkeStructure& k = out.structure;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool seen_worlds = false, seen_edges = false, seen_team = false;
  std::vector<std::string> team_names;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::pair<std::string, std::vector<std::string>>> labels;
  std::vector<std::string> props;
  auto fail = [&](const std::string& msg) {
    throw KripkeError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) fail("expected 'section: ...'");
    std::string head = trim(line.substr(0, colon));
    std::string body = line.substr(colon + 1);
    if (head == "worlds") {
      seen_worlds = true;
      for (const auto& w : words(body)) {
        if (k.world_index(w)) fail("duplicate world '" + w + "'");
        k.add_world(w);
      }
    } else if (head == "edges") {
      seen_edges = true;
      for (const auto& e : words(body)) {
        auto arrow = e.find("->");
        if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= e.size())
          fail("malformed edge '" + e + "'");
        edges.emplace_back(e.substr(0, arrow), e.substr(arrow + 2));
      }
    } else if (head == "team") {
      seen_team = true;
      for (const auto& w : words(body)) team_names.push_back(w);
    } else if (head == "props") {
      for (const auto& p : words(body)) props.push_back(p);
    } else if (head.rfind("label", 0) == 0) {
      auto parts = words(head);
      if (parts.size() != 2 || parts[0] != "label") fail("expected 'label WORLD:'");
      labels.emplace_back(parts[1], words(body));
    } else {
      fail("unknown section '" + head + "'");
    }
  }
  if (!seen_worlds) throw KripkeError("missing 'worlds:' section");
  if (!seen_edges) throw KripkeError("missing 'edges:' section");
  if (!seen_team) throw KripkeError("missing 'team:' section");
  for (const auto& p : props) k.declare_prop(p);
  for (const auto& [a, b] : edges) k.add_edge(k.world(a), k.world(b));
  for (const auto& [w, ps] : labels) {
    int wi = k.world(w);
    for (const auto& p : ps) k.set_label(wi, p);
  }
  out.team = k.team_of(team_names);
  return out;
}

std::string store_kripke(const KripkeStructure& k, const Team& t) {
  std::ostringstream out;
  out << "worlds:";
  for (std::size_t w = 0; w < k.num_worlds(); ++w) out << ' ' << k.world_name(w);
  out << "\nprops:";
  for (const auto& p : k.props()) out << ' ' << p;
  out << "\nedges:";
  for (std::size_t w = 0; w < k.num_worlds(); ++w)
    for (int v : k.successors(w))
      out << ' ' << k.world_name(w) << "->" << k.world_name(v);
  out << '\n';
  for (std::size_t w = 0; w < k.num_worlds(); ++w) {
    auto l = k.label(w);
    if (l.empty()) continue;
    out << "label " << k.world_name(w) << ':';
    for (const auto& p : l) out << ' ' << p;
    out << '\n';
  }
  out << "team:";
  for (const auto& n : k.team_names(t)) out << ' ' << n;
  out << '\n';
  return out.str();
}

}  // namespace tdl
