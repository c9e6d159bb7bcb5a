#pragma once

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tdl {

// A team is a bitset over the dense world indices of one structure.
using Team = boost::dynamic_bitset<std::uint64_t>;

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KripkeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class KripkeStructure {
 public:
  int add_world(const std::string& name);
  void add_edge(int from, int to);  // duplicates are ignored
  int declare_prop(const std::string& p);
  void set_label(int world, const std::string& p, bool on = true);

  std::size_t num_worlds() const { return names_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  const std::string& world_name(int w) const { return names_.at(w); }
  std::optional<int> world_index(const std::string& name) const;
  int world(const std::string& name) const;  // throws on unknown names

  const std::vector<int>& successors(int w) const { return succ_.at(w); }
  const Team& successor_set(int w) const { return succ_set_.at(w); }

  const std::vector<std::string>& props() const { return props_; }
  std::optional<int> prop_index(const std::string& p) const;
  const Team& extension(int prop) const { return ext_.at(prop); }
  bool holds(int w, int prop) const { return ext_.at(prop).test(w); }
  std::vector<std::string> label(int w) const;

  Team empty_team() const { return Team(num_worlds()); }
  Team full_team() const;
  Team team_of(const std::vector<std::string>& names) const;
  Team singleton(int w) const;
  std::vector<std::string> team_names(const Team& t) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> succ_;
  std::vector<Team> succ_set_;
  std::vector<std::string> props_;
  std::unordered_map<std::string, int> prop_index_;
  std::vector<Team> ext_;
  std::size_t num_edges_ = 0;
};

std::vector<int> members(const Team& t);

// R(T): every successor of a member of t.
Team image(const KripkeStructure& k, const Team& t);

// Callback returns false to stop the enumeration early.
using TeamVisitor = std::function<bool(const Team&)>;

constexpr std::size_t kMaxImageSize = 24;

// Teams T' with T' a subset of R(T) such that every member of t that has a
// successor has one in T'. Ordered by popcount, then numeric value.
void successor_teams(const KripkeStructure& k, const Team& t,
                     const TeamVisitor& visit,
                     std::size_t cap = kMaxImageSize);

// Teams T' with T' a subset of R(T) that contain a successor of every member
// of t. Empty if some member has no successor. With minimal_only, only the
// inclusion-minimal ones are produced.
void minimal_diamond_teams(const KripkeStructure& k, const Team& t,
                           const TeamVisitor& visit, bool minimal_only = false,
                           std::size_t cap = kMaxImageSize);

std::vector<Team> collect(
    const std::function<void(const TeamVisitor&)>& producer);

struct LoadedStructure {
  KripkeStructure structure;
  Team team;
};

LoadedStructure load_kripke(const std::string& text);
std::string store_kripke(const KripkeStructure& k, const Team& t);

}  // namespace tdl
