#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "scenarios/gene.hpp"

namespace mocu::gene {

namespace {

class LineError {
 public:
  LineError(const std::string& source, std::size_t line) : prefix_(source + ":" + std::to_string(line) + ": ") {}
  [[noreturn]] void operator()(const std::string& msg) const { fail(ErrorCode::kParse, prefix_ + msg); }

 private:
  std::string prefix_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const LineError& err) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    err("expected a number, got '" + s + "'");
  }
  if (pos != s.size()) err("expected a number, got '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s, const LineError& err) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    err("expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) err("expected an integer, got '" + s + "'");
  return v;
}

}  // namespace

Fixture parse_fixture(std::istream& in, const std::string& source) {
  Fixture fx;
  Network& net = fx.network;
  std::map<std::string, std::size_t> node_index, interaction_index;
  std::string raw;
  std::size_t line_no = 0;
  bool explicit_probs = false, any_initial = false;

  auto node = [&](const std::string& name, const LineError& err) {
    auto it = node_index.find(name);
    if (it == node_index.end()) err("unknown node '" + name + "'");
    return it->second;
  };
  auto interaction = [&](const std::string& name, const LineError& err) {
    auto it = interaction_index.find(name);
    if (it == interaction_index.end()) err("unknown interaction '" + name + "'");
    return it->second;
  };
  auto state = [&](const std::string& s, const LineError& err) {
    State x;
    for (const auto& v : split(s, ',')) x.push_back(to_int(v, err));
    if (x.size() != net.nodes.size()) err("state '" + s + "' has the wrong number of values");
    return x;
  };
  auto theta_bits = [&](const std::string& s, const LineError& err) {
    Bits b;
    for (char c : s) {
      if (c != '0' && c != '1') err("theta must be a 0/1 string");
      b.push_back(c - '0');
    }
    return b;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const LineError err(source, line_no);
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> args;
    for (std::string a; ls >> a;) args.push_back(a);

    if (key == "nodes") {
      if (!net.nodes.empty()) err("nodes declared twice");
      if (args.empty()) err("nodes needs at least one name");
      for (const auto& n : args) {
        if (!node_index.emplace(n, net.nodes.size()).second) err("duplicate node '" + n + "'");
        net.nodes.push_back(n);
      }
    } else if (key == "interaction") {
      if (net.nodes.empty()) err("interaction before nodes");
      if (args.empty()) err("interaction needs a name");
      Interaction it;
      it.name = args[0];
      for (std::size_t k = 1; k < args.size(); ++k) {
        const auto eq = args[k].find('=');
        if (eq == std::string::npos) err("expected field=list, got '" + args[k] + "'");
        const std::string field = args[k].substr(0, eq);
        std::vector<std::size_t>* list = field == "in"    ? &it.inputs
                                         : field == "act" ? &it.activators
                                         : field == "inh" ? &it.inhibitors
                                         : field == "out" ? &it.outputs
                                                          : nullptr;
        if (!list) err("unknown interaction field '" + field + "'");
        for (const auto& n : split(args[k].substr(eq + 1), ',')) list->push_back(node(n, err));
      }
      if (!interaction_index.emplace(it.name, net.interactions.size()).second)
        err("duplicate interaction '" + it.name + "'");
      net.interactions.push_back(std::move(it));
    } else if (key == "pair") {
      if (args.size() != 2) err("pair needs two interaction names");
      net.pairs.push_back({interaction(args[0], err), interaction(args[1], err)});
    } else if (key == "initial") {
      if (args.empty()) err("initial needs a state");
      std::vector<std::string> values;
      double p = -1.0;
      for (const auto& a : args) {
        if (a.rfind("p=", 0) == 0)
          p = to_double(a.substr(2), err);
        else
          values.push_back(a);
      }
      std::string joined;
      for (std::size_t k = 0; k < values.size(); ++k) joined += (k ? "," : "") + values[k];
      if (any_initial && explicit_probs != (p >= 0.0)) err("give p= for every initial state or for none");
      explicit_probs = p >= 0.0;
      any_initial = true;
      net.initial_states.push_back(state(joined, err));
      if (explicit_probs) net.initial_probabilities.push_back(p);
    } else if (key == "target") {
      if (args.size() != net.nodes.size()) err("target needs one value per node");
      net.target.clear();
      for (const auto& a : args) net.target.push_back(to_double(a, err));
    } else if (key == "actions") {
      if (args.empty()) err("actions needs at least one interaction");
      for (const auto& a : args) net.actions.push_back(interaction(a, err));
    } else if (key == "delta") {
      for (const auto& a : args) fx.deltas.push_back(to_double(a, err));
    } else if (key == "prior") {
      for (const auto& a : args) fx.prior_one.push_back(to_double(a, err));
    } else if (key == "max_steps") {
      if (args.size() != 1) err("max_steps needs one value");
      const auto v = to_int(args[0], err);
      if (v <= 0) err("max_steps must be positive");
      net.max_steps = static_cast<std::size_t>(v);
    } else if (key == "cycle") {
      if (args.size() != 1 || (args[0] != "average" && args[0] != "first")) err("cycle must be 'average' or 'first'");
      net.cycle = args[0] == "average" ? CycleRule::kAverage : CycleRule::kFirstState;
    } else if (key == "norm") {
      if (args.size() != 1) err("norm needs one value");
      if (args[0] == "l1") net.norm = Norm::kL1;
      else if (args[0] == "l2") net.norm = Norm::kL2;
      else if (args[0] == "linf") net.norm = Norm::kLinf;
      else err("norm must be l1, l2 or linf");
    } else if (key == "trajectory") {
      ExpectedTrajectory t;
      bool seen_colon = false, has_theta = false;
      for (const auto& a : args) {
        if (a == ":") {
          seen_colon = true;
        } else if (seen_colon) {
          t.states.push_back(state(a, err));
        } else if (a.rfind("theta=", 0) == 0) {
          t.theta = theta_bits(a.substr(6), err);
          has_theta = true;
        } else if (a.rfind("action=", 0) == 0) {
          const std::size_t blocked = interaction(a.substr(7), err);
          std::size_t act = blocked;
          if (!net.actions.empty()) {
            auto it = std::find(net.actions.begin(), net.actions.end(), blocked);
            if (it == net.actions.end()) err("interaction '" + a.substr(7) + "' is not a declared action");
            act = static_cast<std::size_t>(it - net.actions.begin());
          }
          t.action = act;
        } else if (a.rfind("initial=", 0) == 0) {
          t.initial = static_cast<std::size_t>(to_int(a.substr(8), err));
        } else {
          err("unexpected token '" + a + "'");
        }
      }
      if (!has_theta || !seen_colon || t.states.empty()) err("trajectory needs theta=, action=, ':' and states");
      fx.expected_trajectories.push_back(std::move(t));
    } else {
      err("unknown directive '" + key + "'");
    }
  }
  if (net.target.empty()) net.target.assign(net.nodes.size(), 0.0);
  try {
    net.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParse, source + ": " + e.what());
  }
  if (fx.deltas.empty()) fx.deltas.assign(net.pairs.size(), 0.0);
  if (fx.deltas.size() != net.pairs.size()) fail(ErrorCode::kParse, source + ": need one delta per pair");
  if (!fx.prior_one.empty() && fx.prior_one.size() != net.pairs.size())
    fail(ErrorCode::kParse, source + ": need one prior probability per pair");
  if (fx.prior_one.empty()) fx.prior_one.assign(net.pairs.size(), 0.5);
  for (const auto& t : fx.expected_trajectories)
    if (t.theta.size() != net.pairs.size() || t.initial >= net.initial_states.size())
      fail(ErrorCode::kParse, source + ": trajectory expectation does not fit the network");
  return fx;
}

Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open fixture '" + path + "'");
  return parse_fixture(in, path);
}

}  // namespace mocu::gene
