#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>

#include "combat/harness.hpp"

namespace combat {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kProblemKeys = {"K", "I", "T", "lambda"};
const std::set<std::string> kAdversaryKeys = {"kind", "scale", "alpha_check", "calibration", "chi", "replay"};
const std::set<std::string> kRunKeys = {"policies", "schedule", "seeds", "output", "granularity", "feedback"};

std::string require(const pt::ptree& tree, const std::string& path) {
  auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'));
  if (!v) throw InvalidArgument("field '" + path + "': missing");
  return *v;
}

template <typename F>
auto field(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    if (what.rfind("field '", 0) == 0) throw;
    throw InvalidArgument("field '" + path + "': " + what);
  } catch (const std::exception& e) {
    throw InvalidArgument("field '" + path + "': " + e.what());
  }
}

void check_keys(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : section) {
    if (!allowed.count(k)) throw InvalidArgument("field '" + name + "." + k + "': unknown key");
  }
}

// read_ini keeps trailing "; ..." as part of the value
std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(strip_inline_comments(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  for (const auto& [name, section] : tree) {
    if (name == "problem") check_keys(section, name, kProblemKeys);
    else if (name == "adversary") check_keys(section, name, kAdversaryKeys);
    else if (name == "run") check_keys(section, name, kRunKeys);
    else if (name.rfind("policy.", 0) != 0) throw InvalidArgument("field '" + name + "': unknown section");
  }

  ExperimentConfig c;
  c.spec.K = field("problem.K", [&] { return std::stoi(require(tree, "problem.K")); });
  c.spec.I = field("problem.I", [&] { return std::stoi(require(tree, "problem.I")); });
  c.spec.T = field("problem.T", [&] { return static_cast<std::int64_t>(std::stod(require(tree, "problem.T"))); });
  c.spec.lambda = field("problem.lambda", [&] { return std::stod(require(tree, "problem.lambda")); });
  field("problem", [&] { c.spec.validate(); return 0; });

  c.adversary.spec = c.spec;
  c.adversary.kind = field("adversary.kind", [&] { return parse_adversary_kind(require(tree, "adversary.kind")); });
  if (auto v = tree.get_optional<std::string>("adversary.scale")) {
    c.adversary.scale = field("adversary.scale", [&] { return std::stod(*v); });
  }
  if (auto v = tree.get_optional<std::string>("adversary.alpha_check")) {
    c.adversary.alpha_check = field("adversary.alpha_check", [&] { return std::stod(*v); });
  }
  if (auto v = tree.get_optional<std::string>("adversary.calibration")) {
    c.adversary.calibration = field("adversary.calibration", [&] { return parse_noise_calibration(*v); });
  }
  if (auto v = tree.get_optional<std::string>("adversary.chi")) {
    c.adversary.chi = field("adversary.chi", [&] {
      std::vector<int> idx;
      for (double x : parse_value_list(*v)) idx.push_back(static_cast<int>(x));
      return CombinatorialArm::from_indices(c.spec.K, idx);
    });
  }
  if (auto v = tree.get_optional<std::string>("adversary.replay")) c.adversary.replay_path = *v;
  if (c.adversary.kind == AdversaryKind::Replay && c.adversary.replay_path.empty()) {
    throw InvalidArgument("field 'adversary.replay': missing (required for kind = replay)");
  }
  field("adversary", [&] { c.adversary.validate(); return 0; });

  c.policies = field("run.policies", [&] {
    std::vector<PolicySpec> out;
    std::istringstream in(require(tree, "run.policies"));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      out.push_back({parse_policy_kind(item.substr(b, item.find_last_not_of(" \t") - b + 1)), {}});
    }
    return out;
  });
  for (auto& p : c.policies) {
    const std::string section = "policy." + to_string(p.kind);
    if (auto s = tree.get_child_optional(pt::ptree::path_type(section, '/'))) {
      for (const auto& [k, v] : *s) p.overrides[k] = v.get_value<std::string>();
    }
  }
  if (auto v = tree.get_optional<std::string>("run.schedule")) c.schedule = parse_schedule_rule(*v);
  c.seeds = field("run.seeds", [&] { return parse_seed_list(tree.get<std::string>("run.seeds", "0..19")); });
  if (auto v = tree.get_optional<std::string>("run.output")) c.output_path = *v;
  if (auto v = tree.get_optional<std::string>("run.granularity")) c.granularity = parse_granularity(*v);
  if (auto v = tree.get_optional<std::string>("run.feedback")) {
    c.feedback = field("run.feedback", [&] { return parse_feedback(*v); });
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig c = parse_config(buf.str());
  if (c.adversary.kind == AdversaryKind::Replay && c.adversary.replay_path.is_relative()) {
    c.adversary.replay_path = path.parent_path() / c.adversary.replay_path;
  }
  return c;
}

}  // namespace combat
