#include "mixlab/plan.hpp"

#include "mixlab/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mixlab {

CutStage CutStage::staircase(std::uint64_t r) {
  CutStage s;
  s.cuts = r;
  s.spacers.reserve(r);
  for (std::uint64_t j = 0; j < r; ++j) s.spacers.emplace_back(j);
  return s;
}

CutStage CutStage::uniform(std::uint64_t r, const BigInt& spacer_count) {
  CutStage s;
  s.cuts = r;
  s.spacers.assign(r, spacer_count);
  return s;
}

bool CutStage::is_staircase() const {
  for (std::uint64_t j = 0; j < cuts; ++j) {
    if (spacers[j] != j) return false;
  }
  return true;
}

BigInt CutStage::spacer_sum() const {
  BigInt total = 0;
  for (const auto& s : spacers) total += s;
  return total;
}

void CutStage::validate() const {
  if (cuts < 1) throw ConfigError("stage must have cuts >= 1");
  if (spacers.size() != cuts) {
    throw ConfigError("stage has " + std::to_string(spacers.size()) + " spacer entries for " +
                      std::to_string(cuts) + " cuts");
  }
  for (const auto& s : spacers) {
    if (s < 0) throw ConfigError("negative spacer count");
  }
}

BigInt ConstructionPlan::pad_at(std::size_t stage) const {
  auto it = pads.find(stage);
  return it == pads.end() ? BigInt(0) : it->second;
}

void ConstructionPlan::validate() const {
  if (initial_height < 1) throw ConfigError("initial_height must be positive");
  if (initial_width <= 0) throw ConfigError("initial_width must be positive");
  for (const auto& s : stages) s.validate();
  for (const auto& [stage, pad] : pads) {
    if (stage >= stages.size()) {
      throw ConfigError("pad attached to stage " + std::to_string(stage) + " beyond plan depth");
    }
    if (pad < 0) throw ConfigError("negative pad");
  }
  for (const auto& rt : rigid_times) {
    if (rt.stage >= stages.size()) throw ConfigError("rigid time beyond plan depth");
  }
}

std::vector<BigInt> heights_of(const ConstructionPlan& plan, std::size_t upto) {
  if (upto > plan.stages.size()) {
    throw PreconditionError("heights_of: stage index " + std::to_string(upto) +
                            " out of range (plan depth " + std::to_string(plan.stages.size()) + ")");
  }
  std::vector<BigInt> h;
  h.reserve(upto + 1);
  h.push_back(plan.initial_height);
  for (std::size_t t = 0; t < upto; ++t) {
    const CutStage& st = plan.stages[t];
    BigInt padded = h.back() + plan.pad_at(t);
    h.push_back(BigInt(st.cuts) * padded + st.spacer_sum());
  }
  return h;
}

Rational width_at(const ConstructionPlan& plan, std::size_t k) {
  if (k > plan.stages.size()) throw PreconditionError("width_at: stage index out of range");
  Rational w = plan.initial_width;
  for (std::size_t t = 0; t < k; ++t) w /= plan.stages[t].cuts;
  return w;
}

Rational added_measure_at_stage(const ConstructionPlan& plan, std::size_t t) {
  if (t >= plan.stages.size()) throw PreconditionError("added_measure_at_stage: out of range");
  Rational w = width_at(plan, t);
  const CutStage& st = plan.stages[t];
  // Pad levels are inserted at full column width; per-subcolumn spacers at
  // the subcolumn width w / cuts.
  return Rational(plan.pad_at(t)) * w + Rational(st.spacer_sum()) * (w / st.cuts);
}

Rational total_added_measure(const ConstructionPlan& plan) {
  return total_added_measure(plan, 0, plan.stages.size());
}

Rational total_added_measure(const ConstructionPlan& plan, std::size_t from_stage,
                             std::size_t to_stage) {
  Rational total = 0;
  for (std::size_t t = from_stage; t < to_stage && t < plan.stages.size(); ++t) {
    total += added_measure_at_stage(plan, t);
  }
  return total;
}

namespace {

using nlohmann::json;

json stage_to_json(const CutStage& s) {
  json j;
  j["cuts"] = s.cuts;
  if (s.is_staircase()) {
    j["spacers"] = "staircase";
  } else {
    json arr = json::array();
    for (const auto& v : s.spacers) arr.push_back(v.str());
    j["spacers"] = arr;
  }
  return j;
}

CutStage stage_from_json(const json& j) {
  CutStage s;
  s.cuts = j.at("cuts").get<std::uint64_t>();
  const json& sp = j.at("spacers");
  if (sp.is_string()) {
    if (sp.get<std::string>() != "staircase") {
      throw ConfigError("unknown spacer shorthand '" + sp.get<std::string>() + "'");
    }
    s = CutStage::staircase(s.cuts);
  } else {
    for (const auto& v : sp) s.spacers.push_back(parse_bigint(v.get<std::string>()));
  }
  s.validate();
  return s;
}

}  // namespace

std::string plan_to_json(const ConstructionPlan& plan) {
  json j;
  j["format"] = "mixlab-plan/1";
  j["initial_height"] = plan.initial_height.str();
  j["initial_width"] = rational_to_string(plan.initial_width);
  json stages = json::array();
  for (const auto& s : plan.stages) stages.push_back(stage_to_json(s));
  j["stages"] = stages;
  json pads = json::array();
  for (const auto& [stage, pad] : plan.pads) {
    pads.push_back(json::array({stage, pad.str()}));
  }
  j["pads"] = pads;
  json rigid = json::array();
  for (const auto& rt : plan.rigid_times) {
    rigid.push_back(json::array({rt.stage, rt.time.str()}));
  }
  j["rigid_times"] = rigid;
  return j.dump(2) + "\n";
}

ConstructionPlan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("plan document is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "mixlab-plan/1") {
    throw ConfigError("not a mixlab-plan/1 document");
  }
  ConstructionPlan plan;
  plan.initial_height = parse_bigint(j.at("initial_height").get<std::string>());
  plan.initial_width = parse_rational(j.at("initial_width").get<std::string>());
  for (const auto& s : j.at("stages")) plan.stages.push_back(stage_from_json(s));
  for (const auto& p : j.at("pads")) {
    plan.pads[p.at(0).get<std::size_t>()] = parse_bigint(p.at(1).get<std::string>());
  }
  for (const auto& r : j.at("rigid_times")) {
    plan.rigid_times.push_back({r.at(0).get<std::size_t>(), parse_bigint(r.at(1).get<std::string>())});
  }
  plan.validate();
  return plan;
}

void save_plan(const ConstructionPlan& plan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << plan_to_json(plan);
}

ConstructionPlan load_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return plan_from_json(buf.str());
}

}  // namespace mixlab
