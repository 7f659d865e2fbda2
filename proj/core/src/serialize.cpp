#include "suprec/serialize.hpp"

#include <json.hpp>

#include "suprec/errors.hpp"

namespace suprec {
namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string dump_instance(const ProblemInstance& instance) {
  const auto& c = instance.config;
  json cfg = {
      {"d", c.d},
      {"k", c.k},
      {"m", c.m},
      {"n", c.n},
      {"x_min", c.x_min},
      {"x_max", c.x_max},
      {"sigma2", c.sigma2},
      {"signal_mode", std::string(to_string(c.signal_mode))},
      {"support_mode", std::string(to_string(c.support_mode))},
      {"fixed_support", c.fixed_support},
      {"fixed_pattern", c.fixed_pattern},
      {"seed", c.seed},
  };
  json samples = json::array();
  const auto& ms = instance.measurements;
  for (std::size_t i = 0; i < ms.matrices.size(); ++i) {
    const auto& phi = ms.matrices[i];
    json rows = json::array();
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
      rows.push_back(vector_to_json(phi.row(r).transpose()));
    }
    samples.push_back({
        {"x", vector_to_json(instance.signals.vectors.at(i))},
        {"phi", std::move(rows)},
        {"w", vector_to_json(ms.noises[i])},
        {"y", vector_to_json(ms.observations[i])},
    });
  }
  json doc = {
      {"format", "suprec-instance"},
      {"version", 1},
      {"config", std::move(cfg)},
      {"support", std::vector<std::size_t>(instance.support.indices().begin(),
                                           instance.support.indices().end())},
      {"samples", std::move(samples)},
  };
  return doc.dump(1) + "\n";
}

ProblemInstance load_instance(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "suprec-instance" || doc.at("version") != 1) {
      throw ConfigError("not a suprec-instance version 1 document");
    }
    const json& cfg = doc.at("config");
    ProblemInstance inst;
    auto& c = inst.config;
    c.d = cfg.at("d").get<std::size_t>();
    c.k = cfg.at("k").get<std::size_t>();
    c.m = cfg.at("m").get<std::size_t>();
    c.n = cfg.at("n").get<std::size_t>();
    c.x_min = cfg.at("x_min").get<double>();
    c.x_max = cfg.at("x_max").get<double>();
    c.sigma2 = cfg.at("sigma2").get<double>();
    c.signal_mode = parse_signal_mode(cfg.at("signal_mode").get<std::string>());
    c.support_mode = parse_support_mode(cfg.at("support_mode").get<std::string>());
    c.fixed_support = cfg.at("fixed_support").get<std::vector<std::size_t>>();
    c.fixed_pattern = cfg.at("fixed_pattern").get<std::vector<double>>();
    c.seed = cfg.at("seed").get<std::uint64_t>();
    c.validate();

    inst.support = Support(doc.at("support").get<std::vector<std::size_t>>(), c.d);
    const json& samples = doc.at("samples");
    if (samples.size() != c.n) throw ConfigError("sample count does not match n");
    for (const json& s : samples) {
      inst.signals.vectors.push_back(vector_from_json(s.at("x")));
      const json& rows = s.at("phi");
      Eigen::MatrixXd phi(static_cast<Eigen::Index>(c.m), static_cast<Eigen::Index>(c.d));
      if (rows.size() != c.m) throw ConfigError("phi row count does not match m");
      for (std::size_t r = 0; r < c.m; ++r) {
        const Eigen::VectorXd row = vector_from_json(rows[r]);
        if (static_cast<std::size_t>(row.size()) != c.d) {
          throw ConfigError("phi row length does not match d");
        }
        phi.row(static_cast<Eigen::Index>(r)) = row.transpose();
      }
      inst.measurements.matrices.push_back(std::move(phi));
      inst.measurements.noises.push_back(vector_from_json(s.at("w")));
      inst.measurements.observations.push_back(vector_from_json(s.at("y")));
    }
    if (!inst.valid()) throw ConfigError("instance violates its invariants");
    return inst;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed instance document: ") + e.what());
  }
}

}  // namespace suprec
