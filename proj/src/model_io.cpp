#include "snapgate/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "snapgate/error.hpp"

namespace snapgate {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormat = "snapgate-model";

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw ConfigError("ragged matrix in model file");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

Json window_to_json(const WindowSpec& w) {
  return Json{{"length", w.length_samples}, {"increment", w.increment_samples}};
}

WindowSpec window_from_json(const Json& j) {
  return {j.at("length").get<std::size_t>(), j.at("increment").get<std::size_t>()};
}

Json point_to_json(const CalibrationPoint& p) {
  return Json{{"s", p.s}, {"threshold", p.threshold}, {"tpr", p.tpr}, {"fpr", p.fpr}};
}

CalibrationPoint point_from_json(const Json& j) {
  return {j.at("s").get<double>(), j.at("threshold").get<double>(), j.at("tpr").get<double>(),
          j.at("fpr").get<double>()};
}

template <class T>
Json optional_to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

void save_model(std::ostream& out, const ModelBundle& m) {
  Json j;
  j["format"] = kFormat;
  j["version"] = kModelFormatVersion;

  const auto& p = m.pipeline;
  j["pipeline"] = {{"sample_rate", p.sample_rate},
                   {"channels", p.channels},
                   {"classifier_window", window_to_json(p.classifier_window)},
                   {"eps", p.eps},
                   {"wake_window", window_to_json(p.wake_window)},
                   {"template_seconds", p.template_seconds},
                   {"template_lead", p.template_lead}};

  Eigen::MatrixXd priors = m.lda.log_priors();
  j["lda"] = {{"classes", m.lda.class_labels()},
              {"means", matrix_to_json(m.lda.class_means())},
              {"covariance_inverse", matrix_to_json(m.lda.covariance_inverse())},
              {"log_priors", std::vector<double>(priors.data(), priors.data() + priors.size())},
              {"regularization", m.lda.regularization()}};

  j["speed"] = {{"rest_class", m.speed.rest_class},
                {"rest_mav", m.speed.rest_mav},
                {"active_mav", m.speed.active_mav}};

  Json templates = Json::array();
  for (const auto& t : m.wake.templates) {
    Json jt;
    jt["source"] = t.source_id();
    jt["frames"] = t.length();
    jt["channels"] = t.channels();
    jt["values"] = t.values();
    templates.push_back(std::move(jt));
  }
  j["wake"] = {{"templates", std::move(templates)},
               {"threshold", optional_to_json(m.wake.threshold)},
               {"s", optional_to_json(m.wake.s)},
               {"vote_length", m.wake.vote_length},
               {"vote_quorum", m.wake.vote_quorum}};

  if (m.calibration) {
    Json roc = Json::array();
    for (const auto& pt : m.calibration->roc) roc.push_back(point_to_json(pt));
    j["calibration"] = {{"selected", point_to_json(m.calibration->selected)}, {"roc", std::move(roc)}};
  } else {
    j["calibration"] = nullptr;
  }
  out << j.dump(1) << '\n';
}

void save_model(const std::filesystem::path& path, const ModelBundle& models) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  save_model(out, models);
}

ModelBundle load_model(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw ConfigError("not a snapgate model file");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ConfigError("unsupported model file version " + j.at("version").dump());
    }
    const auto& jp = j.at("pipeline");
    PipelineConfig p;
    p.sample_rate = jp.at("sample_rate").get<double>();
    p.channels = jp.at("channels").get<std::size_t>();
    p.classifier_window = window_from_json(jp.at("classifier_window"));
    p.eps = jp.at("eps").get<double>();
    p.wake_window = window_from_json(jp.at("wake_window"));
    p.template_seconds = jp.at("template_seconds").get<double>();
    p.template_lead = jp.at("template_lead").get<double>();
    p.validate();

    const auto& jl = j.at("lda");
    const auto priors = jl.at("log_priors").get<std::vector<double>>();
    LdaModel lda(jl.at("classes").get<std::vector<std::string>>(), matrix_from_json(jl.at("means")),
                 matrix_from_json(jl.at("covariance_inverse")),
                 Eigen::Map<const Eigen::VectorXd>(priors.data(), static_cast<Eigen::Index>(priors.size())),
                 jl.at("regularization").get<double>());

    const auto& js = j.at("speed");
    SpeedCalibration speed;
    speed.rest_class = js.at("rest_class").get<std::size_t>();
    speed.rest_mav = js.at("rest_mav").get<double>();
    speed.active_mav = js.at("active_mav").get<std::vector<double>>();

    const auto& jw = j.at("wake");
    WakeModel wake;
    for (const auto& jt : jw.at("templates")) {
      wake.templates.emplace_back(jt.at("values").get<std::vector<double>>(),
                                  jt.at("frames").get<std::size_t>(),
                                  jt.at("channels").get<std::size_t>(),
                                  jt.at("source").get<std::string>());
    }
    if (!jw.at("threshold").is_null()) wake.threshold = jw.at("threshold").get<double>();
    if (!jw.at("s").is_null()) wake.s = jw.at("s").get<double>();
    wake.vote_length = jw.at("vote_length").get<std::size_t>();
    wake.vote_quorum = jw.at("vote_quorum").get<std::size_t>();
    wake.validate();

    std::optional<CalibrationResult> calibration;
    if (j.contains("calibration") && !j.at("calibration").is_null()) {
      CalibrationResult c;
      c.selected = point_from_json(j.at("calibration").at("selected"));
      for (const auto& pt : j.at("calibration").at("roc")) c.roc.push_back(point_from_json(pt));
      calibration = std::move(c);
    }
    return ModelBundle{p, std::move(lda), std::move(speed), std::move(wake), std::move(calibration)};
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model file is missing or has a malformed field: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("model file is inconsistent: ") + e.what());
  }
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace snapgate
