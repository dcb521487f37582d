// snapgate: train -> calibrate -> run -> eval, plus the synthetic session
// generator. Exit codes: 0 ok, 1 usage, 2 data error, 3 calibration failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snapgate/error.hpp"
#include "snapgate/event_log.hpp"
#include "snapgate/log.hpp"
#include "snapgate/model_io.hpp"
#include "snapgate/synth.hpp"
#include "snapgate/tcp_ingest.hpp"
#include "snapgate/workflows.hpp"

namespace {

using namespace snapgate;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCalibration = 3;

struct PipelineFlags {
  double classifier_ms = 200;
  double classifier_step_ms = 100;
  double wake_ms = 150;
  double wake_step_ms = 50;
  double eps = 0.0;
  double template_lead = 0.7;

  void add(CLI::App* app) {
    app->add_option("--classifier-window-ms", classifier_ms, "Classifier window length")->capture_default_str();
    app->add_option("--classifier-increment-ms", classifier_step_ms, "Classifier window increment")
        ->capture_default_str();
    app->add_option("--wake-window-ms", wake_ms, "RMS window length for wake templates")->capture_default_str();
    app->add_option("--wake-increment-ms", wake_step_ms, "RMS window increment")->capture_default_str();
    app->add_option("--eps", eps, "ZC/SSC deadband in raw units")->capture_default_str();
    app->add_option("--template-lead", template_lead, "Seconds of template before each snap instant")
        ->capture_default_str();
  }

  PipelineConfig build(const SessionFile& session) const {
    PipelineConfig p;
    p.sample_rate = session.sample_rate;
    p.channels = session.channels;
    p.classifier_window = WindowSpec::from_ms(classifier_ms, classifier_step_ms, session.sample_rate);
    p.wake_window = WindowSpec::from_ms(wake_ms, wake_step_ms, session.sample_rate);
    p.eps = eps;
    p.template_lead = template_lead;
    p.validate();
    return p;
  }
};

std::vector<double> s_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ConfigError("s grid needs step > 0 and max >= min");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(lo + step * static_cast<double>(i));
  return grid;
}

std::vector<synth::AdlProfile> parse_profiles(const std::vector<std::string>& names) {
  std::vector<synth::AdlProfile> out;
  for (const auto& n : names) {
    const auto p = synth::profile_from_string(n);
    if (!p) throw ConfigError("unknown ADL profile '" + n + "'");
    out.push_back(*p);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-demand myoelectric gating: wake-gesture toggled LDA control"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.footer("Set SNAPGATE_LOG=error|warn|info|debug to change log verbosity.");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic session and its annotations");
  std::string preset = "session";
  std::uint64_t seed = 1;
  std::uint64_t subject = 7;
  double duration = 600.0;
  std::size_t snap_count = 40;
  std::vector<std::string> profile_names = {"walking-low", "typing-bursty", "driving-sustained"};
  bool no_contractions = false;
  double jitter = 0.05;
  std::string synth_out, synth_ann;
  synth_cmd->add_option("--preset", preset, "training | adl | session")
      ->check(CLI::IsMember({"training", "adl", "session"}))
      ->capture_default_str();
  synth_cmd->add_option("--seed", seed, "Noise and burst seed")->capture_default_str();
  synth_cmd->add_option("--subject", subject, "Simulated wearer seed; share it between training and use")
      ->capture_default_str();
  synth_cmd->add_option("--duration", duration, "Seconds (adl and session presets)")->capture_default_str();
  synth_cmd->add_option("--snaps", snap_count, "Snap count for the session preset (on/off pairs)")
      ->capture_default_str();
  synth_cmd->add_option("--profiles", profile_names, "ADL profiles, cycled in order")->capture_default_str();
  synth_cmd->add_flag("--no-contractions", no_contractions, "Session preset without class contractions");
  synth_cmd->add_option("--jitter", jitter, "Snap micro-burst onset jitter, +- seconds")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Session file to write")->required();
  synth_cmd->add_option("--annotations", synth_ann, "Annotation file to write")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit the classifier and wake templates from a training session");
  std::string train_session, train_ann, train_out;
  PipelineFlags pipeline_flags;
  double lambda = 1e-3;
  std::string priors = "empirical";
  std::size_t vote_length = 5;
  std::size_t vote_quorum = 3;
  train_cmd->add_option("--session", train_session, "Training session file")->required();
  train_cmd->add_option("--annotations", train_ann, "Training annotations")->required();
  train_cmd->add_option("--out", train_out, "Model file to write")->required();
  pipeline_flags.add(train_cmd);
  train_cmd->add_option("--lambda", lambda, "LDA covariance shrinkage")->capture_default_str();
  train_cmd->add_option("--priors", priors, "empirical | uniform")
      ->check(CLI::IsMember({"empirical", "uniform"}))
      ->capture_default_str();
  train_cmd->add_option("--vote-length", vote_length, "Wake vote buffer length")->capture_default_str();
  train_cmd->add_option("--vote-quorum", vote_quorum, "Below-threshold votes needed to fire")
      ->capture_default_str();

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Pick the wake threshold against a snap-free ADL recording");
  std::string cal_model, cal_adl, cal_out, cal_roc;
  double s_min = 0.0, s_max = 5.0, s_step = 0.1;
  cal_cmd->add_option("--model", cal_model, "Trained model file")->required();
  cal_cmd->add_option("--adl", cal_adl, "Mock-ADL session (>= 60 s, no snaps)")->required();
  cal_cmd->add_option("--out", cal_out, "Calibrated model file to write")->required();
  cal_cmd->add_option("--s-min", s_min, "Smallest s in the grid")->capture_default_str();
  cal_cmd->add_option("--s-max", s_max, "Largest s in the grid")->capture_default_str();
  cal_cmd->add_option("--s-step", s_step, "Grid step")->capture_default_str();
  cal_cmd->add_option("--roc-out", cal_roc, "Also write the ROC table here ('-' for stdout)");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the gated pipeline over a session file or a TCP stream");
  std::string run_model, run_session, run_tcp, run_out;
  double refractory = 1.0;
  bool trace = false;
  std::string overflow = "drop-oldest";
  run_cmd->add_option("--model", run_model, "Calibrated model file")->required();
  auto* session_opt = run_cmd->add_option("--session", run_session, "Session file to replay");
  auto* tcp_opt = run_cmd->add_option("--tcp", run_tcp, "Listen address host:port for a live producer");
  session_opt->excludes(tcp_opt);
  run_cmd->add_option("--out", run_out, "Event log to write")->required();
  run_cmd->add_option("--refractory", refractory, "Seconds after a toggle during which wake detections are ignored")
      ->capture_default_str();
  run_cmd->add_flag("--trace", trace, "Include every wake score in the log");
  run_cmd->add_option("--overflow", overflow, "TCP queue policy: drop-oldest | block")
      ->check(CLI::IsMember({"drop-oldest", "block"}))
      ->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score an event log against annotations");
  std::string eval_log, eval_ann, eval_out = "-";
  double tolerance = 1.0;
  std::string rej_model, rej_training, rej_training_ann, rej_adl;
  eval_cmd->add_option("--log", eval_log, "Event log from run")->required();
  eval_cmd->add_option("--annotations", eval_ann, "Annotations of the session that was run")->required();
  eval_cmd->add_option("--out", eval_out, "Report file ('-' for stdout)")->capture_default_str();
  eval_cmd->add_option("--tolerance", tolerance, "Seconds a toggle may sit from its snap")->capture_default_str();
  auto* rm = eval_cmd->add_option("--model", rej_model, "Model for the rejection baseline section");
  auto* rt = eval_cmd->add_option("--training-session", rej_training, "Training session (rejection TPR)");
  auto* ra = eval_cmd->add_option("--training-annotations", rej_training_ann, "Training annotations");
  auto* rd = eval_cmd->add_option("--adl-session", rej_adl, "ADL session (rejection FPR)");
  rm->needs(rt)->needs(ra)->needs(rd);
  rt->needs(rm);
  ra->needs(rm);
  rd->needs(rm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) {
      const auto profiles = parse_profiles(profile_names);
      synth::SynthSpec spec;
      if (preset == "training") {
        spec = synth::training_spec(seed, subject);
      } else if (preset == "adl") {
        spec = synth::adl_spec(seed, subject, duration, profiles);
      } else {
        spec = synth::session_spec(seed, subject, duration, snap_count, profiles, !no_contractions);
      }
      spec.snap_jitter = jitter;
      const auto out = synth::synthesize(spec);
      write_session(synth_out, out.session);
      write_annotations(synth_ann, out.annotations);
    } else if (*train_cmd) {
      const auto session = read_session(train_session);
      TrainOptions options;
      options.pipeline = pipeline_flags.build(session);
      options.lda.regularization = lambda;
      options.lda.priors = priors == "uniform" ? PriorMode::Uniform : PriorMode::Empirical;
      options.vote_length = vote_length;
      options.vote_quorum = vote_quorum;
      save_model(train_out, train(session, read_annotations(train_ann), options));
    } else if (*cal_cmd) {
      auto models = load_model(cal_model);
      try {
        calibrate(models, read_session(cal_adl), s_grid(s_min, s_max, s_step));
      } catch (const CalibrationError& e) {
        std::cerr << "snapgate: calibration failed: " << e.what() << '\n'
                  << format_calibration(CalibrationResult{e.best(), e.roc()});
        return kExitCalibration;
      }
      save_model(cal_out, models);
      if (!cal_roc.empty()) write_text(cal_roc, format_calibration(*models.calibration));
    } else if (*run_cmd) {
      const auto models = load_model(run_model);
      models.validate_for_inference();
      EngineConfig config;
      config.gate.refractory = refractory;
      config.keep_trace = trace;
      SessionResult result;
      if (!run_tcp.empty()) {
        TcpIngestOptions options;
        const auto colon = run_tcp.rfind(':');
        if (colon == std::string::npos) throw ConfigError("--tcp expects host:port");
        options.host = run_tcp.substr(0, colon);
        options.port = static_cast<std::uint16_t>(std::stoul(run_tcp.substr(colon + 1)));
        options.channels = models.pipeline.channels;
        options.sample_rate = models.pipeline.sample_rate;
        options.overflow = overflow == "block" ? OverflowPolicy::Block : OverflowPolicy::DropOldest;
        TcpFrameSource source(options);
        std::cerr << "snapgate: listening on " << options.host << ':' << source.port() << std::endl;
        result = run_stream([&] { return source.next(); }, models, config);
        const auto s = source.stats();
        log_info("ingest: " + std::to_string(s.received) + " frames, " + std::to_string(s.malformed) +
                 " malformed, " + std::to_string(s.dropped) + " dropped, " + std::to_string(s.stalls) + " stalls");
      } else if (!run_session.empty()) {
        const auto session = read_session(run_session);
        if (session.channels != models.pipeline.channels ||
            std::abs(session.sample_rate - models.pipeline.sample_rate) > 1e-9) {
          throw ConfigError("session channels/sample rate do not match the model");
        }
        result = run_frames(session.frames, models, config);
      } else {
        throw ConfigError("run needs --session or --tcp");
      }
      write_event_log(run_out, make_event_log(result, models));
    } else if (*eval_cmd) {
      const auto report = evaluate(read_event_log(eval_log), read_annotations(eval_ann), EvalOptions{tolerance});
      if (!rej_model.empty()) {
        const auto analysis = analyze_rejection(load_model(rej_model), read_session(rej_training),
                                                read_annotations(rej_training_ann), read_session(rej_adl));
        write_text(eval_out, format_report(report, &analysis));
      } else {
        write_text(eval_out, format_report(report));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "snapgate: " << e.what() << '\n';
    return kExitData;
  }
  return EXIT_SUCCESS;
}
