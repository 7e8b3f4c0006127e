#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "cryptospn/circuit/serialize.hpp"
#include "cryptospn/compiler/compiler.hpp"
#include "cryptospn/compiler/layout_io.hpp"
#include "cryptospn/cost/cost_model.hpp"
#include "cryptospn/errors.hpp"
#include "cryptospn/gc/session.hpp"
#include "cryptospn/spn/inference.hpp"
#include "cryptospn/spn/json_io.hpp"
#include "cryptospn/spn/rat_spn.hpp"
#include "cryptospn/spn/validate.hpp"

using namespace cryptospn;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* v = std::getenv("CRYPTOSPN_LOG");
    const std::string s = v ? v : "warn";
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= log_level()) std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return 2;
  if (dynamic_cast<const ProtocolError*>(&e)) return 3;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  return 1;
}

std::string default_listen() {
  const char* v = std::getenv("CRYPTOSPN_LISTEN");
  return v ? v : "127.0.0.1:7766";
}

std::string fmt_double(double v, int digits = 7) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

Evidence default_evidence(const SpnGraph& spn) {
  Evidence e;
  e.values.assign(spn.num_rvs(), 0.0);
  return e;
}

SessionConfig role_config(Role role) {
  SessionConfig cfg;
  cfg.role = role;
  return cfg;
}

struct LoopbackRun {
  SessionReport garbler;
  EvaluatorResult evaluator;
};

LoopbackRun loopback_session(const CompiledSpn& c, const BitVector& server_bits, const BitVector& client_bits) {
  TcpListener listener(Endpoint::parse("127.0.0.1:0"));
  LoopbackRun run;
  std::exception_ptr garbler_error;
  std::thread garbler([&] {
    try {
      auto t = listener.accept();
      run.garbler = run_garbler(c, server_bits, *t, role_config(Role::Garbler));
    } catch (...) {
      garbler_error = std::current_exception();
    }
  });
  try {
    auto t = tcp_connect(Endpoint{"127.0.0.1", listener.port()});
    run.evaluator = run_evaluator(c, client_bits, *t, role_config(Role::Evaluator));
  } catch (...) {
    garbler.join();
    throw;
  }
  garbler.join();
  if (garbler_error) std::rethrow_exception(garbler_error);
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private sum-product network inference with garbled circuits"};
  app.require_subcommand(1);
  bool json_out = false;

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check an SPN file");
  std::string validate_file;
  validate_cmd->add_option("spn", validate_file, "SPN file")->required();

  // ratgen
  auto* ratgen_cmd = app.add_subcommand("ratgen", "Generate a random region-graph SPN");
  RatSpnConfig rat;
  std::string rat_out, rat_family = "bern";
  std::optional<std::uint64_t> rat_param_seed;
  ratgen_cmd->add_option("--rvs", rat.num_rvs, "Random variables")->required();
  ratgen_cmd->add_option("--depth", rat.split_depth, "Split depth")->required();
  ratgen_cmd->add_option("--replicas", rat.num_replicas, "Replicas")->required();
  ratgen_cmd->add_option("--sums", rat.sums_per_region, "Sum nodes per internal region")->required();
  ratgen_cmd->add_option("--leaves", rat.leaves_per_rv, "Leaves per random variable")->required();
  ratgen_cmd->add_option("--seed", rat.seed, "Structure seed")->required();
  ratgen_cmd->add_option("--family", rat_family, "Leaf family")->check(CLI::IsMember({"bern", "gauss", "pois"}));
  ratgen_cmd->add_option("--param-seed", rat_param_seed, "Draw random parameters with this seed");
  ratgen_cmd->add_option("-o,--output", rat_out, "Output file")->required();

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "Compile an SPN into a circuit and layout");
  std::string compile_in, compile_out;
  int compile_bits = 32;
  bool compile_hide = false, compile_marg = false;
  compile_cmd->add_option("spn", compile_in, "SPN file")->required();
  compile_cmd->add_option("--bits", compile_bits, "Float precision")->check(CLI::IsMember({32, 64}));
  compile_cmd->add_flag("--hide-scope", compile_hide, "Route leaf inputs through a selection network");
  compile_cmd->add_flag("--marginals", compile_marg, "Allow missing evidence");
  compile_cmd->add_option("-o,--output", compile_out, "Circuit file (layout goes to <file>.layout.json)")->required();

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Show circuit statistics and layouts");
  std::string inspect_in;
  inspect_cmd->add_option("circuit", inspect_in, "Circuit file")->required();
  inspect_cmd->add_flag("--json", json_out, "Structured output");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict AND gates and communication");
  std::string predict_in, predict_constants = "measured";
  int predict_bits = 32;
  std::uint32_t predict_kappa = 128;
  bool predict_hide = false, predict_marg = false;
  predict_cmd->add_option("spn", predict_in, "SPN file")->required();
  predict_cmd->add_option("--bits", predict_bits, "Float precision")->check(CLI::IsMember({32, 64}));
  predict_cmd->add_option("--constants", predict_constants, "Gate count source")
      ->check(CLI::IsMember({"measured", "paper"}));
  predict_cmd->add_option("--kappa", predict_kappa, "Security parameter");
  predict_cmd->add_flag("--hide-scope", predict_hide, "Include a selection network");
  predict_cmd->add_flag("--marginals", predict_marg, "Include marginal MUX gates");
  predict_cmd->add_flag("--json", json_out, "Structured output");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "Plain inference without cryptography");
  std::string infer_spn, infer_ev, infer_given;
  infer_cmd->add_option("spn", infer_spn, "SPN file")->required();
  infer_cmd->add_option("--evidence", infer_ev, "Evidence file")->required();
  infer_cmd->add_option("--given", infer_given, "Conditioning evidence file");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the garbler for incoming queries");
  std::string serve_circuit, serve_params, serve_listen = default_listen();
  std::size_t serve_sessions = 0;
  std::optional<std::uint64_t> serve_seed;
  serve_cmd->add_option("circuit", serve_circuit, "Circuit file")->required();
  serve_cmd->add_option("--params", serve_params, "SPN file with the model parameters")->required();
  serve_cmd->add_option("--listen", serve_listen, "host:port (default $CRYPTOSPN_LISTEN)");
  serve_cmd->add_option("--sessions", serve_sessions, "Stop after this many sessions (0 = unlimited)");
  serve_cmd->add_option("--seed", serve_seed, "Deterministic garbling seed (testing only)");
  serve_cmd->add_flag("--json", json_out, "Structured session reports");

  // query
  auto* query_cmd = app.add_subcommand("query", "Run the evaluator against a server");
  std::string query_circuit, query_ev, query_connect;
  bool query_prob = false;
  query_cmd->add_option("circuit", query_circuit, "Circuit file")->required();
  query_cmd->add_option("--evidence", query_ev, "Evidence file")->required();
  query_cmd->add_option("--connect", query_connect, "host:port")->required();
  query_cmd->add_flag("--probability", query_prob, "Also print the probability");
  query_cmd->add_flag("--json", json_out, "Structured output");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Time loopback sessions");
  std::string bench_in, bench_ev;
  int bench_bits = 32;
  int bench_runs = 1;
  bool bench_hide = false, bench_marg = false;
  bench_cmd->add_option("spn", bench_in, "SPN file")->required();
  bench_cmd->add_option("--bits", bench_bits, "Float precision")->check(CLI::IsMember({32, 64}));
  bench_cmd->add_option("--runs", bench_runs, "Sessions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--evidence", bench_ev, "Evidence file (default: every variable 0)");
  bench_cmd->add_flag("--hide-scope", bench_hide, "Compile with a selection network");
  bench_cmd->add_flag("--marginals", bench_marg, "Compile with marginal support");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate_cmd) {
      const SpnGraph spn = load_spn(validate_file, false);
      const auto report = validate(spn);
      std::cout << report.to_string() << "\n";
      return report.valid ? 0 : 1;
    }

    if (*ratgen_cmd) {
      rat.family = leaf_family_from_tag(rat_family);
      SpnGraph spn = generate_rat_spn(rat);
      if (rat_param_seed) spn = randomize_parameters(spn, *rat_param_seed);
      save_spn(rat_out, spn);
      std::cout << "wrote " << rat_out << ": " << spn.count(NodeType::Sum) << " sums, "
                << spn.count(NodeType::Product) << " products, " << spn.count(NodeType::Leaf) << " leaves, digest "
                << spn_digest(spn) << "\n";
      return 0;
    }

    if (*compile_cmd) {
      const SpnGraph spn = load_spn(compile_in);
      const CompiledSpn c = compile(spn, FloatFormat::from_bits(compile_bits), compile_hide, compile_marg);
      save_compiled(compile_out, c);
      const GateStats st = stats(c.circuit);
      std::cout << "wrote " << compile_out << " and " << layout_path(compile_out).string() << "\n"
                << "  AND gates " << st.and_count << ", XOR " << st.xor_count << ", INV " << st.inv_count
                << ", depth " << st.depth << "\n"
                << "  client input bits " << st.client_input_bits << ", server input bits " << st.server_input_bits
                << "\n";
      if (c.hide_scope) {
        std::cout << "  selection network: " << c.selection_switches << " switches of " << c.selection_width
                  << " bits\n";
      }
      return 0;
    }

    if (*inspect_cmd) {
      const CompiledSpn c = load_compiled(inspect_in);
      const GateStats st = stats(c.circuit);
      if (json_out) {
        nlohmann::json j = layout_to_json(c);
        j["stats"] = {{"and", st.and_count}, {"xor", st.xor_count}, {"inv", st.inv_count},
                      {"const", st.const_count}, {"depth", st.depth}, {"outputs", st.output_bits}};
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      std::cout << "circuit " << inspect_in << " (b" << c.precision.bits() << ", " << to_string(c.family)
                << " leaves, " << c.num_rvs << " rvs, " << c.num_leaves << " leaves)\n"
                << "  spn digest " << c.spn_digest << "\n"
                << "  gates " << c.circuit.num_gates() << ": AND " << st.and_count << ", XOR " << st.xor_count
                << ", INV " << st.inv_count << ", CONST " << st.const_count << ", depth " << st.depth << "\n"
                << "  scope hiding " << (c.hide_scope ? "on" : "off") << ", marginals "
                << (c.marginals ? "on" : "off") << "\n";
      if (c.hide_scope) std::cout << "  selection switches " << c.selection_switches << "\n";
      for (const auto* lay : {&c.client_layout, &c.server_layout}) {
        std::cout << "  " << (lay == &c.client_layout ? "client" : "server") << " input " << lay->total_bits()
                  << " bits:";
        for (auto tag : {InputTag::RvValue, InputTag::RvLogFactorial, InputTag::RvKnownFlag, InputTag::LeafParam,
                         InputTag::SumWeight, InputTag::SelectionControl}) {
          if (const auto k = lay->bits_with_tag(tag)) std::cout << " " << to_string(tag) << "=" << k;
        }
        std::cout << "\n";
      }
      return 0;
    }

    if (*predict_cmd) {
      const SpnGraph spn = load_spn(predict_in);
      const FloatFormat fmt = FloatFormat::from_bits(predict_bits);
      const CostConstants k =
          predict_constants == "paper" ? CostConstants::paper(fmt) : CostConstants::measured(fmt);
      const CostReport r = predict_communication(spn, fmt, k, predict_kappa, predict_hide, predict_marg);
      std::cout << (json_out ? r.to_json().dump(2) + "\n" : r.to_table());
      return 0;
    }

    if (*infer_cmd) {
      const SpnGraph spn = load_spn(infer_spn);
      const Evidence ev = load_evidence(infer_ev);
      const double ll = infer_given.empty() ? log_likelihood(spn, ev)
                                            : conditional_log_likelihood(spn, ev, load_evidence(infer_given));
      std::cout << "log2_prob " << fmt_double(ll, 10) << "\nprob " << std::setprecision(10) << std::exp2(ll) << "\n";
      return 0;
    }

    if (*serve_cmd) {
      const CompiledSpn c = load_compiled(serve_circuit);
      const SpnGraph spn = load_spn(serve_params);
      const BitVector server_bits = derive_server_inputs(spn, c);
      TcpListener listener(Endpoint::parse(serve_listen));
      log(LogLevel::Info,
          "listening on " + Endpoint{Endpoint::parse(serve_listen).host, listener.port()}.to_string());
      int last_rc = 0;
      for (std::size_t k = 0; serve_sessions == 0 || k < serve_sessions; ++k) {
        auto transport = listener.accept();
        log(LogLevel::Info, "session " + std::to_string(k + 1) + " accepted");
        try {
          SessionConfig cfg = role_config(Role::Garbler);
          cfg.seed = serve_seed;
          const SessionReport r = run_garbler(c, server_bits, *transport, cfg);
          std::cout << (json_out ? r.to_json().dump() + "\n" : r.to_table()) << std::flush;
          last_rc = 0;
        } catch (const std::exception& e) {
          last_rc = exit_code(e);
          log(LogLevel::Error, std::string("session failed: ") + e.what());
        }
      }
      return last_rc;
    }

    if (*query_cmd) {
      const CompiledSpn c = load_compiled(query_circuit);
      const Evidence ev = load_evidence(query_ev);
      const BitVector client_bits = derive_client_inputs(c, ev);
      auto transport = tcp_connect(Endpoint::parse(query_connect));
      const EvaluatorResult r = run_evaluator(c, client_bits, *transport, role_config(Role::Evaluator));
      if (json_out) {
        nlohmann::json j{{"log2_prob", r.log2_prob}, {"session", r.report.to_json()}};
        if (query_prob) j["prob"] = std::exp2(r.log2_prob);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "log2_prob " << fmt_double(r.log2_prob, 7) << "\n";
        if (query_prob) std::cout << "prob " << std::setprecision(10) << std::exp2(r.log2_prob) << "\n";
        log(LogLevel::Info, r.report.to_table());
      }
      return 0;
    }

    if (*bench_cmd) {
      const SpnGraph spn = load_spn(bench_in);
      const FloatFormat fmt = FloatFormat::from_bits(bench_bits);
      const CompiledSpn c = compile(spn, fmt, bench_hide, bench_marg);
      const Evidence ev = bench_ev.empty() ? default_evidence(spn) : load_evidence(bench_ev);
      const BitVector server_bits = derive_server_inputs(spn, c);
      const BitVector client_bits = derive_client_inputs(c, ev);
      const CostReport pred =
          predict_communication(spn, fmt, CostConstants::measured(fmt), 128, bench_hide, bench_marg);
      std::cout << "bench b" << fmt.bits() << ", " << pred.and_gates << " AND gates, " << bench_runs << " run(s)\n";
      std::cout << std::left << std::setw(6) << "run" << std::right << std::setw(12) << "setup s" << std::setw(12)
                << "online s" << std::setw(16) << "setup B" << std::setw(14) << "online B" << std::setw(12)
                << "framing B" << "\n";
      double sum_setup = 0, sum_online = 0;
      Reconciliation rec;
      std::uint64_t setup_b = 0, online_b = 0, framing_b = 0;
      for (int i = 0; i < bench_runs; ++i) {
        const LoopbackRun run = loopback_session(c, server_bits, client_bits);
        const SessionReport& r = run.evaluator.report;
        setup_b = r.setup_payload_bytes();
        online_b = r.online_payload_bytes();
        framing_b = r.framing_bytes();
        sum_setup += r.setup.seconds;
        sum_online += r.online.seconds;
        rec = reconcile(pred, r);
        std::cout << std::left << std::setw(6) << (i + 1) << std::right << std::setw(12) << fmt_double(r.setup.seconds, 4)
                  << std::setw(12) << fmt_double(r.online.seconds, 4) << std::setw(16) << setup_b << std::setw(14)
                  << online_b << std::setw(12) << framing_b << "\n";
      }
      std::cout << std::left << std::setw(6) << "mean" << std::right << std::setw(12)
                << fmt_double(sum_setup / bench_runs, 4) << std::setw(12) << fmt_double(sum_online / bench_runs, 4)
                << std::setw(16) << setup_b << std::setw(14) << online_b << std::setw(12) << framing_b << "\n";
      std::cout << "reconciliation (payload bits)\n" << rec.to_table();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
