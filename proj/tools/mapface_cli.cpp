// mapface: command-line front end. Exit codes: 0 success, 1 refusal,
// 2 usage or input error, 3 internal error.

#include <mapface/bounds.hpp>
#include <mapface/combmap.hpp>
#include <mapface/configmodel.hpp>
#include <mapface/embed_random.hpp>
#include <mapface/enumerate.hpp>
#include <mapface/graph.hpp>
#include <mapface/io.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace mapface;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out = "csv";
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* app, Common& c, bool with_seed) {
  app->add_option("--out", c.out, "output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", c.threads, "worker threads (0: all cores); results do not depend on it");
  if (with_seed) app->add_option("--seed", c.seed, "random seed");
}

struct GraphSpec {
  std::string text;
  std::optional<Graph> graph;
  std::optional<DegreeSequence> degrees;
};

// kn:N | gnp:N:P | file:PATH | degrees:d1,d2,...
GraphSpec parse_graph_spec(const std::string& s, std::uint64_t seed) {
  GraphSpec g;
  g.text = s;
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("graph specifier '" + s + "' needs a kind prefix (kn:, gnp:, file:, degrees:)");
  const std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      throw UsageError("bad integer '" + t + "' in graph specifier");
    }
    if (used != t.size()) throw UsageError("bad integer '" + t + "' in graph specifier");
    return v;
  };
  if (kind == "kn") {
    const int n = to_int(rest);
    if (n < 1) throw UsageError("kn:N needs N >= 1");
    g.graph = complete_graph(n);
  } else if (kind == "gnp") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw UsageError("expected gnp:N:P");
    const int n = to_int(rest.substr(0, c2));
    double p = 0;
    try {
      p = std::stod(rest.substr(c2 + 1));
    } catch (const std::exception&) {
      throw UsageError("bad probability in '" + s + "'");
    }
    // The graph is drawn from its own stream so that it does not overlap
    // the per-trial substreams.
    Stream rs = Stream(seed).substream(~0ULL);
    g.graph = random_gnp(n, p, rs);
  } else if (kind == "file") {
    g.graph = read_edge_list(rest);
  } else if (kind == "degrees") {
    g.degrees = parse_degrees(rest);
  } else {
    throw UsageError("unknown graph kind '" + kind + "'");
  }
  return g;
}

// argv without --threads, so equal manifests imply equal output bytes.
std::vector<std::string> manifest_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

void emit(const std::string& text) { std::cout << text << std::flush; }

std::string ratio_text(const Rational& r) { return to_string(r) + " (" + fmt(to_double(r)) + ")"; }

nlohmann::json hist_json(const std::map<long long, std::uint64_t>& h) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

nlohmann::json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"stderr", e.stderr_}, {"trials", e.trials}, {"ci95", {e.ci_lo, e.ci_hi}}, {"seed", e.seed}};
}

// ---------------------------------------------------------------------------

struct EnumerateArgs {
  Common c;
  std::string graph;
  bool fix_first = false;
  bool vertex_transitive = false;
  std::string shard = "0/1";
  int short_faces = 0;
};

void run_enumerate(const EnumerateArgs& a, RunManifest& m) {
  const GraphSpec spec = parse_graph_spec(a.graph, a.c.seed);
  if (spec.degrees) {
    if (a.fix_first || a.vertex_transitive || a.short_faces || a.shard != "0/1")
      throw Refusal("--fix-first, --vertex-transitive, --shard and --short-faces apply to graphs, not degree sequences");
    const FixedRotation R(*spec.degrees);
    const auto hist = cm_face_distribution(R);
    const Rational e = expected_faces_exact_cm(R);
    if (a.c.out == "json") {
      emit(json_document({{"graph", a.graph}, {"by_faces", hist_json(hist)}, {"expected_faces", to_string(e)},
                          {"expected_faces_value", to_double(e)}},
                         m));
      return;
    }
    CsvWriter w({"faces", "count"});
    for (const auto& [f, c] : hist) w.row(f, c);
    w.comment("expected_faces=" + ratio_text(e));
    emit(w.finish(m));
    return;
  }
  const Graph& g = *spec.graph;
  CensusJob job;
  job.fix_first_rotation = a.fix_first;
  job.vertex_transitive = a.vertex_transitive;
  job.threads = a.c.threads;
  {
    const auto slash = a.shard.find('/');
    if (slash == std::string::npos) throw UsageError("--shard expects i/t");
    try {
      job.shard_index = static_cast<unsigned>(std::stoul(a.shard.substr(0, slash)));
      job.shard_total = static_cast<unsigned>(std::stoul(a.shard.substr(slash + 1)));
    } catch (const std::exception&) {
      throw UsageError("--shard expects i/t");
    }
  }
  if (a.short_faces) {
    if (!g.is_complete()) throw Refusal("--short-faces is defined for complete graphs");
    const int n = g.num_vertices();
    const Rational e = expected_short_faces_exact(n, a.short_faces, job);
    const Rational formula = short_face_expectation(n, a.short_faces);
    if (a.c.out == "json") {
      emit(json_document({{"graph", a.graph}, {"k", a.short_faces}, {"census", to_string(e)}, {"formula", to_string(formula)}}, m));
      return;
    }
    CsvWriter w({"n", "k", "census", "formula", "equal"});
    w.row(n, a.short_faces, e, formula, e == formula ? "yes" : "no");
    emit(w.finish(m));
    return;
  }
  const FaceCensus c = face_distribution(g, job);
  if (a.c.out == "json") {
    emit(json_document({{"graph", a.graph},
                        {"shard", a.shard},
                        {"reduced", c.reduced},
                        {"scale", c.scale},
                        {"total", c.total},
                        {"by_faces", hist_json(c.by_faces)},
                        {"by_genus", hist_json(c.by_genus)},
                        {"expected_faces", to_string(c.expected_faces())},
                        {"expected_faces_value", to_double(c.expected_faces())},
                        {"expected_genus", to_string(c.expected_genus())},
                        {"expected_genus_value", to_double(c.expected_genus())}},
                       m));
    return;
  }
  CsvWriter w({"faces", "genus", "count"});
  for (const auto& [f, cnt] : c.by_faces) w.row(f, genus_from_faces(g, f), cnt);
  w.comment("total=" + std::to_string(c.total) + (c.reduced ? " (fixed first rotation, scale " + std::to_string(c.scale) + ")" : ""));
  w.comment("expected_faces=" + ratio_text(c.expected_faces()));
  w.comment("expected_genus=" + ratio_text(c.expected_genus()));
  emit(w.finish(m));
}

// ---------------------------------------------------------------------------

struct SampleArgs {
  Common c;
  std::string graph;
  std::uint64_t trials = 100000;
  std::string process = "uniform";
  bool histogram = false;
  bool per_trial = false;
};

// One (faces, genus) pair per trial, trial i drawn from substream i.
std::vector<std::pair<long long, long long>> per_trial_values(const SampleArgs& a, const GraphSpec& spec) {
  std::vector<std::pair<long long, long long>> out(a.trials);
  const Stream root(a.c.seed);
  if (spec.degrees) {
    const FixedRotation R(*spec.degrees);
    parallel_blocks(a.trials, a.c.threads, [&](unsigned, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Stream rs = root.substream(i);
        const CombMap map = R.to_map(sample_matching(R.num_darts(), rs));
        const long long f = count_faces(map);
        out[i] = {f, genus_from_faces(map.graph(), f)};
      }
    });
    return out;
  }
  const Graph& g = *spec.graph;
  const auto values = monte_carlo_values(a.trials, a.c.seed, a.c.threads, face_sampler_factory(g, parse_process(a.process)));
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {values[i], genus_from_faces(g, values[i])};
  return out;
}

void run_sample(const SampleArgs& a, RunManifest& m) {
  const GraphSpec spec = parse_graph_spec(a.graph, a.c.seed);
  if (a.histogram && a.per_trial) throw UsageError("--histogram and --per-trial are exclusive");
  if (a.per_trial) {
    if (spec.degrees && a.process != "uniform") throw Refusal("degree sequences are sampled by uniform matchings only");
    if (a.trials == 0) throw Refusal("trials must be at least 1");
    const auto rows = per_trial_values(a, spec);
    std::uint64_t sum = 0;
    unsigned __int128 sq = 0;
    for (const auto& [f, g] : rows) {
      sum += static_cast<std::uint64_t>(f);
      sq += static_cast<unsigned __int128>(f) * static_cast<unsigned __int128>(f);
    }
    const Estimate e = summarize(a.trials, sum, sq, a.c.seed);
    if (a.c.out == "json") {
      auto arr = nlohmann::json::array();
      for (const auto& [f, g] : rows) arr.push_back({f, g});
      emit(json_document({{"graph", a.graph}, {"process", a.process}, {"trials", arr}, {"estimate", estimate_json(e)}}, m));
      return;
    }
    CsvWriter w({"trial", "faces", "genus"});
    for (std::size_t i = 0; i < rows.size(); ++i) w.row(i, rows[i].first, rows[i].second);
    w.comment("summary: mean=" + fmt(e.mean) + " stderr=" + fmt(e.stderr_) + " ci_lo=" + fmt(e.ci_lo) +
              " ci_hi=" + fmt(e.ci_hi));
    emit(w.finish(m));
    return;
  }
  Estimate e;
  std::map<long long, std::uint64_t> hist;
  std::string process = a.process;
  if (spec.degrees) {
    if (a.process != "uniform") throw Refusal("degree sequences are sampled by uniform matchings only");
    process = "matching";
    const FixedRotation R(*spec.degrees);
    if (a.histogram) {
      const auto values = monte_carlo_values(a.trials, a.c.seed, a.c.threads, [&R]() {
        return [&R](Stream& rs) { return R.count_faces(sample_matching(R.num_darts(), rs)); };
      });
      for (long long v : values) ++hist[v];
    } else {
      e = estimate_cm_faces(R, a.trials, a.c.seed, a.c.threads);
    }
  } else {
    const Process p = parse_process(a.process);
    if (a.histogram) hist = face_histogram(*spec.graph, a.trials, a.c.seed, a.c.threads, p);
    else e = estimate_expected_faces(*spec.graph, a.trials, a.c.seed, a.c.threads, p);
  }
  if (a.histogram) {
    if (a.c.out == "json") {
      emit(json_document({{"graph", a.graph}, {"process", process}, {"trials", a.trials}, {"histogram", hist_json(hist)}}, m));
      return;
    }
    CsvWriter w({"faces", "count"});
    for (const auto& [f, c] : hist) w.row(f, c);
    emit(w.finish(m));
    return;
  }
  if (a.c.out == "json") {
    emit(json_document({{"graph", a.graph}, {"process", process}, {"estimate", estimate_json(e)}}, m));
    return;
  }
  CsvWriter w({"graph", "process", "trials", "seed", "mean", "stderr", "ci_lo", "ci_hi"});
  w.row(a.graph, process, e.trials, e.seed, e.mean, e.stderr_, e.ci_lo, e.ci_hi);
  emit(w.finish(m));
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  Common c;
  std::string mode = "beta";
  long long n_min = 0;
  long long n_max = 100;
  std::string beta_json;
};

void run_bounds(const BoundsArgs& a, RunManifest& m) {
  struct Row {
    long long n;
    double bound;
    std::string source;
    double nu = NAN, mu = NAN;
  };
  std::vector<Row> rows;
  const long long lo_default = a.mode == "logsq" ? 4 : a.mode == "lower" ? 3 : 2;
  const long long lo = std::max(a.n_min, lo_default);
  if (a.n_max < lo) throw Refusal("--n-max must be at least " + std::to_string(lo) + " for mode " + a.mode);
  std::optional<BetaTable> table;
  BetaOptions opt;
  opt.threads = a.c.threads;
  if (a.mode == "beta" || a.mode == "envelope") {
    if (a.mode == "beta" && a.n_max > 4157) throw Refusal("beta table is limited to n <= 4157; use --mode envelope beyond");
    table = beta_table(std::min<long long>(a.n_max, 4157), opt);
    if (!a.beta_json.empty()) {
      std::ofstream f(a.beta_json);
      if (!f) throw UsageError("cannot write '" + a.beta_json + "'");
      f << beta_table_to_json(*table, opt).dump(1) << '\n';
    }
  } else if (!a.beta_json.empty()) {
    throw UsageError("--beta-json needs --mode beta or envelope");
  }
  for (long long n = lo; n <= a.n_max; ++n) {
    if (a.mode == "logsq") {
      rows.push_back({n, logsq_upper(n), "logsq"});
    } else if (a.mode == "lower") {
      rows.push_back({n, lower_bound(static_cast<double>(n)), "lower"});
    } else if (n <= 4157) {
      const BetaEntry& e = table->at(n);
      rows.push_back({n, e.beta, to_string(e.source), e.nu, e.mu});
    } else {
      rows.push_back({n, asymptotic_upper(static_cast<double>(n)), "asymptotic"});
    }
  }
  if (a.c.out == "json") {
    auto arr = nlohmann::json::array();
    for (const Row& r : rows) {
      nlohmann::json j{{"n", r.n}, {"bound", r.bound}, {"source", r.source}};
      if (!std::isnan(r.nu)) {
        j["nu"] = r.nu;
        j["mu"] = r.mu;
      }
      arr.push_back(j);
    }
    emit(json_document({{"mode", a.mode}, {"rows", arr}}, m));
    return;
  }
  CsvWriter w({"n", "bound", "mode", "source", "nu", "mu", "five_ln_n", "five_ln_n_plus_5", "half_ln_n_minus_2"});
  for (const Row& r : rows) {
    const double ln = std::log(static_cast<double>(r.n));
    w.row(r.n, r.bound, a.mode, r.source, std::isnan(r.nu) ? std::string() : fmt(r.nu),
          std::isnan(r.mu) ? std::string() : fmt(r.mu), 5 * ln, 5 * ln + 5, 0.5 * ln - 2);
  }
  emit(w.finish(m));
}

// ---------------------------------------------------------------------------

struct ConfigArgs {
  Common c;
  std::string degrees;
  std::string action = "exact";
  std::string rotation = "shift";
  std::uint64_t trials = 10000;
  bool simple = false;
  std::uint64_t max_attempts = 1000000;
};

void run_configmodel(const ConfigArgs& a, RunManifest& m) {
  const DegreeSequence ds = parse_degrees(a.degrees);
  std::optional<FixedRotation> Ropt;
  if (a.rotation == "random") {
    Stream rs = Stream(a.c.seed).substream(~0ULL);
    Ropt = FixedRotation::random(ds, rs);
  } else {
    Ropt.emplace(ds);
  }
  const FixedRotation& R = *Ropt;
  const auto [blo, bhi] = multigraph_bounds(ds.m);
  if (a.action == "exact") {
    const auto hist = cm_face_distribution(R);
    const Rational e = expected_faces_exact_cm(R);
    if (a.c.out == "json") {
      emit(json_document({{"degrees", ds.d},
                          {"rotation", R.cycles()},
                          {"by_faces", hist_json(hist)},
                          {"expected_faces", to_string(e)},
                          {"expected_faces_value", to_double(e)},
                          {"bounds", {to_string(blo), to_string(bhi)}}},
                         m));
      return;
    }
    CsvWriter w({"faces", "count"});
    for (const auto& [f, c] : hist) w.row(f, c);
    w.comment("expected_faces=" + ratio_text(e));
    w.comment("multigraph_bounds=[" + to_string(blo) + ", " + to_string(bhi) + "]");
    emit(w.finish(m));
    return;
  }
  if (a.action == "formula") {
    const FaceOracle o = count_possible_faces(R);
    const Rational e = expected_faces_formula(o.h, o.m);
    if (a.c.out == "json") {
      auto rows = nlohmann::json::array();
      for (int k = 1; k <= o.kmax; ++k) {
        const GkBounds b = gk_bounds(o.m, k, ds.d_max);
        rows.push_back({{"k", k},
                        {"h", o.h.at(k).str()},
                        {"g", o.g.at(k).str()},
                        {"h_simple", o.h_s.at(k).str()},
                        {"g_simple", o.g_s.at(k).str()},
                        {"g_lower", b.lower.str()},
                        {"g_upper", b.upper.str()}});
      }
      emit(json_document({{"degrees", ds.d}, {"rows", rows}, {"expected_faces", to_string(e)}, {"expected_faces_value", to_double(e)}}, m));
      return;
    }
    CsvWriter w({"k", "h_k", "g_k", "h_simple_k", "g_simple_k", "g_lower", "g_upper"});
    for (int k = 1; k <= o.kmax; ++k) {
      const GkBounds b = gk_bounds(o.m, k, ds.d_max);
      w.row(k, o.h.at(k), o.g.at(k), o.h_s.at(k), o.g_s.at(k), b.lower, b.upper);
    }
    w.comment("expected_faces=" + ratio_text(e));
    emit(w.finish(m));
    return;
  }
  // sample
  const SimpleStatistics st = simple_statistics(ds);
  if (a.simple) {
    const SimpleRun r = sample_simple_maps(R, a.trials, a.c.seed, a.max_attempts, a.c.threads);
    if (a.c.out == "json") {
      emit(json_document({{"degrees", ds.d},
                          {"accepted", r.accepted},
                          {"attempts", r.attempts},
                          {"exhausted", r.exhausted},
                          {"acceptance_rate", r.acceptance_rate()},
                          {"lambda", to_string(st.lambda)},
                          {"reference", st.simple_probability_reference},
                          {"faces", estimate_json(r.faces)}},
                         m));
      return;
    }
    CsvWriter w({"trials", "accepted", "attempts", "exhausted", "acceptance_rate", "reference", "mean", "stderr"});
    w.row(a.trials, r.accepted, r.attempts, r.exhausted, r.acceptance_rate(), st.simple_probability_reference, r.faces.mean,
          r.faces.stderr_);
    w.comment("lambda=" + ratio_text(st.lambda) + "; reference e^(-lambda-lambda^2) is asymptotic");
    emit(w.finish(m));
    return;
  }
  const Estimate e = estimate_cm_faces(R, a.trials, a.c.seed, a.c.threads);
  if (a.c.out == "json") {
    emit(json_document({{"degrees", ds.d}, {"estimate", estimate_json(e)}, {"bounds", {to_string(blo), to_string(bhi)}}}, m));
    return;
  }
  CsvWriter w({"trials", "seed", "mean", "stderr", "ci_lo", "ci_hi", "bound_lo", "bound_hi"});
  w.row(e.trials, e.seed, e.mean, e.stderr_, e.ci_lo, e.ci_hi, to_double(blo), to_double(bhi));
  emit(w.finish(m));
}

// ---------------------------------------------------------------------------

struct GnpArgs {
  Common c;
  int n = 100;
  double p = 0.1;
  std::uint64_t trials = 10000;
  bool connected_only = false;
  std::uint64_t max_attempts = 100000;
};

void run_gnp(const GnpArgs& a, RunManifest& m) {
  const GnpResult r = gnp_experiment(a.n, a.p, a.trials, a.c.seed, a.c.threads, a.connected_only, a.max_attempts);
  if (a.c.out == "json") {
    emit(json_document({{"n", a.n},
                        {"p", a.p},
                        {"connected_only", a.connected_only},
                        {"estimate", estimate_json(r.estimate)},
                        {"reference_ln_pn2", r.reference},
                        {"ratio", r.ratio},
                        {"rejected", r.rejected}},
                       m));
    return;
  }
  CsvWriter w({"n", "p", "trials", "seed", "mean", "stderr", "reference_ln_pn2", "ratio", "rejected"});
  w.row(a.n, a.p, r.estimate.trials, r.estimate.seed, r.estimate.mean, r.estimate.stderr_, r.reference, r.ratio, r.rejected);
  emit(w.finish(m));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random embeddings of graphs: exact census, sampling, bounds and the configuration model."};
  app.require_subcommand(1);

  EnumerateArgs ea;
  auto* en = app.add_subcommand("enumerate", "exact face census over all rotation systems");
  en->add_option("--graph", ea.graph, "kn:N | gnp:N:P | file:PATH | degrees:d1,d2,...")->required();
  en->add_flag("--fix-first", ea.fix_first, "fix the rotation at vertex 1 and rescale (complete or vertex-transitive graphs)");
  en->add_flag("--vertex-transitive", ea.vertex_transitive, "assert that the graph is vertex-transitive");
  en->add_option("--shard", ea.shard, "process shard i of t (i/t)");
  en->add_option("--short-faces", ea.short_faces, "average number of faces through k distinct vertices (K_n only)");
  add_common(en, ea.c, true);

  SampleArgs sa;
  auto* sm = app.add_subcommand("sample", "Monte Carlo estimate of the expected number of faces");
  sm->add_option("--graph", sa.graph, "graph specifier")->required();
  sm->add_option("--trials", sa.trials, "number of samples");
  sm->add_option("--process", sa.process, "uniform | A | B")->check(CLI::IsMember({"uniform", "A", "B", "a", "b"}));
  sm->add_flag("--histogram", sa.histogram, "print the face-count histogram instead of the mean");
  sm->add_flag("--per-trial", sa.per_trial, "print one row (trial, faces, genus) per sample with the summary as a comment");
  add_common(sm, sa.c, true);

  BoundsArgs ba;
  auto* bo = app.add_subcommand("bounds", "closed-form and computed bounds on E[F(K_n)]");
  bo->add_option("--mode", ba.mode, "logsq | beta | lower | envelope")->check(CLI::IsMember({"logsq", "beta", "lower", "envelope"}));
  bo->add_option("--n-min", ba.n_min, "first n");
  bo->add_option("--n-max", ba.n_max, "last n");
  bo->add_option("--beta-json", ba.beta_json, "write the beta table with provenance to this path");
  add_common(bo, ba.c, false);

  ConfigArgs ca;
  auto* cm = app.add_subcommand("configmodel", "configuration model with a fixed rotation");
  cm->add_option("action", ca.action, "exact | formula | sample")->check(CLI::IsMember({"exact", "formula", "sample"}));
  cm->add_option("--degrees", ca.degrees, "degree sequence, e.g. 3,3,4")->required();
  cm->add_option("--rotation", ca.rotation, "shift | random")->check(CLI::IsMember({"shift", "random"}));
  cm->add_option("--trials", ca.trials, "number of samples");
  cm->add_flag("--simple", ca.simple, "rejection-sample simple graphs");
  cm->add_option("--max-attempts", ca.max_attempts, "rejection attempts per simple sample");
  add_common(cm, ca.c, true);

  GnpArgs ga;
  auto* gn = app.add_subcommand("gnp", "faces of uniform embeddings of G(n,p)");
  gn->add_option("--n", ga.n, "number of vertices");
  gn->add_option("--p", ga.p, "edge probability");
  gn->add_option("--trials", ga.trials, "number of samples");
  gn->add_flag("--connected-only", ga.connected_only, "redraw disconnected graphs");
  gn->add_option("--max-attempts", ga.max_attempts, "redraw limit per trial");
  add_common(gn, ga.c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  RunManifest m;
  m.args = manifest_args(argc, argv);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (en->parsed()) {
      m.subcommand = "enumerate";
      m.seed = ea.c.seed;
      m.has_seed = ea.graph.rfind("gnp:", 0) == 0;
      run_enumerate(ea, m);
    } else if (sm->parsed()) {
      m.subcommand = "sample";
      m.seed = sa.c.seed;
      m.has_seed = true;
      run_sample(sa, m);
    } else if (bo->parsed()) {
      m.subcommand = "bounds";
      run_bounds(ba, m);
    } else if (cm->parsed()) {
      m.subcommand = "configmodel";
      m.seed = ca.c.seed;
      m.has_seed = ca.action == "sample" || ca.rotation == "random";
      run_configmodel(ca, m);
    } else if (gn->parsed()) {
      m.subcommand = "gnp";
      m.seed = ga.c.seed;
      m.has_seed = true;
      run_gnp(ga, m);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const Refusal& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "# wall_time_s: " << fmt(secs) << '\n';
  return 0;
}
