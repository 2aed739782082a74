// meandim: command line front end. Every subcommand except `run` and
// `validate` builds a one-request config from its flags and runs it.

#include "meandim/run.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using meandim::run::Json;

struct Output {
  std::string json_path;
  std::string tsv_path;
  bool pretty = true;
};

bool write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path);
  out << text;
  if (!out) std::cerr << "meandim: cannot write " << path << "\n";
  return static_cast<bool>(out);
}

int execute(const Json& config, const Output& out, bool tsv_to_stdout) {
  try {
    meandim::run::RunOutput r = meandim::run::run_config(config);
    const std::string report = r.report.dump(out.pretty ? 2 : -1) + "\n";
    bool ok = true;
    if (!out.json_path.empty()) ok = write_file(out.json_path, report) && ok;
    if (!out.tsv_path.empty()) ok = write_file(out.tsv_path, r.tsv) && ok;
    if (out.json_path.empty() && out.tsv_path.empty()) std::cout << (tsv_to_stdout ? r.tsv : report);
    for (const auto& res : r.report["results"])
      if (res["status"] == "error")
        std::cerr << "meandim: request '" << res["id"].get<std::string>() << "' failed: "
                  << res["error"].get<std::string>() << "\n";
    if (!ok) return 1;
    return r.any_error ? 1 : 0;
  } catch (const meandim::run::ConfigError& e) {
    std::cerr << "meandim: config error at " << e.what() << "\n";
    return 2;
  }
}

std::optional<Json> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "meandim: cannot read " << path << "\n";
    return std::nullopt;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return meandim::run::parse_config_text(buf.str());
  } catch (const meandim::run::ConfigError& e) {
    std::cerr << "meandim: " << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

// Flag values collected as text and copied into the request when given.
struct Fields {
  std::map<std::string, std::string> text;
  std::map<std::string, long long> integer;
  std::map<std::string, std::vector<std::string>> lists;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;

  void str(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, text[key], help);
  }
  void num(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, integer[key], help);
  }
  void list(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, lists[key], help)->delimiter(';');
  }
  void flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_flag(flag, flags[key], help);
  }

  // Dotted keys ("sofic.d") land in nested objects.
  static void put(Json& j, const std::string& key, Json v) {
    auto dot = key.find('.');
    if (dot == std::string::npos) {
      j[key] = std::move(v);
      return;
    }
    put(j[key.substr(0, dot)], key.substr(dot + 1), std::move(v));
  }

  Json request(const std::string& op) const {
    Json r{{"op", op}};
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      if (text.contains(key)) put(r, key, text.at(key));
      if (integer.contains(key)) put(r, key, integer.at(key));
      if (flags.contains(key)) put(r, key, flags.at(key));
      if (lists.contains(key)) {
        const auto& v = lists.at(key);
        put(r, key, v.size() == 1 ? Json(v[0]) : Json(v));
      }
    }
    return r;
  }
};

struct Sub {
  CLI::App* app;
  std::string op;
  Fields fields;
  std::function<void(Json&)> finish;
};

void add_sofic(Sub& s) {
  s.fields.str(s.app, "--construction", "sofic.construction", "random, cyclic, torus, quotient or regular");
  s.fields.num(s.app, "--d", "sofic.d", "degree");
  s.fields.num(s.app, "--n", "sofic.n", "torus side");
  s.fields.num(s.app, "--d-min", "sofic.d_min", "least degree for quotient search");
  s.fields.num(s.app, "--d-max", "sofic.d_max", "largest degree for quotient search");
  s.fields.num(s.app, "--seed", "sofic.seed", "seed");
}

void add_metric(Sub& s) {
  s.fields.str(s.app, "--metric-base", "metric.base", "disc or induced");
  s.fields.num(s.app, "--metric-depth", "metric.depth", "terms of the induced series");
  s.fields.str(s.app, "--metric-window", "metric.window", "window of the base metric");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sofic mean dimension and mean rank toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", meandim::run::kToolVersion);
  Output out;
  std::optional<int> threads;
  app.add_option("--threads", threads, "worker threads (default: hardware)");
  app.add_option("--json", out.json_path, "write the JSON report here ('-' for stdout)");
  app.add_option("--tsv", out.tsv_path, "write the TSV table here ('-' for stdout)");
  app.add_flag("!--compact", out.pretty, "single-line JSON");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->fallthrough();
  auto* validate = app.add_subcommand("validate", "check a JSON config without running it");
  validate->add_option("config", config_path, "config file")->required();

  std::vector<std::unique_ptr<Sub>> subs;
  auto sub = [&](const std::string& op, const std::string& help) -> Sub& {
    subs.push_back(std::make_unique<Sub>(Sub{app.add_subcommand(op, help), op, {}, {}}));
    subs.back()->app->fallthrough();
    return *subs.back();
  };

  {
    Sub& s = sub("group-info", "ball sizes and enumeration of a group");
    s.fields.str(s.app, "--group", "group", "descriptor, e.g. free:2, Z^2");
    s.fields.num(s.app, "--radius", "radius", "largest ball radius");
  }
  {
    Sub& s = sub("sofic-gen", "build a sofic approximation");
    s.fields.str(s.app, "--group", "group", "group descriptor");
    add_sofic(s);
  }
  {
    Sub& s = sub("sofic-audit", "goodness of a sofic approximation on a window");
    s.fields.str(s.app, "--group", "group", "group descriptor");
    s.fields.str(s.app, "--F", "F", "window, e.g. ball:2");
    s.fields.str(s.app, "--tau", "tau", "tolerance in (0,1)");
    add_sofic(s);
  }
  {
    Sub& s = sub("tile", "quasitile the model space and verify the tiling");
    s.fields.str(s.app, "--group", "group", "group descriptor");
    s.fields.list(s.app, "--F", "F", "windows, ';'-separated");
    s.fields.list(s.app, "--tau", "tau", "tolerances, ';'-separated");
    s.fields.str(s.app, "--eta", "eta", "excluded fraction in [0,1)");
    s.fields.flag(s.app, "--permissive", "permissive", "skip the precondition checks");
    add_sofic(s);
    static long long first = -1, count = 0;
    s.app->add_option("--seeds-first", first, "first seed of a seed range");
    s.app->add_option("--seeds-count", count, "length of the seed range");
    s.finish = [](Json& r) {
      if (count > 0) r["seeds"] = Json{{"first", first < 0 ? 0 : first}, {"count", count}};
    };
  }
  {
    Sub& s = sub("entropy", "bracket on the naive eps-entropy");
    s.fields.str(s.app, "--group", "group", "group descriptor (default Z)");
    s.fields.str(s.app, "--system", "system", "golden-mean, full:k or cube:m");
    s.fields.str(s.app, "--eps", "eps", "scale");
    s.fields.str(s.app, "--family", "family", "window family, e.g. intervals:1..20");
    add_metric(s);
  }
  {
    Sub& s = sub("mdim", "bracket on the naive mean dimension at one scale");
    s.fields.str(s.app, "--group", "group", "group descriptor (default Z)");
    s.fields.str(s.app, "--system", "system", "cube:m, full:k, ...");
    s.fields.str(s.app, "--eps", "eps", "scale");
    s.fields.str(s.app, "--family", "family", "window family");
    s.fields.str(s.app, "--eps0", "eps0", "largest scale for the linear lower bound");
    s.fields.flag(s.app, "--cube-refinement", "cube_refinement", "slope m for the cube");
  }
  {
    Sub& s = sub("ocap", "bracket on the orbit capacity of a cylinder union");
    s.fields.str(s.app, "--group", "group", "group descriptor (default Z)");
    s.fields.str(s.app, "--system", "system", "system");
    s.fields.str(s.app, "--family", "family", "window family");
    s.fields.str(s.app, "--mode", "mode", "global or local");
    static std::vector<std::string> cylinders;
    s.app->add_option("--cylinder", cylinders, "WINDOW=LETTERS, e.g. 'interval:0..1=1,1'")->required();
    s.finish = [](Json& r) {
      Json list = Json::array();
      for (const auto& c : cylinders) {
        auto eq = c.rfind('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--cylinder", "expected WINDOW=LETTERS");
        Json letters = Json::array();
        std::stringstream in(c.substr(eq + 1));
        for (std::string tok; std::getline(in, tok, ',');) letters.push_back(std::stoi(tok));
        list.push_back(Json{{"window", c.substr(0, eq)}, {"letters", letters}});
      }
      r["cylinders"] = list;
    };
  }
  {
    Sub& s = sub("meanrank", "bracket on the naive mean rank of a module");
    s.fields.str(s.app, "--preset", "module.preset", "ZGamma-free, Z-trivial or F2-ball2");
    s.fields.str(s.app, "--module-file", "module.file", "module file");
    s.fields.str(s.app, "--family", "family", "window family");
    s.fields.str(s.app, "--schedule", "schedule", "truncation radii, '2,3' or '+0,+1'");
    static std::string surrogate_f;
    static long long surrogate_d = 0;
    s.app->add_option("--surrogate-F", surrogate_f, "window for the sofic rank surrogate");
    s.app->add_option("--surrogate-d", surrogate_d, "cyclic degree for the surrogate");
    s.finish = [](Json& r) {
      if (!surrogate_f.empty())
        r["surrogate"] = Json{{"F", surrogate_f}, {"sofic", Json{{"d", surrogate_d > 0 ? surrogate_d : 8}}}};
    };
  }
  {
    Sub& s = sub("microstates", "separated microstates in the model space");
    s.fields.str(s.app, "--group", "group", "group descriptor (default Z)");
    s.fields.str(s.app, "--system", "system", "system");
    s.fields.str(s.app, "--F", "F", "window");
    s.fields.str(s.app, "--delta", "delta", "tolerance >= 0");
    s.fields.str(s.app, "--mode", "mode", "count, exhaustive or lowerbound");
    s.fields.str(s.app, "--eps", "eps", "separation");
    s.fields.num(s.app, "--budget", "budget", "search budget");
    add_metric(s);
    add_sofic(s);
  }
  {
    Sub& s = sub("decay", "entropy and capacity ratios over a grid of scales");
    s.fields.str(s.app, "--group", "group", "group descriptor (default Z)");
    s.fields.str(s.app, "--system", "system", "system");
    s.fields.list(s.app, "--eps", "eps", "scales, ';'-separated");
    s.fields.str(s.app, "--family", "family", "window family");
    add_metric(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (threads) setenv("MEANDIM_THREADS", std::to_string(*threads).c_str(), 1);

  if (run->parsed() || validate->parsed()) {
    auto config = load_config(config_path);
    if (!config) return 2;
    if (validate->parsed()) {
      try {
        meandim::run::check_config(*config);
      } catch (const meandim::run::ConfigError& e) {
        std::cerr << "meandim: config error at " << e.what() << "\n";
        return 2;
      }
      std::cout << "ok: " << (*config)["requests"].size() << " request(s)\n";
      return 0;
    }
    return execute(*config, out, false);
  }

  for (auto& s : subs) {
    if (!s->app->parsed()) continue;
    Json request;
    try {
      request = s->fields.request(s->op);
      if (s->finish) s->finish(request);
    } catch (const CLI::Error& e) {
      std::cerr << "meandim: " << e.what() << "\n";
      return 2;
    }
    Json config{{"version", 1}, {"requests", Json::array({request})}};
    return execute(config, out, true);
  }
  return 2;
}
