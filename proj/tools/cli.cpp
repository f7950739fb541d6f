#include "cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "shimura/cdunif.hpp"
#include "shimura/ecdb.hpp"
#include "shimura/equations.hpp"
#include "shimura/graphs.hpp"
#include "shimura/quotients.hpp"

namespace shimura::cli {

namespace {

using json = nlohmann::ordered_json;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class fmt { text, json, csv, dot };

struct config {
  i64 D = 0, N = 1, p = 0, m = 0;
  std::string W;
  fmt format = fmt::text;
  bool as_json = false, as_csv = false, as_dot = false;
  std::string ecdb_path, cls, resume, stage = "dual";
  int jobs = 1;
  bool count_only = false;
  i64 max_genus = 2, bound = 19226700;
  std::string curve, twist, e1, e2;
  std::vector<std::string> points;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

mpq_class parse_q(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw usage_error("not a rational number: '" + s + "'");
  q.canonicalize();
  return q;
}

std::vector<mpq_class> parse_qs(const std::string& s) {
  std::vector<mpq_class> out;
  for (auto& t : split(s, ',')) out.push_back(parse_q(t));
  return out;
}

std::string qstr(const mpq_class& q) { return q.get_str(); }

void need_level(const config& c) {
  if (!valid_level(c.D, c.N)) {
    try {
      check_level(c.D, c.N);
    } catch (const arith_error& e) {
      throw usage_error(e.what());
    }
  }
}

al_subgroup parse_W(const config& c) {
  std::vector<i64> gens;
  for (auto& t : split(c.W, ',')) {
    try {
      std::size_t pos;
      gens.push_back(std::stoll(t, &pos));
      if (pos != t.size()) throw 0;
    } catch (...) {
      throw usage_error("-W: bad divisor '" + t + "'");
    }
  }
  try {
    return al_subgroup::generated(c.D * c.N, gens);
  } catch (const arith_error& e) {
    throw usage_error(e.what());
  }
}

// primes of D, or just -p if given (must divide D)
std::vector<i64> primes_of_D(const config& c) {
  std::vector<i64> ps;
  for (auto& f : factor(c.D)) ps.push_back(f.p);
  if (c.p == 0) return ps;
  if (c.D % c.p || !is_prime(c.p)) throw usage_error("-p must be a prime dividing D");
  return {c.p};
}

json W_json(const al_subgroup& W) {
  json a = json::array();
  for (i64 m : W.elements)
    if (m != 1) a.push_back(m);
  return a;
}

short_weierstrass parse_curve(const std::string& s, const std::string& flag) {
  auto v = parse_qs(s);
  if (v.size() == 2) return {v[0], v[1]};
  if (v.size() == 5) return short_model({v[0], v[1], v[2], v[3], v[4]});
  throw usage_error(flag + ": expected A,B or a1,a2,a3,a4,a6");
}

json model_to_json(const hyperelliptic_model& H) { return json::parse(model_json(H)); }

// --- subcommands -----------------------------------------------------------

void cmd_genus(const config& c, std::ostream& out) {
  need_level(c);
  auto W = parse_W(c);
  i64 g = quotient_genus(c.D, c.N, W);
  if (c.format == fmt::json)
    out << json{{"D", c.D}, {"N", c.N}, {"W", W_json(W)}, {"genus", g}}.dump() << "\n";
  else if (c.format == fmt::csv)
    out << "D,N,W,genus\n" << c.D << "," << c.N << ",\"" << format_W(W) << "\"," << g << "\n";
  else
    out << g << "\n";
}

void cmd_fixed_points(const config& c, std::ostream& out) {
  need_level(c);
  std::vector<i64> ms;
  if (c.m) {
    if ((c.D * c.N) % c.m || std::gcd(c.m, c.D * c.N / c.m) != 1 || c.m == 1)
      throw usage_error("-m must be a Hall divisor of DN other than 1");
    ms.push_back(c.m);
  } else {
    for (i64 m : hall_divisors(c.D * c.N))
      if (m != 1) ms.push_back(m);
  }
  json j = json::array();
  if (c.format == fmt::csv) out << "D,N,m,fixed_points\n";
  for (i64 m : ms) {
    i64 n = fixed_point_count(c.D, c.N, m);
    if (c.format == fmt::json)
      j.push_back({{"m", m}, {"fixed_points", n}});
    else if (c.format == fmt::csv)
      out << c.D << "," << c.N << "," << m << "," << n << "\n";
    else
      out << "w" << m << " " << n << "\n";
  }
  if (c.format == fmt::json) out << json{{"D", c.D}, {"N", c.N}, {"fixed_points", j}}.dump() << "\n";
}

// checkpoint: JSON list of closed D-intervals already scanned; scanned rows live in <path>.rows
struct checkpoint {
  std::string path;
  std::vector<std::pair<i64, i64>> done;
  int lock_fd = -1;

  void open(i64 max_genus, i64 bound) {
    lock_fd = ::open((path + ".lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (lock_fd < 0 || flock(lock_fd, LOCK_EX | LOCK_NB) != 0)
      throw std::runtime_error("checkpoint " + path + " is locked by another run");
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      json j;
      try {
        in >> j;
        for (auto& iv : j) done.push_back({iv.at(0).get<i64>(), iv.at(1).get<i64>()});
      } catch (const std::exception& e) {
        throw usage_error("--resume: unreadable checkpoint " + path + ": " + e.what());
      }
    }
    std::string rows = path + ".rows";
    if (!std::filesystem::exists(rows)) {
      if (!done.empty()) throw usage_error("--resume: " + rows + " is missing");
      std::ofstream o(rows);
      o << json{{"max_genus", max_genus}, {"bound", bound}}.dump() << "\n";
    } else {
      std::ifstream in(rows);
      std::string line;
      std::getline(in, line);
      auto h = json::parse(line, nullptr, false);
      if (h.is_discarded() || h.value("max_genus", -1) != max_genus || h.value("bound", -1) != bound)
        throw usage_error("--resume: checkpoint was written for other --max-genus/--bound");
    }
  }
  ~checkpoint() {
    if (lock_fd >= 0) ::close(lock_fd);
  }

  void load_rows(enumeration_result& res) const {
    std::ifstream in(path + ".rows");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = json::parse(line, nullptr, false);
      if (j.is_discarded()) break;  // torn final line from an interrupted run
      for (auto& s : j["stars"]) res.stars.push_back({s[0], s[1], s[2]});
      for (auto& r : j["records"]) {
        al_subgroup W{r[2].get<std::vector<i64>>()};
        res.records.push_back({r[0], r[1], W, r[3]});
      }
    }
  }

  void append(i64 lo, i64 hi, const std::vector<star_level>& st, const std::vector<quotient_record>& rc) {
    json j{{"lo", lo}, {"hi", hi}, {"stars", json::array()}, {"records", json::array()}};
    for (auto& s : st) j["stars"].push_back({s.D, s.N, s.genus});
    for (auto& r : rc) j["records"].push_back({r.D, r.N, r.W.elements, r.genus});
    {
      std::ofstream o(path + ".rows", std::ios::app);
      o << j.dump() << "\n";
    }
    done.push_back({lo, hi});
    std::sort(done.begin(), done.end());
    std::vector<std::pair<i64, i64>> merged;
    for (auto iv : done) {
      if (!merged.empty() && iv.first <= merged.back().second + 1)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    done = merged;
    json out = json::array();
    for (auto [a, b] : done) out.push_back({a, b});
    std::string tmp = path + ".tmp";
    {
      std::ofstream o(tmp);
      o << out.dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
  }
};

void cmd_enumerate(const config& c, std::ostream& out) {
  if (c.max_genus < 0) throw usage_error("--max-genus must be >= 0");
  if (c.bound < 1) throw usage_error("--bound must be >= 1");
  if (c.jobs < 1) throw usage_error("--jobs must be >= 1");
  enumerate_options o;
  o.max_genus = c.max_genus;
  o.bound = c.bound;
  o.jobs = c.jobs;
  std::unique_ptr<checkpoint> ck;
  if (!c.resume.empty()) {
    ck = std::make_unique<checkpoint>();
    ck->path = c.resume;
    ck->open(c.max_genus, c.bound);
    o.skip = ck->done;
    o.on_chunk = [&](i64 lo, i64 hi, auto& st, auto& rc) { ck->append(lo, hi, st, rc); };
  }
  auto res = enumerate_all(o);
  if (ck) {
    // rows of this run were appended too; reload everything and dedupe
    res = {};
    ck->load_rows(res);
    auto key = [](const star_level& s) { return std::tuple(s.D, s.N, s.genus); };
    std::sort(res.stars.begin(), res.stars.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    res.stars.erase(std::unique(res.stars.begin(), res.stars.end()), res.stars.end());
    std::sort(res.records.begin(), res.records.end(), record_less);
    res.records.erase(std::unique(res.records.begin(), res.records.end()), res.records.end());
  }
  std::map<i64, i64> nrec, nstar;
  for (i64 g = 0; g <= c.max_genus; ++g) nrec[g] = nstar[g] = 0;
  for (auto& r : res.records) ++nrec[r.genus];
  for (auto& s : res.stars) ++nstar[s.genus];

  if (c.format == fmt::json) {
    json j{{"max_genus", c.max_genus}, {"bound", c.bound}, {"records", json::object()}, {"star_levels", json::object()}};
    for (auto [g, n] : nrec) j["records"][std::to_string(g)] = n;
    for (auto [g, n] : nstar) j["star_levels"][std::to_string(g)] = n;
    if (!c.count_only) {
      j["rows"] = json::array();
      for (auto& r : res.records) j["rows"].push_back({{"D", r.D}, {"N", r.N}, {"W", W_json(r.W)}, {"genus", r.genus}});
    }
    out << j.dump() << "\n";
  } else if (c.format == fmt::csv) {
    if (c.count_only) {
      out << "genus,records,star_levels\n";
      for (auto [g, n] : nrec) out << g << "," << n << "," << nstar[g] << "\n";
    } else {
      out << "D,N,W,genus\n";
      for (auto& r : res.records) out << r.D << "," << r.N << ",\"" << format_W(r.W) << "\"," << r.genus << "\n";
    }
  } else {
    if (!c.count_only)
      for (auto& r : res.records) out << r.D << " " << r.N << " <" << format_W(r.W) << "> " << r.genus << "\n";
    for (auto [g, n] : nrec) out << "genus " << g << ": " << n << " records, " << nstar[g] << " star levels\n";
  }
}

void cmd_dual_graph(const config& c, std::ostream& out) {
  need_level(c);
  if (!c.p) throw usage_error("dual-graph needs -p");
  primes_of_D(c);
  auto W = parse_W(c);
  auto ctx = base_graph(c.D, c.N, c.p);
  graph g;
  if (c.stage == "base")
    g = ctx.G;
  else if (c.stage == "quotient")
    g = cd_quotient(ctx, W);
  else if (c.stage == "star")
    g = star(cd_quotient(ctx, W));
  else if (c.stage == "resolved")
    g = resolve(star(cd_quotient(ctx, W)));
  else if (c.stage == "dual")
    g = dual_graph(resolve(star(cd_quotient(ctx, W))));
  else
    throw usage_error("--stage must be base, quotient, star, resolved or dual");
  if (c.format == fmt::dot) {
    out << to_dot(g);
  } else if (c.format == fmt::json) {
    out << to_json(g) << "\n";
  } else if (c.format == fmt::csv) {
    out << "edge,o,t,inv,len\n";
    for (std::size_t y = 0; y < g.edges.size(); ++y) {
      auto& e = g.edges[y];
      out << y << "," << e.o << "," << e.t << "," << e.inv << "," << e.len << "\n";
    }
  } else {
    out << "vertices " << g.num_vertices() << "\nedges " << g.num_unoriented() << "\nhalf-edges " << g.num_half_edges()
        << "\nbetti " << betti(g) << "\n";
    for (std::size_t y = 0; y < g.edges.size(); ++y) {
      auto& e = g.edges[y];
      if (e.inv < static_cast<int>(y)) continue;
      out << e.o << (e.inv == static_cast<int>(y) ? " half" : " -- " + std::to_string(e.t))
          << " len " << e.len << "\n";
    }
  }
}

void cmd_kodaira(const config& c, std::ostream& out) {
  need_level(c);
  auto W = parse_W(c);
  if (!is_squarefree(c.N)) throw usage_error("kodaira needs N squarefree");
  if (quotient_genus(c.D, c.N, W) != 1) throw usage_error("kodaira needs a genus 1 quotient");
  json j = json::object();
  if (c.format == fmt::csv) out << "p,n\n";
  for (i64 p : primes_of_D(c)) {
    i64 n = kodaira_In(c.D, c.N, W, p);
    if (c.format == fmt::json)
      j[std::to_string(p)] = n;
    else if (c.format == fmt::csv)
      out << p << "," << n << "\n";
    else
      out << "p=" << p << " I" << n << "\n";
  }
  if (c.format == fmt::json) out << json{{"D", c.D}, {"N", c.N}, {"W", W_json(W)}, {"symbols", j}}.dump() << "\n";
}

void cmd_local_points(const config& c, std::ostream& out) {
  need_level(c);
  auto W = parse_W(c);
  json j = json::object();
  if (c.format == fmt::csv) out << "p,has_point\n";
  for (i64 p : primes_of_D(c)) {
    bool b = has_Qp_point(c.D, c.N, W, p);
    if (c.format == fmt::json)
      j[std::to_string(p)] = b;
    else if (c.format == fmt::csv)
      out << p << "," << (b ? "true" : "false") << "\n";
    else
      out << "p=" << p << " " << (b ? "true" : "false") << "\n";
  }
  if (c.format == fmt::json) out << json{{"D", c.D}, {"N", c.N}, {"W", W_json(W)}, {"local_points", j}}.dump() << "\n";
}

void print_models(const config& c, std::ostream& out, const std::vector<hyperelliptic_model>& hs) {
  if (c.format == fmt::json) {
    json a = json::array();
    for (auto& h : hs) a.push_back(model_to_json(h));
    out << a.dump() << "\n";
  } else if (c.format == fmt::csv) {
    out << "c0,c1,c2,c3,c4,c5,c6\n";
    for (auto& h : hs) {
      for (int k = 0; k <= 6; ++k) out << (k ? "," : "") << qstr(h.coeff(k));
      out << "\n";
    }
  } else {
    for (auto& h : hs) out << render(h) << "\n";
  }
}

void cmd_twist_quartics(const config& c, std::ostream& out) {
  if (c.curve.empty() || c.twist.empty() || c.points.empty())
    throw usage_error("twist-quartics needs --curve, --twist and at least one --point");
  auto E = parse_curve(c.curve, "--curve");
  auto d = parse_q(c.twist);
  if (d == 0) throw usage_error("--twist must be nonzero");
  std::vector<hyperelliptic_model> hs;
  for (auto& s : c.points) {
    auto v = parse_qs(s);
    if (v.size() != 2) throw usage_error("--point: expected a,b");
    hs.push_back(twist_quartic({v[0], v[1]}, E, d));
  }
  print_models(c, out, hs);
}

void cmd_bielliptic(const config& c, std::ostream& out) {
  if (c.e1.empty() || c.e2.empty()) throw usage_error("bielliptic needs --e1 and --e2");
  auto hs = bielliptic_candidates(parse_curve(c.e1, "--e1"), parse_curve(c.e2, "--e2"));
  print_models(c, out, hs);
}

void cmd_resolve_class(const config& c, std::ostream& out) {
  need_level(c);
  auto W = parse_W(c);
  if (c.cls.empty()) throw usage_error("resolve-class needs --class");
  std::string path = c.ecdb_path;
  if (path.empty())
    if (const char* e = std::getenv("SHIMURA_ECDB")) path = e;
  if (path.empty()) throw usage_error("resolve-class needs --ecdb or SHIMURA_ECDB");
  ecdb db;
  try {
    db = ecdb::load(path);
  } catch (const ecdb_error& e) {
    throw usage_error(e.what());
  }
  if (db.isogeny_class(c.cls).empty()) throw usage_error("class " + c.cls + " is not in " + path);
  if (!is_squarefree(c.N)) throw usage_error("resolve-class needs N squarefree");
  if (quotient_genus(c.D, c.N, W) != 1) throw usage_error("resolve-class needs a genus 1 quotient");
  auto r = resolve_isomorphism_class(c.D, c.N, W, c.cls, db);
  if (c.format == fmt::json) {
    json s = json::object();
    for (auto [p, n] : r.symbols) s[std::to_string(p)] = n;
    out << json{{"class", c.cls}, {"symbols", s}, {"unique", r.unique()}, {"labels", r.labels}}.dump() << "\n";
  } else if (c.format == fmt::csv) {
    out << "label\n";
    for (auto& l : r.labels) out << l << "\n";
  } else {
    for (auto& l : r.labels) out << l << "\n";
    if (!r.unique()) out << "ambiguous: " << r.labels.size() << " members match\n";
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Atkin-Lehner quotients of Shimura curves"};
  app.require_subcommand(1, 1);
  config c;

  auto level = [&](CLI::App* s, bool need_W) {
    s->add_option("-D", c.D, "discriminant")->required();
    s->add_option("-N", c.N, "level")->capture_default_str();
    auto w = s->add_option("-W", c.W, "Atkin-Lehner generators, comma-separated Hall divisors");
    if (need_W) w->required();
  };
  auto formats = [&](CLI::App* s, bool dot) {
    auto j = s->add_flag("--json", c.as_json, "JSON output");
    auto v = s->add_flag("--csv", c.as_csv, "CSV output");
    j->excludes(v);
    if (dot) s->add_flag("--dot", c.as_dot, "DOT output")->excludes(j)->excludes(v);
  };

  auto genus = app.add_subcommand("genus", "genus of X_0^D(N)/W");
  level(genus, false);
  formats(genus, false);

  auto fp = app.add_subcommand("fixed-points", "fixed points of w_m on X_0^D(N)");
  level(fp, false);
  fp->add_option("-m", c.m, "Hall divisor (default: all)");
  formats(fp, false);

  auto en = app.add_subcommand("enumerate", "all quotients of genus <= max-genus with DN <= bound");
  en->add_option("--max-genus", c.max_genus)->capture_default_str();
  en->add_option("--bound", c.bound)->capture_default_str();
  en->add_option("--jobs", c.jobs)->capture_default_str();
  en->add_option("--resume", c.resume, "checkpoint file");
  en->add_flag("--count-only", c.count_only);
  formats(en, false);

  auto dg = app.add_subcommand("dual-graph", "Cerednik-Drinfeld graphs of X_0^D(N)/W at p | D");
  level(dg, false);
  dg->add_option("-p", c.p)->required();
  dg->add_option("--stage", c.stage, "base, quotient, star, resolved or dual")->capture_default_str();
  formats(dg, true);

  auto ko = app.add_subcommand("kodaira", "Kodaira symbols I_n at p | D of a genus 1 quotient");
  level(ko, true);
  ko->add_option("-p", c.p);
  formats(ko, false);

  auto lp = app.add_subcommand("local-points", "Q_p-points at p | D");
  level(lp, false);
  lp->add_option("-p", c.p);
  formats(lp, false);

  auto tq = app.add_subcommand("twist-quartics", "quartic models from Mordell-Weil representatives");
  tq->add_option("--curve", c.curve, "A,B or a1,a2,a3,a4,a6");
  tq->add_option("--twist", c.twist, "d");
  tq->add_option("--point", c.points, "a,b (repeatable)");
  formats(tq, false);

  auto bi = app.add_subcommand("bielliptic", "genus 2 curves with the given bielliptic quotients");
  bi->add_option("--e1", c.e1, "A,B or a1,a2,a3,a4,a6");
  bi->add_option("--e2", c.e2, "A,B or a1,a2,a3,a4,a6");
  formats(bi, false);

  auto rc = app.add_subcommand("resolve-class", "match Kodaira symbols inside an isogeny class");
  level(rc, true);
  rc->add_option("--class", c.cls)->required();
  rc->add_option("--ecdb", c.ecdb_path, "curve database (default $SHIMURA_ECDB)");
  formats(rc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  c.format = c.as_json ? fmt::json : c.as_csv ? fmt::csv : c.as_dot ? fmt::dot : fmt::text;

  auto* sub = app.get_subcommands().front();
  std::string name = sub->get_name();
  try {
    if (name == "genus") cmd_genus(c, out);
    else if (name == "fixed-points") cmd_fixed_points(c, out);
    else if (name == "enumerate") cmd_enumerate(c, out);
    else if (name == "dual-graph") cmd_dual_graph(c, out);
    else if (name == "kodaira") cmd_kodaira(c, out);
    else if (name == "local-points") cmd_local_points(c, out);
    else if (name == "twist-quartics") cmd_twist_quartics(c, out);
    else if (name == "bielliptic") cmd_bielliptic(c, out);
    else if (name == "resolve-class") cmd_resolve_class(c, out);
  } catch (const usage_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace shimura::cli
