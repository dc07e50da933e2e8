#include "phonon_herald/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "phonon_herald/csv.hpp"
#include "phonon_herald/errors.hpp"

namespace herald::exp {

namespace pt = boost::property_tree;
using model::SegmentKind;

namespace {

constexpr const char* kFigureNames[] = {"fig1e", "fig2a", "fig2b", "fig3a", "fig3b", "fig3c",
                                        "figS1", "dlcz", "oracle-compare", "g2", "validate"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("'" + key + "' expects a number, got '" + raw + "'");
  return v;
}

int parse_int(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("'" + key + "' expects an integer, got '" + raw + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_list(const std::string& raw, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(raw, ',')) out.push_back(parse_double(item, key));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + io::format_double(v[i]);
  return s;
}

using Member = std::variant<double SweepSpec::*, int SweepSpec::*, std::vector<double> SweepSpec::*>;

struct SweepField {
  const char* key;
  Member member;
};

const std::vector<SweepField>& sweep_fields() {
  static const std::vector<SweepField> fields = {
      {"t_r", &SweepSpec::t_r},
      {"tau_max", &SweepSpec::tau_max},
      {"tau_points", &SweepSpec::tau_points},
      {"t_off", &SweepSpec::t_off},
      {"t_off_min", &SweepSpec::t_off_min},
      {"t_off_max", &SweepSpec::t_off_max},
      {"t_off_points", &SweepSpec::t_off_points},
      {"n_th", &SweepSpec::n_th},
      {"n_r", &SweepSpec::n_r},
      {"points_per_period", &SweepSpec::points_per_period},
      {"fig3c_tau_max", &SweepSpec::fig3c_tau_max},
      {"gains", &SweepSpec::gains},
      {"n0_min", &SweepSpec::n0_min},
      {"n0_max", &SweepSpec::n0_max},
      {"n0_points", &SweepSpec::n0_points},
      {"t_max", &SweepSpec::t_max},
      {"t_points", &SweepSpec::t_points},
      {"rep_rate", &SweepSpec::rep_rate},
      {"eta_collection", &SweepSpec::eta_collection},
      {"eta_fiber", &SweepSpec::eta_fiber},
      {"eta_detection", &SweepSpec::eta_detection},
      {"target_fidelity", &SweepSpec::target_fidelity},
      {"dlcz_n_0", &SweepSpec::dlcz_n_0},
      {"oracle_na", &SweepSpec::oracle_na},
      {"oracle_nb", &SweepSpec::oracle_nb},
      {"oracle_n_th", &SweepSpec::oracle_n_th},
      {"oracle_n_0", &SweepSpec::oracle_n_0},
  };
  return fields;
}

// Rate keys accepted both as rad/s and as f/2pi in Hz.
struct RateField {
  const char* key;
  double model::SystemParams::*member;
};

constexpr RateField kRates[] = {{"g0", &model::SystemParams::g0},
                                {"kappa", &model::SystemParams::kappa},
                                {"gamma", &model::SystemParams::gamma},
                                {"omega_m", &model::SystemParams::omega_m},
                                {"omega_c", &model::SystemParams::omega_c}};

void apply_system(const pt::ptree& sec, model::SystemParams& p) {
  std::set<std::string> seen;
  for (const auto& [key, node] : sec) {
    const std::string val = node.get_value<std::string>();
    const std::string full = "system." + key;
    if (key == "n_th") {
      p.n_th = parse_double(val, full);
    } else if (key == "n_0") {
      p.n_0 = parse_double(val, full);
    } else {
      bool matched = false;
      for (const auto& r : kRates) {
        const std::string base = r.key;
        if (key == base || key == base + "_over_2pi") {
          if (!seen.insert(base).second)
            throw ConfigError("system." + base + " given twice (rad/s and _over_2pi)");
          const double v = parse_double(val, full);
          p.*(r.member) = key == base ? v : model::hz_to_angular(v);
          matched = true;
        }
      }
      if (!matched) throw ConfigError("unknown key '" + full + "'");
    }
  }
}

void apply_sweep(const pt::ptree& sec, FigureJob& job) {
  for (const auto& [key, node] : sec) {
    const std::string val = node.get_value<std::string>();
    const std::string full = "sweep." + key;
    if (key == "figure") continue;  // handled first
    if (key == "t_w") {
      if (trim(val) == "auto") job.sweep.t_w.reset();
      else job.sweep.t_w = parse_double(val, full);
      continue;
    }
    const auto& fields = sweep_fields();
    auto it = std::find_if(fields.begin(), fields.end(), [&](const SweepField& f) { return key == f.key; });
    if (it == fields.end()) throw ConfigError("unknown key '" + full + "'");
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(job.sweep.*member)>;
          if constexpr (std::is_same_v<T, double>) job.sweep.*member = parse_double(val, full);
          else if constexpr (std::is_same_v<T, int>) job.sweep.*member = parse_int(val, full);
          else job.sweep.*member = parse_list(val, full);
        },
        it->member);
  }
}

FigureJob job_from_tree(const pt::ptree& tree, std::optional<FigureId> figure) {
  for (const auto& [name, sec] : tree) {
    if (name != "system" && name != "schedule" && name != "sweep")
      throw ConfigError("unknown section [" + name + "]");
    if (!sec.data().empty()) throw ConfigError("key '" + name + "' outside a section");
  }
  FigureId id = FigureId::Fig2a;
  if (auto f = tree.get_optional<std::string>("sweep.figure")) id = figure_from_string(trim(*f));
  if (figure) id = *figure;

  FigureJob job = FigureJob::defaults_for(id);
  if (auto sec = tree.get_child_optional("system")) apply_system(*sec, job.system);
  if (auto sec = tree.get_child_optional("schedule")) {
    for (const auto& [key, node] : *sec) {
      if (key != "segments") throw ConfigError("unknown key 'schedule." + key + "'");
      job.schedule = parse_schedule(node.get_value<std::string>());
    }
  }
  if (auto sec = tree.get_child_optional("sweep")) apply_sweep(*sec, job);
  job.validate();
  return job;
}

}  // namespace

std::string_view to_string(FigureId id) { return kFigureNames[static_cast<int>(id)]; }

FigureId figure_from_string(std::string_view name) {
  for (int i = 0; i < static_cast<int>(std::size(kFigureNames)); ++i) {
    std::string a(kFigureNames[i]), b(name);
    std::transform(a.begin(), a.end(), a.begin(), ::tolower);
    std::transform(b.begin(), b.end(), b.begin(), ::tolower);
    if (a == b) return static_cast<FigureId>(i);
  }
  throw ConfigError("unknown figure '" + std::string(name) + "'");
}

FigureJob FigureJob::defaults_for(FigureId id) {
  FigureJob job;
  job.figure = id;
  using model::PulseSegment;
  switch (id) {
    case FigureId::FigS1:
      job.schedule = model::DriveSchedule({PulseSegment{SegmentKind::Cool, 200e-9, 1000.0}});
      job.sweep.n_r = {0.0, 10.0, 100.0, 1000.0};
      break;
    case FigureId::Dlcz:
      job.schedule = model::heralding_schedule(50e-9, 0.1, 5e-9, 1e-6, 100.0);
      job.sweep.gains = {1e-3, 2e-3, 5e-3, 1e-2, 1.5e-2, 2e-2, 3e-2, 5e-2};
      break;
    case FigureId::Fig2b:
      job.schedule = model::heralding_schedule(50e-9, 0.1, 5e-9, 2e-9, 100.0);
      break;
    case FigureId::Fig3a:
    case FigureId::Fig3b:
    case FigureId::Fig3c:
      job.schedule = model::heralding_schedule(50e-9, 0.1, 5e-9, 1e-6, 1000.0);
      job.sweep.tau_points = 401;
      break;
    default:
      job.schedule = model::heralding_schedule(50e-9, 0.1, 5e-9, 1e-6, 100.0);
      break;
  }
  return job;
}

void FigureJob::validate() const {
  system.validate();
  const auto& s = sweep;
  auto positive = [](double v, const char* k) {
    if (!(v > 0.0)) throw ConfigError(std::string("sweep.") + k + " must be > 0");
  };
  auto at_least = [](int v, int lo, const char* k) {
    if (v < lo) throw ConfigError(std::string("sweep.") + k + " must be >= " + std::to_string(lo));
  };
  positive(s.tau_max, "tau_max");
  at_least(s.tau_points, 2, "tau_points");
  at_least(s.t_off_points, 2, "t_off_points");
  at_least(s.n0_points, 2, "n0_points");
  at_least(s.t_points, 2, "t_points");
  at_least(s.points_per_period, 2, "points_per_period");
  at_least(s.oracle_na, 1, "oracle_na");
  at_least(s.oracle_nb, 1, "oracle_nb");
  if (!(s.t_r >= 0.0)) throw ConfigError("sweep.t_r must be >= 0");
  positive(s.t_off_min, "t_off_min");
  if (!(s.t_off_max > s.t_off_min)) throw ConfigError("sweep.t_off_max must exceed t_off_min");
  positive(s.n0_min, "n0_min");
  if (!(s.n0_max > s.n0_min)) throw ConfigError("sweep.n0_max must exceed n0_min");
  positive(s.t_max, "t_max");
  positive(s.fig3c_tau_max, "fig3c_tau_max");
  positive(s.rep_rate, "rep_rate");
  for (double e : {s.eta_collection, s.eta_fiber, s.eta_detection})
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("sweep.eta_* must lie in (0, 1]");
  for (double v : s.t_off)
    if (!(v >= 0.0)) throw ConfigError("sweep.t_off entries must be >= 0");
  for (double v : s.n_th)
    if (!(v >= 0.0)) throw ConfigError("sweep.n_th entries must be >= 0");
  for (double v : s.n_r)
    if (!(v >= 0.0)) throw ConfigError("sweep.n_r entries must be >= 0");
  for (double v : s.gains)
    if (!(v >= 0.0)) throw ConfigError("sweep.gains entries must be >= 0");
  if (s.oracle_n_th.size() != s.oracle_n_0.size())
    throw ConfigError("sweep.oracle_n_th and sweep.oracle_n_0 must have equal length");
  const bool needs_t_off = figure == FigureId::Fig2a;
  if (needs_t_off && s.t_off.empty()) throw ConfigError("sweep.t_off must not be empty");
  if ((figure == FigureId::Fig1e || figure == FigureId::Dlcz) && s.gains.empty())
    throw ConfigError("sweep.gains must not be empty");
  if (schedule.size() == 0) throw ScheduleError("schedule has no segments");
}

std::string format_schedule(const model::DriveSchedule& schedule) {
  std::string s;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& seg = schedule[i];
    s += (i ? ", " : "") + std::string(model::to_string(seg.kind)) + ":" +
         io::format_double(seg.duration) + ":" + io::format_double(seg.n_cavity);
  }
  return s;
}

model::DriveSchedule parse_schedule(const std::string& text) {
  std::vector<model::PulseSegment> segs;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw ScheduleError("segment '" + item + "' is not kind:duration:n_cavity");
    model::PulseSegment seg;
    seg.kind = model::segment_kind_from_string(parts[0]);
    seg.duration = parse_double(parts[1], "schedule.segments");
    seg.n_cavity = parse_double(parts[2], "schedule.segments");
    segs.push_back(seg);
  }
  return model::DriveSchedule(std::move(segs));
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + text + "' is not section.key=value");
  std::string key = trim(text.substr(0, eq));
  if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' needs a section");
  return {key, trim(text.substr(eq + 1))};
}

FigureJob parse_job(const std::string& ini_text, const Overrides& overrides,
                    std::optional<FigureId> figure) {
  pt::ptree tree;
  std::istringstream is(ini_text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto& [k, v] : overrides) tree.put(pt::ptree::path_type(k, '.'), v);
  return job_from_tree(tree, figure);
}

FigureJob load_job(const std::string& path, const Overrides& overrides, std::optional<FigureId> figure) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_job(ss.str(), overrides, figure);
}

std::string serialize_job(const FigureJob& job) {
  std::ostringstream os;
  const auto& p = job.system;
  os << "[system]\n";
  for (const auto& r : kRates) os << r.key << " = " << io::format_double(p.*(r.member)) << "\n";
  os << "n_th = " << io::format_double(p.n_th) << "\n";
  os << "n_0 = " << io::format_double(p.n_0) << "\n";
  os << "[schedule]\n";
  os << "segments = " << format_schedule(job.schedule) << "\n";
  os << "[sweep]\n";
  os << "figure = " << to_string(job.figure) << "\n";
  os << "t_w = " << (job.sweep.t_w ? io::format_double(*job.sweep.t_w) : std::string("auto")) << "\n";
  for (const auto& f : sweep_fields()) {
    os << f.key << " = ";
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(job.sweep.*member)>;
          if constexpr (std::is_same_v<T, double>) os << io::format_double(job.sweep.*member);
          else if constexpr (std::is_same_v<T, int>) os << job.sweep.*member;
          else os << join(job.sweep.*member);
        },
        f.member);
    os << "\n";
  }
  return os.str();
}

unsigned long long job_hash(const FigureJob& job) { return io::fnv1a64(serialize_job(job)); }

FigureJob job_from_csv_metadata(const std::vector<std::string>& metadata) {
  std::string ini;
  bool inside = false, found = false;
  for (const auto& line : metadata) {
    if (line == "--- job ---") {
      inside = found = true;
      continue;
    }
    if (line == "--- end job ---") {
      inside = false;
      continue;
    }
    if (inside) ini += line + "\n";
  }
  if (!found) throw ConfigError("csv metadata carries no job block");
  return parse_job(ini);
}

}  // namespace herald::exp
