#include "exclab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "exclab/kernels.hpp"
#include "exclab/labeled_coupling.hpp"
#include "exclab/observables.hpp"

namespace exclab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool bare_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class LineParser {
 public:
  LineParser(const std::string& text, int line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }
  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool at_end() {
    skip_ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string key() {
    std::string out;
    do {
      if (!out.empty()) out += '.';
      skip_ws();
      if (i_ < s_.size() && s_[i_] == '"') {
        out += string_body();
      } else {
        const std::size_t start = i_;
        while (i_ < s_.size() && bare_key_char(s_[i_])) ++i_;
        if (i_ == start) fail("expected a key");
        out += s_.substr(start, i_ - start);
      }
    } while (eat('.'));
    return out;
  }

  TomlScalar scalar() {
    skip_ws();
    if (i_ >= s_.size()) fail("missing value");
    if (s_[i_] == '"') return string_body();
    const std::size_t start = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != ',' &&
           s_[i_] != ']' && s_[i_] != '}' && s_[i_] != '#')
      ++i_;
    const std::string tok = s_.substr(start, i_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.empty()) fail("missing value");
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (*b == '+') ++b;
    long long iv = 0;
    if (auto r = std::from_chars(b, e, iv); r.ec == std::errc() && r.ptr == e) return iv;
    double dv = 0.0;
    if (auto r = std::from_chars(b, e, dv); r.ec == std::errc() && r.ptr == e && std::isfinite(dv)) return dv;
    fail("cannot read value '" + tok + "'");
  }

  void value(const std::string& path, TomlTable& out) {
    skip_ws();
    if (eat('[')) {
      std::vector<TomlScalar> arr;
      while (!eat(']')) {
        arr.push_back(scalar());
        if (!eat(',')) {
          expect(']');
          break;
        }
      }
      put(out, path, arr);
    } else if (eat('{')) {
      while (!eat('}')) {
        const std::string k = key();
        expect('=');
        put(out, path + "." + k, scalar_value());
        if (!eat(',')) {
          expect('}');
          break;
        }
      }
    } else {
      put(out, path, scalar_value());
    }
    if (!at_end()) fail("trailing characters");
  }

  void put(TomlTable& out, const std::string& path, TomlValue v) {
    if (!out.emplace(path, std::move(v)).second) fail("duplicate key '" + path + "'");
  }

 private:
  TomlValue scalar_value() {
    return std::visit([](auto&& x) -> TomlValue { return x; }, scalar());
  }

  std::string string_body() {
    ++i_;  // opening quote
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\') {
        if (i_ >= s_.size()) fail("unterminated escape");
        const char n = s_[i_++];
        switch (n) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + n);
        }
      }
      out += c;
    }
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_;
};

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

template <class T>
std::string join(const std::vector<T>& v, auto&& f) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + f(v[k]);
  return out + "]";
}

class Reader {
 public:
  explicit Reader(const TomlTable& t) : t_(t) {}

  const TomlValue* find(const std::string& k) {
    auto it = t_.find(k);
    if (it == t_.end()) return nullptr;
    used_.insert(k);
    return &it->second;
  }
  [[noreturn]] static void type_error(const std::string& k, const char* want) {
    throw ConfigError(k + ": expected " + want);
  }
  void get(const std::string& k, std::string& out) {
    if (auto v = find(k)) {
      if (auto s = std::get_if<std::string>(v)) out = *s;
      else type_error(k, "a string");
    }
  }
  void get(const std::string& k, bool& out) {
    if (auto v = find(k)) {
      if (auto s = std::get_if<bool>(v)) out = *s;
      else type_error(k, "true or false");
    }
  }
  void get(const std::string& k, double& out) {
    if (auto v = find(k)) {
      if (auto d = std::get_if<double>(v)) out = *d;
      else if (auto i = std::get_if<long long>(v)) out = static_cast<double>(*i);
      else type_error(k, "a number");
    }
  }
  template <class I>
    requires std::is_integral_v<I>
  void get(const std::string& k, I& out) {
    if (auto v = find(k)) {
      auto i = std::get_if<long long>(v);
      if (!i) type_error(k, "an integer");
      if constexpr (std::is_unsigned_v<I>) {
        if (*i < 0) throw ConfigError(k + ": must be non-negative");
      }
      out = static_cast<I>(*i);
    }
  }
  void get(const std::string& k, std::vector<std::string>& out) {
    if (auto v = find(k)) {
      auto a = std::get_if<std::vector<TomlScalar>>(v);
      if (!a) type_error(k, "an array of strings");
      out.clear();
      for (const auto& e : *a) {
        auto s = std::get_if<std::string>(&e);
        if (!s) type_error(k, "an array of strings");
        out.push_back(*s);
      }
    }
  }
  void get(const std::string& k, std::vector<int>& out) {
    if (auto v = find(k)) {
      auto a = std::get_if<std::vector<TomlScalar>>(v);
      if (!a) type_error(k, "an array of integers");
      out.clear();
      for (const auto& e : *a) {
        auto s = std::get_if<long long>(&e);
        if (!s) type_error(k, "an array of integers");
        out.push_back(static_cast<int>(*s));
      }
    }
  }
  std::map<int, double> kernel(const std::string& prefix, const std::map<int, double>& fallback) {
    std::map<int, double> out;
    bool any = false;
    for (const auto& [k, v] : t_) {
      if (k.rfind(prefix + ".", 0) != 0) continue;
      const std::string z = k.substr(prefix.size() + 1);
      int zi = 0;
      auto r = std::from_chars(z.data(), z.data() + z.size(), zi);
      if (r.ec != std::errc() || r.ptr != z.data() + z.size())
        throw ConfigError(k + ": kernel keys must be signed integers");
      double rate = 0.0;
      get(k, rate);
      out[zi] = rate;
      any = true;
    }
    if (auto v = find(prefix)) {
      (void)v;
      throw ConfigError(prefix + ": expected a table of rates");
    }
    return any ? out : fallback;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : t_)
      if (!used_.count(k)) throw ConfigError(k + ": unknown key");
  }

 private:
  const TomlTable& t_;
  std::set<std::string> used_;
};

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable out;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    LineParser lp(raw, line);
    if (lp.at_end()) continue;
    const std::string t = trim(raw);
    if (t.front() == '[') {
      lp.expect('[');
      section = lp.key();
      lp.expect(']');
      if (!lp.at_end()) lp.fail("trailing characters after section header");
      continue;
    }
    const std::string k = lp.key();
    lp.expect('=');
    lp.value(section.empty() ? k : section + "." + k, out);
  }
  return out;
}

ExperimentConfig config_from_toml(const TomlTable& t) {
  ExperimentConfig c;
  Reader r(t);
  r.get("experiment", c.experiment);
  r.get("seed", c.seed);
  r.get("replicas", c.replicas);
  r.get("horizon", c.horizon);
  r.get("threads", c.threads);
  c.kernel = r.kernel("kernel", c.kernel);
  c.tagged = r.kernel("tagged", c.tagged);

  r.get("env.W", c.env.W);
  r.get("env.init", c.env.init);
  r.get("env.density", c.env.density);
  r.get("env.lambda", c.env.lambda);
  r.get("env.rho", c.env.rho);
  r.get("env.burn_in", c.env.burn_in);
  r.get("env.batches", c.env.batches);
  r.get("env.cylinders", c.env.cylinders);
  r.get("env.currents", c.env.currents);
  r.get("env.boundary_monitor", c.env.boundary_monitor);

  r.get("halfline.m", c.halfline.m);
  r.get("halfline.n", c.halfline.n);
  r.get("halfline.lambda", c.halfline.lambda);
  r.get("halfline.rho", c.halfline.rho);
  r.get("halfline.burn_in", c.halfline.burn_in);
  r.get("halfline.batches", c.halfline.batches);
  r.get("halfline.patterns", c.halfline.patterns);
  r.get("halfline.bulk_from", c.halfline.bulk_from);
  r.get("halfline.bulk_count", c.halfline.bulk_count);
  r.get("halfline.bonds", c.halfline.bonds);

  r.get("threeclass.W", c.threeclass.W);
  r.get("threeclass.sets", c.threeclass.sets);

  r.get("couple.variant", c.couple.variant);
  r.get("couple.particles", c.couple.particles);
  r.get("couple.span", c.couple.span);
  r.get("couple.origin_blocked", c.couple.origin_blocked);
  r.get("couple.tracked_label", c.couple.tracked_label);
  r.get("couple.record_log", c.couple.record_log);
  r.reject_unknown();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_toml(parse_toml(ss.str()));
}

std::string to_toml(const ExperimentConfig& c) {
  std::ostringstream os;
  auto strs = [](const std::vector<std::string>& v) { return join(v, [](const std::string& s) { return quote(s); }); };
  auto ints = [](const std::vector<int>& v) { return join(v, [](int x) { return std::to_string(x); }); };
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "experiment = " << quote(c.experiment) << "\n"
     << "seed = " << c.seed << "\n"
     << "replicas = " << c.replicas << "\n"
     << "horizon = " << fmt_double(c.horizon) << "\n"
     << "threads = " << c.threads << "\n\n[kernel]\n";
  for (const auto& [z, r] : c.kernel) os << z << " = " << fmt_double(r) << "\n";
  os << "\n[tagged]\n";
  for (const auto& [z, r] : c.tagged) os << z << " = " << fmt_double(r) << "\n";
  const auto& e = c.env;
  os << "\n[env]\nW = " << e.W << "\ninit = " << quote(e.init) << "\ndensity = " << fmt_double(e.density)
     << "\nlambda = " << fmt_double(e.lambda) << "\nrho = " << fmt_double(e.rho)
     << "\nburn_in = " << fmt_double(e.burn_in) << "\nbatches = " << e.batches << "\ncylinders = " << strs(e.cylinders)
     << "\ncurrents = " << strs(e.currents) << "\nboundary_monitor = " << b(e.boundary_monitor) << "\n";
  const auto& h = c.halfline;
  os << "\n[halfline]\nm = " << h.m << "\nn = " << h.n << "\nlambda = " << fmt_double(h.lambda)
     << "\nrho = " << fmt_double(h.rho) << "\nburn_in = " << fmt_double(h.burn_in) << "\nbatches = " << h.batches
     << "\npatterns = " << strs(h.patterns) << "\nbulk_from = " << h.bulk_from << "\nbulk_count = " << h.bulk_count
     << "\nbonds = " << ints(h.bonds) << "\n";
  os << "\n[threeclass]\nW = " << c.threeclass.W << "\nsets = " << strs(c.threeclass.sets) << "\n";
  const auto& k = c.couple;
  os << "\n[couple]\nvariant = " << quote(k.variant) << "\nparticles = " << k.particles << "\nspan = " << k.span
     << "\norigin_blocked = " << b(k.origin_blocked) << "\ntracked_label = " << k.tracked_label
     << "\nrecord_log = " << b(k.record_log) << "\n";
  return os.str();
}

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    int v = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw ConfigError(field + ": '" + text + "' is not a comma-separated list of integers");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void validate_config(const ExperimentConfig& c) {
  static const std::set<std::string> known = {"env", "halfline", "threeclass", "couple"};
  require(known.count(c.experiment) > 0, "experiment",
          "unknown experiment id '" + c.experiment + "' (env, halfline, threeclass, couple)");
  require(c.replicas >= 1, "replicas", "must be >= 1");
  require(c.horizon >= 0.0, "horizon", "must be >= 0");
  require(c.threads >= 0, "threads", "must be >= 0");
  int R = 0;
  try {
    R = RateKernel(c.kernel).range();
    TaggedKernel q(c.tagged);
    if (c.experiment == "env" || c.experiment == "couple")
      require(q.nearest_neighbor(), "tagged", "the tagged kernel must be nearest-neighbor");
  } catch (const KernelError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }

  if (c.experiment == "env") {
    const auto& e = c.env;
    require(e.W >= R, "env.W", "must be at least the kernel range " + std::to_string(R));
    require(e.init == "step" || e.init == "bernoulli", "env.init", "must be \"step\" or \"bernoulli\"");
    require(unit(e.density), "env.density", "must lie in [0, 1]");
    require(unit(e.lambda), "env.lambda", "must lie in [0, 1]");
    require(unit(e.rho), "env.rho", "must lie in [0, 1]");
    require(e.burn_in >= 0.0 && e.burn_in < 1.0, "env.burn_in", "must lie in [0, 1)");
    require(e.batches >= 1, "env.batches", "must be >= 1");
    for (const auto& cyl : e.cylinders) {
      try {
        const auto spec = CylinderSpec::parse(cyl);
        require(spec.min_site() >= -e.W && spec.max_site() <= e.W && !spec.uses_origin(), "env.cylinders",
                "'" + cyl + "' needs sites in the window other than 0");
      } catch (const std::invalid_argument& ex) {
        throw ConfigError("env.cylinders: " + std::string(ex.what()));
      }
    }
    for (const auto& b : e.currents) {
      const auto ij = parse_int_list(b, "env.currents");
      require(ij.size() == 2 && ij[0] < ij[1], "env.currents", "'" + b + "' must be a bond \"i,j\" with i < j");
      require(ij[1] - R >= -e.W && ij[0] + R <= e.W, "env.currents",
              "'" + b + "' lies within the kernel range of the window edge");
    }
  } else if (c.experiment == "halfline") {
    const auto& h = c.halfline;
    require(h.n - h.m > 2 * R, "halfline.n", "segment must be longer than twice the kernel range");
    require(unit(h.lambda), "halfline.lambda", "must lie in [0, 1]");
    require(unit(h.rho), "halfline.rho", "must lie in [0, 1]");
    require(h.burn_in >= 0.0 && h.burn_in < 1.0, "halfline.burn_in", "must lie in [0, 1)");
    require(h.batches >= 1, "halfline.batches", "must be >= 1");
    require(!h.patterns.empty(), "halfline.patterns", "at least one pattern is needed");
    require(h.bulk_count >= 1, "halfline.bulk_count", "must be >= 1");
    for (const auto& p : h.patterns) {
      const auto A = parse_int_list(p, "halfline.patterns");
      const auto [lo, hi] = std::minmax_element(A.begin(), A.end());
      require(h.bulk_from >= h.m - *lo && h.bulk_from + h.bulk_count - 1 <= h.n - *hi, "halfline.bulk_from",
              "the translates of pattern {" + p + "} leave the segment");
    }
    for (int b : h.bonds) require(b >= h.m && b + 1 <= h.n, "halfline.bonds", "bond outside the segment");
  } else if (c.experiment == "threeclass") {
    require(c.threeclass.W >= 2 * R, "threeclass.W", "must be at least twice the kernel range");
    require(!c.threeclass.sets.empty(), "threeclass.sets", "at least one set is needed");
    for (const auto& s : c.threeclass.sets)
      for (int x : parse_int_list(s, "threeclass.sets"))
        require(x >= 1 && x + R <= c.threeclass.W, "threeclass.sets", "sites must lie in 1..W-R");
  } else {
    const auto& k = c.couple;
    try {
      parse_variant(k.variant);
      class_c_decompose(RateKernel(c.kernel));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("couple: ") + ex.what());
    }
    require(k.span >= 1, "couple.span", "must be >= 1");
    require(k.particles >= 1 && k.particles <= 2 * k.span, "couple.particles", "must lie in 1..2*span");
    const bool tagged = k.variant == "right" || k.variant == "left";
    require(!tagged || c.tagged.empty() || k.origin_blocked, "couple.origin_blocked",
            "tagged variants need the origin blocked");
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace exclab
