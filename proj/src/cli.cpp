#include "alk/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <regex>

#include "CLI11.hpp"
#include "alk/acceptance.hpp"
#include "alk/arakelov.hpp"
#include "alk/boxcount.hpp"
#include "alk/error.hpp"
#include "alk/git4.hpp"
#include "alk/localgeom.hpp"
#include "alk/toralsets.hpp"
#include "json.hpp"

namespace alk::cli {

void RunConfig::apply_env() {
  const char* s = std::getenv("ALK_PRECISION");
  if (!s || !*s) return;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (*end || v < 53 || v > 4096) throw CliError("ALK_PRECISION", "expected an integer in [53, 4096]");
  precision_bits = static_cast<int>(v);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"theta",  "count-box",  "local",   "invariants",
                                          "entropy", "tau-window", "disc",    "classify",
                                          "cyclic-check", "linnik-rhs", "verify-all"};
  return s;
}

namespace {

using json = nlohmann::ordered_json;

struct Flags {
  std::optional<std::string> field, tower, matrix, conductor, rinf, rfin, prime;
  std::optional<std::string> disc, vol, DF, DK;
  std::optional<double> tau, c, kappa, eps, beta, h, eta, hint;
  std::string mode = "main";
  std::optional<std::uint64_t> seed;
  std::optional<long long> budget;
  std::optional<double> tail;
  std::string format = "json";
};

// ---- input parsing

std::string sub(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string sub(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

json parse_json(const std::string& flag, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw CliError(flag, "malformed JSON at byte " + std::to_string(e.byte));
  }
}

// Exact rational from "a/b", an integer, a decimal or "b^e".
std::optional<Q> rational_from_text(const std::string& s) {
  static const std::regex frac(R"(^\s*([+-]?\d+)\s*/\s*(\d+)\s*$)");
  static const std::regex dec(R"(^\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*$)");
  static const std::regex pw(R"(^\s*([+-]?\d+)\s*\^\s*(\d+)\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, frac)) {
    Z den(m[2].str());
    if (den == 0) return std::nullopt;
    Q q(Z(m[1].str()), den);
    q.canonicalize();
    return q;
  }
  if (std::regex_match(s, m, pw)) {
    unsigned long e = std::stoul(m[2].str());
    if (e > 4096) return std::nullopt;
    return Q(ipow(Z(m[1].str()), e));
  }
  if (std::regex_match(s, m, dec)) {
    std::string ip = m[2].str(), fp = m[3].str();
    if (ip.empty() && fp.empty()) return std::nullopt;
    long e = m[4].matched ? std::stol(m[4].str()) : 0;
    if (std::labs(e) > 4096) return std::nullopt;
    Z num(ip + fp == "" ? "0" : ip + fp);
    e -= static_cast<long>(fp.size());
    Q q = e >= 0 ? Q(num * ipow(10, e)) : Q(num, ipow(10, -e));
    q.canonicalize();
    return m[1].str() == "-" ? Q(-q) : q;
  }
  return std::nullopt;
}

Q to_q(const json& j, const std::string& where) {
  std::optional<Q> q;
  if (j.is_number()) q = rational_from_text(j.dump());
  else if (j.is_string()) q = rational_from_text(j.get<std::string>());
  if (!q) throw CliError(where, "expected a rational: integer, decimal or string \"a/b\"");
  return *q;
}

Z to_z(const json& j, const std::string& where) {
  Q q = to_q(j, where);
  if (q.get_den() != 1) throw CliError(where, "expected an integer");
  return q.get_num();
}

long to_long(const json& j, const std::string& where) {
  Z z = to_z(j, where);
  if (!z.fits_slong_p()) throw CliError(where, "integer out of range");
  return z.get_si();
}

double to_double(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  return to_q(j, where).get_d();
}

// Flag value holding one exact number, JSON-quoted or bare.
Q flag_q(const std::string& flag, const std::string& text) {
  if (auto q = rational_from_text(text)) return *q;
  return to_q(parse_json(flag, text), flag);
}

Z flag_z(const std::string& flag, const std::string& text) {
  Q q = flag_q(flag, text);
  if (q.get_den() != 1) throw CliError(flag, "expected an integer");
  return q.get_num();
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw CliError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw CliError(sub(where, key), "missing field");
  return *it;
}

QuadField to_field(long d, const std::string& where) {
  if (d == 1) return QuadField::rationals();
  try {
    return QuadField(d);
  } catch (const InputError& e) {
    throw CliError(where, e.what());
  }
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* a : keys) known = known || k == a;
    if (!known) throw CliError(sub(where, k), "unknown field");
  }
}

// A missing "d" means Q only where allow_q is set and the object is a tower.
QuadField field_of(const json& obj, const std::string& where, bool allow_q) {
  if (!obj.is_object()) throw CliError(where, "expected an object like {\"d\": -1}");
  if (!obj.contains("d")) {
    if (allow_q && obj.contains("delta")) return QuadField::rationals();
    throw CliError(sub(where, "d"), "missing field");
  }
  long d = to_long(obj["d"], sub(where, "d"));
  if (d == 1 && !allow_q) throw CliError(sub(where, "d"), "a quadratic field is required here");
  return to_field(d, sub(where, "d"));
}

// Scalar a, pair [a, b] or {"a":, "b":} for a + b sqrt d.
QFElem to_elem(const QuadField& F, const json& j, const std::string& where) {
  Q a, b;
  if (j.is_array()) {
    if (j.size() != 2) throw CliError(where, "expected [a, b]");
    a = to_q(j[0], sub(where, 0));
    b = to_q(j[1], sub(where, 1));
  } else if (j.is_object()) {
    a = j.contains("a") ? to_q(j["a"], sub(where, "a")) : Q(0);
    b = j.contains("b") ? to_q(j["b"], sub(where, "b")) : Q(0);
  } else {
    a = to_q(j, where);
  }
  if (F.is_rational() && b != 0) throw CliError(where, "irrational part over Q");
  return F.elem(a, b);
}

RelQuadExt rel_ext(const json& t, const std::string& where) {
  if (t.is_object()) only_keys(t, {"d", "delta"}, where);
  QuadField F = field_of(t, where, true);
  QFElem delta = to_elem(F, member(t, "delta", where), sub(where, "delta"));
  try {
    return RelQuadExt::make(F, delta);
  } catch (const InputError& e) {
    throw CliError(sub(where, "delta"), e.what());
  }
}

QuarticTower quartic(const json& t, const std::string& where) {
  if (t.is_object()) only_keys(t, {"d", "delta", "type"}, where);
  QuadField F = field_of(t, where, false);
  QFElem delta = to_elem(F, member(t, "delta", where), sub(where, "delta"));
  try {
    return QuarticTower::make(F, delta);
  } catch (const InputError& e) {
    throw CliError(sub(where, "delta"), e.what());
  }
}

GaloisType type_of(const json& t, const std::string& where) {
  if (t.is_object() && t.contains("type")) {
    only_keys(t, {"d", "delta", "type"}, where);
    const json& s = t["type"];
    if (!s.is_string()) throw CliError(sub(where, "type"), "expected a string");
    try {
      return galois_type_from_string(s.get<std::string>());
    } catch (const InputError& e) {
      throw CliError(sub(where, "type"), e.what());
    }
  }
  return quartic(t, where).type();
}

QMat to_qmat(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw CliError(where, "expected a nonempty array of rows");
  std::size_t cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].empty()) throw CliError(sub(where, i), "expected a row array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) throw CliError(sub(where, i), "row length differs from row 0");
  }
  QMat m = qmat(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = to_q(j[i][k], sub(sub(where, i), k));
  return m;
}

QMat square_qmat(const json& j, const std::string& where, std::size_t n) {
  QMat m = to_qmat(j, where);
  if (m.rows() != m.cols() || (n && m.rows() != n))
    throw CliError(where, n ? "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix"
                            : "expected a square matrix");
  return m;
}

CMat to_cmat(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw CliError(where, "expected a nonempty array of rows");
  const std::size_t n = j.size();
  CMat m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw CliError(sub(where, i), "expected a square matrix");
    for (std::size_t k = 0; k < n; ++k) {
      const json& e = j[i][k];
      const std::string w = sub(sub(where, i), k);
      if (e.is_array()) {
        if (e.size() != 2) throw CliError(w, "expected [re, im]");
        m(i, k) = {to_double(e[0], sub(w, 0)), to_double(e[1], sub(w, 1))};
      } else {
        m(i, k) = to_double(e, w);
      }
    }
  }
  return m;
}

// Four diagonal entries, as a flat list or a diagonal 4x4 matrix.
std::array<Q, 4> to_diag(const json& j, const std::string& where) {
  std::array<Q, 4> t;
  if (j.is_array() && j.size() == 4 && !j[0].is_array()) {
    for (std::size_t i = 0; i < 4; ++i) t[i] = to_q(j[i], sub(where, i));
  } else {
    QMat m = square_qmat(j, where, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 4; ++k)
        if (i != k && m(i, k) != 0)
          throw CliError(sub(sub(where, i), k), "expected a diagonal matrix");
    for (std::size_t i = 0; i < 4; ++i) t[i] = m(i, i);
  }
  for (std::size_t i = 0; i < 4; ++i)
    if (t[i] == 0) throw CliError(sub(where, i), "diagonal entries must be nonzero");
  return t;
}

Z prime_of(const Flags& f, bool allow_zero) {
  if (!f.prime) {
    if (allow_zero) return 0;
    throw CliError("--prime", "missing flag");
  }
  Q q = flag_q("--prime", *f.prime);
  if (q.get_den() != 1) throw CliError("--prime", "expected an integer");
  Z p = q.get_num();
  if (p == 0 && allow_zero) return 0;
  if (!is_prime(p)) throw CliError("--prime", p.get_str() + " is not prime");
  return p;
}

template <class T>
const T& need(const std::optional<T>& v, const char* flag) {
  if (!v) throw CliError(flag, "missing flag");
  return *v;
}

// ---- output helpers

json jz(const Z& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}
json jq(const Q& q) {
  if (q.get_den() == 1) return jz(q.get_num());
  return json(q.get_str());
}
json jd(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_report(const json& rep, Format fmt, std::ostream& out) {
  if (fmt == Format::Json) {
    out << rep.dump(2) << '\n';
    return;
  }
  out << "path,value\n";
  const json flat = rep.flatten();
  for (const auto& [path, v] : flat.items()) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      s = q + "\"";
    }
    out << path << ',' << s << '\n';
  }
}

struct Outcome {
  json report;
  int code = kOk;
  std::string note;  // printed to stderr when nonempty
};

// ---- subcommands

RadiusFamily radii(const Flags& f, const QuadField& F) {
  RadiusFamily r = RadiusFamily::unit(F);
  if (f.rinf) {
    auto bare = rational_from_text(*f.rinf);
    json j = bare ? json(bare->get_str()) : parse_json("--rinf", *f.rinf);
    if (j.is_array()) {
      if (j.size() != r.infinite.size())
        throw CliError("--rinf", "expected " + std::to_string(r.infinite.size()) + " radii, one per infinite place");
      for (std::size_t i = 0; i < j.size(); ++i) r.infinite[i] = to_q(j[i], sub("--rinf", i));
    } else {
      Q v = to_q(j, "--rinf");
      for (auto& x : r.infinite) x = v;
    }
    for (std::size_t i = 0; i < r.infinite.size(); ++i)
      if (r.infinite[i] <= 0) throw CliError(sub("--rinf", i), "radius must be positive");
  }
  if (f.rfin) {
    json j = parse_json("--rfin", *f.rfin);
    if (!j.is_array()) throw CliError("--rfin", "expected [{\"p\":, \"place\":, \"k\":}, ...]");
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string w = sub("--rfin", i);
      Z p = to_z(member(j[i], "p", w), sub(w, "p"));
      if (!is_prime(p)) throw CliError(sub(w, "p"), "not a prime");
      auto pl = places_above(F, p);
      long idx = j[i].contains("place") ? to_long(j[i]["place"], sub(w, "place")) : 0;
      if (idx < 0 || idx >= static_cast<long>(pl.size()))
        throw CliError(sub(w, "place"), "only " + std::to_string(pl.size()) + " places above p");
      long k = to_long(member(j[i], "k", w), sub(w, "k"));
      for (const auto& fr : r.finite)
        if (fr.place == pl[idx]) throw CliError(w, "place listed twice");
      r.finite.push_back({pl[idx], k});
    }
  }
  r.validate();
  return r;
}

Outcome cmd_theta(const Flags& f, const RunConfig& cfg) {
  ThetaOptions to;
  to.tail_target = cfg.tail_target;
  to.budget = cfg.budget;
  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.theta.v1";
  if (f.matrix) {
    QMat G = square_qmat(parse_json("--matrix", *f.matrix), "--matrix", 0);
    for (std::size_t i = 0; i < G.rows(); ++i)
      for (std::size_t k = 0; k < i; ++k)
        if (G(i, k) != G(k, i)) throw CliError(sub(sub("--matrix", i), k), "Gram matrix must be symmetric");
    auto L = EuclideanLattice::from_rational(G);
    auto t = theta_invariants(L, to);
    r["input"] = "gram";
    r["rank"] = L.rank();
    r["h0"] = t.h0;
    r["h1"] = t.h1;
    r["adeg"] = t.adeg;
    r["prr_residual"] = t.h0 - t.h1 - t.adeg;
    r["truncation_radius"] = t.truncation_radius;
    r["tail_bound"] = t.tail_bound;
    r["points"] = t.points;
    return o;
  }
  json fj = parse_json("--field", need(f.field, "--field"));
  if (fj.is_object()) only_keys(fj, {"d"}, "--field");
  QuadField F = field_of(fj, "--field", true);
  auto L = line_bundle_from_radii(radii(f, F));
  auto b = bundle_theta_and_h0ar(L, to);
  r["input"] = "line_bundle";
  r["d"] = F.d();
  r["D_F"] = jz(F.disc());
  r["h0"] = b.report.h0;
  r["h1"] = b.report.h1;
  r["h1_duality"] = b.h1_duality;
  r["adeg"] = b.report.adeg;
  // h0 - h1 = adeg - log(D_F) / 2 for line bundles over O_F
  r["rr_residual"] = b.report.h0 - b.report.h1 - b.report.adeg + 0.5 * log_abs(F.disc());
  r["h0_ar"] = b.h0_ar;
  r["sections"] = b.sections;
  r["pi_n"] = b.pi_n;
  r["comparison_holds"] = b.comparison_holds;
  r["tail_bound"] = b.report.tail_bound;
  return o;
}

Outcome cmd_count_box(const Flags& f, const RunConfig& cfg) {
  json fj = parse_json("--field", need(f.field, "--field"));
  if (fj.is_object()) only_keys(fj, {"d"}, "--field");
  QuadField F = field_of(fj, "--field", true);
  RadiusFamily rf = radii(f, F);
  double c = f.c.value_or(1.0);
  if (!(c > 0)) throw CliError("--c", "c must be positive");
  auto chk = counting_bound_check(rf, c, cfg.budget);
  Outcome o;
  json& r = o.report;
  r["count"] = chk.count;
  r["passed"] = static_cast<double>(chk.count) <= chk.bound;
  r["schema"] = "alk.count-box.v1";
  r["d"] = F.d();
  r["D_F"] = jz(F.disc());
  r["c"] = c;
  r["norm"] = jq(rf.norm());
  r["hypothesis"] = chk.hypothesis;
  r["C"] = chk.C;
  r["bound"] = chk.bound;
  r["status"] = to_string(chk.status);
  if (chk.status == BoundStatus::HypothesisViolated) {
    o.code = kHypothesis;
    o.note = "hypothesis ||r|| >= c D_F does not hold";
  } else if (chk.status == BoundStatus::Fail) {
    o.code = kError;
    o.note = "count exceeds the bound";
  }
  return o;
}

Outcome cmd_local(const Flags& f, const RunConfig&) {
  json fj = parse_json("--field", need(f.field, "--field"));
  if (fj.is_object()) only_keys(fj, {"d", "f"}, "--field");
  QuadField K = field_of(fj, "--field", false);
  Z fc = fj.contains("f") ? to_z(fj["f"], "--field/f") : Z(1);
  if (fc < 1) throw CliError("--field/f", "conductor must be a positive integer");
  Z p = prime_of(f, false);
  QMat g = square_qmat(parse_json("--matrix", need(f.matrix, "--matrix")), "--matrix", 2);
  if (qdet(g) == 0) throw CliError("--matrix", "matrix is singular");

  QuadOrder O{K, fc};
  auto T = TorusData::from_order(O);
  auto E = different_and_orders(K, p, fc);
  auto b = local_coords(T, g);
  Q psi = psi_invariant(T, g);
  auto integ = integrality_checks(T, O, g, p);
  auto pb = psi_local_bound(T, E, g, Q(1), 0);

  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.local.v1";
  r["d"] = K.d();
  r["f"] = jz(fc);
  r["p"] = jz(p);
  r["splitting"] = to_string(E.type);
  r["disc_local"] = jz(E.disc_local);
  r["alpha"] = E.alpha.str();
  r["b1"] = b.b1.str();
  r["b2"] = b.b2.str();
  r["reconstruction_exact"] = reconstruct(T, b) == g;
  r["det_identity"] = qdet(g) == b.b1.norm() - b.b2.norm();
  r["psi"] = jq(psi);
  r["abs_psi"] = jq(pb.abs_psi);
  r["psi_bound_holds"] = pb.abs_psi <= Q(E.disc_local);
  r["integrality"] = {{"gamma_integral", integ.gamma_integral},
                      {"b_in_inverse_different", integ.b_in_inverse_different},
                      {"difference_integral", integ.difference_integral},
                      {"traces_integral", integ.traces_integral},
                      {"det_unit", integ.det_unit}};
  if (E.split() && psi != 0 && psi != -1) r["orbital_measure"] = orbital_measure_split(psi, p);
  else r["orbital_measure"] = nullptr;
  r["norm_index"] = norm_index(O, p);
  if (!integ.gamma_integral) {
    o.code = kHypothesis;
    o.note = "gamma is not in GL2(Z_p); local bounds do not apply";
  }
  return o;
}

Outcome cmd_invariants(const Flags& f, const RunConfig&) {
  QuarticTower K = quartic(parse_json("--tower", need(f.tower, "--tower")), "--tower");
  QMat g = square_qmat(parse_json("--matrix", need(f.matrix, "--matrix")), "--matrix", 4);
  if (qdet(g) == 0) throw CliError("--matrix", "matrix is singular");
  auto E = regular_embedding(K);
  auto prof = psi_invariants(g, E);
  auto rel = pattern_and_relation_check(g, E);
  auto mem = block_membership_test(g, E);

  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.invariants.v1";
  r["tower"] = K.str();
  r["type"] = to_string(prof.type);
  json psi = json::array();
  const auto& perms = all_perms();
  for (std::size_t i = 0; i < perms.size(); ++i) {
    json e;
    e["sigma"] = perm_cycles(perms[i]);
    e["value"] = prof.exact[i].str();
    e["rational"] = prof.rational[i] ? jq(*prof.rational[i]) : json(nullptr);
    psi.push_back(e);
  }
  r["psi"] = psi;
  r["relation"] = {{"compatible_with_f", rel.compatible_with_f},
                   {"image_matches", rel.image_matches},
                   {"entry_relation", rel.entry_relation},
                   {"pattern_matches", rel.pattern_matches},
                   {"profile_relation", rel.profile_relation},
                   {"numeric_error", rel.numeric_error},
                   {"pass", rel.pass()}};
  r["membership"] = {{"in_R_invariants", mem.in_R_invariants},
                     {"in_R_commutes", mem.in_R_commutes},
                     {"agree", mem.agree()}};
  if (!rel.pass() || !mem.agree()) {
    o.code = kError;
    o.note = "Galois relation or membership check failed";
  }
  return o;
}

json entropy_json(const EntropyData& e, const Z& p, GaloisType t) {
  json r;
  r["place"] = p == 0 ? json("inf") : jz(p);
  r["type"] = to_string(t);
  r["coeff"] = e.coeff;
  r["scale"] = e.scale;
  json sp = json::array();
  for (const auto& [s, v] : e.eta_sp) sp.push_back({{"sigma", perm_cycles(s)}, {"value", v}});
  r["eta_sp"] = sp;
  r["eta"] = e.eta;
  r["h_haar"] = e.h_haar;
  r["h_int"] = e.h_int;
  r["in_a_prime"] = e.in_a_prime;
  r["eta_criterion"] = e.eta_criterion;
  return r;
}

Outcome cmd_entropy(const Flags& f, const RunConfig&) {
  GaloisType t = type_of(parse_json("--tower", need(f.tower, "--tower")), "--tower");
  auto diag = to_diag(parse_json("--matrix", need(f.matrix, "--matrix")), "--matrix");
  Z p = prime_of(f, true);
  auto e = entropy_from_diagonal(diag, p, t);
  Outcome o;
  o.report["schema"] = "alk.entropy.v1";
  o.report.update(entropy_json(e, p, t));
  return o;
}

Outcome cmd_tau_window(const Flags& f, const RunConfig&) {
  TauWindowInput in;
  std::optional<bool> a_prime;
  json tj;
  if (f.tower) tj = parse_json("--tower", *f.tower);
  if (f.matrix) {
    if (!f.tower) throw CliError("--tower", "missing flag (needed for the Galois type)");
    GaloisType t = type_of(tj, "--tower");
    auto e = entropy_from_diagonal(to_diag(parse_json("--matrix", *f.matrix), "--matrix"),
                                   prime_of(f, true), t);
    in.eta = e.eta;
    in.h_int = e.h_int;
    a_prime = e.in_a_prime;
  } else {
    in.eta = need(f.eta, "--eta");
    in.h_int = need(f.hint, "--hint");
  }
  if (f.DK || f.DF) {
    in.D_K = flag_z("--DK", need(f.DK, "--DK"));
    in.D_F = flag_z("--DF", need(f.DF, "--DF"));
  } else {
    if (!f.tower) throw CliError("--DK", "missing flag (or give --tower with d and delta)");
    QuarticTower K = quartic(tj, "--tower");
    in.D_K = abs(maximal_order(RelQuadExt::from_tower(K)).disc);
    in.D_F = K.F.disc();
  }
  if (in.D_K <= 0) throw CliError("--DK", "must be positive");
  if (in.D_F <= 0) throw CliError("--DF", "must be positive");
  in.c = f.c.value_or(1.0);
  in.kappa = f.kappa.value_or(0.0);
  try {
    in.mode = tau_mode_from_string(f.mode);
  } catch (const InputError& e) {
    throw CliError("--mode", e.what());
  }
  in.beta = f.beta.value_or(0.0);
  in.eps = f.eps.value_or(0.0);
  auto w = tau_window(in);

  Outcome o;
  json& r = o.report;
  r["lo"] = jd(w.lo);
  r["hi"] = jd(w.hi);
  r["schema"] = "alk.tau-window.v1";
  r["hi_infinite"] = w.hi_infinite;
  r["empty"] = w.empty;
  r["eta"] = in.eta;
  r["h_int"] = in.h_int;
  r["D_K"] = jz(in.D_K);
  r["D_F"] = jz(in.D_F);
  r["c"] = in.c;
  r["kappa"] = in.kappa;
  r["mode"] = f.mode;
  r["in_a_prime"] = a_prime ? json(*a_prime) : json(nullptr);
  if (w.empty) {
    o.code = kHypothesis;
    o.note = "tau window is empty";
  } else if (a_prime && !*a_prime) {
    o.code = kHypothesis;
    o.note = "a is not in A'";
  }
  return o;
}

Outcome cmd_disc(const Flags& f, const RunConfig&) {
  json tj = parse_json("--tower", need(f.tower, "--tower"));
  ToralSetDescriptor desc{rel_ext(tj, "--tower"), {}, {}};
  const QuadField& F = desc.K.F;
  if (f.conductor) {
    json cj = parse_json("--conductor", *f.conductor);
    if (!cj.is_object()) throw CliError("--conductor", "expected an object {\"p\": element of O_F}");
    for (const auto& [key, val] : cj.items()) {
      const std::string w = sub("--conductor", key);
      auto pq = rational_from_text(key);
      if (!pq || pq->get_den() != 1 || !is_prime(pq->get_num())) throw CliError(w, "key must be a prime");
      QFElem e = to_elem(F, val, w);
      if (e.is_zero() || !F.is_integral(e)) throw CliError(w, "conductor must be a nonzero element of O_F");
      desc.conductors[pq->get_num()] = e;
    }
  }
  if (f.matrix) {
    json mj = parse_json("--matrix", *f.matrix);
    bool many = mj.is_array() && !mj.empty() && mj[0].is_array() && !mj[0].empty() && mj[0][0].is_array() &&
                !mj[0][0].empty() && mj[0][0][0].is_array();
    // a list of matrices has depth 3 for real entries, 4 for [re, im] entries;
    // tell them apart by the innermost row length
    if (!many && mj.is_array() && !mj.empty() && mj[0].is_array() && !mj[0].empty() && mj[0][0].is_array() &&
        mj[0][0].size() != 2)
      many = true;
    if (many) {
      for (std::size_t i = 0; i < mj.size(); ++i) desc.arch_generators.push_back(to_cmat(mj[i], sub("--matrix", i)));
    } else {
      desc.arch_generators.push_back(to_cmat(mj, "--matrix"));
    }
  }
  auto rep = nonarch_and_global_disc(desc);
  auto mo = maximal_order(desc.K);
  auto db = divisor_bound_check(desc);

  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.disc.v1";
  r["K"] = desc.K.str();
  r["D_F"] = jz(F.disc());
  r["D_K"] = jz(mo.disc);
  json rows = json::array();
  for (const auto& row : rep.finite)
    rows.push_back({{"place", row.place.label()},
                    {"rel_disc_val", row.rel_disc_val},
                    {"conductor_val", row.conductor_val},
                    {"disc_u", jz(row.disc_u)}});
  r["finite"] = rows;
  r["disc_fin"] = jz(rep.disc_fin);
  r["arch"] = rep.arch;
  r["disc"] = jd(rep.disc);
  r["maximal_type"] = rep.maximal_type;
  r["divisor_bound"] = {{"b", db.b},          {"two_b", jz(db.two_b)},       {"tau_disc", jz(db.tau_disc)},
                        {"pass", db.pass},    {"tau_ideal", jz(db.tau_ideal)}, {"pass_ideal", db.pass_ideal}};
  return o;
}

json quartic_json(const QuarticClassification& c) {
  return {{"group", c.group},
          {"type", c.name()},
          {"resolvent_rational_roots", c.resolvent_rational_roots},
          {"disc_square", c.disc_square}};
}

Outcome cmd_classify(const Flags& f, const RunConfig&) {
  json tj = parse_json("--tower", need(f.tower, "--tower"));
  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.classify.v1";
  if (tj.is_object() && tj.contains("poly")) {
    only_keys(tj, {"poly"}, "--tower");
    const json& pj = tj["poly"];
    if (!pj.is_array() || pj.size() != 5)
      throw CliError("--tower/poly", "expected 5 coefficients c0..c4 of a monic quartic");
    std::vector<Q> cs;
    for (std::size_t i = 0; i < 5; ++i) cs.push_back(to_q(pj[i], sub("--tower/poly", i)));
    if (cs[4] != 1) throw CliError("--tower/poly/4", "quartic must be monic");
    if (!quartic_irreducible(cs)) throw CliError("--tower/poly", "quartic is reducible over Q");
    r["input"] = "poly";
    r["resolvent"] = quartic_json(classify_quartic(cs));
    r["type"] = r["resolvent"]["type"];
    return o;
  }
  QuarticTower K = quartic(tj, "--tower");
  auto c = classify_galois_type(K);
  r["input"] = "tower";
  r["tower"] = K.str();
  r["type"] = to_string(c.type());
  r["resolvent"] = quartic_json(c.resolvent);
  r["quadratic_subfields"] = c.quadratic_subfields;
  r["witness"] = c.witness ? json(c.witness->str()) : json(nullptr);
  r["by_norm"] = to_string(c.by_norm);
  r["consistent"] = c.consistent;
  if (!c.consistent) {
    o.code = kError;
    o.note = "classification routes disagree";
  }
  return o;
}

Outcome cmd_cyclic(const Flags& f, const RunConfig&) {
  json tj = parse_json("--tower", need(f.tower, "--tower"));
  QuarticTower K = quartic(tj, "--tower");
  if (K.type() != GaloisType::Cyclic) throw CliError("--tower/delta", "tower is not cyclic");
  auto c = cyclic_disc_check(K);
  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.cyclic-check.v1";
  r["tower"] = K.str();
  r["D_K"] = jz(c.D_K);
  r["D_F"] = jz(c.D_F);
  r["D_rel"] = jq(c.D_rel);
  r["pass"] = c.pass;
  r["W"] = jz(c.W);
  r["d"] = jz(c.d);
  r["shape_ok"] = c.shape_ok;
  if (!c.pass || !c.shape_ok) {
    o.code = kError;
    o.note = "D_{K/F} >= D_F / 4 or the discriminant shape fails";
  }
  return o;
}

double log_of(const std::optional<std::string>& v, const char* flag) {
  Q q = flag_q(flag, need(v, flag));
  if (q <= 0) throw CliError(flag, "must be positive");
  return log_abs(q);
}

Outcome cmd_linnik(const Flags& f, const RunConfig&) {
  double ld = log_of(f.disc, "--disc"), lv = log_of(f.vol, "--vol");
  double lf = f.DF ? log_of(f.DF, "--DF") : 0.0;
  double lk = f.DK ? log_of(f.DK, "--DK") : -1.0;
  double c = f.c.value_or(1.0);
  if (!(c > 0)) throw CliError("--c", "c must be positive");
  auto L = linnik_rhs(ld, lv, need(f.tau, "--tau"), need(f.h, "--h"), f.eps.value_or(0.0), std::log(c), lf, lk);
  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.linnik-rhs.v1";
  r["value"] = L.value;
  r["log_value"] = L.log_value;
  r["tau_max"] = L.tau_max;
  r["in_hypothesis"] = L.in_hypothesis;
  r["special"] = jd(L.special);
  r["proxy"] = L.proxy;
  if (!L.in_hypothesis) {
    o.code = kHypothesis;
    o.note = "tau outside (0, tau_max]";
  }
  return o;
}

Outcome cmd_verify_all(const Flags&, const RunConfig& cfg, std::ostream& err) {
  AcceptanceOptions opt;
  opt.seed = cfg.seed;
  opt.budget = cfg.budget;
  opt.precision_bits = cfg.precision_bits;
  opt.tail_target = cfg.tail_target;
  Outcome o;
  json& r = o.report;
  r["schema"] = "alk.verify-all.v1";
  r["seed"] = cfg.seed;
  r["precision_bits"] = cfg.precision_bits;
  r["budget"] = cfg.budget;
  r["tail_target"] = cfg.tail_target;
  json cs = json::array();
  bool all = true;
  for (const auto& c : run_acceptance(opt)) {
    err << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << "  " << c.name << '\n';
    cs.push_back({{"id", c.id},
                  {"name", c.name},
                  {"pass", c.pass},
                  {"checks", c.checks},
                  {"failures", c.failures},
                  {"detail", c.detail}});
    all = all && c.pass;
  }
  r["pass"] = all;
  r["criteria"] = cs;
  if (!all) {
    o.code = kError;
    o.note = "acceptance failures";
  }
  return o;
}

void add_common(CLI::App* s, Flags& f) {
  s->add_option("--format", f.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  s->add_option("--budget", f.budget, "enumeration budget (lattice points)");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"alk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Arithmetic toolkit for quadratic and quartic fields, lattices and tori", "alk"};
  app.require_subcommand(1);

  auto* theta = app.add_subcommand("theta", "theta invariants of a Gram matrix or a line bundle");
  theta->add_option("--matrix", f.matrix, "rational Gram matrix, JSON rows");
  theta->add_option("--field", f.field, "{\"d\": d}; with --rinf/--rfin radii");
  theta->add_option("--rinf", f.rinf, "infinite radius, or one per infinite place");
  theta->add_option("--rfin", f.rfin, "[{\"p\":, \"place\":, \"k\":}] finite radii q^k");
  theta->add_option("--tail", f.tail, "theta tail target");

  auto* box = app.add_subcommand("count-box", "count field elements in a box of radii");
  box->add_option("--field", f.field, "{\"d\": d}")->required();
  box->add_option("--rinf", f.rinf, "infinite radius, or one per infinite place");
  box->add_option("--rfin", f.rfin, "[{\"p\":, \"place\":, \"k\":}] finite radii q^k");
  box->add_option("--c", f.c, "constant c in ||r|| >= c D_F");

  auto* local = app.add_subcommand("local", "local coordinates and psi of a 2x2 matrix");
  local->add_option("--field", f.field, "{\"d\": D, \"f\": conductor}")->required();
  local->add_option("--prime", f.prime, "p")->required();
  local->add_option("--matrix", f.matrix, "2x2 rational matrix")->required();

  auto* inv = app.add_subcommand("invariants", "Psi invariants of a 4x4 matrix");
  inv->add_option("--tower", f.tower, "{\"d\": d, \"delta\": [a, b]}")->required();
  inv->add_option("--matrix", f.matrix, "4x4 rational matrix")->required();

  auto* ent = app.add_subcommand("entropy", "entropy quantities of a diagonal element");
  ent->add_option("--tower", f.tower, "{\"type\": ...} or {\"d\":, \"delta\":}")->required();
  ent->add_option("--matrix", f.matrix, "diagonal entries")->required();
  ent->add_option("--prime", f.prime, "p, or 0 for the real place");

  auto* tw = app.add_subcommand("tau-window", "admissible tau interval");
  tw->add_option("--tower", f.tower, "{\"type\": ...} or {\"d\":, \"delta\":}");
  tw->add_option("--matrix", f.matrix, "diagonal entries of a");
  tw->add_option("--prime", f.prime, "p, or 0 for the real place");
  tw->add_option("--eta", f.eta, "eta, when no matrix is given");
  tw->add_option("--hint", f.hint, "h_int, when no matrix is given");
  tw->add_option("--DK", f.DK, "D_K");
  tw->add_option("--DF", f.DF, "D_F");
  tw->add_option("--c", f.c, "constant c");
  tw->add_option("--kappa", f.kappa, "kappa");
  tw->add_option("--mode", f.mode, "main, refined or dominant");
  tw->add_option("--beta", f.beta, "beta (refined mode)");
  tw->add_option("--eps", f.eps, "eps (dominant mode)");

  auto* disc = app.add_subcommand("disc", "discriminant of a toral set");
  disc->add_option("--tower", f.tower, "{\"d\": d or absent for Q, \"delta\": ...}")->required();
  disc->add_option("--conductor", f.conductor, "{\"p\": element of O_F}");
  disc->add_option("--matrix", f.matrix, "Archimedean generator(s); entries real or [re, im]");

  auto* cls = app.add_subcommand("classify", "Galois type of a quartic");
  cls->add_option("--tower", f.tower, "{\"d\":, \"delta\":} or {\"poly\": [c0, ..., c4]}")->required();

  auto* cyc = app.add_subcommand("cyclic-check", "relative discriminant inequality for a cyclic quartic");
  cyc->add_option("--tower", f.tower, "{\"d\":, \"delta\":}")->required();

  auto* lin = app.add_subcommand("linnik-rhs", "right-hand side of the Linnik estimate");
  lin->set_help_flag("--help", "Print this help message and exit");  // frees -h/--h
  lin->add_option("--disc", f.disc, "disc")->required();
  lin->add_option("--vol", f.vol, "vol")->required();
  lin->add_option("--tau", f.tau, "tau")->required();
  lin->add_option("--h", f.h, "entropy h")->required();
  lin->add_option("--eps", f.eps, "eps");
  lin->add_option("--c", f.c, "constant c");
  lin->add_option("--DF", f.DF, "D_F");
  lin->add_option("--DK", f.DK, "D_K, enables the special-case value");

  auto* ver = app.add_subcommand("verify-all", "run the acceptance suite");
  ver->add_option("--seed", f.seed, "base seed");
  ver->add_option("--tail", f.tail, "theta tail target");

  for (auto* s : app.get_subcommands({})) add_common(s, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kError;
  }

  RunConfig cfg;
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    cfg.apply_env();
    if (f.seed) cfg.seed = *f.seed;
    if (f.budget) {
      if (*f.budget <= 0) throw CliError("--budget", "must be positive");
      cfg.budget = *f.budget;
    }
    if (f.tail) {
      if (!(*f.tail > 0 && *f.tail < 1)) throw CliError("--tail", "must lie in (0, 1)");
      cfg.tail_target = *f.tail;
    }
    cfg.format = f.format == "csv" ? Format::Csv : Format::Json;

    Outcome o;
    if (name == "theta") o = cmd_theta(f, cfg);
    else if (name == "count-box") o = cmd_count_box(f, cfg);
    else if (name == "local") o = cmd_local(f, cfg);
    else if (name == "invariants") o = cmd_invariants(f, cfg);
    else if (name == "entropy") o = cmd_entropy(f, cfg);
    else if (name == "tau-window") o = cmd_tau_window(f, cfg);
    else if (name == "disc") o = cmd_disc(f, cfg);
    else if (name == "classify") o = cmd_classify(f, cfg);
    else if (name == "cyclic-check") o = cmd_cyclic(f, cfg);
    else if (name == "linnik-rhs") o = cmd_linnik(f, cfg);
    else o = cmd_verify_all(f, cfg, err);
    write_report(o.report, cfg.format, out);
    if (!o.note.empty()) err << "alk " << name << ": " << o.note << '\n';
    return o.code;
  } catch (const CliError& e) {
    err << "alk " << name << ": error at " << e.where << ": " << e.what() << '\n';
  } catch (const InputError& e) {
    err << "alk " << name << ": invalid input: " << e.what() << '\n';
  } catch (const BudgetExceeded& e) {
    err << "alk " << name << ": budget exceeded: " << e.what() << '\n';
  } catch (const PrecisionError& e) {
    err << "alk " << name << ": precision: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "alk " << name << ": " << e.what() << '\n';
  }
  return kError;
}

}  // namespace alk::cli
