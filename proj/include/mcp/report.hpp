#pragma once

#include "mcp/builtins.hpp"
#include "mcp/contact_pair.hpp"
#include "mcp/dsl.hpp"
#include "mcp/foliation.hpp"
#include "mcp/metric.hpp"
#include "mcp/polarization.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mcp {

using Json = nlohmann::ordered_json;

/// Problems with the input itself; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int failure = 1;
inline constexpr int input = 2;
}  // namespace exit_code

enum class Command { validate, detect, certify, associate };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::validate: return "validate";
    case Command::detect: return "detect";
    case Command::certify: return "certify";
    case Command::associate: return "associate";
  }
  return "?";
}

struct Overrides {
  std::optional<Rational> kappa;
  std::optional<double> tol;
};

struct Settings {
  Rational kappa = default_kappa();
  double tol = default_tolerance;
};

/// Command line beats the config block, which beats the defaults.
inline Settings resolve(const InstanceSpec& s, const Overrides& o) {
  Settings out;
  if (s.config.kappa) out.kappa = *s.config.kappa;
  if (s.config.tol) out.tol = *s.config.tol;
  if (o.kappa) out.kappa = *o.kappa;
  if (o.tol) out.tol = *o.tol;
  return out;
}

struct Seed {
  enum class Kind { identity, metric, random };
  Kind kind = Kind::identity;
  std::uint64_t value = 0;

  /// "identity", "metric" or "random:<n>".
  static Seed parse(const std::string& text) {
    if (text == "identity") return {};
    if (text == "metric") return {Kind::metric, 0};
    if (text.rfind("random:", 0) == 0) {
      const std::string digits = text.substr(7);
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (!digits.empty() && ec == std::errc() && p == digits.data() + digits.size()) return {Kind::random, v};
    }
    throw InputError("seed must be identity, metric or random:<n>, got '" + text + "'");
  }
  std::string str() const {
    switch (kind) {
      case Kind::identity: return "identity";
      case Kind::metric: return "metric";
      case Kind::random: return "random:" + std::to_string(value);
    }
    return "?";
  }
};

struct Outcome {
  int exit_code = exit_code::success;
  Json report;
  std::optional<std::string> written;  // .cps text produced by associate
};

namespace report_detail {

inline Json check_json(const CheckResult& c, bool with_residual) {
  Json j;
  j["ok"] = c.ok;
  if (with_residual) j["residual"] = c.residual;
  if (!c.witness.empty()) j["witness"] = c.witness;
  return j;
}

inline Json vectors_json(const std::vector<Vector>& vs) {
  Json j = Json::array();
  for (const auto& v : vs) j.push_back(render_vector(v));
  return j;
}

inline Json endomorphism_json(const QMatrix& phi) {
  Json j = Json::object();
  for (std::size_t i = 0; i < phi.cols(); ++i) {
    Vector img = phi.column(i);
    if (!img.is_zero()) j["X" + std::to_string(i + 1)] = render_vector(img);
  }
  return j;
}

inline Json matrix_json(const QMatrix& m) {
  Json j = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
    j.push_back(row);
  }
  return j;
}

inline Json matrix_json(const FMatrix& m) {
  Json j = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

inline Json header(const InstanceSpec& s, Command c, const Settings& st) {
  Json j;
  j["instance"] = s.name;
  j["command"] = command_name(c);
  j["kappa"] = to_string(st.kappa);
  j["tol"] = st.tol;
  return j;
}

/// First monomial ω_I with d(dω_I) ≠ 0, over every degree up to n - 2.
inline std::optional<std::string> d_squared_witness(const LieAlgebra& L) {
  const std::size_t n = L.dim();
  for (std::size_t p = 1; p + 2 <= n; ++p) {
    Monomial idx(p);
    for (std::size_t i = 0; i < p; ++i) idx[i] = i;
    while (true) {
      Form w = Form::monomial(n, idx, Rational(1));
      Form dd = L.differential(L.differential(w));
      if (!dd.is_zero()) return "d(d(" + render(w, L.names()) + ")) = " + render(dd, L.names());
      std::size_t i = p;
      while (i > 0 && idx[i - 1] == n - p + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < p; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

inline Json algebra_json(const LieAlgebra& L, bool& ok) {
  Json j;
  j["dim"] = L.dim();
  j["basis"] = L.names();
  j["jacobi"] = true;
  auto dd = d_squared_witness(L);
  j["d_squared_zero"] = !dd;
  if (dd) {
    j["d_squared_witness"] = *dd;
    ok = false;
  }
  auto cls = nilpotency_class(L);
  j["nilpotency_class"] = cls ? Json(*cls) : Json(nullptr);
  Json br = Json::object();
  for (std::size_t a = 0; a < L.dim(); ++a)
    for (std::size_t b = a + 1; b < L.dim(); ++b) {
      Vector v = L.bracket(a, b);
      if (!v.is_zero()) br["[X" + std::to_string(a + 1) + ",X" + std::to_string(b + 1) + "]"] = render_vector(v);
    }
  j["brackets"] = br;
  return j;
}

struct PairStage {
  std::optional<LieAlgebra> algebra;
  std::optional<ContactPair> pair;
  bool ok = false;
};

/// Builds the algebra and certifies the pair, filling `r`.
inline PairStage pair_stage(const InstanceSpec& s, Json& r) {
  PairStage st;
  if (!s.pair) throw InputError("instance '" + s.name + "' has no pair block");
  try {
    st.algebra = build_algebra(s);
  } catch (const JacobiError& e) {
    r["algebra"] = {{"jacobi", false}, {"witness", e.what()}};
    return st;
  }
  const LieAlgebra& L = *st.algebra;
  bool alg_ok = true;
  r["algebra"] = algebra_json(L, alg_ok);
  Json pj;
  pj["alpha1"] = render(s.pair->first, s.basis);
  pj["alpha2"] = render(s.pair->second, s.basis);
  try {
    st.pair = ContactPair::certify(L, s.pair->first, s.pair->second);
  } catch (const ContactPairError& e) {
    pj["contact_pair"] = false;
    pj["error"] = e.what();
    pj["diagnostics"] = e.diagnostics;
    r["pair"] = pj;
    return st;
  }
  const ContactPair& p = *st.pair;
  pj["contact_pair"] = true;
  pj["type"] = {{"h", p.type().h}, {"k", p.type().k}};
  pj["reeb"] = {{"Z1", render_vector(p.z1())}, {"Z2", render_vector(p.z2())}};
  pj["distributions"] = {{"TF1", vectors_json(p.tf1().basis())},
                         {"TF2", vectors_json(p.tf2().basis())},
                         {"TG1", vectors_json(p.tg1().basis())},
                         {"TG2", vectors_json(p.tg2().basis())}};
  bool ids_ok = true;
  Json ids = Json::object();
  for (const auto& c : pair_identities(L, p)) {
    Json cj = {{"ok", c.ok}};
    if (!c.ok && !c.witness.empty()) cj["witness"] = c.witness;
    ids[c.name] = cj;
    ids_ok = ids_ok && c.ok;
  }
  pj["identities"] = ids;
  pj["leaves_heisenberg"] = {{"F1", is_heisenberg(L, p.tf1())}, {"F2", is_heisenberg(L, p.tf2())}};
  r["pair"] = pj;
  st.ok = alg_ok && ids_ok;
  return st;
}

inline Json foliation_json(const FoliationReport& f, bool& ok) {
  Json j;
  j["name"] = f.name;
  j["basis"] = vectors_json(f.distribution.basis());
  j["mean_curvature"] = render_vector(f.mean_curvature);
  j["minimal"] = f.minimal;
  Json rum = {{"minimal", f.rummler.minimal}};
  if (f.rummler.witness) {
    rum["witness"] = render_vector(*f.rummler.witness);
    rum["value"] = to_string(f.rummler.value);
  }
  j["rummler"] = rum;
  j["verdicts_agree"] = f.minimal == f.rummler.minimal;
  j["totally_geodesic"] = f.totally_geodesic;
  Json wit = Json::array();
  const auto& b = f.distribution.basis();
  for (const auto& e : f.nonzero_second_fundamental)
    wit.push_back({{"u", render_vector(b[e.i])}, {"v", render_vector(b[e.j])}, {"normal", render_vector(e.normal)}});
  j["second_fundamental_witnesses"] = wit;
  Json ch;
  ch["unit"] = render(f.characteristic.unit);
  ch["scale_squared"] = to_string(f.characteristic.scale_squared);
  auto ex = f.characteristic.exact();
  ch["form"] = ex ? Json(render(*ex)) : Json(nullptr);
  j["characteristic_form"] = ch;
  ok = ok && f.minimal && f.rummler.minimal;
  return j;
}

}  // namespace report_detail

inline Outcome run_validate(const InstanceSpec& s, const Settings& st) {
  using namespace report_detail;
  Outcome o;
  o.report = header(s, Command::validate, st);
  try {
    LieAlgebra L = build_algebra(s);
    bool ok = true;
    o.report["algebra"] = algebra_json(L, ok);
    o.exit_code = ok ? exit_code::success : exit_code::failure;
  } catch (const JacobiError& e) {
    o.report["algebra"] = {{"jacobi", false}, {"witness", e.what()}};
    o.exit_code = exit_code::failure;
  }
  o.report["exit_code"] = o.exit_code;
  return o;
}

inline Outcome run_detect(const InstanceSpec& s, const Settings& st) {
  using namespace report_detail;
  Outcome o;
  o.report = header(s, Command::detect, st);
  auto stage = pair_stage(s, o.report);
  o.exit_code = stage.ok ? exit_code::success : exit_code::failure;
  o.report["exit_code"] = o.exit_code;
  return o;
}

inline Outcome run_certify(const InstanceSpec& s, const Settings& st) {
  using namespace report_detail;
  Outcome o;
  o.report = header(s, Command::certify, st);
  auto stage = pair_stage(s, o.report);
  bool ok = stage.ok;
  if (ok && s.metric) {
    const LieAlgebra& L = *stage.algebra;
    const ContactPair& p = *stage.pair;
    std::optional<MetricTensor> g;
    try {
      g.emplace(*s.metric);
    } catch (const MetricError& e) {
      throw InputError(e.what());
    }
    auto data = PairData<Rational>::from(p);
    QMatrix derived = phi_from_metric(g->matrix(), data.omega, st.kappa);
    QMatrix phi = s.phi ? *s.phi : derived;
    // -φ pairs with -κ; every other identity is sign invariant
    const bool opposite = s.phi && phi != derived && phi == -derived;
    auto cert = certify_metric(data, g->matrix(), phi, opposite ? Rational(-st.kappa) : st.kappa);

    Json mj;
    mj["matrix"] = matrix_json(g->matrix());
    mj["phi"] = endomorphism_json(phi);
    mj["phi_source"] = s.phi ? "declared" : "derived";
    mj["phi_matches_metric"] = phi == derived || opposite;
    mj["phi_sign"] = opposite ? "opposite" : "standard";
    mj["reeb_metric"] = check_json(cert.reeb_metric, false);
    mj["phi_pairing"] = check_json(cert.phi_pairing, false);
    mj["structure_tensor"] = check_json(cert.structure, false);
    mj["compatible"] = check_json(cert.compatible, false);
    mj["associated"] = check_json(cert.associated, false);
    mj["decomposable"] = check_json(cert.decomposable, false);
    mj["orthogonal"] = check_json(cert.orthogonal, false);
    mj["decomposable_iff_orthogonal"] = cert.theorem_equivalence_holds();
    o.report["metric"] = mj;
    ok = ok && cert.all_true() && cert.theorem_equivalence_holds();

    auto conn = levi_civita(L, g->matrix());
    auto [torsion, compat] = connection_identities(L, g->matrix(), conn);
    o.report["connection"] = {{"torsion_free", torsion.ok}, {"metric_compatible", compat.ok}};
    ok = ok && torsion.ok && compat.ok;

    Json fol = Json::array();
    fol.push_back(foliation_json(analyze_foliation(L, g->matrix(), conn, p.tf1(), "F1"), ok));
    fol.push_back(foliation_json(analyze_foliation(L, g->matrix(), conn, p.tf2(), "F2"), ok));
    o.report["foliations"] = fol;

    if (cert.associated.ok && cert.decomposable.ok) {
      auto v = volume_identity(L, p, *g, st.kappa);
      Json vj;
      vj["det_g"] = to_string(v.det_g);
      vj["volume_coefficient"] = v.volume_coefficient ? Json(to_string(*v.volume_coefficient)) : Json(nullptr);
      vj["top_coefficient"] = to_string(v.top_coefficient);
      vj["constant"] = to_string(v.constant);
      vj["rhs_coefficient"] = to_string(v.rhs_coefficient);
      vj["holds"] = v.holds;
      o.report["volume"] = vj;
      ok = ok && v.holds;
    } else {
      o.report["volume"] = {{"skipped", "needs an associated metric with decomposable phi"}};
    }
  } else if (ok && s.phi) {
    throw InputError("phi block requires a metric block");
  }
  o.exit_code = ok ? exit_code::success : exit_code::failure;
  o.report["exit_code"] = o.exit_code;
  return o;
}

inline Outcome run_associate(const InstanceSpec& s, const Settings& st, const Seed& seed) {
  using namespace report_detail;
  Outcome o;
  o.report = header(s, Command::associate, st);
  o.report["seed"] = seed.str();
  if (seed.kind == Seed::Kind::metric && !s.metric) throw InputError("seed 'metric' needs a metric block");
  auto stage = pair_stage(s, o.report);
  if (!stage.ok) {
    o.report["refused"] = "not a certified contact pair";
    o.exit_code = exit_code::failure;
    o.report["exit_code"] = o.exit_code;
    return o;
  }
  const ContactPair& p = *stage.pair;
  const std::size_t n = p.dim();
  QMatrix qseed = seed.kind == Seed::Kind::identity ? QMatrix::identity(n)
                  : seed.kind == Seed::Kind::metric ? *s.metric
                                                    : random_rational_spd(n, seed.value);
  if (seed.kind == Seed::Kind::random) o.report["seed_matrix"] = matrix_json(qseed);
  try {
    auto built = build_associated_metric(p, qseed.cast<double>(), st.kappa, st.tol);
    const auto& res = built.residuals;
    const auto& c = res.certificate;
    o.report["metric"] = matrix_json(built.metric);
    o.report["phi"] = matrix_json(built.phi);
    o.report["iterations"] = built.iterations;
    o.report["residuals"] = {{"symmetry", res.symmetry},
                             {"positive_definite", res.positive_definite},
                             {"reeb_metric", check_json(c.reeb_metric, true)},
                             {"phi_pairing", check_json(c.phi_pairing, true)},
                             {"structure_tensor", check_json(c.structure, true)},
                             {"compatible", check_json(c.compatible, true)},
                             {"decomposable", check_json(c.decomposable, true)},
                             {"orthogonal", check_json(c.orthogonal, true)},
                             {"max", res.max_residual()}};
    auto vol = volume_identity(*stage.algebra, p, built.metric, st.kappa, st.tol);
    o.report["volume"] = {{"volume_coefficient", vol.volume_coefficient},
                          {"rhs_coefficient", vol.rhs_coefficient},
                          {"holds", vol.holds}};
    bool ok = res.ok() && c.associated.ok && vol.holds;
    o.report["certified"] = ok;
    o.exit_code = ok ? exit_code::success : exit_code::failure;

    InstanceSpec out = s;
    QMatrix g(n, n), phi(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        g(i, j) = rationalize(0.5 * (built.metric(i, j) + built.metric(j, i)));
        phi(i, j) = rationalize(built.phi(i, j));
      }
    out.metric = g;
    out.phi = phi;
    out.config.kappa = st.kappa;
    out.config.tol = st.tol;
    o.written = render_instance(out);
  } catch (const MetricError& e) {
    o.report["error"] = e.what();
    o.exit_code = exit_code::failure;
  } catch (const ConvergenceError& e) {
    o.report["error"] = e.what();
    o.exit_code = exit_code::failure;
  }
  o.report["exit_code"] = o.exit_code;
  return o;
}

inline Outcome run_command(Command c, const InstanceSpec& s, const Overrides& ov, const Seed& seed = {}) {
  Settings st = resolve(s, ov);
  switch (c) {
    case Command::validate: return run_validate(s, st);
    case Command::detect: return run_detect(s, st);
    case Command::certify: return run_certify(s, st);
    case Command::associate: return run_associate(s, st, seed);
  }
  throw InputError("unknown command");
}

namespace report_detail {

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "none";
  return v.dump();
}

inline bool is_flat(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& e : v)
    if (e.is_structured()) return false;
  return true;
}

inline void text_lines(const Json& v, int indent, std::ostringstream& os) {
  const std::string pad(indent, ' ');
  for (auto it = v.begin(); it != v.end(); ++it) {
    const Json& val = it.value();
    const std::string key = v.is_object() ? it.key() : "-";
    if (val.is_object()) {
      os << pad << key << ":";
      if (val.empty()) os << " {}";
      os << '\n';
      text_lines(val, indent + 2, os);
    } else if (is_flat(val)) {
      os << pad << key << ": [";
      for (std::size_t i = 0; i < val.size(); ++i) os << (i ? ", " : "") << scalar_text(val[i]);
      os << "]\n";
    } else if (val.is_array()) {
      os << pad << key << ":\n";
      for (const auto& e : val) {
        if (is_flat(e)) {
          os << pad << "  - [";
          for (std::size_t i = 0; i < e.size(); ++i) os << (i ? ", " : "") << scalar_text(e[i]);
          os << "]\n";
        } else {
          os << pad << "  -\n";
          text_lines(e, indent + 4, os);
        }
      }
    } else {
      os << pad << key << ": " << scalar_text(val) << '\n';
    }
  }
}

}  // namespace report_detail

/// Plain-text rendering of a report.
inline std::string render_text(const Json& report) {
  std::ostringstream os;
  report_detail::text_lines(report, 0, os);
  return os.str();
}

/// Canonical machine-readable rendering; Json::parse(render_json(r)) re-renders identically.
inline std::string render_json(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace mcp
