#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "model_io.hpp"
#include "nikit/error.hpp"
#include "nikit/freq_cert.hpp"
#include "nikit/loop_analysis.hpp"
#include "nikit/ni_cert.hpp"
#include "nikit/zoh.hpp"

namespace nikit::cli {
namespace {

constexpr std::size_t kReportedViolations = 5;

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

Json optional_string(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

Json error_object(const std::string& kind, const std::string& message,
                  const std::optional<std::string>& location = std::nullopt) {
  Json e{{"kind", kind}, {"message", message}};
  if (location) e["location"] = *location;
  return e;
}

/// Runs body with the shared report skeleton and maps every failure to exit 2.
CommandResult guarded(const std::string& command, Json args,
                      const std::function<int(Json&)>& body) {
  CommandResult result;
  result.report = Json{{"command", command}, {"args", std::move(args)}};
  Json& r = result.report;
  try {
    result.exit_code = body(r);
  } catch (const ParseError& e) {
    r["error"] = error_object("ParseError", e.what(), e.location());
    result.exit_code = kExitError;
  } catch (const IoError& e) {
    r["error"] = error_object("IoError", e.what());
    result.exit_code = kExitError;
  } catch (const UsageError& e) {
    r["error"] = error_object("UsageError", e.what());
    result.exit_code = kExitError;
  } catch (const Error& e) {
    r["error"] = error_object(std::string(to_string(e.kind())), e.what());
    result.exit_code = kExitError;
  } catch (const std::exception& e) {
    r["error"] = error_object("InternalError", e.what());
    result.exit_code = kExitError;
  }
  r["exit_code"] = result.exit_code;
  r["verdict"] = result.exit_code == kExitPass   ? "pass"
                 : result.exit_code == kExitFail ? "fail"
                                                 : "error";
  return result;
}

Json system_json(const DiscreteStateSpace& sys) {
  Json j{{"A", to_json(sys.A())}, {"B", to_json(sys.B())}, {"C", to_json(sys.C())}};
  if (!sys.strictly_proper()) j["D"] = to_json(sys.D());
  return j;
}

bool has_storage(const StorageCertificate& c) { return c.P.size() > 0; }

Json certificate_json(const DiscreteStateSpace& sys, const StorageCertificate& c) {
  Json j{{"valid", c.valid},
         {"epsilon", optional_number(c.epsilon)},
         {"min_eig_P", number(c.min_eig_P)},
         {"min_eig_M", number(c.min_eig_M)},
         {"psd_threshold", number(c.psd_threshold)}};
  if (has_storage(c)) {
    Matrix M = build_M(sys, c.P).M;
    if (c.epsilon) {
      const Matrix N = output_increment_map(sys);
      M -= *c.epsilon * N.transpose() * N;
    }
    j["P"] = to_json(c.P);
    j["eigenvalues_P"] = sym_eigenvalues(c.P);
    j["eigenvalues_M"] = sym_eigenvalues(M);
  } else {
    j["P"] = nullptr;
  }
  return j;
}

Json violation_json(const Violation& v) {
  return Json{{"index", v.index}, {"excess", number(v.excess)}, {"x", to_json(v.x)},
              {"u", to_json(v.u)}};
}

struct AuditOutcome {
  Json report;
  std::size_t violations = 0;
};

AuditOutcome run_dissipation_audit(const DiscreteStateSpace& sys, const Matrix& P,
                                   double lmi_epsilon, std::uint64_t seed, std::size_t samples,
                                   double box) {
  AuditOptions opts;
  opts.epsilon = definition_strictness(lmi_epsilon);
  opts.seed = seed;
  opts.count = samples;
  const auto found = audit_dissipation(linear_dynamics(sys), quadratic_storage(P),
                                       uniform_box_sampler(sys.states(), sys.ports(), -box, box),
                                       opts);
  Json first = Json::array();
  for (std::size_t i = 0; i < found.size() && i < kReportedViolations; ++i) {
    first.push_back(violation_json(found[i]));
  }
  AuditOutcome out;
  out.violations = found.size();
  out.report = Json{{"seed", seed},
                    {"samples", samples},
                    {"box", Json::array({number(-box), number(box)})},
                    {"epsilon", number(lmi_epsilon)},
                    {"penalty", number(opts.epsilon)},
                    {"violations", found.size()},
                    {"first_violations", std::move(first)}};
  return out;
}

std::optional<CertifyRoute> parse_route(const std::string& route) {
  if (route == "auto") return std::nullopt;
  if (route == "A") return CertifyRoute::EqualityConstrained;
  if (route == "B") return CertifyRoute::AlternatingProjection;
  throw UsageError("--route must be auto, A or B");
}

Vector parse_vector(const std::string& text, Eigen::Index expected) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size() || !std::isfinite(v)) {
      throw UsageError("--x0: \"" + item + "\" is not a finite number");
    }
    values.push_back(v);
  }
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw UsageError("--x0 has " + std::to_string(values.size()) + " entries, the loop has " +
                     std::to_string(expected) + " states");
  }
  return Eigen::Map<const Vector>(values.data(), expected);
}

std::string format_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& t) {
  const auto n = t.states.front().size();
  const auto p = t.plant_outputs.empty() ? 0 : t.plant_outputs.front().size();
  std::string out = "k";
  for (Eigen::Index i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= p; ++i) out += ",y" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    out += std::to_string(k);
    for (Eigen::Index i = 0; i < n; ++i) out += "," + format_csv_number(t.states[k](i));
    for (Eigen::Index i = 0; i < p; ++i) {
      out += "," + (k < t.plant_outputs.size() ? format_csv_number(t.plant_outputs[k](i)) : "");
    }
    out += "\n";
  }
  return out;
}

struct SideCertificate {
  bool certified = false;
  Matrix P;
  Json report;
};

/// Certifies the strictly proper realization of one loop side, from a given
/// storage when the model carries one.
SideCertificate certify_side(const DiscreteStateSpace& inner, const std::optional<Matrix>& given) {
  SideCertificate out;
  StorageCertificate cert;
  if (given) {
    cert = check_ni_with_P(inner, *given);
    out.report["source"] = "model";
  } else {
    const CertifyResult r = certify_ni(inner);
    cert = r.certificate;
    out.report["source"] = "search";
    out.report["route"] = std::string(to_string(r.route));
    out.report["status"] = std::string(to_string(r.status));
  }
  out.certified = cert.valid;
  out.P = cert.P;
  out.report["certified"] = cert.valid;
  out.report["certificate"] = certificate_json(inner, cert);
  return out;
}

}  // namespace

CommandResult error_result(const std::string& command, const std::string& kind,
                           const std::string& message) {
  CommandResult result;
  result.exit_code = kExitError;
  result.report = Json{{"command", command},
                       {"error", error_object(kind, message)},
                       {"exit_code", kExitError},
                       {"verdict", "error"}};
  return result;
}

CommandResult run_certify(const CertifyArgs& a) {
  Json args{{"model", a.model},       {"osni", optional_number(a.osni)},
            {"sani", a.sani},         {"saosni", a.saosni},
            {"with_P", optional_string(a.with_P)}, {"seed", a.seed},
            {"samples", a.samples},   {"route", a.route}};
  return guarded("certify", std::move(args), [&](Json& r) {
    if (a.sani && a.saosni) throw UsageError("--sani and --saosni are mutually exclusive");
    if (a.osni && !(*a.osni >= 0.0 && std::isfinite(*a.osni))) {
      throw UsageError("--osni needs a finite nonnegative epsilon");
    }
    CertifyOptions opts;
    opts.only_route = parse_route(a.route);
    const ModelFile model = read_model(a.model);
    const std::optional<Matrix> given = a.with_P ? std::optional(read_storage(*a.with_P)) : model.P;
    std::optional<double> eps = a.osni ? a.osni : model.epsilon;
    const bool advanced = a.sani || a.saosni;

    DiscreteStateSpace sys = model.discrete_system();
    r["property"] = a.saosni ? "SAOSNI" : a.sani ? (eps ? "SAOSNI" : "SANI") : eps ? "OSNI" : "NI";
    if (advanced) {
      const StepAdvanceRealization sa = recover_step_advance(sys);
      r["step_advance"] = Json{{"inner", system_json(sa.inner)},
                               {"C_hat", to_json(sa.C_hat)},
                               {"consistency_residual", number(sa.consistency_residual)}};
      sys = sa.inner;
    } else if (!sys.strictly_proper()) {
      throw Error(ErrorKind::NotStrictlyProper,
                  "D is nonzero; use --sani or --saosni for step-advanced models");
    }

    StorageCertificate cert;
    std::string status;
    if (given) {
      if (given->rows() != sys.states() || given->cols() != sys.states()) {
        throw ParseError(a.with_P.value_or(a.model) + ":/P",
                         "expected a " + std::to_string(sys.states()) + "x" +
                             std::to_string(sys.states()) + " matrix");
      }
      cert = eps ? check_osni_with_P(sys, *given, *eps) : check_ni_with_P(sys, *given);
      r["route"] = "given";
      status = cert.valid ? "certified" : "not_certified";
    } else {
      const CertifyResult found = certify_ni(sys, opts);
      r["route"] = std::string(to_string(found.route));
      r["iterations"] = found.iterations;
      r["detail"] = found.detail;
      status = std::string(to_string(found.status));
      cert = found.certificate;
      if (found.certified() && eps) {
        cert = check_osni_with_P(sys, found.certificate.P, *eps);
        if (!cert.valid) status = "not_certified";
      }
    }

    std::optional<double> eps_max;
    if (has_storage(cert) && cert.min_eig_P > 0.0) eps_max = max_output_strictness(sys, cert.P);
    r["epsilon_max"] = optional_number(eps_max);
    if (a.saosni && cert.valid && !eps) {
      if (*eps_max > 0.0 && std::isfinite(*eps_max)) {
        eps = eps_max;
        cert = check_osni_with_P(sys, cert.P, *eps);
      }
      if (!(*eps_max > 0.0) || !cert.valid) {
        cert.valid = false;
        status = "not_certified";
        r["detail"] = "no positive output strictness for this storage";
      }
    }
    r["status"] = status;
    r["certificate"] = certificate_json(sys, cert);

    if (cert.valid) {
      const AuditOutcome audit =
          run_dissipation_audit(sys, cert.P, eps.value_or(0.0), a.seed, a.samples, 10.0);
      r["audit"] = audit.report;
      if (audit.violations > 0) {
        throw Error(ErrorKind::InternalInconsistency,
                    "certificate passed the eigenvalue checks but the sampled audit found " +
                        std::to_string(audit.violations) + " violations");
      }
    }
    return cert.valid ? kExitPass : kExitFail;
  });
}

CommandResult run_freq(const FreqArgs& a) {
  Json args{{"model", a.model}, {"grid", a.grid}, {"exclusion", number(a.exclusion)}};
  return guarded("freq", std::move(args), [&](Json& r) {
    if (!(a.exclusion >= 0.0) || !std::isfinite(a.exclusion)) {
      throw UsageError("--exclusion must be a finite nonnegative half-width");
    }
    const ModelFile model = read_model(a.model);
    FreqOptions opts;
    opts.grid_size = a.grid;
    opts.exclusion_half_width = a.exclusion;
    const FreqReport rep = freq_check(model.discrete_system(), opts);

    std::size_t worst = 0;
    for (std::size_t i = 1; i < rep.min_eigs.size(); ++i) {
      if (rep.min_eigs[i] < rep.min_eigs[worst]) worst = i;
    }
    Json windows = Json::array();
    for (const auto& w : rep.exclusion_windows) windows.push_back({number(w[0]), number(w[1])});
    Json excluded = Json::array();
    for (double t : rep.excluded) excluded.push_back(number(t));
    Json circle = Json::array();
    for (const CirclePole& cp : rep.circle_poles) {
      Json c{{"theta0", number(cp.theta0)}, {"simple", cp.simple}};
      if (cp.residue) {
        c["residue"] = Json{{"K0", to_json(cp.residue->K0)},
                            {"hermitian", cp.residue->hermitian},
                            {"hermitian_defect", number(cp.residue->hermitian_defect)},
                            {"min_eig", number(cp.residue->min_eig)},
                            {"psd", cp.residue->psd}};
      }
      circle.push_back(std::move(c));
    }
    r["pass"] = rep.pass;
    r["grid_size"] = a.grid;
    r["evaluated"] = rep.grid.size();
    r["excluded"] = std::move(excluded);
    r["exclusion_windows"] = std::move(windows);
    r["worst_min_eig"] = number(rep.worst_min_eig());
    r["worst_theta"] = rep.grid.empty() ? Json(nullptr) : number(rep.grid[worst]);
    r["condition_matrix_psd"] = rep.condition_matrix_psd;
    r["no_poles_outside"] = rep.no_poles_outside;
    r["max_pole_modulus"] = number(rep.max_pole_modulus);
    r["residues_ok"] = rep.residues_ok;
    r["circle_poles"] = std::move(circle);
    r["warnings"] = rep.warnings;
    return rep.pass ? kExitPass : kExitFail;
  });
}

CommandResult run_zoh(const ZohArgs& a) {
  Json args{{"model", a.model}, {"period", number(a.period)}, {"out", optional_string(a.out)}};
  return guarded("zoh", std::move(args), [&](Json& r) {
    const ModelFile model = read_model(a.model);
    const ContinuousStateSpace& csys = model.continuous_system();
    const DiscreteStateSpace d = discretize_zoh(csys, SamplePeriod(a.period));
    r["discrete"] = system_json(d);
    if (a.out) {
      write_text(*a.out, model_text(d));
      const ModelFile back = read_model(*a.out);
      const DiscreteStateSpace& e = back.discrete_system();
      const bool exact = e.A() == d.A() && e.B() == d.B() && e.C() == d.C();
      if (!exact) {
        throw Error(ErrorKind::InternalInconsistency, "re-reading " + *a.out + " changed the model");
      }
      r["round_trip_exact"] = exact;
    }
    if (!model.P) return kExitPass;
    const ContinuousNiVerdict cont = audit_continuous_ni(csys, ContinuousQuadraticStorage(*model.P));
    const StorageCertificate disc = check_ni_with_P(d, *model.P);
    r["storage"] = Json{{"continuous_pass", cont.pass},
                        {"continuous_min_eig", number(cont.min_eig)},
                        {"discrete", certificate_json(d, disc)}};
    return cont.pass && disc.valid ? kExitPass : kExitFail;
  });
}

CommandResult run_loop(const LoopArgs& a) {
  Json args{{"plant", a.plant},       {"controller", a.controller},
            {"advance", a.advance},   {"simulate", a.simulate},
            {"x0", optional_string(a.x0)}, {"csv", optional_string(a.csv)}};
  return guarded("loop", std::move(args), [&](Json& r) {
    AdvanceSide side;
    if (a.advance == "controller") {
      side = AdvanceSide::Controller;
    } else if (a.advance == "plant") {
      side = AdvanceSide::Plant;
    } else {
      throw UsageError("--advance must be plant or controller");
    }
    if (a.simulate < 0) throw UsageError("--simulate needs a nonnegative step count");
    const ModelFile plant_file = read_model(a.plant);
    const ModelFile controller_file = read_model(a.controller);
    const DiscreteStateSpace& plant = plant_file.discrete_system();
    const DiscreteStateSpace& controller = controller_file.discrete_system();

    LoopModel loop = close_loop(plant, controller, side);
    const DcGainCondition dc = dc_gain_condition(plant, controller);
    r["A_cl"] = to_json(loop.A_cl);
    r["spectral_radius"] = number(loop.spectral_radius());
    r["dc_gain_condition"] = Json{{"lambda_max", number(dc.lambda_max)},
                                  {"satisfied", dc.satisfied},
                                  {"eigenvalues", to_json(dc.eigenvalues)}};

    const SideCertificate p = certify_side(loop.plant_inner, plant_file.P);
    SideCertificate c = certify_side(loop.controller_inner, controller_file.P);
    std::optional<double> eps;
    if (c.certified) {
      eps = max_output_strictness(loop.controller_inner, c.P);
      c.report["epsilon_max"] = number(*eps);
    }
    r["plant"] = p.report;
    r["controller"] = c.report;
    const bool strict = eps && *eps > 0.0;
    const bool certified = p.certified && c.certified && strict;
    r["certified"] = certified;

    if (certified) {
      loop = with_certificates(std::move(loop), p.P, c.P);
      const LyapunovMatrix& W = loop.certificates->lyapunov;
      r["lyapunov_W"] = Json{{"W", to_json(W.W)},
                             {"min_eig", number(W.min_eig)},
                             {"positive_definite", W.positive_definite},
                             {"schur_min_eig", number(W.schur_min_eig)}};
    }

    bool decrease_ok = true;
    if (a.simulate > 0) {
      const auto n = loop.A_cl.rows();
      const Vector x0 = a.x0 ? parse_vector(*a.x0, n) : Vector::Ones(n);
      const Trajectory t = simulate(loop, x0, a.simulate);
      r["simulation"] = Json{{"x0", to_json(x0)},
                             {"steps", t.steps()},
                             {"diverged", t.diverged},
                             {"converged", t.converged},
                             {"final_state_norm", number(t.states.back().norm())}};
      if (certified && std::isfinite(*eps)) {
        const LyapunovDecreaseReport ld = verify_lyapunov_decrease(loop, t, *eps);
        decrease_ok = ld.pass;
        r["lyapunov_decrease"] = Json{{"epsilon", number(*eps)},
                                      {"pass", ld.pass},
                                      {"max_excess", number(ld.max_excess)},
                                      {"max_identity_residual", number(ld.max_identity_residual)},
                                      {"steps_checked", ld.steps_checked}};
      }
      if (a.csv) write_text(*a.csv, trajectory_csv(t));
    }
    return dc.satisfied && certified && decrease_ok ? kExitPass : kExitFail;
  });
}

CommandResult run_audit(const AuditArgs& a) {
  Json args{{"model", a.model},     {"P", optional_string(a.P)},
            {"epsilon", optional_number(a.epsilon)}, {"seed", a.seed},
            {"samples", a.samples}, {"box", number(a.box)},
            {"inner", a.inner}};
  return guarded("audit", std::move(args), [&](Json& r) {
    if (!(a.box > 0.0) || !std::isfinite(a.box)) throw UsageError("--box must be positive");
    if (a.epsilon && !(*a.epsilon >= 0.0 && std::isfinite(*a.epsilon))) {
      throw UsageError("--epsilon needs a finite nonnegative value");
    }
    const ModelFile model = read_model(a.model);
    DiscreteStateSpace sys = model.discrete_system();
    if (a.inner) {
      sys = recover_step_advance(sys).inner;
    } else if (!sys.strictly_proper()) {
      throw Error(ErrorKind::NotStrictlyProper,
                  "D is nonzero; use --inner to audit the step-advanced model's inner system");
    }
    const std::optional<Matrix> P = a.P ? std::optional(read_storage(*a.P)) : model.P;
    if (!P) throw UsageError("no storage: pass --P or add \"P\" to the model");
    if (P->rows() != sys.states() || P->cols() != sys.states()) {
      throw ParseError(a.P.value_or(a.model) + ":/P",
                       "expected a " + std::to_string(sys.states()) + "x" +
                           std::to_string(sys.states()) + " matrix");
    }
    const double eps = a.epsilon ? *a.epsilon : model.epsilon.value_or(0.0);
    const AuditOutcome audit = run_dissipation_audit(sys, *P, eps, a.seed, a.samples, a.box);
    r["audit"] = audit.report;
    return audit.violations == 0 ? kExitPass : kExitFail;
  });
}

}  // namespace nikit::cli
